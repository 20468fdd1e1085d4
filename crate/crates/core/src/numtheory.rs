//! Exact 64-bit number theory: modular arithmetic, primality, factorization,
//! multiplicative orders and primitive roots.
//!
//! Every modulus handled here is at most 2^63, so products of two residues
//! fit in a `u128` and no big-integer arithmetic is needed.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus / input accepted by the crate.
pub const MAX_MODULUS: u64 = 1 << 63;

/// Witnesses for the strong-pseudoprime test. Testing against the first
/// twelve primes is exact for every n < 3.3 * 10^24, hence for all `u64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Trial division runs up to this bound before Pollard rho takes over.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` by square-and-multiply.
///
/// The result is in `[0, modulus - 1]`; `exp = 0` yields `1 % modulus`.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut base = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Number of bits needed to write `n` (0 for `n = 0`).
pub fn bit_length(n: u64) -> u32 {
    u64::BITS - n.leading_zeros()
}

/// Deterministic primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization `n = prod p_i^e_i` with primes in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs sorted by prime.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    /// Euler's totient of `n`.
    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .fold(self.n, |acc, &(q, _)| acc / q * (q - 1))
    }

    /// Number of positive divisors of `n`.
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// All positive divisors of `n` in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(q, e) in &self.factors {
            let len = divs.len();
            let mut pw = 1u64;
            for _ in 0..e {
                pw *= q;
                for i in 0..len {
                    divs.push(divs[i] * pw);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Complete factorization of `1 <= n <= 2^63`.
///
/// Trial division removes every factor below 10^6; whatever cofactor remains
/// is split by Brent's variant of Pollard rho with fixed increments, so the
/// result is a pure function of `n`.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut primes = Vec::new();
    let mut m = n;
    while m.is_multiple_of(2) {
        primes.push(2);
        m /= 2;
    }
    let mut d = 3u64;
    while d <= TRIAL_DIVISION_LIMIT && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += 2;
    }
    if m > 1 {
        split_into(m, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Factorization { n, factors }
}

fn split_into(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let d = pollard_brent(m);
    split_into(d, out);
    split_into(m / d, out);
}

/// Returns a nontrivial divisor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // the batch overshot; replay one step at a time
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn check_unit(g: u64, p: u64) -> Result<()> {
    if p >= MAX_MODULUS {
        return Err(Error::ModulusTooLarge(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if g.is_multiple_of(p) {
        return Err(Error::DivisibleByModulus { value: g, p });
    }
    Ok(())
}

/// Order of `g` in the multiplicative group mod `p`, given the factorization
/// of `p - 1`.
fn order_with(g: u64, p: u64, group: &Factorization) -> u64 {
    let mut order = p - 1;
    for &(q, e) in group.factors() {
        for _ in 0..e {
            if mod_pow(g, order / q, p) == 1 {
                order /= q;
            } else {
                break;
            }
        }
    }
    order
}

/// Smallest `T >= 1` with `g^T = 1 (mod p)`.
pub fn multiplicative_order(g: u64, p: u64) -> Result<u64> {
    check_unit(g, p)?;
    if p == 2 {
        return Ok(1);
    }
    Ok(order_with(g, p, &factorize(p - 1)))
}

/// True iff `g` generates the multiplicative group mod `p`.
pub fn is_primitive_root(g: u64, p: u64) -> Result<bool> {
    check_unit(g, p)?;
    if p == 2 {
        return Ok(true);
    }
    Ok(is_generator(g, p, &factorize(p - 1)))
}

/// Generator test given the factorization of `p - 1`: `g^((p-1)/q) != 1` for
/// every prime `q | p - 1`.
pub(crate) fn is_generator(g: u64, p: u64, group: &Factorization) -> bool {
    group.primes().all(|q| mod_pow(g, (p - 1) / q, p) != 1)
}

/// Number of primitive roots mod `p`, i.e. `phi(p - 1)`.
pub fn count_primitive_roots(p: u64) -> Result<u64> {
    check_unit(1, p)?;
    Ok(factorize(p - 1).totient())
}

/// Smallest primitive root mod `p`.
pub fn smallest_primitive_root(p: u64) -> Result<u64> {
    check_unit(1, p)?;
    if p == 2 {
        return Ok(1);
    }
    let group = factorize(p - 1);
    Ok((2..p)
        .find(|&g| is_generator(g, p, &group))
        .expect("a prime modulus always has a primitive root"))
}

/// The arena for every computation: a prime `p`, a base `g` and the derived
/// order of `g`, bit length of `p` and primitive-root flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpMapParams {
    p: u64,
    g: u64,
    order: u64,
    bit_length: u32,
    is_primitive_root: bool,
}

impl ExpMapParams {
    /// Validates `p` an odd prime (`p < 2^63`) and `1 <= g <= p - 1`.
    pub fn new(p: u64, g: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::OutOfRange {
                name: "p",
                value: 2,
                lo: 3,
                hi: MAX_MODULUS - 1,
            });
        }
        if g == 0 || g >= p {
            return Err(Error::OutOfRange {
                name: "g",
                value: g,
                lo: 1,
                hi: p - 1,
            });
        }
        let order = order_with(g, p, &factorize(p - 1));
        Ok(Self {
            p,
            g,
            order,
            bit_length: bit_length(p),
            is_primitive_root: order == p - 1,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    /// Multiplicative order `T` of `g` mod `p`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Bit length `r` of `p`: `2^(r-1) <= p < 2^r`.
    pub fn bit_length(&self) -> u32 {
        self.bit_length
    }

    pub fn is_primitive_root(&self) -> bool {
        self.is_primitive_root
    }
}
