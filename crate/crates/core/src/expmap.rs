//! The exponential map `u -> g^u mod p` on `{1, ..., p-1}`: single steps,
//! trajectories (tail and cycle), full cycle decompositions when `g` is a
//! primitive root, and fixed-point counts.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::numtheory::{self, gcd, mod_inverse, mod_pow, mul_mod, ExpMapParams};

/// Anything that can evaluate `u -> g^u mod p` for `u` in `[1, p-1]`.
///
/// `image` is unchecked; callers guarantee the argument range.
pub trait ExpMap {
    fn params(&self) -> &ExpMapParams;
    fn image(&self, u: u64) -> u64;
}

impl ExpMap for ExpMapParams {
    fn params(&self) -> &ExpMapParams {
        self
    }

    #[inline]
    fn image(&self, u: u64) -> u64 {
        mod_pow(self.g(), u, self.p())
    }
}

/// Precomputed `g^u mod p` for every `u < p`, built with one multiplication
/// per entry. Only available for `p <= 2^32`.
#[derive(Clone, Debug)]
pub struct PowerTable {
    params: ExpMapParams,
    values: Vec<u32>,
}

impl PowerTable {
    pub fn bytes_for(p: u64) -> u64 {
        4 * p
    }

    pub fn build(params: &ExpMapParams, budget: &Budget) -> Result<Self> {
        let p = params.p();
        if p > 1 << 32 {
            return Err(Error::OverBudget {
                what: "power table (requires p <= 2^32)",
                needed: Self::bytes_for(p),
                limit: Self::bytes_for(1 << 32),
            });
        }
        budget.check_memory("power table", Self::bytes_for(p))?;
        let g = params.g();
        let mut values = Vec::with_capacity(p as usize);
        let mut x = 1u64;
        values.push(1);
        for _ in 1..p {
            x = x * g % p;
            values.push(x as u32);
        }
        Ok(Self {
            params: *params,
            values,
        })
    }
}

impl ExpMap for PowerTable {
    fn params(&self) -> &ExpMapParams {
        &self.params
    }

    #[inline]
    fn image(&self, u: u64) -> u64 {
        self.values[u as usize] as u64
    }
}

impl<M: ExpMap + ?Sized> ExpMap for &M {
    fn params(&self) -> &ExpMapParams {
        (**self).params()
    }

    #[inline]
    fn image(&self, u: u64) -> u64 {
        (**self).image(u)
    }
}

/// Fixed-size bit set, one bit per element.
#[derive(Clone, Debug)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn bytes_for(len: u64) -> u64 {
        len.div_ceil(64) * 8
    }

    pub(crate) fn new(len: u64) -> Self {
        Self {
            words: vec![0; len.div_ceil(64) as usize],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    /// Sets bit `i`, returning whether it was previously clear.
    #[inline]
    pub(crate) fn insert(&mut self, i: u64) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let mask = 1u64 << (i & 63);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }
}

pub(crate) fn check_value(params: &ExpMapParams, name: &'static str, u: u64) -> Result<()> {
    if u == 0 || u >= params.p() {
        return Err(Error::OutOfRange {
            name,
            value: u,
            lo: 1,
            hi: params.p() - 1,
        });
    }
    Ok(())
}

/// One application of the map. The representative is taken in `[1, p-1]`.
pub fn step(params: &ExpMapParams, u: u64) -> Result<u64> {
    check_value(params, "u", u)?;
    Ok(params.image(u))
}

/// Tail and cycle of the orbit of `u0`.
///
/// `tail` (s) and `cycle_len` (t) are the minimal values with
/// `u_n = u_{n+t}` for all `n >= s`; `cycle_entry` is `u_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub u0: u64,
    pub tail: u64,
    pub cycle_len: u64,
    pub cycle_entry: u64,
}

impl Trajectory {
    /// Trajectory length `s + t`.
    pub fn len(&self) -> u64 {
        self.tail + self.cycle_len
    }

    /// Always false: a trajectory holds at least `u0`.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Measures the orbit of `u0` in constant memory.
///
/// Brent's power-of-two search yields the exact cycle length; the tail is
/// then recovered by two walkers started `t` apart.
pub fn trajectory<M: ExpMap>(map: &M, u0: u64) -> Result<Trajectory> {
    check_value(map.params(), "u0", u0)?;
    let f = |x| map.image(x);

    let mut power = 1u64;
    let mut cycle_len = 1u64;
    let mut tortoise = u0;
    let mut hare = f(u0);
    while tortoise != hare {
        if power == cycle_len {
            tortoise = hare;
            power *= 2;
            cycle_len = 0;
        }
        hare = f(hare);
        cycle_len += 1;
    }

    let mut lead = u0;
    for _ in 0..cycle_len {
        lead = f(lead);
    }
    let mut trail = u0;
    let mut tail = 0u64;
    while trail != lead {
        trail = f(trail);
        lead = f(lead);
        tail += 1;
    }

    Ok(Trajectory {
        u0,
        tail,
        cycle_len,
        cycle_entry: trail,
    })
}

/// Cycle type of the permutation `x -> g^x mod p` of `{1, ..., p-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub p: u64,
    pub g: u64,
    /// Cycle lengths, longest first.
    pub cycle_lengths: Vec<u64>,
    /// Smallest element of each cycle, aligned with `cycle_lengths`.
    pub cycle_minima: Vec<u64>,
    pub num_cycles: u64,
}

impl CycleDecomposition {
    /// Length of the `rank`-th longest cycle (1-based).
    pub fn longest(&self, rank: usize) -> Option<u64> {
        rank.checked_sub(1)
            .and_then(|i| self.cycle_lengths.get(i))
            .copied()
    }

    pub fn smallest(&self) -> u64 {
        *self.cycle_lengths.last().expect("at least one cycle")
    }
}

/// How `decompose` evaluates the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecomposeStrategy {
    /// Power table when it fits the memory budget, direct otherwise.
    #[default]
    Auto,
    Table,
    Direct,
}

pub fn decompose(params: &ExpMapParams, budget: &Budget) -> Result<CycleDecomposition> {
    decompose_with(params, budget, DecomposeStrategy::Auto)
}

pub fn decompose_with(
    params: &ExpMapParams,
    budget: &Budget,
    strategy: DecomposeStrategy,
) -> Result<CycleDecomposition> {
    if !params.is_primitive_root() {
        return Err(Error::NotPrimitiveRoot {
            g: params.g(),
            p: params.p(),
        });
    }
    let p = params.p();
    let visited_bytes = BitSet::bytes_for(p);
    budget.check_memory("visited bitset", visited_bytes)?;
    let table_fits =
        p <= 1 << 32 && visited_bytes + PowerTable::bytes_for(p) <= budget.memory_bytes;
    let use_table = match strategy {
        DecomposeStrategy::Auto => table_fits,
        DecomposeStrategy::Table => {
            budget.check_memory(
                "visited bitset + power table",
                visited_bytes + PowerTable::bytes_for(p),
            )?;
            true
        }
        DecomposeStrategy::Direct => false,
    };
    if use_table {
        let rest = budget.with_memory(budget.memory_bytes - visited_bytes);
        let table = PowerTable::build(params, &rest)?;
        Ok(walk_cycles(&table))
    } else {
        Ok(walk_cycles(params))
    }
}

fn walk_cycles<M: ExpMap>(map: &M) -> CycleDecomposition {
    let params = *map.params();
    let p = params.p();
    let mut visited = BitSet::new(p);
    let mut cycles: Vec<(u64, u64)> = Vec::new();
    for start in 1..p {
        if visited.get(start) {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        loop {
            let fresh = visited.insert(x);
            debug_assert!(fresh, "element {x} reached twice");
            len += 1;
            x = map.image(x);
            if x == start {
                break;
            }
        }
        cycles.push((len, start));
    }
    cycles.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    CycleDecomposition {
        p,
        g: params.g(),
        num_cycles: cycles.len() as u64,
        cycle_lengths: cycles.iter().map(|c| c.0).collect(),
        cycle_minima: cycles.iter().map(|c| c.1).collect(),
    }
}

/// `N_{p,g}(k)`: how many `u0` in `[1, p-1]` satisfy `u_k = u0`.
///
/// Depths beyond 3 are refused unless `allow_large` is set; the scan costs
/// `(p - 1) * k` map evaluations, checked against the step budget.
pub fn fixed_point_count<M: ExpMap>(
    map: &M,
    k: u32,
    allow_large: bool,
    budget: &Budget,
) -> Result<u64> {
    if k == 0 || (k > 3 && !allow_large) {
        return Err(Error::FixedPointDepth(k));
    }
    let p = map.params().p();
    budget.check_steps("fixed-point scan", (p - 1).saturating_mul(k as u64))?;
    let mut count = 0u64;
    for u0 in 1..p {
        let mut x = u0;
        for _ in 0..k {
            x = map.image(x);
        }
        if x == u0 {
            count += 1;
        }
    }
    Ok(count)
}

/// `N_{p,g}(1)` for every base `g` at once; entry `g` of the result, index 0
/// unused.
///
/// Writing `g = h^a`, `u = h^b` for a primitive root `h`, the condition
/// `g^u = u` becomes `a*u = b (mod p-1)`, which has `gcd(u, p-1)` solutions
/// `a` when that gcd divides `b` and none otherwise. Cost is
/// `O(sum_u gcd(u, p-1))` after an `O(p)` discrete-log table.
pub fn fixed_point_profile(p: u64, budget: &Budget) -> Result<Vec<u64>> {
    if !numtheory::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > 1 << 32 {
        return Err(Error::OverBudget {
            what: "discrete-log table (requires p <= 2^32)",
            needed: 12 * p,
            limit: 12 << 32,
        });
    }
    budget.check_memory("discrete-log table", 12 * p)?;
    if p == 2 {
        return Ok(vec![0, 1]);
    }
    let n = p - 1;
    let h = numtheory::smallest_primitive_root(p)?;
    let mut log = vec![0u32; p as usize];
    let mut x = 1u64;
    for i in 0..n {
        log[x as usize] = i as u32;
        x = mul_mod(x, h, p);
    }
    let mut by_log = vec![0u64; n as usize];
    for u in 1..p {
        let b = log[u as usize] as u64;
        let d = gcd(u, n);
        if !b.is_multiple_of(d) {
            continue;
        }
        let m = n / d;
        let a0 = mul_mod(b / d, mod_inverse(u / d % m, m).unwrap_or(0), m.max(1));
        for j in 0..d {
            by_log[(a0 + j * m) as usize] += 1;
        }
    }
    let mut out = vec![0u64; p as usize];
    for g in 1..p {
        out[g as usize] = by_log[log[g as usize] as usize];
    }
    Ok(out)
}

/// Upper bound `sqrt(2p) + 1/2` on the number of fixed points, valid for every `g`.
pub fn fixed_point_upper_bound(p: u64) -> f64 {
    (2.0 * p as f64).sqrt() + 0.5
}

/// Upper bound `3p/4 + (g^(2g+1) + g + 1)/4` on `N_{p,g}(3)`, evaluated only
/// for `g <= 20`; larger bases make it astronomically vacuous.
pub fn period_three_upper_bound(p: u64, g: u64) -> Option<f64> {
    if g > 20 {
        return None;
    }
    let gf = g as f64;
    Some(0.75 * p as f64 + (gf.powi(2 * g as i32 + 1) + gf + 1.0) / 4.0)
}
