//! The truncated output sequence `xi_n = u_n mod 2^k`: its period, the
//! number of distinct values in a prefix, and value frequencies over the
//! full trajectory.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expmap::{BitSet, ExpMap, Trajectory};
use crate::numtheory::factorize;

/// Truncation width, `1 <= k <= 63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BitWidth(u32);

impl BitWidth {
    pub const MAX: u32 = 63;

    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > Self::MAX {
            return Err(Error::BitWidth(k));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn mask(self) -> u64 {
        (1u64 << self.0) - 1
    }

    /// Size of the output alphabet that can actually occur for residues below `p`.
    fn alphabet(self, p: u64) -> u64 {
        (1u64 << self.0).min(p)
    }
}

/// The `k` least significant bits of `u`.
#[inline]
pub fn extract_bits(u: u64, k: BitWidth) -> u64 {
    u & k.mask()
}

/// Period of the truncated sequence together with the orbit it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BitStats {
    pub k: BitWidth,
    pub tau: u64,
    pub trajectory: Trajectory,
}

pub fn bit_stats<M: ExpMap>(map: &M, traj: &Trajectory, k: BitWidth) -> BitStats {
    BitStats {
        k,
        tau: tau(map, traj, k),
        trajectory: *traj,
    }
}

/// Minimal period `tau_k` of `xi_s, xi_{s+1}, ...`.
///
/// Divisors `d` of `t` are tried in increasing order; each is tested by a
/// streaming comparison of `xi_n` against `xi_{n+d}` over one cycle, with a
/// second cursor kept `d` steps ahead. Memory is constant.
pub fn tau<M: ExpMap>(map: &M, traj: &Trajectory, k: BitWidth) -> u64 {
    let t = traj.cycle_len;
    if t == 1 {
        return 1;
    }
    let mask = k.mask();
    let entry = traj.cycle_entry;
    let mut ahead = entry;
    let mut offset = 0u64;
    for d in factorize(t).divisors() {
        if d == t {
            break;
        }
        while offset < d {
            ahead = map.image(ahead);
            offset += 1;
        }
        // for d | t, agreement on t - d consecutive positions implies it everywhere
        let (mut a, mut b) = (entry, ahead);
        let mut periodic = true;
        for _ in 0..t - d {
            if (a ^ b) & mask != 0 {
                periodic = false;
                break;
            }
            a = map.image(a);
            b = map.image(b);
        }
        if periodic {
            return d;
        }
    }
    t
}

/// `nu_k(N)`: number of distinct values among `xi_0, ..., xi_{N-1}`, for
/// `1 <= N <= s + t`.
pub fn nu<M: ExpMap>(map: &M, traj: &Trajectory, k: BitWidth, n: u64) -> Result<u64> {
    if n == 0 || n > traj.len() {
        return Err(Error::OutOfRange {
            name: "N",
            value: n,
            lo: 1,
            hi: traj.len(),
        });
    }
    let mask = k.mask();
    let alphabet = k.alphabet(map.params().p());
    let mut x = traj.u0;
    let mut distinct = 0u64;
    if alphabet <= 1 << 32 {
        let mut seen = BitSet::new(alphabet);
        for _ in 0..n {
            if seen.insert(x & mask) {
                distinct += 1;
            }
            x = map.image(x);
        }
    } else {
        let mut seen = HashSet::new();
        for _ in 0..n {
            if seen.insert(x & mask) {
                distinct += 1;
            }
            x = map.image(x);
        }
    }
    Ok(distinct)
}

/// Frequencies `V_k(w)` over the full trajectory `xi_0, ..., xi_{s+t-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreqTable {
    pub k: BitWidth,
    /// Trajectory length the counts sum to.
    pub ell: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl FreqTable {
    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Width limit for frequency tables.
pub const FREQ_MAX_BITS: u32 = 32;

const DENSE_COUNT_LIMIT: u64 = 1 << 24;

pub fn freq<M: ExpMap>(
    map: &M,
    traj: &Trajectory,
    k: BitWidth,
    budget: &Budget,
) -> Result<FreqTable> {
    if k.get() > FREQ_MAX_BITS {
        return Err(Error::BitWidth(k.get()));
    }
    let ell = traj.len();
    budget.check_steps("frequency table over the trajectory", ell)?;
    let mask = k.mask();
    let alphabet = k.alphabet(map.params().p());
    let mut x = traj.u0;
    let counts = if alphabet <= DENSE_COUNT_LIMIT {
        let mut dense = vec![0u64; alphabet as usize];
        for _ in 0..ell {
            dense[(x & mask) as usize] += 1;
            x = map.image(x);
        }
        dense
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(w, c)| (w as u64, c))
            .collect()
    } else {
        let mut sparse: HashMap<u64, u64> = HashMap::new();
        for _ in 0..ell {
            *sparse.entry(x & mask).or_default() += 1;
            x = map.image(x);
        }
        sparse.into_iter().collect()
    };
    Ok(FreqTable { k, ell, counts })
}

/// `Omega_k(U)`: strings whose frequency is at least `threshold`.
pub fn omega(table: &FreqTable, threshold: u64) -> BTreeSet<u64> {
    table
        .counts
        .iter()
        .filter(|&(_, &c)| c >= threshold)
        .map(|(&w, _)| w)
        .collect()
}

/// Largest number of times one consecutive pair `(xi_n, xi_{n+1})`,
/// `0 <= n < s + t`, occurs along the trajectory.
pub fn max_pair_count<M: ExpMap>(
    map: &M,
    traj: &Trajectory,
    k: BitWidth,
    budget: &Budget,
) -> Result<u64> {
    let ell = traj.len();
    budget.check_steps("pair count over the trajectory", ell)?;
    let mask = k.mask();
    let mut pairs: HashMap<(u64, u64), u64> = HashMap::new();
    let mut x = traj.u0;
    for _ in 0..ell {
        let y = map.image(x);
        *pairs.entry((x & mask, y & mask)).or_default() += 1;
        x = y;
    }
    Ok(pairs.into_values().max().unwrap_or(0))
}
