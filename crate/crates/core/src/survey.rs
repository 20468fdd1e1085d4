//! Cycle-structure survey over random `(p, g)` pairs from a dyadic range,
//! compared with random-permutation statistics, plus fixed-point averages
//! over the odd primes up to a bound.
//!
//! # Sampling
//!
//! Pair `index` of a survey with seed `seed` is drawn from a ChaCha8 stream:
//! the generator is seeded with `seed_from_u64(seed)` and switched to stream
//! number `index`, so pairs are independent of each other and of the worker
//! count. From that stream:
//!
//! 1. `p = 2^(m-1) + (x >> (65 - m))` for successive 64-bit words `x` until
//!    `p` is prime (uniform over `I_m = [2^(m-1), 2^m - 1]`);
//! 2. `g = 1 + x mod (p-1)` for successive words `x` below the largest
//!    multiple of `p-1` (uniform over `[1, p-1]`) until `g` is a primitive
//!    root.
//!
//! Each step gives up after `SAMPLE_RETRY_CAP` draws.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expmap::{decompose, fixed_point_profile, CycleDecomposition};
use crate::numtheory::{factorize, is_generator, is_prime, ExpMapParams};

/// Expected normalized lengths of the three longest cycles of a uniform
/// random permutation (Shepp-Lloyd; `G1` is the Golomb-Dickman constant).
pub const G1: f64 = 0.624329;
pub const G2: f64 = 0.209580;
pub const G3: f64 = 0.088316;
/// Limit of `cycles / ln n` for a uniform random permutation.
pub const GAMMA_REFERENCE: f64 = 1.0;
/// Artin's constant.
pub const ARTIN: f64 = 0.373955;
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

pub const SAMPLE_RETRY_CAP: u64 = 100_000;

/// Largest `Q` accepted by the fixed-point averages.
pub const ARTIN_MAX_Q: u64 = 10_000;

pub const CSV_HEADER: &str = "p,g,lambda1,lambda2,lambda3,gamma,num_cycles,c1,c2,c3,smallest_cycle";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyConfig {
    /// Dyadic exponent: primes are drawn from `[2^(m-1), 2^m - 1]`.
    pub m: u32,
    pub pairs: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SurveyConfig {
    pub fn new(m: u32, pairs: u64, seed: u64, workers: usize) -> Result<Self> {
        if !(3..=63).contains(&m) {
            return Err(Error::InvalidConfig(format!("m = {m} must be in [3, 63]")));
        }
        if pairs == 0 {
            return Err(Error::InvalidConfig("pairs must be at least 1".into()));
        }
        if workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(Self {
            m,
            pairs,
            seed,
            workers,
        })
    }

    /// `(2^(m-1), 2^m - 1)`.
    pub fn interval(&self) -> (u64, u64) {
        (1 << (self.m - 1), (1 << self.m) - 1)
    }
}

/// Deterministic `(p, g)` for sample `index`, see the module docs.
pub fn sample_pair(config: &SurveyConfig, index: u64) -> Result<(u64, u64)> {
    if index >= config.pairs {
        return Err(Error::OutOfRange {
            name: "index",
            value: index,
            lo: 0,
            hi: config.pairs - 1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);

    let (lo, _) = config.interval();
    let shift = 65 - config.m;
    let p = (0..SAMPLE_RETRY_CAP)
        .map(|_| lo + (rng.next_u64() >> shift))
        .find(|&c| is_prime(c))
        .ok_or(Error::RetryCapExceeded {
            what: "a prime",
            attempts: SAMPLE_RETRY_CAP,
        })?;

    let n = p - 1;
    let group = factorize(n);
    let limit = u64::MAX - u64::MAX % n;
    let g = (0..SAMPLE_RETRY_CAP)
        .map(|_| rng.next_u64())
        .filter(|&x| x < limit)
        .map(|x| 1 + x % n)
        .find(|&g| is_generator(g, p, &group))
        .ok_or(Error::RetryCapExceeded {
            what: "a primitive root",
            attempts: SAMPLE_RETRY_CAP,
        })?;
    Ok((p, g))
}

/// Per-pair cycle statistics. Ranks beyond the number of cycles are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyRecord {
    pub p: u64,
    pub g: u64,
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    /// Number of cycles over `ln(p - 1)`.
    pub gamma: f64,
    pub num_cycles: u64,
    pub c1: u64,
    pub c2: Option<u64>,
    pub c3: Option<u64>,
    pub smallest_cycle: u64,
}

impl SurveyRecord {
    pub fn from_decomposition(d: &CycleDecomposition) -> Self {
        let n = (d.p - 1) as f64;
        let lambda = |rank| d.longest(rank).map(|c| c as f64 / n);
        Self {
            p: d.p,
            g: d.g,
            lambda1: lambda(1).expect("at least one cycle"),
            lambda2: lambda(2),
            lambda3: lambda(3),
            gamma: d.num_cycles as f64 / n.ln(),
            num_cycles: d.num_cycles,
            c1: d.longest(1).expect("at least one cycle"),
            c2: d.longest(2),
            c3: d.longest(3),
            smallest_cycle: d.smallest(),
        }
    }

    pub fn csv_row(&self) -> String {
        fn opt_f(v: Option<f64>) -> String {
            v.map(|x| format!("{x:.8}")).unwrap_or_default()
        }
        fn opt_u(v: Option<u64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{:.8},{},{},{:.8},{},{},{},{},{}",
            self.p,
            self.g,
            self.lambda1,
            opt_f(self.lambda2),
            opt_f(self.lambda3),
            self.gamma,
            self.num_cycles,
            self.c1,
            opt_u(self.c2),
            opt_u(self.c3),
            self.smallest_cycle
        )
    }
}

pub fn analyze_pair(p: u64, g: u64, budget: &Budget) -> Result<SurveyRecord> {
    let params = ExpMapParams::new(p, g)?;
    if p < 3 {
        // ln(p - 1) = 0 makes gamma undefined
        return Err(Error::InvalidConfig("survey pairs need p >= 3".into()));
    }
    let d = decompose(&params, budget)?;
    Ok(SurveyRecord::from_decomposition(&d))
}

/// Samples and analyzes every pair on a pool of `config.workers` threads.
/// Records come back in sample-index order whatever the worker count.
pub fn run_survey(config: &SurveyConfig, budget: &Budget) -> Result<Vec<SurveyRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..config.pairs)
            .into_par_iter()
            .map(|i| {
                let (p, g) = sample_pair(config, i)?;
                analyze_pair(p, g, budget)
            })
            .collect()
    })
}

pub fn to_csv(records: &[SurveyRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceConstants {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub gamma: f64,
}

/// Survey means. Ranks 2 and 3 average only over records that have them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyAggregate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<SurveyConfig>,
    pub count: u64,
    pub mean_lambda1: f64,
    pub mean_lambda2: Option<f64>,
    pub lambda2_count: u64,
    pub mean_lambda3: Option<f64>,
    pub lambda3_count: u64,
    pub mean_gamma: f64,
    pub mean_smallest_cycle: f64,
    /// Mean of `e^(-euler_gamma) ln p` over the same records.
    pub smallest_cycle_reference: f64,
    pub reference: ReferenceConstants,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<(f64, u64)> {
    let (sum, n) = values.fold((0.0, 0u64), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| (sum / n as f64, n))
}

/// Means over `records`, taken in `(p, g)` order so the result does not
/// depend on input order.
pub fn aggregate(records: &[SurveyRecord]) -> Result<SurveyAggregate> {
    if records.is_empty() {
        return Err(Error::EmptyInput("survey aggregate"));
    }
    let mut sorted: Vec<&SurveyRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.p, a.g)
            .cmp(&(b.p, b.g))
            .then(a.lambda1.total_cmp(&b.lambda1))
    });
    let it = || sorted.iter().copied();
    let (mean_lambda1, count) = mean(it().map(|r| r.lambda1)).unwrap();
    let l2 = mean(it().filter_map(|r| r.lambda2));
    let l3 = mean(it().filter_map(|r| r.lambda3));
    Ok(SurveyAggregate {
        config: None,
        count,
        mean_lambda1,
        mean_lambda2: l2.map(|m| m.0),
        lambda2_count: l2.map_or(0, |m| m.1),
        mean_lambda3: l3.map(|m| m.0),
        lambda3_count: l3.map_or(0, |m| m.1),
        mean_gamma: mean(it().map(|r| r.gamma)).unwrap().0,
        mean_smallest_cycle: mean(it().map(|r| r.smallest_cycle as f64)).unwrap().0,
        smallest_cycle_reference: mean(it().map(|r| (-EULER_MASCHERONI).exp() * (r.p as f64).ln()))
            .unwrap()
            .0,
        reference: ReferenceConstants {
            g1: G1,
            g2: G2,
            g3: G3,
            gamma: GAMMA_REFERENCE,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtinMode {
    PrimitiveRoots,
    AllBases,
}

/// Both normalized fixed-point averages over the odd primes `p <= q`;
/// `prime_count` is the number of those primes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArtinAverages {
    pub q: u64,
    pub prime_count: u64,
    /// `(1/pi(Q)) sum_p (1/(p-1)) sum_{g primitive} N_{p,g}(1)`; tends to Artin's constant.
    pub primitive_roots: f64,
    /// `(1/pi(Q)) sum_p (1/(p-1)) sum_g N_{p,g}(1)`; tends to 1.
    pub all_bases: f64,
    pub artin_constant: f64,
}

impl ArtinAverages {
    pub fn get(&self, mode: ArtinMode) -> f64 {
        match mode {
            ArtinMode::PrimitiveRoots => self.primitive_roots,
            ArtinMode::AllBases => self.all_bases,
        }
    }
}

/// One scan per prime feeds both averages. Primes run in parallel on the
/// current rayon pool; the sums are taken in prime order.
pub fn artin_averages(q: u64, budget: &Budget) -> Result<ArtinAverages> {
    if q < 3 {
        return Err(Error::OutOfRange {
            name: "Q",
            value: q,
            lo: 3,
            hi: ARTIN_MAX_Q,
        });
    }
    if q > ARTIN_MAX_Q {
        return Err(Error::OverBudget {
            what: "fixed-point averages (Q)",
            needed: q,
            limit: ARTIN_MAX_Q,
        });
    }
    let primes: Vec<u64> = (3..=q).filter(|&p| is_prime(p)).collect();
    let per_prime: Vec<(f64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let profile = fixed_point_profile(p, budget)?;
            let group = factorize(p - 1);
            let (mut prim, mut all) = (0u64, 0u64);
            for g in 1..p {
                let n = profile[g as usize];
                all += n;
                if is_generator(g, p, &group) {
                    prim += n;
                }
            }
            let scale = (p - 1) as f64;
            Ok((prim as f64 / scale, all as f64 / scale))
        })
        .collect::<Result<_>>()?;
    let count = primes.len() as f64;
    let (prim, all) = per_prime
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    Ok(ArtinAverages {
        q,
        prime_count: primes.len() as u64,
        primitive_roots: prim / count,
        all_bases: all / count,
        artin_constant: ARTIN,
    })
}

pub fn artin_average(q: u64, mode: ArtinMode, budget: &Budget) -> Result<f64> {
    Ok(artin_averages(q, budget)?.get(mode))
}
