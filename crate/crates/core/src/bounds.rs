//! Executable forms of the period, value-count and frequency estimates for
//! the truncated exponential generator, the brute-force counts they bound,
//! and per-configuration consistency reports.
//!
//! Only the two counting bounds `tau_k >= t 2^(k-1)/p` and
//! `nu_k(N) >= N 2^(k-1)/p` (for `2^k < p`) are exact statements and are
//! asserted. Every other estimate holds up to an unspecified factor
//! (`p^o(1)`, `N^o(1)`, `c(eps)`, an implied `O` constant); those factors are
//! set to 1 and the resulting reports are informational only.
//!
//! Piecewise regimes are selected with exact integer arithmetic when they
//! depend on `k/r`, and in double precision (`b ln x <= a ln p`) when they
//! compare a size `x` against `p^(a/b)`. A shared boundary belongs to the
//! case whose inequality is non-strict: the upper case for `k/r >= c`, the
//! lower case for `x <= p^(a/b)`.

use std::collections::HashSet;

use serde::Serialize;

use crate::bitseq::{self, BitWidth};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::expmap::{BitSet, ExpMap, Trajectory};
use crate::numtheory::{is_prime, mul_mod, ExpMapParams};

/// Marker carried by every regime label whose bound hides an unspecified factor.
pub const UNSPECIFIED_FACTOR: &str = "up to unspecified factor";

/// Exponent `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Exponent(i64, i64);

impl Exponent {
    fn value(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

/// A case `k/r >= lower` of a bound of the form `2^(a k) p^b`.
#[derive(Clone, Copy, Debug)]
struct RatioRegime {
    /// `None` marks the final catch-all case.
    lower: Option<(u32, u32)>,
    label: &'static str,
    two_per_k: Exponent,
    p_exp: Exponent,
}

/// A case `x <= p^upper` of a bound of the form `x^c 2^(a k) p^b`.
#[derive(Clone, Copy, Debug)]
struct SizeRegime {
    upper: Option<Exponent>,
    label: &'static str,
    x_exp: Exponent,
    two_per_k: Exponent,
    p_exp: Exponent,
}

const fn ratio(
    lower: Option<(u32, u32)>,
    label: &'static str,
    two_per_k: (i64, i64),
    p_exp: (i64, i64),
) -> RatioRegime {
    RatioRegime {
        lower,
        label,
        two_per_k: Exponent(two_per_k.0, two_per_k.1),
        p_exp: Exponent(p_exp.0, p_exp.1),
    }
}

const fn size(
    upper: Option<(i64, i64)>,
    label: &'static str,
    x_exp: (i64, i64),
    two_per_k: (i64, i64),
    p_exp: (i64, i64),
) -> SizeRegime {
    SizeRegime {
        upper: match upper {
            Some((a, b)) => Some(Exponent(a, b)),
            None => None,
        },
        label,
        x_exp: Exponent(x_exp.0, x_exp.1),
        two_per_k: Exponent(two_per_k.0, two_per_k.1),
        p_exp: Exponent(p_exp.0, p_exp.1),
    }
}

const PERIOD_CONCENTRATION: [RatioRegime; 4] = [
    ratio(
        Some((17, 20)),
        "k/r >= 17/20: t*(2^k/p)^(1/3)",
        (1, 3),
        (-1, 3),
    ),
    ratio(
        Some((13, 16)),
        "13/16 <= k/r < 17/20: t*2^(7k/6)*p^(-25/24)",
        (7, 6),
        (-25, 24),
    ),
    ratio(
        Some((3, 5)),
        "3/5 <= k/r < 13/16: t*(2^k/p)^(1/2)",
        (1, 2),
        (-1, 2),
    ),
    ratio(None, "k/r < 3/5: t*2^(4k/3)*p^(-1)", (4, 3), (-1, 1)),
];

const PERIOD_COMBINED: [RatioRegime; 6] = [
    PERIOD_CONCENTRATION[0],
    PERIOD_CONCENTRATION[1],
    PERIOD_CONCENTRATION[2],
    ratio(
        Some((3, 8)),
        "3/8 <= k/r < 3/5: t*2^(4k/3)*p^(-1)",
        (4, 3),
        (-1, 1),
    ),
    ratio(
        Some((1, 4)),
        "1/4 <= k/r < 3/8: t*p^(-1/2)",
        (0, 1),
        (-1, 2),
    ),
    ratio(None, "k/r < 1/4: t*2^(2k)*p^(-1)", (2, 1), (-1, 1)),
];

const VALUE_CONCENTRATION: [RatioRegime; 4] = [
    ratio(
        Some((17, 20)),
        "k/r >= 17/20: N^(1/2)*(2^k/p)^(1/6)",
        (1, 6),
        (-1, 6),
    ),
    ratio(
        Some((13, 16)),
        "13/16 <= k/r < 17/20: N^(1/2)*2^(7k/12)*p^(-25/48)",
        (7, 12),
        (-25, 48),
    ),
    ratio(
        Some((3, 5)),
        "3/5 <= k/r < 13/16: N^(1/2)*(2^k/p)^(1/4)",
        (1, 4),
        (-1, 4),
    ),
    ratio(
        None,
        "k/r < 3/5: N^(1/2)*2^(2k/3)*p^(-1/2)",
        (2, 3),
        (-1, 2),
    ),
];

const VALUE_COMBINED: [RatioRegime; 6] = [
    VALUE_CONCENTRATION[0],
    VALUE_CONCENTRATION[1],
    VALUE_CONCENTRATION[2],
    ratio(
        Some((3, 8)),
        "3/8 <= k/r < 3/5: N^(1/2)*2^(2k/3)*p^(-1/2)",
        (2, 3),
        (-1, 2),
    ),
    ratio(
        Some((1, 4)),
        "1/4 <= k/r < 3/8: N^(1/2)*p^(-1/4)",
        (0, 1),
        (-1, 4),
    ),
    ratio(None, "k/r < 1/4: N^(1/2)*2^k*p^(-1/2)", (1, 1), (-1, 2)),
];

/// The second case's lower edge is taken as 13/16, like its siblings; a
/// 13/6 edge would be unreachable for `k <= r`.
const VALUE_COMBINED_NOTE: &str =
    "lower edge of the second case taken as 13/16 (a 13/6 edge is unreachable for k <= r)";

const FREQUENCY: [RatioRegime; 4] = [
    ratio(
        Some((17, 20)),
        "k/r >= 17/20: 2^(2k/3)*p^(1/3)",
        (2, 3),
        (1, 3),
    ),
    ratio(
        Some((13, 16)),
        "13/16 <= k/r < 17/20: 2^(k/6)*p^(25/24)",
        (1, 6),
        (25, 24),
    ),
    ratio(
        Some((3, 5)),
        "3/5 <= k/r < 13/16: 2^(k/2)*p^(1/2)",
        (1, 2),
        (1, 2),
    ),
    ratio(None, "k/r < 3/5: 2^(-k/3)*p", (-1, 3), (1, 1)),
];

const CURVE_POINTS: [SizeRegime; 4] = [
    size(
        Some((3, 20)),
        "H <= p^(3/20): H^(1/3)",
        (1, 3),
        (0, 1),
        (0, 1),
    ),
    size(
        Some((3, 16)),
        "p^(3/20) < H <= p^(3/16): H^(7/6)*p^(-1/8)",
        (7, 6),
        (0, 1),
        (-1, 8),
    ),
    size(
        Some((2, 5)),
        "p^(3/16) < H <= p^(2/5): H^(1/2)",
        (1, 2),
        (0, 1),
        (0, 1),
    ),
    size(
        None,
        "H > p^(2/5): H^(4/3)*p^(-1/3)",
        (4, 3),
        (0, 1),
        (-1, 3),
    ),
];

const SUM_PRODUCT: [SizeRegime; 5] = [
    size(
        Some((1, 2)),
        "n <= p^(1/2): n^(12/11)",
        (12, 11),
        (0, 1),
        (0, 1),
    ),
    size(
        Some((35, 68)),
        "p^(1/2) < n <= p^(35/68): n^(7/6)*p^(-1/24)",
        (7, 6),
        (0, 1),
        (-1, 24),
    ),
    size(
        Some((13, 24)),
        "p^(35/68) < n <= p^(13/24): n^(10/11)*p^(1/11)",
        (10, 11),
        (0, 1),
        (1, 11),
    ),
    size(
        Some((2, 3)),
        "p^(13/24) < n <= p^(2/3): n^2*p^(-1/2)",
        (2, 1),
        (0, 1),
        (-1, 2),
    ),
    size(None, "n > p^(2/3): n^(1/2)*p^(1/2)", (1, 2), (0, 1), (1, 2)),
];

const VALUE_SUM_PRODUCT: [SizeRegime; 5] = [
    size(
        Some((1, 2)),
        "N <= p^(1/2): N^(6/11)*(2^k/p)^(1/2)",
        (6, 11),
        (1, 2),
        (-1, 2),
    ),
    size(
        Some((35, 68)),
        "p^(1/2) < N <= p^(35/68): N^(7/12)*2^(k/2)*p^(-13/24)",
        (7, 12),
        (1, 2),
        (-13, 24),
    ),
    size(
        Some((13, 24)),
        "p^(35/68) < N <= p^(13/24): N^(5/11)*2^(k/2)*p^(-9/22)",
        (5, 11),
        (1, 2),
        (-9, 22),
    ),
    size(
        Some((2, 3)),
        "p^(13/24) < N <= p^(2/3): N*2^(k/2)*p^(-1)",
        (1, 1),
        (1, 2),
        (-1, 1),
    ),
    size(
        None,
        "N > p^(2/3): N^(1/4)*2^(k/2)*p^(-1/4)",
        (1, 4),
        (1, 2),
        (-1, 4),
    ),
];

/// The piecewise estimates indexed by `k/r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RatioBound {
    /// Lower bound on `tau_k` from point concentration on exponential curves.
    PeriodConcentration,
    /// The same combined with the exponential-sum bound for small `k`.
    PeriodCombined,
    /// Lower bound on `nu_k(N)` from point concentration.
    ValueConcentration,
    /// The same combined with the pair-count estimate.
    ValueCombined,
    /// Upper bound on `#Omega_k(U)` (before the `1/U` factor) and on `max V_k`.
    Frequency,
}

impl RatioBound {
    pub const ALL: [RatioBound; 5] = [
        RatioBound::PeriodConcentration,
        RatioBound::PeriodCombined,
        RatioBound::ValueConcentration,
        RatioBound::ValueCombined,
        RatioBound::Frequency,
    ];

    fn table(self) -> &'static [RatioRegime] {
        match self {
            RatioBound::PeriodConcentration => &PERIOD_CONCENTRATION,
            RatioBound::PeriodCombined => &PERIOD_COMBINED,
            RatioBound::ValueConcentration => &VALUE_CONCENTRATION,
            RatioBound::ValueCombined => &VALUE_COMBINED,
            RatioBound::Frequency => &FREQUENCY,
        }
    }

    /// All regime labels in table order.
    pub fn regimes(self) -> Vec<&'static str> {
        self.table().iter().map(|r| r.label).collect()
    }

    /// Cut points `k/r` as `(num, den)`, largest first.
    pub fn thresholds(self) -> Vec<(u32, u32)> {
        self.table().iter().filter_map(|r| r.lower).collect()
    }

    /// Evaluates `2^(a k) p^b` for the case selected by `k/r`.
    pub fn evaluate(self, p: u64, k: u32) -> Evaluation {
        let r = crate::numtheory::bit_length(p);
        let regime = self
            .table()
            .iter()
            .find(|reg| match reg.lower {
                // k/r >= num/den  <=>  k*den >= num*r
                Some((num, den)) => k as u64 * den as u64 >= num as u64 * r as u64,
                None => true,
            })
            .expect("the last case is a catch-all");
        let log2 = regime.two_per_k.value() * k as f64 + regime.p_exp.value() * (p as f64).log2();
        Evaluation {
            value: log2.exp2(),
            regime: regime.label,
        }
    }
}

/// The piecewise estimates indexed by a size compared against powers of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeBound {
    /// Upper bound on `R(I, J)` for intervals of common length `H`.
    CurvePoints,
    /// Lower bound on `max(#2A, #A^2)` for `#A = n`.
    SumProduct,
    /// Lower bound on `nu_k(N)` via sum-product.
    ValueSumProduct,
}

impl SizeBound {
    pub const ALL: [SizeBound; 3] = [
        SizeBound::CurvePoints,
        SizeBound::SumProduct,
        SizeBound::ValueSumProduct,
    ];

    fn table(self) -> &'static [SizeRegime] {
        match self {
            SizeBound::CurvePoints => &CURVE_POINTS,
            SizeBound::SumProduct => &SUM_PRODUCT,
            SizeBound::ValueSumProduct => &VALUE_SUM_PRODUCT,
        }
    }

    pub fn regimes(self) -> Vec<&'static str> {
        self.table().iter().map(|r| r.label).collect()
    }

    /// Cut points as exponents of `p`, smallest first.
    pub fn thresholds(self) -> Vec<(i64, i64)> {
        self.table()
            .iter()
            .filter_map(|r| r.upper.map(|e| (e.0, e.1)))
            .collect()
    }

    /// Evaluates `x^c 2^(a k) p^b` for the case selected by `x` against `p`.
    pub fn evaluate(self, p: u64, x: u64, k: u32) -> Evaluation {
        let regime = self
            .table()
            .iter()
            .find(|reg| match reg.upper {
                Some(e) => at_most_power(x, p, e),
                None => true,
            })
            .expect("the last case is a catch-all");
        let log2 = regime.x_exp.value() * (x as f64).log2()
            + regime.two_per_k.value() * k as f64
            + regime.p_exp.value() * (p as f64).log2();
        Evaluation {
            value: log2.exp2(),
            regime: regime.label,
        }
    }
}

/// `x <= p^(a/b)`, i.e. `b ln x <= a ln p`.
fn at_most_power(x: u64, p: u64, e: Exponent) -> bool {
    e.1 as f64 * (x as f64).ln() <= e.0 as f64 * (p as f64).ln()
}

/// A bound evaluated with its unspecified factor set to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub regime: &'static str,
}

/// A residue interval `{start, ..., start + length - 1}` inside `[0, p-1]`,
/// without wrap-around.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalSpec {
    pub start: u64,
    pub length: u64,
}

impl IntervalSpec {
    pub fn new(start: u64, length: u64, p: u64) -> Result<Self> {
        if length == 0 || start.checked_add(length).is_none_or(|end| end > p) {
            return Err(Error::Interval { start, length, p });
        }
        Ok(Self { start, length })
    }

    /// `[0, p-1]`.
    pub fn full(p: u64) -> Self {
        Self {
            start: 0,
            length: p,
        }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x >= self.start && x - self.start < self.length
    }
}

/// `R_{a,b,g,p}(I, J)`: the number of `u` in `[1, p-1]` with
/// `a u mod p` in `I` and `b g^u mod p` in `J`.
pub fn rcount(
    p: u64,
    g: u64,
    a: u64,
    b: u64,
    i: &IntervalSpec,
    j: &IntervalSpec,
    budget: &Budget,
) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for v in [a, b, g] {
        if v % p == 0 {
            return Err(Error::DivisibleByModulus { value: v, p });
        }
    }
    for iv in [i, j] {
        IntervalSpec::new(iv.start, iv.length, p)?;
    }
    budget.check_steps("exponential-curve point count", p - 1)?;
    let (a, b, g) = (a % p, b % p, g % p);
    let mut x = 0u64;
    let mut y = b;
    let mut count = 0;
    for _ in 1..p {
        x += a;
        if x >= p {
            x -= p;
        }
        y = mul_mod(y, g, p);
        if i.contains(x) && j.contains(y) {
            count += 1;
        }
    }
    Ok(count)
}

/// Upper estimate for `R(I, J)` with `#I = #J = H <= T`.
pub fn rij_bound(p: u64, order: u64, h: u64) -> Result<Evaluation> {
    if h == 0 || h > order {
        return Err(Error::OutOfRange {
            name: "H",
            value: h,
            lo: 1,
            hi: order,
        });
    }
    Ok(SizeBound::CurvePoints.evaluate(p, h, 0))
}

/// Upper estimate for `R(I, J)` with `#I = K`, `#J = L <= T`: the smaller of
/// `(K p^(-1/3) L^(-1/6) + 1) L^(1/2)` and `(K p^(-1/8) L^(-1/6) + 1) L^(1/3)`.
pub fn rij_lemma_bound(p: u64, order: u64, k_len: u64, l_len: u64) -> Result<Evaluation> {
    if l_len == 0 || l_len > order {
        return Err(Error::OutOfRange {
            name: "L",
            value: l_len,
            lo: 1,
            hi: order,
        });
    }
    let (pf, kf, lf) = (p as f64, k_len as f64, l_len as f64);
    let first = (kf / (pf.powf(1.0 / 3.0) * lf.powf(1.0 / 6.0)) + 1.0) * lf.sqrt();
    let second = (kf / (pf.powf(1.0 / 8.0) * lf.powf(1.0 / 6.0)) + 1.0) * lf.powf(1.0 / 3.0);
    Ok(if first <= second {
        Evaluation {
            value: first,
            regime: "(K/(p^(1/3) L^(1/6)) + 1) L^(1/2)",
        }
    } else {
        Evaluation {
            value: second,
            regime: "(K/(p^(1/8) L^(1/6)) + 1) L^(1/3)",
        }
    })
}

/// Cardinalities of `2A` and `A^2` in `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumProductCards {
    pub set_size: u64,
    pub sumset: u64,
    pub productset: u64,
}

/// `#(2A)` and `#(A^2)` by enumerating all pairs of the deduplicated set.
pub fn sumprod_cards(p: u64, set: &[u64], budget: &Budget) -> Result<SumProductCards> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if let Some(&bad) = set.iter().find(|&&a| a >= p) {
        return Err(Error::OutOfRange {
            name: "set element",
            value: bad,
            lo: 0,
            hi: p - 1,
        });
    }
    if set.is_empty() {
        return Err(Error::EmptyInput("sum-product cardinalities"));
    }
    let mut elems = set.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let n = elems.len() as u64;
    budget.check_steps("sum-product pair enumeration", n.saturating_mul(n))?;

    let bitset_bytes = BitSet::bytes_for(p);
    let (sumset, productset) = if 2 * bitset_bytes <= budget.memory_bytes.min(1 << 28) {
        let mut sums = BitSet::new(p);
        let mut prods = BitSet::new(p);
        let (mut ns, mut np) = (0, 0);
        for (idx, &x) in elems.iter().enumerate() {
            for &y in &elems[idx..] {
                let s = if x + y >= p { x + y - p } else { x + y };
                ns += sums.insert(s) as u64;
                np += prods.insert(mul_mod(x, y, p)) as u64;
            }
        }
        (ns, np)
    } else {
        let mut sums = HashSet::new();
        let mut prods = HashSet::new();
        for (idx, &x) in elems.iter().enumerate() {
            for &y in &elems[idx..] {
                sums.insert(((x as u128 + y as u128) % p as u128) as u64);
                prods.insert(mul_mod(x, y, p));
            }
        }
        (sums.len() as u64, prods.len() as u64)
    };
    Ok(SumProductCards {
        set_size: n,
        sumset,
        productset,
    })
}

/// Lower estimate for `max(#2A, #A^2)` with `#A = n`.
pub fn sumprod_bound(p: u64, n: u64) -> Result<Evaluation> {
    if n == 0 {
        return Err(Error::EmptyInput("sum-product bound"));
    }
    Ok(SizeBound::SumProduct.evaluate(p, n, 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// An observed quantity set against one evaluated bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub quantity: String,
    pub observed: u64,
    pub bound: f64,
    pub regime: String,
    pub ratio: f64,
    /// Only the exact counting bounds are asserted.
    pub asserted: bool,
    /// Whether the observation satisfies the bound (informational unless asserted).
    pub passed: bool,
    pub kind: BoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn informational(
        quantity: &str,
        kind: BoundKind,
        observed: u64,
        bound: f64,
        regime: String,
    ) -> Self {
        let passed = match kind {
            BoundKind::Lower => observed as f64 >= bound,
            BoundKind::Upper => observed as f64 <= bound,
        };
        Self {
            quantity: quantity.to_string(),
            observed,
            bound,
            regime,
            ratio: observed as f64 / bound,
            asserted: false,
            passed,
            kind,
            note: None,
        }
    }

    pub fn is_hedged(&self) -> bool {
        self.regime.contains(UNSPECIFIED_FACTOR)
    }

    /// True unless this is an asserted bound that failed.
    pub fn holds(&self) -> bool {
        !self.asserted || self.passed
    }
}

fn hedged(label: &str, factor: &str) -> String {
    format!("{label} [{UNSPECIFIED_FACTOR} {factor}]")
}

fn check_width(params: &ExpMapParams, k: BitWidth) -> Result<()> {
    if k.get() > params.bit_length() {
        return Err(Error::OutOfRange {
            name: "k",
            value: k.get() as u64,
            lo: 1,
            hi: params.bit_length() as u64,
        });
    }
    Ok(())
}

/// `count * 2^(k-1) / p`, the exact counting bound, plus the exact check
/// `observed * p >= count * 2^(k-1)`; applicable only when `2^k < p`.
fn counting_bound(
    quantity: &str,
    params: &ExpMapParams,
    k: BitWidth,
    count: u64,
    observed: u64,
    label: &str,
) -> BoundReport {
    let p = params.p();
    let half = 1u128 << (k.get() - 1);
    let bound = count as f64 * half as f64 / p as f64;
    let applicable = k.get() < 64 && (1u128 << k.get()) < p as u128;
    let passed = observed as u128 * p as u128 >= count as u128 * half;
    let regime = if applicable {
        format!("2^k < p: {label}")
    } else {
        format!("2^k >= p: {label} not applicable")
    };
    BoundReport {
        quantity: quantity.to_string(),
        observed,
        bound,
        regime,
        ratio: observed as f64 / bound,
        asserted: applicable,
        passed,
        kind: BoundKind::Lower,
        note: None,
    }
}

/// Period reports for one `(t, tau_k)` observation.
pub fn period_bounds(
    params: &ExpMapParams,
    cycle_len: u64,
    tau: u64,
    k: BitWidth,
) -> Result<Vec<BoundReport>> {
    check_width(params, k)?;
    let p = params.p();
    let r = params.bit_length();
    let kb = k.get();
    let t = cycle_len as f64;

    let trivial = counting_bound("tau_k:counting", params, k, cycle_len, tau, "t*2^(k-1)/p");

    // k <= (1/4 - eps) r versus k >= r/4
    let exp_sum = if 4 * kb < r {
        let v = t * ((2 * kb) as f64 - (p as f64).log2()).exp2();
        BoundReport::informational(
            "tau_k:exponential_sums",
            BoundKind::Lower,
            tau,
            v,
            hedged("k/r < 1/4: t*2^(2k)/p", "c(eps)"),
        )
    } else {
        let v = t / (p as f64).sqrt();
        BoundReport::informational(
            "tau_k:exponential_sums",
            BoundKind::Lower,
            tau,
            v,
            hedged("k/r >= 1/4: t*p^(-1/2)", "p^o(1)"),
        )
    };

    let conc = RatioBound::PeriodConcentration.evaluate(p, kb);
    let comb = RatioBound::PeriodCombined.evaluate(p, kb);
    Ok(vec![
        trivial,
        exp_sum,
        BoundReport::informational(
            "tau_k:concentration",
            BoundKind::Lower,
            tau,
            t * conc.value,
            hedged(conc.regime, "p^o(1)"),
        ),
        BoundReport::informational(
            "tau_k:combined",
            BoundKind::Lower,
            tau,
            t * comb.value,
            hedged(comb.regime, "p^o(1)"),
        ),
    ])
}

/// Value-count reports for `nu_k(N)` with `N <= s + t`.
pub fn value_bounds(
    params: &ExpMapParams,
    ell: u64,
    n: u64,
    nu: u64,
    k: BitWidth,
) -> Result<Vec<BoundReport>> {
    check_width(params, k)?;
    if n == 0 || n > ell {
        return Err(Error::OutOfRange {
            name: "N",
            value: n,
            lo: 1,
            hi: ell,
        });
    }
    let p = params.p();
    let kb = k.get();
    let sqrt_n = (n as f64).sqrt();
    let conc = RatioBound::ValueConcentration.evaluate(p, kb);
    let comb = RatioBound::ValueCombined.evaluate(p, kb);
    let sp = SizeBound::ValueSumProduct.evaluate(p, n, kb);

    let mut combined = BoundReport::informational(
        "nu_k:combined",
        BoundKind::Lower,
        nu,
        sqrt_n * comb.value,
        hedged(comb.regime, "p^o(1)"),
    );
    combined.note = Some(VALUE_COMBINED_NOTE.to_string());

    Ok(vec![
        counting_bound("nu_k:counting", params, k, n, nu, "N*2^(k-1)/p"),
        BoundReport::informational(
            "nu_k:concentration",
            BoundKind::Lower,
            nu,
            sqrt_n * conc.value,
            hedged(conc.regime, "p^o(1)"),
        ),
        combined,
        BoundReport::informational(
            "nu_k:sum_product",
            BoundKind::Lower,
            nu,
            sp.value,
            hedged(sp.regime, "N^o(1)"),
        ),
    ])
}

/// Reports `max_pair_count` against `p 2^(-2k) + p^(1/2) (ln p)^2`.
pub fn pair_count_bound(params: &ExpMapParams, k: BitWidth, observed: u64) -> BoundReport {
    let pf = params.p() as f64;
    let v = pf * (-2.0 * k.get() as f64).exp2() + pf.sqrt() * pf.ln().powi(2);
    BoundReport::informational(
        "pair_count:max",
        BoundKind::Upper,
        observed,
        v,
        hedged("p*2^(-2k) + p^(1/2)*(log p)^2", "implied O-constant"),
    )
}

/// Frequency reports: `#Omega_k(U)` against `U^(-1) * F(k)` and `max V_k`
/// against `F(k)`.
pub fn freq_bounds(
    params: &ExpMapParams,
    threshold: u64,
    omega_count: u64,
    max_count: u64,
    k: BitWidth,
) -> Result<Vec<BoundReport>> {
    check_width(params, k)?;
    if threshold == 0 {
        return Err(Error::OutOfRange {
            name: "U",
            value: 0,
            lo: 1,
            hi: u64::MAX,
        });
    }
    let f = RatioBound::Frequency.evaluate(params.p(), k.get());
    Ok(vec![
        BoundReport::informational(
            "omega_k:count",
            BoundKind::Upper,
            omega_count,
            f.value / threshold as f64,
            hedged(&format!("U^(-1) * {}", f.regime), "p^o(1)"),
        ),
        BoundReport::informational(
            "v_k:max",
            BoundKind::Upper,
            max_count,
            f.value,
            hedged(f.regime, "p^o(1)"),
        ),
    ])
}

/// Sumset and productset of the first `N` trajectory values against
/// `nu_k(N)^2 2^(r-k+1)` and the sum-product lower estimate.
fn sum_product_reports<M: ExpMap>(
    map: &M,
    traj: &Trajectory,
    k: BitWidth,
    n: u64,
    budget: &Budget,
) -> Result<Vec<BoundReport>> {
    let params = map.params();
    let p = params.p();
    let mut values = Vec::with_capacity(n as usize);
    let mut x = traj.u0;
    for _ in 0..n {
        values.push(x);
        x = map.image(x);
    }
    let cards = sumprod_cards(p, &values, budget)?;
    let nu = bitseq::nu(map, traj, k, n)?;
    let cap = (nu as f64).powi(2) * ((params.bit_length() - k.get() + 1) as f64).exp2();
    let label = "nu_k(N)^2*2^(r-k+1)";
    let sp = SizeBound::SumProduct.evaluate(p, cards.set_size, 0);
    Ok(vec![
        BoundReport::informational(
            "sumset:2A",
            BoundKind::Upper,
            cards.sumset,
            cap,
            label.into(),
        ),
        BoundReport::informational(
            "productset:A2",
            BoundKind::Upper,
            cards.productset,
            cap,
            label.into(),
        ),
        BoundReport::informational(
            "sum_product:max",
            BoundKind::Lower,
            cards.sumset.max(cards.productset),
            sp.value,
            hedged(sp.regime, "n^o(1)"),
        ),
    ])
}

/// Knobs for `consistency_report`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReportOptions {
    /// Frequency threshold `U` for `Omega_k(U)`.
    pub threshold: u64,
    /// Prefix length used for the sumset/productset comparison (0 disables it).
    pub sumset_prefix: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            threshold: 2,
            sumset_prefix: 256,
        }
    }
}

/// Everything observed for one `(p, g, u0, k)` with every bound evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub p: u64,
    pub g: u64,
    pub order: u64,
    pub bit_length: u32,
    pub u0: u64,
    pub k: u32,
    pub tail: u64,
    pub cycle_len: u64,
    pub ell: u64,
    pub tau_k: u64,
    pub nu_ell: u64,
    pub max_frequency: u64,
    pub threshold: u64,
    pub omega_count: u64,
    pub max_pair_count: u64,
    pub reports: Vec<BoundReport>,
}

impl ConsistencyReport {
    pub fn rigorous_ok(&self) -> bool {
        self.reports.iter().all(BoundReport::holds)
    }
}

/// Builds the full report; an asserted bound that fails is returned as
/// `Error::BoundViolation`.
pub fn consistency_report<M: ExpMap>(
    map: &M,
    traj: &Trajectory,
    k: BitWidth,
    options: &ReportOptions,
    budget: &Budget,
) -> Result<ConsistencyReport> {
    let params = *map.params();
    check_width(&params, k)?;
    let ell = traj.len();
    let tau = bitseq::tau(map, traj, k);
    let nu_ell = bitseq::nu(map, traj, k, ell)?;
    let table = bitseq::freq(map, traj, k, budget)?;
    let omega_count = bitseq::omega(&table, options.threshold).len() as u64;
    let max_pair = bitseq::max_pair_count(map, traj, k, budget)?;

    let mut reports = period_bounds(&params, traj.cycle_len, tau, k)?;
    reports.extend(value_bounds(&params, ell, ell, nu_ell, k)?);
    reports.push(pair_count_bound(&params, k, max_pair));
    reports.extend(freq_bounds(
        &params,
        options.threshold,
        omega_count,
        table.max_count(),
        k,
    )?);
    if options.sumset_prefix > 0 {
        let n = options.sumset_prefix.min(ell);
        reports.extend(sum_product_reports(map, traj, k, n, budget)?);
    }

    if let Some(bad) = reports.iter().find(|r| !r.holds()) {
        return Err(Error::BoundViolation {
            quantity: bad.quantity.clone(),
            observed: bad.observed,
            bound: bad.bound,
        });
    }
    Ok(ConsistencyReport {
        p: params.p(),
        g: params.g(),
        order: params.order(),
        bit_length: params.bit_length(),
        u0: traj.u0,
        k: k.get(),
        tail: traj.tail,
        cycle_len: traj.cycle_len,
        ell,
        tau_k: tau,
        nu_ell,
        max_frequency: table.max_count(),
        threshold: options.threshold,
        omega_count,
        max_pair_count: max_pair,
        reports,
    })
}
