//! Cycle structure and bit statistics of the exponential map `u -> g^u mod p`.
//!
//! - [`numtheory`]: modular arithmetic, primality, factorization, orders.
//! - [`expmap`]: trajectories, permutation cycle decomposition, fixed points.
//! - [`bitseq`]: the sequence of `k` low bits along a trajectory.
//! - [`bounds`]: brute-force kernels and the piecewise bound tables they are
//!   checked against.
//! - [`survey`]: seeded random surveys and fixed-point averages.

pub mod bitseq;
pub mod bounds;
pub mod budget;
pub mod error;
pub mod expmap;
pub mod numtheory;
pub mod survey;

pub use bitseq::{BitStats, BitWidth, FreqTable};
pub use bounds::{BoundKind, BoundReport, ConsistencyReport, IntervalSpec, ReportOptions};
pub use budget::Budget;
pub use error::{Error, Result};
pub use expmap::{CycleDecomposition, DecomposeStrategy, ExpMap, PowerTable, Trajectory};
pub use numtheory::{ExpMapParams, Factorization};
pub use survey::{ArtinMode, SurveyAggregate, SurveyConfig, SurveyRecord};
