//! Entry-count statistics of `X Y`: character sums, the exact decomposition
//! of `ct_A(X Y)`, exact enumeration oracles, and Monte Carlo CLT runs.

mod clt;
mod decompose;
mod exact;
mod normal;
mod statistics;

pub use clt::{run_clt, CltConfig, CltParams, CltReport, NormalizedStatistic, normalized_ct};
pub use decompose::{decompose_ct, CtDecomposer, Decomposition, MAX_DECOMPOSITION_RANK};
pub use exact::{
    all_matrices, centering_gap, enumerated_tv, exact_distribution, exact_law_all_matrices, CtLaw,
    ExactDistribution, TvEnumeration, MAX_ENUMERATION,
};
pub use normal::{ks_statistic, sample_moments, standard_normal_cdf, Histogram, SampleMoments};
pub use statistics::{
    expected_statistic, expected_x_statistic, expected_y_statistic, w_statistic, x_statistic,
    y_statistic, z_statistic, zw_moments, ZwMoments,
};

use thiserror::Error;

use crate::characters::CharacterError;
use crate::counting::CountingError;
use crate::matrix::MatrixError;
use crate::sampling::SamplingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("subset {subset:#b} does not fit in [0, {r})")]
    BadSubset { subset: u32, r: usize },
    #[error("{0}")]
    DimensionMismatch(String),
    #[error("sigma^2 is zero: A must be a nonempty proper subset of F_q")]
    DegenerateSubset,
    #[error("enumeration of {0} cases exceeds the cap")]
    TooLargeToEnumerate(u128),
    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error("rank {r} exceeds the decomposition cap {max}")]
    RankTooLarge { r: usize, max: usize },
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Counting(#[from] CountingError),
}
