//! Seedable samplers for uniform, full-rank, and fixed-rank matrices.
//!
//! Every sample index owns its own ChaCha8 stream derived from
//! `(master_seed, index)`, so a batch is reproducible regardless of how the
//! indices are scheduled across workers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldCtx, FieldElement};
use crate::matrix::MatrixFq;
use crate::par::{map_indices, Workers};

/// Rejection attempts allowed before a full-rank draw gives up.
pub const MAX_REJECTIONS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("rank {r} out of range for a {rows}x{cols} matrix")]
    RankOutOfRange { r: usize, rows: usize, cols: usize },
    #[error("product sampler needs r >= 1")]
    ZeroRankProduct,
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("no rank-{r} draw after {MAX_REJECTIONS} attempts")]
    RejectionLimit { r: usize },
    #[error("unknown sampling mode {0:?}; expected \"exact\" or \"product\"")]
    UnknownMode(String),
}

/// Master seed from which per-index streams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }

    /// Generator for sample `index`: a pure function of `(master_seed, index)`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index);
        rng
    }
}

/// How a rank-`r` sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMode {
    /// `X Y` with full-rank factors: exactly uniform over rank-`r` matrices.
    Exact,
    /// `X Y` with unconditioned uniform factors.
    Product,
}

impl FromStr for SamplerMode {
    type Err = SamplingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SamplerMode::Exact),
            "product" => Ok(SamplerMode::Product),
            other => Err(SamplingError::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for SamplerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerMode::Exact => "exact",
            SamplerMode::Product => "product",
        })
    }
}

#[inline]
fn uniform_element<R: Rng + ?Sized>(q: u64, rng: &mut R) -> FieldElement {
    // 64-bit modular reduction; the bias is below q / 2^64.
    FieldElement((rng.random::<u64>() % q) as u16)
}

/// Matrix with independent uniform entries.
pub fn uniform_matrix<R: Rng + ?Sized>(field: &Arc<FieldCtx>, rows: usize, cols: usize, rng: &mut R) -> MatrixFq {
    let q = field.order() as u64;
    let data = (0..rows * cols).map(|_| uniform_element(q, rng)).collect();
    MatrixFq::from_raw(field.clone(), rows, cols, data)
}

/// A full-rank draw together with the number of candidates it took.
#[derive(Debug, Clone)]
pub struct FullRankDraw {
    pub matrix: MatrixFq,
    pub attempts: u32,
}

/// Uniform `m x r` matrix of rank `r`, by rejection from [`uniform_matrix`].
pub fn uniform_full_rank<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    m: usize,
    r: usize,
    rng: &mut R,
) -> Result<FullRankDraw, SamplingError> {
    if r > m {
        return Err(SamplingError::RankOutOfRange { r, rows: m, cols: r });
    }
    for attempts in 1..=MAX_REJECTIONS {
        let x = uniform_matrix(field, m, r, rng);
        if x.rank() == r {
            return Ok(FullRankDraw { matrix: x, attempts });
        }
    }
    Err(SamplingError::RejectionLimit { r })
}

/// Draws the factors `(X, Y)` of a rank-`r` sample.
///
/// In [`SamplerMode::Exact`] both factors have rank `r`; since every rank-`r`
/// matrix has the same number of full-rank factorizations, `X Y` is then
/// exactly uniform over rank-`r` matrices. `Y` is drawn as the transpose of a
/// full-column-rank `n x r` matrix.
pub fn sample_factors<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    r: usize,
    mode: SamplerMode,
    rng: &mut R,
) -> Result<(MatrixFq, MatrixFq), SamplingError> {
    if m == 0 || n == 0 {
        return Err(SamplingError::EmptyShape { rows: m, cols: n });
    }
    match mode {
        SamplerMode::Exact => {
            if r > m.min(n) {
                return Err(SamplingError::RankOutOfRange { r, rows: m, cols: n });
            }
            let x = uniform_full_rank(field, m, r, rng)?.matrix;
            let y = uniform_full_rank(field, n, r, rng)?.matrix.transpose();
            Ok((x, y))
        }
        SamplerMode::Product => {
            if r == 0 {
                return Err(SamplingError::ZeroRankProduct);
            }
            Ok((uniform_matrix(field, m, r, rng), uniform_matrix(field, r, n, rng)))
        }
    }
}

/// Exactly uniform `m x n` matrix of rank `r`.
pub fn uniform_rank_r<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<MatrixFq, SamplingError> {
    let (x, y) = sample_factors(field, m, n, r, SamplerMode::Exact, rng)?;
    Ok(x.mul(&y).expect("factor shapes agree"))
}

/// `X Y` with uniform unconditioned `X` (`m x r`) and `Y` (`r x n`); rank at most `r`.
pub fn product_sampler<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<MatrixFq, SamplingError> {
    let (x, y) = sample_factors(field, m, n, r, SamplerMode::Product, rng)?;
    Ok(x.mul(&y).expect("factor shapes agree"))
}

/// Fixed-shape sampler that draws sample `i` from stream `i` of a seed.
#[derive(Debug, Clone)]
pub struct RankSampler {
    pub field: Arc<FieldCtx>,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub mode: SamplerMode,
    pub seed: SeedSpec,
}

impl RankSampler {
    pub fn new(
        field: Arc<FieldCtx>,
        m: usize,
        n: usize,
        r: usize,
        mode: SamplerMode,
        seed: SeedSpec,
    ) -> Result<Self, SamplingError> {
        if m == 0 || n == 0 {
            return Err(SamplingError::EmptyShape { rows: m, cols: n });
        }
        match mode {
            SamplerMode::Exact if r > m.min(n) => {
                return Err(SamplingError::RankOutOfRange { r, rows: m, cols: n })
            }
            SamplerMode::Product if r == 0 => return Err(SamplingError::ZeroRankProduct),
            _ => {}
        }
        Ok(RankSampler {
            field,
            m,
            n,
            r,
            mode,
            seed,
        })
    }

    pub fn factors(&self, index: u64) -> Result<(MatrixFq, MatrixFq), SamplingError> {
        let mut rng = self.seed.stream(index);
        sample_factors(&self.field, self.m, self.n, self.r, self.mode, &mut rng)
    }

    pub fn sample(&self, index: u64) -> Result<MatrixFq, SamplingError> {
        let (x, y) = self.factors(index)?;
        Ok(x.mul(&y).expect("factor shapes agree"))
    }

    /// Samples `0..count`, in index order.
    pub fn sample_batch(&self, count: u64, workers: Workers) -> Result<Vec<MatrixFq>, SamplingError> {
        map_indices(count, workers, |i| self.sample(i))
    }
}
