use std::sync::Arc;

use serde::Serialize;

use super::normal::{ks_statistic, sample_moments, Histogram};
use super::StatsError;
use crate::counting::{to_f64, tv_closed_form, unconstrained_moments, MomentParams};
use crate::field::FieldCtx;
use crate::matrix::{MatrixFq, SubsetA};
use crate::par::{map_indices, Workers};
use crate::sampling::{RankSampler, SamplerMode, SeedSpec};

pub const MIN_SAMPLES: u64 = 100;
pub const HISTOGRAM_BINS: usize = 81;
pub const HISTOGRAM_RANGE: f64 = 4.0;

/// `(ct_A - mu_A) / sigma_A` for fixed shape and subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedStatistic {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalizedStatistic {
    pub fn new(params: &MomentParams) -> Result<Self, StatsError> {
        let sigma2 = to_f64(&params.sigma2());
        if sigma2 <= 0.0 {
            return Err(StatsError::DegenerateSubset);
        }
        Ok(NormalizedStatistic {
            mu: to_f64(&params.mu()),
            sigma: sigma2.sqrt(),
        })
    }

    pub fn apply(&self, ct: u64) -> f64 {
        (ct as f64 - self.mu) / self.sigma
    }
}

/// Normalized count of a single matrix, treated as having rank `r`.
pub fn normalized_ct(matrix: &MatrixFq, subset: &SubsetA, r: usize) -> Result<f64, StatsError> {
    let params = MomentParams::new(
        matrix.field().order() as u64,
        r,
        matrix.rows(),
        matrix.cols(),
        subset.clone(),
    );
    Ok(NormalizedStatistic::new(&params)?.apply(matrix.ct(subset)))
}

#[derive(Debug, Clone)]
pub struct CltConfig {
    pub field: Arc<FieldCtx>,
    pub subset: SubsetA,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mode: SamplerMode,
}

#[derive(Debug, Clone, Serialize)]
pub struct CltParams {
    pub field: String,
    pub subset: Vec<u32>,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mode: SamplerMode,
}

#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub params: CltParams,
    pub mu: f64,
    pub sigma2: f64,
    pub unconstrained_mean: f64,
    pub unconstrained_variance: f64,
    pub tv_bound: f64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub ks: f64,
    pub histogram: Histogram,
    /// raw counts in index order
    #[serde(skip)]
    pub counts: Vec<u64>,
    /// normalized values in index order
    #[serde(skip)]
    pub normalized: Vec<f64>,
}

/// Monte Carlo run: sample `i` comes from stream `i`, and every reduction runs
/// in index order, so the report is independent of `workers`.
pub fn run_clt(config: &CltConfig, workers: Workers) -> Result<CltReport, StatsError> {
    if config.samples < MIN_SAMPLES {
        return Err(StatsError::TooFewSamples {
            min: MIN_SAMPLES,
            got: config.samples,
        });
    }
    let q = config.field.order();
    if config.subset.field_order() != q {
        return Err(StatsError::DimensionMismatch(format!(
            "subset over F_{} used with F_{q}",
            config.subset.field_order()
        )));
    }
    let params = MomentParams::new(q as u64, config.r, config.m, config.n, config.subset.clone());
    let norm = NormalizedStatistic::new(&params)?;
    let sampler = RankSampler::new(
        config.field.clone(),
        config.m,
        config.n,
        config.r,
        config.mode,
        SeedSpec::new(config.seed),
    )?;
    let counts = map_indices(config.samples, workers, |i| -> Result<u64, StatsError> {
        let (x, y) = sampler.factors(i)?;
        Ok(x.product_ct(&y, &config.subset)?)
    })?;
    let normalized: Vec<f64> = counts.iter().map(|&c| norm.apply(c)).collect();
    let moments = sample_moments(&normalized);
    let mut sorted = normalized.clone();
    sorted.sort_by(f64::total_cmp);
    let (umean, uvar) = unconstrained_moments(q as u64, &config.subset, config.m, config.n);
    Ok(CltReport {
        params: CltParams {
            field: config.field.spec().to_string(),
            subset: config.subset.indices(),
            r: config.r,
            m: config.m,
            n: config.n,
            samples: config.samples,
            seed: config.seed,
            mode: config.mode,
        },
        mu: norm.mu,
        sigma2: to_f64(&params.sigma2()),
        unconstrained_mean: to_f64(&umean),
        unconstrained_variance: to_f64(&uvar),
        tv_bound: to_f64(&tv_closed_form(q as u64, config.m, config.n, config.r)?),
        mean: moments.mean,
        variance: moments.variance,
        skewness: moments.skewness,
        ks: ks_statistic(&sorted),
        histogram: Histogram::new(-HISTOGRAM_RANGE, HISTOGRAM_RANGE, HISTOGRAM_BINS, &normalized),
        counts,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(samples: u64) -> CltConfig {
        let field = Arc::new(FieldCtx::new(2, 1).unwrap());
        CltConfig {
            subset: SubsetA::nonzero(2),
            field,
            r: 1,
            m: 6,
            n: 6,
            samples,
            seed: 5,
            mode: SamplerMode::Exact,
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            run_clt(&config(99), Workers::SEQUENTIAL),
            Err(StatsError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn degenerate_subset() {
        let mut c = config(200);
        c.subset = SubsetA::full(2);
        assert_eq!(run_clt(&c, Workers::SEQUENTIAL).unwrap_err(), StatsError::DegenerateSubset);
        let f = c.field.clone();
        assert!(normalized_ct(&MatrixFq::zeros(f, 2, 2), &SubsetA::empty(2), 1).is_err());
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let c = config(500);
        let a = run_clt(&c, Workers::SEQUENTIAL).unwrap();
        let b = run_clt(&c, Workers(3)).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.histogram.counts.iter().sum::<u64>(), 500);
    }

    #[test]
    fn normalized_single_matrix() {
        // q=2, r=1, m=n=2, A={1}: mu = 1, sigma^2 = 1
        let f = Arc::new(FieldCtx::new(2, 1).unwrap());
        let m = MatrixFq::from_indices(f, 2, 2, &[1, 1, 1, 1]).unwrap();
        assert_eq!(normalized_ct(&m, &SubsetA::nonzero(2), 1).unwrap(), 3.0);
    }
}
