use serde::Serialize;

/// `Phi(x) = erfc(-x / sqrt 2) / 2`.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between the empirical law of `sorted` and `N(0,1)`.
///
/// `sorted` must be ascending. Both one-sided gaps are evaluated at every sample.
pub fn ks_statistic(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let phi = standard_normal_cdf(x);
            ((i + 1) as f64 / n - phi).max(phi - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMoments {
    pub mean: f64,
    /// unbiased, `N - 1` denominator
    pub variance: f64,
    pub skewness: f64,
}

/// Moments accumulated in slice order, so the result depends only on the data.
pub fn sample_moments(values: &[f64]) -> SampleMoments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    let pop2 = m2 / n;
    let skewness = if pop2 > 0.0 { (m3 / n) / pop2.powf(1.5) } else { 0.0 };
    SampleMoments {
        mean,
        variance: if values.len() > 1 { m2 / (n - 1.0) } else { 0.0 },
        skewness,
    }
}

/// Fixed-width histogram. Values outside `[lo, hi]` land in the edge bins and
/// are also tallied in `clamped`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub clamped: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize, values: &[f64]) -> Self {
        assert!(bins > 0 && hi > lo, "histogram needs a nonempty range");
        let mut counts = vec![0; bins];
        let mut clamped = 0;
        let width = (hi - lo) / bins as f64;
        for &v in values {
            if v < lo || v > hi {
                clamped += 1;
            }
            let b = ((v - lo) / width).floor();
            let b = if b.is_nan() { 0 } else { b.clamp(0.0, (bins - 1) as f64) as usize };
            counts[b] += 1;
        }
        Histogram { lo, hi, counts, clamped }
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let bins = self.counts.len();
        (0..=bins)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / bins as f64)
            .collect()
    }
}
