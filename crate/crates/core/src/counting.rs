//! Closed-form counts and moments, in exact arithmetic.
//!
//! Every function here returns exact integers or rationals; conversion to
//! floating point happens only at the reporting edge ([`to_f64`]).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::SubsetA;

pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("rank {r} out of range for a {rows}x{cols} matrix")]
    RankOutOfRange { r: usize, rows: usize, cols: usize },
}

fn check_rank(r: usize, rows: usize, cols: usize) -> Result<(), CountingError> {
    if r > rows.min(cols) {
        Err(CountingError::RankOutOfRange { r, rows, cols })
    } else {
        Ok(())
    }
}

fn pow_q(q: u64, k: usize) -> BigUint {
    num_traits::pow(BigUint::from(q), k)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow_q(q: u64, k: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base.recip(), (-k) as usize)
    }
}

/// Lossy conversion for reports.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Number of `s x t` matrices of rank exactly `r` over `F_q`:
/// `prod_{i<r} (q^s - q^i)(q^t - q^i) / (q^r - q^i)`. `r = 0` gives 1.
pub fn rank_count(q: u64, s: usize, t: usize, r: usize) -> Result<BigUint, CountingError> {
    check_rank(r, s, t)?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        let qi = pow_q(q, i);
        num *= (pow_q(q, s) - &qi) * (pow_q(q, t) - &qi);
        den *= pow_q(q, r) - qi;
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Probability that independent uniform `m x r` and `r x n` matrices both have rank `r`:
/// `prod_{i<r} (1 - q^{i-m})(1 - q^{i-n})`.
pub fn q_limit_product(q: u64, m: usize, n: usize, r: usize) -> Result<BigRational, CountingError> {
    check_rank(r, m, n)?;
    let one = BigRational::one();
    let mut p = BigRational::one();
    for i in 0..r {
        let a = &one - rat_pow_q(q, i as i64 - m as i64);
        let b = &one - rat_pow_q(q, i as i64 - n as i64);
        p *= a * b;
    }
    Ok(p)
}

/// Acceptance probability of rejection-sampling a full-column-rank `m x r` matrix.
pub fn full_rank_probability(q: u64, m: usize, r: usize) -> Result<BigRational, CountingError> {
    check_rank(r, m, r)?;
    let one = BigRational::one();
    Ok((0..r)
        .map(|i| &one - rat_pow_q(q, i as i64 - m as i64))
        .fold(BigRational::one(), |acc, x| acc * x))
}

/// The three rank classes of `sum_N |P[XY = N] - P[M = N]|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvSplit {
    /// rank(N) < r
    pub below: BigRational,
    /// rank(N) = r
    pub equal: BigRational,
    /// rank(N) > r, always zero
    pub above: BigRational,
}

impl TvSplit {
    pub fn total(&self) -> BigRational {
        &self.below + &self.equal + &self.above
    }
}

/// Exact L1 distance between the law of `XY` (uniform factors) and the uniform
/// rank-`r` law, split by the rank of the outcome.
pub fn tv_split(q: u64, m: usize, n: usize, r: usize) -> Result<TvSplit, CountingError> {
    let p = q_limit_product(q, m, n, r)?;
    let one = BigRational::one();
    Ok(TvSplit {
        below: &one - &p,
        equal: (&p - &one).abs(),
        above: BigRational::zero(),
    })
}

/// `2 (1 - P)` with `P` from [`q_limit_product`].
pub fn tv_closed_form(q: u64, m: usize, n: usize, r: usize) -> Result<BigRational, CountingError> {
    Ok(tv_split(q, m, n, r)?.total())
}

/// `gamma_a(q) = 1/q - [a = 0]`.
pub fn gamma_a(q: u64, a_is_zero: bool) -> BigRational {
    rat(1, q as i64) - if a_is_zero { BigRational::one() } else { BigRational::zero() }
}

pub fn gamma_subset(q: u64, subset: &SubsetA) -> BigRational {
    subset
        .iter()
        .map(|a| gamma_a(q, a.is_zero()))
        .fold(BigRational::zero(), |acc, g| acc + g)
}

/// Parameters shared by the centring and scaling constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentParams {
    pub q: u64,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub subset: SubsetA,
}

impl MomentParams {
    pub fn new(q: u64, r: usize, m: usize, n: usize, subset: SubsetA) -> Self {
        MomentParams { q, r, m, n, subset }
    }

    pub fn gamma(&self) -> BigRational {
        gamma_subset(self.q, &self.subset)
    }

    /// `mu_A = (|A|/q - gamma_A q^{-r}) m n`
    pub fn mu(&self) -> BigRational {
        let size = rat(self.subset.len() as i64, self.q as i64);
        let mn = BigRational::from_integer(BigInt::from(self.m * self.n));
        (size - self.gamma() * rat_pow_q(self.q, -(self.r as i64))) * mn
    }

    /// `sigma^2_A = gamma_A^2 q^{-r} (1 - q^{-r}) (m + n) m n`
    pub fn sigma2(&self) -> BigRational {
        let g = self.gamma();
        let qr = rat_pow_q(self.q, -(self.r as i64));
        let scale = BigRational::from_integer(BigInt::from((self.m + self.n) * self.m * self.n));
        &g * &g * &qr * (BigRational::one() - &qr) * scale
    }
}

/// Moments of `ct_A` for a uniform matrix with no rank condition:
/// mean `|A| mn / q`, variance `(|A|/q)(1 - |A|/q) mn`.
pub fn unconstrained_moments(q: u64, subset: &SubsetA, m: usize, n: usize) -> (BigRational, BigRational) {
    let frac = rat(subset.len() as i64, q as i64);
    let mn = BigRational::from_integer(BigInt::from(m * n));
    let mean = &frac * &mn;
    let var = &frac * (BigRational::one() - &frac) * mn;
    (mean, var)
}
