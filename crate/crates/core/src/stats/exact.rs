use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::StatsError;
use crate::counting::{to_f64, MomentParams};
use crate::field::{FieldCtx, FieldElement};
use crate::matrix::{MatrixFq, SubsetA};

/// Cap on the number of cases any enumeration here will visit.
pub const MAX_ENUMERATION: u128 = 1 << 24;

fn space_size(q: usize, entries: usize) -> u128 {
    (q as u128).checked_pow(entries as u32).unwrap_or(u128::MAX)
}

fn check_cap(cases: u128) -> Result<(), StatsError> {
    if cases > MAX_ENUMERATION {
        Err(StatsError::TooLargeToEnumerate(cases))
    } else {
        Ok(())
    }
}

/// Every `rows x cols` matrix over the field, in index order (entry 0 least significant).
pub fn all_matrices(
    field: &Arc<FieldCtx>,
    rows: usize,
    cols: usize,
) -> Result<impl Iterator<Item = MatrixFq> + '_, StatsError> {
    let q = field.order();
    let total = space_size(q, rows * cols);
    check_cap(total)?;
    Ok((0..total as u64).map(move |mut idx| {
        let data: Vec<FieldElement> = (0..rows * cols)
            .map(|_| {
                let d = idx % q as u64;
                idx /= q as u64;
                FieldElement(d as u16)
            })
            .collect();
        MatrixFq::from_raw(field.clone(), rows, cols, data)
    }))
}

fn matrix_key(m: &MatrixFq) -> u64 {
    let q = m.field().order() as u64;
    m.data().iter().rev().fold(0, |acc, v| acc * q + v.index() as u64)
}

/// Exact law of `ct_A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtLaw {
    pub pmf: BTreeMap<u64, BigRational>,
}

impl CtLaw {
    fn from_counts(counts: &BTreeMap<u64, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let pmf = counts
            .iter()
            .map(|(&k, &c)| (k, BigRational::new(BigInt::from(c), BigInt::from(total))))
            .collect();
        CtLaw { pmf }
    }

    pub fn mean(&self) -> BigRational {
        self.pmf
            .iter()
            .fold(BigRational::zero(), |acc, (&k, p)| acc + p * BigInt::from(k))
    }

    pub fn variance(&self) -> BigRational {
        let mean = self.mean();
        self.pmf.iter().fold(BigRational::zero(), |acc, (&k, p)| {
            let d = BigRational::from_integer(BigInt::from(k)) - &mean;
            acc + p * &d * &d
        })
    }

    pub fn total_mass(&self) -> BigRational {
        self.pmf.values().fold(BigRational::zero(), |a, p| a + p)
    }
}

/// Laws of `ct_A(XY)` over all factor pairs.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    /// both factors of rank `r`: exactly the uniform rank-`r` law
    pub rank_r: CtLaw,
    /// all factor pairs: the product sampler
    pub product: CtLaw,
    pub pairs_enumerated: u128,
}

/// Enumerates every `(X, Y)` in `F^{m x r} x F^{r x n}`.
///
/// Each rank-`r` matrix arises from the same number of full-rank factor pairs,
/// so restricting to those pairs yields the uniform rank-`r` law.
pub fn exact_distribution(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    r: usize,
    subset: &SubsetA,
) -> Result<ExactDistribution, StatsError> {
    if r > m.min(n) {
        return Err(StatsError::DimensionMismatch(format!("rank {r} exceeds min({m}, {n})")));
    }
    let q = field.order();
    let pairs = space_size(q, m * r).saturating_mul(space_size(q, r * n));
    check_cap(pairs)?;
    let xs: Vec<(MatrixFq, bool)> = all_matrices(field, m, r)?
        .map(|x| {
            let full = x.rank() == r;
            (x, full)
        })
        .collect();
    let ys: Vec<(MatrixFq, bool)> = all_matrices(field, r, n)?
        .map(|y| {
            let full = y.rank() == r;
            (y, full)
        })
        .collect();
    let mut rank_counts = BTreeMap::new();
    let mut product_counts = BTreeMap::new();
    for (x, xfull) in &xs {
        for (y, yfull) in &ys {
            let ct = x.product_ct(y, subset)?;
            *product_counts.entry(ct).or_insert(0u64) += 1;
            if *xfull && *yfull {
                *rank_counts.entry(ct).or_insert(0u64) += 1;
            }
        }
    }
    Ok(ExactDistribution {
        rank_r: CtLaw::from_counts(&rank_counts),
        product: CtLaw::from_counts(&product_counts),
        pairs_enumerated: pairs,
    })
}

/// Law of `ct_A` over all `m x n` matrices, or only those of rank `rank`.
pub fn exact_law_all_matrices(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    subset: &SubsetA,
    rank: Option<usize>,
) -> Result<CtLaw, StatsError> {
    let mut counts = BTreeMap::new();
    for mat in all_matrices(field, m, n)? {
        if rank.is_none_or(|r| mat.rank() == r) {
            *counts.entry(mat.ct(subset)).or_insert(0u64) += 1;
        }
    }
    if counts.is_empty() {
        return Err(StatsError::DimensionMismatch(format!(
            "no {m}x{n} matrix has rank {rank:?}"
        )));
    }
    Ok(CtLaw::from_counts(&counts))
}

/// `|E[ct_A] - mu_A| / sigma_A` under the exact uniform rank-`r` law.
pub fn centering_gap(
    field: &Arc<FieldCtx>,
    m: usize,
    n: usize,
    r: usize,
    subset: &SubsetA,
) -> Result<f64, StatsError> {
    let params = MomentParams::new(field.order() as u64, r, m, n, subset.clone());
    let sigma2 = to_f64(&params.sigma2());
    if sigma2 <= 0.0 {
        return Err(StatsError::DegenerateSubset);
    }
    let law = exact_distribution(field, m, n, r, subset)?.rank_r;
    Ok((to_f64(&(law.mean() - params.mu())).abs()) / sigma2.sqrt())
}

/// `sum_N |P[XY = N] - P[M = N]|` by enumeration, split by the rank of `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvEnumeration {
    pub below: BigRational,
    pub equal: BigRational,
    pub above: BigRational,
}

impl TvEnumeration {
    pub fn total(&self) -> BigRational {
        &self.below + &self.equal + &self.above
    }
}

/// Enumerates the product law of `XY` (uniform factors) and the uniform
/// rank-`r` law over all of `F^{m x n}`, with no closed-form input.
pub fn enumerated_tv(field: &Arc<FieldCtx>, m: usize, n: usize, r: usize) -> Result<TvEnumeration, StatsError> {
    if r > m.min(n) {
        return Err(StatsError::DimensionMismatch(format!("rank {r} exceeds min({m}, {n})")));
    }
    let q = field.order();
    let pairs = space_size(q, m * r).saturating_mul(space_size(q, r * n));
    check_cap(pairs)?;
    check_cap(space_size(q, m * n))?;
    let xs: Vec<MatrixFq> = all_matrices(field, m, r)?.collect();
    let ys: Vec<MatrixFq> = all_matrices(field, r, n)?.collect();
    let mut product: BTreeMap<u64, u64> = BTreeMap::new();
    for x in &xs {
        for y in &ys {
            let prod = x.mul(y)?;
            *product.entry(matrix_key(&prod)).or_insert(0) += 1;
        }
    }
    let ranks: Vec<usize> = all_matrices(field, m, n)?.map(|mat| mat.rank()).collect();
    let rank_r_total = ranks.iter().filter(|&&k| k == r).count();
    let uniform = BigRational::new(BigInt::one(), BigInt::from(rank_r_total));
    let pair_total = BigInt::from(pairs);
    let mut out = TvEnumeration {
        below: BigRational::zero(),
        equal: BigRational::zero(),
        above: BigRational::zero(),
    };
    for (key, &rank) in ranks.iter().enumerate() {
        let p_prod = BigRational::new(
            BigInt::from(product.get(&(key as u64)).copied().unwrap_or(0)),
            pair_total.clone(),
        );
        let p_unif = if rank == r { uniform.clone() } else { BigRational::zero() };
        let diff = if p_prod > p_unif { p_prod - p_unif } else { p_unif - p_prod };
        match rank.cmp(&r) {
            std::cmp::Ordering::Less => out.below += diff,
            std::cmp::Ordering::Equal => out.equal += diff,
            std::cmp::Ordering::Greater => out.above += diff,
        }
    }
    Ok(out)
}
