use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::statistics::{expected_statistic, w_statistic, z_statistic, zw_moments};
use super::StatsError;
use crate::characters::{
    fourier_coefficients, jacobi_component_trivial, mobius_component, CharacterTable, FunctionTable,
    IndexSubset,
};
use crate::counting::{to_f64, MomentParams};
use crate::field::FieldElement;
use crate::matrix::{MatrixFq, SubsetA};

/// Largest inner dimension the decomposer accepts.
pub const MAX_DECOMPOSITION_RANK: usize = 6;

/// Aggregated coefficients `sum_{a in A} hat(f^(a)_S)(chi)` for every `S ⊆ [r]`.
///
/// Since `f^(a)` is linear in the indicator, the coefficients are those of the
/// single function `[a_1 + ... + a_r in A]`. All-trivial tuples use the closed
/// form.
#[derive(Debug, Clone)]
pub struct CtDecomposer<'t> {
    table: &'t CharacterTable,
    r: usize,
    subset: SubsetA,
    gamma: f64,
    /// indexed by subset mask; each entry is a spectrum over `(q-1)^{|S|}` tuples
    coeffs: Vec<Vec<Complex64>>,
}

/// The terms of `ct_A(XY) = mu + main + z_term + w_term`.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub ct: u64,
    pub mu: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub z: u64,
    pub w: u64,
    pub z_term: f64,
    pub w_term: f64,
    pub total: f64,
    pub residual: f64,
}

fn decode(mut idx: usize, radix: usize, out: &mut [usize]) {
    for d in out.iter_mut() {
        *d = idx % radix;
        idx /= radix;
    }
}

impl<'t> CtDecomposer<'t> {
    pub fn new(table: &'t CharacterTable, r: usize, subset: &SubsetA) -> Result<Self, StatsError> {
        if r > MAX_DECOMPOSITION_RANK {
            return Err(StatsError::RankTooLarge {
                r,
                max: MAX_DECOMPOSITION_RANK,
            });
        }
        let field = table.field();
        let q = field.order();
        if subset.field_order() != q {
            return Err(StatsError::DimensionMismatch(format!(
                "subset over F_{} used with F_{q}",
                subset.field_order()
            )));
        }
        let indicator = FunctionTable::from_fn(q, r, |digits| {
            let sum = digits
                .iter()
                .fold(FieldElement::ZERO, |s, &d| field.add(s, FieldElement(d as u16)));
            if subset.contains(sum) {
                Complex64::one()
            } else {
                Complex64::zero()
            }
        })?;
        let zero_in_a = subset.contains(FieldElement::ZERO);
        let nonzero_in_a = subset.len() - usize::from(zero_in_a);
        let mut coeffs = Vec::with_capacity(1 << r);
        for s in IndexSubset::all(r) {
            let component = mobius_component(&indicator, s)?;
            let mut spectrum = fourier_coefficients(&component, table)?.values().to_vec();
            let weight = |k: usize| BigRational::from_integer(BigInt::from(k));
            let trivial = jacobi_component_trivial(q as u64, true, s.len()) * weight(usize::from(zero_in_a))
                + jacobi_component_trivial(q as u64, false, s.len()) * weight(nonzero_in_a);
            spectrum[0] = Complex64::new(to_f64(&trivial), 0.0);
            coeffs.push(spectrum);
        }
        let gamma = to_f64(&crate::counting::gamma_subset(q as u64, subset));
        Ok(CtDecomposer {
            table,
            r,
            subset: subset.clone(),
            gamma,
            coeffs,
        })
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Aggregated coefficient at `(S, chi)`; `chars` aligned with `S` in increasing order.
    pub fn coefficient(&self, s: IndexSubset, chars: &[usize]) -> Complex64 {
        let units = self.table.num_multiplicative();
        let idx = chars.iter().rev().fold(0, |acc, &j| acc * units + j);
        self.coeffs[s.mask() as usize][idx]
    }

    /// `X_{S,chi}` for every tuple `chi`, from lines given as `entry(line, coordinate)`.
    fn statistics(
        &self,
        s: IndexSubset,
        lines: usize,
        entry: impl Fn(usize, usize) -> FieldElement,
    ) -> Vec<Complex64> {
        let units = self.table.num_multiplicative();
        let pos = s.elements();
        let count = units.pow(pos.len() as u32);
        let mut out = vec![Complex64::zero(); count];
        let mut digits = vec![0; pos.len()];
        let mut vals = vec![FieldElement::ZERO; pos.len()];
        for line in 0..lines {
            for (v, &k) in vals.iter_mut().zip(&pos) {
                *v = entry(line, k);
            }
            if vals.iter().any(|v| v.is_zero()) {
                continue;
            }
            for (idx, o) in out.iter_mut().enumerate() {
                decode(idx, units, &mut digits);
                let mut prod = Complex64::one();
                for (&j, &v) in digits.iter().zip(&vals) {
                    prod *= self.table.chi(j, v);
                }
                *o += prod;
            }
        }
        out
    }

    /// `sum_{S, chi} c(S, chi) X_{S,chi} E[Y_{S,chi}]`, which collapses to
    /// `|A| m n / q - gamma_A n Z` for every `X`.
    pub fn row_side_sum(&self, x: &MatrixFq, n: usize) -> Result<Complex64, StatsError> {
        self.check_x(x)?;
        let q = self.table.order();
        let mut acc = Complex64::zero();
        for s in IndexSubset::all(self.r) {
            let xs = self.statistics(s, x.rows(), |i, k| x.get(i, k));
            let ey = expected_statistic(q, &vec![0; s.len()], n);
            acc += self.coeffs[s.mask() as usize][0] * xs[0] * ey;
        }
        Ok(acc)
    }

    fn check_x(&self, x: &MatrixFq) -> Result<(), StatsError> {
        if x.cols() != self.r {
            return Err(StatsError::DimensionMismatch(format!(
                "X has {} columns, expected {}",
                x.cols(),
                self.r
            )));
        }
        if **x.field() != **self.table.field() {
            return Err(StatsError::DimensionMismatch("X is over a different field".into()));
        }
        Ok(())
    }

    pub fn decompose(&self, x: &MatrixFq, y: &MatrixFq) -> Result<Decomposition, StatsError> {
        self.check_x(x)?;
        if y.rows() != self.r {
            return Err(StatsError::DimensionMismatch(format!(
                "Y has {} rows, expected {}",
                y.rows(),
                self.r
            )));
        }
        let ct = x.product_ct(y, &self.subset)?;
        let q = self.table.order();
        let (m, n) = (x.rows(), y.cols());
        let mu = to_f64(&MomentParams::new(q as u64, self.r, m, n, self.subset.clone()).mu());
        let mut main = Complex64::zero();
        for s in IndexSubset::all(self.r) {
            let xs = self.statistics(s, m, |i, k| x.get(i, k));
            let ys = self.statistics(s, n, |j, k| y.get(k, j));
            let trivial = vec![0; s.len()];
            let (ex, ey) = (expected_statistic(q, &trivial, m), expected_statistic(q, &trivial, n));
            for (idx, c) in self.coeffs[s.mask() as usize].iter().enumerate() {
                // expectations vanish off the all-trivial tuple
                let (cx, cy) = if idx == 0 { (ex, ey) } else { (Complex64::zero(), Complex64::zero()) };
                main += c * (xs[idx] - cx) * (ys[idx] - cy);
            }
        }
        let zw = zw_moments(q, self.r, m, n);
        let (z, w) = (z_statistic(x), w_statistic(y));
        let z_term = -self.gamma * n as f64 * (z as f64 - zw.mean_z);
        let w_term = -self.gamma * m as f64 * (w as f64 - zw.mean_w);
        let total = mu + main.re + z_term + w_term;
        Ok(Decomposition {
            ct,
            mu,
            main_re: main.re,
            main_im: main.im,
            z,
            w,
            z_term,
            w_term,
            total,
            residual: ct as f64 - total,
        })
    }
}

/// One-shot [`CtDecomposer::decompose`].
pub fn decompose_ct(
    table: &CharacterTable,
    x: &MatrixFq,
    y: &MatrixFq,
    subset: &SubsetA,
) -> Result<Decomposition, StatsError> {
    CtDecomposer::new(table, x.cols(), subset)?.decompose(x, y)
}
