//! Characters of `F_q`, and the Fourier and Möbius transforms of functions
//! `F_q^t -> C` built on them.
//!
//! Multiplicative characters are `chi_j(g^k) = exp(2 pi i jk / (q-1))` for the
//! field's fixed generator `g`, extended by `chi_j(0) = 0`; `chi_0` is trivial.
//! Additive characters are `psi_j(a) = exp(2 pi i Tr(j a) / p)`.
//!
//! Tuples `(a_1, ..., a_t)` are stored in mixed radix `q` with `a_1` least
//! significant; character tuples use radix `q - 1` the same way, so the
//! all-trivial tuple is index 0. Coordinates are 0-based throughout.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::counting::gamma_a;
use crate::field::{FieldCtx, FieldElement};

/// Upper bound on the number of entries of any function or spectrum table.
pub const MAX_TABLE_ENTRIES: usize = 1 << 20;

/// Tolerance for the support precondition of [`fourier_transform`].
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharacterError {
    #[error("subset {subset:#b} is not contained in [0, {arity})")]
    BadSubset { subset: u32, arity: usize },
    #[error("function is not supported on (F_q^*)^t: |f| = {magnitude:e} at a tuple with a zero coordinate")]
    NotSupportedOnUnits { magnitude: f64 },
    #[error("Möbius component for subset {0:#b} is missing")]
    MissingComponent(u32),
    #[error("expected arity {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("table with {0} entries exceeds the cap of {MAX_TABLE_ENTRIES}")]
    TableTooLarge(u128),
    #[error("tables belong to different fields")]
    FieldMismatch,
    #[error("character index {index} out of range (there are {count})")]
    BadCharacterIndex { index: usize, count: usize },
    #[error("table has {found} values, expected {expected}")]
    BadLength { expected: usize, found: usize },
}

fn checked_size(base: usize, arity: usize) -> Result<usize, CharacterError> {
    let size = (base as u128).pow(arity as u32);
    if size > MAX_TABLE_ENTRIES as u128 {
        Err(CharacterError::TableTooLarge(size))
    } else {
        Ok(size as usize)
    }
}

/// All multiplicative and additive characters of one field, as dense tables.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    field: Arc<FieldCtx>,
    q: usize,
    /// Row `j` holds `chi_j(a)` for every element index `a`.
    mult: Vec<Complex64>,
    /// Row `j` holds `psi_j(a)`.
    add: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(field: Arc<FieldCtx>) -> Self {
        let q = field.order();
        let p = field.characteristic();
        let units = q - 1;
        let unit_roots: Vec<Complex64> = (0..units)
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / units as f64))
            .collect();
        let prime_roots: Vec<Complex64> = (0..p)
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
            .collect();

        let mut mult = vec![Complex64::zero(); units * q];
        for j in 0..units {
            for a in field.elements().skip(1) {
                let k = field.log(a).expect("nonzero") as usize;
                mult[j * q + a.index()] = unit_roots[(j * k) % units];
            }
        }
        let mut add = vec![Complex64::zero(); q * q];
        for j in field.elements() {
            for a in field.elements() {
                add[j.index() * q + a.index()] = prime_roots[field.trace(field.mul(j, a)) as usize];
            }
        }
        CharacterTable {
            field,
            q,
            mult,
            add,
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Number of multiplicative characters, `q - 1`.
    pub fn num_multiplicative(&self) -> usize {
        self.q - 1
    }

    #[inline]
    pub fn chi(&self, j: usize, a: FieldElement) -> Complex64 {
        self.mult[j * self.q + a.index()]
    }

    #[inline]
    pub fn psi(&self, j: usize, a: FieldElement) -> Complex64 {
        self.add[j * self.q + a.index()]
    }

    /// Row of `chi_j` over all element indices.
    #[inline]
    pub fn chi_row(&self, j: usize) -> &[Complex64] {
        &self.mult[j * self.q..(j + 1) * self.q]
    }

    fn check_chars(&self, chars: &[usize]) -> Result<(), CharacterError> {
        match chars.iter().find(|&&j| j >= self.q - 1) {
            Some(&j) => Err(CharacterError::BadCharacterIndex {
                index: j,
                count: self.q - 1,
            }),
            None => Ok(()),
        }
    }
}

/// A subset of the coordinate set `[0, r)`, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSubset(u32);

impl IndexSubset {
    pub const EMPTY: IndexSubset = IndexSubset(0);

    pub fn from_mask(mask: u32) -> Self {
        IndexSubset(mask)
    }

    pub fn full(r: usize) -> Self {
        IndexSubset(((1u64 << r) - 1) as u32)
    }

    pub fn from_elements(elements: &[usize]) -> Self {
        IndexSubset(elements.iter().fold(0, |m, &k| m | (1 << k)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn is_subset_of(self, other: IndexSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn fits_arity(self, r: usize) -> bool {
        r >= 32 || self.0 >> r == 0
    }

    /// Elements in increasing order.
    pub fn elements(self) -> Vec<usize> {
        (0..32).filter(|&k| self.contains(k)).collect()
    }

    /// Every subset of `self`, including `∅` and `self`.
    pub fn subsets(self) -> impl Iterator<Item = IndexSubset> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
            Some(IndexSubset(cur))
        })
    }

    /// All `2^r` subsets of `[0, r)`.
    pub fn all(r: usize) -> impl Iterator<Item = IndexSubset> {
        (0..1u32 << r).map(IndexSubset)
    }
}

fn check_subset(s: IndexSubset, arity: usize) -> Result<(), CharacterError> {
    if s.fits_arity(arity) {
        Ok(())
    } else {
        Err(CharacterError::BadSubset {
            subset: s.0,
            arity,
        })
    }
}

/// Splits a mixed-radix index into digits.
#[inline]
fn decode(mut index: usize, radix: usize, digits: &mut [usize]) {
    for d in digits.iter_mut() {
        *d = index % radix;
        index /= radix;
    }
}

#[inline]
fn encode(digits: &[usize], radix: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * radix + d)
}

/// Dense complex-valued function on `F_q^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    q: usize,
    arity: usize,
    values: Vec<Complex64>,
}

impl FunctionTable {
    pub fn zeros(q: usize, arity: usize) -> Result<Self, CharacterError> {
        let len = checked_size(q, arity)?;
        Ok(FunctionTable {
            q,
            arity,
            values: vec![Complex64::zero(); len],
        })
    }

    pub fn from_values(q: usize, arity: usize, values: Vec<Complex64>) -> Result<Self, CharacterError> {
        let len = checked_size(q, arity)?;
        if values.len() != len {
            return Err(CharacterError::BadLength {
                expected: len,
                found: values.len(),
            });
        }
        Ok(FunctionTable { q, arity, values })
    }

    /// Tabulates `f` at every tuple; the closure receives element indices.
    pub fn from_fn(
        q: usize,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> Complex64,
    ) -> Result<Self, CharacterError> {
        let mut table = Self::zeros(q, arity)?;
        let mut digits = vec![0; arity];
        for (idx, v) in table.values.iter_mut().enumerate() {
            decode(idx, q, &mut digits);
            *v = f(&digits);
        }
        Ok(table)
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, tuple: &[usize]) -> Complex64 {
        debug_assert_eq!(tuple.len(), self.arity);
        self.values[encode(tuple, self.q)]
    }

    /// Largest modulus at a tuple with some zero coordinate.
    pub fn max_off_units(&self) -> f64 {
        let mut digits = vec![0; self.arity];
        let mut worst = 0.0f64;
        for (idx, v) in self.values.iter().enumerate() {
            decode(idx, self.q, &mut digits);
            if digits.contains(&0) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &FunctionTable) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Complex values indexed by tuples of multiplicative characters.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSpectrum {
    q: usize,
    arity: usize,
    values: Vec<Complex64>,
}

impl CharacterSpectrum {
    pub fn from_values(q: usize, arity: usize, values: Vec<Complex64>) -> Result<Self, CharacterError> {
        let len = checked_size(q - 1, arity)?;
        if values.len() != len {
            return Err(CharacterError::BadLength {
                expected: len,
                found: values.len(),
            });
        }
        Ok(CharacterSpectrum { q, arity, values })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, chars: &[usize]) -> Complex64 {
        debug_assert_eq!(chars.len(), self.arity);
        self.values[encode(chars, self.q - 1)]
    }
}

/// Applies `kernel` (an `out x in` matrix) along one axis of a mixed-radix tensor.
fn apply_axis(
    data: &[Complex64],
    dims: &[usize],
    axis: usize,
    kernel: &[Complex64],
    out_len: usize,
) -> Vec<Complex64> {
    let in_len = dims[axis];
    let inner: usize = dims[..axis].iter().product();
    let outer: usize = dims[axis + 1..].iter().product();
    let mut out = vec![Complex64::zero(); inner * out_len * outer];
    for o in 0..outer {
        for j in 0..out_len {
            let krow = &kernel[j * in_len..(j + 1) * in_len];
            for i in 0..inner {
                let mut acc = Complex64::zero();
                for (a, &k) in krow.iter().enumerate() {
                    acc += k * data[(o * in_len + a) * inner + i];
                }
                out[(o * out_len + j) * inner + i] = acc;
            }
        }
    }
    out
}

/// `(q-1)^{-t} sum_a f(a) conj(chi_1)(a_1) ... conj(chi_t)(a_t)` at every
/// character tuple. No support check: values off `(F_q^*)^t` are annihilated
/// by `chi(0) = 0`.
pub fn fourier_coefficients(
    f: &FunctionTable,
    table: &CharacterTable,
) -> Result<CharacterSpectrum, CharacterError> {
    if f.q != table.q {
        return Err(CharacterError::FieldMismatch);
    }
    let q = f.q;
    let units = q - 1;
    checked_size(units, f.arity)?;
    let scale = 1.0 / units as f64;
    let kernel: Vec<Complex64> = (0..units)
        .flat_map(|j| table.chi_row(j).iter().map(move |c| c.conj() * scale))
        .collect();
    let mut dims = vec![q; f.arity];
    let mut data = f.values.clone();
    for axis in 0..f.arity {
        data = apply_axis(&data, &dims, axis, &kernel, units);
        dims[axis] = units;
    }
    CharacterSpectrum::from_values(q, f.arity, data)
}

/// Fourier transform of a function supported on `(F_q^*)^t`.
pub fn fourier_transform(
    f: &FunctionTable,
    table: &CharacterTable,
) -> Result<CharacterSpectrum, CharacterError> {
    let off = f.max_off_units();
    if off > SUPPORT_TOL {
        return Err(CharacterError::NotSupportedOnUnits { magnitude: off });
    }
    fourier_coefficients(f, table)
}

/// `f(a) = sum_chi fhat(chi) chi_1(a_1) ... chi_t(a_t)`.
pub fn fourier_inverse(
    spectrum: &CharacterSpectrum,
    table: &CharacterTable,
) -> Result<FunctionTable, CharacterError> {
    if spectrum.q != table.q {
        return Err(CharacterError::FieldMismatch);
    }
    let q = spectrum.q;
    let units = q - 1;
    checked_size(q, spectrum.arity)?;
    // kernel[a][j] = chi_j(a)
    let kernel: Vec<Complex64> = (0..q)
        .flat_map(|a| (0..units).map(move |j| table.chi(j, FieldElement(a as u16))))
        .collect();
    let mut dims = vec![units; spectrum.arity];
    let mut data = spectrum.values.clone();
    for axis in 0..spectrum.arity {
        data = apply_axis(&data, &dims, axis, &kernel, q);
        dims[axis] = q;
    }
    FunctionTable::from_values(q, spectrum.arity, data)
}

/// Single Fourier coefficient of `f` at the character tuple `chars`, by the
/// defining sum over `(F_q^*)^t`.
pub fn fourier_coefficient_at(
    f: &FunctionTable,
    chars: &[usize],
    table: &CharacterTable,
) -> Result<Complex64, CharacterError> {
    if f.q != table.q {
        return Err(CharacterError::FieldMismatch);
    }
    if chars.len() != f.arity {
        return Err(CharacterError::ArityMismatch {
            expected: f.arity,
            found: chars.len(),
        });
    }
    table.check_chars(chars)?;
    let q = f.q;
    let units = q - 1;
    let count = checked_size(units, f.arity)?;
    let mut digits = vec![0; f.arity];
    let mut acc = Complex64::zero();
    for idx in 0..count {
        decode(idx, units, &mut digits);
        let mut weight = Complex64::one();
        let mut pos = 0;
        for (k, d) in digits.iter().enumerate().rev() {
            let a = d + 1;
            weight *= table.chi(chars[k], FieldElement(a as u16)).conj();
            pos = pos * q + a;
        }
        acc += f.values[pos] * weight;
    }
    Ok(acc / (units as f64).powi(f.arity as i32))
}

/// `f_(S)(a_S) = f(a_(S))`, zero-filling coordinates outside `S`.
pub fn restrict_embed(f: &FunctionTable, s: IndexSubset) -> Result<FunctionTable, CharacterError> {
    check_subset(s, f.arity)?;
    let pos = s.elements();
    let q = f.q;
    let strides: Vec<usize> = pos.iter().map(|&k| q.pow(k as u32)).collect();
    FunctionTable::from_fn(q, pos.len(), |digits| {
        let full: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
        f.values[full]
    })
}

/// `f_S(a_S) = sum_{T ⊆ S} (-1)^{|S \ T|} f(a_(T))`.
///
/// Computed as `prod_{k in S} (1 - Z_k)` applied to `f_(S)`, where `Z_k` zeroes
/// coordinate `k`; the result vanishes off `(F_q^*)^{|S|}`.
pub fn mobius_component(f: &FunctionTable, s: IndexSubset) -> Result<FunctionTable, CharacterError> {
    let mut g = restrict_embed(f, s)?;
    let q = g.q;
    for axis in 0..g.arity {
        let stride = q.pow(axis as u32);
        let block = stride * q;
        for base in (0..g.values.len()).step_by(block) {
            for i in 0..stride {
                let zero = g.values[base + i];
                for a in 1..q {
                    g.values[base + a * stride + i] -= zero;
                }
                g.values[base + i] = Complex64::zero();
            }
        }
    }
    Ok(g)
}

/// All `2^r` Möbius components of `f`.
pub fn mobius_components(f: &FunctionTable) -> Result<BTreeMap<IndexSubset, FunctionTable>, CharacterError> {
    IndexSubset::all(f.arity)
        .map(|s| Ok((s, mobius_component(f, s)?)))
        .collect()
}

/// `f(a) = sum_{S ⊆ [r]} f_S(a_S)`.
pub fn mobius_reconstruct(
    q: usize,
    r: usize,
    components: &BTreeMap<IndexSubset, FunctionTable>,
) -> Result<FunctionTable, CharacterError> {
    let mut out = FunctionTable::zeros(q, r)?;
    let mut digits = vec![0; r];
    for s in IndexSubset::all(r) {
        let comp = components
            .get(&s)
            .ok_or(CharacterError::MissingComponent(s.mask()))?;
        if comp.arity != s.len() {
            return Err(CharacterError::ArityMismatch {
                expected: s.len(),
                found: comp.arity,
            });
        }
        let pos = s.elements();
        for (idx, v) in out.values.iter_mut().enumerate() {
            decode(idx, q, &mut digits);
            let sub = pos.iter().rev().fold(0, |acc, &k| acc * q + digits[k]);
            *v += comp.values[sub];
        }
    }
    Ok(out)
}

/// `hat(f_S)(chi_S)` assembled from transforms of the embeddings `f_(T)`:
/// the alternating sum over `{k in S: chi_k != chi_0} ⊆ T ⊆ S`.
///
/// `chars` is aligned with the elements of `s` in increasing order.
pub fn fhat_component_from_embedded(
    f: &FunctionTable,
    s: IndexSubset,
    chars: &[usize],
    table: &CharacterTable,
) -> Result<Complex64, CharacterError> {
    check_subset(s, f.arity)?;
    let pos = s.elements();
    if chars.len() != pos.len() {
        return Err(CharacterError::ArityMismatch {
            expected: pos.len(),
            found: chars.len(),
        });
    }
    table.check_chars(chars)?;
    let nontrivial = IndexSubset::from_elements(
        &pos.iter()
            .zip(chars)
            .filter(|(_, &c)| c != 0)
            .map(|(&k, _)| k)
            .collect::<Vec<_>>(),
    );
    let mut acc = Complex64::zero();
    for t in s.subsets().filter(|t| nontrivial.is_subset_of(*t)) {
        let chars_t: Vec<usize> = pos
            .iter()
            .zip(chars)
            .filter(|(&k, _)| t.contains(k))
            .map(|(_, &c)| c)
            .collect();
        let embedded = restrict_embed(f, t)?;
        let coeff = fourier_coefficient_at(&embedded, &chars_t, table)?;
        let sign = if (s.len() - t.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += coeff * sign;
    }
    Ok(acc)
}

/// `f^(a)(a_1, ..., a_r) = [a_1 + ... + a_r = a]`.
pub fn indicator_family(field: &FieldCtx, a: FieldElement, r: usize) -> Result<FunctionTable, CharacterError> {
    FunctionTable::from_fn(field.order(), r, |digits| {
        let sum = digits
            .iter()
            .fold(FieldElement::ZERO, |s, &d| field.add(s, FieldElement(d as u16)));
        if sum == a {
            Complex64::one()
        } else {
            Complex64::zero()
        }
    })
}

/// Transform of the embedded indicator `f^(a)_(T)` at the all-trivial tuple:
/// `1/q - gamma_a(q) / (1 - q)^{|T|}`.
pub fn jacobi_embedded_trivial(q: u64, a_is_zero: bool, tsize: usize) -> BigRational {
    let one_minus_q = BigRational::from_integer(BigInt::from(1 - q as i64));
    let denom = num_traits::pow(one_minus_q, tsize);
    BigRational::new(1.into(), BigInt::from(q)) - gamma_a(q, a_is_zero) / denom
}

/// Transform of the Möbius component `f^(a)_S` at the all-trivial tuple:
/// `[S = ∅]/q - gamma_a(q) (1/q - 1)^{-|S|}`.
pub fn jacobi_component_trivial(q: u64, a_is_zero: bool, ssize: usize) -> BigRational {
    let base = BigRational::new(1.into(), BigInt::from(q)) - BigRational::one();
    let lead = if ssize == 0 {
        BigRational::new(1.into(), BigInt::from(q))
    } else {
        BigRational::zero()
    };
    lead - gamma_a(q, a_is_zero) * num_traits::pow(base.recip(), ssize)
}

/// `sum_{A ⊆ B} (-1)^{|A|}` for `|B| = size`, by direct enumeration.
pub fn alternating_subset_sum(size: usize) -> i64 {
    IndexSubset::full(size)
        .subsets()
        .map(|a| if a.len() % 2 == 0 { 1 } else { -1 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::to_f64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(p: u32, e: u32) -> CharacterTable {
        CharacterTable::new(Arc::new(FieldCtx::new(p, e).unwrap()))
    }

    fn random_fn(q: usize, arity: usize, rng: &mut ChaCha8Rng) -> FunctionTable {
        FunctionTable::from_fn(q, arity, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Definitional Möbius component, straight from the subset sum.
    fn mobius_oracle(f: &FunctionTable, s: IndexSubset) -> FunctionTable {
        let pos = s.elements();
        let q = f.order();
        FunctionTable::from_fn(q, pos.len(), |a_s| {
            let mut acc = Complex64::zero();
            for t in s.subsets() {
                let mut full = vec![0; f.arity()];
                for (i, &k) in pos.iter().enumerate() {
                    if t.contains(k) {
                        full[k] = a_s[i];
                    }
                }
                let sign = if (s.len() - t.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += f.get(&full) * sign;
            }
            acc
        })
        .unwrap()
    }

    #[test]
    fn subset_iteration() {
        let s = IndexSubset::from_elements(&[0, 2]);
        let subs: Vec<u32> = s.subsets().map(|t| t.mask()).collect();
        assert_eq!(subs, vec![0, 1, 4, 5]);
        assert_eq!(IndexSubset::EMPTY.subsets().count(), 1);
        assert_eq!(IndexSubset::all(3).count(), 8);
    }

    #[test]
    fn restrict_embed_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_fn(3, 2, &mut rng);
        assert_eq!(restrict_embed(&f, IndexSubset::full(2)).unwrap(), f);
        let e = restrict_embed(&f, IndexSubset::EMPTY).unwrap();
        assert_eq!(e.values(), &[f.get(&[0, 0])]);

        let ind = FunctionTable::from_fn(2, 2, |a| c(if a == [1, 1] { 1.0 } else { 0.0 })).unwrap();
        let r = restrict_embed(&ind, IndexSubset::from_elements(&[0])).unwrap();
        assert!(r.values().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(
            restrict_embed(&f, IndexSubset::from_elements(&[2])),
            Err(CharacterError::BadSubset { .. })
        ));
    }

    #[test]
    fn mobius_component_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_fn(5, 1, &mut rng);
        let g = mobius_component(&f, IndexSubset::full(1)).unwrap();
        for a in 0..5 {
            let expected = if a == 0 { Complex64::zero() } else { f.get(&[a]) - f.get(&[0]) };
            assert!((g.get(&[a]) - expected).norm() < 1e-15);
        }
        let e = mobius_component(&f, IndexSubset::EMPTY).unwrap();
        assert_eq!(e.values(), &[f.get(&[0])]);

        let field = FieldCtx::new(2, 1).unwrap();
        let f0 = indicator_family(&field, FieldElement::ZERO, 1).unwrap();
        let g0 = mobius_component(&f0, IndexSubset::full(1)).unwrap();
        assert_eq!(g0.get(&[1]), c(-1.0));
        assert_eq!(g0.get(&[0]), c(0.0));
    }

    #[test]
    fn mobius_component_matches_subset_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 3, 4] {
            for r in 0..=3 {
                let f = random_fn(q, r, &mut rng);
                for s in IndexSubset::all(r) {
                    let fast = mobius_component(&f, s).unwrap();
                    let slow = mobius_oracle(&f, s);
                    assert!(fast.max_abs_diff(&slow) < 1e-12);
                    assert_eq!(fast.max_off_units(), 0.0);
                }
            }
        }
    }

    #[test]
    fn mobius_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_fn(3, 2, &mut rng);
        let comps = mobius_components(&f).unwrap();
        assert!(mobius_reconstruct(3, 2, &comps).unwrap().max_abs_diff(&f) < 1e-12);
        let zero = FunctionTable::zeros(3, 2).unwrap();
        let z = mobius_reconstruct(3, 2, &mobius_components(&zero).unwrap()).unwrap();
        assert_eq!(z, zero);
        let mut partial = comps.clone();
        partial.remove(&IndexSubset::from_mask(2));
        assert_eq!(
            mobius_reconstruct(3, 2, &partial),
            Err(CharacterError::MissingComponent(2))
        );
    }

    #[test]
    fn fourier_examples() {
        let t = table(3, 1);
        let f = FunctionTable::from_fn(3, 1, |a| c(if a[0] == 1 { 1.0 } else { 0.0 })).unwrap();
        let fhat = fourier_transform(&f, &t).unwrap();
        for j in 0..2 {
            assert!((fhat.get(&[j]) - c(0.5)).norm() < 1e-15);
        }
        let back = fourier_inverse(&fhat, &t).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-15);

        let konst = FunctionTable::from_values(3, 0, vec![Complex64::new(2.0, -1.0)]).unwrap();
        assert_eq!(fourier_transform(&konst, &t).unwrap().values(), konst.values());

        let zero = FunctionTable::zeros(3, 2).unwrap();
        assert!(fourier_transform(&zero, &t).unwrap().values().iter().all(|v| v.norm() == 0.0));

        let t2 = table(2, 1);
        let ones = FunctionTable::from_fn(2, 2, |a| c(if a.contains(&0) { 0.0 } else { 3.0 })).unwrap();
        let back = fourier_inverse(&fourier_transform(&ones, &t2).unwrap(), &t2).unwrap();
        assert!(back.max_abs_diff(&ones) < 1e-15);
    }

    #[test]
    fn fourier_rejects_unsupported() {
        let t = table(5, 1);
        let f = FunctionTable::from_fn(5, 1, |_| c(1.0)).unwrap();
        assert!(matches!(
            fourier_transform(&f, &t),
            Err(CharacterError::NotSupportedOnUnits { .. })
        ));
    }

    #[test]
    fn separable_transform_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, e) in [(2, 2), (5, 1), (3, 1)] {
            let t = table(p, e);
            let q = t.order();
            let f = random_fn(q, 3, &mut rng);
            let spec = fourier_coefficients(&f, &t).unwrap();
            let mut chars = vec![0; 3];
            for idx in 0..(q - 1).pow(3) {
                decode(idx, q - 1, &mut chars);
                let direct = fourier_coefficient_at(&f, &chars, &t).unwrap();
                assert!((spec.get(&chars) - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fhat_component_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = table(3, 1);
        let f = random_fn(3, 2, &mut rng);
        let s = IndexSubset::full(2);
        let direct = fourier_transform(&mobius_component(&f, s).unwrap(), &t).unwrap();
        for chars in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let via = fhat_component_from_embedded(&f, s, &chars, &t).unwrap();
            assert!((via - direct.get(&chars)).norm() < 1e-10);
        }
        let empty = fhat_component_from_embedded(&f, IndexSubset::EMPTY, &[], &t).unwrap();
        assert_eq!(empty, f.get(&[0, 0]));
    }

    #[test]
    fn indicator_family_examples() {
        let field = FieldCtx::new(2, 1).unwrap();
        let f = indicator_family(&field, FieldElement::ONE, 2).unwrap();
        let support: Vec<_> = (0..4).filter(|&i| f.values()[i].re == 1.0).collect();
        // (a_1, a_2) = (1, 0) -> index 1; (0, 1) -> index 2
        assert_eq!(support, vec![1, 2]);
        let f0 = indicator_family(&field, FieldElement::ZERO, 0).unwrap();
        assert_eq!(f0.values(), &[c(1.0)]);
        let f1 = indicator_family(&field, FieldElement::ONE, 0).unwrap();
        assert_eq!(f1.values(), &[c(0.0)]);
    }

    #[test]
    fn jacobi_examples() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        for q in [2u64, 3, 7] {
            assert!(jacobi_embedded_trivial(q, true, 1).is_zero());
            assert_eq!(jacobi_embedded_trivial(q, false, 1), r(1, q as i64 - 1));
            assert_eq!(jacobi_embedded_trivial(q, true, 0), BigRational::one());
            assert!(jacobi_embedded_trivial(q, false, 0).is_zero());
            assert_eq!(jacobi_component_trivial(q, true, 0), BigRational::one());
            assert!(jacobi_component_trivial(q, false, 0).is_zero());
        }
        assert_eq!(jacobi_component_trivial(2, true, 1), r(-1, 1));
        assert_eq!(jacobi_component_trivial(3, false, 2), r(-3, 4));
    }

    /// Brute force through the definitions for every `a`, sizes up to 3, `q <= 5`.
    #[test]
    fn jacobi_closed_forms_match_definitions() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let t = table(p, e);
            let field = t.field().clone();
            let q = field.order() as u64;
            for a in field.elements() {
                for size in 0..=3 {
                    let f = indicator_family(&field, a, size).unwrap();
                    let zeros = vec![0; size];
                    let embedded = fourier_coefficient_at(&f, &zeros, &t).unwrap();
                    let expect = to_f64(&jacobi_embedded_trivial(q, a.is_zero(), size));
                    assert!((embedded - c(expect)).norm() < 1e-10);

                    let comp = mobius_component(&f, IndexSubset::full(size)).unwrap();
                    let via = fourier_transform(&comp, &t).unwrap().get(&zeros);
                    let expect = to_f64(&jacobi_component_trivial(q, a.is_zero(), size));
                    assert!((via - c(expect)).norm() < 1e-10, "q={q} a={a} size={size}");
                }
            }
        }
    }

    #[test]
    fn alternating_subset_sums() {
        assert_eq!(alternating_subset_sum(0), 1);
        for b in 1..=10 {
            assert_eq!(alternating_subset_sum(b), 0);
        }
    }

    #[test]
    fn table_caps() {
        assert!(matches!(FunctionTable::zeros(64, 4), Err(CharacterError::TableTooLarge(_))));
        assert!(FunctionTable::zeros(32, 4).is_ok());
    }
}
