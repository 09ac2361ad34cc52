//! Numerical checks of the character identities the decomposition relies on.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characters::{
    alternating_subset_sum, fhat_component_from_embedded, fourier_coefficient_at, fourier_inverse,
    fourier_transform, indicator_family, jacobi_component_trivial, jacobi_embedded_trivial,
    mobius_component, mobius_components, mobius_reconstruct, restrict_embed, CharacterError,
    CharacterTable, FunctionTable, IndexSubset,
};
use crate::counting::to_f64;
use crate::field::{FieldCtx, FieldElement};

#[derive(Debug, Clone, Serialize)]
pub struct LemmaResult {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub field: String,
    pub r: usize,
    pub seed: u64,
    pub results: Vec<LemmaResult>,
    pub all_pass: bool,
}

fn result(name: &'static str, max_residual: f64, tolerance: f64) -> LemmaResult {
    LemmaResult {
        name,
        max_residual,
        tolerance,
        pass: max_residual <= tolerance,
    }
}

fn elem(a: usize) -> FieldElement {
    FieldElement(a as u16)
}

fn indicator(b: bool) -> Complex64 {
    Complex64::new(if b { 1.0 } else { 0.0 }, 0.0)
}

/// `(1/q) sum_psi psi(a) = [a = 0]` for every `a`.
fn additive_sum_over_characters(t: &CharacterTable) -> f64 {
    let q = t.order();
    (0..q)
        .map(|a| {
            let s: Complex64 = (0..q).map(|j| t.psi(j, elem(a))).sum();
            (s / q as f64 - indicator(a == 0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `(1/(q-1)) sum_chi chi(a) = [a = 1]` for every `a`.
fn multiplicative_sum_over_characters(t: &CharacterTable) -> f64 {
    let units = t.num_multiplicative();
    (0..t.order())
        .map(|a| {
            let s: Complex64 = (0..units).map(|j| t.chi(j, elem(a))).sum();
            (s / units as f64 - indicator(a == 1)).norm()
        })
        .fold(0.0, f64::max)
}

/// `(1/q) sum_a psi(a) = [psi = psi_0]` for every `psi`.
fn additive_sum_over_elements(t: &CharacterTable) -> f64 {
    let q = t.order();
    (0..q)
        .map(|j| {
            let s: Complex64 = (0..q).map(|a| t.psi(j, elem(a))).sum();
            (s / q as f64 - indicator(j == 0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `(1/(q-1)) sum_a chi(a) = [chi = chi_0]` for every `chi`.
fn multiplicative_sum_over_elements(t: &CharacterTable) -> f64 {
    let units = t.num_multiplicative();
    (0..units)
        .map(|j| {
            let s: Complex64 = (0..t.order()).map(|a| t.chi(j, elem(a))).sum();
            (s / units as f64 - indicator(j == 0)).norm()
        })
        .fold(0.0, f64::max)
}

fn random_on_units(q: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<FunctionTable, CharacterError> {
    FunctionTable::from_fn(q, r, |d| {
        if d.contains(&0) {
            Complex64::zero()
        } else {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }
    })
}

fn random_dense(q: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<FunctionTable, CharacterError> {
    FunctionTable::from_fn(q, r, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn fourier_round_trip(t: &CharacterTable, r: usize, rng: &mut ChaCha8Rng) -> Result<f64, CharacterError> {
    let f = random_on_units(t.order(), r, rng)?;
    let back = fourier_inverse(&fourier_transform(&f, t)?, t)?;
    Ok(f.max_abs_diff(&back))
}

fn mobius_support_and_reconstruction(
    q: usize,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), CharacterError> {
    let f = random_dense(q, r, rng)?;
    let comps = mobius_components(&f)?;
    let support = comps.values().map(|c| c.max_off_units()).fold(0.0, f64::max);
    let recon = mobius_reconstruct(q, r, &comps)?;
    Ok((support, f.max_abs_diff(&recon)))
}

/// `f(a) = sum_S sum_chi hat(f_S)(chi) prod_{k in S} chi_k(a_k)`.
fn mobius_fourier_inversion(t: &CharacterTable, r: usize, rng: &mut ChaCha8Rng) -> Result<f64, CharacterError> {
    let q = t.order();
    let f = random_dense(q, r, rng)?;
    let mut parts = BTreeMap::new();
    for s in IndexSubset::all(r) {
        let spectrum = fourier_transform(&mobius_component(&f, s)?, t)?;
        parts.insert(s, fourier_inverse(&spectrum, t)?);
    }
    Ok(f.max_abs_diff(&mobius_reconstruct(q, r, &parts)?))
}

/// Alternating sum of embedded transforms against the transform of each component.
fn embedded_cross_check(t: &CharacterTable, r: usize, rng: &mut ChaCha8Rng) -> Result<f64, CharacterError> {
    let f = random_dense(t.order(), r, rng)?;
    let units = t.num_multiplicative();
    let mut worst: f64 = 0.0;
    for s in IndexSubset::all(r) {
        let spectrum = fourier_transform(&mobius_component(&f, s)?, t)?;
        for (idx, &v) in spectrum.values().iter().enumerate() {
            let chars = digits(idx, units, s.len());
            worst = worst.max((fhat_component_from_embedded(&f, s, &chars, t)? - v).norm());
        }
    }
    Ok(worst)
}

fn digits(mut idx: usize, radix: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = idx % radix;
            idx /= radix;
            d
        })
        .collect()
}

/// Closed forms at the all-trivial tuple against the defining sums over units.
fn jacobi_closed_forms(t: &CharacterTable, r: usize) -> Result<(f64, f64), CharacterError> {
    let field = t.field();
    let q = t.order();
    let (mut embedded, mut component): (f64, f64) = (0.0, 0.0);
    for a in 0..q {
        let f = indicator_family(field, elem(a), r)?;
        for s in IndexSubset::all(r) {
            let trivial = vec![0; s.len()];
            let e = fourier_coefficient_at(&restrict_embed(&f, s)?, &trivial, t)?;
            let want = to_f64(&jacobi_embedded_trivial(q as u64, a == 0, s.len()));
            embedded = embedded.max((e - Complex64::new(want, 0.0)).norm());
            let c = fourier_coefficient_at(&mobius_component(&f, s)?, &trivial, t)?;
            let want = to_f64(&jacobi_component_trivial(q as u64, a == 0, s.len()));
            component = component.max((c - Complex64::new(want, 0.0)).norm());
        }
    }
    Ok((embedded, component))
}

fn subset_identity(max: usize) -> f64 {
    (0..=max)
        .map(|k| (alternating_subset_sum(k) - i64::from(k == 0)).abs() as f64)
        .fold(0.0, f64::max)
}

/// Runs every check over one field with tuples of length `r`.
pub fn run_lemmas(field: Arc<FieldCtx>, r: usize, seed: u64) -> Result<LemmaReport, CharacterError> {
    let t = CharacterTable::new(field.clone());
    let q = t.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (support, recon) = mobius_support_and_reconstruction(q, r, &mut rng)?;
    let (jac_embedded, jac_component) = jacobi_closed_forms(&t, r)?;
    let results = vec![
        result("additive_sum_over_characters", additive_sum_over_characters(&t), 1e-12),
        result("multiplicative_sum_over_characters", multiplicative_sum_over_characters(&t), 1e-12),
        result("additive_sum_over_elements", additive_sum_over_elements(&t), 1e-12),
        result("multiplicative_sum_over_elements", multiplicative_sum_over_elements(&t), 1e-12),
        result("fourier_round_trip", fourier_round_trip(&t, r, &mut rng)?, 1e-10),
        result("mobius_support", support, 1e-12),
        result("mobius_reconstruction", recon, 1e-12),
        result("mobius_fourier_inversion", mobius_fourier_inversion(&t, r, &mut rng)?, 1e-9),
        result("embedded_transform_cross_check", embedded_cross_check(&t, r, &mut rng)?, 1e-10),
        result("jacobi_embedded_trivial", jac_embedded, 1e-10),
        result("jacobi_component_trivial", jac_component, 1e-10),
        result("alternating_subset_sum", subset_identity(10), 0.0),
    ];
    let all_pass = results.iter().all(|x| x.pass);
    Ok(LemmaReport {
        field: field.spec().to_string(),
        r,
        seed,
        results,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_on_small_fields() {
        for (p, e, r) in [(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (2, 3, 2), (7, 1, 2), (3, 2, 2)] {
            let rep = run_lemmas(Arc::new(FieldCtx::new(p, e).unwrap()), r, 1).unwrap();
            for res in &rep.results {
                assert!(res.pass, "{} failed over F_{}: {:e}", res.name, rep.field, res.max_residual);
            }
            assert!(rep.all_pass);
        }
    }
}
