use num_complex::Complex64;
use num_traits::{One, Zero};

use super::StatsError;
use crate::characters::{CharacterTable, IndexSubset};
use crate::field::FieldElement;
use crate::matrix::MatrixFq;

fn check(s: IndexSubset, chars: &[usize], r: usize) -> Result<(), StatsError> {
    if !s.fits_arity(r) {
        return Err(StatsError::BadSubset { subset: s.mask(), r });
    }
    if chars.len() != s.len() {
        return Err(StatsError::DimensionMismatch(format!(
            "{} characters for a subset of size {}",
            chars.len(),
            s.len()
        )));
    }
    Ok(())
}

fn line_sum<'a>(
    lines: impl Iterator<Item = Box<dyn Fn(usize) -> FieldElement + 'a>>,
    pos: &[usize],
    chars: &[usize],
    table: &CharacterTable,
) -> Complex64 {
    let mut total = Complex64::zero();
    for entry in lines {
        let mut prod = Complex64::one();
        for (&k, &j) in pos.iter().zip(chars) {
            let v = entry(k);
            if v.is_zero() {
                prod = Complex64::zero();
                break;
            }
            prod *= table.chi(j, v);
        }
        total += prod;
    }
    total
}

/// `X_{S,chi} = sum_i prod_{k in S} chi_k(x_{i,k})` over the rows of `x` (`m x r`).
///
/// `chars` is aligned with the elements of `s` in increasing order.
pub fn x_statistic(
    x: &MatrixFq,
    s: IndexSubset,
    chars: &[usize],
    table: &CharacterTable,
) -> Result<Complex64, StatsError> {
    check(s, chars, x.cols())?;
    let pos = s.elements();
    let rows = (0..x.rows()).map(|i| Box::new(move |k| x.get(i, k)) as Box<dyn Fn(usize) -> FieldElement>);
    Ok(line_sum(rows, &pos, chars, table))
}

/// `Y_{S,chi} = sum_j prod_{k in S} chi_k(y_{k,j})` over the columns of `y` (`r x n`).
pub fn y_statistic(
    y: &MatrixFq,
    s: IndexSubset,
    chars: &[usize],
    table: &CharacterTable,
) -> Result<Complex64, StatsError> {
    check(s, chars, y.rows())?;
    let pos = s.elements();
    let cols = (0..y.cols()).map(|j| Box::new(move |k| y.get(k, j)) as Box<dyn Fn(usize) -> FieldElement>);
    Ok(line_sum(cols, &pos, chars, table))
}

/// `C(chi_S) (1 - 1/q)^{|S|} * lines`, where `C` is 1 iff every character is trivial.
pub fn expected_statistic(q: usize, chars: &[usize], lines: usize) -> Complex64 {
    if chars.iter().any(|&j| j != 0) {
        return Complex64::zero();
    }
    let p = (1.0 - 1.0 / q as f64).powi(chars.len() as i32);
    Complex64::new(p * lines as f64, 0.0)
}

pub fn expected_x_statistic(q: usize, chars: &[usize], m: usize) -> Complex64 {
    expected_statistic(q, chars, m)
}

pub fn expected_y_statistic(q: usize, chars: &[usize], n: usize) -> Complex64 {
    expected_statistic(q, chars, n)
}

/// Number of all-zero rows of `x`.
pub fn z_statistic(x: &MatrixFq) -> u64 {
    (0..x.rows())
        .filter(|&i| x.row(i).iter().all(|v| v.is_zero()))
        .count() as u64
}

/// Number of all-zero columns of `y`.
pub fn w_statistic(y: &MatrixFq) -> u64 {
    (0..y.cols())
        .filter(|&j| (0..y.rows()).all(|k| y.get(k, j).is_zero()))
        .count() as u64
}

/// Means and variances of `Z` and `W`, both binomial with success probability `q^{-r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZwMoments {
    pub mean_z: f64,
    pub var_z: f64,
    pub mean_w: f64,
    pub var_w: f64,
}

pub fn zw_moments(q: usize, r: usize, m: usize, n: usize) -> ZwMoments {
    let p = (q as f64).powi(-(r as i32));
    ZwMoments {
        mean_z: p * m as f64,
        var_z: p * (1.0 - p) * m as f64,
        mean_w: p * n as f64,
        var_w: p * (1.0 - p) * n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn setup(p: u32) -> (Arc<FieldCtx>, CharacterTable) {
        let f = Arc::new(FieldCtx::new(p, 1).unwrap());
        let t = CharacterTable::new(f.clone());
        (f, t)
    }

    #[test]
    fn empty_subset_counts_lines() {
        let (f, t) = setup(3);
        let x = MatrixFq::from_indices(f, 4, 2, &[0, 1, 2, 2, 0, 0, 1, 1]).unwrap();
        assert_eq!(x_statistic(&x, IndexSubset::EMPTY, &[], &t).unwrap(), Complex64::new(4.0, 0.0));
        assert_eq!(expected_x_statistic(3, &[], 4), Complex64::new(4.0, 0.0));
    }

    #[test]
    fn trivial_character_counts_nonzeros_f2() {
        let (f, t) = setup(2);
        let x = MatrixFq::from_indices(f.clone(), 4, 2, &[1, 0, 0, 1, 1, 1, 0, 0]).unwrap();
        let s = IndexSubset::from_elements(&[0]);
        assert_eq!(x_statistic(&x, s, &[0], &t).unwrap().re, 2.0);
        let y = x.transpose();
        assert_eq!(y_statistic(&y, s, &[0], &t).unwrap().re, 2.0);
        // rows with a zero in S contribute nothing
        let both = IndexSubset::full(2);
        assert_eq!(x_statistic(&x, both, &[0, 0], &t).unwrap().re, 1.0);
    }

    #[test]
    fn expected_values() {
        assert_eq!(expected_x_statistic(5, &[0, 2], 10), Complex64::zero());
        assert_eq!(expected_x_statistic(2, &[0, 0], 8), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn z_w_examples() {
        let (f, _) = setup(2);
        assert_eq!(z_statistic(&MatrixFq::zeros(f.clone(), 5, 2)), 5);
        let x = MatrixFq::from_indices(f.clone(), 2, 1, &[1, 0]).unwrap();
        assert_eq!(z_statistic(&x), 1);
        let y = MatrixFq::from_indices(f, 2, 3, &[1, 0, 0, 0, 1, 0]).unwrap();
        assert_eq!(w_statistic(&y), 1);
    }

    #[test]
    fn zw_moment_values() {
        let z = zw_moments(2, 1, 4, 6);
        assert_eq!((z.mean_z, z.var_z, z.mean_w, z.var_w), (2.0, 1.0, 3.0, 1.5));
        let z0 = zw_moments(3, 0, 7, 2);
        assert_eq!((z0.mean_z, z0.var_z), (7.0, 0.0));
    }

    #[test]
    fn bad_inputs() {
        let (f, t) = setup(3);
        let x = MatrixFq::zeros(f, 2, 2);
        assert!(matches!(
            x_statistic(&x, IndexSubset::from_elements(&[2]), &[0], &t),
            Err(StatsError::BadSubset { .. })
        ));
        assert!(x_statistic(&x, IndexSubset::full(2), &[0], &t).is_err());
    }
}
