//! Dense matrices over `F_q` and the entry statistics `ct_A` and `wt`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("entry {value} at ({row}, {col}) is not an element of F_{q}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        q: usize,
    },
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

/// Membership mask over the element indices of `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetA {
    members: Vec<bool>,
}

impl SubsetA {
    pub fn empty(q: usize) -> Self {
        SubsetA {
            members: vec![false; q],
        }
    }

    pub fn full(q: usize) -> Self {
        SubsetA {
            members: vec![true; q],
        }
    }

    /// `F_q \ {0}`
    pub fn nonzero(q: usize) -> Self {
        let mut s = Self::full(q);
        s.members[0] = false;
        s
    }

    /// `{0}`
    pub fn zero(q: usize) -> Self {
        let mut s = Self::empty(q);
        s.members[0] = true;
        s
    }

    pub fn from_indices(q: usize, indices: &[u32]) -> Result<Self, MatrixError> {
        let mut s = Self::empty(q);
        for &i in indices {
            if i as usize >= q {
                return Err(MatrixError::Parse(format!(
                    "subset element {i} is not in F_{q}"
                )));
            }
            s.members[i as usize] = true;
        }
        Ok(s)
    }

    /// Parses `"nonzero"`, `"zero"`, `"all"`, `"none"`, or a comma-separated index list.
    pub fn parse(q: usize, text: &str) -> Result<Self, MatrixError> {
        match text.trim() {
            "nonzero" => Ok(Self::nonzero(q)),
            "zero" => Ok(Self::zero(q)),
            "all" => Ok(Self::full(q)),
            "none" | "" => Ok(Self::empty(q)),
            list => {
                let idx = list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| MatrixError::Parse(format!("bad subset element {t:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Self::from_indices(q, &idx)
            }
        }
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        self.members[a.index()]
    }

    pub fn field_order(&self) -> usize {
        self.members.len()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn complement(&self) -> Self {
        SubsetA {
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| FieldElement(i as u16))
    }

    pub fn indices(&self) -> Vec<u32> {
        self.iter().map(|a| a.0 as u32).collect()
    }

    pub(crate) fn mask(&self) -> &[bool] {
        &self.members
    }
}

/// Row-major `rows x cols` matrix over a shared field context.
#[derive(Clone)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
    field: Arc<FieldCtx>,
}

impl PartialEq for MatrixFq {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && *self.field == *other.field
    }
}

impl Eq for MatrixFq {}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFq[{}x{} over F_{}]", self.rows, self.cols, self.field.order())?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i).iter().map(|x| x.0).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

impl MatrixFq {
    pub fn new(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.order();
        if let Some(pos) = data.iter().position(|x| x.index() >= q) {
            return Err(MatrixError::EntryOutOfRange {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos].0 as u32,
                q,
            });
        }
        Ok(MatrixFq {
            rows,
            cols,
            data,
            field,
        })
    }

    pub fn from_indices(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        entries: &[u32],
    ) -> Result<Self, MatrixError> {
        let q = field.order();
        let data = entries
            .iter()
            .enumerate()
            .map(|(pos, &v)| {
                if (v as usize) < q {
                    Ok(FieldElement(v as u16))
                } else {
                    Err(MatrixError::EntryOutOfRange {
                        row: pos / cols.max(1),
                        col: pos % cols.max(1),
                        value: v,
                        q,
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, rows, cols, data)
    }

    pub fn zeros(field: Arc<FieldCtx>, rows: usize, cols: usize) -> Self {
        MatrixFq {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
            field,
        }
    }

    pub fn identity(field: Arc<FieldCtx>, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.data[i * k + i] = FieldElement::ONE;
        }
        m
    }

    pub(crate) fn from_raw(field: Arc<FieldCtx>, rows: usize, cols: usize, data: Vec<FieldElement>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        MatrixFq {
            rows,
            cols,
            data,
            field,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        MatrixFq::from_raw(self.field.clone(), self.cols, self.rows, data)
    }

    fn check_product(&self, rhs: &MatrixFq) -> Result<(), MatrixError> {
        if *self.field != *rhs.field {
            return Err(MatrixError::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    /// Exact product over `F_q`.
    pub fn mul(&self, rhs: &MatrixFq) -> Result<MatrixFq, MatrixError> {
        self.check_product(rhs)?;
        let mut data = vec![FieldElement::ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let out = &mut data[i * rhs.cols..(i + 1) * rhs.cols];
            accumulate_row(&self.field, self.row(i), rhs, out);
        }
        Ok(MatrixFq::from_raw(self.field.clone(), self.rows, rhs.cols, data))
    }

    /// `ct_A(self * rhs)` without materialising the product.
    pub fn product_ct(&self, rhs: &MatrixFq, subset: &SubsetA) -> Result<u64, MatrixError> {
        self.check_product(rhs)?;
        let mask = subset.mask();
        let mut row_buf = vec![FieldElement::ZERO; rhs.cols];
        let mut count = 0u64;
        for i in 0..self.rows {
            row_buf.fill(FieldElement::ZERO);
            accumulate_row(&self.field, self.row(i), rhs, &mut row_buf);
            count += row_buf.iter().filter(|x| mask[x.index()]).count() as u64;
        }
        Ok(count)
    }

    /// Rank by Gaussian elimination, taking the first nonzero pivot in each column.
    pub fn rank(&self) -> usize {
        let f = &*self.field;
        let mut a = self.data.clone();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(pivot) = (rank..m).find(|&i| !a[i * n + col].is_zero()) else {
                continue;
            };
            if pivot != rank {
                for j in 0..n {
                    a.swap(pivot * n + j, rank * n + j);
                }
            }
            let inv = f.inv(a[rank * n + col]).expect("pivot is nonzero");
            for i in rank + 1..m {
                let lead = a[i * n + col];
                if lead.is_zero() {
                    continue;
                }
                let factor = f.mul(lead, inv);
                for j in col..n {
                    let t = f.mul(factor, a[rank * n + j]);
                    a[i * n + j] = f.sub(a[i * n + j], t);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Number of entries lying in `subset`.
    pub fn ct(&self, subset: &SubsetA) -> u64 {
        let mask = subset.mask();
        self.data.iter().filter(|x| mask[x.index()]).count() as u64
    }

    /// Number of nonzero entries.
    pub fn wt(&self) -> u64 {
        self.data.iter().filter(|x| !x.is_zero()).count() as u64
    }

    /// Parses `"m n q"` followed by `m` lines of `n` element indices.
    pub fn parse_text(field: Arc<FieldCtx>, text: &str) -> Result<MatrixFq, MatrixError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Parse("empty input".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| MatrixError::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [m, n, q] = dims[..] else {
            return Err(MatrixError::Parse(format!("header must be \"m n q\", got {header:?}")));
        };
        if q != field.order() {
            return Err(MatrixError::FieldMismatch);
        }
        let mut entries = Vec::with_capacity(m * n);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| MatrixError::Parse(format!("missing row {i}")))?;
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| MatrixError::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<_, _>>()?;
            if row.len() != n {
                return Err(MatrixError::Parse(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        if lines.next().is_some() {
            return Err(MatrixError::Parse("trailing rows after matrix".into()));
        }
        Self::from_indices(field, m, n, &entries)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.field.order());
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.0.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_index_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.0 as u32).collect())
            .collect()
    }
}

/// `out += lhs_row * rhs`, where `lhs_row` has `rhs.rows` entries.
#[inline]
fn accumulate_row(f: &FieldCtx, lhs_row: &[FieldElement], rhs: &MatrixFq, out: &mut [FieldElement]) {
    for (k, &x) in lhs_row.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (o, &y) in out.iter_mut().zip(rhs.row(k)) {
            *o = f.add(*o, f.mul(x, y));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, e: u32) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(p, e).unwrap())
    }

    fn mat(f: &Arc<FieldCtx>, m: usize, n: usize, e: &[u32]) -> MatrixFq {
        MatrixFq::from_indices(f.clone(), m, n, e).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let f = field(3, 1);
        let y = mat(&f, 2, 3, &[1, 2, 0, 2, 2, 1]);
        assert_eq!(MatrixFq::identity(f.clone(), 2).mul(&y).unwrap(), y);
    }

    #[test]
    fn outer_product_f2() {
        let f = field(2, 1);
        let x = mat(&f, 2, 1, &[1, 0]);
        let y = mat(&f, 1, 2, &[1, 1]);
        assert_eq!(x.mul(&y).unwrap(), mat(&f, 2, 2, &[1, 1, 0, 0]));
    }

    #[test]
    fn inner_product_f3() {
        let f = field(3, 1);
        let x = mat(&f, 1, 2, &[1, 2]);
        let y = mat(&f, 2, 1, &[2, 2]);
        assert_eq!(x.mul(&y).unwrap(), mat(&f, 1, 1, &[0]));
    }

    #[test]
    fn product_errors() {
        let f2 = field(2, 1);
        let f3 = field(3, 1);
        let a = MatrixFq::zeros(f2.clone(), 2, 3);
        let b = MatrixFq::zeros(f2.clone(), 2, 3);
        assert!(matches!(a.mul(&b), Err(MatrixError::DimensionMismatch(_))));
        let c = MatrixFq::zeros(f3, 3, 1);
        assert_eq!(a.mul(&c), Err(MatrixError::FieldMismatch));
    }

    #[test]
    fn rank_examples() {
        let f = field(2, 1);
        assert_eq!(MatrixFq::zeros(f.clone(), 3, 4).rank(), 0);
        assert_eq!(MatrixFq::identity(f.clone(), 5).rank(), 5);
        assert_eq!(mat(&f, 2, 2, &[1, 1, 1, 1]).rank(), 1);
        let f4 = field(2, 2);
        // rows (1, x) and (x, x^2) = (x, x+1) are dependent
        assert_eq!(mat(&f4, 2, 2, &[1, 2, 2, 3]).rank(), 1);
    }

    #[test]
    fn ct_and_wt() {
        let f = field(2, 1);
        let id = MatrixFq::identity(f.clone(), 2);
        assert_eq!(id.ct(&SubsetA::zero(2)), 2);
        assert_eq!(id.ct(&SubsetA::from_indices(2, &[1]).unwrap()), 2);
        assert_eq!(id.ct(&SubsetA::full(2)), 4);
        assert_eq!(id.ct(&SubsetA::empty(2)), 0);
        assert_eq!(MatrixFq::zeros(f.clone(), 3, 3).wt(), 0);
        assert_eq!(MatrixFq::identity(f, 4).wt(), 4);
        let f3 = field(3, 1);
        assert_eq!(mat(&f3, 2, 2, &[1, 2, 0, 2]).wt(), 3);
    }

    #[test]
    fn product_ct_matches_materialised() {
        let f = field(5, 1);
        let x = mat(&f, 3, 2, &[1, 2, 0, 4, 3, 3]);
        let y = mat(&f, 2, 4, &[1, 0, 2, 4, 3, 3, 1, 0]);
        let s = SubsetA::from_indices(5, &[0, 3]).unwrap();
        assert_eq!(x.product_ct(&y, &s).unwrap(), x.mul(&y).unwrap().ct(&s));
    }

    #[test]
    fn subset_parsing() {
        assert_eq!(SubsetA::parse(3, "nonzero").unwrap().indices(), vec![1, 2]);
        assert_eq!(SubsetA::parse(3, "zero").unwrap().indices(), vec![0]);
        assert_eq!(SubsetA::parse(5, "1, 4").unwrap().indices(), vec![1, 4]);
        assert!(SubsetA::parse(3, "3").is_err());
        assert!(SubsetA::parse(3, "a").is_err());
    }

    #[test]
    fn text_format() {
        let f = field(3, 1);
        let m = mat(&f, 2, 3, &[0, 1, 2, 2, 1, 0]);
        let text = m.to_text();
        assert_eq!(text, "2 3 3\n0 1 2\n2 1 0\n");
        assert_eq!(MatrixFq::parse_text(f.clone(), &text).unwrap(), m);
        assert!(MatrixFq::parse_text(f.clone(), "2 2 3\n0 1\n").is_err());
        assert!(MatrixFq::parse_text(f.clone(), "1 2 3\n0 3\n").is_err());
        assert_eq!(
            MatrixFq::parse_text(f, "1 1 2\n0\n"),
            Err(MatrixError::FieldMismatch)
        );
    }
}
