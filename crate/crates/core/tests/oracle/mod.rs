//! Reference implementations over prime fields `Z/p`, written without any
//! code from the library: plain modular arithmetic on `u32` entries.

#![allow(dead_code)]

/// Row-major `rows x cols` matrix of residues mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| a * b % p == 1).expect("nonzero residue")
}

impl Mat {
    /// `index` read in base `p`, entry 0 least significant.
    pub fn from_index(p: u32, rows: usize, cols: usize, mut index: u64) -> Mat {
        let data = (0..rows * cols)
            .map(|_| {
                let d = (index % p as u64) as u32;
                index /= p as u64;
                d
            })
            .collect();
        Mat { rows, cols, data }
    }

    pub fn index(&self, p: u32) -> u64 {
        self.data.iter().rev().fold(0, |acc, &d| acc * p as u64 + d as u64)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &Mat, p: u32) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut data = vec![0; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: u32 = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                data[i * other.cols + j] = s % p;
            }
        }
        Mat {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// Rank by elimination down the columns: for each column pick the first
    /// remaining row with a nonzero entry, scale it, clear the column.
    pub fn rank(&self, p: u32) -> usize {
        let mut a: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(rank, pivot);
            let s = inv_mod(a[rank][c], p);
            for v in a[rank].iter_mut() {
                *v = *v * s % p;
            }
            let pivot_row = a[rank].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != rank && row[c] != 0 {
                    let f = row[c];
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v = (*v + p * p - f * pv % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn count_in(&self, subset: &[u32]) -> u64 {
        self.data.iter().filter(|v| subset.contains(v)).count() as u64
    }
}

/// All `rows x cols` matrices over `Z/p`, in index order.
pub fn all(p: u32, rows: usize, cols: usize) -> impl Iterator<Item = Mat> {
    let total = (p as u64).pow((rows * cols) as u32);
    (0..total).map(move |i| Mat::from_index(p, rows, cols, i))
}

/// Number of rank-`r` matrices by exhaustive enumeration.
pub fn count_rank(p: u32, rows: usize, cols: usize, r: usize) -> u64 {
    all(p, rows, cols).filter(|m| m.rank(p) == r).count() as u64
}

/// `sum_N |P[XY = N] - P[M = N]|` with `X, Y` uniform and `M` uniform of
/// rank `r`, as `(numerator, denominator)` of an unreduced fraction.
pub fn tv_sum(p: u32, m: usize, n: usize, r: usize) -> (i128, i128) {
    let space = (p as u64).pow((m * n) as u32) as usize;
    let mut hits = vec![0i128; space];
    let xs: Vec<Mat> = all(p, m, r).collect();
    let ys: Vec<Mat> = all(p, r, n).collect();
    for x in &xs {
        for y in &ys {
            hits[x.mul(y, p).index(p) as usize] += 1;
        }
    }
    let pairs = (xs.len() * ys.len()) as i128;
    let ranks: Vec<usize> = all(p, m, n).map(|mat| mat.rank(p)).collect();
    let class = ranks.iter().filter(|&&k| k == r).count() as i128;
    // common denominator pairs * class
    let num: i128 = ranks
        .iter()
        .zip(&hits)
        .map(|(&k, &h)| {
            let uniform = if k == r { pairs } else { 0 };
            (h * class - uniform).abs()
        })
        .sum();
    (num, pairs * class)
}

/// Mean of `ct_subset` over all `m x n` matrices of rank `r`, as a fraction.
pub fn mean_ct_rank(p: u32, m: usize, n: usize, r: usize, subset: &[u32]) -> (u64, u64) {
    let (mut total, mut count) = (0, 0);
    for mat in all(p, m, n).filter(|x| x.rank(p) == r) {
        total += mat.count_in(subset);
        count += 1;
    }
    (total, count)
}
