//! Compressed sparse row storage and a banded LU factorization with
//! partial pivoting, used for resolvent solves on lattice operators.

use nalgebra::DMatrix;

/// Square CSR matrix; rows store sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists. Duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = col_idx.len();
            for (c, v) in row {
                assert!(c < n, "column {c} out of range");
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map(|e| e.1).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// Max absolute row sum, an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.triplets().map(|(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Gershgorin interval containing the spectrum of a symmetric matrix.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut d = 0.0;
            let mut r = 0.0;
            for (j, v) in self.row(i) {
                if j == i {
                    d += v;
                } else {
                    r += v.abs();
                }
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }
}

/// LU factors of `A - shift·I` for a banded `A`, with row pivoting.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku` (`ku = kl` for symmetric
/// input), wide enough to absorb fill-in from row interchanges.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
    min_pivot: f64,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix, shift: f64) -> Self {
        let n = a.dim();
        let kl = a.bandwidth();
        let width = 3 * kl + 1;
        let mut lu = BandedLu {
            n,
            kl,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
            min_pivot: f64::INFINITY,
        };
        for (i, j, v) in a.triplets() {
            *lu.at_mut(i, j) += v;
        }
        for i in 0..n {
            *lu.at_mut(i, i) -= shift;
        }
        lu.eliminate();
        lu
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + 2 * self.kl);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.slot(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let s = self.slot(i, j);
        &mut self.data[s]
    }

    fn eliminate(&mut self) {
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + 2 * kl).min(n - 1);
            let mut p = k;
            let mut best = self.at(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let piv = self.at(k, k);
            self.min_pivot = self.min_pivot.min(piv.abs());
            if piv == 0.0 {
                continue;
            }
            for i in k + 1..=last_row {
                let f = self.at(i, k) / piv;
                if f == 0.0 {
                    continue;
                }
                *self.at_mut(i, k) = f;
                for j in k + 1..=last_col {
                    let u = self.at(k, j);
                    if u != 0.0 {
                        *self.at_mut(i, j) -= f * u;
                    }
                }
            }
        }
    }

    /// Smallest `|pivot|` encountered; zero means exactly singular.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves in place. Division by a zero pivot yields non-finite entries.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= self.at(i, k) * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + 2 * kl).min(n - 1) {
                s -= self.at(k, j) * b[j];
            }
            b[k] = s / self.at(k, k);
        }
    }

    /// Column `source` of `(A - shift)^{-1}`.
    pub fn inverse_column(&self, source: usize) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        b[source] = 1.0;
        self.solve_in_place(&mut b);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, diag: f64) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, diag)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        CsrMatrix::from_rows(rows)
    }

    #[test]
    fn csr_basics() {
        let m = path(4, 2.0);
        assert_eq!(m.nnz(), 10);
        assert_eq!(m.bandwidth(), 1);
        assert!(m.is_symmetric());
        assert_eq!(m.inf_norm(), 4.0);
        let mut y = vec![0.0; 4];
        m.matvec(&[1.0, 1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(m.gershgorin(), (0.0, 4.0));
    }

    #[test]
    fn banded_lu_matches_dense_inverse() {
        // 2-D grid, bandwidth 5, shifted into the interior of the spectrum so
        // pivoting is exercised.
        let side = 5;
        let n = side * side;
        let rows = (0..n)
            .map(|i| {
                let (r, c) = (i / side, i % side);
                let mut row = vec![(i, 4.0 + 0.37 * ((i * 7) % 5) as f64)];
                if r > 0 {
                    row.push((i - side, -1.0));
                }
                if r + 1 < side {
                    row.push((i + side, -1.0));
                }
                if c > 0 {
                    row.push((i - 1, -1.0));
                }
                if c + 1 < side {
                    row.push((i + 1, -1.0));
                }
                row
            })
            .collect();
        let a = CsrMatrix::from_rows(rows);
        let shift = 3.9;
        let lu = BandedLu::factor(&a, shift);
        let mut dense = a.to_dense();
        for i in 0..n {
            dense[(i, i)] -= shift;
        }
        let inv = dense.try_inverse().unwrap();
        for s in [0, 7, 12, 24] {
            let col = lu.inverse_column(s);
            for i in 0..n {
                assert!((col[i] - inv[(i, s)]).abs() < 1e-11, "{} vs {}", col[i], inv[(i, s)]);
            }
        }
    }

    #[test]
    fn singular_shift_has_tiny_pivot() {
        let lu = BandedLu::factor(&path(1, 2.0), 2.0);
        assert_eq!(lu.min_pivot(), 0.0);
        let lu = BandedLu::factor(&path(3, 2.0), 2.0);
        assert!(lu.min_pivot() < 1e-14);
    }
}
