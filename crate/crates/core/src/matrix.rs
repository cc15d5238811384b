//! Sparse exact rational matrices.
//!
//! Cochain-space operators are large but very sparse (a handful of nonzeros per
//! column), so rows are stored as sorted `(column, value)` lists with no
//! explicit zeros. Equality is exact entrywise equality.

use std::fmt;

use crate::error::{check_len, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, Rational::one())]).collect();
        RatMatrix { rows: n, cols: n, data }
    }

    pub fn from_dense(rows: usize, cols: usize, dense: &[Vec<Rational>]) -> Result<Self> {
        check_len(rows, dense.len())?;
        let mut data = Vec::with_capacity(rows);
        for r in dense {
            check_len(cols, r.len())?;
            data.push(
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect(),
            );
        }
        Ok(RatMatrix { rows, cols, data })
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut data: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            if !v.is_zero() {
                data[i].push((j, v));
            }
        }
        for row in &mut data {
            normalize_row(row);
        }
        RatMatrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut trip = Vec::new();
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    trip.push((i, j, v.clone()));
                }
            }
        }
        RatMatrix::from_triplets(rows, columns.len(), trip)
    }

    pub fn from_rows_sparse(cols: usize, data: Vec<Vec<(usize, Rational)>>) -> Self {
        let rows = data.len();
        let mut data = data;
        for row in &mut data {
            row.retain(|(_, v)| !v.is_zero());
            normalize_row(row);
        }
        RatMatrix { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.data[i]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[(usize, Rational)]> {
        self.data.iter().map(|r| r.as_slice())
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        match self.data[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(p) => self.data[i][p].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut data: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                data[*j].push((i, v.clone()));
            }
        }
        RatMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, a: &Rational) -> RatMatrix {
        if a.is_zero() {
            return RatMatrix::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, a * v)).collect())
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&Rational::from_int(-1))
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        self.combine(other, true)
    }

    fn combine(&self, other: &RatMatrix, subtract: bool) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut p, mut r) = (0, 0);
                while p < a.len() || r < b.len() {
                    let ca = a.get(p).map(|e| e.0).unwrap_or(usize::MAX);
                    let cb = b.get(r).map(|e| e.0).unwrap_or(usize::MAX);
                    if ca < cb {
                        out.push(a[p].clone());
                        p += 1;
                    } else if cb < ca {
                        let v = if subtract { -&b[r].1 } else { b[r].1.clone() };
                        out.push((cb, v));
                        r += 1;
                    } else {
                        let v = if subtract { &a[p].1 - &b[r].1 } else { &a[p].1 + &b[r].1 };
                        if !v.is_zero() {
                            out.push((ca, v));
                        }
                        p += 1;
                        r += 1;
                    }
                }
                out
            })
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut acc: Vec<Rational> = vec![Rational::zero(); other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.cols];
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    if !mark[*j] {
                        mark[*j] = true;
                        touched.push(*j);
                    }
                    acc[*j] += a * b;
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for &j in &touched {
                let v = std::mem::take(&mut acc[j]);
                if !v.is_zero() {
                    out.push((j, v));
                }
                mark[j] = false;
            }
            touched.clear();
            data.push(out);
        }
        RatMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &RatMatrix) -> RatMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        self.data
            .iter()
            .map(|r| {
                let mut s = Rational::zero();
                for (j, a) in r {
                    if !v[*j].is_zero() {
                        s += a * &v[*j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn select_rows(&self, rows: &[usize]) -> RatMatrix {
        let data = rows.iter().map(|&i| self.data[i].clone()).collect();
        RatMatrix { rows: rows.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> RatMatrix {
        let mut map = vec![usize::MAX; self.cols];
        for (new, &old) in cols.iter().enumerate() {
            map[old] = new;
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut out: Vec<(usize, Rational)> = r
                    .iter()
                    .filter(|(j, _)| map[*j] != usize::MAX)
                    .map(|(j, v)| (map[*j], v.clone()))
                    .collect();
                out.sort_by_key(|e| e.0);
                out
            })
            .collect();
        RatMatrix { rows: self.rows, cols: cols.len(), data }
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (j + self.cols, v.clone())));
                r
            })
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }
}

fn normalize_row(row: &mut Vec<(usize, Rational)>) {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
    for (j, v) in row.drain(..) {
        match out.last_mut() {
            Some((lj, lv)) if *lj == j => *lv += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    *row = out;
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            for r in self.to_dense() {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            writeln!(f, "  {} nonzeros", self.nnz())?;
        }
        write!(f, "]")
    }
}
