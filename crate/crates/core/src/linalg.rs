//! Exact rank, kernel and linear solves over the rationals.
//!
//! Every routine first splits the sparsity pattern into connected components
//! of the row/column incidence graph. The operators built in this crate are
//! weight-preserving, so those components are small weight spaces and the
//! elimination never sees the full matrix. Each component is cleared of
//! denominators row by row and reduced with fraction-free (Bareiss)
//! elimination over big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{check_len, Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::Rational;

/// One connected block of a sparse matrix.
#[derive(Debug, Clone)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Connected components of the bipartite row/column incidence graph.
///
/// Empty rows and empty columns are not reported.
pub fn components(m: &RatMatrix) -> Vec<Block> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut parent: Vec<usize> = (0..r + c).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, row) in m.rows_iter().enumerate() {
        for (j, _) in row {
            let a = find(&mut parent, i);
            let b = find(&mut parent, r + j);
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut col_used = vec![false; c];
    for row in m.rows_iter() {
        for (j, _) in row {
            col_used[*j] = true;
        }
    }
    let mut slot = std::collections::HashMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for i in 0..r {
        if m.row(i).is_empty() {
            continue;
        }
        let root = find(&mut parent, i);
        let k = *slot.entry(root).or_insert_with(|| {
            blocks.push(Block { rows: Vec::new(), cols: Vec::new() });
            blocks.len() - 1
        });
        blocks[k].rows.push(i);
    }
    for j in 0..c {
        if !col_used[j] {
            continue;
        }
        let root = find(&mut parent, r + j);
        let k = slot[&root];
        blocks[k].cols.push(j);
    }
    blocks
}

/// Integer row-echelon form produced by Bareiss elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    ncols: usize,
}

fn integer_rows(m: &RatMatrix, block: &Block, extra: Option<&[Rational]>) -> Vec<Vec<BigInt>> {
    let mut colpos = std::collections::HashMap::with_capacity(block.cols.len());
    for (k, &j) in block.cols.iter().enumerate() {
        colpos.insert(j, k);
    }
    let width = block.cols.len() + usize::from(extra.is_some());
    block
        .rows
        .iter()
        .map(|&i| {
            let row = m.row(i);
            let mut lcm = BigInt::one();
            for (_, v) in row {
                lcm = lcm.lcm(v.denom());
            }
            if let Some(b) = extra {
                lcm = lcm.lcm(b[i].denom());
            }
            let mut out = vec![BigInt::zero(); width];
            for (j, v) in row {
                out[colpos[j]] = v.numer() * (&lcm / v.denom());
            }
            if let Some(b) = extra {
                out[width - 1] = b[i].numer() * (&lcm / b[i].denom());
            }
            out
        })
        .collect()
}

fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let m = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        // smallest nonzero entry keeps intermediate growth down
        let mut best: Option<usize> = None;
        for i in r..m {
            if !a[i][c].is_zero() {
                match best {
                    None => best = Some(i),
                    Some(b) if a[i][c].abs() < a[b][c].abs() => best = Some(i),
                    _ => {}
                }
            }
        }
        let Some(p) = best else { continue };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[c];
        for row in bottom.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let lhs = piv * &row[j];
                let v = if f.is_zero() || pivot_row[j].is_zero() {
                    lhs
                } else {
                    lhs - &f * &pivot_row[j]
                };
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots, ncols }
}

impl Echelon {
    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis: one vector per free column, free entry set to one.
    fn kernel(&self, ncols: usize) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for f in (0..ncols).filter(|&j| !is_pivot[j]) {
            let mut x = vec![Rational::zero(); ncols];
            x[f] = Rational::one();
            self.back_substitute(&mut x, None);
            out.push(x);
        }
        out
    }

    /// Solve the pivot unknowns given the free unknowns already in `x`.
    /// `rhs_col` names the augmented column holding the right-hand side.
    fn back_substitute(&self, x: &mut [Rational], rhs_col: Option<usize>) {
        for (i, &p) in self.pivots.iter().enumerate().rev() {
            let row = &self.rows[i];
            let mut s = match rhs_col {
                Some(c) => Rational::from(row[c].clone()),
                None => Rational::zero(),
            };
            let upper = rhs_col.unwrap_or(self.ncols);
            for j in p + 1..upper {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s -= Rational::from(row[j].clone()) * &x[j];
                }
            }
            x[p] = s / Rational::from(row[p].clone());
        }
    }
}

/// Exact rank.
pub fn rank(m: &RatMatrix) -> usize {
    components(m)
        .iter()
        .map(|b| {
            let rows = integer_rows(m, b, None);
            bareiss(rows, b.cols.len()).rank()
        })
        .sum()
}

/// Exact basis of the right kernel `{x : m x = 0}`.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let n = m.ncols();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for b in components(m) {
        for &j in &b.cols {
            used[j] = true;
        }
        let rows = integer_rows(m, &b, None);
        let ech = bareiss(rows, b.cols.len());
        for local in ech.kernel(b.cols.len()) {
            let mut x = vec![Rational::zero(); n];
            for (k, &j) in b.cols.iter().enumerate() {
                x[j] = local[k].clone();
            }
            out.push(x);
        }
    }
    for j in (0..n).filter(|&j| !used[j]) {
        let mut x = vec![Rational::zero(); n];
        x[j] = Rational::one();
        out.push(x);
    }
    out.sort_by_key(|v| v.iter().position(|e| !e.is_zero()));
    out
}

/// Columns carrying a pivot in a row-echelon form, ascending.
///
/// These index a maximal set of linearly independent columns.
pub fn pivot_columns(m: &RatMatrix) -> Vec<usize> {
    let mut out = Vec::new();
    for b in components(m) {
        let rows = integer_rows(m, &b, None);
        let ech = bareiss(rows, b.cols.len());
        out.extend(ech.pivots.iter().map(|&k| b.cols[k]));
    }
    out.sort_unstable();
    out
}

/// Exact inverse of a square matrix, as dense rows.
pub fn inverse(m: &RatMatrix) -> Result<Vec<Vec<Rational>>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let n = m.nrows();
    if rank(m) != n {
        return Err(Error::Inconsistent("matrix is singular".into()));
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        cols.push(solve(m, &e)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn nullity(m: &RatMatrix) -> usize {
    m.ncols() - rank(m)
}

/// One exact solution of `a x = b` (free unknowns set to zero).
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    check_len(a.nrows(), b.len())?;
    let n = a.ncols();
    let mut x = vec![Rational::zero(); n];
    let blocks = components(a);
    let mut covered = vec![false; a.nrows()];
    for blk in &blocks {
        for &i in &blk.rows {
            covered[i] = true;
        }
        if blk.rows.iter().all(|&i| b[i].is_zero()) {
            continue;
        }
        let rows = integer_rows(a, blk, Some(b));
        let w = blk.cols.len();
        let ech = bareiss(rows, w + 1);
        if ech.pivots.last() == Some(&w) {
            return Err(Error::Inconsistent("right-hand side outside the column space".into()));
        }
        let mut local = vec![Rational::zero(); w];
        ech.back_substitute(&mut local, Some(w));
        for (k, &j) in blk.cols.iter().enumerate() {
            x[j] = local[k].clone();
        }
    }
    if (0..a.nrows()).any(|i| !covered[i] && !b[i].is_zero()) {
        return Err(Error::Inconsistent("nonzero right-hand side on an empty row".into()));
    }
    Ok(x)
}

/// Rank of the matrix whose columns are `vectors`.
pub fn rank_of_vectors(dim: usize, vectors: &[Vec<Rational>]) -> usize {
    rank(&RatMatrix::from_columns(dim, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<i64>]) -> RatMatrix {
        let d: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect();
        RatMatrix::from_dense(rows.len(), rows[0].len(), &d).unwrap()
    }

    /// Plain rational Gauss-Jordan, kept deliberately naive as an oracle.
    fn naive_rank(m: &RatMatrix) -> usize {
        let mut a = m.to_dense();
        let (r, c) = (m.nrows(), m.ncols());
        let mut rank = 0;
        for col in 0..c {
            let Some(p) = (rank..r).find(|&i| !a[i][col].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..r {
                if i != rank && !a[i][col].is_zero() {
                    let f = &a[i][col] / &a[rank][col];
                    for j in 0..c {
                        let t = &f * &a[rank][j];
                        a[i][j] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_of_singular_matrix() {
        let m = dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        let k = nullspace(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Rational::is_zero));
    }

    #[test]
    fn block_diagonal_ranks_add() {
        let m = dense(&[vec![1, 0, 0, 0], vec![0, 0, 2, 3], vec![0, 0, 4, 6], vec![0, 0, 0, 0]]);
        assert_eq!(components(&m).len(), 2);
        assert_eq!(rank(&m), 2);
        // column 1 is empty, column 3 is dependent
        assert_eq!(nullspace(&m).len(), 2);
    }

    #[test]
    fn solve_and_detect_inconsistency() {
        let a = dense(&[vec![2, 1], vec![1, 3]]);
        let x = solve(&a, &[q(3, 1), q(4, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(1, 1)]);
        let s = dense(&[vec![1, 1], vec![2, 2]]);
        assert!(solve(&s, &[q(1, 1), q(3, 1)]).is_err());
        let x = solve(&s, &[q(1, 2), q(1, 1)]).unwrap();
        assert_eq!(s.apply(&x), vec![q(1, 2), q(1, 1)]);
    }

    #[test]
    fn fractions_are_cleared_per_row() {
        let d = vec![vec![q(1, 3), q(1, 2)], vec![q(2, 3), q(1, 1)]];
        let m = RatMatrix::from_dense(2, 2, &d).unwrap();
        assert_eq!(rank(&m), 1);
    }

    proptest! {
        #[test]
        fn rank_matches_naive_elimination(
            entries in proptest::collection::vec(-3i64..=3, 30),
            dens in proptest::collection::vec(1i64..=4, 30),
        ) {
            let trip = (0..30).map(|k| (k / 6, k % 6, q(entries[k] * (k as i64 % 3 - 1).abs(), dens[k])));
            let m = RatMatrix::from_triplets(5, 6, trip);
            prop_assert_eq!(rank(&m), naive_rank(&m));
            let ker = nullspace(&m);
            prop_assert_eq!(ker.len() + rank(&m), 6);
            for v in &ker {
                prop_assert!(m.apply(v).iter().all(Rational::is_zero));
            }
        }
    }
}
