//! Exact matrix realizations of |1|-graded Lie algebras and their representations.
//!
//! Basis order is fixed: grade −1 first, then grade 0 with the grading
//! element last, then grade +1; inside each block elements follow row-major
//! order of their leading matrix position.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg;
use crate::matrix::RatMatrix;
use crate::rational::{q, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    Conformal,
    Projective,
    Grassmannian,
    Custom,
}

impl AlgebraKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Conformal => "conformal",
            AlgebraKind::Projective => "projective",
            AlgebraKind::Grassmannian => "grassmannian",
            AlgebraKind::Custom => "custom",
        }
    }
}

/// A complex combination `re + i·im` of basis elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexElement {
    pub re: Vec<Rational>,
    pub im: Vec<Rational>,
}

/// Graded Lie algebra given by a basis of exact matrices.
#[derive(Debug, Clone)]
pub struct GradedLieAlgebra {
    kind: AlgebraKind,
    params: Vec<usize>,
    defining_dim: usize,
    basis: Vec<RatMatrix>,
    grade: Vec<i8>,
    grading_element_index: usize,
    // bracket[i * dim + j] holds the sparse coordinates of [b_i, b_j]
    bracket: Vec<Vec<(usize, Rational)>>,
    ad: Vec<RatMatrix>,
    gram: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    pivot_inverse: Vec<Vec<Rational>>,
}

fn unit(n: usize, i: usize, j: usize) -> RatMatrix {
    RatMatrix::from_triplets(n, n, [(i, j, Rational::one())])
}

fn flatten(m: &RatMatrix) -> Vec<(usize, Rational)> {
    let n = m.ncols();
    m.triplets().map(|(i, j, v)| (i * n + j, v.clone())).collect()
}

impl GradedLieAlgebra {
    /// so(Q) for Q = 2x₀x_{n+1} + x₁² + ⋯ + x_n².
    pub fn conformal(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedDimension(format!("conformal algebra needs n >= 3, got {n}")));
        }
        let m = n + 2;
        let one = Rational::one();
        let mut basis = Vec::new();
        let mut grade = Vec::new();
        for i in 1..=n {
            basis.push(RatMatrix::from_triplets(m, m, [(i, 0, one.clone()), (n + 1, i, -&one)]));
            grade.push(-1);
        }
        for a in 1..=n {
            for b in a + 1..=n {
                basis.push(RatMatrix::from_triplets(m, m, [(a, b, one.clone()), (b, a, -&one)]));
                grade.push(0);
            }
        }
        basis.push(RatMatrix::from_triplets(m, m, [(0, 0, one.clone()), (n + 1, n + 1, -&one)]));
        grade.push(0);
        let e = basis.len() - 1;
        for j in 1..=n {
            basis.push(RatMatrix::from_triplets(m, m, [(0, j, one.clone()), (j, n + 1, -&one)]));
            grade.push(1);
        }
        Self::assemble(AlgebraKind::Conformal, vec![n], basis, grade, e)
    }

    /// sl(n+1) graded by the (1, n) block structure.
    pub fn projective(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension(format!("projective algebra needs n >= 2, got {n}")));
        }
        Self::block_sl(AlgebraKind::Projective, vec![n], 1, n)
    }

    /// sl(p+q) graded by the p|q block structure.
    pub fn grassmannian(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < p {
            return Err(Error::UnsupportedDimension(format!("grassmannian needs 2 <= p <= q, got ({p}, {q})")));
        }
        Self::block_sl(AlgebraKind::Grassmannian, vec![p, q], p, q)
    }

    fn block_sl(kind: AlgebraKind, params: Vec<usize>, p: usize, q: usize) -> Result<Self> {
        let m = p + q;
        let mut basis = Vec::new();
        let mut grade = Vec::new();
        for i in p..m {
            for j in 0..p {
                basis.push(unit(m, i, j));
                grade.push(-1);
            }
        }
        let block_end = |i: usize| if i < p { p - 1 } else { m - 1 };
        for i in 0..m {
            for j in 0..m {
                if (i < p) != (j < p) {
                    continue;
                }
                if i != j {
                    basis.push(unit(m, i, j));
                } else if i != block_end(i) {
                    basis.push(RatMatrix::from_triplets(
                        m,
                        m,
                        [(i, i, Rational::one()), (i + 1, i + 1, -Rational::one())],
                    ));
                } else {
                    continue;
                }
                grade.push(0);
            }
        }
        let mut e = Vec::new();
        for i in 0..m {
            let v = if i < p { q as i64 } else { -(p as i64) };
            e.push((i, i, Rational::new(v, m as i64)));
        }
        basis.push(RatMatrix::from_triplets(m, m, e));
        grade.push(0);
        let ge = basis.len() - 1;
        for i in 0..p {
            for j in p..m {
                basis.push(unit(m, i, j));
                grade.push(1);
            }
        }
        Self::assemble(kind, params, basis, grade, ge)
    }

    /// Graded algebra from caller-supplied basis matrices.
    ///
    /// Validates independence, closure under brackets, and that the element at
    /// `grading_element_index` acts on each basis element by its grade.
    pub fn custom(basis: Vec<RatMatrix>, grade: Vec<i8>, grading_element_index: usize) -> Result<Self> {
        Self::assemble(AlgebraKind::Custom, vec![], basis, grade, grading_element_index)
    }

    fn assemble(
        kind: AlgebraKind,
        params: Vec<usize>,
        basis: Vec<RatMatrix>,
        grade: Vec<i8>,
        grading_element_index: usize,
    ) -> Result<Self> {
        check_len(basis.len(), grade.len())?;
        let d = basis.len();
        if d == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        let n = basis[0].nrows();
        if basis.iter().any(|b| b.nrows() != n || b.ncols() != n) {
            return Err(Error::InvalidAlgebra("basis matrices must share one square shape".into()));
        }
        if grade.iter().any(|g| !(-1..=1).contains(g)) {
            return Err(Error::InvalidAlgebra("grades must lie in {-1, 0, 1}".into()));
        }
        if grading_element_index >= d || grade[grading_element_index] != 0 {
            return Err(Error::InvalidAlgebra("grading element must be a grade-0 basis element".into()));
        }
        let rows: Vec<Vec<(usize, Rational)>> = basis.iter().map(flatten).collect();
        let flat = RatMatrix::from_rows_sparse(n * n, rows);
        let pivots = linalg::pivot_columns(&flat);
        if pivots.len() != d {
            return Err(Error::InvalidAlgebra("basis matrices are linearly dependent".into()));
        }
        let pivot_inverse = linalg::inverse(&flat.select_cols(&pivots).transpose())?;
        let mut alg = GradedLieAlgebra {
            kind,
            params,
            defining_dim: n,
            basis,
            grade,
            grading_element_index,
            bracket: vec![Vec::new(); d * d],
            ad: Vec::new(),
            gram: Vec::new(),
            pivots,
            pivot_inverse,
        };
        for i in 0..d {
            for j in i + 1..d {
                let c = alg.basis[i].commutator(&alg.basis[j]);
                let coords = alg.coords(&c).map_err(|_| {
                    Error::InvalidAlgebra(format!("bracket of basis elements {i} and {j} leaves the span"))
                })?;
                let sparse: Vec<(usize, Rational)> =
                    coords.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
                alg.bracket[j * d + i] = sparse.iter().map(|(k, v)| (*k, -v)).collect();
                alg.bracket[i * d + j] = sparse;
            }
        }
        alg.ad = (0..d)
            .map(|i| {
                let trip = (0..d).flat_map(|j| alg.bracket[i * d + j].iter().map(move |(k, v)| (*k, j, v.clone())));
                RatMatrix::from_triplets(d, d, trip.collect::<Vec<_>>())
            })
            .collect();
        alg.gram = (0..d)
            .map(|i| (0..d).map(|j| alg.basis[i].mul(&alg.basis[j]).trace()).collect())
            .collect();
        let e = grading_element_index;
        for j in 0..d {
            let expect = [(j, Rational::from(alg.grade[j] as i64))];
            let got = &alg.bracket[e * d + j];
            let ok = if alg.grade[j] == 0 { got.is_empty() } else { got.as_slice() == expect };
            if !ok {
                return Err(Error::InvalidAlgebra(format!(
                    "grading element does not act by the grade on basis element {j}"
                )));
            }
        }
        Ok(alg)
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn params(&self) -> &[usize] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn defining_dim(&self) -> usize {
        self.defining_dim
    }

    pub fn basis(&self) -> &[RatMatrix] {
        &self.basis
    }

    pub fn grades(&self) -> &[i8] {
        &self.grade
    }

    pub fn grade(&self, i: usize) -> i8 {
        self.grade[i]
    }

    pub fn grading_element_index(&self) -> usize {
        self.grading_element_index
    }

    /// Basis indices of the given grade, ascending.
    pub fn indices_of_grade(&self, g: i8) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.grade[i] == g).collect()
    }

    /// (dim g₋₁, dim g₀, dim g₁)
    pub fn grade_dims(&self) -> (usize, usize, usize) {
        let c = |g| self.grade.iter().filter(|&&x| x == g).count();
        (c(-1), c(0), c(1))
    }

    pub fn label(&self) -> String {
        let p: Vec<String> = self.params.iter().map(|v| v.to_string()).collect();
        if p.is_empty() {
            self.kind.name().to_string()
        } else {
            format!("{}:{}", self.kind.name(), p.join(","))
        }
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Matrix of a coefficient vector in the defining realization.
    pub fn to_matrix(&self, x: &[Rational]) -> Result<RatMatrix> {
        check_len(self.dim(), x.len())?;
        let n = self.defining_dim;
        let mut trip = Vec::new();
        for (k, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, j, v) in self.basis[k].triplets() {
                trip.push((i, j, c * v));
            }
        }
        Ok(RatMatrix::from_triplets(n, n, trip))
    }

    /// Coordinates of a matrix in the basis; errors if it is not in the span.
    pub fn coords(&self, m: &RatMatrix) -> Result<Vec<Rational>> {
        let n = self.defining_dim;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let rhs: Vec<Rational> = self.pivots.iter().map(|&p| m.get(p / n, p % n)).collect();
        let c: Vec<Rational> = self
            .pivot_inverse
            .iter()
            .map(|row| row.iter().zip(&rhs).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect();
        if &self.to_matrix(&c)? != m {
            return Err(Error::InvalidAlgebra("matrix is not in the span of the basis".into()));
        }
        Ok(c)
    }

    /// Sparse coordinates of [b_i, b_j].
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.bracket[i * self.dim() + j]
    }

    /// Coordinates of [X, Y] via the structure constants.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), y.len())?;
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let f = xi * yj;
                for (k, c) in &self.bracket[i * d + j] {
                    out[*k] += &f * c;
                }
            }
        }
        Ok(out)
    }

    /// Structure constants as sorted triplets (i, j, k, c_ij^k).
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, Rational)> {
        let d = self.dim();
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for (k, c) in &self.bracket[i * d + j] {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    /// Matrix of ad(b_i) in the algebra basis.
    pub fn ad(&self, i: usize) -> &RatMatrix {
        &self.ad[i]
    }

    pub fn ad_of(&self, x: &[Rational]) -> Result<RatMatrix> {
        check_len(self.dim(), x.len())?;
        let d = self.dim();
        let mut acc = RatMatrix::zeros(d, d);
        for (i, c) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            acc = acc.add(&self.ad[i].scale(c));
        }
        Ok(acc)
    }

    /// Gram matrix of the trace form tr(b_i b_j).
    pub fn trace_gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn trace_form(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), y.len())?;
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                s += xi * yj * &self.gram[i][j];
            }
        }
        Ok(s)
    }

    /// Pairing matrix B_st = tr(X_s W_t) between the g₋₁ and g₁ bases.
    pub fn duality_pairing(&self) -> Vec<Vec<Rational>> {
        let lo = self.indices_of_grade(-1);
        let hi = self.indices_of_grade(1);
        lo.iter().map(|&s| hi.iter().map(|&t| self.gram[s][t].clone()).collect()).collect()
    }

    /// For each g₋₁ basis element X_t, the g₁ element Z^t with tr(X_s Z^t) = δ_st,
    /// as full coefficient vectors.
    pub fn dual_basis(&self) -> Result<Vec<Vec<Rational>>> {
        let b = self.duality_pairing();
        let k = b.len();
        let bm = RatMatrix::from_dense(k, k, &b)?;
        let inv = linalg::inverse(&bm)
            .map_err(|_| Error::InvalidAlgebra("trace form does not pair g1 with g-1".into()))?;
        let hi = self.indices_of_grade(1);
        Ok((0..k)
            .map(|t| {
                let mut v = vec![Rational::zero(); self.dim()];
                for (u, &idx) in hi.iter().enumerate() {
                    v[idx] = inv[u][t].clone();
                }
                v
            })
            .collect())
    }

    /// The scalar c with Z^t = c·W_t when the pairing matrix is scalar.
    pub fn duality_scale(&self) -> Option<Rational> {
        let b = self.duality_pairing();
        let d = b.first()?.first()?.clone();
        if d.is_zero() {
            return None;
        }
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { &d } else { &Rational::zero() };
                if v != want {
                    return None;
                }
            }
        }
        Some(d.recip())
    }

    /// Exact Jacobi check on all basis triples via structure constants.
    pub fn check_jacobi(&self) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let mut acc = vec![Rational::zero(); d];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, coef) in &self.bracket[a * d + b] {
                            for (r, c2) in &self.bracket[m * d + c] {
                                acc[*r] += coef * c2;
                            }
                        }
                    }
                    if acc.iter().any(|v| !v.is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every bracket of basis elements is supported on grade i + j.
    pub fn check_grading(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let g = self.grade[i] + self.grade[j];
                self.bracket[i * d + j].iter().all(|(k, _)| self.grade[*k] == g)
            })
        })
    }

    /// Trace form nondegenerate and ad-invariant on all basis triples.
    pub fn check_trace_form(&self) -> bool {
        let d = self.dim();
        let g = RatMatrix::from_dense(d, d, &self.gram).expect("square gram");
        if linalg::rank(&g) != d {
            return false;
        }
        for z in 0..d {
            let adz = self.ad[z].to_dense();
            for x in 0..d {
                for y in 0..d {
                    // tr([Z,X]Y) + tr(X[Z,Y])
                    let mut s = Rational::zero();
                    for k in 0..d {
                        if !adz[k][x].is_zero() {
                            s += &adz[k][x] * &self.gram[k][y];
                        }
                        if !adz[k][y].is_zero() {
                            s += &adz[k][y] * &self.gram[x][k];
                        }
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Raising operators spanning the nilradical of a Borel subalgebra of the
    /// complexified semisimple part of g₀.
    ///
    /// For the sl families these are the real E_ij (i < j) inside each
    /// diagonal block. The compact so(n) of the conformal algebra needs
    /// genuinely complex combinations.
    pub fn raising_operators(&self) -> Result<Vec<ComplexElement>> {
        let d = self.dim();
        let real = |m: &RatMatrix| -> Result<ComplexElement> {
            Ok(ComplexElement { re: self.coords(m)?, im: vec![Rational::zero(); d] })
        };
        match self.kind {
            AlgebraKind::Projective | AlgebraKind::Grassmannian => {
                let m = self.defining_dim;
                let p = if self.kind == AlgebraKind::Projective { 1 } else { self.params[0] };
                let mut out = Vec::new();
                for i in 0..m {
                    for j in i + 1..m {
                        if (i < p) == (j < p) {
                            out.push(real(&unit(m, i, j))?);
                        }
                    }
                }
                Ok(out)
            }
            AlgebraKind::Conformal => self.conformal_raising(),
            AlgebraKind::Custom => {
                Err(Error::Unsupported("raising operators are not available for custom algebras".into()))
            }
        }
    }

    fn conformal_raising(&self) -> Result<Vec<ComplexElement>> {
        let n = self.params[0];
        // Columns of S form a null basis: f_j = e_{2j-1} + i e_{2j}, f_{n+1-j} its conjugate.
        let mut sr = Vec::new();
        let mut si = Vec::new();
        for j in 0..n / 2 {
            sr.push((2 * j, j, Rational::one()));
            si.push((2 * j + 1, j, Rational::one()));
            sr.push((2 * j, n - 1 - j, Rational::one()));
            si.push((2 * j + 1, n - 1 - j, -Rational::one()));
        }
        if n % 2 == 1 {
            sr.push((n - 1, n / 2, Rational::one()));
        }
        let sr = RatMatrix::from_triplets(n, n, sr);
        let si = RatMatrix::from_triplets(n, n, si);
        // S^T S = J antidiagonal with entries 2 (middle 1); S^{-1} = J^{-1} S^T
        let jinv = RatMatrix::from_triplets(
            n,
            n,
            (0..n).map(|i| (i, n - 1 - i, if 2 * i + 1 == n { Rational::one() } else { q(1, 2) })),
        );
        let tr = jinv.mul(&sr.transpose());
        let ti = jinv.mul(&si.transpose());
        // strictly upper triangular A with A^T J + J A = 0
        let jm = RatMatrix::from_triplets(
            n,
            n,
            (0..n).map(|i| (i, n - 1 - i, if 2 * i + 1 == n { Rational::one() } else { q(2, 1) })),
        );
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut eqs = Vec::new();
        for (c, &(i, j)) in slots.iter().enumerate() {
            let a = unit(n, i, j);
            let cond = a.transpose().mul(&jm).add(&jm.mul(&a));
            for (r, s, v) in cond.triplets() {
                eqs.push((r * n + s, c, v.clone()));
            }
        }
        let sys = RatMatrix::from_triplets(n * n, slots.len(), eqs);
        let mut out = Vec::new();
        for v in linalg::nullspace(&sys) {
            let nmat = RatMatrix::from_triplets(
                n,
                n,
                slots.iter().zip(&v).map(|(&(i, j), c)| (i, j, c.clone())).collect::<Vec<_>>(),
            );
            let re = sr.mul(&nmat).mul(&tr).sub(&si.mul(&nmat).mul(&ti));
            let im = sr.mul(&nmat).mul(&ti).add(&si.mul(&nmat).mul(&tr));
            let embed = |m: &RatMatrix| {
                let trip: Vec<_> = m.triplets().map(|(i, j, v)| (i + 1, j + 1, v.clone())).collect();
                RatMatrix::from_triplets(n + 2, n + 2, trip)
            };
            out.push(ComplexElement { re: self.coords(&embed(&re))?, im: self.coords(&embed(&im))? });
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = AlgebraJson {
            kind: self.kind,
            params: self.params.clone(),
            basis: self.basis.iter().map(dense_strings).collect(),
            grade: self.grade.clone(),
            cijk: self.structure_constants(),
            grading_element_index: self.grading_element_index,
        };
        serde_json::to_value(json).expect("algebra serializes")
    }

    /// Rebuild from the JSON form; the stored structure constants are checked
    /// against the recomputed ones.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let json: AlgebraJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let basis = json
            .basis
            .iter()
            .map(|rows| {
                let dense: Vec<Vec<Rational>> = rows
                    .iter()
                    .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?;
                RatMatrix::from_dense(dense.len(), dense.first().map_or(0, Vec::len), &dense)
            })
            .collect::<Result<Vec<_>>>()?;
        let alg = Self::assemble(json.kind, json.params, basis, json.grade, json.grading_element_index)?;
        if alg.structure_constants() != json.cijk {
            return Err(Error::InvalidAlgebra("stored structure constants disagree with the basis".into()));
        }
        Ok(alg)
    }
}

fn dense_strings(m: &RatMatrix) -> Vec<Vec<String>> {
    m.to_dense().iter().map(|r| r.iter().map(Rational::to_pq).collect()).collect()
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    kind: AlgebraKind,
    params: Vec<usize>,
    basis: Vec<Vec<Vec<String>>>,
    grade: Vec<i8>,
    cijk: Vec<(usize, usize, usize, Rational)>,
    grading_element_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepLabel {
    Adjoint,
    Standard,
    /// g/p as a p-module.
    Tangent,
    Density(Rational),
    Custom(String),
}

/// Whether g₋₁ acts (a g-module) or only p = g₀ ⊕ g₁ does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepScope {
    Full,
    Parabolic,
}

#[derive(Debug, Clone)]
pub struct Representation {
    algebra: Arc<GradedLieAlgebra>,
    label: RepLabel,
    scope: RepScope,
    action: Vec<RatMatrix>,
    module_grade: Vec<Rational>,
}

impl Representation {
    pub fn adjoint(alg: &Arc<GradedLieAlgebra>) -> Self {
        Representation {
            algebra: alg.clone(),
            label: RepLabel::Adjoint,
            scope: RepScope::Full,
            action: alg.ad.clone(),
            module_grade: alg.grade.iter().map(|&g| Rational::from(g as i64)).collect(),
        }
    }

    pub fn standard(alg: &Arc<GradedLieAlgebra>) -> Self {
        let e = &alg.basis[alg.grading_element_index];
        let module_grade = (0..alg.defining_dim).map(|i| e.get(i, i)).collect();
        Representation {
            algebra: alg.clone(),
            label: RepLabel::Standard,
            scope: RepScope::Full,
            action: alg.basis.clone(),
            module_grade,
        }
    }

    /// g₋₁ ≅ g/p with p acting by the induced adjoint action; g₁ acts by zero.
    pub fn tangent(alg: &Arc<GradedLieAlgebra>) -> Self {
        let lo = alg.indices_of_grade(-1);
        let k = lo.len();
        let action = (0..alg.dim())
            .map(|i| {
                if alg.grade[i] != 0 {
                    return RatMatrix::zeros(k, k);
                }
                let sub = alg.ad[i].select_rows(&lo).select_cols(&lo);
                debug_assert_eq!(sub.nrows(), k);
                sub
            })
            .collect();
        Representation {
            algebra: alg.clone(),
            label: RepLabel::Tangent,
            scope: RepScope::Parabolic,
            action,
            module_grade: vec![-Rational::one(); k],
        }
    }

    /// One-dimensional density module of weight w: E acts by −w, everything
    /// else in p acts trivially.
    pub fn density(alg: &Arc<GradedLieAlgebra>, w: Rational) -> Self {
        let action = (0..alg.dim())
            .map(|i| {
                if i == alg.grading_element_index {
                    RatMatrix::from_triplets(1, 1, [(0, 0, -&w)])
                } else {
                    RatMatrix::zeros(1, 1)
                }
            })
            .collect();
        Representation {
            algebra: alg.clone(),
            label: RepLabel::Density(w.clone()),
            scope: RepScope::Parabolic,
            action,
            module_grade: vec![-w],
        }
    }

    /// Representation from explicit action matrices. For `Parabolic` scope the
    /// entries for g₋₁ are ignored and replaced by zero placeholders.
    pub fn custom(
        alg: &Arc<GradedLieAlgebra>,
        label: &str,
        scope: RepScope,
        mut action: Vec<RatMatrix>,
        module_grade: Vec<Rational>,
    ) -> Result<Self> {
        check_len(alg.dim(), action.len())?;
        let m = module_grade.len();
        if action.iter().any(|a| a.nrows() != m || a.ncols() != m) {
            return Err(Error::InvalidRepresentation("action matrices must be square of module size".into()));
        }
        if scope == RepScope::Parabolic {
            for (i, a) in action.iter_mut().enumerate() {
                if alg.grade[i] == -1 {
                    *a = RatMatrix::zeros(m, m);
                }
            }
        }
        let rep = Representation {
            algebra: alg.clone(),
            label: RepLabel::Custom(label.to_string()),
            scope,
            action,
            module_grade,
        };
        if !rep.check_homomorphism() {
            return Err(Error::InvalidRepresentation("action is not a Lie algebra homomorphism".into()));
        }
        if !rep.check_grading() {
            return Err(Error::InvalidRepresentation("action does not respect the module grading".into()));
        }
        Ok(rep)
    }

    pub fn algebra(&self) -> &Arc<GradedLieAlgebra> {
        &self.algebra
    }

    pub fn label(&self) -> &RepLabel {
        &self.label
    }

    pub fn label_name(&self) -> String {
        match &self.label {
            RepLabel::Adjoint => "adjoint".into(),
            RepLabel::Standard => "standard".into(),
            RepLabel::Tangent => "tangent".into(),
            RepLabel::Density(w) => format!("density({w})"),
            RepLabel::Custom(s) => s.clone(),
        }
    }

    pub fn scope(&self) -> RepScope {
        self.scope
    }

    pub fn dim(&self) -> usize {
        self.module_grade.len()
    }

    pub fn module_grades(&self) -> &[Rational] {
        &self.module_grade
    }

    /// Distinct module grades in increasing order.
    pub fn grade_levels(&self) -> Vec<Rational> {
        let mut g = self.module_grade.clone();
        g.sort();
        g.dedup();
        g
    }

    /// Action matrix of basis element i. Errors for g₋₁ on a p-module.
    pub fn action(&self, i: usize) -> Result<&RatMatrix> {
        if i >= self.action.len() {
            return Err(Error::DimensionMismatch { expected: self.action.len(), got: i });
        }
        if self.scope == RepScope::Parabolic && self.algebra.grade[i] == -1 {
            return Err(Error::InvalidRepresentation(format!(
                "{} is only a p-module; g-1 does not act",
                self.label_name()
            )));
        }
        Ok(&self.action[i])
    }

    pub fn action_of(&self, x: &[Rational]) -> Result<RatMatrix> {
        check_len(self.algebra.dim(), x.len())?;
        let m = self.dim();
        let mut acc = RatMatrix::zeros(m, m);
        for (i, c) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            acc = acc.add(&self.action(i)?.scale(c));
        }
        Ok(acc)
    }

    pub fn act(&self, x: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
        check_len(self.dim(), v.len())?;
        Ok(self.action_of(x)?.apply(v))
    }

    /// True when g₁ acts by zero.
    pub fn is_completely_reducible(&self) -> bool {
        self.algebra.indices_of_grade(1).iter().all(|&i| self.action[i].is_zero())
    }

    fn acting(&self) -> Vec<usize> {
        (0..self.algebra.dim())
            .filter(|&i| self.scope == RepScope::Full || self.algebra.grade[i] != -1)
            .collect()
    }

    /// ρ([b_i, b_j]) = [ρ(b_i), ρ(b_j)] on all acting basis pairs.
    pub fn check_homomorphism(&self) -> bool {
        let acting = self.acting();
        let m = self.dim();
        for &i in &acting {
            for &j in &acting {
                if j <= i {
                    continue;
                }
                let mut lhs = RatMatrix::zeros(m, m);
                for (k, c) in self.algebra.bracket_basis(i, j) {
                    lhs = lhs.add(&self.action[*k].scale(c));
                }
                if lhs != self.action[i].commutator(&self.action[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Grade-j elements shift module grade by exactly j.
    pub fn check_grading(&self) -> bool {
        self.acting().into_iter().all(|i| {
            let g = Rational::from(self.algebra.grade[i] as i64);
            self.action[i]
                .triplets()
                .all(|(r, c, _)| self.module_grade[r] == &self.module_grade[c] + &g)
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let action: Vec<Vec<(usize, usize, Rational)>> = self
            .acting()
            .into_iter()
            .map(|i| self.action[i].triplets().map(|(r, c, v)| (r, c, v.clone())).collect())
            .collect();
        serde_json::json!({
            "algebra": self.algebra.label(),
            "label": self.label_name(),
            "scope": self.scope,
            "module_dim": self.dim(),
            "module_grade": self.module_grade,
            "acting_indices": self.acting(),
            "action": action,
        })
    }
}
