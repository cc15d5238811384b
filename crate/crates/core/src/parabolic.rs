//! Algebraic transformation and normalization formulas on the model algebras.
//!
//! Every element argument is a full coefficient vector in the algebra basis;
//! functions check that it lives in the grade they expect. Differential data
//! (∇v, ∇Υ) is always supplied by the caller.

use std::sync::Arc;

use serde::Serialize;

use crate::cohomology::CochainComplex;
use crate::error::{check_len, Error, Result};
use crate::lie::{AlgebraKind, GradedLieAlgebra, RepScope, Representation};
use crate::linalg;
use crate::matrix::RatMatrix;
use crate::rational::{add_vec, axpy, Rational};

fn check_grade(alg: &GradedLieAlgebra, x: &[Rational], g: i8) -> Result<()> {
    check_len(alg.dim(), x.len())?;
    if x.iter().enumerate().any(|(i, v)| !v.is_zero() && alg.grade(i) != g) {
        return Err(Error::WrongGrade(g.to_string()));
    }
    Ok(())
}

/// Full coefficient vector of the grade-g element with local coordinates `local`.
pub fn embed_grade(alg: &GradedLieAlgebra, g: i8, local: &[Rational]) -> Result<Vec<Rational>> {
    let idx = alg.indices_of_grade(g);
    check_len(idx.len(), local.len())?;
    let mut v = vec![Rational::zero(); alg.dim()];
    for (i, c) in idx.into_iter().zip(local) {
        v[i] = c.clone();
    }
    Ok(v)
}

/// Local coordinates of the grade-g part of a full coefficient vector.
pub fn restrict_grade(alg: &GradedLieAlgebra, g: i8, full: &[Rational]) -> Result<Vec<Rational>> {
    check_len(alg.dim(), full.len())?;
    Ok(alg.indices_of_grade(g).into_iter().map(|i| full[i].clone()).collect())
}

/// Adjoint tractor s = (ξ, s₀, s₁) at a point, each slot a full coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjointTractorTriple {
    pub xi: Vec<Rational>,
    pub s0: Vec<Rational>,
    pub s1: Vec<Rational>,
}

impl AdjointTractorTriple {
    pub fn new(alg: &GradedLieAlgebra, xi: Vec<Rational>, s0: Vec<Rational>, s1: Vec<Rational>) -> Result<Self> {
        check_grade(alg, &xi, -1)?;
        check_grade(alg, &s0, 0)?;
        check_grade(alg, &s1, 1)?;
        Ok(AdjointTractorTriple { xi, s0, s1 })
    }

    pub fn element(&self) -> Vec<Rational> {
        add_vec(&add_vec(&self.xi, &self.s0), &self.s1)
    }
}

/// A module vector split into its grade components, lowest grade first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitModuleVector {
    pub grades: Vec<Rational>,
    /// Module basis indices belonging to each grade.
    pub slots: Vec<Vec<usize>>,
    pub components: Vec<Vec<Rational>>,
}

impl SplitModuleVector {
    pub fn split(rep: &Representation, v: &[Rational]) -> Result<Self> {
        check_len(rep.dim(), v.len())?;
        let grades = rep.grade_levels();
        let slots: Vec<Vec<usize>> = grades
            .iter()
            .map(|g| (0..rep.dim()).filter(|&i| &rep.module_grades()[i] == g).collect())
            .collect();
        let components = slots.iter().map(|s| s.iter().map(|&i| v[i].clone()).collect()).collect();
        Ok(SplitModuleVector { grades, slots, components })
    }

    pub fn zero(rep: &Representation) -> Self {
        Self::split(rep, &vec![Rational::zero(); rep.dim()]).expect("matching length")
    }

    pub fn from_components(rep: &Representation, components: Vec<Vec<Rational>>) -> Result<Self> {
        let mut s = Self::zero(rep);
        check_len(s.components.len(), components.len())?;
        for (slot, c) in s.slots.iter().zip(&components) {
            check_len(slot.len(), c.len())?;
        }
        s.components = components;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn to_full(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (slot, comp) in self.slots.iter().zip(&self.components) {
            for (&i, c) in slot.iter().zip(comp) {
                v[i] = c.clone();
            }
        }
        v
    }

    fn same_layout(&self, other: &SplitModuleVector) -> Result<()> {
        if self.grades != other.grades || self.slots != other.slots {
            return Err(Error::WrongGrade("split vectors have different grade layouts".into()));
        }
        Ok(())
    }
}

/// Basis dictionary of the conformal standard module: projecting slot σ,
/// middle slots μ_a, injecting slot ρ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformalSlots {
    pub sigma: usize,
    pub mu: Vec<usize>,
    pub rho: usize,
}

impl ConformalSlots {
    pub fn new(n: usize) -> Self {
        ConformalSlots { sigma: n + 1, mu: (1..=n).collect(), rho: 0 }
    }

    pub fn to_module(&self, sigma: &Rational, mu: &[Rational], rho: &Rational) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.mu.len() + 2];
        v[self.sigma] = sigma.clone();
        v[self.rho] = rho.clone();
        for (&i, m) in self.mu.iter().zip(mu) {
            v[i] = m.clone();
        }
        v
    }

    pub fn from_module(&self, v: &[Rational]) -> (Rational, Vec<Rational>, Rational) {
        (v[self.sigma].clone(), self.mu.iter().map(|&i| v[i].clone()).collect(), v[self.rho].clone())
    }
}

fn require_conformal(alg: &GradedLieAlgebra) -> Result<usize> {
    if alg.kind() != AlgebraKind::Conformal {
        return Err(Error::Unsupported(format!("{} is not the conformal algebra", alg.label())));
    }
    Ok(alg.params()[0])
}

/// [X, φ(Y)] − [Y, φ(X)] for a 1-cochain φ with values in g, as a 2-cochain.
pub fn deform_curvature_lowest(complex: &CochainComplex, phi: &[Rational]) -> Result<Vec<Rational>> {
    let alg = complex.algebra().clone();
    let c1 = complex.space(1);
    let c2 = complex.space(2);
    check_len(c1.dim(), phi.len())?;
    if complex.representation().dim() != alg.dim() || complex.representation().module_grades().len() != alg.dim() {
        return Err(Error::InvalidRepresentation("deformation needs the adjoint complex".into()));
    }
    match c1.homogeneity_of(phi)? {
        None => return Ok(vec![Rational::zero(); c2.dim()]),
        Some(h) if h == Rational::one() || h == Rational::from(2) => {}
        Some(h) => return Err(Error::NotHomogeneous(format!("homogeneity {h}, expected 1 or 2"))),
    }
    let d = alg.dim();
    let lo = alg.indices_of_grade(-1);
    let value = |t: usize| -> Vec<Rational> { phi[t * d..(t + 1) * d].to_vec() };
    let mut out = vec![Rational::zero(); c2.dim()];
    for s in 0..lo.len() {
        for t in s + 1..lo.len() {
            let xs = alg.basis_vector(lo[s]);
            let xt = alg.basis_vector(lo[t]);
            let a = alg.bracket(&xs, &value(t))?;
            let b = alg.bracket(&xt, &value(s))?;
            for m in 0..d {
                let v = &a[m] - &b[m];
                if !v.is_zero() {
                    out[c2.index(&[s, t], m).expect("valid subset")] = v;
                }
            }
        }
    }
    Ok(out)
}

/// 2-cochain with values in g₀ whose value on (X_a, X_b) is the matrix
/// `curv(a, b)` acting on tangent vectors, embedded in the so(n) block.
pub fn conformal_curvature_cochain<F>(complex: &CochainComplex, curv: F) -> Result<Vec<Rational>>
where
    F: Fn(usize, usize) -> Vec<Vec<Rational>>,
{
    let alg = complex.algebra().clone();
    let n = require_conformal(&alg)?;
    let c2 = complex.space(2);
    let mut out = vec![Rational::zero(); c2.dim()];
    for a in 0..n {
        for b in a + 1..n {
            let m = curv(a, b);
            let trip: Vec<(usize, usize, Rational)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (i + 1, j + 1, m[i][j].clone()))
                .collect();
            let coords = alg.coords(&RatMatrix::from_triplets(n + 2, n + 2, trip))?;
            for (k, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    out[c2.index(&[a, b], k).expect("valid subset")] = c;
                }
            }
        }
    }
    Ok(out)
}

/// Riemann curvature of the unit round sphere in an orthonormal frame:
/// R(e_a, e_b) = e_a e_bᵀ − e_b e_aᵀ.
pub fn round_sphere_curvature(complex: &CochainComplex) -> Result<Vec<Rational>> {
    let n = require_conformal(complex.algebra())?;
    conformal_curvature_cochain(complex, |a, b| {
        let mut m = vec![vec![Rational::zero(); n]; n];
        m[a][b] = Rational::one();
        m[b][a] = -Rational::one();
        m
    })
}

/// Sign in the normalization equation □Ρ = sign · ∂*R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationSign {
    Minus,
    Plus,
}

/// Ρ ∈ C¹(g₋₁, g₁), stored as an adjoint 1-cochain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoCochain {
    pub coeffs: Vec<Rational>,
}

impl RhoCochain {
    /// Ρ(X_t) as a full coefficient vector.
    pub fn value(&self, alg: &GradedLieAlgebra, t: usize) -> Vec<Rational> {
        let d = alg.dim();
        self.coeffs[t * d..(t + 1) * d].to_vec()
    }

    /// Ρ(ξ) for a g₋₁ element ξ.
    pub fn apply(&self, alg: &GradedLieAlgebra, xi: &[Rational]) -> Result<Vec<Rational>> {
        check_grade(alg, xi, -1)?;
        let mut out = vec![Rational::zero(); alg.dim()];
        for (t, &i) in alg.indices_of_grade(-1).iter().enumerate() {
            axpy(&mut out, &xi[i], &self.value(alg, t));
        }
        Ok(out)
    }

    /// Matrix B[t][u] = coefficient of the u-th g₁ basis element in Ρ(X_t).
    pub fn bilinear(&self, alg: &GradedLieAlgebra) -> Vec<Vec<Rational>> {
        let hi = alg.indices_of_grade(1);
        (0..alg.indices_of_grade(-1).len())
            .map(|t| {
                let v = self.value(alg, t);
                hi.iter().map(|&u| v[u].clone()).collect()
            })
            .collect()
    }
}

fn adjoint_only(complex: &CochainComplex) -> Result<()> {
    let rep = complex.representation();
    if rep.label() != &crate::lie::RepLabel::Adjoint {
        return Err(Error::InvalidRepresentation("expected the adjoint complex".into()));
    }
    Ok(())
}

/// The unique Ρ in im ∂* with □Ρ = −∂*R (or +∂*R for the opposite sign).
pub fn normalize_rho_with_sign(
    complex: &CochainComplex,
    r: &[Rational],
    sign: NormalizationSign,
) -> Result<RhoCochain> {
    adjoint_only(complex)?;
    let alg = complex.algebra().clone();
    let c1 = complex.space(1);
    let c2 = complex.space(2);
    check_len(c2.dim(), r.len())?;
    match c2.homogeneity_of(r)? {
        None => return Ok(RhoCochain { coeffs: vec![Rational::zero(); c1.dim()] }),
        Some(h) if h == Rational::from(2) => {}
        Some(h) => return Err(Error::NotHomogeneous(format!("curvature has homogeneity {h}, expected 2"))),
    }
    let d = alg.dim();
    if r.iter().enumerate().any(|(i, v)| !v.is_zero() && alg.grade(i % d) != 0) {
        return Err(Error::WrongGrade("curvature must take values in g0".into()));
    }
    let ds2 = &complex.codifferential(2)?.matrix;
    let lap = &complex.laplacian(1)?.matrix;
    let mut rhs = ds2.apply(r);
    if sign == NormalizationSign::Minus {
        rhs = rhs.iter().map(|v| -v).collect();
    }
    // Ρ = ∂*y with □∂*y = rhs
    let y = linalg::solve(&lap.mul(ds2), &rhs)
        .map_err(|_| Error::Inconsistent("right-hand side is not in □(im ∂*)".into()))?;
    Ok(RhoCochain { coeffs: ds2.apply(&y) })
}

pub fn normalize_rho(complex: &CochainComplex, r: &[Rational]) -> Result<RhoCochain> {
    normalize_rho_with_sign(complex, r, NormalizationSign::Minus)
}

/// ∂*R for a g₀-valued 2-cochain on the conformal algebra, as the matrix
/// B[t][u] = coefficient of W_u in (∂*R)(X_t).
pub fn codifferential_as_trace(complex: &CochainComplex, r: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    adjoint_only(complex)?;
    let alg = complex.algebra().clone();
    require_conformal(&alg)?;
    let c2 = complex.space(2);
    check_len(c2.dim(), r.len())?;
    let d = alg.dim();
    if r.iter().enumerate().any(|(i, v)| !v.is_zero() && alg.grade(i % d) != 0) {
        return Err(Error::WrongGrade("curvature must take values in g0".into()));
    }
    let out = complex.codifferential(2)?.matrix.apply(r);
    Ok(RhoCochain { coeffs: out }.bilinear(&alg))
}

/// λ(exp(−Υ))v = Σᵢ ((−1)ⁱ/i!) λ(Υ)ⁱ v, re-split by grade.
pub fn recalibrate_components(
    rep: &Representation,
    upsilon: &[Rational],
    v: &SplitModuleVector,
) -> Result<SplitModuleVector> {
    let alg = rep.algebra();
    check_grade(alg, upsilon, 1)?;
    let a = rep.action_of(upsilon)?;
    let mut term = v.to_full();
    let mut acc = term.clone();
    let mut i = 1i64;
    loop {
        term = a.apply(&term);
        if term.iter().all(Rational::is_zero) {
            break;
        }
        let f = Rational::new(-1, i);
        term = term.iter().map(|t| t * &f).collect();
        acc = add_vec(&acc, &term);
        i += 1;
    }
    SplitModuleVector::split(rep, &acc)
}

/// Correction term −λ([Υ, ξ])v of the Weyl connection change.
pub fn weyl_connection_shift(
    rep: &Representation,
    upsilon: &[Rational],
    xi: &[Rational],
    v: &[Rational],
) -> Result<Vec<Rational>> {
    let alg = rep.algebra();
    check_grade(alg, upsilon, 1)?;
    check_grade(alg, xi, -1)?;
    if !rep.is_completely_reducible() {
        return Err(Error::InvalidRepresentation("g1 acts nontrivially; the shift formula needs a completely reducible module".into()));
    }
    let br = alg.bracket(upsilon, xi)?;
    Ok(rep.act(&br, v)?.iter().map(|x| -x).collect())
}

/// Ρ̂(ξ) = Ρ(ξ) + ∇_ξΥ + ½[Υ, [Υ, ξ]].
pub fn rho_shift(
    alg: &GradedLieAlgebra,
    upsilon: &[Rational],
    xi: &[Rational],
    nabla_upsilon: &[Rational],
    rho: &RhoCochain,
) -> Result<Vec<Rational>> {
    check_grade(alg, upsilon, 1)?;
    check_grade(alg, xi, -1)?;
    check_grade(alg, nabla_upsilon, 1)?;
    let inner = alg.bracket(upsilon, xi)?;
    let outer = alg.bracket(upsilon, &inner)?;
    let mut out = add_vec(&rho.apply(alg, xi)?, nabla_upsilon);
    axpy(&mut out, &Rational::new(1, 2), &outer);
    Ok(out)
}

/// (D_s v)ᵢ = ∇_{π(s)}vᵢ − s₀•vᵢ + (Ρ(π(s)) − s₁)•v_{i−1}.
pub fn fundamental_derivative_components(
    rep: &Representation,
    s: &AdjointTractorTriple,
    v: &SplitModuleVector,
    nabla_v: &SplitModuleVector,
    rho_of_xi: &[Rational],
) -> Result<SplitModuleVector> {
    let alg = rep.algebra();
    check_grade(alg, rho_of_xi, 1)?;
    v.same_layout(nabla_v)?;
    let full = v.to_full();
    let s0v = rep.act(&s.s0, &full)?;
    let shift: Vec<Rational> = rho_of_xi.iter().zip(&s.s1).map(|(a, b)| a - b).collect();
    let up = rep.act(&shift, &full)?;
    let mut out = nabla_v.to_full();
    for i in 0..out.len() {
        out[i] = &out[i] - &s0v[i] + &up[i];
    }
    SplitModuleVector::split(rep, &out)
}

/// (∇_ξ v)ᵢ = ∇_ξ vᵢ + Ρ(ξ)•v_{i−1} + ξ•v_{i+1}.
pub fn tractor_derivative_components(
    rep: &Representation,
    xi: &[Rational],
    v: &SplitModuleVector,
    nabla_v: &SplitModuleVector,
    rho_of_xi: &[Rational],
) -> Result<SplitModuleVector> {
    let alg = rep.algebra();
    check_grade(alg, xi, -1)?;
    check_grade(alg, rho_of_xi, 1)?;
    if rep.scope() != RepScope::Full {
        return Err(Error::InvalidRepresentation("tractor derivative needs a g-module".into()));
    }
    v.same_layout(nabla_v)?;
    let full = v.to_full();
    let a = rep.act(rho_of_xi, &full)?;
    let b = rep.act(xi, &full)?;
    let out = add_vec(&add_vec(&nabla_v.to_full(), &a), &b);
    SplitModuleVector::split(rep, &out)
}

pub fn bullet_action(rep: &Representation, a: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
    rep.act(a, v)
}

pub fn algebraic_bracket(alg: &GradedLieAlgebra, s1: &[Rational], s2: &[Rational]) -> Result<Vec<Rational>> {
    alg.bracket(s1, s2)
}

/// Adjoint complex of an algebra, the usual input to the functions above.
pub fn adjoint_complex(alg: &Arc<GradedLieAlgebra>) -> Result<CochainComplex> {
    CochainComplex::new(Representation::adjoint(alg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn slot_dictionary_round_trip() {
        let s = ConformalSlots::new(3);
        let v = s.to_module(&q(1, 1), &[q(2, 1), q(3, 1), q(4, 1)], &q(5, 1));
        assert_eq!(v, vec![q(5, 1), q(2, 1), q(3, 1), q(4, 1), q(1, 1)]);
        assert_eq!(s.from_module(&v), (q(1, 1), vec![q(2, 1), q(3, 1), q(4, 1)], q(5, 1)));
    }

    #[test]
    fn split_orders_grades_upwards() {
        let alg = Arc::new(GradedLieAlgebra::conformal(3).unwrap());
        let rep = Representation::standard(&alg);
        let v: Vec<Rational> = (1..=5).map(|i| q(i, 1)).collect();
        let s = SplitModuleVector::split(&rep, &v).unwrap();
        assert_eq!(s.grades, vec![q(-1, 1), q(0, 1), q(1, 1)]);
        assert_eq!(s.components[0], vec![q(5, 1)]);
        assert_eq!(s.components[2], vec![q(1, 1)]);
        assert_eq!(s.to_full(), v);
    }

    #[test]
    fn wrong_grades_are_rejected() {
        let alg = Arc::new(GradedLieAlgebra::conformal(3).unwrap());
        let rep = Representation::standard(&alg);
        let xi = alg.basis_vector(0);
        let v = SplitModuleVector::zero(&rep);
        assert!(recalibrate_components(&rep, &xi, &v).is_err());
        assert!(weyl_connection_shift(&rep, &alg.basis_vector(9), &xi, &v.to_full()).is_err());
    }
}
