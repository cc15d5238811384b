//! Cochains of the abelian g₋₁ with values in a representation, the
//! Chevalley–Eilenberg differential ∂, the g₁-homology boundary δ, Kostant's
//! codifferential ∂* and the Laplacian □ = ∂∂* + ∂*∂.
//!
//! A degree-k basis cochain is e^S ⊗ v_m where S is a strictly increasing
//! k-subset of the g₋₁ basis and e^s is the dual basis of g₋₁. Subsets are
//! enumerated lexicographically and the flat index is `pos(S) * dim V + m`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::lie::{GradedLieAlgebra, Representation};
use crate::linalg;
use crate::matrix::RatMatrix;
use crate::rational::Rational;

/// k-subsets of {0..m} in lexicographic order, as bitmasks.
fn subsets(m: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, m: usize, k: usize, mask: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..=m - k {
            rec(i + 1, m, k - 1, mask | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= m {
        rec(0, m, k, 0, &mut out);
    }
    out
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

fn below(mask: u64, t: usize) -> u32 {
    (mask & ((1u64 << t) - 1)).count_ones()
}

/// Whether the space holds cochains on g₋₁ or chains on g₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Cochain,
    Chain,
}

#[derive(Debug)]
pub struct CochainSpace {
    side: Side,
    degree: usize,
    module_dim: usize,
    subsets: Vec<u64>,
    position: HashMap<u64, usize>,
    homogeneity: Vec<Rational>,
}

impl CochainSpace {
    fn new(side: Side, rep: &Representation, m: usize, degree: usize) -> Self {
        let subsets = subsets(m, degree);
        let position = subsets.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        // e^t carries E-weight +1, a g₁ chain slot carries +1 as well
        let k = Rational::from(degree as i64);
        let homogeneity = subsets
            .iter()
            .flat_map(|_| rep.module_grades().iter().map(|g| &k + g))
            .collect();
        CochainSpace { side, degree, module_dim: rep.dim(), subsets, position, homogeneity }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.subsets.len() * self.module_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    /// Local g₋₁ (or g₁) indices of the subset at position `pos`.
    pub fn subset(&self, pos: usize) -> Vec<usize> {
        members(self.subsets[pos])
    }

    pub fn subset_count(&self) -> usize {
        self.subsets.len()
    }

    /// Flat index of e^S ⊗ v_m for a strictly increasing subset.
    pub fn index(&self, subset: &[usize], m: usize) -> Option<usize> {
        let mut mask = 0u64;
        for w in subset.windows(2) {
            if w[0] >= w[1] {
                return None;
            }
        }
        for &s in subset {
            mask |= 1 << s;
        }
        self.position.get(&mask).map(|p| p * self.module_dim + m)
    }

    /// (subset, module index) of a flat index.
    pub fn split(&self, idx: usize) -> (Vec<usize>, usize) {
        (self.subset(idx / self.module_dim), idx % self.module_dim)
    }

    pub fn homogeneity(&self) -> &[Rational] {
        &self.homogeneity
    }

    /// Flat indices grouped by homogeneity, ascending.
    pub fn homogeneity_blocks(&self) -> BTreeMap<Rational, Vec<usize>> {
        let mut out: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
        for (i, h) in self.homogeneity.iter().enumerate() {
            out.entry(h.clone()).or_default().push(i);
        }
        out
    }

    /// Homogeneity of a vector if it is homogeneous (zero vectors have none).
    pub fn homogeneity_of(&self, v: &[Rational]) -> Result<Option<Rational>> {
        check_len(self.dim(), v.len())?;
        let mut found: Option<&Rational> = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match found {
                None => found = Some(&self.homogeneity[i]),
                Some(h) if h != &self.homogeneity[i] => {
                    return Err(Error::NotHomogeneous(format!("mixes homogeneities {h} and {}", self.homogeneity[i])))
                }
                _ => {}
            }
        }
        Ok(found.cloned())
    }
}

#[derive(Debug, Clone)]
pub struct LinearMap {
    pub domain: Arc<CochainSpace>,
    pub codomain: Arc<CochainSpace>,
    pub matrix: RatMatrix,
}

impl LinearMap {
    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        check_len(self.domain.dim(), v.len())?;
        Ok(self.matrix.apply(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HodgeReport {
    pub degree: usize,
    #[serde(rename = "dim_C")]
    pub dim_c: usize,
    pub dim_im_dstar: usize,
    pub dim_ker_box: usize,
    pub dim_im_d: usize,
    #[serde(rename = "dim_H")]
    pub dim_h: usize,
    pub homogeneity_histogram: BTreeMap<String, usize>,
    pub harmonic_basis: Vec<Vec<Rational>>,
}

/// A harmonic cochain together with its homogeneity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicVector {
    pub homogeneity: Rational,
    pub coeffs: Vec<Rational>,
}

/// Exact results of the structural checks at one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeChecks {
    pub degree: usize,
    pub d_squared_zero: bool,
    pub delta_squared_zero: bool,
    pub dstar_squared_zero: bool,
    pub hodge_sum: bool,
    pub hodge_iso: bool,
    pub box_injective_on_im_dstar: bool,
    pub ker_box_eq_ker_box2: bool,
    pub box_preserves_homogeneity: bool,
    pub harmonic_in_ker_d_and_dstar: bool,
}

impl DegreeChecks {
    pub fn all(&self) -> bool {
        self.d_squared_zero
            && self.delta_squared_zero
            && self.dstar_squared_zero
            && self.hodge_sum
            && self.hodge_iso
            && self.box_injective_on_im_dstar
            && self.ker_box_eq_ker_box2
            && self.box_preserves_homogeneity
            && self.harmonic_in_ker_d_and_dstar
    }
}

/// Lazily built operators for C*(g₋₁, V), cached per degree.
pub struct CochainComplex {
    rep: Arc<Representation>,
    lo: Vec<usize>,
    hi: Vec<usize>,
    x_action: Option<Vec<RatMatrix>>,
    z_action: Vec<RatMatrix>,
    w_action: Vec<RatMatrix>,
    dual: Vec<Vec<Rational>>,
    spaces: Vec<OnceLock<Arc<CochainSpace>>>,
    chains: Vec<OnceLock<Arc<CochainSpace>>>,
    d: Vec<OnceLock<LinearMap>>,
    dstar: Vec<OnceLock<LinearMap>>,
    delta: Vec<OnceLock<LinearMap>>,
    boxes: Vec<OnceLock<LinearMap>>,
    rank_d: Vec<OnceLock<usize>>,
    rank_dstar: Vec<OnceLock<usize>>,
    harmonic: Vec<OnceLock<Vec<HarmonicVector>>>,
}

fn slots<T>(n: usize) -> Vec<OnceLock<T>> {
    (0..n).map(|_| OnceLock::new()).collect()
}

impl CochainComplex {
    pub fn new(rep: Representation) -> Result<Self> {
        Self::from_arc(Arc::new(rep))
    }

    pub fn from_arc(rep: Arc<Representation>) -> Result<Self> {
        let alg = rep.algebra().clone();
        let lo = alg.indices_of_grade(-1);
        let hi = alg.indices_of_grade(1);
        if lo.len() != hi.len() || lo.len() > 63 {
            return Err(Error::InvalidAlgebra("g-1 and g1 must have equal dimension below 64".into()));
        }
        let x_action = lo.iter().map(|&i| rep.action(i).cloned()).collect::<Result<Vec<_>>>().ok();
        let dual = alg.dual_basis()?;
        let z_action = dual.iter().map(|z| rep.action_of(z)).collect::<Result<Vec<_>>>()?;
        let w_action = hi.iter().map(|&i| rep.action(i).cloned()).collect::<Result<Vec<_>>>()?;
        let m = lo.len();
        Ok(CochainComplex {
            rep,
            lo,
            hi,
            x_action,
            z_action,
            w_action,
            dual,
            spaces: slots(m + 2),
            chains: slots(m + 2),
            d: slots(m + 1),
            dstar: slots(m + 1),
            delta: slots(m + 1),
            boxes: slots(m + 1),
            rank_d: slots(m + 1),
            rank_dstar: slots(m + 1),
            harmonic: slots(m + 1),
        })
    }

    pub fn representation(&self) -> &Arc<Representation> {
        &self.rep
    }

    pub fn algebra(&self) -> &Arc<GradedLieAlgebra> {
        self.rep.algebra()
    }

    /// dim g₋₁, the top degree.
    pub fn top_degree(&self) -> usize {
        self.lo.len()
    }

    /// Full coefficient vectors of the dual basis Z^t of g₁.
    pub fn dual_basis(&self) -> &[Vec<Rational>] {
        &self.dual
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.top_degree() {
            return Err(Error::DegreeOutOfRange { degree: k, max: self.top_degree() });
        }
        Ok(())
    }

    /// C^k, with C^{m+1} the zero space.
    pub fn space(&self, k: usize) -> Arc<CochainSpace> {
        let m = self.top_degree();
        assert!(k <= m + 1, "degree beyond m + 1");
        self.spaces[k].get_or_init(|| Arc::new(CochainSpace::new(Side::Cochain, &self.rep, m, k))).clone()
    }

    /// C_k(g₁, V).
    pub fn chain_space(&self, k: usize) -> Arc<CochainSpace> {
        let m = self.top_degree();
        assert!(k <= m + 1, "degree beyond m + 1");
        self.chains[k].get_or_init(|| Arc::new(CochainSpace::new(Side::Chain, &self.rep, m, k))).clone()
    }

    fn cochain_dim_below(&self, k: usize) -> Arc<CochainSpace> {
        // C^{-1} is modelled by an empty space
        if k == 0 {
            Arc::new(CochainSpace {
                side: Side::Cochain,
                degree: 0,
                module_dim: 0,
                subsets: Vec::new(),
                position: HashMap::new(),
                homogeneity: Vec::new(),
            })
        } else {
            self.space(k - 1)
        }
    }

    /// ∂_k : C^k → C^{k+1}.
    pub fn coboundary(&self, k: usize) -> Result<&LinearMap> {
        self.check_degree(k)?;
        let xs = self.x_action.as_ref().ok_or_else(|| {
            Error::InvalidRepresentation("coboundary needs the g-1 action; this is only a p-module".into())
        })?;
        Ok(self.d[k].get_or_init(|| {
            let (src, dst) = (self.space(k), self.space(k + 1));
            let md = src.module_dim;
            let mut trip = Vec::new();
            for (p, &mask) in src.subsets.iter().enumerate() {
                for t in (0..self.top_degree()).filter(|t| mask & (1 << t) == 0) {
                    let sign = if below(mask, t).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
                    let q = dst.position[&(mask | (1 << t))];
                    for (r, c, v) in xs[t].triplets() {
                        trip.push((q * md + r, p * md + c, &sign * v));
                    }
                }
            }
            LinearMap { matrix: RatMatrix::from_triplets(dst.dim(), src.dim(), trip), domain: src, codomain: dst }
        }))
    }

    fn contraction(&self, src: Arc<CochainSpace>, dst: Arc<CochainSpace>, actions: &[RatMatrix]) -> LinearMap {
        let md = src.module_dim;
        let mut trip = Vec::new();
        for (p, &mask) in src.subsets.iter().enumerate() {
            for (i, s) in members(mask).into_iter().enumerate() {
                // (−1)^i with i counted from one
                let sign = if i % 2 == 0 { -Rational::one() } else { Rational::one() };
                let q = dst.position[&(mask & !(1 << s))];
                for (r, c, v) in actions[s].triplets() {
                    trip.push((q * md + r, p * md + c, &sign * v));
                }
            }
        }
        LinearMap { matrix: RatMatrix::from_triplets(dst.dim(), src.dim(), trip), domain: src, codomain: dst }
    }

    /// δ_k : C_k(g₁, V) → C_{k−1}(g₁, V); δ₀ is the map to the zero space.
    pub fn boundary(&self, k: usize) -> Result<&LinearMap> {
        self.check_degree(k)?;
        Ok(self.delta[k].get_or_init(|| {
            if k == 0 {
                let src = self.chain_space(0);
                let dst = self.cochain_dim_below(0);
                return LinearMap { matrix: RatMatrix::zeros(0, src.dim()), domain: src, codomain: dst };
            }
            self.contraction(self.chain_space(k), self.chain_space(k - 1), &self.w_action)
        }))
    }

    /// ∂*_k : C^k → C^{k−1}, the g₁-boundary transported by the trace-form duality.
    pub fn codifferential(&self, k: usize) -> Result<&LinearMap> {
        if k == 0 {
            return Err(Error::DegreeOutOfRange { degree: 0, max: self.top_degree() });
        }
        self.check_degree(k)?;
        Ok(self.dstar[k].get_or_init(|| self.contraction(self.space(k), self.space(k - 1), &self.z_action)))
    }

    /// ∂*_k as a matrix, with ∂*₀ the zero map into the empty space.
    fn dstar_matrix(&self, k: usize) -> RatMatrix {
        if k == 0 || k > self.top_degree() {
            let rows = if k == 0 { 0 } else { self.space(k - 1).dim() };
            let cols = if k > self.top_degree() { 0 } else { self.space(k).dim() };
            return RatMatrix::zeros(rows, cols);
        }
        self.codifferential(k).expect("degree checked").matrix.clone()
    }

    fn d_matrix(&self, k: usize) -> Result<RatMatrix> {
        Ok(self.coboundary(k)?.matrix.clone())
    }

    /// □_k = ∂_{k−1}∂*_k + ∂*_{k+1}∂_k, missing terms zero.
    pub fn laplacian(&self, k: usize) -> Result<&LinearMap> {
        self.check_degree(k)?;
        if let Some(l) = self.boxes[k].get() {
            return Ok(l);
        }
        let sp = self.space(k);
        let mut lap = RatMatrix::zeros(sp.dim(), sp.dim());
        if k > 0 {
            lap = lap.add(&self.d_matrix(k - 1)?.mul(&self.dstar_matrix(k)));
        }
        if k < self.top_degree() {
            lap = lap.add(&self.dstar_matrix(k + 1).mul(&self.d_matrix(k)?));
        }
        Ok(self.boxes[k].get_or_init(|| LinearMap { domain: sp.clone(), codomain: sp, matrix: lap }))
    }

    /// rank ∂_k, with rank ∂_{−1} = 0.
    pub fn rank_coboundary(&self, k: isize) -> Result<usize> {
        if k < 0 || k as usize == self.top_degree() {
            return Ok(0);
        }
        let k = k as usize;
        self.check_degree(k)?;
        if let Some(r) = self.rank_d[k].get() {
            return Ok(*r);
        }
        let r = linalg::rank(&self.coboundary(k)?.matrix);
        Ok(*self.rank_d[k].get_or_init(|| r))
    }

    /// rank ∂*_k, zero outside 1..=m.
    pub fn rank_codifferential(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.top_degree() {
            return Ok(0);
        }
        if let Some(r) = self.rank_dstar[k].get() {
            return Ok(*r);
        }
        let r = linalg::rank(&self.codifferential(k)?.matrix);
        Ok(*self.rank_dstar[k].get_or_init(|| r))
    }

    /// Kernel of □_k computed blockwise by homogeneity, so every vector is
    /// homogeneous. Errors if □ mixes homogeneities.
    pub fn harmonic_basis(&self, k: usize) -> Result<&[HarmonicVector]> {
        self.check_degree(k)?;
        if let Some(h) = self.harmonic[k].get() {
            return Ok(h);
        }
        let lap = &self.laplacian(k)?.matrix;
        let sp = self.space(k);
        if !preserves_homogeneity(lap, &sp, &sp) {
            return Err(Error::Inconsistent("laplacian does not preserve homogeneity".into()));
        }
        let mut out = Vec::new();
        for (h, idx) in sp.homogeneity_blocks() {
            let block = lap.select_rows(&idx).select_cols(&idx);
            for v in linalg::nullspace(&block) {
                let mut full = vec![Rational::zero(); sp.dim()];
                for (j, c) in idx.iter().zip(v) {
                    full[*j] = c;
                }
                out.push(HarmonicVector { homogeneity: h.clone(), coeffs: full });
            }
        }
        Ok(self.harmonic[k].get_or_init(|| out))
    }

    /// Dimension of H^k as ker ∂_k / im ∂_{k−1}.
    pub fn cohomology_dim(&self, k: usize) -> Result<usize> {
        self.check_degree(k)?;
        let dim = self.space(k).dim();
        Ok(dim - self.rank_coboundary(k as isize)? - self.rank_coboundary(k as isize - 1)?)
    }

    /// Hodge decomposition dimensions at degree k.
    ///
    /// Panics if the three subspaces do not fill C^k, which would mean the
    /// operators were built inconsistently.
    pub fn hodge_decomposition(&self, k: usize) -> Result<HodgeReport> {
        self.check_degree(k)?;
        let dim_c = self.space(k).dim();
        let dim_im_dstar = self.rank_codifferential(k + 1)?;
        let dim_im_d = self.rank_coboundary(k as isize - 1)?;
        let harmonic = self.harmonic_basis(k)?;
        let dim_ker_box = harmonic.len();
        assert_eq!(
            dim_im_dstar + dim_ker_box + dim_im_d,
            dim_c,
            "Hodge decomposition does not fill C^{k}"
        );
        let mut homogeneity_histogram = BTreeMap::new();
        for hv in harmonic {
            *homogeneity_histogram.entry(hv.homogeneity.to_string()).or_insert(0) += 1;
        }
        Ok(HodgeReport {
            degree: k,
            dim_c,
            dim_im_dstar,
            dim_ker_box,
            dim_im_d,
            dim_h: self.cohomology_dim(k)?,
            homogeneity_histogram,
            harmonic_basis: harmonic.iter().map(|h| h.coeffs.clone()).collect(),
        })
    }

    /// Matrix of the induced action of a g₀ element on C^k:
    /// value slot by the representation, form slots by the dual of ad.
    pub fn g0_action(&self, k: usize, y: &[Rational]) -> Result<RatMatrix> {
        self.check_degree(k)?;
        let alg = self.algebra();
        check_len(alg.dim(), y.len())?;
        if y.iter().enumerate().any(|(i, c)| !c.is_zero() && alg.grade(i) != 0) {
            return Err(Error::WrongGrade("0".into()));
        }
        let rho = self.rep.action_of(y)?;
        let ad = alg.ad_of(y)?;
        // a[s][t] = coefficient of X_s in [Y, X_t]
        let a: Vec<Vec<Rational>> =
            self.lo.iter().map(|&s| self.lo.iter().map(|&t| ad.get(s, t)).collect()).collect();
        let sp = self.space(k);
        let md = sp.module_dim;
        let mut trip = Vec::new();
        for (p, &mask) in sp.subsets.iter().enumerate() {
            for (r, c, v) in rho.triplets() {
                trip.push((p * md + r, p * md + c, v.clone()));
            }
            for s in members(mask) {
                // Y·e^s = −Σ_t a[s][t] e^t
                for (t, coef) in a[s].iter().enumerate() {
                    if coef.is_zero() || (t != s && mask & (1 << t) != 0) {
                        continue;
                    }
                    let rest = mask & !(1 << s);
                    let new = rest | (1 << t);
                    // moving slot from position of s to position of t
                    let parity = below(rest, s) + below(rest, t);
                    let sign = if parity.is_multiple_of(2) { -coef.clone() } else { coef.clone() };
                    let q = sp.position[&new];
                    for m in 0..md {
                        trip.push((q * md + m, p * md + m, sign.clone()));
                    }
                }
            }
        }
        Ok(RatMatrix::from_triplets(sp.dim(), sp.dim(), trip))
    }

    /// Number of irreducible g₀-summands of a g₀-invariant subspace of C^k,
    /// counted as highest-weight vectors: the joint kernel of the raising
    /// operators restricted to the span of `basis`.
    pub fn count_irreducibles(&self, k: usize, basis: &[Vec<Rational>]) -> Result<usize> {
        if basis.is_empty() {
            return Ok(0);
        }
        let ops = self.algebra().raising_operators()?;
        let dim = self.space(k).dim();
        for v in basis {
            check_len(dim, v.len())?;
        }
        let h = RatMatrix::from_columns(dim, basis);
        let b = basis.len();
        if ops.is_empty() {
            return Ok(b);
        }
        let complex = ops.iter().any(|o| o.im.iter().any(|v| !v.is_zero()));
        let mut stacked: Option<RatMatrix> = None;
        for op in &ops {
            let ar = self.g0_action(k, &op.re)?.mul(&h);
            let block = if complex {
                let ai = self.g0_action(k, &op.im)?.mul(&h);
                ar.hstack(&ai.neg()).vstack(&ai.hstack(&ar))
            } else {
                ar
            };
            stacked = Some(match stacked {
                None => block,
                Some(s) => s.vstack(&block),
            });
        }
        let s = stacked.expect("nonempty operator list");
        let null = s.ncols() - linalg::rank(&s);
        Ok(if complex { null / 2 } else { null })
    }

    /// Identification of chains with cochains: e^S ⊗ v ↦ Z^{s₁}∧⋯∧Z^{s_k} ⊗ v
    /// expanded in the g₁ basis through minors of the dual-basis matrix.
    pub fn duality_map(&self, k: usize) -> Result<RatMatrix> {
        self.check_degree(k)?;
        let m = self.top_degree();
        // c[u][t] = coefficient of W_u in Z^t
        let c: Vec<Vec<Rational>> =
            (0..m).map(|u| (0..m).map(|t| self.dual[t][self.hi[u]].clone()).collect()).collect();
        let src = self.space(k);
        let dst = self.chain_space(k);
        let md = src.module_dim;
        let mut trip = Vec::new();
        for (p, &s_mask) in src.subsets.iter().enumerate() {
            let s = members(s_mask);
            for (q, &u_mask) in dst.subsets.iter().enumerate() {
                let u = members(u_mask);
                let minor: Vec<Vec<Rational>> =
                    u.iter().map(|&a| s.iter().map(|&b| c[a][b].clone()).collect()).collect();
                let det = determinant(minor);
                if det.is_zero() {
                    continue;
                }
                for mm in 0..md {
                    trip.push((q * md + mm, p * md + mm, det.clone()));
                }
            }
        }
        Ok(RatMatrix::from_triplets(dst.dim(), src.dim(), trip))
    }

    /// All exact structural checks at degree k.
    pub fn checks(&self, k: usize) -> Result<DegreeChecks> {
        self.check_degree(k)?;
        let m = self.top_degree();
        let d_squared_zero = if k < m {
            self.coboundary(k + 1)?.matrix.mul(&self.coboundary(k)?.matrix).is_zero()
        } else {
            true
        };
        let delta_squared_zero = if k < m {
            self.boundary(k)?.matrix.mul(&self.boundary(k + 1)?.matrix).is_zero()
        } else {
            true
        };
        let dstar_squared_zero = if k >= 1 && k < m {
            self.dstar_matrix(k).mul(&self.dstar_matrix(k + 1)).is_zero()
        } else {
            true
        };
        let report = self.hodge_decomposition(k)?;
        let hodge_sum = report.dim_im_dstar + report.dim_ker_box + report.dim_im_d == report.dim_c;
        let hodge_iso = report.dim_ker_box == report.dim_h;
        let lap = &self.laplacian(k)?.matrix;
        let box_injective_on_im_dstar = if k < m {
            let ds = self.dstar_matrix(k + 1);
            linalg::rank(&lap.mul(&ds)) == self.rank_codifferential(k + 1)?
        } else {
            true
        };
        let ker_box_eq_ker_box2 = linalg::rank(&lap.mul(lap)) == linalg::rank(lap);
        let sp = self.space(k);
        let box_preserves_homogeneity = preserves_homogeneity(lap, &sp, &sp);
        let harmonic_in_ker_d_and_dstar = self.harmonic_basis(k)?.iter().all(|h| {
            let d_ok = k == m || self.coboundary(k).map(|d| d.matrix.apply(&h.coeffs).iter().all(Rational::is_zero)).unwrap_or(false);
            let ds_ok = k == 0 || self.dstar_matrix(k).apply(&h.coeffs).iter().all(Rational::is_zero);
            d_ok && ds_ok
        });
        Ok(DegreeChecks {
            degree: k,
            d_squared_zero,
            delta_squared_zero,
            dstar_squared_zero,
            hodge_sum,
            hodge_iso,
            box_injective_on_im_dstar,
            ker_box_eq_ker_box2,
            box_preserves_homogeneity,
            harmonic_in_ker_d_and_dstar,
        })
    }
}

fn preserves_homogeneity(m: &RatMatrix, dom: &CochainSpace, cod: &CochainSpace) -> bool {
    m.triplets().all(|(r, c, _)| cod.homogeneity[r] == dom.homogeneity[c])
}

/// Determinant by exact elimination; small matrices only.
fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}
