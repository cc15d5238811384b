use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tractorlab_core::cohomology::CochainComplex;
use tractorlab_core::parabolic::*;
use tractorlab_core::{linalg, q, GradedLieAlgebra, RatMatrix, Rational, Representation};

fn rq(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-7..=7), rng.gen_range(1..=5))
}

fn random_grade(alg: &GradedLieAlgebra, g: i8, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..alg.dim()).map(|i| if alg.grade(i) == g { rq(rng) } else { Rational::zero() }).collect()
}

fn random_cochain(c: &CochainComplex, k: usize, h: i64, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let sp = c.space(k);
    sp.homogeneity().iter().map(|x| if *x == Rational::from(h) { rq(rng) } else { Rational::zero() }).collect()
}

fn conformal_adjoint(n: usize) -> CochainComplex {
    adjoint_complex(&Arc::new(GradedLieAlgebra::conformal(n).unwrap())).unwrap()
}

fn scalar_matrix(n: usize, s: Rational) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { s.clone() } else { Rational::zero() }).collect()).collect()
}

#[test]
fn deformation_equals_coboundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in [conformal_adjoint(3), adjoint_complex(&Arc::new(GradedLieAlgebra::projective(2).unwrap())).unwrap()] {
        let d1 = c.coboundary(1).unwrap().matrix.clone();
        for h in [1, 2] {
            for _ in 0..10 {
                let phi = random_cochain(&c, 1, h, &mut rng);
                let out = deform_curvature_lowest(&c, &phi).unwrap();
                assert_eq!(out, d1.apply(&phi));
                let hom = c.space(2).homogeneity_of(&out).unwrap();
                assert!(hom.is_none() || hom == Some(Rational::from(h)));
            }
        }
        let zero = vec![Rational::zero(); c.space(1).dim()];
        assert!(deform_curvature_lowest(&c, &zero).unwrap().iter().all(Rational::is_zero));
    }
}

#[test]
fn deformation_rejects_mixed_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = conformal_adjoint(3);
    let a = random_cochain(&c, 1, 1, &mut rng);
    let b = random_cochain(&c, 1, 2, &mut rng);
    let mixed: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    assert!(deform_curvature_lowest(&c, &mixed).is_err());
    let h0 = random_cochain(&c, 1, 0, &mut rng);
    assert!(deform_curvature_lowest(&c, &h0).is_err());
}

#[test]
fn round_sphere_normalization_gives_minus_schouten() {
    for n in 3..=5 {
        let c = conformal_adjoint(n);
        let alg = c.algebra().clone();
        let r = round_sphere_curvature(&c).unwrap();
        let rho = normalize_rho(&c, &r).unwrap();
        // Schouten of the unit sphere is ½g in an orthonormal frame
        assert_eq!(rho.bilinear(&alg), scalar_matrix(n, q(-1, 2)), "n = {n}");
        // the opposite sign would give +½g
        let other = normalize_rho_with_sign(&c, &r, NormalizationSign::Plus).unwrap();
        assert_eq!(other.bilinear(&alg), scalar_matrix(n, q(1, 2)));
        // normalized curvature is co-closed
        let corrected: Vec<Rational> = r
            .iter()
            .zip(c.coboundary(1).unwrap().matrix.apply(&rho.coeffs))
            .map(|(a, b)| a + &b)
            .collect();
        assert!(c.codifferential(2).unwrap().matrix.apply(&corrected).iter().all(Rational::is_zero));
        // Ρ lies in im ∂*
        let ds = &c.codifferential(2).unwrap().matrix;
        let aug = ds.hstack(&RatMatrix::from_columns(ds.nrows(), std::slice::from_ref(&rho.coeffs)));
        assert_eq!(linalg::rank(&aug), linalg::rank(ds));
    }
}

#[test]
fn normalization_of_zero_and_random_curvature() {
    let c = conformal_adjoint(4);
    let zero = vec![Rational::zero(); c.space(2).dim()];
    assert!(normalize_rho(&c, &zero).unwrap().coeffs.iter().all(Rational::is_zero));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = c.algebra().dim();
    let alg = c.algebra().clone();
    for _ in 0..5 {
        let r: Vec<Rational> = random_cochain(&c, 2, 2, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(i, v)| if alg.grade(i % d) == 0 { v } else { Rational::zero() })
            .collect();
        let rho = normalize_rho(&c, &r).unwrap();
        let corrected: Vec<Rational> = r
            .iter()
            .zip(c.coboundary(1).unwrap().matrix.apply(&rho.coeffs))
            .map(|(a, b)| a + &b)
            .collect();
        assert!(c.codifferential(2).unwrap().matrix.apply(&corrected).iter().all(Rational::is_zero));
    }
}

#[test]
fn codifferential_is_minus_half_ricci() {
    for n in 3..=5 {
        let c = conformal_adjoint(n);
        let r = round_sphere_curvature(&c).unwrap();
        let b = codifferential_as_trace(&c, &r).unwrap();
        let ric = Rational::from((n - 1) as i64);
        assert_eq!(b, scalar_matrix(n, q(-1, 2) * ric));
    }
}

#[test]
fn codifferential_vanishes_on_harmonic_curvature() {
    let c = conformal_adjoint(4);
    let zero = vec![Rational::zero(); c.space(2).dim()];
    assert_eq!(codifferential_as_trace(&c, &zero).unwrap(), scalar_matrix(4, Rational::zero()));
    let harmonic = c.harmonic_basis(2).unwrap().to_vec();
    assert!(!harmonic.is_empty());
    for h in harmonic {
        assert_eq!(h.homogeneity, Rational::from(2));
        assert_eq!(codifferential_as_trace(&c, &h.coeffs).unwrap(), scalar_matrix(4, Rational::zero()));
    }
    let p = adjoint_complex(&Arc::new(GradedLieAlgebra::projective(3).unwrap())).unwrap();
    let pz = vec![Rational::zero(); p.space(2).dim()];
    assert!(codifferential_as_trace(&p, &pz).is_err());
}

#[test]
fn recalibration_matches_tractor_transformation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 3..=5 {
        let alg = Arc::new(GradedLieAlgebra::conformal(n).unwrap());
        let rep = Representation::standard(&alg);
        let slots = ConformalSlots::new(n);
        for _ in 0..20 {
            let sigma = rq(&mut rng);
            let mu: Vec<Rational> = (0..n).map(|_| rq(&mut rng)).collect();
            let rho = rq(&mut rng);
            let ups: Vec<Rational> = (0..n).map(|_| rq(&mut rng)).collect();
            let v = SplitModuleVector::split(&rep, &slots.to_module(&sigma, &mu, &rho)).unwrap();
            let u = embed_grade(&alg, 1, &ups).unwrap();
            let out = recalibrate_components(&rep, &u, &v).unwrap();
            let (s2, m2, r2) = slots.from_module(&out.to_full());
            let norm: Rational = ups.iter().map(|x| x * x).sum();
            let dot: Rational = ups.iter().zip(&mu).map(|(a, b)| a * b).sum();
            assert_eq!(s2, sigma);
            for a in 0..n {
                assert_eq!(m2[a], &mu[a] + &sigma * &ups[a]);
            }
            assert_eq!(r2, &rho - &dot - q(1, 2) * norm * &sigma);
        }
    }
}

#[test]
fn recalibration_is_a_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for alg in [GradedLieAlgebra::conformal(4).unwrap(), GradedLieAlgebra::grassmannian(2, 3).unwrap()] {
        let alg = Arc::new(alg);
        for rep in [Representation::standard(&alg), Representation::adjoint(&alg)] {
            for _ in 0..5 {
                let v0: Vec<Rational> = (0..rep.dim()).map(|_| rq(&mut rng)).collect();
                let v = SplitModuleVector::split(&rep, &v0).unwrap();
                let u1 = random_grade(&alg, 1, &mut rng);
                let u2 = random_grade(&alg, 1, &mut rng);
                let zero = vec![Rational::zero(); alg.dim()];
                assert_eq!(recalibrate_components(&rep, &zero, &v).unwrap(), v);
                let neg: Vec<Rational> = u1.iter().map(|x| -x).collect();
                let back = recalibrate_components(&rep, &neg, &recalibrate_components(&rep, &u1, &v).unwrap()).unwrap();
                assert_eq!(back, v);
                let sum: Vec<Rational> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
                let two = recalibrate_components(&rep, &u2, &recalibrate_components(&rep, &u1, &v).unwrap()).unwrap();
                assert_eq!(two, recalibrate_components(&rep, &sum, &v).unwrap());
                // against the matrix exponential of −λ(Υ), summed until nilpotency
                let a = rep.action_of(&u1).unwrap().neg();
                let mut term = RatMatrix::identity(rep.dim());
                let mut exp = term.clone();
                for i in 1..=4 {
                    term = term.mul(&a).scale(&q(1, i));
                    exp = exp.add(&term);
                }
                assert_eq!(recalibrate_components(&rep, &u1, &v).unwrap().to_full(), exp.apply(&v0));
            }
        }
    }
}

#[test]
fn projective_shift_shares_geodesics() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let alg = Arc::new(GradedLieAlgebra::projective(3).unwrap());
    let tangent = Representation::tangent(&alg);
    for _ in 0..20 {
        let u = random_grade(&alg, 1, &mut rng);
        let xi = random_grade(&alg, -1, &mut rng);
        let eta = random_grade(&alg, -1, &mut rng);
        let eta_local = restrict_grade(&alg, -1, &eta).unwrap();
        let got = weyl_connection_shift(&tangent, &u, &xi, &eta_local).unwrap();
        // Υ(ξ) through the natural pairing of row and column blocks
        let ul = restrict_grade(&alg, 1, &u).unwrap();
        let xl = restrict_grade(&alg, -1, &xi).unwrap();
        let pair = |a: &[Rational]| -> Rational { ul.iter().zip(a).map(|(x, y)| x * y).sum() };
        let (ue, ux) = (pair(&eta_local), pair(&xl));
        for t in 0..3 {
            assert_eq!(got[t], &ue * &xl[t] + &ux * &eta_local[t]);
        }
    }
}

#[test]
fn grassmannian_shift_matches_index_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (p, qq) = (2, 3);
    let alg = Arc::new(GradedLieAlgebra::grassmannian(p, qq).unwrap());
    let tangent = Representation::tangent(&alg);
    for _ in 0..20 {
        let u = random_grade(&alg, 1, &mut rng);
        let xi = random_grade(&alg, -1, &mut rng);
        let eta = random_grade(&alg, -1, &mut rng);
        let got = weyl_connection_shift(&tangent, &u, &xi, &restrict_grade(&alg, -1, &eta).unwrap()).unwrap();
        let got = alg.to_matrix(&embed_grade(&alg, -1, &got).unwrap()).unwrap();
        let um = alg.to_matrix(&u).unwrap();
        let xm = alg.to_matrix(&xi).unwrap();
        let ym = alg.to_matrix(&eta).unwrap();
        for a in 0..qq {
            for b in 0..p {
                let mut want = Rational::zero();
                for c in 0..p {
                    for d in 0..qq {
                        let uu = um.get(c, p + d);
                        want += xm.get(p + a, c) * &uu * ym.get(p + d, b);
                        want += ym.get(p + a, c) * &uu * xm.get(p + d, b);
                    }
                }
                assert_eq!(got.get(p + a, b), want);
            }
        }
    }
}

#[test]
fn conformal_density_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let alg = Arc::new(GradedLieAlgebra::conformal(4).unwrap());
    for w in [q(1, 1), q(-1, 1), q(3, 2)] {
        let rep = Representation::density(&alg, w.clone());
        let u = random_grade(&alg, 1, &mut rng);
        let xi = random_grade(&alg, -1, &mut rng);
        let s = rq(&mut rng);
        let got = weyl_connection_shift(&rep, &u, &xi, std::slice::from_ref(&s)).unwrap();
        let ux: Rational = restrict_grade(&alg, 1, &u)
            .unwrap()
            .iter()
            .zip(restrict_grade(&alg, -1, &xi).unwrap())
            .map(|(a, b)| a * &b)
            .sum();
        assert_eq!(got, vec![w * ux * s]);
    }
    let std_rep = Representation::standard(&alg);
    let u = random_grade(&alg, 1, &mut rng);
    let xi = random_grade(&alg, -1, &mut rng);
    assert!(weyl_connection_shift(&std_rep, &u, &xi, &vec![Rational::zero(); 6]).is_err());
}

#[test]
fn rho_shift_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let alg = Arc::new(GradedLieAlgebra::conformal(3).unwrap());
    let c = adjoint_complex(&alg).unwrap();
    let zero = vec![Rational::zero(); alg.dim()];
    let rho = RhoCochain { coeffs: random_cochain(&c, 1, 2, &mut rng) };
    let xi = random_grade(&alg, -1, &mut rng);
    assert_eq!(rho_shift(&alg, &zero, &xi, &zero, &rho).unwrap(), rho.apply(&alg, &xi).unwrap());
    let empty = RhoCochain { coeffs: vec![Rational::zero(); c.space(1).dim()] };
    for _ in 0..20 {
        let u = random_grade(&alg, 1, &mut rng);
        let xi = random_grade(&alg, -1, &mut rng);
        let eta = random_grade(&alg, -1, &mut rng);
        let a1 = alg.bracket(&u, &xi).unwrap();
        let a2 = alg.bracket(&u, &a1).unwrap();
        assert!(alg.bracket(&u, &a2).unwrap().iter().all(Rational::is_zero));
        let out = rho_shift(&alg, &u, &xi, &zero, &empty).unwrap();
        let ul = restrict_grade(&alg, 1, &u).unwrap();
        let xl = restrict_grade(&alg, -1, &xi).unwrap();
        let el = restrict_grade(&alg, -1, &eta).unwrap();
        let dot = |a: &[Rational], b: &[Rational]| -> Rational { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let expr = dot(&ul, &xl) * dot(&ul, &el) - q(1, 2) * dot(&ul, &ul) * dot(&xl, &el);
        // trace-form pairing with η is −2 times Υ(ξ)Υ(η) − ½|Υ|²g(ξ,η)
        assert_eq!(alg.trace_form(&out, &eta).unwrap(), q(-2, 1) * expr);
    }
}

#[test]
fn fundamental_derivative_special_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let alg = Arc::new(GradedLieAlgebra::conformal(4).unwrap());
    let zero = vec![Rational::zero(); alg.dim()];
    for rep in [Representation::standard(&alg), Representation::adjoint(&alg)] {
        let v0: Vec<Rational> = (0..rep.dim()).map(|_| rq(&mut rng)).collect();
        let v = SplitModuleVector::split(&rep, &v0).unwrap();
        let nz = SplitModuleVector::zero(&rep);
        let s0 = random_grade(&alg, 0, &mut rng);
        let s1 = random_grade(&alg, 1, &mut rng);
        let vertical = AdjointTractorTriple::new(&alg, zero.clone(), s0.clone(), s1.clone()).unwrap();
        // ξ = 0, so Ρ(ξ) = 0
        let got0 = fundamental_derivative_components(&rep, &vertical, &v, &nz, &zero).unwrap();
        let sum: Vec<Rational> = s0.iter().zip(&s1).map(|(a, b)| -(a + b)).collect();
        assert_eq!(got0.to_full(), rep.act(&sum, &v0).unwrap());
        let s_zero = AdjointTractorTriple::new(&alg, zero.clone(), zero.clone(), zero.clone()).unwrap();
        let out = fundamental_derivative_components(&rep, &s_zero, &v, &nz, &zero).unwrap();
        assert!(out.to_full().iter().all(Rational::is_zero));
    }
    let trivial = Representation::density(&alg, Rational::zero());
    let f = SplitModuleVector::split(&trivial, &[q(3, 1)]).unwrap();
    let df = SplitModuleVector::split(&trivial, &[q(-2, 7)]).unwrap();
    let s = AdjointTractorTriple::new(
        &alg,
        random_grade(&alg, -1, &mut rng),
        random_grade(&alg, 0, &mut rng),
        random_grade(&alg, 1, &mut rng),
    )
    .unwrap();
    let rho = random_grade(&alg, 1, &mut rng);
    assert_eq!(fundamental_derivative_components(&trivial, &s, &f, &df, &rho).unwrap(), df);
}

#[test]
fn conformal_tractor_derivative_is_standard_connection() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for n in 3..=5 {
        let alg = Arc::new(GradedLieAlgebra::conformal(n).unwrap());
        let rep = Representation::standard(&alg);
        let slots = ConformalSlots::new(n);
        for _ in 0..20 {
            let x: Vec<Rational> = (0..n).map(|_| rq(&mut rng)).collect();
            let (sigma, rho) = (rq(&mut rng), rq(&mut rng));
            let mu: Vec<Rational> = (0..n).map(|_| rq(&mut rng)).collect();
            let (dsig, drho) = (rq(&mut rng), rq(&mut rng));
            let dmu: Vec<Rational> = (0..n).map(|_| rq(&mut rng)).collect();
            let mut pm = vec![vec![Rational::zero(); n]; n];
            for a in 0..n {
                for b in a..n {
                    let v = rq(&mut rng);
                    pm[a][b] = v.clone();
                    pm[b][a] = v;
                }
            }
            let px: Vec<Rational> = (0..n).map(|b| (0..n).map(|a| &x[a] * &pm[a][b]).sum()).collect();
            let rho_xi = embed_grade(&alg, 1, &px.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
            let xi = embed_grade(&alg, -1, &x).unwrap();
            let v = SplitModuleVector::split(&rep, &slots.to_module(&sigma, &mu, &rho)).unwrap();
            let dv = SplitModuleVector::split(&rep, &slots.to_module(&dsig, &dmu, &drho)).unwrap();
            let out = tractor_derivative_components(&rep, &xi, &v, &dv, &rho_xi).unwrap();
            let (s2, m2, r2) = slots.from_module(&out.to_full());
            let xmu: Rational = x.iter().zip(&mu).map(|(a, b)| a * b).sum();
            let pmu: Rational = px.iter().zip(&mu).map(|(a, b)| a * b).sum();
            assert_eq!(s2, &dsig - &xmu);
            for b in 0..n {
                assert_eq!(m2[b], &dmu[b] + &x[b] * &rho + &px[b] * &sigma);
            }
            assert_eq!(r2, &drho - &pmu);
        }
    }
}

#[test]
fn grassmannian_tractor_derivative_twistor_slots() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let (p, qq) = (2, 2);
    let alg = Arc::new(GradedLieAlgebra::grassmannian(p, qq).unwrap());
    let rep = Representation::standard(&alg);
    for _ in 0..20 {
        let xi = random_grade(&alg, -1, &mut rng);
        let rho_xi = random_grade(&alg, 1, &mut rng);
        let v0: Vec<Rational> = (0..p + qq).map(|_| rq(&mut rng)).collect();
        let d0: Vec<Rational> = (0..p + qq).map(|_| rq(&mut rng)).collect();
        let v = SplitModuleVector::split(&rep, &v0).unwrap();
        let dv = SplitModuleVector::split(&rep, &d0).unwrap();
        let out = tractor_derivative_components(&rep, &xi, &v, &dv, &rho_xi).unwrap();
        // components: [0] is the lower block w (grade −p/(p+q)), [1] the upper block v
        let xm = alg.to_matrix(&xi).unwrap();
        let rm = alg.to_matrix(&rho_xi).unwrap();
        for a in 0..p {
            let mut want = d0[a].clone();
            for b in 0..qq {
                want += rm.get(a, p + b) * &v0[p + b];
            }
            assert_eq!(out.components[1][a], want);
        }
        for b in 0..qq {
            let mut want = d0[p + b].clone();
            for a in 0..p {
                want += xm.get(p + b, a) * &v0[a];
            }
            assert_eq!(out.components[0][b], want);
        }
    }
    let z = SplitModuleVector::zero(&rep);
    let xi = random_grade(&alg, -1, &mut rng);
    let zero = vec![Rational::zero(); alg.dim()];
    assert_eq!(tractor_derivative_components(&rep, &xi, &z, &z, &zero).unwrap(), z);
    let dens = Representation::density(&alg, q(1, 1));
    let dz = SplitModuleVector::zero(&dens);
    assert!(tractor_derivative_components(&dens, &xi, &dz, &dz, &zero).is_err());
}

#[test]
fn bullet_action_is_compatible_with_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let algebras = [
        GradedLieAlgebra::conformal(3).unwrap(),
        GradedLieAlgebra::conformal(4).unwrap(),
        GradedLieAlgebra::projective(2).unwrap(),
        GradedLieAlgebra::projective(3).unwrap(),
        GradedLieAlgebra::grassmannian(2, 2).unwrap(),
        GradedLieAlgebra::grassmannian(2, 3).unwrap(),
    ];
    for alg in algebras {
        let alg = Arc::new(alg);
        for rep in [Representation::standard(&alg), Representation::adjoint(&alg)] {
            for _ in 0..50 {
                let s1: Vec<Rational> = (0..alg.dim()).map(|_| rq(&mut rng)).collect();
                let s2: Vec<Rational> = (0..alg.dim()).map(|_| rq(&mut rng)).collect();
                let t: Vec<Rational> = (0..rep.dim()).map(|_| rq(&mut rng)).collect();
                let lhs = bullet_action(&rep, &algebraic_bracket(&alg, &s1, &s2).unwrap(), &t).unwrap();
                let a = bullet_action(&rep, &s1, &bullet_action(&rep, &s2, &t).unwrap()).unwrap();
                let b = bullet_action(&rep, &s2, &bullet_action(&rep, &s1, &t).unwrap()).unwrap();
                let rhs: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                assert_eq!(lhs, rhs);
                assert!(algebraic_bracket(&alg, &s1, &s1).unwrap().iter().all(Rational::is_zero));
            }
            let e = alg.basis_vector(alg.grading_element_index());
            for m in 0..rep.dim() {
                let mut basis = vec![Rational::zero(); rep.dim()];
                basis[m] = Rational::one();
                let out = bullet_action(&rep, &e, &basis).unwrap();
                let want: Vec<Rational> = basis.iter().map(|v| v * &rep.module_grades()[m]).collect();
                assert_eq!(out, want);
            }
        }
    }
}
