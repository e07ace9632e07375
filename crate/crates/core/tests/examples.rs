//! Worked examples for every public operation.

use cutkit_core::blowup::*;
use cutkit_core::cutting::*;
use cutkit_core::expr::{Expr, ExprMap};
use cutkit_core::forms::{DiscForm, HalfForm, Model};
use cutkit_core::funcalg::*;
use cutkit_core::rational::{q, CRat};
use cutkit_core::verify::numeric::{jacobian_at, max_abs_diff, rank_at};
use cutkit_core::verify::{run_property, SamplePlan};
use nalgebra::DMatrix;

fn hf(names: &[&str], c: HalfFunc) -> HalfForm {
    let d = c.dim();
    HalfForm::named(d, names, c).unwrap()
}

fn df(names: &[&str], c: DiscFunc) -> DiscForm {
    let d = c.dim();
    DiscForm::named(d, names, c).unwrap()
}

fn mono(d: usize, k: i64, m: u32) -> HalfFunc {
    HalfFunc::monomial(d, vec![0; d], k, m, CRat::one())
}

#[test]
fn mono_descends_examples() {
    assert!(mono_descends(1, 1));
    assert!(mono_descends(2, 0));
    assert!(!mono_descends(1, 3));
}

#[test]
fn descend_function_examples() {
    let v = descend_function(&mono(0, 1, 1));
    assert!(v.descends);
    assert_eq!(v.image, Some(DiscFunc::z(0)));

    let sqrt_s_cos = &HalfFunc::sqrt_s(0) * &HalfFunc::cos_theta(0, 1);
    let g_w = &HalfFunc::exp_i_theta(0, 1) * &sqrt_s_cos;
    let v = descend_function(&g_w);
    assert!(!v.descends);
    assert!(v.offending_modes.iter().any(|m| m.k == 2 && m.m == 1));

    let v = descend_function(&sqrt_s_cos);
    assert!(v.descends);
    assert_eq!(v.image, Some(DiscFunc::u(0)));

    let s_cos = &HalfFunc::s(0) * &HalfFunc::cos_theta(0, 1);
    let v = descend_function(&s_cos);
    assert!(!v.descends);
    let mut ks: Vec<i64> = v.offending_modes.iter().map(|m| m.k).collect();
    ks.sort();
    assert_eq!(ks, vec![-1, 1]);
}

#[test]
fn lift_function_examples() {
    assert_eq!(lift_function(&DiscFunc::z(0)), mono(0, 1, 1));
    assert_eq!(lift_function(&DiscFunc::abs_z_squared(0)), HalfFunc::s(0));
    let g = DiscFunc::monomial(0, vec![], 2, 1, CRat::one());
    let f = lift_function(&g);
    assert_eq!(f, mono(0, 1, 3));
    let plan = SamplePlan::new(Model::Half, 0, 3).with_counts(10, 0, 0);
    for p in plan.points() {
        let (theta, s) = (p[0], p[1]);
        let (u, v) = (s.sqrt() * theta.cos(), s.sqrt() * theta.sin());
        let diff = f.eval(&[], theta, s).unwrap() - g.eval(&[], u, v).unwrap();
        assert!(diff.norm() < 1e-12);
    }
}

#[test]
fn smoothness_and_invariance_examples() {
    assert!(is_smooth_on_half(&mono(0, 1, 2)));
    assert!(!is_smooth_on_half(&HalfFunc::sqrt_s(0)));
    let f = mono(0, 1, 3);
    assert!(!is_smooth_on_half(&f));
    // Second difference in s grows like s^(-1/2) towards the boundary.
    let second = |s: f64| {
        let h = s / 10.0;
        let e = |t: f64| f.eval(&[], 0.0, t).unwrap().re;
        (e(s + h) - 2.0 * e(s) + e(s - h)) / (h * h)
    };
    let ratio = second(1e-6) / second(1e-4);
    assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");

    assert!(is_invariant(&HalfFunc::s(0)));
    assert!(!is_invariant(&HalfFunc::exp_i_theta(0, 1)));
    let s_cos = &HalfFunc::s(0) * &HalfFunc::cos_theta(0, 1);
    assert!(!is_invariant(&s_cos));
    let a = s_cos.eval(&[], 0.0, 0.5).unwrap();
    let b = s_cos.eval(&[], std::f64::consts::FRAC_PI_2, 0.5).unwrap();
    assert!((a - b).norm() > 0.1);
}

#[test]
fn rescale_examples() {
    let z = mono(0, 1, 1);
    let r = rescale_boundary_function(&z, &q(4)).unwrap();
    assert_eq!(r, z.scale(&CRat::from_int(2)));
    assert_eq!(descend_function(&r).image, Some(DiscFunc::z(0).scale(&CRat::from_int(2))));
    assert_eq!(rescale_boundary_function(&HalfFunc::s(0), &q(1)).unwrap(), HalfFunc::s(0));
    let s_cos = &HalfFunc::s(0) * &HalfFunc::cos_theta(0, 1);
    let r = rescale_boundary_function(&s_cos, &q(9)).unwrap();
    assert_eq!(r, s_cos.scale(&CRat::from_int(9)));
    assert_eq!(descend_function(&r).offending_modes, descend_function(&s_cos).offending_modes);
    assert_eq!(rescale_boundary_function(&z, &q(0)).unwrap_err().kind(), "NonPositiveScale");
}

#[test]
fn wedge_and_d_examples() {
    let (dx1, dx2) = (HalfForm::basis(2, 0), HalfForm::basis(2, 1));
    assert_eq!(dx1.wedge(&dx2).unwrap(), hf(&["dx1", "dx2"], HalfFunc::one(2)));
    let ds = hf(&["ds"], HalfFunc::one(0));
    assert!(ds.wedge(&ds).unwrap().is_zero());
    let beta = hf(&["dx1"], HalfFunc::one(1)).add(&hf(&["dtheta"], HalfFunc::s(1))).unwrap();
    let w = hf(&["ds", "dtheta"], HalfFunc::one(1));
    assert_eq!(beta.wedge(&w).unwrap(), hf(&["dx1", "ds", "dtheta"], HalfFunc::one(1)));

    assert_eq!(hf(&["dtheta"], HalfFunc::s(0)).ext_d().unwrap(), hf(&["ds", "dtheta"], HalfFunc::one(0)));
    let udv = df(&["dv"], DiscFunc::u(0)).sub(&df(&["du"], DiscFunc::v(0))).unwrap();
    assert_eq!(udv.ext_d().unwrap(), df(&["du", "dv"], DiscFunc::from_int(0, 2)));
    assert!(HalfForm::basis(1, 0).ext_d().unwrap().is_zero());
}

#[test]
fn contract_and_lie_examples() {
    let w = hf(&["ds", "dtheta"], HalfFunc::one(0));
    assert_eq!(w.contract_named("theta").unwrap(), hf(&["ds"], HalfFunc::one(0)).neg());
    let b = hf(&["dtheta"], HalfFunc::s(0));
    assert_eq!(b.contract_named("theta").unwrap(), HalfForm::function(HalfFunc::s(0)));
    assert!(HalfForm::basis(1, 0).contract_named("theta").unwrap().is_zero());
    assert_eq!(HalfForm::function(HalfFunc::s(0)).contract_named("theta").unwrap_err().kind(), "DegreeZero");

    let t = b.theta_index();
    assert!(b.lie_derivative(t).unwrap().is_zero());
    let cos_dx = hf(&["dx1"], HalfFunc::cos_theta(1, 1));
    assert_eq!(cos_dx.lie_derivative(1).unwrap(), hf(&["dx1"], -&HalfFunc::sin_theta(1, 1)));
    assert!(hf(&["ds"], HalfFunc::one(0)).lie_derivative(t).unwrap().is_zero());
}

#[test]
fn basic_invariant_and_boundary_examples() {
    assert!(hf(&["dtheta"], HalfFunc::s(0)).is_basic_invariant().0);
    let (ok, witness) = hf(&["dtheta"], HalfFunc::one(0)).is_basic_invariant();
    assert!(!ok && !witness.is_empty());
    assert!(!hf(&["dx1"], HalfFunc::cos_theta(1, 1)).is_basic_invariant().0);

    let beta = hf(&["dx1", "ds"], HalfFunc::one(2)).add(&hf(&["dtheta", "dx2"], HalfFunc::s(2))).unwrap();
    assert!(beta.boundary_pullback().form().is_zero());
    let b = HalfFunc::x(1, 0).pow(2) + HalfFunc::from_int(1, 3);
    assert_eq!(hf(&["dx1"], b.clone()).boundary_pullback().into_form(), hf(&["dx1"], b));
    assert!(hf(&["dx1"], HalfFunc::s(1).pow(2)).boundary_pullback().form().is_zero());
}

#[test]
fn eval_at_examples() {
    let w = hf(&["ds", "dtheta"], HalfFunc::one(0)).eval_at(&[0.3, 0.2]).unwrap();
    let m = w.matrix();
    assert_eq!((m[(1, 0)], m[(0, 1)]), (1.0, -1.0));
    let c = df(&["du", "dv"], DiscFunc::from_int(0, 2)).eval_at(&[0.0, 0.0]).unwrap();
    assert_eq!(c.matrix()[(0, 1)], 2.0);
    let b = hf(&["dtheta"], HalfFunc::s(0)).eval_at(&[1.0, 0.25]).unwrap();
    assert_eq!(b.covector(), vec![0.25, 0.0]);
}

#[test]
fn cut_form_examples() {
    assert_eq!(cut_form(&hf(&["ds", "dtheta"], HalfFunc::one(0))).unwrap().to_string(), "2 du^dv");
    assert_eq!(cut_form(&hf(&["dtheta"], HalfFunc::s(0))).unwrap().to_string(), "-v du + u dv");
    let c = cut_form(&hf(&["dx1", "ds"], HalfFunc::one(1))).unwrap();
    let two_u = DiscFunc::u(1).scale(&CRat::from_int(2));
    let two_v = DiscFunc::v(1).scale(&CRat::from_int(2));
    let expected = df(&["dx1", "du"], two_u).add(&df(&["dx1", "dv"], two_v)).unwrap();
    assert_eq!(c, expected);
    let err = cut_form(&hf(&["dtheta"], HalfFunc::one(0))).unwrap_err();
    assert_eq!(err.kind(), "NotBasicInvariant");
}

#[test]
fn reduced_form_examples() {
    let beta = hf(&["dx1", "dx2"], HalfFunc::one(2)).add(&hf(&["ds", "dtheta"], HalfFunc::one(2))).unwrap();
    assert_eq!(reduced_form(&beta).unwrap(), df(&["dx1", "dx2"], DiscFunc::one(2)));
    assert!(reduced_form(&hf(&["dtheta"], HalfFunc::s(0))).unwrap().is_zero());
    let b = HalfFunc::x(1, 0) + HalfFunc::from_int(1, 2);
    let red = reduced_form(&hf(&["dx1"], b.clone())).unwrap();
    assert_eq!(red, df(&["dx1"], descend_function(&b).image.unwrap()));
}

fn disc_points(d: usize) -> Vec<Vec<f64>> {
    SamplePlan::new(Model::Disc, d, 11).points()
}

#[test]
fn cut_map_examples() {
    let id = cut_map(&LocalMap::identity(2)).unwrap();
    for p in disc_points(2) {
        assert_eq!(id.eval(&p).unwrap(), p);
    }
    let rot = LocalMap::new(1, vec![Expr::var("x1")], Expr::zero(), Expr::one()).unwrap();
    let c = cut_map(&rot).unwrap();
    for p in disc_points(1) {
        assert_eq!(c.eval(&p).unwrap(), vec![p[0], -p[2], p[1]]);
    }
    let shift = LocalMap::new(1, vec![Expr::var("x1") + Expr::var("s")], Expr::one(), Expr::zero()).unwrap();
    let c = cut_map(&shift).unwrap();
    for p in disc_points(1) {
        let expected = vec![p[0] + p[1] * p[1] + p[2] * p[2], p[1], p[2]];
        assert!(max_abs_diff(&c.eval(&p).unwrap(), &expected) < 1e-15);
    }
    let twice = compose_maps(&rot, &rot).unwrap();
    let env = cutkit_core::expr::Env::new().with("x1", 0.2).with("s", 0.1);
    assert_eq!(twice.b_re.eval(&env).unwrap(), -1.0);
    assert_eq!(twice.b_im.eval(&env).unwrap(), 0.0);
}

#[test]
fn momentum_examples() {
    let w = hf(&["ds", "dtheta"], HalfFunc::one(0));
    assert!(momentum_check(&w, &HalfFunc::s(0)).unwrap());
    assert!(!momentum_check(&w, &HalfFunc::s(0).pow(2)).unwrap());
    assert!(momentum_check(&hf(&["dx1", "dx2"], HalfFunc::one(2)), &HalfFunc::zero(2)).unwrap());

    let beta = hf(&["dx1"], HalfFunc::one(1)).add(&hf(&["dtheta"], HalfFunc::s(1))).unwrap();
    assert_eq!(contact_momentum(&beta).unwrap(), HalfFunc::s(1));
    assert!(contact_momentum(&HalfForm::basis(1, 0)).unwrap().is_zero());
    assert_eq!(contact_momentum(&hf(&["dtheta"], HalfFunc::one(0))).unwrap(), HalfFunc::one(0));
}

#[test]
fn certification_examples() {
    let half0 = SamplePlan::new(Model::Half, 0, 1).points();
    let disc0 = SamplePlan::new(Model::Disc, 0, 1).points();
    assert!(is_symplectic(&hf(&["ds", "dtheta"], HalfFunc::one(0)), &half0).unwrap().holds);
    assert!(is_symplectic(&df(&["du", "dv"], DiscFunc::from_int(0, 2)), &disc0).unwrap().holds);
    assert!(!is_symplectic(&hf(&["ds", "dtheta"], HalfFunc::s(0)), &half0).unwrap().holds);

    let half1 = SamplePlan::new(Model::Half, 1, 1).points();
    let disc1 = SamplePlan::new(Model::Disc, 1, 1).points();
    let beta = hf(&["dx1"], HalfFunc::one(1)).add(&hf(&["dtheta"], HalfFunc::s(1))).unwrap();
    assert_eq!(beta.wedge(&beta.ext_d().unwrap()).unwrap(), hf(&["dx1", "ds", "dtheta"], HalfFunc::one(1)));
    assert!(is_contact(&beta, &half1).unwrap().holds);
    let cut = cut_form(&beta).unwrap();
    assert_eq!(cut.wedge(&cut.ext_d().unwrap()).unwrap(), df(&["dx1", "du", "dv"], DiscFunc::from_int(1, 2)));
    assert!(is_contact(&cut, &disc1).unwrap().holds);
    assert!(!is_contact(&HalfForm::basis(1, 0), &half1).unwrap().holds);
}

#[test]
fn distribution_examples() {
    let half2 = SamplePlan::new(Model::Half, 2, 4).points();
    let disc2 = SamplePlan::new(Model::Disc, 2, 4).points();
    let r = cut_distribution(&DistributionFrame { forms: vec![HalfForm::basis(2, 0)] }, &half2, &disc2).unwrap();
    assert_eq!(r.cut_frame, vec![DiscForm::basis(2, 0)]);
    assert!(r.involutive_before && r.involutive_after);

    let half1 = SamplePlan::new(Model::Half, 1, 4).points();
    let disc1 = SamplePlan::new(Model::Disc, 1, 4).points();
    let beta = hf(&["dx1"], HalfFunc::one(1)).add(&hf(&["dtheta"], HalfFunc::s(1))).unwrap();
    let r = cut_distribution(&DistributionFrame { forms: vec![beta] }, &half1, &disc1).unwrap();
    assert_eq!((r.contact_before, r.contact_after), (Some(true), Some(true)));

    let ds = hf(&["ds"], HalfFunc::one(0));
    let interior: Vec<Vec<f64>> = SamplePlan::new(Model::Half, 0, 4).with_counts(12, 0, 0).points();
    let r = cut_distribution(&DistributionFrame { forms: vec![ds] }, &interior, &[]).unwrap();
    let expected = df(&["du"], DiscFunc::u(0).scale(&CRat::from_int(2)))
        .add(&df(&["dv"], DiscFunc::v(0).scale(&CRat::from_int(2))))
        .unwrap();
    assert_eq!(r.cut_frame, vec![expected]);
    assert!(r.involutive_before && r.involutive_after);
}

#[test]
fn blowup_pullback_examples() {
    assert_eq!(
        blowup_pullback(&df(&["du", "dv"], DiscFunc::from_int(0, 2))).unwrap(),
        hf(&["ds", "dtheta"], HalfFunc::one(0))
    );
    let udv = df(&["dv"], DiscFunc::u(0)).sub(&df(&["du"], DiscFunc::v(0))).unwrap();
    assert_eq!(blowup_pullback(&udv).unwrap(), hf(&["dtheta"], HalfFunc::s(0)));
    assert_eq!(blowup_pullback(&DiscForm::basis(1, 0)).unwrap(), HalfForm::basis(1, 0));
    assert!(roundtrip_check(&hf(&["ds", "dtheta"], HalfFunc::one(0))).unwrap());
    assert!(roundtrip_check(&hf(&["dtheta"], HalfFunc::s(0))).unwrap());
    assert_eq!(disc_roundtrip_check(&DiscForm::function(DiscFunc::z(0))).unwrap(), Some(true));
}

fn cartesian(phi1: Vec<Expr>, a: Vec<Vec<Expr>>) -> BlowupLiftInput {
    BlowupLiftInput::Cartesian { t_dim: 1, fiber_dim: 2, phi1, a }
}

#[test]
fn radial_lift_examples() {
    let pts = lift_samples(1, 2, 21, 50, 0.5);
    let t = || vec![Expr::var("t1")];
    let c = |n: i64| Expr::c(n);
    let id = lift_map_radial(&cartesian(t(), vec![vec![c(1), c(0)], vec![c(0), c(1)]]), &pts).unwrap();
    let two = lift_map_radial(&cartesian(t(), vec![vec![c(2), c(0)], vec![c(0), c(2)]]), &pts).unwrap();
    let (ca, sa) =
        (Expr::rational(cutkit_core::rational::q_frac(3, 5)), Expr::rational(cutkit_core::rational::q_frac(4, 5)));
    let rot_input = cartesian(t(), vec![vec![ca.clone(), sa.clone().negate()], vec![sa, ca]]);
    let rot = lift_map_radial(&rot_input, &pts).unwrap();
    for p in &pts {
        assert!(max_abs_diff(&id.map.eval(p).unwrap(), p) < 1e-15);
        let out = two.map.eval(p).unwrap();
        assert!(max_abs_diff(&out, &[p[0], p[1], p[2], 2.0 * p[3]]) < 1e-15);
        let out = rot.map.eval(p).unwrap();
        let ru = [0.6 * p[1] - 0.8 * p[2], 0.8 * p[1] + 0.6 * p[2]];
        assert!(max_abs_diff(&out, &[p[0], ru[0], ru[1], p[3]]) < 1e-15);
    }
}

#[test]
fn radial_squared_lift_examples() {
    let pts = lift_samples(1, 2, 22, 50, 0.25);
    let inv = |phi1: Expr, c: i64| BlowupLiftInput::Invariant {
        t_dim: 1,
        fiber_dim: 2,
        phi1: vec![phi1],
        a: vec![vec![Expr::c(c), Expr::zero()], vec![Expr::zero(), Expr::c(c)]],
    };
    let scaled = lift_map_radial_squared(&inv(Expr::var("t1"), 3), &pts, 0).unwrap();
    let shifted = lift_map_radial_squared(&inv(Expr::var("t1") + Expr::var("s"), 1), &pts, 0).unwrap();
    for p in &pts {
        assert!(max_abs_diff(&scaled.map.eval(p).unwrap(), &[p[0], p[1], p[2], 9.0 * p[3]]) < 1e-15);
        assert!(max_abs_diff(&shifted.map.eval(p).unwrap(), &[p[0] + p[3], p[1], p[2], p[3]]) < 1e-15);
    }

    let shear = cartesian(
        vec![Expr::var("t1") + Expr::var("x1") - Expr::var("x2")],
        vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]],
    );
    assert_eq!(lift_map_radial_squared(&shear, &pts, 5).unwrap_err().kind(), "NonInvariantInput");
    let radial = lift_map_radial(&shear, &pts).unwrap();
    assert!(lift_square_residual(&radial, &shear, &pts).unwrap() < 1e-10);
    let naive = naive_radial_squared_lift(&shear).unwrap();
    assert!(!probe_lift_at_boundary(&naive, &[0.0, 1.0, 0.0, 0.0]).unwrap().smooth);
}

#[test]
fn polar_examples() {
    let samples = polar_samples(8, 50, 0.5);
    let pair = |a_re: Expr, a_im: Expr, g: i64| PolarDiffeoPair { a_re, a_im, g: Expr::c(g) };
    let two = pair(Expr::one(), Expr::zero(), 4);
    let r = polar_correspondence(&two, &samples).unwrap();
    assert_eq!(r.commuting_residual, 0.0);
    assert_eq!(two.phi_map().eval(&[0.25, 0.5]).unwrap(), vec![0.5, 1.0]);
    let id = pair(Expr::one(), Expr::zero(), 1);
    assert_eq!(polar_correspondence(&id, &samples).unwrap().commuting_residual, 0.0);
    assert_eq!(id.phi_map().eval(&[0.25, 0.5]).unwrap(), vec![0.25, 0.5]);
    let twist = pair(Expr::var("s").cos(), Expr::var("s").sin(), 1);
    let r = polar_correspondence(&twist, &samples).unwrap();
    assert!(r.commuting_residual < 1e-10 && r.phi_probe.smooth);
    assert_eq!(r.samples, 50);
    let ordinary = ordinary_polar_probe(&Expr::var("r").cos(), &Expr::var("r").sin()).unwrap();
    assert!(!ordinary.smooth);
}

#[test]
fn jacobian_examples() {
    let id = ExprMap::identity(&["a", "b", "c"]);
    assert_eq!(jacobian_at(&id, &[0.1, 0.2, 0.3]).unwrap(), DMatrix::identity(3, 3));

    let rot = cut_map(&LocalMap::new(1, vec![Expr::var("x1")], Expr::zero(), Expr::one()).unwrap()).unwrap();
    let j = jacobian_at(&rot.map, &[0.0, 1.0, 0.0]).unwrap();
    let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
    assert_eq!(j, expected);

    let stretch = ExprMap::new(
        vec!["t1".into(), "u1".into(), "u2".into(), "s".into()],
        vec![Expr::var("t1"), Expr::var("u1"), Expr::var("u2"), Expr::c(2) * Expr::var("s")],
    );
    let j = jacobian_at(&stretch, &[0.3, 0.6, 0.8, 0.1]).unwrap();
    assert_eq!(j, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, 2.0])));
}

#[test]
fn rank_examples() {
    let id = ExprMap::identity(&["a", "b"]);
    assert_eq!(rank_at(&id, &[0.1, 0.2], 1e-8).unwrap(), 2);
    let constant = ExprMap::new(vec!["a".into(), "b".into()], vec![Expr::c(3), Expr::one()]);
    assert_eq!(rank_at(&constant, &[0.1, 0.2], 1e-8).unwrap(), 0);
    let proj =
        ExprMap::new(vec!["x1".into(), "x2".into(), "s".into()], vec![Expr::var("x1"), Expr::var("x2"), Expr::zero()]);
    assert_eq!(rank_at(&proj, &[0.1, 0.2, 0.3], 1e-8).unwrap(), 2);
}

#[test]
fn run_property_examples() {
    for id in ["d_commutes_cut", "dd_zero", "roundtrip"] {
        let r = run_property(id, 42, id, 100).unwrap();
        assert!(r.passed(), "{id}: {:?}", r.witnesses);
        assert_eq!(r.trials, 100);
    }
}
