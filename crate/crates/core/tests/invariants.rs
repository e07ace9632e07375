//! Randomized invariants driven by proptest seeds.

use cutkit_core::blowup::blowup_pullback;
use cutkit_core::cutting::*;
use cutkit_core::forms::{DiscForm, HalfForm, Model};
use cutkit_core::funcalg::*;
use cutkit_core::rational::{q, CRat};
use cutkit_core::verify::gen::{self, Rng8};
use cutkit_core::verify::{run_property, SamplePlan};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn rng(seed: u64) -> Rng8 {
    Rng8::seed_from_u64(seed)
}

fn cuttable(seed: u64) -> HalfForm {
    let mut r = rng(seed);
    let d = gen::base_dim(&mut r);
    let p = gen::degree_for(&mut r, d);
    gen::cuttable_form(&mut r, d, p)
}

fn general(seed: u64) -> HalfForm {
    let mut r = rng(seed);
    let d = gen::base_dim(&mut r);
    let p = gen::degree_for(&mut r, d);
    gen::general_form(&mut r, d, p)
}

fn disc(seed: u64) -> DiscForm {
    let mut r = rng(seed);
    let d = gen::base_dim(&mut r);
    let p = gen::degree_for(&mut r, d);
    gen::disc_form(&mut r, d, p)
}

fn pair<F>(seed: u64, make: F) -> (HalfForm, HalfForm)
where
    F: Fn(&mut Rng8, usize, usize) -> HalfForm,
{
    let mut r = rng(seed);
    let d = gen::base_dim(&mut r);
    let p = r.gen_range(0..=2);
    let q = r.gen_range(0..=(d + 2 - p).min(2));
    (make(&mut r, d, p), make(&mut r, d, q))
}

/// `g(x, sqrt(lambda) z)` for `lambda = mu^2`, computed term by term.
fn scale_disc(g: &DiscFunc, mu: &CRat) -> DiscFunc {
    let mut out = DiscFunc::zero(g.dim());
    for (m, c) in g.terms() {
        let mut factor = CRat::one();
        for _ in 0..m.p + m.q {
            factor = &factor * mu;
        }
        out = &out + &DiscFunc::monomial(g.dim(), m.alpha.clone(), m.p, m.q, c * &factor);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descend_after_lift_is_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = gen::base_dim(&mut r);
        let g = gen::disc_fn(&mut r, d, 4);
        let v = descend_function(&lift_function(&g));
        prop_assert!(v.descends);
        prop_assert_eq!(v.image, Some(g));
    }

    #[test]
    fn descent_is_a_ring_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = gen::base_dim(&mut r);
        let f = gen::descending_fn(&mut r, d, 3);
        let g = gen::descending_fn(&mut r, d, 3);
        let down = |h: &HalfFunc| descend_function(h).image.unwrap();
        prop_assert_eq!(down(&(&f * &g)), &down(&f) * &down(&g));
        prop_assert_eq!(down(&(&f + &g)), &down(&f) + &down(&g));
    }

    #[test]
    fn rescaling_keeps_verdict_and_modes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = gen::base_dim(&mut r);
        let f = gen::general_fn(&mut r, d, 3);
        let lambda = gen::positive_q(&mut r);
        let before = descend_function(&f);
        let after = descend_function(&rescale_boundary_function(&f, &lambda).unwrap());
        prop_assert_eq!(before.descends, after.descends);
        let modes = |v: &DescentVerdict| {
            let mut m: Vec<(i64, u32)> = v.offending_modes.iter().map(|m| (m.k, m.m)).collect();
            m.sort();
            m.dedup();
            m
        };
        prop_assert_eq!(modes(&before), modes(&after));
    }

    #[test]
    fn rescaled_image_scales(seed in any::<u64>(), mu in 1i64..5) {
        let mut r = rng(seed);
        let d = gen::base_dim(&mut r);
        let f = gen::descending_fn(&mut r, d, 3);
        let image = descend_function(&f).image.unwrap();
        let rescaled = rescale_boundary_function(&f, &q(mu * mu)).unwrap();
        prop_assert_eq!(descend_function(&rescaled).image.unwrap(), scale_disc(&image, &CRat::from_int(mu)));
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let beta = general(seed);
        if beta.degree() + 2 <= beta.dim() + 2 {
            prop_assert!(beta.ext_d().unwrap().ext_d().unwrap().is_zero());
        }
        let gamma = disc(seed);
        prop_assert!(gamma.ext_d().unwrap().ext_d().unwrap().is_zero());
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>()) {
        let (a, b) = pair(seed, gen::general_form);
        let lhs = a.wedge(&b).unwrap().ext_d().unwrap();
        let mut second = a.wedge(&b.ext_d().unwrap()).unwrap();
        if a.degree() % 2 == 1 {
            second = second.neg();
        }
        prop_assert_eq!(lhs, a.ext_d().unwrap().wedge(&b).unwrap().add(&second).unwrap());
    }

    #[test]
    fn lie_derivative_vanishes_iff_invariant(seed in any::<u64>()) {
        let beta = general(seed);
        let lie = beta.lie_derivative(beta.theta_index()).unwrap();
        let invariant = beta.terms().all(|(_, c)| is_invariant(c));
        prop_assert_eq!(lie.is_zero(), invariant);
    }

    #[test]
    fn cut_commutes_with_d(seed in any::<u64>()) {
        let beta = cuttable(seed);
        prop_assume!(beta.degree() < beta.dim() + 2);
        prop_assert_eq!(cut_form(&beta.ext_d().unwrap()).unwrap(), cut_form(&beta).unwrap().ext_d().unwrap());
    }

    #[test]
    fn cut_commutes_with_wedge(seed in any::<u64>()) {
        let (a, b) = pair(seed, gen::cuttable_form);
        let lhs = cut_form(&a.wedge(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, cut_form(&a).unwrap().wedge(&cut_form(&b).unwrap()).unwrap());
    }

    #[test]
    fn closed_iff_cut_closed(seed in any::<u64>()) {
        let beta = cuttable(seed);
        prop_assume!(beta.degree() < beta.dim() + 2);
        let exact = beta.ext_d().unwrap();
        for form in [beta, exact] {
            prop_assert_eq!(form.ext_d().unwrap().is_zero(), cut_form(&form).unwrap().ext_d().unwrap().is_zero());
        }
    }

    #[test]
    fn pullback_inverts_cut(seed in any::<u64>()) {
        let beta = cuttable(seed);
        prop_assert_eq!(blowup_pullback(&cut_form(&beta).unwrap()).unwrap(), beta);
    }

    #[test]
    fn cut_inverts_pullback_where_defined(seed in any::<u64>()) {
        let gamma = disc(seed);
        if let Ok(beta) = blowup_pullback(&gamma) {
            prop_assert_eq!(cut_form_general(&beta).unwrap(), gamma);
        }
    }

    #[test]
    fn both_cut_routes_agree(seed in any::<u64>()) {
        let beta = cuttable(seed);
        prop_assert_eq!(cut_form(&beta).unwrap(), cut_form_general(&beta).unwrap());
    }

    #[test]
    fn reduction_is_restriction(seed in any::<u64>()) {
        let beta = cuttable(seed);
        prop_assert_eq!(reduced_form(&beta).unwrap(), restrict_to_reduced(&cut_form(&beta).unwrap()));
    }

    #[test]
    fn symplectic_forms_reduce_to_symplectic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = 2;
        let c = gen::small_coeff(&mut r).re;
        let g = gen::invariant_fn(&mut r, d, 2).scale(&CRat::real(cutkit_core::rational::q_frac(1, 20)));
        let primitive = HalfForm::named(d, &["dtheta"], &HalfFunc::s(d) * &g).unwrap();
        let omega = HalfForm::named(d, &["dx1", "dx2"], HalfFunc::constant(d, CRat::real(c)))
            .unwrap()
            .add(&HalfForm::named(d, &["ds", "dtheta"], HalfFunc::one(d)).unwrap())
            .unwrap()
            .add(&primitive.ext_d().unwrap())
            .unwrap();
        let samples = SamplePlan::new(Model::Half, d, seed).points();
        let x_samples: Vec<Vec<f64>> = samples.iter().map(|p| p[..d].to_vec()).collect();
        if is_symplectic(&omega, &samples).unwrap().holds {
            let red = reduced_form(&omega).unwrap();
            prop_assert!(is_symplectic_reduced(&red, &x_samples).unwrap().holds);
            prop_assert!(is_symplectic(&cut_form(&omega).unwrap(), &SamplePlan::new(Model::Disc, d, seed).points()).unwrap().holds);
        }
    }

    #[test]
    fn contact_forms_reduce_to_contact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = 1;
        let h = gen::invariant_fn(&mut r, d, 2).scale(&CRat::real(cutkit_core::rational::q_frac(1, 20)));
        let beta = HalfForm::named(d, &["dx1"], &HalfFunc::one(d) + &(&HalfFunc::s(d) * &h))
            .unwrap()
            .add(&HalfForm::named(d, &["dtheta"], HalfFunc::s(d)).unwrap())
            .unwrap();
        let samples = SamplePlan::new(Model::Half, d, seed).points();
        let x_samples: Vec<Vec<f64>> = samples.iter().map(|p| p[..d].to_vec()).collect();
        if is_contact(&beta, &samples).unwrap().holds {
            prop_assert!(is_contact_reduced(&reduced_form(&beta).unwrap(), &x_samples).unwrap().holds);
            prop_assert!(is_contact(&cut_form(&beta).unwrap(), &SamplePlan::new(Model::Disc, d, seed).points()).unwrap().holds);
        }
    }

    #[test]
    fn json_roundtrips(seed in any::<u64>()) {
        let beta = general(seed);
        let back: HalfForm = serde_json::from_str(&serde_json::to_string(&beta).unwrap()).unwrap();
        prop_assert_eq!(back, beta);
        let gamma = disc(seed);
        let back: DiscForm = serde_json::from_str(&serde_json::to_string(&gamma).unwrap()).unwrap();
        prop_assert_eq!(back, gamma);
        let mut r = rng(seed);
        let f = rescale_boundary_function(&gen::general_fn(&mut r, 1, 3), &q(3)).unwrap();
        let back: HalfFunc = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn property_runs_are_deterministic(seed in any::<u64>(), which in 0usize..20) {
        let id = cutkit_core::verify::property_ids()[which];
        let a = serde_json::to_string(&run_property(id, seed, id, 5).unwrap()).unwrap();
        let b = serde_json::to_string(&run_property(id, seed, id, 5).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn contact_momentum_vanishes_on_boundary() {
    let beta = HalfForm::named(1, &["dx1"], HalfFunc::one(1))
        .unwrap()
        .add(&HalfForm::named(1, &["dtheta"], HalfFunc::s(1)).unwrap())
        .unwrap();
    let mu = contact_momentum(&beta).unwrap();
    assert_eq!(mu, HalfFunc::s(1));
    assert!(mu.vanishes_on_boundary() && mu.at_boundary().is_zero());
}
