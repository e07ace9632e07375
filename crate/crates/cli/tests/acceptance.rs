//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::TAU;
use std::process::Command;

use cutkit::{corpus, run_scenario};
use cutkit_core::cutting::*;
use cutkit_core::forms::{DiscForm, HalfForm, Model};
use cutkit_core::funcalg::*;
use cutkit_core::rational::CRat;
use cutkit_core::verify::{run_property, SamplePlan};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hf(d: usize, names: &[&str], c: HalfFunc) -> HalfForm {
    HalfForm::named(d, names, c).unwrap()
}

fn df(d: usize, names: &[&str], c: DiscFunc) -> DiscForm {
    DiscForm::named(d, names, c).unwrap()
}

fn property(id: &str, trials: usize, min_trials: usize) -> Check {
    let r = run_property(id, SEED, id, trials).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{id}: {:?}", r.witnesses))?;
    ensure(r.trials >= min_trials, || format!("{id}: only {} trials", r.trials))
}

fn scenario(name: &str) -> Check {
    let s = corpus::get(name).ok_or_else(|| format!("no scenario {name}"))?;
    let r = run_scenario(&s, None, None);
    let failed: Vec<_> = r.jobs.iter().filter(|j| j.status != cutkit::Status::Pass).map(|j| j.name.clone()).collect();
    ensure(r.passed(), || format!("{name}: {failed:?}"))
}

fn substitution_identities() -> Check {
    let cut = |b: HalfForm| cut_form(&b).map_err(|e| e.to_string());
    let a = cut(hf(0, &["ds", "dtheta"], HalfFunc::one(0)))?;
    ensure(a.to_string() == "2 du^dv", || format!("ds^dtheta -> {a}"))?;
    ensure(a == df(0, &["du", "dv"], DiscFunc::from_int(0, 2)), || "ds^dtheta structure".into())?;
    let b = cut(hf(0, &["dtheta"], HalfFunc::s(0)))?;
    ensure(b.to_string() == "-v du + u dv", || format!("s dtheta -> {b}"))?;
    let udv = df(0, &["dv"], DiscFunc::u(0)).sub(&df(0, &["du"], DiscFunc::v(0))).unwrap();
    ensure(b == udv, || "s dtheta structure".into())?;
    let c = cut(hf(1, &["dx1", "ds"], HalfFunc::one(1)))?;
    let two = CRat::from_int(2);
    let expected = df(1, &["dx1", "du"], DiscFunc::u(1).scale(&two))
        .add(&df(1, &["dx1", "dv"], DiscFunc::v(1).scale(&two)))
        .unwrap();
    ensure(c == expected, || format!("dx1^ds -> {c}"))?;
    ensure(c.to_string() == "2*u dx1^du + 2*v dx1^dv", || format!("dx1^ds text {c}"))
}

fn naturality() -> Check {
    property("d_commutes_cut", 100, 100)?;
    property("wedge_commutes_cut", 100, 100)
}

fn roundtrips() -> Check {
    property("roundtrip", 100, 100)?;
    property("disc_roundtrip", 100, 100)?;
    scenario("roundtrip_forms")
}

/// Relative least-squares residual of `r^m e^(ik angle)` against polynomials
/// in `(u, v)` of total degree at most `m`, on random disc points.
fn fit_residual(m: u32, k: i64, points: &[(f64, f64)]) -> f64 {
    let basis: Vec<(i32, i32)> = (0..=m as i32).flat_map(|d| (0..=d).map(move |a| (a, d - a))).collect();
    let a = DMatrix::from_fn(points.len(), basis.len(), |i, j| {
        let (u, v) = points[i];
        u.powi(basis[j].0) * v.powi(basis[j].1)
    });
    let svd = a.clone().svd(true, true);
    let (mut num, mut den) = (0.0, 0.0);
    for part in 0..2 {
        let y = DVector::from_fn(points.len(), |i, _| {
            let (u, v) = points[i];
            let w = Complex64::from_polar((u * u + v * v).sqrt().powi(m as i32), k as f64 * v.atan2(u));
            if part == 0 {
                w.re
            } else {
                w.im
            }
        });
        let coef = svd.solve(&y, 1e-12).unwrap();
        num += (&a * coef - &y).norm_squared();
        den += y.norm_squared();
    }
    (num / den).sqrt()
}

fn descent_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let points: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let r = rng.gen_range(0.05f64..1.0).sqrt();
            let a = rng.gen_range(0.0..TAU);
            (r * a.cos(), r * a.sin())
        })
        .collect();
    let mut agree = 0;
    let mut cases = 0;
    for m in 0..=8u32 {
        for k in -8..=8i64 {
            cases += 1;
            if mono_descends(m, k) == (fit_residual(m, k, &points) < 1e-8) {
                agree += 1;
            }
        }
    }
    ensure(cases == 153 && agree == 153, || format!("{agree}/{cases} agree"))
}

fn counterexample() -> Check {
    let base = &HalfFunc::sqrt_s(0) * &HalfFunc::cos_theta(0, 1);
    let (nonconstant, constant) = corpus::action_family();
    ensure(nonconstant.len() == 10, || format!("family has {} members", nonconstant.len()))?;
    for (name, g) in &nonconstant {
        ensure(!descend_function(&(g * &base)).descends, || format!("g = {name} descended"))?;
    }
    for (name, g) in &constant {
        let v = descend_function(&(g * &base));
        ensure(v.descends && v.image.is_some(), || format!("g = {name} did not descend"))?;
    }
    let w = descend_function(&(&HalfFunc::exp_i_theta(0, 1) * &base));
    ensure(w.offending_modes.iter().any(|m| m.k == 2 && m.m == 1), || "mode (k=2, m=1) missing".into())?;
    scenario("dependence_on_action")
}

fn certification() -> Check {
    let half = |d| SamplePlan::new(Model::Half, d, SEED).points();
    let disc = |d| SamplePlan::new(Model::Disc, d, SEED).points();
    let xs = |d| half(d).into_iter().map(|p: Vec<f64>| p[..d].to_vec()).collect::<Vec<_>>();
    let e = |e: cutkit_core::CutError| e.to_string();

    let omega = hf(2, &["dx1", "dx2"], HalfFunc::one(2)).add(&hf(2, &["ds", "dtheta"], HalfFunc::one(2))).unwrap();
    ensure(is_symplectic(&omega, &half(2)).map_err(e)?.holds, || "omega".into())?;
    ensure(is_symplectic(&cut_form(&omega).map_err(e)?, &disc(2)).map_err(e)?.holds, || "cut omega".into())?;
    let red = reduced_form(&omega).map_err(e)?;
    ensure(is_symplectic_reduced(&red, &xs(2)).map_err(e)?.holds, || "reduced omega".into())?;
    let cyl = hf(0, &["ds", "dtheta"], HalfFunc::one(0));
    ensure(is_symplectic(&cyl, &half(0)).map_err(e)?.holds, || "cylinder".into())?;
    ensure(is_symplectic(&cut_form(&cyl).map_err(e)?, &disc(0)).map_err(e)?.holds, || "cut cylinder".into())?;
    let control = hf(0, &["ds", "dtheta"], HalfFunc::s(0));
    ensure(!is_symplectic(&control, &half(0)).map_err(e)?.holds, || "s ds^dtheta passed".into())?;

    let beta = hf(1, &["dx1"], HalfFunc::one(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
    ensure(is_contact(&beta, &half(1)).map_err(e)?.holds, || "beta".into())?;
    ensure(is_contact(&cut_form(&beta).map_err(e)?, &disc(1)).map_err(e)?.holds, || "cut beta".into())?;
    let red = reduced_form(&beta).map_err(e)?;
    ensure(is_contact_reduced(&red, &xs(1)).map_err(e)?.holds, || "reduced beta".into())?;
    ensure(!is_contact(&HalfForm::basis(1, 0), &half(1)).map_err(e)?.holds, || "dx1 passed".into())?;
    scenario("cylinder_symplectic")?;
    scenario("contact_model")
}

fn functoriality_and_ranks() -> Check {
    let r = run_property("functoriality", SEED, "functoriality", 25).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.trials == 25, || format!("functoriality: {:?}", r.witnesses))?;
    ensure(r.tolerances.get("commuting") == Some(&1e-10), || "commuting tolerance".into())?;
    let r = run_property("rank_preservation", SEED, "rank_preservation", 25).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.trials == 25, || format!("ranks: {:?}", r.witnesses))?;
    scenario("functoriality_maps")?;
    scenario("immersion_ranks")
}

fn lifts() -> Check {
    for id in ["lift_radial_square", "lift_radial_squared_square"] {
        let r = run_property(id, SEED, id, 10).map_err(|e| e.to_string())?;
        ensure(r.passed() && r.trials == 10, || format!("{id}: {:?}", r.witnesses))?;
        ensure(r.tolerances.get("commuting") == Some(&1e-10), || format!("{id} tolerance"))?;
    }
    scenario("radial_lift")?;
    scenario("radial_squared_lift")?;
    scenario("nonequivariant_shear_rejection")
}

fn momentum() -> Check {
    let omega = hf(0, &["ds", "dtheta"], HalfFunc::one(0));
    ensure(momentum_check(&omega, &HalfFunc::s(0)) == Ok(true), || "s".into())?;
    ensure(momentum_check(&omega, &HalfFunc::s(0).pow(2)) == Ok(false), || "s^2".into())?;
    let beta = hf(1, &["dx1"], HalfFunc::one(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
    let mu = contact_momentum(&beta).map_err(|e| e.to_string())?;
    ensure(mu == HalfFunc::s(1) && mu.vanishes_on_boundary(), || format!("contact momentum {mu}"))?;
    scenario("momentum_checks")
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cutkit"))
            .args(["suite", "--seed", "42"])
            .env_remove("CUTKIT_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || "suite failed".into())?;
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    ensure(report["seed"] == 42 && report["failed"] == 0, || "suite report content".into())?;
    ensure(a.stdout == b.stdout, || "reports differ".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact substitution identities", substitution_identities),
        ("naturality of d and wedge on 100 random forms", naturality),
        ("roundtrip suite", roundtrips),
        ("descent criterion vs polynomial-fit oracle, 153 monomials", descent_oracle),
        ("dependence of descent on the action, 10-case family", counterexample),
        ("symplectic and contact certification with controls", certification),
        ("functoriality on 25 map pairs and boundary ranks", functoriality_and_ranks),
        ("radial and radial-squared lift formulas, shear rejection", lifts),
        ("momentum conventions", momentum),
        ("deterministic suite report for seed 42", determinism),
    ];
    let mut failures = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS criterion {}: {label}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {label}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
