//! Registry of randomized property checks.
//!
//! Each trial draws from its own ChaCha8 stream, so a trial depends only on
//! `(seed, property id, trial index)`. Trials run in parallel chunks and the
//! earliest failing index wins, which keeps reports independent of thread
//! scheduling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    blowup_pullback, boundary_defining_check, disc_roundtrip_check, lift_map_radial, lift_map_radial_squared,
    lift_samples, lift_square_residual,
};
use crate::cutting::{
    boundary_ranks, collapse_point, commuting_square_residual, compose_maps, cut_form, cut_form_general, cut_map,
    reduced_form, restrict_to_reduced,
};
use crate::error::{CutError, Result};
use crate::expr::ExprMap;
use crate::forms::{HalfForm, Model};
use crate::funcalg::{descend_function, lift_function, rescale_boundary_function, HalfFunc};
use crate::tolerance;
use crate::verify::check::{CheckResult, Status, Witness};
use crate::verify::gen::{self, Rng8};
use crate::verify::numeric::{jacobian_fd, jacobian_symbolic};
use crate::verify::sample::SamplePlan;

type Verdict = Result<Option<Witness>>;
type TrialFn = fn(&mut Rng8) -> Verdict;

pub struct PropertyDef {
    pub id: &'static str,
    pub summary: &'static str,
    pub default_trials: usize,
    pub tolerances: &'static [(&'static str, f64)],
    run: TrialFn,
}

const EXACT: &[(&str, f64)] = &[("exact", 0.0)];

pub fn registry() -> &'static [PropertyDef] {
    &REGISTRY
}

pub fn property_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|p| p.id).collect()
}

pub fn lookup(id: &str) -> Result<&'static PropertyDef> {
    REGISTRY.iter().find(|p| p.id == id).ok_or_else(|| CutError::UnknownProperty(id.to_string()))
}

static REGISTRY: [PropertyDef; 20] = [
    PropertyDef { id: "dd_zero", summary: "d(d beta) = 0", default_trials: 100, tolerances: EXACT, run: dd_zero },
    PropertyDef {
        id: "leibniz",
        summary: "d(a ^ b) = da ^ b + (-1)^p a ^ db",
        default_trials: 100,
        tolerances: EXACT,
        run: leibniz,
    },
    PropertyDef {
        id: "d_commutes_cut",
        summary: "cut(d beta) = d(cut beta) on basic invariant forms",
        default_trials: 100,
        tolerances: EXACT,
        run: d_commutes_cut,
    },
    PropertyDef {
        id: "wedge_commutes_cut",
        summary: "cut(a ^ b) = cut a ^ cut b",
        default_trials: 100,
        tolerances: EXACT,
        run: wedge_commutes_cut,
    },
    PropertyDef {
        id: "closed_iff_cut_closed",
        summary: "beta closed iff cut beta closed",
        default_trials: 100,
        tolerances: EXACT,
        run: closed_iff_cut_closed,
    },
    PropertyDef {
        id: "roundtrip",
        summary: "blowup_pullback(cut beta) = beta",
        default_trials: 100,
        tolerances: EXACT,
        run: roundtrip,
    },
    PropertyDef {
        id: "disc_roundtrip",
        summary: "cut(blowup_pullback gamma) = gamma where defined",
        default_trials: 100,
        tolerances: EXACT,
        run: disc_roundtrip,
    },
    PropertyDef {
        id: "cut_routes_agree",
        summary: "substitution and Laurent routes give the same cut",
        default_trials: 100,
        tolerances: EXACT,
        run: cut_routes_agree,
    },
    PropertyDef {
        id: "reduction_compatible",
        summary: "reduced form = restriction of the cut to x-space",
        default_trials: 100,
        tolerances: EXACT,
        run: reduction_compatible,
    },
    PropertyDef {
        id: "descent_lift_roundtrip",
        summary: "descend(lift g) = g and lift(descend f) = f",
        default_trials: 100,
        tolerances: EXACT,
        run: descent_lift_roundtrip,
    },
    PropertyDef {
        id: "descent_ring_hom",
        summary: "descent respects sums and products",
        default_trials: 100,
        tolerances: EXACT,
        run: descent_ring_hom,
    },
    PropertyDef {
        id: "rescale_verdict_invariant",
        summary: "descent verdict unchanged under s -> lambda s",
        default_trials: 100,
        tolerances: EXACT,
        run: rescale_verdict_invariant,
    },
    PropertyDef {
        id: "cartan_invariance",
        summary: "Cartan formula for d/dtheta matches coefficientwise derivative; basic forms are invariant",
        default_trials: 100,
        tolerances: EXACT,
        run: cartan_invariance,
    },
    PropertyDef {
        id: "ext_d_finite_difference",
        summary: "exact d agrees with central differences",
        default_trials: 50,
        tolerances: &[("derivative", tolerance::DERIVATIVE), ("fd_step", tolerance::FD_STEP)],
        run: ext_d_finite_difference,
    },
    PropertyDef {
        id: "nonvanishing",
        summary: "boundary nonvanishing matches after cutting; top power of the cut is -2 times the top power",
        default_trials: 50,
        tolerances: &[("nondegenerate", tolerance::NONDEGENERATE)],
        run: nonvanishing,
    },
    PropertyDef {
        id: "functoriality",
        summary: "cut of composite = composite of cuts; commuting squares",
        default_trials: 25,
        tolerances: &[("commuting", tolerance::COMMUTING)],
        run: functoriality,
    },
    PropertyDef {
        id: "rank_preservation",
        summary: "rank of psi and psi_cut at the boundary equals base rank + 2",
        default_trials: 25,
        tolerances: &[("rank", tolerance::RANK)],
        run: rank_preservation,
    },
    PropertyDef {
        id: "lift_radial_square",
        summary: "radial lift commutes with blowdown; boundary defining",
        default_trials: 10,
        tolerances: &[("commuting", tolerance::COMMUTING), ("rank", tolerance::RANK)],
        run: lift_radial_square,
    },
    PropertyDef {
        id: "lift_radial_squared_square",
        summary: "radial-squared lift commutes with blowdown",
        default_trials: 10,
        tolerances: &[("commuting", tolerance::COMMUTING), ("invariance", tolerance::INVARIANCE)],
        run: lift_radial_squared_square,
    },
    PropertyDef {
        id: "jacobian_fallback_agreement",
        summary: "symbolic and finite-difference Jacobians agree",
        default_trials: 50,
        tolerances: &[("derivative", tolerance::DERIVATIVE), ("fd_step", tolerance::FD_STEP)],
        run: jacobian_fallback_agreement,
    },
];

fn stream_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id, mixed into the user seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

/// The generator used for trial `index` of property `id`.
pub fn trial_rng(seed: u64, id: &str, index: usize) -> Rng8 {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, id));
    rng.set_stream(index as u64);
    rng
}

const CHUNK: usize = 32;

/// Runs `trials` independent trials of a registered property. Stops after the
/// chunk containing the first failure; the reported witness is the one with
/// the lowest trial index.
pub fn run_property(name: &str, seed: u64, id: &str, trials: usize) -> Result<CheckResult> {
    let sampling = lookup(id)?;
    let mut status = Status::Pass;
    let mut witnesses = Vec::new();
    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        let outcomes: Vec<Verdict> =
            (start..end).into_par_iter().map(|i| (sampling.run)(&mut trial_rng(seed, id, i))).collect();
        if let Some((offset, outcome)) = outcomes.into_iter().enumerate().find(|(_, o)| !matches!(o, Ok(None))) {
            let index = start + offset;
            match outcome {
                Ok(Some(mut w)) => {
                    status = Status::Fail;
                    w.detail = format!("trial {index}: {}", w.detail);
                    witnesses.push(w);
                }
                Err(e) => {
                    status = Status::Error;
                    witnesses.push(Witness::detail(format!("trial {index}: {e}")));
                }
                Ok(None) => unreachable!(),
            }
            break;
        }
        start = end;
    }
    let tolerances: BTreeMap<String, f64> = sampling.tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    Ok(CheckResult { name: name.to_string(), status, witnesses, tolerances, seed, trials })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Every registered property with its default trial count, or `trials` when given.
pub fn run_suite(seed: u64, trials: Option<usize>) -> Result<SuiteReport> {
    let results = REGISTRY
        .iter()
        .map(|p| run_property(p.id, seed, p.id, trials.unwrap_or(p.default_trials)))
        .collect::<Result<Vec<_>>>()?;
    let passed = results.iter().filter(|r| r.passed()).count();
    Ok(SuiteReport { seed, passed, failed: results.len() - passed, results })
}

/// Greedy term-dropping shrink: removes whole terms while `fails` still holds.
pub fn shrink_form(form: &HalfForm, fails: impl Fn(&HalfForm) -> bool) -> HalfForm {
    let mut current = form.clone();
    loop {
        let smaller = current.keys().into_iter().map(|k| current.drop_term(&k)).find(|f| fails(f));
        match smaller {
            Some(f) => current = f,
            None => return current,
        }
    }
}

/// Single-form property: `check` returns a failure reason, if any.
fn form_property(beta: HalfForm, check: impl Fn(&HalfForm) -> Result<Option<String>>) -> Verdict {
    match check(&beta)? {
        None => Ok(None),
        Some(_) => {
            let small = shrink_form(&beta, |f| matches!(check(f), Ok(Some(_))));
            let reason = check(&small)?.unwrap_or_default();
            Ok(Some(Witness::detail(format!("beta = {small}: {reason}"))))
        }
    }
}

fn pair_property(a: HalfForm, b: HalfForm, check: impl Fn(&HalfForm, &HalfForm) -> Result<Option<String>>) -> Verdict {
    match check(&a, &b)? {
        None => Ok(None),
        Some(_) => {
            let a = shrink_form(&a, |f| matches!(check(f, &b), Ok(Some(_))));
            let b = shrink_form(&b, |f| matches!(check(&a, f), Ok(Some(_))));
            let reason = check(&a, &b)?.unwrap_or_default();
            Ok(Some(Witness::detail(format!("a = {a}, b = {b}: {reason}"))))
        }
    }
}

fn cuttable(rng: &mut Rng8) -> HalfForm {
    let d = gen::base_dim(rng);
    let p = gen::degree_for(rng, d);
    gen::cuttable_form(rng, d, p)
}

fn general(rng: &mut Rng8) -> HalfForm {
    let d = gen::base_dim(rng);
    let p = gen::degree_for(rng, d);
    gen::general_form(rng, d, p)
}

fn cuttable_pair(rng: &mut Rng8) -> (HalfForm, HalfForm) {
    let d = gen::base_dim(rng);
    let n = d + 2;
    let p = rng.gen_range(0..=2.min(n));
    let q = rng.gen_range(0..=(3 - p).min(n - p));
    (gen::cuttable_form(rng, d, p), gen::cuttable_form(rng, d, q))
}

fn mismatch(ok: bool, what: &str) -> Option<String> {
    (!ok).then(|| what.to_string())
}

fn dd_zero(rng: &mut Rng8) -> Verdict {
    form_property(general(rng), |b| {
        let dd = b.ext_d()?.ext_d()?;
        Ok((!dd.is_zero()).then(|| format!("d d beta = {dd}")))
    })
}

fn leibniz(rng: &mut Rng8) -> Verdict {
    let d = gen::base_dim(rng);
    let p = rng.gen_range(0..=2.min(d + 2));
    let q = rng.gen_range(0..=(d + 2 - p).min(2));
    let (a, b) = (gen::general_form(rng, d, p), gen::general_form(rng, d, q));
    pair_property(a, b, |a, b| {
        let lhs = a.wedge(b)?.ext_d()?;
        let second = a.wedge(&b.ext_d()?)?;
        let second = if a.degree() % 2 == 0 { second } else { second.neg() };
        let rhs = a.ext_d()?.wedge(b)?.add(&second)?;
        Ok(mismatch(lhs == rhs, "Leibniz rule fails"))
    })
}

fn d_commutes_cut(rng: &mut Rng8) -> Verdict {
    form_property(cuttable(rng), |b| {
        if b.degree() + 1 > b.dim() + 2 {
            return Ok(None);
        }
        Ok(mismatch(cut_form(&b.ext_d()?)? == cut_form(b)?.ext_d()?, "cut(d beta) != d cut(beta)"))
    })
}

fn wedge_commutes_cut(rng: &mut Rng8) -> Verdict {
    let (a, b) = cuttable_pair(rng);
    pair_property(a, b, |a, b| {
        Ok(mismatch(cut_form(&a.wedge(b)?)? == cut_form(a)?.wedge(&cut_form(b)?)?, "cut(a ^ b) != cut a ^ cut b"))
    })
}

fn closed_iff_cut_closed(rng: &mut Rng8) -> Verdict {
    let beta = cuttable(rng);
    let exact = if beta.degree() < beta.dim() + 2 { beta.ext_d()? } else { beta.clone() };
    for form in [beta, exact] {
        let verdict = form_property(form, |b| {
            let before = b.ext_d()?.is_zero();
            let after = cut_form(b)?.ext_d()?.is_zero();
            Ok((before != after).then(|| format!("closed before: {before}, after: {after}")))
        })?;
        if verdict.is_some() {
            return Ok(verdict);
        }
    }
    Ok(None)
}

fn roundtrip(rng: &mut Rng8) -> Verdict {
    form_property(cuttable(rng), |b| {
        Ok(mismatch(blowup_pullback(&cut_form(b)?)? == *b, "blowup_pullback(cut beta) != beta"))
    })
}

fn disc_roundtrip(rng: &mut Rng8) -> Verdict {
    let beta = cuttable(rng);
    let from_cut = cut_form(&beta)?;
    if disc_roundtrip_check(&from_cut)? != Some(true) {
        return Ok(Some(Witness::detail(format!("roundtrip fails on cut image {from_cut}"))));
    }
    let d = gen::base_dim(rng);
    let p = gen::degree_for(rng, d);
    let gamma = gen::disc_form(rng, d, p);
    Ok((disc_roundtrip_check(&gamma)? == Some(false))
        .then(|| Witness::detail(format!("cut(blowup_pullback gamma) != gamma for gamma = {gamma}"))))
}

fn cut_routes_agree(rng: &mut Rng8) -> Verdict {
    form_property(cuttable(rng), |b| Ok(mismatch(cut_form(b)? == cut_form_general(b)?, "routes disagree")))
}

fn reduction_compatible(rng: &mut Rng8) -> Verdict {
    form_property(cuttable(rng), |b| {
        Ok(mismatch(reduced_form(b)? == restrict_to_reduced(&cut_form(b)?), "reduced form != restricted cut"))
    })
}

fn descent_lift_roundtrip(rng: &mut Rng8) -> Verdict {
    let d = gen::base_dim(rng);
    let g = {
        let n = rng.gen_range(1..=4);
        gen::disc_fn(rng, d, n)
    };
    let verdict = descend_function(&lift_function(&g));
    if verdict.image.as_ref() != Some(&g) {
        return Ok(Some(Witness::detail(format!("descend(lift g) != g for g = {}", g.to_z_string()))));
    }
    let f = {
        let n = rng.gen_range(1..=4);
        gen::general_fn(rng, d, n)
    };
    let verdict = descend_function(&f);
    match verdict.image {
        Some(image) if lift_function(&image) != f => {
            Ok(Some(Witness::detail(format!("lift(descend f) != f for f = {f}"))))
        }
        None if verdict.offending_modes.is_empty() => {
            Ok(Some(Witness::detail(format!("no image and no offending mode for f = {f}"))))
        }
        _ => Ok(None),
    }
}

fn descent_ring_hom(rng: &mut Rng8) -> Verdict {
    let d = gen::base_dim(rng);
    let f = {
        let n = rng.gen_range(1..=3);
        gen::descending_fn(rng, d, n)
    };
    let g = {
        let n = rng.gen_range(1..=3);
        gen::descending_fn(rng, d, n)
    };
    let down = |h: &HalfFunc| descend_function(h).image;
    let (df, dg) = match (down(&f), down(&g)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(Some(Witness::detail(format!("generated function does not descend: {f} | {g}")))),
    };
    if down(&(&f * &g)) != Some(&df * &dg) {
        return Ok(Some(Witness::detail(format!("product: f = {f}, g = {g}"))));
    }
    if down(&(&f + &g)) != Some(&df + &dg) {
        return Ok(Some(Witness::detail(format!("sum: f = {f}, g = {g}"))));
    }
    Ok(None)
}

fn rescale_verdict_invariant(rng: &mut Rng8) -> Verdict {
    let d = gen::base_dim(rng);
    let f = if rng.gen_bool(0.5) {
        {
            let n = rng.gen_range(1..=3);
            gen::general_fn(rng, d, n)
        }
    } else {
        let mut f = {
            let n = rng.gen_range(1..=3);
            gen::descending_fn(rng, d, n)
        };
        if rng.gen_bool(0.5) {
            f = &f * &HalfFunc::sqrt_s(d);
        }
        f
    };
    let lambda = gen::positive_q(rng);
    let before = descend_function(&f).descends;
    let after = descend_function(&rescale_boundary_function(&f, &lambda)?).descends;
    Ok((before != after).then(|| Witness::detail(format!("verdict changes under s -> {lambda} s for f = {f}"))))
}

fn cartan_invariance(rng: &mut Rng8) -> Verdict {
    let general = general(rng);
    let verdict = form_property(general, |b| {
        let t = b.theta_index();
        let cartan = b.lie_derivative(t)?;
        let direct = b.map_coefficients(|_, c| Ok(c.partial_theta()))?;
        if cartan != direct {
            return Ok(Some("L_theta beta != coefficientwise d/dtheta".into()));
        }
        let all_k_zero = b.terms().all(|(_, c)| c.terms().all(|(m, _)| m.k == 0));
        Ok(mismatch(cartan.is_zero() == all_k_zero, "L_theta beta = 0 does not match k = 0 throughout"))
    })?;
    if verdict.is_some() {
        return Ok(verdict);
    }
    form_property(cuttable(rng), |b| {
        let lie = b.lie_derivative(b.theta_index())?;
        let horizontal_on_boundary =
            b.degree() == 0 || b.contract(b.theta_index())?.boundary_pullback().form().is_zero();
        Ok(mismatch(lie.is_zero() && horizontal_on_boundary, "basic invariant form is not invariant and horizontal"))
    })
}

fn ext_d_finite_difference(rng: &mut Rng8) -> Verdict {
    let d = gen::base_dim(rng);
    let p = rng.gen_range(0..=1);
    let beta = gen::general_form(rng, d, p);
    let n = d + 2;
    let mut point: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
    point.push(rng.gen_range(0.0..std::f64::consts::TAU));
    point.push(rng.gen_range(0.1..0.5));
    let exact = beta.ext_d()?.eval_at(&point)?;
    let h = tolerance::FD_STEP;
    let coeff_at = |key: &[usize], x: &[f64]| -> Result<num_complex::Complex64> { Ok(beta.eval_at(x)?.get(key)) };
    let partial = |key: &[usize], j: usize| -> Result<num_complex::Complex64> {
        let (mut a, mut b) = (point.clone(), point.clone());
        a[j] += h;
        b[j] -= h;
        Ok((coeff_at(key, &a)? - coeff_at(key, &b)?) / (2.0 * h))
    };
    let mut worst: f64 = 0.0;
    if p == 0 {
        for j in 0..n {
            worst = worst.max((exact.get(&[j]) - partial(&[], j)?).norm());
        }
    } else {
        for i in 0..n {
            for j in i + 1..n {
                let fd = partial(&[j], i)? - partial(&[i], j)?;
                worst = worst.max((exact.get(&[i, j]) - fd).norm());
            }
        }
    }
    let scale = exact.max_abs().max(1.0);
    Ok((worst > tolerance::DERIVATIVE * scale)
        .then(|| Witness::at(point.clone(), worst, format!("d beta differs from central differences, beta = {beta}"))))
}

/// Part of `beta` that survives at `z = 0` after cutting: keys with neither
/// `dtheta` nor `ds`, and keys with both.
fn boundary_visible_part(beta: &HalfForm) -> HalfForm {
    let (t, s) = (beta.theta_index(), beta.s_index());
    beta.filter_terms(|k, _| k.contains(&t) == k.contains(&s))
}

fn nonvanishing(rng: &mut Rng8) -> Verdict {
    let d = rng.gen_range(0..=3);
    let p = gen::degree_for(rng, d);
    let beta = gen::cuttable_monomial_form(rng, d, p);
    let visible = boundary_visible_part(&beta);
    let hidden = beta.sub(&visible)?;
    let cut = cut_form(&beta)?;
    let plan = SamplePlan::new(Model::Half, d, rng.gen()).with_counts(0, 20, 0);
    for point in plan.points() {
        let before = visible.eval_at(&point)?.max_abs() != 0.0;
        let after = cut.eval_at(&collapse_point(d, &point))?.max_abs() != 0.0;
        if before != after {
            return Ok(Some(Witness::at(
                point,
                0.0,
                format!("beta = {beta}: boundary-visible part nonzero {before}, cut nonzero {after}"),
            )));
        }
        let hidden_zero = hidden.eval_at(&point)?.max_abs() == 0.0;
        if hidden_zero && (beta.eval_at(&point)?.max_abs() != 0.0) != after {
            return Ok(Some(Witness::at(point, 0.0, format!("beta = {beta}: nonvanishing not preserved"))));
        }
    }

    let top = if d % 2 == 0 {
        let omega = gen::cuttable_form(rng, d, 2).add(&HalfForm::named(d, &["ds", "dtheta"], HalfFunc::one(d))?)?;
        (omega.wedge_power((d + 2) / 2)?, cut_form(&omega)?.wedge_power((d + 2) / 2)?)
    } else {
        let beta = gen::cuttable_form(rng, d, 1);
        let cut = cut_form(&beta)?;
        let (db, dc) = (beta.ext_d()?, cut.ext_d()?);
        (beta.wedge(&db.wedge_power(d.div_ceil(2))?)?, cut.wedge(&dc.wedge_power(d.div_ceil(2))?)?)
    };
    let samples = SamplePlan::new(Model::Half, d, rng.gen()).with_counts(10, 6, 4).points();
    for p in samples {
        let half = top.0.eval_at(&p)?.top();
        let cut = top.1.eval_at(&collapse_point(d, &p))?.top();
        let residual = (cut + 2.0 * half).abs();
        if residual > tolerance::NONDEGENERATE * (1.0 + half.abs()) {
            return Ok(Some(Witness::at(p, residual, "top coefficient of cut is not -2 times the original")));
        }
    }
    Ok(None)
}

fn functoriality(rng: &mut Rng8) -> Verdict {
    let (d1, d2, d3) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
    let psi1 = gen::local_map(rng, d1, d2);
    let psi2 = gen::local_map(rng, d2, d3);
    let composite = cut_map(&compose_maps(&psi1, &psi2)?)?;
    let (c1, c2) = (cut_map(&psi1)?, cut_map(&psi2)?);
    let plan = SamplePlan::new(Model::Disc, d1, rng.gen()).with_counts(30, 10, 10);
    let mut worst: (f64, Vec<f64>) = (0.0, vec![]);
    for p in plan.points() {
        let a = composite.eval(&p)?;
        let b = c2.eval(&c1.eval(&p)?)?;
        let r = crate::verify::numeric::max_abs_diff(&a, &b);
        if r > worst.0 {
            worst = (r, p);
        }
    }
    if worst.0 >= tolerance::COMMUTING {
        return Ok(Some(Witness::at(worst.1, worst.0, "cut of composite differs from composite of cuts")));
    }
    let half = SamplePlan::new(Model::Half, d1, rng.gen()).points();
    let r = commuting_square_residual(&psi1, &c1, &half)?;
    Ok((r >= tolerance::COMMUTING).then(|| Witness::detail(format!("commuting square residual {r:e}"))))
}

fn rank_preservation(rng: &mut Rng8) -> Verdict {
    let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let psi = gen::local_map(rng, d1, d2);
    for _ in 0..20 {
        let x: Vec<f64> = (0..d1).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let report = boundary_ranks(&psi, &x, theta)?;
        let flags_agree =
            report.half_immersion() == report.cut_immersion() && report.half_submersion() == report.cut_submersion();
        if !report.consistent() || !flags_agree {
            return Ok(Some(Witness::detail(format!(
                "ranks half {} cut {} base {} at x = {x:?}",
                report.rank_half, report.rank_cut, report.rank_base
            ))));
        }
    }
    Ok(None)
}

fn lift_radial_square(rng: &mut Rng8) -> Verdict {
    let input = gen::cartesian_lift_input(rng);
    let points = lift_samples(input.t_dim(), input.fiber_dim(), rng.gen(), 100, 0.5);
    let lifted = lift_map_radial(&input, &points)?;
    let residual = lift_square_residual(&lifted, &input, &points)?;
    if residual >= tolerance::COMMUTING {
        return Ok(Some(Witness::detail(format!("radial square residual {residual:e}"))));
    }
    let (ok, min_deriv) = boundary_defining_check(&lifted, &points)?;
    Ok((!ok).then(|| Witness::detail(format!("r-derivative of last component {min_deriv:e} at r = 0"))))
}

fn lift_radial_squared_square(rng: &mut Rng8) -> Verdict {
    let input = gen::invariant_lift_input(rng);
    let points = lift_samples(input.t_dim(), input.fiber_dim(), rng.gen(), 100, 0.25);
    let lifted = lift_map_radial_squared(&input, &points, rng.gen())?;
    let residual = lift_square_residual(&lifted, &input, &points)?;
    Ok((residual >= tolerance::COMMUTING)
        .then(|| Witness::detail(format!("radial-squared square residual {residual:e}"))))
}

fn jacobian_fallback_agreement(rng: &mut Rng8) -> Verdict {
    let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let psi = gen::local_map(rng, d1, d2);
    let map: ExprMap = psi.half_map();
    let mut point: Vec<f64> = (0..d1).map(|_| rng.gen_range(-0.5..0.5)).collect();
    point.push(rng.gen_range(0.0..std::f64::consts::TAU));
    point.push(rng.gen_range(0.01..0.5));
    let sym = jacobian_symbolic(&map, &point)?;
    let fd = jacobian_fd(&map, &point, tolerance::FD_STEP)?;
    let diff = (&sym - &fd).abs().max();
    let scale = sym.abs().max().max(1.0);
    Ok((diff > tolerance::DERIVATIVE * scale)
        .then(|| Witness::at(point.clone(), diff, "symbolic and finite-difference Jacobians differ")))
}
