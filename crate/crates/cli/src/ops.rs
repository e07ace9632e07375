//! Operation dispatch for scenario jobs.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use cutkit_core::blowup::{self, BlowupLiftInput, PolarDiffeoPair};
use cutkit_core::cutting::{self, DistributionFrame, LocalMap};
use cutkit_core::forms::{Coefficient, DiscForm, Form, HalfForm, Model};
use cutkit_core::funcalg::{self, DiscFunc, HalfFunc};
use cutkit_core::rational::parse_q;
use cutkit_core::verify::numeric::max_abs_diff;
use cutkit_core::verify::{run_property, SamplePlan};
use cutkit_core::{tolerance, CutError};
use serde_json::{json, Value};

use crate::scenario::{Job, Object};

/// Why a job could not produce a value.
#[derive(Debug)]
pub enum RunError {
    /// The scenario is malformed (wrong argument type, missing parameter).
    Schema(String),
    /// The operation itself failed.
    Cut(CutError),
}

impl From<CutError> for RunError {
    fn from(e: CutError) -> Self {
        RunError::Cut(e)
    }
}

type R<T> = Result<T, RunError>;

/// Result of one operation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub value: Object,
    /// Boolean verdict, when the operation has one.
    pub holds: Option<bool>,
    /// Scalar checked by `expect.below`.
    pub residual: Option<f64>,
}

impl Outcome {
    fn value(value: Object) -> Self {
        Outcome { value, holds: None, residual: None }
    }

    fn verdict(holds: bool) -> Self {
        Outcome { value: Object::Bool(holds), holds: Some(holds), residual: None }
    }

    fn report(report: Value) -> Self {
        let holds = report.get("holds").and_then(Value::as_bool);
        let residual = report.get("residual").and_then(Value::as_f64);
        Outcome { value: Object::Report(report), holds, residual }
    }
}

const OPS: &[(&str, RangeInclusive<usize>)] = &[
    ("cut_form", 1..=1),
    ("cut_form_general", 1..=1),
    ("reduced_form", 1..=1),
    ("blowup_pullback", 1..=1),
    ("roundtrip_check", 1..=1),
    ("disc_roundtrip_check", 1..=1),
    ("ext_d", 1..=1),
    ("wedge", 2..=2),
    ("wedge_power", 1..=1),
    ("contract", 1..=1),
    ("lie_derivative", 1..=1),
    ("is_basic_invariant", 1..=1),
    ("boundary_pullback", 1..=1),
    ("eval_at", 1..=1),
    ("mono_descends", 0..=0),
    ("descend_function", 1..=1),
    ("lift_function", 1..=1),
    ("rescale_boundary_function", 2..=2),
    ("is_smooth_on_half", 1..=1),
    ("is_invariant", 1..=1),
    ("momentum_check", 2..=2),
    ("contact_momentum", 1..=1),
    ("is_symplectic", 1..=1),
    ("is_contact", 1..=1),
    ("is_symplectic_reduced", 1..=1),
    ("is_contact_reduced", 1..=1),
    ("cut_map", 1..=1),
    ("compose_maps", 2..=2),
    ("cut_is_identity", 1..=1),
    ("functoriality", 2..=2),
    ("commuting_square", 1..=1),
    ("boundary_ranks", 1..=1),
    ("cut_distribution", 1..=1),
    ("lift_map_radial", 1..=1),
    ("lift_map_radial_squared", 1..=1),
    ("naive_squared_probe", 1..=1),
    ("polar_correspondence", 1..=1),
    ("ordinary_polar_probe", 1..=1),
    ("run_property", 0..=0),
];

pub fn arity(op: &str) -> Option<RangeInclusive<usize>> {
    OPS.iter().find(|(name, _)| *name == op).map(|(_, a)| a.clone())
}

pub fn op_names() -> Vec<&'static str> {
    OPS.iter().map(|(n, _)| *n).collect()
}

struct Ctx<'a> {
    job: &'a Job,
    env: &'a BTreeMap<String, Object>,
    seed: u64,
}

fn schema<T>(msg: String) -> R<T> {
    Err(RunError::Schema(msg))
}

impl Ctx<'_> {
    fn arg(&self, i: usize) -> R<&Object> {
        let id = &self.job.args[i];
        self.env.get(id).ok_or_else(|| RunError::Schema(format!("undefined object `{id}`")))
    }

    fn wrong(&self, i: usize, want: &str) -> RunError {
        let got = self.arg(i).map(|o| o.type_name()).unwrap_or("nothing");
        RunError::Schema(format!("argument `{}` must be {want}, got {got}", self.job.args[i]))
    }

    fn half_form(&self, i: usize) -> R<&HalfForm> {
        match self.arg(i)? {
            Object::HalfForm(f) => Ok(f),
            _ => Err(self.wrong(i, "half_form")),
        }
    }

    fn disc_form(&self, i: usize) -> R<&DiscForm> {
        match self.arg(i)? {
            Object::DiscForm(f) => Ok(f),
            _ => Err(self.wrong(i, "disc_form")),
        }
    }

    fn half_func(&self, i: usize) -> R<&HalfFunc> {
        match self.arg(i)? {
            Object::HalfFunc(f) => Ok(f),
            _ => Err(self.wrong(i, "half_func")),
        }
    }

    fn disc_func(&self, i: usize) -> R<&DiscFunc> {
        match self.arg(i)? {
            Object::DiscFunc(f) => Ok(f),
            _ => Err(self.wrong(i, "disc_func")),
        }
    }

    fn local_map(&self, i: usize) -> R<&LocalMap> {
        match self.arg(i)? {
            Object::LocalMap(m) => Ok(m),
            _ => Err(self.wrong(i, "local_map")),
        }
    }

    fn frame(&self, i: usize) -> R<&DistributionFrame> {
        match self.arg(i)? {
            Object::Frame(f) => Ok(f),
            _ => Err(self.wrong(i, "frame")),
        }
    }

    fn lift_input(&self, i: usize) -> R<&BlowupLiftInput> {
        match self.arg(i)? {
            Object::LiftInput(x) => Ok(x),
            _ => Err(self.wrong(i, "lift_input")),
        }
    }

    fn polar_pair(&self, i: usize) -> R<&PolarDiffeoPair> {
        match self.arg(i)? {
            Object::PolarPair(x) => Ok(x),
            _ => Err(self.wrong(i, "polar_pair")),
        }
    }

    fn param(&self, key: &str) -> R<&Value> {
        self.job
            .params
            .get(key)
            .ok_or_else(|| RunError::Schema(format!("job `{}` needs parameter `{key}`", self.job.name)))
    }

    fn param_i64(&self, key: &str) -> R<i64> {
        self.param(key)?.as_i64().ok_or_else(|| RunError::Schema(format!("parameter `{key}` must be an integer")))
    }

    fn param_str(&self, key: &str) -> R<&str> {
        self.param(key)?.as_str().ok_or_else(|| RunError::Schema(format!("parameter `{key}` must be a string")))
    }

    fn param_point(&self, key: &str) -> R<Vec<f64>> {
        serde_json::from_value(self.param(key)?.clone())
            .map_err(|_| RunError::Schema(format!("parameter `{key}` must be a list of numbers")))
    }

    fn plan(&self, model: Model, dim: usize) -> SamplePlan {
        self.job.samples.clone().unwrap_or_default().plan(model, dim, self.seed)
    }

    fn tolerance(&self, default: f64) -> f64 {
        self.job.tolerance.unwrap_or(default)
    }
}

trait FormObject: Sized {
    fn wrap(self) -> Object;
}

impl FormObject for HalfForm {
    fn wrap(self) -> Object {
        Object::HalfForm(self)
    }
}

impl FormObject for DiscForm {
    fn wrap(self) -> Object {
        Object::DiscForm(self)
    }
}

enum AnyForm<'a> {
    Half(&'a HalfForm),
    Disc(&'a DiscForm),
}

fn any_form<'a>(ctx: &'a Ctx<'_>, i: usize) -> R<AnyForm<'a>> {
    match ctx.arg(i)? {
        Object::HalfForm(f) => Ok(AnyForm::Half(f)),
        Object::DiscForm(f) => Ok(AnyForm::Disc(f)),
        _ => Err(ctx.wrong(i, "a form")),
    }
}

fn generic_form_op<C: Coefficient>(ctx: &Ctx<'_>, beta: &Form<C>) -> R<Outcome>
where
    Form<C>: FormObject,
{
    let direction = || -> R<usize> { Ok(beta.direction(ctx.param_str("direction")?)?) };
    Ok(match ctx.job.op.as_str() {
        "ext_d" => Outcome::value(beta.ext_d()?.wrap()),
        "wedge_power" => Outcome::value(beta.wedge_power(ctx.param_i64("n")? as usize)?.wrap()),
        "contract" => Outcome::value(beta.contract(direction()?)?.wrap()),
        "lie_derivative" => Outcome::value(beta.lie_derivative(direction()?)?.wrap()),
        "eval_at" => {
            let e = beta.eval_at(&ctx.param_point("point")?)?;
            let mut values = serde_json::Map::new();
            for key in beta.keys() {
                let v = e.get(&key);
                values.insert(beta.key_label(&key), json!([v.re, v.im]));
            }
            Outcome::report(json!({ "values": values, "max_abs": e.max_abs() }))
        }
        "is_symplectic" => {
            let plan = ctx.plan(C::MODEL, beta.dim());
            Outcome::report(serde_json::to_value(cutting::is_symplectic(beta, &plan.points())?).unwrap())
        }
        "is_contact" => {
            let plan = ctx.plan(C::MODEL, beta.dim());
            Outcome::report(serde_json::to_value(cutting::is_contact(beta, &plan.points())?).unwrap())
        }
        op => return schema(format!("op `{op}` does not apply to forms")),
    })
}

fn x_samples(ctx: &Ctx<'_>, dim: usize) -> Vec<Vec<f64>> {
    ctx.plan(Model::Half, dim).points().into_iter().map(|p| p[..dim].to_vec()).collect()
}

fn verdict_report(v: &funcalg::DescentVerdict) -> Value {
    json!({
        "descends": v.descends,
        "holds": v.descends,
        "image": v.image.as_ref().map(|g| g.to_string()),
        "image_z": v.image.as_ref().map(|g| g.to_z_string()),
        "offending_modes": v
            .offending_modes
            .iter()
            .map(|m| json!({ "alpha": m.alpha, "k": m.k, "m": m.m }))
            .collect::<Vec<_>>(),
    })
}

fn lift_points(ctx: &Ctx<'_>, input: &BlowupLiftInput, c_max: f64) -> Vec<Vec<f64>> {
    let sampling = ctx.job.samples.clone().unwrap_or_default();
    blowup::lift_samples(
        input.t_dim(),
        input.fiber_dim(),
        sampling.seed.unwrap_or(ctx.seed),
        sampling.interior.unwrap_or(100),
        sampling.eps.unwrap_or(c_max),
    )
}

pub fn execute(job: &Job, env: &BTreeMap<String, Object>, seed: u64) -> R<Outcome> {
    let ctx = Ctx { job, env, seed };
    let op = job.op.as_str();
    Ok(match op {
        "ext_d" | "wedge_power" | "contract" | "lie_derivative" | "eval_at" | "is_symplectic" | "is_contact" => {
            match any_form(&ctx, 0)? {
                AnyForm::Half(f) => generic_form_op(&ctx, f)?,
                AnyForm::Disc(f) => generic_form_op(&ctx, f)?,
            }
        }
        "wedge" => match (any_form(&ctx, 0)?, any_form(&ctx, 1)?) {
            (AnyForm::Half(a), AnyForm::Half(b)) => Outcome::value(Object::HalfForm(a.wedge(b)?)),
            (AnyForm::Disc(a), AnyForm::Disc(b)) => Outcome::value(Object::DiscForm(a.wedge(b)?)),
            _ => return schema("wedge needs two forms on the same model".into()),
        },
        "cut_form" => Outcome::value(Object::DiscForm(cutting::cut_form(ctx.half_form(0)?)?)),
        "cut_form_general" => Outcome::value(Object::DiscForm(cutting::cut_form_general(ctx.half_form(0)?)?)),
        "reduced_form" => Outcome::value(Object::DiscForm(cutting::reduced_form(ctx.half_form(0)?)?)),
        "blowup_pullback" => Outcome::value(Object::HalfForm(blowup::blowup_pullback(ctx.disc_form(0)?)?)),
        "roundtrip_check" => Outcome::verdict(blowup::roundtrip_check(ctx.half_form(0)?)?),
        "disc_roundtrip_check" => {
            let r = blowup::disc_roundtrip_check(ctx.disc_form(0)?)?;
            Outcome::report(json!({ "defined": r.is_some(), "holds": r.unwrap_or(false) }))
        }
        "is_basic_invariant" => {
            let (ok, witness) = ctx.half_form(0)?.is_basic_invariant();
            Outcome::report(json!({ "holds": ok, "witness": witness }))
        }
        "boundary_pullback" => Outcome::value(Object::HalfForm(ctx.half_form(0)?.boundary_pullback().into_form())),
        "mono_descends" => {
            let m = ctx.param_i64("m")?;
            if m < 0 {
                return schema("parameter `m` must be nonnegative".into());
            }
            Outcome::verdict(funcalg::mono_descends(m as u32, ctx.param_i64("k")?))
        }
        "descend_function" => {
            let v = funcalg::descend_function(ctx.half_func(0)?);
            let mut out = Outcome::report(verdict_report(&v));
            if let Some(image) = v.image {
                if job.store.is_some() {
                    out.value = Object::DiscFunc(image);
                }
            }
            out
        }
        "lift_function" => Outcome::value(Object::HalfFunc(funcalg::lift_function(ctx.disc_func(0)?))),
        "rescale_boundary_function" => {
            let lambda = match ctx.arg(1)? {
                Object::Rational(s) => parse_q(s)?,
                _ => return Err(ctx.wrong(1, "rational")),
            };
            Outcome::value(Object::HalfFunc(funcalg::rescale_boundary_function(ctx.half_func(0)?, &lambda)?))
        }
        "is_smooth_on_half" => Outcome::verdict(funcalg::is_smooth_on_half(ctx.half_func(0)?)),
        "is_invariant" => Outcome::verdict(funcalg::is_invariant(ctx.half_func(0)?)),
        "momentum_check" => Outcome::verdict(cutting::momentum_check(ctx.half_form(0)?, ctx.half_func(1)?)?),
        "contact_momentum" => {
            let mu = cutting::contact_momentum(ctx.half_form(0)?)?;
            let vanishes = mu.vanishes_on_boundary();
            Outcome { holds: Some(vanishes), residual: None, value: Object::HalfFunc(mu) }
        }
        "is_symplectic_reduced" => {
            let w = ctx.disc_form(0)?;
            let c = cutting::is_symplectic_reduced(w, &x_samples(&ctx, w.dim()))?;
            Outcome::report(serde_json::to_value(c).unwrap())
        }
        "is_contact_reduced" => {
            let b = ctx.disc_form(0)?;
            let c = cutting::is_contact_reduced(b, &x_samples(&ctx, b.dim()))?;
            Outcome::report(serde_json::to_value(c).unwrap())
        }
        "cut_map" => {
            let m = cutting::cut_map(ctx.local_map(0)?)?;
            let comps: Vec<String> = m.map.comps.iter().map(|e| e.to_string()).collect();
            let mut report = json!({ "vars": m.map.vars, "components": comps });
            if job.params.contains_key("point") {
                report["image"] = json!(m.eval(&ctx.param_point("point")?)?);
            }
            Outcome::report(report)
        }
        "compose_maps" => {
            Outcome::value(Object::LocalMap(cutting::compose_maps(ctx.local_map(0)?, ctx.local_map(1)?)?))
        }
        "cut_is_identity" => {
            let psi = ctx.local_map(0)?;
            let cut = cutting::cut_map(psi)?;
            let mut residual: f64 = 0.0;
            for p in ctx.plan(Model::Disc, psi.source_dim).points() {
                residual = residual.max(max_abs_diff(&cut.eval(&p)?, &p));
            }
            let tol = ctx.tolerance(tolerance::COMMUTING);
            Outcome::report(json!({ "residual": residual, "holds": residual < tol }))
        }
        "functoriality" => {
            let (a, b) = (ctx.local_map(0)?, ctx.local_map(1)?);
            let composite = cutting::cut_map(&cutting::compose_maps(a, b)?)?;
            let (ca, cb) = (cutting::cut_map(a)?, cutting::cut_map(b)?);
            let points = ctx.plan(Model::Disc, a.source_dim).points();
            let mut residual: f64 = 0.0;
            for p in &points {
                residual = residual.max(max_abs_diff(&composite.eval(p)?, &cb.eval(&ca.eval(p)?)?));
            }
            let tol = ctx.tolerance(tolerance::COMMUTING);
            Outcome::report(json!({ "residual": residual, "holds": residual < tol, "samples": points.len() }))
        }
        "commuting_square" => {
            let psi = ctx.local_map(0)?;
            let cut = cutting::cut_map(psi)?;
            let points = ctx.plan(Model::Half, psi.source_dim).points();
            let residual = cutting::commuting_square_residual(psi, &cut, &points)?;
            let tol = ctx.tolerance(tolerance::COMMUTING);
            Outcome::report(json!({ "residual": residual, "holds": residual < tol, "samples": points.len() }))
        }
        "boundary_ranks" => {
            let psi = ctx.local_map(0)?;
            let plan = ctx.plan(Model::Half, psi.source_dim).with_counts(0, 20, 0);
            let plan = match &job.samples {
                Some(s) if s.boundary.is_some() => {
                    ctx.plan(Model::Half, psi.source_dim).with_counts(0, s.boundary.unwrap(), 0)
                }
                _ => plan,
            };
            let d = psi.source_dim;
            let reports = plan
                .boundary_points()
                .iter()
                .map(|p| cutting::boundary_ranks(psi, &p[..d], p[d]))
                .collect::<Result<Vec<_>, _>>()?;
            let all = |f: fn(&cutting::RankReport) -> bool| reports.iter().all(f);
            Outcome::report(json!({
                "holds": all(cutting::RankReport::consistent),
                "samples": reports.len(),
                "half_immersion": all(cutting::RankReport::half_immersion),
                "cut_immersion": all(cutting::RankReport::cut_immersion),
                "half_submersion": all(cutting::RankReport::half_submersion),
                "cut_submersion": all(cutting::RankReport::cut_submersion),
                "ranks": reports.iter().map(|r| [r.rank_half, r.rank_cut, r.rank_base]).collect::<Vec<_>>(),
            }))
        }
        "cut_distribution" => {
            let frame = ctx.frame(0)?;
            let d = frame.forms.first().map(|f| f.dim()).unwrap_or(0);
            let half = ctx.plan(Model::Half, d).points();
            let disc = ctx.plan(Model::Disc, d).points();
            let r = cutting::cut_distribution(frame, &half, &disc)?;
            let mut report = serde_json::to_value(&r).unwrap();
            report["cut_frame_text"] = json!(r.cut_frame.iter().map(|f| f.to_string()).collect::<Vec<_>>());
            Outcome::report(report)
        }
        "lift_map_radial" => {
            let input = ctx.lift_input(0)?;
            let points = lift_points(&ctx, input, 0.5);
            let lifted = blowup::lift_map_radial(input, &points)?;
            let residual = blowup::lift_square_residual(&lifted, input, &points)?;
            let (defining, min_derivative) = blowup::boundary_defining_check(&lifted, &points)?;
            let tol = ctx.tolerance(tolerance::COMMUTING);
            let comps: Vec<String> = lifted.map.comps.iter().map(|e| e.to_string()).collect();
            Outcome::report(json!({
                "residual": residual,
                "holds": residual < tol && defining,
                "boundary_defining": defining,
                "min_boundary_derivative": min_derivative,
                "samples": points.len(),
                "components": comps,
            }))
        }
        "lift_map_radial_squared" => {
            let input = ctx.lift_input(0)?;
            let points = lift_points(&ctx, input, 0.25);
            let lifted = blowup::lift_map_radial_squared(input, &points, ctx.seed)?;
            let residual = blowup::lift_square_residual(&lifted, input, &points)?;
            let tol = ctx.tolerance(tolerance::COMMUTING);
            let boundary = points.iter().find(|p| p.last() == Some(&0.0)).cloned().unwrap_or_default();
            let probe = blowup::probe_lift_at_boundary(&lifted, &boundary)?;
            let comps: Vec<String> = lifted.map.comps.iter().map(|e| e.to_string()).collect();
            Outcome::report(json!({
                "residual": residual,
                "holds": residual < tol && probe.smooth,
                "smooth": probe.smooth,
                "probe_mismatch": probe.mismatch,
                "samples": points.len(),
                "components": comps,
            }))
        }
        "naive_squared_probe" => {
            let lifted = blowup::naive_radial_squared_lift(ctx.lift_input(0)?)?;
            let probe = blowup::probe_lift_at_boundary(&lifted, &ctx.param_point("point")?)?;
            Outcome::report(json!({ "smooth": probe.smooth, "holds": probe.smooth, "mismatch": probe.mismatch }))
        }
        "polar_correspondence" => {
            let sampling = job.samples.clone().unwrap_or_default();
            let samples = blowup::polar_samples(
                sampling.seed.unwrap_or(seed),
                sampling.interior.unwrap_or(50),
                sampling.eps.unwrap_or(0.5),
            );
            let r = blowup::polar_correspondence(ctx.polar_pair(0)?, &samples)?;
            let tol = ctx.tolerance(tolerance::COMMUTING);
            let mut report = serde_json::to_value(&r).unwrap();
            report["residual"] = json!(r.commuting_residual);
            report["holds"] =
                json!(r.commuting_residual < tol && r.min_abs_det > tolerance::NONDEGENERATE && r.phi_probe.smooth);
            Outcome::report(report)
        }
        "ordinary_polar_probe" => {
            let pair = ctx.polar_pair(0)?;
            let p = blowup::ordinary_polar_probe(&pair.a_re, &pair.a_im)?;
            Outcome::report(json!({ "smooth": p.smooth, "holds": p.smooth, "mismatch": p.mismatch }))
        }
        "run_property" => {
            let id = ctx.param_str("id")?;
            let trials = ctx.param_i64("trials")? as usize;
            let r = run_property(&job.name, seed, id, trials)?;
            let passed = r.passed();
            let mut report = serde_json::to_value(r).unwrap();
            report["holds"] = json!(passed);
            Outcome::report(report)
        }
        other => return schema(format!("unknown op `{other}`")),
    })
}
