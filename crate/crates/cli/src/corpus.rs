//! Bundled example scenarios, built in code and exported to `corpus/*.json`.

use std::collections::BTreeMap;

use cutkit_core::blowup::{BlowupLiftInput, PolarDiffeoPair};
use cutkit_core::cutting::{DistributionFrame, LocalMap};
use cutkit_core::expr::Expr;
use cutkit_core::forms::{DiscForm, HalfForm, Model};
use cutkit_core::funcalg::{DiscFunc, HalfFunc};
use cutkit_core::rational::{q_frac, CRat};
use serde_json::{json, Value};

use crate::scenario::{Expect, Job, ModelDescriptor, Object, Sampling, Scenario, SCHEMA};

struct Builder(Scenario);

impl Builder {
    fn new(name: &str, description: &str, seed: u64) -> Self {
        Builder(Scenario {
            schema: SCHEMA.into(),
            name: name.into(),
            description: description.into(),
            seed,
            models: vec![],
            objects: BTreeMap::new(),
            jobs: vec![],
        })
    }

    fn model(mut self, id: &str, model: Model, dim: usize) -> Self {
        self.0.models.push(ModelDescriptor { id: id.into(), model, dim, eps: None });
        self
    }

    fn obj(mut self, id: &str, o: Object) -> Self {
        self.0.objects.insert(id.into(), o);
        self
    }

    fn job(mut self, j: Job) -> Self {
        self.0.jobs.push(j);
        self
    }

    fn build(self) -> Scenario {
        self.0.validate().expect("corpus scenario is valid");
        self.0
    }
}

fn job(name: &str, op: &str, args: &[&str]) -> Job {
    Job {
        name: name.into(),
        op: op.into(),
        args: args.iter().map(|a| a.to_string()).collect(),
        params: serde_json::Map::new(),
        expect: None,
        store: None,
        samples: None,
        tolerance: None,
    }
}

trait JobExt: Sized {
    fn expect_mut(&mut self) -> &mut Expect;
    fn with(self, f: impl FnOnce(&mut Self)) -> Self;

    fn holds(self, h: bool) -> Self {
        self.with(|j| j.expect_mut().holds = Some(h))
    }
    fn text(self, t: &str) -> Self {
        self.with(|j| j.expect_mut().text = Some(t.into()))
    }
    fn equals(self, o: Object) -> Self {
        self.with(|j| j.expect_mut().equals = Some(o))
    }
    fn error(self, kind: &str) -> Self {
        self.with(|j| j.expect_mut().error = Some(kind.into()))
    }
    fn below(self, bound: f64) -> Self {
        self.with(|j| j.expect_mut().below = Some(bound))
    }
    fn field(self, key: &str, v: Value) -> Self {
        self.with(|j| {
            j.expect_mut().fields.insert(key.into(), v);
        })
    }
}

impl JobExt for Job {
    fn expect_mut(&mut self) -> &mut Expect {
        self.expect.get_or_insert_with(Expect::default)
    }
    fn with(mut self, f: impl FnOnce(&mut Self)) -> Self {
        f(&mut self);
        self
    }
}

fn param(mut j: Job, key: &str, v: Value) -> Job {
    j.params.insert(key.into(), v);
    j
}

fn store(mut j: Job, id: &str) -> Job {
    j.store = Some(id.into());
    j
}

fn samples(mut j: Job, s: Sampling) -> Job {
    j.samples = Some(s);
    j
}

fn hf(d: usize, names: &[&str], c: HalfFunc) -> HalfForm {
    HalfForm::named(d, names, c).expect("valid key")
}

fn df(d: usize, names: &[&str], c: DiscFunc) -> DiscForm {
    DiscForm::named(d, names, c).expect("valid key")
}

fn half(f: HalfForm) -> Object {
    Object::HalfForm(f)
}

fn disc(f: DiscForm) -> Object {
    Object::DiscForm(f)
}

fn sum(a: HalfForm, b: HalfForm) -> HalfForm {
    a.add(&b).expect("same degree")
}

fn x(i: usize) -> Expr {
    Expr::var(&format!("x{i}"))
}

fn c(n: i64) -> Expr {
    Expr::c(n)
}

fn frac(n: i64, d: i64) -> Expr {
    Expr::rational(q_frac(n, d))
}

fn cylinder_symplectic() -> Scenario {
    let one = |d| HalfFunc::one(d);
    Builder::new("cylinder_symplectic", "Standard symplectic form on the half cylinder and its cut.", 11)
        .model("plane", Model::Half, 0)
        .model("plane_times_r2", Model::Half, 2)
        .obj("omega", half(hf(0, &["ds", "dtheta"], one(0))))
        .obj("omega_x", half(sum(hf(2, &["dx1", "dx2"], one(2)), hf(2, &["ds", "dtheta"], one(2)))))
        .obj("s_omega", half(hf(0, &["ds", "dtheta"], HalfFunc::s(0))))
        .obj("mu", Object::HalfFunc(HalfFunc::s(0)))
        .job(store(job("cut_omega", "cut_form", &["omega"]), "omega_cut").text("2 du^dv"))
        .job(job("omega_symplectic", "is_symplectic", &["omega"]).holds(true))
        .job(job("cut_symplectic", "is_symplectic", &["omega_cut"]).holds(true))
        .job(
            job("pullback_recovers_omega", "blowup_pullback", &["omega_cut"])
                .equals(half(hf(0, &["ds", "dtheta"], one(0))))
                .text("-dtheta^ds"),
        )
        .job(job("momentum_is_s", "momentum_check", &["omega", "mu"]).holds(true))
        .job(store(job("cut_omega_x", "cut_form", &["omega_x"]), "omega_x_cut").text("dx1^dx2 + 2 du^dv"))
        .job(job("omega_x_symplectic", "is_symplectic", &["omega_x"]).holds(true))
        .job(job("cut_omega_x_symplectic", "is_symplectic", &["omega_x_cut"]).holds(true))
        .job(store(job("reduce_omega_x", "reduced_form", &["omega_x"]), "omega_red").text("dx1^dx2"))
        .job(job("reduced_symplectic", "is_symplectic_reduced", &["omega_red"]).holds(true))
        .job(job("degenerate_control", "is_symplectic", &["s_omega"]).holds(false))
        .build()
}

fn contact_model() -> Scenario {
    let beta = sum(hf(1, &["dx1"], HalfFunc::one(1)), hf(1, &["dtheta"], HalfFunc::s(1)));
    Builder::new("contact_model", "The contact form dx1 + s dtheta, its cut and its reduction.", 12)
        .model("line_times_plane", Model::Half, 1)
        .obj("beta", half(beta))
        .obj("dx1", half(HalfForm::basis(1, 0)))
        .job(job("beta_contact", "is_contact", &["beta"]).holds(true))
        .job(store(job("cut_beta", "cut_form", &["beta"]), "beta_cut").text("dx1 - v du + u dv"))
        .job(job("cut_contact", "is_contact", &["beta_cut"]).holds(true))
        .job(store(job("reduce_beta", "reduced_form", &["beta"]), "beta_red").text("dx1"))
        .job(job("reduced_contact", "is_contact_reduced", &["beta_red"]).holds(true))
        .job(job("momentum", "contact_momentum", &["beta"]).equals(Object::HalfFunc(HalfFunc::s(1))).holds(true))
        .job(job("dx1_alone_control", "is_contact", &["dx1"]).holds(false))
        .build()
}

/// `sum_k c_k e^(ik theta)` from `(k, re, im, den)` with `c_k = (re + i im) / den`.
fn fourier(modes: &[(i64, i64, i64, i64)]) -> HalfFunc {
    let mut g = HalfFunc::zero(0);
    for &(k, re, im, den) in modes {
        let c = CRat::new(q_frac(re, den), q_frac(im, den));
        g = &g + &HalfFunc::exp_i_theta(0, k).scale(&c);
    }
    g
}

pub type Family = Vec<(&'static str, HalfFunc)>;

/// Non-constant and constant Fourier polynomials `g` used with `g(e^(i theta)) sqrt(s) cos(theta)`.
pub fn action_family() -> (Family, Family) {
    let nonconstant = vec![
        ("w", fourier(&[(1, 1, 0, 1)])),
        ("w2", fourier(&[(2, 1, 0, 1)])),
        ("w3", fourier(&[(3, 1, 0, 1)])),
        ("w_inv", fourier(&[(-1, 1, 0, 1)])),
        ("w_inv2", fourier(&[(-2, 1, 0, 1)])),
        ("w_plus_w_inv", fourier(&[(1, 1, 0, 1), (-1, 1, 0, 1)])),
        ("i_w_minus_i_w_inv", fourier(&[(1, 0, 1, 1), (-1, 0, -1, 1)])),
        ("one_plus_w", fourier(&[(0, 1, 0, 1), (1, 1, 0, 1)])),
        ("half_w_inv_plus_3", fourier(&[(0, 3, 0, 1), (-1, 1, 0, 2)])),
        ("w2_minus_i_w", fourier(&[(2, 1, 0, 1), (1, 0, -1, 1)])),
    ];
    let constant = vec![
        ("one", fourier(&[(0, 1, 0, 1)])),
        ("three", fourier(&[(0, 3, 0, 1)])),
        ("minus_half", fourier(&[(0, -1, 0, 2)])),
        ("i", fourier(&[(0, 0, 1, 1)])),
    ];
    (nonconstant, constant)
}

fn dependence_on_action() -> Scenario {
    let base = &HalfFunc::sqrt_s(0) * &HalfFunc::cos_theta(0, 1);
    let mut b = Builder::new(
        "dependence_on_action",
        "Descent of g(e^(i theta)) sqrt(s) cos(theta) depends on g, not only on the function class.",
        13,
    )
    .model("plane", Model::Half, 0);
    let (nonconstant, constant) = action_family();
    for (name, g) in nonconstant {
        let id = format!("f_{name}");
        b = b.obj(&id, Object::HalfFunc(&g * &base));
        b = b.job(job(&format!("descend_{name}"), "descend_function", &[&id]).holds(false).field("image", Value::Null));
    }
    for (name, g) in constant {
        let id = format!("f_{name}");
        let image = DiscFunc::u(0).scale(g.coefficient(&zero_mode()).expect("constant term"));
        b = b.obj(&id, Object::HalfFunc(&g * &base));
        b = b.job(
            job(&format!("descend_{name}"), "descend_function", &[&id])
                .holds(true)
                .field("image", json!(image.to_string())),
        );
    }
    b.job(
        job("offending_mode_of_w", "descend_function", &["f_w"])
            .holds(false)
            .field("offending_modes", json!([{ "alpha": [], "k": 0, "m": 1 }, { "alpha": [], "k": 2, "m": 1 }])),
    )
    .build()
}

fn zero_mode() -> cutkit_core::funcalg::HalfMonomial {
    cutkit_core::funcalg::HalfMonomial { alpha: vec![], k: 0, m: 0 }
}

fn roundtrip_forms() -> Scenario {
    let one = |d| HalfFunc::one(d);
    let mixed = sum(
        hf(2, &["dx1", "ds"], HalfFunc::x(2, 1)),
        sum(hf(2, &["dx2", "dtheta"], HalfFunc::s(2).pow(2)), hf(2, &["ds", "dtheta"], &one(2) + &HalfFunc::s(2))),
    );
    Builder::new("roundtrip_forms", "Cutting followed by blowup pullback, and the reverse where it is defined.", 14)
        .model("plane", Model::Half, 0)
        .model("line_times_plane", Model::Half, 1)
        .model("r2_times_plane", Model::Half, 2)
        .obj("ds_dtheta", half(hf(0, &["ds", "dtheta"], one(0))))
        .obj("s_dtheta", half(hf(0, &["dtheta"], HalfFunc::s(0))))
        .obj("dx1_ds", half(hf(1, &["dx1", "ds"], one(1))))
        .obj("mixed", half(mixed))
        .obj("dtheta", half(hf(0, &["dtheta"], one(0))))
        .obj("z", disc(DiscForm::function(DiscFunc::z(0))))
        .obj("du", disc(df(0, &["du"], DiscFunc::one(0))))
        .obj("two_du_dv", disc(df(0, &["du", "dv"], DiscFunc::from_int(0, 2))))
        .job(job("cut_ds_dtheta", "cut_form", &["ds_dtheta"]).text("2 du^dv"))
        .job(job("cut_s_dtheta", "cut_form", &["s_dtheta"]).text("-v du + u dv"))
        .job(job("cut_dx1_ds", "cut_form", &["dx1_ds"]).text("2*u dx1^du + 2*v dx1^dv"))
        .job(job("general_route_s_dtheta", "cut_form_general", &["s_dtheta"]).text("-v du + u dv"))
        .job(job("roundtrip_ds_dtheta", "roundtrip_check", &["ds_dtheta"]).holds(true))
        .job(job("roundtrip_s_dtheta", "roundtrip_check", &["s_dtheta"]).holds(true))
        .job(job("roundtrip_dx1_ds", "roundtrip_check", &["dx1_ds"]).holds(true))
        .job(job("roundtrip_mixed", "roundtrip_check", &["mixed"]).holds(true))
        .job(job("pullback_two_du_dv", "blowup_pullback", &["two_du_dv"]).equals(half(hf(
            0,
            &["ds", "dtheta"],
            one(0),
        ))))
        .job(job("disc_roundtrip_z", "disc_roundtrip_check", &["z"]).holds(true).field("defined", json!(true)))
        .job(job("disc_roundtrip_du_undefined", "disc_roundtrip_check", &["du"]).field("defined", json!(false)))
        .job(job("pullback_du_rejected", "blowup_pullback", &["du"]).error("ResidualNegativePower"))
        .job(job("dtheta_not_cuttable", "cut_form", &["dtheta"]).error("NotBasicInvariant"))
        .build()
}

fn local_map(d: usize, psi_bar: Vec<Expr>, b_re: Expr, b_im: Expr) -> Object {
    Object::LocalMap(LocalMap::new(d, psi_bar, b_re, b_im).expect("valid map"))
}

fn functoriality_maps() -> Scenario {
    let fifty = Sampling { interior: Some(40), boundary: Some(10), near_boundary: Some(0), ..Default::default() };
    let trials = |j: Job, n: usize| param(j, "trials", json!(n));
    Builder::new("functoriality_maps", "Cutting maps commutes with composition and fixes the identity.", 15)
        .model("line_times_plane", Model::Half, 1)
        .obj("shift", local_map(1, vec![x(1) + Expr::var("s")], frac(3, 5), frac(4, 5)))
        .obj("bend", local_map(1, vec![c(2) * x(1) + x(1) * x(1)], x(1).cos(), x(1).sin()))
        .obj("identity", Object::LocalMap(LocalMap::identity(1)))
        .obj("rotation", local_map(1, vec![x(1)], Expr::zero(), Expr::one()))
        .job(
            samples(job("compose_then_cut", "functoriality", &["shift", "bend"]), fifty.clone())
                .holds(true)
                .below(1e-10)
                .field("samples", json!(50)),
        )
        .job(
            samples(job("compose_then_cut_reversed", "functoriality", &["bend", "shift"]), fifty.clone())
                .holds(true)
                .below(1e-10),
        )
        .job(store(job("compose", "compose_maps", &["shift", "bend"]), "composite"))
        .job(job("composite_square", "commuting_square", &["composite"]).holds(true).below(1e-10))
        .job(job("shift_square", "commuting_square", &["shift"]).holds(true).below(1e-10))
        .job(job("identity_cuts_to_identity", "cut_is_identity", &["identity"]).holds(true).below(1e-10))
        .job(
            param(job("rotation_turns_the_disc", "cut_map", &["rotation"]), "point", json!([0.5, 0.3, 0.1]))
                .field("image", json!([0.5, -0.1, 0.3])),
        )
        .job(param(trials(job("random_pairs", "run_property", &[]), 25), "id", json!("functoriality")).holds(true))
        .build()
}

fn immersion_ranks() -> Scenario {
    let twenty = Sampling { boundary: Some(20), ..Default::default() };
    Builder::new("immersion_ranks", "Immersions and submersions stay so after cutting, checked at boundary points.", 16)
        .model("line_times_plane", Model::Half, 1)
        .model("r2_times_plane", Model::Half, 2)
        .obj("parabola", local_map(1, vec![x(1), x(1) * x(1)], Expr::one(), Expr::zero()))
        .obj("projection", local_map(2, vec![x(1)], Expr::one(), Expr::zero()))
        .job(
            samples(job("parabola_ranks", "boundary_ranks", &["parabola"]), twenty.clone())
                .holds(true)
                .field("half_immersion", json!(true))
                .field("cut_immersion", json!(true))
                .field("samples", json!(20)),
        )
        .job(
            samples(job("projection_ranks", "boundary_ranks", &["projection"]), twenty)
                .holds(true)
                .field("half_submersion", json!(true))
                .field("cut_submersion", json!(true)),
        )
        .job(
            param(
                param(job("random_maps", "run_property", &[]), "trials", json!(25)),
                "id",
                json!("rank_preservation"),
            )
            .holds(true),
        )
        .build()
}

fn distribution_cut() -> Scenario {
    let beta = sum(hf(1, &["dx1"], HalfFunc::one(1)), hf(1, &["dtheta"], HalfFunc::s(1)));
    let frame = |forms: Vec<HalfForm>| Object::Frame(DistributionFrame { forms });
    let interior = Sampling { boundary: Some(0), near_boundary: Some(0), ..Default::default() };
    Builder::new("distribution_cut", "Cutting annihilator frames of distributions.", 17)
        .model("r2_times_plane", Model::Half, 2)
        .model("line_times_plane", Model::Half, 1)
        .obj("dx1_frame", frame(vec![HalfForm::basis(2, 0)]))
        .obj("contact_frame", frame(vec![beta]))
        .obj("ds_frame", frame(vec![hf(0, &["ds"], HalfFunc::one(0))]))
        .job(
            job("foliation_by_x1", "cut_distribution", &["dx1_frame"])
                .field("cut_frame_text", json!(["dx1"]))
                .field("transverse", json!(true))
                .field("involutive_before", json!(true))
                .field("involutive_after", json!(true)),
        )
        .job(
            job("contact_distribution", "cut_distribution", &["contact_frame"])
                .field("cut_frame_text", json!(["dx1 - v du + u dv"]))
                .field("contact_before", json!(true))
                .field("contact_after", json!(true)),
        )
        .job(
            samples(job("radial_ds", "cut_distribution", &["ds_frame"]), interior)
                .field("cut_frame_text", json!(["2*u du + 2*v dv"]))
                .field("involutive_after", json!(true)),
        )
        .build()
}

fn momentum_checks() -> Scenario {
    let omega = hf(0, &["ds", "dtheta"], HalfFunc::one(0));
    let beta = sum(hf(1, &["dx1"], HalfFunc::one(1)), hf(1, &["dtheta"], HalfFunc::s(1)));
    Builder::new("momentum_checks", "Momentum map conventions for the circle action.", 18)
        .model("plane", Model::Half, 0)
        .obj("omega", half(omega))
        .obj("s", Object::HalfFunc(HalfFunc::s(0)))
        .obj("s_squared", Object::HalfFunc(HalfFunc::s(0).pow(2)))
        .obj("dx1_dx2", half(hf(2, &["dx1", "dx2"], HalfFunc::one(2))))
        .obj("zero2", Object::HalfFunc(HalfFunc::zero(2)))
        .obj("beta", half(beta))
        .obj("dx1", half(HalfForm::basis(1, 0)))
        .obj("dtheta", half(hf(0, &["dtheta"], HalfFunc::one(0))))
        .job(job("s_is_momentum", "momentum_check", &["omega", "s"]).holds(true))
        .job(job("s_squared_is_not", "momentum_check", &["omega", "s_squared"]).holds(false))
        .job(job("trivial_action_zero_momentum", "momentum_check", &["dx1_dx2", "zero2"]).holds(true))
        .job(
            job("contact_momentum_s", "contact_momentum", &["beta"])
                .equals(Object::HalfFunc(HalfFunc::s(1)))
                .holds(true),
        )
        .job(job("contact_momentum_dx1", "contact_momentum", &["dx1"]).equals(Object::HalfFunc(HalfFunc::zero(1))))
        .job(
            job("contact_momentum_dtheta", "contact_momentum", &["dtheta"])
                .equals(Object::HalfFunc(HalfFunc::one(0)))
                .holds(false),
        )
        .build()
}

fn matrix(rows: &[&[Expr]]) -> Vec<Vec<Expr>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn cartesian(phi1: Vec<Expr>, a: Vec<Vec<Expr>>) -> Object {
    Object::LiftInput(BlowupLiftInput::Cartesian { t_dim: 1, fiber_dim: 2, phi1, a })
}

fn invariant(phi1: Vec<Expr>, a: Vec<Vec<Expr>>) -> Object {
    Object::LiftInput(BlowupLiftInput::Invariant { t_dim: 1, fiber_dim: 2, phi1, a })
}

fn t1() -> Expr {
    Expr::var("t1")
}

fn radial_lift() -> Scenario {
    let z = Expr::zero;
    Builder::new("radial_lift", "Lifts of maps fixing {x = 0} to the radial blowup.", 19)
        .obj("identity", cartesian(vec![t1()], matrix(&[&[c(1), z()], &[z(), c(1)]])))
        .obj("double", cartesian(vec![t1()], matrix(&[&[c(2), z()], &[z(), c(2)]])))
        .obj("rotation", cartesian(vec![t1()], matrix(&[&[frac(3, 5), frac(-4, 5)], &[frac(4, 5), frac(3, 5)]])))
        .obj("varying", cartesian(vec![t1() + x(1) * x(2)], matrix(&[&[c(1) + t1() * t1(), x(1)], &[z(), c(2)]])))
        .obj("degenerate", cartesian(vec![t1()], matrix(&[&[c(1), z()], &[z(), z()]])))
        .job(
            job("identity_lift", "lift_map_radial", &["identity"])
                .holds(true)
                .below(1e-10)
                .field("samples", json!(100)),
        )
        .job(job("double_lift", "lift_map_radial", &["double"]).holds(true).below(1e-10))
        .job(job("rotation_lift", "lift_map_radial", &["rotation"]).holds(true).below(1e-10))
        .job(job("varying_lift", "lift_map_radial", &["varying"]).holds(true).below(1e-10))
        .job(job("degenerate_rejected", "lift_map_radial", &["degenerate"]).error("DegenerateA"))
        .job(
            param(
                param(job("random_inputs", "run_property", &[]), "trials", json!(10)),
                "id",
                json!("lift_radial_square"),
            )
            .holds(true),
        )
        .build()
}

fn radial_squared_lift() -> Scenario {
    let z = Expr::zero;
    let r2 = || x(1) * x(1) + x(2) * x(2);
    let s = || Expr::var("s");
    Builder::new("radial_squared_lift", "Lifts of invariant maps to the radial-squared blowup.", 20)
        .obj("triple", invariant(vec![t1()], matrix(&[&[c(3), z()], &[z(), c(3)]])))
        .obj("shifted", invariant(vec![t1() + s()], matrix(&[&[c(1), z()], &[z(), c(1)]])))
        .obj("twisted", invariant(vec![t1()], matrix(&[&[s().cos(), s().sin().negate()], &[s().sin(), s().cos()]])))
        .obj("cartesian_invariant", cartesian(vec![t1() + r2()], matrix(&[&[c(1) + r2(), z()], &[z(), c(1) + r2()]])))
        .job(
            job("triple_lift", "lift_map_radial_squared", &["triple"])
                .holds(true)
                .below(1e-10)
                .field("samples", json!(100)),
        )
        .job(job("shifted_lift", "lift_map_radial_squared", &["shifted"]).holds(true).below(1e-10))
        .job(job("twisted_lift", "lift_map_radial_squared", &["twisted"]).holds(true).below(1e-10))
        .job(
            job("cartesian_invariant_lift", "lift_map_radial_squared", &["cartesian_invariant"])
                .holds(true)
                .below(1e-10),
        )
        .job(
            param(
                param(job("random_inputs", "run_property", &[]), "trials", json!(10)),
                "id",
                json!("lift_radial_squared_square"),
            )
            .holds(true),
        )
        .build()
}

fn polar_pair(a_re: Expr, a_im: Expr, g: Expr) -> Object {
    Object::PolarPair(PolarDiffeoPair { a_re, a_im, g })
}

fn polar_correspondence() -> Scenario {
    let s = || Expr::var("s");
    let r = || Expr::var("r");
    Builder::new(
        "polar_correspondence",
        "Diffeomorphisms of the radial-squared blowup of the plane against maps z -> sqrt(g(|z|^2)) a(|z|^2) z.",
        21,
    )
    .obj("scale_two", polar_pair(Expr::one(), Expr::zero(), c(4)))
    .obj("identity", polar_pair(Expr::one(), Expr::zero(), c(1)))
    .obj("twist", polar_pair(s().cos(), s().sin(), c(1)))
    .obj("twist_and_stretch", polar_pair(s().cos(), s().sin(), c(1) + s()))
    .obj("ordinary_twist", polar_pair(r().cos(), r().sin(), c(1)))
    .obj("non_unit", polar_pair(c(2), Expr::zero(), c(1)))
    .obj("negative_factor", polar_pair(Expr::one(), Expr::zero(), c(-1)))
    .job(
        job("scale_two_matches", "polar_correspondence", &["scale_two"])
            .holds(true)
            .below(1e-10)
            .field("samples", json!(50)),
    )
    .job(job("identity_matches", "polar_correspondence", &["identity"]).holds(true).below(1e-10))
    .job(job("twist_matches", "polar_correspondence", &["twist"]).holds(true).below(1e-10))
    .job(job("twist_and_stretch_matches", "polar_correspondence", &["twist_and_stretch"]).holds(true).below(1e-10))
    .job(job("ordinary_polar_twist_not_smooth", "ordinary_polar_probe", &["ordinary_twist"]).holds(false))
    .job(job("non_unit_rejected", "polar_correspondence", &["non_unit"]).error("NonUnitTwist"))
    .job(job("negative_factor_rejected", "polar_correspondence", &["negative_factor"]).error("NonPositiveFactor"))
    .build()
}

fn nonequivariant_shear_rejection() -> Scenario {
    let z = Expr::zero;
    Builder::new(
        "nonequivariant_shear_rejection",
        "A shear fixing {x = 0} lifts to the radial blowup but not to the radial-squared one.",
        22,
    )
    .obj("shear", cartesian(vec![t1() + x(1) - x(2)], matrix(&[&[c(1), z()], &[z(), c(1)]])))
    .job(job("radial_accepts", "lift_map_radial", &["shear"]).holds(true).below(1e-10))
    .job(job("squared_rejects", "lift_map_radial_squared", &["shear"]).error("NonInvariantInput"))
    .job(
        param(job("naive_squared_not_smooth", "naive_squared_probe", &["shear"]), "point", json!([0.0, 1.0, 0.0, 0.0]))
            .holds(false),
    )
    .build()
}

/// Every bundled scenario, in a fixed order.
pub fn all() -> Vec<Scenario> {
    vec![
        cylinder_symplectic(),
        contact_model(),
        dependence_on_action(),
        roundtrip_forms(),
        functoriality_maps(),
        immersion_ranks(),
        distribution_cut(),
        momentum_checks(),
        radial_lift(),
        radial_squared_lift(),
        polar_correspondence(),
        nonequivariant_shear_rejection(),
    ]
}

pub fn names() -> Vec<String> {
    all().into_iter().map(|s| s.name).collect()
}

pub fn get(name: &str) -> Option<Scenario> {
    all().into_iter().find(|s| s.name == name)
}
