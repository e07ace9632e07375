//! Cutting on the local models: forms, reduced forms, maps, distributions,
//! momentum maps and symplectic/contact certification.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CutError, Result};
use crate::expr::{Env, Expr, ExprMap};
use crate::forms::{merge_keys, Coefficient, DiscForm, Form, HalfForm};
use crate::funcalg::{descend_function, DiscFunc, HalfFunc};
use crate::rational::{q, q_frac, CRat, Q};
use crate::tolerance;
use crate::verify::numeric::{jacobian_at, matrix_rank};

fn disc_named(dim: usize, names: &[&str], c: DiscFunc) -> DiscForm {
    DiscForm::named(dim, names, c).expect("fixed covector names")
}

/// `2u du + 2v dv`, the image of `ds`.
pub fn ds_image(dim: usize) -> DiscForm {
    let two = CRat::from_int(2);
    disc_named(dim, &["du"], DiscFunc::u(dim).scale(&two))
        .add(&disc_named(dim, &["dv"], DiscFunc::v(dim).scale(&two)))
        .expect("same model")
}

/// `u dv - v du`, the image of `s dtheta`.
pub fn s_dtheta_image(dim: usize) -> DiscForm {
    disc_named(dim, &["dv"], DiscFunc::u(dim)).sub(&disc_named(dim, &["du"], DiscFunc::v(dim))).expect("same model")
}

/// `2 du^dv`, the image of `ds^dtheta`.
pub fn ds_dtheta_image(dim: usize) -> DiscForm {
    disc_named(dim, &["du", "dv"], DiscFunc::from_int(dim, 2))
}

fn descend_or_err(c: &HalfFunc, context: &str) -> Result<DiscFunc> {
    let verdict = descend_function(c);
    match verdict.image {
        Some(img) => Ok(img),
        None => {
            let modes: Vec<String> = verdict.offending_modes.iter().map(ToString::to_string).collect();
            Err(CutError::NonDescendingCoefficient(format!(
                "{context}: coefficient {c} has modes [{}] that are not smooth on the disc",
                modes.join(", ")
            )))
        }
    }
}

/// Cut of a form that is basic on the boundary and rotation invariant.
///
/// Writes `beta = b0 + b1^ds + s b2^dtheta + b3^ds^dtheta` with coefficients
/// in `(x, s)` and replaces `ds`, `s dtheta`, `ds^dtheta` by
/// `2u du + 2v dv`, `u dv - v du`, `2 du^dv`, with `s -> u^2 + v^2`.
pub fn cut_form(beta: &HalfForm) -> Result<DiscForm> {
    let (ok, witness) = beta.is_basic_invariant();
    if !ok {
        return Err(CutError::NotBasicInvariant { witness });
    }
    let d = beta.dim();
    let (t, s) = (d, d + 1);
    let mut out = DiscForm::zero(d, beta.degree());
    for (key, c) in beta.terms() {
        let xs: Vec<usize> = key.iter().copied().filter(|&i| i < d).collect();
        let (has_t, has_s) = (key.contains(&t), key.contains(&s));
        let label = beta.key_label(key);
        let (coeff, tail, negate) = match (has_t, has_s) {
            (false, false) => (c.clone(), None, false),
            (false, true) => (c.clone(), Some(ds_image(d)), false),
            (true, false) => {
                let reduced = c.divide_by_s().ok_or_else(|| CutError::NotBasicInvariant {
                    witness: vec![format!("({c}) {label}: not divisible by s")],
                })?;
                (reduced, Some(s_dtheta_image(d)), false)
            }
            // dtheta^ds = -ds^dtheta
            (true, true) => (c.clone(), Some(ds_dtheta_image(d)), true),
        };
        let image = descend_or_err(&coeff, &label)?;
        let base = DiscForm::monomial(d, &xs, image);
        let piece = match tail {
            None => base,
            Some(tail) => base.wedge(&tail)?,
        };
        out = out.add(&if negate { piece.neg() } else { piece })?;
    }
    Ok(out)
}

type LaurentKey = (Vec<u32>, i64, i64);

/// Laurent polynomial in `z, zbar` with polynomial `x` dependence.
#[derive(Clone, Debug, Default)]
struct Laurent(BTreeMap<LaurentKey, CRat>);

impl Laurent {
    fn single(alpha: Vec<u32>, p: i64, q: i64, c: CRat) -> Self {
        let mut l = Laurent::default();
        l.add_term((alpha, p, q), c);
        l
    }

    fn add_term(&mut self, key: LaurentKey, c: CRat) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(key.clone()).or_insert_with(CRat::zero);
        *slot += &c;
        if slot.is_zero() {
            self.0.remove(&key);
        }
    }

    fn add(&mut self, other: &Laurent) {
        for (k, c) in &other.0 {
            self.add_term(k.clone(), c.clone());
        }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for ((a1, p1, q1), c1) in &self.0 {
            for ((a2, p2, q2), c2) in &other.0 {
                let alpha = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.add_term((alpha, p1 + p2, q1 + q2), c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: &CRat) -> Laurent {
        let mut out = Laurent::default();
        for (k, v) in &self.0 {
            out.add_term(k.clone(), v * c);
        }
        out
    }
}

/// Form in the complex coframe `(dx, dz, dzbar)` with Laurent coefficients.
type LaurentForm = BTreeMap<Vec<usize>, Laurent>;

fn lform_wedge(a: &LaurentForm, b: &LaurentForm) -> LaurentForm {
    let mut out: LaurentForm = BTreeMap::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            if let Some((key, sign)) = merge_keys(ka, kb) {
                let prod = ca.mul(cb);
                let prod = if sign > 0 { prod } else { prod.scale(&CRat::from_int(-1)) };
                out.entry(key).or_default().add(&prod);
            }
        }
    }
    out.retain(|_, c| !c.0.is_empty());
    out
}

/// Cut of any half-model form that is the pullback of a polynomial disc form,
/// invariant or not.
///
/// Works on the punctured disc, where `ds = zbar dz + z dzbar` and
/// `dtheta = (dz/z - dzbar/zbar) / 2i`, and rewrites every coefficient as a
/// Laurent polynomial in `z, zbar`. The result must have no negative powers.
pub fn cut_form_general(beta: &HalfForm) -> Result<DiscForm> {
    let d = beta.dim();
    let (t, s) = (d, d + 1);
    let (dz, dzb) = (d, d + 1);
    let zero_alpha = vec![0u32; d];
    let unit = CRat::one();
    let half_i = CRat::new(Q::zero(), q_frac(1, 2));

    let mut ds_form: LaurentForm = BTreeMap::new();
    ds_form.insert(vec![dz], Laurent::single(zero_alpha.clone(), 0, 1, unit.clone()));
    ds_form.insert(vec![dzb], Laurent::single(zero_alpha.clone(), 1, 0, unit.clone()));
    let mut dtheta_form: LaurentForm = BTreeMap::new();
    dtheta_form.insert(vec![dz], Laurent::single(zero_alpha.clone(), -1, 0, -&half_i));
    dtheta_form.insert(vec![dzb], Laurent::single(zero_alpha.clone(), 0, -1, half_i));

    let mut total: LaurentForm = BTreeMap::new();
    for (key, c) in beta.terms() {
        if !c.radical().is_one() && c.terms().any(|(m, _)| m.m % 2 == 1) {
            return Err(CutError::ModelMismatch(format!("coefficient {c} carries a symbolic square root")));
        }
        let mut coeff = Laurent::default();
        for (mono, v) in c.terms() {
            let m = mono.m as i64;
            if (m + mono.k) % 2 != 0 {
                return Err(CutError::NonDescendingCoefficient(format!(
                    "{}: mode {mono} has half-integer powers of z",
                    beta.key_label(key)
                )));
            }
            coeff.add_term((mono.alpha.clone(), (m + mono.k) / 2, (m - mono.k) / 2), v.clone());
        }
        let xs: Vec<usize> = key.iter().copied().filter(|&i| i < d).collect();
        let mut piece: LaurentForm = BTreeMap::new();
        piece.insert(xs, coeff);
        if key.contains(&t) {
            piece = lform_wedge(&piece, &dtheta_form);
        }
        if key.contains(&s) {
            piece = lform_wedge(&piece, &ds_form);
        }
        for (k, l) in piece {
            total.entry(k).or_default().add(&l);
        }
    }

    // dz = du + i dv, dzbar = du - i dv, dz^dzbar = -2i du^dv
    let i = CRat::i();
    let mut out = DiscForm::zero(d, beta.degree());
    for (key, l) in total {
        if l.0.is_empty() {
            continue;
        }
        let mut func = DiscFunc::zero(d);
        for ((alpha, p, qq), v) in &l.0 {
            if *p < 0 || *qq < 0 {
                return Err(CutError::NonDescendingCoefficient(format!("cut leaves a negative power z^{p} zbar^{qq}")));
            }
            func = &func + &DiscFunc::monomial(d, alpha.clone(), *p as u32, *qq as u32, v.clone());
        }
        let xs: Vec<usize> = key.iter().copied().filter(|&k| k < d).collect();
        let has_dz = key.contains(&dz);
        let has_dzb = key.contains(&dzb);
        let with = |extra: &[usize], c: &CRat| {
            let mut k = xs.clone();
            k.extend_from_slice(extra);
            DiscForm::monomial(d, &k, func.scale(c))
        };
        let piece = match (has_dz, has_dzb) {
            (false, false) => with(&[], &CRat::one()),
            (true, false) => with(&[dz], &CRat::one()).add(&with(&[dzb], &i))?,
            (false, true) => with(&[dz], &CRat::one()).add(&with(&[dzb], &-&i))?,
            (true, true) => with(&[dz, dzb], &CRat::new(Q::zero(), q(-2))),
        };
        out = out.add(&piece)?;
    }
    Ok(out)
}

/// Restriction of a disc form to `u = v = 0` with `du = dv = 0`.
pub fn restrict_to_reduced(gamma: &DiscForm) -> DiscForm {
    let d = gamma.dim();
    gamma
        .filter_terms(|k, _| k.iter().all(|&i| i < d))
        .map_coefficients(|_, c| Ok(c.at_origin()))
        .expect("restriction cannot fail")
}

/// Reduced form on `M_red = {u = v = 0}`: pull back to the boundary, drop the
/// `dtheta` terms and read the coefficients as functions of `x`.
pub fn reduced_form(beta: &HalfForm) -> Result<DiscForm> {
    cut_form(beta)?;
    let d = beta.dim();
    let boundary = beta.boundary_pullback().into_form();
    boundary.filter_terms(|k, _| !k.contains(&d)).map_coefficients(|k, c| descend_or_err(c, &format!("reduced {k:?}")))
}

/// `i_{d/dtheta} omega + d mu`; zero exactly when `mu` is a momentum map.
pub fn momentum_residual(omega: &HalfForm, mu: &HalfFunc) -> Result<HalfForm> {
    if omega.degree() != 2 {
        return Err(CutError::ModelMismatch(format!("momentum check needs a 2-form, got degree {}", omega.degree())));
    }
    let contracted = omega.contract(omega.theta_index())?;
    let dmu = HalfForm::function(mu.clone()).ext_d()?;
    contracted.add(&dmu)
}

/// Exact test of `i_{d/dtheta} omega = -d mu`.
pub fn momentum_check(omega: &HalfForm, mu: &HalfFunc) -> Result<bool> {
    Ok(momentum_residual(omega, mu)?.is_zero())
}

/// Contact momentum `mu = i_{d/dtheta} beta` of a 1-form.
pub fn contact_momentum(beta: &HalfForm) -> Result<HalfFunc> {
    if beta.degree() != 1 {
        return Err(CutError::ModelMismatch(format!("contact momentum needs a 1-form, got degree {}", beta.degree())));
    }
    let mu = beta.contract(beta.theta_index())?;
    Ok(mu.coefficient(&[]).cloned().unwrap_or_else(|| HalfFunc::zero(beta.dim())))
}

/// Outcome of a symplectic or contact certification on samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    /// `d omega = 0` for the symplectic test; always true for the contact test.
    pub exact_condition: bool,
    /// Smallest `|det|` (symplectic) or `|top coefficient|` (contact) seen.
    pub min_abs: f64,
    pub samples: usize,
    /// Samples where the numeric condition failed, with the offending value.
    pub witnesses: Vec<(Vec<f64>, f64)>,
}

fn certify(exact: bool, values: Vec<(Vec<f64>, f64)>) -> Certificate {
    let min_abs = values.iter().map(|(_, v)| v.abs()).fold(f64::INFINITY, f64::min);
    let witnesses: Vec<(Vec<f64>, f64)> =
        values.iter().filter(|(_, v)| v.abs() <= tolerance::NONDEGENERATE).cloned().collect();
    Certificate {
        holds: exact && witnesses.is_empty() && !values.is_empty(),
        exact_condition: exact,
        min_abs,
        samples: values.len(),
        witnesses,
    }
}

/// Closed and nondegenerate at every sample (points in basis order).
pub fn is_symplectic<C: Coefficient>(omega: &Form<C>, samples: &[Vec<f64>]) -> Result<Certificate> {
    let n = omega.total_dim();
    if !n.is_multiple_of(2) {
        return Err(CutError::DimensionParity(format!("symplectic form on odd dimension {n}")));
    }
    if omega.degree() != 2 {
        return Err(CutError::ModelMismatch(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    let closed = omega.ext_d()?.is_zero();
    let mut values = Vec::new();
    for p in samples {
        values.push((p.clone(), omega.eval_at(p)?.matrix().determinant()));
    }
    Ok(certify(closed, values))
}

/// `beta ^ (d beta)^n` nonvanishing at every sample, `dim = 2n + 1`.
pub fn is_contact<C: Coefficient>(beta: &Form<C>, samples: &[Vec<f64>]) -> Result<Certificate> {
    let total = beta.total_dim();
    if total.is_multiple_of(2) {
        return Err(CutError::DimensionParity(format!("contact form on even dimension {total}")));
    }
    if beta.degree() != 1 {
        return Err(CutError::ModelMismatch(format!("expected a 1-form, got degree {}", beta.degree())));
    }
    let top = beta.wedge(&beta.ext_d()?.wedge_power((total - 1) / 2)?)?;
    let mut values = Vec::new();
    for p in samples {
        values.push((p.clone(), top.eval_at(p)?.top()));
    }
    Ok(certify(true, values))
}

fn reduced_point(x: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    p.extend([0.0, 0.0]);
    p
}

/// Symplectic test for a reduced form, a form in `x` alone on `M_red`.
pub fn is_symplectic_reduced(omega: &DiscForm, x_samples: &[Vec<f64>]) -> Result<Certificate> {
    let d = omega.dim();
    if !d.is_multiple_of(2) {
        return Err(CutError::DimensionParity(format!("reduced space has odd dimension {d}")));
    }
    if omega.degree() != 2 {
        return Err(CutError::ModelMismatch(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    let closed = omega.ext_d()?.is_zero();
    let mut values = Vec::new();
    for x in x_samples {
        let m = omega.eval_at(&reduced_point(x))?.matrix();
        values.push((x.clone(), m.view((0, 0), (d, d)).determinant()));
    }
    Ok(certify(closed, values))
}

/// Contact test for a reduced 1-form in `x` alone.
pub fn is_contact_reduced(beta: &DiscForm, x_samples: &[Vec<f64>]) -> Result<Certificate> {
    let d = beta.dim();
    if d.is_multiple_of(2) {
        return Err(CutError::DimensionParity(format!("reduced space has even dimension {d}")));
    }
    if beta.degree() != 1 {
        return Err(CutError::ModelMismatch(format!("expected a 1-form, got degree {}", beta.degree())));
    }
    let top = beta.wedge(&beta.ext_d()?.wedge_power((d - 1) / 2)?)?;
    let key: Vec<usize> = (0..d).collect();
    let mut values = Vec::new();
    for x in x_samples {
        values.push((x.clone(), top.eval_at(&reduced_point(x))?.get(&key).re));
    }
    Ok(certify(true, values))
}

pub fn x_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

/// Equivariant transverse map in normal form
/// `(x, a, s) -> (psi_bar(x, s), a b(x, s), s)` with `|b| = 1`.
/// Expressions use the variables `x1..xd` and `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub psi_bar: Vec<Expr>,
    pub b_re: Expr,
    pub b_im: Expr,
}

impl LocalMap {
    pub fn new(source_dim: usize, psi_bar: Vec<Expr>, b_re: Expr, b_im: Expr) -> Result<Self> {
        let map = LocalMap { source_dim, target_dim: psi_bar.len(), psi_bar, b_re, b_im };
        map.validate()?;
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        LocalMap {
            source_dim: dim,
            target_dim: dim,
            psi_bar: x_names(dim).iter().map(|n| Expr::var(n)).collect(),
            b_re: Expr::one(),
            b_im: Expr::zero(),
        }
    }

    /// Checks component count and that only `x1..xd, s` occur.
    pub fn validate(&self) -> Result<()> {
        if self.psi_bar.len() != self.target_dim {
            return Err(CutError::DimMismatch(format!(
                "psi_bar has {} components, target_dim is {}",
                self.psi_bar.len(),
                self.target_dim
            )));
        }
        let mut allowed = x_names(self.source_dim);
        allowed.push("s".into());
        for e in self.psi_bar.iter().chain([&self.b_re, &self.b_im]) {
            if let Some(v) = e.variables().into_iter().find(|v| !allowed.contains(v)) {
                return Err(CutError::Parse(format!("local map uses unknown variable `{v}`")));
            }
        }
        Ok(())
    }

    /// Numeric check of `|b|^2 = 1` at points `(x, s)`.
    pub fn check_unit_twist(&self, xs_points: &[Vec<f64>]) -> Result<()> {
        let mut names = x_names(self.source_dim);
        names.push("s".into());
        for p in xs_points {
            let env = Env::from_pairs(&names, p);
            let (re, im) = (self.b_re.eval(&env)?, self.b_im.eval(&env)?);
            let residual = re * re + im * im - 1.0;
            if residual.abs() > tolerance::UNIT {
                return Err(CutError::NonUnitTwist { residual, point: p.clone() });
            }
        }
        Ok(())
    }

    /// The map on the half model in coordinates `(x, theta, s)`, with the
    /// circle factor of the target embedded in `R^2`.
    pub fn half_map(&self) -> ExprMap {
        let mut vars = x_names(self.source_dim);
        vars.extend(["theta".to_string(), "s".to_string()]);
        let (c, s) = (Expr::var("theta").cos(), Expr::var("theta").sin());
        let mut comps = self.psi_bar.clone();
        comps.push(c.clone() * self.b_re.clone() - s.clone() * self.b_im.clone());
        comps.push(s * self.b_re.clone() + c * self.b_im.clone());
        comps.push(Expr::var("s"));
        ExprMap::new(vars, comps)
    }

    /// `x -> psi_bar(x, 0)`.
    pub fn boundary_base_map(&self) -> ExprMap {
        ExprMap::new(x_names(self.source_dim), self.psi_bar.iter().map(|e| e.subst_one("s", &Expr::zero())).collect())
    }

    /// Evaluates `(psi_bar, a b, s)` at `(x, theta, s)`; returns
    /// `(psi_bar, Re(a b), Im(a b), s)`.
    pub fn eval_half(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.half_map().eval(point)
    }
}

/// `(x, z) -> (psi_bar(x, |z|^2), z b(x, |z|^2))` over the variables `x1..xd, u, v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub map: ExprMap,
}

impl CutMap {
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.map.eval(point)
    }
}

pub fn cut_map(psi: &LocalMap) -> Result<CutMap> {
    psi.validate()?;
    let r2 = Expr::var("u").powi(2) + Expr::var("v").powi(2);
    let sub = |e: &Expr| e.subst_one("s", &r2);
    let (bre, bim) = (sub(&psi.b_re), sub(&psi.b_im));
    let (u, v) = (Expr::var("u"), Expr::var("v"));
    let mut comps: Vec<Expr> = psi.psi_bar.iter().map(sub).collect();
    comps.push(u.clone() * bre.clone() - v.clone() * bim.clone());
    comps.push(u * bim + v * bre);
    let mut vars = x_names(psi.source_dim);
    vars.extend(["u".to_string(), "v".to_string()]);
    Ok(CutMap { source_dim: psi.source_dim, target_dim: psi.target_dim, map: ExprMap::new(vars, comps) })
}

/// `psi2 o psi1` in normal form.
pub fn compose_maps(psi1: &LocalMap, psi2: &LocalMap) -> Result<LocalMap> {
    if psi1.target_dim != psi2.source_dim {
        return Err(CutError::DimMismatch(format!(
            "cannot compose: first map lands in dimension {}, second starts from {}",
            psi1.target_dim, psi2.source_dim
        )));
    }
    let mut sub: BTreeMap<String, Expr> = BTreeMap::new();
    for (name, e) in x_names(psi2.source_dim).into_iter().zip(&psi1.psi_bar) {
        sub.insert(name, e.clone());
    }
    let psi_bar = psi2.psi_bar.iter().map(|e| e.subst(&sub)).collect();
    let (r2, i2) = (psi2.b_re.subst(&sub), psi2.b_im.subst(&sub));
    let (r1, i1) = (psi1.b_re.clone(), psi1.b_im.clone());
    Ok(LocalMap {
        source_dim: psi1.source_dim,
        target_dim: psi2.target_dim,
        psi_bar,
        b_re: r2.clone() * r1.clone() - i2.clone() * i1.clone(),
        b_im: r2 * i1 + i2 * r1,
    })
}

/// The quotient map `(x, theta, s) -> (x, sqrt(s) cos theta, sqrt(s) sin theta)`.
pub fn collapse_point(dim: usize, p: &[f64]) -> Vec<f64> {
    let (theta, s) = (p[dim], p[dim + 1]);
    let r = s.max(0.0).sqrt();
    let mut out = p[..dim].to_vec();
    out.extend([r * theta.cos(), r * theta.sin()]);
    out
}

/// Largest `|c(psi(p)) - psi_cut(c(p))|` over half-model points `p`.
pub fn commuting_square_residual(psi: &LocalMap, cut: &CutMap, half_points: &[Vec<f64>]) -> Result<f64> {
    let d = psi.source_dim;
    let dt = psi.target_dim;
    let mut worst: f64 = 0.0;
    for p in half_points {
        let image = psi.eval_half(p)?;
        let (ar, ai, s) = (image[dt], image[dt + 1], image[dt + 2]);
        let r = s.max(0.0).sqrt();
        let mut lhs = image[..dt].to_vec();
        lhs.extend([r * ar, r * ai]);
        let rhs = cut.eval(&collapse_point(d, p))?;
        worst = worst.max(crate::verify::numeric::max_abs_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// Ranks at a boundary point `(x, theta, 0)` and its image `(x, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub point: Vec<f64>,
    pub rank_half: usize,
    pub rank_cut: usize,
    pub rank_base: usize,
    pub source_dim: usize,
    pub target_dim: usize,
}

impl RankReport {
    pub fn half_immersion(&self) -> bool {
        self.rank_half == self.source_dim + 2
    }
    pub fn cut_immersion(&self) -> bool {
        self.rank_cut == self.source_dim + 2
    }
    pub fn half_submersion(&self) -> bool {
        self.rank_half == self.target_dim + 2
    }
    pub fn cut_submersion(&self) -> bool {
        self.rank_cut == self.target_dim + 2
    }
    /// Both sides agree with `rank(d_x psi_bar(x, 0)) + 2`.
    pub fn consistent(&self) -> bool {
        self.rank_half == self.rank_base + 2 && self.rank_cut == self.rank_base + 2
    }
}

/// Rank of `d psi` at `(x, theta, 0)`, of `d psi_cut` at `(x, 0)` and of
/// `d_x psi_bar(x, 0)`.
pub fn boundary_ranks(psi: &LocalMap, x: &[f64], theta: f64) -> Result<RankReport> {
    let cut = cut_map(psi)?;
    let mut half_point = x.to_vec();
    half_point.extend([theta, 0.0]);
    let mut cut_point = x.to_vec();
    cut_point.extend([0.0, 0.0]);
    Ok(RankReport {
        point: x.to_vec(),
        rank_half: matrix_rank(&jacobian_at(&psi.half_map(), &half_point)?, tolerance::RANK),
        rank_cut: matrix_rank(&jacobian_at(&cut.map, &cut_point)?, tolerance::RANK),
        rank_base: matrix_rank(&jacobian_at(&psi.boundary_base_map(), x)?, tolerance::RANK),
        source_dim: psi.source_dim,
        target_dim: psi.target_dim,
    })
}

/// Annihilator frame `beta_1, ..., beta_k` of a distribution on the half model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFrame {
    pub forms: Vec<HalfForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub codim: usize,
    pub cut_frame: Vec<DiscForm>,
    /// `ds ^ beta_1 ^ ... ^ beta_k` nonzero at every boundary sample.
    pub transverse: bool,
    pub cut_frame_nondegenerate: bool,
    pub involutive_before: bool,
    pub involutive_after: bool,
    pub contact_before: Option<bool>,
    pub contact_after: Option<bool>,
}

fn wedge_all<C: Coefficient>(forms: &[Form<C>], dim: usize) -> Result<Form<C>> {
    let mut out = Form::function(C::from_crat(dim, CRat::one()));
    for f in forms {
        out = out.wedge(f)?;
    }
    Ok(out)
}

fn involutive<C: Coefficient>(forms: &[Form<C>], dim: usize) -> Result<bool> {
    let omega = wedge_all(forms, dim)?;
    for f in forms {
        if !f.ext_d()?.wedge(&omega)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cuts every annihilator and compares integrability and contact type on
/// both sides. Half samples are `(x, theta, s)`, disc samples `(x, u, v)`.
pub fn cut_distribution(
    frame: &DistributionFrame,
    half_samples: &[Vec<f64>],
    disc_samples: &[Vec<f64>],
) -> Result<DistributionReport> {
    let first = frame.forms.first().ok_or_else(|| CutError::ModelMismatch("empty distribution frame".into()))?;
    let d = first.dim();
    if let Some(bad) = frame.forms.iter().find(|f| f.degree() != 1 || f.dim() != d) {
        return Err(CutError::ModelMismatch(format!(
            "frame entries must be 1-forms on the same model, got degree {} dim {}",
            bad.degree(),
            bad.dim()
        )));
    }
    let omega = wedge_all(&frame.forms, d)?;
    for p in half_samples {
        if omega.eval_at(p)?.max_abs() <= tolerance::NONDEGENERATE {
            return Err(CutError::FrameDegenerate { point: p.clone() });
        }
    }
    let cut_frame = frame.forms.iter().map(cut_form).collect::<Result<Vec<_>>>()?;

    let ds = HalfForm::basis(d, d + 1);
    let transversal = ds.wedge(&omega)?;
    let mut transverse = true;
    for p in half_samples.iter().filter(|p| p[d + 1] == 0.0) {
        if transversal.eval_at(p)?.max_abs() <= tolerance::NONDEGENERATE {
            transverse = false;
        }
    }

    let cut_omega = wedge_all(&cut_frame, d)?;
    let mut cut_frame_nondegenerate = true;
    for p in disc_samples {
        if cut_omega.eval_at(p)?.max_abs() <= tolerance::NONDEGENERATE {
            cut_frame_nondegenerate = false;
        }
    }

    let k = frame.forms.len();
    let contact_case = k == 1 && (d + 2) % 2 == 1;
    let (contact_before, contact_after) = if contact_case {
        (Some(is_contact(first, half_samples)?.holds), Some(is_contact(&cut_frame[0], disc_samples)?.holds))
    } else {
        (None, None)
    };

    Ok(DistributionReport {
        codim: k,
        transverse,
        cut_frame_nondegenerate,
        involutive_before: involutive(&frame.forms, d)?,
        involutive_after: involutive(&cut_frame, d)?,
        contact_before,
        contact_after,
        cut_frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Model;
    use crate::verify::SamplePlan;

    fn hf(dim: usize, names: &[&str], c: HalfFunc) -> HalfForm {
        HalfForm::named(dim, names, c).unwrap()
    }

    fn one(d: usize) -> HalfFunc {
        HalfFunc::one(d)
    }

    #[test]
    fn substitution_identities() {
        assert_eq!(cut_form(&hf(0, &["ds", "dtheta"], one(0))).unwrap(), ds_dtheta_image(0));
        assert_eq!(cut_form(&hf(0, &["dtheta"], HalfFunc::s(0))).unwrap(), s_dtheta_image(0));
        let dx_ds = cut_form(&hf(1, &["dx1", "ds"], one(1))).unwrap();
        assert_eq!(dx_ds, DiscForm::basis(1, 0).wedge(&ds_image(1)).unwrap());
        assert_eq!(cut_form(&hf(0, &["ds", "dtheta"], one(0))).unwrap().to_string(), "2 du^dv");
    }

    #[test]
    fn cut_errors() {
        let err = cut_form(&hf(0, &["dtheta"], one(0))).unwrap_err();
        assert_eq!(err.kind(), "NotBasicInvariant");
        let err = cut_form(&hf(1, &["dx1"], HalfFunc::sqrt_s(1))).unwrap_err();
        assert_eq!(err.kind(), "NonDescendingCoefficient");
    }

    #[test]
    fn general_route_matches_strict_route() {
        let beta = hf(1, &["ds"], HalfFunc::x(1, 0))
            .add(&hf(1, &["dtheta"], &HalfFunc::s(1) * &HalfFunc::s(1)))
            .unwrap()
            .add(&hf(1, &["dx1"], HalfFunc::s(1)))
            .unwrap();
        assert_eq!(cut_form_general(&beta).unwrap(), cut_form(&beta).unwrap());
        let beta2 = hf(1, &["dx1", "ds", "dtheta"], HalfFunc::s(1));
        assert_eq!(cut_form_general(&beta2).unwrap(), cut_form(&beta2).unwrap());
    }

    #[test]
    fn general_route_handles_non_invariant_pullbacks() {
        // z as a function
        let z = HalfForm::function(HalfFunc::monomial(0, vec![], 1, 1, CRat::one()));
        assert_eq!(cut_form_general(&z).unwrap(), DiscForm::function(DiscFunc::z(0)));
        // pullback of z du: e^{i theta} cos(theta)/2 ds - s e^{i theta} sin(theta) dtheta
        let e = HalfFunc::exp_i_theta(0, 1);
        let ds_part = (&e * &HalfFunc::cos_theta(0, 1)).scale(&CRat::real(q_frac(1, 2)));
        let dt_part = -&(&(&e * &HalfFunc::sin_theta(0, 1)) * &HalfFunc::s(0));
        let beta = hf(0, &["ds"], ds_part).add(&hf(0, &["dtheta"], dt_part)).unwrap();
        let expected = DiscForm::named(0, &["du"], DiscFunc::z(0)).unwrap();
        assert_eq!(cut_form_general(&beta).unwrap(), expected);
        // dtheta alone is singular at the origin
        assert!(cut_form_general(&hf(0, &["dtheta"], one(0))).is_err());
    }

    #[test]
    fn reduced_form_examples() {
        let w = hf(2, &["dx1", "dx2"], one(2)).add(&hf(2, &["ds", "dtheta"], one(2))).unwrap();
        let red = reduced_form(&w).unwrap();
        assert_eq!(red, DiscForm::named(2, &["dx1", "dx2"], DiscFunc::one(2)).unwrap());
        assert_eq!(red, restrict_to_reduced(&cut_form(&w).unwrap()));
        assert!(reduced_form(&hf(0, &["dtheta"], HalfFunc::s(0))).unwrap().is_zero());
        let b = hf(1, &["dx1"], HalfFunc::x(1, 0));
        assert_eq!(reduced_form(&b).unwrap(), DiscForm::named(1, &["dx1"], DiscFunc::x(1, 0)).unwrap());
    }

    #[test]
    fn momentum_examples() {
        let w = hf(0, &["ds", "dtheta"], one(0));
        assert!(momentum_check(&w, &HalfFunc::s(0)).unwrap());
        assert!(!momentum_check(&w, &HalfFunc::s(0).pow(2)).unwrap());
        assert!(momentum_check(&hf(2, &["dx1", "dx2"], one(2)), &HalfFunc::zero(2)).unwrap());
        let beta = hf(1, &["dx1"], one(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
        assert_eq!(contact_momentum(&beta).unwrap(), HalfFunc::s(1));
        assert!(contact_momentum(&hf(1, &["dx1"], one(1))).unwrap().is_zero());
        assert_eq!(contact_momentum(&hf(0, &["dtheta"], one(0))).unwrap(), one(0));
    }

    #[test]
    fn symplectic_and_contact_examples() {
        let half0 = SamplePlan::new(Model::Half, 0, 1).points();
        let disc0 = SamplePlan::new(Model::Disc, 0, 1).points();
        assert!(is_symplectic(&hf(0, &["ds", "dtheta"], one(0)), &half0).unwrap().holds);
        assert!(is_symplectic(&ds_dtheta_image(0), &disc0).unwrap().holds);
        let degenerate = hf(0, &["ds", "dtheta"], HalfFunc::s(0));
        let cert = is_symplectic(&degenerate, &half0).unwrap();
        assert!(!cert.holds);
        assert!(!cert.witnesses.is_empty());

        let half1 = SamplePlan::new(Model::Half, 1, 2).points();
        let disc1 = SamplePlan::new(Model::Disc, 1, 2).points();
        let beta = hf(1, &["dx1"], one(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
        assert!(is_contact(&beta, &half1).unwrap().holds);
        let cut = cut_form(&beta).unwrap();
        assert_eq!(cut.to_string(), "dx1 - v du + u dv");
        assert!(is_contact(&cut, &disc1).unwrap().holds);
        assert!(!is_contact(&hf(1, &["dx1"], one(1)), &half1).unwrap().holds);
        assert_eq!(is_contact(&beta.wedge(&beta).unwrap(), &half1).unwrap_err().kind(), "ModelMismatch");
        assert_eq!(is_symplectic(&hf(1, &["dx1", "ds"], one(1)), &half1).unwrap_err().kind(), "DimensionParity");
    }

    #[test]
    fn cut_map_examples() {
        let id = cut_map(&LocalMap::identity(1)).unwrap();
        assert_eq!(id.eval(&[0.3, 0.1, -0.2]).unwrap(), vec![0.3, 0.1, -0.2]);
        let rot = LocalMap::new(1, vec![Expr::var("x1")], Expr::zero(), Expr::one()).unwrap();
        let out = cut_map(&rot).unwrap().eval(&[0.3, 0.1, -0.2]).unwrap();
        assert_eq!(out, vec![0.3, 0.2, 0.1]);
        let shear = LocalMap::new(1, vec![Expr::var("x1") + Expr::var("s")], Expr::one(), Expr::zero()).unwrap();
        let out = cut_map(&shear).unwrap().eval(&[0.3, 0.1, -0.2]).unwrap();
        assert!((out[0] - (0.3 + 0.05)).abs() < 1e-15);
    }

    #[test]
    fn composition_examples() {
        let i = LocalMap::new(1, vec![Expr::var("x1")], Expr::zero(), Expr::one()).unwrap();
        let ii = compose_maps(&i, &i).unwrap();
        assert_eq!(ii.b_re, Expr::c(-1));
        assert!(ii.b_im.is_zero());
        let id = LocalMap::identity(1);
        assert_eq!(compose_maps(&id, &i).unwrap(), i);
        let wide = LocalMap::identity(2);
        assert_eq!(compose_maps(&i, &wide).unwrap_err().kind(), "DimMismatch");
    }

    #[test]
    fn commuting_square_and_ranks() {
        let psi = LocalMap::new(
            1,
            vec![Expr::var("x1") + Expr::var("s") * Expr::var("x1")],
            Expr::var("s").cos(),
            Expr::var("s").sin(),
        )
        .unwrap();
        let pts = SamplePlan::new(Model::Half, 1, 9).points();
        let cut = cut_map(&psi).unwrap();
        assert!(commuting_square_residual(&psi, &cut, &pts).unwrap() < tolerance::COMMUTING);
        let r = boundary_ranks(&psi, &[0.2], 0.4).unwrap();
        assert!(r.consistent() && r.half_immersion() && r.cut_immersion());
        let fold = LocalMap::new(1, vec![Expr::var("x1").powi(2)], Expr::one(), Expr::zero()).unwrap();
        let r = boundary_ranks(&fold, &[0.0], 0.4).unwrap();
        assert!(r.consistent() && !r.half_immersion() && !r.cut_immersion());
    }

    #[test]
    fn non_unit_twist_rejected() {
        let psi = LocalMap::new(0, vec![], Expr::c(2), Expr::zero()).unwrap();
        assert_eq!(psi.check_unit_twist(&[vec![0.1]]).unwrap_err().kind(), "NonUnitTwist");
    }

    #[test]
    fn distribution_examples() {
        let half2 = SamplePlan::new(Model::Half, 2, 4).points();
        let disc2 = SamplePlan::new(Model::Disc, 2, 4).points();
        let r = cut_distribution(&DistributionFrame { forms: vec![hf(2, &["dx1"], one(2))] }, &half2, &disc2).unwrap();
        assert_eq!(r.cut_frame, vec![DiscForm::basis(2, 0)]);
        assert!(r.involutive_before && r.involutive_after && r.transverse);

        let half1 = SamplePlan::new(Model::Half, 1, 4).points();
        let disc1 = SamplePlan::new(Model::Disc, 1, 4).points();
        let beta = hf(1, &["dx1"], one(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
        let r = cut_distribution(&DistributionFrame { forms: vec![beta] }, &half1, &disc1).unwrap();
        assert_eq!((r.contact_before, r.contact_after), (Some(true), Some(true)));
        assert!(!r.involutive_before && !r.involutive_after);

        let half0 = SamplePlan::new(Model::Half, 0, 4).points();
        let disc0 = SamplePlan::new(Model::Disc, 0, 4).points();
        let r = cut_distribution(&DistributionFrame { forms: vec![hf(0, &["ds"], one(0))] }, &half0, &disc0).unwrap();
        assert_eq!(r.cut_frame, vec![ds_image(0)]);
        assert!(r.involutive_before && r.involutive_after);
        assert!(!r.transverse);
    }
}
