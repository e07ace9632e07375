//! Inverse constructions: pullback along the radial-squared blowdown,
//! lifts of maps to the radial and radial-squared blowups, and the polar
//! diffeomorphism correspondence.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cutting::{cut_form, cut_form_general};
use crate::error::{CutError, Result};
use crate::expr::{Env, Expr, ExprMap};
use crate::forms::{DiscForm, HalfForm};
use crate::funcalg::{lift_function, HalfFunc};
use crate::rational::{q_frac, CRat};
use crate::tolerance;
use crate::verify::numeric::{jacobian_at, max_abs_diff, smallest_singular_value};

/// Pullback along `(x, theta, s) -> (x, sqrt(s) e^(i theta))`.
///
/// Uses `2 sqrt(s) du = cos(theta) ds - 2s sin(theta) dtheta` and
/// `2 sqrt(s) dv = sin(theta) ds + 2s cos(theta) dtheta`: a term with `j`
/// factors among `du, dv` is multiplied by `(2 sqrt(s))^(2-j)`, so the sum is
/// `4s` times the pullback and is divided back after cancellation.
pub fn blowup_pullback(gamma: &DiscForm) -> Result<HalfForm> {
    let d = gamma.dim();
    let (t, s) = (d, d + 1);
    let named = |names: &[&str], c: HalfFunc| HalfForm::named(d, names, c).expect("fixed names");
    let two = CRat::from_int(2);
    let two_s = HalfFunc::s(d).scale(&two);
    let pu =
        named(&["ds"], HalfFunc::cos_theta(d, 1)).add(&named(&["dtheta"], -&(&two_s * &HalfFunc::sin_theta(d, 1))))?;
    let pv = named(&["ds"], HalfFunc::sin_theta(d, 1)).add(&named(&["dtheta"], &two_s * &HalfFunc::cos_theta(d, 1)))?;
    let weights = [HalfFunc::s(d).scale(&CRat::from_int(4)), HalfFunc::sqrt_s(d).scale(&two), HalfFunc::one(d)];

    let mut total = HalfForm::zero(d, gamma.degree());
    for (key, c) in gamma.terms() {
        let xs: Vec<usize> = key.iter().copied().filter(|&i| i < d).collect();
        let (has_u, has_v) = (key.contains(&t), key.contains(&s));
        let j = has_u as usize + has_v as usize;
        let coeff = &lift_function(c) * &weights[j];
        let mut piece = HalfForm::monomial(d, &xs, coeff);
        if has_u {
            piece = piece.wedge(&pu)?;
        }
        if has_v {
            piece = piece.wedge(&pv)?;
        }
        total = total.add(&piece)?;
    }
    let quarter = CRat::real(q_frac(1, 4));
    total.map_coefficients(|k, c| {
        c.divide_by_s().map(|f| f.scale(&quarter)).ok_or_else(|| {
            CutError::ResidualNegativePower(format!(
                "coefficient of {} in the pullback is ({c})/(4s)",
                HalfForm::zero(d, k.len()).key_label(k)
            ))
        })
    })
}

/// `blowup_pullback(cut_form(beta)) == beta`.
pub fn roundtrip_check(beta: &HalfForm) -> Result<bool> {
    Ok(blowup_pullback(&cut_form(beta)?)? == *beta)
}

/// `cut(blowup_pullback(gamma)) == gamma`, or `None` when the pullback is not
/// a smooth half-model form.
pub fn disc_roundtrip_check(gamma: &DiscForm) -> Result<Option<bool>> {
    match blowup_pullback(gamma) {
        Ok(beta) => Ok(Some(cut_form_general(&beta)? == *gamma)),
        Err(CutError::ResidualNegativePower(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Data of a map near `{x = 0}` written as `phi(t, x) = (phi1(t, x), A(t, x) x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlowupLiftInput {
    /// `phi1` and `A` are expressions in `t1..tm, x1..xk`.
    Cartesian { t_dim: usize, fiber_dim: usize, phi1: Vec<Expr>, a: Vec<Vec<Expr>> },
    /// `phi1` and `A` are expressions in `t1..tm, s`, standing for
    /// `phi1(t, |x|^2)` and `A(t, |x|^2)`.
    Invariant { t_dim: usize, fiber_dim: usize, phi1: Vec<Expr>, a: Vec<Vec<Expr>> },
}

impl BlowupLiftInput {
    pub fn t_dim(&self) -> usize {
        match self {
            BlowupLiftInput::Cartesian { t_dim, .. } | BlowupLiftInput::Invariant { t_dim, .. } => *t_dim,
        }
    }

    pub fn fiber_dim(&self) -> usize {
        match self {
            BlowupLiftInput::Cartesian { fiber_dim, .. } | BlowupLiftInput::Invariant { fiber_dim, .. } => *fiber_dim,
        }
    }

    fn parts(&self) -> (&Vec<Expr>, &Vec<Vec<Expr>>) {
        match self {
            BlowupLiftInput::Cartesian { phi1, a, .. } | BlowupLiftInput::Invariant { phi1, a, .. } => (phi1, a),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (phi1, a) = self.parts();
        let k = self.fiber_dim();
        if a.len() != k || a.iter().any(|row| row.len() != k) {
            return Err(CutError::DimMismatch(format!("A must be {k}x{k}")));
        }
        let mut allowed = names("t", self.t_dim());
        match self {
            BlowupLiftInput::Cartesian { .. } => allowed.extend(names("x", k)),
            BlowupLiftInput::Invariant { .. } => allowed.push("s".into()),
        }
        for e in phi1.iter().chain(a.iter().flatten()) {
            if let Some(v) = e.variables().into_iter().find(|v| !allowed.contains(v)) {
                return Err(CutError::Parse(format!("lift input uses unknown variable `{v}`")));
            }
        }
        Ok(())
    }

    /// `(phi1, A)` as expressions in `t, x`.
    pub fn cartesian_parts(&self) -> (Vec<Expr>, Vec<Vec<Expr>>) {
        let (phi1, a) = self.parts();
        match self {
            BlowupLiftInput::Cartesian { .. } => (phi1.clone(), a.clone()),
            BlowupLiftInput::Invariant { .. } => {
                let r2 = Expr::sum(names("x", self.fiber_dim()).iter().map(|x| Expr::var(x).powi(2)).collect());
                let sub = |e: &Expr| e.subst_one("s", &r2);
                (phi1.iter().map(sub).collect(), a.iter().map(|row| row.iter().map(sub).collect()).collect())
            }
        }
    }

    /// The map `phi(t, x) = (phi1, A x)` over `t1..tm, x1..xk`.
    pub fn phi_map(&self) -> ExprMap {
        let (phi1, a) = self.cartesian_parts();
        let xs: Vec<Expr> = names("x", self.fiber_dim()).iter().map(|n| Expr::var(n)).collect();
        let mut comps = phi1;
        comps.extend(mat_vec(&a, &xs));
        let mut vars = names("t", self.t_dim());
        vars.extend(names("x", self.fiber_dim()));
        ExprMap::new(vars, comps)
    }

    /// `A(t, 0)` must be invertible at every sampled `t`.
    pub fn check_nondegenerate(&self, t_samples: &[Vec<f64>]) -> Result<()> {
        let (_, a) = self.cartesian_parts();
        let k = self.fiber_dim();
        for t in t_samples {
            let mut env = Env::from_pairs(&names("t", self.t_dim()), t);
            for x in names("x", k) {
                env.set(&x, 0.0);
            }
            let m = eval_square(&a, &env)?;
            let sigma = smallest_singular_value(&m);
            if sigma <= tolerance::RANK {
                return Err(CutError::DegenerateA { sigma, point: t.clone() });
            }
        }
        Ok(())
    }

    /// Numeric probe that `phi1` and `A` depend on `x` only through `|x|^2`.
    /// Returns the largest discrepancy between `x` and a rotated copy.
    pub fn invariance_defect(&self, seed: u64, trials: usize) -> Result<f64> {
        let (phi1, a) = self.cartesian_parts();
        let (m, k) = (self.t_dim(), self.fiber_dim());
        if k < 2 {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tn, xn) = (names("t", m), names("x", k));
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let t: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let x: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let mut y = x.clone();
            let (i, j) = (rng.gen_range(0..k), rng.gen_range(0..k - 1));
            let j = if j >= i { j + 1 } else { j };
            let angle: f64 = rng.gen_range(0.3..TAU - 0.3);
            y[i] = angle.cos() * x[i] - angle.sin() * x[j];
            y[j] = angle.sin() * x[i] + angle.cos() * x[j];
            let env_of = |p: &[f64]| {
                let mut env = Env::from_pairs(&tn, &t);
                for (n, v) in xn.iter().zip(p) {
                    env.set(n, *v);
                }
                env
            };
            let (ex, ey) = (env_of(&x), env_of(&y));
            for e in phi1.iter().chain(a.iter().flatten()) {
                worst = worst.max((e.eval(&ex)? - e.eval(&ey)?).abs());
            }
        }
        Ok(worst)
    }

    /// Invariant form `(phi1(t, s), A(t, s))`; a Cartesian input is read off
    /// along `x = (sqrt(s), 0, ..., 0)` after it passes the invariance probe.
    pub fn to_invariant(&self, seed: u64) -> Result<BlowupLiftInput> {
        match self {
            BlowupLiftInput::Invariant { .. } => Ok(self.clone()),
            BlowupLiftInput::Cartesian { t_dim, fiber_dim, phi1, a } => {
                let defect = self.invariance_defect(seed, 32)?;
                if defect > tolerance::INVARIANCE {
                    return Err(CutError::NonInvariantInput(format!(
                        "phi1 or A changes by {defect:e} under a rotation of x"
                    )));
                }
                let mut sub = BTreeMap::new();
                for (i, n) in names("x", *fiber_dim).into_iter().enumerate() {
                    sub.insert(n, if i == 0 { Expr::var("s").sqrt() } else { Expr::zero() });
                }
                Ok(BlowupLiftInput::Invariant {
                    t_dim: *t_dim,
                    fiber_dim: *fiber_dim,
                    phi1: phi1.iter().map(|e| e.subst(&sub)).collect(),
                    a: a.iter().map(|row| row.iter().map(|e| e.subst(&sub)).collect()).collect(),
                })
            }
        }
    }
}

fn mat_vec(a: &[Vec<Expr>], v: &[Expr]) -> Vec<Expr> {
    a.iter().map(|row| Expr::sum(row.iter().zip(v).map(|(e, x)| e.clone() * x.clone()).collect())).collect()
}

fn eval_square(a: &[Vec<Expr>], env: &Env) -> Result<DMatrix<f64>> {
    let k = a.len();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = a[i][j].eval(env)?;
        }
    }
    Ok(m)
}

fn norm_squared(v: &[Expr]) -> Expr {
    Expr::sum(v.iter().map(|e| e.clone().powi(2)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    /// `(t, u, r)` with blowdown `(t, r u)`.
    Radial,
    /// `(t, u, s)` with blowdown `(t, sqrt(s) u)`.
    RadialSquared,
}

/// Lift of `phi` to the blowup, as expressions in `t1..tm, u1..uk` and the
/// boundary coordinate (`r` or `s`). Points use `u` on the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedMap {
    pub kind: LiftKind,
    pub t_dim: usize,
    pub fiber_dim: usize,
    pub map: ExprMap,
}

impl LiftedMap {
    pub fn boundary_var(&self) -> &'static str {
        match self.kind {
            LiftKind::Radial => "r",
            LiftKind::RadialSquared => "s",
        }
    }

    /// The blowdown `(t, u, r) -> (t, r u)` or `(t, u, s) -> (t, sqrt(s) u)`.
    pub fn blow_down(&self, p: &[f64]) -> Vec<f64> {
        let (m, k) = (self.t_dim, self.fiber_dim);
        blow_down(self.kind, m, k, p)
    }
}

fn blow_down(kind: LiftKind, m: usize, k: usize, p: &[f64]) -> Vec<f64> {
    let c = p[m + k];
    let scale = match kind {
        LiftKind::Radial => c,
        LiftKind::RadialSquared => c.max(0.0).sqrt(),
    };
    let mut out = p[..m].to_vec();
    out.extend(p[m..m + k].iter().map(|u| scale * u));
    out
}

fn lift_vars(m: usize, k: usize, last: &str) -> Vec<String> {
    let mut vars = names("t", m);
    vars.extend(names("u", k));
    vars.push(last.into());
    vars
}

/// Deterministic sample points `(t, u, c)` with `|u| = 1` and `c` in
/// `[0, c_max]`; a quarter of them lie on the boundary `c = 0`.
pub fn lift_samples(t_dim: usize, fiber_dim: usize, seed: u64, count: usize, c_max: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut p: Vec<f64> = (0..t_dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let mut u: Vec<f64> = (0..fiber_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
            u.iter_mut().for_each(|x| *x /= norm);
            p.extend(u);
            p.push(if i % 4 == 0 { 0.0 } else { rng.gen_range(0.0..c_max) });
            p
        })
        .collect()
}

fn t_samples_of(points: &[Vec<f64>], t_dim: usize) -> Vec<Vec<f64>> {
    points.iter().map(|p| p[..t_dim].to_vec()).collect()
}

/// `psi(t, u, r) = (phi1(t, ru), A(t, ru)u / |A(t, ru)u|, r |A(t, ru)u|)`.
pub fn lift_map_radial(input: &BlowupLiftInput, check_points: &[Vec<f64>]) -> Result<LiftedMap> {
    input.validate()?;
    let (m, k) = (input.t_dim(), input.fiber_dim());
    input.check_nondegenerate(&t_samples_of(check_points, m))?;
    let (phi1, a) = input.cartesian_parts();
    let mut sub = BTreeMap::new();
    for (x, u) in names("x", k).into_iter().zip(names("u", k)) {
        sub.insert(x, Expr::var("r") * Expr::var(&u));
    }
    let a_r: Vec<Vec<Expr>> = a.iter().map(|row| row.iter().map(|e| e.subst(&sub)).collect()).collect();
    let us: Vec<Expr> = names("u", k).iter().map(|n| Expr::var(n)).collect();
    let au = mat_vec(&a_r, &us);
    let norm = norm_squared(&au).sqrt();
    let mut comps: Vec<Expr> = phi1.iter().map(|e| e.subst(&sub)).collect();
    comps.extend(au.iter().map(|e| e.clone().divide(norm.clone())));
    comps.push(Expr::var("r") * norm);
    Ok(LiftedMap { kind: LiftKind::Radial, t_dim: m, fiber_dim: k, map: ExprMap::new(lift_vars(m, k, "r"), comps) })
}

/// `psi(t, u, s) = (phi1(t, s), A(t, s)u / |A(t, s)u|, s |A(t, s)u|^2)`.
/// Cartesian inputs must pass the rotation-invariance probe.
pub fn lift_map_radial_squared(input: &BlowupLiftInput, check_points: &[Vec<f64>], seed: u64) -> Result<LiftedMap> {
    input.validate()?;
    let inv = input.to_invariant(seed)?;
    let (m, k) = (inv.t_dim(), inv.fiber_dim());
    inv.check_nondegenerate(&t_samples_of(check_points, m))?;
    let (phi1, a) = inv.parts();
    let us: Vec<Expr> = names("u", k).iter().map(|n| Expr::var(n)).collect();
    let au = mat_vec(a, &us);
    let n2 = norm_squared(&au);
    let mut comps = phi1.clone();
    comps.extend(au.iter().map(|e| e.clone().divide(n2.clone().sqrt())));
    comps.push(Expr::var("s") * n2);
    Ok(LiftedMap {
        kind: LiftKind::RadialSquared,
        t_dim: m,
        fiber_dim: k,
        map: ExprMap::new(lift_vars(m, k, "s"), comps),
    })
}

/// The radial formula rewritten with `r = sqrt(s)`, for any input. For inputs
/// that are not rotation invariant this is the would-be lift that fails to be
/// smooth along `s = 0`.
pub fn naive_radial_squared_lift(input: &BlowupLiftInput) -> Result<LiftedMap> {
    input.validate()?;
    let radial = lift_map_radial(input, &[])?;
    let root = Expr::var("s").sqrt();
    let comps = radial.map.comps.iter().map(|e| e.subst_one("r", &root)).collect();
    let (m, k) = (input.t_dim(), input.fiber_dim());
    Ok(LiftedMap {
        kind: LiftKind::RadialSquared,
        t_dim: m,
        fiber_dim: k,
        map: ExprMap::new(lift_vars(m, k, "s"), comps),
    })
}

/// Largest `|blowdown(psi(p)) - phi(blowdown(p))|` over the points.
pub fn lift_square_residual(lifted: &LiftedMap, input: &BlowupLiftInput, points: &[Vec<f64>]) -> Result<f64> {
    let phi = input.phi_map();
    let (m, k) = (lifted.t_dim, lifted.fiber_dim);
    let p_out = phi.output_dim() - k;
    let mut worst: f64 = 0.0;
    for p in points {
        let image = lifted.map.eval(p)?;
        let mut as_point = image[..p_out].to_vec();
        as_point.extend_from_slice(&image[p_out..]);
        let lhs = blow_down(lifted.kind, p_out, k, &as_point);
        let rhs = phi.eval(&lifted.blow_down(p))?;
        let _ = m;
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// For radial lifts: the last component vanishes on `r = 0` and has positive
/// `r`-derivative there. Returns the smallest derivative seen.
pub fn boundary_defining_check(lifted: &LiftedMap, points: &[Vec<f64>]) -> Result<(bool, f64)> {
    let last = lifted.map.comps.len() - 1;
    let col = lifted.map.vars.len() - 1;
    let mut ok = true;
    let mut min_deriv = f64::INFINITY;
    for p in points {
        let mut q = p.clone();
        q[col] = 0.0;
        if lifted.map.eval(&q)?[last] != 0.0 {
            ok = false;
        }
        let dr = jacobian_at(&lifted.map, &q)?[(last, col)];
        min_deriv = min_deriv.min(dr);
    }
    Ok((ok && min_deriv > 0.0, min_deriv))
}

/// Difference-quotient smoothness probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub smooth: bool,
    /// Largest quotient mismatch at the scale where it is smallest.
    pub mismatch: f64,
}

const PROBE_SCALES: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

type Eval<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + 'a;

fn shifted(p: &[f64], d: &[f64], h: f64) -> Vec<f64> {
    p.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

fn unit_dir(n: usize, parts: &[(usize, f64)]) -> Vec<f64> {
    let mut d = vec![0.0; n];
    for &(i, w) in parts {
        d[i] += w;
    }
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.iter().map(|x| x / norm).collect()
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Two-sided probe at an interior point along 8 rays (4 directions in the
/// plane of coordinates `a, b` and their negatives). For each scale `h`
/// compares `Q(h, d) + Q(h, -d)` with 0 (first order) and the second-order
/// quotients `S(h, d)`, `S(h, -d)` with each other; a smooth map drives both
/// to zero as `h` shrinks. Flags non-smoothness when the mismatch stays above
/// the tolerance at the scales `1e-3` and `1e-4`.
pub fn probe_two_sided(f: &Eval<'_>, p: &[f64], plane: (usize, usize)) -> Result<ProbeReport> {
    let n = p.len();
    let f0 = f(p)?;
    let dirs: Vec<Vec<f64>> = (0..4)
        .map(|j| {
            let a = j as f64 * PI / 4.0;
            unit_dir(n, &[(plane.0, a.cos()), (plane.1, a.sin())])
        })
        .collect();
    let quotient = |d: &[f64], h: f64| -> Result<Vec<f64>> {
        Ok(f(&shifted(p, d, h))?.iter().zip(&f0).map(|(a, b)| (a - b) / h).collect())
    };
    let h_min = PROBE_SCALES[PROBE_SCALES.len() - 1];
    let mut per_scale = Vec::new();
    for &h in &PROBE_SCALES[1..3] {
        let mut worst: f64 = 0.0;
        for d in &dirs {
            let nd: Vec<f64> = d.iter().map(|x| -x).collect();
            let (qp, qm) = (quotient(d, h)?, quotient(&nd, h)?);
            let odd: Vec<f64> = qp.iter().zip(&qm).map(|(a, b)| a + b).collect();
            worst = worst.max(vec_norm(&odd));
            let (lp, lm) = (quotient(d, h_min)?, quotient(&nd, h_min)?);
            let lin: Vec<f64> = lp.iter().zip(&lm).map(|(a, b)| (a - b) / 2.0).collect();
            let s_plus: Vec<f64> = qp.iter().zip(&lin).map(|(q, l)| (q - l) / h).collect();
            let s_minus: Vec<f64> = qm.iter().zip(&lin).map(|(q, l)| (q + l) / h).collect();
            let even: Vec<f64> = s_plus.iter().zip(&s_minus).map(|(a, b)| a - b).collect();
            worst = worst.max(vec_norm(&even));
        }
        per_scale.push(worst);
    }
    let mismatch = per_scale.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ProbeReport { smooth: mismatch <= tolerance::SMOOTHNESS, mismatch })
}

/// One-sided probe at a boundary point where coordinate `normal` is 0, along
/// 8 rays pointing into the half-space. Successive first-order quotients
/// must settle (Cauchy check); flags non-smoothness when consecutive
/// quotients still differ by more than the tolerance at the two finest pairs
/// of scales.
pub fn probe_one_sided(f: &Eval<'_>, p: &[f64], normal: usize) -> Result<ProbeReport> {
    let n = p.len();
    let f0 = f(p)?;
    let tangential: Vec<usize> = (0..n).filter(|&i| i != normal).take(2).collect();
    let dirs: Vec<Vec<f64>> = (0..8)
        .map(|j| {
            let a = j as f64 * TAU / 8.0;
            let mut parts = vec![(normal, 1.0)];
            if let Some(&i) = tangential.first() {
                parts.push((i, 0.5 * a.cos()));
            }
            if let Some(&i) = tangential.get(1) {
                parts.push((i, 0.5 * a.sin()));
            }
            unit_dir(n, &parts)
        })
        .collect();
    let mut per_pair = vec![0.0f64; PROBE_SCALES.len() - 1];
    for d in &dirs {
        let quotients = PROBE_SCALES
            .iter()
            .map(|&h| Ok(f(&shifted(p, d, h))?.iter().zip(&f0).map(|(a, b)| (a - b) / h).collect()))
            .collect::<Result<Vec<Vec<f64>>>>()?;
        for (i, pair) in quotients.windows(2).enumerate() {
            let diff: Vec<f64> = pair[0].iter().zip(&pair[1]).map(|(a, b)| a - b).collect();
            per_pair[i] = per_pair[i].max(vec_norm(&diff));
        }
    }
    let mismatch = per_pair[1..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ProbeReport { smooth: mismatch <= tolerance::SMOOTHNESS, mismatch })
}

/// One-sided probe of a lifted map at `(t, u, 0)`.
pub fn probe_lift_at_boundary(lifted: &LiftedMap, point: &[f64]) -> Result<ProbeReport> {
    let last = lifted.map.vars.len() - 1;
    let f = |p: &[f64]| lifted.map.eval(p);
    probe_one_sided(&f, point, last)
}

/// `psi(u, s) = (a(s) u, g(s) s)` on the radial-squared blowup of the plane
/// and `phi(z) = sqrt(g(|z|^2)) a(|z|^2) z`. Expressions in `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarDiffeoPair {
    pub a_re: Expr,
    pub a_im: Expr,
    pub g: Expr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarReport {
    /// Largest `|E(psi(u, s)) - phi(E(u, s))|` with `E(u, s) = sqrt(s) u`.
    pub commuting_residual: f64,
    /// Smallest `|det d psi|` over the samples.
    pub min_abs_det: f64,
    pub phi_probe: ProbeReport,
    pub samples: usize,
}

impl PolarDiffeoPair {
    fn check(&self, s_values: &[f64]) -> Result<()> {
        for &s in s_values {
            let env = Env::new().with("s", s);
            let (re, im) = (self.a_re.eval(&env)?, self.a_im.eval(&env)?);
            let residual = re * re + im * im - 1.0;
            if residual.abs() > tolerance::UNIT {
                return Err(CutError::NonUnitTwist { residual, point: vec![s] });
            }
            let g = self.g.eval(&env)?;
            if g <= 0.0 {
                return Err(CutError::NonPositiveFactor { value: g, s });
            }
        }
        Ok(())
    }

    /// `psi` over `(u1, u2, s)`.
    pub fn psi_map(&self) -> ExprMap {
        let (u1, u2) = (Expr::var("u1"), Expr::var("u2"));
        ExprMap::new(
            vec!["u1".into(), "u2".into(), "s".into()],
            vec![
                self.a_re.clone() * u1.clone() - self.a_im.clone() * u2.clone(),
                self.a_im.clone() * u1 + self.a_re.clone() * u2,
                self.g.clone() * Expr::var("s"),
            ],
        )
    }

    /// `phi` over `(u, v)`.
    pub fn phi_map(&self) -> ExprMap {
        let r2 = Expr::var("u").powi(2) + Expr::var("v").powi(2);
        let sub = |e: &Expr| e.subst_one("s", &r2);
        let (ar, ai, root) = (sub(&self.a_re), sub(&self.a_im), sub(&self.g).sqrt());
        let (u, v) = (Expr::var("u"), Expr::var("v"));
        ExprMap::new(
            vec!["u".into(), "v".into()],
            vec![root.clone() * (ar.clone() * u.clone() - ai.clone() * v.clone()), root * (ai * u + ar * v)],
        )
    }
}

/// Checks `E o psi = phi o E`, invertibility of `d psi` and smoothness of
/// `phi` at the origin on samples `(angle, s)`.
pub fn polar_correspondence(pair: &PolarDiffeoPair, samples: &[(f64, f64)]) -> Result<PolarReport> {
    let s_values: Vec<f64> = samples.iter().map(|&(_, s)| s).collect();
    pair.check(&s_values)?;
    let (psi, phi) = (pair.psi_map(), pair.phi_map());
    let mut residual: f64 = 0.0;
    let mut min_det = f64::INFINITY;
    for &(angle, s) in samples {
        let p = [angle.cos(), angle.sin(), s];
        let image = psi.eval(&p)?;
        let root = image[2].max(0.0).sqrt();
        let lhs = [root * image[0], root * image[1]];
        let rhs = phi.eval(&[s.sqrt() * p[0], s.sqrt() * p[1]])?;
        residual = residual.max(max_abs_diff(&lhs, &rhs));
        min_det = min_det.min(jacobian_at(&psi, &p)?.determinant().abs());
    }
    let f = |p: &[f64]| phi.eval(p);
    let phi_probe = probe_two_sided(&f, &[0.0, 0.0], (0, 1))?;
    Ok(PolarReport { commuting_residual: residual, min_abs_det: min_det, phi_probe, samples: samples.len() })
}

/// Ordinary polar coordinates: `psi(u, r) = (a(r) u, r)` corresponds to
/// `phi(z) = a(|z|) z`. Probes `phi` at the origin; `a` is given in `r`.
pub fn ordinary_polar_probe(a_re: &Expr, a_im: &Expr) -> Result<ProbeReport> {
    let r = (Expr::var("u").powi(2) + Expr::var("v").powi(2)).sqrt();
    let (ar, ai) = (a_re.subst_one("r", &r), a_im.subst_one("r", &r));
    let (u, v) = (Expr::var("u"), Expr::var("v"));
    let phi = ExprMap::new(
        vec!["u".into(), "v".into()],
        vec![ar.clone() * u.clone() - ai.clone() * v.clone(), ai * u + ar * v],
    );
    let f = |p: &[f64]| phi.eval(p);
    probe_two_sided(&f, &[0.0, 0.0], (0, 1))
}

/// Default `(angle, s)` samples for the polar correspondence, `s = 0` included.
pub fn polar_samples(seed: u64, count: usize, s_max: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| (rng.gen_range(0.0..TAU), if i % 5 == 0 { 0.0 } else { rng.gen_range(0.0..s_max) })).collect()
}
