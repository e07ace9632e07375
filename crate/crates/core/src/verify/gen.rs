//! Random generators for property trials.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::blowup::BlowupLiftInput;
use crate::cutting::{x_names, LocalMap};
use crate::expr::Expr;
use crate::forms::{DiscForm, HalfForm};
use crate::funcalg::{DiscFunc, HalfFunc};
use crate::rational::{q, q_frac, CRat};

pub type Rng8 = ChaCha8Rng;

pub fn small_q(rng: &mut Rng8) -> crate::rational::Q {
    let mut n = rng.gen_range(-5i64..=5);
    if n == 0 {
        n = 1;
    }
    q_frac(n, rng.gen_range(1..=3))
}

/// Small rational, occasionally with an imaginary part.
pub fn small_coeff(rng: &mut Rng8) -> CRat {
    if rng.gen_bool(0.2) {
        CRat::new(small_q(rng), small_q(rng))
    } else {
        CRat::real(small_q(rng))
    }
}

fn alpha(rng: &mut Rng8, dim: usize) -> Vec<u32> {
    (0..dim).map(|_| if rng.gen_bool(0.6) { 0 } else { rng.gen_range(1..=2) }).collect()
}

/// Invariant function that descends: `k = 0`, `m` even, `m <= 6`.
pub fn invariant_fn(rng: &mut Rng8, dim: usize, terms: usize) -> HalfFunc {
    let mut f = HalfFunc::zero(dim);
    for _ in 0..terms.max(1) {
        let m = 2 * rng.gen_range(0..=3);
        f = &f + &HalfFunc::monomial(dim, alpha(rng, dim), 0, m, small_coeff(rng));
    }
    f
}

/// Arbitrary function of the class with `|k| <= 3`, `m <= 6`, `m != 1`.
pub fn general_fn(rng: &mut Rng8, dim: usize, terms: usize) -> HalfFunc {
    let mut f = HalfFunc::zero(dim);
    for _ in 0..terms.max(1) {
        let m = [0u32, 2, 3, 4, 5, 6][rng.gen_range(0..6)];
        let k = rng.gen_range(-3i64..=3);
        f = &f + &HalfFunc::monomial(dim, alpha(rng, dim), k, m, small_coeff(rng));
    }
    f
}

/// Function built only from descending monomials (`m >= |k|`, `m - k` even).
pub fn descending_fn(rng: &mut Rng8, dim: usize, terms: usize) -> HalfFunc {
    let mut f = HalfFunc::zero(dim);
    for _ in 0..terms.max(1) {
        let m = rng.gen_range(0u32..=6);
        let mut k = rng.gen_range(-(m as i64)..=m as i64);
        if (m as i64 - k) % 2 != 0 {
            k += 1;
        }
        f = &f + &HalfFunc::monomial(dim, alpha(rng, dim), k, m, small_coeff(rng));
    }
    f
}

pub fn disc_fn(rng: &mut Rng8, dim: usize, terms: usize) -> DiscFunc {
    let mut g = DiscFunc::zero(dim);
    for _ in 0..terms.max(1) {
        let (p, qq) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        g = &g + &DiscFunc::monomial(dim, alpha(rng, dim), p, qq, small_coeff(rng));
    }
    g
}

fn random_key(rng: &mut Rng8, n: usize, degree: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut key = Vec::with_capacity(degree);
    for _ in 0..degree {
        key.push(pool.remove(rng.gen_range(0..pool.len())));
    }
    key
}

pub fn base_dim(rng: &mut Rng8) -> usize {
    rng.gen_range(0..=3)
}

pub fn degree_for(rng: &mut Rng8, dim: usize) -> usize {
    rng.gen_range(0..=3.min(dim + 2))
}

/// Basic invariant form: `k = 0` throughout, `m` even, and coefficients of
/// keys containing `dtheta` but not `ds` carry a factor `s`.
pub fn cuttable_form(rng: &mut Rng8, dim: usize, degree: usize) -> HalfForm {
    let (t, s) = (dim, dim + 1);
    let mut out = HalfForm::zero(dim, degree);
    for _ in 0..rng.gen_range(1..=6) {
        let key = random_key(rng, dim + 2, degree);
        let mut c = {
            let n = rng.gen_range(1..=2);
            invariant_fn(rng, dim, n)
        };
        if key.contains(&t) && !key.contains(&s) {
            c = &c * &HalfFunc::s(dim);
        }
        out = out.add(&HalfForm::monomial(dim, &key, c)).expect("same degree");
    }
    out
}

/// One to three cuttable terms, each with a single monomial coefficient, so
/// that vanishing at boundary points happens structurally.
pub fn cuttable_monomial_form(rng: &mut Rng8, dim: usize, degree: usize) -> HalfForm {
    let (t, s) = (dim, dim + 1);
    let mut out = HalfForm::zero(dim, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let key = random_key(rng, dim + 2, degree);
        let mut c = invariant_fn(rng, dim, 1);
        if key.contains(&t) && !key.contains(&s) {
            c = &c * &HalfFunc::s(dim);
        }
        out = out.add(&HalfForm::monomial(dim, &key, c)).expect("same degree");
    }
    out
}

/// Form with arbitrary coefficients from [`general_fn`].
pub fn general_form(rng: &mut Rng8, dim: usize, degree: usize) -> HalfForm {
    let mut out = HalfForm::zero(dim, degree);
    for _ in 0..rng.gen_range(1..=6) {
        let key = random_key(rng, dim + 2, degree);
        let c = {
            let n = rng.gen_range(1..=2);
            general_fn(rng, dim, n)
        };
        out = out.add(&HalfForm::monomial(dim, &key, c)).expect("same degree");
    }
    out
}

pub fn disc_form(rng: &mut Rng8, dim: usize, degree: usize) -> DiscForm {
    let mut out = DiscForm::zero(dim, degree);
    for _ in 0..rng.gen_range(1..=4) {
        let key = random_key(rng, dim + 2, degree);
        let c = {
            let n = rng.gen_range(1..=2);
            disc_fn(rng, dim, n)
        };
        out = out.add(&DiscForm::monomial(dim, &key, c)).expect("same degree");
    }
    out
}

fn rat_expr(rng: &mut Rng8) -> Expr {
    Expr::rational(small_q(rng))
}

fn small_poly(rng: &mut Rng8, vars: &[String], terms: usize) -> Expr {
    let mut items = Vec::new();
    for _ in 0..terms {
        let mut factors = vec![rat_expr(rng)];
        for _ in 0..rng.gen_range(0..=2) {
            factors.push(Expr::var(&vars[rng.gen_range(0..vars.len())]));
        }
        items.push(Expr::product(factors));
    }
    Expr::sum(items)
}

/// Normal-form map `R^source -> R^target` with integer linear part in `x`,
/// small polynomial corrections in `x, s`, and twist `b = e^(i phase(x, s))`.
pub fn local_map(rng: &mut Rng8, source: usize, target: usize) -> LocalMap {
    let xs = x_names(source);
    let mut xs_s = xs.clone();
    xs_s.push("s".into());
    let psi_bar = (0..target)
        .map(|_| {
            let mut items: Vec<Expr> = xs.iter().map(|x| Expr::c(rng.gen_range(-2i64..=2)) * Expr::var(x)).collect();
            items.push(small_poly(rng, &xs_s, 2).divide(Expr::c(4)));
            Expr::sum(items)
        })
        .collect();
    let phase = small_poly(rng, &xs_s, 2);
    LocalMap::new(source, psi_bar, phase.clone().cos(), phase.sin()).expect("generated map is valid")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn lift_matrix(rng: &mut Rng8, k: usize, vars: &[String]) -> Vec<Vec<Expr>> {
    let c0 = Expr::c(rng.gen_range(1i64..=3));
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let pert = small_poly(rng, vars, 1).divide(Expr::c(8));
                    if i == j {
                        c0.clone() + pert
                    } else {
                        pert
                    }
                })
                .collect()
        })
        .collect()
}

/// Cartesian lift input with `A(t, 0)` close to a multiple of the identity.
pub fn cartesian_lift_input(rng: &mut Rng8) -> BlowupLiftInput {
    let (m, k) = (rng.gen_range(1..=2), rng.gen_range(2..=3));
    let mut vars = names("t", m);
    vars.extend(names("x", k));
    let phi1 = names("t", m).iter().map(|t| Expr::var(t) + small_poly(rng, &vars, 2).divide(Expr::c(4))).collect();
    BlowupLiftInput::Cartesian { t_dim: m, fiber_dim: k, phi1, a: lift_matrix(rng, k, &vars) }
}

/// Invariant lift input in `t, s`.
pub fn invariant_lift_input(rng: &mut Rng8) -> BlowupLiftInput {
    let (m, k) = (rng.gen_range(1..=2), rng.gen_range(2..=3));
    let mut vars = names("t", m);
    vars.push("s".into());
    let phi1 = names("t", m).iter().map(|t| Expr::var(t) + small_poly(rng, &vars, 2).divide(Expr::c(4))).collect();
    BlowupLiftInput::Invariant { t_dim: m, fiber_dim: k, phi1, a: lift_matrix(rng, k, &vars) }
}

/// Positive rational, square or not.
pub fn positive_q(rng: &mut Rng8) -> crate::rational::Q {
    if rng.gen_bool(0.5) {
        let n = q(rng.gen_range(1..=4));
        &n * &n / q(rng.gen_range(1..=3)).pow(2)
    } else {
        q_frac(rng.gen_range(1..=12), rng.gen_range(1..=5))
    }
}
