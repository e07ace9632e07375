//! Numeric oracles that recompute exact results by an independent route.

use std::f64::consts::TAU;

use cutkit_core::blowup::blowup_pullback;
use cutkit_core::cutting::{cut_form, cut_form_general};
use cutkit_core::forms::{DiscForm, HalfForm};
use cutkit_core::funcalg::{lift_function, mono_descends, HalfFunc};
use cutkit_core::verify::gen;
use cutkit_core::verify::props::trial_rng;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative least-squares residual of fitting `r^m e^(ik angle)` on the unit
/// disc by polynomials in `(u, v)` of total degree at most `degree`.
fn fit_residual(m: u32, k: i64, degree: u32, points: &[(f64, f64)]) -> f64 {
    let basis: Vec<(i32, i32)> = (0..=degree as i32).flat_map(|d| (0..=d).map(move |a| (a, d - a))).collect();
    let a = DMatrix::from_fn(points.len(), basis.len(), |i, j| {
        let (u, v) = points[i];
        u.powi(basis[j].0) * v.powi(basis[j].1)
    });
    let svd = a.clone().svd(true, true);
    let mut num = 0.0;
    let mut den = 0.0;
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

fn disc_sample(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.gen_range(0.05f64..1.0).sqrt();
            let a = rng.gen_range(0.0..TAU);
            (r * a.cos(), r * a.sin())
        })
        .collect()
}

#[test]
fn descent_criterion_matches_polynomial_fit() {
    let points = disc_sample(200, 2024);
    let mut cases = 0;
    for m in 0..=8u32 {
        for k in -8..=8i64 {
            let fits = fit_residual(m, k, m, &points) < 1e-8;
            assert_eq!(mono_descends(m, k), fits, "m = {m}, k = {k}");
            cases += 1;
        }
    }
    assert_eq!(cases, 153);
}

#[test]
fn non_descending_example_stays_far_from_polynomials() {
    let points = disc_sample(200, 7);
    for degree in 0..=6 {
        let residual = fit_residual(1, 3, degree, &points);
        assert!(residual > 1e-3, "degree {degree}: {residual}");
    }
}

/// Jacobian of `(x, theta, s) -> (x, sqrt(s) cos theta, sqrt(s) sin theta)`.
fn collapse_jacobian(d: usize, p: &[f64]) -> DMatrix<f64> {
    let (theta, s) = (p[d], p[d + 1]);
    let r = s.sqrt();
    let mut j = DMatrix::zeros(d + 2, d + 2);
    for i in 0..d {
        j[(i, i)] = 1.0;
    }
    j[(d, d)] = -r * theta.sin();
    j[(d, d + 1)] = theta.cos() / (2.0 * r);
    j[(d + 1, d)] = r * theta.cos();
    j[(d + 1, d + 1)] = theta.sin() / (2.0 * r);
    j
}

fn collapse(d: usize, p: &[f64]) -> Vec<f64> {
    let r = p[d + 1].sqrt();
    let mut q = p[..d].to_vec();
    q.extend([r * p[d].cos(), r * p[d].sin()]);
    q
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

fn minor(j: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |a, b| j[(rows[a], cols[b])]).determinant()
}

/// Largest discrepancy between `beta(p)` and the pullback of `gamma` under
/// the collapse map, computed from the Jacobian minors.
fn pullback_discrepancy(beta: &HalfForm, gamma: &DiscForm, p: &[f64]) -> f64 {
    let d = beta.dim();
    let n = d + 2;
    let k = beta.degree();
    let jac = collapse_jacobian(d, p);
    let b = beta.eval_at(p).unwrap();
    let g = gamma.eval_at(&collapse(d, p)).unwrap();
    let mut worst: f64 = 0.0;
    for cols in subsets(n, k) {
        let mut value = Complex64::new(0.0, 0.0);
        for rows in subsets(n, k) {
            value += g.get(&rows) * minor(&jac, &rows, &cols);
        }
        let scale = 1.0 + b.get(&cols).norm();
        worst = worst.max((value - b.get(&cols)).norm() / scale);
    }
    worst
}

fn interior_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
    p.push(rng.gen_range(0.0..TAU));
    p.push(rng.gen_range(0.05..0.5));
    p
}

#[test]
fn cut_form_is_the_inverse_pullback_numerically() {
    for trial in 0..100 {
        let mut rng = trial_rng(99, "oracle_cut", trial);
        let d = gen::base_dim(&mut rng);
        let k = gen::degree_for(&mut rng, d);
        let beta = gen::cuttable_form(&mut rng, d, k);
        let gamma = cut_form(&beta).unwrap();
        for _ in 0..5 {
            let p = interior_point(&mut rng, d);
            let err = pullback_discrepancy(&beta, &gamma, &p);
            assert!(err < 1e-9, "trial {trial}: beta = {beta}, error {err}");
        }
    }
}

#[test]
fn general_route_pullback_matches_for_non_invariant_forms() {
    // Half-model forms that are pullbacks of disc forms but not invariant.
    let mut defined = 0;
    for trial in 0..60 {
        let mut rng = trial_rng(5, "oracle_general", trial);
        let d = gen::base_dim(&mut rng);
        let k = gen::degree_for(&mut rng, d);
        let gamma = gen::disc_form(&mut rng, d, k);
        let Ok(beta) = blowup_pullback(&gamma) else { continue };
        defined += 1;
        assert_eq!(cut_form_general(&beta).unwrap(), gamma);
        for _ in 0..3 {
            let p = interior_point(&mut rng, d);
            let err = pullback_discrepancy(&beta, &gamma, &p);
            assert!(err < 1e-9, "trial {trial}: gamma = {gamma}, error {err}");
        }
    }
    assert!(defined >= 15, "only {defined} pullbacks defined");
}

#[test]
fn lift_function_agrees_with_substitution() {
    for trial in 0..50 {
        let mut rng = trial_rng(3, "oracle_lift", trial);
        let d = gen::base_dim(&mut rng);
        let g = gen::disc_fn(&mut rng, d, 4);
        let f: HalfFunc = lift_function(&g);
        for _ in 0..10 {
            let p = interior_point(&mut rng, d);
            let q = collapse(d, &p);
            let diff = f.eval(&p[..d], p[d], p[d + 1]).unwrap() - g.eval(&q[..d], q[d], q[d + 1]).unwrap();
            assert!(diff.norm() < 1e-12, "trial {trial}");
        }
    }
}
