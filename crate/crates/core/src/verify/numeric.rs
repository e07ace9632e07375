//! Jacobians, ranks and singular values.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CutError, Result};
use crate::expr::ExprMap;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMethod {
    Symbolic,
    FiniteDifference,
}

pub fn jacobian_symbolic(map: &ExprMap, point: &[f64]) -> Result<DMatrix<f64>> {
    let env = map.env(point)?;
    let m = ExprMap::eval_matrix(&map.symbolic_jacobian(), &env)?;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(CutError::Evaluation("non-finite symbolic derivative".into()));
    }
    Ok(m)
}

/// Central differences, falling back to one-sided ones when a neighbour is
/// outside the domain.
pub fn jacobian_fd(map: &ExprMap, point: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let base = map.eval(point)?;
    let mut m = DMatrix::zeros(map.output_dim(), map.input_dim());
    for j in 0..map.input_dim() {
        let shifted = |delta: f64| {
            let mut p = point.to_vec();
            p[j] += delta;
            map.eval(&p)
        };
        let col: Vec<f64> = match (shifted(h), shifted(-h)) {
            (Ok(a), Ok(b)) => a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect(),
            (Ok(a), Err(_)) => a.iter().zip(&base).map(|(x, y)| (x - y) / h).collect(),
            (Err(_), Ok(b)) => base.iter().zip(&b).map(|(x, y)| (x - y) / h).collect(),
            (Err(e), Err(_)) => return Err(e),
        };
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Symbolic Jacobian where it evaluates to finite numbers, finite differences otherwise.
pub fn jacobian_with_method(map: &ExprMap, point: &[f64]) -> Result<(DMatrix<f64>, JacobianMethod)> {
    match jacobian_symbolic(map, point) {
        Ok(m) => Ok((m, JacobianMethod::Symbolic)),
        Err(CutError::DimMismatch(msg)) => Err(CutError::DimMismatch(msg)),
        Err(_) => Ok((jacobian_fd(map, point, tolerance::FD_STEP)?, JacobianMethod::FiniteDifference)),
    }
}

pub fn jacobian_at(map: &ExprMap, point: &[f64]) -> Result<DMatrix<f64>> {
    jacobian_with_method(map, point).map(|(m, _)| m)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn matrix_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

pub fn rank_at(map: &ExprMap, point: &[f64], tol: f64) -> Result<usize> {
    Ok(matrix_rank(&jacobian_at(map, point)?, tol))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
