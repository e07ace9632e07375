//! Deterministic sample points on the local models.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forms::Model;

/// Sample points by region: interior, boundary (`s = 0`, resp. `u = v = 0`)
/// and near-boundary (`0 < s < delta`, resp. `0 < u^2 + v^2 < delta`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplePlan {
    pub model: Model,
    pub dim: usize,
    pub interior: usize,
    pub boundary: usize,
    pub near_boundary: usize,
    pub seed: u64,
    pub delta: f64,
    /// Upper end of the `s` (resp. `|z|^2`) range.
    pub eps: f64,
    pub extra: Vec<Vec<f64>>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            model: Model::Half,
            dim: 0,
            interior: 12,
            boundary: 8,
            near_boundary: 4,
            seed: 0,
            delta: 1e-3,
            eps: 0.5,
            extra: Vec::new(),
        }
    }
}

impl SamplePlan {
    pub fn new(model: Model, dim: usize, seed: u64) -> Self {
        SamplePlan { model, dim, seed, ..SamplePlan::default() }
    }

    pub fn with_counts(mut self, interior: usize, boundary: usize, near_boundary: usize) -> Self {
        self.interior = interior;
        self.boundary = boundary;
        self.near_boundary = near_boundary;
        self
    }

    /// Points in basis order: `(x, theta, s)` or `(x, u, v)`.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        let regions =
            [(self.interior, self.delta, self.eps), (self.boundary, 0.0, 0.0), (self.near_boundary, 0.0, self.delta)];
        for (count, lo, hi) in regions {
            for _ in 0..count {
                let mut p: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let angle = rng.gen_range(0.0..TAU);
                let s = if hi > lo { rng.gen_range(lo..hi) } else { 0.0 };
                match self.model {
                    Model::Half => {
                        p.push(angle);
                        p.push(s);
                    }
                    Model::Disc => {
                        let r = s.sqrt();
                        p.push(r * angle.cos());
                        p.push(r * angle.sin());
                    }
                }
                out.push(p);
            }
        }
        out.extend(self.extra.iter().cloned());
        out
    }

    /// Only the boundary points.
    pub fn boundary_points(&self) -> Vec<Vec<f64>> {
        SamplePlan { interior: 0, near_boundary: 0, extra: vec![], ..self.clone() }.points()
    }
}

/// Uniform points in a box, one range per coordinate.
pub fn box_points(seed: u64, count: usize, ranges: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| ranges.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect())
        .collect()
}
