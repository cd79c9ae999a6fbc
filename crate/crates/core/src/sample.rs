//! Deterministic sample plans for residual sweeps.
//!
//! Base points are drawn uniformly from a ball by rejection, directions
//! uniformly from the sphere and rescaled by a uniform speed; near-collinear
//! pairs are rejected because the residual splitting along x and y
//! degenerates when s y_k - |y| x_k vanishes.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::num::invariants::PointPair;

#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    /// x is drawn uniformly from the ball of this radius.
    pub radius: f64,
    /// pairs with collinearity angle below this are redrawn (radians)
    pub min_angle: f64,
    /// |y| scale range
    pub speed: (f64, f64),
}

impl SamplePlan {
    pub fn new(dim: usize, count: usize, seed: u64, radius: f64) -> Self {
        SamplePlan {
            dim,
            count,
            seed,
            radius,
            min_angle: 1e-2,
            speed: (0.5, 2.0),
        }
    }

    fn draw_in_ball<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        loop {
            let v = DVector::from_fn(self.dim, |_, _| rng.random_range(-1.0..1.0));
            if v.norm_squared() <= 1.0 {
                return self.radius * v;
            }
        }
    }

    fn draw_direction<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        loop {
            let v: DVector<f64> =
                DVector::from_fn(self.dim, |_, _| -> f64 { StandardNormal.sample(rng) });
            let n = v.norm();
            if n > 1e-6 {
                let speed = rng.random_range(self.speed.0..self.speed.1);
                return (speed / n) * v;
            }
        }
    }

    /// The deterministic pair sequence of this plan.
    pub fn pairs(&self) -> Vec<PointPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        while out.len() < self.count {
            let x = self.draw_in_ball(&mut rng);
            let y = self.draw_direction(&mut rng);
            let pair = match PointPair::new(x, y) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if pair.collinearity_angle() < self.min_angle {
                continue;
            }
            out.push(pair);
        }
        out
    }

    /// Invariant-plane samples with 0 < s <= sqrt(r): r uniform in
    /// [lo, hi], s = xi * sqrt(r) with xi uniform in (0, 1].
    pub fn rs_samples(count: usize, seed: u64, r_range: (f64, f64)) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let r = rng.random_range(r_range.0..r_range.1);
                let xi = 1.0 - rng.random::<f64>(); // (0, 1]
                (r, xi * r.sqrt())
            })
            .collect()
    }
}
