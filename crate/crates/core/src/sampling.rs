//! Deterministic point and direction samplers.
//!
//! Sample `i` is drawn from its own ChaCha8 stream, so a sample set of size `2n`
//! contains the set of size `n` and parallel evaluation needs no shared state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::random_unit_vector;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Uniform in the Euclidean ball `|z − center| < radius`.
    #[default]
    Ball,
    /// Uniform on the sphere `|z − center| = radius`.
    Sphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub count: usize,
    pub radius: f64,
    pub seed: u64,
    #[serde(default)]
    pub shape: Shape,
    /// Center as `[re, im]` pairs; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<[f64; 2]>>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Sampler {
    pub fn ball(count: usize, radius: f64, seed: u64) -> Self {
        Sampler { count, radius, seed, shape: Shape::Ball, center: None }
    }

    pub fn sphere(count: usize, radius: f64, seed: u64) -> Self {
        Sampler { count, radius, seed, shape: Shape::Sphere, center: None }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::config(format!("sampler radius must be positive, got {}", self.radius)));
        }
        if let Some(c) = &self.center {
            if c.len() != dim {
                return Err(Error::config(format!("sampler center has {} entries, expected {dim}", c.len())));
            }
        }
        Ok(())
    }

    /// Sample `index` in dimension `dim`.
    pub fn point(&self, dim: usize, index: usize) -> Vec<C64> {
        let mut rng = stream_rng(self.seed, index as u64);
        let dir = random_unit_vector(dim, &mut rng);
        let r = match self.shape {
            Shape::Sphere => self.radius,
            Shape::Ball => {
                let u: f64 = rng.random();
                self.radius * u.powf(1.0 / (2 * dim) as f64)
            }
        };
        let mut p: Vec<C64> = dir.into_iter().map(|z| z * r).collect();
        if let Some(c) = &self.center {
            for (pi, ci) in p.iter_mut().zip(c) {
                *pi += C64::new(ci[0], ci[1]);
            }
        }
        p
    }

    pub fn points(&self, dim: usize) -> Result<Vec<Vec<C64>>> {
        self.validate(dim)?;
        Ok((0..self.count).map(|i| self.point(dim, i)).collect())
    }

    /// Unit tangent directions paired with the samples (Euclidean norm 1).
    pub fn directions(&self, dim: usize) -> Vec<Vec<C64>> {
        (0..self.count)
            .map(|i| {
                let mut rng = stream_rng(self.seed ^ 0x9e37_79b9_7f4a_7c15, i as u64);
                random_unit_vector(dim, &mut rng)
            })
            .collect()
    }
}
