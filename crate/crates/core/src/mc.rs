//! Monte Carlo pricing with CLT error estimates.
//!
//! Samples are drawn in fixed-size batches. Batch `b` uses the ChaCha8 stream
//! `b` of the seed, so results do not depend on the number of threads, and
//! per-batch Welford accumulators are merged in batch order.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PricingError, Result};
use crate::models::{ModelParams, ModelSpec};
use crate::payoffs::PayoffSpec;

/// 97.5% standard normal quantile.
pub const C_ALPHA: f64 = 1.96;

/// Samples per RNG stream.
pub const BATCH: u64 = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    /// Standard deviation of one discounted payoff sample.
    pub std_dev: f64,
    pub m: u64,
    /// `1.96 σ_M / (estimate √M)`; infinite when the estimate is zero.
    pub rel_stat_error: f64,
    pub seed: u64,
}

impl McResult {
    /// Half-width of the 95% confidence interval.
    pub fn half_width(&self) -> f64 {
        C_ALPHA * self.std_dev / (self.m as f64).sqrt()
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        Welford {
            count: n,
            mean: self.mean + delta * other.count as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / n as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

enum Kind {
    Gbm { factor: DMatrix<f64> },
    Vg { gamma: Gamma<f64>, sigma: Vec<f64>, theta: Vec<f64> },
    Nig { ig: InverseGaussian<f64>, skew: Vec<f64>, factor: DMatrix<f64> },
}

/// Draws terminal log-price vectors `X_T` of a model.
pub struct TerminalSampler {
    d: usize,
    /// `X_0 + (r + μ) T`.
    base: Vec<f64>,
    kind: Kind,
}

impl TerminalSampler {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let d = model.dim();
        let t = model.maturity();
        let base: Vec<f64> = model
            .log_spot()
            .iter()
            .zip(model.drift())
            .map(|(x0, m)| x0 + m * t)
            .collect();
        let kind = match model.params() {
            ModelParams::Gbm { .. } => {
                // Symmetric square root of T Σ.
                let eig = (model.quadratic_matrix() * t).symmetric_eigen();
                let sqrt_l = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
                Kind::Gbm {
                    factor: &eig.eigenvectors * sqrt_l * eig.eigenvectors.transpose(),
                }
            }
            ModelParams::Vg { sigma, theta, nu } => Kind::Vg {
                gamma: Gamma::new(t / nu, *nu).map_err(|e| invalid(format!("VG subordinator: {e}")))?,
                sigma: sigma.clone(),
                theta: theta.clone(),
            },
            ModelParams::Nig { alpha, beta, delta, .. } => {
                let dm = model.quadratic_matrix();
                let gamma = (alpha * alpha - (DVector::from_column_slice(beta).transpose() * dm * DVector::from_column_slice(beta))[0]).sqrt();
                let ig = InverseGaussian::new(delta * t / gamma, delta * delta * t * t)
                    .map_err(|e| invalid(format!("NIG subordinator: {e}")))?;
                let skew = (dm * DVector::from_column_slice(beta)).iter().copied().collect();
                let factor = dm
                    .clone()
                    .cholesky()
                    .ok_or_else(|| PricingError::Numerical("NIG Δ has no Cholesky factor".into()))?
                    .l();
                Kind::Nig { ig, skew, factor }
            }
        };
        Ok(Self { d, base, kind })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Fills `x` with one draw of `X_T`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut [f64], x: &mut [f64]) {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        match &self.kind {
            Kind::Gbm { factor } => {
                for i in 0..self.d {
                    let mut acc = self.base[i];
                    for j in 0..self.d {
                        acc += factor[(i, j)] * z[j];
                    }
                    x[i] = acc;
                }
            }
            Kind::Vg { gamma, sigma, theta } => {
                let g = gamma.sample(rng);
                let sg = g.sqrt();
                for i in 0..self.d {
                    x[i] = self.base[i] + theta[i] * g + sigma[i] * sg * z[i];
                }
            }
            Kind::Nig { ig, skew, factor } => {
                let y = ig.sample(rng);
                let sy = y.sqrt();
                for i in 0..self.d {
                    let mut lz = 0.0;
                    for j in 0..=i {
                        lz += factor[(i, j)] * z[j];
                    }
                    x[i] = self.base[i] + skew[i] * y + sy * lz;
                }
            }
        }
    }
}

/// Deterministic generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Welford statistics of `f(X_T)` per batch, in batch order.
pub fn batch_statistics<F>(model: &ModelSpec, m: u64, seed: u64, f: F) -> Result<Vec<Welford>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let sampler = TerminalSampler::new(model)?;
    let batches = m.div_ceil(BATCH);
    Ok((0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let n = BATCH.min(m - b * BATCH);
            let mut z = vec![0.0; sampler.dim()];
            let mut x = vec![0.0; sampler.dim()];
            let mut acc = Welford::default();
            for _ in 0..n {
                sampler.sample(&mut rng, &mut z, &mut x);
                acc.push(f(&x));
            }
            acc
        })
        .collect())
}

/// Discounted Monte Carlo price with its 95% CLT error.
pub fn mc_price(model: &ModelSpec, payoff: &PayoffSpec, m: u64, seed: u64) -> Result<McResult> {
    if m < 2 {
        return Err(invalid("Monte Carlo needs at least two samples"));
    }
    if model.dim() != payoff.dim() {
        return Err(invalid("model and payoff dimensions differ"));
    }
    let stats = batch_statistics(model, m, seed, |x| payoff.payoff(x))?;
    let total = stats.iter().fold(Welford::default(), |a, b| a.merge(b));
    let disc = (-model.rate() * model.maturity()).exp();
    let estimate = disc * total.mean;
    let std_dev = disc * total.variance().sqrt();
    let rel_stat_error = if estimate != 0.0 {
        C_ALPHA * std_dev / (estimate.abs() * (m as f64).sqrt())
    } else {
        f64::INFINITY
    };
    Ok(McResult {
        estimate,
        std_dev,
        m,
        rel_stat_error,
        seed,
    })
}
