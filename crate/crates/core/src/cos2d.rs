//! Fourier-cosine (COS) pricing in one and two dimensions.
//!
//! The density of `X_T` is expanded in a cosine series on `[a, b]^d` with
//! coefficients read off the characteristic function; payoff coefficients
//! come from a midpoint-rule discrete cosine transform of the payoff sampled
//! on a `Q^d` grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::models::ModelSpec;
use crate::payoffs::PayoffSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CosConfig {
    /// Fourier modes per dimension.
    pub n_cos: usize,
    /// DCT grid points per dimension.
    pub q: usize,
    /// Truncation width multiplier.
    pub l: f64,
}

impl Default for CosConfig {
    fn default() -> Self {
        Self {
            n_cos: 64,
            q: 1000,
            l: 10.0,
        }
    }
}

impl CosConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cos == 0 {
            return Err(PricingError::Config("N_COS must be positive".into()));
        }
        if self.q < self.n_cos {
            return Err(PricingError::Config(format!(
                "Q = {} must be at least N_COS = {}",
                self.q, self.n_cos
            )));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(PricingError::Config("L must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosResult {
    pub estimate: f64,
    /// Characteristic-function evaluations, `2^{d-1} N_COS^d`.
    pub n_cf: u64,
    pub a: f64,
    pub b: f64,
}

/// Common interval `[a, b]` from the marginal cumulants.
pub fn truncation_range(model: &ModelSpec, config: &CosConfig) -> Result<(f64, f64)> {
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for i in 0..model.dim() {
        let c = model.marginal_cumulants(i)?;
        let centre = model.log_spot()[i] + c.c1;
        let half = config.l * (c.c2 + c.c4.max(0.0).sqrt()).sqrt();
        a = a.min(centre - half);
        b = b.max(centre + half);
    }
    Ok((a, b))
}

/// `cos(k π (j + ½) / Q)` for `k < n`, `j < q`.
fn cosine_table(n: usize, q: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            (0..q)
                .map(|j| (k as f64 * std::f64::consts::PI * (j as f64 + 0.5) / q as f64).cos())
                .collect()
        })
        .collect()
}

/// Payoff cosine coefficients `V_k = (2/(b-a))^d ∫ P(y) Π cos(k_i π (y_i-a)/(b-a)) dy`.
fn payoff_coefficients(payoff: &PayoffSpec, d: usize, a: f64, b: f64, config: &CosConfig) -> Vec<f64> {
    let (n, q) = (config.n_cos, config.q);
    let h = (b - a) / q as f64;
    let grid: Vec<f64> = (0..q).map(|j| a + (j as f64 + 0.5) * h).collect();
    let table = cosine_table(n, q);
    let scale = 2.0 / q as f64;
    if d == 1 {
        return table
            .iter()
            .map(|row| scale * row.iter().zip(&grid).map(|(c, y)| c * payoff.payoff(&[*y])).sum::<f64>())
            .collect();
    }
    // Payoff on the grid, then one transform per axis.
    let values: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|y1| grid.iter().map(|y2| payoff.payoff(&[*y1, *y2])).collect())
        .collect();
    // partial[k1][j2] = Σ_{j1} cos_k1(j1) P(j1, j2)
    let partial: Vec<Vec<f64>> = table
        .par_iter()
        .map(|row| {
            let mut acc = vec![0.0; q];
            for (c, vals) in row.iter().zip(&values) {
                for (a, v) in acc.iter_mut().zip(vals) {
                    *a += c * v;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; n * n];
    for k1 in 0..n {
        for k2 in 0..n {
            let s: f64 = partial[k1].iter().zip(&table[k2]).map(|(p, c)| p * c).sum();
            out[k1 * n + k2] = scale * scale * s;
        }
    }
    out
}

fn prime(k: usize) -> f64 {
    if k == 0 {
        0.5
    } else {
        1.0
    }
}

/// COS price for `d ∈ {1, 2}`.
pub fn cos_price(model: &ModelSpec, payoff: &PayoffSpec, config: &CosConfig) -> Result<CosResult> {
    config.validate()?;
    let d = model.dim();
    if payoff.dim() != d {
        return Err(crate::error::invalid("model and payoff dimensions differ"));
    }
    if d > 2 {
        return Err(PricingError::Config(format!("COS supports d = 1 or 2, got {d}")));
    }
    let (a, b) = truncation_range(model, config)?;
    let n = config.n_cos;
    let w = std::f64::consts::PI / (b - a);
    let coeffs = payoff_coefficients(payoff, d, a, b, config);
    let chf = |z: &[f64]| -> Result<Complex64> {
        let zc: Vec<Complex64> = z.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        model.chf(&zc)
    };
    let mut sum = 0.0;
    if d == 1 {
        for k in 0..n {
            let om = k as f64 * w;
            let phase = Complex64::new(0.0, -om * a).exp();
            sum += prime(k) * (chf(&[om])? * phase).re * coeffs[k];
        }
    } else {
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k1| -> Result<f64> {
                let o1 = k1 as f64 * w;
                let mut acc = 0.0;
                for k2 in 0..n {
                    let o2 = k2 as f64 * w;
                    let plus = chf(&[o1, o2])? * Complex64::new(0.0, -(o1 + o2) * a).exp();
                    let minus = chf(&[o1, -o2])? * Complex64::new(0.0, -(o1 - o2) * a).exp();
                    acc += prime(k2) * 0.5 * (plus.re + minus.re) * coeffs[k1 * n + k2];
                }
                Ok(prime(k1) * acc)
            })
            .collect::<Result<_>>()?;
        sum = rows.iter().sum();
    }
    let estimate = (-model.rate() * model.maturity()).exp() * sum;
    Ok(CosResult {
        estimate,
        n_cf: (1u64 << (d - 1)) * (n as u64).pow(d as u32),
        a,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gbm_truncation_closed_form() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let (a, b) = truncation_range(&m, &CosConfig::default()).unwrap();
        let x0 = 100f64.ln();
        assert!((a - (x0 - 0.08 - 4.0)).abs() < 1e-6, "{a}");
        assert!((b - (x0 - 0.08 + 4.0)).abs() < 1e-6, "{b}");
        let one = ModelSpec::gbm(vec![100.0], 0.0, 1.0, vec![0.4]).unwrap();
        let (a1, b1) = truncation_range(&one, &CosConfig::default()).unwrap();
        assert!((a1 - a).abs() < 1e-12 && (b1 - b).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let p = PayoffSpec::call_on_min(100.0, 2).unwrap();
        let bad = CosConfig {
            n_cos: 64,
            q: 32,
            l: 10.0,
        };
        assert!(matches!(cos_price(&m, &p, &bad), Err(PricingError::Config(_))));
        let m3 = ModelSpec::gbm(vec![100.0; 3], 0.0, 1.0, vec![0.4; 3]).unwrap();
        let p3 = PayoffSpec::call_on_min(100.0, 3).unwrap();
        assert!(cos_price(&m3, &p3, &CosConfig::default()).is_err());
    }

    #[test]
    fn evaluation_count() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let p = PayoffSpec::basket_put(100.0, 2).unwrap();
        let r = cos_price(
            &m,
            &p,
            &CosConfig {
                n_cos: 16,
                q: 200,
                l: 10.0,
            },
        )
        .unwrap();
        assert_eq!(r.n_cf, 512);
    }

    #[test]
    fn near_constant_payoff_prices_to_discounted_constant() {
        // With K far above every reachable basket value the payoff is K minus
        // a negligible term, so only the (0,0) mode matters.
        let m = ModelSpec::gbm(vec![100.0; 2], 0.05, 1.0, vec![0.3, 0.5]).unwrap();
        let k = 1e12;
        let p = PayoffSpec::basket_put(k, 2).unwrap();
        let r = cos_price(&m, &p, &CosConfig { n_cos: 32, q: 400, l: 10.0 }).unwrap();
        let expected = k * (-0.05f64).exp();
        assert!((r.estimate / expected - 1.0).abs() < 1e-8, "{}", r.estimate / expected);
    }
}
