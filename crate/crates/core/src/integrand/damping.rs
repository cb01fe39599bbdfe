//! Choice of the damping vector by minimizing the peak `g(0; R)` over `δ_V`.
//!
//! The objective `ln g(0; R)` is minimized with a log-barrier interior point
//! method: damped Newton steps on `ln g(0; R) - μ Σ ln c_k(R)` with a
//! decreasing sequence of `μ`, where `c_k > 0` are the strip constraints.
//! Derivatives are finite differences. Line searches never leave the strict
//! interior.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{log_peak, DampingVector};
use crate::error::{PricingError, Result};
use crate::models::{ModelParams, ModelSpec};
use crate::payoffs::{PayoffFamily, PayoffSpec};

/// Minimum margin kept from every strip constraint.
pub const MIN_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DampingOptions {
    /// Stopping tolerance on the gradient norm of the final stage.
    pub tol: f64,
    pub max_iter: usize,
    /// Custom starting point; the family default is used otherwise.
    pub start: Option<Vec<f64>>,
}

impl Default for DampingOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 500,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalDamping {
    pub damping: DampingVector,
    /// `ln g(0; R)` at the returned point.
    pub log_peak: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; `damping` is then the best
    /// iterate found.
    pub converged: bool,
}

struct Problem<'a> {
    model: &'a ModelSpec,
    payoff: &'a PayoffSpec,
}

impl Problem<'_> {
    fn margins(&self, r: &[f64]) -> Vec<f64> {
        let mut m = self.payoff.strip_contains(r).margins;
        let x = self.model.strip_contains(r).margin;
        if x.is_finite() {
            m.push(x);
        }
        m
    }

    fn feasible(&self, r: &[f64]) -> bool {
        self.margins(r).iter().all(|m| *m >= MIN_MARGIN) && self.objective(r).is_finite()
    }

    fn objective(&self, r: &[f64]) -> f64 {
        log_peak(self.model, self.payoff, r).unwrap_or(f64::INFINITY)
    }

    fn barrier(&self, r: &[f64], mu: f64) -> f64 {
        let m = self.margins(r);
        if m.iter().any(|v| *v < MIN_MARGIN) {
            return f64::INFINITY;
        }
        let f = self.objective(r);
        if mu == 0.0 {
            return f;
        }
        f - mu * m.iter().map(|v| v.ln()).sum::<f64>()
    }

    fn gradient(&self, r: &[f64], mu: f64) -> DVector<f64> {
        let d = r.len();
        let f0 = self.barrier(r, mu);
        let mut g = DVector::zeros(d);
        let mut x = r.to_vec();
        for i in 0..d {
            let h = 1e-6 * (1.0 + r[i].abs());
            x[i] = r[i] + h;
            let fp = self.barrier(&x, mu);
            x[i] = r[i] - h;
            let fm = self.barrier(&x, mu);
            x[i] = r[i];
            g[i] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => 0.0,
            };
        }
        g
    }

    fn hessian(&self, r: &[f64], mu: f64) -> DMatrix<f64> {
        let d = r.len();
        let mut h = DMatrix::zeros(d, d);
        let mut x = r.to_vec();
        for j in 0..d {
            let step = 1e-4 * (1.0 + r[j].abs());
            x[j] = r[j] + step;
            let fwd = self.barrier(&x, mu).is_finite();
            let gp = if fwd { self.gradient(&x, mu) } else { self.gradient(r, mu) };
            x[j] = r[j] - step;
            let bwd = self.barrier(&x, mu).is_finite();
            let gm = if bwd { self.gradient(&x, mu) } else { self.gradient(r, mu) };
            x[j] = r[j];
            let span = step * (fwd as u8 + bwd as u8) as f64;
            if span > 0.0 {
                h.set_column(j, &((gp - gm) / span));
            }
        }
        (&h + h.transpose()) * 0.5
    }

    /// Damped Newton on the barrier function for fixed `μ`.
    fn newton(&self, r: &mut Vec<f64>, mu: f64, tol: f64, budget: &mut usize) -> bool {
        let d = r.len();
        while *budget > 0 {
            *budget -= 1;
            let g = self.gradient(r, mu);
            if g.norm() < tol {
                return true;
            }
            let h = self.hessian(r, mu);
            let step = newton_direction(&h, &g, d);
            let slope = g.dot(&step);
            let f0 = self.barrier(r, mu);
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-14 {
                let trial: Vec<f64> = r.iter().zip(step.iter()).map(|(x, p)| x + alpha * p).collect();
                let ft = self.barrier(&trial, mu);
                if ft.is_finite() && ft <= f0 + 1e-4 * alpha * slope {
                    moved = alpha * step.norm() > 1e-13 * (1.0 + DVector::from_column_slice(r).norm());
                    *r = trial;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                // No further decrease is achievable at this precision.
                return g.norm() < tol.sqrt();
            }
        }
        false
    }
}

/// `-H⁻¹ g`, regularizing `H` until it is positive definite; falls back to
/// steepest descent.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>, d: usize) -> DVector<f64> {
    let scale = h.diagonal().abs().max().max(1e-8);
    let mut lambda = 0.0;
    for _ in 0..40 {
        let shifted = h + DMatrix::identity(d, d) * lambda;
        if let Some(ch) = shifted.cholesky() {
            let p = -ch.solve(g);
            if p.iter().all(|v| v.is_finite()) {
                return p;
            }
        }
        lambda = if lambda == 0.0 { 1e-8 * scale } else { lambda * 10.0 };
    }
    -g
}

fn default_start(payoff: &PayoffSpec) -> Vec<f64> {
    let d = payoff.dim();
    match payoff.family() {
        PayoffFamily::BasketPut => vec![1.0; d],
        PayoffFamily::CallOnMin => vec![-2.0 / d as f64 - 1.0; d],
    }
}

/// Point deep inside `δ_X`, if the strip is bounded.
fn model_centre(model: &ModelSpec) -> Option<Vec<f64>> {
    match model.params() {
        ModelParams::Gbm { .. } => None,
        ModelParams::Vg { sigma, theta, .. } => {
            Some(theta.iter().zip(sigma).map(|(t, s)| t / (s * s)).collect())
        }
        ModelParams::Nig { beta, .. } => Some(beta.clone()),
    }
}

fn find_feasible(p: &Problem, start: &[f64]) -> Option<Vec<f64>> {
    if p.feasible(start) {
        return Some(start.to_vec());
    }
    let centre = model_centre(p.model);
    if let Some(c) = &centre {
        // Walk from the start towards the model centre.
        for k in 1..=256 {
            let t = k as f64 / 256.0;
            let r: Vec<f64> = start.iter().zip(c).map(|(s, ci)| s + t * (ci - s)).collect();
            if p.feasible(&r) {
                return Some(r);
            }
        }
    }
    // Rescale the family default, optionally recentred.
    let base = default_start(p.payoff);
    for k in 0..=60 {
        let s = 10f64.powf(-2.0 + k as f64 / 20.0);
        let scaled: Vec<f64> = match p.payoff.family() {
            PayoffFamily::BasketPut => base.iter().map(|_| s).collect(),
            PayoffFamily::CallOnMin => base.iter().map(|_| -(1.0 + s) / base.len() as f64 - s).collect(),
        };
        if p.feasible(&scaled) {
            return Some(scaled);
        }
        if let Some(c) = &centre {
            let moved: Vec<f64> = scaled.iter().zip(c).map(|(x, ci)| x + ci).collect();
            if p.feasible(&moved) {
                return Some(moved);
            }
        }
    }
    None
}

/// Minimizes `g(0; R)` over the strict interior of `δ_V`.
pub fn optimal_damping(model: &ModelSpec, payoff: &PayoffSpec, opts: &DampingOptions) -> Result<OptimalDamping> {
    if model.dim() != payoff.dim() {
        return Err(crate::error::invalid("model and payoff dimensions differ"));
    }
    let p = Problem { model, payoff };
    let start = opts.start.clone().unwrap_or_else(|| default_start(payoff));
    if start.len() != model.dim() {
        return Err(crate::error::invalid("starting point has wrong length"));
    }
    let mut r = find_feasible(&p, &start).ok_or_else(|| {
        PricingError::Infeasible(format!(
            "no point of the {} strip found from {start:?}",
            payoff.family()
        ))
    })?;

    let mut budget = opts.max_iter;
    let mut mu = 1e-2;
    while mu > 1e-12 && budget > 0 {
        p.newton(&mut r, mu, 1e-3, &mut budget);
        mu *= 1e-2;
    }
    let converged = budget > 0 && p.newton(&mut r, 0.0, opts.tol, &mut budget);
    let iterations = opts.max_iter - budget;
    if !converged {
        log::warn!("damping optimizer stopped after {iterations} iterations without convergence");
    }
    let damping = DampingVector::new(r, model, payoff)?;
    let log_peak = p.objective(damping.as_slice());
    Ok(OptimalDamping {
        damping,
        log_peak,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn gbm_basket_put_symmetric_optimum() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let p = PayoffSpec::basket_put(100.0, 2).unwrap();
        let o = optimal_damping(&m, &p, &DampingOptions::default()).unwrap();
        assert!(o.converged);
        assert!(close(o.damping.as_slice(), &[2.4898, 2.4898], 1e-3), "{:?}", o.damping);
    }

    #[test]
    fn gbm_call_on_min() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let p = PayoffSpec::call_on_min(100.0, 2).unwrap();
        let o = optimal_damping(&m, &p, &DampingOptions::default()).unwrap();
        assert!(close(o.damping.as_slice(), &[-3.408, -3.408], 2e-3), "{:?}", o.damping);
    }

    #[test]
    fn infeasible_start_is_repaired() {
        let m = ModelSpec::nig(vec![100.0; 2], 0.0, 1.0, 15.0, vec![-3.0, -3.0], 0.2).unwrap();
        let p = PayoffSpec::call_on_min(100.0, 2).unwrap();
        let opts = DampingOptions {
            start: Some(vec![-40.0, -40.0]),
            ..Default::default()
        };
        let o = optimal_damping(&m, &p, &opts).unwrap();
        assert!(o.damping.min_margin() >= MIN_MARGIN);
        let again = optimal_damping(&m, &p, &DampingOptions::default()).unwrap();
        assert!(close(o.damping.as_slice(), again.damping.as_slice(), 1e-4));
    }

    #[test]
    fn empty_intersection_is_infeasible() {
        // The NIG ball around β = (5, 5) with radius 1 misses the call-on-min strip.
        let m = ModelSpec::nig(vec![100.0; 2], 0.0, 1.0, 7.2, vec![5.0, 5.0], 0.2).unwrap();
        let p = PayoffSpec::call_on_min(100.0, 2).unwrap();
        assert!(matches!(
            optimal_damping(&m, &p, &DampingOptions::default()),
            Err(PricingError::Infeasible(_))
        ));
    }

    #[test]
    fn iteration_cap_returns_best_iterate() {
        let m = ModelSpec::gbm(vec![100.0; 2], 0.0, 1.0, vec![0.4, 0.4]).unwrap();
        let p = PayoffSpec::basket_put(100.0, 2).unwrap();
        let opts = DampingOptions {
            max_iter: 1,
            ..Default::default()
        };
        let o = optimal_damping(&m, &p, &opts).unwrap();
        assert!(!o.converged);
        assert!(o.log_peak <= log_peak(&m, &p, &[1.0, 1.0]).unwrap());
    }
}
