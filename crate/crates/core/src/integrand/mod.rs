//! The damped Fourier integrand
//! `g(u; R) = (2π)^{-d} e^{-rT} Re[Φ(u + iR) P̂(u + iR)]`
//! whose integral over `R^d` is the option value, and the choice of the
//! damping vector `R`.

mod damping;

pub use damping::{optimal_damping, DampingOptions, OptimalDamping};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, PricingError, Result};
use crate::models::ModelSpec;
use crate::payoffs::PayoffSpec;
use crate::quadrature::Integrand;

/// A damping vector known to lie in `δ_V = δ_X ∩ δ_P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<f64>")]
pub struct DampingVector {
    r: Vec<f64>,
    model_margin: f64,
    payoff_margins: Vec<f64>,
}

impl From<DampingVector> for Vec<f64> {
    fn from(d: DampingVector) -> Self {
        d.r
    }
}

impl DampingVector {
    pub fn new(r: Vec<f64>, model: &ModelSpec, payoff: &PayoffSpec) -> Result<Self> {
        if r.len() != model.dim() || r.len() != payoff.dim() {
            return Err(invalid(format!(
                "damping vector has length {}, model dimension {}, payoff dimension {}",
                r.len(),
                model.dim(),
                payoff.dim()
            )));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(invalid("damping vector must be finite"));
        }
        let xs = model.strip_contains(&r);
        let ps = payoff.strip_contains(&r);
        if !xs.inside || !ps.inside {
            return Err(PricingError::StripViolation(format!(
                "R = {r:?} not in the strip of the integrand (model margin {:e}, payoff margins {:?})",
                xs.margin, ps.margins
            )));
        }
        Ok(Self {
            r,
            model_margin: xs.margin,
            payoff_margins: ps.margins,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.r
    }

    pub fn model_margin(&self) -> f64 {
        self.model_margin
    }

    pub fn payoff_margins(&self) -> &[f64] {
        &self.payoff_margins
    }

    /// Smallest of all constraint margins.
    pub fn min_margin(&self) -> f64 {
        self.payoff_margins
            .iter()
            .copied()
            .fold(self.model_margin, f64::min)
    }
}

/// The integrand `g(·; R)` for a fixed model, payoff and damping vector.
#[derive(Debug, Clone)]
pub struct DampedIntegrand {
    model: ModelSpec,
    payoff: PayoffSpec,
    damping: DampingVector,
    shift: Vec<f64>,
    log_scale: f64,
}

/// `(2π)^{-d} e^{-rT}` in log form, plus the payoff's log-spot shift.
fn constants(model: &ModelSpec, payoff: &PayoffSpec) -> (f64, Vec<f64>) {
    let d = model.dim() as f64;
    let log_scale = -d * (2.0 * std::f64::consts::PI).ln() - model.rate() * model.maturity();
    (log_scale, payoff.log_spot_shift())
}

fn log_integrand(
    model: &ModelSpec,
    payoff: &PayoffSpec,
    shift: &[f64],
    log_scale: f64,
    z: &[Complex64],
) -> Result<Complex64> {
    let shift_term: Complex64 = z.iter().zip(shift).map(|(zj, s)| zj * *s).sum();
    Ok(log_scale + model.log_chf(z)? + Complex64::i() * shift_term + payoff.log_payoff_hat(z)?)
}

impl DampedIntegrand {
    pub fn new(model: ModelSpec, payoff: PayoffSpec, damping: DampingVector) -> Result<Self> {
        // Re-validate: the damping vector may have been built for another pair.
        let damping = DampingVector::new(damping.r, &model, &payoff)?;
        let (log_scale, shift) = constants(&model, &payoff);
        Ok(Self {
            model,
            payoff,
            damping,
            shift,
            log_scale,
        })
    }

    pub fn damping(&self) -> &DampingVector {
        &self.damping
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn payoff(&self) -> &PayoffSpec {
        &self.payoff
    }

    /// `g(u; R)`, propagating strip and branch errors.
    pub fn try_eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.model.dim() {
            return Err(invalid("frequency vector has wrong length"));
        }
        let z: Vec<Complex64> = u
            .iter()
            .zip(self.damping.as_slice())
            .map(|(ui, ri)| Complex64::new(*ui, *ri))
            .collect();
        let l = log_integrand(&self.model, &self.payoff, &self.shift, self.log_scale, &z)?;
        Ok(l.re.exp() * l.im.cos())
    }

    /// `ln g(0; R)`; `g(0; R)` is real and positive on `δ_V`.
    pub fn log_peak(&self) -> Result<f64> {
        log_peak(&self.model, &self.payoff, self.damping.as_slice())
    }
}

impl Integrand for DampedIntegrand {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn eval(&self, u: &[f64]) -> f64 {
        self.try_eval(u).unwrap_or(f64::NAN)
    }

    fn is_even(&self) -> bool {
        true
    }
}

/// `g(u; R)` for a single point.
pub fn g(u: &[f64], damping: &DampingVector, model: &ModelSpec, payoff: &PayoffSpec) -> Result<f64> {
    DampedIntegrand::new(model.clone(), payoff.clone(), damping.clone())?.try_eval(u)
}

/// `ln g(0; R)` computed entirely in log space. Errors outside `δ_V`.
pub fn log_peak(model: &ModelSpec, payoff: &PayoffSpec, r: &[f64]) -> Result<f64> {
    let (log_scale, shift) = constants(model, payoff);
    let z: Vec<Complex64> = r.iter().map(|x| Complex64::new(0.0, *x)).collect();
    let l = log_integrand(model, payoff, &shift, log_scale, &z)?;
    Ok(l.re)
}
