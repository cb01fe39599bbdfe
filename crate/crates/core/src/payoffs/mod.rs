//! Multi-asset payoffs and their generalized Fourier transforms
//! `P̂(z) = ∫ e^{-i⟨z, x⟩} P(x) dx`.
//!
//! The transforms are given for the unweighted payoffs. A weighted basket put
//! `max(K - Σ w_i e^{x_i}, 0)` is the unweighted one evaluated at
//! `x_i + ln w_i`; the integrand absorbs that shift into the log-spot.

mod gamma;

pub use gamma::log_gamma;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PricingError, Result};

/// Default cap on `|Re ln P̂|` before exponentiation.
pub const DEFAULT_LOG_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PayoffFamily {
    BasketPut,
    CallOnMin,
}

impl std::fmt::Display for PayoffFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PayoffFamily::BasketPut => "basket-put",
            PayoffFamily::CallOnMin => "call-on-min",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PayoffSpecRepr {
    family: PayoffFamily,
    strike: f64,
    weights: Vec<f64>,
}

/// A European multi-asset payoff.
///
/// `weights` fixes the dimension for both families; only the basket put uses
/// their values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PayoffSpecRepr", into = "PayoffSpecRepr")]
pub struct PayoffSpec {
    family: PayoffFamily,
    strike: f64,
    weights: Vec<f64>,
}

impl TryFrom<PayoffSpecRepr> for PayoffSpec {
    type Error = PricingError;
    fn try_from(r: PayoffSpecRepr) -> Result<Self> {
        PayoffSpec::new(r.family, r.strike, r.weights)
    }
}

impl From<PayoffSpec> for PayoffSpecRepr {
    fn from(p: PayoffSpec) -> Self {
        PayoffSpecRepr {
            family: p.family,
            strike: p.strike,
            weights: p.weights,
        }
    }
}

/// Strip-membership result with one margin per constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffStrip {
    pub inside: bool,
    /// Basket put: `R_i`. Call on min: `-R_i` for each `i`, then `-1 - ΣR_i`.
    pub margins: Vec<f64>,
}

impl PayoffStrip {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl PayoffSpec {
    pub fn new(family: PayoffFamily, strike: f64, weights: Vec<f64>) -> Result<Self> {
        if !(strike.is_finite() && strike > 0.0) {
            return Err(invalid("strike must be positive"));
        }
        if weights.is_empty() {
            return Err(invalid("weights must be non-empty"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("weights must be positive"));
        }
        Ok(Self {
            family,
            strike,
            weights,
        })
    }

    /// Basket put with equal weights `1/d`.
    pub fn basket_put(strike: f64, d: usize) -> Result<Self> {
        Self::new(PayoffFamily::BasketPut, strike, vec![1.0 / d as f64; d])
    }

    pub fn call_on_min(strike: f64, d: usize) -> Result<Self> {
        Self::new(PayoffFamily::CallOnMin, strike, vec![1.0 / d as f64; d])
    }

    pub fn family(&self) -> PayoffFamily {
        self.family
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Shift added to the log-spot so the unweighted transform applies.
    pub fn log_spot_shift(&self) -> Vec<f64> {
        match self.family {
            PayoffFamily::BasketPut => self.weights.iter().map(|w| w.ln()).collect(),
            PayoffFamily::CallOnMin => vec![0.0; self.dim()],
        }
    }

    /// Payoff at log-prices `x`.
    pub fn payoff(&self, x: &[f64]) -> f64 {
        match self.family {
            PayoffFamily::BasketPut => {
                let basket: f64 = self.weights.iter().zip(x).map(|(w, xi)| w * xi.exp()).sum();
                (self.strike - basket).max(0.0)
            }
            PayoffFamily::CallOnMin => {
                let m = x.iter().copied().fold(f64::INFINITY, f64::min);
                (m.exp() - self.strike).max(0.0)
            }
        }
    }

    pub fn strip_contains(&self, r: &[f64]) -> PayoffStrip {
        let margins: Vec<f64> = match self.family {
            PayoffFamily::BasketPut => r.to_vec(),
            PayoffFamily::CallOnMin => {
                let mut m: Vec<f64> = r.iter().map(|x| -x).collect();
                m.push(-1.0 - r.iter().sum::<f64>());
                m
            }
        };
        let inside = r.len() == self.dim() && margins.iter().all(|m| *m > 0.0);
        PayoffStrip { inside, margins }
    }

    /// `ln P̂(z)` of the unweighted payoff.
    pub fn log_payoff_hat(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim() {
            return Err(invalid(format!("argument has length {}, expected {}", z.len(), self.dim())));
        }
        let im: Vec<f64> = z.iter().map(|c| c.im).collect();
        if !self.strip_contains(&im).inside {
            return Err(PricingError::StripViolation(format!(
                "Im[z] = {im:?} outside the {} strip",
                self.family
            )));
        }
        let i = Complex64::i();
        let sum: Complex64 = z.iter().sum();
        let strike_term = (1.0 - i * sum) * self.strike.ln();
        match self.family {
            PayoffFamily::BasketPut => {
                let mut acc = strike_term - log_gamma(-i * sum + 2.0)?;
                for zj in z {
                    acc += log_gamma(-i * zj)?;
                }
                Ok(acc)
            }
            PayoffFamily::CallOnMin => {
                let mut acc = strike_term - (i * sum - 1.0).ln();
                for zj in z {
                    acc -= (i * zj).ln();
                }
                Ok(acc)
            }
        }
    }

    /// `P̂(z)` with the default overflow cap.
    pub fn payoff_hat(&self, z: &[Complex64]) -> Result<Complex64> {
        self.payoff_hat_capped(z, DEFAULT_LOG_CAP)
    }

    pub fn payoff_hat_capped(&self, z: &[Complex64], cap: f64) -> Result<Complex64> {
        let l = self.log_payoff_hat(z)?;
        if l.re.abs() > cap {
            return Err(PricingError::Overflow {
                log_magnitude: l.re,
                cap,
            });
        }
        Ok(l.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn payoff_values() {
        let put = PayoffSpec::basket_put(100.0, 2).unwrap();
        let ln = f64::ln;
        assert_eq!(put.payoff(&[ln(100.0), ln(100.0)]), 0.0);
        assert!((put.payoff(&[ln(80.0), ln(60.0)]) - 30.0).abs() < 1e-12);
        let com = PayoffSpec::call_on_min(100.0, 2).unwrap();
        assert!((com.payoff(&[ln(120.0), ln(110.0)]) - 10.0).abs() < 1e-12);
        assert_eq!(com.payoff(&[ln(120.0), ln(90.0)]), 0.0);
    }

    #[test]
    fn strips() {
        let put = PayoffSpec::basket_put(100.0, 2).unwrap();
        assert!(put.strip_contains(&[2.5, 2.5]).inside);
        assert!(!put.strip_contains(&[2.5, 0.0]).inside);
        let com = PayoffSpec::call_on_min(100.0, 2).unwrap();
        assert!(!com.strip_contains(&[-0.4, -0.4]).inside);
        assert!(com.strip_contains(&[-3.4, -3.4]).inside);
        let s = com.strip_contains(&[-0.5, -0.5]);
        assert!(!s.inside);
        assert!(s.margins[2].abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_put_is_rational() {
        let put = PayoffSpec::basket_put(100.0, 1).unwrap();
        let i = Complex64::i();
        for &(u, r) in &[(0.0, 2.5), (3.7, 0.4), (-12.0, 1.1), (40.0, 5.0)] {
            let z = c(u, r);
            let got = put.payoff_hat(&[z]).unwrap();
            let w = -i * z;
            let expected = Complex64::new(100.0, 0.0).powc(1.0 - i * z) / (w * (w + 1.0));
            assert!((got - expected).norm() <= 1e-12 * expected.norm(), "{z}: {got} vs {expected}");
        }
    }

    #[test]
    fn call_on_min_on_imaginary_axis() {
        let com = PayoffSpec::call_on_min(100.0, 2).unwrap();
        let v = com.payoff_hat(&[c(0.0, -3.4), c(0.0, -3.4)]).unwrap();
        let expected = 100f64.powf(1.0 - 6.8) / ((6.8 - 1.0) * 3.4 * 3.4);
        assert!(v.im.abs() < 1e-14 * expected);
        assert!((v.re - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn strict_strip_enforcement() {
        let put = PayoffSpec::basket_put(100.0, 2).unwrap();
        let err = put.payoff_hat(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap_err();
        assert!(matches!(err, PricingError::StripViolation(_)));
        let com = PayoffSpec::call_on_min(100.0, 2).unwrap();
        let err = com.payoff_hat(&[c(0.0, -0.5), c(0.0, -0.5)]).unwrap_err();
        assert!(matches!(err, PricingError::StripViolation(_)));
    }

    #[test]
    fn overflow_cap() {
        let put = PayoffSpec::basket_put(100.0, 4).unwrap();
        let z = vec![c(0.0, 200.0); 4];
        assert!(matches!(put.payoff_hat(&z), Err(PricingError::Overflow { .. })));
        assert!(put.log_payoff_hat(&z).unwrap().re.abs() > DEFAULT_LOG_CAP);
        assert!(put.payoff_hat_capped(&z, 1e6).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = PayoffSpec::new(PayoffFamily::BasketPut, 60.0, vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"family":"BasketPut","strike":60.0,"weights":[0.25,0.75]}"#);
        assert_eq!(serde_json::from_str::<PayoffSpec>(&s).unwrap(), p);
        assert!(serde_json::from_str::<PayoffSpec>(&s.replace("60.0", "-1.0")).is_err());
    }
}
