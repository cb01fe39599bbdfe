//! Damped Fourier pricing of multi-asset European options under
//! multivariate GBM, variance-gamma and NIG models, with deterministic
//! quadrature, Monte Carlo and a COS comparator.

pub mod cos2d;
pub mod error;
pub mod experiment;
pub mod integrand;
pub mod mc;
pub mod models;
pub mod payoffs;
pub mod quadrature;

pub use error::{PricingError, Result};
pub use integrand::{g, optimal_damping, DampedIntegrand, DampingOptions, DampingVector, OptimalDamping};
pub use models::{Cumulants, ModelFamily, ModelParams, ModelSpec, NigDrift};
pub use payoffs::{PayoffFamily, PayoffSpec};
pub use quadrature::{Integrand, QuadratureOptions, RuleKind};
pub use cos2d::{cos_price, CosConfig, CosResult};
pub use mc::{mc_price, McResult};
pub use experiment::{run, sweep, DampingChoice, ExperimentConfig, Method, MethodOptions, PriceReport, SweepRow};
