//! Experiment runner: one configuration in, one [`PriceReport`] out, plus
//! convergence sweeps over a list of budgets.

pub mod registry;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use registry::{entry, registry, RegistryEntry};

use crate::cos2d::{cos_price, CosConfig};
use crate::error::{PricingError, Result};
use crate::integrand::{optimal_damping, DampedIntegrand, DampingOptions, DampingVector};
use crate::mc::mc_price;
use crate::models::ModelSpec;
use crate::payoffs::PayoffSpec;
use crate::quadrature::{asgq, smolyak, tensor_product, AsgqOptions, MultiIndex, QuadratureOptions, RuleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "TP")]
    Tp,
    #[serde(rename = "SM")]
    Sm,
    #[serde(rename = "ASGQ")]
    Asgq,
    #[serde(rename = "MC")]
    Mc,
    #[serde(rename = "COS2D")]
    Cos2d,
}

impl Method {
    pub fn is_quadrature(self) -> bool {
        matches!(self, Method::Tp | Method::Sm | Method::Asgq)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Tp => "TP",
            Method::Sm => "SM",
            Method::Asgq => "ASGQ",
            Method::Mc => "MC",
            Method::Cos2d => "COS2D",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = PricingError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TP" => Ok(Method::Tp),
            "SM" => Ok(Method::Sm),
            "ASGQ" => Ok(Method::Asgq),
            "MC" => Ok(Method::Mc),
            "COS2D" | "COS" => Ok(Method::Cos2d),
            other => Err(PricingError::Config(format!("unknown method {other:?}"))),
        }
    }
}

/// How the damping vector is chosen for the quadrature methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DampingChoice {
    #[default]
    Optimal,
    Fixed { r: Vec<f64> },
    /// The optimum shifted by `offset`.
    OptimalOffset { offset: Vec<f64> },
}

/// Method parameters. Only the fields relevant to the chosen method are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodOptions {
    /// TP: nodes parameter per direction. SM: Smolyak level.
    pub level: u32,
    /// ASGQ: evaluation budget. TP/SM: optional hard cap.
    pub max_evals: Option<u64>,
    /// ASGQ profit threshold.
    pub threshold: f64,
    pub rule: RuleKind,
    pub symmetric: bool,
    /// MC sample count.
    pub samples: u64,
    pub seed: u64,
    pub cos: CosConfig,
    pub optimizer: DampingOptions,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            level: 8,
            max_evals: None,
            threshold: 0.0,
            rule: RuleKind::Laguerre,
            symmetric: false,
            samples: 1_000_000,
            seed: 42,
            cos: CosConfig::default(),
            optimizer: DampingOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub value: f64,
    /// Absolute 95% error of `value`.
    #[serde(default)]
    pub stat_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub model: ModelSpec,
    pub payoff: PayoffSpec,
    pub method: Method,
    #[serde(default)]
    pub options: MethodOptions,
    #[serde(default)]
    pub damping: DampingChoice,
    #[serde(default)]
    pub reference: Option<Reference>,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, payoff: PayoffSpec, method: Method) -> Self {
        Self {
            name: None,
            model,
            payoff,
            method,
            options: MethodOptions::default(),
            damping: DampingChoice::Optimal,
            reference: None,
        }
    }

    /// Configuration for registry entry `e` with its reference attached.
    pub fn from_entry(e: &RegistryEntry, method: Method) -> Self {
        Self {
            name: Some(format!("example-{}", e.id)),
            reference: Some(Reference {
                value: e.reference,
                stat_error: Some(e.stat_error),
            }),
            ..Self::new(e.model.clone(), e.payoff.clone(), method)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.model.dim();
        if self.payoff.dim() != d {
            return Err(PricingError::Config(format!(
                "model has d = {d} but payoff has d = {}",
                self.payoff.dim()
            )));
        }
        match &self.damping {
            DampingChoice::Fixed { r } if r.len() != d => {
                return Err(PricingError::Config("fixed damping has wrong length".into()))
            }
            DampingChoice::OptimalOffset { offset } if offset.len() != d => {
                return Err(PricingError::Config("damping offset has wrong length".into()))
            }
            _ => {}
        }
        match self.method {
            Method::Tp if self.options.level == 0 => {
                Err(PricingError::Config("TP needs level >= 1".into()))
            }
            Method::Asgq if self.options.max_evals == Some(0) => {
                Err(PricingError::Config("ASGQ budget must be positive".into()))
            }
            Method::Mc if self.options.samples < 2 => Err(PricingError::Config("MC needs at least 2 samples".into())),
            Method::Cos2d => {
                if d > 2 {
                    return Err(PricingError::Config(format!("COS2D supports d <= 2, got {d}")));
                }
                self.options.cos.validate()
            }
            _ => Ok(()),
        }
    }

    /// Damping vector for the quadrature methods, or an error if the
    /// requested vector is outside the strip.
    pub fn resolve_damping(&self) -> Result<DampingVector> {
        match &self.damping {
            DampingChoice::Fixed { r } => DampingVector::new(r.clone(), &self.model, &self.payoff),
            DampingChoice::Optimal => Ok(optimal_damping(&self.model, &self.payoff, &self.options.optimizer)?.damping),
            DampingChoice::OptimalOffset { offset } => {
                let opt = optimal_damping(&self.model, &self.payoff, &self.options.optimizer)?;
                let r = opt.damping.as_slice().iter().zip(offset).map(|(a, b)| a + b).collect();
                DampingVector::new(r, &self.model, &self.payoff).map_err(|e| {
                    PricingError::Config(format!("offset damping leaves the strip of analyticity: {e}"))
                })
            }
        }
    }

    /// The value that a sweep budget sets for this method.
    pub fn with_budget(&self, budget: u64) -> Result<Self> {
        let mut c = self.clone();
        match self.method {
            Method::Tp | Method::Sm => {
                c.options.level = u32::try_from(budget).map_err(|_| PricingError::Config("level too large".into()))?
            }
            Method::Asgq => c.options.max_evals = Some(budget),
            Method::Mc => c.options.samples = budget,
            Method::Cos2d => {
                c.options.cos.n_cos = budget as usize;
                c.options.cos.q = c.options.cos.q.max(budget as usize);
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceReport {
    pub name: Option<String>,
    pub method: Method,
    pub estimate: f64,
    pub reference: Option<f64>,
    pub relative_error: Option<f64>,
    /// Quadrature: `Σ_β Π m(β_i)`. MC: `M`. COS2D: `N_COS^d`.
    pub n: u64,
    /// Quadrature: integrand evaluations. MC: `M`. COS2D: characteristic
    /// function evaluations.
    pub n_eval: u64,
    pub damping: Option<Vec<f64>>,
    pub wall_time_s: f64,
    /// MC only: relative 95% statistical error.
    pub rel_stat_error: Option<f64>,
    /// ASGQ only: final index set (accepted and active).
    pub index_set: Option<Vec<MultiIndex>>,
    pub budget_exhausted: bool,
}

/// One row of a convergence table. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "N_eval")]
    pub n_eval: u64,
    pub estimate: f64,
    pub relative_error: Option<f64>,
    pub wall_time_s: f64,
}

impl From<&PriceReport> for SweepRow {
    fn from(r: &PriceReport) -> Self {
        SweepRow {
            method: r.method,
            n: r.n,
            n_eval: r.n_eval,
            estimate: r.estimate,
            relative_error: r.relative_error,
            wall_time_s: r.wall_time_s,
        }
    }
}

pub fn relative_error(estimate: f64, reference: f64) -> f64 {
    (estimate - reference).abs() / reference.abs()
}

/// Runs one experiment. Wall time covers damping optimization and the method
/// call.
pub fn run(config: &ExperimentConfig) -> Result<PriceReport> {
    config.validate()?;
    let opts = &config.options;
    let start = Instant::now();
    let mut report = PriceReport {
        name: config.name.clone(),
        method: config.method,
        estimate: f64::NAN,
        reference: config.reference.map(|r| r.value),
        relative_error: None,
        n: 0,
        n_eval: 0,
        damping: None,
        wall_time_s: 0.0,
        rel_stat_error: None,
        index_set: None,
        budget_exhausted: false,
    };
    match config.method {
        Method::Tp | Method::Sm | Method::Asgq => {
            let damping = config.resolve_damping()?;
            report.damping = Some(damping.as_slice().to_vec());
            let f = DampedIntegrand::new(config.model.clone(), config.payoff.clone(), damping)?;
            let quad = QuadratureOptions {
                rule: opts.rule,
                symmetric: opts.symmetric,
                max_evals: opts.max_evals,
            };
            if config.method == Method::Asgq {
                let a = AsgqOptions {
                    threshold: opts.threshold,
                    max_evals: opts.max_evals.unwrap_or(AsgqOptions::default().max_evals),
                };
                let res = asgq(&f, &a, &QuadratureOptions { max_evals: None, ..quad })?;
                report.estimate = res.estimate;
                report.n = res.n_paper;
                report.n_eval = res.n_eval;
                report.budget_exhausted = res.budget_exhausted;
                report.index_set = Some(res.index_set.iter().cloned().collect());
            } else {
                let res = if config.method == Method::Tp {
                    tensor_product(&f, opts.level, &quad)?
                } else {
                    smolyak(&f, opts.level, &quad)?
                };
                report.estimate = res.estimate;
                report.n = res.n_paper;
                report.n_eval = res.n_eval;
            }
            if !report.estimate.is_finite() {
                return Err(PricingError::Numerical(
                    "quadrature produced a non-finite estimate".into(),
                ));
            }
        }
        Method::Mc => {
            let res = mc_price(&config.model, &config.payoff, opts.samples, opts.seed)?;
            report.estimate = res.estimate;
            report.n = res.m;
            report.n_eval = res.m;
            report.rel_stat_error = Some(res.rel_stat_error);
        }
        Method::Cos2d => {
            let res = cos_price(&config.model, &config.payoff, &opts.cos)?;
            report.estimate = res.estimate;
            report.n = (opts.cos.n_cos as u64).pow(config.model.dim() as u32);
            report.n_eval = res.n_cf;
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.relative_error = report.reference.map(|r| relative_error(report.estimate, r));
    Ok(report)
}

/// One run per budget. Budgets set the TP/SM level, the ASGQ evaluation
/// budget, the MC sample count or `N_COS`, and must be strictly increasing.
pub fn sweep(config: &ExperimentConfig, budgets: &[u64]) -> Result<Vec<SweepRow>> {
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PricingError::Config("sweep budgets must be strictly increasing".into()));
    }
    budgets
        .iter()
        .map(|b| run(&config.with_budget(*b)?).map(|r| SweepRow::from(&r)))
        .collect()
}

/// Smallest `N_eval` from which every later row of the sweep has relative
/// error below `tol`. Rows must be in sweep order.
pub fn evaluations_to_reach(rows: &[SweepRow], tol: f64) -> Option<u64> {
    let below = |r: &SweepRow| r.relative_error.is_some_and(|e| e < tol);
    let tail = rows.iter().rev().take_while(|r| below(r)).count();
    if tail == 0 {
        return None;
    }
    Some(rows[rows.len() - tail].n_eval)
}
