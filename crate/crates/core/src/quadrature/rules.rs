//! Gauss–Laguerre and Gauss–Hermite rules by Golub–Welsch.
//!
//! Nodes are eigenvalues of the Jacobi matrix, refined by Newton's method on
//! the three-term recurrence. Weights come from the Christoffel function
//! `w_k = 1 / Σ_j p_j(x_k)²` with orthonormal `p_j`, accumulated with
//! rescaling so that large `n` neither overflows nor underflows; they are kept
//! in log form as well for the full-line mapping.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Largest node count supported.
pub const MAX_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    Laguerre,
    Hermite,
}

/// An `n`-point Gauss rule for `∫ f(x) w(x) dx`, with `w = e^{-x}` on
/// `[0, ∞)` or `w = e^{-x²}` on `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateRule {
    pub kind: RuleKind,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    log_weights: Vec<f64>,
}

/// Nodes and effective weights of a rule for `∫_R f(u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullLineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FullLineRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sums mirrored node pairs together, so odd integrands cancel exactly.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.nodes.len();
        let mut acc = 0.0;
        for k in 0..n / 2 {
            acc += self.weights[k] * f(self.nodes[k]) + self.weights[n - 1 - k] * f(self.nodes[n - 1 - k]);
        }
        if n % 2 == 1 {
            acc += self.weights[n / 2] * f(self.nodes[n / 2]);
        }
        acc
    }
}

impl UnivariateRule {
    pub fn new(kind: RuleKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::invalid("a quadrature rule needs at least one node"));
        }
        if n > MAX_NODES {
            return Err(PricingError::Numerical(format!(
                "{n}-point rule exceeds the supported maximum of {MAX_NODES}"
            )));
        }
        let (a, b) = recurrence(kind, n);
        let mut nodes = if n == 1 {
            vec![a[0]]
        } else {
            let jacobi = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    a[i]
                } else if i + 1 == j || j + 1 == i {
                    b[i.max(j)].sqrt()
                } else {
                    0.0
                }
            });
            jacobi.symmetric_eigenvalues().iter().copied().collect()
        };
        nodes.sort_by(|x, y| x.total_cmp(y));
        for x in nodes.iter_mut() {
            *x = polish(kind, n, &a, &b, *x);
        }
        if kind == RuleKind::Hermite {
            // Exact symmetry about zero.
            for k in 0..n / 2 {
                let v = 0.5 * (nodes[n - 1 - k] - nodes[k]);
                nodes[k] = -v;
                nodes[n - 1 - k] = v;
            }
            if n % 2 == 1 {
                nodes[n / 2] = 0.0;
            }
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(PricingError::Numerical(format!("{kind:?} nodes for n = {n} not distinct")));
        }
        let mu0 = match kind {
            RuleKind::Laguerre => 1.0,
            RuleKind::Hermite => std::f64::consts::PI.sqrt(),
        };
        let log_weights: Vec<f64> = nodes.iter().map(|x| log_christoffel(&a, &b, mu0, *x)).collect();
        let weights = log_weights.iter().map(|l| l.exp()).collect();
        Ok(Self {
            kind,
            n,
            nodes,
            weights,
            log_weights,
        })
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Weight-compensated rule on the whole line: two-sided for Laguerre
    /// (`2n` nodes), direct for Hermite (`n` nodes).
    pub fn full_line(&self) -> FullLineRule {
        match self.kind {
            RuleKind::Laguerre => {
                let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(2 * self.n);
                for (x, lw) in self.nodes.iter().zip(&self.log_weights) {
                    let w = (lw + x).exp();
                    pairs.push((-x, w));
                    pairs.push((*x, w));
                }
                pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
                FullLineRule {
                    nodes: pairs.iter().map(|p| p.0).collect(),
                    weights: pairs.iter().map(|p| p.1).collect(),
                }
            }
            RuleKind::Hermite => FullLineRule {
                nodes: self.nodes.clone(),
                weights: self
                    .nodes
                    .iter()
                    .zip(&self.log_weights)
                    .map(|(x, lw)| (lw + x * x).exp())
                    .collect(),
            },
        }
    }
}

pub fn laguerre_rule(n: usize) -> Result<UnivariateRule> {
    UnivariateRule::new(RuleKind::Laguerre, n)
}

pub fn hermite_rule(n: usize) -> Result<UnivariateRule> {
    UnivariateRule::new(RuleKind::Hermite, n)
}

pub fn full_line_nodes(rule: &UnivariateRule) -> FullLineRule {
    rule.full_line()
}

/// Process-wide cache of full-line rules.
pub fn cached_full_line(kind: RuleKind, n: usize) -> Result<Arc<FullLineRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(RuleKind, usize), Arc<FullLineRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(kind, n)) {
        return Ok(r.clone());
    }
    let rule = Arc::new(UnivariateRule::new(kind, n)?.full_line());
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry((kind, n))
        .or_insert(rule.clone());
    Ok(rule)
}

/// Monic recurrence `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
fn recurrence(kind: RuleKind, n: usize) -> (Vec<f64>, Vec<f64>) {
    match kind {
        RuleKind::Laguerre => (
            (0..n).map(|k| 2.0 * k as f64 + 1.0).collect(),
            (0..n).map(|k| (k * k) as f64).collect(),
        ),
        RuleKind::Hermite => (vec![0.0; n], (0..n).map(|k| 0.5 * k as f64).collect()),
    }
}

/// Ratio `p_n(x) / p_n'(x)` from the monic recurrence, rescaled as it goes.
fn newton_ratio(a: &[f64], b: &[f64], n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    for k in 0..n {
        let p2 = (x - a[k]) * p1 - b[k] * p0;
        let d2 = p1 + (x - a[k]) * d1 - b[k] * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let s = p1.abs().max(d1.abs());
        if s > 1e100 {
            p0 /= s;
            p1 /= s;
            d0 /= s;
            d1 /= s;
        }
    }
    p1 / d1
}

fn polish(kind: RuleKind, n: usize, a: &[f64], b: &[f64], x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..4 {
        let dx = newton_ratio(a, b, n, x);
        if !dx.is_finite() {
            break;
        }
        let next = x - dx;
        // Guard against jumping to a neighbouring root.
        if kind == RuleKind::Laguerre && next <= 0.0 {
            break;
        }
        x = next;
        if dx.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// `ln w(x) = -ln Σ_{j<n} p̃_j(x)²` with orthonormal `p̃_j`.
fn log_christoffel(a: &[f64], b: &[f64], mu0: f64, x: f64) -> f64 {
    let n = a.len();
    let mut prev = 0.0;
    let mut cur = 1.0 / mu0.sqrt();
    let mut sum = cur * cur;
    let mut log_scale = 0.0; // actual values are (prev, cur) * e^{log_scale}
    for k in 0..n - 1 {
        let next = ((x - a[k]) * cur - b[k].sqrt() * prev) / b[k + 1].sqrt();
        prev = cur;
        cur = next;
        sum += cur * cur;
        let s = cur.abs().max(prev.abs());
        if s > 1e100 {
            prev /= s;
            cur /= s;
            sum /= s * s;
            log_scale += s.ln();
        }
    }
    -(sum.ln() + 2.0 * log_scale)
}
