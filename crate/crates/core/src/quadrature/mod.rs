//! Deterministic quadrature on `R^d`: full tensor products, Smolyak sparse
//! grids and the dimension-adaptive sparse grid, all written as sums of
//! hierarchical differences `ΔQ^β` over an index set.

mod asgq;
mod index;
mod rules;

pub use asgq::{asgq, AsgqOptions, AsgqResult, ProfitStep};
pub use index::{IndexSet, LevelMap, MultiIndex};
pub use rules::{
    cached_full_line, full_line_nodes, hermite_rule, laguerre_rule, FullLineRule, RuleKind, UnivariateRule,
    MAX_NODES,
};

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// A real function on `R^d` that can be evaluated from several threads.
pub trait Integrand: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> f64;
    /// `f(-u) = f(u)`, which allows the half-space mode.
    fn is_even(&self) -> bool {
        false
    }
}

/// Closure adapter.
pub struct FnIntegrand<F> {
    dim: usize,
    even: bool,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, even: false, f }
    }

    pub fn even(dim: usize, f: F) -> Self {
        Self { dim, even: true, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, u: &[f64]) -> f64 {
        (self.f)(u)
    }
    fn is_even(&self) -> bool {
        self.even
    }
}

/// Settings shared by all quadrature estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    pub rule: RuleKind,
    /// Evaluate only half of each symmetric grid when the integrand is even.
    pub symmetric: bool,
    /// Cap on fresh integrand evaluations.
    pub max_evals: Option<u64>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rule: RuleKind::Laguerre,
            symmetric: false,
            max_evals: None,
        }
    }
}

/// Outcome of a non-adaptive quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadResult {
    pub estimate: f64,
    /// `Σ_{β∈I} Π m(β_i)`.
    pub n_paper: u64,
    /// Integrand evaluations actually performed.
    pub n_eval: u64,
    pub indices: usize,
}

const CHUNK: usize = 2048;

/// Tensor estimates `Q^β` with memoization and evaluation accounting.
pub struct Estimator<'f, F: Integrand + ?Sized> {
    f: &'f F,
    map: LevelMap,
    opts: QuadratureOptions,
    tensors: HashMap<MultiIndex, f64>,
    deltas: HashMap<MultiIndex, f64>,
    evals: u64,
}

impl<'f, F: Integrand + ?Sized> Estimator<'f, F> {
    pub fn new(f: &'f F, map: LevelMap, opts: QuadratureOptions) -> Self {
        Self {
            f,
            map,
            opts,
            tensors: HashMap::new(),
            deltas: HashMap::new(),
            evals: 0,
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.evals
    }

    pub fn level_map(&self) -> LevelMap {
        self.map
    }

    fn half_space(&self) -> bool {
        self.opts.symmetric && self.f.is_even()
    }

    /// Fresh evaluations `Q^β` would cost if not cached.
    pub fn tensor_cost(&self, beta: &MultiIndex) -> Result<u64> {
        if self.tensors.contains_key(beta) {
            return Ok(0);
        }
        let mut full = 1u64;
        let mut zero_count = 1u64;
        for b in beta.as_slice() {
            let rule = cached_full_line(self.opts.rule, self.map.nodes(*b))?;
            full = full.saturating_mul(rule.len() as u64);
            zero_count *= rule.nodes.iter().filter(|x| **x == 0.0).count() as u64;
        }
        Ok(if self.half_space() { (full - zero_count) / 2 + zero_count } else { full })
    }

    /// `Q^β`, with any zero level contributing 0.
    pub fn tensor(&mut self, beta: &MultiIndex) -> Result<f64> {
        if beta.dim() != self.f.dim() {
            return Err(crate::error::invalid("multi-index dimension differs from integrand dimension"));
        }
        if let Some(v) = self.tensors.get(beta) {
            return Ok(*v);
        }
        let cost = self.tensor_cost(beta)?;
        if let Some(cap) = self.opts.max_evals {
            if self.evals + cost > cap {
                return Err(PricingError::Budget {
                    needed: self.evals + cost,
                    cap,
                });
            }
        }
        let rules: Vec<Arc<FullLineRule>> = beta
            .as_slice()
            .iter()
            .map(|b| cached_full_line(self.opts.rule, self.map.nodes(*b)))
            .collect::<Result<_>>()?;
        let value = tensor_sum(self.f, &rules, self.half_space());
        if !value.is_finite() {
            return Err(PricingError::Numerical(format!("non-finite tensor estimate at β = {beta}")));
        }
        self.evals += cost;
        self.tensors.insert(beta.clone(), value);
        Ok(value)
    }

    /// `ΔQ^β` by inclusion–exclusion over the `2^d` lower corners.
    pub fn delta(&mut self, beta: &MultiIndex) -> Result<f64> {
        if let Some(v) = self.deltas.get(beta) {
            return Ok(*v);
        }
        let d = beta.dim();
        let mut acc = 0.0;
        for mask in 0u32..(1 << d) {
            let mut corner = beta.as_slice().to_vec();
            let mut skip = false;
            for (i, c) in corner.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    if *c == 1 {
                        skip = true;
                        break;
                    }
                    *c -= 1;
                }
            }
            if skip {
                continue;
            }
            let q = self.tensor(&MultiIndex::new(corner)?)?;
            if mask.count_ones() % 2 == 0 {
                acc += q;
            } else {
                acc -= q;
            }
        }
        self.deltas.insert(beta.clone(), acc);
        Ok(acc)
    }

    /// `Σ_{β∈I} ΔQ^β`, summed in index order.
    pub fn sum_over(&mut self, set: &IndexSet) -> Result<QuadResult> {
        let mut estimate = 0.0;
        let mut n_paper = 0;
        for beta in set.iter() {
            estimate += self.delta(beta)?;
            n_paper += self.map.tensor_size(beta);
        }
        Ok(QuadResult {
            estimate,
            n_paper,
            n_eval: self.evals,
            indices: set.len(),
        })
    }
}

/// Full tensor sum; chunks are summed in parallel and combined in order.
fn tensor_sum<F: Integrand + ?Sized>(f: &F, rules: &[Arc<FullLineRule>], half: bool) -> f64 {
    let d = rules.len();
    let sizes: Vec<usize> = rules.iter().map(|r| r.len()).collect();
    let total: usize = sizes.iter().product();
    let chunks = total.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut u = vec![0.0; d];
            let mut idx = vec![0usize; d];
            let mut acc = 0.0;
            for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut rem = flat;
                for k in (0..d).rev() {
                    idx[k] = rem % sizes[k];
                    rem /= sizes[k];
                }
                let mut w = 1.0;
                for k in 0..d {
                    u[k] = rules[k].nodes[idx[k]];
                    w *= rules[k].weights[idx[k]];
                }
                if half {
                    // Keep points whose first nonzero coordinate is positive.
                    match u.iter().find(|x| **x != 0.0) {
                        Some(x) if *x < 0.0 => continue,
                        Some(_) => w *= 2.0,
                        None => {}
                    }
                }
                acc += w * f.eval(&u);
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

/// `Q^β` for a single multi-index, with its evaluation count.
pub fn tensor_estimate<F: Integrand + ?Sized>(
    f: &F,
    beta: &MultiIndex,
    map: LevelMap,
    opts: &QuadratureOptions,
) -> Result<QuadResult> {
    let mut est = Estimator::new(f, map, opts.clone());
    let estimate = est.tensor(beta)?;
    Ok(QuadResult {
        estimate,
        n_paper: map.tensor_size(beta),
        n_eval: est.evaluations(),
        indices: 1,
    })
}

/// Tensor-product quadrature with `level` nodes per direction before
/// mapping (`m(β) = β`).
pub fn tensor_product<F: Integrand + ?Sized>(f: &F, level: u32, opts: &QuadratureOptions) -> Result<QuadResult> {
    if level == 0 {
        return Err(crate::error::invalid("tensor-product level must be >= 1"));
    }
    tensor_estimate(f, &MultiIndex::new(vec![level; f.dim()])?, LevelMap::Linear, opts)
}

/// Smolyak quadrature over `{β : Σ(β_i - 1) ≤ level}`.
pub fn smolyak<F: Integrand + ?Sized>(f: &F, level: u32, opts: &QuadratureOptions) -> Result<QuadResult> {
    let mut est = Estimator::new(f, LevelMap::Doubling, opts.clone());
    est.sum_over(&IndexSet::smolyak(level, f.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(d: usize) -> FnIntegrand<impl Fn(&[f64]) -> f64 + Sync> {
        FnIntegrand::even(d, |u: &[f64]| u.iter().enumerate().map(|(i, x)| (-(1.0 + i as f64) * x * x).exp()).product())
    }

    #[test]
    fn separable_tensor_is_product() {
        let f = FnIntegrand::new(2, |u: &[f64]| (-u[0] * u[0]).exp() / (1.0 + u[1] * u[1]).powi(2));
        let beta = MultiIndex::new(vec![7, 11]).unwrap();
        let q = tensor_estimate(&f, &beta, LevelMap::Linear, &QuadratureOptions::default()).unwrap();
        let r7 = laguerre_rule(7).unwrap().full_line().integrate(|x| (-x * x).exp());
        let r11 = laguerre_rule(11).unwrap().full_line().integrate(|x| 1.0 / (1.0 + x * x).powi(2));
        assert!((q.estimate - r7 * r11).abs() < 1e-13 * (r7 * r11).abs());
        assert_eq!(q.n_eval, 14 * 22);
        assert_eq!(q.n_paper, 77);
    }

    #[test]
    fn root_index_is_hand_evaluation() {
        let f = FnIntegrand::new(2, |u: &[f64]| (-(u[0] - 0.3).powi(2) - u[1] * u[1]).exp());
        let q = tensor_estimate(&f, &MultiIndex::ones(2), LevelMap::Linear, &QuadratureOptions::default()).unwrap();
        let w = 1f64.exp();
        let hand = w * w * [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|(a, b)| f.eval(&[*a, *b]))
            .sum::<f64>();
        assert!((q.estimate - hand).abs() < 1e-15 * hand);
    }

    #[test]
    fn delta_matches_footnote_expansion() {
        let f = gaussian(2);
        let mut est = Estimator::new(&f, LevelMap::Doubling, QuadratureOptions::default());
        let mi = |a, b| MultiIndex::new(vec![a, b]).unwrap();
        let d22 = est.delta(&mi(2, 2)).unwrap();
        let expanded = est.tensor(&mi(2, 2)).unwrap() - est.tensor(&mi(2, 1)).unwrap() - est.tensor(&mi(1, 2)).unwrap()
            + est.tensor(&mi(1, 1)).unwrap();
        assert_eq!(d22, expanded);
        assert_eq!(est.delta(&mi(1, 1)).unwrap(), est.tensor(&mi(1, 1)).unwrap());
    }

    #[test]
    fn telescoping_on_hypercube() {
        let f = gaussian(3);
        let mut est = Estimator::new(&f, LevelMap::Doubling, QuadratureOptions::default());
        let sum = est.sum_over(&IndexSet::tensor(3, 3)).unwrap().estimate;
        let top = est.tensor(&MultiIndex::new(vec![3, 3, 3]).unwrap()).unwrap();
        assert!((sum - top).abs() < 1e-12 * top.abs());
    }

    #[test]
    fn smolyak_levels() {
        let f = gaussian(1);
        for l in 0..5 {
            let s = smolyak(&f, l, &QuadratureOptions::default()).unwrap().estimate;
            let direct = laguerre_rule(LevelMap::Doubling.nodes(l + 1)).unwrap().full_line().integrate(|x| (-x * x).exp());
            assert!((s - direct).abs() < 1e-14 * direct.abs().max(1.0), "level {l}");
        }
        let f2 = gaussian(2);
        let s0 = smolyak(&f2, 0, &QuadratureOptions::default()).unwrap();
        assert_eq!(s0.indices, 1);
        // brute-force signed sum over the six indices of level 2
        let s2 = smolyak(&f2, 2, &QuadratureOptions::default()).unwrap();
        let mut est = Estimator::new(&f2, LevelMap::Doubling, QuadratureOptions::default());
        let mut q = |a, b| est.tensor(&MultiIndex::new(vec![a, b]).unwrap()).unwrap();
        let brute = q(3, 1) + q(2, 2) + q(1, 3) - q(2, 1) - q(1, 2);
        assert!((s2.estimate - brute).abs() < 1e-13 * brute.abs());
        assert_eq!(s2.indices, 6);
    }

    #[test]
    fn half_space_mode() {
        let f = gaussian(3);
        let full = smolyak(&f, 4, &QuadratureOptions::default()).unwrap();
        let half = smolyak(
            &f,
            4,
            &QuadratureOptions {
                symmetric: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((full.estimate - half.estimate).abs() < 1e-12 * full.estimate.abs());
        assert_eq!(half.n_eval * 2, full.n_eval);
        for rule in [RuleKind::Hermite] {
            let opts = |symmetric| QuadratureOptions {
                rule,
                symmetric,
                max_evals: None,
            };
            let a = tensor_product(&f, 5, &opts(false)).unwrap();
            let b = tensor_product(&f, 5, &opts(true)).unwrap();
            assert!((a.estimate - b.estimate).abs() < 1e-12 * a.estimate.abs());
            assert_eq!(b.n_eval, (125 - 1) / 2 + 1);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = gaussian(2);
        let opts = QuadratureOptions {
            max_evals: Some(100),
            ..Default::default()
        };
        assert!(tensor_product(&f, 5, &opts).is_ok());
        assert!(matches!(tensor_product(&f, 6, &opts), Err(PricingError::Budget { needed: 144, cap: 100 })));
    }
}
