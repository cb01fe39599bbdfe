//! Dimension-adaptive sparse grid quadrature.
//!
//! Greedy construction: the active index with the largest profit
//! `|ΔQ^β| / ΔW_β` is accepted and its admissible forward neighbours become
//! active, each with its `ΔQ` computed immediately.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Estimator, IndexSet, Integrand, LevelMap, MultiIndex, QuadratureOptions, MAX_NODES};
use crate::error::{PricingError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsgqOptions {
    /// Stop once the largest active profit drops below this value.
    pub threshold: f64,
    /// Stop once no further index fits in this many evaluations.
    pub max_evals: u64,
}

impl Default for AsgqOptions {
    fn default() -> Self {
        Self {
            threshold: 0.0,
            max_evals: 100_000,
        }
    }
}

/// One acceptance step of the greedy loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitStep {
    pub beta: MultiIndex,
    pub profit: f64,
    /// Largest profit left among the other active indices at that moment.
    pub max_remaining: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsgqResult {
    pub estimate: f64,
    pub n_paper: u64,
    pub n_eval: u64,
    /// Accepted and active indices together.
    #[serde(skip)]
    pub index_set: IndexSet,
    pub accepted: usize,
    pub active: usize,
    pub trace: Vec<ProfitStep>,
    pub budget_exhausted: bool,
}

struct Candidate {
    delta: f64,
    profit: f64,
}

pub fn asgq<F: Integrand + ?Sized>(f: &F, opts: &AsgqOptions, quad: &QuadratureOptions) -> Result<AsgqResult> {
    let mut quad = quad.clone();
    quad.max_evals = Some(opts.max_evals);
    let mut est = Estimator::new(f, LevelMap::Doubling, quad);
    let d = f.dim();

    let mut accepted = IndexSet::new();
    let mut accepted_delta: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    let mut active: BTreeMap<MultiIndex, Candidate> = BTreeMap::new();
    let mut trace = Vec::new();
    let mut budget_exhausted = false;

    let root = MultiIndex::ones(d);
    let before = est.evaluations();
    let delta = est.delta(&root)?;
    let work = (est.evaluations() - before).max(1);
    active.insert(
        root,
        Candidate {
            delta,
            profit: delta.abs() / work as f64,
        },
    );

    'outer: loop {
        // Largest profit; BTreeMap order makes the first maximum the
        // lexicographically smallest index.
        let Some((best, best_profit)) = active.iter().fold(None::<(&MultiIndex, f64)>, |acc, (b, c)| match acc {
            Some((_, p)) if p >= c.profit => acc,
            _ => Some((b, c.profit)),
        }) else {
            break;
        };
        if !(best_profit >= opts.threshold) {
            break;
        }
        let best = best.clone();
        let cand = active.remove(&best).expect("selected index is active");
        let max_remaining = active.values().map(|c| c.profit).fold(f64::NEG_INFINITY, f64::max);
        trace.push(ProfitStep {
            beta: best.clone(),
            profit: best_profit,
            max_remaining,
        });
        accepted.insert(best.clone());
        accepted_delta.insert(best.clone(), cand.delta);

        for i in 0..d {
            let next = best.forward(i);
            if active.contains_key(&next) || accepted.contains(&next) || !accepted.admits(&next) {
                continue;
            }
            // Directions already at the largest supported rule stay closed.
            let level = next.as_slice()[i];
            if level > 16 || LevelMap::Doubling.nodes(level) > MAX_NODES {
                continue;
            }
            let before = est.evaluations();
            match est.delta(&next) {
                Ok(delta) => {
                    let work = (est.evaluations() - before).max(1);
                    active.insert(
                        next,
                        Candidate {
                            delta,
                            profit: delta.abs() / work as f64,
                        },
                    );
                }
                Err(PricingError::Budget { .. }) => {
                    budget_exhausted = true;
                    break 'outer;
                }
                Err(e) => return Err(e),
            }
        }
    }

    // Sum in index order for reproducibility.
    let mut all: Vec<(&MultiIndex, f64)> = accepted_delta.iter().map(|(b, v)| (b, *v)).collect();
    all.extend(active.iter().map(|(b, c)| (b, c.delta)));
    all.sort_by(|a, b| a.0.cmp(b.0));
    let mut index_set = IndexSet::new();
    let mut estimate = 0.0;
    let mut n_paper = 0;
    for (b, delta) in all {
        estimate += delta;
        n_paper += LevelMap::Doubling.tensor_size(b);
        index_set.insert(b.clone());
    }
    Ok(AsgqResult {
        estimate,
        n_paper,
        n_eval: est.evaluations(),
        index_set,
        accepted: accepted.len(),
        active: active.len(),
        trace,
        budget_exhausted,
    })
}
