//! Benchmark fixtures shared by the bench targets.

use mapq_core::experiment::{entry, ExperimentConfig, Method};

/// Registry example `id` set up for `method` with half-space evaluation.
pub fn fixture(id: u32, method: Method) -> ExperimentConfig {
    let e = entry(id).expect("registry example");
    let mut c = ExperimentConfig::from_entry(&e, method);
    c.options.symmetric = true;
    c
}
