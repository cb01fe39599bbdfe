#![allow(dead_code)]

use mapq_core::{DampingVector, ModelParams, ModelSpec, NigDrift, PayoffFamily, PayoffSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub model: ModelSpec,
    pub payoff: PayoffSpec,
    pub damping: DampingVector,
    pub u: Vec<f64>,
}

fn equicorrelation(d: usize, rho: f64) -> Vec<Vec<f64>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { rho }).collect()).collect()
}

fn identity(d: usize) -> Vec<Vec<f64>> {
    equicorrelation(d, 0.0)
}

pub fn random_model(rng: &mut impl Rng, d: usize) -> ModelSpec {
    loop {
        let spot: Vec<f64> = (0..d).map(|_| rng.random_range(70.0..130.0)).collect();
        let rate = rng.random_range(0.0..0.05);
        let maturity = rng.random_range(0.25..2.0);
        let params = match rng.random_range(0..3) {
            0 => ModelParams::Gbm {
                sigma: (0..d).map(|_| rng.random_range(0.1..0.8)).collect(),
                correlation: equicorrelation(d, rng.random_range(0.0..0.7)),
            },
            1 => ModelParams::Vg {
                sigma: (0..d).map(|_| rng.random_range(0.1..0.6)).collect(),
                theta: (0..d).map(|_| rng.random_range(-0.4..0.2)).collect(),
                nu: rng.random_range(0.1..0.6),
            },
            _ => ModelParams::Nig {
                alpha: rng.random_range(8.0..20.0),
                beta: (0..d).map(|_| rng.random_range(-4.0..3.0)).collect(),
                delta: rng.random_range(0.1..0.5),
                delta_matrix: identity(d),
                drift: if rng.random_bool(0.5) { NigDrift::Marginal } else { NigDrift::Joint },
            },
        };
        if let Ok(m) = ModelSpec::new(spot, rate, maturity, params) {
            return m;
        }
    }
}

pub fn random_payoff(rng: &mut impl Rng, d: usize) -> PayoffSpec {
    let family = if rng.random_bool(0.5) { PayoffFamily::BasketPut } else { PayoffFamily::CallOnMin };
    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    PayoffSpec::new(family, rng.random_range(60.0..140.0), weights).unwrap()
}

/// A model, payoff, admissible damping vector and frequency, drawn by
/// rejection from a box around the strip.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = rng.random_range(1..=4);
        let model = random_model(&mut rng, d);
        let payoff = random_payoff(&mut rng, d);
        for _ in 0..200 {
            let r: Vec<f64> = match payoff.family() {
                PayoffFamily::BasketPut => (0..d).map(|_| rng.random_range(0.0..8.0)).collect(),
                PayoffFamily::CallOnMin => (0..d).map(|_| rng.random_range(-10.0..0.0)).collect(),
            };
            if let Ok(damping) = DampingVector::new(r, &model, &payoff) {
                let scale = rng.random_range(0.1..30.0);
                let u = (0..d).map(|_| rng.random_range(-scale..scale)).collect();
                return Case {
                    model,
                    payoff,
                    damping,
                    u,
                };
            }
        }
    }
}
