use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::markov::MarkovChain;
use crate::random;

/// Empirical hitting frequency with a Wilson score interval at 95%.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub start: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl MonteCarlo {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

/// Wilson score interval for `hits` successes in `trials`, `z = 1.96`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Runs `trials` walks of at most `horizon` steps from `start`, counting those that meet the
/// target (time 0 included).
pub fn monte_carlo_hitting(
    chain: &MarkovChain,
    target: &BTreeSet<usize>,
    start: usize,
    trials: u64,
    horizon: usize,
    seed: u64,
) -> MonteCarlo {
    let p = chain.matrix_f64();
    let mut rng = random::rng(seed);
    let mut hits = 0;
    for _ in 0..trials.max(1) {
        let mut x = start;
        let mut hit = target.contains(&x);
        for _ in 0..horizon {
            if hit {
                break;
            }
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut next = p[x].iter().rposition(|&w| w > 0.0).unwrap_or(x);
            for (j, w) in p[x].iter().enumerate() {
                acc += w;
                if u < acc {
                    next = j;
                    break;
                }
            }
            x = next;
            hit = target.contains(&x);
        }
        hits += u64::from(hit);
    }
    let trials = trials.max(1);
    let (lo, hi) = wilson_interval(hits, trials);
    MonteCarlo { start, trials, hits, estimate: hits as f64 / trials as f64, lo, hi }
}
