//! Monte Carlo oracle: simulate independent `(γ_B, γ_E)` pairs and average.
//!
//! Draws come in fixed-size batches, each from its own ChaCha8 stream keyed
//! by `(seed, metric domain, batch index)`. Batches run in parallel and are
//! merged in index order, so results do not depend on the thread count.
//! SOP, its lower bound and PNZ share a domain and therefore the same pairs.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::metrics::{secrecy_capacity, Metric, SecrecyScenario};

/// Pairs per independent stream.
pub const BATCH: u64 = 1 << 16;

/// Smallest accepted draw count.
pub const MIN_DRAWS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("need at least {MIN_DRAWS} draws, got {0}")]
    TooFewDraws(u64),
}

fn domain(metric: Metric) -> u64 {
    match metric {
        Metric::Sop | Metric::SopLowerBound | Metric::Pnz => 0,
        Metric::Asc => 1,
        Metric::Esc => 2,
    }
}

fn stream(seed: u64, domain: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 40) | batch);
    rng
}

/// Running mean and centered second moments of two variables.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: [f64; 2],
    // m2[0], m2[1]: sums of squared deviations; m2[2]: cross term.
    m2: [f64; 3],
}

impl Moments {
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1.0;
        let da = a - self.mean[0];
        let db = b - self.mean[1];
        self.mean[0] += da / self.n;
        self.mean[1] += db / self.n;
        self.m2[0] += da * (a - self.mean[0]);
        self.m2[1] += db * (b - self.mean[1]);
        self.m2[2] += da * (b - self.mean[1]);
    }

    // Chan et al. pairwise merge.
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let da = other.mean[0] - self.mean[0];
        let db = other.mean[1] - self.mean[1];
        let w = self.n * other.n / n;
        Moments {
            n,
            mean: [self.mean[0] + da * other.n / n, self.mean[1] + db * other.n / n],
            m2: [
                self.m2[0] + other.m2[0] + da * da * w,
                self.m2[1] + other.m2[1] + db * db * w,
                self.m2[2] + other.m2[2] + da * db * w,
            ],
        }
    }

    fn variance(&self, i: usize) -> f64 {
        self.m2[i] / (self.n - 1.0)
    }

    fn covariance(&self) -> f64 {
        self.m2[2] / (self.n - 1.0)
    }
}

fn batch(scn: &SecrecyScenario, metric: Metric, seed: u64, index: u64, size: u64) -> Moments {
    let mut rng = stream(seed, domain(metric), index);
    let (main, eve) = (scn.main(), scn.wiretap());
    let scale = scn.rate().exp2();
    let offset = scale - 1.0;
    let mut m = Moments::default();
    match metric {
        Metric::Sop | Metric::SopLowerBound | Metric::Pnz => {
            let mut hits = 0u64;
            for _ in 0..size {
                let gb = main.sample(&mut rng);
                let ge = eve.sample(&mut rng);
                let hit = match metric {
                    Metric::Sop => gb <= offset + scale * ge,
                    Metric::SopLowerBound => gb <= scale * ge,
                    _ => gb > ge,
                };
                hits += hit as u64;
            }
            // Indicator means carry no cross term; fill from the count.
            let p = hits as f64 / size as f64;
            m.n = size as f64;
            m.mean[0] = p;
            m.m2[0] = hits as f64 * (1.0 - p) * (1.0 - p) + (size - hits) as f64 * p * p;
        }
        Metric::Asc => {
            for _ in 0..size {
                let gb = main.sample(&mut rng);
                let ge = eve.sample(&mut rng);
                m.push(secrecy_capacity(gb, ge), 0.0);
            }
        }
        Metric::Esc => {
            for _ in 0..size {
                let gb = main.sample(&mut rng);
                let ge = eve.sample(&mut rng);
                m.push(gb.ln_1p() / LN_2, ge.ln_1p() / LN_2);
            }
        }
    }
    m
}

/// Estimates `metric` from `n` simulated pairs.
///
/// Probabilities are indicator means with binomial standard error; the
/// average secrecy capacity is the mean of [`secrecy_capacity`]; the
/// ergodic secrecy capacity is `[mean log2(1+γ_B) − mean log2(1+γ_E)]⁺`
/// with a delta-method standard error.
pub fn mc_metric(scn: &SecrecyScenario, metric: Metric, n: u64, seed: u64) -> Result<McEstimate, McError> {
    if n < MIN_DRAWS {
        return Err(McError::TooFewDraws(n));
    }
    let batches = n.div_ceil(BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|i| {
            let size = if i + 1 == batches { n - i * BATCH } else { BATCH };
            batch(scn, metric, seed, i, size)
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let nf = n as f64;
    let (value, std_error) = match metric {
        Metric::Sop | Metric::SopLowerBound | Metric::Pnz => {
            let p = total.mean[0];
            (p, (p * (1.0 - p) / nf).sqrt())
        }
        Metric::Asc => (total.mean[0], (total.variance(0) / nf).sqrt()),
        Metric::Esc => {
            let diff = total.mean[0] - total.mean[1];
            let var = total.variance(0) + total.variance(1) - 2.0 * total.covariance();
            (diff.max(0.0), (var.max(0.0) / nf).sqrt())
        }
    };
    Ok(McEstimate { value, std_error, n, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{AnalyticChannel, ChannelModel, ChannelSpec};
    use std::sync::Arc;

    fn rayleigh(b: f64, e: f64, rate: f64) -> SecrecyScenario {
        let m =
            |g| -> Arc<dyn ChannelModel> { Arc::new(AnalyticChannel::new(ChannelSpec::rayleigh(g).unwrap()).unwrap()) };
        SecrecyScenario::new(m(b), m(e), rate).unwrap()
    }

    #[test]
    fn symmetric_pnz() {
        let est = mc_metric(&rayleigh(1.0, 1.0, 0.0), Metric::Pnz, 1_000_000, 1).unwrap();
        assert!((est.value - 0.5).abs() < 3.0 * 0.0005, "{est:?}");
        assert!((est.std_error - 0.0005).abs() < 1e-6);
    }

    #[test]
    fn sop_and_pnz_share_draws() {
        let scn = rayleigh(10.0, 1.0, 0.0);
        let n = 200_001;
        let sop = mc_metric(&scn, Metric::Sop, n, 9).unwrap();
        let pnz = mc_metric(&scn, Metric::Pnz, n, 9).unwrap();
        let (a, b) = ((sop.value * n as f64).round() as u64, (pnz.value * n as f64).round() as u64);
        assert_eq!(a + b, n);
    }

    #[test]
    fn reproducible() {
        let scn = rayleigh(10.0, 1.0, 1.0);
        for m in Metric::ALL {
            assert_eq!(mc_metric(&scn, m, 150_000, 4).unwrap(), mc_metric(&scn, m, 150_000, 4).unwrap());
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let scn = rayleigh(10.0, 1.0, 1.0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = pool.install(|| mc_metric(&scn, Metric::Asc, 300_000, 8).unwrap());
        let b = mc_metric(&scn, Metric::Asc, 300_000, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_tiny_n() {
        assert_eq!(mc_metric(&rayleigh(1.0, 1.0, 0.0), Metric::Pnz, 10, 0), Err(McError::TooFewDraws(10)));
    }
}
