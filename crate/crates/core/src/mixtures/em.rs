use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MixtureError, MogComponent, MogModel};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;

/// Settings for [`fit_mog`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub components: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the mean per-sample log-likelihood gains less than this.
    pub tol: f64,
}

impl EmOptions {
    pub fn new(components: usize, seed: u64) -> Self {
        Self { components, seed, max_iter: 500, tol: 1e-9 }
    }
}

/// Per-iteration record of the last EM run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitTrace {
    /// Mean per-sample log-likelihood before each M-step.
    pub log_likelihood: Vec<f64>,
    pub pruned_from: Vec<usize>,
}

/// Fits a `components`-term Gaussian mixture to the normalized envelopes
/// `√(γ_i/γ̄̂)`, `γ̄̂` the sample mean, by EM from a seeded k-means++ start.
///
/// A component whose standard deviation collapses is pruned and the fit
/// restarts with one fewer component; the abandoned counts are recorded in
/// the metadata. Identical inputs give bit-identical models.
pub fn fit_mog(samples: &[f64], opts: EmOptions) -> Result<MogModel, MixtureError> {
    fit_mog_traced(samples, opts).map(|(m, _)| m)
}

/// [`fit_mog`] that also returns the log-likelihood trace.
pub fn fit_mog_traced(samples: &[f64], opts: EmOptions) -> Result<(MogModel, FitTrace), MixtureError> {
    if opts.components == 0 {
        return Err(MixtureError::InvalidArgument("component count must be at least 1".into()));
    }
    let need = 10 * opts.components;
    if samples.len() < need {
        return Err(MixtureError::TooFewSamples { need, got: samples.len() });
    }
    if let Some(bad) = samples.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(MixtureError::InvalidArgument(format!("SNR samples must be finite and nonnegative, got {bad}")));
    }
    let mean_snr = samples.iter().sum::<f64>() / samples.len() as f64;
    if mean_snr <= 0.0 {
        return Err(MixtureError::InvalidArgument("all SNR samples are zero".into()));
    }
    let x: Vec<f64> = samples.iter().map(|s| (s / mean_snr).sqrt()).collect();
    let spread = std_dev(&x);
    // Collapse threshold; a float-level spread cannot hold a Gaussian.
    let floor = 1e-6 * spread.max(f64::MIN_POSITIVE);

    let mut trace = FitTrace::default();
    let mut count = opts.components;
    loop {
        if count == 0 {
            return Err(MixtureError::AllComponentsDegenerate);
        }
        match run_em(&x, count, opts, floor) {
            Some((components, lls, converged)) => {
                let iterations = lls.len();
                let ll = *lls.last().expect("at least one iteration");
                trace.log_likelihood = lls;
                let mut model = MogModel::new(components, mean_snr)?;
                model.metadata.seed = Some(opts.seed);
                model.metadata.sample_count = Some(samples.len());
                model.metadata.iterations = Some(iterations);
                model.metadata.converged = Some(converged);
                model.metadata.log_likelihood = Some(ll);
                model.metadata.pruned_from = trace.pruned_from.clone();
                model.metadata.fit_error = Some(cdf_mse(&model, samples));
                return Ok((model, trace));
            }
            None => {
                trace.pruned_from.push(count);
                count -= 1;
            }
        }
    }
}

fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
}

// k-means++ seeding, then one nearest-center assignment (ties to the lowest
// index) to set weights, means and spreads.
fn kmeans_pp(x: &[f64], k: usize, seed: u64, floor: f64) -> Option<Vec<MogComponent>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.len();
    let mut centers = vec![x[rng.random_range(0..n)]];
    let mut d2: Vec<f64> = x.iter().map(|v| (v - centers[0]).powi(2)).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = n - 1;
        for (i, d) in d2.iter().enumerate() {
            acc += d;
            if acc > target && *d > 0.0 {
                pick = i;
                break;
            }
        }
        let c = x[pick];
        centers.push(c);
        for (d, v) in d2.iter_mut().zip(x) {
            *d = d.min((v - c).powi(2));
        }
    }
    let mut count = vec![0usize; k];
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for &v in x {
        let mut best = 0;
        for j in 1..k {
            if (v - centers[j]).abs() < (v - centers[best]).abs() {
                best = j;
            }
        }
        count[best] += 1;
        // Deviations from the center keep the variance sum well conditioned.
        let d = v - centers[best];
        sum[best] += d;
        sq[best] += d * d;
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        if count[j] == 0 {
            return None;
        }
        let c = count[j] as f64;
        let mean_dev = sum[j] / c;
        let var = (sq[j] / c - mean_dev * mean_dev).max(0.0);
        out.push(MogComponent {
            weight: c / n as f64,
            mean: centers[j] + mean_dev,
            // Singleton clusters start at a tenth of the center spacing.
            std_dev: var.sqrt().max(100.0 * floor),
        });
    }
    Some(out)
}

type EmRun = (Vec<MogComponent>, Vec<f64>, bool);

// None means a component collapsed.
fn run_em(x: &[f64], k: usize, opts: EmOptions, floor: f64) -> Option<EmRun> {
    let mut comps = kmeans_pp(x, k, opts.seed, floor)?;
    let n = x.len() as f64;
    let mut lls: Vec<f64> = Vec::new();
    let mut logp = vec![0.0; k];
    for _ in 0..opts.max_iter.max(1) {
        let consts: Vec<f64> = comps.iter().map(|c| c.weight.ln() - c.std_dev.ln() - LN_SQRT_2PI).collect();
        let means: Vec<f64> = comps.iter().map(|c| c.mean).collect();
        let inv_sd: Vec<f64> = comps.iter().map(|c| 1.0 / c.std_dev).collect();
        let mut nk = vec![0.0; k];
        let mut s1 = vec![0.0; k];
        let mut s2 = vec![0.0; k];
        let mut ll = 0.0;
        for &v in x {
            let mut top = f64::NEG_INFINITY;
            for j in 0..k {
                let z = (v - means[j]) * inv_sd[j];
                logp[j] = consts[j] - 0.5 * z * z;
                top = top.max(logp[j]);
            }
            let mut s = 0.0;
            for lp in logp.iter_mut() {
                *lp = (*lp - top).exp();
                s += *lp;
            }
            ll += top + s.ln();
            let inv_s = 1.0 / s;
            for j in 0..k {
                let r = logp[j] * inv_s;
                let d = v - means[j];
                let rd = r * d;
                nk[j] += r;
                s1[j] += rd;
                s2[j] += rd * d;
            }
        }
        let ll = ll / n;
        if let Some(&prev) = lls.last() {
            debug_assert!(ll >= prev - 1e-12 * (1.0 + prev.abs()), "EM log-likelihood fell: {prev} -> {ll}");
        }
        let done = lls.last().is_some_and(|&prev| ll - prev < opts.tol);
        lls.push(ll);
        if done {
            return Some((normalized(comps), lls, true));
        }
        let total: f64 = nk.iter().sum();
        for j in 0..k {
            if nk[j] <= 0.0 {
                return None;
            }
            let shift = s1[j] / nk[j];
            let var = s2[j] / nk[j] - shift * shift;
            let sd = var.max(0.0).sqrt();
            if sd < floor || nk[j] < 1.0 {
                return None;
            }
            comps[j] = MogComponent { weight: nk[j] / total, mean: comps[j].mean + shift, std_dev: sd };
        }
    }
    Some((normalized(comps), lls, false))
}

fn normalized(mut comps: Vec<MogComponent>) -> Vec<MogComponent> {
    let total: f64 = comps.iter().map(|c| c.weight).sum();
    for c in &mut comps {
        c.weight /= total;
    }
    comps
}

fn cdf_mse(model: &MogModel, samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let points = 200;
    let mut acc = 0.0;
    for j in 0..points {
        let idx = ((j as f64 + 0.5) / points as f64 * n as f64) as usize;
        let idx = idx.min(n - 1);
        let g = sorted[idx];
        // Empirical CDF counts every sample ≤ g.
        let upper = sorted.partition_point(|&s| s <= g);
        let empirical = upper as f64 / n as f64;
        acc += (model.distribution(g) - empirical).powi(2);
    }
    acc / points as f64
}

/// Result of [`select_mog_components`].
#[derive(Debug, Clone)]
pub struct Selection {
    pub model: MogModel,
    /// `(components, cdf_mse)` for every count tried.
    pub tried: Vec<(usize, f64)>,
}

/// Grows the component count from 1 until the CDF mean squared error drops
/// below `target` (1e-4 if `None`), stopping at 15.
pub fn select_mog_components(samples: &[f64], seed: u64, target: Option<f64>) -> Result<Selection, MixtureError> {
    let target = target.unwrap_or(1e-4);
    let mut tried = Vec::new();
    let mut best: Option<MogModel> = None;
    for c in 1..=15 {
        if samples.len() < 10 * c {
            break;
        }
        let model = fit_mog(samples, EmOptions::new(c, seed))?;
        let mse = model.metadata.fit_error.unwrap_or(f64::INFINITY);
        tried.push((c, mse));
        let better = best.as_ref().is_none_or(|b| mse < b.metadata.fit_error.unwrap_or(f64::INFINITY));
        if better {
            best = Some(model);
        }
        if mse < target {
            break;
        }
    }
    let model = best.ok_or(MixtureError::TooFewSamples { need: 10, got: samples.len() })?;
    Ok(Selection { model, tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ChannelSpec, SnrSampler};
    use rand_distr::{Distribution, Normal};

    fn envelope_samples(mu: f64, sd: f64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = Normal::new(mu, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).map(|x: f64| x.max(0.0).powi(2)).collect()
    }

    #[test]
    fn recovers_single_gaussian() {
        // Envelope N(1, 0.1²) with γ̄ = 1, so √(γ/γ̄̂) is nearly the envelope.
        let samples = envelope_samples(1.0, 0.1, 200_000);
        let m = fit_mog(&samples, EmOptions::new(1, 1)).unwrap();
        let c = m.components()[0];
        assert_eq!(c.weight, 1.0);
        assert!((c.mean - 1.0).abs() < 0.01, "{c:?}");
        assert!((c.std_dev - 0.1).abs() < 0.01, "{c:?}");
    }

    #[test]
    fn deterministic_and_monotone() {
        let spec = ChannelSpec::nakagami(2.0, 1.0).unwrap();
        let s = SnrSampler::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples: Vec<f64> = (0..20_000).map(|_| s.draw(&mut rng)).collect();
        let (a, trace) = fit_mog_traced(&samples, EmOptions::new(4, 77)).unwrap();
        let b = fit_mog(&samples, EmOptions::new(4, 77)).unwrap();
        assert_eq!(a.components(), b.components());
        for w in trace.log_likelihood.windows(2) {
            assert!(w[1] >= w[0] - 1e-13, "{} -> {}", w[0], w[1]);
        }
        let total: f64 = a.components().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(fit_mog(&[1.0; 100], EmOptions::new(0, 0)), Err(MixtureError::InvalidArgument(_))));
        assert!(matches!(fit_mog(&[1.0; 15], EmOptions::new(2, 0)), Err(MixtureError::TooFewSamples { .. })));
        assert!(fit_mog(&[-1.0; 15], EmOptions::new(1, 0)).is_err());
    }

    #[test]
    fn collapsing_components_are_pruned() {
        // Two distinct values only: a third Gaussian has nothing to hold.
        let samples: Vec<f64> = (0..400).map(|i| if i % 2 == 0 { 1.0 } else { 4.0 }).collect();
        let m = fit_mog(&samples, EmOptions::new(3, 3)).unwrap();
        assert!(m.len() < 3);
        assert!(!m.metadata.pruned_from.is_empty());
    }

    #[test]
    fn selection_stops_at_target() {
        let samples = envelope_samples(1.0, 0.2, 20_000);
        let sel = select_mog_components(&samples, 4, None).unwrap();
        assert_eq!(sel.tried[0].0, 1);
        assert!(sel.model.metadata.fit_error.unwrap() < 1e-4);
    }
}
