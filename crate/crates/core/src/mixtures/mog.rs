use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::MixtureError;
use crate::channels::{ChannelError, ChannelModel};
use crate::special::normal_cdf;

/// One Gaussian on the normalized envelope `x = √(γ/γ̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MogComponent {
    pub weight: f64,
    pub mean: f64,
    /// Standard deviation η.
    pub std_dev: f64,
}

impl From<[f64; 3]> for MogComponent {
    fn from([weight, mean, std_dev]: [f64; 3]) -> Self {
        Self { weight, mean, std_dev }
    }
}

impl From<MogComponent> for [f64; 3] {
    fn from(c: MogComponent) -> Self {
        [c.weight, c.mean, c.std_dev]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MogMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
    /// Mean squared difference between the model CDF and the empirical CDF
    /// of the fitting samples at 200 sample quantiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    /// Mean per-sample log-likelihood of the envelope samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    /// Component counts abandoned because a component collapsed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pruned_from: Vec<usize>,
    /// Probability the envelope Gaussians put below zero; the density
    /// integrates to one minus this.
    #[serde(default)]
    pub normalization_defect: f64,
}

/// Mixture of Gaussians SNR law:
/// `F(γ) = Σ w_l Φ((√(γ/γ̄) − μ_l)/η_l)`, with density its γ-derivative.
///
/// Gaussian mass at negative envelope values shows up as a point mass at
/// γ = 0 ([`ChannelModel::zero_mass`]), so `F` is a proper distribution
/// while the density alone integrates to slightly less than one.
#[derive(Debug, Clone)]
pub struct MogModel {
    components: Vec<MogComponent>,
    mean_snr: f64,
    pub metadata: MogMetadata,
}

impl MogModel {
    pub fn new(components: Vec<MogComponent>, mean_snr: f64) -> Result<Self, MixtureError> {
        if components.is_empty() {
            return Err(MixtureError::InvalidModel("at least one component required".into()));
        }
        if !(mean_snr > 0.0 && mean_snr.is_finite()) {
            return Err(MixtureError::InvalidModel(format!("mean SNR must be positive, got {mean_snr}")));
        }
        for (i, c) in components.iter().enumerate() {
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(MixtureError::InvalidModel(format!("component {i}: weight must be positive")));
            }
            if !(c.std_dev > 0.0 && c.std_dev.is_finite()) {
                return Err(MixtureError::InvalidModel(format!("component {i}: std dev must be positive")));
            }
            if !c.mean.is_finite() {
                return Err(MixtureError::InvalidModel(format!("component {i}: mean must be finite")));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(MixtureError::InvalidModel(format!("weights sum to {total}, not 1")));
        }
        let mut model = Self { components, mean_snr, metadata: MogMetadata::default() };
        model.metadata.normalization_defect = model.negative_mass();
        Ok(model)
    }

    pub fn components(&self) -> &[MogComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The γ̄ normalizing the envelope.
    pub fn normalizing_snr(&self) -> f64 {
        self.mean_snr
    }

    /// The same envelope mixture at `scale` times the mean SNR. Fits are
    /// scale-free, so one fit serves a whole family of mean SNRs.
    pub fn rescaled(&self, scale: f64) -> Result<MogModel, MixtureError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(MixtureError::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        let mut model = MogModel::new(self.components.clone(), self.mean_snr * scale)?;
        model.metadata = self.metadata.clone();
        Ok(model)
    }

    fn negative_mass(&self) -> f64 {
        self.components.iter().map(|c| c.weight * normal_cdf(-c.mean / c.std_dev)).sum()
    }

    /// `Σ w_l/(η_l √(8πγ̄γ)) · exp(−(√(γ/γ̄) − μ_l)²/(2η_l²))`; infinite at
    /// γ = 0, zero below.
    pub fn density(&self, snr: f64) -> f64 {
        if snr < 0.0 {
            return 0.0;
        }
        if snr == 0.0 {
            return f64::INFINITY;
        }
        let x = (snr / self.mean_snr).sqrt();
        let front = 1.0 / ((8.0 * std::f64::consts::PI * self.mean_snr).sqrt() * snr.sqrt());
        front
            * self
                .components
                .iter()
                .map(|c| {
                    let z = (x - c.mean) / c.std_dev;
                    c.weight / c.std_dev * (-0.5 * z * z).exp()
                })
                .sum::<f64>()
    }

    /// `Σ w_l Φ((√(γ/γ̄) − μ_l)/η_l)`; at γ = 0 this is the point mass.
    pub fn distribution(&self, snr: f64) -> f64 {
        if snr < 0.0 {
            return 0.0;
        }
        let x = (snr / self.mean_snr).sqrt();
        let v: f64 = self.components.iter().map(|c| c.weight * normal_cdf((x - c.mean) / c.std_dev)).sum();
        v.min(1.0)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.components[self.components.len() - 1];
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                pick = *c;
                break;
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        let x = pick.mean + pick.std_dev * z;
        if x > 0.0 {
            self.mean_snr * x * x
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MogRepr {
            kind: "mog".into(),
            mean_snr: self.mean_snr,
            components: self.components.clone(),
            metadata: self.metadata.clone(),
        })
        .expect("MoG model serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, MixtureError> {
        let repr: MogRepr =
            serde_json::from_value(value.clone()).map_err(|e| MixtureError::InvalidModel(e.to_string()))?;
        if repr.kind != "mog" {
            return Err(MixtureError::InvalidModel(format!("expected kind \"mog\", got {:?}", repr.kind)));
        }
        let mut model = Self::new(repr.components, repr.mean_snr)?;
        let defect = model.metadata.normalization_defect;
        model.metadata = repr.metadata;
        model.metadata.normalization_defect = defect;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MogRepr {
    kind: String,
    mean_snr: f64,
    components: Vec<MogComponent>,
    #[serde(default)]
    metadata: MogMetadata,
}

impl ChannelModel for MogModel {
    fn pdf(&self, snr: f64) -> Result<f64, ChannelError> {
        if snr < 0.0 {
            return Err(ChannelError::NegativeSnr(snr));
        }
        Ok(self.density(snr))
    }

    fn cdf(&self, snr: f64) -> Result<f64, ChannelError> {
        if snr < 0.0 {
            return Err(ChannelError::NegativeSnr(snr));
        }
        Ok(self.distribution(snr))
    }

    fn zero_mass(&self) -> f64 {
        self.metadata.normalization_defect
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.draw(rng)
    }

    fn mean_snr(&self) -> f64 {
        self.mean_snr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_semi_infinite, Tolerance};

    fn one(mean: f64, sd: f64) -> MogModel {
        MogModel::new(vec![MogComponent { weight: 1.0, mean, std_dev: sd }], 1.0).unwrap()
    }

    #[test]
    fn cdf_at_component_mean() {
        assert!((one(1.0, 1e-3).distribution(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_monotone() {
        let m = MogModel::new(
            vec![
                MogComponent { weight: 0.3, mean: 0.5, std_dev: 0.2 },
                MogComponent { weight: 0.7, mean: 1.2, std_dev: 0.4 },
            ],
            2.0,
        )
        .unwrap();
        let mut prev = 0.0;
        for i in 0..=500 {
            let v = m.distribution(i as f64 * 0.05);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn density_plus_atom_is_one() {
        let m = one(0.8, 0.5);
        let tol = Tolerance { abs: 1e-12, rel: 1e-11, max_subdivisions: 1000 };
        let mass = integrate_semi_infinite(|g| m.density(g), 0.0, 1.0, tol).value;
        assert!(m.zero_mass() > 0.05);
        assert!((mass + m.zero_mass() - 1.0).abs() < 1e-8, "{mass} {}", m.zero_mass());
    }

    #[test]
    fn validates() {
        assert!(MogModel::new(vec![MogComponent { weight: 0.9, mean: 1.0, std_dev: 0.1 }], 1.0).is_err());
        assert!(MogModel::new(vec![MogComponent { weight: 1.0, mean: 1.0, std_dev: 0.0 }], 1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut m = one(1.0, 0.3);
        m.metadata.seed = Some(9);
        let back = MogModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.components(), m.components());
        assert_eq!(back.metadata, m.metadata);
    }
}
