use rand::RngCore;

use super::{analytic_cdf, analytic_pdf, to_fox_h, ChannelError, ChannelSpec, SnrSampler};
use crate::foxh::{foxh_cdf, foxh_pdf, foxh_pdf_at_zero, FoxHParams};

/// Uniform view of an SNR distribution for the metric integrals and the
/// Monte Carlo oracle.
///
/// The law may carry a point mass at γ = 0 (see [`ChannelModel::zero_mass`]);
/// `cdf` includes it and `pdf` describes the absolutely continuous part on
/// `(0, ∞)`.
pub trait ChannelModel: Send + Sync {
    fn pdf(&self, snr: f64) -> Result<f64, ChannelError>;

    fn cdf(&self, snr: f64) -> Result<f64, ChannelError>;

    /// Probability of γ = 0 exactly.
    fn zero_mass(&self) -> f64 {
        0.0
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// Average SNR γ̄; also the natural scale of the distribution.
    fn mean_snr(&self) -> f64;
}

/// Closed-form densities where they exist, Fox H otherwise.
#[derive(Debug, Clone)]
pub struct AnalyticChannel {
    spec: ChannelSpec,
    sampler: SnrSampler,
}

impl AnalyticChannel {
    pub fn new(spec: ChannelSpec) -> Result<Self, ChannelError> {
        let sampler = SnrSampler::new(&spec)?;
        Ok(Self { spec, sampler })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }
}

impl ChannelModel for AnalyticChannel {
    fn pdf(&self, snr: f64) -> Result<f64, ChannelError> {
        analytic_pdf(&self.spec, snr).map(|e| e.value)
    }

    fn cdf(&self, snr: f64) -> Result<f64, ChannelError> {
        analytic_cdf(&self.spec, snr).map(|e| e.value)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sampler.draw(rng)
    }

    fn mean_snr(&self) -> f64 {
        self.spec.mean_snr()
    }
}

/// The Fox's H-function distribution of a catalog channel.
#[derive(Debug, Clone)]
pub struct FoxHChannel {
    spec: ChannelSpec,
    params: FoxHParams,
    sampler: SnrSampler,
}

impl FoxHChannel {
    pub fn new(spec: ChannelSpec) -> Result<Self, ChannelError> {
        let params = to_fox_h(&spec)?;
        let sampler = SnrSampler::new(&spec)?;
        Ok(Self { spec, params, sampler })
    }

    pub fn params(&self) -> &FoxHParams {
        &self.params
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }
}

impl ChannelModel for FoxHChannel {
    fn pdf(&self, snr: f64) -> Result<f64, ChannelError> {
        if snr < 0.0 {
            return Err(ChannelError::NegativeSnr(snr));
        }
        if snr == 0.0 {
            return Ok(foxh_pdf_at_zero(&self.params));
        }
        Ok(foxh_pdf(&self.params, snr)?)
    }

    fn cdf(&self, snr: f64) -> Result<f64, ChannelError> {
        if snr < 0.0 {
            return Err(ChannelError::NegativeSnr(snr));
        }
        if snr == 0.0 {
            return Ok(0.0);
        }
        Ok(foxh_cdf(&self.params, snr)?)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sampler.draw(rng)
    }

    fn mean_snr(&self) -> f64 {
        self.spec.mean_snr()
    }
}
