//! Interchangeable channel representations behind [`ChannelModel`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::channels::{AnalyticChannel, ChannelError, ChannelModel, ChannelSpec, FoxHChannel, SnrSampler};
use crate::mixtures::{fit_mog, mg_from_channel, EmOptions, MixtureError};

/// How a channel's law is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Closed forms where they exist, Fox H otherwise.
    Analytic,
    /// Fox's H-function distribution.
    FoxH,
    /// Mixture Gamma with a component budget.
    Mg { components: usize },
    /// Mixture of Gaussians fitted by EM to `samples` exact draws.
    Mog { components: usize, samples: usize, seed: u64 },
}

/// Backend names accepted in configs; `mc` means analytic laws estimated
/// by simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Analytic,
    Mg,
    Mog,
    FoxH,
    Mc,
}

impl BackendKind {
    pub const ALL: [BackendKind; 5] =
        [BackendKind::Analytic, BackendKind::Mg, BackendKind::Mog, BackendKind::FoxH, BackendKind::Mc];

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Analytic => "analytic",
            BackendKind::Mg => "mg",
            BackendKind::Mog => "mog",
            BackendKind::FoxH => "foxh",
            BackendKind::Mc => "mc",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BackendKind::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown backend {s:?}; expected one of analytic, mg, mog, foxh, mc"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
}

/// `n` exact SNR draws from stream `stream` of `seed`.
pub fn draw_samples(spec: &ChannelSpec, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>, ChannelError> {
    let sampler = SnrSampler::new(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}

/// Builds the model of `spec` under `backend`. `stream` separates the
/// fitting draws of different channels sharing a MoG seed.
pub fn build_model(spec: &ChannelSpec, backend: Backend, stream: u64) -> Result<Arc<dyn ChannelModel>, BackendError> {
    Ok(match backend {
        Backend::Analytic => Arc::new(AnalyticChannel::new(spec.clone())?),
        Backend::FoxH => Arc::new(FoxHChannel::new(spec.clone())?),
        Backend::Mg { components } => Arc::new(mg_from_channel(spec, components)?),
        Backend::Mog { components, samples, seed } => {
            let draws = draw_samples(spec, samples, seed, stream)?;
            Arc::new(fit_mog(&draws, EmOptions::new(components, seed))?)
        }
    })
}
