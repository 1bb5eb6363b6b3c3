//! Mixture channel backends: Mixture Gamma (gamma kernels over the SNR) and
//! Mixture of Gaussians (Gaussian kernels over the normalized envelope
//! `√(γ/γ̄)`), the latter fitted from samples by EM.

mod em;
mod laguerre;
mod mg;
mod mog;

pub use em::{fit_mog, fit_mog_traced, select_mog_components, EmOptions, FitTrace, Selection};
pub use laguerre::gauss_laguerre;
pub use mg::{mg_from_channel, mg_from_channel_with, MgComponent, MgMetadata, MgModel, MgRule, MG_FIT_WARNING};
pub use mog::{MogComponent, MogMetadata, MogModel};

use thiserror::Error;

use crate::channels::{ChannelError, Family};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixtureError {
    #[error("invalid mixture: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no MG recipe for {0}")]
    NoMgRecipe(Family),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("every component degenerated during EM")]
    AllComponentsDegenerate,
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
