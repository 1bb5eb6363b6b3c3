//! Fading-channel catalog over the instantaneous SNR γ.
//!
//! Every family is parameterized by its shape parameters and the average
//! SNR γ̄ (linear scale). Each family has an exact sampler, a Fox's
//! H-function representation, and, where one exists, an elementary
//! closed-form density.

mod analytic;
mod json;
mod model;
mod sampler;
mod table;

pub use analytic::{analytic_cdf, analytic_pdf, Evaluated, Source};
pub use json::{channel_from_value, db_to_linear, linear_to_db, FieldError};
pub(crate) use json::{number_field, reject_unknown};
pub use model::{AnalyticChannel, ChannelModel, FoxHChannel};
pub use sampler::{sample, SnrSampler};
pub use table::to_fox_h;

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::foxh::FoxHError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid channel spec: {0}")]
    InvalidSpec(String),
    #[error("SNR must be nonnegative, got {0}")]
    NegativeSnr(f64),
    #[error("unknown fading family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    FoxH(#[from] FoxHError),
}

/// Fading family names as used in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Rayleigh,
    NakagamiM,
    Weibull,
    AlphaMu,
    Maxwell,
    CascadedAlphaMu,
    FisherF,
    KG,
    Egk,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Rayleigh,
        Family::NakagamiM,
        Family::Weibull,
        Family::AlphaMu,
        Family::Maxwell,
        Family::CascadedAlphaMu,
        Family::FisherF,
        Family::KG,
        Family::Egk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rayleigh => "rayleigh",
            Family::NakagamiM => "nakagami_m",
            Family::Weibull => "weibull",
            Family::AlphaMu => "alpha_mu",
            Family::Maxwell => "maxwell",
            Family::CascadedAlphaMu => "cascaded_alpha_mu",
            Family::FisherF => "fisher_f",
            Family::KG => "kg",
            Family::Egk => "egk",
        }
    }

    /// Whether the SNR density has an elementary closed form.
    pub fn has_closed_form(self) -> bool {
        !matches!(self, Family::CascadedAlphaMu | Family::KG | Family::Egk)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| ChannelError::UnknownFamily(s.to_string()))
    }
}

/// One hop of a cascaded α–μ link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMuHop {
    pub alpha: f64,
    pub mu: f64,
}

/// Family plus shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Fading {
    Rayleigh,
    NakagamiM {
        m: f64,
    },
    Weibull {
        alpha: f64,
    },
    AlphaMu {
        alpha: f64,
        mu: f64,
    },
    Maxwell,
    CascadedAlphaMu {
        hops: Vec<AlphaMuHop>,
    },
    /// Fisher–Snedecor F with multipath `m` and shadowing `m_s`.
    FisherF {
        m: f64,
        m_s: f64,
    },
    /// Generalized-K with multipath `m_l` and shadowing `m_sl`.
    KG {
        m_l: f64,
        m_sl: f64,
    },
    /// Extended generalized-K.
    Egk {
        m: f64,
        xi: f64,
        m_s: f64,
        xi_s: f64,
    },
}

impl Fading {
    pub fn family(&self) -> Family {
        match self {
            Fading::Rayleigh => Family::Rayleigh,
            Fading::NakagamiM { .. } => Family::NakagamiM,
            Fading::Weibull { .. } => Family::Weibull,
            Fading::AlphaMu { .. } => Family::AlphaMu,
            Fading::Maxwell => Family::Maxwell,
            Fading::CascadedAlphaMu { .. } => Family::CascadedAlphaMu,
            Fading::FisherF { .. } => Family::FisherF,
            Fading::KG { .. } => Family::KG,
            Fading::Egk { .. } => Family::Egk,
        }
    }

    fn shape_params(&self) -> Vec<(&'static str, f64)> {
        match self {
            Fading::Rayleigh | Fading::Maxwell => vec![],
            Fading::NakagamiM { m } => vec![("m", *m)],
            Fading::Weibull { alpha } => vec![("alpha", *alpha)],
            Fading::AlphaMu { alpha, mu } => vec![("alpha", *alpha), ("mu", *mu)],
            Fading::CascadedAlphaMu { hops } => hops.iter().flat_map(|h| [("alpha", h.alpha), ("mu", h.mu)]).collect(),
            Fading::FisherF { m, m_s } => vec![("m", *m), ("m_s", *m_s)],
            Fading::KG { m_l, m_sl } => vec![("m_l", *m_l), ("m_sl", *m_sl)],
            Fading::Egk { m, xi, m_s, xi_s } => vec![("m", *m), ("xi", *xi), ("m_s", *m_s), ("xi_s", *xi_s)],
        }
    }
}

/// A validated channel: fading law plus linear average SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    fading: Fading,
    mean_snr: f64,
}

impl ChannelSpec {
    pub fn new(fading: Fading, mean_snr: f64) -> Result<Self, ChannelError> {
        if !(mean_snr > 0.0 && mean_snr.is_finite()) {
            return Err(ChannelError::InvalidSpec(format!("mean SNR must be positive, got {mean_snr}")));
        }
        if let Fading::CascadedAlphaMu { hops } = &fading {
            if hops.is_empty() {
                return Err(ChannelError::InvalidSpec("cascaded alpha-mu needs at least one hop".into()));
            }
        }
        for (name, v) in fading.shape_params() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ChannelError::InvalidSpec(format!(
                    "{}: parameter {name} must be positive, got {v}",
                    fading.family()
                )));
            }
        }
        Ok(Self { fading, mean_snr })
    }

    pub fn rayleigh(mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::Rayleigh, mean_snr)
    }

    pub fn nakagami(m: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::NakagamiM { m }, mean_snr)
    }

    pub fn weibull(alpha: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::Weibull { alpha }, mean_snr)
    }

    pub fn alpha_mu(alpha: f64, mu: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::AlphaMu { alpha, mu }, mean_snr)
    }

    pub fn maxwell(mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::Maxwell, mean_snr)
    }

    pub fn cascaded_alpha_mu(hops: &[(f64, f64)], mean_snr: f64) -> Result<Self, ChannelError> {
        let hops = hops.iter().map(|&(alpha, mu)| AlphaMuHop { alpha, mu }).collect();
        Self::new(Fading::CascadedAlphaMu { hops }, mean_snr)
    }

    pub fn fisher_f(m: f64, m_s: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::FisherF { m, m_s }, mean_snr)
    }

    pub fn kg(m_l: f64, m_sl: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::KG { m_l, m_sl }, mean_snr)
    }

    pub fn egk(m: f64, xi: f64, m_s: f64, xi_s: f64, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(Fading::Egk { m, xi, m_s, xi_s }, mean_snr)
    }

    pub fn fading(&self) -> &Fading {
        &self.fading
    }

    pub fn family(&self) -> Family {
        self.fading.family()
    }

    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }

    /// Same fading law at a different average SNR.
    pub fn with_mean_snr(&self, mean_snr: f64) -> Result<Self, ChannelError> {
        Self::new(self.fading.clone(), mean_snr)
    }

    /// `E[γ]` of the family as parameterized.
    ///
    /// Equals γ̄ for every family except Fisher–F, whose tabulated scale
    /// `C = m/(m_s γ̄)` gives `E[γ] = m_s γ̄/(m_s − 1)` (infinite for
    /// `m_s ≤ 1`).
    pub fn expected_snr(&self) -> f64 {
        match self.fading {
            Fading::FisherF { m_s, .. } if m_s <= 1.0 => f64::INFINITY,
            Fading::FisherF { m_s, .. } => self.mean_snr * m_s / (m_s - 1.0),
            _ => self.mean_snr,
        }
    }
}

/// One representative spec per family, used by examples and tests.
pub fn catalog(mean_snr: f64) -> Vec<ChannelSpec> {
    vec![
        ChannelSpec::rayleigh(mean_snr),
        ChannelSpec::nakagami(2.5, mean_snr),
        ChannelSpec::weibull(3.0, mean_snr),
        ChannelSpec::alpha_mu(2.5, 1.8, mean_snr),
        ChannelSpec::maxwell(mean_snr),
        ChannelSpec::cascaded_alpha_mu(&[(2.0, 1.5), (2.5, 2.0)], mean_snr),
        ChannelSpec::fisher_f(2.0, 3.0, mean_snr),
        ChannelSpec::kg(2.5, 4.0, mean_snr),
        ChannelSpec::egk(1.5, 1.2, 2.0, 0.8, mean_snr),
    ]
    .into_iter()
    .map(|s| s.expect("catalog parameters are valid"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(ChannelSpec::rayleigh(0.0).is_err());
        assert!(ChannelSpec::nakagami(-1.0, 1.0).is_err());
        assert!(ChannelSpec::egk(1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ChannelSpec::cascaded_alpha_mu(&[], 1.0).is_err());
        assert!(ChannelSpec::cascaded_alpha_mu(&[(2.0, f64::NAN)], 1.0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("rician".parse::<Family>().is_err());
    }

    #[test]
    fn catalog_covers_every_family() {
        let fams: Vec<Family> = catalog(1.0).iter().map(|s| s.family()).collect();
        assert_eq!(fams, Family::ALL.to_vec());
    }
}
