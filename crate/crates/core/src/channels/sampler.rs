use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use super::{ChannelError, ChannelSpec, Fading};
use crate::special::ln_gamma;

/// Unit-mean power-of-gamma factor `W^{power}·scale`, `W ~ Gamma(shape, 1)`.
#[derive(Debug, Clone)]
struct GammaPower {
    dist: Gamma<f64>,
    power: f64,
    scale: f64,
}

impl GammaPower {
    fn new(shape: f64, power: f64) -> Result<Self, ChannelError> {
        let dist = Gamma::new(shape, 1.0).map_err(|e| ChannelError::InvalidSpec(e.to_string()))?;
        // Γ(shape)/Γ(shape + power) makes E[W^power·scale] = 1.
        let scale = (ln_gamma(shape) - ln_gamma(shape + power)).exp();
        Ok(Self { dist, power, scale })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let w = self.dist.sample(rng);
        if self.power == 1.0 {
            w * self.scale
        } else {
            w.powf(self.power) * self.scale
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Exponential,
    /// Product of independent unit-mean factors.
    Product(Vec<GammaPower>),
    /// `G_m / G_{m_s}` (beta-prime), scaled.
    Ratio {
        num: Gamma<f64>,
        den: Gamma<f64>,
    },
}

/// Exact SNR sampler prepared from a [`ChannelSpec`].
#[derive(Debug, Clone)]
pub struct SnrSampler {
    kind: Kind,
    scale: f64,
}

impl SnrSampler {
    pub fn new(spec: &ChannelSpec) -> Result<Self, ChannelError> {
        let mean = spec.mean_snr();
        let gp = GammaPower::new;
        let (kind, scale) = match *spec.fading() {
            Fading::Rayleigh => (Kind::Exponential, mean),
            Fading::NakagamiM { m } => (Kind::Product(vec![gp(m, 1.0)?]), mean),
            Fading::Maxwell => (Kind::Product(vec![gp(1.5, 1.0)?]), mean),
            Fading::Weibull { alpha } => (Kind::Product(vec![gp(1.0, 2.0 / alpha)?]), mean),
            Fading::AlphaMu { alpha, mu } => (Kind::Product(vec![gp(mu, 2.0 / alpha)?]), mean),
            Fading::CascadedAlphaMu { ref hops } => {
                let factors = hops.iter().map(|h| gp(h.mu, 2.0 / h.alpha)).collect::<Result<_, _>>()?;
                (Kind::Product(factors), mean)
            }
            Fading::KG { m_l, m_sl } => (Kind::Product(vec![gp(m_l, 1.0)?, gp(m_sl, 1.0)?]), mean),
            Fading::Egk { m, xi, m_s, xi_s } => (Kind::Product(vec![gp(m, 1.0 / xi)?, gp(m_s, 1.0 / xi_s)?]), mean),
            Fading::FisherF { m, m_s } => {
                let err = |e: rand_distr::GammaError| ChannelError::InvalidSpec(e.to_string());
                let num = Gamma::new(m, 1.0).map_err(err)?;
                let den = Gamma::new(m_s, 1.0).map_err(err)?;
                (Kind::Ratio { num, den }, m_s * mean / m)
            }
        };
        Ok(Self { kind, scale })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let unit = match &self.kind {
            Kind::Exponential => Exp1.sample(rng),
            Kind::Product(factors) => factors.iter().map(|f| f.draw(rng)).product(),
            Kind::Ratio { num, den } => num.sample(rng) / den.sample(rng),
        };
        self.scale * unit
    }
}

/// One SNR draw. Prefer [`SnrSampler`] for repeated draws.
pub fn sample<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> Result<f64, ChannelError> {
    Ok(SnrSampler::new(spec)?.draw(rng))
}
