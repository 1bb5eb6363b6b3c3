use super::{to_fox_h, ChannelError, ChannelSpec, Fading};
use crate::foxh::{foxh_cdf, foxh_pdf, foxh_pdf_at_zero};
use crate::special::{beta_reg, gamma_p, ln_gamma};

/// Where a reference value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    /// No elementary form; evaluated through the Fox H backend.
    FoxH,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub source: Source,
}

// λ^k γ^{k−1} e^{−λγ} / Γ(k)
fn gamma_density(shape: f64, rate: f64, snr: f64) -> f64 {
    if snr == 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            rate
        } else {
            0.0
        };
    }
    (shape * rate.ln() + (shape - 1.0) * snr.ln() - rate * snr - ln_gamma(shape)).exp()
}

// (α/2)·C·(Cγ)^{αμ/2−1}·exp(−(Cγ)^{α/2}) / Γ(μ)
fn generalized_gamma_density(alpha: f64, mu: f64, scale: f64, snr: f64) -> f64 {
    let half = alpha / 2.0;
    if snr == 0.0 {
        let power = half * mu - 1.0;
        return if power < 0.0 {
            f64::INFINITY
        } else if power == 0.0 {
            half * scale / crate::special::gamma_fn(mu)
        } else {
            0.0
        };
    }
    let x = scale * snr;
    (half.ln() + scale.ln() + (half * mu - 1.0) * x.ln() - x.powf(half) - ln_gamma(mu)).exp()
}

fn alpha_mu_scale(alpha: f64, mu: f64, mean: f64) -> f64 {
    (ln_gamma(mu + 2.0 / alpha) - ln_gamma(mu)).exp() / mean
}

fn check(snr: f64) -> Result<(), ChannelError> {
    if snr >= 0.0 {
        Ok(())
    } else {
        Err(ChannelError::NegativeSnr(snr))
    }
}

/// SNR density of the family at `snr ≥ 0`.
///
/// Cascaded α–μ, K_G and EGK have no elementary density; their value comes
/// from the Fox H backend and is flagged [`Source::FoxH`].
pub fn analytic_pdf(spec: &ChannelSpec, snr: f64) -> Result<Evaluated, ChannelError> {
    check(snr)?;
    let mean = spec.mean_snr();
    let closed = |value| Ok(Evaluated { value, source: Source::ClosedForm });
    match *spec.fading() {
        Fading::Rayleigh => closed(gamma_density(1.0, 1.0 / mean, snr)),
        Fading::NakagamiM { m } => closed(gamma_density(m, m / mean, snr)),
        Fading::Maxwell => closed(gamma_density(1.5, 1.5 / mean, snr)),
        Fading::Weibull { alpha } => {
            closed(generalized_gamma_density(alpha, 1.0, alpha_mu_scale(alpha, 1.0, mean), snr))
        }
        Fading::AlphaMu { alpha, mu } => {
            closed(generalized_gamma_density(alpha, mu, alpha_mu_scale(alpha, mu, mean), snr))
        }
        Fading::FisherF { m, m_s } => {
            let c = m / (m_s * mean);
            if snr == 0.0 {
                let v = if m < 1.0 {
                    f64::INFINITY
                } else if m == 1.0 {
                    c * m_s
                } else {
                    0.0
                };
                return closed(v);
            }
            let x = c * snr;
            let ln_beta = ln_gamma(m) + ln_gamma(m_s) - ln_gamma(m + m_s);
            closed((c.ln() + (m - 1.0) * x.ln() - (m + m_s) * x.ln_1p() - ln_beta).exp())
        }
        Fading::CascadedAlphaMu { .. } | Fading::KG { .. } | Fading::Egk { .. } => {
            let params = to_fox_h(spec)?;
            let value = if snr == 0.0 { foxh_pdf_at_zero(&params) } else { foxh_pdf(&params, snr)? };
            Ok(Evaluated { value, source: Source::FoxH })
        }
    }
}

/// SNR CDF of the family; same provenance rules as [`analytic_pdf`].
pub fn analytic_cdf(spec: &ChannelSpec, snr: f64) -> Result<Evaluated, ChannelError> {
    check(snr)?;
    let mean = spec.mean_snr();
    let closed = |value| Ok(Evaluated { value, source: Source::ClosedForm });
    if snr == 0.0 {
        return Ok(Evaluated {
            value: 0.0,
            source: if spec.family().has_closed_form() { Source::ClosedForm } else { Source::FoxH },
        });
    }
    match *spec.fading() {
        Fading::Rayleigh => closed(-(-snr / mean).exp_m1()),
        Fading::NakagamiM { m } => closed(gamma_p(m, m * snr / mean)),
        Fading::Maxwell => closed(gamma_p(1.5, 1.5 * snr / mean)),
        Fading::Weibull { alpha } => {
            let x = alpha_mu_scale(alpha, 1.0, mean) * snr;
            closed(-(-x.powf(alpha / 2.0)).exp_m1())
        }
        Fading::AlphaMu { alpha, mu } => {
            let x = alpha_mu_scale(alpha, mu, mean) * snr;
            closed(gamma_p(mu, x.powf(alpha / 2.0)))
        }
        Fading::FisherF { m, m_s } => {
            let x = m / (m_s * mean) * snr;
            closed(beta_reg(m, m_s, x / (1.0 + x)))
        }
        Fading::CascadedAlphaMu { .. } | Fading::KG { .. } | Fading::Egk { .. } => {
            let params = to_fox_h(spec)?;
            Ok(Evaluated { value: foxh_cdf(&params, snr)?, source: Source::FoxH })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pdf(spec: ChannelSpec, g: f64) -> f64 {
        analytic_pdf(&spec, g).unwrap().value
    }

    #[test]
    fn exponential_and_gamma_values() {
        let e = (-1.0f64).exp();
        assert!((pdf(ChannelSpec::rayleigh(1.0).unwrap(), 1.0) - e).abs() < 1e-15);
        // (m/γ̄)^m γ^{m−1} e^{−mγ/γ̄}/Γ(m) at m=2, γ̄=1, γ=1
        let want = 4.0 * (-2.0f64).exp();
        assert!((pdf(ChannelSpec::nakagami(2.0, 1.0).unwrap(), 1.0) - want).abs() < 1e-15);
        assert!((want - 0.541_341).abs() < 1e-6);
    }

    #[test]
    fn reduction_chain_pointwise() {
        let ray = ChannelSpec::rayleigh(1.0).unwrap();
        for spec in [
            ChannelSpec::alpha_mu(2.0, 1.0, 1.0).unwrap(),
            ChannelSpec::weibull(2.0, 1.0).unwrap(),
            ChannelSpec::nakagami(1.0, 1.0).unwrap(),
        ] {
            for i in 1..=100 {
                let g = 0.1 * i as f64;
                let (a, b) = (pdf(spec.clone(), g), pdf(ray.clone(), g));
                assert!((a - b).abs() < 1e-10, "{:?} at {g}", spec.family());
            }
        }
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(pdf(ChannelSpec::rayleigh(2.0).unwrap(), 0.0), 0.5);
        assert_eq!(pdf(ChannelSpec::nakagami(0.7, 1.0).unwrap(), 0.0), f64::INFINITY);
        assert_eq!(pdf(ChannelSpec::nakagami(2.0, 1.0).unwrap(), 0.0), 0.0);
        assert!((pdf(ChannelSpec::weibull(2.0, 1.0).unwrap(), 0.0) - 1.0).abs() < 1e-14);
        assert_eq!(pdf(ChannelSpec::kg(2.5, 4.0, 1.0).unwrap(), 0.0), 0.0);
    }

    #[test]
    fn negative_snr_rejected() {
        let s = ChannelSpec::rayleigh(1.0).unwrap();
        assert!(matches!(analytic_pdf(&s, -0.1), Err(ChannelError::NegativeSnr(_))));
        assert!(analytic_cdf(&s, -0.1).is_err());
    }

    #[test]
    fn provenance_flags() {
        let kg = ChannelSpec::kg(2.5, 4.0, 1.0).unwrap();
        assert_eq!(analytic_pdf(&kg, 1.0).unwrap().source, Source::FoxH);
        let ff = ChannelSpec::fisher_f(2.0, 3.0, 1.0).unwrap();
        assert_eq!(analytic_pdf(&ff, 1.0).unwrap().source, Source::ClosedForm);
    }

    #[test]
    fn cdf_is_derivative_consistent() {
        for spec in super::super::catalog(1.3) {
            for &g in &[0.2, 1.0, 3.0] {
                let h = 1e-4 * g;
                let d =
                    (analytic_cdf(&spec, g + h).unwrap().value - analytic_cdf(&spec, g - h).unwrap().value) / (2.0 * h);
                let f = analytic_pdf(&spec, g).unwrap().value;
                assert!((d - f).abs() < 1e-6, "{:?} γ={g}: {d} vs {f}", spec.family());
            }
        }
    }
}
