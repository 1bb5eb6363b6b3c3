use rand::{Rng, RngCore};
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{gauss_laguerre, MixtureError};
use crate::channels::{analytic_pdf, ChannelError, ChannelModel, ChannelSpec, Fading};
use crate::special::{gamma_p, ln_gamma};

/// Fit errors above this are flagged in [`MgMetadata::warning`].
pub const MG_FIT_WARNING: f64 = 1e-4;

/// One term `α·γ^{β−1}·e^{−ζγ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MgComponent {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
}

impl From<[f64; 3]> for MgComponent {
    fn from([alpha, beta, zeta]: [f64; 3]) -> Self {
        Self { alpha, beta, zeta }
    }
}

impl From<MgComponent> for [f64; 3] {
    fn from(c: MgComponent) -> Self {
        [c.alpha, c.beta, c.zeta]
    }
}

impl MgComponent {
    /// `ln(α ζ^{−β} Γ(β))`, the log mixing weight.
    fn ln_weight(&self) -> f64 {
        self.alpha.ln() - self.beta * self.zeta.ln() + ln_gamma(self.beta)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MgMetadata {
    /// Family and parameters the model was built from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<ChannelSpec>,
    /// Largest absolute pdf error against the reference density on
    /// `γ̄·[0.01, 20]`; zero for exact recipes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Mixture Gamma SNR law `f(γ) = Σ α_l γ^{β_l−1} e^{−ζ_l γ}`.
#[derive(Debug, Clone)]
pub struct MgModel {
    components: Vec<MgComponent>,
    weights: Vec<f64>,
    draws: Vec<Gamma<f64>>,
    pub metadata: MgMetadata,
}

impl MgModel {
    /// Validates positivity and `Σ α_l ζ_l^{−β_l} Γ(β_l) = 1` to 1e-9.
    pub fn new(components: Vec<MgComponent>) -> Result<Self, MixtureError> {
        if components.is_empty() {
            return Err(MixtureError::InvalidModel("at least one component required".into()));
        }
        for (i, c) in components.iter().enumerate() {
            for (name, v) in [("alpha", c.alpha), ("beta", c.beta), ("zeta", c.zeta)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(MixtureError::InvalidModel(format!("component {i}: {name} must be positive, got {v}")));
                }
            }
        }
        let weights: Vec<f64> = components.iter().map(|c| c.ln_weight().exp()).collect();
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(MixtureError::InvalidModel(format!("weights sum to {total}, not 1")));
        }
        let draws = components
            .iter()
            .map(|c| Gamma::new(c.beta, 1.0 / c.zeta).map_err(|e| MixtureError::InvalidModel(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Self { components, weights, draws, metadata: MgMetadata::default() })
    }

    /// Builds from mixing weights (renormalized to sum to 1), shapes and rates.
    pub fn from_weights(weights: &[f64], shapes: &[f64], rates: &[f64]) -> Result<Self, MixtureError> {
        if weights.len() != shapes.len() || weights.len() != rates.len() {
            return Err(MixtureError::InvalidArgument("weights, shapes and rates differ in length".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(MixtureError::InvalidArgument(format!("weights sum to {total}")));
        }
        let components = weights
            .iter()
            .zip(shapes)
            .zip(rates)
            .map(|((&w, &beta), &zeta)| MgComponent {
                alpha: ((w / total).ln() + beta * zeta.ln() - ln_gamma(beta)).exp(),
                beta,
                zeta,
            })
            .collect();
        Self::new(components)
    }

    pub fn components(&self) -> &[MgComponent] {
        &self.components
    }

    /// Mixing weights `α_l ζ_l^{−β_l} Γ(β_l)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ α_l ζ_l^{−β_l} Γ(β_l)`; 1 up to rounding.
    pub fn normalization(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `Σ α_i γ^{β_i−1} e^{−ζ_i γ}` at `snr ≥ 0`.
    pub fn density(&self, snr: f64) -> f64 {
        if snr < 0.0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| {
                if snr == 0.0 {
                    match c.beta.total_cmp(&1.0) {
                        std::cmp::Ordering::Less => f64::INFINITY,
                        std::cmp::Ordering::Equal => c.alpha,
                        std::cmp::Ordering::Greater => 0.0,
                    }
                } else {
                    (c.alpha.ln() + (c.beta - 1.0) * snr.ln() - c.zeta * snr).exp()
                }
            })
            .sum()
    }

    /// `Σ w_i P(β_i, ζ_i γ)`, `P` the regularized lower incomplete gamma.
    pub fn distribution(&self, snr: f64) -> f64 {
        if snr <= 0.0 {
            return 0.0;
        }
        let v: f64 = self.components.iter().zip(&self.weights).map(|(c, w)| w * gamma_p(c.beta, c.zeta * snr)).sum();
        v.min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().zip(&self.weights).map(|(c, w)| w * c.beta / c.zeta).sum()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let last = self.draws.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc || i == last {
                return self.draws[i].sample(rng);
            }
        }
        unreachable!()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MgRepr {
            kind: "mg".into(),
            components: self.components.clone(),
            metadata: self.metadata.clone(),
        })
        .expect("MG model serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, MixtureError> {
        let repr: MgRepr =
            serde_json::from_value(value.clone()).map_err(|e| MixtureError::InvalidModel(e.to_string()))?;
        if repr.kind != "mg" {
            return Err(MixtureError::InvalidModel(format!("expected kind \"mg\", got {:?}", repr.kind)));
        }
        let mut model = Self::new(repr.components)?;
        model.metadata = repr.metadata;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MgRepr {
    kind: String,
    components: Vec<MgComponent>,
    #[serde(default)]
    metadata: MgMetadata,
}

impl ChannelModel for MgModel {
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

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.draw(rng)
    }

    fn mean_snr(&self) -> f64 {
        self.mean()
    }
}

/// Quadrature over the shadowing variate used to discretize compound laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MgRule {
    /// Trapezoid rule in `ln u` over the central `1 − 2ε` of the shadowing
    /// law; converges geometrically in the node count.
    #[default]
    LogTrapezoid,
    /// Generalized Gauss–Laguerre in `u`.
    GaussLaguerre,
}

/// Mixture Gamma form of a catalog channel with the default rule.
///
/// Rayleigh and Nakagami-m are single gamma terms (`terms` is ignored).
/// K_G and Fisher–F are conditionally gamma given their shadowing variate;
/// integrating that variate out with a `terms`-node rule gives one gamma
/// component per node. The result carries its pdf error against the
/// reference density.
pub fn mg_from_channel(spec: &ChannelSpec, terms: usize) -> Result<MgModel, MixtureError> {
    mg_from_channel_with(spec, terms, MgRule::default())
}

/// [`mg_from_channel`] with an explicit discretization rule.
pub fn mg_from_channel_with(spec: &ChannelSpec, terms: usize, rule: MgRule) -> Result<MgModel, MixtureError> {
    if terms == 0 {
        return Err(MixtureError::InvalidArgument("component budget must be at least 1".into()));
    }
    let mean = spec.mean_snr();
    let mut model = match *spec.fading() {
        Fading::Rayleigh => MgModel::new(vec![MgComponent { alpha: 1.0 / mean, beta: 1.0, zeta: 1.0 / mean }])?,
        Fading::NakagamiM { m } => MgModel::from_weights(&[1.0], &[m], &[m / mean])?,
        Fading::KG { m_l, m_sl } => match rule {
            MgRule::LogTrapezoid => {
                // γ = γ̄·(G_a/a)·(G_b/b); condition on the larger shape b.
                let (a, b) = if m_l <= m_sl { (m_l, m_sl) } else { (m_sl, m_l) };
                let c = a * b / mean;
                log_trapezoid(terms, b, a, |u| c / u)?
            }
            MgRule::GaussLaguerre => kg_terms(terms, m_l, m_sl, mean)?,
        },
        Fading::FisherF { m, m_s } => match rule {
            MgRule::LogTrapezoid => {
                let k = m / (m_s * mean);
                log_trapezoid(terms, m_s, m, |v| k * v)?
            }
            MgRule::GaussLaguerre => fisher_f_terms(terms, m, m_s, mean)?,
        },
        _ => return Err(MixtureError::NoMgRecipe(spec.family())),
    };
    let exact = matches!(spec.fading(), Fading::Rayleigh | Fading::NakagamiM { .. });
    let fit_error = if exact { 0.0 } else { pdf_error(&model, spec)? };
    model.metadata = MgMetadata {
        source: Some(spec.clone()),
        fit_error: Some(fit_error),
        warning: (fit_error > MG_FIT_WARNING)
            .then(|| format!("pdf error {fit_error:.2e} exceeds {MG_FIT_WARNING:.0e}; increase the component budget")),
    };
    Ok(model)
}

// Components Gamma(shape, rate(u_k)) at nodes u_k = e^{s_k}, s_k evenly
// spaced between the ε and 1 − ε quantiles of u ~ Gamma(mixing_shape, 1),
// weighted by u^{mixing_shape} e^{−u} (the density in s, up to a constant).
fn log_trapezoid(
    terms: usize,
    mixing_shape: f64,
    shape: f64,
    rate: impl Fn(f64) -> f64,
) -> Result<MgModel, MixtureError> {
    if terms == 1 {
        return MgModel::from_weights(&[1.0], &[shape], &[rate(mixing_shape)]);
    }
    let eps = 10f64.powf(-(terms as f64 / 2.5).clamp(4.0, 14.0));
    let law = statrs::distribution::Gamma::new(mixing_shape, 1.0)
        .map_err(|e| MixtureError::InvalidArgument(e.to_string()))?;
    use statrs::distribution::ContinuousCDF;
    let (s0, s1) = (law.inverse_cdf(eps).ln(), law.inverse_cdf(1.0 - eps).ln());
    let h = (s1 - s0) / (terms - 1) as f64;
    let nodes: Vec<f64> = (0..terms).map(|k| (s0 + h * k as f64).exp()).collect();
    let ln_w: Vec<f64> = nodes.iter().map(|&u| mixing_shape * u.ln() - u).collect();
    let top = ln_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_w.iter().map(|l| (l - top).exp()).collect();
    let rates: Vec<f64> = nodes.iter().map(|&u| rate(u)).collect();
    MgModel::from_weights(&w, &vec![shape; terms], &rates)
}

// γ = γ̄·(G_a/a)·(G_b/b) with a ≤ b. Given u = G_b,
// γ ~ Gamma(a, rate c/u), c = ab/γ̄, so
//   f(γ) = ∫ u^{b−a−1} e^{−u} · c^a γ^{a−1} e^{−cγ/u} du / (Γ(a)Γ(b)).
// The Laguerre weight u^{b−a−1}e^{−u} leaves the bounded factor e^{−cγ/u},
// so the rule is exact as γ → 0.
fn kg_terms(terms: usize, m_l: f64, m_sl: f64, mean: f64) -> Result<MgModel, MixtureError> {
    let (a, b) = if m_l <= m_sl { (m_l, m_sl) } else { (m_sl, m_l) };
    let c = a * b / mean;
    // Equal shapes would put the weight exponent at −1; split the power.
    let (power, leftover) = if b - a > 0.5 { (b - a - 1.0, 0.0) } else { (-0.5, b - a - 0.5) };
    let (nodes, weights) = gauss_laguerre(terms, power);
    let mut w = Vec::with_capacity(terms);
    let mut rates = Vec::with_capacity(terms);
    for (u, wk) in nodes.into_iter().zip(weights) {
        // Mixing weight of Gamma(a, c/u) is w_k u^{a+leftover}/Γ(b).
        let mix = wk * u.powf(a + leftover);
        if mix > 0.0 && mix.is_finite() {
            w.push(mix);
            rates.push(c / u);
        }
    }
    MgModel::from_weights(&w, &vec![a; w.len()], &rates)
}

// γ = (m_s γ̄/m)·G_m/G_{m_s}. Given v = G_{m_s}, γ ~ Gamma(m, rate kv) with
// k = m/(m_s γ̄), so f(γ) = ∫ v^{m+m_s−1} e^{−v} · k^m γ^{m−1} e^{−kγv} dv /
// (Γ(m)Γ(m_s)).
fn fisher_f_terms(terms: usize, m: f64, m_s: f64, mean: f64) -> Result<MgModel, MixtureError> {
    let k = m / (m_s * mean);
    let (nodes, weights) = gauss_laguerre(terms, m + m_s - 1.0);
    let mut w = Vec::with_capacity(terms);
    let mut rates = Vec::with_capacity(terms);
    for (v, wk) in nodes.into_iter().zip(weights) {
        let mix = wk * v.powf(-m);
        if mix > 0.0 && mix.is_finite() {
            w.push(mix);
            rates.push(k * v);
        }
    }
    MgModel::from_weights(&w, &vec![m; w.len()], &rates)
}

fn pdf_error(model: &MgModel, spec: &ChannelSpec) -> Result<f64, MixtureError> {
    let mean = spec.mean_snr();
    let (lo, hi): (f64, f64) = (0.01, 20.0);
    let n = 200;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let g = mean * lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        let reference = analytic_pdf(spec, g)?.value;
        worst = worst.max((model.density(g) - reference).abs());
    }
    Ok(worst)
}
