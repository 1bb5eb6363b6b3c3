//! Secrecy metrics of the wiretap channel over independent main (Bob) and
//! wiretap (Eve) fading, by adaptive quadrature over either channel law.
//!
//! Every integral over Eve is taken against her full law, so a point mass
//! at γ_E = 0 contributes `P(γ_E = 0)·g(0)` next to `∫ g f_E`.

use std::cell::RefCell;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::channels::{ChannelError, ChannelModel};
use crate::quadrature::{integrate_semi_infinite_with, SemiInfiniteMap, Tolerance};

/// Results outside `[0, 1]` by more than this are errors, not clamped.
pub const CLAMP_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("quadrature did not converge: estimate {estimate} with error bound {error_bound:e}")]
    NotConverged { estimate: f64, error_bound: f64 },
    #[error("probability {value} lies outside [0, 1] beyond {CLAMP_LIMIT:e}")]
    OutOfRange { value: f64 },
}

/// Tolerances and budgets for the metric integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Budget of each inner integral of the average secrecy capacity.
    pub inner_max_subdivisions: usize,
    pub map: SemiInfiniteMap,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            inner_max_subdivisions: 500,
            map: SemiInfiniteMap::Rational,
        }
    }
}

impl QuadratureConfig {
    /// Same config with both tolerances set to `tol`.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self.rel_tol = tol;
        self
    }

    fn validate(&self) -> Result<(), MetricError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(MetricError::InvalidScenario("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 || self.inner_max_subdivisions == 0 {
            return Err(MetricError::InvalidScenario("quadrature budgets must be positive".into()));
        }
        Ok(())
    }

    fn outer(&self) -> Tolerance {
        Tolerance { abs: self.abs_tol, rel: self.rel_tol, max_subdivisions: self.max_subdivisions }
    }

    fn inner(&self) -> Tolerance {
        Tolerance { abs: self.abs_tol, rel: self.rel_tol, max_subdivisions: self.inner_max_subdivisions }
    }
}

/// Main and wiretap channel laws plus the target secrecy rate `R_t`
/// (bits/s/Hz).
#[derive(Clone)]
pub struct SecrecyScenario {
    main: Arc<dyn ChannelModel>,
    wiretap: Arc<dyn ChannelModel>,
    rate: f64,
}

impl fmt::Debug for SecrecyScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecrecyScenario")
            .field("main_mean_snr", &self.main.mean_snr())
            .field("wiretap_mean_snr", &self.wiretap.mean_snr())
            .field("rate", &self.rate)
            .finish()
    }
}

impl SecrecyScenario {
    pub fn new(main: Arc<dyn ChannelModel>, wiretap: Arc<dyn ChannelModel>, rate: f64) -> Result<Self, MetricError> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(MetricError::InvalidScenario(format!("rate threshold must be >= 0, got {rate}")));
        }
        Ok(Self { main, wiretap, rate })
    }

    pub fn main(&self) -> &dyn ChannelModel {
        self.main.as_ref()
    }

    pub fn wiretap(&self) -> &dyn ChannelModel {
        self.wiretap.as_ref()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self, MetricError> {
        Self::new(self.main.clone(), self.wiretap.clone(), rate)
    }
}

/// The quantities this module computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Sop,
    SopLowerBound,
    Pnz,
    Asc,
    Esc,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Sop, Metric::SopLowerBound, Metric::Pnz, Metric::Asc, Metric::Esc];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Sop => "sop",
            Metric::SopLowerBound => "sop_lower_bound",
            Metric::Pnz => "pnz",
            Metric::Asc => "asc",
            Metric::Esc => "esc",
        }
    }

    pub fn is_probability(self) -> bool {
        matches!(self, Metric::Sop | Metric::SopLowerBound | Metric::Pnz)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}; expected one of sop, sop_lower_bound, pnz, asc, esc"))
    }
}

/// A computed metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    /// Quadrature error estimate.
    pub error_estimate: f64,
    /// How far the raw probability fell outside `[0, 1]` before clamping.
    pub clamp_defect: f64,
}

/// `[log2(1+γ_B) − log2(1+γ_E)]⁺`.
pub fn secrecy_capacity(snr_main: f64, snr_wiretap: f64) -> f64 {
    ((snr_main.ln_1p() - snr_wiretap.ln_1p()) / LN_2).max(0.0)
}

// SNR Bob needs to support rate R when Eve sees γ: 2^R(1+γ) − 1, written so
// that R = 0 gives γ exactly.
fn required_snr(rate: f64, snr_wiretap: f64) -> f64 {
    let scale = rate.exp2();
    (scale - 1.0) + scale * snr_wiretap
}

struct Integral {
    value: f64,
    error: f64,
}

// ∫_lower^∞ f(x)·g(x) dx for the density of `model`.
fn integrate_density<G>(
    model: &dyn ChannelModel,
    lower: f64,
    tol: Tolerance,
    map: SemiInfiniteMap,
    mut g: G,
) -> Result<Integral, MetricError>
where
    G: FnMut(f64) -> Result<f64, MetricError>,
{
    let failure: RefCell<Option<MetricError>> = RefCell::new(None);
    let r = integrate_semi_infinite_with(
        |x| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let value =
                model.pdf(x).map_err(MetricError::from).and_then(|f| if f == 0.0 { Ok(0.0) } else { Ok(f * g(x)?) });
            match value {
                Ok(v) => v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        lower,
        model.mean_snr(),
        map,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !r.converged {
        return Err(MetricError::NotConverged { estimate: r.value, error_bound: r.abs_error });
    }
    Ok(Integral { value: r.value, error: r.abs_error })
}

// E[g(γ_E)] over Eve's full law, point mass included.
fn expect_over_wiretap<G>(scn: &SecrecyScenario, cfg: &QuadratureConfig, mut g: G) -> Result<Integral, MetricError>
where
    G: FnMut(f64) -> Result<f64, MetricError>,
{
    cfg.validate()?;
    let atom = scn.wiretap.zero_mass();
    let at_zero = if atom > 0.0 { atom * g(0.0)? } else { 0.0 };
    let mut r = integrate_density(scn.wiretap(), 0.0, cfg.outer(), cfg.map, g)?;
    r.value += at_zero;
    Ok(r)
}

fn probability(r: Integral) -> Result<MetricValue, MetricError> {
    let v = r.value;
    if !(-CLAMP_LIMIT..=1.0 + CLAMP_LIMIT).contains(&v) {
        return Err(MetricError::OutOfRange { value: v });
    }
    let clamped = v.clamp(0.0, 1.0);
    Ok(MetricValue { value: clamped, error_estimate: r.error, clamp_defect: (v - clamped).abs() })
}

/// Secrecy outage probability `Pr(C_s ≤ R_t) = E_E[F_B(2^{R_t}(1+γ_E) − 1)]`.
pub fn sop(scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    let rate = scn.rate;
    let main = scn.main();
    probability(expect_over_wiretap(scn, cfg, |g| Ok(main.cdf(required_snr(rate, g))?))?)
}

/// Lower bound `E_E[F_B(2^{R_t} γ_E)] = Pr(γ_B ≤ 2^{R_t} γ_E)` on the SOP.
pub fn sop_lower_bound(scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    let scale = scn.rate.exp2();
    let main = scn.main();
    probability(expect_over_wiretap(scn, cfg, |g| Ok(main.cdf(scale * g)?))?)
}

/// Probability of non-zero secrecy capacity `Pr(γ_B > γ_E)`.
pub fn pnz(scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    let main = scn.main();
    probability(expect_over_wiretap(scn, cfg, |g| Ok(1.0 - main.cdf(g)?))?)
}

/// Average secrecy capacity `E[C_s]` as the iterated integral
/// `∫ f_E(y) ∫_y^∞ f_B(x)·log2((1+x)/(1+y)) dx dy`.
pub fn asc(scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    let main = scn.main();
    let inner_tol = cfg.inner();
    let map = cfg.map;
    let mut inner_error = 0.0f64;
    let r = expect_over_wiretap(scn, cfg, |y| {
        let r = integrate_density(main, y, inner_tol, map, |x| Ok(((x - y) / (1.0 + y)).ln_1p() / LN_2))?;
        inner_error = inner_error.max(r.error);
        Ok(r.value)
    })?;
    Ok(MetricValue { value: r.value.max(0.0), error_estimate: r.error + inner_error, clamp_defect: 0.0 })
}

/// `E[log2(1 + γ)]` of one channel law.
pub fn ergodic_capacity(model: &dyn ChannelModel, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    cfg.validate()?;
    let r = integrate_density(model, 0.0, cfg.outer(), cfg.map, |x| Ok(x.ln_1p() / LN_2))?;
    Ok(MetricValue { value: r.value, error_estimate: r.error, clamp_defect: 0.0 })
}

/// Ergodic secrecy capacity `[E log2(1+γ_B) − E log2(1+γ_E)]⁺`.
pub fn esc(scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    let b = ergodic_capacity(scn.main(), cfg)?;
    let e = ergodic_capacity(scn.wiretap(), cfg)?;
    Ok(MetricValue {
        value: (b.value - e.value).max(0.0),
        error_estimate: b.error_estimate + e.error_estimate,
        clamp_defect: 0.0,
    })
}

/// Dispatch on [`Metric`].
pub fn evaluate(metric: Metric, scn: &SecrecyScenario, cfg: &QuadratureConfig) -> Result<MetricValue, MetricError> {
    match metric {
        Metric::Sop => sop(scn, cfg),
        Metric::SopLowerBound => sop_lower_bound(scn, cfg),
        Metric::Pnz => pnz(scn, cfg),
        Metric::Asc => asc(scn, cfg),
        Metric::Esc => esc(scn, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{AnalyticChannel, ChannelSpec};

    fn rayleigh_pair(b: f64, e: f64, rate: f64) -> SecrecyScenario {
        SecrecyScenario::new(
            Arc::new(AnalyticChannel::new(ChannelSpec::rayleigh(b).unwrap()).unwrap()),
            Arc::new(AnalyticChannel::new(ChannelSpec::rayleigh(e).unwrap()).unwrap()),
            rate,
        )
        .unwrap()
    }

    #[test]
    fn capacity_examples() {
        assert!((secrecy_capacity(3.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity(2.5, 2.5), 0.0);
        assert_eq!(secrecy_capacity(1.0, 3.0), 0.0);
    }

    #[test]
    fn exponential_closed_forms() {
        let cfg = QuadratureConfig::default();
        let scn = rayleigh_pair(10.0, 1.0, 1.0);
        assert!((pnz(&scn, &cfg).unwrap().value - 10.0 / 11.0).abs() < 1e-8);
        assert!((sop_lower_bound(&scn, &cfg).unwrap().value - 1.0 / 6.0).abs() < 1e-8);
        // 1 − γ̄_B/(γ̄_B + 2^R γ̄_E)·exp(−(2^R − 1)/γ̄_B)
        let want = 1.0 - 10.0 / 12.0 * (-0.1f64).exp();
        assert!((sop(&scn, &cfg).unwrap().value - want).abs() < 1e-8);
        assert!((want - 0.245_969).abs() < 1e-6);
    }

    #[test]
    fn rayleigh_ergodic_capacity() {
        // e·E1(1)/ln 2, E1(1) = 0.219383934395520273677...
        let want = std::f64::consts::E * 0.219_383_934_395_520_27 / LN_2;
        let model = AnalyticChannel::new(ChannelSpec::rayleigh(1.0).unwrap()).unwrap();
        let got = ergodic_capacity(&model, &QuadratureConfig::default()).unwrap().value;
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn vanishing_eavesdropper() {
        let cfg = QuadratureConfig::default();
        let scn = rayleigh_pair(10.0, 1e-9, 1.0);
        let f_b = 1.0 - (-0.1f64).exp();
        assert!((sop(&scn, &cfg).unwrap().value - f_b).abs() < 1e-6);
        let cap = ergodic_capacity(scn.main(), &cfg).unwrap().value;
        assert!((asc(&scn, &cfg).unwrap().value - cap).abs() < 1e-5);
        assert!((esc(&scn, &cfg).unwrap().value - cap).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m: Arc<dyn ChannelModel> = Arc::new(AnalyticChannel::new(ChannelSpec::rayleigh(1.0).unwrap()).unwrap());
        assert!(SecrecyScenario::new(m.clone(), m.clone(), -1.0).is_err());
        let cfg = QuadratureConfig { abs_tol: 0.0, ..Default::default() };
        assert!(pnz(&SecrecyScenario::new(m.clone(), m, 0.0).unwrap(), &cfg).is_err());
        assert_eq!("pnz".parse::<Metric>().unwrap(), Metric::Pnz);
        assert!("snr".parse::<Metric>().is_err());
    }

    #[test]
    fn exhausted_budget_is_an_error() {
        let scn = rayleigh_pair(10.0, 1.0, 1.0);
        let cfg = QuadratureConfig { abs_tol: 1e-30, rel_tol: 1e-30, max_subdivisions: 3, ..Default::default() };
        assert!(matches!(sop(&scn, &cfg), Err(MetricError::NotConverged { .. })));
    }
}
