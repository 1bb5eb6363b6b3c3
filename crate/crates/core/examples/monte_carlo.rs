//! Monte Carlo oracle against quadrature for a K_G / Nakagami pair.

use std::sync::Arc;

use wiretap::channels::{AnalyticChannel, ChannelSpec};
use wiretap::metrics::{evaluate, Metric, QuadratureConfig, SecrecyScenario};
use wiretap::montecarlo::mc_metric;

fn main() {
    let bob = Arc::new(AnalyticChannel::new(ChannelSpec::kg(2.5, 4.0, 10.0).unwrap()).unwrap());
    let eve = Arc::new(AnalyticChannel::new(ChannelSpec::nakagami(3.5, 1.0).unwrap()).unwrap());
    let scn = SecrecyScenario::new(bob, eve, 1.0).unwrap();
    let cfg = QuadratureConfig::default();
    for m in [Metric::Sop, Metric::SopLowerBound, Metric::Pnz, Metric::Esc] {
        let q = evaluate(m, &scn, &cfg).unwrap().value;
        let mc = mc_metric(&scn, m, 1_000_000, 42).unwrap();
        let z = (mc.value - q) / mc.std_error;
        println!("{m:<16} quadrature {q:.6}  mc {:.6} ± {:.6}  z = {z:+.2}", mc.value, mc.std_error);
    }
}
