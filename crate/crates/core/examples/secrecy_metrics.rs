//! All five secrecy metrics for a Nakagami main link and a Rayleigh
//! eavesdropper, over a few target rates.

use std::sync::Arc;

use wiretap::channels::{AnalyticChannel, ChannelSpec};
use wiretap::metrics::{evaluate, Metric, QuadratureConfig, SecrecyScenario};

fn main() {
    let bob = Arc::new(AnalyticChannel::new(ChannelSpec::nakagami(2.0, 10.0).unwrap()).unwrap());
    let eve = Arc::new(AnalyticChannel::new(ChannelSpec::rayleigh(1.0).unwrap()).unwrap());
    let cfg = QuadratureConfig::default();
    for rate in [0.0, 0.5, 1.0, 2.0] {
        let scn = SecrecyScenario::new(bob.clone(), eve.clone(), rate).unwrap();
        let line: Vec<String> =
            Metric::ALL.iter().map(|&m| format!("{}={:.6}", m, evaluate(m, &scn, &cfg).unwrap().value)).collect();
        println!("R_t={rate:<4} {}", line.join("  "));
    }
}
