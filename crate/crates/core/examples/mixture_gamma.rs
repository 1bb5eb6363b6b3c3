//! Mixture Gamma approximations of K_G fading: pdf error by component
//! budget and rule, then PNZ through the mixture.

use std::sync::Arc;

use wiretap::channels::{AnalyticChannel, ChannelSpec};
use wiretap::metrics::{pnz, QuadratureConfig, SecrecyScenario};
use wiretap::mixtures::{mg_from_channel, mg_from_channel_with, MgRule};

fn main() {
    let spec = ChannelSpec::kg(2.5, 4.0, 10.0).unwrap();
    println!("{:>5} {:>14} {:>14}", "L", "log-trapezoid", "gauss-laguerre");
    for terms in [5, 10, 20, 40] {
        let err = |rule| mg_from_channel_with(&spec, terms, rule).unwrap().metadata.fit_error.unwrap();
        println!("{terms:>5} {:>14.2e} {:>14.2e}", err(MgRule::LogTrapezoid), err(MgRule::GaussLaguerre));
    }

    let cfg = QuadratureConfig::default();
    let eve_spec = ChannelSpec::nakagami(3.5, 1.0).unwrap();
    let mg = SecrecyScenario::new(
        Arc::new(mg_from_channel(&spec, 20).unwrap()),
        Arc::new(mg_from_channel(&eve_spec, 1).unwrap()),
        0.0,
    )
    .unwrap();
    let exact = SecrecyScenario::new(
        Arc::new(AnalyticChannel::new(spec).unwrap()),
        Arc::new(AnalyticChannel::new(eve_spec).unwrap()),
        0.0,
    )
    .unwrap();
    println!("PNZ via MG(20): {:.9}", pnz(&mg, &cfg).unwrap().value);
    println!("PNZ via Fox H:  {:.9}", pnz(&exact, &cfg).unwrap().value);
}
