//! Fit a Mixture of Gaussians to simulated Weibull SNR samples, print the
//! model JSON, and compare its CDF with the exact one.

use wiretap::backend::draw_samples;
use wiretap::channels::{analytic_cdf, ChannelSpec};
use wiretap::mixtures::{fit_mog, select_mog_components, EmOptions};

fn main() {
    let spec = ChannelSpec::weibull(3.0, 2.0).unwrap();
    let samples = draw_samples(&spec, 100_000, 7, 0).unwrap();

    let model = fit_mog(&samples, EmOptions::new(6, 7)).unwrap();
    println!("{}", serde_json::to_string_pretty(&model.to_json()).unwrap());
    for g in [0.5, 1.0, 2.0, 4.0] {
        let exact = analytic_cdf(&spec, g).unwrap().value;
        println!("F({g}) = {:.5} (exact {exact:.5})", model.distribution(g));
    }

    let sel = select_mog_components(&samples, 7, None).unwrap();
    for (c, mse) in &sel.tried {
        println!("C = {c:>2}: cdf mse {mse:.2e}");
    }
}
