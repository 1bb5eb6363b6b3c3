//! Every fading family: density, CDF and mean through the analytic and
//! Fox H backends, plus a sampled mean.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap::channels::{catalog, AnalyticChannel, ChannelModel, FoxHChannel};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!(
        "{:<18} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "family", "pdf(1)", "foxh pdf(1)", "cdf(1)", "mean", "sampled"
    );
    for spec in catalog(1.0) {
        let analytic = AnalyticChannel::new(spec.clone()).unwrap();
        let fox = FoxHChannel::new(spec.clone()).unwrap();
        let n = 200_000;
        let sampled = (0..n).map(|_| analytic.sample(&mut rng)).sum::<f64>() / n as f64;
        println!(
            "{:<18} {:>12.8} {:>12.8} {:>12.8} {:>10.4} {:>10.4}",
            spec.family().name(),
            analytic.pdf(1.0).unwrap(),
            fox.pdf(1.0).unwrap(),
            analytic.cdf(1.0).unwrap(),
            spec.expected_snr(),
            sampled
        );
    }
}
