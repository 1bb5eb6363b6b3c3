//! PNZ versus the main-to-wiretap SNR ratio for a K_G main link
//! (m_l = 2.5, m_sl = 4) and a Nakagami-3.5 eavesdropper at 0 dB, through
//! the Fox H, MG and MoG backends. Prints CSV.

use std::sync::Arc;

use wiretap::backend::{build_model, draw_samples, Backend};
use wiretap::channels::{db_to_linear, ChannelModel, ChannelSpec};
use wiretap::metrics::{pnz, QuadratureConfig, SecrecyScenario};
use wiretap::mixtures::{fit_mog, EmOptions};

fn main() {
    let cfg = QuadratureConfig::default();
    let main_spec = ChannelSpec::kg(2.5, 4.0, 1.0).unwrap();
    let eve_spec = ChannelSpec::nakagami(3.5, 1.0).unwrap();

    // MoG fits are scale-free: fit each link once and rescale per point.
    let fit = |spec: &ChannelSpec, stream| {
        let samples = draw_samples(spec, 100_000, 1, stream).unwrap();
        fit_mog(&samples, EmOptions::new(6, 1)).unwrap()
    };
    let (mog_main, mog_eve) = (fit(&main_spec, 0), fit(&eve_spec, 1));

    let pnz_of = |main: Arc<dyn ChannelModel>, eve: Arc<dyn ChannelModel>| {
        let scn = SecrecyScenario::new(main, eve, 0.0).unwrap();
        pnz(&scn, &cfg).unwrap().value
    };
    println!("ratio_db,foxh,mg,mog");
    for step in 0..=20 {
        let ratio_db = -5.0 + step as f64;
        let ratio = db_to_linear(ratio_db);
        let at = main_spec.with_mean_snr(ratio).unwrap();
        let foxh =
            pnz_of(build_model(&at, Backend::FoxH, 0).unwrap(), build_model(&eve_spec, Backend::FoxH, 1).unwrap());
        let mg = pnz_of(
            build_model(&at, Backend::Mg { components: 20 }, 0).unwrap(),
            build_model(&eve_spec, Backend::Mg { components: 20 }, 1).unwrap(),
        );
        let mog = pnz_of(Arc::new(mog_main.rescaled(ratio).unwrap()), Arc::new(mog_eve.clone()));
        println!("{ratio_db},{foxh:.6},{mg:.6},{mog:.6}");
    }
}
