use super::{ChannelError, ChannelSpec, Fading};
use crate::foxh::{FoxHParams, HKernel, HPair};
use crate::special::ln_gamma;

/// Fox's H-function distribution `(K, C, m, n, p, q, a, A, b, B)` of a
/// channel's SNR.
///
/// Fisher–F uses the kernel `H^{1,1}_{1,1}[Cγ | (−m_s, 1); (m−1, 1)]`.
/// The cascaded α–μ row is normalized end to end, so `C` carries a single
/// factor `1/γ̄` and `E[γ] = γ̄` for any number of hops.
pub fn to_fox_h(spec: &ChannelSpec) -> Result<FoxHParams, ChannelError> {
    let mean = spec.mean_snr();
    let single = |b: f64, big_b: f64| HKernel::new(1, 0, vec![], vec![HPair::new(b, big_b)]);
    let (k, c, kernel) = match *spec.fading() {
        Fading::Rayleigh => (1.0 / mean, 1.0 / mean, single(0.0, 1.0)?),
        Fading::NakagamiM { m } => {
            let c = m / mean;
            ((m.ln() - ln_gamma(m) - mean.ln()).exp(), c, single(m - 1.0, 1.0)?)
        }
        Fading::Weibull { alpha } => {
            let g = ln_gamma(1.0 + 2.0 / alpha).exp() / mean;
            (g, g, single(1.0 - 2.0 / alpha, 2.0 / alpha)?)
        }
        Fading::AlphaMu { alpha, mu } => {
            let ratio = ln_gamma(mu + 2.0 / alpha) - ln_gamma(mu);
            let k = (ratio - ln_gamma(mu) - mean.ln()).exp();
            let c = (ratio - mean.ln()).exp();
            (k, c, single(mu - 2.0 / alpha, 2.0 / alpha)?)
        }
        Fading::Maxwell => (3.0 / (std::f64::consts::PI.sqrt() * mean), 1.5 / mean, single(0.5, 1.0)?),
        Fading::CascadedAlphaMu { ref hops } => {
            let mut ln_k = -mean.ln();
            let mut ln_c = -mean.ln();
            let mut lower = Vec::with_capacity(hops.len());
            for h in hops {
                let ratio = ln_gamma(h.mu + 2.0 / h.alpha) - ln_gamma(h.mu);
                ln_k += ratio - ln_gamma(h.mu);
                ln_c += ratio;
                lower.push(HPair::new(h.mu - 2.0 / h.alpha, 2.0 / h.alpha));
            }
            (ln_k.exp(), ln_c.exp(), HKernel::new(hops.len(), 0, vec![], lower)?)
        }
        Fading::FisherF { m, m_s } => {
            let c = m / (m_s * mean);
            let k = (c.ln() - ln_gamma(m) - ln_gamma(m_s)).exp();
            (k, c, HKernel::new(1, 1, vec![HPair::new(-m_s, 1.0)], vec![HPair::new(m - 1.0, 1.0)])?)
        }
        Fading::KG { m_l, m_sl } => {
            let c = m_l * m_sl / mean;
            let k = (c.ln() - ln_gamma(m_l) - ln_gamma(m_sl)).exp();
            let lower = vec![HPair::new(m_l - 1.0, 1.0), HPair::new(m_sl - 1.0, 1.0)];
            (k, c, HKernel::new(2, 0, vec![], lower)?)
        }
        Fading::Egk { m, xi, m_s, xi_s } => {
            let ratio = ln_gamma(m + 1.0 / xi) + ln_gamma(m_s + 1.0 / xi_s) - ln_gamma(m) - ln_gamma(m_s);
            let c = (ratio - mean.ln()).exp();
            let k = (ratio - ln_gamma(m) - ln_gamma(m_s) - mean.ln()).exp();
            let lower = vec![HPair::new(m - 1.0 / xi, 1.0 / xi), HPair::new(m_s - 1.0 / xi_s, 1.0 / xi_s)];
            (k, c, HKernel::new(2, 0, vec![], lower)?)
        }
    };
    Ok(FoxHParams::new(k, c, kernel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foxh::HPair;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
    }

    fn same(p: &FoxHParams, q: &FoxHParams) -> bool {
        let (kp, kq) = (p.kernel(), q.kernel());
        close(p.k(), q.k())
            && close(p.c(), q.c())
            && (kp.m(), kp.n(), kp.p(), kp.q()) == (kq.m(), kq.n(), kq.p(), kq.q())
            && kp.lower().iter().zip(kq.lower()).all(|(a, b)| close(a.shift, b.shift) && close(a.scale, b.scale))
            && kp.upper().iter().zip(kq.upper()).all(|(a, b)| close(a.shift, b.shift) && close(a.scale, b.scale))
    }

    #[test]
    fn rayleigh_row() {
        let p = to_fox_h(&ChannelSpec::rayleigh(1.0).unwrap()).unwrap();
        let k = p.kernel();
        assert_eq!((k.m(), k.n(), k.p(), k.q()), (1, 0, 0, 1));
        assert_eq!((p.k(), p.c()), (1.0, 1.0));
        assert_eq!(k.lower(), &[HPair::new(0.0, 1.0)]);
    }

    #[test]
    fn reductions_to_rayleigh() {
        let ray = to_fox_h(&ChannelSpec::rayleigh(1.0).unwrap()).unwrap();
        for spec in [
            ChannelSpec::nakagami(1.0, 1.0),
            ChannelSpec::alpha_mu(2.0, 1.0, 1.0),
            ChannelSpec::weibull(2.0, 1.0),
            ChannelSpec::cascaded_alpha_mu(&[(2.0, 1.0)], 1.0),
        ] {
            assert!(same(&to_fox_h(&spec.unwrap()).unwrap(), &ray));
        }
    }

    #[test]
    fn alpha_mu_with_alpha_two_is_nakagami() {
        for &m in &[0.7, 2.0, 3.5] {
            let a = to_fox_h(&ChannelSpec::alpha_mu(2.0, m, 3.0).unwrap()).unwrap();
            let n = to_fox_h(&ChannelSpec::nakagami(m, 3.0).unwrap()).unwrap();
            assert!(same(&a, &n), "m={m}");
        }
    }

    #[test]
    fn fisher_f_row() {
        let p = to_fox_h(&ChannelSpec::fisher_f(2.0, 3.0, 1.0).unwrap()).unwrap();
        let k = p.kernel();
        assert_eq!((k.m(), k.n(), k.p(), k.q()), (1, 1, 1, 1));
        assert!(close(p.c(), 2.0 / 3.0));
        // m/(m_s γ̄ Γ(m) Γ(m_s)) = 2/(3·1·2)
        assert!(close(p.k(), 1.0 / 3.0));
        assert_eq!(k.upper(), &[HPair::new(-3.0, 1.0)]);
        assert_eq!(k.lower(), &[HPair::new(1.0, 1.0)]);
    }

    #[test]
    fn kg_and_egk_rows() {
        let p = to_fox_h(&ChannelSpec::kg(2.5, 4.0, 2.0).unwrap()).unwrap();
        assert!(close(p.c(), 5.0));
        let gam = crate::special::gamma_fn;
        assert!(close(p.k(), 10.0 / (gam(2.5) * gam(4.0) * 2.0)));
        assert_eq!((p.kernel().m(), p.kernel().q()), (2, 2));

        let p = to_fox_h(&ChannelSpec::egk(1.5, 1.2, 2.0, 0.8, 1.0).unwrap()).unwrap();
        let want_c = gam(1.5 + 1.0 / 1.2) * gam(2.0 + 1.0 / 0.8) / (gam(1.5) * gam(2.0));
        assert!((p.c() - want_c).abs() < 1e-13 * want_c);
        assert!((p.k() - want_c / (gam(1.5) * gam(2.0))).abs() < 1e-13 * p.k());
        assert_eq!(p.kernel().lower()[1], HPair::new(2.0 - 1.25, 1.25));
    }
}
