use num_complex::Complex64;

use super::contour::{fox_h, ContourPlan, HValue};
use super::gamma::ln_gamma_complex;
use super::{FoxHError, FoxHParams};

const CDF_CLAMP: f64 = 1e-8;
const CDF_OVERSHOOT: f64 = 1e-6;

fn check_snr(snr: f64) -> Result<(), FoxHError> {
    if snr > 0.0 && snr.is_finite() {
        Ok(())
    } else {
        Err(FoxHError::InvalidArgument(format!("SNR must be positive and finite, got {snr}")))
    }
}

/// `K·H[Cγ]` with the contour error estimate scaled by `K`.
pub fn foxh_pdf_value(params: &FoxHParams, snr: f64) -> Result<HValue, FoxHError> {
    check_snr(snr)?;
    let x = params.c() * snr;
    let plan = ContourPlan::for_kernel(params.kernel(), x)?;
    let h = fox_h(params.kernel(), x, &plan)?;
    Ok(HValue { value: params.k() * h.value, error: params.k() * h.error })
}

pub fn foxh_pdf(params: &FoxHParams, snr: f64) -> Result<f64, FoxHError> {
    foxh_pdf_value(params, snr).map(|v| v.value)
}

/// CDF through the integrated kernel, `(K/C)·H^{m,n+1}_{p+1,q+1}[Cγ]`.
///
/// Values within 1e-8 outside `[0, 1]` are clamped; beyond 1e-6 they are
/// reported as [`FoxHError::CdfOvershoot`].
pub fn foxh_cdf_value(params: &FoxHParams, snr: f64) -> Result<HValue, FoxHError> {
    check_snr(snr)?;
    let x = params.c() * snr;
    let kernel = params.kernel().integrated();
    let plan = ContourPlan::for_kernel(&kernel, x)?;
    let h = fox_h(&kernel, x, &plan)?;
    let scale = params.k() / params.c();
    let value = scale * h.value;
    let error = scale.abs() * h.error;
    let clamped = if value < 0.0 {
        if value < -CDF_OVERSHOOT {
            return Err(FoxHError::CdfOvershoot { value });
        }
        if value > -CDF_CLAMP {
            0.0
        } else {
            value
        }
    } else if value > 1.0 {
        if value > 1.0 + CDF_OVERSHOOT {
            return Err(FoxHError::CdfOvershoot { value });
        }
        if value < 1.0 + CDF_CLAMP {
            1.0
        } else {
            value
        }
    } else {
        value
    };
    Ok(HValue { value: clamped, error })
}

pub fn foxh_cdf(params: &FoxHParams, snr: f64) -> Result<f64, FoxHError> {
    foxh_cdf_value(params, snr).map(|v| v.value)
}

/// Limit of the density as `γ → 0⁺`, read off the rightmost pole of the
/// `Γ(b_j + B_j s)` family: `H[x] ~ x^{−s*}·Res`.
pub fn foxh_pdf_at_zero(params: &FoxHParams) -> f64 {
    let kernel = params.kernel();
    let strip = kernel.pole_strip();
    let lead = strip.left;
    if !lead.is_finite() {
        return 0.0;
    }
    if lead < 0.0 {
        return 0.0;
    }
    if lead > 0.0 {
        return f64::INFINITY;
    }
    // Simple pole at s = 0 from one lower factor (b_j = 0); a double pole
    // gives a logarithmic singularity.
    let hits: Vec<usize> = (0..kernel.m()).filter(|&j| kernel.lower()[j].shift == 0.0).collect();
    if hits.len() != 1 {
        return f64::INFINITY;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut log_rest = Complex64::new(0.0, 0.0);
    for (j, p) in kernel.lower().iter().enumerate() {
        if j == hits[0] {
            continue;
        }
        let arg = Complex64::new(p.shift, 0.0);
        let term = if j < kernel.m() { ln_gamma_complex(arg) } else { ln_gamma_complex(one - arg).map(|v| -v) };
        match term {
            Ok(v) => log_rest += v,
            Err(_) => return 0.0,
        }
    }
    for (i, p) in kernel.upper().iter().enumerate() {
        let arg = Complex64::new(p.shift, 0.0);
        let term = if i < kernel.n() { ln_gamma_complex(one - arg) } else { ln_gamma_complex(arg).map(|v| -v) };
        match term {
            Ok(v) => log_rest += v,
            Err(_) => return 0.0,
        }
    }
    let residue = log_rest.re.exp() * log_rest.im.cos() / kernel.lower()[hits[0]].scale;
    params.k() * residue
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foxh::HKernel;

    fn rayleigh(mean: f64) -> FoxHParams {
        let k = HKernel::from_rows(1, 0, &[], &[], &[0.0], &[1.0]).unwrap();
        FoxHParams::new(1.0 / mean, 1.0 / mean, k).unwrap()
    }

    #[test]
    fn rayleigh_pdf_and_cdf() {
        let p = rayleigh(1.0);
        let e1 = (-1.0f64).exp();
        assert!((foxh_pdf(&p, 1.0).unwrap() - e1).abs() < 1e-13);
        assert!((foxh_cdf(&p, 1.0).unwrap() - (1.0 - e1)).abs() < 1e-13);
        assert!((foxh_pdf_at_zero(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_vanishes_at_origin() {
        let p = rayleigh(2.0);
        for &g in &[1e-6, 1e-9, 1e-12] {
            assert!(foxh_cdf(&p, g).unwrap() < 1e-5 * (g / 1e-6));
        }
    }

    #[test]
    fn nonpositive_snr_rejected() {
        let p = rayleigh(1.0);
        assert!(foxh_pdf(&p, 0.0).is_err());
        assert!(foxh_cdf(&p, -1.0).is_err());
    }

    #[test]
    fn zero_limit_classification() {
        // Nakagami m = 2 vanishes at zero, m = 0.5 diverges.
        let k2 = HKernel::from_rows(1, 0, &[], &[], &[1.0], &[1.0]).unwrap();
        assert_eq!(foxh_pdf_at_zero(&FoxHParams::new(2.0, 2.0, k2).unwrap()), 0.0);
        let kh = HKernel::from_rows(1, 0, &[], &[], &[-0.5], &[1.0]).unwrap();
        assert_eq!(foxh_pdf_at_zero(&FoxHParams::new(1.0, 0.5, kh).unwrap()), f64::INFINITY);
    }
}
