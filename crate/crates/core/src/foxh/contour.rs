use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;

use super::gamma::ln_gamma_complex;
use super::{FoxHError, HKernel};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{digamma, trigamma};

/// Open strip `left < Re s < right` in which the contour must lie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleStrip {
    pub left: f64,
    pub right: f64,
}

impl PoleStrip {
    pub fn contains(&self, c: f64) -> bool {
        c > self.left && c < self.right
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// Vertical contour `Re s = abscissa`, integrated outward in panels
/// `[0, T₀], [T₀, 2T₀], …` until a panel's contribution is negligible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPlan {
    pub abscissa: f64,
    /// Height of the first panel.
    pub initial_height: f64,
    /// Truncation cap; reaching it without convergence is an error.
    pub max_height: f64,
    /// Bisection budget for each panel (21 nodes per segment).
    pub panel_subdivisions: usize,
    /// Fraction of a finite pole gap kept clear on each side.
    pub pole_margin: f64,
}

/// An H-function value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub value: f64,
    pub error: f64,
}

const PANEL_STOP: f64 = 1e-12;
const PANEL_REL_TOL: f64 = 1e-13;
// Clearance from the only finite pole when the strip is a half plane.
const HALF_PLANE_CLEARANCE: f64 = 0.02;

impl ContourPlan {
    /// Plan for `H[x]`: the abscissa sits at the real saddle point of
    /// `|Γ-numerator · x^{−s}|` inside the pole strip, which keeps the
    /// oscillating integrand free of cancellation.
    pub fn for_kernel(kernel: &HKernel, x: f64) -> Result<Self, FoxHError> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(FoxHError::InvalidArgument(format!("H-function argument must be positive, got {x}")));
        }
        kernel.check_convergent()?;
        let pole_margin = 0.15;
        let strip = kernel.pole_strip();
        let (lo, hi) = clearance_bounds(strip, pole_margin);
        let ln_x = x.ln();
        let slope = |c: f64| saddle_slope(kernel, c, ln_x);
        let abscissa = if lo.is_finite() && hi.is_finite() {
            bisect_root(slope, lo, hi)
        } else if lo.is_finite() {
            let mut hi = lo + 1.0;
            let mut steps = 0;
            while slope(hi) < 0.0 && steps < 80 {
                hi = lo + 2.0 * (hi - lo);
                steps += 1;
            }
            bisect_root(slope, lo, hi)
        } else if hi.is_finite() {
            let mut lo = hi - 1.0;
            let mut steps = 0;
            while slope(lo) > 0.0 && steps < 80 {
                lo = hi - 2.0 * (hi - lo);
                steps += 1;
            }
            bisect_root(slope, lo, hi)
        } else {
            0.0
        };
        let curvature = saddle_curvature(kernel, abscissa);
        let initial_height =
            if curvature > 0.0 && curvature.is_finite() { (3.0 / curvature.sqrt()).clamp(1e-3, 50.0) } else { 1.0 };
        Ok(Self { abscissa, initial_height, max_height: 1e5, panel_subdivisions: 200, pole_margin })
    }

    /// Same plan on a different vertical line.
    pub fn with_abscissa(mut self, abscissa: f64) -> Self {
        self.abscissa = abscissa;
        self
    }

    /// Width of the pole gap the contour sits in; for a half-plane strip
    /// the gap is taken symmetric about the abscissa.
    pub fn pole_gap(&self, kernel: &HKernel) -> f64 {
        let strip = kernel.pole_strip();
        match (strip.left.is_finite(), strip.right.is_finite()) {
            (true, true) => strip.width(),
            (true, false) => 2.0 * (self.abscissa - strip.left),
            (false, true) => 2.0 * (strip.right - self.abscissa),
            (false, false) => f64::INFINITY,
        }
    }
}

fn clearance_bounds(strip: PoleStrip, margin: f64) -> (f64, f64) {
    if strip.left.is_finite() && strip.right.is_finite() {
        let pad = margin * strip.width();
        (strip.left + pad, strip.right - pad)
    } else {
        (strip.left + HALF_PLANE_CLEARANCE, strip.right - HALF_PLANE_CLEARANCE)
    }
}

// d/dc of ln|numerator(c)| − c·ln x; increasing in c.
fn saddle_slope(kernel: &HKernel, c: f64, ln_x: f64) -> f64 {
    let lower: f64 = kernel.lower()[..kernel.m()].iter().map(|p| p.scale * digamma(p.shift + p.scale * c)).sum();
    let upper: f64 = kernel.upper()[..kernel.n()].iter().map(|p| p.scale * digamma(1.0 - p.shift - p.scale * c)).sum();
    lower - upper - ln_x
}

fn saddle_curvature(kernel: &HKernel, c: f64) -> f64 {
    let lower: f64 =
        kernel.lower()[..kernel.m()].iter().map(|p| p.scale * p.scale * trigamma(p.shift + p.scale * c)).sum();
    let upper: f64 =
        kernel.upper()[..kernel.n()].iter().map(|p| p.scale * p.scale * trigamma(1.0 - p.shift - p.scale * c)).sum();
    lower + upper
}

fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn log_integrand(kernel: &HKernel, s: Complex64, ln_x: f64) -> Result<Complex64, FoxHError> {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = -s * ln_x;
    for (j, p) in kernel.lower().iter().enumerate() {
        let arg = p.shift + p.scale * s;
        if j < kernel.m() {
            acc += ln_gamma_complex(arg)?;
        } else {
            acc -= ln_gamma_complex(one - arg)?;
        }
    }
    for (i, p) in kernel.upper().iter().enumerate() {
        let arg = p.shift + p.scale * s;
        if i < kernel.n() {
            acc += ln_gamma_complex(one - arg)?;
        } else {
            acc -= ln_gamma_complex(arg)?;
        }
    }
    Ok(acc)
}

/// `H^{m,n}_{p,q}[x]` as `(1/π)∫₀^∞ Re[Θ(c+it)·x^{−c−it}] dt`.
///
/// The integrand on `t < 0` is the complex conjugate of that on `t > 0`
/// (log-gamma is conjugate-symmetric), so only the upper half of the line is
/// integrated and the imaginary part vanishes identically.
pub fn fox_h(kernel: &HKernel, x: f64, plan: &ContourPlan) -> Result<HValue, FoxHError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(FoxHError::InvalidArgument(format!("H-function argument must be positive, got {x}")));
    }
    kernel.check_convergent()?;
    let strip = kernel.pole_strip();
    if !strip.contains(plan.abscissa) {
        return Err(FoxHError::InvalidArgument(format!(
            "abscissa {} outside the pole strip ({}, {})",
            plan.abscissa, strip.left, strip.right
        )));
    }
    if !(plan.initial_height > 0.0 && plan.max_height >= plan.initial_height) {
        return Err(FoxHError::InvalidArgument("contour heights must be positive and ordered".into()));
    }

    let ln_x = x.ln();
    let c = plan.abscissa;
    let failure: RefCell<Option<FoxHError>> = RefCell::new(None);
    let mut integrand = |t: f64| -> f64 {
        match log_integrand(kernel, Complex64::new(c, t), ln_x) {
            Ok(l) => {
                if l.re < -745.0 {
                    0.0
                } else {
                    l.re.exp() * l.im.cos()
                }
            }
            // 1/Γ at a pole of a denominator factor.
            Err(FoxHError::Pole { .. }) => 0.0,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    let mut acc = 0.0;
    let mut acc_abs = 0.0;
    let mut err = 0.0;
    let mut lo = 0.0;
    let mut hi = plan.initial_height;
    loop {
        let tol = Tolerance { abs: 1e-15 * acc_abs, rel: PANEL_REL_TOL, max_subdivisions: plan.panel_subdivisions };
        let panel = integrate(&mut integrand, lo, hi, tol);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        acc += panel.value;
        acc_abs += panel.abs_integral;
        err += panel.abs_error;
        let negligible = panel.abs_integral <= PANEL_STOP * acc.abs() || panel.abs_integral <= 1e-16 * acc_abs;
        if negligible {
            err += panel.abs_integral;
            break;
        }
        if hi >= plan.max_height {
            return Err(FoxHError::Truncation { value: acc / PI, tail_bound: panel.abs_integral / PI, height: hi });
        }
        lo = hi;
        hi = (2.0 * hi).min(plan.max_height);
    }
    Ok(HValue { value: acc / PI, error: err / PI })
}
