//! Globally adaptive Gauss–Kronrod (10/21-point) integration on finite
//! intervals and on `[a, ∞)` through the map `x = a + s·t/(1−t)`.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_115_935,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_048_211,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// Estimate of ∫|f|, useful for judging cancellation.
    pub abs_integral: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = WGK[10] * f_center;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let abs_value = res_abs * half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_value);
    }
    Segment { a, b, value, error: err, abs_value }
}

/// Integrates `f` over `[a, b]` by bisecting the segment with the largest
/// error estimate until `error ≤ max(abs, rel·|I|)` or the subdivision
/// budget runs out.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    let first = kronrod21(&mut f, a, b);
    let mut evaluations = 21;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    let budget = tol.max_subdivisions.max(1);
    loop {
        if !value.is_finite() || !error.is_finite() {
            break;
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            let abs_integral = heap.iter().map(|s| s.abs_value).sum();
            return QuadResult { value, abs_error: error, abs_integral, subdivisions, evaluations, converged: true };
        }
        if subdivisions >= budget {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment can no longer be split in floating point.
            heap.push(worst);
            break;
        }
        let left = kronrod21(&mut f, worst.a, mid);
        let right = kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Rebuild the running sums now and then to shed cancellation drift.
        if subdivisions % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    value = heap.iter().map(|s| s.value).sum();
    error = heap.iter().map(|s| s.error).sum();
    let abs_integral = heap.iter().map(|s| s.abs_value).sum();
    QuadResult {
        value,
        abs_error: error,
        abs_integral,
        subdivisions,
        evaluations,
        converged: value.is_finite() && error <= tol.abs.max(tol.rel * value.abs()),
    }
}

/// Change of variables taking `t ∈ [0, 1)` onto `[lower, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemiInfiniteMap {
    /// `x = lower + s·t/(1−t)`; algebraic tails.
    #[default]
    Rational,
    /// `x = lower − s·ln(1−t)`; exponential tails decaying at least as
    /// fast as `e^{−x/s}`.
    Logarithmic,
}

/// Integrates `f` over `[lower, ∞)` with the substitution
/// `x = lower + scale·t/(1−t)`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(f: F, lower: f64, scale: f64, tol: Tolerance) -> QuadResult {
    integrate_semi_infinite_with(f, lower, scale, SemiInfiniteMap::Rational, tol)
}

/// [`integrate_semi_infinite`] with an explicit map.
pub fn integrate_semi_infinite_with<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    scale: f64,
    map: SemiInfiniteMap,
    tol: Tolerance,
) -> QuadResult {
    assert!(scale > 0.0 && scale.is_finite(), "transform scale must be positive");
    integrate(
        |t| {
            let one_minus = 1.0 - t;
            let (x, jac) = match map {
                SemiInfiniteMap::Rational => (lower + scale * t / one_minus, scale / (one_minus * one_minus)),
                SemiInfiniteMap::Logarithmic => (lower - scale * (-t).ln_1p(), scale / one_minus),
            };
            if !x.is_finite() {
                return 0.0;
            }
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerance = Tolerance { abs: 1e-13, rel: 1e-12, max_subdivisions: 500 };

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x - 2.0 * x + 1.0, -1.0, 2.0, TIGHT);
        assert!(r.converged);
        assert!((r.value - 9.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1.0, TIGHT);
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate_semi_infinite(|x| (-x).exp(), 2.0, 1.0, TIGHT);
        assert!((r.value - (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn logarithmic_map() {
        let r = integrate_semi_infinite_with(|x| (-x).exp(), 1.0, 1.0, SemiInfiniteMap::Logarithmic, TIGHT);
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-13);
        let r =
            integrate_semi_infinite_with(|x| x * x * (-x / 3.0).exp(), 0.0, 6.0, SemiInfiniteMap::Logarithmic, TIGHT);
        assert!((r.value - 54.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫₀^∞ x^{-1/2} e^{-x} dx = √π
        let r = integrate_semi_infinite(
            |x| x.powf(-0.5) * (-x).exp(),
            0.0,
            1.0,
            Tolerance { abs: 1e-11, rel: 1e-10, max_subdivisions: 2000 },
        );
        assert!(r.converged, "{r:?}");
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn polynomial_tail() {
        // ∫₀^∞ dx/(1+x)^3 = 1/2
        let r = integrate_semi_infinite(|x| (1.0 + x).powi(-3), 0.0, 1.0, TIGHT);
        assert!((r.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, Tolerance { abs: 1e-15, rel: 1e-15, max_subdivisions: 5 });
        assert!(!r.converged);
    }
}
