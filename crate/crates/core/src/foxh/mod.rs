//! Fox's H-function: Mellin–Barnes evaluation on a vertical contour, and the
//! H-function distribution `f(γ) = K·H[Cγ]` with its closed-form CDF.

mod contour;
mod distribution;
mod gamma;

pub use contour::{fox_h, ContourPlan, HValue, PoleStrip};
pub use distribution::{foxh_cdf, foxh_cdf_value, foxh_pdf, foxh_pdf_at_zero, foxh_pdf_value};
pub use gamma::ln_gamma_complex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoxHError {
    #[error("log-gamma pole at {at}")]
    Pole { at: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid H-function parameters: {0}")]
    InvalidParams(String),
    #[error("Mellin-Barnes integral diverges: decay rate {decay_rate} <= 0")]
    Divergent { decay_rate: f64 },
    #[error("poles of the two gamma families overlap (left {left} >= right {right})")]
    NoSeparatingContour { left: f64, right: f64 },
    #[error("contour truncation failed at height {height}: tail bound {tail_bound:e} on value {value:e}")]
    Truncation { value: f64, tail_bound: f64, height: f64 },
    #[error("CDF value {value} outside [0, 1] beyond tolerance")]
    CdfOvershoot { value: f64 },
}

/// One `(shift, scale)` pair: `(a_i, A_i)` on the upper row or `(b_j, B_j)`
/// on the lower row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPair {
    pub shift: f64,
    pub scale: f64,
}

impl HPair {
    pub fn new(shift: f64, scale: f64) -> Self {
        Self { shift, scale }
    }
}

/// The parameter rows and orders of `H^{m,n}_{p,q}[· | (a,A); (b,B)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HKernel {
    m: usize,
    n: usize,
    upper: Vec<HPair>,
    lower: Vec<HPair>,
}

impl HKernel {
    pub fn new(m: usize, n: usize, upper: Vec<HPair>, lower: Vec<HPair>) -> Result<Self, FoxHError> {
        if m > lower.len() {
            return Err(FoxHError::InvalidParams(format!("m = {m} exceeds q = {}", lower.len())));
        }
        if n > upper.len() {
            return Err(FoxHError::InvalidParams(format!("n = {n} exceeds p = {}", upper.len())));
        }
        for (row, pairs) in [("upper", &upper), ("lower", &lower)] {
            for (i, pair) in pairs.iter().enumerate() {
                if !pair.shift.is_finite() {
                    return Err(FoxHError::InvalidParams(format!("{row}[{i}] shift is not finite")));
                }
                if !(pair.scale > 0.0 && pair.scale.is_finite()) {
                    return Err(FoxHError::InvalidParams(format!(
                        "{row}[{i}] scale must be positive, got {}",
                        pair.scale
                    )));
                }
            }
        }
        Ok(Self { m, n, upper, lower })
    }

    /// Kernel from separate coefficient and scale vectors, in the
    /// `(a, A, b, B)` layout.
    pub fn from_rows(
        m: usize,
        n: usize,
        a: &[f64],
        big_a: &[f64],
        b: &[f64],
        big_b: &[f64],
    ) -> Result<Self, FoxHError> {
        if a.len() != big_a.len() {
            return Err(FoxHError::InvalidParams(format!("len(a) = {} but len(A) = {}", a.len(), big_a.len())));
        }
        if b.len() != big_b.len() {
            return Err(FoxHError::InvalidParams(format!("len(b) = {} but len(B) = {}", b.len(), big_b.len())));
        }
        let upper = a.iter().zip(big_a).map(|(&s, &k)| HPair::new(s, k)).collect();
        let lower = b.iter().zip(big_b).map(|(&s, &k)| HPair::new(s, k)).collect();
        Self::new(m, n, upper, lower)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn upper(&self) -> &[HPair] {
        &self.upper
    }

    pub fn lower(&self) -> &[HPair] {
        &self.lower
    }

    /// `Σ_{j≤m}B_j − Σ_{j>m}B_j + Σ_{i≤n}A_i − Σ_{i>n}A_i`; the integrand
    /// decays like `exp(−π·rate·|t|/2)` along a vertical line.
    pub fn decay_rate(&self) -> f64 {
        let lower: f64 = self.lower.iter().enumerate().map(|(j, p)| if j < self.m { p.scale } else { -p.scale }).sum();
        let upper: f64 = self.upper.iter().enumerate().map(|(i, p)| if i < self.n { p.scale } else { -p.scale }).sum();
        lower + upper
    }

    /// Open interval of abscissae separating the poles of `Γ(b_j + B_j s)`
    /// (j ≤ m) from those of `Γ(1 − a_i − A_i s)` (i ≤ n).
    pub fn pole_strip(&self) -> PoleStrip {
        let left = self.lower[..self.m].iter().map(|p| -p.shift / p.scale).fold(f64::NEG_INFINITY, f64::max);
        let right = self.upper[..self.n].iter().map(|p| (1.0 - p.shift) / p.scale).fold(f64::INFINITY, f64::min);
        PoleStrip { left, right }
    }

    /// Kernel of `∫₀^y H(x) dx = H^{m,n+1}_{p+1,q+1}[y | (1,1),(a+A,A); (b+B,B),(0,1)]`.
    pub fn integrated(&self) -> HKernel {
        let mut upper = Vec::with_capacity(self.upper.len() + 1);
        upper.push(HPair::new(1.0, 1.0));
        upper.extend(self.upper.iter().map(|p| HPair::new(p.shift + p.scale, p.scale)));
        let mut lower: Vec<HPair> = self.lower.iter().map(|p| HPair::new(p.shift + p.scale, p.scale)).collect();
        lower.push(HPair::new(0.0, 1.0));
        HKernel { m: self.m, n: self.n + 1, upper, lower }
    }

    pub fn check_convergent(&self) -> Result<(), FoxHError> {
        let rate = self.decay_rate();
        if rate <= 0.0 {
            return Err(FoxHError::Divergent { decay_rate: rate });
        }
        let strip = self.pole_strip();
        if strip.left >= strip.right {
            return Err(FoxHError::NoSeparatingContour { left: strip.left, right: strip.right });
        }
        Ok(())
    }
}

/// Parameters of the Fox's H-function distribution
/// `f(γ) = K·H^{m,n}_{p,q}[Cγ | (a,A); (b,B)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxHParams {
    k: f64,
    c: f64,
    kernel: HKernel,
}

impl FoxHParams {
    pub fn new(k: f64, c: f64, kernel: HKernel) -> Result<Self, FoxHError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(FoxHError::InvalidParams(format!("K must be positive, got {k}")));
        }
        if c == 0.0 || !c.is_finite() {
            return Err(FoxHError::InvalidParams(format!("C must be finite and nonzero, got {c}")));
        }
        Ok(Self { k, c, kernel })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kernel(&self) -> &HKernel {
        &self.kernel
    }
}

/// JSON layout: `{"K":…,"C":…,"m":…,"n":…,"a":[…],"A":[…],"b":[…],"B":[…]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoxHParamsRepr {
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "C")]
    c: f64,
    m: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    a: Vec<f64>,
    #[serde(rename = "A")]
    big_a: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "B")]
    big_b: Vec<f64>,
}

impl Serialize for FoxHParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let kern = &self.kernel;
        FoxHParamsRepr {
            k: self.k,
            c: self.c,
            m: kern.m,
            n: kern.n,
            p: Some(kern.p()),
            q: Some(kern.q()),
            a: kern.upper.iter().map(|p| p.shift).collect(),
            big_a: kern.upper.iter().map(|p| p.scale).collect(),
            b: kern.lower.iter().map(|p| p.shift).collect(),
            big_b: kern.lower.iter().map(|p| p.scale).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FoxHParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FoxHParamsRepr::deserialize(deserializer)?;
        if r.p.is_some_and(|p| p != r.a.len()) || r.q.is_some_and(|q| q != r.b.len()) {
            return Err(D::Error::custom("p/q disagree with the parameter row lengths"));
        }
        let kernel = HKernel::from_rows(r.m, r.n, &r.a, &r.big_a, &r.b, &r.big_b).map_err(D::Error::custom)?;
        FoxHParams::new(r.k, r.c, kernel).map_err(D::Error::custom)
    }
}
