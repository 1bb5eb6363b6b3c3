use nalgebra::{DMatrix, SymmetricEigen};

use crate::special::ln_gamma;

/// Nodes and weights of the `n`-point generalized Gauss–Laguerre rule for
/// `∫₀^∞ x^α e^{−x} g(x) dx`, by Golub–Welsch. Nodes ascend; weights sum to
/// `Γ(α+1)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && alpha > -1.0, "need n >= 1 and alpha > -1");
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = 2.0 * i as f64 + alpha + 1.0;
        if i + 1 < n {
            let k = (i + 1) as f64;
            let off = (k * (k + alpha)).sqrt();
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mu0 = ln_gamma(alpha + 1.0).exp();
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|j| (eig.eigenvalues[j], mu0 * eig.eigenvectors[(0, j)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
