use std::sync::OnceLock;

use super::ScalarFunction;
use crate::error::Result;

/// Nodes and weights of the 32-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_32() -> &'static [(f64, f64); 32] {
    static RULE: OnceLock<[(f64, f64); 32]> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 32;
        let mut rule = [(0.0, 0.0); N];
        for i in 0..N / 2 {
            // Newton iteration on P_N from the Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule[i] = (-x, w);
            rule[N - 1 - i] = (x, w);
        }
        rule
    })
}

/// `∫₀¹ f'(λt + (1-λ)s) dλ` by 32-point Gauss–Legendre; a test oracle for
/// [`super::divided_difference`].
pub fn divided_difference_quadrature_check(f: &ScalarFunction, t: f64, s: f64) -> Result<f64> {
    gauss_legendre_32().iter().try_fold(0.0, |acc, &(x, w)| {
        let lambda = 0.5 * (x + 1.0);
        let point = lambda * t + (1.0 - lambda) * s;
        Ok(acc + 0.5 * w * f.derivative_value(point, 1)?)
    })
}
