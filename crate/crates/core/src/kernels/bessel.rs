//! Modified Bessel function of the second kind.

use crate::error::{Error, Result};

/// `K_ν(x)` for `ν ≥ 0`, `x > 0`.
///
/// Half-integer orders use the terminating series; other orders use the
/// trapezoid rule on `∫₀^∞ e^{-x cosh t} cosh(νt) dt`, which converges
/// geometrically because the integrand is even and analytic.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_K needs x > 0, got {x}")));
    }
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("bessel_K needs nu >= 0, got {nu}")));
    }
    Ok(match half_integer(nu) {
        Some(n) => (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * half_series(n, 1.0 / (2.0 * x)),
        None => bessel_k_quadrature(nu, x),
    })
}

/// Returns `n` when `nu = n + 1/2`.
pub(crate) fn half_integer(nu: f64) -> Option<u32> {
    let t = nu - 0.5;
    (t >= 0.0 && t.fract() == 0.0 && t < 64.0).then_some(t as u32)
}

/// `Σ_{k=0}^{n} (n+k)! / (k! (n-k)!) · y^k`.
fn half_series(n: u32, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let k = k as f64;
        let n = n as f64;
        // ratio of consecutive coefficients: (n+k+1)(n-k) / (k+1)
        term *= (n + k + 1.0) * (n - k) / (k + 1.0) * y;
        sum += term;
    }
    sum
}

/// `x^ν K_ν(x)` for half-integer `ν = n + 1/2`, finite at `x = 0`.
pub(crate) fn scaled_half_integer(n: u32, x: f64) -> f64 {
    // x^{n+1/2} K(x) = sqrt(pi/2) e^{-x} Σ_k c_k 2^{-k} x^{n-k}
    let mut coeff = 1.0;
    let mut sum = 0.0;
    let nn = n as f64;
    for k in 0..=n {
        sum += coeff * 0.5f64.powi(k as i32) * x.powi((n - k) as i32);
        let kf = k as f64;
        coeff *= (nn + kf + 1.0) * (nn - kf) / (kf + 1.0);
    }
    (std::f64::consts::PI / 2.0).sqrt() * (-x).exp() * sum
}

pub(crate) fn bessel_k_quadrature(nu: f64, x: f64) -> f64 {
    let h: f64 = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * t.cosh() + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
        sum += v;
        if v < 1e-18 * sum && x * t.cosh() > nu * t + 50.0 {
            break;
        }
        t += h;
    }
    sum * h
}
