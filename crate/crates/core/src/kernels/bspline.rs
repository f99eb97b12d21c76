//! Centered cardinal B-splines.

/// `M_n(x)`, the centered B-spline of order `n` supported on `[-n/2, n/2]`.
pub fn bspline_eval(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let h = n as f64 / 2.0;
    let x = x.abs();
    if x >= h {
        return 0.0;
    }
    // uncentered N_n(y), knots 0..n, y in [i, i+1)
    let y = x + h;
    let i = (y.floor() as usize).min(n - 1);
    // b[r] holds N_{k,j} with left knot j = i - (n-1) + r
    let mut b = vec![0.0f64; n];
    b[n - 1] = 1.0;
    for k in 2..=n {
        let kf = (k - 1) as f64;
        for r in (n - k)..n {
            let j = i as f64 - (n - 1) as f64 + r as f64;
            let left = (y - j) * b[r];
            let right = if r + 1 < n { (j + k as f64 - y) * b[r + 1] } else { 0.0 };
            b[r] = (left + right) / kf;
        }
    }
    b[n - 1 - i]
}
