//! Evaluation of shift expansions `s(x) = Σ_k c_k φ(x−k)`.

use crate::error::{check_dim, Error, Result};
use crate::kernels::Kernel;
use crate::symbols::{multiply, SymbolCoefficients};

/// `Σ_k c_k φ(x−k)` at one point.
pub fn eval_expansion(kernel: &Kernel, coeffs: &SymbolCoefficients, x: &[f64]) -> Result<f64> {
    check_dim(kernel.dim(), x.len())?;
    check_dim(kernel.dim(), coeffs.dim())?;
    let d = x.len();
    if !kernel.full_eval() {
        if x.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Capability(format!(
                "{} can only be evaluated at lattice points",
                kernel.label()
            )));
        }
        let xi: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        let mut diff = vec![0i64; d];
        let mut s = 0.0;
        coeffs.for_each(|k, c| {
            if c != 0.0 {
                for a in 0..d {
                    diff[a] = xi[a] - k[a];
                }
                s += c * kernel.lattice_value(&diff);
            }
        });
        return Ok(s);
    }
    let reach = kernel.support_radius();
    let mut y = vec![0.0; d];
    let mut s = 0.0;
    coeffs.for_each(|k, c| {
        if c != 0.0 {
            for a in 0..d {
                y[a] = x[a] - k[a] as f64;
            }
            if let Some(r) = reach {
                if y.iter().any(|v| v.abs() >= r) {
                    return;
                }
            }
            s += c * kernel.eval_unchecked(&y);
        }
    });
    Ok(s)
}

/// Values `v(n) = Σ_k c_k φ(f + n − k)` for `‖n‖∞ ≤ out_radius` on the coset `f + Z^d`.
///
/// Exact replica of the pointwise sums, computed as one convolution.
pub fn coset_values(
    kernel: &Kernel,
    coeffs: &SymbolCoefficients,
    frac: &[f64],
    out_radius: usize,
) -> Result<SymbolCoefficients> {
    check_dim(kernel.dim(), frac.len())?;
    let lattice = frac.iter().all(|v| *v == 0.0);
    if !kernel.full_eval() && !lattice {
        return Err(Error::Capability(format!(
            "{} can only be evaluated at lattice points",
            kernel.label()
        )));
    }
    let p = out_radius + coeffs.radius();
    let d = kernel.dim();
    let mut y = vec![0.0; d];
    let phi = SymbolCoefficients::from_fn(d, p, |m| {
        if lattice {
            kernel.lattice_value(m)
        } else {
            for a in 0..d {
                y[a] = frac[a] + m[a] as f64;
            }
            kernel.eval_unchecked(&y)
        }
    });
    Ok(multiply(coeffs, &phi)?.with_radius(out_radius))
}

/// Flattened sample points of a box `[lo, hi]^d` with the given step.
pub fn sample_grid(d: usize, lo: f64, hi: f64, step: f64) -> Vec<Vec<f64>> {
    let n = ((hi - lo) / step).round() as usize + 1;
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut i| {
            let mut x = vec![0.0; d];
            for a in (0..d).rev() {
                x[a] = lo + (i % n) as f64 * step;
                i /= n;
            }
            x
        })
        .collect()
}

/// Splits points by their fractional part so that each coset needs one convolution.
pub(crate) fn group_by_coset(points: &[Vec<f64>]) -> Vec<(Vec<f64>, Vec<(usize, Vec<i64>)>)> {
    let mut groups: Vec<(Vec<f64>, Vec<(usize, Vec<i64>)>)> = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let n: Vec<i64> = x.iter().map(|v| v.floor() as i64).collect();
        let f: Vec<f64> = x.iter().zip(&n).map(|(v, k)| v - *k as f64).collect();
        match groups.iter_mut().find(|(g, _)| g.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-12)) {
            Some((_, members)) => members.push((i, n)),
            None => groups.push((f, vec![(i, n)])),
        }
    }
    groups
}

/// Evaluates an expansion at many points, grouping by lattice coset.
pub fn eval_expansion_many(
    kernel: &Kernel,
    coeffs: &SymbolCoefficients,
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; points.len()];
    for (f, members) in group_by_coset(points) {
        let r = members
            .iter()
            .map(|(_, n)| n.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let v = coset_values(kernel, coeffs, &f, r)?;
        for (i, n) in members {
            out[i] = v.get(&n);
        }
    }
    Ok(out)
}
