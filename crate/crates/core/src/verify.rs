//! Independent checks: dense finite-section solves, decay-rate fits and a
//! transform-side quadrature for the native-space inner product.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::cardinal::CardinalSystem;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelFamily};
use crate::lattice::{box_points, enumerate_window, LatticeIndex};
use crate::semicardinal::{SemiCardinalSystem, DENSE_CAP};

/// Magnitudes at or below this are treated as round-off in decay fits.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct FiniteSection {
    /// One solution vector per right-hand side, indexed like the window.
    pub solutions: Vec<Vec<f64>>,
    /// `max ‖T c − rhs‖_∞`.
    pub residual: f64,
    /// 1-norm condition estimate of `T`.
    pub condition: f64,
}

fn toeplitz(kernel: &Kernel, window: &[LatticeIndex]) -> DMatrix<f64> {
    let n = window.len();
    let d = kernel.dim();
    let mut diff = vec![0i64; d];
    DMatrix::from_fn(n, n, |i, j| {
        for a in 0..d {
            diff[a] = window[i][a] - window[j][a];
        }
        kernel.lattice_value(&diff)
    })
}

/// Estimate of `‖A⁻¹‖₁` by Hager's method, for symmetric `A` given by its LU solve.
fn inverse_norm1(n: usize, solve: impl Fn(&DVector<f64>) -> Option<DVector<f64>>) -> Option<f64> {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x)?;
        est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve(&xi)?;
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0f64), |(bj, bv), (j, v)| {
            if v.abs() > bv {
                (j, v.abs())
            } else {
                (bj, bv)
            }
        });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[jmax] = 1.0;
    }
    Some(est)
}

/// Solves `[φ(j−k)] c = rhs` on a window by LU with partial pivoting.
pub fn finite_section_solve(kernel: &Kernel, window: &[LatticeIndex], rhs: &[Vec<f64>]) -> Result<FiniteSection> {
    let n = window.len();
    if n > DENSE_CAP {
        return Err(Error::WindowTooLarge { size: n, cap: DENSE_CAP });
    }
    let t = toeplitz(kernel, window);
    let norm1 = (0..n).map(|j| t.column(j).lp_norm(1)).fold(0.0, f64::max);
    let lu = t.clone().lu();
    let inv = inverse_norm1(n, |b| lu.solve(b)).ok_or(Error::IllConditioned(f64::INFINITY))?;
    let condition = norm1 * inv;
    if !condition.is_finite() || condition > 1e14 {
        return Err(Error::IllConditioned(condition));
    }
    let mut solutions = Vec::with_capacity(rhs.len());
    let mut residual = 0.0f64;
    for b in rhs {
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let bv = DVector::from_column_slice(b);
        let c = lu.solve(&bv).ok_or(Error::IllConditioned(condition))?;
        residual = residual.max((&t * &c - &bv).amax());
        solutions.push(c.iter().copied().collect());
    }
    Ok(FiniteSection {
        solutions,
        residual,
        condition,
    })
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `|v| ≈ C (1+r)^{−α}`.
    Algebraic,
    /// `|v| ≈ C e^{−β r}`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub model: DecayModel,
    pub fitted_rate: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub sample_range: (f64, f64),
    pub samples: usize,
    pub verdict: Verdict,
}

/// Least-squares fit of `ln|v|` against `ln(1+r)` or `r`.
///
/// The verdict is `Consistent` when the fitted rate is at least `claimed − slack`
/// (always, when no rate is claimed).
pub fn fit_decay(values: &[(f64, f64)], model: DecayModel, claimed: Option<f64>, slack: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .filter(|(r, v)| r.is_finite() && v.is_finite() && v.abs() > NOISE_FLOOR)
        .map(|&(r, v)| {
            let x = match model {
                DecayModel::Algebraic => (1.0 + r).ln(),
                DecayModel::Exponential => r,
            };
            (x, v.abs().ln())
        })
        .collect();
    if pts.len() < 8 {
        return Err(Error::InsufficientSamples { got: pts.len(), need: 8 });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientSamples { got: 1, need: 8 });
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let rate = -slope;
    let (lo, hi) = values
        .iter()
        .filter(|(_, v)| v.abs() > NOISE_FLOOR)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (r, _)| (a.min(*r), b.max(*r)));
    let verdict = match claimed {
        Some(c) if rate < c - slack => Verdict::Violated,
        _ => Verdict::Consistent,
    };
    Ok(DecayFit {
        model,
        fitted_rate: rate,
        intercept: my - slope * mx,
        r_squared,
        sample_range: (lo, hi),
        samples: pts.len(),
        verdict,
    })
}

/// Trapezoid rule for `(2π)⁻¹ ∫ φ̂(t) Re[e^{−i x₀ t} A(t)] dt` on `|t| ≤ t_max`.
#[derive(Debug, Clone)]
pub struct NativeQuadratureSpec {
    pub kernel: Kernel,
    pub t_max: f64,
    pub step: f64,
}

impl NativeQuadratureSpec {
    /// Range from the transform decay: `φ̂(T) < 1e−12 φ̂(0)` for the Gaussian, `T = 2000` for Matérn.
    pub fn new(kernel: &Kernel) -> Result<Self> {
        if kernel.dim() != 1 || !kernel.positive_definite() {
            return Err(Error::Capability(format!("{} has no supported native quadrature", kernel.label())));
        }
        let t_max = match kernel.family() {
            KernelFamily::Gaussian { c } => (4.0 * c * 28.0f64).sqrt(),
            KernelFamily::Matern { .. } => 2000.0,
            _ => {
                return Err(Error::Capability(format!(
                    "{} has no supported native quadrature",
                    kernel.label()
                )))
            }
        };
        Ok(Self {
            kernel: kernel.clone(),
            t_max,
            step: 0.02,
        })
    }

    pub fn with_step(&self, step: f64) -> Self {
        Self {
            step,
            ..self.clone()
        }
    }

    fn transform(&self, t: f64) -> f64 {
        self.kernel.fourier_transform(&[t]).unwrap_or(0.0)
    }

    /// `(2π)⁻¹ ∫ g(t) dt` by the trapezoid rule, `g` even.
    fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = (self.t_max / self.step).ceil() as usize;
        let h = self.t_max / n as f64;
        let s: f64 = (1..n).map(|i| g(i as f64 * h)).sum();
        h * (g(0.0) + 2.0 * s + g(self.t_max)) / (2.0 * PI)
    }
}

/// Test function `f` in the native space.
#[derive(Debug, Clone, Copy)]
pub enum NativeFunction {
    /// `φ(· − x₀)`.
    Shift(f64),
    /// `χ` itself (cardinal only).
    Lagrange,
}

#[derive(Debug, Clone)]
pub enum IdentityTarget<'a> {
    Cardinal(&'a CardinalSystem),
    SemiCardinal(&'a SemiCardinalSystem, i64),
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    /// Transform-side value of `(f, χ)_φ`.
    pub quadrature: f64,
    /// `Σ_k a_k f(k)`.
    pub series: f64,
    pub residual: f64,
    /// Residual with the step halved.
    pub refined_residual: f64,
}

fn trig_sums(coeffs: &[(i64, f64)], t: f64) -> (f64, f64) {
    coeffs.iter().fold((0.0, 0.0), |(c, s), &(k, a)| {
        let (sk, ck) = (k as f64 * t).sin_cos();
        (c + a * ck, s + a * sk)
    })
}

/// Compares `(f, χ)_φ` computed on the transform side with `Σ_k a_k f(k)`.
pub fn fundamental_identity_check(
    spec: &NativeQuadratureSpec,
    target: IdentityTarget<'_>,
    f: NativeFunction,
) -> Result<IdentityCheck> {
    let coeffs: Vec<(i64, f64)> = match &target {
        IdentityTarget::Cardinal(s) => s.omega().nonzeros().into_iter().map(|(k, a)| (k[0], a)).collect(),
        IdentityTarget::SemiCardinal(s, j) => s
            .lagrange(&[*j])?
            .relative()
            .nonzeros()
            .into_iter()
            .map(|(m, a)| (m[0] + j, a))
            .collect(),
    };
    let kernel = match &target {
        IdentityTarget::Cardinal(s) => s.kernel(),
        IdentityTarget::SemiCardinal(s, _) => &s.kernel,
    };
    if kernel.dim() != 1 || kernel.label() != spec.kernel.label() {
        return Err(Error::Capability("quadrature kernel does not match the system".into()));
    }
    let series: f64 = match f {
        NativeFunction::Shift(x0) => coeffs.iter().map(|&(k, a)| a * kernel.eval_unchecked(&[k as f64 - x0])).sum(),
        NativeFunction::Lagrange => match &target {
            IdentityTarget::Cardinal(s) => coeffs
                .iter()
                .map(|&(k, a)| a * s.chi(&[k as f64]).unwrap_or(0.0))
                .sum(),
            IdentityTarget::SemiCardinal(..) => {
                return Err(Error::Capability("f = χ is supported for the cardinal system only".into()))
            }
        },
    };
    let run = |q: &NativeQuadratureSpec| -> f64 {
        match f {
            NativeFunction::Shift(x0) => q.integrate(|t| {
                let (c, s) = trig_sums(&coeffs, t);
                let (sx, cx) = (x0 * t).sin_cos();
                q.transform(t) * (cx * c + sx * s)
            }),
            NativeFunction::Lagrange => {
                let (body, sq) = (
                    q.integrate(|t| {
                        let (c, _) = trig_sums(&coeffs, t);
                        q.transform(t) * c * c
                    }),
                    coeffs.iter().map(|(_, a)| a * a).sum::<f64>(),
                );
                // beyond T, |ω|² averages to Σ a_k²
                body + 2.0 * sq * transform_tail(&q.kernel, q.t_max) / (2.0 * PI)
            }
        }
    };
    let quadrature = run(spec);
    let refined = run(&spec.with_step(spec.step / 2.0));
    Ok(IdentityCheck {
        quadrature: refined,
        series,
        residual: (quadrature - series).abs(),
        refined_residual: (refined - series).abs(),
    })
}

/// `∫_T^∞ φ̂(t) dt` in closed form where available.
fn transform_tail(kernel: &Kernel, t: f64) -> f64 {
    match kernel.family() {
        KernelFamily::Matern { m } if (*m - 1.0).abs() < 1e-12 => (2.0 * PI).sqrt() * (PI / 2.0 - t.atan()),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    /// Max-abs deviation on interior rows and columns.
    pub deviation: f64,
    pub residual: f64,
    pub condition: f64,
    pub size: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum OracleTarget<'a> {
    Cardinal(&'a CardinalSystem),
    SemiCardinal(&'a SemiCardinalSystem),
}

/// Compares `a_k` (resp. `a_{k,j}`) with finite-section columns on `[−n, n]^d`
/// (resp. `H ∩ [−n, n]^d`), interior indices `‖·‖∞ ≤ n − buffer` only.
pub fn oracle_compare(target: OracleTarget<'_>, n: usize, buffer: usize) -> Result<OracleReport> {
    let (kernel, window) = match target {
        OracleTarget::Cardinal(s) => (s.kernel(), box_points(s.kernel().dim(), n)),
        OracleTarget::SemiCardinal(s) => (&s.kernel, enumerate_window(&s.halfspace, n)),
    };
    let inner = n.saturating_sub(buffer) as i64;
    let interior: Vec<usize> = (0..window.len()).filter(|&i| window[i].norm_inf() <= inner).collect();
    let rhs: Vec<Vec<f64>> = interior.iter().map(|&q| unit(window.len(), q)).collect();
    let fs = finite_section_solve(kernel, &window, &rhs)?;
    let mut deviation = 0.0f64;
    for (col, &q) in fs.solutions.iter().zip(&interior) {
        match target {
            OracleTarget::Cardinal(s) => {
                for &p in &interior {
                    let k: Vec<i64> = window[p].iter().zip(window[q].iter()).map(|(a, b)| a - b).collect();
                    deviation = deviation.max((col[p] - s.coefficient(&k)).abs());
                }
            }
            OracleTarget::SemiCardinal(s) => {
                let exact = s.column(&window[q])?;
                for &p in &interior {
                    deviation = deviation.max((col[p] - exact.get(&window[p])).abs());
                }
            }
        }
    }
    Ok(OracleReport {
        deviation,
        residual: fs.residual,
        condition: fs.condition,
        size: window.len(),
    })
}
