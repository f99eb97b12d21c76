//! Cardinal interpolation on `Z^d`: coefficients `a_k` of `1/σ`, the Lagrange
//! function `χ = Σ a_k φ(·−k)`, data interpolation and the Lebesgue constant.

use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::expansion::{coset_values, eval_expansion, eval_expansion_many};
use crate::kernels::{cell_points, decay_truncation_radius, Kernel};
use crate::symbols::{multiply, reciprocal, symbol_from_kernel, SymbolCoefficients};
use crate::wienerhopf::FactorConfig;

/// Radii and tolerances shared by the cardinal and semi-cardinal engines.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    /// Radius `N` of the sampled symbol `σ`.
    pub symbol_radius: usize,
    pub factor: FactorConfig,
    /// Tail target for the Lagrange evaluation radius.
    pub eval_tail: f64,
}

impl SystemConfig {
    /// Default grid: smallest power of two `≥ 8N`.
    pub fn new(symbol_radius: usize) -> Self {
        Self {
            symbol_radius,
            factor: FactorConfig::for_radius(symbol_radius),
            eval_tail: 1e-10,
        }
    }

    pub fn with_grid(symbol_radius: usize, grid_size: usize) -> Self {
        Self {
            symbol_radius,
            factor: FactorConfig::with_grid(grid_size),
            eval_tail: 1e-10,
        }
    }
}

/// Cap on the lattice-sum radius used for `|φ|_∞`.
pub fn shift_sum_radius(kernel: &Kernel) -> usize {
    if let Some(s) = kernel.support_radius() {
        return s.ceil() as usize + 1;
    }
    let cap = if kernel.dim() == 1 { 4096 } else { 96 };
    // go past the lattice cutoff until the analytic remainder is negligible too
    let d = kernel.dim();
    let mut r = decay_truncation_radius(kernel, 1e-13, cap);
    while r < cap && kernel.decay().tail_beyond(d, r) > 1e-14 {
        r += 1;
    }
    r
}

#[derive(Debug, Clone)]
pub struct CardinalSystem {
    kernel: Kernel,
    sigma: SymbolCoefficients,
    omega: SymbolCoefficients,
    omega_wiener: f64,
    eval_radius: usize,
    tail_mass: f64,
    grid_size: usize,
}

/// Smallest `R` with `Σ_{‖k‖∞>R} |u_k| · scale < tol`.
pub(crate) fn tail_radius(u: &SymbolCoefficients, scale: f64, tol: f64) -> usize {
    let mut shells = vec![0.0f64; u.radius() + 1];
    u.for_each(|k, v| {
        let s = k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
        shells[s] += v.abs();
    });
    let mut tail = 0.0;
    let mut r = u.radius();
    while r > 0 && (tail + shells[r]) * scale < tol {
        tail += shells[r];
        r -= 1;
    }
    r
}

pub fn build_cardinal(kernel: &Kernel, cfg: &SystemConfig) -> Result<CardinalSystem> {
    let samples = kernel.lattice_samples(cfg.symbol_radius);
    let sigma = symbol_from_kernel(&samples.field)?;
    let m = cfg.factor.grid_size;
    let full = reciprocal(&sigma, m, cfg.factor.coefficient_radius(), cfg.factor.positivity_floor)?;
    // ω is even; enforce it exactly against FFT round-off
    let sym = full.coeffs.reflected();
    let mut omega_full = full.coeffs.clone();
    for (v, w) in omega_full.values_mut().iter_mut().zip(sym.values()) {
        *v = 0.5 * (*v + w);
    }
    let omega_full = omega_full.trimmed(cfg.factor.trim_tolerance);
    let omega_wiener = omega_full.wiener_norm();
    let eval_radius = tail_radius(&omega_full, sigma.wiener_norm(), cfg.eval_tail);
    Ok(CardinalSystem {
        kernel: kernel.clone(),
        omega: omega_full.with_radius(eval_radius),
        sigma,
        omega_wiener,
        eval_radius,
        tail_mass: full.tail_mass,
        grid_size: m,
    })
}

impl CardinalSystem {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn sigma(&self) -> &SymbolCoefficients {
        &self.sigma
    }

    /// The `a_k` used for evaluation (cropped to the evaluation radius).
    pub fn omega(&self) -> &SymbolCoefficients {
        &self.omega
    }

    /// `‖ω‖_W` before cropping.
    pub fn omega_wiener(&self) -> f64 {
        self.omega_wiener
    }

    pub fn eval_radius(&self) -> usize {
        self.eval_radius
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn coefficient(&self, k: &[i64]) -> f64 {
        self.omega.get(k)
    }

    /// `χ(x)`.
    pub fn chi(&self, x: &[f64]) -> Result<f64> {
        eval_expansion(&self.kernel, &self.omega, x)
    }

    pub fn chi_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        eval_expansion_many(&self.kernel, &self.omega, points)
    }

    /// `max_{‖j‖∞ ≤ r} |χ(j) − δ_{j0}|`.
    pub fn delta_defect(&self, r: usize) -> Result<f64> {
        let d = self.kernel.dim();
        let v = coset_values(&self.kernel, &self.omega, &vec![0.0; d], r)?;
        let mut worst = 0.0f64;
        v.for_each(|k, x| {
            let want = if k.iter().all(|&c| c == 0) { 1.0 } else { 0.0 };
            worst = worst.max((x - want).abs());
        });
        Ok(worst)
    }

    /// Interpolant of data on a window, extended by `policy`.
    pub fn interpolate(&self, data: &SymbolCoefficients, policy: Extension) -> Result<CardinalInterpolant> {
        check_dim(self.kernel.dim(), data.dim())?;
        let y = match policy {
            Extension::Zero => data.clone(),
            Extension::Periodic => {
                let side = data.side() as i64;
                let r = data.radius() as i64;
                let ext = data.radius() + self.eval_radius + self.kernel.support_radius().map_or(8, |s| s.ceil() as usize);
                SymbolCoefficients::from_fn(data.dim(), ext, |k| {
                    let w: Vec<i64> = k.iter().map(|&c| (c + r).rem_euclid(side) - r).collect();
                    data.get(&w)
                })
            }
        };
        let c = multiply(&self.omega, &y)?;
        Ok(CardinalInterpolant {
            system: self.clone(),
            data: y,
            coeffs: c,
        })
    }

    /// Sampled Lebesgue function maximum with the analytic bound `‖ω‖_W · |φ|_∞`.
    pub fn lebesgue_estimate(&self, grid_per_cell: usize) -> Result<LebesgueEstimate> {
        let phi_sup = self.kernel.shift_sum_sup(grid_per_cell, shift_sum_radius(&self.kernel))?;
        let d = self.kernel.dim();
        let g = grid_per_cell.max(2);
        // Σ_j |χ(x−j)| is even and 1-periodic in each coordinate
        let pts: Vec<Vec<f64>> = cell_points(d, g)
            .into_iter()
            .filter(|x| x.iter().all(|&v| v <= 0.5 + 1e-12))
            .collect();
        let out_r = self.omega.radius() + self.kernel.support_radius().map_or(0, |s| s.ceil() as usize);
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|x| coset_values(&self.kernel, &self.omega, x, out_r).map(|v| v.wiener_norm()))
            .collect::<Result<_>>()?;
        let estimate = vals.into_iter().fold(0.0, f64::max);
        let w = self.omega.wiener_norm();
        Ok(LebesgueEstimate {
            estimate,
            bound: w * phi_sup,
            omega_wiener: w,
            phi_shift_sup: phi_sup,
        })
    }
}

/// How finite data windows are continued to all of `Z^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    #[default]
    Zero,
    Periodic,
}

#[derive(Debug, Clone)]
pub struct CardinalInterpolant {
    system: CardinalSystem,
    data: SymbolCoefficients,
    coeffs: SymbolCoefficients,
}

impl CardinalInterpolant {
    /// `c = a ∗ y`.
    pub fn coefficients(&self) -> &SymbolCoefficients {
        &self.coeffs
    }

    /// `Σ_k c_k φ(x−k)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        eval_expansion(&self.system.kernel, &self.coeffs, x)
    }

    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        eval_expansion_many(&self.system.kernel, &self.coeffs, points)
    }

    /// `Σ_j y_j χ(x−j)`.
    pub fn eval_lagrange(&self, x: &[f64]) -> Result<f64> {
        let mut s = 0.0;
        let mut y = vec![0.0; x.len()];
        for (j, v) in self.data.nonzeros() {
            for a in 0..x.len() {
                y[a] = x[a] - j[a] as f64;
            }
            s += v * self.system.chi(&y)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LebesgueEstimate {
    /// Max of `Σ_j |χ(x−j)|` over the sampled cell (a lower estimate of the constant).
    pub estimate: f64,
    /// `‖ω‖_W · |φ|_∞`.
    pub bound: f64,
    pub omega_wiener: f64,
    pub phi_shift_sup: f64,
}

pub fn chi_eval(sys: &CardinalSystem, x: &[f64]) -> Result<f64> {
    sys.chi(x)
}

pub fn cardinal_interpolate(sys: &CardinalSystem, data: &SymbolCoefficients, x: &[f64]) -> Result<f64> {
    sys.interpolate(data, Extension::Zero)?.eval(x)
}

pub fn lebesgue_estimate(sys: &CardinalSystem, grid_per_cell: usize) -> Result<LebesgueEstimate> {
    sys.lebesgue_estimate(grid_per_cell)
}
