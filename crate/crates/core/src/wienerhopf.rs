//! Wiener-Hopf factorization `1/σ = ω₊(ζ) ω₊(ζ⁻¹)` with `ω₊` supported on a half-space.
//!
//! Pipeline: `λ = log(1/σ)` on the grid, `Λ₊` = half-space part of `λ`
//! (boundary weight 1/2), `ω₊ = exp(Λ₊)`, then projection onto `H`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::HalfSpace;
use crate::symbols::{from_grid, grid_eval, multiply, SymbolCoefficients, TorusGrid, POSITIVITY_FLOOR};

/// How `exp(Λ₊)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpMode {
    /// Pointwise exponential on the torus grid.
    #[default]
    Grid,
    /// Power series with half-space-supported convolutions in coefficient space.
    PowerSeries,
}

#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Points per axis of the torus grid.
    pub grid_size: usize,
    pub positivity_floor: f64,
    pub residual_tolerance: f64,
    pub leak_tolerance: f64,
    /// Coefficients below this fraction of the Wiener norm are trimmed from the box edge.
    pub trim_tolerance: f64,
    pub mode: ExpMode,
}

/// Smallest power of two not below `8N`.
pub fn default_grid_size(symbol_radius: usize) -> usize {
    (8 * symbol_radius.max(1)).next_power_of_two()
}

impl FactorConfig {
    pub fn for_radius(symbol_radius: usize) -> Self {
        Self::with_grid(default_grid_size(symbol_radius))
    }

    pub fn with_grid(grid_size: usize) -> Self {
        Self {
            grid_size,
            positivity_floor: POSITIVITY_FLOOR,
            residual_tolerance: 1e-7,
            leak_tolerance: 1e-7,
            trim_tolerance: 1e-17,
            mode: ExpMode::Grid,
        }
    }

    /// Largest coefficient radius the grid resolves.
    pub fn coefficient_radius(&self) -> usize {
        (self.grid_size - 1) / 2
    }
}

#[derive(Debug, Clone)]
pub struct WienerHopfFactor {
    pub halfspace: HalfSpace,
    /// `γ_k`, zero outside `H`.
    pub gamma: SymbolCoefficients,
    /// `Λ₊`, the half-space part of `log(1/σ)`.
    pub lambda_plus: SymbolCoefficients,
    /// `λ₀`, so that `γ₀ = exp(λ₀/2)`.
    pub lambda0: f64,
    /// `sup |ω − ω₊(ζ)ω₊(ζ⁻¹)|` over the grid.
    pub factorization_residual: f64,
    /// `Σ_{k∉H} |raw exp(Λ₊) coefficients| / ‖γ‖_W`.
    pub support_leak: f64,
    /// Worst relative mass dropped by grid-to-coefficient truncations.
    pub tail_mass: f64,
    pub grid_size: usize,
    pub symbol_min: f64,
}

impl WienerHopfFactor {
    pub fn gamma0(&self) -> f64 {
        self.gamma.get(&vec![0; self.gamma.dim()])
    }

    pub fn wiener_norm(&self) -> f64 {
        self.gamma.wiener_norm()
    }

    /// `Σ_{l ≻ j} |γ_l|` for ordered `H`; for coordinate `H` the sum over `l_p > j_p`.
    pub fn tail_beyond(&self, j: &[i64]) -> f64 {
        let mut s = 0.0;
        match &self.halfspace {
            HalfSpace::Ordered { order, .. } => self.gamma.for_each(|l, v| {
                if v != 0.0 && order.cmp_raw(l, j) == std::cmp::Ordering::Greater {
                    s += v.abs();
                }
            }),
            HalfSpace::Coordinate { axis, .. } => {
                let p = axis - 1;
                self.gamma.for_each(|l, v| {
                    if l[p] > j[p] {
                        s += v.abs();
                    }
                })
            }
        }
        s
    }
}

/// `Λ₊` from symmetric `λ`: half weight on the boundary slab (coordinate) or at 0 (ordered).
pub fn split_plus(lambda: &SymbolCoefficients, h: &HalfSpace) -> Result<SymbolCoefficients> {
    crate::error::check_dim(h.dim(), lambda.dim())?;
    let scale = lambda.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let defect = lambda.symmetry_defect();
    if defect > 1e-10 * scale {
        return Err(Error::Asymmetric(defect));
    }
    Ok(SymbolCoefficients::from_fn(lambda.dim(), lambda.radius(), |k| {
        let v = lambda.get(k);
        match h {
            HalfSpace::Coordinate { axis, .. } => match k[axis - 1] {
                0 => 0.5 * v,
                c if c > 0 => v,
                _ => 0.0,
            },
            HalfSpace::Ordered { order, .. } => {
                if k.iter().all(|&c| c == 0) {
                    0.5 * v
                } else if order.is_nonnegative(k) {
                    v
                } else {
                    0.0
                }
            }
        }
    }))
}

/// Zeroes coefficients outside `H`; returns the field and the removed mass.
pub fn project_to_halfspace(u: &SymbolCoefficients, h: &HalfSpace) -> (SymbolCoefficients, f64) {
    let mut leak = 0.0;
    let mut out = u.clone();
    let mut k = vec![0i64; u.dim()];
    for (o, v) in out.values_mut().iter_mut().enumerate() {
        k.copy_from_slice(&u.index_of(o));
        if !h.contains_raw(&k) {
            leak += v.abs();
            *v = 0.0;
        }
    }
    (out, leak)
}

fn exp_series(lp: &SymbolCoefficients, radius: usize) -> Result<SymbolCoefficients> {
    let mut term = SymbolCoefficients::delta(lp.dim()).with_radius(radius);
    let mut sum = term.clone();
    for n in 1..200 {
        term = multiply(&term, lp)?.with_radius(radius).scaled(1.0 / n as f64);
        for (s, t) in sum.values_mut().iter_mut().zip(term.values()) {
            *s += t;
        }
        if term.wiener_norm() < 1e-18 * sum.wiener_norm() {
            break;
        }
    }
    Ok(sum)
}

fn sup_residual(omega: &TorusGrid, gamma: &SymbolCoefficients) -> Result<f64> {
    let wp = grid_eval(gamma, omega.size())?;
    Ok(omega
        .values()
        .iter()
        .zip(wp.values())
        .map(|(w, p)| (w.re - p.norm_sqr()).abs())
        .fold(0.0, f64::max))
}

/// Factorizes `1/σ` relative to `H`.
pub fn factorize(sigma: &SymbolCoefficients, h: &HalfSpace, cfg: &FactorConfig) -> Result<WienerHopfFactor> {
    crate::error::check_dim(h.dim(), sigma.dim())?;
    let m = cfg.grid_size;
    if m < 2 * sigma.side() {
        return Err(Error::GridTooSmall { grid: m, radius: sigma.radius() });
    }
    let radius = cfg.coefficient_radius();
    let sg = grid_eval(sigma, m)?;
    let symbol_min = sg.min_real();
    if !(symbol_min > cfg.positivity_floor) {
        return Err(Error::SymbolNotPositive {
            min: symbol_min,
            floor: cfg.positivity_floor,
            grid: m,
        });
    }
    let omega = sg.map(|z| Complex64::new(1.0 / z.re, 0.0));
    let lam = from_grid(&omega.map(|z| Complex64::new(z.re.ln(), 0.0)), radius)?;
    let lambda = lam.coeffs;
    let lambda0 = lambda.get(&vec![0; sigma.dim()]);
    let lp = split_plus(&lambda, h)?;

    let (raw, tail) = match cfg.mode {
        ExpMode::Grid => {
            let g = grid_eval(&lp, m)?;
            let t = from_grid(&g.map(|z| z.exp()), radius)?;
            (t.coeffs, t.tail_mass)
        }
        ExpMode::PowerSeries => {
            let lpt = lp.trimmed(cfg.trim_tolerance);
            (exp_series(&lpt, radius)?, 0.0)
        }
    };
    let (gamma, leak) = project_to_halfspace(&raw, h);
    let norm = gamma.wiener_norm();
    let support_leak = leak / norm;
    let gamma = gamma.trimmed(cfg.trim_tolerance);

    let residual = sup_residual(&omega, &gamma)?;
    let factor = WienerHopfFactor {
        halfspace: h.clone(),
        gamma,
        lambda_plus: lp.trimmed(cfg.trim_tolerance),
        lambda0,
        factorization_residual: residual,
        support_leak,
        tail_mass: lam.tail_mass.max(tail),
        grid_size: m,
        symbol_min,
    };
    if !(factor.gamma0() > 0.0) {
        return Err(Error::Domain(format!("gamma_0 = {} is not positive", factor.gamma0())));
    }
    if support_leak > cfg.leak_tolerance {
        return Err(Error::LeakTooLarge {
            leak: support_leak,
            tolerance: cfg.leak_tolerance,
        });
    }
    if !(residual <= cfg.residual_tolerance) {
        return Err(Error::ResidualTooLarge {
            residual,
            tolerance: cfg.residual_tolerance,
        });
    }
    Ok(factor)
}

#[derive(Debug, Clone, Copy)]
pub struct FactorizationReport {
    /// `sup |1/σ − |ω₊|²|` on the requested grid.
    pub residual: f64,
    /// `‖ω‖_W` from the grid reciprocal.
    pub omega_wiener: f64,
    /// `‖ω₊‖_W²`, an upper bound for `‖ω‖_W`.
    pub omega_plus_wiener_sq: f64,
    /// Whether `Λ₊(ζ) + Λ₊(ζ⁻¹) = log ω` held on the grid.
    pub log_split_defect: f64,
}

impl FactorizationReport {
    pub fn wiener_consistent(&self) -> bool {
        self.omega_wiener <= self.omega_plus_wiener_sq * (1.0 + 1e-9) + 1e-12
    }
}

pub fn verify_factorization(
    sigma: &SymbolCoefficients,
    factor: &WienerHopfFactor,
    m: usize,
) -> Result<FactorizationReport> {
    let radius = (m - 1) / 2;
    let sg = grid_eval(sigma, m)?;
    let omega = sg.map(|z| Complex64::new(1.0 / z.re, 0.0));
    let residual = sup_residual(&omega, &factor.gamma.with_radius(factor.gamma.radius().min(radius)))?;
    let omega_w = from_grid(&omega, radius)?.coeffs.wiener_norm();
    let lpg = grid_eval(&factor.lambda_plus.with_radius(factor.lambda_plus.radius().min(radius)), m)?;
    let n = lpg.values().len();
    let d = sigma.dim();
    // Λ₊(ζ⁻¹) = conj Λ₊(ζ) for real coefficients
    let log_split_defect = (0..n)
        .map(|i| {
            let _ = d;
            (2.0 * lpg.values()[i].re - omega.values()[i].re.ln()).abs()
        })
        .fold(0.0, f64::max);
    Ok(FactorizationReport {
        residual,
        omega_wiener: omega_w,
        omega_plus_wiener_sq: factor.gamma.wiener_norm().powi(2),
        log_split_defect,
    })
}

/// Coefficients `γ̃` of `ω₊⁻¹ = exp(−Λ₊)`, supported on `H`.
pub fn inverse_plus(factor: &WienerHopfFactor, cfg: &FactorConfig) -> Result<SymbolCoefficients> {
    let m = cfg.grid_size.max(factor.grid_size);
    let radius = (m - 1) / 2;
    let lp = factor.lambda_plus.with_radius(factor.lambda_plus.radius().min(radius));
    let g = grid_eval(&lp, m)?;
    let raw = from_grid(&g.map(|z| (-z).exp()), radius)?.coeffs;
    let (inv, _) = project_to_halfspace(&raw, &factor.halfspace);
    Ok(inv.trimmed(cfg.trim_tolerance))
}
