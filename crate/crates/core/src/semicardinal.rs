//! Semi-cardinal interpolation on a half-space lattice `H`.
//!
//! With `γ` the coefficients of `ω₊`, the inverse of the Toeplitz matrix
//! `[φ(j−k)]_{j,k∈H}` is `G Gᵀ` with `G = [γ_{k−l}]`, so
//! `a_{k,j} = Σ_{l∈H} γ_{k−l} γ_{j−l}`.

use rayon::prelude::*;

use crate::cardinal::{tail_radius, SystemConfig};
use crate::error::{check_dim, Error, Result};
use crate::expansion::{eval_expansion, eval_expansion_many};
use crate::kernels::Kernel;
use crate::lattice::{enumerate_window, HalfSpace, LatticeIndex};
use crate::symbols::{multiply, symbol_from_kernel, SymbolCoefficients};
use crate::wienerhopf::{factorize, WienerHopfFactor};

/// Default cap on the number of unknowns in dense checks.
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct SemiCardinalSystem {
    pub kernel: Kernel,
    pub halfspace: HalfSpace,
    pub factor: WienerHopfFactor,
    pub sigma: SymbolCoefficients,
    /// Radius of the `γ` box.
    pub working_radius: usize,
    /// Half-width of the stored Lagrange columns around `j` is twice this.
    eval_radius: usize,
}

pub fn build_semicardinal(kernel: &Kernel, h: &HalfSpace, cfg: &SystemConfig) -> Result<SemiCardinalSystem> {
    check_dim(kernel.dim(), h.dim())?;
    let samples = kernel.lattice_samples(cfg.symbol_radius);
    let sigma = symbol_from_kernel(&samples.field)?;
    let factor = factorize(&sigma, h, &cfg.factor)?;
    SemiCardinalSystem::from_factor(kernel, sigma, factor, cfg)
}

fn require_in(h: &HalfSpace, j: &[i64]) -> Result<()> {
    check_dim(h.dim(), j.len())?;
    if !h.contains_raw(j) {
        return Err(Error::NotInHalfSpace(j.to_vec()));
    }
    Ok(())
}

impl SemiCardinalSystem {
    /// Assembles a system around an existing factor, e.g. one loaded from a cache.
    pub fn from_factor(
        kernel: &Kernel,
        sigma: SymbolCoefficients,
        factor: WienerHopfFactor,
        cfg: &SystemConfig,
    ) -> Result<Self> {
        check_dim(kernel.dim(), factor.halfspace.dim())?;
        let h = factor.halfspace.clone();
        let gw = factor.gamma.wiener_norm();
        // Σ_{‖k−j‖>2ρ} |a_{k,j}| ≤ 2‖γ‖_W · Σ_{‖l‖>ρ} |γ_l|
        let eval_radius = tail_radius(&factor.gamma, 2.0 * gw * sigma.wiener_norm(), cfg.eval_tail);
        Ok(Self {
            kernel: kernel.clone(),
            halfspace: h,
            working_radius: factor.gamma.radius(),
            factor,
            sigma,
            eval_radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn gamma(&self) -> &SymbolCoefficients {
        &self.factor.gamma
    }

    pub fn eval_radius(&self) -> usize {
        self.eval_radius
    }

    /// `a_{k,j}` by direct summation over `l ∈ H` in row-major order.
    pub fn coefficient(&self, k: &[i64], j: &[i64]) -> Result<f64> {
        require_in(&self.halfspace, k)?;
        require_in(&self.halfspace, j)?;
        let g = &self.factor.gamma;
        let r = g.radius() as i64;
        let d = k.len();
        let lo: Vec<i64> = (0..d).map(|a| k[a].max(j[a]) - r).collect();
        let hi: Vec<i64> = (0..d).map(|a| k[a].min(j[a]) + r).collect();
        if (0..d).any(|a| lo[a] > hi[a]) {
            return Ok(0.0);
        }
        let mut l = lo.clone();
        let mut u = vec![0i64; d];
        let mut v = vec![0i64; d];
        let mut s = 0.0;
        loop {
            if self.halfspace.contains_raw(&l) {
                for a in 0..d {
                    u[a] = k[a] - l[a];
                    v[a] = j[a] - l[a];
                }
                s += g.get(&u) * g.get(&v);
            }
            let mut a = d;
            loop {
                if a == 0 {
                    return Ok(s);
                }
                a -= 1;
                if l[a] < hi[a] {
                    l[a] += 1;
                    break;
                }
                l[a] = lo[a];
            }
        }
    }

    /// The column `k ↦ a_{k,j}` over all of `H`, as `γ ∗ t_j` with `t_j(l) = γ_{j−l}` on `H`.
    pub fn column(&self, j: &[i64]) -> Result<SymbolCoefficients> {
        require_in(&self.halfspace, j)?;
        let g = &self.factor.gamma;
        let rj = j.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
        let mut diff = vec![0i64; j.len()];
        let t = SymbolCoefficients::from_fn(j.len(), rj + g.radius(), |l| {
            if !self.halfspace.contains_raw(l) {
                return 0.0;
            }
            for a in 0..l.len() {
                diff[a] = j[a] - l[a];
            }
            g.get(&diff)
        });
        multiply(g, &t)
    }

    /// `χ_j`, stored relative to `j`.
    pub fn lagrange(&self, j: &[i64]) -> Result<SemiCardinalLagrange> {
        let col = self.column(j)?;
        let w = 2 * self.eval_radius;
        let mut k = vec![0i64; j.len()];
        let rel = SymbolCoefficients::from_fn(j.len(), w, |m| {
            for a in 0..m.len() {
                k[a] = j[a] + m[a];
            }
            col.get(&k)
        });
        Ok(SemiCardinalLagrange {
            kernel: self.kernel.clone(),
            j: j.to_vec(),
            rel,
        })
    }

    /// Interpolant of data given on a finite window of `H` (zero elsewhere).
    pub fn interpolate(&self, data: &SymbolCoefficients) -> Result<SemiCardinalInterpolant> {
        check_dim(self.dim(), data.dim())?;
        for (j, v) in data.nonzeros() {
            if v != 0.0 && !self.halfspace.contains_raw(&j) {
                return Err(Error::NotInHalfSpace(j));
            }
        }
        let g = &self.factor.gamma;
        // w_l = Σ_j γ_{j−l} y_j on H, then c = γ ∗ w
        let mut w = multiply(&g.reflected(), data)?;
        let r = w.radius();
        let d = self.dim();
        for (off, v) in w.values_mut().iter_mut().enumerate() {
            let l = index_in_box(off, d, r);
            if !self.halfspace.contains_raw(&l) {
                *v = 0.0;
            }
        }
        let coeffs = multiply(g, &w)?;
        Ok(SemiCardinalInterpolant {
            system: self.clone(),
            data: data.clone(),
            coeffs,
        })
    }

    /// `max_j Σ_k |a_{k,j}|` over the probe window.
    pub fn schur_norm(&self, window: &[LatticeIndex]) -> Result<f64> {
        let norms: Vec<f64> = window
            .par_iter()
            .map(|j| self.column(j).map(|c| c.wiener_norm()))
            .collect::<Result<_>>()?;
        Ok(norms.into_iter().fold(0.0, f64::max))
    }

    /// Check of `T · (G Gᵀ) = I` on the interior of `H ∩ [−n, n]^d`. Rows of `T`
    /// run over all of `H` (the symbol coefficients used for the factorization),
    /// so only the tested pairs are limited to the window.
    pub fn cholesky_residual(&self, n: usize, buffer: usize, cap: usize) -> Result<CholeskyReport> {
        let w = enumerate_window(&self.halfspace, n);
        if w.len() > cap {
            return Err(Error::WindowTooLarge { size: w.len(), cap });
        }
        let inner = n.saturating_sub(buffer) as i64;
        let interior: Vec<&LatticeIndex> = w.iter().filter(|p| p.norm_inf() <= inner).collect();
        let d = self.dim();
        let mut stencil: Vec<(Vec<i64>, f64)> = Vec::new();
        self.sigma.for_each(|k, v| {
            if v != 0.0 {
                stencil.push((k.to_vec(), v));
            }
        });
        let rows: Vec<f64> = interior
            .par_iter()
            .map(|q| -> Result<f64> {
                // columns of G Gᵀ are supported on H; only the tested rows of σ ∗ column are formed
                let col = self.column(q)?;
                let mut at = vec![0i64; d];
                let mut worst = 0.0f64;
                for p in &interior {
                    let mut tc = 0.0;
                    for (s, v) in &stencil {
                        for a in 0..d {
                            at[a] = p[a] - s[a];
                        }
                        tc += v * col.get(&at);
                    }
                    let want = if p == q { 1.0 } else { 0.0 };
                    worst = worst.max((tc - want).abs());
                }
                Ok(worst)
            })
            .collect::<Result<_>>()?;
        let mut violations = 0usize;
        let mut diff = vec![0i64; d];
        for p in &w {
            for q in &w {
                for a in 0..d {
                    diff[a] = p[a] - q[a];
                }
                if !self.halfspace.contains_raw(&diff) && self.factor.gamma.get(&diff) != 0.0 {
                    violations += 1;
                }
            }
        }
        Ok(CholeskyReport {
            residual: rows.into_iter().fold(0.0, f64::max),
            triangular_violations: violations,
            size: w.len(),
            interior: interior.len(),
        })
    }
}

fn index_in_box(mut off: usize, d: usize, r: usize) -> Vec<i64> {
    let side = 2 * r + 1;
    let mut k = vec![0i64; d];
    for a in (0..d).rev() {
        k[a] = (off % side) as i64 - r as i64;
        off /= side;
    }
    k
}

#[derive(Debug, Clone, Copy)]
pub struct CholeskyReport {
    /// Max-abs entry of `T·A − I` over interior rows and columns.
    pub residual: f64,
    /// Pairs `p, q` with `p − q ∉ H` but `γ_{p−q} ≠ 0`.
    pub triangular_violations: usize,
    pub size: usize,
    pub interior: usize,
}

/// `χ_j(x) = Σ_k a_{k,j} φ(x−k)`.
#[derive(Debug, Clone)]
pub struct SemiCardinalLagrange {
    kernel: Kernel,
    j: Vec<i64>,
    /// `m ↦ a_{j+m, j}`.
    rel: SymbolCoefficients,
}

impl SemiCardinalLagrange {
    pub fn center(&self) -> &[i64] {
        &self.j
    }

    pub fn coefficient(&self, k: &[i64]) -> f64 {
        let m: Vec<i64> = k.iter().zip(&self.j).map(|(a, b)| a - b).collect();
        self.rel.get(&m)
    }

    /// Coefficients `m ↦ a_{j+m,j}`.
    pub fn relative(&self) -> &SymbolCoefficients {
        &self.rel
    }

    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.j).map(|(a, b)| a - *b as f64).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.j.len(), x.len())?;
        eval_expansion(&self.kernel, &self.rel, &self.shifted(x))
    }

    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let pts: Vec<Vec<f64>> = points.iter().map(|x| self.shifted(x)).collect();
        eval_expansion_many(&self.kernel, &self.rel, &pts)
    }
}

#[derive(Debug, Clone)]
pub struct SemiCardinalInterpolant {
    system: SemiCardinalSystem,
    data: SymbolCoefficients,
    coeffs: SymbolCoefficients,
}

impl SemiCardinalInterpolant {
    /// `c_k = Σ_j a_{k,j} y_j`.
    pub fn coefficients(&self) -> &SymbolCoefficients {
        &self.coeffs
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        eval_expansion(&self.system.kernel, &self.coeffs, x)
    }

    pub fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        eval_expansion_many(&self.system.kernel, &self.coeffs, points)
    }

    /// `Σ_j y_j χ_j(x)` at many points.
    pub fn eval_lagrange_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let parts: Vec<Vec<f64>> = self
            .data
            .nonzeros()
            .par_iter()
            .map(|(j, y)| {
                let chi = self.system.lagrange(j)?;
                Ok(chi.eval_many(points)?.into_iter().map(|v| y * v).collect())
            })
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; points.len()];
        for p in parts {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        Ok(out)
    }
}

pub fn sc_coefficient(sys: &SemiCardinalSystem, k: &LatticeIndex, j: &LatticeIndex) -> Result<f64> {
    sys.coefficient(k, j)
}

pub fn sc_lagrange_eval(sys: &SemiCardinalSystem, j: &LatticeIndex, x: &[f64]) -> Result<f64> {
    sys.lagrange(j)?.eval(x)
}

pub fn sc_interpolate(sys: &SemiCardinalSystem, data: &SymbolCoefficients, x: &[f64]) -> Result<f64> {
    sys.interpolate(data)?.eval(x)
}

pub fn schur_norm(sys: &SemiCardinalSystem, window: &[LatticeIndex]) -> Result<f64> {
    sys.schur_norm(window)
}

pub fn cholesky_residual(sys: &SemiCardinalSystem, n: usize, buffer: usize) -> Result<CholeskyReport> {
    sys.cholesky_residual(n, buffer, DENSE_CAP)
}

/// Probe indices near the boundary, in the middle and deep inside `H`.
pub fn probe_set(h: &HalfSpace) -> Vec<LatticeIndex> {
    let d = h.dim();
    match h {
        HalfSpace::Coordinate { axis, .. } => [0i64, 1, 5, 20]
            .iter()
            .map(|&t| {
                let mut j = vec![0i64; d];
                j[axis - 1] = t;
                LatticeIndex::from(j)
            })
            .collect(),
        HalfSpace::Ordered { .. } => {
            let near = enumerate_window(h, 2);
            let mut out: Vec<LatticeIndex> = near.into_iter().take(3).collect();
            for r in [5, 10] {
                if let Some(m) = enumerate_window(h, r).pop() {
                    out.push(m);
                }
            }
            out.dedup();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LinearOrder;

    fn m4_system() -> SemiCardinalSystem {
        build_semicardinal(&Kernel::bspline(4).unwrap(), &HalfSpace::standard(1), &SystemConfig::new(40)).unwrap()
    }

    #[test]
    fn m4_entries() {
        let s = m4_system();
        let s3 = 3f64.sqrt();
        let q = 2.0 - s3;
        let g2 = 12.0 - 6.0 * s3;
        assert!((s.coefficient(&[0], &[0]).unwrap() - g2).abs() < 1e-10);
        assert!((s.coefficient(&[1], &[0]).unwrap() + q * g2).abs() < 1e-10);
        let a11 = s.coefficient(&[1], &[1]).unwrap();
        // γ₀² + γ₁² = 168 − 96√3
        assert!((a11 - (168.0 - 96.0 * s3)).abs() < 1e-10, "{a11}");
        assert!((s.coefficient(&[20], &[20]).unwrap() - s3).abs() < 1e-10);
        let col = s.column(&[3]).unwrap();
        for k in 0..12i64 {
            assert!((col.get(&[k]) - s.coefficient(&[k], &[3]).unwrap()).abs() < 1e-13);
        }
        assert!(s.coefficient(&[-1], &[0]).is_err());
        let probes: Vec<LatticeIndex> = (0..30).map(|j| LatticeIndex::from(vec![j])).collect();
        assert!(s.schur_norm(&probes).unwrap() <= 3.0 + 1e-6);
    }

    #[test]
    fn lagrange_delta_conditions() {
        let s = m4_system();
        for j in [0i64, 1, 5, 20] {
            let chi = s.lagrange(&[j]).unwrap();
            for l in 0..=(j + 8) {
                let want = if l == j { 1.0 } else { 0.0 };
                assert!((chi.eval(&[l as f64]).unwrap() - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn interpolation_routes() {
        let s = m4_system();
        let data = SymbolCoefficients::from_fn(1, 40, |k| if k[0] >= 0 { (-1f64).powi(k[0] as i32) } else { 0.0 });
        let it = s.interpolate(&data).unwrap();
        let pts: Vec<Vec<f64>> = (0..60).map(|i| vec![0.37 * i as f64]).collect();
        let a = it.eval_many(&pts).unwrap();
        let b = it.eval_lagrange_many(&pts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        for j in 5..=35i64 {
            assert!((it.eval(&[j as f64]).unwrap() - data.get(&[j])).abs() < 1e-7);
        }
    }

    #[test]
    fn dense_identity() {
        let s = m4_system();
        let r = s.cholesky_residual(40, 10, DENSE_CAP).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert_eq!(r.triangular_violations, 0);
    }

    #[test]
    fn delta_kernel_trivial() {
        let h = HalfSpace::ordered(2, LinearOrder::lex(2)).unwrap();
        let s = build_semicardinal(&Kernel::delta(2), &h, &SystemConfig::new(4)).unwrap();
        assert!((s.coefficient(&[1, -1], &[1, -1]).unwrap() - 1.0).abs() < 1e-14);
        assert!(s.coefficient(&[1, -1], &[0, 1]).unwrap().abs() < 1e-14);
        assert!(s.cholesky_residual(3, 1, DENSE_CAP).unwrap().residual < 1e-14);
        let w = enumerate_window(&h, 2);
        assert!((s.schur_norm(&w).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn probes() {
        let h = HalfSpace::ordered(2, LinearOrder::lex(2)).unwrap();
        let p = probe_set(&h);
        assert_eq!(p[0], LatticeIndex::from(vec![0, 0]));
        assert_eq!(p[1], LatticeIndex::from(vec![0, 1]));
        assert_eq!(p.last().unwrap(), &LatticeIndex::from(vec![10, 10]));
        assert_eq!(probe_set(&HalfSpace::standard(2)).len(), 4);
    }
}
