//! The function `η = Σ_{k∈H} γ_k φ(·−k)`, the representations of `χ` and `χ_j`
//! through `η`, and the semi-cardinal to cardinal convergence gap.

use crate::cardinal::{tail_radius, CardinalSystem};
use crate::error::{check_dim, Error, Result};
use crate::expansion::{coset_values, eval_expansion, group_by_coset, sample_grid};
use crate::kernels::Kernel;
use crate::lattice::{exhausting_maximum, HalfSpace, LatticeIndex};
use crate::semicardinal::SemiCardinalSystem;
use crate::symbols::SymbolCoefficients;
use crate::wienerhopf::WienerHopfFactor;

#[derive(Debug, Clone)]
pub struct EtaFunction {
    pub factor: WienerHopfFactor,
    pub kernel: Kernel,
    pub eval_radius: usize,
    gamma: SymbolCoefficients,
}

impl EtaFunction {
    pub fn new(sys: &SemiCardinalSystem, tail: f64) -> Self {
        let g = &sys.factor.gamma;
        let r = tail_radius(g, sys.sigma.wiener_norm(), tail);
        Self {
            factor: sys.factor.clone(),
            kernel: sys.kernel.clone(),
            eval_radius: r,
            gamma: g.with_radius(r),
        }
    }

    pub fn halfspace(&self) -> &HalfSpace {
        &self.factor.halfspace
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        eval_expansion(&self.kernel, &self.gamma, x)
    }

    /// `η(f + n)` for `‖n‖∞ ≤ radius`.
    fn coset(&self, frac: &[f64], radius: usize) -> Result<SymbolCoefficients> {
        coset_values(&self.kernel, &self.gamma, frac, radius)
    }

    /// Max of `|η|` over `[−r, r]^d` sampled with `steps` points per unit.
    pub fn sampled_sup(&self, r: usize, steps: usize) -> Result<f64> {
        let d = self.kernel.dim();
        let g = steps.max(1);
        let mut best = 0.0f64;
        for f in sample_grid(d, 0.0, 1.0 - 1.0 / g as f64, 1.0 / g as f64) {
            let v = self.coset(&f, r)?;
            best = best.max(v.values().iter().fold(0.0, |m, x| m.max(x.abs())));
        }
        Ok(best)
    }
}

pub fn eta_eval(e: &EtaFunction, x: &[f64]) -> Result<f64> {
    e.eval(x)
}

/// Default sample grid `[−3, 3]^d` with step 1/4.
pub fn default_sample_grid(d: usize) -> Vec<Vec<f64>> {
    sample_grid(d, -3.0, 3.0, 0.25)
}

fn max_norm(points: &[(usize, Vec<i64>)]) -> usize {
    points
        .iter()
        .map(|(_, n)| n.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// `Σ_l w_l η(x + s·l)` at every point, with the `η` values taken from one
/// coset evaluation per fractional part.
fn eta_series(e: &EtaFunction, weights: &[(Vec<i64>, f64)], sign: i64, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let reach = weights
        .iter()
        .map(|(l, _)| l.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let mut out = vec![0.0; points.len()];
    let d = e.kernel.dim();
    let mut m = vec![0i64; d];
    for (f, members) in group_by_coset(points) {
        let v = e.coset(&f, max_norm(&members) + reach)?;
        for (i, n) in members {
            let mut s = 0.0;
            for (l, w) in weights {
                for a in 0..d {
                    m[a] = n[a] + sign * l[a];
                }
                s += w * v.get(&m);
            }
            out[i] = s;
        }
    }
    Ok(out)
}

/// `max_x |χ(x) − Σ_{l∈H} γ_l η(x+l)|` over the sample points.
pub fn chi_via_eta(e: &EtaFunction, card: &CardinalSystem, points: &[Vec<f64>]) -> Result<f64> {
    check_dim(card.kernel().dim(), e.kernel.dim())?;
    let weights = e.gamma.nonzeros();
    let rep = eta_series(e, &weights, 1, points)?;
    let chi = card.chi_many(points)?;
    Ok(chi.iter().zip(&rep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `max_x |χ_j(x) − Σ_{l∈H, j−l∈H} γ_{j−l} η(x−l)|` over the sample points.
pub fn chij_via_eta(e: &EtaFunction, sc: &SemiCardinalSystem, j: &[i64], points: &[Vec<f64>]) -> Result<f64> {
    let h = e.halfspace();
    check_dim(h.dim(), j.len())?;
    if !h.contains_raw(j) {
        return Err(Error::NotInHalfSpace(j.to_vec()));
    }
    let weights: Vec<(Vec<i64>, f64)> = e
        .gamma
        .nonzeros()
        .into_iter()
        .filter_map(|(u, g)| {
            let l: Vec<i64> = j.iter().zip(&u).map(|(a, b)| a - b).collect();
            h.contains_raw(&l).then_some((l, g))
        })
        .collect();
    let rep = eta_series(e, &weights, -1, points)?;
    let chi = sc.lagrange(j)?.eval_many(points)?;
    Ok(chi.iter().zip(&rep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceGap {
    /// `max_x |χ(x) − χ_j(x+j)|` on the sample grid.
    pub gap: f64,
    /// `M · Σ_{l≻j} |γ_l|`.
    pub bound: f64,
    /// `M`, the sampled supremum of `|η|` (a lower estimate of the true sup).
    pub eta_sup: f64,
    pub gamma_tail: f64,
}

impl ConvergenceGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.gap <= self.bound + slack
    }
}

/// Sampled sup of `|η|` used as the constant `M`.
pub fn eta_sup(e: &EtaFunction) -> Result<f64> {
    let steps = if e.kernel.dim() == 1 { 16 } else { 4 };
    e.sampled_sup(8, steps)
}

pub fn convergence_gap(
    e: &EtaFunction,
    card: &CardinalSystem,
    sc: &SemiCardinalSystem,
    j: &[i64],
    points: &[Vec<f64>],
) -> Result<ConvergenceGap> {
    convergence_gap_with(e, eta_sup(e)?, card, sc, j, points)
}

/// As [`convergence_gap`] with a precomputed `M`.
pub fn convergence_gap_with(
    e: &EtaFunction,
    eta_sup: f64,
    card: &CardinalSystem,
    sc: &SemiCardinalSystem,
    j: &[i64],
    points: &[Vec<f64>],
) -> Result<ConvergenceGap> {
    let chi = card.chi_many(points)?;
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|x| x.iter().zip(j).map(|(a, b)| a + *b as f64).collect())
        .collect();
    let chij = sc.lagrange(j)?.eval_many(&shifted)?;
    let gap = chi.iter().zip(&chij).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tail = e.factor.tail_beyond(j);
    Ok(ConvergenceGap {
        gap,
        bound: eta_sup * tail,
        eta_sup,
        gamma_tail: tail,
    })
}

#[derive(Debug, Clone)]
pub struct ExhaustingStep {
    pub n: usize,
    pub j: LatticeIndex,
    pub gap: ConvergenceGap,
}

/// Gaps along `j^{(n)}`: the ⪯-maximum of `{k ∈ H : ‖k‖ ≤ n}` for ordered `H`,
/// `n·e_p` for the coordinate half-space on axis `p`.
pub fn exhausting_scan(
    e: &EtaFunction,
    card: &CardinalSystem,
    sc: &SemiCardinalSystem,
    ns: &[usize],
    points: &[Vec<f64>],
) -> Result<Vec<ExhaustingStep>> {
    let h = e.halfspace();
    let m = eta_sup(e)?;
    ns.iter()
        .map(|&n| {
            let j = match h {
                HalfSpace::Ordered { .. } => exhausting_maximum(h, n).expect("ordered half-space"),
                HalfSpace::Coordinate { dim, axis } => {
                    let mut v = vec![0i64; *dim];
                    v[axis - 1] = n as i64;
                    LatticeIndex::from(v)
                }
            };
            let gap = convergence_gap_with(e, m, card, sc, &j, points)?;
            Ok(ExhaustingStep { n, j, gap })
        })
        .collect()
}
