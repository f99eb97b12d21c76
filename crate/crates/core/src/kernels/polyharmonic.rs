//! Elementary polyharmonic B-splines `ψ = (Σ_i ∇_i)^m φ`.
//!
//! `φ = c_{m,d} ‖x‖^{2m-d} (ln ‖x‖ for even d)` is the fundamental solution
//! of `Δ^m`, and `∇_i` is the second central difference along axis `i`.

use statrs::function::gamma::gamma;

use super::bspline::bspline_eval;
use crate::error::{Error, Result};
use crate::symbols::{multiply, SymbolCoefficients};

#[derive(Debug, Clone)]
pub struct Polyharmonic {
    m: u32,
    dim: usize,
    c: f64,
    stencil: Vec<(Vec<i64>, f64)>,
}

impl Polyharmonic {
    pub fn new(m: u32, dim: usize) -> Result<Self> {
        if dim == 0 || 2 * m as usize <= dim {
            return Err(Error::InvalidParameter(format!(
                "polyharmonic B-spline needs 2m > d (m = {m}, d = {dim})"
            )));
        }
        let lap = SymbolCoefficients::from_fn(dim, 1, |k| {
            let nz: Vec<&i64> = k.iter().filter(|c| **c != 0).collect();
            match nz.len() {
                0 => -2.0 * dim as f64,
                1 => 1.0,
                _ => 0.0,
            }
        });
        let mut st = SymbolCoefficients::delta(dim);
        for _ in 0..m {
            st = multiply(&st, &lap)?;
        }
        Ok(Self {
            m,
            dim,
            c: fundamental_constant(m, dim),
            stencil: st.nonzeros(),
        })
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    /// Stencil offsets and integer weights of `(Σ ∇_i)^m`.
    pub fn stencil(&self) -> &[(Vec<i64>, f64)] {
        &self.stencil
    }

    /// The fundamental solution as a function of `n = ‖x‖²`.
    fn phi_sq(&self, n: f64) -> f64 {
        if n == 0.0 {
            return 0.0;
        }
        let p = 2 * self.m as i32 - self.dim as i32;
        if self.dim % 2 == 0 {
            self.c * n.powi(p / 2) * 0.5 * n.ln()
        } else {
            self.c * n.powf(p as f64 / 2.0)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let m = self.m as usize;
        if self.dim == 1 {
            return bspline_eval(2 * m, x[0]);
        }
        let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let n0: f64 = ax.iter().map(|v| v * v).sum();
        let r_stab = 4.0 * m as f64;
        if self.dim % 2 == 0 && n0 >= r_stab * r_stab {
            return self.eval_far(&ax, n0);
        }
        let mut s = 0.0;
        let mut y = vec![0.0; self.dim];
        for (off, w) in &self.stencil {
            for a in 0..self.dim {
                y[a] = ax[a] + off[a] as f64;
            }
            s += w * self.phi_sq(y.iter().map(|v| v * v).sum());
        }
        s
    }

    /// Even `d`, large `‖x‖`: the `ln ‖x‖²` part is annihilated exactly by the
    /// stencil, leaving a sum over `ln(1+z) - z`.
    fn eval_far(&self, x: &[f64], n0: f64) -> f64 {
        let p = self.m as i32 - self.dim as i32 / 2;
        let mut s = 0.0;
        for (off, w) in &self.stencil {
            let mut ns = 0.0;
            for a in 0..self.dim {
                let y = x[a] + off[a] as f64;
                ns += y * y;
            }
            let z = (ns - n0) / n0;
            s += w * ns.powi(p) * log1p_minus(z);
        }
        if self.dim == 2 {
            // Δ^m ‖x‖^{2m} = (2^m m!)^2 in the plane
            let mut k = 1.0;
            for j in 1..=self.m {
                k *= (2 * j) as f64 * (2 * j) as f64;
            }
            s += k / n0;
        }
        0.5 * self.c * s
    }
}

/// `ln(1+z) − z`, accurate for small `z`.
fn log1p_minus(z: f64) -> f64 {
    if z.abs() < 0.25 {
        let mut term = z;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            term *= -z;
            let t = term / k;
            sum += t;
            if t.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        z.ln_1p() - z
    }
}

/// Normalization making `Δ^m φ = δ`.
pub fn fundamental_constant(m: u32, d: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let mf = m as f64;
    let half_d = d as f64 / 2.0;
    let sign = |e: i64| if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if d % 2 == 1 {
        sign(m as i64) * gamma(half_d - mf) / (4f64.powi(m as i32) * pi.powf(half_d) * gamma(mf))
    } else {
        let e = m as i64 + m as i64 - (d / 2) as i64 + 1;
        sign(e)
            / (2f64.powi(2 * m as i32 - 1) * pi.powf(half_d) * gamma(mf) * gamma(mf - half_d + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let pi = std::f64::consts::PI;
        assert!((fundamental_constant(1, 1) - 0.5).abs() < 1e-15);
        assert!((fundamental_constant(2, 1) - 1.0 / 12.0).abs() < 1e-15);
        assert!((fundamental_constant(2, 3) + 1.0 / (8.0 * pi)).abs() < 1e-15);
        assert!((fundamental_constant(2, 2) - 1.0 / (8.0 * pi)).abs() < 1e-15);
        assert!((fundamental_constant(1, 2) - 1.0 / (2.0 * pi)).abs() < 1e-15);
    }

    #[test]
    fn thirteen_point_stencil() {
        let p = Polyharmonic::new(2, 2).unwrap();
        let st = p.stencil();
        assert_eq!(st.len(), 13);
        let w = |k: [i64; 2]| st.iter().find(|(o, _)| o[..] == k[..]).map(|(_, w)| *w).unwrap();
        assert_eq!(w([0, 0]), 20.0);
        assert_eq!(w([1, 0]), -8.0);
        assert_eq!(w([1, 1]), 2.0);
        assert_eq!(w([0, 2]), 1.0);
    }

    #[test]
    fn d1_is_a_bspline() {
        let p = Polyharmonic::new(2, 1).unwrap();
        let phi = |x: f64| fundamental_constant(2, 1) * x.abs().powi(3);
        for s in 0..40 {
            let x = -2.5 + s as f64 * 0.125;
            let direct: f64 = [(-2.0, 1.0), (-1.0, -4.0), (0.0, 6.0), (1.0, -4.0), (2.0, 1.0)]
                .iter()
                .map(|(o, w)| w * phi(x + o))
                .sum();
            assert!((p.eval(&[x]) - direct).abs() < 1e-12);
            assert!((p.eval(&[x]) - bspline_eval(4, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn far_field_matches_direct_at_the_switch() {
        let p = Polyharmonic::new(2, 2).unwrap();
        for &(a, b) in &[(8.0, 0.0), (6.0, 6.0), (7.5, 3.2), (12.0, 1.0)] {
            let n0: f64 = a * a + b * b;
            let far = p.eval_far(&[a, b], n0);
            let mut near = 0.0;
            for (off, w) in p.stencil() {
                let y0 = a + off[0] as f64;
                let y1 = b + off[1] as f64;
                near += w * p.phi_sq(y0 * y0 + y1 * y1);
            }
            assert!((far - near).abs() < 1e-11 * (1.0 + near.abs()) + 1e-13, "{far} {near}");
        }
    }

    #[test]
    fn lattice_sum_is_one() {
        let p = Polyharmonic::new(2, 2).unwrap();
        let mut s = 0.0;
        for i in -200i64..=200 {
            for j in -200i64..=200 {
                s += p.eval(&[i as f64, j as f64]);
            }
        }
        assert!((s - 1.0).abs() < 1e-3, "{s}");
    }

    #[test]
    fn rejects_low_order() {
        assert!(Polyharmonic::new(1, 2).is_err());
    }
}
