//! Box-truncated Fourier coefficient fields on `Z^d` and their torus grids.
//!
//! A [`SymbolCoefficients`] holds `û_k` for `k ∈ [-N, N]^d`, stored row-major
//! with the last axis varying fastest. Grid values use `u(ζ) = Σ û_k ζ^k` at
//! `ζ = e^{2πi n/M}`.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{check_dim, Error, Result};

/// Default positivity floor for reciprocals and logarithms.
pub const POSITIVITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoefficients {
    dim: usize,
    radius: usize,
    coeffs: Vec<f64>,
}

/// Coefficients recovered from a grid, with the relative mass that was dropped.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub coeffs: SymbolCoefficients,
    pub tail_mass: f64,
}

impl SymbolCoefficients {
    pub fn new(dim: usize, radius: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let len = (2 * radius + 1).pow(dim as u32);
        if coeffs.len() != len {
            return Err(Error::InvalidParameter(format!(
                "expected {len} coefficients for radius {radius} in d={dim}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { dim, radius, coeffs })
    }

    pub fn zeros(dim: usize, radius: usize) -> Self {
        Self {
            dim,
            radius,
            coeffs: vec![0.0; (2 * radius + 1).pow(dim as u32)],
        }
    }

    /// The unit `δ₀`, i.e. the constant symbol 1.
    pub fn delta(dim: usize) -> Self {
        Self {
            dim,
            radius: 0,
            coeffs: vec![1.0],
        }
    }

    pub fn from_fn(dim: usize, radius: usize, mut f: impl FnMut(&[i64]) -> f64) -> Self {
        let mut out = Self::zeros(dim, radius);
        let mut k = vec![-(radius as i64); dim];
        for v in out.coeffs.iter_mut() {
            *v = f(&k);
            advance(&mut k, radius as i64);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Flat offset of `k`, or `None` outside the box.
    #[inline]
    pub fn offset(&self, k: &[i64]) -> Option<usize> {
        let r = self.radius as i64;
        let side = self.side();
        let mut off = 0usize;
        for &c in k {
            if c < -r || c > r {
                return None;
            }
            off = off * side + (c + r) as usize;
        }
        Some(off)
    }

    /// Lattice index of a flat offset.
    pub fn index_of(&self, mut off: usize) -> Vec<i64> {
        let side = self.side();
        let mut k = vec![0i64; self.dim];
        for a in (0..self.dim).rev() {
            k[a] = (off % side) as i64 - self.radius as i64;
            off /= side;
        }
        k
    }

    /// Coefficient at `k`, zero outside the box.
    #[inline]
    pub fn get(&self, k: &[i64]) -> f64 {
        self.offset(k).map_or(0.0, |o| self.coeffs[o])
    }

    pub fn set(&mut self, k: &[i64], v: f64) -> Result<()> {
        check_dim(self.dim, k.len())?;
        let o = self.offset(k).ok_or_else(|| {
            Error::InvalidParameter(format!("index {k:?} outside radius {}", self.radius))
        })?;
        self.coeffs[o] = v;
        Ok(())
    }

    /// Visits every box entry in storage order.
    pub fn for_each(&self, mut f: impl FnMut(&[i64], f64)) {
        let mut k = vec![-(self.radius as i64); self.dim];
        for &v in &self.coeffs {
            f(&k, v);
            advance(&mut k, self.radius as i64);
        }
    }

    /// Nonzero entries as `(index, value)` pairs in storage order.
    pub fn nonzeros(&self) -> Vec<(Vec<i64>, f64)> {
        let mut out = Vec::new();
        self.for_each(|k, v| {
            if v != 0.0 {
                out.push((k.to_vec(), v));
            }
        });
        out
    }

    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.abs()).sum()
    }

    /// `max |û_k − û_{−k}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.coeffs.len();
        (0..n / 2 + 1)
            .map(|i| (self.coeffs[i] - self.coeffs[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// `k ↦ û_{−k}`.
    pub fn reflected(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self {
            dim: self.dim,
            radius: self.radius,
            coeffs: c,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
        }
    }

    /// Crops or zero-pads to a new radius.
    pub fn with_radius(&self, radius: usize) -> Self {
        if radius == self.radius {
            return self.clone();
        }
        let mut out = Self::zeros(self.dim, radius);
        let r = radius.min(self.radius) as i64;
        let inner = Self::zeros(self.dim, r as usize);
        inner.for_each(|k, _| {
            let v = self.get(k);
            let o = out.offset(k).unwrap();
            out.coeffs[o] = v;
        });
        out
    }

    /// Largest `|û_k|` on the shell `‖k‖∞ = r`.
    pub fn shell_max(&self, r: usize) -> f64 {
        let mut m = 0.0f64;
        let ri = r as i64;
        self.for_each(|k, v| {
            if k.iter().map(|c| c.abs()).max().unwrap_or(0) == ri {
                m = m.max(v.abs());
            }
        });
        m
    }

    /// Max `|û_k|` per shell radius `0..=N`.
    pub fn shell_profile(&self) -> Vec<f64> {
        let mut prof = vec![0.0f64; self.radius + 1];
        self.for_each(|k, v| {
            let s = k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
            prof[s] = prof[s].max(v.abs());
        });
        prof
    }

    /// Smallest box keeping every entry above `rel_tol · ‖u‖_W`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let thr = rel_tol * self.wiener_norm();
        let prof = self.shell_profile();
        let r = prof.iter().rposition(|&m| m > thr).unwrap_or(0);
        self.with_radius(r)
    }

    /// `Σ û_k e^{i k·t}`.
    pub fn eval_at(&self, t: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        self.for_each(|k, v| {
            if v != 0.0 {
                let ph: f64 = k.iter().zip(t).map(|(&a, &b)| a as f64 * b).sum();
                s += v * Complex64::from_polar(1.0, ph);
            }
        });
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|a| format!("k_{a}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        let mut res = Ok(());
        self.for_each(|k, v| {
            if res.is_err() {
                return;
            }
            let mut line = String::new();
            for c in k {
                line.push_str(&c.to_string());
                line.push(',');
            }
            line.push_str(&format_f64(v));
            res = writeln!(w, "{line}");
        });
        res
    }

    /// Reads the CSV dump; the radius is the largest `|k_i|` present.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coefficient file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let dim = header.split(',').count().saturating_sub(1);
        if dim == 0 {
            return Err(Error::Parse("header has no index columns".into()));
        }
        let mut rows = Vec::new();
        let mut radius = 0usize;
        for (n, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!("line {}: expected {} fields", n + 2, dim + 1)));
            }
            let k: Vec<i64> = fields[..dim]
                .iter()
                .map(|s| s.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            let v: f64 = fields[dim]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            radius = radius.max(k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap());
            rows.push((k, v));
        }
        let mut out = Self::zeros(dim, radius);
        for (k, v) in rows {
            out.set(&k, v)?;
        }
        Ok(out)
    }
}

/// 17 significant digits; round-trips every finite `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[inline]
fn advance(k: &mut [i64], r: i64) {
    for a in (0..k.len()).rev() {
        if k[a] < r {
            k[a] += 1;
            return;
        }
        k[a] = -r;
    }
}

/// Values on the uniform grid of `T^d` with `M` points per axis.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    dim: usize,
    m: usize,
    values: Vec<Complex64>,
}

impl TorusGrid {
    pub fn new(dim: usize, m: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != m.pow(dim as u32) {
            return Err(Error::InvalidParameter("grid value count mismatch".into()));
        }
        Ok(Self { dim, m, values })
    }

    pub fn constant(dim: usize, m: usize, c: f64) -> Self {
        Self {
            dim,
            m,
            values: vec![Complex64::new(c, 0.0); m.pow(dim as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Self {
        Self {
            dim: self.dim,
            m: self.m,
            values: self.values.par_iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        Self {
            dim: self.dim,
            m: self.m,
            values: self
                .values
                .par_iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Grid point `n` (multi-index) of the minimum real value, as angles.
    pub fn argmin_real(&self) -> Vec<f64> {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, z)| if z.re < acc.1 { (i, z.re) } else { acc });
        let mut n = i;
        let mut t = vec![0.0; self.dim];
        for a in (0..self.dim).rev() {
            t[a] = 2.0 * std::f64::consts::PI * (n % self.m) as f64 / self.m as f64;
            n /= self.m;
        }
        t
    }
}

/// In-place multidimensional FFT over a row-major `m^dim` array.
///
/// `Forward` computes `Σ x_n e^{-2πi nk/m}`, `Inverse` the unnormalized conjugate sum.
pub fn fft_nd(data: &mut [Complex64], dim: usize, m: usize, dir: FftDirection) {
    let total = data.len();
    debug_assert_eq!(total, m.pow(dim as u32));
    if m <= 1 {
        return;
    }
    let fft = FftPlanner::new().plan_fft(m, dir);
    let lines_per_chunk = (4096 / m).max(1);
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(m * lines_per_chunk).for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
            continue;
        }
        let block = m * stride;
        let mut buf = vec![Complex64::default(); total];
        {
            let src: &[Complex64] = data;
            buf.par_chunks_mut(m).enumerate().for_each(|(l, line)| {
                let o = l / stride;
                let i = l % stride;
                let base = o * block + i;
                for (t, z) in line.iter_mut().enumerate() {
                    *z = src[base + t * stride];
                }
            });
        }
        buf.par_chunks_mut(m * lines_per_chunk).for_each(|chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
        data.par_chunks_mut(block).enumerate().for_each(|(o, blk)| {
            for i in 0..stride {
                let line = &buf[(o * stride + i) * m..(o * stride + i + 1) * m];
                for (t, &z) in line.iter().enumerate() {
                    blk[t * stride + i] = z;
                }
            }
        });
    }
}

/// Writes the coefficients into a zeroed `m^d` complex array at positions `k mod m`.
fn scatter(s: &SymbolCoefficients, m: usize) -> Vec<Complex64> {
    let d = s.dim;
    let mut out = vec![Complex64::default(); m.pow(d as u32)];
    let mi = m as i64;
    s.for_each(|k, v| {
        if v != 0.0 {
            let mut off = 0usize;
            for &c in k {
                off = off * m + c.rem_euclid(mi) as usize;
            }
            out[off] = Complex64::new(v, 0.0);
        }
    });
    out
}

/// Evaluates `u(ζ)` on the `M^d` grid.
pub fn grid_eval(s: &SymbolCoefficients, m: usize) -> Result<TorusGrid> {
    if m < s.side() {
        return Err(Error::GridTooSmall { grid: m, radius: s.radius });
    }
    let mut vals = scatter(s, m);
    fft_nd(&mut vals, s.dim, m, FftDirection::Inverse);
    Ok(TorusGrid {
        dim: s.dim,
        m,
        values: vals,
    })
}

/// Real parts of the Fourier coefficients of the grid, truncated to `radius`.
pub fn from_grid(g: &TorusGrid, radius: usize) -> Result<Truncated> {
    let m = g.m;
    if 2 * radius + 1 > m {
        return Err(Error::GridTooSmall { grid: m, radius });
    }
    let mut vals = g.values.clone();
    fft_nd(&mut vals, g.dim, m, FftDirection::Forward);
    let scale = 1.0 / (m as f64).powi(g.dim as i32);
    let total: f64 = vals.iter().map(|z| z.re.abs()).sum::<f64>() * scale;
    let mi = m as i64;
    let coeffs = SymbolCoefficients::from_fn(g.dim, radius, |k| {
        let mut off = 0usize;
        for &c in k {
            off = off * m + c.rem_euclid(mi) as usize;
        }
        vals[off].re * scale
    });
    let kept = coeffs.wiener_norm();
    let tail_mass = if total > 0.0 {
        ((total - kept) / total).max(0.0)
    } else {
        0.0
    };
    Ok(Truncated { coeffs, tail_mass })
}

/// Lattice samples of a symmetric kernel are already the symbol coefficients.
pub fn symbol_from_kernel(samples: &SymbolCoefficients) -> Result<SymbolCoefficients> {
    let defect = samples.symmetry_defect();
    if defect > 1e-12 * samples.wiener_norm().max(1.0) {
        return Err(Error::Asymmetric(defect));
    }
    Ok(samples.clone())
}

fn positive_grid(s: &SymbolCoefficients, m: usize, floor: f64) -> Result<TorusGrid> {
    if m < 2 * s.side() {
        return Err(Error::GridTooSmall { grid: m, radius: s.radius });
    }
    let g = grid_eval(s, m)?;
    let min = g.min_real();
    if !(min > floor) {
        return Err(Error::SymbolNotPositive { min, floor, grid: m });
    }
    Ok(g)
}

/// Coefficients of `1/s` by pointwise grid inversion.
pub fn reciprocal(s: &SymbolCoefficients, m: usize, radius: usize, floor: f64) -> Result<Truncated> {
    let g = positive_grid(s, m, floor)?;
    from_grid(&g.map(|z| Complex64::new(1.0 / z.re, 0.0)), radius)
}

/// Coefficients of `log s` by pointwise grid logarithm.
pub fn log_symbol(s: &SymbolCoefficients, m: usize, radius: usize, floor: f64) -> Result<Truncated> {
    let g = positive_grid(s, m, floor)?;
    from_grid(&g.map(|z| Complex64::new(z.re.ln(), 0.0)), radius)
}

pub fn min_on_torus(s: &SymbolCoefficients, m: usize) -> Result<f64> {
    Ok(grid_eval(s, m)?.min_real())
}

pub fn wiener_norm(s: &SymbolCoefficients) -> f64 {
    s.wiener_norm()
}

/// Smallest `2^a 3^b 5^c` not below `n`.
pub fn fast_len(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut p = p35;
            while p < n {
                p *= 2;
            }
            best = best.min(p);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// Exact coefficient convolution; the result has radius `N_u + N_v`.
pub fn multiply(u: &SymbolCoefficients, v: &SymbolCoefficients) -> Result<SymbolCoefficients> {
    check_dim(u.dim, v.dim)?;
    let d = u.dim;
    let r = u.radius + v.radius;
    let nu = u.coeffs.iter().filter(|c| **c != 0.0).count();
    let nv = v.coeffs.iter().filter(|c| **c != 0.0).count();
    if (nu as f64) * (nv as f64) < 4.0e6 {
        let mut out = SymbolCoefficients::zeros(d, r);
        let a = u.nonzeros();
        let b = v.nonzeros();
        let mut k = vec![0i64; d];
        for (i, x) in &a {
            for (j, y) in &b {
                for t in 0..d {
                    k[t] = i[t] + j[t];
                }
                let o = out.offset(&k).unwrap();
                out.coeffs[o] += x * y;
            }
        }
        return Ok(out);
    }
    let m = fast_len(2 * r + 1);
    let mut a = scatter(u, m);
    let mut b = scatter(v, m);
    fft_nd(&mut a, d, m, FftDirection::Forward);
    fft_nd(&mut b, d, m, FftDirection::Forward);
    a.par_iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft_nd(&mut a, d, m, FftDirection::Inverse);
    let scale = 1.0 / (m as f64).powi(d as i32);
    let mi = m as i64;
    Ok(SymbolCoefficients::from_fn(d, r, |k| {
        let mut off = 0usize;
        for &c in k {
            off = off * m + c.rem_euclid(mi) as usize;
        }
        a[off].re * scale
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m4() -> SymbolCoefficients {
        SymbolCoefficients::new(1, 1, vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]).unwrap()
    }

    #[test]
    fn grid_values_of_cubic_symbol() {
        let g = grid_eval(&m4(), 16).unwrap();
        assert!((g.values()[0].re - 1.0).abs() < 1e-15);
        assert!((g.values()[8].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((min_on_torus(&m4(), 16).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(grid_eval(&m4(), 2).is_err());
    }

    #[test]
    fn round_trip_and_constant() {
        let s = SymbolCoefficients::from_fn(2, 3, |k| (k[0] as f64 * 0.3).sin() + k[1] as f64 * 0.01);
        let back = from_grid(&grid_eval(&s, 16).unwrap(), 3).unwrap();
        let err = s
            .values()
            .iter()
            .zip(back.coeffs.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
        assert!(back.tail_mass < 1e-13);
        let c = from_grid(&TorusGrid::constant(1, 8, 2.0), 2).unwrap();
        assert_eq!(c.coeffs.get(&[0]), 2.0);
        assert_eq!(c.coeffs.get(&[1]), 0.0);
    }

    #[test]
    fn reciprocal_of_cubic_symbol() {
        let w = reciprocal(&m4(), 512, 40, POSITIVITY_FLOOR).unwrap().coeffs;
        let s3 = 3f64.sqrt();
        assert!((w.get(&[0]) - s3).abs() < 1e-12);
        assert!((w.get(&[1]) - s3 * (s3 - 2.0)).abs() < 1e-12);
        assert!((w.wiener_norm() - 3.0).abs() < 1e-8);
        let p = multiply(&m4(), &w).unwrap();
        for k in -10..=10i64 {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((p.get(&[k]) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn log_of_constant() {
        let e = SymbolCoefficients::new(1, 0, vec![std::f64::consts::E]).unwrap();
        let l = log_symbol(&e, 8, 2, POSITIVITY_FLOOR).unwrap().coeffs;
        assert!((l.get(&[0]) - 1.0).abs() < 1e-15);
        let one = SymbolCoefficients::delta(1);
        assert!(log_symbol(&one, 8, 2, POSITIVITY_FLOOR).unwrap().coeffs.wiener_norm() < 1e-15);
    }

    #[test]
    fn nonpositive_rejected() {
        let s = SymbolCoefficients::new(1, 1, vec![0.5, 1.0, 0.5]).unwrap();
        assert!(matches!(
            reciprocal(&s, 16, 2, POSITIVITY_FLOOR),
            Err(Error::SymbolNotPositive { .. })
        ));
    }

    #[test]
    fn multiply_shifts() {
        let mut a = SymbolCoefficients::zeros(2, 1);
        a.set(&[1, 0], 1.0).unwrap();
        let b = a.reflected();
        let p = multiply(&a, &b).unwrap();
        assert_eq!(p.get(&[0, 0]), 1.0);
        assert_eq!(p.wiener_norm(), 1.0);
        let u = SymbolCoefficients::from_fn(1, 4, |k| 1.0 / (1 + k[0].abs()) as f64);
        assert_eq!(multiply(&u, &SymbolCoefficients::delta(1)).unwrap(), u);
    }

    #[test]
    fn fft_multiply_matches_direct() {
        let u = SymbolCoefficients::from_fn(2, 30, |k| ((k[0] * 3 + k[1]) as f64).cos() * 0.01);
        let v = SymbolCoefficients::from_fn(2, 25, |k| ((k[0] - 2 * k[1]) as f64).sin() * 0.02);
        let fast = multiply(&u, &v).unwrap();
        let mut direct = SymbolCoefficients::zeros(2, 55);
        u.for_each(|i, x| {
            v.for_each(|j, y| {
                let k = [i[0] + j[0], i[1] + j[1]];
                let o = direct.offset(&k).unwrap();
                direct.values_mut()[o] += x * y;
            })
        });
        let err = fast
            .values()
            .iter()
            .zip(direct.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let s = SymbolCoefficients::from_fn(2, 2, |k| (k[0] as f64 + 0.1).exp() / 7.0 - k[1] as f64 / 3.0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k_1,k_2,value\n"));
        let back = SymbolCoefficients::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn trimming_and_shells() {
        let s = SymbolCoefficients::from_fn(1, 20, |k| (-(k[0].abs() as f64)).exp2());
        let t = s.trimmed(1e-3);
        assert_eq!(t.radius(), 8);
        assert_eq!(s.shell_max(0), 1.0);
        assert_eq!(s.with_radius(2).with_radius(20).get(&[3]), 0.0);
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(fast_len(1021), 1024);
        assert_eq!(fast_len(1100), 1125);
        assert_eq!(fast_len(7), 8);
        assert_eq!(fast_len(11), 12);
    }
}
