//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p whlattice --test acceptance`; pass criterion numbers
//! as extra arguments (`-- 3 7`) to run a subset.

use std::collections::BTreeMap;
use std::time::Instant;

use whlattice::cardinal::{build_cardinal, CardinalSystem, SystemConfig};
use whlattice::convergence::{
    chi_via_eta, chij_via_eta, convergence_gap_with, default_sample_grid, eta_sup, exhausting_scan, EtaFunction,
};
use whlattice::expansion::sample_grid;
use whlattice::kernels::Kernel;
use whlattice::lattice::{box_points, HalfSpace, LatticeIndex, LinearOrder};
use whlattice::semicardinal::{build_semicardinal, probe_set, SemiCardinalSystem, DENSE_CAP};
use whlattice::symbols::{min_on_torus, symbol_from_kernel};
use whlattice::verify::{
    fit_decay, fundamental_identity_check, oracle_compare, DecayModel, IdentityTarget, NativeFunction,
    NativeQuadratureSpec, OracleTarget,
};
use whlattice::wienerhopf::verify_factorization;

/// One measured quantity against its tolerance.
struct Check {
    label: String,
    detail: String,
    pass: bool,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn below(&mut self, label: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check {
            label: label.into(),
            detail: format!("{value:.3e} < {tol:.0e}"),
            pass: value < tol,
        });
    }

    fn claim(&mut self, label: impl Into<String>, detail: String, pass: bool) {
        self.checks.push(Check {
            label: label.into(),
            detail,
            pass,
        });
    }

    fn error(&mut self, label: impl Into<String>, e: impl std::fmt::Display) {
        self.claim(label, format!("error: {e}"), false);
    }

    fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

fn lex(d: usize) -> HalfSpace {
    HalfSpace::ordered(d, LinearOrder::lex(d)).unwrap()
}

fn graded(d: usize) -> HalfSpace {
    HalfSpace::ordered(d, LinearOrder::GradedLex).unwrap()
}

/// Zoo member with the radii used throughout the suite.
#[derive(Clone)]
struct Case {
    kernel: Kernel,
    cfg: SystemConfig,
}

fn case(kernel: Kernel, n: usize, m: usize) -> Case {
    Case {
        kernel,
        cfg: SystemConfig::with_grid(n, m),
    }
}

fn zoo_1d() -> Vec<Case> {
    vec![
        case(Kernel::gaussian(1.0, 1).unwrap(), 40, 512),
        case(Kernel::matern(1.0, 1).unwrap(), 40, 512),
        case(Kernel::matern(2.0, 1).unwrap(), 48, 512),
        case(Kernel::gim(1.0, 1.5, 1).unwrap(), 1024, 8192),
        case(Kernel::bspline(4).unwrap(), 40, 512),
        case(Kernel::polyharmonic(2, 1).unwrap(), 40, 512),
        case(Kernel::delta(1), 4, 64),
    ]
}

const ALG_N: usize = 64;
const ALG_M: usize = 512;

fn zoo_2d() -> Vec<Case> {
    vec![
        case(Kernel::gaussian(1.0, 2).unwrap(), 12, 128),
        case(Kernel::matern(2.0, 2).unwrap(), 32, 256),
        case(Kernel::gim(1.0, 2.0, 2).unwrap(), ALG_N, ALG_M),
        case(Kernel::box_spline_222(), 2, 96),
        case(Kernel::polyharmonic(2, 2).unwrap(), ALG_N, ALG_M),
        case(Kernel::delta(2), 2, 32),
    ]
}

fn halfspaces(d: usize) -> Vec<HalfSpace> {
    if d == 1 {
        vec![HalfSpace::standard(1)]
    } else {
        vec![HalfSpace::standard(d), lex(d), graded(d)]
    }
}

/// Systems are expensive in two dimensions; build each once.
#[derive(Default)]
struct Cache {
    cardinal: BTreeMap<String, CardinalSystem>,
    semi: BTreeMap<String, SemiCardinalSystem>,
}

impl Cache {
    fn cardinal(&mut self, c: &Case) -> whlattice::Result<CardinalSystem> {
        let key = format!("{}|{}|{}", c.kernel.label(), c.cfg.symbol_radius, c.cfg.factor.grid_size);
        if let Some(s) = self.cardinal.get(&key) {
            return Ok(s.clone());
        }
        let s = build_cardinal(&c.kernel, &c.cfg)?;
        self.cardinal.insert(key, s.clone());
        Ok(s)
    }

    fn semi(&mut self, c: &Case, h: &HalfSpace) -> whlattice::Result<SemiCardinalSystem> {
        let key = format!(
            "{}|{}|{}|{}",
            c.kernel.label(),
            h.label(),
            c.cfg.symbol_radius,
            c.cfg.factor.grid_size
        );
        if let Some(s) = self.semi.get(&key) {
            return Ok(s.clone());
        }
        let s = build_semicardinal(&c.kernel, h, &c.cfg)?;
        self.semi.insert(key, s.clone());
        Ok(s)
    }
}

fn lattice_points(p: &[LatticeIndex]) -> Vec<Vec<f64>> {
    p.iter().map(|j| j.iter().map(|&c| c as f64).collect()).collect()
}

fn criterion_1(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let mut cases = zoo_1d();
    cases.extend(zoo_2d());
    for c in &cases {
        let d = c.kernel.dim();
        let label = c.kernel.label();
        match cache.cardinal(c).and_then(|s| s.delta_defect(10)) {
            Ok(v) => out.below(format!("chi {label}"), v, 1e-7),
            Err(e) => out.error(format!("chi {label}"), e),
        }
        for h in halfspaces(d) {
            let run = |cache: &mut Cache| -> whlattice::Result<f64> {
                let s = cache.semi(c, &h)?;
                let mut worst = 0.0f64;
                for j in probe_set(&h) {
                    let chi = s.lagrange(&j)?;
                    let pts: Vec<LatticeIndex> = box_points(d, 10)
                        .into_iter()
                        .map(|m| &j + &m)
                        .filter(|l| h.contains_raw(l))
                        .collect();
                    let vals = chi.eval_many(&lattice_points(&pts))?;
                    for (l, v) in pts.iter().zip(vals) {
                        let want = if *l == j { 1.0 } else { 0.0 };
                        worst = worst.max((v - want).abs());
                    }
                }
                Ok(worst)
            };
            let l = format!("chi_j {label} {}", h.label());
            match run(cache) {
                Ok(v) => out.below(l, v, 1e-7),
                Err(e) => out.error(l, e),
            }
        }
    }
    out
}

fn criterion_2(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let mut cases = zoo_1d();
    cases.extend(zoo_2d());
    for c in &cases {
        for h in halfspaces(c.kernel.dim()) {
            let l = format!("{} {}", c.kernel.label(), h.label());
            match cache.semi(c, &h) {
                Ok(s) => out.below(l, s.factor.factorization_residual, 1e-7),
                Err(e) => out.error(l, e),
            }
        }
    }
    out
}

fn criterion_3(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let c = case(Kernel::bspline(4).unwrap(), 40, 512);
    let s3 = 3f64.sqrt();
    let q = 2.0 - s3;
    let run = |cache: &mut Cache, out: &mut Criterion| -> whlattice::Result<()> {
        let card = cache.cardinal(&c)?;
        let semi = cache.semi(&c, &HalfSpace::standard(1))?;
        let report = verify_factorization(&card.sigma().clone(), &semi.factor, c.cfg.factor.grid_size)?;
        let rows = [
            ("a_0", card.coefficient(&[0]), s3),
            ("a_1", card.coefficient(&[1]), s3 * (s3 - 2.0)),
            ("gamma_0", semi.factor.gamma0(), 3.0 - s3),
            ("gamma_1", semi.gamma().get(&[1]), 5.0 * s3 - 9.0),
            ("|omega|_W", report.omega_wiener, 3.0),
            ("|omega_+|_W", semi.factor.wiener_norm(), s3),
            ("a_00", semi.coefficient(&[0], &[0])?, 12.0 - 6.0 * s3),
            ("a_10", semi.coefficient(&[1], &[0])?, -q * (12.0 - 6.0 * s3)),
        ];
        for (name, got, want) in rows {
            out.below(format!("{name} = {got:.10}"), (got - want).abs(), 1e-8);
        }
        Ok(())
    };
    if let Err(e) = run(cache, &mut out) {
        out.error("M_4 closed forms", e);
    }
    out
}

fn criterion_4(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    for c in zoo_1d() {
        let label = c.kernel.label();
        match cache.cardinal(&c).and_then(|s| oracle_compare(OracleTarget::Cardinal(&s), 60, 15)) {
            Ok(r) => out.below(format!("cardinal {label}"), r.deviation, 1e-6),
            Err(e) => out.error(format!("cardinal {label}"), e),
        }
        let h = HalfSpace::standard(1);
        match cache.semi(&c, &h).and_then(|s| oracle_compare(OracleTarget::SemiCardinal(&s), 60, 15)) {
            Ok(r) => out.below(format!("semi {label}"), r.deviation, 1e-6),
            Err(e) => out.error(format!("semi {label}"), e),
        }
    }
    let g3 = case(Kernel::gaussian(3.0, 2).unwrap(), 8, 64);
    for h in halfspaces(2) {
        let l = format!("semi {} {}", g3.kernel.label(), h.label());
        match cache.semi(&g3, &h).and_then(|s| oracle_compare(OracleTarget::SemiCardinal(&s), 6, 2)) {
            Ok(r) => out.below(l, r.deviation, 1e-6),
            Err(e) => out.error(l, e),
        }
    }
    // a wider Gaussian is still consistent: the finite-section error shrinks as the window grows
    let g1 = case(Kernel::gaussian(1.0, 2).unwrap(), 12, 128);
    let run = |cache: &mut Cache| -> whlattice::Result<(f64, f64)> {
        let s = cache.semi(&g1, &lex(2))?;
        let a = oracle_compare(OracleTarget::SemiCardinal(&s), 6, 2)?.deviation;
        let b = oracle_compare(OracleTarget::SemiCardinal(&s), 12, 8)?.deviation;
        Ok((a, b))
    };
    match run(cache) {
        Ok((a, b)) => out.claim(
            format!("{} order:lex window 6 -> 12", g1.kernel.label()),
            format!("{a:.3e} -> {b:.3e}"),
            b < a,
        ),
        Err(e) => out.error("window growth", e),
    }
    out
}

fn criterion_5(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let mut runs: Vec<(Case, HalfSpace, usize, usize)> = zoo_1d()
        .into_iter()
        .map(|c| (c, HalfSpace::standard(1), 60, 20))
        .collect();
    for c in zoo_2d() {
        let (n, b) = match c.kernel.decay().is_algebraic() {
            true => (20, 10),
            false => (6, 2),
        };
        for h in halfspaces(2) {
            runs.push((c.clone(), h, n, b));
        }
    }
    for (c, h, n, b) in runs {
        let l = format!("{} {} n={n} buffer={b}", c.kernel.label(), h.label());
        match cache.semi(&c, &h).and_then(|s| s.cholesky_residual(n, b, DENSE_CAP)) {
            Ok(r) => {
                out.below(l.clone(), r.residual, 1e-6);
                if h.order().is_some() {
                    out.claim(
                        format!("{l} triangular"),
                        format!("{} violations", r.triangular_violations),
                        r.triangular_violations == 0,
                    );
                }
            }
            Err(e) => out.error(l, e),
        }
    }
    out
}

fn criterion_6() -> Criterion {
    let mut out = Criterion::default();
    let k = Kernel::box_spline_222();
    let sigma = symbol_from_kernel(&k.lattice_samples(2).field).unwrap();
    for m in [96, 384, 3 * 7] {
        match min_on_torus(&sigma, m) {
            Ok(v) => out.below(format!("grid minimum M={m} is {v:.12}"), (v - 0.25).abs(), 1e-10),
            Err(e) => out.error(format!("M={m}"), e),
        }
    }
    out
}

/// Sup of `|v|(1+r)^α` over the rings `[16, 32)` and `[32, 50]`.
fn outer_rings(values: impl Iterator<Item = (f64, f64)>, alpha: f64) -> (f64, f64, f64) {
    let (mut all, mut r1, mut r2) = (0.0f64, 0.0f64, 0.0f64);
    for (r, v) in values {
        if !(2.0..=50.0).contains(&r) {
            continue;
        }
        let w = v.abs() * (1.0 + r).powf(alpha);
        all = all.max(w);
        if r >= 32.0 {
            r2 = r2.max(w);
        } else if r >= 16.0 {
            r1 = r1.max(w);
        }
    }
    (all, r1, r2)
}

fn ring_check(out: &mut Criterion, label: String, (all, r1, r2): (f64, f64, f64)) {
    let spread = (r1 - r2).abs() / r1.max(r2);
    out.claim(
        label,
        format!("sup {all:.3e}, rings {r1:.4e} / {r2:.4e}, spread {:.1}% < 10%", 100.0 * spread),
        all.is_finite() && spread < 0.1,
    );
}

fn euclid(a: &[i64], b: &[i64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| ((x - y) * (x - y)) as f64).sum::<f64>().sqrt()
}

fn criterion_7(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let cases = [
        (case(Kernel::gim(1.0, 1.5, 1).unwrap(), 1024, 8192), 3.0),
        (case(Kernel::gim(1.0, 2.0, 2).unwrap(), ALG_N, ALG_M), 4.0),
        (case(Kernel::polyharmonic(2, 2).unwrap(), ALG_N, ALG_M), 4.0),
    ];
    for (c, alpha) in cases {
        let d = c.kernel.dim();
        let label = c.kernel.label();
        match cache.cardinal(&c) {
            Ok(s) => {
                let zero = vec![0i64; d];
                let mut vals = Vec::new();
                s.omega().for_each(|k, v| vals.push((euclid(k, &zero), v)));
                ring_check(&mut out, format!("a_k {label}"), outer_rings(vals.into_iter(), alpha));
            }
            Err(e) => out.error(format!("a_k {label}"), e),
        }
        let h = HalfSpace::standard(d);
        let run = |cache: &mut Cache, out: &mut Criterion| -> whlattice::Result<()> {
            let s = cache.semi(&c, &h)?;
            for j in probe_set(&h) {
                let col = s.column(&j)?;
                let mut vals = Vec::new();
                col.for_each(|k, v| {
                    if h.contains_raw(k) {
                        vals.push((euclid(k, &j), v))
                    }
                });
                ring_check(out, format!("a_kj {label} j={j}"), outer_rings(vals.into_iter(), alpha));
            }
            Ok(())
        };
        if let Err(e) = run(cache, &mut out) {
            out.error(format!("a_kj {label}"), e);
        }
    }
    out
}

fn exp_fit(out: &mut Criterion, label: String, vals: Vec<(f64, f64)>, rate: Option<f64>) {
    match fit_decay(&vals, DecayModel::Exponential, None, 0.0) {
        Ok(f) => {
            let mut pass = f.r_squared > 0.99 && f.fitted_rate > 0.0;
            let mut detail = format!("rate {:.4}, R^2 {:.5}, {} samples", f.fitted_rate, f.r_squared, f.samples);
            if let Some(r) = rate {
                let rel = (f.fitted_rate - r).abs() / r;
                pass &= rel < 0.02;
                detail.push_str(&format!(", expected {r:.4} ({:.2}%)", 100.0 * rel));
            }
            out.claim(label, detail, pass);
        }
        Err(e) => out.error(label, e),
    }
}

fn criterion_8(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let cases = [
        (case(Kernel::gaussian(1.0, 1).unwrap(), 40, 512), None),
        (case(Kernel::matern(2.0, 1).unwrap(), 48, 512), None),
        (case(Kernel::bspline(4).unwrap(), 40, 512), Some((2.0 + 3f64.sqrt()).ln())),
    ];
    for (c, rate) in cases {
        let label = c.kernel.label();
        let run = |cache: &mut Cache, out: &mut Criterion| -> whlattice::Result<()> {
            let card = cache.cardinal(&c)?;
            let a: Vec<(f64, f64)> = (1..=60).map(|k| (k as f64, card.coefficient(&[k]))).collect();
            exp_fit(out, format!("a_k {label}"), a, rate);
            let h = HalfSpace::standard(1);
            let s = cache.semi(&c, &h)?;
            let g: Vec<(f64, f64)> = (1..=60).map(|k| (k as f64, s.gamma().get(&[k]))).collect();
            exp_fit(out, format!("gamma_k {label}"), g, rate);
            for j in probe_set(&h) {
                let col = s.column(&j)?;
                let jj = j[0];
                let v: Vec<(f64, f64)> = (1..=60).map(|m| (m as f64, col.get(&[jj + m]))).collect();
                exp_fit(out, format!("a_kj {label} j={j}"), v, rate);
            }
            Ok(())
        };
        if let Err(e) = run(cache, &mut out) {
            out.error(label, e);
        }
    }
    out
}

fn criterion_9(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let run = |cache: &mut Cache, out: &mut Criterion| -> whlattice::Result<()> {
        let c = case(Kernel::bspline(4).unwrap(), 40, 512);
        let card = cache.cardinal(&c)?;
        let s = cache.semi(&c, &HalfSpace::standard(1))?;
        let e = EtaFunction::new(&s, 1e-13);
        let steps = exhausting_scan(&e, &card, &s, &[0, 2, 5, 10, 20], &default_sample_grid(1))?;
        for st in &steps {
            out.claim(
                format!("M_4 gap(j={})", st.j),
                format!("{:.3e} <= {:.3e}", st.gap.gap, st.gap.bound),
                st.gap.holds(1e-8),
            );
        }
        let dec = steps.windows(2).all(|w| w[1].gap.gap < w[0].gap.gap);
        out.claim("M_4 gap strictly decreasing", format!("{dec}"), dec);
        out.below("M_4 gap(20)", steps.last().unwrap().gap.gap, 1e-9);

        let alpha = 3.0;
        let c = case(Kernel::gim(1.0, 1.5, 1).unwrap(), 1024, 8192);
        let card = cache.cardinal(&c)?;
        let s = cache.semi(&c, &HalfSpace::standard(1))?;
        let e = EtaFunction::new(&s, 1e-13);
        let m = eta_sup(&e)?;
        let js = [1i64, 2, 4, 8, 16, 32, 64];
        let mut rows = Vec::new();
        for &j in &js {
            let pts = sample_grid(1, -(j as f64) - 4.0, 4.0, 0.25);
            let g = convergence_gap_with(&e, m, &card, &s, &[j], &pts)?;
            out.claim(
                format!("GIM gap(j={j})"),
                format!("{:.3e} <= {:.3e}", g.gap, g.bound),
                g.holds(1e-8),
            );
            rows.push((j as f64, g));
        }
        // C fitted to the bound with the slope fixed at 1 − α
        let model = |j: f64| (1.0 + j).powf(1.0 - alpha);
        let lc = rows.iter().map(|(j, g)| (g.bound / model(*j)).ln()).sum::<f64>() / rows.len() as f64;
        let cfit = lc.exp();
        for (j, g) in &rows {
            let ratio = g.bound / (cfit * model(*j));
            out.claim(
                format!("GIM bound(j={j}) / C(1+j)^(1-a)"),
                format!("{ratio:.3} in [1/3, 3]"),
                (1.0 / 3.0..=3.0).contains(&ratio),
            );
            out.claim(
                format!("GIM gap(j={j}) <= 3C(1+j)^(1-a)"),
                format!("{:.3e} <= {:.3e}", g.gap, 3.0 * cfit * model(*j)),
                g.gap <= 3.0 * cfit * model(*j),
            );
        }
        let gaps: Vec<(f64, f64)> = rows.iter().map(|(j, g)| (*j, g.gap)).collect();
        if let Ok(f) = fit_decay(&gaps, DecayModel::Algebraic, None, 0.0) {
            out.claim("GIM observed gap rate", format!("{:.3} (bound rate {})", f.fitted_rate, alpha - 1.0), true);
        }
        Ok(())
    };
    if let Err(e) = run(cache, &mut out) {
        out.error("convergence", e);
    }
    out
}

fn criterion_10(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let mut cases = zoo_1d();
    cases.extend(zoo_2d().into_iter().filter(|c| c.kernel.full_eval()));
    for c in &cases {
        let d = c.kernel.dim();
        let pts = default_sample_grid(d);
        let hs = if d == 1 {
            vec![HalfSpace::standard(1)]
        } else {
            vec![HalfSpace::standard(2), lex(2)]
        };
        for h in hs {
            let label = format!("{} {}", c.kernel.label(), h.label());
            let run = |cache: &mut Cache| -> whlattice::Result<(f64, f64)> {
                let card = cache.cardinal(c)?;
                let s = cache.semi(c, &h)?;
                let e = EtaFunction::new(&s, 1e-13);
                let r0 = chi_via_eta(&e, &card, &pts)?;
                let mut r1 = 0.0f64;
                for j in probe_set(&h).into_iter().take(3) {
                    r1 = r1.max(chij_via_eta(&e, &s, &j, &pts)?);
                }
                Ok((r0, r1))
            };
            match run(cache) {
                Ok((r0, r1)) => {
                    out.below(format!("chi {label}"), r0, 1e-7);
                    out.below(format!("chi_j {label}"), r1, 1e-7);
                }
                Err(e) => out.error(label, e),
            }
        }
    }
    out
}

fn criterion_11(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let run = |cache: &mut Cache, out: &mut Criterion| -> whlattice::Result<()> {
        let c = case(Kernel::gaussian(1.0, 1).unwrap(), 40, 512);
        let card = cache.cardinal(&c)?;
        let q = NativeQuadratureSpec::new(&c.kernel)?;
        for x0 in [0.0, 0.3, 1.7, -2.5] {
            let r = fundamental_identity_check(&q, IdentityTarget::Cardinal(&card), NativeFunction::Shift(x0))?;
            let chi = card.chi(&[x0])?;
            out.below(format!("gaussian x0={x0} quadrature vs chi"), (r.quadrature - chi).abs(), 2e-5);
            out.below(format!("gaussian x0={x0} identity"), r.refined_residual, 2e-5);
            out.claim(
                format!("gaussian x0={x0} refinement"),
                format!("{:.2e} -> {:.2e}", r.residual, r.refined_residual),
                r.refined_residual <= 0.5 * r.residual || r.refined_residual < 1e-6,
            );
        }
        let s = cache.semi(&c, &HalfSpace::standard(1))?;
        for j in [0i64, 3] {
            let r = fundamental_identity_check(&q, IdentityTarget::SemiCardinal(&s, j), NativeFunction::Shift(0.4))?;
            out.below(format!("gaussian semi j={j}"), r.refined_residual, 2e-5);
        }
        let c = case(Kernel::matern(1.0, 1).unwrap(), 40, 512);
        let card = cache.cardinal(&c)?;
        let q = NativeQuadratureSpec::new(&c.kernel)?;
        let r = fundamental_identity_check(&q, IdentityTarget::Cardinal(&card), NativeFunction::Lagrange)?;
        out.below(
            format!("matern (chi, chi) = {:.8} vs a_0 = {:.8}", r.quadrature, card.coefficient(&[0])),
            (r.quadrature - card.coefficient(&[0])).abs(),
            2e-5,
        );
        Ok(())
    };
    if let Err(e) = run(cache, &mut out) {
        out.error("fundamental identity", e);
    }
    out
}

fn criterion_12(cache: &mut Cache) -> Criterion {
    let mut out = Criterion::default();
    let mut cases = zoo_1d();
    cases.extend(zoo_2d().into_iter().filter(|c| c.kernel.full_eval()));
    for c in &cases {
        let label = c.kernel.label();
        let g = if c.kernel.dim() == 1 { 33 } else { 9 };
        match cache.cardinal(c).and_then(|s| s.lebesgue_estimate(g)) {
            Ok(l) => {
                out.claim(
                    label.clone(),
                    format!("estimate {:.6} <= bound {:.6}", l.estimate, l.bound),
                    l.estimate <= l.bound,
                );
                if label.starts_with("bspline(n=4)") {
                    out.below(format!("{label} bound = 3"), (l.bound - 3.0).abs(), 1e-9);
                }
            }
            Err(e) => out.error(label, e),
        }
    }
    out
}

const NAMES: [&str; 12] = [
    "delta conditions",
    "Wiener-Hopf residual",
    "closed-form cubic regression",
    "oracle equivalence",
    "Cholesky identity",
    "symbol positivity",
    "algebraic decay transfer",
    "exponential decay transfer",
    "convergence",
    "eta representations",
    "fundamental identity",
    "Lebesgue bound",
];

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut cache = Cache::default();
    let mut failed = Vec::new();
    for (i, name) in NAMES.iter().enumerate() {
        let n = i + 1;
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let crit = match n {
            1 => criterion_1(&mut cache),
            2 => criterion_2(&mut cache),
            3 => criterion_3(&mut cache),
            4 => criterion_4(&mut cache),
            5 => criterion_5(&mut cache),
            6 => criterion_6(),
            7 => criterion_7(&mut cache),
            8 => criterion_8(&mut cache),
            9 => criterion_9(&mut cache),
            10 => criterion_10(&mut cache),
            11 => criterion_11(&mut cache),
            _ => criterion_12(&mut cache),
        };
        let pass = crit.pass();
        for c in &crit.checks {
            if verbose || !c.pass {
                println!("    [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.label, c.detail);
            }
        }
        let bad = crit.checks.iter().filter(|c| !c.pass).count();
        println!(
            "criterion {n:>2} {}: {name} ({} checks, {bad} failed, {:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            crit.checks.len(),
            t.elapsed().as_secs_f64()
        );
        if !pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
