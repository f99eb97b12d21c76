//! Subcommand implementations. Each returns whether all of its checks passed.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use whlattice::cardinal::{build_cardinal, CardinalSystem, Extension, SystemConfig};
use whlattice::convergence::{default_sample_grid, exhausting_scan, EtaFunction};
use whlattice::expansion::sample_grid;
use whlattice::kernels::Kernel;
use whlattice::lattice::{box_points, HalfSpace};
use whlattice::semicardinal::{probe_set, SemiCardinalSystem};
use whlattice::symbols::{min_on_torus, symbol_from_kernel, SymbolCoefficients};
use whlattice::verify::{fit_decay, oracle_compare, DecayModel, OracleTarget};
use whlattice::wienerhopf::{factorize, verify_factorization, WienerHopfFactor};

use crate::cache::{resolve_root, FactorCache};
use crate::config::{parse_config, usage, HalfSpaceSpec, KernelSpec, RunConfig};
use crate::report::{axis_header, emit_report, fit_json, num, render_json, Output, Report, Table};
use crate::{CacheAction, Cli, Command, ExtensionArg, GlobalArgs, SampleArgs};

/// File config first, then flag overrides, then validation.
pub fn load_config(g: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match (&g.config, &g.kernel) {
        (Some(p), _) => parse_config(p)?,
        (None, Some(k)) => RunConfig::minimal(KernelSpec::parse(k)?),
        (None, None) => return Err(usage("no kernel given: pass --kernel or --config")),
    };
    if let (Some(_), Some(k)) = (&g.config, &g.kernel) {
        cfg.kernel = KernelSpec::parse(k)?;
    }
    if let Some(h) = &g.halfspace {
        cfg.halfspace = Some(HalfSpaceSpec::parse(h)?);
    }
    if let Some(n) = g.symbol_radius {
        cfg.symbol_radius = n;
    }
    if let Some(m) = g.grid_size {
        cfg.grid_size = m;
    }
    if let Some(t) = g.eval_tail {
        cfg.eval_tail = t;
    }
    if let Some(o) = &g.out {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(c) = &g.cache_dir {
        cfg.cache_dir = Some(c.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Command::Cache { action } = &cli.command {
        return cache_command(&cli.global, *action);
    }
    let mut ctx = Ctx::new(&cli.global)?;
    match &cli.command {
        Command::Symbol => ctx.symbol(),
        Command::Factorize => ctx.factorize(),
        Command::Lagrange { semi, j, grid, .. } => ctx.lagrange(*semi, j.as_deref(), grid),
        Command::Interpolate {
            data,
            semi,
            extension,
            grid,
        } => ctx.interpolate(data, *semi, *extension, grid),
        Command::Converge { ns, grid } => ctx.converge(ns, grid),
        Command::Decay => ctx.decay(),
        Command::Verify { window, buffer } => ctx.verify(*window, *buffer),
        Command::Cache { .. } => unreachable!("handled above"),
    }
}

fn cache_command(g: &GlobalArgs, action: CacheAction) -> anyhow::Result<bool> {
    let from_file = match &g.config {
        Some(p) => parse_config(p)?.cache_dir,
        None => None,
    };
    let cache = FactorCache::new(resolve_root(g.cache_dir.as_deref(), from_file.as_deref()));
    match action {
        CacheAction::Path => println!("{}", cache.root.display()),
        CacheAction::Clear => println!("removed {} entries", cache.clear()?),
        CacheAction::List => {
            for (key, meta) in cache.list()? {
                match meta {
                    Some(m) => println!(
                        "{key} {} {} N={} M={} residual={:e}",
                        m.kernel, m.halfspace, m.symbol_radius, m.grid_size, m.factorization_residual
                    ),
                    None => println!("{key} (unreadable)"),
                }
            }
        }
    }
    Ok(true)
}

struct Ctx {
    cfg: RunConfig,
    kernel: Kernel,
    h: HalfSpace,
    sys: SystemConfig,
    cache: Option<FactorCache>,
    out: Output,
    timings: bool,
    plot_data: bool,
    report: Report,
}

impl Ctx {
    fn new(g: &GlobalArgs) -> anyhow::Result<Self> {
        let cfg = load_config(g)?;
        let kernel = cfg.kernel.build()?;
        let h = cfg.halfspace_spec().build(kernel.dim())?;
        let cache = (!g.no_cache).then(|| FactorCache::new(resolve_root(g.cache_dir.as_deref(), cfg.cache_dir.as_deref())));
        Ok(Self {
            sys: cfg.system(),
            out: Output {
                dir: cfg.output_dir.clone(),
            },
            cfg,
            kernel,
            h,
            cache,
            timings: g.timings,
            plot_data: g.emit_plot_data,
            report: Report::default(),
        })
    }

    fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&Self) -> T) -> T {
        let t = Instant::now();
        let v = f(self);
        if self.timings {
            self.report.timing(name, t.elapsed().as_secs_f64());
        }
        v
    }

    /// The config as run, without the output and cache locations.
    fn config_echo(&self) -> Value {
        let mut c = self.cfg.clone();
        c.output_dir = None;
        c.cache_dir = None;
        let mut v = serde_json::to_value(&c).expect("config serializes");
        v["halfspace"] = Value::String(self.h.label());
        v
    }

    fn sigma(&self) -> anyhow::Result<SymbolCoefficients> {
        Ok(symbol_from_kernel(&self.kernel.lattice_samples(self.cfg.symbol_radius).field)?)
    }

    fn cache_key(&self) -> String {
        FactorCache::key(&self.cfg, &self.kernel.label(), &self.h.label())
    }

    /// The factor, from the cache when a valid entry exists.
    fn factor(&mut self, sigma: &SymbolCoefficients) -> anyhow::Result<WienerHopfFactor> {
        let key = self.cache_key();
        if let Some(c) = &self.cache {
            if let Some((f, _)) = c.load(&key, &self.h, &self.cfg) {
                log::info!("factor cache hit {key}");
                return Ok(f);
            }
        }
        let f = self.timed("factorize", |s| factorize(sigma, &s.h, &s.sys.factor))?;
        if let Some(c) = &self.cache {
            match c.store(&key, &f, &self.kernel.label(), self.cfg.symbol_radius) {
                Ok(_) => log::info!("stored factor {key} under {}", c.root.display()),
                Err(e) => log::warn!("could not cache factor: {e:#}"),
            }
        }
        Ok(f)
    }

    fn semicardinal(&mut self) -> anyhow::Result<SemiCardinalSystem> {
        let sigma = self.sigma()?;
        let f = self.factor(&sigma)?;
        Ok(SemiCardinalSystem::from_factor(&self.kernel, sigma, f, &self.sys)?)
    }

    fn cardinal(&mut self) -> anyhow::Result<CardinalSystem> {
        Ok(self.timed("cardinal", |s| build_cardinal(&s.kernel, &s.sys))?)
    }

    fn points(&self, g: &SampleArgs, lo: f64, hi: f64, center: &[f64]) -> anyhow::Result<Vec<Vec<f64>>> {
        let step = g.step.unwrap_or(if self.kernel.full_eval() { 0.25 } else { 1.0 });
        let (lo, hi) = (g.lo.unwrap_or(lo), g.hi.unwrap_or(hi));
        if !(step > 0.0) || !(hi >= lo) {
            return Err(usage(format!("bad sample grid lo={lo} hi={hi} step={step}")));
        }
        if ((hi - lo) / step).powi(self.dim() as i32) > 4e6 {
            return Err(usage("sample grid has more than 4e6 points"));
        }
        Ok(sample_grid(self.dim(), lo, hi, step)
            .into_iter()
            .map(|x| x.iter().zip(center).map(|(a, b)| a + b).collect())
            .collect())
    }

    fn samples_csv(&self, points: &[Vec<f64>], values: &[f64]) -> String {
        let mut head = axis_header("x", self.dim());
        head.push("value".into());
        let mut t = Table::new(&head);
        for (x, v) in points.iter().zip(values) {
            let mut row = x.clone();
            row.push(*v);
            t.row(&[], &row);
        }
        t.into_string()
    }

    fn finish(&mut self, name: &str, primary: bool) -> anyhow::Result<bool> {
        let mut doc = emit_report(&self.report);
        doc["config"] = self.config_echo();
        self.out.emit(name, &render_json(&doc), primary)?;
        Ok(self.report.pass())
    }

    fn symbol(&mut self) -> anyhow::Result<bool> {
        let sigma = self.sigma()?;
        let min = min_on_torus(&sigma, self.cfg.grid_size)?;
        self.report.value("symbol_min", min);
        self.report.value("wiener_norm", sigma.wiener_norm());
        self.report.at_least("symbol_positive", min, self.cfg.positivity_floor);
        let mut buf = Vec::new();
        sigma.write_csv(&mut buf)?;
        self.out.emit("symbol.csv", std::str::from_utf8(&buf)?, true)?;
        self.finish("report.json", false)
    }

    fn factorize(&mut self) -> anyhow::Result<bool> {
        let sigma = self.sigma()?;
        let f = self.factor(&sigma)?;
        let rep = verify_factorization(&sigma, &f, self.cfg.grid_size)?;
        self.report.at_most("factorization_residual", rep.residual, self.cfg.residual_tolerance);
        self.report.at_most("support_leak", f.support_leak, self.cfg.leak_tolerance);
        self.report.at_most("wiener_consistency", rep.omega_wiener - rep.omega_plus_wiener_sq, 1e-9 * rep.omega_plus_wiener_sq);
        for (k, v) in [
            ("gamma_0", f.gamma0()),
            ("gamma_wiener", f.wiener_norm()),
            ("lambda_0", f.lambda0),
            ("symbol_min", f.symbol_min),
            ("tail_mass", f.tail_mass),
            ("omega_wiener", rep.omega_wiener),
            ("log_split_defect", rep.log_split_defect),
        ] {
            self.report.value(k, v);
        }
        let mut gamma = Vec::new();
        f.gamma.write_csv(&mut gamma)?;
        let mut lambda = Vec::new();
        f.lambda_plus.write_csv(&mut lambda)?;
        self.report.section(
            "factor",
            json!({
                "kernel": self.kernel.label(),
                "halfspace": self.h.label(),
                "coefficient_radius": f.gamma.radius(),
                "gamma_sha256": crate::cache::sha256_hex(&gamma),
            }),
        );
        self.out.emit("gamma.csv", std::str::from_utf8(&gamma)?, false)?;
        self.out.emit("lambda_plus.csv", std::str::from_utf8(&lambda)?, false)?;
        if self.plot_data {
            let t = profile_table(&[("gamma", f.gamma.shell_profile())]);
            self.out.emit("profile.csv", &t, false)?;
        }
        self.finish("metadata.json", true)
    }

    fn lagrange(&mut self, semi: bool, j: Option<&str>, grid: &SampleArgs) -> anyhow::Result<bool> {
        let d = self.dim();
        let (values, pts) = if semi {
            let j = parse_index(j.ok_or_else(|| usage("--semi needs a center --j"))?, d)?;
            let center: Vec<f64> = j.iter().map(|&c| c as f64).collect();
            let pts = self.points(grid, -4.0, 4.0, &center)?;
            let sc = self.semicardinal()?;
            let l = sc.lagrange(&j)?;
            (self.timed("evaluate", |_| l.eval_many(&pts))?, pts)
        } else {
            if j.is_some() {
                return Err(usage("--j applies to --semi only"));
            }
            let pts = self.points(grid, -4.0, 4.0, &vec![0.0; d])?;
            let card = self.cardinal()?;
            (self.timed("evaluate", |_| card.chi_many(&pts))?, pts)
        };
        let csv = self.samples_csv(&pts, &values);
        self.out.emit("lagrange.csv", &csv, true)?;
        self.finish("report.json", false)
    }

    fn interpolate(&mut self, data: &Path, semi: bool, ext: ExtensionArg, grid: &SampleArgs) -> anyhow::Result<bool> {
        let d = self.dim();
        let mut y = read_data(data, d)?;
        let r = y.radius() as f64;
        let (values, pts) = if semi {
            if ext != ExtensionArg::Zero {
                return Err(usage("--extension applies to cardinal interpolation only"));
            }
            let mut dropped = 0usize;
            let h = self.h.clone();
            let mut outside = Vec::new();
            y.for_each(|k, v| {
                if v != 0.0 && !h.contains_raw(k) {
                    outside.push(k.to_vec());
                }
            });
            for k in outside {
                y.set(&k, 0.0)?;
                dropped += 1;
            }
            if dropped > 0 {
                log::warn!("dropped {dropped} data points outside {}", h.label());
            }
            self.report.value("dropped_points", dropped as f64);
            let sc = self.semicardinal()?;
            let s = sc.interpolate(&y)?;
            let pts = self.points(grid, -r, r, &vec![0.0; d])?;
            (self.timed("evaluate", |_| s.eval_many(&pts))?, pts)
        } else {
            let policy = match ext {
                ExtensionArg::Zero => Extension::Zero,
                ExtensionArg::Periodic => Extension::Periodic,
            };
            let card = self.cardinal()?;
            let s = card.interpolate(&y, policy)?;
            let pts = self.points(grid, -r, r, &vec![0.0; d])?;
            (self.timed("evaluate", |_| s.eval_many(&pts))?, pts)
        };
        let csv = self.samples_csv(&pts, &values);
        self.out.emit("interpolant.csv", &csv, true)?;
        self.finish("report.json", false)
    }

    fn converge(&mut self, ns: &[usize], grid: &SampleArgs) -> anyhow::Result<bool> {
        let d = self.dim();
        let pts = if grid.lo.is_none() && grid.hi.is_none() && grid.step.is_none() && self.kernel.full_eval() {
            default_sample_grid(d)
        } else {
            self.points(grid, -3.0, 3.0, &vec![0.0; d])?
        };
        let card = self.cardinal()?;
        let sc = self.semicardinal()?;
        let eta = EtaFunction::new(&sc, self.cfg.eval_tail);
        let steps = self.timed("scan", |_| exhausting_scan(&eta, &card, &sc, ns, &pts))?;
        let mut head = vec!["n".to_string()];
        head.extend(axis_header("j", d));
        head.extend(["gap", "bound", "gamma_tail"].map(String::from));
        let mut t = Table::new(&head);
        let mut worst = f64::NEG_INFINITY;
        for s in &steps {
            let mut ints = vec![s.n as i64];
            ints.extend_from_slice(s.j.coords());
            t.row(&ints, &[s.gap.gap, s.gap.bound, s.gap.gamma_tail]);
            worst = worst.max(s.gap.gap - s.gap.bound);
        }
        if let Some(s) = steps.first() {
            self.report.value("eta_sup", s.gap.eta_sup);
        }
        // evaluation round-off and the truncated expansions allow a small excess
        self.report.at_most("gap_minus_bound", worst, 1e-8);
        self.out.emit("converge.csv", &t.into_string(), true)?;
        self.finish("report.json", false)
    }

    fn profiles(&mut self) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
        let card = self.cardinal()?;
        let sc = self.semicardinal()?;
        Ok((card.omega().shell_profile(), sc.gamma().shell_profile()))
    }

    fn decay(&mut self) -> anyhow::Result<bool> {
        let (omega, gamma) = self.profiles()?;
        let decay = self.kernel.decay();
        let (model, from) = if decay.is_algebraic() {
            (DecayModel::Algebraic, 4)
        } else {
            (DecayModel::Exponential, 1)
        };
        let n = self.cfg.symbol_radius;
        let mut fits = serde_json::Map::new();
        for (name, prof) in [("omega", &omega), ("gamma", &gamma)] {
            let pts: Vec<(f64, f64)> = prof
                .iter()
                .enumerate()
                .filter(|&(r, _)| r >= from && r <= n)
                .map(|(r, &v)| (r as f64, v))
                .collect();
            match fit_decay(&pts, model, None, 0.0) {
                Ok(fit) => {
                    self.report.at_least(&format!("{name}_rate_positive"), fit.fitted_rate, 0.0);
                    fits.insert(name.into(), fit_json(&fit));
                }
                Err(e) => {
                    fits.insert(name.into(), json!({ "skipped": e.to_string() }));
                }
            }
        }
        self.report.section("fits", Value::Object(fits));
        self.report.value("kernel_decay_rate", decay.rate());
        let t = profile_table(&[("omega", omega), ("gamma", gamma)]);
        self.out.emit("decay.csv", &t, false)?;
        self.finish("report.json", true)
    }

    fn verify(&mut self, window: Option<usize>, buffer: Option<usize>) -> anyhow::Result<bool> {
        let d = self.dim();
        let (dw, db) = match d {
            1 => (60, 15),
            2 => (6, 2),
            _ => (3, 1),
        };
        let (window, buffer) = (window.unwrap_or(dw), buffer.unwrap_or(db));
        if buffer >= window {
            return Err(usage("--buffer must be smaller than --window"));
        }
        let sigma = self.sigma()?;
        let card = self.cardinal()?;
        let sc = self.semicardinal()?;
        let f = &sc.factor;
        let rep = verify_factorization(&sigma, f, self.cfg.grid_size)?;
        let (tol, leak) = (self.cfg.residual_tolerance, self.cfg.leak_tolerance);
        self.report.at_most("factorization_residual", rep.residual, tol);
        self.report.at_most("support_leak", f.support_leak, leak);
        let r = if d == 1 { 10 } else { 4 };
        let dd = self.timed("cardinal_delta", |_| card.delta_defect(r))?;
        self.report.at_most("cardinal_delta", dd, 1e-7);
        let sd = self.timed("semicardinal_delta", |s| semi_delta(&sc, &s.h, r))?;
        self.report.at_most("semicardinal_delta", sd, 1e-7);
        let oc = self.timed("oracle_cardinal", |_| oracle_compare(OracleTarget::Cardinal(&card), window, buffer))?;
        self.report.at_most("oracle_cardinal", oc.deviation, 1e-6);
        let os = self.timed("oracle_semicardinal", |_| oracle_compare(OracleTarget::SemiCardinal(&sc), window, buffer))?;
        self.report.at_most("oracle_semicardinal", os.deviation, 1e-6);
        let zero = vec![0i64; d];
        self.report.value("a_0", card.coefficient(&zero));
        self.report.value("gamma_0", f.gamma0());
        self.report.value("omega_wiener", card.omega_wiener());
        self.report.value("gamma_wiener", f.wiener_norm());
        self.report.value("symbol_min", f.symbol_min);
        self.report.value("oracle_condition", os.condition);
        if self.kernel.full_eval() {
            let g = match d {
                1 => 16,
                2 => 4,
                _ => 2,
            };
            let le = self.timed("lebesgue", |_| card.lebesgue_estimate(g))?;
            self.report.at_most("lebesgue_bound", le.estimate, le.bound * (1.0 + 1e-9) + 1e-12);
            self.report.value("lebesgue_estimate", le.estimate);
            self.report.value("lebesgue_bound_value", le.bound);
        }
        self.report.section(
            "oracle",
            json!({
                "window": window,
                "buffer": buffer,
                "cardinal_size": oc.size,
                "semicardinal_size": os.size,
                "semicardinal_residual": num(os.residual),
            }),
        );
        if self.plot_data {
            let t = profile_table(&[("omega", card.omega().shell_profile()), ("gamma", sc.gamma().shell_profile())]);
            self.out.emit("profile.csv", &t, false)?;
        }
        self.finish("report.json", true)
    }
}

/// `max |χ_j(k) − δ_{jk}|` over probe centers `j` and `k ∈ H` with `‖k − j‖∞ ≤ r`.
fn semi_delta(sc: &SemiCardinalSystem, h: &HalfSpace, r: usize) -> whlattice::Result<f64> {
    let d = h.dim();
    let mut worst = 0.0f64;
    for j in probe_set(h) {
        let pts: Vec<Vec<i64>> = box_points(d, r)
            .into_iter()
            .map(|m| m.coords().iter().zip(j.coords()).map(|(a, b)| a + b).collect::<Vec<i64>>())
            .filter(|k| h.contains_raw(k))
            .collect();
        let xs: Vec<Vec<f64>> = pts.iter().map(|k| k.iter().map(|&c| c as f64).collect()).collect();
        let vals = sc.lagrange(j.coords())?.eval_many(&xs)?;
        for (k, v) in pts.iter().zip(vals) {
            let want = if k.as_slice() == j.coords() { 1.0 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    Ok(worst)
}

fn profile_table(cols: &[(&str, Vec<f64>)]) -> String {
    let mut head = vec!["r".to_string()];
    head.extend(cols.iter().map(|(n, _)| n.to_string()));
    let mut t = Table::new(&head);
    let len = cols.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    for r in 0..len {
        let row: Vec<f64> = cols.iter().map(|(_, v)| v.get(r).copied().unwrap_or(0.0)).collect();
        t.row(&[r as i64], &row);
    }
    t.into_string()
}

fn parse_index(s: &str, d: usize) -> anyhow::Result<Vec<i64>> {
    let j: Vec<i64> = s
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad lattice index '{s}'")))?;
    if j.len() != d {
        return Err(usage(format!("index '{s}' has {} coordinates, kernel dimension is {d}", j.len())));
    }
    Ok(j)
}

/// Data CSV with header `k_1,…,k_d,y`; lattice points not listed are zero.
fn read_data(path: &Path, d: usize) -> anyhow::Result<SymbolCoefficients> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').map(str::trim).collect();
    let mut want = axis_header("k", d);
    want.push("y".into());
    if header != want {
        return Err(usage(format!("{}: header must be {}", path.display(), want.join(","))));
    }
    SymbolCoefficients::read_csv(text.as_bytes()).map_err(|e| usage(format!("{}: {e}", path.display())))
}
