//! Run configuration: a flat JSON file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use whlattice::cardinal::SystemConfig;
use whlattice::kernels::Kernel;
use whlattice::lattice::{HalfSpace, LinearOrder};
use whlattice::wienerhopf::FactorConfig;

/// Usage problems: bad flags, bad config files, violated constraints. Exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Gaussian { c: f64, dim: usize },
    Matern { m: f64, dim: usize },
    Gim { c: f64, m: f64, dim: usize },
    Bspline { n: usize },
    Box222,
    Polyharmonic { m: u32, dim: usize },
    Delta { dim: usize },
}

impl KernelSpec {
    pub fn dim(&self) -> usize {
        match *self {
            KernelSpec::Gaussian { dim, .. }
            | KernelSpec::Matern { dim, .. }
            | KernelSpec::Gim { dim, .. }
            | KernelSpec::Polyharmonic { dim, .. }
            | KernelSpec::Delta { dim } => dim,
            KernelSpec::Bspline { .. } => 1,
            KernelSpec::Box222 => 2,
        }
    }

    pub fn build(&self) -> anyhow::Result<Kernel> {
        let k = match *self {
            KernelSpec::Gaussian { c, dim } => Kernel::gaussian(c, dim),
            KernelSpec::Matern { m, dim } => Kernel::matern(m, dim),
            KernelSpec::Gim { c, m, dim } => Kernel::gim(c, m, dim),
            KernelSpec::Bspline { n } => Kernel::bspline(n),
            KernelSpec::Box222 => Ok(Kernel::box_spline_222()),
            KernelSpec::Polyharmonic { m, dim } => Kernel::polyharmonic(m, dim),
            KernelSpec::Delta { dim } => Ok(Kernel::delta(dim)),
        };
        k.map_err(|e| usage(format!("kernel: {e}")))
    }

    /// Parses `family:key=value,...`, e.g. `gaussian:c=1,dim=2` or `box222`.
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut obj = serde_json::Map::new();
        obj.insert("family".into(), family.trim().into());
        for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("kernel descriptor: expected key=value, got '{kv}'")))?;
            let num: f64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("kernel descriptor: '{}' is not a number", v.trim())))?;
            // integral values stay integers so that `dim` and `n` deserialize
            let val = if num.fract() == 0.0 && num >= 0.0 {
                serde_json::Value::from(num as u64)
            } else {
                serde_json::Value::from(num)
            };
            obj.insert(k.trim().into(), val);
        }
        serde_json::from_value(obj.into()).map_err(|e| usage(format!("kernel descriptor '{s}': {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderName {
    Lex,
    GradedLex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum HalfSpaceSpec {
    Coordinate {
        axis: usize,
    },
    Order {
        order: OrderName,
        /// Axis priority for `lex`, 1-based; default `1, 2, …, d`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        priority: Option<Vec<usize>>,
    },
}

impl HalfSpaceSpec {
    /// `coordinate:2`, `lex`, `graded_lex`, `order:lex`.
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if let Some(axis) = s.strip_prefix("coordinate:") {
            let axis = axis
                .parse()
                .map_err(|_| usage(format!("half-space descriptor: bad axis '{axis}'")))?;
            return Ok(Self::Coordinate { axis });
        }
        let order = match s.strip_prefix("order:").unwrap_or(s) {
            "lex" => OrderName::Lex,
            "graded_lex" => OrderName::GradedLex,
            other => return Err(usage(format!("unknown half-space '{other}'"))),
        };
        Ok(Self::Order { order, priority: None })
    }

    pub fn build(&self, dim: usize) -> anyhow::Result<HalfSpace> {
        let h = match self {
            HalfSpaceSpec::Coordinate { axis } => HalfSpace::coordinate(dim, *axis),
            HalfSpaceSpec::Order { order: OrderName::GradedLex, .. } => HalfSpace::ordered(dim, LinearOrder::GradedLex),
            HalfSpaceSpec::Order {
                order: OrderName::Lex,
                priority,
            } => match priority {
                None => HalfSpace::ordered(dim, LinearOrder::lex(dim)),
                Some(p) => {
                    if p.contains(&0) {
                        return Err(usage("half-space priority is 1-based"));
                    }
                    LinearOrder::lex_with_priority(p.iter().map(|a| a - 1).collect())
                        .and_then(|o| HalfSpace::ordered(dim, o))
                }
            },
        };
        h.map_err(|e| usage(format!("halfspace: {e}")))
    }
}

fn d_symbol_radius() -> usize {
    40
}
fn d_grid_size() -> usize {
    512
}
fn d_eval_tail() -> f64 {
    1e-10
}
fn d_floor() -> f64 {
    whlattice::symbols::POSITIVITY_FLOOR
}
fn d_residual() -> f64 {
    1e-7
}
fn d_leak() -> f64 {
    1e-7
}
fn d_trim() -> f64 {
    1e-17
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: KernelSpec,
    /// Defaults to the coordinate half-space on the last axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspace: Option<HalfSpaceSpec>,
    #[serde(default = "d_symbol_radius")]
    pub symbol_radius: usize,
    #[serde(default = "d_grid_size")]
    pub grid_size: usize,
    #[serde(default = "d_eval_tail")]
    pub eval_tail: f64,
    #[serde(default = "d_floor")]
    pub positivity_floor: f64,
    #[serde(default = "d_residual")]
    pub residual_tolerance: f64,
    #[serde(default = "d_leak")]
    pub leak_tolerance: f64,
    #[serde(default = "d_trim")]
    pub trim_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn minimal(kernel: KernelSpec) -> Self {
        serde_json::from_value(serde_json::json!({ "kernel": kernel })).expect("defaults are valid")
    }

    pub fn halfspace_spec(&self) -> HalfSpaceSpec {
        self.halfspace.clone().unwrap_or(HalfSpaceSpec::Coordinate { axis: self.kernel.dim() })
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let tols = [
            ("eval_tail", self.eval_tail),
            ("positivity_floor", self.positivity_floor),
            ("residual_tolerance", self.residual_tolerance),
            ("leak_tolerance", self.leak_tolerance),
            ("trim_tolerance", self.trim_tolerance),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(format!("{name} must be positive, got {v}")));
            }
        }
        let side = 2 * self.symbol_radius + 1;
        if self.grid_size < 2 * side {
            return Err(usage(format!(
                "grid_size {} violates M >= 2(2N+1) = {} for symbol_radius {}",
                self.grid_size,
                2 * side,
                self.symbol_radius
            )));
        }
        self.kernel.build()?;
        self.halfspace_spec().build(self.kernel.dim())?;
        Ok(())
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            symbol_radius: self.symbol_radius,
            factor: FactorConfig {
                grid_size: self.grid_size,
                positivity_floor: self.positivity_floor,
                residual_tolerance: self.residual_tolerance,
                leak_tolerance: self.leak_tolerance,
                trim_tolerance: self.trim_tolerance,
                mode: Default::default(),
            },
            eval_tail: self.eval_tail,
        }
    }
}

/// Reads and validates a JSON config file.
pub fn parse_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}
