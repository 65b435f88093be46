//! Run configuration assembled from flags, an optional flat JSON config file
//! and the `WAVEKIT_TOL` environment variable, in that order of precedence.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{Map, Value};
use wavekit::{Dispersion, PacketParams, QuadratureSpec, ScaleFactorModel};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Nonrel,
    Lattice,
    Rel,
    Massless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Static,
    Power,
    Exponential,
    Tabulated,
}

/// Flags shared by every subcommand. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat JSON object whose keys mirror the flag names
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub dispersion: Option<KindArg>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Lattice spacing
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long = "beta-re", allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long = "beta-im", allow_negative_numbers = true)]
    pub beta_im: Option<f64>,
    #[arg(long = "x-min", allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long = "x-steps")]
    pub x_steps: Option<usize>,
    #[arg(long = "t-min", allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long = "t-max", allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long = "t-steps")]
    pub t_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Boost velocity
    #[arg(long, allow_negative_numbers = true)]
    pub boost: Option<f64>,
    /// Scale-factor model for `cosmo`
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub exponent: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Samples `t:R,t:R,...` for the tabulated model
    #[arg(long)]
    pub table: Option<String>,
    /// Relative quadrature tolerance (default from WAVEKIT_TOL, else 1e-10)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub x_values: Vec<f64>,
    pub t_values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub packet: PacketParams,
    pub grid: Grid,
    pub method: MethodArg,
    pub boost: Option<f64>,
    pub model: ScaleFactorModel,
    pub spec: QuadratureSpec,
    pub format: FormatArg,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 24] = [
    "dispersion", "mass", "spacing", "alpha", "beta-re", "beta-im", "x-min", "x-max", "x-steps", "t-min",
    "t-max", "t-steps", "method", "boost", "model", "r0", "t0", "exponent", "rate", "table", "tol", "format",
    "out", "which",
];

/// The parsed config file with keys normalised to the flag spelling.
pub struct FileConfig(Map<String, Value>);

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(FileConfig(Map::new())) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(obj) = value else {
            return Err(Failure::Config(format!("config {} must be a flat JSON object", path.display())));
        };
        let mut map = Map::new();
        for (k, v) in obj {
            let key = k.replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::Config(format!("unknown config key `{k}`")));
            }
            map.insert(key, v);
        }
        Ok(FileConfig(map))
    }

    pub fn f64(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Failure::Config(format!("config key `{key}` must be a number, got {v}"))),
        }
    }

    pub fn usize(&self, key: &str, flag: Option<usize>) -> Result<Option<usize>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| Failure::Config(format!("config key `{key}` must be a non-negative integer, got {v}"))),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, Failure> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(Failure::Config(format!("config key `{key}` must be a string, got {v}"))),
        }
    }

    pub fn choice<E: ValueEnum>(&self, key: &str, flag: Option<E>) -> Result<Option<E>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.string(key)? {
            None => Ok(None),
            Some(s) => E::from_str(&s, true)
                .map(Some)
                .map_err(|_| Failure::Config(format!("config key `{key}` has unsupported value `{s}`"))),
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn axis(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>, Failure> {
    if steps < 2 {
        return Err(Failure::Config(format!("--{name}-steps must be at least 2, got {steps}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::Config(format!("--{name}-min must be below --{name}-max (got {lo} and {hi})")));
    }
    Ok(linspace(lo, hi, steps))
}

fn parse_table(s: &str) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let mut times = Vec::new();
    let mut scales = Vec::new();
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (t, r) = pair
            .split_once(':')
            .ok_or_else(|| Failure::Config(format!("table entry `{pair}` is not of the form t:R")))?;
        let num = |v: &str| {
            v.trim().parse::<f64>().map_err(|_| Failure::Config(format!("table entry `{pair}` is not numeric")))
        };
        times.push(num(t)?);
        scales.push(num(r)?);
    }
    Ok((times, scales))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, Failure> {
        let file = FileConfig::load(args.config.as_ref())?;
        let kind = file.choice("dispersion", args.dispersion)?.unwrap_or(KindArg::Rel);
        let mass = file.f64("mass", args.mass)?;
        let spacing = file.f64("spacing", args.spacing)?.unwrap_or(1.0);
        let dispersion = match kind {
            KindArg::Nonrel => Dispersion::non_relativistic(mass.unwrap_or(3.0)),
            KindArg::Lattice => Dispersion::lattice(mass.unwrap_or(3.0), spacing),
            KindArg::Rel => Dispersion::relativistic(mass.unwrap_or(1.0)),
            KindArg::Massless => match mass {
                Some(m) if m != 0.0 => {
                    return Err(Failure::Config(format!("--mass must be 0 or omitted for massless, got {m}")))
                }
                _ => Ok(Dispersion::massless()),
            },
        }
        .map_err(|e| Failure::Config(e.to_string()))?;
        let alpha = file.f64("alpha", args.alpha)?.unwrap_or(1.0);
        let beta_r = file.f64("beta-re", args.beta_re)?.unwrap_or(0.0);
        let beta_i = file.f64("beta-im", args.beta_im)?.unwrap_or(0.0);
        let packet = PacketParams::make_minimal(dispersion, alpha, beta_r, beta_i)
            .map_err(|e| Failure::Config(format!("{e} (check --alpha, --beta-re, --beta-im)")))?;

        let x_min = file.f64("x-min", args.x_min)?.unwrap_or(-20.0);
        let x_max = file.f64("x-max", args.x_max)?.unwrap_or(30.0);
        let x_steps = file.usize("x-steps", args.x_steps)?.unwrap_or(501);
        let t_min = file.f64("t-min", args.t_min)?.unwrap_or(0.0);
        let t_max = file.f64("t-max", args.t_max)?.unwrap_or(10.0);
        let t_steps = file.usize("t-steps", args.t_steps)?.unwrap_or(21);
        let mut x_values = axis(x_min, x_max, x_steps, "x")?;
        if let Dispersion::Lattice { spacing, .. } = dispersion {
            let first = (x_min / spacing).ceil() as i64;
            let last = (x_max / spacing).floor() as i64;
            x_values = (first..=last).map(|n| n as f64 * spacing).collect();
            if x_values.len() < 2 {
                return Err(Failure::Config(format!(
                    "lattice grid [{x_min}, {x_max}] holds fewer than two sites of spacing {spacing}"
                )));
            }
        }
        let t_values = axis(t_min, t_max, t_steps, "t")?;

        let method = file.choice("method", args.method)?.unwrap_or(MethodArg::Closed);
        let boost = file.f64("boost", args.boost)?;
        if let Some(u) = boost {
            if !(u.abs() < 1.0) {
                return Err(Failure::Config(format!("--boost must satisfy |u| < 1, got {u}")));
            }
        }

        let model_kind = file.choice("model", args.model)?.unwrap_or(ModelArg::Static);
        let r0 = file.f64("r0", args.r0)?.unwrap_or(1.0);
        let model = match model_kind {
            ModelArg::Static => Ok(ScaleFactorModel::static_universe()),
            ModelArg::Power => ScaleFactorModel::power_law(
                r0,
                file.f64("t0", args.t0)?.unwrap_or(1.0),
                file.f64("exponent", args.exponent)?.unwrap_or(2.0 / 3.0),
            ),
            ModelArg::Exponential => ScaleFactorModel::exponential(r0, file.f64("rate", args.rate)?.unwrap_or(0.1)),
            ModelArg::Tabulated => {
                let table = match &args.table {
                    Some(t) => t.clone(),
                    None => file
                        .string("table")?
                        .ok_or_else(|| Failure::Config("--model tabulated needs --table t:R,t:R,...".into()))?,
                };
                let (times, scales) = parse_table(&table)?;
                ScaleFactorModel::tabulated(times, scales)
            }
        }
        .map_err(|e| Failure::Config(e.to_string()))?;

        let tol = match file.f64("tol", args.tol)? {
            Some(t) => Some(t),
            None => match std::env::var("WAVEKIT_TOL") {
                Ok(s) => Some(
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Failure::Config(format!("WAVEKIT_TOL must be a number, got `{s}`")))?,
                ),
                Err(_) => None,
            },
        };
        let mut spec = QuadratureSpec::default();
        if let Some(t) = tol {
            spec = spec.with_relative_tolerance(t);
        }
        spec.validate().map_err(|e| Failure::Config(format!("{e} (check --tol)")))?;

        let format = file.choice("format", args.format)?.unwrap_or(FormatArg::Csv);
        let out = match &args.out {
            Some(p) => Some(p.clone()),
            None => file.string("out")?.map(PathBuf::from),
        };
        Ok(RunConfig { packet, grid: Grid { x_values, t_values }, method, boost, model, spec, format, out })
    }
}
