//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Unknown keys and repeated keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use slitsim_core::{
    DetectorRule, EmissionMode, EmissionSpec, FieldParams, Geometry, HistogramSpec, StepParams,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionKind {
    Random,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub charge_product: f64,
    pub slit_half_height: f64,
    pub emitter_distance: f64,
    pub screen_gap: f64,
    pub particle_radius: f64,
    pub y_bound: f64,
    pub max_steps: usize,
    pub detector_rule: DetectorRule,
    pub tau: f64,
    pub mass: f64,
    pub v0: f64,
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
    pub emission: EmissionKind,
    pub n: u64,
    pub trace_n: u64,
    pub seed: u64,
    pub bin_width: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub tau_list: Vec<f64>,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub window: usize,
    pub k_sigma: f64,
    pub record: bool,
}

/// Every accepted key with a one-line description, in file order.
pub const KEYS: &[(&str, &str)] = &[
    (
        "charge_product",
        "q·σ, negative for attraction (default -1)",
    ),
    ("slit_half_height", "slit half-height R (default 5)"),
    (
        "emitter_distance",
        "emitter to slit screen distance D (default 5)",
    ),
    (
        "screen_gap",
        "slit screen to detector distance d (default 25)",
    ),
    ("particle_radius", "particle radius r (default 0.2)"),
    ("y_bound", "escape bound on |y| (default 50)"),
    ("max_steps", "step budget per trajectory (default 1000000)"),
    (
        "detector_rule",
        "first_tick | interpolated (default first_tick)",
    ),
    ("tau", "discrete time step (default 0.05)"),
    ("mass", "particle mass (default 2)"),
    ("v0", "launch speed (default 12)"),
    (
        "alpha_min_deg",
        "lowest launch angle in degrees (default -45.5)",
    ),
    (
        "alpha_max_deg",
        "highest launch angle in degrees (default 45.5)",
    ),
    ("emission", "random | sweep (default random)"),
    ("n", "trajectories per ensemble (default 10000)"),
    ("trace_n", "trajectories drawn by trace (default 250)"),
    ("seed", "64-bit seed for random emission (default 42)"),
    ("bin_width", "histogram bin width (default 0.4)"),
    ("y_min", "histogram lower edge (default -25)"),
    ("y_max", "histogram upper edge (default 25)"),
    (
        "tau_list",
        "comma-separated non-increasing steps for sweep-tau (default 0.05,0.01,0.001)",
    ),
    ("output_dir", "directory for emitted files (default out)"),
    ("workers", "worker threads (default: available cores)"),
    ("window", "smoothing window in bins for extrema (default 5)"),
    (
        "k_sigma",
        "prominence threshold in Poisson sigmas (default 5)",
    ),
    (
        "record",
        "keep trajectory paths, required by trace (default true)",
    ),
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let g = Geometry::appendix();
        let h = HistogramSpec::appendix();
        ExperimentConfig {
            charge_product: -1.0,
            slit_half_height: g.slit_half_height,
            emitter_distance: g.emitter_distance,
            screen_gap: g.screen_gap,
            particle_radius: g.particle_radius,
            y_bound: g.y_bound,
            max_steps: g.max_steps,
            detector_rule: g.detector,
            tau: 0.05,
            mass: StepParams::DEFAULT_MASS,
            v0: 12.0,
            alpha_min_deg: -45.5,
            alpha_max_deg: 45.5,
            emission: EmissionKind::Random,
            n: 10_000,
            trace_n: 250,
            seed: 42,
            bin_width: h.bin_width,
            y_min: h.y_min,
            y_max: h.y_max,
            tau_list: vec![0.05, 0.01, 0.001],
            output_dir: PathBuf::from("out"),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            window: 5,
            k_sigma: 5.0,
            record: true,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("bad value {value:?} for {key}: {e}"))
}

fn parse_count(key: &str, value: &str) -> std::result::Result<u64, String> {
    // Accept 1e6 style counts as long as they are whole numbers.
    if let Ok(v) = value.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = parse(key, value)?;
    if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(format!("bad value {value:?} for {key}: not a whole count"))
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "charge_product" => self.charge_product = parse(key, value)?,
            "slit_half_height" => self.slit_half_height = parse(key, value)?,
            "emitter_distance" => self.emitter_distance = parse(key, value)?,
            "screen_gap" => self.screen_gap = parse(key, value)?,
            "particle_radius" => self.particle_radius = parse(key, value)?,
            "y_bound" => self.y_bound = parse(key, value)?,
            "max_steps" => self.max_steps = parse_count(key, value)? as usize,
            "detector_rule" => {
                self.detector_rule = match value {
                    "first_tick" => DetectorRule::FirstTick,
                    "interpolated" => DetectorRule::Interpolated,
                    _ => {
                        return Err(format!(
                            "detector_rule must be first_tick or interpolated, got {value:?}"
                        ))
                    }
                }
            }
            "tau" => self.tau = parse(key, value)?,
            "mass" => self.mass = parse(key, value)?,
            "v0" => self.v0 = parse(key, value)?,
            "alpha_min_deg" => self.alpha_min_deg = parse(key, value)?,
            "alpha_max_deg" => self.alpha_max_deg = parse(key, value)?,
            "emission" => {
                self.emission = match value {
                    "random" => EmissionKind::Random,
                    "sweep" => EmissionKind::Sweep,
                    _ => return Err(format!("emission must be random or sweep, got {value:?}")),
                }
            }
            "n" => self.n = parse_count(key, value)?,
            "trace_n" => self.trace_n = parse_count(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "bin_width" => self.bin_width = parse(key, value)?,
            "y_min" => self.y_min = parse(key, value)?,
            "y_max" => self.y_max = parse(key, value)?,
            "tau_list" => {
                self.tau_list = value
                    .split(',')
                    .map(|s| parse::<f64>(key, s.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "workers" => self.workers = parse_count(key, value)? as usize,
            "window" => self.window = parse_count(key, value)? as usize,
            "k_sigma" => self.k_sigma = parse(key, value)?,
            "record" => self.record = parse(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Parses config text on top of the defaults. `origin` names the source
    /// in error messages.
    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |msg: String| CliError::ConfigLine {
                path: origin.to_path_buf(),
                line: i + 1,
                msg,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            cfg.set(key, value).map_err(err)?;
            seen.push(key.to_string());
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse_str(&text, path)
    }

    pub fn field(&self) -> Result<FieldParams> {
        Ok(FieldParams::new(
            self.charge_product,
            self.slit_half_height,
        )?)
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            emitter_distance: self.emitter_distance,
            screen_gap: self.screen_gap,
            slit_half_height: self.slit_half_height,
            particle_radius: self.particle_radius,
            y_bound: self.y_bound,
            max_steps: self.max_steps,
            detector: self.detector_rule,
        }
    }

    pub fn step_params(&self, tau: f64) -> Result<StepParams> {
        Ok(StepParams::new(tau, self.mass)?)
    }

    pub fn emission_spec(&self, kind: EmissionKind, n: u64) -> EmissionSpec {
        EmissionSpec {
            v0: self.v0,
            alpha_min: self.alpha_min_deg.to_radians(),
            alpha_max: self.alpha_max_deg.to_radians(),
            mode: match kind {
                EmissionKind::Random => EmissionMode::Random { seed: self.seed, n },
                EmissionKind::Sweep => EmissionMode::Sweep { n },
            },
        }
    }

    pub fn histogram(&self) -> HistogramSpec {
        HistogramSpec {
            bin_width: self.bin_width,
            y_min: self.y_min,
            y_max: self.y_max,
        }
    }

    /// Re-checks every parameter against the library's invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        let f = self.field()?;
        let g = self.geometry();
        g.validate()?;
        g.check_field(&f)?;
        self.step_params(self.tau)?;
        self.emission_spec(self.emission, self.n.max(1))
            .validate()?;
        self.histogram().validate()?;
        if self.tau_list.is_empty() {
            return bad("tau_list must not be empty");
        }
        for &t in &self.tau_list {
            self.step_params(t)?;
        }
        if self.tau_list.windows(2).any(|w| w[1] > w[0]) {
            return bad("tau_list must be non-increasing");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.window == 0 || self.window.is_multiple_of(2) {
            return bad("window must be an odd positive bin count");
        }
        if !(self.k_sigma > 0.0 && self.k_sigma.is_finite()) {
            return bad("k_sigma must be positive");
        }
        Ok(())
    }

    /// The configuration as config-file text; parsing it back gives `self`.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let rule = match self.detector_rule {
            DetectorRule::FirstTick => "first_tick",
            DetectorRule::Interpolated => "interpolated",
        };
        let emission = match self.emission {
            EmissionKind::Random => "random",
            EmissionKind::Sweep => "sweep",
        };
        let taus: Vec<String> = self.tau_list.iter().map(|t| format!("{t:?}")).collect();
        let pairs: [(&str, String); 26] = [
            ("charge_product", format!("{:?}", self.charge_product)),
            ("slit_half_height", format!("{:?}", self.slit_half_height)),
            ("emitter_distance", format!("{:?}", self.emitter_distance)),
            ("screen_gap", format!("{:?}", self.screen_gap)),
            ("particle_radius", format!("{:?}", self.particle_radius)),
            ("y_bound", format!("{:?}", self.y_bound)),
            ("max_steps", self.max_steps.to_string()),
            ("detector_rule", rule.to_string()),
            ("tau", format!("{:?}", self.tau)),
            ("mass", format!("{:?}", self.mass)),
            ("v0", format!("{:?}", self.v0)),
            ("alpha_min_deg", format!("{:?}", self.alpha_min_deg)),
            ("alpha_max_deg", format!("{:?}", self.alpha_max_deg)),
            ("emission", emission.to_string()),
            ("n", self.n.to_string()),
            ("trace_n", self.trace_n.to_string()),
            ("seed", self.seed.to_string()),
            ("bin_width", format!("{:?}", self.bin_width)),
            ("y_min", format!("{:?}", self.y_min)),
            ("y_max", format!("{:?}", self.y_max)),
            ("tau_list", taus.join(",")),
            ("output_dir", self.output_dir.display().to_string()),
            ("workers", self.workers.to_string()),
            ("window", self.window.to_string()),
            ("k_sigma", format!("{:?}", self.k_sigma)),
            ("record", self.record.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Config-key reference appended to `--help`.
pub fn keys_help() -> String {
    let mut s = String::from("Config file keys (key = value, # comments):\n");
    for (k, d) in KEYS {
        let _ = writeln!(s, "  {k:<18} {d}");
    }
    s
}
