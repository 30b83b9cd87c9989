//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment. Omitted rate constants take
//! their default values; `gamma`, `eta`, `theta_C` and `theta_T` have no
//! default and must be given. Every key is listed in [`KEYS`].

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coevo_core::analysis::{PeakConfig, DEFAULT_M_MAX, DEFAULT_PATTERN_M_MAX};
use coevo_core::pde::PdeSolver;
use coevo_core::{Grid, Initial, Params};

use crate::error::{HarnessError, Result};

/// Recognised keys, in the order [`ExperimentConfig::to_config_string`]
/// writes them.
pub const KEYS: &[&str] = &[
    "name",
    "alpha_C",
    "alpha_T",
    "mu_C",
    "mu_T",
    "zeta_C",
    "zeta_T",
    "gamma",
    "eta",
    "theta_C",
    "theta_T",
    "lambda_C",
    "tau",
    "t_final",
    "L",
    "n_sites",
    "amplitude",
    "wavenumber",
    "engine",
    "replicates",
    "seed",
    "snapshots",
    "out",
    "peak_width_fraction",
    "peak_min_width",
    "peak_rel_height",
    "peak_rel_prominence",
    "pattern_m_max",
    "dispersion_m_max",
];

const REQUIRED: &[&str] = &["gamma", "eta", "theta_C", "theta_T"];

pub const DEFAULT_REPLICATES: usize = 5;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SNAPSHOTS: [f64; 5] = [0.4, 4.0, 10.0, 16.0, 30.0];
pub const DEFAULT_SITES: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Ibm,
    Pde,
    Both,
}

impl Engine {
    pub fn runs_ibm(self) -> bool {
        matches!(self, Engine::Ibm | Engine::Both)
    }

    pub fn runs_pde(self) -> bool {
        matches!(self, Engine::Pde | Engine::Both)
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ibm" => Ok(Engine::Ibm),
            "pde" => Ok(Engine::Pde),
            "both" => Ok(Engine::Both),
            _ => Err(format!("engine must be ibm, pde or both, got {s:?}")),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Ibm => "ibm",
            Engine::Pde => "pde",
            Engine::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Free-form label, e.g. the preset name.
    pub name: String,
    pub params: Params,
    pub half_width: f64,
    pub n_sites: usize,
    pub init: Initial,
    pub engine: Engine,
    pub replicates: usize,
    pub seed: u64,
    pub snapshot_times: Vec<f64>,
    pub out_dir: PathBuf,
    pub peaks: PeakConfig,
    pub pattern_m_max: usize,
    pub dispersion_m_max: usize,
}

impl ExperimentConfig {
    /// Default rates with the four scenario parameters supplied.
    pub fn new(gamma: f64, eta: f64, theta_c: f64, theta_t: f64) -> Self {
        Self {
            name: String::new(),
            params: Params::with_default_rates(gamma, eta, theta_c, theta_t),
            half_width: 1.0,
            n_sites: DEFAULT_SITES,
            init: Initial::homogeneous(),
            engine: Engine::Both,
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            snapshot_times: DEFAULT_SNAPSHOTS.to_vec(),
            out_dir: PathBuf::from("out"),
            peaks: PeakConfig::default(),
            pattern_m_max: DEFAULT_PATTERN_M_MAX,
            dispersion_m_max: DEFAULT_M_MAX,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.half_width, self.n_sites)?)
    }

    /// Parses and validates a configuration; `origin` labels errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = Self::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key {key}")));
            }
            cfg.set(key, value).map_err(err)?;
        }
        for key in REQUIRED {
            if !seen.contains(*key) {
                return Err(HarnessError::Config(format!("{key} required")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one key from its textual value. Used by the parser and by
    /// parameter sweeps; does not validate cross-field constraints.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("{key}: cannot parse {value:?}"))
        }
        let p = &mut self.params;
        match key {
            "name" => self.name = value.to_string(),
            "alpha_C" => p.alpha_c = num(key, value)?,
            "alpha_T" => p.alpha_t = num(key, value)?,
            "mu_C" => p.mu_c = num(key, value)?,
            "mu_T" => p.mu_t = num(key, value)?,
            "zeta_C" => p.zeta_c = num(key, value)?,
            "zeta_T" => p.zeta_t = num(key, value)?,
            "gamma" => p.gamma = num(key, value)?,
            "eta" => p.eta = num(key, value)?,
            "theta_C" => p.theta_c = num(key, value)?,
            "theta_T" => p.theta_t = num(key, value)?,
            "lambda_C" => p.lambda_c = num(key, value)?,
            "tau" => p.tau = num(key, value)?,
            "t_final" => p.t_final = num(key, value)?,
            "L" => self.half_width = num(key, value)?,
            "n_sites" => self.n_sites = num(key, value)?,
            "amplitude" => self.init.amplitude = num(key, value)?,
            "wavenumber" => self.init.wavenumber = num(key, value)?,
            "engine" => self.engine = value.parse()?,
            "replicates" => self.replicates = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "snapshots" => {
                self.snapshot_times = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| num(key, s))
                    .collect::<Result<_, _>>()?;
            }
            "out" => self.out_dir = PathBuf::from(value),
            "peak_width_fraction" => self.peaks.width_fraction = num(key, value)?,
            "peak_min_width" => self.peaks.min_width = num(key, value)?,
            "peak_rel_height" => self.peaks.rel_height = num(key, value)?,
            "peak_rel_prominence" => self.peaks.rel_prominence = num(key, value)?,
            "pattern_m_max" => self.pattern_m_max = num(key, value)?,
            "dispersion_m_max" => self.dispersion_m_max = num(key, value)?,
            _ => return Err(format!("unknown key {key}")),
        }
        Ok(())
    }

    /// Current value of a numeric model parameter, for sweeps.
    pub fn get(&self, key: &str) -> Option<f64> {
        let p = &self.params;
        Some(match key {
            "alpha_C" => p.alpha_c,
            "alpha_T" => p.alpha_t,
            "mu_C" => p.mu_c,
            "mu_T" => p.mu_t,
            "zeta_C" => p.zeta_c,
            "zeta_T" => p.zeta_t,
            "gamma" => p.gamma,
            "eta" => p.eta,
            "theta_C" => p.theta_c,
            "theta_T" => p.theta_t,
            "lambda_C" => p.lambda_c,
            "tau" => p.tau,
            "t_final" => p.t_final,
            "amplitude" => self.init.amplitude,
            "wavenumber" => self.init.wavenumber,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.params.validate(&grid)?;
        self.init.validate()?;
        if self.replicates < 1 {
            return Err(HarnessError::Config("replicates must be at least 1".into()));
        }
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.params.t_final) {
                return Err(HarnessError::Config(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.params.t_final
                )));
            }
        }
        let pk = &self.peaks;
        if !(pk.width_fraction >= 0.0 && pk.width_fraction <= 1.0)
            || !(0.0..=1.0).contains(&pk.rel_height)
            || !(0.0..=1.0).contains(&pk.rel_prominence)
        {
            return Err(HarnessError::Config(
                "peak fractions must lie in [0, 1]".into(),
            ));
        }
        if self.pattern_m_max < 1 || self.dispersion_m_max < 1 {
            return Err(HarnessError::Config("mode cutoffs must be at least 1".into()));
        }
        if self.engine.runs_pde() {
            PdeSolver::new(self.params.clone(), grid, None)?;
        }
        Ok(())
    }

    /// Full `key = value` listing that [`ExperimentConfig::parse`] reads back
    /// to an identical configuration.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let snaps = self
            .snapshot_times
            .iter()
            .map(|t| format!("{t:?}"))
            .collect::<Vec<_>>()
            .join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("name", self.name.clone());
        for (k, v) in [
            ("alpha_C", p.alpha_c),
            ("alpha_T", p.alpha_t),
            ("mu_C", p.mu_c),
            ("mu_T", p.mu_t),
            ("zeta_C", p.zeta_c),
            ("zeta_T", p.zeta_t),
            ("gamma", p.gamma),
            ("eta", p.eta),
            ("theta_C", p.theta_c),
            ("theta_T", p.theta_t),
            ("lambda_C", p.lambda_c),
            ("tau", p.tau),
            ("t_final", p.t_final),
            ("L", self.half_width),
        ] {
            put(k, format!("{v:?}"));
        }
        put("n_sites", self.n_sites.to_string());
        put("amplitude", format!("{:?}", self.init.amplitude));
        put("wavenumber", format!("{:?}", self.init.wavenumber));
        put("engine", self.engine.to_string());
        put("replicates", self.replicates.to_string());
        put("seed", self.seed.to_string());
        put("snapshots", snaps);
        put("out", self.out_dir.display().to_string());
        put("peak_width_fraction", format!("{:?}", self.peaks.width_fraction));
        put("peak_min_width", self.peaks.min_width.to_string());
        put("peak_rel_height", format!("{:?}", self.peaks.rel_height));
        put("peak_rel_prominence", format!("{:?}", self.peaks.rel_prominence));
        put("pattern_m_max", self.pattern_m_max.to_string());
        put("dispersion_m_max", self.dispersion_m_max.to_string());
        s
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    ExperimentConfig::parse(&text, &path.display().to_string())
}
