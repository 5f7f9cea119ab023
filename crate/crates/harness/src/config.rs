//! Experiment configuration: a TOML file with one flat section per mode.
//!
//! Every key has a default, so the resolved configuration (echoed into each report) is
//! the only source of parameter values.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Retrain,
    Minimax,
    Estimator,
    Lowerbound,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Retrain => "retrain",
            Mode::Minimax => "minimax",
            Mode::Estimator => "estimator",
            Mode::Lowerbound => "lowerbound",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retrain" => Ok(Mode::Retrain),
            "minimax" => Ok(Mode::Minimax),
            "estimator" => Ok(Mode::Estimator),
            "lowerbound" => Ok(Mode::Lowerbound),
            other => Err(format!(
                "unknown mode {other:?} (expected retrain, minimax, estimator or lowerbound)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Robust,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Oftrl,
    Omda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Bilinear,
    Scc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Bias,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateChoice {
    MaxSpeed,
    MinFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub width: usize,
    pub gamma: f64,
    pub c_p: f64,
    /// Optional reward table file, relative to the config file.
    pub reward_table: Option<PathBuf>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { width: 8, gamma: 0.99, c_p: 1.0, reward_table: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContaminationSection {
    pub epsilon: f64,
    /// Mean of the Gaussian reward shift.
    pub z: f64,
    pub sigma: f64,
    /// Decay of the next-state replacement kernel.
    pub kappa: f64,
}

impl Default for ContaminationSection {
    fn default() -> Self {
        Self { epsilon: 0.01, z: 15.0, sigma: 0.5, kappa: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrainSection {
    pub rounds: usize,
    pub iterations: usize,
    pub samples: usize,
    pub lambda: f64,
    pub mixing: f64,
    /// `2R/(1−γ)` of each round's model when absent.
    pub h_max: Option<f64>,
    pub estimator: Estimator,
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
    pub evaluate_gap: bool,
    /// Monte-Carlo check of the final occupancy (0 trajectories disables it).
    pub mc_trajectories: usize,
    pub mc_horizon: usize,
}

impl Default for RetrainSection {
    fn default() -> Self {
        Self {
            rounds: 25,
            iterations: 2000,
            samples: 1_000_000,
            lambda: 0.001,
            mixing: 1.0,
            h_max: None,
            estimator: Estimator::Robust,
            alpha: 0.01,
            b: 1e-4,
            c: 1e-4,
            evaluate_gap: true,
            mc_trajectories: 1000,
            mc_horizon: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimaxSection {
    pub objective: ObjectiveKind,
    pub solver: Solver,
    pub iterations: usize,
    pub dim: usize,
    /// Half-width of the box `[−r, r]^dim` for both players.
    pub radius: f64,
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
    pub gap_every: usize,
    pub noise: NoiseKind,
    /// Bias norm, or per-coordinate standard deviation for Gaussian noise.
    pub z: f64,
    pub rate: RateChoice,
    pub eta: Option<f64>,
    pub spms_c: f64,
}

impl Default for MinimaxSection {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Bilinear,
            solver: Solver::Oftrl,
            iterations: 2000,
            dim: 2,
            radius: 1.0,
            alpha: 1.0,
            b: 0.1,
            c: 0.1,
            gap_every: 10,
            noise: NoiseKind::None,
            z: 0.0,
            rate: RateChoice::MaxSpeed,
            eta: None,
            spms_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    /// Size of the random MDP whose `d`-gradient samples are averaged.
    pub states: usize,
    pub actions: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub h_max: f64,
    /// Batch size `m̃`.
    pub samples: usize,
    pub epsilons: Vec<f64>,
    /// Reward shifts applied to corrupted samples.
    pub magnitudes: Vec<f64>,
    pub delta: f64,
    pub mdp_seed: u64,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            states: 4,
            actions: 2,
            gamma: 0.9,
            lambda: 0.01,
            h_max: 20.0,
            samples: 2000,
            epsilons: vec![0.02, 0.05, 0.1, 0.15, 0.2],
            magnitudes: vec![1e3, 1e4],
            delta: 0.05,
            mdp_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerboundSection {
    pub dim: usize,
    pub radius: f64,
    /// `(Z_X, Z_Y)` pairs.
    pub noise_levels: Vec<[f64; 2]>,
    pub solvers: Vec<Solver>,
    pub iterations: usize,
}

impl Default for LowerboundSection {
    fn default() -> Self {
        Self {
            dim: 2,
            radius: 4.0,
            noise_levels: vec![[0.1, 0.1], [0.5, 0.2], [1.0, 1.0]],
            solvers: vec![Solver::Oftrl, Solver::Omda],
            iterations: 2000,
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub contamination: ContaminationSection,
    #[serde(default)]
    pub retrain: RetrainSection,
    #[serde(default)]
    pub minimax: MinimaxSection,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub lowerbound: LowerboundSection,
    /// Directory that relative file references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}

impl ExperimentConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            seeds: default_seeds(),
            grid: GridSection::default(),
            contamination: ContaminationSection::default(),
            retrain: RetrainSection::default(),
            minimax: MinimaxSection::default(),
            estimator: EstimatorSection::default(),
            lowerbound: LowerboundSection::default(),
            base_dir: PathBuf::from("."),
        }
    }

    /// Parses and validates `text`; errors carry the offending line when known.
    /// `mode` overrides (or supplies) the file's `mode` key.
    pub fn parse(text: &str, base_dir: &Path, mode: Option<Mode>) -> Result<Self, HarnessError> {
        let (source, offset) = match mode {
            Some(m) => override_mode(text, m),
            None => (text.to_string(), 0),
        };
        let mut cfg: ExperimentConfig = toml::from_str(&source).map_err(|e| {
            let mut err = parse_error(&source, &e);
            err.line = err.line.map(|l| l.saturating_sub(offset).max(1));
            if err.message.contains("missing field `mode`") {
                err = ConfigError::new(None, "missing `mode` (set it in the file or pass --mode)");
            }
            err
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path, mode: Option<Mode>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(None, format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &dir, mode)
    }

    pub fn reward_table_path(&self) -> Option<PathBuf> {
        self.grid.reward_table.as_ref().map(|p| self.base_dir.join(p))
    }

    /// Checks every parameter domain. `text` is the source used for line lookup (may be empty).
    pub fn validate(&self, text: &str) -> Result<(), ConfigError> {
        let err = |section: &str, key: &str, msg: String| ConfigError::new(find_key(text, section, key), format!("{section}.{key}: {msg}"));
        let positive = |section: &str, key: &str, v: f64| {
            if v > 0.0 && v.is_finite() { Ok(()) } else { Err(err(section, key, format!("must be positive, got {v}"))) }
        };
        let count = |section: &str, key: &str, v: usize| {
            if v > 0 { Ok(()) } else { Err(err(section, key, "must be at least 1".into())) }
        };
        let level = |section: &str, key: &str, v: f64| {
            if (0.0..0.5).contains(&v) { Ok(()) } else { Err(err(section, key, format!("must lie in [0, 0.5), got {v}"))) }
        };
        let discount = |section: &str, key: &str, v: f64| {
            if (0.0..1.0).contains(&v) { Ok(()) } else { Err(err(section, key, format!("must lie in [0, 1), got {v}"))) }
        };

        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(err("", "seeds", "seeds must be distinct".into()));
        }

        let g = &self.grid;
        if g.width < 2 {
            return Err(err("grid", "width", format!("must be at least 2, got {}", g.width)));
        }
        discount("grid", "gamma", g.gamma)?;
        if !g.c_p.is_finite() {
            return Err(err("grid", "c_p", "must be finite".into()));
        }
        if let Some(p) = self.reward_table_path() {
            if !p.is_file() {
                return Err(err("grid", "reward_table", format!("file {} does not exist", p.display())));
            }
            let text = std::fs::read_to_string(&p)
                .map_err(|e| err("grid", "reward_table", format!("cannot read {}: {e}", p.display())))?;
            match perfoptrl_core::envs::parse_reward_table::<f64>(&text) {
                Ok((w, _)) if w == g.width => {}
                Ok((w, _)) => {
                    return Err(err("grid", "reward_table", format!("table is {w}×{w} but grid.width = {}", g.width)))
                }
                Err(e) => return Err(err("grid", "reward_table", format!("{}: {e}", p.display()))),
            }
        }

        let c = &self.contamination;
        level("contamination", "epsilon", c.epsilon)?;
        if !c.z.is_finite() {
            return Err(err("contamination", "z", "must be finite".into()));
        }
        positive("contamination", "sigma", c.sigma)?;
        positive("contamination", "kappa", c.kappa)?;

        let r = &self.retrain;
        count("retrain", "rounds", r.rounds)?;
        count("retrain", "iterations", r.iterations)?;
        if r.samples < 2 * r.iterations {
            return Err(err("retrain", "samples", format!("{} samples cannot fill {} batches", r.samples, 2 * r.iterations)));
        }
        for (k, v) in [("lambda", r.lambda), ("mixing", r.mixing), ("alpha", r.alpha), ("b", r.b), ("c", r.c)] {
            positive("retrain", k, v)?;
        }
        if let Some(h) = r.h_max {
            positive("retrain", "h_max", h)?;
        }
        if r.mc_trajectories > 0 {
            count("retrain", "mc_horizon", r.mc_horizon)?;
        }

        let m = &self.minimax;
        count("minimax", "iterations", m.iterations)?;
        count("minimax", "dim", m.dim)?;
        count("minimax", "gap_every", m.gap_every)?;
        for (k, v) in [("radius", m.radius), ("alpha", m.alpha), ("b", m.b), ("c", m.c), ("spms_c", m.spms_c)] {
            positive("minimax", k, v)?;
        }
        if !(m.z >= 0.0 && m.z.is_finite()) {
            return Err(err("minimax", "z", format!("must be non-negative, got {}", m.z)));
        }
        if let Some(eta) = m.eta {
            // OMDA operators of the shipped objectives are 1-Lipschitz
            if !(eta > 0.0 && eta <= 0.125) {
                return Err(err("minimax", "eta", format!("must lie in (0, 1/8], got {eta}")));
            }
        }

        let e = &self.estimator;
        count("estimator", "states", e.states)?;
        count("estimator", "actions", e.actions)?;
        if e.samples < 2 {
            return Err(err("estimator", "samples", "need at least 2 samples".into()));
        }
        if !(e.gamma > 0.0 && e.gamma < 1.0) {
            return Err(err("estimator", "gamma", format!("must lie in (0, 1), got {}", e.gamma)));
        }
        positive("estimator", "lambda", e.lambda)?;
        positive("estimator", "h_max", e.h_max)?;
        if !(e.delta > 0.0 && e.delta < 1.0) {
            return Err(err("estimator", "delta", format!("must lie in (0, 1), got {}", e.delta)));
        }
        if e.epsilons.is_empty() {
            return Err(err("estimator", "epsilons", "need at least one level".into()));
        }
        for &eps in &e.epsilons {
            level("estimator", "epsilons", eps)?;
        }
        for &mag in &e.magnitudes {
            if !mag.is_finite() {
                return Err(err("estimator", "magnitudes", "must be finite".into()));
            }
        }

        let l = &self.lowerbound;
        count("lowerbound", "dim", l.dim)?;
        count("lowerbound", "iterations", l.iterations)?;
        positive("lowerbound", "radius", l.radius)?;
        for &[zx, zy] in &l.noise_levels {
            if !(zx >= 0.0 && zy >= 0.0 && zx <= l.radius / 2.0 && zy <= l.radius / 2.0) {
                return Err(err("lowerbound", "noise_levels", format!("({zx}, {zy}) must lie in [0, radius/2]")));
            }
        }
        if l.solvers.is_empty() {
            return Err(err("lowerbound", "solvers", "need at least one solver".into()));
        }
        Ok(())
    }
}

/// A configuration problem, with the 1-based source line when it could be located.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Replaces the top-level `mode = …` line, or prepends one (returning the line shift).
fn override_mode(text: &str, mode: Mode) -> (String, usize) {
    let line = format!("mode = \"{}\"", mode.name());
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for l in lines.iter_mut() {
        let t = l.trim_start();
        if t.starts_with('[') {
            break;
        }
        if t.strip_prefix("mode").is_some_and(|r| r.trim_start().starts_with('=')) {
            *l = line;
            return (lines.join("\n") + "\n", 0);
        }
    }
    (format!("{line}\n{text}"), 1)
}

fn parse_error(text: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    ConfigError::new(line, e.message().trim().to_string())
}

/// Line of `key = …` inside `[section]` (`""` for top-level keys).
fn find_key(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}
