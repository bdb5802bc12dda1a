use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use splitlab::bundle::RepSpec;

use crate::suites::Suite;

/// Grid resolution `(Nr, Nθ, Nφ)`.
pub type Rung = [usize; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum RepEntry {
    Massive { spin: u8, mass: f64 },
    Massless { helicity: i8 },
}

impl RepEntry {
    pub fn spec(&self) -> Result<RepSpec, ConfigError> {
        let r = match *self {
            RepEntry::Massive { spin, mass } => RepSpec::massive(spin, mass),
            RepEntry::Massless { helicity } => RepSpec::massless(helicity),
        };
        r.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Strictly increasing resolutions; the last rung is the reference grid.
    pub ladder: Vec<Rung>,
    pub r_min: f64,
    pub r_max: f64,
    /// Radial resolution for the Newton-Wigner coordinate check.
    pub nw_radial: usize,
    /// Angular mesh `(Nθ, Nφ)` of the Chern lattice.
    pub chern_mesh: [usize; 2],
    pub chern_radius: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            ladder: vec![[6, 16, 32], [8, 24, 48], [12, 48, 96]],
            r_min: 1.0,
            r_max: 2.0,
            nw_radial: 12,
            chern_mesh: [48, 96],
            chern_radius: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopEntry {
    pub radius: f64,
    pub center: [f64; 3],
    pub solid_angle: f64,
}

/// Per-suite overrides of the residual thresholds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub algebra: Option<f64>,
    pub curvature: Option<f64>,
    pub flatness: Option<f64>,
    pub nw: Option<f64>,
    pub degeneracy: Option<f64>,
    pub fplus: Option<f64>,
    pub holonomy: Option<f64>,
    pub min_order: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
    /// Suites evaluated concurrently.
    pub workers: usize,
    #[serde(rename = "rep")]
    pub reps: Vec<RepEntry>,
    pub grid: GridConfig,
    #[serde(rename = "loop")]
    pub loops: Vec<LoopEntry>,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            seed: 7,
            workers: 4,
            reps: vec![
                RepEntry::Massive { spin: 0, mass: 1.0 },
                RepEntry::Massive { spin: 1, mass: 1.0 },
                RepEntry::Massless { helicity: -1 },
                RepEntry::Massless { helicity: 0 },
                RepEntry::Massless { helicity: 1 },
            ],
            grid: GridConfig::default(),
            loops: [0.01, 0.05]
                .iter()
                .map(|&a| LoopEntry { radius: 1.5, center: [0.3, 0.4, 0.8], solid_angle: a })
                .collect(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Parses TOML text; `origin` names the source in error messages, which
    /// carry line and column of the offending key.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.suites.is_empty() {
            return bad("the suite list is empty".into());
        }
        if self.reps.is_empty() {
            return bad("no representations given".into());
        }
        for r in &self.reps {
            r.spec()?;
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        let ladder = &self.grid.ladder;
        if ladder.is_empty() {
            return bad("the grid ladder is empty".into());
        }
        for w in ladder.windows(2) {
            if !(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b) && w[0] != w[1]) {
                return bad(format!("grid ladder must increase strictly: {:?} then {:?}", w[0], w[1]));
            }
        }
        if ladder.len() < 2 && self.suites.iter().any(|s| s.needs_ladder()) {
            return bad("convergence suites need at least two ladder rungs".into());
        }
        for l in &self.loops {
            if !(l.solid_angle > 0.0 && l.radius > 0.0) {
                return bad(format!("loop {l:?} needs positive radius and solid angle"));
            }
        }
        Ok(())
    }

    pub fn rep_specs(&self) -> Vec<RepSpec> {
        self.reps.iter().map(|r| r.spec().expect("validated")).collect()
    }

    pub fn reference(&self) -> Rung {
        *self.grid.ladder.last().expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml(&text, "mem").unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_location() {
        let err = RunConfig::from_toml("seed = 3\n[grid]\nr_mni = 1.0\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg.toml") && msg.contains("line 3") && msg.contains("r_mni"), "{msg}");
    }

    #[test]
    fn ladders_must_increase() {
        let cfg = RunConfig::from_toml("[grid]\nladder = [[8, 24, 48], [8, 24, 48]]\n", "x");
        assert!(matches!(cfg, Err(ConfigError::Invalid(_))));
        let one = "suites = [\"algebra\"]\n[grid]\nladder = [[8, 24, 48]]\n";
        assert!(matches!(RunConfig::from_toml(one, "x"), Err(ConfigError::Invalid(_))));
        let chern = "suites = [\"chern\"]\n[grid]\nladder = [[8, 24, 48]]\n";
        assert!(RunConfig::from_toml(chern, "x").is_ok());
    }

    #[test]
    fn empty_suite_list_is_invalid() {
        assert!(matches!(RunConfig::from_toml("suites = []\n", "x"), Err(ConfigError::Invalid(_))));
    }
}
