//! Run configuration, read from JSON and overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hypergeo::Hypergeometric;
use crate::rootsys::{build_root_system, MultiplicityFunction, RootSystemType};
use crate::testfn::TestFunction;
use crate::transform::{GridSpec, Scheme};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: Option<usize>,
    pub scheme: Option<Scheme>,
    /// Spatial box radius; the heuristic for the test function when unset.
    pub radius: Option<f64>,
    /// Spectral box radius; the heuristic for the test function when unset.
    pub spectral_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub root_system: RootSystemType,
    pub scale: f64,
    /// One value per W-orbit of roots (a single value is used for every orbit).
    pub multiplicities: Vec<f64>,
    pub grid: GridConfig,
    pub times: Vec<f64>,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub test_function: TestFunction,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            root_system: RootSystemType::A1,
            scale: 1.0,
            multiplicities: vec![2.0],
            grid: GridConfig::default(),
            times: vec![0.1, 0.5, 1.0],
            tolerances: BTreeMap::new(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            test_function: TestFunction::gaussian(1.0),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {}", self.scale)));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidInput(format!("tolerance {k} must be positive, got {v}")));
        }
        if let Some(t) = self.times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidInput(format!("times must be positive, got {t}")));
        }
        for r in [self.grid.radius, self.grid.spectral_radius].into_iter().flatten() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!("grid radii must be positive, got {r}")));
            }
        }
        self.test_function.validate()
    }

    pub fn context(&self) -> Result<Hypergeometric> {
        let rs = build_root_system(self.root_system, self.scale)?;
        let m = MultiplicityFunction::from_slice(&rs, &self.multiplicities)?;
        Hypergeometric::new(rs, m)
    }

    /// Space and spectral grid specs for `hg`, defaults filled in.
    pub fn grid_specs(&self, hg: &Hypergeometric) -> (GridSpec, GridSpec) {
        let (rx, rl) = self.test_function.radii(hg);
        let mut s = GridSpec::default_for(hg.rank(), self.grid.radius.unwrap_or(rx));
        let mut l = GridSpec::default_for(hg.rank(), self.grid.spectral_radius.unwrap_or(rl));
        for g in [&mut s, &mut l] {
            if let Some(n) = self.grid.n {
                g.n = n;
            }
            if let Some(sc) = self.grid.scheme {
                g.scheme = sc;
            }
        }
        (s, l)
    }
}
