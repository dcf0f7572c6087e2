//! Run configuration shared by the solver, the sign computations and the CLI.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a JSON file with default [`RunConfig`] values.
pub const CONFIG_ENV: &str = "REALHURWITZ_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest accepted equation residual after polishing.
    pub residual: f64,
    /// Relative distance under which two coefficient vectors are identified.
    pub dedup: f64,
    /// Relative imaginary part under which a solution counts as real.
    pub realness: f64,
    /// Relative separation required between distinct preimages.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-10, dedup: 1e-6, realness: 1e-8, cluster: 1e-5 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    /// Newton iterations per start.
    pub newton_max_iter: usize,
    /// Multistart budget: the maximum number of random starts per spec.
    pub budget: usize,
    /// Starts evaluated per parallel batch. Fixed so that results do not
    /// depend on the worker count.
    pub batch_size: usize,
    /// Cap on tuples visited by the factorization search.
    pub enumeration_budget: u64,
    pub seed: u64,
    /// Apply conjugation and root-of-unity symmetries to every new solution.
    pub harvest: bool,
    pub cache: Option<PathBuf>,
    pub format: OutputFormat,
    pub verbosity: u8,
    /// Worker threads; `None` uses the global pool. Not serialized, since
    /// results do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    /// Largest degree accepted by the solver-backed commands.
    pub max_degree: usize,
    /// Debug: flip the sign of the first polynomial in every s-number.
    pub corrupt_sign: bool,
    /// Diagnostic: build covering classes even where H^R is zero by definition.
    pub force_classes: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            newton_max_iter: 200,
            budget: 20_000,
            batch_size: 64,
            enumeration_budget: 100_000_000,
            seed: 20_240_601,
            harvest: true,
            cache: None,
            format: OutputFormat::Json,
            verbosity: 0,
            workers: None,
            max_degree: 6,
            corrupt_sign: false,
            force_classes: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("residual", t.residual),
            ("dedup", t.dedup),
            ("realness", t.realness),
            ("cluster", t.cluster),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.budget == 0 || self.batch_size == 0 || self.enumeration_budget == 0 {
            return Err(Error::InvalidSpec("budgets must be positive".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidSpec("newton_max_iter must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidSpec("workers must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults, overridden by the file named in [`CONFIG_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Self::default()),
        }
    }

    /// Run `f` on a dedicated pool when `workers` is set.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.workers {
            Some(n) => pool(n).install(f),
            None => f(),
        }
    }
}

/// One shared pool per worker count.
fn pool(n: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    pools
        .entry(n)
        .or_insert_with(|| {
            Arc::new(rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool"))
        })
        .clone()
}
