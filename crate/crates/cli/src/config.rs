use std::path::{Path, PathBuf};

use borcherds_core::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    lattice: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    naive_cap: Option<u128>,
    prec_bits: Option<u32>,
    den_bound: Option<u64>,
    cross_check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub lattice: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub naive_cap: u128,
    pub prec_bits: u32,
    pub den_bound: u64,
    pub cross_check: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            lattice: None,
            cache_dir: None,
            naive_cap: 100_000_000,
            prec_bits: 256,
            den_bound: u64::MAX,
            cross_check: false,
        }
    }
}

fn env_num<T: std::str::FromStr>(key: &str) -> Result<Option<T>> {
    match std::env::var(key) {
        Ok(v) => v.parse().map(Some).map_err(|_| Error::InvalidInput(format!("{key}={v} is not a valid number"))),
        Err(_) => Ok(None),
    }
}

impl Config {
    /// Defaults, then the config file, then `BORCHERDS_*` environment variables.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let mut c = Config::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            let f: ConfigFile =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            c.lattice = f.lattice.or(c.lattice);
            c.cache_dir = f.cache_dir.or(c.cache_dir);
            c.naive_cap = f.naive_cap.unwrap_or(c.naive_cap);
            c.prec_bits = f.prec_bits.unwrap_or(c.prec_bits);
            c.den_bound = f.den_bound.unwrap_or(c.den_bound);
            c.cross_check = f.cross_check.unwrap_or(c.cross_check);
        }
        if let Ok(v) = std::env::var("BORCHERDS_LATTICE") {
            c.lattice = Some(v.into());
        }
        if let Ok(v) = std::env::var("BORCHERDS_CACHE_DIR") {
            c.cache_dir = if v.is_empty() { None } else { Some(v.into()) };
        }
        if let Some(v) = env_num("BORCHERDS_NAIVE_CAP")? {
            c.naive_cap = v;
        }
        if let Some(v) = env_num("BORCHERDS_PREC_BITS")? {
            c.prec_bits = v;
        }
        if let Some(v) = env_num("BORCHERDS_DEN_BOUND")? {
            c.den_bound = v;
        }
        if let Ok(v) = std::env::var("BORCHERDS_CROSS_CHECK") {
            c.cross_check = matches!(v.as_str(), "1" | "true" | "yes");
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.naive_cap == 0 || self.prec_bits == 0 || self.den_bound == 0 {
            return Err(Error::InvalidInput("numeric limits must be positive".into()));
        }
        Ok(())
    }
}
