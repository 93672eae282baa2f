//! Flat TOML configuration. Command-line flags win over file values, which
//! win over built-in defaults.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::error::{invalid, CliError, CliResult};

/// Thread count used when neither `--threads` nor the config file sets one.
pub const THREADS_ENV: &str = "HAMSIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Chain,
    Ring,
    Honeycomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Two-term projector split of the search Hamiltonian.
    Search,
    Chain,
    Ring,
    Honeycomb,
}

/// A scalar or a list under the same key, e.g. `n = 16` or `n = [4, 16]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a config file. Anything else is rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,

    pub n: Option<OneOrMany<u64>>,
    pub t: Option<OneOrMany<f64>>,
    pub samples: Option<usize>,
    pub points: Option<usize>,
    pub epsilon: Option<f64>,

    pub model: Option<Model>,
    pub lattice: Option<Lattice>,
    pub size: Option<usize>,
    pub lx: Option<usize>,
    pub ly: Option<usize>,
    pub periodic: Option<bool>,
    pub graph: Option<PathBuf>,
    pub terms: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub dt: Option<Vec<f64>>,
    pub step_cap: Option<u64>,

    pub max_steps: Option<u64>,
    pub target: Option<usize>,
    pub runs: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub max_dimension: Option<usize>,

    pub per_run_error: Option<f64>,
    pub queries_per_trotter_step: Option<f64>,
    pub queries_per_grover_step: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// The single value under `n`, rejecting lists.
    pub fn single_n(&self) -> CliResult<Option<u64>> {
        single(&self.n, "n")
    }

    pub fn single_t(&self) -> CliResult<Option<f64>> {
        single(&self.t, "t")
    }
}

fn single<T: Clone>(v: &Option<OneOrMany<T>>, key: &str) -> CliResult<Option<T>> {
    match v {
        None => Ok(None),
        Some(OneOrMany::One(x)) => Ok(Some(x.clone())),
        Some(OneOrMany::Many(_)) => Err(invalid(format!("config key `{key}` takes a single value here"))),
    }
}

/// Thread count from the flag, then the file, then the environment.
pub fn thread_count(flag: Option<usize>, file: &FileConfig) -> CliResult<Option<usize>> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| invalid(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        ),
        Err(_) => None,
    };
    let threads = flag.or(file.threads).or(from_env);
    if threads == Some(0) {
        return Err(invalid("thread count must be at least 1"));
    }
    Ok(threads)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_document() {
        let c = FileConfig::parse("n = [4, 16]\nt = 1.5\nformat = \"json\"\nlattice = \"honeycomb\"\n").unwrap();
        assert_eq!(c.n.clone().unwrap().into_vec(), vec![4, 16]);
        assert_eq!(c.single_t().unwrap(), Some(1.5));
        assert!(c.single_n().is_err());
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.lattice, Some(Lattice::Honeycomb));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("n = 4\nbogus = 1\n").is_err());
        assert!(FileConfig::parse("[section]\nn = 4\n").is_err());
    }
}
