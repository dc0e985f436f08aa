use std::fs;
use std::path::{Path, PathBuf};

use christoffel::verification::{gallery, GridSpec};
use christoffel::{Domain, EvaluatorOptions, PrecisionMode, QuadratureSpec, MAX_DEGREE};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Everything that determines a run's outputs, validated up front.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    /// `None` lets each command pick its default domains.
    pub domain: Option<DomainSource>,
    pub degrees: Vec<usize>,
    pub grids: Vec<String>,
    pub points: Option<PathBuf>,
    pub tol: f64,
    pub precision: PrecisionMode,
    pub seed: u64,
    pub out: PathBuf,
    /// Command-specific settings, kept as strings so they serialize verbatim.
    pub extra: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainSource {
    Gallery(String),
    File(PathBuf),
}

impl DomainSource {
    pub fn label(&self) -> String {
        match self {
            DomainSource::Gallery(g) => g.clone(),
            DomainSource::File(p) => p.file_stem().map_or("domain".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    pub fn load(&self) -> Result<Domain, CliError> {
        match self {
            DomainSource::Gallery(g) => gallery(g).map_err(CliError::from),
            DomainSource::File(p) => {
                if !p.exists() {
                    return Err(CliError::Usage(format!("domain file {} does not exist", p.display())));
                }
                Domain::from_file(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
            }
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(n) = self.degrees.iter().find(|n| **n > MAX_DEGREE) {
            return Err(CliError::Usage(format!("degree {n} exceeds {MAX_DEGREE}")));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Usage(format!("--tol {} must lie in (0, 1)", self.tol)));
        }
        for g in &self.grids {
            g.parse::<GridSpec>().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        Ok(())
    }

    /// The selected domain, or the gallery entries in `defaults`.
    pub fn domains(&self, defaults: &[&str]) -> Vec<DomainSource> {
        match &self.domain {
            Some(d) => vec![d.clone()],
            None => defaults.iter().map(|g| DomainSource::Gallery(g.to_string())).collect(),
        }
    }

    pub fn grid_specs(&self) -> Vec<GridSpec> {
        self.grids.iter().map(|g| g.parse().expect("validated")).collect()
    }

    pub fn evaluator_options(&self) -> EvaluatorOptions {
        EvaluatorOptions {
            quadrature: QuadratureSpec { outer_tol: self.tol, ..QuadratureSpec::default() },
            ..EvaluatorOptions::with_precision(self.precision)
        }
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Comment lines that open every CSV output.
    pub fn csv_preamble(&self) -> String {
        format!("# config: {}\n# config_hash: {}\n", self.to_json(), self.hash())
    }

    pub fn output_path(&self, file: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.out)?;
        Ok(self.out.join(file))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)?;
    log::info!("wrote {}", path.display());
    Ok(())
}
