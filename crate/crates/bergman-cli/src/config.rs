//! Experiment configuration: a flat key = value file (TOML syntax) whose
//! values are overridden by command-line flags.

use std::path::{Path, PathBuf};

use bergman::domain::{atom_window_f64, make_domain, wavelet_window_f64, DomainKind, DomainParams};
use bergman::rep::PsiSpec;
use serde::{Deserialize, Serialize};

use crate::output::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `disc`, `ball:n` or `type1:p,q`
    pub domain: String,
    pub gamma: f64,
    pub alpha: f64,
    pub p: f64,
    /// `const`, `poly:c0,c1,...` or `file:PATH`
    pub psi: String,
    pub epsilon: f64,
    /// truncation degree N
    pub truncation: usize,
    /// Neumann terms K
    pub neumann: usize,
    pub boundary_radius: f64,
    /// K-fibers of the lattice; 0 picks 1 for ψ = c·z^m and the default
    /// fiber count otherwise
    pub fibers: usize,
    /// Gauss nodes per cell and coordinate
    pub node_order: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: "disc".into(),
            gamma: 3.0,
            alpha: 2.0,
            p: 2.0,
            psi: "const".into(),
            epsilon: 0.3,
            truncation: 32,
            neumann: 8,
            boundary_radius: 0.99,
            fibers: 0,
            node_order: 3,
            seed: 1,
            format: Format::Json,
            output: None,
        }
    }
}

/// Window membership of (p, α, γ) on the configured domain.
#[derive(Debug, Clone, Serialize)]
pub struct WindowRecord {
    pub wavelet: (f64, f64),
    pub atom: (f64, f64),
    pub in_wavelet_window: bool,
    pub in_atom_window: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn domain_kind(&self) -> Result<DomainKind, CliError> {
        Ok(self.domain.parse()?)
    }

    pub fn domain_params(&self) -> Result<DomainParams, CliError> {
        Ok(make_domain(self.domain_kind()?)?)
    }

    pub fn psi_spec(&self) -> Result<PsiSpec, CliError> {
        Ok(self.psi.parse()?)
    }

    pub fn windows(&self) -> Result<WindowRecord, CliError> {
        let d = self.domain_params()?;
        let w = wavelet_window_f64(self.p, self.gamma, &d)?;
        let a = atom_window_f64(self.p, self.gamma, &d)?;
        Ok(WindowRecord {
            wavelet: w.as_f64(),
            atom: a.as_f64(),
            in_wavelet_window: w.contains_f64(self.alpha),
            in_atom_window: a.contains_f64(self.alpha),
        })
    }

    /// Checks the fields that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        self.domain_kind()?;
        self.psi_spec()?;
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if !(self.p >= 1.0) {
            return bad("p must be at least 1");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(0.0..1.0).contains(&self.boundary_radius) {
            return bad("boundary_radius must lie in [0, 1)");
        }
        if self.node_order == 0 {
            return bad("node_order must be positive");
        }
        Ok(())
    }
}
