use std::path::{Path, PathBuf};

use qspace::quadrature::QuadratureSpec;
use qspace::search::SupSearchSpec;
use qspace::seminorms::SpaceParams;
use serde::Deserialize;

use crate::{CliError, Global};

/// Contents of a `--config` file. Every field is optional; flags override it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub params: Option<SpaceParams>,
    pub search: Option<SupSearchSpec>,
    pub quadrature: Option<QuadratureSpec>,
    pub inputs: Inputs,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub f: Option<PathBuf>,
    pub measure: Option<PathBuf>,
    pub harness: Option<PathBuf>,
}

/// Settings shared by every command after merging file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub params: SpaceParams,
    pub search: SupSearchSpec,
    pub quadrature: QuadratureSpec,
    pub inputs: Inputs,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub require_convergence: bool,
}

pub fn load(global: &Global) -> Result<Settings, CliError> {
    let file = match &global.config {
        Some(path) => read_config(path)?,
        None => ConfigFile::default(),
    };
    let mut search = file.search.unwrap_or_default();
    if let Some(j) = global.resolution {
        search.max_level = j;
    }
    let mut quadrature = file.quadrature.unwrap_or_default();
    if let Some(t) = global.tolerance {
        quadrature.tolerance = t;
    }
    search.validate().map_err(CliError::config)?;
    quadrature.validate().map_err(CliError::config)?;
    let params = file.params.unwrap_or(SpaceParams::new(2.0, 0.5).expect("valid defaults"));
    Ok(Settings {
        params,
        search,
        quadrature,
        inputs: file.inputs,
        out: global.out.clone().or(file.out),
        seed: global.seed.or(file.seed).unwrap_or(20240917),
        require_convergence: global.require_convergence,
    })
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
