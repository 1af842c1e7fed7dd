//! TOML synth spec files for `run --synth`:
//!
//! ```toml
//! seed = 1
//! sigma = 1.0
//! delta = 3.0
//! placement = "sphere"      # or "simplex"
//! test_per_class = 50
//! base_train_per_class = 50
//! center_norm = 0.0         # optional, defaults to 0
//!
//! [protocol]
//! total_classes = 40
//! base_classes = 20
//! sessions = 5
//! way = 4
//! shot = 5
//! dim = 32
//! ```

use std::fs;
use std::path::Path;

use fscil_core::{MeanPlacement, ProtocolConfig, SynthSpec};
use serde::Deserialize;

use crate::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    total_classes: usize,
    base_classes: usize,
    sessions: usize,
    way: usize,
    shot: usize,
    dim: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    protocol: ProtocolSection,
    sigma: f64,
    delta: f64,
    placement: Option<String>,
    test_per_class: usize,
    base_train_per_class: usize,
    center_norm: Option<f64>,
    seed: Option<u64>,
}

pub fn parse_placement(name: &str) -> Result<MeanPlacement> {
    match name {
        "sphere" => Ok(MeanPlacement::SphereRejection),
        "simplex" => Ok(MeanPlacement::ScaledSimplex),
        other => Err(CliError::Config(format!(
            "placement must be `sphere` or `simplex`, got `{other}`"
        ))),
    }
}

pub fn load_synth_spec(path: &Path) -> Result<SynthSpec> {
    let text = fs::read_to_string(path)?;
    let file: SpecFile = toml::from_str(&text).map_err(|e| CliError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let p = file.protocol;
    let spec = SynthSpec {
        protocol: ProtocolConfig {
            total_classes: p.total_classes,
            base_classes: p.base_classes,
            sessions: p.sessions,
            way: p.way,
            shot: p.shot,
            dim: p.dim,
        },
        sigma_intra: file.sigma,
        target_delta_inter: file.delta,
        mean_placement: parse_placement(file.placement.as_deref().unwrap_or("sphere"))?,
        test_per_class: file.test_per_class,
        base_train_per_class: file.base_train_per_class,
        center_norm: file.center_norm.unwrap_or(0.0),
        seed: file.seed.unwrap_or(0),
    };
    spec.validate()?;
    Ok(spec)
}
