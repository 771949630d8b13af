pub mod screen;
pub mod sweep;
pub mod trajectories;
pub mod verify;

use std::path::Path;

use sweeper_core::error::Error;
use sweeper_core::superposition::{CoherenceMode, SuperposedField};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// File-name label for an attenuation: `1e0`, `1e-4`, `2.5e-3`.
pub fn a_label(a: f64) -> String {
    format!("{a:e}")
}

pub fn config_error(err: Error) -> CliError {
    CliError::Config(err.to_string())
}

/// Field for one attenuation under the configured mode and numerics.
pub fn build_field(cfg: &RunConfig, attenuation: f64) -> Result<SuperposedField, CliError> {
    build_field_with_mode(cfg, attenuation, cfg.coherence_mode())
}

pub fn build_field_with_mode(
    cfg: &RunConfig,
    attenuation: f64,
    mode: CoherenceMode,
) -> Result<SuperposedField, CliError> {
    SuperposedField::symmetric(
        cfg.physical(),
        cfg.half_separation,
        cfg.sigma0,
        attenuation,
        mode,
    )
    .and_then(|f| f.with_density_floor(cfg.density_floor))
    .map_err(config_error)
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
