use serde_json::json;
use sweeper_core::screen::{bunching_metrics, duality_metrics, fringe_visibility};
use sweeper_core::trajectories::{run_ensemble, Trajectory};

use crate::commands::{build_field, config_error, ensure_out_dir, linspace};
use crate::config::{Law, RunConfig};
use crate::error::CliError;
use crate::table::{write_report, write_table, Cell, Meta};

/// An attenuation counts as "swept" once the minority spread collapses to a
/// quarter of the balanced baseline spread.
const ONSET_RATIO: f64 = 0.25;

/// Endpoint spreads need this many endpoints per slit to be meaningful;
/// smaller sweeps skip the ensembles and report NaN ratios.
const BUNCHING_MIN: usize = 100;

pub fn run(cfg: &RunConfig, threads: usize) -> Result<(), CliError> {
    ensure_out_dir(&cfg.out_dir)?;
    let meta = Meta::new(cfg.sha256());
    let grid = linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points);
    let spec = cfg.ensemble_spec();
    let with_bunching = cfg.n_per_slit >= BUNCHING_MIN;

    let slit2 = |result: &sweeper_core::trajectories::EnsembleResult| -> Vec<f64> {
        result
            .trajectories
            .iter()
            .filter(|t| t.origin_slit == 2)
            .map(Trajectory::endpoint)
            .collect()
    };
    let baseline = if with_bunching {
        let result = run_ensemble(&build_field(cfg, 1.0)?, &spec).map_err(config_error)?;
        Some(slit2(&result))
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut onset: Option<f64> = None;
    for &a in &cfg.sweep_a_values {
        let m = duality_metrics(a);
        let field = build_field(cfg, a)?;

        let profile = crate::commands::screen::evaluate_profile(cfg, &field, &grid, threads)?;
        let measured = fringe_visibility(&profile, cfg.grid_min, cfg.grid_max)
            .unwrap_or(f64::NAN);

        let ratio = match &baseline {
            Some(base) => {
                let result = if a == 1.0 {
                    None
                } else {
                    Some(run_ensemble(&field, &spec).map_err(config_error)?)
                };
                let endpoints = match &result {
                    Some(r) => slit2(r),
                    None => base.clone(),
                };
                bunching_metrics(&endpoints, base).ratio
            }
            None => f64::NAN,
        };
        if ratio.is_finite() && ratio <= ONSET_RATIO {
            onset = Some(onset.map_or(a, |prev: f64| prev.max(a)));
        }

        let locus = field.no_crossing_locus(cfg.t_end);
        rows.push((a, m, measured, ratio, locus));
    }

    let predicted = |a: f64| match cfg.law {
        Law::Stochastic => sweeper_core::screen::stochastic_visibility(a),
        Law::Chopper => sweeper_core::screen::chopper_visibility(a),
    };
    write_table(
        &cfg.out_dir,
        "sweep",
        &meta,
        &[
            "a",
            "distinguishability",
            "visibility",
            "duality_residual",
            "visibility_predicted",
            "visibility_measured",
            "bunching_ratio",
            "locus",
        ],
        rows.iter().map(|(a, m, measured, ratio, locus)| {
            vec![
                Cell::Float(*a),
                Cell::Float(m.distinguishability),
                Cell::Float(m.visibility),
                Cell::Float(m.residual),
                Cell::Float(predicted(*a)),
                Cell::Float(*measured),
                Cell::Float(*ratio),
                Cell::Float(*locus),
            ]
        }),
        cfg.format,
    )?;

    write_report(
        &cfg.out_dir,
        "sweep_summary.json",
        &json!({
            "tool": meta.tool,
            "config_sha256": meta.config_sha256,
            "law": cfg.law.as_str(),
            "onset_ratio": ONSET_RATIO,
            "bunching_onset_a": onset,
            "bunching_evaluated": with_bunching,
            "values": cfg.sweep_a_values,
        }),
    )?;
    Ok(())
}
