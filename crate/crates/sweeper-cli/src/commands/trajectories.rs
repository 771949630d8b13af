use serde_json::json;
use sweeper_core::screen::bunching_metrics;
use sweeper_core::trajectories::{run_ensemble, EnsembleResult, Trajectory};

use crate::commands::{a_label, build_field, config_error, ensure_out_dir, linspace};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::{write_report, write_table, Cell, Meta};

/// Minimum endpoints per slit before quartile statistics mean anything.
const BUNCHING_MIN: usize = 100;

fn slit2_endpoints(result: &EnsembleResult) -> Vec<f64> {
    result
        .trajectories
        .iter()
        .filter(|t| t.origin_slit == 2)
        .map(Trajectory::endpoint)
        .collect()
}

fn strided_rows<'a>(
    trajectories: &'a [Trajectory],
    stride: usize,
) -> impl Iterator<Item = Vec<Cell>> + 'a {
    trajectories.iter().enumerate().flat_map(move |(id, traj)| {
        let last = traj.times.len() - 1;
        (0..traj.times.len())
            .filter(move |&i| i % stride == 0 || i == last)
            .map(move |i| {
                vec![
                    Cell::Int(id as u64),
                    Cell::Int(traj.origin_slit as u64),
                    Cell::Float(traj.times[i]),
                    Cell::Float(traj.x[i]),
                    Cell::Float(traj.y[i]),
                ]
            })
    })
}

fn ordering_json(result: &EnsembleResult) -> serde_json::Value {
    json!({
        "preserved": result.ordering.preserved,
        "violations": result.ordering.violations,
        "first_violation": result.ordering.first_violation.map(|v| json!({
            "step": v.step,
            "t": v.t,
            "left_index": v.left_index,
        })),
    })
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(&cfg.out_dir)?;
    let meta = Meta::new(cfg.sha256());
    let spec = cfg.ensemble_spec();

    // The balanced run doubles as the spread baseline for every
    // attenuated ensemble.
    let baseline = run_ensemble(&build_field(cfg, 1.0)?, &spec).map_err(config_error)?;
    let baseline_endpoints = slit2_endpoints(&baseline);

    let mut run_summaries = Vec::new();
    let mut ordering_entries = Vec::new();
    for a in cfg.traj_attenuation_list() {
        let label = a_label(a);
        let result = if a == 1.0 {
            baseline.clone()
        } else {
            run_ensemble(&build_field(cfg, a)?, &spec).map_err(config_error)?
        };

        write_table(
            &cfg.out_dir,
            &format!("trajectories_a{label}"),
            &meta,
            &["id", "origin_slit", "t", "x", "y"],
            strided_rows(&result.trajectories, cfg.output_stride),
            cfg.format,
        )?;

        if cfg.emit_field_map {
            let field = build_field(cfg, a)?;
            let xs = linspace(cfg.grid_min, cfg.grid_max, cfg.field_map_x_points);
            let ts = linspace(0.0, cfg.t_end, cfg.field_map_t_points);
            let nodes = field.interference_map(&xs, &ts);
            write_table(
                &cfg.out_dir,
                &format!("field_map_a{label}"),
                &meta,
                &["x", "t", "density", "current", "cos_term", "sin_term"],
                nodes.iter().map(|n| {
                    vec![
                        Cell::Float(n.x),
                        Cell::Float(n.t),
                        Cell::Float(n.density),
                        Cell::Float(n.current),
                        Cell::Float(n.cos_term),
                        Cell::Float(n.sin_term),
                    ]
                }),
                cfg.format,
            )?;
        }

        let endpoints = slit2_endpoints(&result);
        let bunching = if endpoints.len() >= BUNCHING_MIN {
            let report = bunching_metrics(&endpoints, &baseline_endpoints);
            json!({
                "iqr": report.iqr,
                "baseline_iqr": report.baseline_iqr,
                "ratio": report.ratio,
                "peak_position": report.peak_position,
                "peak_fraction": report.peak_fraction,
            })
        } else {
            serde_json::Value::Null
        };
        let escaped = result.flags.iter().filter(|f| f.domain_escape.is_some()).count();
        let underflow_evals: u64 = result.flags.iter().map(|f| f.underflow_evals).sum();

        ordering_entries.push(json!({
            "a": a,
            "label": label,
            "ordering": ordering_json(&result),
        }));
        run_summaries.push(json!({
            "a": a,
            "label": label,
            "trajectories": result.trajectories.len(),
            "ordering": ordering_json(&result),
            "bunching": bunching,
            "flags": {
                "domain_escapes": escaped,
                "underflow_evals": underflow_evals,
            },
        }));
    }

    write_report(
        &cfg.out_dir,
        "ordering.json",
        &json!({
            "tool": meta.tool,
            "config_sha256": meta.config_sha256,
            "runs": ordering_entries,
        }),
    )?;
    write_report(
        &cfg.out_dir,
        "summary.json",
        &json!({
            "tool": meta.tool,
            "config_sha256": meta.config_sha256,
            "baseline": {
                "a": 1.0,
                "slit2_endpoints": baseline_endpoints.len(),
                "ordering": ordering_json(&baseline),
            },
            "runs": run_summaries,
        }),
    )?;
    Ok(())
}
