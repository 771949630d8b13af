use serde_json::json;
use sweeper_core::error::Error;
use sweeper_core::gaussians::dispersed_width;
use sweeper_core::screen::{
    arrival_band, chopper_profile, fringe_visibility, log_profile, orthogonal_profile,
    stochastic_profile, swept_maxima, zoomed_profile, ScreenProfile,
};
use sweeper_core::superposition::SuperposedField;
use sweeper_core::trajectories::first_crossings;

use crate::commands::{a_label, build_field, config_error, ensure_out_dir, linspace};
use crate::config::{Law, OrientationKind, RunConfig};
use crate::error::CliError;
use crate::table::{write_report, write_table, Cell, Meta};

fn law_profile(
    law: Law,
    field: &SuperposedField,
    distance: f64,
    grid: &[f64],
) -> Result<ScreenProfile, Error> {
    match law {
        Law::Stochastic => stochastic_profile(field, distance, grid),
        Law::Chopper => chopper_profile(field, distance, grid),
    }
}

/// Evaluates the configured profile, splitting the grid into contiguous
/// chunks across worker threads. Both laws are pointwise in `x`, so the
/// concatenated result is byte-identical to a single-threaded run.
pub(crate) fn evaluate_profile(
    cfg: &RunConfig,
    field: &SuperposedField,
    grid: &[f64],
    threads: usize,
) -> Result<ScreenProfile, CliError> {
    if threads <= 1 || grid.len() < 2 * threads {
        return law_profile(cfg.law, field, cfg.screen_distance, grid).map_err(config_error);
    }
    let chunk_len = grid.len().div_ceil(threads);
    let chunks: Vec<Result<ScreenProfile, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk_len)
            .map(|chunk| {
                scope.spawn(move || law_profile(cfg.law, field, cfg.screen_distance, chunk))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("profile worker panicked")).collect()
    });
    let mut intensity = Vec::with_capacity(grid.len());
    for part in chunks {
        intensity.extend(part.map_err(config_error)?.intensity);
    }
    Ok(ScreenProfile {
        distance: cfg.screen_distance,
        orientation: sweeper_core::screen::Orientation::Forward,
        scale: sweeper_core::screen::Scale::Linear,
        grid: grid.to_vec(),
        intensity,
    })
}

pub fn run(cfg: &RunConfig, threads: usize) -> Result<(), CliError> {
    ensure_out_dir(&cfg.out_dir)?;
    let meta = Meta::new(cfg.sha256());
    let grid = linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points);
    let arrival_t = cfg.screen_distance / cfg.v_forward;

    let mut panels = Vec::new();
    for a in cfg.screen_attenuation_list() {
        let label = a_label(a);
        let field = build_field(cfg, a)?;

        let linear = evaluate_profile(cfg, &field, &grid, threads)?;
        write_table(
            &cfg.out_dir,
            &format!("screen_linear_a{label}"),
            &meta,
            &["x", "intensity"],
            linear.grid.iter().zip(&linear.intensity).map(|(&x, &i)| {
                vec![Cell::Float(x), Cell::Float(i)]
            }),
            cfg.format,
        )?;

        let zoom = zoomed_profile(&linear, cfg.zoom_factor);
        write_table(
            &cfg.out_dir,
            &format!("screen_zoom_a{label}"),
            &meta,
            &["x", "intensity", "capped"],
            zoom.grid.iter().zip(zoom.intensity.iter().zip(&zoom.capped)).map(
                |(&x, (&i, &c))| vec![Cell::Float(x), Cell::Float(i), Cell::Bool(c)],
            ),
            cfg.format,
        )?;

        let log = log_profile(&linear, cfg.log_floor_ratio);
        write_table(
            &cfg.out_dir,
            &format!("screen_log_a{label}"),
            &meta,
            &["x", "log10_intensity", "clamped"],
            log.grid.iter().zip(log.log10_intensity.iter().zip(&log.clamped)).map(
                |(&x, (&i, &c))| vec![Cell::Float(x), Cell::Float(i), Cell::Bool(c)],
            ),
            cfg.format,
        )?;

        write_table(
            &cfg.out_dir,
            &format!("initial_a{label}"),
            &meta,
            &["x", "density"],
            grid.iter().map(|&x| {
                vec![Cell::Float(x), Cell::Float(field.total_density(x, 0.0))]
            }),
            cfg.format,
        )?;

        // Swept fringes live on the attenuated side, past the dominant
        // lobe's far shoulder; the floor only excludes rounding-level
        // wiggles, since the train sits many decades under the peak.
        let shoulder =
            field.ch1.center + 4.0 * dispersed_width(&field.params, &field.ch1, arrival_t);
        let maxima = swept_maxima(&linear, 1e-30, shoulder);

        let visibility = fringe_visibility(&linear, cfg.grid_min, cfg.grid_max);
        let peak_idx = linear
            .intensity
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .unwrap_or(0);

        let mut panel = json!({
            "a": a,
            "label": label,
            "law": cfg.law.as_str(),
            "arrival_time": arrival_t,
            "peak_position": linear.grid[peak_idx],
            "visibility": visibility.as_ref().ok().copied(),
            "swept_maxima": maxima,
        });
        if let Err(err) = visibility {
            panel["visibility_note"] = json!(err.to_string());
        }

        if cfg.orientation == OrientationKind::Orthogonal {
            let mut spec = cfg.ensemble_spec();
            spec.t_end = cfg.time_horizon;
            let crossings = first_crossings(&field, &spec, cfg.transverse_offset)
                .map_err(config_error)?;
            let events: Vec<_> = crossings.into_iter().flatten().collect();
            let y_grid = linspace(0.0, cfg.v_forward * cfg.time_horizon, cfg.grid_points);
            let counts =
                orthogonal_profile(&events, cfg.transverse_offset, &y_grid)
                    .map_err(config_error)?;
            write_table(
                &cfg.out_dir,
                &format!("screen_orthogonal_a{label}"),
                &meta,
                &["y", "count"],
                counts.grid.iter().zip(&counts.intensity).map(|(&y, &c)| {
                    vec![Cell::Float(y), Cell::Float(c)]
                }),
                cfg.format,
            )?;
            panel["arrival_band"] = match arrival_band(&events) {
                Some(band) => json!({
                    "count": band.count,
                    "median_angle": band.median_angle,
                    "angle_iqr": band.angle_iqr,
                    "median_y": band.median_y,
                    "y_iqr": band.y_iqr,
                }),
                None => serde_json::Value::Null,
            };
        }
        panels.push(panel);
    }

    write_report(
        &cfg.out_dir,
        "screen_summary.json",
        &json!({
            "tool": meta.tool,
            "config_sha256": meta.config_sha256,
            "distance": cfg.screen_distance,
            "orientation": cfg.orientation.as_str(),
            "scale": cfg.scale.as_str(),
            "panels": panels,
        }),
    )?;
    Ok(())
}
