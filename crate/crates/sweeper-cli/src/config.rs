use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use sweeper_core::gaussians::PhysicalParams;
use sweeper_core::superposition::CoherenceMode;
use sweeper_core::trajectories::{EnsembleSpec, Seeding};

use crate::error::CliError;

/// Coherence selector as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Coherent,
    DecoherentFixed,
    DecoherentAveraged,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Coherent => "coherent",
            ModeKind::DecoherentFixed => "decoherent-fixed",
            ModeKind::DecoherentAveraged => "decoherent-averaged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Stochastic,
    Chopper,
}

impl Law {
    pub fn as_str(self) -> &'static str {
        match self {
            Law::Stochastic => "stochastic",
            Law::Chopper => "chopper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationKind {
    Forward,
    Orthogonal,
}

impl OrientationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OrientationKind::Forward => "forward",
            OrientationKind::Orthogonal => "orthogonal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    Linear,
    Log,
}

impl ScaleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleKind::Linear => "linear",
            ScaleKind::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn extension(self) -> &'static str {
        self.as_str()
    }
}

/// Fully resolved run configuration. Field names mirror the dotted config
/// keys one to one; see `parse_key` for the complete key list.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hbar: f64,
    pub mass: f64,
    pub v_forward: f64,
    pub half_separation: f64,
    pub sigma0: f64,
    pub attenuation: f64,
    pub mode: ModeKind,
    pub extra_phase: f64,
    pub n_per_slit: usize,
    pub seeding: Seeding,
    pub span: f64,
    pub seed: u64,
    pub t_end: f64,
    pub dt: f64,
    /// Attenuations for `trajectories`; empty means "use `attenuation.a`".
    pub traj_attenuations: Vec<f64>,
    pub output_stride: usize,
    pub emit_field_map: bool,
    pub field_map_x_points: usize,
    pub field_map_t_points: usize,
    pub screen_distance: f64,
    pub orientation: OrientationKind,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub scale: ScaleKind,
    pub law: Law,
    /// Attenuations for `screen`; empty means "use `attenuation.a`".
    pub screen_attenuations: Vec<f64>,
    pub zoom_factor: f64,
    pub log_floor_ratio: f64,
    pub transverse_offset: f64,
    pub time_horizon: f64,
    pub sweep_a_values: Vec<f64>,
    pub density_floor: f64,
    pub domain_guard: f64,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    /// The canonical near-field setup: slits at +-14, unit packets, forward
    /// speed 0.2, 25 time units to the 5-distance screen.
    fn default() -> Self {
        RunConfig {
            hbar: 1.0,
            mass: 1.0,
            v_forward: 0.2,
            half_separation: 14.0,
            sigma0: 1.0,
            attenuation: 1e-4,
            mode: ModeKind::Coherent,
            extra_phase: 0.0,
            n_per_slit: 500,
            seeding: Seeding::EqualCount,
            span: 3.0,
            seed: 42,
            t_end: 25.0,
            dt: 0.005,
            traj_attenuations: Vec::new(),
            output_stride: 10,
            emit_field_map: false,
            field_map_x_points: 161,
            field_map_t_points: 26,
            screen_distance: 5.0,
            orientation: OrientationKind::Forward,
            grid_min: -160.0,
            grid_max: 160.0,
            grid_points: 3201,
            scale: ScaleKind::Linear,
            law: Law::Stochastic,
            screen_attenuations: Vec::new(),
            zoom_factor: 1000.0,
            log_floor_ratio: 1e-30,
            transverse_offset: 60.0,
            time_horizon: 60.0,
            sweep_a_values: vec![
                1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10,
            ],
            density_floor: 1e-280,
            domain_guard: 64.0,
            out_dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

fn bad(key: &str, line: usize, want: &str, got: &str) -> CliError {
    CliError::Config(format!("{key} (line {line}): expected {want}, got `{got}`"))
}

fn parse_f64(key: &str, line: usize, raw: &str) -> Result<f64, CliError> {
    raw.trim().parse().map_err(|_| bad(key, line, "a number", raw))
}

fn parse_usize(key: &str, line: usize, raw: &str) -> Result<usize, CliError> {
    raw.trim().parse().map_err(|_| bad(key, line, "a nonnegative integer", raw))
}

fn parse_u64(key: &str, line: usize, raw: &str) -> Result<u64, CliError> {
    raw.trim().parse().map_err(|_| bad(key, line, "a nonnegative integer", raw))
}

fn parse_bool(key: &str, line: usize, raw: &str) -> Result<bool, CliError> {
    match raw.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(bad(key, line, "true or false", other)),
    }
}

fn parse_list(key: &str, line: usize, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, line, s))
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Parses the flat dotted-key format: one `key = value` per line,
    /// `#` starts a comment, unknown keys are rejected by path.
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
            })?;
            cfg.apply_key(key.trim(), value.trim(), line_no)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_key(&mut self, key: &str, value: &str, line: usize) -> Result<(), CliError> {
        match key {
            "physical.hbar" => self.hbar = parse_f64(key, line, value)?,
            "physical.mass" => self.mass = parse_f64(key, line, value)?,
            "physical.v_forward" => self.v_forward = parse_f64(key, line, value)?,
            "channel.half_separation" => self.half_separation = parse_f64(key, line, value)?,
            "channel.sigma0" => self.sigma0 = parse_f64(key, line, value)?,
            "attenuation.a" => self.attenuation = parse_f64(key, line, value)?,
            "coherence.mode" => {
                self.mode = match value {
                    "coherent" => ModeKind::Coherent,
                    "decoherent-fixed" => ModeKind::DecoherentFixed,
                    "decoherent-averaged" => ModeKind::DecoherentAveraged,
                    other => {
                        return Err(bad(
                            key,
                            line,
                            "coherent | decoherent-fixed | decoherent-averaged",
                            other,
                        ))
                    }
                }
            }
            "coherence.extra_phase" => self.extra_phase = parse_f64(key, line, value)?,
            "ensemble.n_per_slit" => self.n_per_slit = parse_usize(key, line, value)?,
            "ensemble.seeding" => {
                self.seeding = match value {
                    "equal-count" => Seeding::EqualCount,
                    "density-weighted" => Seeding::DensityWeighted,
                    other => return Err(bad(key, line, "equal-count | density-weighted", other)),
                }
            }
            "ensemble.span" => self.span = parse_f64(key, line, value)?,
            "ensemble.seed" => self.seed = parse_u64(key, line, value)?,
            "ensemble.t_end" => self.t_end = parse_f64(key, line, value)?,
            "ensemble.dt" => self.dt = parse_f64(key, line, value)?,
            "trajectories.attenuations" => {
                self.traj_attenuations = parse_list(key, line, value)?
            }
            "trajectories.output_stride" => self.output_stride = parse_usize(key, line, value)?,
            "trajectories.emit_field_map" => self.emit_field_map = parse_bool(key, line, value)?,
            "trajectories.field_map_x_points" => {
                self.field_map_x_points = parse_usize(key, line, value)?
            }
            "trajectories.field_map_t_points" => {
                self.field_map_t_points = parse_usize(key, line, value)?
            }
            "screen.distance" => self.screen_distance = parse_f64(key, line, value)?,
            "screen.orientation" => {
                self.orientation = match value {
                    "forward" => OrientationKind::Forward,
                    "orthogonal" => OrientationKind::Orthogonal,
                    other => return Err(bad(key, line, "forward | orthogonal", other)),
                }
            }
            "screen.grid_min" => self.grid_min = parse_f64(key, line, value)?,
            "screen.grid_max" => self.grid_max = parse_f64(key, line, value)?,
            "screen.grid_points" => self.grid_points = parse_usize(key, line, value)?,
            "screen.scale" => {
                self.scale = match value {
                    "linear" => ScaleKind::Linear,
                    "log" => ScaleKind::Log,
                    other => return Err(bad(key, line, "linear | log", other)),
                }
            }
            "screen.law" => {
                self.law = match value {
                    "stochastic" => Law::Stochastic,
                    "chopper" => Law::Chopper,
                    other => return Err(bad(key, line, "stochastic | chopper", other)),
                }
            }
            "screen.attenuations" => self.screen_attenuations = parse_list(key, line, value)?,
            "screen.zoom_factor" => self.zoom_factor = parse_f64(key, line, value)?,
            "screen.log_floor_ratio" => self.log_floor_ratio = parse_f64(key, line, value)?,
            "screen.transverse_offset" => self.transverse_offset = parse_f64(key, line, value)?,
            "screen.time_horizon" => self.time_horizon = parse_f64(key, line, value)?,
            "sweep.a_values" => self.sweep_a_values = parse_list(key, line, value)?,
            "numerics.density_floor" => self.density_floor = parse_f64(key, line, value)?,
            "numerics.domain_guard" => self.domain_guard = parse_f64(key, line, value)?,
            "output.dir" => self.out_dir = PathBuf::from(value),
            "output.format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(bad(key, line, "csv | json", other)),
                }
            }
            other => {
                return Err(CliError::Config(format!("unknown key `{other}` (line {line})")))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let err = |key: &str, want: &str, value: f64| {
            Err(CliError::Config(format!("{key}: expected {want}, got {value}")))
        };
        let positive = |key: &str, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                err(key, "a finite number > 0", value)
            }
        };
        positive("physical.hbar", self.hbar)?;
        positive("physical.mass", self.mass)?;
        positive("physical.v_forward", self.v_forward)?;
        positive("channel.half_separation", self.half_separation)?;
        positive("channel.sigma0", self.sigma0)?;
        positive("ensemble.span", self.span)?;
        positive("ensemble.t_end", self.t_end)?;
        positive("ensemble.dt", self.dt)?;
        positive("screen.distance", self.screen_distance)?;
        positive("screen.zoom_factor", self.zoom_factor)?;
        positive("screen.time_horizon", self.time_horizon)?;
        positive("numerics.density_floor", self.density_floor)?;
        positive("numerics.domain_guard", self.domain_guard)?;
        if !self.extra_phase.is_finite() {
            return err("coherence.extra_phase", "a finite number", self.extra_phase);
        }
        if !self.transverse_offset.is_finite() {
            return err("screen.transverse_offset", "a finite number", self.transverse_offset);
        }
        if !(self.log_floor_ratio.is_finite()
            && self.log_floor_ratio > 0.0
            && self.log_floor_ratio < 1.0)
        {
            return err("screen.log_floor_ratio", "a ratio in (0, 1)", self.log_floor_ratio);
        }
        let unit = |key: &str, value: f64| {
            if value.is_finite() && (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                err(key, "a transmission in [0, 1]", value)
            }
        };
        unit("attenuation.a", self.attenuation)?;
        for &a in &self.traj_attenuations {
            unit("trajectories.attenuations", a)?;
        }
        for &a in &self.screen_attenuations {
            unit("screen.attenuations", a)?;
        }
        if self.sweep_a_values.is_empty() {
            return Err(CliError::Config(
                "sweep.a_values: expected at least one value".into(),
            ));
        }
        for &a in &self.sweep_a_values {
            unit("sweep.a_values", a)?;
        }
        if self.n_per_slit == 0 {
            return err("ensemble.n_per_slit", "at least 1", 0.0);
        }
        if self.output_stride == 0 {
            return err("trajectories.output_stride", "at least 1", 0.0);
        }
        if self.grid_points < 2 {
            return err("screen.grid_points", "at least 2", self.grid_points as f64);
        }
        if self.field_map_x_points < 2 || self.field_map_t_points < 2 {
            return Err(CliError::Config(
                "trajectories.field_map_x_points / field_map_t_points: expected at least 2"
                    .into(),
            ));
        }
        if !(self.grid_min.is_finite()
            && self.grid_max.is_finite()
            && self.grid_min < self.grid_max)
        {
            return Err(CliError::Config(format!(
                "screen.grid_min / screen.grid_max: expected an increasing finite range, got {} .. {}",
                self.grid_min, self.grid_max
            )));
        }
        Ok(())
    }

    pub fn physical(&self) -> PhysicalParams {
        PhysicalParams { hbar: self.hbar, mass: self.mass, v_forward: self.v_forward }
    }

    pub fn coherence_mode(&self) -> CoherenceMode {
        match self.mode {
            ModeKind::Coherent => CoherenceMode::Coherent { extra_phase: self.extra_phase },
            ModeKind::DecoherentFixed => CoherenceMode::DecoherentFixedPhase,
            ModeKind::DecoherentAveraged => CoherenceMode::DecoherentAveraged,
        }
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            n_per_slit: self.n_per_slit,
            seeding: self.seeding,
            span: self.span,
            seed: self.seed,
            t_end: self.t_end,
            dt: self.dt,
            domain_guard: self.domain_guard,
        }
    }

    pub fn traj_attenuation_list(&self) -> Vec<f64> {
        if self.traj_attenuations.is_empty() {
            vec![self.attenuation]
        } else {
            self.traj_attenuations.clone()
        }
    }

    pub fn screen_attenuation_list(&self) -> Vec<f64> {
        if self.screen_attenuations.is_empty() {
            vec![self.attenuation]
        } else {
            self.screen_attenuations.clone()
        }
    }

    /// Canonical one-line-per-key rendering of the effective configuration.
    /// Key order is fixed and floats print in shortest-roundtrip form, so
    /// equal configurations hash equally regardless of source formatting.
    /// The `output.*` keys are left out on purpose: the hash identifies the
    /// computation, and the same run written to another directory or in the
    /// other format must keep its identity.
    pub fn canonical(&self) -> String {
        let list = |values: &[f64]| {
            values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
        };
        let mut lines = Vec::new();
        lines.push(format!("attenuation.a={:?}", self.attenuation));
        lines.push(format!("channel.half_separation={:?}", self.half_separation));
        lines.push(format!("channel.sigma0={:?}", self.sigma0));
        lines.push(format!("coherence.extra_phase={:?}", self.extra_phase));
        lines.push(format!("coherence.mode={}", self.mode.as_str()));
        lines.push(format!("ensemble.dt={:?}", self.dt));
        lines.push(format!("ensemble.n_per_slit={}", self.n_per_slit));
        lines.push(format!(
            "ensemble.seeding={}",
            match self.seeding {
                Seeding::EqualCount => "equal-count",
                Seeding::DensityWeighted => "density-weighted",
            }
        ));
        lines.push(format!("ensemble.seed={}", self.seed));
        lines.push(format!("ensemble.span={:?}", self.span));
        lines.push(format!("ensemble.t_end={:?}", self.t_end));
        lines.push(format!("numerics.density_floor={:?}", self.density_floor));
        lines.push(format!("numerics.domain_guard={:?}", self.domain_guard));
        lines.push(format!("physical.hbar={:?}", self.hbar));
        lines.push(format!("physical.mass={:?}", self.mass));
        lines.push(format!("physical.v_forward={:?}", self.v_forward));
        lines.push(format!("screen.attenuations={}", list(&self.screen_attenuations)));
        lines.push(format!("screen.distance={:?}", self.screen_distance));
        lines.push(format!("screen.grid_max={:?}", self.grid_max));
        lines.push(format!("screen.grid_min={:?}", self.grid_min));
        lines.push(format!("screen.grid_points={}", self.grid_points));
        lines.push(format!("screen.law={}", self.law.as_str()));
        lines.push(format!("screen.log_floor_ratio={:?}", self.log_floor_ratio));
        lines.push(format!("screen.orientation={}", self.orientation.as_str()));
        lines.push(format!("screen.scale={}", self.scale.as_str()));
        lines.push(format!("screen.time_horizon={:?}", self.time_horizon));
        lines.push(format!("screen.transverse_offset={:?}", self.transverse_offset));
        lines.push(format!("screen.zoom_factor={:?}", self.zoom_factor));
        lines.push(format!("sweep.a_values={}", list(&self.sweep_a_values)));
        lines.push(format!("trajectories.attenuations={}", list(&self.traj_attenuations)));
        lines.push(format!("trajectories.emit_field_map={}", self.emit_field_map));
        lines.push(format!("trajectories.field_map_t_points={}", self.field_map_t_points));
        lines.push(format!("trajectories.field_map_x_points={}", self.field_map_x_points));
        lines.push(format!("trajectories.output_stride={}", self.output_stride));
        lines.join("\n") + "\n"
    }

    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}
