//! Screen profiles and the statistics read off them: fringe visibility,
//! which-path duality metrics, endpoint bunching, and arrival bands.

use alloc::vec::Vec;

use crate::error::Error;
use crate::numeric::{iqr, median, sorted_copy};
use crate::superposition::SuperposedField;
use crate::trajectories::ArrivalEvent;

/// Screen placement relative to the beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Perpendicular to the forward axis: intensity versus transverse `x`
    /// at the fixed arrival time `distance / v_forward`.
    Forward,
    /// Parallel to the forward axis at a fixed transverse offset: arrival
    /// counts versus forward `y`.
    Orthogonal,
}

/// Display scale tag carried by a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Intensity (or count) profile along a screen.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenProfile {
    pub distance: f64,
    pub orientation: Orientation,
    pub scale: Scale,
    pub grid: Vec<f64>,
    pub intensity: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: 0.0,
            expected: "at least one grid point",
        });
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: w[1],
                expected: "strictly ascending grid points",
            });
        }
    }
    Ok(())
}

fn check_distance(field: &SuperposedField, distance: f64) -> Result<f64, Error> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::InvalidParameter {
            name: "distance",
            value: distance,
            expected: "a finite number > 0",
        });
    }
    Ok(distance / field.params.v_forward)
}

/// Time-of-flight intensity on a forward screen: every pulse carries the
/// attenuated superposition, so the profile is the total density at the
/// arrival time.
pub fn stochastic_profile(
    field: &SuperposedField,
    distance: f64,
    grid: &[f64],
) -> Result<ScreenProfile, Error> {
    let t = check_distance(field, distance)?;
    check_grid(grid)?;
    let intensity = grid.iter().map(|&x| field.total_density(x, t)).collect();
    Ok(ScreenProfile {
        distance,
        orientation: Orientation::Forward,
        scale: Scale::Linear,
        grid: grid.to_vec(),
        intensity,
    })
}

/// Chopped-beam intensity: a fraction `1 - a` of pulses carry channel 1
/// alone and a fraction `a` carry the full two-channel superposition, where
/// `a` is the field's attenuation. Both limbs share the field's geometry,
/// coherence mode, and phase offset.
pub fn chopper_profile(
    field: &SuperposedField,
    distance: f64,
    grid: &[f64],
) -> Result<ScreenProfile, Error> {
    let t = check_distance(field, distance)?;
    check_grid(grid)?;
    let a = field.attenuation;
    let single = SuperposedField::new(
        field.params,
        field.ch1,
        field.ch2.center,
        field.ch2.sigma0,
        0.0,
        field.mode,
    )?;
    let full = SuperposedField::new(
        field.params,
        field.ch1,
        field.ch2.center,
        field.ch2.sigma0,
        1.0,
        field.mode,
    )?;
    let intensity = grid
        .iter()
        .map(|&x| (1.0 - a) * single.total_density(x, t) + a * full.total_density(x, t))
        .collect();
    Ok(ScreenProfile {
        distance,
        orientation: Orientation::Forward,
        scale: Scale::Linear,
        grid: grid.to_vec(),
        intensity,
    })
}

/// Refined value of the extremum at index `i` from the parabola through its
/// three samples; falls back to the raw sample when the curvature vanishes.
/// Intensities are nonnegative, so the refined value is clamped at zero.
fn refined_value(values: &[f64], i: usize) -> f64 {
    let (f0, f1, f2) = (values[i - 1], values[i], values[i + 1]);
    let curvature = f0 - 2.0 * f1 + f2;
    let v = if curvature == 0.0 {
        f1
    } else {
        f1 - (f0 - f2) * (f0 - f2) / (8.0 * curvature)
    };
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// Refined position of the extremum at index `i`.
fn refined_position(grid: &[f64], values: &[f64], i: usize) -> f64 {
    let (f0, f1, f2) = (values[i - 1], values[i], values[i + 1]);
    let curvature = f0 - 2.0 * f1 + f2;
    if curvature == 0.0 {
        grid[i]
    } else {
        let delta = (f0 - f2) / (2.0 * curvature);
        grid[i] + delta * 0.5 * (grid[i + 1] - grid[i - 1])
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ExtremumKind {
    Max,
    Min,
}

fn strict_extrema(values: &[f64]) -> Vec<(usize, ExtremumKind)> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            out.push((i, ExtremumKind::Max));
        } else if values[i] < values[i - 1] && values[i] < values[i + 1] {
            out.push((i, ExtremumKind::Min));
        }
    }
    out
}

/// Fringe contrast measured from the profile's local extrema inside
/// `[window_lo, window_hi]`.
///
/// Each interior extremum flanked by two extrema of the opposite kind
/// yields one estimate `|I - g| / (I + g)` with `g` the geometric mean of
/// its neighbors; the geometric mean cancels the slowly varying envelope to
/// second order, which a plain adjacent-pair contrast does not. Estimates
/// come from parabolically refined extremum values, and the central five
/// (by position) are averaged. Fewer than two full max/min pairs in the
/// window means there is no fringe system to measure and fails with
/// [`Error::NoFringesDetected`]; broad single- or double-humped envelopes
/// are rejected by the same rule.
pub fn fringe_visibility(
    profile: &ScreenProfile,
    window_lo: f64,
    window_hi: f64,
) -> Result<f64, Error> {
    let lo_idx = profile.grid.partition_point(|&x| x < window_lo);
    let hi_idx = profile.grid.partition_point(|&x| x <= window_hi);
    let no_fringes = |extrema: usize| Error::NoFringesDetected {
        window_lo,
        window_hi,
        extrema,
    };
    if hi_idx.saturating_sub(lo_idx) < 5 {
        return Err(no_fringes(0));
    }
    let values = &profile.intensity[lo_idx..hi_idx];
    let extrema = strict_extrema(values);
    if extrema.len() < 4 {
        return Err(no_fringes(extrema.len()));
    }

    let mut estimates = Vec::with_capacity(extrema.len());
    for j in 1..extrema.len() - 1 {
        let (il, kl) = extrema[j - 1];
        let (im, km) = extrema[j];
        let (ir, kr) = extrema[j + 1];
        if kl == km || kr == km {
            continue;
        }
        let center = refined_value(values, im);
        let envelope = libm::sqrt(refined_value(values, il) * refined_value(values, ir));
        let sum = center + envelope;
        if sum > 0.0 {
            estimates.push(libm::fabs(center - envelope) / sum);
        }
    }
    if estimates.is_empty() {
        return Err(no_fringes(extrema.len()));
    }
    let take = 5.min(estimates.len());
    let start = (estimates.len() - take) / 2;
    let central = &estimates[start..start + take];
    Ok(central.iter().sum::<f64>() / take as f64)
}

/// Which-path metrics of the stochastically attenuated beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityMetrics {
    /// `D = (1 - a) / (1 + a)`.
    pub distinguishability: f64,
    /// `V = 2 sqrt(a) / (1 + a)`.
    pub visibility: f64,
    /// `D^2 + V^2 - 1`; zero up to rounding for all `a`.
    pub residual: f64,
}

/// Path distinguishability of a beam with intensity attenuation `a`.
pub fn distinguishability(attenuation: f64) -> f64 {
    (1.0 - attenuation) / (1.0 + attenuation)
}

/// Fringe visibility of the stochastically attenuated (every-pulse) beam.
pub fn stochastic_visibility(attenuation: f64) -> f64 {
    2.0 * libm::sqrt(attenuation) / (1.0 + attenuation)
}

/// Fringe visibility of the chopped beam, where only a fraction `a` of
/// pulses interfere: lower than the stochastic law by exactly `sqrt(a)`.
pub fn chopper_visibility(attenuation: f64) -> f64 {
    2.0 * attenuation / (1.0 + attenuation)
}

/// Distinguishability, stochastic visibility, and their duality residual.
pub fn duality_metrics(attenuation: f64) -> DualityMetrics {
    let d = distinguishability(attenuation);
    let v = stochastic_visibility(attenuation);
    DualityMetrics { distinguishability: d, visibility: v, residual: d * d + v * v - 1.0 }
}

/// Spread statistics of trajectory endpoints against a reference ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BunchingReport {
    pub iqr: f64,
    pub baseline_iqr: f64,
    /// `iqr / baseline_iqr`: well below 1 once the ensemble bunches.
    pub ratio: f64,
    /// Center of the most populated histogram bin.
    pub peak_position: f64,
    /// Fraction of endpoints within one bin width of the peak.
    pub peak_fraction: f64,
}

/// Compares endpoint spreads. Expects at least 100 endpoints per ensemble
/// so the quartiles and the histogram are meaningful; panics below that.
pub fn bunching_metrics(endpoints: &[f64], baseline: &[f64]) -> BunchingReport {
    assert!(
        endpoints.len() >= 100 && baseline.len() >= 100,
        "bunching statistics need at least 100 endpoints per ensemble"
    );
    let sorted = sorted_copy(endpoints);
    let spread = iqr(&sorted);
    let baseline_iqr = iqr(&sorted_copy(baseline));

    // Freedman-Diaconis width for the endpoint histogram.
    let n = sorted.len();
    let h = 2.0 * spread / libm::cbrt(n as f64);
    let min = sorted[0];
    let max = sorted[n - 1];
    let (peak_position, peak_fraction) = if h <= 0.0 || max <= min {
        (median(&sorted), 1.0)
    } else {
        let bins = ((max - min) / h) as usize + 1;
        let mut counts = alloc::vec![0usize; bins];
        for &x in &sorted {
            let b = (((x - min) / h) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let best = counts
            .iter()
            .enumerate()
            .max_by_key(|&(_, c)| *c)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let center = min + (best as f64 + 0.5) * h;
        let near = sorted
            .iter()
            .filter(|&&x| libm::fabs(x - center) <= h)
            .count();
        (center, near as f64 / n as f64)
    };

    BunchingReport {
        iqr: spread,
        baseline_iqr,
        ratio: spread / baseline_iqr,
        peak_position,
        peak_fraction,
    }
}

/// Median/IQR summary of a set of arrivals on an orthogonal screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalBand {
    pub count: usize,
    pub median_angle: f64,
    pub angle_iqr: f64,
    pub median_y: f64,
    pub y_iqr: f64,
}

/// Summarizes arrival events; `None` when nothing arrived.
pub fn arrival_band(events: &[ArrivalEvent]) -> Option<ArrivalBand> {
    if events.is_empty() {
        return None;
    }
    let angles = sorted_copy(&events.iter().map(|e| e.angle).collect::<Vec<_>>());
    let ys = sorted_copy(&events.iter().map(|e| e.y).collect::<Vec<_>>());
    Some(ArrivalBand {
        count: events.len(),
        median_angle: median(&angles),
        angle_iqr: iqr(&angles),
        median_y: median(&ys),
        y_iqr: iqr(&ys),
    })
}

/// Bins arrival events along the forward axis of an orthogonal screen at
/// `offset`. Bin `j` spans the midpoints around `grid[j]`; intensity is the
/// raw count.
pub fn orthogonal_profile(
    events: &[ArrivalEvent],
    offset: f64,
    grid: &[f64],
) -> Result<ScreenProfile, Error> {
    check_grid(grid)?;
    let mut counts = alloc::vec![0.0f64; grid.len()];
    for e in events {
        if grid.len() == 1 {
            counts[0] += 1.0;
            continue;
        }
        let j = grid.partition_point(|&g| g < e.y);
        let bin = if j == 0 {
            0
        } else if j >= grid.len() {
            grid.len() - 1
        } else if e.y - grid[j - 1] <= grid[j] - e.y {
            j - 1
        } else {
            j
        };
        counts[bin] += 1.0;
    }
    Ok(ScreenProfile {
        distance: offset,
        orientation: Orientation::Orthogonal,
        scale: Scale::Linear,
        grid: grid.to_vec(),
        intensity: counts,
    })
}

/// Log-scale view of a profile with an explicit clamp floor.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProfile {
    pub grid: Vec<f64>,
    pub log10_intensity: Vec<f64>,
    /// True where the raw intensity sat below the floor and was clamped.
    pub clamped: Vec<bool>,
    /// `floor_ratio * peak`.
    pub floor: f64,
}

/// Clamped base-10 log view: the floor is `floor_ratio` times the profile
/// peak, so the dynamic range on display is `-log10(floor_ratio)` decades.
pub fn log_profile(profile: &ScreenProfile, floor_ratio: f64) -> LogProfile {
    let peak = profile.intensity.iter().cloned().fold(0.0f64, f64::max);
    let floor = floor_ratio * peak;
    let mut log10_intensity = Vec::with_capacity(profile.intensity.len());
    let mut clamped = Vec::with_capacity(profile.intensity.len());
    for &v in &profile.intensity {
        let below = v < floor;
        clamped.push(below);
        log10_intensity.push(libm::log10(if below { floor } else { v }));
    }
    LogProfile { grid: profile.grid.clone(), log10_intensity, clamped, floor }
}

/// Linear view capped at `peak / zoom_factor` to expose faint structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoomedProfile {
    pub grid: Vec<f64>,
    pub intensity: Vec<f64>,
    /// True where the raw intensity exceeded the cap.
    pub capped: Vec<bool>,
    pub cap: f64,
}

pub fn zoomed_profile(profile: &ScreenProfile, zoom_factor: f64) -> ZoomedProfile {
    let peak = profile.intensity.iter().cloned().fold(0.0f64, f64::max);
    let cap = peak / zoom_factor;
    let mut intensity = Vec::with_capacity(profile.intensity.len());
    let mut capped = Vec::with_capacity(profile.intensity.len());
    for &v in &profile.intensity {
        let over = v > cap;
        capped.push(over);
        intensity.push(if over { cap } else { v });
    }
    ZoomedProfile { grid: profile.grid.clone(), intensity, capped, cap }
}

/// Positions of strict local maxima beyond `min_x` that rise above
/// `floor_ratio * peak`: the fringe train swept out of the main lobe.
/// Positions are refined on the parabola through each maximum.
pub fn swept_maxima(profile: &ScreenProfile, floor_ratio: f64, min_x: f64) -> Vec<f64> {
    let peak = profile.intensity.iter().cloned().fold(0.0f64, f64::max);
    let floor = floor_ratio * peak;
    let mut out = Vec::new();
    for (i, kind) in strict_extrema(&profile.intensity) {
        if kind == ExtremumKind::Max
            && profile.grid[i] > min_x
            && profile.intensity[i] > floor
        {
            out.push(refined_position(&profile.grid, &profile.intensity, i));
        }
    }
    out
}
