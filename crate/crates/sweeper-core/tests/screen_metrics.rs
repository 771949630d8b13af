//! Screen-level observables at a far-field measurement geometry where the
//! attenuation laws have clean closed forms.

use sweeper_core::screen::{
    chopper_profile, chopper_visibility, duality_metrics, fringe_visibility, log_profile,
    stochastic_profile, stochastic_visibility, swept_maxima, zoomed_profile,
};
use sweeper_core::error::Error;
use sweeper_core::gaussians::PhysicalParams;
use sweeper_core::superposition::{CoherenceMode, SuperposedField};

// Far-field geometry: the packets overlap almost completely, so the fringe
// contrast tracks the attenuation laws to well under a percent.
const HALF_SEPARATION: f64 = 1200.0;
const DISTANCE: f64 = 160_000.0;
const ARRIVAL_TIME: f64 = 800_000.0;

fn far_field(attenuation: f64, mode: CoherenceMode) -> SuperposedField {
    let params = PhysicalParams::new(1.0, 1.0, 0.2).unwrap();
    SuperposedField::symmetric(params, HALF_SEPARATION, 1.0, attenuation, mode).unwrap()
}

fn fringe_period() -> f64 {
    let tau = ARRIVAL_TIME / 2.0;
    let sigma_t_sq = 1.0 + tau * tau;
    core::f64::consts::TAU * sigma_t_sq / (tau * HALF_SEPARATION)
}

fn window_grid() -> (Vec<f64>, f64, f64) {
    let half_window = 1.6 * fringe_period();
    let n = 513;
    let grid = (0..n)
        .map(|i| -half_window + 2.0 * half_window * i as f64 / (n - 1) as f64)
        .collect();
    (grid, -half_window, half_window)
}

#[test]
fn stochastic_contrast_follows_the_attenuation_law() {
    let (grid, lo, hi) = window_grid();
    for &a in &[1.0, 0.1, 0.01, 1e-4] {
        let field = far_field(a, CoherenceMode::Coherent { extra_phase: 0.0 });
        let profile = stochastic_profile(&field, DISTANCE, &grid).unwrap();
        let measured = fringe_visibility(&profile, lo, hi).unwrap();
        let law = stochastic_visibility(a);
        assert!(
            (measured - law).abs() <= 0.01 * law,
            "a = {a}: measured {measured:.6} vs law {law:.6}"
        );
    }
}

#[test]
fn balanced_beam_reaches_full_contrast() {
    let (grid, lo, hi) = window_grid();
    let field = far_field(1.0, CoherenceMode::Coherent { extra_phase: 0.0 });
    let profile = stochastic_profile(&field, DISTANCE, &grid).unwrap();
    let measured = fringe_visibility(&profile, lo, hi).unwrap();
    assert!(
        (measured - 1.0).abs() <= 1e-6,
        "balanced contrast {measured:.9} should be unity"
    );
}

#[test]
fn chopper_contrast_is_the_square_root_factor_lower() {
    let (grid, lo, hi) = window_grid();
    for &a in &[1.0, 0.1, 0.01, 1e-4] {
        let field = far_field(a, CoherenceMode::Coherent { extra_phase: 0.0 });
        let profile = chopper_profile(&field, DISTANCE, &grid).unwrap();
        let measured = fringe_visibility(&profile, lo, hi).unwrap();
        let law = chopper_visibility(a);
        assert!(
            (measured - law).abs() <= 0.01 * law,
            "a = {a}: measured {measured:.6} vs law {law:.6}"
        );
    }

    // The two laws differ by exactly sqrt(a); check the measured ratio too.
    let a = 1e-2;
    let field = far_field(a, CoherenceMode::Coherent { extra_phase: 0.0 });
    let stoch = fringe_visibility(&stochastic_profile(&field, DISTANCE, &grid).unwrap(), lo, hi)
        .unwrap();
    let chop =
        fringe_visibility(&chopper_profile(&field, DISTANCE, &grid).unwrap(), lo, hi).unwrap();
    let ratio = chop / stoch;
    assert!(
        (ratio - a.sqrt()).abs() <= 0.01 * a.sqrt(),
        "chopper / stochastic contrast ratio {ratio:.5} vs sqrt(a) {:.5}",
        a.sqrt()
    );
}

#[test]
fn fringe_spacing_matches_the_far_field_period() {
    let (grid, _, _) = window_grid();
    let field = far_field(1.0, CoherenceMode::Coherent { extra_phase: 0.0 });
    let profile = stochastic_profile(&field, DISTANCE, &grid).unwrap();
    let maxima = swept_maxima(&profile, 1e-12, f64::NEG_INFINITY);
    assert!(maxima.len() >= 3, "expected at least three maxima, found {}", maxima.len());
    let period = fringe_period();
    for pair in maxima.windows(2) {
        let spacing = pair[1] - pair[0];
        assert!(
            (spacing - period).abs() <= 0.005 * period,
            "fringe spacing {spacing:.2} vs period {period:.2}"
        );
    }
}

#[test]
fn decoherent_profile_reports_no_fringes() {
    let (grid, lo, hi) = window_grid();
    let field = far_field(1.0, CoherenceMode::DecoherentFixedPhase);
    let profile = stochastic_profile(&field, DISTANCE, &grid).unwrap();
    match fringe_visibility(&profile, lo, hi) {
        Err(Error::NoFringesDetected { .. }) => {}
        other => panic!("expected a no-fringes error, got {other:?}"),
    }
}

#[test]
fn duality_identity_closes_to_rounding() {
    for i in 0..=48 {
        let a = 10f64.powf(-12.0 + 12.0 * i as f64 / 48.0);
        let m = duality_metrics(a);
        assert!(
            m.residual.abs() <= 1e-12,
            "a = {a:.3e}: D^2 + V^2 - 1 = {:.3e}",
            m.residual
        );
        assert!(m.distinguishability >= 0.0 && m.distinguishability <= 1.0);
        assert!(m.visibility >= 0.0 && m.visibility <= 1.0);
    }
}

#[test]
fn display_transforms_flag_their_clipping() {
    // Near-field sweep geometry: a faint outer fringe train next to a
    // dominant lobe, which is what the log and zoom views exist for.
    let params = PhysicalParams::new(1.0, 1.0, 0.2).unwrap();
    let field = SuperposedField::symmetric(
        params,
        14.0,
        1.0,
        1e-8,
        CoherenceMode::Coherent { extra_phase: 0.0 },
    )
    .unwrap();
    let grid: Vec<f64> = (0..3201).map(|i| -160.0 + 0.1 * i as f64).collect();
    let profile = stochastic_profile(&field, 5.0, &grid).unwrap();

    let log = log_profile(&profile, 1e-12);
    assert_eq!(log.grid.len(), log.log10_intensity.len());
    assert!(log.log10_intensity.iter().all(|v| v.is_finite()));
    assert!(log.clamped.iter().any(|&c| c), "far tail should sit below a 12-decade floor");
    let peak_log = log.log10_intensity.iter().cloned().fold(f64::MIN, f64::max);
    let floor_log = log.floor.log10();
    assert!((peak_log - floor_log - 12.0).abs() <= 1e-9);

    let zoom = zoomed_profile(&profile, 1000.0);
    assert!(zoom.capped.iter().any(|&c| c), "the main lobe must hit the zoom cap");
    assert!(zoom.capped.iter().any(|&c| !c));
    let max_shown = zoom.intensity.iter().cloned().fold(0.0f64, f64::max);
    assert!(max_shown <= zoom.cap);

    // The swept fringe train sits many decades under the main lobe at this
    // attenuation, hence the effectively unfloored search.
    let outer = swept_maxima(&profile, 1e-30, 36.0);
    assert!(outer.len() >= 3, "expected a swept fringe train, found {}", outer.len());
}
