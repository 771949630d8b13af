//! Averaged trajectories of the guidance field.
//!
//! Ensembles are integrated in lockstep with fixed-step RK4: the whole
//! ensemble advances one step at a time and the three field frames of each
//! step are shared across trajectories. Seeds are sorted per slit, so the
//! single-valuedness of the guidance field implies the ensemble must stay
//! sorted; every step is audited for adjacent-pair order and any violation
//! is reported, not silently accepted.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::error::Error;
use crate::gaussians::dispersed_width;
use crate::numeric::{normal_cdf, normal_quantile};
use crate::superposition::{FieldFrame, SuperposedField};

/// How initial positions are drawn from the launch-time density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seeding {
    /// Midpoint quantiles `(k + 1/2)/n` of the span-truncated initial
    /// Gaussian: deterministic, evenly weighted, reproducible by
    /// construction.
    EqualCount,
    /// Independent draws from the same truncated Gaussian using a counter
    /// RNG seeded from `seed`: slit 1 consumes the stream first.
    DensityWeighted,
}

/// Ensemble integration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    /// Trajectories launched from each slit.
    pub n_per_slit: usize,
    pub seeding: Seeding,
    /// Seeds are confined to `center +- span * sigma0`.
    pub span: f64,
    /// RNG seed; unused by [`Seeding::EqualCount`].
    pub seed: u64,
    pub t_end: f64,
    /// Requested step; the actual step is `t_end / n` with `n` the nearest
    /// integer count, so the final sample lands exactly on `t_end`.
    pub dt: f64,
    /// Trajectories are confined to the channel centers widened by
    /// `domain_guard * sigma_t(t_end)`; leaving that interval truncates the
    /// trajectory and raises a flag instead of aborting the run.
    pub domain_guard: f64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n_per_slit == 0 {
            return Err(Error::InvalidParameter {
                name: "n_per_slit",
                value: 0.0,
                expected: "at least one trajectory per slit",
            });
        }
        for (name, value) in [
            ("span", self.span),
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("domain_guard", self.domain_guard),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    expected: "a finite number > 0",
                });
            }
        }
        Ok(())
    }

    /// Number of fixed steps actually taken.
    pub fn steps(&self) -> usize {
        let n = libm::round(self.t_end / self.dt);
        if n < 1.0 {
            1
        } else {
            n as usize
        }
    }

    /// Step size after snapping to an integer step count.
    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }
}

/// One integrated trajectory. `y` is the uniform forward drift
/// `v_forward * t`, kept explicit so arrival geometry reads off directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// 1 or 2, per launch channel.
    pub origin_slit: u8,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Trajectory {
    pub fn endpoint(&self) -> f64 {
        *self.x.last().expect("trajectory holds at least its seed")
    }
}

/// Where and when a trajectory left the guarded domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainEscapeInfo {
    pub t: f64,
    pub x: f64,
    pub bound_lo: f64,
    pub bound_hi: f64,
}

/// Per-trajectory integration diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrajectoryFlags {
    /// Set when the trajectory was truncated at the domain guard.
    pub domain_escape: Option<DomainEscapeInfo>,
    /// Guidance evaluations that hit the density floor and were clamped to
    /// the dominant channel's convective velocity.
    pub underflow_evals: u64,
}

/// First adjacent-pair order violation, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingViolation {
    pub step: usize,
    pub t: f64,
    /// Index (into the ensemble) of the left trajectory of the offending
    /// pair.
    pub left_index: usize,
}

/// Outcome of the per-step adjacent-pair order audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    pub preserved: bool,
    pub violations: u64,
    pub first_violation: Option<OrderingViolation>,
}

/// Trajectories, diagnostics, and the ordering audit of one ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub trajectories: Vec<Trajectory>,
    pub flags: Vec<TrajectoryFlags>,
    pub ordering: OrderingReport,
}

/// First crossing of a trajectory through a screen line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalEvent {
    /// Index into the ensemble's seed order.
    pub trajectory: usize,
    pub origin_slit: u8,
    pub t: f64,
    /// Forward coordinate at crossing, `v_forward * t`.
    pub y: f64,
    /// Transverse guidance velocity at the crossing point.
    pub velocity: f64,
    /// Incidence angle `atan2(velocity, v_forward)`: the direction of
    /// travel relative to the forward axis.
    pub angle: f64,
}

fn truncated_quantile(center: f64, sigma0: f64, span: f64, p: f64) -> f64 {
    let lo = normal_cdf(-span);
    let hi = normal_cdf(span);
    center + sigma0 * normal_quantile(lo + p * (hi - lo))
}

fn uniform_from_bits(rng: &mut impl RngCore) -> f64 {
    // 53 random bits over [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Draws launch positions per the spec: a `(slit, x0)` list, slit-1 block
/// first, each block ascending.
pub fn seed_positions(
    field: &SuperposedField,
    spec: &EnsembleSpec,
) -> Result<Vec<(u8, f64)>, Error> {
    spec.validate()?;
    let n = spec.n_per_slit;
    let mut seeds = Vec::with_capacity(2 * n);
    match spec.seeding {
        Seeding::EqualCount => {
            for (tag, ch) in [(1u8, &field.ch1), (2u8, &field.ch2)] {
                for k in 0..n {
                    let p = (k as f64 + 0.5) / n as f64;
                    seeds.push((tag, truncated_quantile(ch.center, ch.sigma0, spec.span, p)));
                }
            }
        }
        Seeding::DensityWeighted => {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(spec.seed);
            for (tag, ch) in [(1u8, &field.ch1), (2u8, &field.ch2)] {
                let mut block: Vec<f64> = (0..n)
                    .map(|_| {
                        truncated_quantile(
                            ch.center,
                            ch.sigma0,
                            spec.span,
                            uniform_from_bits(&mut rng),
                        )
                    })
                    .collect();
                block.sort_by(|a, b| a.partial_cmp(b).expect("finite seeds"));
                seeds.extend(block.into_iter().map(|x| (tag, x)));
            }
        }
    }
    Ok(seeds)
}

/// One RK4 step of `dx/dt = v(x, t)` for an arbitrary velocity field.
pub fn rk4_step_with(mut v: impl FnMut(f64, f64) -> f64, x: f64, t: f64, dt: f64) -> f64 {
    let k1 = v(x, t);
    let k2 = v(x + 0.5 * dt * k1, t + 0.5 * dt);
    let k3 = v(x + 0.5 * dt * k2, t + 0.5 * dt);
    let k4 = v(x + dt * k3, t + dt);
    x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

#[inline]
fn rk4_frames(
    fa: &FieldFrame,
    fm: &FieldFrame,
    fb: &FieldFrame,
    x: f64,
    dt: f64,
    underflows: &mut u64,
) -> f64 {
    let mut eval = |frame: &FieldFrame, x: f64| {
        let fv = frame.guidance_or_clamped(x);
        if fv.underflow {
            *underflows += 1;
        }
        fv.velocity
    };
    let k1 = eval(fa, x);
    let k2 = eval(fm, x + 0.5 * dt * k1);
    let k3 = eval(fm, x + 0.5 * dt * k2);
    let k4 = eval(fb, x + dt * k3);
    x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// One RK4 step of the guidance field with the documented underflow clamp.
pub fn rk4_step(field: &SuperposedField, x: f64, t: f64, dt: f64) -> f64 {
    let fa = field.frame(t);
    let fm = field.frame(t + 0.5 * dt);
    let fb = field.frame(t + dt);
    let mut scratch = 0;
    rk4_frames(&fa, &fm, &fb, x, dt, &mut scratch)
}

fn guard_interval(field: &SuperposedField, spec: &EnsembleSpec) -> (f64, f64) {
    let w1 = dispersed_width(&field.params, &field.ch1, spec.t_end);
    let w2 = dispersed_width(&field.params, &field.ch2, spec.t_end);
    let reach = spec.domain_guard * if w1 > w2 { w1 } else { w2 };
    let (c_lo, c_hi) = if field.ch1.center <= field.ch2.center {
        (field.ch1.center, field.ch2.center)
    } else {
        (field.ch2.center, field.ch1.center)
    };
    (c_lo - reach, c_hi + reach)
}

/// Integrates a single trajectory from `x0`.
pub fn integrate_trajectory(
    field: &SuperposedField,
    origin_slit: u8,
    x0: f64,
    spec: &EnsembleSpec,
) -> Result<(Trajectory, TrajectoryFlags), Error> {
    spec.validate()?;
    let steps = spec.steps();
    let dt = spec.effective_dt();
    let (lo, hi) = guard_interval(field, spec);
    let vf = field.params.v_forward;

    let mut traj = Trajectory {
        origin_slit,
        times: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
    };
    let mut flags = TrajectoryFlags::default();
    traj.times.push(0.0);
    traj.x.push(x0);
    traj.y.push(0.0);

    let mut x = x0;
    let mut frame_a = field.frame(0.0);
    for step in 0..steps {
        let t = step as f64 * dt;
        let t_next = (step + 1) as f64 * dt;
        let frame_m = field.frame(t + 0.5 * dt);
        let frame_b = field.frame(t_next);
        let x_new = rk4_frames(&frame_a, &frame_m, &frame_b, x, dt, &mut flags.underflow_evals);
        if !(lo..=hi).contains(&x_new) {
            flags.domain_escape = Some(DomainEscapeInfo {
                t: t_next,
                x: x_new,
                bound_lo: lo,
                bound_hi: hi,
            });
            break;
        }
        x = x_new;
        traj.times.push(t_next);
        traj.x.push(x);
        traj.y.push(vf * t_next);
        frame_a = frame_b;
    }
    Ok((traj, flags))
}

/// Runs a full two-slit ensemble in lockstep and audits trajectory order
/// after every step.
pub fn run_ensemble(
    field: &SuperposedField,
    spec: &EnsembleSpec,
) -> Result<EnsembleResult, Error> {
    let seeds = seed_positions(field, spec)?;
    let n_total = seeds.len();
    let steps = spec.steps();
    let dt = spec.effective_dt();
    let (lo, hi) = guard_interval(field, spec);
    let vf = field.params.v_forward;

    let mut trajectories: Vec<Trajectory> = seeds
        .iter()
        .map(|&(tag, x0)| {
            let mut t = Trajectory {
                origin_slit: tag,
                times: Vec::with_capacity(steps + 1),
                x: Vec::with_capacity(steps + 1),
                y: Vec::with_capacity(steps + 1),
            };
            t.times.push(0.0);
            t.x.push(x0);
            t.y.push(0.0);
            t
        })
        .collect();
    let mut flags = vec![TrajectoryFlags::default(); n_total];
    let mut positions: Vec<f64> = seeds.iter().map(|&(_, x0)| x0).collect();
    let mut active = vec![true; n_total];
    let mut ordering = OrderingReport { preserved: true, violations: 0, first_violation: None };

    let mut frame_a = field.frame(0.0);
    for step in 0..steps {
        let t = step as f64 * dt;
        let t_next = (step + 1) as f64 * dt;
        let frame_m = field.frame(t + 0.5 * dt);
        let frame_b = field.frame(t_next);

        for i in 0..n_total {
            if !active[i] {
                continue;
            }
            let x_new = rk4_frames(
                &frame_a,
                &frame_m,
                &frame_b,
                positions[i],
                dt,
                &mut flags[i].underflow_evals,
            );
            if !(lo..=hi).contains(&x_new) {
                flags[i].domain_escape = Some(DomainEscapeInfo {
                    t: t_next,
                    x: x_new,
                    bound_lo: lo,
                    bound_hi: hi,
                });
                active[i] = false;
                continue;
            }
            positions[i] = x_new;
            trajectories[i].times.push(t_next);
            trajectories[i].x.push(x_new);
            trajectories[i].y.push(vf * t_next);
        }

        // Adjacent-pair audit over the still-active ensemble.
        let mut prev: Option<(usize, f64)> = None;
        for i in 0..n_total {
            if !active[i] {
                continue;
            }
            if let Some((left, left_x)) = prev {
                if positions[i] <= left_x {
                    ordering.violations += 1;
                    if ordering.first_violation.is_none() {
                        ordering.first_violation =
                            Some(OrderingViolation { step, t: t_next, left_index: left });
                    }
                }
            }
            prev = Some((i, positions[i]));
        }

        frame_a = frame_b;
    }
    ordering.preserved = ordering.violations == 0;

    Ok(EnsembleResult { trajectories, flags, ordering })
}

/// Integrates the ensemble and records each trajectory's first crossing of
/// the line `x = offset`, without retaining the paths. Trajectories that
/// never reach the line (or leave the domain first) yield `None`.
pub fn first_crossings(
    field: &SuperposedField,
    spec: &EnsembleSpec,
    offset: f64,
) -> Result<Vec<Option<ArrivalEvent>>, Error> {
    let seeds = seed_positions(field, spec)?;
    let n_total = seeds.len();
    let steps = spec.steps();
    let dt = spec.effective_dt();
    let (lo, hi) = guard_interval(field, spec);
    let vf = field.params.v_forward;

    let mut events: Vec<Option<ArrivalEvent>> = vec![None; n_total];
    let mut positions: Vec<f64> = seeds.iter().map(|&(_, x0)| x0).collect();
    let mut active: Vec<bool> = positions.iter().map(|&x| x != offset).collect();
    for (i, &(tag, x0)) in seeds.iter().enumerate() {
        if x0 == offset {
            // Seeded on the line: that is its crossing.
            let frame = field.frame(0.0);
            let velocity = frame.guidance_or_clamped(offset).velocity;
            events[i] = Some(ArrivalEvent {
                trajectory: i,
                origin_slit: tag,
                t: 0.0,
                y: 0.0,
                velocity,
                angle: libm::atan2(velocity, vf),
            });
        }
    }

    let mut scratch = 0u64;
    let mut frame_a = field.frame(0.0);
    for step in 0..steps {
        let t = step as f64 * dt;
        let t_next = (step + 1) as f64 * dt;
        let frame_m = field.frame(t + 0.5 * dt);
        let frame_b = field.frame(t_next);

        for i in 0..n_total {
            if !active[i] {
                continue;
            }
            let x_old = positions[i];
            let x_new = rk4_frames(&frame_a, &frame_m, &frame_b, x_old, dt, &mut scratch);
            if !(lo..=hi).contains(&x_new) {
                active[i] = false;
                continue;
            }
            positions[i] = x_new;
            let crossed = (x_old < offset && x_new >= offset)
                || (x_old > offset && x_new <= offset);
            if crossed {
                let frac = (offset - x_old) / (x_new - x_old);
                let t_c = t + frac * dt;
                let velocity = field.frame(t_c).guidance_or_clamped(offset).velocity;
                events[i] = Some(ArrivalEvent {
                    trajectory: i,
                    origin_slit: seeds[i].0,
                    t: t_c,
                    y: vf * t_c,
                    velocity,
                    angle: libm::atan2(velocity, vf),
                });
                active[i] = false;
            }
        }

        frame_a = frame_b;
    }

    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussians::PhysicalParams;
    use crate::superposition::CoherenceMode;
    use approx::assert_relative_eq;

    fn coherent() -> CoherenceMode {
        CoherenceMode::Coherent { extra_phase: 0.0 }
    }

    fn field(a: f64) -> SuperposedField {
        SuperposedField::symmetric(PhysicalParams::default(), 14.0, 1.0, a, coherent())
            .unwrap()
    }

    fn small_spec() -> EnsembleSpec {
        EnsembleSpec {
            n_per_slit: 8,
            seeding: Seeding::EqualCount,
            span: 3.0,
            seed: 42,
            t_end: 2.0,
            dt: 0.01,
            domain_guard: 64.0,
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = small_spec();
        s.n_per_slit = 0;
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.dt = 0.0;
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.t_end = f64::NAN;
        assert!(s.validate().is_err());
    }

    #[test]
    fn step_snapping_lands_on_t_end() {
        let mut s = small_spec();
        s.t_end = 1.0;
        s.dt = 0.3;
        assert_eq!(s.steps(), 3);
        assert_relative_eq!(s.effective_dt() * s.steps() as f64, 1.0);
        s.dt = 0.01;
        assert_eq!(s.steps(), 100);
        assert_eq!(s.effective_dt(), 0.01);
    }

    #[test]
    fn equal_count_seeds_hit_the_quantiles() {
        let f = field(1.0);
        let spec = small_spec();
        let seeds = seed_positions(&f, &spec).unwrap();
        assert_eq!(seeds.len(), 16);
        assert!(seeds[..8].iter().all(|&(tag, _)| tag == 1));
        assert!(seeds[8..].iter().all(|&(tag, _)| tag == 2));
        // Direct recomputation of the truncated quantile transform.
        let lo = normal_cdf(-3.0);
        let hi = normal_cdf(3.0);
        assert_eq!(seeds[0].1, -14.0 + normal_quantile(lo + 0.5 / 8.0 * (hi - lo)));
        assert_eq!(seeds[1].1, -14.0 + normal_quantile(lo + 1.5 / 8.0 * (hi - lo)));
        // Symmetric quantiles land symmetrically around each center.
        for k in 0..8 {
            assert_relative_eq!(
                seeds[k].1 + 14.0,
                -(seeds[7 - k].1 + 14.0),
                epsilon = 1e-12
            );
        }
        // Inside the span and sorted.
        for block in [&seeds[..8], &seeds[8..]] {
            for w in block.windows(2) {
                assert!(w[0].1 < w[1].1);
            }
            let c = block[0].0 as f64;
            let center = if c == 1.0 { -14.0 } else { 14.0 };
            for &(_, x) in block.iter() {
                assert!((x - center).abs() < 3.0);
            }
        }
    }

    #[test]
    fn density_weighted_seeds_are_reproducible_and_sorted() {
        let f = field(0.5);
        let mut spec = small_spec();
        spec.seeding = Seeding::DensityWeighted;
        spec.n_per_slit = 40;
        let a = seed_positions(&f, &spec).unwrap();
        let b = seed_positions(&f, &spec).unwrap();
        assert_eq!(a, b);
        spec.seed = 43;
        let c = seed_positions(&f, &spec).unwrap();
        assert_ne!(a, c);
        for block in [&a[..40], &a[40..]] {
            for w in block.windows(2) {
                assert!(w[0].1 <= w[1].1);
            }
        }
        assert!(a[..40].iter().all(|&(_, x)| (x + 14.0).abs() < 3.0));
        assert!(a[40..].iter().all(|&(_, x)| (x - 14.0).abs() < 3.0));
    }

    #[test]
    fn rk4_matches_the_exponential_on_a_synthetic_field() {
        // dx/dt = x has the exact solution x0 e^t; one step of classical
        // RK4 must reproduce the quartic Taylor polynomial exactly.
        let dt = 0.1;
        let x1 = rk4_step_with(|x, _| x, 1.0, 0.0, dt);
        let taylor = 1.0 + dt + dt * dt / 2.0 + dt * dt * dt / 6.0 + dt * dt * dt * dt / 24.0;
        assert_relative_eq!(x1, taylor, epsilon = 1e-16);
        // And over many steps converge to e within the O(dt^4) truncation,
        // about t dt^4 / 120 relative here.
        let mut x = 1.0;
        let mut t = 0.0;
        for _ in 0..10 {
            x = rk4_step_with(|x, _| x, x, t, dt);
            t += dt;
        }
        assert_relative_eq!(x, libm::exp(1.0), max_relative = 2e-6);
    }

    #[test]
    fn single_point_step_agrees_with_the_ensemble_path() {
        let f = field(0.1);
        let spec = EnsembleSpec { n_per_slit: 3, t_end: 0.5, dt: 0.05, ..small_spec() };
        let result = run_ensemble(&f, &spec).unwrap();
        let seeds = seed_positions(&f, &spec).unwrap();
        for (i, &(_, x0)) in seeds.iter().enumerate() {
            let mut x = x0;
            for step in 0..spec.steps() {
                let t = step as f64 * spec.effective_dt();
                x = rk4_step(&f, x, t, spec.effective_dt());
            }
            assert_eq!(x, result.trajectories[i].endpoint(), "trajectory {i}");
        }
    }

    #[test]
    fn midline_trajectory_is_a_fixed_point_when_symmetric() {
        for mode in [coherent(), CoherenceMode::DecoherentAveraged] {
            let f = SuperposedField::symmetric(PhysicalParams::default(), 14.0, 1.0, 1.0, mode)
                .unwrap();
            let spec = EnsembleSpec { t_end: 5.0, dt: 0.01, ..small_spec() };
            let (traj, flags) = integrate_trajectory(&f, 1, 0.0, &spec).unwrap();
            assert!(flags.domain_escape.is_none());
            assert!(traj.x.iter().all(|&x| x == 0.0), "midline moved: {:?}", traj.x.last());
        }
    }

    #[test]
    fn ensemble_keeps_its_order_in_a_smooth_field() {
        let f = field(1.0);
        let spec = EnsembleSpec { n_per_slit: 20, t_end: 5.0, dt: 0.01, ..small_spec() };
        let result = run_ensemble(&f, &spec).unwrap();
        assert!(result.ordering.preserved);
        assert_eq!(result.ordering.violations, 0);
        assert_eq!(result.trajectories.len(), 40);
        for t in &result.trajectories {
            assert_eq!(t.times.len(), spec.steps() + 1);
            assert_eq!(t.x.len(), t.times.len());
            assert_eq!(t.y.len(), t.times.len());
            assert_relative_eq!(*t.times.last().unwrap(), 5.0);
        }
        // Forward drift is uniform.
        let tr = &result.trajectories[0];
        assert_eq!(tr.y[100], tr.times[100] * 1.0);
    }

    #[test]
    fn mirror_image_ensembles_are_reflections() {
        // Swapping the attenuated channel to the other side mirrors every
        // trajectory: integrate a and its mirror, compare endpoints.
        let p = PhysicalParams::default();
        let a = 0.01;
        let right = SuperposedField::symmetric(p, 14.0, 1.0, a, coherent()).unwrap();
        let left = SuperposedField::new(
            p,
            crate::gaussians::ChannelParams::slit(14.0, 1.0).unwrap(),
            -14.0,
            1.0,
            a,
            coherent(),
        )
        .unwrap();
        let spec = EnsembleSpec { n_per_slit: 10, t_end: 5.0, dt: 0.01, ..small_spec() };
        let r = run_ensemble(&right, &spec).unwrap();
        let l = run_ensemble(&left, &spec).unwrap();
        // Right's slit-1 block mirrors left's slit-1 block reversed.
        for k in 0..10 {
            let a_end = r.trajectories[k].endpoint();
            let b_end = l.trajectories[9 - k].endpoint();
            assert_relative_eq!(a_end, -b_end, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn stationary_single_channel_center_stays_put() {
        // With the second channel dark, the packet center rides the zero of
        // the convective field.
        let f = field(0.0);
        let spec = EnsembleSpec { t_end: 10.0, dt: 0.01, ..small_spec() };
        let (traj, _) = integrate_trajectory(&f, 1, -14.0, &spec).unwrap();
        assert_relative_eq!(traj.endpoint(), -14.0, epsilon = 1e-9);
    }

    #[test]
    fn tight_domain_guard_truncates_outer_trajectories() {
        let f = field(1.0);
        // sigma_t(1) is about 1.12, so a guard of one width reaches 1.12
        // from each center while the outermost seeds sit past 2 sigma.
        let spec = EnsembleSpec {
            n_per_slit: 20,
            seeding: Seeding::EqualCount,
            span: 3.0,
            seed: 1,
            t_end: 1.0,
            dt: 0.1,
            domain_guard: 1.0,
        };
        let result = run_ensemble(&f, &spec).unwrap();
        let escaped: usize =
            result.flags.iter().filter(|f| f.domain_escape.is_some()).count();
        assert!(escaped > 0, "expected at least one truncated trajectory");
        let completed = result.flags.iter().filter(|f| f.domain_escape.is_none()).count();
        assert!(completed > 0, "inner trajectories should survive");
        for (traj, flag) in result.trajectories.iter().zip(&result.flags) {
            if let Some(info) = flag.domain_escape {
                assert!(traj.times.len() < spec.steps() + 1);
                assert!(info.x < info.bound_lo || info.x > info.bound_hi);
            }
        }
    }

    #[test]
    fn crossings_interpolate_between_steps() {
        let f = field(1e-4);
        let spec = EnsembleSpec {
            n_per_slit: 30,
            seeding: Seeding::EqualCount,
            span: 3.0,
            seed: 7,
            t_end: 40.0,
            dt: 0.01,
            domain_guard: 64.0,
        };
        let events = first_crossings(&f, &spec, 25.0).unwrap();
        assert_eq!(events.len(), 60);
        let hits: Vec<&ArrivalEvent> = events.iter().flatten().collect();
        assert!(!hits.is_empty(), "no trajectory reached the line");
        for e in &hits {
            assert!(e.t > 0.0 && e.t <= 40.0);
            assert_relative_eq!(e.y, e.t * f.params.v_forward);
            assert_eq!(e.angle, libm::atan2(e.velocity, f.params.v_forward));
        }
        // At this attenuation the whole slit-2 block is swept outward
        // through the line, moving rightward as it crosses.
        let slit2: Vec<&&ArrivalEvent> =
            hits.iter().filter(|e| e.origin_slit == 2).collect();
        assert_eq!(slit2.len(), 30, "every slit-2 trajectory should cross");
        assert!(slit2.iter().all(|e| e.velocity > 0.0));
    }
}
