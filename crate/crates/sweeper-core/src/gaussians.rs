//! Closed-form evolution of a single dispersing Gaussian channel.
//!
//! Each channel is parametrized by its launch center, initial width, and a
//! real weight. Evolution in natural units is governed by the dimensionless
//! spread parameter `tau = hbar t / (2 m sigma0^2)`; the squared width grows
//! as `sigma0^2 (1 + tau^2)` and is always computed in that form so width,
//! amplitude, and phase stay mutually consistent to the last bit.

use crate::error::{check_finite, check_positive, Error};

/// Global physical constants for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// Uniform forward (longitudinal) speed carrying the beam to the screen.
    pub v_forward: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, v_forward: f64) -> Result<Self, Error> {
        Ok(Self {
            hbar: check_positive("hbar", hbar)?,
            mass: check_positive("mass", mass)?,
            v_forward: check_positive("v_forward", v_forward)?,
        })
    }
}

impl Default for PhysicalParams {
    /// Natural units with unit forward speed.
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, v_forward: 1.0 }
    }
}

/// One Gaussian channel: launch center, initial width, real weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub center: f64,
    pub sigma0: f64,
    /// Real amplitude factor; the channel's norm is `weight^2`. Zero is
    /// allowed and switches the channel off.
    pub weight: f64,
}

impl ChannelParams {
    pub fn new(center: f64, sigma0: f64, weight: f64) -> Result<Self, Error> {
        let weight = check_finite("weight", weight)?;
        if weight < 0.0 {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight,
                expected: "a finite number >= 0",
            });
        }
        Ok(Self {
            center: check_finite("center", center)?,
            sigma0: check_positive("sigma0", sigma0)?,
            weight,
        })
    }

    /// Unit-weight channel.
    pub fn slit(center: f64, sigma0: f64) -> Result<Self, Error> {
        Self::new(center, sigma0, 1.0)
    }

    /// Dimensionless spread parameter at time `t`.
    pub fn tau(&self, params: &PhysicalParams, t: f64) -> f64 {
        params.hbar * t / (2.0 * params.mass * self.sigma0 * self.sigma0)
    }
}

/// Polar-form sample of one channel at a point: amplitude `R`, phase `S`
/// (action units), their log/plain gradients, and the two velocity fields
/// they generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// `R(x, t) >= 0`.
    pub amplitude: f64,
    /// `d(ln R)/dx`; finite even where the amplitude underflows.
    pub log_amp_gradient: f64,
    /// Phase `S(x, t)` in action units.
    pub phase: f64,
    /// `dS/dx`.
    pub phase_gradient: f64,
    /// Convective velocity `dS/dx / m`.
    pub v: f64,
    /// Diffusive (osmotic-type) velocity `-(hbar/m) d(ln R)/dx`.
    pub u: f64,
}

/// Squared width `sigma0^2 (1 + tau^2)` at time `t`.
pub fn dispersed_width_sq(params: &PhysicalParams, channel: &ChannelParams, t: f64) -> f64 {
    let tau = channel.tau(params, t);
    channel.sigma0 * channel.sigma0 * (1.0 + tau * tau)
}

/// Width `sigma_t = sigma0 sqrt(1 + tau^2)` at time `t`.
pub fn dispersed_width(params: &PhysicalParams, channel: &ChannelParams, t: f64) -> f64 {
    libm::sqrt(dispersed_width_sq(params, channel, t))
}

/// Evaluates one channel at `(x, t)`, `t >= 0`.
///
/// The convective and diffusive velocities are derived from the returned
/// gradients by construction: `v = phase_gradient / m` and
/// `u = -(hbar/m) log_amp_gradient` hold exactly in floating point.
pub fn sample_channel(
    params: &PhysicalParams,
    channel: &ChannelParams,
    x: f64,
    t: f64,
) -> FieldSample {
    debug_assert!(t >= 0.0, "sample_channel expects t >= 0");
    let tau = channel.tau(params, t);
    let s2 = channel.sigma0 * channel.sigma0 * (1.0 + tau * tau);
    let d = x - channel.center;

    let quarter = d * d / (4.0 * s2);
    let norm = libm::sqrt(libm::sqrt(1.0 / (2.0 * core::f64::consts::PI * s2)));
    let amplitude = channel.weight * norm * libm::exp(-quarter);

    let log_amp_gradient = -d / (2.0 * s2);
    let phase = params.hbar * (tau * quarter - 0.5 * libm::atan(tau));
    let phase_gradient = params.hbar * tau * d / (2.0 * s2);

    FieldSample {
        amplitude,
        log_amp_gradient,
        phase,
        phase_gradient,
        v: phase_gradient / params.mass,
        u: -(params.hbar / params.mass) * log_amp_gradient,
    }
}
