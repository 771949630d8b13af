//! Two-channel superposition: total density, total current, guidance field.
//!
//! The second channel carries weight `sqrt(a)` for beam attenuation
//! `a in [0, 1]`. Interference enters through a cosine term in the density
//! and both cosine (convective) and sine (diffusive) cross terms in the
//! current. Decoherence is modeled by dropping the cosine term while keeping
//! the sine term either at a fixed phase or at the coherent running phase.

use alloc::vec::Vec;

use crate::error::{check_finite, check_unit_interval, Error};
use crate::gaussians::{sample_channel, ChannelParams, FieldSample, PhysicalParams};
use crate::numeric;

/// How the two channels combine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceMode {
    /// Full interference with an optional constant phase offset on channel 2.
    Coherent { extra_phase: f64 },
    /// Density cross term averaged away; the current's sine term kept at its
    /// fixed-phase maximum (`sin = 1`). Breaks mirror symmetry by design.
    DecoherentFixedPhase,
    /// Density cross term averaged away; the sine term keeps the coherent
    /// running phase. Preserves mirror symmetry.
    DecoherentAveraged,
}

impl CoherenceMode {
    /// Cosine/sine factors applied to the cross terms at phase `phi`.
    #[inline]
    fn factors(&self, phi: f64) -> (f64, f64) {
        match self {
            CoherenceMode::Coherent { .. } => (libm::cos(phi), libm::sin(phi)),
            CoherenceMode::DecoherentFixedPhase => (0.0, 1.0),
            CoherenceMode::DecoherentAveraged => (0.0, libm::sin(phi)),
        }
    }

    fn extra_phase(&self) -> f64 {
        match self {
            CoherenceMode::Coherent { extra_phase } => *extra_phase,
            _ => 0.0,
        }
    }
}

/// Density, current, and derived quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    /// Total density `P = R1^2 + R2^2 + 2 R1 R2 cos`.
    pub density: f64,
    /// Total current `J`.
    pub current: f64,
    /// Guidance velocity `J / P` under IEEE semantics: infinite or NaN where
    /// the density vanishes. See [`SuperposedField::guidance_velocity`] for
    /// the checked variant.
    pub v_tot: f64,
    /// Convective cross term `R1 R2 (v1 + v2) cos`.
    pub cos_term: f64,
    /// Diffusive cross term `R1 R2 (u1 - u2) sin`.
    pub sin_term: f64,
}

/// One node of an interference map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapNode {
    pub x: f64,
    pub t: f64,
    pub density: f64,
    pub current: f64,
    pub cos_term: f64,
    pub sin_term: f64,
}

/// Velocity branch of the six-component current decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionComponent {
    /// Channel-1 convective branch, velocity `v1`.
    V1,
    /// Channel-2 convective branch, velocity `v2`.
    V2,
    /// Channel-1 diffusive branches, velocities `+u1/2` and `-u1/2`.
    U1R,
    U1L,
    /// Channel-2 diffusive branches, velocities `+u2/2` and `-u2/2`.
    U2R,
    U2L,
}

impl ProjectionComponent {
    pub const ALL: [ProjectionComponent; 6] = [
        ProjectionComponent::V1,
        ProjectionComponent::V2,
        ProjectionComponent::U1R,
        ProjectionComponent::U1L,
        ProjectionComponent::U2R,
        ProjectionComponent::U2L,
    ];
}

/// Two dispersing Gaussian channels combined per a [`CoherenceMode`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposedField {
    pub params: PhysicalParams,
    pub ch1: ChannelParams,
    pub ch2: ChannelParams,
    /// Intensity attenuation of channel 2; its weight is `sqrt(a)`.
    pub attenuation: f64,
    pub mode: CoherenceMode,
    /// Densities at or below this value make `J/P` meaningless; the guidance
    /// evaluators report underflow there.
    pub density_floor: f64,
    /// Multiplier on the current's sine cross term. 1 is physical; 0 removes
    /// the diffusive cross current for diagnostic runs.
    pub sin_term_scale: f64,
}

impl SuperposedField {
    /// Full-control constructor: channel 1 as given (its weight is free),
    /// channel 2 built at `ch2_center`/`ch2_sigma0` with weight `sqrt(a)`.
    pub fn new(
        params: PhysicalParams,
        ch1: ChannelParams,
        ch2_center: f64,
        ch2_sigma0: f64,
        attenuation: f64,
        mode: CoherenceMode,
    ) -> Result<Self, Error> {
        let attenuation = check_unit_interval("attenuation", attenuation)?;
        if let CoherenceMode::Coherent { extra_phase } = mode {
            check_finite("extra_phase", extra_phase)?;
        }
        let ch2 = ChannelParams::new(ch2_center, ch2_sigma0, libm::sqrt(attenuation))?;
        Ok(Self {
            params,
            ch1,
            ch2,
            attenuation,
            mode,
            density_floor: 1e-280,
            sin_term_scale: 1.0,
        })
    }

    /// Symmetric double slit: unit-weight channel at `-half_separation`,
    /// attenuated channel at `+half_separation`, equal widths.
    pub fn symmetric(
        params: PhysicalParams,
        half_separation: f64,
        sigma0: f64,
        attenuation: f64,
        mode: CoherenceMode,
    ) -> Result<Self, Error> {
        let half = check_finite("half_separation", half_separation)?;
        let ch1 = ChannelParams::slit(-half, sigma0)?;
        Self::new(params, ch1, half, sigma0, attenuation, mode)
    }

    pub fn with_density_floor(mut self, floor: f64) -> Result<Self, Error> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "density_floor",
                value: floor,
                expected: "a finite number > 0",
            });
        }
        self.density_floor = floor;
        Ok(self)
    }

    pub fn with_sin_term_scale(mut self, scale: f64) -> Result<Self, Error> {
        self.sin_term_scale = check_finite("sin_term_scale", scale)?;
        Ok(self)
    }

    /// Running phase difference `(S2 - S1)/hbar`, plus the coherent offset
    /// when one is configured.
    pub fn relative_phase(&self, x: f64, t: f64) -> f64 {
        let s1 = sample_channel(&self.params, &self.ch1, x, t);
        let s2 = sample_channel(&self.params, &self.ch2, x, t);
        (s2.phase - s1.phase) / self.params.hbar + self.mode.extra_phase()
    }

    fn samples(&self, x: f64, t: f64) -> (FieldSample, FieldSample, f64, f64) {
        let s1 = sample_channel(&self.params, &self.ch1, x, t);
        let s2 = sample_channel(&self.params, &self.ch2, x, t);
        let phi = (s2.phase - s1.phase) / self.params.hbar + self.mode.extra_phase();
        let (cs, sn) = self.mode.factors(phi);
        (s1, s2, cs, sn * self.sin_term_scale)
    }

    /// Total density `P = R1^2 + R2^2 + 2 R1 R2 cos`.
    pub fn total_density(&self, x: f64, t: f64) -> f64 {
        let (s1, s2, cs, _) = self.samples(x, t);
        s1.amplitude * s1.amplitude
            + s2.amplitude * s2.amplitude
            + 2.0 * s1.amplitude * s2.amplitude * cs
    }

    /// Total current and its decomposition at one point.
    pub fn total_current(&self, x: f64, t: f64) -> CurrentSample {
        let (s1, s2, cs, sn) = self.samples(x, t);
        let (r1, r2) = (s1.amplitude, s2.amplitude);
        let cross = r1 * r2;
        let density = r1 * r1 + r2 * r2 + 2.0 * cross * cs;
        let cos_term = cross * (s1.v + s2.v) * cs;
        let sin_term = cross * (s1.u - s2.u) * sn;
        let current = r1 * r1 * s1.v + r2 * r2 * s2.v + cos_term + sin_term;
        CurrentSample { density, current, v_tot: current / density, cos_term, sin_term }
    }

    /// Guidance velocity `J/P`, or [`Error::DensityUnderflow`] where the
    /// density is at or below the floor. Callers that keep integrating should
    /// fall back to [`Self::dominant_convective_velocity`].
    pub fn guidance_velocity(&self, x: f64, t: f64) -> Result<f64, Error> {
        let s = self.total_current(x, t);
        if s.density > self.density_floor {
            Ok(s.current / s.density)
        } else {
            Err(Error::DensityUnderflow {
                x,
                t,
                density: s.density,
                floor: self.density_floor,
            })
        }
    }

    /// Convective velocity of whichever channel carries more density at
    /// `(x, t)`, judged on log scale so it stays meaningful deep in the
    /// tails. Ties go to channel 1.
    pub fn dominant_convective_velocity(&self, x: f64, t: f64) -> f64 {
        let frame = self.frame(t);
        let d1 = x - frame.c1;
        let d2 = x - frame.c2;
        let l1 = frame.ln_norm1 - 2.0 * d1 * d1 * frame.a4_1;
        let l2 = frame.ln_norm2 - 2.0 * d2 * d2 * frame.a4_2;
        if l2 > l1 {
            frame.cv2 * d2
        } else {
            frame.cv1 * d1
        }
    }

    /// Position where the diffusive velocities cancel, `u1 + u2 = 0`: the
    /// locus trajectories from the two channels cannot cross. Both `u_i` are
    /// linear in `x` with positive slope, so the root is unique and in closed
    /// form; for equal widths it is the midpoint `(c1 + c2)/2` independent of
    /// `t` and the attenuation.
    pub fn no_crossing_locus(&self, t: f64) -> f64 {
        if self.ch1.sigma0 == self.ch2.sigma0 {
            return 0.5 * (self.ch1.center + self.ch2.center);
        }
        let k1 = 1.0 / crate::gaussians::dispersed_width_sq(&self.params, &self.ch1, t);
        let k2 = 1.0 / crate::gaussians::dispersed_width_sq(&self.params, &self.ch2, t);
        (k1 * self.ch1.center + k2 * self.ch2.center) / (k1 + k2)
    }

    /// Root of `u1 + u2` restricted to a caller-supplied bracket; fails with
    /// [`Error::NoUniqueRoot`] when the bracket excludes the locus.
    pub fn no_crossing_locus_in(&self, t: f64, lo: f64, hi: f64) -> Result<f64, Error> {
        let g = |x: f64| {
            let s1 = sample_channel(&self.params, &self.ch1, x, t);
            let s2 = sample_channel(&self.params, &self.ch2, x, t);
            s1.u + s2.u
        };
        numeric::bisect(g, lo, hi).ok_or(Error::NoUniqueRoot { lo, hi })
    }

    /// Signed weight of one branch of the six-component current
    /// decomposition. Negative lobes appear where the minority channel
    /// dominates; the weights are not a partition of the density.
    pub fn projection_intensity(&self, x: f64, t: f64, component: ProjectionComponent) -> f64 {
        let (s1, s2, cs, sn) = self.samples(x, t);
        let (r1, r2) = (s1.amplitude, s2.amplitude);
        let cross = r1 * r2;
        match component {
            ProjectionComponent::V1 => r1 * r1 + cross * cs,
            ProjectionComponent::V2 => r2 * r2 + cross * cs,
            ProjectionComponent::U1R => r1 * r1 + cross * sn,
            ProjectionComponent::U1L => r1 * r1 - cross * sn,
            ProjectionComponent::U2R => r2 * r2 - cross * sn,
            ProjectionComponent::U2L => r2 * r2 + cross * sn,
        }
    }

    /// Velocity carried by one branch of the decomposition. Summing
    /// `velocity * intensity` over all six branches recovers the total
    /// current.
    pub fn projection_velocity(&self, x: f64, t: f64, component: ProjectionComponent) -> f64 {
        let s1 = sample_channel(&self.params, &self.ch1, x, t);
        let s2 = sample_channel(&self.params, &self.ch2, x, t);
        match component {
            ProjectionComponent::V1 => s1.v,
            ProjectionComponent::V2 => s2.v,
            ProjectionComponent::U1R => 0.5 * s1.u,
            ProjectionComponent::U1L => -0.5 * s1.u,
            ProjectionComponent::U2R => 0.5 * s2.u,
            ProjectionComponent::U2L => -0.5 * s2.u,
        }
    }

    /// Density, current, and cross terms on the lattice `ts x xs`,
    /// row-major with `t` as the outer index.
    pub fn interference_map(&self, xs: &[f64], ts: &[f64]) -> Vec<MapNode> {
        let mut nodes = Vec::with_capacity(xs.len() * ts.len());
        for &t in ts {
            for &x in xs {
                let s = self.total_current(x, t);
                nodes.push(MapNode {
                    x,
                    t,
                    density: s.density,
                    current: s.current,
                    cos_term: s.cos_term,
                    sin_term: s.sin_term,
                });
            }
        }
        nodes
    }

    /// Precomputes everything that depends only on `t` so the guidance field
    /// can be evaluated cheaply at many positions. The integrators build two
    /// of these per step.
    pub fn frame(&self, t: f64) -> FieldFrame {
        FieldFrame::new(self, t)
    }
}

/// Guidance velocity plus the underflow flag from one frame evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVelocity {
    pub velocity: f64,
    /// True when the total density sat at or below the floor and the
    /// velocity was clamped to the dominant channel's convective field.
    pub underflow: bool,
}

/// Single-time cache of the guidance field.
///
/// Evaluation uses the amplitude ratio `r = R2/R1` computed from log
/// densities, so one `exp` and one `sin`/`cos` pair per point suffice and
/// the result stays finite at any attenuation. Values agree with
/// [`SuperposedField::guidance_velocity`] to ~1e-13 relative error wherever
/// the density is healthy.
#[derive(Debug, Clone)]
pub struct FieldFrame {
    mode: CoherenceMode,
    sin_scale: f64,
    c1: f64,
    c2: f64,
    /// `1 / (4 sigma_t^2)` per channel.
    a4_1: f64,
    a4_2: f64,
    /// `ln(w^2) - ln(2 pi sigma_t^2)/2` per channel, so that
    /// `ln R^2 = ln_norm - 2 A` with `A = d^2 a4`.
    ln_norm1: f64,
    ln_norm2: f64,
    /// Velocity slopes: `v = cv d`, `u = cu d`.
    cv1: f64,
    cv2: f64,
    cu1: f64,
    cu2: f64,
    /// Phase: `phi = tau2 A2 - tau1 A1 + phase_const`.
    tau1: f64,
    tau2: f64,
    phase_const: f64,
    ln_floor: f64,
}

impl FieldFrame {
    fn new(field: &SuperposedField, t: f64) -> Self {
        let p = &field.params;
        let two_pi = 2.0 * core::f64::consts::PI;

        let tau1 = field.ch1.tau(p, t);
        let tau2 = field.ch2.tau(p, t);
        let s2_1 = field.ch1.sigma0 * field.ch1.sigma0 * (1.0 + tau1 * tau1);
        let s2_2 = field.ch2.sigma0 * field.ch2.sigma0 * (1.0 + tau2 * tau2);

        let cu1 = p.hbar / (2.0 * p.mass * s2_1);
        let cu2 = p.hbar / (2.0 * p.mass * s2_2);

        Self {
            mode: field.mode,
            sin_scale: field.sin_term_scale,
            c1: field.ch1.center,
            c2: field.ch2.center,
            a4_1: 1.0 / (4.0 * s2_1),
            a4_2: 1.0 / (4.0 * s2_2),
            ln_norm1: 2.0 * libm::log(field.ch1.weight) - 0.5 * libm::log(two_pi * s2_1),
            ln_norm2: 2.0 * libm::log(field.ch2.weight) - 0.5 * libm::log(two_pi * s2_2),
            cv1: tau1 * cu1,
            cv2: tau2 * cu2,
            cu1,
            cu2,
            tau1,
            tau2,
            phase_const: -0.5 * (libm::atan(tau2) - libm::atan(tau1))
                + field.mode.extra_phase(),
            ln_floor: libm::log(field.density_floor),
        }
    }

    /// Guidance velocity with the documented underflow fallback: where the
    /// total density is at or below the floor, returns the dominant
    /// channel's convective velocity and sets the flag.
    pub fn guidance_or_clamped(&self, x: f64) -> FrameVelocity {
        let d1 = x - self.c1;
        let d2 = x - self.c2;
        let a1 = d1 * d1 * self.a4_1;
        let a2 = d2 * d2 * self.a4_2;
        let l1 = self.ln_norm1 - 2.0 * a1;
        let l2 = self.ln_norm2 - 2.0 * a2;
        let v1 = self.cv1 * d1;
        let v2 = self.cv2 * d2;

        let half = 0.5 * (l2 - l1);
        if half.is_nan() {
            // Both channels dark (zero weights).
            return FrameVelocity { velocity: v1, underflow: true };
        }
        if half > 350.0 {
            return FrameVelocity { velocity: v2, underflow: l2 <= self.ln_floor };
        }
        if half < -350.0 {
            return FrameVelocity { velocity: v1, underflow: l1 <= self.ln_floor };
        }

        let phi = self.tau2 * a2 - self.tau1 * a1 + self.phase_const;
        let (cs, sn) = self.mode.factors(phi);
        let sn = sn * self.sin_scale;
        let du = self.cu1 * d1 - self.cu2 * d2;
        let r = libm::exp(half);
        let den = 1.0 + r * r + 2.0 * r * cs;
        let num = v1 + r * r * v2 + r * ((v1 + v2) * cs + du * sn);

        if l1 > self.ln_floor + 40.0 && den >= 1e-12 {
            return FrameVelocity { velocity: num / den, underflow: false };
        }

        // Near the floor or near a deep node: settle it in log space, where
        // ln P = l1 + ln(den) stays finite long after exp(l1) underflows.
        if den > 0.0 && l1 + libm::log(den) > self.ln_floor {
            FrameVelocity { velocity: num / den, underflow: false }
        } else {
            let velocity = if half >= 0.0 { v2 } else { v1 };
            FrameVelocity { velocity, underflow: true }
        }
    }

    /// Checked guidance velocity; see
    /// [`SuperposedField::guidance_velocity`] for the error contract.
    pub fn guidance_velocity(&self, x: f64, t: f64) -> Result<f64, Error> {
        let fv = self.guidance_or_clamped(x);
        if fv.underflow {
            Err(Error::DensityUnderflow {
                x,
                t,
                density: 0.0,
                floor: libm::exp(self.ln_floor),
            })
        } else {
            Ok(fv.velocity)
        }
    }
}
