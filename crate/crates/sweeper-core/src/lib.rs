//! Pilot-wave dynamics of a double-slit beam under extreme attenuation of one
//! channel.
//!
//! Two dispersing Gaussian channels are evolved in closed form; the crate
//! composes their total probability density and current, integrates averaged
//! trajectories of the resulting guidance field, and extracts screen profiles,
//! fringe visibility, which-path duality metrics, and arrival-band statistics.
//! An independent complex-packet evaluator ([`oracle`]) backs every field
//! identity so the two formulations can be checked against each other.
//!
//! The crate is `no_std` (with `alloc`) so the field engine can run anywhere;
//! file formats and the command line live in the companion `sweeper-cli` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod gaussians;
pub mod numeric;
pub mod oracle;
pub mod screen;
pub mod superposition;
pub mod trajectories;

pub use error::Error;
pub use gaussians::{ChannelParams, FieldSample, PhysicalParams};
pub use superposition::{CoherenceMode, CurrentSample, SuperposedField};
pub use trajectories::{EnsembleResult, EnsembleSpec, Seeding, Trajectory};
