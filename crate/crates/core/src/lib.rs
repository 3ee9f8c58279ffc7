//! Satellite-assisted quantum repeater model.
//!
//! Satellites carrying entangled-photon sources fly over pairs of ground
//! nodes; the nodes store the photons in atomic memories and extend the
//! entanglement by nested swapping. The crate covers the pass geometry, the
//! free-space channel, flyby averages, memory-node physics, repeater rates and
//! fidelities, and a Monte Carlo check of the analytic model.

// negated comparisons are deliberate: they route NaN into the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod flyby;
pub mod mc;
pub mod node;
pub mod orbit;
pub mod output;
pub mod quadrature;
pub mod repeater;
pub mod scenario;
pub mod state;

pub use error::{ModelError, Result};
pub use flyby::{Flyby, FlybyAggregates, FlybyProfile};
pub use repeater::{RepeaterConfig, RepeaterResult};
