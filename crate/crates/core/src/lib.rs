//! Differential delay and receiver buffer model for parallel transmission
//! of RLNC-coded Ethernet lanes over multiple network paths.
//!
//! * [`gf256`] and [`codec`]: GF(2^8) arithmetic and generation coding.
//! * [`paths`]: topologies, path enumeration, delay vectors, availability.
//! * [`delay`] and [`buffer`]: closed-form delay and queue statistics.
//! * [`sim`]: tu-stepped Monte-Carlo simulation of the whole system.

pub mod buffer;
pub mod codec;
pub mod combin;
pub mod delay;
pub mod error;
pub mod gf256;
pub mod oracle;
pub mod paths;
pub mod report;
pub mod select;
pub mod sim;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use gf256::{FieldMatrix, Gf256};
pub use paths::{AvailabilityModel, DelayVector, MultiGraph, PathCatalog};
pub use sim::{Method, Scenario};
