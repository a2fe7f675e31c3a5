//! Analysis and design of tunable-coupler (qubit-coupler-qubit) circuits
//! built from capacitance networks of transmon elements.

pub mod bound;
pub mod capnet;
pub mod constants;
pub mod coupling;
pub mod designer;
pub mod error;
pub mod oracle;
pub mod sweep;

pub use constants::PhysConstants;
pub use error::{QcqError, Result};
