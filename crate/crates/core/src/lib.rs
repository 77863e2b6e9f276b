//! Two-spin (EPR pair) correlation simulator.
//!
//! Builds entangled, phase-mismatched and dephased spin-pair states, reads off
//! their correlation tensors, averages disentangled correlations over
//! distributions of quantization axes, evaluates CHSH combinations and samples
//! coincidence events from quantum and local-hidden-variable sources.
//!
//! ```
//! use spincorr::correlations::{correlate, correlation_tensor};
//! use spincorr::geometry::UnitVec3;
//! use spincorr::states::PairState;
//!
//! let tensor = correlation_tensor(&PairState::singlet().to_density());
//! let e = correlate(&tensor, &UnitVec3::Z, &UnitVec3::Z);
//! assert!((e + 1.0).abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod bell;
pub mod cli;
pub mod correlations;
pub mod ensembles;
pub mod error;
pub mod events;
pub mod format;
pub mod geometry;
pub mod linalg;
pub mod states;

pub use error::{Error, Result};
