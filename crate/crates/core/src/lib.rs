//! Runtime and network-on-chip congestion modeling for 2D-mesh neuromorphic chips.
//!
//! The crate predicts the time per algorithmic timestep of a spiking workload as the
//! maximum of five resource terms (neuron updates, synaptic operations, synaptic memory
//! reads, heaviest-link traffic and barrier synchronization), using per-core operation
//! counts and dimension-order routed link loads.
//!
//! ```
//! use meshroof::{mesh::MeshConfig, model, traffic, workload};
//!
//! let mesh = MeshConfig::loihi2();
//! let w = workload::gen_tiled_identity(8, 8, 1024, &mesh).unwrap();
//! let map = meshroof::placement::CoreMap::from_workload(&w);
//! let loads = traffic::compute_link_loads(&w, &map, &mesh).unwrap();
//! let cal = model::CalibrationParams::synthetic();
//! let ops = workload::derive_op_counts(&w, &cal.packing()).unwrap();
//! let est = model::estimate(&ops, &traffic::heaviest_link(&loads), &cal);
//! assert!(est.t_step >= cal.t_barrier);
//! ```

#![forbid(unsafe_code)]
#![warn(rust_2018_idioms, missing_debug_implementations)]

pub mod analytic;
pub mod calibration;
mod error;
pub mod mesh;
pub mod model;
pub mod placement;
pub mod report;
pub mod rng;
pub mod simref;
pub mod traffic;
pub mod workload;

pub use error::{Error, Result};
