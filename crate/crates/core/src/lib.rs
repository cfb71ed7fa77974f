//! Partition functions of bipartite tensor models over cones.
//!
//! A [`model::BipartiteModel`] attaches tensors to the two sides of a
//! bipartite graph whose edges carry real inner-product spaces and, for
//! message passing, a proper cone. Its value can be computed
//!
//! * exactly, by contraction ([`model::exact_value`]), invariant under the
//!   edge gauges of [`holographic`];
//! * approximately, by cone belief propagation and the Bethe value ([`bp`]);
//! * exactly again, as the Bethe value times a finite sum over generalized
//!   loops ([`loopcalc`]).
//!
//! [`quantum`] builds measurement, teleportation and graph-state models from
//! the real Hermitian embedding, and [`format`] / [`cli`] handle JSON model
//! files and the `holoprop` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bp;
pub mod cli;
pub mod cones;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod holographic;
pub mod loopcalc;
pub mod model;
pub mod quantum;
pub mod spaces;
mod tensor;

pub use error::{Error, Result};
