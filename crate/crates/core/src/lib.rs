//! Deletion-attack cost of plurality elections whose polls are collected
//! through a local differential privacy mechanism.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod election;
pub mod exec;
pub mod harness;
pub mod lp;
pub mod matrix;
pub mod mechanism;
pub mod simulation;
