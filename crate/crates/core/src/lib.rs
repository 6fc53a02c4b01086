#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod driver;
pub mod error;
pub mod gram;
pub mod grid;
pub mod heat_model;
pub mod local_time;
pub mod mc;
pub mod process;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod spectral;
pub mod verify;
