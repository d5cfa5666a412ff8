//! Nonparametric estimation of the Pickands dependence function of a
//! multivariate extreme-value copula with known margins.
//!
//! The crate provides
//!
//! - [`simplex`]: points and grids on the unit simplex,
//! - [`models`]: symmetric and asymmetric logistic dependence functions,
//! - [`sampler`]: exact samplers with unit exponential margins,
//! - [`estimators`]: naive, CFG, ZWP, OLS (adaptive CFG), Pickands,
//!   Deheuvels and Hall–Tajvidi estimators and shape correction,
//! - [`asymptotics`]: sample and quadrature estimates of the covariance
//!   structure and of the variance-optimal weights,
//! - [`bench`]: a Monte Carlo harness computing bias, variance and MSE,
//! - [`io`]: CSV formats shared by the command line tool.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bench;
pub mod error;
pub mod estimators;
pub mod io;
pub mod models;
pub mod sampler;
pub mod simplex;

pub use error::{Error, Result};

pub use estimators::{EstimateCurve, EstimatorId, OlsFit, WeightScheme, XiVector};
pub use models::{DependenceModel, ModelSpec};
pub use sampler::{draw_sample, draw_sample_stream, RngStream, SampleY};
pub use simplex::{SimplexGrid, SimplexPoint, EULER_GAMMA, GUMBEL_VARIANCE};
