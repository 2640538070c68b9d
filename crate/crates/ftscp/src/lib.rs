//! Change-point detection for functional time series.
//!
//! The crate covers the full workflow for locating structural breaks in a
//! time series of curves (age-specific demographic rates being the guiding
//! case) and for using the detected break to pick a forecast training
//! period:
//!
//! - [`fda`]: series/curve containers and quadrature geometry;
//! - [`longrun`]: autocovariance surfaces and the kernel sandwich long-run
//!   covariance estimator with plug-in bandwidth;
//! - [`spectral`]: eigendecomposition, principal component scores and the
//!   eigenvalue-ratio component count;
//! - [`cusum`]: the fully functional CUSUM detector and a KPSS-type
//!   stationarity check;
//! - [`fpcr`]: functional principal component regression forecasting for
//!   nonstationary series, including the one-component Lee-Carter special
//!   case;
//! - [`isfe`]: the regression-based detector built on integrated squared
//!   forecast errors;
//! - [`simlab`]: data-generating processes and the seeded Monte-Carlo
//!   runner;
//! - [`io`], [`report`], [`evaluate`], [`cli`]: CSV ingestion, JSON
//!   reports, training-period evaluation and the command-line interface.
//!
//! See the `examples/` directory for one runnable program per capability.

#![forbid(unsafe_code)]

pub mod cli;
pub mod cusum;
pub mod error;
pub mod evaluate;
pub mod fda;
pub mod fpcr;
pub mod io;
pub mod isfe;
pub mod longrun;
pub mod report;
pub mod simlab;
pub mod spectral;

pub use error::{Error, Result};
pub use fda::{Curve, FunctionalTimeSeries, ZeroPolicy};
pub use longrun::{Bandwidth, CovarianceSurface, KernelFamily, KernelSpec};
