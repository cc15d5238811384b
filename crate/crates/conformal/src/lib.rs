//! Numeric conformal geometry on coordinate charts.
//!
//! Metrics, conformal factors and test fields are analytic expressions
//! evaluated on truncated Taylor jets, so every partial derivative used by
//! the curvature and operator code is exact up to rounding.

pub mod bianchi;
pub mod chart;
pub mod density;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod report;
pub mod rescale;
pub mod tractor;

pub use chart::{rescale, upsilon, BoxDomain, ChartKind, ChartRef, ChartSpec, ConformalFactor, ExprChart, MetricChart, RescaledChart};
pub use density::{closure_residual, einstein_operator, prolong, thomas_d, yamabe, yamabe_weight, DensityField};
pub use error::{Error, Result};
pub use geometry::{christoffel, curvature_suite, JetGeometry, PointCurvature};
pub use jet::{Jet, JetFn};
pub use report::{loglog_slope, Report, Residual};
pub use tractor::{
    einstein_recover, holonomy_loop, parallel_transport, tractor_connection_apply, Curve, Polygon, RecoverOptions, Segment,
    TractorVec,
};
