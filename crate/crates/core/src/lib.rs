//! Elastic shape analysis of open curves in R^d.
//!
//! Three representations of a parametrized curve are implemented side by
//! side:
//!
//! - the square-root velocity function (SRVF) with its spherical geometry,
//! - the unparametrized Frenet curvature profile theta(s),
//! - the square-root curvature (SRC) transform (psi, c), which combines
//!   the speed and curvature information and is rotation invariant.
//!
//! On top of the representations the crate provides elastic registration
//! by dynamic programming and Procrustes alignment, geodesics and shape
//! distances, curvature estimation from noisy samples, and generators for
//! the synthetic curve families used in the experiments.

pub mod bspline;
pub mod curvatures;
pub mod curve;
pub mod dp;
pub mod error;
pub mod estimation;
pub mod frame;
pub mod numeric;
pub mod procrustes;
pub mod registration;
pub mod rotation;
pub mod shape;
pub mod src_repr;
pub mod srvf;
pub mod synth;

pub use curvatures::FrenetCurvatures;
pub use curve::{arc_length, normalize, resample_arclength, ArcLength, DiscreteCurve, Warping};
pub use error::{Error, Result};
pub use estimation::{estimate_pipeline, EstimateConfig};
pub use registration::{
    register_src, register_src_arclength, register_srvf, RegistrationConfig, RegistrationResult,
};
pub use shape::{
    geodesic, pairwise_matrix, pairwise_matrix_serial, shape_distance_src, shape_distance_srvf,
    shape_distance_theta, AnalysisInput, DistanceMatrix, DistanceMethod, GeodesicPath,
    ShapeDistance,
};
pub use src_repr::{src_inverse, src_transform, SrcRepr, ThetaRepr};
pub use srvf::{srvf_inverse, srvf_transform, Srvf};
pub use synth::{add_noise, generate, CurveSpec, SynthCurve};
