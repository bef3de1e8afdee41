//! Error types shared by the whole crate.

/// Errors produced by curve preprocessing, estimation and registration.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("degenerate curve: total length {length:.3e} below tolerance")]
    DegenerateCurve { length: f64 },

    #[error("zero speed at sample {index}: curve is not immersed")]
    ZeroSpeed { index: usize },

    #[error("not a Frenet curve: Gram-Schmidt pivot degenerate at sample {index}")]
    NotFrenetCurve { index: usize },

    #[error("rotation angle within tolerance of pi: matrix logarithm branch undefined")]
    LogBranch,

    #[error("warping function violates monotonicity or boundary conditions")]
    NonMonotoneWarp,

    #[error("antipodal points on the sphere: great-circle geodesic undefined")]
    AntipodalPoints,

    #[error("grid too coarse for dynamic programming: {n} < 8 samples")]
    GridTooCoarse { n: usize },

    #[error("local window at sample {index} holds {found} points, need at least {needed}")]
    WindowTooSmall {
        index: usize,
        found: usize,
        needed: usize,
    },

    #[error("singular local least-squares fit at sample {index}")]
    SingularFit { index: usize },

    #[error("rank-deficient spline regression system")]
    RankDeficient,

    #[error("curvature component {component} non-positive near s = {location:.4}")]
    PositivityViolated { component: usize, location: f64 },

    #[error("curvature norm vanishes on the whole curve: square-root curvature undefined")]
    VanishingCurvature,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
