//! Linear and quadratic forms, eigen-decomposition, canonical classification,
//! surface charts and curvature.

mod chart;
mod classify;
mod curvature;
mod eigen;
mod forms;
mod vec3;

pub use chart::{parametrize, ParamDomain, SurfaceChart};
pub use classify::{
    classify_quadric, least_aligned_axis, QuadricClass, QuadricKind, DEFAULT_CLASSIFY_TOL,
};
pub use curvature::principal_curvatures;
pub use eigen::{jacobi_eigen3, symmetric_eigen2, SymmetricEigen};
pub use forms::{LinearForm, Quadric};
pub use vec3::{Mat3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("all quadric coefficients are zero")]
    AllZero,
    #[error("gradient vanishes at the evaluation point")]
    SingularPoint,
    #[error("no regular chart for class {0}")]
    UnsupportedClass(QuadricKind),
}
