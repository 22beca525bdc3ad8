//! Incidence geometry of the flag manifold F ⊂ P²×P²ᵛ and the twistor
//! fibration over P²: (1,1)-surfaces, their classification, twistor-fiber
//! and branch-locus analysis, induced metrics on twistor images, and the
//! closed-form enumerative bounds.
//!
//! Conventions used throughout:
//! * points `p, q` are row vectors, lines `ℓ, m` are column vectors;
//!   the incidence pairing is the plain bilinear `pℓ = Σ pᵢℓᵢ`;
//! * `star` is the anti-linear bijection `q ↦ conj(q)` with flavor flip;
//! * the twistor projection is `π(p,ℓ) = p* × ℓ`;
//! * all vectors are kept in a canonical projective representative
//!   (unit norm, largest-modulus component real and positive).

pub mod counts;
pub mod curves;
pub mod flag;
pub mod linalg;
pub mod metric;
pub mod proj;
pub mod surfaces;
pub mod twistor;
pub mod verify;

pub use counts::{blowup_count_1d, c1_squared, h0_flag, h0_product, triple_product, Bidegree};
pub use curves::{intersect, Curve11, CurveKind, Intersection};
pub use flag::FlagPoint;
pub use metric::{
    first_fundamental_form, fubini_study_distance, image_quadric, moment_map, profile_curve,
    sphere_normal_form, torus_profile, ImageQuadric, ProfileCurve, ProfileSample,
    SphereNormalForm, TorusProfile,
};
pub use proj::{Flavor, ProjVec};
pub use surfaces::{
    base_points_1d, branch_quartic_12, canonical_matrix, cross_ratio_orbit, unitary_equivalent,
    CanonicalClass, ClassTag, EigenGroup, EigenStructure, Form, SingularLocus, Surface11,
    UnitaryForm,
};
pub use twistor::{
    branch_r, branch_zeros, conic_matrix, conjugate_intersection_det, fiber_preimages,
    max_11_curves_in_intersection, max_twistor_lines, rank_drop_system, solve_norm_quadratic,
    twistor_fiber, twistor_fibers_in, BranchSample, CircleLocus, ConicMatrix, FiberAnalysis,
    FiberPreimages, FiberSet, RankDropSystem, TwistorFiber,
};
pub use verify::{run_suite, Check, CheckReport, VerificationReport, REGISTRY};

use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum Error {
    #[error("zero vector: all components below threshold")]
    ZeroVector,
    #[error("flavor mismatch: expected {expected:?}, got {got:?}")]
    FlavorMismatch { expected: Flavor, got: Flavor },
    #[error("degenerate cross product: inputs are projectively equal")]
    DegenerateCross,
    #[error("flag pair is not incident: |p·l| exceeds tolerance")]
    NotIncident,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is a scalar multiple of the identity")]
    ScalarMatrix,
    #[error("surface is not smooth")]
    NotSmooth,
    #[error("bidegree must be positive")]
    NonPositiveBidegree,
    #[error("curves are projectively identical")]
    IdenticalCurves,
    #[error("curve is reducible where a smooth curve is required")]
    ReducibleCurve,
    #[error("parametrization pencil is degenerate")]
    DegenerateParameter,
    #[error("all chart reductions vanish identically")]
    DegenerateChart,
    #[error("integer overflow in count (inputs capped at 10^6)")]
    CountOverflow,
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
