//! Finite-element laboratory for the scalar Signorini problem on
//! polygonal domains.
//!
//! The crate solves the variational inequality for the Laplacian with
//! unilateral (Signorini) boundary conditions by P1 finite elements and a
//! primal-dual active-set method, and provides the analysis tooling to
//! study the structure of the coincidence set and the corner singularity
//! exponents of the solution: coincidence interval extraction and
//! refinement stability, singular exponent prediction and arc-norm
//! exponent fitting, conformal corner-map verification, and a family of
//! closed-form benchmark cases.

pub mod analysis;
pub mod assembly;
pub mod cases;
pub mod conformal;
pub mod field;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod pipeline;
pub(crate) mod quad;
pub mod solver;

pub use analysis::{
    complementarity_product, component_stability, convergence_rate, default_arc_count,
    default_window, error_norms, exceptional_p, extract_coincidence, fit_exponent,
    predicted_for, predicted_leading_exponent, singular_exponent_table, AnalysisError,
    CoincidenceReport, ComplementarityReport, ConditionPair, ErrorNorms, ExponentReport,
    FitCenter, FitWindow, StabilityVerdict,
};
pub use assembly::{
    load_control, load_volume, partition_dofs, reduce_dirichlet, DofClass, DofPartition,
    ReducedSystem, SymmetricSparseOperator,
};
pub use cases::{
    all_cases, by_name, endpoint_case, homogenized_case, l_domain_sd_case, l_domain_ss_case,
    square_full_signorini_case, verify_case, CaseError, CaseSpec, ExpectedExponent,
};
pub use conformal::{
    energy_identity_check, imag_w_squared, BoundaryGradientSample, ConformalError, CornerMap,
    EnergyIdentity,
};
pub use field::{AnalyticField, ScalarField, VolumeLoad};
pub use geometry::{
    critical_points, interior_angle, validate_boundary, BoundarySpec, ConditionTag,
    CriticalKind, CriticalPoint, GeometryError, Point, Polygon, SegmentData, SegmentSpec,
};
pub use mesh::{grade, refine_red, triangulate, GradingParams, MeshError, TriMesh};
pub use pipeline::{assemble, mesh_hierarchy, solve_level, Assembled, LevelSolution, Problem};
pub use solver::{
    kkt_residuals, solve_signorini, solve_spd, DiscreteSolution, KktResiduals, ObstacleData,
    SolveOptions, SolverError, SolverTrace,
};
