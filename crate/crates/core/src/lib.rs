//! Deficiency indices of adjacency matrices on locally finite graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] builds finite truncations of locally finite simple graphs
//!   (antitrees, glued copies, trees) and their BFS sphere decompositions.
//! * [`operators`] applies the adjacency matrix and the physical Laplacian
//!   to finitely supported functions.
//! * [`radial`] averages over spheres and reduces an antitree adjacency
//!   matrix to a Jacobi matrix.
//! * [`jacobi`] holds the Jacobi matrix type, the Carleman and Berezanskii
//!   criteria, a rescaled three-term recurrence solver and the numerical
//!   limit-point / limit-circle classifier.
//! * [`engine`] composes all of the above into a [`DeficiencyReport`].
//!
//! Infinite graphs are always represented by finite truncations with an
//! explicit boundary set. Operators refuse to act on boundary vertices.

pub mod engine;
pub mod graph;
pub mod jacobi;
pub mod json;
pub mod operators;
pub mod radial;

pub use engine::{
    analyze, direct_sum_index, DeficiencyIndex, DeficiencyReport, EngineConfig, EngineError,
    Evidence, OperatorDescriptor, TraceEntry,
};
pub use graph::{
    antitree::{build_antitree, sphere_size, sphere_sizes, AntitreeKind, AntitreeSpec},
    bfs::{bfs_spheres, SphereDecomposition},
    Graph, GraphError, VertexId, VertexLabel,
};
pub use jacobi::{
    classify::{classify_limit, ClassifierTolerances, LimitClass, LimitClassification},
    criteria::{berezanskii_test, carleman_test, CriterionResult, Verdict},
    perturbation::{bounded_difference, PerturbationBound},
    recurrence::{solve_recurrence, wronskian, RecurrenceSolution, ScaledComplex},
    AsymptoticRule, JacobiError, JacobiMatrix,
};
pub use num_complex::Complex64;
pub use operators::{
    apply_adjacency, apply_laplacian, truncated_matrix, FiniteFunction, OperatorError,
    OperatorKind, SparseSymmetricMatrix,
};
pub use radial::{
    check_reduction_consistency, project_radial, reduce_to_jacobi, weight_transform,
    ConsistencyReport, RadialError, RadialFunction, ReductionCheck,
};
