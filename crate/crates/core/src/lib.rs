//! Interlacing-family toolkit: mixed characteristic polynomials, barrier
//! certificates, and partition/paving solvers for finite vector systems.
//!
//! The crate is organized bottom-up:
//!
//! * [`hermitian`] — complex vectors and Hermitian matrices with spectral helpers;
//! * [`upoly`] — real univariate polynomials, root finding, interlacing checks;
//! * [`mpoly`] — dense multivariate polynomials and real-stability probes;
//! * [`mixedchar`] — mixed characteristic polynomials, mixed discriminants,
//!   and the brute-force expectation oracle;
//! * [`barrier`] — the multivariate barrier function and its certified trace;
//! * [`solver`] — greedy interlacing descent, partition and paving solvers;
//! * [`instances`] — seeded random instance generators used by tests and the CLI.

pub mod barrier;
pub mod error;
pub mod hermitian;
pub mod instances;
pub mod mixedchar;
pub mod mpoly;
pub mod solver;
pub mod upoly;

pub use barrier::{
    barrier_det_form, barrier_general, barrier_shift_check, monotone_convex_check,
    run_barrier_trace, BarrierStep, BarrierTrace, MonotoneConvexReport, ShiftReport,
};
pub use error::{Error, Result};
pub use hermitian::{
    jacobi_deviation, rank1_update_deviation, trace_product, CVec, HermitianMatrix, C64,
};
pub use mixedchar::{
    brute_force_expected_charpoly, covariance, covariances, jameslee_identity_check,
    mixed_charpoly, mixed_discriminant, support_product, tree_polynomial, CovarianceList,
    RandomVectorSpec,
};
pub use mpoly::{above_roots_probe, det_poly, stability_falsifier, MultiPoly};
pub use solver::{
    greedy_assign, partition_r, pave, paving_r_bound, verify_interlacing_tree, weaver_partition,
    AssignmentNode, GreedyResult, PartitionResult, PavingRBound, PavingResult, TreeNodeReport,
    TreeReport,
};
pub use upoly::{common_interlacing_check, convex_combo, RealUniPoly};
