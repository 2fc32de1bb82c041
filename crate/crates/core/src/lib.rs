//! Third-order tensor algebra under the t-product.
//!
//! Tensors are multiplied through their mode-3 Fourier faces; inverses,
//! Moore-Penrose inverses and ranks are computed face by face. On top of that
//! sit Sherman-Morrison-Woodbury update formulas, exact and least-squares
//! solvers, and calculators that pair each perturbation bound with the error
//! actually observed.

pub mod circulant;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod generate;
pub mod inverse;
pub mod io;
pub mod linalg;
mod par;
pub mod perturb;
pub mod product;
pub mod smw;
pub mod solve;
pub mod tensor;

pub use circulant::{bcirc, fold, unfold, BlockCirculantMatrix};
pub use error::{Result, TensorError};
pub use experiment::{run_experiment, run_trial, ExperimentConfig, ExperimentDims, ExperimentReport, ExperimentRow, ReportFormat, Theorem};
pub use fourier::{dft_matrix, from_faces, to_faces, FourierFaces};
pub use inverse::{inv, multirank, pinv, pinv_with_tol, range_projectors, split_against_range, MultiRank, RangeSplit};
pub use perturb::{Applicability, BoundCheck, BoundReport};
pub use product::{inner_product, spectral_norm, tprod, tprod_chain};
pub use tensor::{Dims, Tensor3, TubalScalar};
pub use smw::{build_smw_factors, check_smw_conditions, construct_conditioned_instance, smw_inverse, smw_pinv, ConditionReport, InstanceFamily, SmwDims, SmwFactors};
pub use solve::{lstsq_min_norm, solve_exact, SolveResult};
