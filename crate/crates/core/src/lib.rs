//! Reverse quantum speed limit (RQSL) laboratory for finite-dimensional systems.
//!
//! * [`hilbert`]: dense complex vectors and Hermitian operators, Jacobi eigensolver,
//!   tensor products.
//! * [`dynamics`]: exact evolution under a time-independent Hamiltonian, `ΔH`, `Δψ`
//!   and the overlap quantity `z`.
//! * [`rqsl`]: reference section, its length, the RQSL check and the minimum-norm bound.
//! * [`models`]: two-state and detector models with closed forms; random ensembles.
//! * [`preclusion`]: branch decomposition and removal of branches below a norm threshold.

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod preclusion;
pub mod quadrature;
pub mod rqsl;

pub use dynamics::{CharacteristicTime, EvolutionContext, OverlapDiagnostics};
pub use error::{Error, Result};
pub use hilbert::{
    eigendecompose, inner_product, normalize, tensor_product_operator, tensor_product_state,
    Amplitude, HermitianOperator, SpectralDecomposition, StateVector,
};
pub use models::{DetectorModel, EnsembleSpec, TwoStateModel};
pub use preclusion::{
    branch_decompose, preclude, Branch, PartitionSpec, Preclusion, PreclusionReport,
};
pub use rqsl::{
    discrete_length, norm_limit, reference_section, reference_section_length, rqsl_check,
    verify_norm_inequality, BoundReport, NormLimitReport, QuadratureConfig, ReportConfig,
};
