//! Complex linear algebra and validated quantum objects.

pub mod channel;
pub mod density;
pub mod linalg;
pub mod povm;
pub mod random;

pub use channel::{apply_channel, dual_apply, KrausChannel};
pub use density::DensityOperator;
pub use linalg::{
    contract_left, contract_right, partial_trace, permute_subsystems, spectral_decompose, tensor,
    CMatrix, CVector, Spectrum, C64,
};
pub use povm::Povm;
pub use random::{random_channel, random_density, random_povm, random_unitary};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;
