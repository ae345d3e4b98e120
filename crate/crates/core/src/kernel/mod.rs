//! Pressure kernels on nodal patches: critical functions, patch
//! divergence matrices, the tridiagonal chain matrices and the closed-form
//! reference constants.

pub mod analyze;
pub mod constants;
pub mod critical;
pub mod matrices;
pub mod rank;
pub mod signs;

pub use analyze::{
    analyze_patch, patch_divergence_matrix, AnalyzeOptions, KernelReport, PatchDivergence, SpaceKernel, GAP_CERTIFY,
};
pub use constants::{
    closed_form_constants, contelmat_expected, contelmat_pairing, gram_matrix_check, i_integral, ClosedFormConstants,
    GramCheck,
};
pub use critical::{
    critical_function, critical_function_with_signs, spoke_normal, verify_qk_pairing, verify_qk_pairing_with,
    CriticalFunction, PatchPoint, QkPairing, SupportPiece,
};
pub use matrices::{assemble_mn, t_matrix, tridiag_det, KernelMatrices, TridiagDet};
pub use rank::{kernel_dimension, KernelDim, TolPolicy, GAP_WARNING};
pub use signs::{chain_signs, sign_assignment, PatchSignAssignment};
