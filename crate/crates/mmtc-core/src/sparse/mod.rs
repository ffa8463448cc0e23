//! Compressive-sensing kernels for joint activity and channel detection.

mod gomp;
mod hihtp;
mod lstsq;
mod problem;
mod threshold;

pub use gomp::{gomp, gomp_solve, GompOptions, GompResult};
pub use hihtp::{hihtp_solve, htp_solve, HihtpOptions, HihtpResult};
pub use lstsq::{restricted_lstsq, LstsqResult};
pub use problem::{
    complex_normal, default_epsilon, generate_problem, pn_matrix, CcraControlChannel, SparseProblem,
    SpreadingConfig,
};
pub use threshold::{block_column_threshold, top_k_threshold, BlockSparsityPattern};

pub use num_complex::Complex64 as C64;

pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;
