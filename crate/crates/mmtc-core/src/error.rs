use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("partition violation: control {control} + data {data} != total {total} PRBs")]
    Partition { control: u32, data: u32, total: u32 },
    #[error("preamble mapping needs S = N * M_D, got S={s}, N={n}, M_D={data_prbs}")]
    Mapping { s: u32, n: u32, data_prbs: u32 },
    #[error("preamble {index} out of range for a pool of {n_preambles}")]
    PreambleOutOfRange { index: u32, n_preambles: u32 },
    #[error("replicas {replicas} must be in 1..={slots}")]
    Replicas { replicas: u32, slots: u32 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("arrival rate must be finite and non-negative, got {0}")]
    NegativeRate(f64),
    #[error("horizon must be at least one TTI")]
    EmptyHorizon,
    #[error("invalid ARQ config: {0}")]
    Arq(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("invalid resource plan: {0}")]
    Plan(#[from] PlanError),
    #[error("invalid scheme parameters: {0}")]
    Scheme(String),
    #[error("decode table: {0}")]
    Table(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("unsupported field GF({p}^{n})")]
    Unsupported { p: u32, n: u32 },
    #[error("element {value} is not in GF({order})")]
    OutOfField { value: u32, order: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent system: equation {row} contradicts the others")]
    Inconsistent { row: usize },
    #[error("zero pre-coding coefficient with pre-coding enabled")]
    ZeroCoefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{active} active users exceed {available} sequences")]
    TooManyActive { active: usize, available: usize },
    #[error("invalid sparsity pattern: {0}")]
    Pattern(String),
}
