use thiserror::Error;

use crate::qstate::MAX_QUBITS;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register of {0} qubits exceeds the {MAX_QUBITS}-qubit limit")]
    TooManyQubits(usize),
    #[error("length {0} is not 2^n for n >= 1")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {0} targeted more than once")]
    DuplicateTarget(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("partial trace needs a nonempty set of kept qubits")]
    EmptyKeep,
    #[error("tensor product of a state vector with a density matrix")]
    MixedKinds,
    #[error("measurement basis is not orthonormal")]
    NotOrthonormal,
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("{name} = {value} lies outside [{min}, {max}]")]
    OutOfRange {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("probe overlaps are unsatisfiable: {0}")]
    UnsatisfiableOverlaps(String),
    #[error("permutation of size {expected} applied to {found} items")]
    PermutationSize { expected: usize, found: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unknown particle {0}")]
    UnknownParticle(usize),
    #[error("particle {0} is not paired")]
    UnpairedParticle(usize),
    #[error("transcript ordering violated: {0}")]
    CausalOrder(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("protocol {protocol} does not support {what}")]
    Unsupported { protocol: String, what: String },
    #[error("no finite tolerable error: I_B - chi never changes sign on the grid")]
    NoThreshold,
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn out_of_range(name: impl Into<String>, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            name: name.into(),
            value,
            min,
            max,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
