use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode space: {0}")]
    InvalidModeSpace(String),
    #[error("mode index {mode} out of range (num_modes = {num_modes})")]
    ModeOutOfRange { mode: usize, num_modes: usize },
    #[error("species index {species} out of range (species_count = {species_count})")]
    SpeciesOutOfRange { species: usize, species_count: usize },
    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("mode spaces differ")]
    ModeSpaceMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero-norm state: {0}")]
    ZeroNorm(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("index {index} out of range (len = {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unsupported statistics: {0}")]
    UnsupportedStatistics(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("sector {n} exceeds the configured maximum {max}")]
    SectorTooLarge { n: usize, max: usize },
    #[error("site tuple {0:?} is not in canonical (sorted) order")]
    NonCanonicalTuple(Vec<usize>),
    #[error("packet too close to the periodic seam at t = {t}: {detail}")]
    SeamViolation { t: f64, detail: String },
    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("density matrix is not diagonal (max off-diagonal {0:e}); decohere first")]
    NotDiagonal(f64),
    #[error("zero-probability outcome (p = {0:e})")]
    ZeroProbability(f64),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("label `{0}` missing from assignment")]
    MissingLabel(String),
}
