use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid bounds: x_min {x_min} must be smaller than x_max {x_max}")]
    InvalidBounds { x_min: f64, x_max: f64 },
    #[error("grid needs at least {min} nodes, got {got}")]
    TooFewNodes { got: usize, min: usize },
    #[error("sampled functions live on different grids")]
    GridMismatch,
    #[error("value length {got} does not match grid node count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    UnsupportedOrder(usize),
    #[error("non-finite sample encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("tail rate must be positive, got {0}")]
    NonPositiveTailRate(f64),
    #[error("decay rate must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("seed coefficient must be positive, got {0}")]
    NonPositiveCoefficient(f64),
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),
    #[error("duplicate decay rates: gamma[{i}] = {a} and gamma[{j}] = {b} are closer than 1e-6")]
    DuplicateGamma { i: usize, j: usize, a: f64, b: f64 },
    #[error("base potential supports {count} bound state(s); the construction requires none")]
    BaseHasBoundStates { count: usize },
    #[error("matrix field near-singular at node {node} (x = {x}): condition estimate {cond:.3e}")]
    NearSingular { node: usize, x: f64, cond: f64 },
    #[error("energy {e} lies within {dist:.3e} of a bound state; resolvent quantities diverge")]
    NearPole { e: f64, dist: f64 },
    #[error("operation requires a negative energy, got {0}")]
    NonNegativeEnergy(f64),
    #[error("schedule weight integral magnitude {mag:.3e} exceeds 200; seed amplitudes would leave double range")]
    ScheduleOverflow { mag: f64 },
    #[error("operation requires a {expected} schedule, got {got}")]
    WrongSchedule {
        expected: &'static str,
        got: &'static str,
    },
    #[error("operation requires a vanishing base potential (max |U0| = {max_abs:.3e})")]
    NonZeroBase { max_abs: f64 },
    #[error("snapshots do not form an evenly spaced time triple")]
    BadSnapshotTriple,
    #[error("hierarchy index {index} out of range ({len} members)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("hierarchy was built without kernels")]
    KernelsAbsent,
    #[error("solution spans {range:.1} e-folds; cannot be represented in plain doubles")]
    DynamicRange { range: f64 },
    #[error("schedule weights do not match the {expected} seed states (got {got})")]
    WeightCountMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
