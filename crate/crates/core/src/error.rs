use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("undefined gcd: both inputs are zero")]
    UndefinedGcd,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("constant polynomial not allowed here")]
    ConstantPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid interval: lo must be strictly below hi")]
    EmptyInterval,
    #[error("endpoint root; perturb bounds")]
    EndpointRoot,
    #[error("not self-inversive")]
    NotSelfInversive,
    #[error("circle root leaked")]
    CircleRootLeaked,
    #[error("degenerate Routh table: {0}")]
    DegenerateRouth(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {0} is not even and positive")]
    OddDimension(usize),
    #[error("expected a 2x2 matrix, got dimension {0}")]
    NotTwoByTwo(usize),
    #[error("iterate index must be positive")]
    ZeroIterate,
    #[error("degenerate level {0}")]
    DegenerateLevel(u64),
    #[error("refinement lost the zero")]
    RefinementLostZero,
    #[error("refinement did not reach the tolerance within depth {0}")]
    RefinementDepthExceeded(u32),
    #[error("not conservative-interior")]
    NotConservativeInterior,
    #[error("radius not generic; retry smaller")]
    RadiusNotGeneric,
    #[error("center does not lie on the curve")]
    NotOnCurve,
    #[error("degenerate configuration; perturb input")]
    DegenerateConfiguration,
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
