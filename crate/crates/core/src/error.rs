use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("rational function is not strictly proper (num degree {num} >= den degree {den})")]
    ImproperRational { num: usize, den: usize },

    #[error("nonintegrable tail: term with rate {rate} has nonpositive real part")]
    NonintegrableTail { rate: String },

    #[error("transform pole collides with term rate at {at}")]
    PoleCollision { at: String },

    #[error("result is not real-representable (imaginary residue {imag:.3e} at u={u})")]
    NotReal { imag: f64, u: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("repeated Lundberg roots within tolerance; product formula degenerates")]
    RepeatedRoots,

    #[error("recursion cap exceeded: m = {m} > {cap}")]
    CapExceeded { m: usize, cap: usize },

    #[error("income condition violated: {0}")]
    IncomeViolated(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
