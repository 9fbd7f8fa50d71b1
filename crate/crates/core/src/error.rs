use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { what: &'static str, defect: f64 },

    #[error("state vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid rate model: {0}")]
    InvalidRates(String),

    #[error(
        "complete positivity violated between levels {k} and {n}: \
         dephasing {dephasing} is below the decay-induced floor {floor}"
    )]
    CompletePositivity { k: usize, n: usize, dephasing: f64, floor: f64 },

    #[error("pure-dephasing part is not realizable by Lindblad operators (eigenvalue {0:.3e})")]
    DephasingNotRealizable(f64),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("time {t} is outside the pulse support [0, {duration}]")]
    OutsidePulse { t: f64, duration: f64 },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("positivity violated at t = {t}: minimum eigenvalue {min_eigenvalue:.3e}")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("trajectory ends at {reached}, before the objective horizon {horizon}")]
    HorizonNotReached { reached: f64, horizon: f64 },

    #[error("invalid optimization setup: {0}")]
    InvalidOptimization(String),

    #[error("invalid level scheme: {0}")]
    InvalidScheme(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that originate in the input description rather than
    /// in the physics of a run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Io(_))
    }
}
