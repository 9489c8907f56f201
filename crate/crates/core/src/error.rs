use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("interval endpoint {0} is a root; perturb the interval and retry")]
    EndpointIsRoot(String),

    #[error("root finder did not converge (max residual {residual:e})")]
    RootFinder { residual: f64 },

    #[error("Newton iteration diverged: {0}; try continuation in t")]
    NewtonDiverged(String),

    #[error("one-cut assumption violated: {0}")]
    OneCutViolated(String),

    #[error("prefactor divergent near edge: z - a = {gap:e} is below {threshold:e}")]
    NearEdge { gap: f64, threshold: f64 },

    #[error("constrained solver failed at zeta = {zeta}: {reason}")]
    ConstrainedSolver { zeta: f64, reason: String },

    #[error(
        "precision insufficient: residual {residual:e} exceeds {bound:e} at {digits} digits; \
         increase the precision"
    )]
    Precision { residual: f64, bound: f64, digits: u32 },

    #[error("Hankel determinant refused for N = {0} (ill-conditioned beyond N = 8)")]
    IllConditioned(usize),

    #[error("sampler: {0}")]
    Sampler(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
