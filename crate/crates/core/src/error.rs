use thiserror::Error;

/// Which of the two constrained l1 estimators an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// The joint (pi, rho) selector on the null-adjusted response.
    PiRho,
    /// The selector regressing the synthesized feature on the stabilized features.
    Gamma,
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Estimator::PiRho => f.write_str("pi/rho"),
            Estimator::Gamma => f.write_str("gamma"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("loading vector has zero norm")]
    ZeroLoading,

    #[error("degenerate projection: a'Omega a = {0:e}")]
    DegenerateProjection(f64),

    #[error("probability {0} is outside (0, 1)")]
    OutOfRange(f64),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid bounds for variable {index}: lower {lower} > upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("simplex iteration limit reached after {pivots} pivots")]
    IterationLimit { pivots: usize },

    #[error("null-adjusted response Y - Z g0 has zero norm")]
    ZeroResidualVector,

    #[error("synthesized feature Z has zero norm")]
    ZeroSynthesizedFeature,

    #[error("test statistic is degenerate: all moment summands are zero")]
    DegenerateStatistic,

    #[error("the {0} estimator is infeasible")]
    InfeasibleEstimator(Estimator),

    #[error("residual norm below 1e-12; statistic undefined")]
    DegenerateResidual,

    #[error("every grid point was rejected; the grid is likely mis-centered")]
    EmptyAcceptanceRegion,

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("campaign failed: {failed} of {reps} replications errored")]
    CampaignFailed { failed: usize, reps: usize },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
