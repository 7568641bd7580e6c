use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("operation requires ky = 0, got ky = {ky} 1/m")]
    NonzeroKy { ky: f64 },

    #[error("negative time t = {t} s")]
    NegativeTime { t: f64 },

    /// The fermion velocity denominator vanished: the point sits on (or too
    /// close to) the node manifold y1 = y2 where the guidance field diverges.
    #[error("configuration at t = {t} s is within the node guard (denominator {denominator:e})")]
    NodeProximity { t: f64, denominator: f64 },

    #[error("|psi|^2 = {density:e} is below the configured floor {floor:e}")]
    DensityBelowFloor { density: f64, floor: f64 },

    #[error("step size fell below h_min at t = {t} s")]
    StepUnderflow { t: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t} s")]
    StepBudgetExhausted { t: f64, max_steps: usize },

    #[error("configuration x1 = {x1}, x2 = {x2} lies outside the {region} region")]
    RegionViolation {
        region: &'static str,
        x1: f64,
        x2: f64,
    },

    #[error("rejection sampler stalled: acceptance rate {rate:e} after {proposals} proposals")]
    RejectionStall { rate: f64, proposals: u64 },

    #[error("need at least {required} endpoints, got {got}")]
    TooFewSamples { required: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
