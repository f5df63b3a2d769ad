use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("M must exceed K (got M={m}, K={k})")]
    TooFewAntennas { m: usize, k: usize },
    #[error("K must be at least 1")]
    NoUsers,
    #[error("T must exceed K so that a data phase exists (got T={t}, K={k})")]
    BlockTooShort { t: usize, k: usize },
    #[error("{name} must be positive and finite (got {value})")]
    NonPositivePower { name: &'static str, value: f64 },
    #[error("rho_max must be at least rho (got rho_max={rho_max}, rho={rho})")]
    PeakBelowAverage { rho: f64, rho_max: f64 },
    #[error("alpha must lie in [0, 1] (got {0})")]
    AlphaOutOfRange(f64),
    #[error("T_d must lie in (0, {max}] (got {t_d})")]
    DataDurationOutOfRange { t_d: f64, max: f64 },
    #[error("the rewritten MRC SINR form needs K >= 2")]
    SingleUserRewrite,
    #[error("training length {t_tau} is shorter than K={k}")]
    TrainingTooShort { t_tau: f64, k: usize },
    #[error("Monte Carlo run needs at least one trial")]
    NoTrials,
    #[error("sweep needs at least one scheme")]
    NoSchemes,
    #[error("sweep values must be strictly increasing")]
    ValuesNotIncreasing,
    #[error("sweep value {0} is not valid for the swept variable")]
    BadSweepValue(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
