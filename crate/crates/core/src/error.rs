pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}: {reason} (got {value:e})")]
    Invalid { field: &'static str, reason: &'static str, value: f64 },

    #[error("xi = {xi} is outside the arrival-time domain xi <= x/sigma = {xi_max}")]
    XiOutOfDomain { xi: f64, xi_max: f64 },

    #[error(
        "quadrature did not converge: error estimate {achieved:.3e} exceeds target {target:.3e} \
         after {n_evals} evaluations"
    )]
    NonConvergence { achieved: f64, target: f64, n_evals: usize },
}
