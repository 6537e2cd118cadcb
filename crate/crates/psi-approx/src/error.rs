use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("root search did not converge: {0}")]
    NonConvergence(String),

    #[error("aliasing: need N >= 2m+2, got N={n}, m={m}")]
    Aliasing { n: usize, m: usize },

    #[error("grid size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("quadrature panel budget exhausted (error estimate {est:.3e}, requested {req:.3e})")]
    PanelBudget { est: f64, req: f64 },

    #[error("tail summation budget exhausted at t={t:.3e}: psi decays too slowly for eps_tail={eps:.3e}")]
    TailBudget { t: f64, eps: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
