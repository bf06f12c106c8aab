use thiserror::Error;

/// Errors raised across the radius, region and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A disc centre fell outside the interval where a region's margin formula holds.
    #[error("centre a = {a} outside validity interval of {region} margin ({lower}, {upper})")]
    Validity { region: &'static str, a: f64, lower: f64, upper: f64 },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// No sign change was found on (0, 1).
    #[error("no root in (0,1): {0}")]
    NoRoot(String),

    #[error("singularity at z = {re}{im:+}i: {what}")]
    Singularity { re: f64, im: f64, what: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The lemma bound was exceeded by a generated test function.
    #[error("lemma bound violated at t = {t}, phi = {phi}, z = {z_re}{z_im:+}i (excess {excess:e})")]
    Violation { t: f64, phi: f64, z_re: f64, z_im: f64, excess: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
