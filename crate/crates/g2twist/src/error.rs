//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum G2Error {
    /// A frame's Gram matrix degenerates at the base point.
    #[error("Gram matrix singular at the base point")]
    GramSingular,

    /// Generic rank near the base point exceeds the rank at the point;
    /// callers should re-sample at a nearby generic point.
    #[error("rank drop at the base point")]
    RankDrop,

    /// A jet ran out of derivative order for the requested operation.
    #[error("insufficient jet order for this operation")]
    OrderExhausted,

    /// A lift was requested at the wrong twistor level.
    #[error("map has s(phi) = {found}, not {expected}")]
    WrongS { expected: u32, found: u32 },

    #[error("map is not harmonic at the base point (residual {residual:.3e})")]
    NotHarmonic { residual: f64 },

    #[error("derivative endomorphism is not nilpotent at the base point")]
    NotNilconformal,

    /// An almost complex map with F₂ ≡ 0 has no 7-leg flag.
    #[error("image lies in a totally geodesic 2-sphere")]
    TotallyGeodesicS2,

    #[error("uniton pair is not orthogonal: alpha meets its conjugate")]
    NonOrthogonalPair,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, G2Error>;
