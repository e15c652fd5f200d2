//! Exact evaluation of complete exponential sums of Kloosterman type, with
//! certified lower bounds on their absolute values and a verification harness
//! for the spectral-average series they control.
//!
//! The crate is organized bottom-up:
//!
//! * [`arith`]: deterministic factorization and modular arithmetic,
//! * [`dd`]: double-double arithmetic (roughly 31 significant digits),
//! * [`kloosterman`]: sum evaluation by several independent methods plus
//!   lower-bound certificates,
//! * [`bessel`]: Bessel functions of the first kind with certified error
//!   bounds, uniform envelopes near the transition point, and the Airy-range
//!   asymptotics,
//! * [`petersson`]: truncated spectral-average series with rigorous tail
//!   control, admissibility search, and threshold computations.
//!
//! Numeric kernels are generic over [`scalar::Scalar`] so every routine can
//! run either in native `f64` or in [`dd::DoubleDouble`] when an anchor value
//! needs headroom beyond 53 bits.

pub mod arith;
pub mod bessel;
pub mod dd;
pub mod kloosterman;
pub mod petersson;
pub mod scalar;

pub use dd::DoubleDouble;

/// Default working precision for user-facing results.
pub type Real = f64;

/// Extended precision used by the validated kernels.
pub type Wide = DoubleDouble;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} must be nonzero")]
    ZeroArgument(&'static str),

    #[error("modulus {0} must be odd and positive")]
    EvenModulus(u64),

    #[error("{a} is not invertible modulo {n}")]
    NotInvertible { a: i64, n: u64 },

    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),

    #[error("{a} is not a quadratic residue modulo {q}")]
    NonResidue { a: i64, q: u64 },

    #[error("{a} is divisible by the prime {p}")]
    DivisibleByPrime { a: i64, p: u64 },

    #[error("prime-power modulus must have exponent >= 2, got {q}")]
    NotAPrimePower { q: u64 },

    #[error("{what} = {value} must be coprime to {modulus}")]
    NotCoprime {
        what: &'static str,
        value: i64,
        modulus: u64,
    },

    #[error("modulus {c} exceeds the supported limit {max}")]
    ModulusTooLarge { c: u64, max: u64 },

    #[error("modulus {0} must be squarefree")]
    NotSquarefree(u64),

    #[error("overflow: {0}")]
    Overflow(&'static str),

    #[error("{what}: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("series truncation exceeded the hard cap of {cap} terms")]
    TruncationCap { cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
