//! Environmental decoherence of a macroscopic body's center of mass.
//!
//! The model: every interaction with the environment (gas collisions,
//! photon absorption, emission, Rayleigh scattering) transfers momentum
//! ħk to the body. Isotropic, statistically independent transfers are
//! summarized by a collision spectral density ν(k) with total rate 𝒩,
//! which determines a separation-dependent decay rate γ(r) for the
//! off-diagonal elements of the position-basis density matrix. The crate
//! builds (𝒩, ν) pairs for physical channels, evaluates γ(r) and the
//! derived coherence metrics, propagates a 1-D density matrix under the
//! resulting master equation, and runs interference feasibility analyses.
//!
//! All quantities are SI internally. The `decobolt` binary exposes the
//! pipeline as subcommands (`rates`, `kernel`, `evolve`, `feasibility`,
//! `scenario`).

pub mod channels;
pub mod config;
pub mod evolution;
pub mod experiments;
pub mod kernel;
pub mod quad;
pub mod quantities;
pub mod schema;
pub mod spectra;
pub mod svg;

pub use channels::{ChannelSpec, Environment};
pub use kernel::{CoherenceReport, DecoherenceKernel};
pub use quad::QuadratureConfig;
pub use quantities::{BodySpec, PhysicalConstants, CONSTANTS};
pub use spectra::SpectralDensity;

/// Crate-wide error type. `exit_code` gives the CLI mapping:
/// configuration and domain errors exit 2, numerical failures exit 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violates a precondition (nonpositive mass, negative time, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural problem with the requested setup (empty environment,
    /// unresolvable grid, malformed spectrum file, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge ({context}); residual estimate {residual:.3e}")]
    Quadrature { context: String, residual: f64 },
    /// A numerical invariant broke at run time (NaN, guard-band breach, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::Quadrature { .. } | Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
