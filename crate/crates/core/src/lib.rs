//! Einstein-Podolsky-Rosen steering of two-mode continuous-variable states.
//!
//! The crate covers two families of states:
//!
//! - two-mode squeezed thermal (TMST) Gaussian states, generated by sending one
//!   arm of a two-mode squeezed vacuum through a pure-loss channel followed by a
//!   quantum-limited amplifier, and
//! - continuous-variable Werner states, mixtures of a two-mode squeezed vacuum
//!   with a product of thermal states.
//!
//! Steering from Alice (mode A) to Bob (mode B) is tested with the Gaussian
//! variance criterion `det α > det V` and with the second-moment criterion on
//! pseudospin correlators, `⟨sx⊗tx⟩² + ⟨sy⊗ty⟩² + ⟨sz⊗tz⟩² > 1`.
//!
//! Every closed form in the crate has an independent route next to it: the
//! symplectic channel pipeline for covariance matrices, the purified
//! four-mode state vector for Fock elements, and a generating-function Taylor
//! expansion for four-dimensional Hermite polynomials.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod hermite;
pub mod pseudospin;
pub mod special;
pub mod thresholds;
pub mod werner;

pub use error::{Error, Result};
pub use fock::{FockIndex, TruncatedDensityMatrix};
pub use gaussian::{CovarianceMatrix, StandardForm, Symplectic, TmstParams};
pub use pseudospin::{CorrelatorTriple, MomentValue};
pub use werner::WernerParams;
