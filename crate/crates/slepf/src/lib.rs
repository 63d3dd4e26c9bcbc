//! Multiple-SLE pure partition functions.
//!
//! The crate evaluates the pure partition functions `Z_alpha` of multiple
//! Schramm-Loewner evolutions in several independent ways and cross-checks
//! them against each other:
//!
//! * closed forms for one and two curves ([`exact_pf`]),
//! * the Monte-Carlo cascade construction built on a Loewner chain engine
//!   ([`mc_pf`], [`loewner`]),
//! * Dotsenko-Fateev screening integrals ([`coulomb`]),
//! * finite-difference checks of the null-state PDEs, Mobius covariance,
//!   boundary asymptotics and the Loewner martingale ([`pde_verify`]),
//! * fusion limits and third-order PDEs ([`fusion`]),
//! * interface connectivities of the critical Ising model ([`ising`]).
//!
//! The command-line front end lives in [`cli`].

pub mod cft_params;
pub mod cli;
pub mod coulomb;
pub mod error;
pub mod exact_pf;
pub mod fusion;
pub mod ising;
pub mod linkpat;
pub mod loewner;
pub mod mc_pf;
pub mod pde_verify;
pub mod quad;
pub mod specfun;

pub use cft_params::KappaParams;
pub use error::{Error, Result};
pub use linkpat::LinkPattern;
