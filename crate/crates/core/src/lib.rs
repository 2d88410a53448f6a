//! Numerics for left-invariant Hamiltonian flows on the dual of the Lie
//! algebra of `T4`, the group of 4x4 unipotent upper-triangular matrices.
//!
//! The crate covers the whole chain from the Lie–Poisson structure down to
//! the Melnikov integral that decides whether the stable and unstable
//! manifolds of the reduced system split:
//!
//! * [`lie_poisson`]: structure constants, Poisson bracket, Euler field of
//!   diagonal Hamiltonians, Casimirs, canonical chart on regular coadjoint
//!   orbits and the reduction to the parameters `(alpha, nu)`.
//! * [`dynamics`]: the perturbed Duffing family, its separatrix, the
//!   variational equation along the separatrix and the extended autonomous
//!   Hamiltonian used to monitor integration error.
//! * [`integrators`]: fixed-step Forest–Ruth and RK4 steppers plus zero
//!   location by interval halving.
//! * [`melnikov`]: direct quadrature, phase-angle limit and Legendre
//!   substitution routes to the Melnikov integral, and a numerical check of
//!   first-order splitting.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dynamics;
mod error;
pub mod integrators;
pub mod lie_poisson;
mod math;
pub mod melnikov;

pub use error::{Error, Result};
