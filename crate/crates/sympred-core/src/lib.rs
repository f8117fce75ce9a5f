//! Symplectic connections by reduction of quadrics.
//!
//! A nonzero element A of the symplectic Lie algebra on R^(2n+2) defines a
//! quadratic Hamiltonian H(x) = omega(x, Ax); each nonzero level set is a
//! quadric whose quotient by the Hamiltonian flow carries a symplectic form
//! and a canonical symplectic connection. This crate constructs the catalog
//! of generators, the quadric geometry, the induced and reduced connections,
//! the closed-form curvature with its Ricci-type decomposition, and an
//! independent finite-difference oracle over a local chart of the quotient,
//! so that every structural identity can be checked numerically.
//!
//! The crate is no_std-compatible (alloc required); the `std` feature (on by
//! default) enables std-backed RNG seeding and error-trait integration in
//! dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chart;
pub mod classify;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod frame;
pub mod generator;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod quadric;
pub mod space;
pub mod tol;

pub use error::{Error, Result};
