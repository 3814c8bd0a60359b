//! Classical polarization optics as one- and two-qubit quantum maps.
//!
//! The crate is organized bottom-up:
//!
//! - [`stokes`]: Jones vectors, coherency matrices, Stokes parameters and the
//!   Pauli/Standard basis tables.
//! - [`mueller`]: Jones and Mueller matrices of retarders, diattenuators,
//!   depolarizers and ensembles of them.
//! - [`cloude`]: reshuffling of a Mueller matrix into its dynamical (Choi)
//!   matrix, the spectral (Cloude) decomposition into Kraus operators, and map
//!   classification.
//! - [`qmaps`]: Mueller matrices acting on one- and two-qubit density matrices.
//! - [`metrics`]: linear entropy, concurrence/tangle, Werner-family states and
//!   the dichroic-scatterer Monte Carlo.
//! - [`mems`]: the bi-local construction producing maximally entangled mixed
//!   states from the singlet.
//! - [`network`]: single-photon simulation of the linear optical networks
//!   realizing the MEMS maps.
//! - [`io`] and [`cli`]: JSON/CSV codecs and the `polarmap` command line.
//!
//! Index conventions are fixed crate-wide. A 2×2 matrix is vectorized row-major,
//! `α = 2i + j`, and Kronecker products follow `(A⊗B)[2i+k][2j+l] = A[i][j]·B[k][l]`.
//! Two-qubit states use the basis `|00⟩, |01⟩, |10⟩, |11⟩` with qubit A as the
//! most significant factor. Matrix products compose right to left: in
//! `m1 · m2` the element `m2` acts first.

#![forbid(unsafe_code)]

pub mod cli;
pub mod cloude;
pub mod eigen;
mod error;
pub mod io;
pub mod linalg;
pub mod mems;
pub mod metrics;
pub mod mueller;
pub mod network;
pub mod qmaps;
pub mod stokes;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Absolute tolerance on eigenvalues of trace-normalized matrices below which a
/// negative eigenvalue still counts as zero.
pub const EPS_PSD: f64 = 1e-10;

/// Generic numerical tolerance for identities that hold exactly in real arithmetic.
pub const EPS_NUM: f64 = 1e-12;
