//! Shifted Gårding cones, m-positivity cones and positivity tests for
//! curvature operators.
//!
//! The crate is organized bottom-up:
//!
//! * [`symfun`]: elementary symmetric polynomials and fractional partial sums.
//! * [`cones`]: membership with signed margins for `Γ⁺_k`, `Γ⁺_k(α)` and `P_m`.
//! * [`inclusion`]: the ε-parametrized inclusion `Γ̄⁺_2(α_ε) ⊆ P̄_{m_ε}`, its
//!   equality case and randomized/optimization-based verification.
//! * [`weighted`]: bounded-weight eigenvalue sums and form-degree coefficients.
//! * [`curvature`]: model curvature tensors, operator assembly and a Jacobi
//!   eigensolver.
//! * [`classify`]: maps spectra to positivity and topological verdict labels.
//! * [`cli`]: configuration, file formats and the `gardinglab` command line.

pub mod classify;
pub mod cli;
pub mod cones;
pub mod curvature;
pub mod error;
pub mod inclusion;
pub mod io;
pub mod symfun;
pub mod weighted;

pub use cones::{ConeMembership, ShiftParams, DEFAULT_TOL};
pub use error::{Error, Result};
pub use symfun::{RealVector, SortedVector};
