//! Exact computation with Dirac structures on rational coordinate spaces.
//!
//! A Dirac structure on a space `M` is a subbundle `L` of `TM ⊕ T*M` that is
//! lagrangian for the split pairing `⟨(X,α),(Y,β)⟩ = β(X) + α(Y)` and closed
//! under the Courant bracket. Graphs of presymplectic 2-forms, graphs of
//! Poisson bivectors, and regular foliations are all special cases, and this
//! crate computes with all of them over the field of rational functions with
//! rational coefficients, so every structural statement it makes is exact.
//!
//! Module map:
//!
//! - [`scalar`]: arbitrary-precision rationals, sparse multivariate
//!   polynomials, normalized rational functions, and the expression parser.
//! - [`linalg`]: dense linear algebra over any exact field (RREF, kernels,
//!   subspace lattice, split-pairing orthogonals).
//! - [`linear_dirac`]: Dirac structures on finite-dimensional vector spaces
//!   and the calculus of lagrangian relations.
//! - [`field_dirac`]: Dirac structures on `ℝⁿ` with rational-function
//!   coefficients: brackets, integrability certification, hamiltonian vector
//!   fields, and backward/forward images along polynomial maps.
//! - [`constraints`]: submanifolds of Poisson spaces cut out by polynomial
//!   constraints, their classification, and the Dirac bracket.
//! - [`flows`]: floating-point integration of constrained Hamiltonian
//!   dynamics generated by the Dirac bracket, with drift diagnostics.
//! - [`probe`]: deterministic rational sample points for pointwise checks.

pub mod constraints;
pub mod field_dirac;
pub mod flows;
pub mod linalg;
pub mod linear_dirac;
pub mod probe;
pub mod scalar;
