//! Eigenlines of tensors and homogeneous polynomial maps.
//!
//! A one dimensional subspace `K·v` is an eigenline of a homogeneous polynomial
//! map `Q: K^n -> K^n` of degree `m` when `Q(v) = λv` for some scalar `λ`. This
//! crate provides:
//!
//! - representation and calculus of homogeneous maps, symmetric tensors and
//!   scalar forms, including the gradient-map correspondence ([`tensor`]);
//! - exact univariate polynomial arithmetic over the rationals, Sturm chains,
//!   real-root isolation and binary-form solving ([`upoly`]);
//! - eigenline enumeration by seeded multistart Newton with Bezout-count
//!   certification, Brouwer degree computation, stationary indices on the
//!   sphere and Poincaré–Hopf verification ([`eigen`]);
//! - the complete classification pipeline for harmonic cubic forms on `R^3`
//!   via a degree-six polynomial and Sturm counting ([`cubic3`]);
//! - closed-form ray solutions and stationary points at infinity for
//!   `x' = P(x)` with polynomial right-hand side ([`odeflow`]);
//! - the text input/output schema shared with the command line tool ([`io`]).

pub mod cubic3;
pub mod eigen;
mod error;
pub mod io;
pub mod odeflow;
pub mod scalar;
pub mod tensor;
pub mod upoly;

pub use error::{Error, Result};
pub use scalar::{Coeff, RealCoeff};
pub use tensor::{Form, HomogeneousMap, MultiIndex, PolyMap, SymmetricTensorView};
pub use upoly::{RootReport, SturmChain, UnivarPoly};
