//! Numerical laboratory for the Orlicz-modular Hessian estimate
//! `∫ φ(|D²u|) ≤ C ∫ φ(|f|)` for the Dirichlet-Poisson problem on the
//! unit ball, and for the growth conditions on the Young function φ
//! that characterize it.
//!
//! The crate is organized around the objects of that statement:
//! Young functions and their Δ₂/∇₂ growth reports ([`young`]),
//! sampled fields on the ball and finite-difference Hessians ([`grid`]),
//! two independent Poisson backends ([`solver`]), the modular and its
//! layer-cake form ([`modular`]), the extremal constructions that force
//! the growth conditions ([`probes`]), and the stopping-radius ball
//! covering machinery ([`covering`]).

pub mod config;
pub mod covering;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod modular;
pub mod probes;
pub mod quad;
pub mod report;
pub mod solver;
pub mod svg;
pub mod young;

pub use error::{Error, Result};
