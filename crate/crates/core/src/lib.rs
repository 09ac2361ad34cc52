//! Entry statistics of uniformly random rank-`r` matrices over finite fields.
//!
//! The crate provides finite-field arithmetic ([`field`]), dense matrices
//! ([`matrix`]), exact counting formulas ([`counting`]), character and
//! Fourier machinery ([`characters`]), seeded samplers ([`sampling`]) and the
//! statistics built on them ([`stats`]).

pub mod characters;
pub mod counting;
pub mod field;
pub mod lemmas;
pub mod matrix;
pub mod par;
pub mod sampling;
pub mod stats;

pub use field::{FieldCtx, FieldElement, FieldOrder};
pub use matrix::{MatrixFq, SubsetA};
pub use par::Workers;
pub use sampling::{RankSampler, SamplerMode, SeedSpec};
