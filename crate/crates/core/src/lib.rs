//! Sizing two-arm trials whose primary endpoint is a composite of two binary
//! components.
//!
//! The composite event occurs when either component event occurs. Its rate
//! and treatment effect depend on the component rates, the component effects
//! and the correlation between the components ([`composite`]). The
//! correlation is bounded by the margins ([`bounds`]); sample size grows with
//! it ([`sizing`]), which drives the sizing strategies for an unknown
//! correlation and uncertain event rates ([`strategy`]). [`simulate`]
//! checks the resulting designs by Monte Carlo.

pub mod bounds;
pub mod composite;
pub mod error;
pub mod exec;
pub mod normal;
pub mod simulate;
pub mod sizing;
pub mod strategy;

pub use error::{Error, Result};
