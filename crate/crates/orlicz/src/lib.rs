//! Young-function calculus.
//!
//! A [`YoungFunction`] is `B(t) = ∫₀ᵗ b` for a non-decreasing density `b`.
//! This crate builds them from closed-form families or tables, conjugates
//! them, extracts growth indices, and derives the Sobolev conjugate `B_σ`,
//! the weights `Φ_σ`, `Ψ_σ`, `Θ` and the sup-bound pair `(F_σ, G_σ)`.

mod classes;
mod error;
mod indices;
mod sobolev;
mod young;

pub use classes::{predict_regularity, Prediction, RegularityClass};
pub use error::OrliczError;
pub use indices::{growth_indices, GrowthIndices};
pub use sobolev::{
    converges_at_infinity, converges_at_zero, regularity_weights, sobolev_conjugate, sup_bound_functions,
    RegularityWeights, SobolevConjugate, SobolevParams, SupBound, SupBoundFunctions,
};
pub use young::{conjugate, make_young, make_young_on, near_zero_modification, DensitySpec, Grid, GridSpec, Tails, YoungFunction};

pub type Young = YoungFunction<f64>;
pub type Density = DensitySpec<f64>;
pub type Indices = GrowthIndices<f64>;
pub type Params = SobolevParams<f64>;
pub type Weights = RegularityWeights<f64>;
pub type Class = RegularityClass<f64>;
