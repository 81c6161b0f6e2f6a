//! Heights of subspaces over number fields, principal angles between complex
//! subspaces, embedded lattices with reduction and enumeration, the
//! going-down transference construction, and numerical approximation
//! exponents.

pub mod config;
pub mod error;
pub mod exponents;
pub mod exterior;
pub mod geometry;
pub mod goingdown;
pub mod height;
pub mod intmat;
pub mod lattice;
pub mod numberfield;
pub mod poly;
pub mod ring;

pub use error::{Error, Result};
pub use numberfield::{FieldElement, NumberField};
