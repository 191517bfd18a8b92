//! Finite universal algebra at desk scale: congruence generation, direct
//! decomposition, central elements, first-order definability of factor
//! congruences, Mal'cev-style identity checks, and a gallery of examples.

pub mod algebra;
pub mod congruence;
pub mod factorization;
pub mod fol;
pub mod gallery;
pub mod malcev;
