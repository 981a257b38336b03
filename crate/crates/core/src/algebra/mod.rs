//! Monoids, monoid homomorphisms and star-quantales.

mod monoid;
mod quantale;
mod verify;

pub use monoid::{CanonicalHom, Element, FiniteMonoid, HomKind, MonoidHom, MonoidKind, MonoidSpec};
pub use quantale::{
    BoolQuantale, Cost, LabelAlgebra, LabelQuantale, LabelSet, Labelled, Likelihood, MaxPlus, MinTimes, StarQuantale,
    Weight, WeightDomain, MAX_LABELS,
};
pub use verify::{verify_quantale, AxiomResult, QuantaleReport};
