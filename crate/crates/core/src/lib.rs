//! Axiomatic attribution of the change `f(s) - f(r)` to individual variables.
//!
//! Characteristic functions are sums of a multilinear polynomial and
//! additively separable univariate terms. For this class the Aumann-Shapley
//! path integral and the Shapley-Shubik order average coincide; the crate
//! computes that common attribution exactly with an `O(n^2)`-per-monomial
//! dynamic program ([`exact`]), and ships the independent routes used to
//! check it: enumeration over all variable orders ([`oracle`]) and numerical
//! path integration ([`path`]). [`axioms`] verifies attribution axioms on
//! random instances, and [`model`] holds the file formats, application
//! models and reports used by the `attrib` command-line tool.

pub mod axioms;
pub mod characteristic;
pub mod error;
pub mod exact;
pub mod function;
pub mod method;
pub mod model;
pub mod oracle;
pub mod path;
pub mod quadrature;

pub use characteristic::{
    combine, AttributionResult, CharacteristicFunction, MultilinearPoly, SeparableKind, SeparableTerm, ValuePair,
};
pub use error::{AttribError, Result};
pub use exact::{attribute_ass, attribute_monomial, attribute_naive, shapley_weight};
pub use function::{BlackBoxFunction, Evaluable};
pub use method::AttributionMethod;
pub use oracle::{random_order_attribution, shapley_shubik_bruteforce, PermutationWeights};
pub use path::{attribute_aumann_shapley, attribute_path, BasePath};
pub use quadrature::QuadratureConfig;
