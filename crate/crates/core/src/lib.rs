pub mod blade;
pub mod bundled;
pub mod bv;
pub mod duality;
pub mod error;
pub mod exterior;
pub mod homology;
pub mod identities;
pub mod input;
pub mod linalg;
pub mod modular;
pub mod expr;
pub mod poisson;
pub mod presentation;
pub mod random;
pub mod report;
pub mod ring;

pub use blade::Blade;
pub use error::{Error, Result};
pub use exterior::{KForm, Multivector};
pub use presentation::{validate_presentation, SmoothPresentation};
pub use report::{CheckResult, ValidationReport};
pub use ring::{Monomial, Poly, Rational, Ring};
