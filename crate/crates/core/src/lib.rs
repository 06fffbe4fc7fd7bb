//! Exact computation with quiver necklace Lie algebras, their quantization
//! by height words, and the trace maps into (homogenized) differential
//! operators on representation spaces, together with a harness that checks
//! that quantization commutes with reduction on small quivers.
//!
//! ```
//! use quiver_quant::{necklace::{Necklace, NecklaceSum}, Quiver};
//!
//! let q = Quiver::jordan().double().unwrap();
//! let a = NecklaceSum::from(Necklace::from_names(&q, &["a"]).unwrap());
//! let b = NecklaceSum::from(Necklace::from_names(&q, &["a*"]).unwrap());
//! let br = quiver_quant::necklace::necklace_bracket(&q, &a, &b).unwrap();
//! assert_eq!(br.display(&q).to_string(), "e(v)");
//! ```

pub mod error;
pub mod expr;
pub mod hpoly;
pub mod linalg;
pub mod necklace;
pub mod quiver;
pub mod schedler;
pub mod trace;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use hpoly::HPoly;
pub use quiver::{ArrowId, DimVector, Quiver, VertexId};

/// Exact rational numbers.
pub type Rational = num::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/quivers.md")]
    struct Quivers;
    #[doc = include_str!("../../../book/src/necklaces.md")]
    struct Necklaces;
    #[doc = include_str!("../../../book/src/height-words.md")]
    struct HeightWords;
    #[doc = include_str!("../../../book/src/operators.md")]
    struct Operators;
    #[doc = include_str!("../../../book/src/traces.md")]
    struct Traces;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
}
