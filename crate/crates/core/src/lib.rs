//! Exact computations for FI^m-arrangements: intersection lattices,
//! Goresky–MacPherson cohomology of the complement, equivariant characters
//! and the representation stability checks built on them.

pub mod arrangement;
pub mod characters;
pub mod error;
pub mod exactlin;
pub mod fim;
pub mod homology;
pub mod par;

pub use arrangement::{build_lattice, family_mkr, ArrangementSpec, Generator, IntersectionLattice};
pub use characters::{CharacterPolynomial, ClassFunction};
pub use error::{Error, Result};
pub use exactlin::{Rational, RationalMatrix, Subspace};
pub use fim::{ConjClass, Injection, MultiIndex, PermTuple};
