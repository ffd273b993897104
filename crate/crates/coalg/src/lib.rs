//! Exact-arithmetic workbench for finite-dimensional coalgebras.
//!
//! Everything is computed over an exact field: the rationals with
//! arbitrary-precision arithmetic, or a prime field GF(p), so every
//! structural identity (coassociativity, retraction equations, conilpotency,
//! convolution inverses, universal properties) is decided exactly, never up
//! to a tolerance.
//!
//! The crate is organized bottom-up:
//!
//! * [`exactlin`]: scalars, sparse matrices, and canonical subspaces; the
//!   substrate for every kernel, image, preimage and tensor construction.
//! * [`coalgebra`]: the coalgebra data model (structure constants for Δ and
//!   ε), morphisms, dual algebras, quotients and closures.
//! * [`coradical`]: wedge products, Jacobson radicals, coradical
//!   filtrations, pointedness detection.
//! * [`colored`]: splittings δ: C → C\[G\], reduced comultiplication,
//!   conilpotency certificates, bigraded decompositions, and the
//!   reduce/unreduce equivalence.
//! * [`constructions`]: quiver path coalgebras, graded space-like
//!   coalgebras, cotensor products and truncated cofree cotensor coalgebras.
//! * [`convolution`]: convolution algebras Hom(C, A), explicit convolution
//!   inverses, bialgebras and antipodes.
//! * [`category`]: coproducts, equalizers, coequalizers and truncated
//!   products of (reduced) colored coalgebras.
//! * [`mod@format`]: the JSON definition-file format used by the CLI.
//! * [`samples`]: deterministic instance generators used by the test and
//!   acceptance suites.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod exactlin;
pub mod report;

pub mod coalgebra;
pub mod colored;
pub mod constructions;
pub mod convolution;
pub mod coradical;

pub mod category;
pub mod format;
pub mod samples;

pub use exactlin::{Field, LinError, Matrix, Scalar, Subspace};
pub use report::{Check, Report};

pub use coalgebra::{Algebra, Coalgebra, CoalgebraError, CoalgebraMorphism};
pub use colored::{ColoredError, Conilpotency, OrthoIdempotents, ReducedColored, SimplyColored};
pub use constructions::{Bicomodule, ConstructError, GradedCoalgebra, Quiver};
pub use convolution::{Bialgebra, ConvError, ConvMap};
pub use coradical::{CoradicalError, Filtration, Pointedness};

pub use category::{CategoryError, ColoredMorphism};
