//! Finite-dimensional Hilbert complexes with partially defined differentials.
//!
//! Everything is built on two primitives: orthonormal-basis [`Subspace`]s with
//! a singular-value rank tolerance, and [`LinearRelation`]s (subspaces of a
//! product space) which model partial operators, their adjoints, and the
//! multivalued adjoints that non-dense domains force in finite dimension.
//!
//! On top of those sit graded complexes ([`HilbertComplex`]) with cohomology,
//! harmonic spaces, Kodaira splittings, Laplacians and Euler data, and the
//! nested-pair machinery ([`SandwichPair`]): the intermediate complex squeezed
//! between a differential and an extension of it, its dual, duality maps,
//! and the index/signature identities they satisfy.

pub mod complex;
pub mod error;
pub mod instance;
pub mod models;
pub mod relation;
pub mod report;
pub mod sandwich;
pub mod subspace;
pub mod tol;

pub use complex::{GradedSpace, HilbertComplex, KodairaSplit, PartialOperator};
pub use error::{Error, Result};
pub use instance::{DualityBlock, InstanceFile, OperatorBlock};
pub use relation::LinearRelation;
pub use report::{CheckRecord, ValidationReport};
pub use sandwich::{DualityData, IndexReport, IntermediateComplex, SandwichPair, SignatureReport};
pub use subspace::Subspace;
pub use tol::Tolerance;
