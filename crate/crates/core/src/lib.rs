//! Exact computation of graded higher direct images of logarithmic
//! differentials along toric log resolutions of affine toric varieties.
//!
//! The pipeline is:
//!
//! * [`polyhedra`]: cones, duality, faces, smoothness classification and
//!   enumeration of characters `u` in a bounded slice of the dual cone;
//! * [`fans`]: fans refining a cone, star subdivision, a deterministic
//!   resolution strategy and the invariants of a refinement (strongness,
//!   codimension of the locus where the inverse is undefined);
//! * [`koszul`]: finite cochain complexes and the quotient complexes of the
//!   graded Koszul complex;
//! * [`toric_complexes`]: the degree-`u` pieces of the Ishida, residue and
//!   kernel complexes and their graded cohomology;
//! * [`verifier`]: vanishing / non-vanishing predictions and their
//!   evaluation on concrete inputs;
//! * [`cli`]: file formats and the command-line surface.
//!
//! The linear algebra in [`linalg`] is generic over the scalar type. Every
//! other module works with the arbitrary-precision aliases below; there is
//! no floating point anywhere.

pub mod cli;
pub mod fans;
pub mod koszul;
pub mod linalg;
pub mod polyhedra;
pub mod toric_complexes;
pub mod verifier;

mod exterior;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Lattice coordinates.
pub type Int = BigInt;
/// Coefficients of every vector space in the artifact.
pub type Rat = BigRational;
pub type IntMatrix = linalg::Matrix<Int>;
pub type RatMatrix = linalg::Matrix<Rat>;
/// An element of `N` or `M`.
pub type Lattice = Vec<Int>;

pub use fans::{Fan, ResolutionProfile};
pub use koszul::{FiniteComplex, KoszulSpec};
pub use polyhedra::{Codim, Cone, ConeProfile, DualCone, FaceLattice};
pub use toric_complexes::{ComplexKind, GradedCohomologyTable, ResolvedCone};
pub use verifier::{PredictionSet, VerdictReport};
