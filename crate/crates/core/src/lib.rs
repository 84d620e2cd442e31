//! Combinatorial models of multiagent systems and their geometry.
//!
//! * [`frames`]: Kripke equivalence frames, valuations, frame morphisms and
//!   the translations to and from global state spaces.
//! * [`sgs`]: global state spaces of interpreted systems, reachability,
//!   hypercube intervals and runs.
//! * [`logic`]: the multi-agent modal language with group operators,
//!   evaluation over frames and validity checking.
//! * [`atlas`]: groupoid atlases in orbit-partition form and the standard
//!   constructions (from frames, subdivision, the line, group actions).
//! * [`paths`]: curves, framings, ladder equivalence and path objects.
//! * [`complexes`]: Dowker's nerve and Vietoris complexes and exact
//!   rational homology.
//! * [`linalg`]: exact rank computation, generic over the integer type.

pub mod atlas;
pub mod complexes;
pub mod fixtures;
pub mod frames;
pub mod label;
pub mod linalg;
pub mod logic;
pub mod partition;
pub mod paths;
pub mod sgs;

pub use label::Label;

/// Sparse boundary matrix over machine integers; the fast path.
pub type IntMatrix = linalg::SparseMatrix<i64>;
/// Sparse matrix over arbitrary-precision integers; the overflow fallback.
pub type BigIntMatrix = linalg::SparseMatrix<num_bigint::BigInt>;
/// Rational Betti numbers `b_0, b_1, …`.
pub type BettiVector = Vec<usize>;

/// Default cap on enumerated items (curves, framings, valuations).
pub const DEFAULT_CAP: usize = 10_000;
/// Default cap on the number of faces of a simplicial complex.
pub const DEFAULT_MAX_FACES: usize = 100_000;
