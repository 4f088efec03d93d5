//! Exact combinatorial machinery for stratified boundary divisors.
//!
//! The toolkit models the dual intersection data of a simple normal crossing
//! boundary as a graded poset of strata, attaches a free additive category of
//! stable birational class labels, and materializes two chain complexes over
//! it: the subdivision complex built from chains in the poset and the nerve
//! (Cech) complex built from the strata themselves. All comparison maps
//! between them (last vertex projections, subdivision expansions, explicit
//! homotopies, pushforwards along barycentric, star, and blowup subdivisions)
//! are constructed as exact integer matrices and can be verified identity by
//! identity. A lattice layer resolves simplicial cone complexes to smooth
//! ones, a homology layer computes integral homology via Smith normal form,
//! and a volume layer evaluates Grothendieck-class invariants.
//!
//! Everything is exact: coefficients are integers, verification is equality,
//! and there are no tolerances anywhere.

pub mod builders;
pub mod chain;
pub mod freecat;
pub mod homology;
pub mod lattice;
pub mod report;
pub mod sampler;
pub mod strata;
pub mod subdivide;
pub mod volume;
