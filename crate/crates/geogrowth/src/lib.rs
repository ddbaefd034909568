//! Exact geodesic-growth computations for concretely represented virtually
//! abelian groups and the discrete Heisenberg group: ball enumeration with
//! exact geodesic counting, generating-set constructions, convex-hull
//! witness checks, growth-sequence classification and empirical geodesic
//! automata.

pub mod automaton;
pub mod document;
pub mod engine;
pub mod genset;
pub mod group;
pub mod growth;
pub mod hull;
