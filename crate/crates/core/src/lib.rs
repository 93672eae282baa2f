//! Hamiltonian simulation with projection-operator terms.
//!
//! The crate compares two routes to quantum search: continuous evolution
//! under `|s⟩⟨s| + |t⟩⟨t|` and iteration of the Grover reflection product.
//! It also provides a first-order Lie–Trotter engine with a commutator error
//! estimate and a decomposer that splits sparse Hamiltonians into
//! block-diagonal terms by edge coloring. Majority-vote amplification and
//! cost accounting complete the set.
//!
//! - [`pauli`]: 2×2 operators, Pauli coefficients, rotations, Bloch points.
//! - [`search`]: the continuous and discrete search models and their equivalence.
//! - [`trotter`]: term sets, exact term exponentials, Trotter evolution and planning.
//! - [`decompose`]: interaction graphs, edge coloring, lattice generators.
//! - [`statevector`]: the full N-dimensional Grover oracle.
//! - [`amplify`]: majority-rule amplification and complexity accounting.

pub mod amplify;
pub mod decompose;
mod error;
pub mod linalg;
pub mod pauli;
pub mod search;
pub mod statevector;
pub mod trotter;

pub use error::{Error, Result};
