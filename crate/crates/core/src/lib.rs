//! Spin Hamiltonians built from Pauli-string interaction terms, their exact
//! evolution unitaries, and verification that an evolution realizes a Boolean
//! gate into a designated output spin.
//!
//! Conventions used throughout: ħ = 1, the gate time is 1, site 0 is the
//! leftmost tensor factor, and basis states run from |11…1⟩ (index 0) to
//! |00…0⟩ (index 2^n − 1).

pub mod gate;
pub mod hamfile;
pub mod linalg;
pub mod pauli;
pub mod search;

pub use gate::{
    canonical_xor_unitary, induced_map, verify_gate, xor_gate_spec, BasisIndexing, GateError,
    GateSpec, SignedPermutation, VerificationReport,
};
pub use hamfile::{parse_expression, parse_file, write_file, HamFileDocument, ParseError};
pub use linalg::{
    hermitian_eigen, unitary_exponential, ComplexMatrix, EigenDecomposition, LinalgError,
};
pub use pauli::{
    embed_term, single_pauli, xor_hamiltonian, Hamiltonian, PauliLabel, PauliTerm, SpinSystem,
};
pub use search::{
    nelder_mead, objective, realize, relabel, search, InteractionTemplate, ParameterVector,
    SearchConfig, SearchError, SearchResult,
};
