//! Hairpin completion of regular languages: decision procedure for
//! regularity, unambiguous linear grammar construction, generating
//! functions, and growth analysis.
//!
//! The inputs are a complete DFA for a language L1, a complete DFA for the
//! reversed complement of a language L2, and a primer length kappa. Words
//! gamma alpha beta bar(alpha) extend to gamma alpha beta bar(alpha)
//! bar(gamma) (and symmetrically on the left), with |alpha| >= kappa. The
//! library decides whether the completed language is regular, produces
//! machine-checkable witnesses either way, and derives counting data.

pub mod alphabet;
pub mod bridges;
pub mod decide;
pub mod dfa;
pub mod grammar;
pub mod growth;
pub mod instance;
pub mod nfa;
pub mod oracle;
pub mod scc;
pub mod series;

pub mod testkit;

pub use oracle::HairpinInstance;
