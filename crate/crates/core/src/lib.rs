//! Classification of trifferent codes.
//!
//! A code over `{0,1,2}` of length `n` is trifferent (a perfect 3-hash code)
//! when every three distinct words carry all three symbols in some
//! coordinate. The crate enumerates such codes up to equivalence, extends
//! them coordinate by coordinate, evaluates the classical upper bounds on
//! their size and checks ternary linear codes for minimality.

pub mod bounds;
pub mod catalog;
pub mod code;
pub mod enumeration;
pub mod equivalence;
pub mod error;
pub mod extension;
pub mod io;
pub mod linear;
pub mod par;
pub mod word;

pub use code::{Code, SymbolCounts, TauInfo};
pub use equivalence::{
    apply, canonical_form, canonical_form_with_map, is_canonical, orbit_oracle, CanonicalResult,
    GroupElement,
};
pub use error::{Result, TrifError};
pub use word::{hamming_distance, triple_trifferent, Codeword, MAX_LENGTH};
