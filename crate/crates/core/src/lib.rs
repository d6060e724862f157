//! Exact character values of the symmetric groups.
//!
//! Characters are evaluated with the Murnaghan–Nakayama rule on the abacus
//! (bead-sequence) encoding of partitions. Around that engine sit the tools
//! for studying prime-power divisibility of character table entries: the
//! part-combining congruence, the reduction `μ → μ̃`, core conditions,
//! hook-sequence counting, skew tableaux and Littlewood–Richardson
//! coefficients, plus desk-scale statistics.
//!
//! Counting and character routines are generic over the integer type through
//! [`Count`] and [`CharScalar`]; real-valued estimates are generic over
//! [`num_traits::Float`]. The aliases below fix the exact defaults.

pub mod abacus;
pub mod characters;
pub mod divisibility;
mod error;
pub mod partitions;
mod scalar;
pub mod stats;
pub mod tableaux;

pub use abacus::{Abacus, Hook, QuotientView};
pub use characters::CharacterTable;
pub use divisibility::{CombineConfig, VerifyReport};
pub use error::{Error, Result};
pub use partitions::{Multiplicities, Partition};
pub use scalar::{CharScalar, Count};
pub use tableaux::SkewShape;

/// Exact nonnegative count (partition numbers, tableau counts, degrees).
pub type BigCount = num_bigint::BigUint;

/// Exact signed character value.
pub type CharValue = num_bigint::BigInt;

/// Floating type used for the analytic estimates.
pub type Real = f64;

/// Character table with exact entries.
pub type ExactTable = CharacterTable<CharValue>;
