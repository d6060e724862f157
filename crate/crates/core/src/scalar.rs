use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Integer type able to hold exact counts.
///
/// Implemented for every unsigned or signed machine integer and for the
/// big-integer types. Machine integers overflow for large inputs; the
/// [`BigCount`](crate::BigCount) alias never does.
pub trait Count: Clone + Debug + Display + Num + FromPrimitive + PartialOrd + Send + Sync {
    fn from_usize_exact(value: usize) -> Self {
        Self::from_usize(value).expect("count type too narrow for a machine integer")
    }

    /// `true` when `self` is a multiple of `modulus`.
    fn divisible_by(&self, modulus: u64) -> bool {
        let m = Self::from_u64(modulus).expect("modulus fits the count type");
        (self.clone() % m).is_zero()
    }
}

impl<T> Count for T where T: Clone + Debug + Display + Num + FromPrimitive + PartialOrd + Send + Sync {}

/// Signed exact integer used for character values.
pub trait CharScalar: Count + Signed {}

impl<T> CharScalar for T where T: Count + Signed {}
