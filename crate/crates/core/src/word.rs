//! Storage scalar abstraction for [`crate::bits::UBits`].

use core::fmt;

use num_traits::ops::overflowing::{OverflowingAdd, OverflowingSub};
use num_traits::{PrimInt, Unsigned, WrappingAdd, WrappingSub};

/// Unsigned machine word used as backing storage for a bit-vector.
///
/// A `UBits<S>` can hold any width up to `S::BITS`, so the widest value a
/// pipeline touches decides the storage type: `u64` comfortably covers
/// single precision (48-bit mantissa products), `u128` covers double
/// precision (106-bit products) and operand widths up to 128.
pub trait Word:
    PrimInt
    + Unsigned
    + OverflowingAdd
    + OverflowingSub
    + WrappingAdd
    + WrappingSub
    + fmt::Debug
    + fmt::Display
    + fmt::Binary
    + fmt::LowerHex
    + fmt::UpperHex
    + Send
    + Sync
    + 'static
{
    const BITS: u32;

    fn from_u128(value: u128) -> Self;
    fn to_u128(self) -> u128;
}

macro_rules! impl_word {
    ($($ty:ty),*) => {
        $(
            impl Word for $ty {
                const BITS: u32 = <$ty>::BITS;

                #[inline]
                fn from_u128(value: u128) -> Self {
                    debug_assert!(value <= <$ty>::MAX as u128);
                    value as $ty
                }

                #[inline]
                fn to_u128(self) -> u128 {
                    self as u128
                }
            }
        )*
    };
}

impl_word!(u32, u64, u128);
