//! Bit-exact software model of a floating-point multiplier built from an
//! Urdhva-Tiryagbhyam (vertically-and-crosswise) leaf multiplier and a
//! generalized Karatsuba recursion.
//!
//! The crate is layered bottom-up:
//!
//! * [`bits`] — fixed-width unsigned bit-vectors plus word-level models
//!   of ripple-carry, borrow, carry-save, and carry-select adders;
//! * [`urdhva`] — the column-scheme leaf multiplier for operands up to
//!   8 bits, in both behavioral and cascaded-adder structural form;
//! * [`karatsuba`] — the three-multiplies-per-split recursion over
//!   arbitrary widths, terminating in Urdhva leaves;
//! * [`fp`] — the floating-point pipeline (unpack, sign, exponent,
//!   mantissa multiply, normalize, truncate, classify, pack) over
//!   parameterized layouts, single and double precision included;
//! * [`cost`] — leaf and adder operation counts for the same recursion
//!   shape, against a schoolbook baseline;
//! * [`oracle`] — an independent decode/exact-multiply/re-encode
//!   reference the pipeline is tested against bit for bit.
//!
//! All arithmetic is generic over the backing storage word ([`Word`]):
//! pick `u64` for single precision work, `u128` for double precision or
//! operand widths up to 128 bits.

pub mod bits;
pub mod cost;
pub mod fp;
pub mod karatsuba;
pub mod oracle;
pub mod urdhva;
pub mod word;

pub use bits::{BitsError, UBits};
pub use fp::{FpFlags, FpFormat, FpResult, PackedFloat, UnpackedFloat};
pub use karatsuba::DEFAULT_LEAF_WIDTH;
pub use urdhva::MAX_LEAF_WIDTH;
pub use word::Word;

/// Bit-vector on 64-bit storage: enough for single-precision pipelines
/// and integer multiplies up to 32-bit operands.
pub type UBits64 = UBits<u64>;
/// Bit-vector on 128-bit storage: double precision and operand widths up
/// to 128 bits.
pub type UBits128 = UBits<u128>;

/// Single-precision pattern on 64-bit storage.
pub type PackedSingle = PackedFloat<u64>;
/// Double-precision (or any wide) pattern on 128-bit storage.
pub type PackedWide = PackedFloat<u128>;
