//! Fixed-width unsigned bit-vectors and word-level adder models.
//!
//! [`UBits`] is the operand type every arithmetic stage works on: a value
//! together with an explicit bit width, with the invariant
//! `value < 2^width` maintained at all times. Bit index 0 is the LSB.
//!
//! The adders are modeled at word level with bit-exact contracts rather
//! than as gate netlists: [`UBits::add_ripple`] and
//! [`UBits::add_carry_select`] are functionally identical two-operand
//! adders (the architectures differ only in delay, which
//! [`crate::cost`] accounts for separately), and [`add_carry_save`]
//! reduces three or more operands to a redundant sum/carry pair.

use core::fmt;

use thiserror::Error;

use crate::word::Word;

/// Error for fallible `UBits` construction from external input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("'{0}' is not a valid hex literal")]
    InvalidHex(String),
    #[error("hex literal '{literal}' does not fit a {width}-bit value")]
    HexOutOfRange { literal: String, width: u32 },
    #[error("hex literal '{literal}' must have exactly {digits} digits for a {width}-bit value")]
    HexWrongLength {
        literal: String,
        width: u32,
        digits: usize,
    },
}

/// Fixed-width unsigned bit-vector. LSB is bit index 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UBits<S: Word> {
    width: u32,
    value: S,
}

#[inline]
fn mask<S: Word>(width: u32) -> S {
    if width == S::BITS {
        S::max_value()
    } else {
        (S::one() << width as usize) - S::one()
    }
}

impl<S: Word> UBits<S> {
    /// Creates a bit-vector of the given width. Panics if the value does
    /// not fit, or if the width is zero or exceeds the storage word.
    #[inline]
    pub fn new(width: u32, value: S) -> Self {
        assert!(
            width >= 1 && width <= S::BITS,
            "width {width} out of range for {}-bit storage",
            S::BITS
        );
        assert!(
            value <= mask::<S>(width),
            "value {value:#x} does not fit in {width} bits"
        );
        UBits { width, value }
    }

    #[inline]
    pub fn zero(width: u32) -> Self {
        Self::new(width, S::zero())
    }

    /// All bits set: `2^width - 1`.
    #[inline]
    pub fn ones(width: u32) -> Self {
        Self::new(width, mask::<S>(width))
    }

    /// Single-bit vector holding `b`.
    #[inline]
    pub fn from_bit(b: bool) -> Self {
        Self::new(1, if b { S::one() } else { S::zero() })
    }

    pub fn from_u128(width: u32, value: u128) -> Self {
        assert!(
            width == 128 || value < (1u128 << width),
            "value {value:#x} does not fit in {width} bits"
        );
        Self::new(width, S::from_u128(value))
    }

    /// Parses an unprefixed hex literal into a value of the given width.
    /// The digit count must match the width exactly (`ceil(width / 4)`).
    pub fn from_hex(width: u32, literal: &str) -> Result<Self, BitsError> {
        let digits = width.div_ceil(4) as usize;
        if literal.len() != digits {
            return Err(BitsError::HexWrongLength {
                literal: literal.to_string(),
                width,
                digits,
            });
        }
        let value = u128::from_str_radix(literal, 16)
            .map_err(|_| BitsError::InvalidHex(literal.to_string()))?;
        if width < 128 && value >= (1u128 << width) {
            return Err(BitsError::HexOutOfRange {
                literal: literal.to_string(),
                width,
            });
        }
        Ok(Self::new(width, S::from_u128(value)))
    }

    /// Uppercase hex, zero-padded to `ceil(width / 4)` digits.
    pub fn to_hex(&self) -> String {
        format!(
            "{:0>pad$X}",
            self.value,
            pad = self.width.div_ceil(4) as usize
        )
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn value(&self) -> S {
        self.value
    }

    #[inline]
    pub fn to_u128(&self) -> u128 {
        self.value.to_u128()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Bit at index `i` (LSB = 0). Panics if out of range.
    #[inline]
    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.width, "bit index {i} out of range for width {}", self.width);
        (self.value >> i as usize) & S::one() == S::one()
    }

    #[inline]
    pub fn msb(&self) -> bool {
        self.bit(self.width - 1)
    }

    /// Two-operand adder with carry propagation from LSB to MSB.
    ///
    /// Returns the in-width sum and the carry out of the top bit, so that
    /// `carry * 2^width + sum == a + b` exactly.
    #[inline]
    pub fn add_ripple(self, rhs: Self) -> (Self, bool) {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        let (raw, ovf) = self.value.overflowing_add(&rhs.value);
        let carry = if self.width == S::BITS {
            ovf
        } else {
            (raw >> self.width as usize) & S::one() == S::one()
        };
        (
            UBits {
                width: self.width,
                value: raw & mask::<S>(self.width),
            },
            carry,
        )
    }

    /// Two-operand subtracter with borrow propagation.
    ///
    /// If `a >= b` the difference is exact and the borrow is clear;
    /// otherwise the borrow is set and the result wraps modulo `2^width`.
    #[inline]
    pub fn sub_borrow(self, rhs: Self) -> (Self, bool) {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        let borrow = self.value < rhs.value;
        let raw = self.value.wrapping_sub(&rhs.value);
        (
            UBits {
                width: self.width,
                value: raw & mask::<S>(self.width),
            },
            borrow,
        )
    }

    /// Carry-select adder: both carry hypotheses are evaluated per 4-bit
    /// block and the incoming block carry picks the result. Bit-identical
    /// to [`UBits::add_ripple`]; the architectures differ only in delay.
    pub fn add_carry_select(self, rhs: Self) -> (Self, bool) {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        const BLOCK: u32 = 4;
        let mut acc = S::zero();
        let mut carry = false;
        let mut lo = 0;
        while lo < self.width {
            let bw = BLOCK.min(self.width - lo);
            let block_mask = mask::<S>(bw);
            let a = ((self.value >> lo as usize) & block_mask).to_u128();
            let b = ((rhs.value >> lo as usize) & block_mask).to_u128();
            // Both hypotheses computed unconditionally, then muxed.
            let sum0 = a + b;
            let sum1 = a + b + 1;
            let picked = if carry { sum1 } else { sum0 };
            carry = picked >> bw != 0;
            acc = acc | (S::from_u128(picked & block_mask.to_u128()) << lo as usize);
            lo += bw;
        }
        (
            UBits {
                width: self.width,
                value: acc,
            },
            carry,
        )
    }

    /// Extracts bits `hi..=lo` as a new vector of width `hi - lo + 1`.
    pub fn slice(self, hi: u32, lo: u32) -> Self {
        assert!(
            lo <= hi && hi < self.width,
            "slice {hi}..{lo} out of range for width {}",
            self.width
        );
        let w = hi - lo + 1;
        UBits {
            width: w,
            value: (self.value >> lo as usize) & mask::<S>(w),
        }
    }

    /// Concatenates `self` (upper part) with `lo` (lower part).
    pub fn concat(self, lo: Self) -> Self {
        let w = self.width + lo.width;
        assert!(
            w <= S::BITS,
            "concatenated width {w} exceeds {}-bit storage",
            S::BITS
        );
        UBits {
            width: w,
            value: (self.value << lo.width as usize) | lo.value,
        }
    }

    /// Widening left shift: the result is placed in a vector of
    /// `new_width` bits; bits shifted beyond it are dropped.
    pub fn shl_into(self, k: u32, new_width: u32) -> Self {
        assert!(
            new_width >= 1 && new_width <= S::BITS,
            "width {new_width} out of range for {}-bit storage",
            S::BITS
        );
        let value = if k >= S::BITS {
            S::zero()
        } else {
            (self.value << k as usize) & mask::<S>(new_width)
        };
        UBits {
            width: new_width,
            value,
        }
    }

    /// In-width logical right shift.
    pub fn shr(self, k: u32) -> Self {
        let value = if k >= self.width {
            S::zero()
        } else {
            self.value >> k as usize
        };
        UBits {
            width: self.width,
            value,
        }
    }

    /// Widens to `new_width` bits without changing the value.
    pub fn zero_extend(self, new_width: u32) -> Self {
        assert!(
            new_width >= self.width,
            "cannot zero-extend width {} to {new_width}",
            self.width
        );
        assert!(
            new_width <= S::BITS,
            "width {new_width} exceeds {}-bit storage",
            S::BITS
        );
        UBits {
            width: new_width,
            value: self.value,
        }
    }
}

/// Reduces three or more equal-width operands to a redundant
/// `(sum, carry)` pair with `sum + 2 * carry == Σ operands`.
///
/// Operands are compressed pairwise-by-threes (`s = x ^ y ^ z`,
/// `c = majority(x, y, z) << 1`) until two vectors remain. Both outputs
/// are widened to `width + ceil(log2(n))` bits so no intermediate bit is
/// ever lost.
pub fn add_carry_save<S: Word>(operands: &[UBits<S>]) -> (UBits<S>, UBits<S>) {
    assert!(
        operands.len() >= 3,
        "carry-save addition needs at least 3 operands, got {}",
        operands.len()
    );
    let width = operands[0].width;
    for op in operands {
        assert_eq!(
            op.width, width,
            "width mismatch: {} vs {}",
            op.width, width
        );
    }
    let headroom = usize::BITS - (operands.len() - 1).leading_zeros();
    let work_width = width + headroom;
    assert!(
        work_width <= S::BITS,
        "carry-save over {} operands of width {width} needs {work_width} bits of storage",
        operands.len()
    );

    let mut vecs: Vec<S> = operands.iter().map(|op| op.value).collect();
    while vecs.len() > 2 {
        let mut next = Vec::with_capacity(vecs.len() * 2 / 3 + 1);
        for chunk in vecs.chunks(3) {
            if let [x, y, z] = *chunk {
                next.push(x ^ y ^ z);
                next.push(((x & y) | (x & z) | (y & z)) << 1);
            } else {
                next.extend_from_slice(chunk);
            }
        }
        vecs = next;
    }
    // The step that brought the count down to two was a 3:2 compression,
    // so the trailing vector is a shifted majority and therefore even.
    let (sum, shifted_carry) = (vecs[0], vecs[1]);
    debug_assert!(shifted_carry & S::one() == S::zero());
    (
        UBits::new(work_width, sum),
        UBits::new(work_width, shifted_carry >> 1),
    )
}

impl<S: Word> core::ops::BitAnd for UBits<S> {
    type Output = Self;

    fn bitand(self, rhs: Self) -> Self {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        UBits {
            width: self.width,
            value: self.value & rhs.value,
        }
    }
}

impl<S: Word> core::ops::BitOr for UBits<S> {
    type Output = Self;

    fn bitor(self, rhs: Self) -> Self {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        UBits {
            width: self.width,
            value: self.value | rhs.value,
        }
    }
}

impl<S: Word> core::ops::BitXor for UBits<S> {
    type Output = Self;

    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
        UBits {
            width: self.width,
            value: self.value ^ rhs.value,
        }
    }
}

impl<S: Word> fmt::Debug for UBits<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'h{:X}", self.width, self.value)
    }
}

impl<S: Word> fmt::LowerHex for UBits<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.value, f)
    }
}

impl<S: Word> fmt::UpperHex for UBits<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::UpperHex::fmt(&self.value, f)
    }
}

impl<S: Word> fmt::Binary for UBits<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0>pad$b}", self.value, pad = self.width as usize)
    }
}
