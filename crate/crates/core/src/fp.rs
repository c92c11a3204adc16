//! Floating-point multiplication pipeline: unpack, sign, exponent,
//! mantissa multiply, normalize, truncate, classify, pack.
//!
//! Layouts follow the usual sign / biased-exponent / fraction packing
//! with a hidden leading significand bit for normal numbers. Products
//! are truncated toward zero: guard bits below the stored fraction are
//! dropped, never rounded. Exponent overflow clamps to the infinity
//! encoding; underflow shifts gradually into the subnormal encoding and
//! finally to signed zero once every significant bit is gone.
//!
//! Special operands (NaN, infinities, zeros) never reach the arithmetic
//! stages: [`multiply`] resolves them up front with the usual identities
//! (NaN in, NaN out; `inf * 0` is NaN; `inf * finite` keeps the infinity;
//! `0 * finite` keeps the zero) and the XOR sign rule throughout.

use core::fmt;

use crate::bits::UBits;
use crate::karatsuba::{
    karatsuba_mul, karatsuba_mul_observed, TraceNode, TreeObserver, DEFAULT_LEAF_WIDTH,
};
use crate::word::Word;

/// Field widths and bias of a packed floating-point layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpFormat {
    pub exp_width: u32,
    pub frac_width: u32,
    pub bias: u32,
}

impl FpFormat {
    /// 1 + 8 + 23 bits, bias 127.
    pub fn single() -> Self {
        FpFormat {
            exp_width: 8,
            frac_width: 23,
            bias: 127,
        }
    }

    /// 1 + 11 + 52 bits, bias 1023.
    pub fn double() -> Self {
        FpFormat {
            exp_width: 11,
            frac_width: 52,
            bias: 1023,
        }
    }

    pub fn custom(exp_width: u32, frac_width: u32, bias: u32) -> Self {
        assert!(
            (1..=32).contains(&exp_width),
            "exponent width must be between 1 and 32, got {exp_width}"
        );
        assert!(frac_width >= 1, "fraction width must be at least 1");
        FpFormat {
            exp_width,
            frac_width,
            bias,
        }
    }

    /// Sign + exponent + fraction.
    pub fn total_width(&self) -> u32 {
        1 + self.exp_width + self.frac_width
    }

    /// All-ones exponent field, the infinity/NaN band.
    pub fn exp_max(&self) -> u32 {
        (((1u64) << self.exp_width) - 1) as u32
    }
}

/// A bit pattern together with the format that gives it meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedFloat<S: Word> {
    pub format: FpFormat,
    pub bits: UBits<S>,
}

impl<S: Word> PackedFloat<S> {
    pub fn new(format: FpFormat, bits: UBits<S>) -> Self {
        assert_eq!(
            bits.width(),
            format.total_width(),
            "bit pattern width {} does not match the format's {} bits",
            bits.width(),
            format.total_width()
        );
        PackedFloat { format, bits }
    }

    pub fn from_u128(format: FpFormat, bits: u128) -> Self {
        Self::new(format, UBits::from_u128(format.total_width(), bits))
    }

    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }
}

/// Fields of a float with the hidden bit made explicit: the significand
/// is `frac_width + 1` bits, MSB set exactly when the number is normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnpackedFloat<S: Word> {
    pub sign: bool,
    pub biased_exp: UBits<S>,
    pub significand: UBits<S>,
}

/// Result classification: at most one flag is set; all clear means a
/// normal product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FpFlags {
    pub zero: bool,
    pub infinity: bool,
    pub nan: bool,
    pub denormal: bool,
}

impl FpFlags {
    pub fn none() -> Self {
        FpFlags::default()
    }

    pub fn is_none(&self) -> bool {
        !(self.zero || self.infinity || self.nan || self.denormal)
    }

    /// Single-token form used in tool output.
    pub fn token(&self) -> &'static str {
        if self.zero {
            "ZERO"
        } else if self.infinity {
            "INF"
        } else if self.nan {
            "NAN"
        } else if self.denormal {
            "DENORM"
        } else {
            "-"
        }
    }
}

impl fmt::Display for FpFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpResult<S: Word> {
    pub packed: PackedFloat<S>,
    pub flags: FpFlags,
}

/// Splits a packed pattern into sign, exponent field, and significand
/// with the hidden bit reinserted (1 unless the exponent field is zero).
pub fn unpack<S: Word>(p: &PackedFloat<S>) -> UnpackedFloat<S> {
    let f = p.format.frac_width;
    let total = p.format.total_width();
    let biased_exp = p.bits.slice(total - 2, f);
    let stored = p.bits.slice(f - 1, 0);
    let hidden = !biased_exp.is_zero();
    UnpackedFloat {
        sign: p.bits.bit(total - 1),
        biased_exp,
        significand: UBits::from_bit(hidden).concat(stored),
    }
}

/// Concatenates sign, exponent field, and stored fraction back into a
/// packed pattern. Field widths must match the format exactly.
pub fn pack<S: Word>(
    format: &FpFormat,
    sign: bool,
    biased_exp: UBits<S>,
    stored_frac: UBits<S>,
) -> PackedFloat<S> {
    assert_eq!(
        biased_exp.width(),
        format.exp_width,
        "exponent field is {} bits, format wants {}",
        biased_exp.width(),
        format.exp_width
    );
    assert_eq!(
        stored_frac.width(),
        format.frac_width,
        "fraction field is {} bits, format wants {}",
        stored_frac.width(),
        format.frac_width
    );
    PackedFloat::new(
        *format,
        UBits::from_bit(sign).concat(biased_exp).concat(stored_frac),
    )
}

/// Product sign: negative exactly when the operand signs differ.
#[inline]
pub fn sign_mul(s1: bool, s2: bool) -> bool {
    s1 ^ s2
}

/// `e1 + e2 - bias` as a signed value with headroom beyond the exponent
/// field, computed with a ripple adder followed by a borrow subtracter.
/// Negative results (underflow region) and results above the exponent
/// range are data for the later stages, not errors.
pub fn exponent_add<S: Word>(e1: &UBits<S>, e2: &UBits<S>, bias: u32) -> i64 {
    assert_eq!(
        e1.width(),
        e2.width(),
        "width mismatch: {} vs {}",
        e1.width(),
        e2.width()
    );
    let bias_bits = (u32::BITS - bias.leading_zeros()).max(1);
    let w = (e1.width() + 2).max(bias_bits + 2);
    assert!(w <= S::BITS && w < 64, "exponent working width {w} unsupported");

    let (sum, carry) = e1.zero_extend(w).add_ripple(e2.zero_extend(w));
    debug_assert!(!carry);
    let (diff, borrow) = sum.sub_borrow(UBits::from_u128(w, bias as u128));
    if borrow {
        diff.to_u128() as i64 - (1i64 << w)
    } else {
        diff.to_u128() as i64
    }
}

/// Exact full-width significand product via the Karatsuba recursion.
pub fn mantissa_mul<S: Word>(m1: UBits<S>, m2: UBits<S>, threshold: u32) -> UBits<S> {
    karatsuba_mul(m1, m2, threshold)
}

/// Outcome of [`normalize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalized<S: Word> {
    /// `frac_width + 1` bits; MSB (hidden position) set unless the
    /// left-shift budget ran out at the subnormal boundary.
    pub significand: UBits<S>,
    pub exp: i64,
    /// Discarded low product bits, right-aligned in `frac_width + 1` bits.
    pub guard: UBits<S>,
    /// +1 for the single right shift, `-k` for `k` left shifts, 0 if the
    /// leading one was already in place.
    pub shift: i32,
}

/// Aligns the leading one of the double-width product with the hidden
/// bit position. The product carries two integer bits, so at most one
/// right shift (exponent +1) is ever needed; products with leading zeros
/// (subnormal operands) shift left with the exponent decremented per
/// step, stopping at the minimum normal exponent.
pub fn normalize<S: Word>(format: &FpFormat, product: UBits<S>, exp: i64) -> Normalized<S> {
    let f = format.frac_width;
    assert_eq!(
        product.width(),
        2 * (f + 1),
        "expected the {}-bit double-width mantissa product, got {} bits",
        2 * (f + 1),
        product.width()
    );
    assert!(!product.is_zero(), "cannot normalize a zero product");

    let overflow_pos = 2 * f + 1;
    let hidden_pos = 2 * f;
    if product.bit(overflow_pos) {
        Normalized {
            significand: product.slice(overflow_pos, f + 1),
            exp: exp + 1,
            guard: product.slice(f, 0),
            shift: 1,
        }
    } else if product.bit(hidden_pos) {
        Normalized {
            significand: product.slice(hidden_pos, f),
            exp,
            guard: product.slice(f - 1, 0).zero_extend(f + 1),
            shift: 0,
        }
    } else {
        let lead = 127 - product.to_u128().leading_zeros();
        let wanted = hidden_pos - lead;
        let budget = (exp - 1).max(0) as u32;
        let k = wanted.min(budget);
        let shifted = product.shl_into(k, 2 * (f + 1));
        Normalized {
            significand: shifted.slice(hidden_pos, f),
            exp: exp - k as i64,
            guard: shifted.slice(f - 1, 0).zero_extend(f + 1),
            shift: -(k as i32),
        }
    }
}

/// The four-way exception table over the final (already clamped) fields:
/// zero exponent selects Zero or Denormal by the fraction, all-ones
/// exponent selects Infinity or NaN; anything else is a normal number.
pub fn classify_flags<S: Word>(
    format: &FpFormat,
    biased_exp: u32,
    stored_frac: &UBits<S>,
) -> FpFlags {
    debug_assert!(biased_exp <= format.exp_max());
    let max = format.exp_max();
    let frac_zero = stored_frac.is_zero();
    FpFlags {
        zero: biased_exp == 0 && frac_zero,
        infinity: biased_exp == max && frac_zero,
        nan: biased_exp == max && !frac_zero,
        denormal: biased_exp == 0 && !frac_zero,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OperandClass {
    Zero,
    Finite,
    Infinity,
    Nan,
}

fn classify_operand<S: Word>(format: &FpFormat, u: &UnpackedFloat<S>) -> OperandClass {
    let f = format.frac_width;
    let exp = u.biased_exp.to_u128();
    let frac_zero = u.significand.slice(f - 1, 0).is_zero();
    if exp == format.exp_max() as u128 {
        if frac_zero {
            OperandClass::Infinity
        } else {
            OperandClass::Nan
        }
    } else if exp == 0 && frac_zero {
        OperandClass::Zero
    } else {
        OperandClass::Finite
    }
}

/// Step-by-step record of one multiplication, for the trace command.
#[derive(Debug, Clone)]
pub struct MulTrace<S: Word> {
    pub a: UnpackedFloat<S>,
    pub b: UnpackedFloat<S>,
    pub sign: bool,
    /// Which shortcut fired for special operands, if any.
    pub shortcut: Option<&'static str>,
    /// `e1 + e2 - bias` over the effective exponents.
    pub exp_intermediate: Option<i64>,
    pub tree: Option<TraceNode<S>>,
    pub product: Option<UBits<S>>,
    pub norm: Option<Normalized<S>>,
    /// Extra right shifts taken to reach the subnormal encoding.
    pub denorm_shift: u32,
}

/// Full pipeline with the default leaf width.
pub fn multiply<S: Word>(a: &PackedFloat<S>, b: &PackedFloat<S>) -> FpResult<S> {
    multiply_with(a, b, DEFAULT_LEAF_WIDTH)
}

/// Full pipeline with an explicit Karatsuba leaf width.
pub fn multiply_with<S: Word>(
    a: &PackedFloat<S>,
    b: &PackedFloat<S>,
    threshold: u32,
) -> FpResult<S> {
    run(a, b, threshold, false).0
}

/// [`multiply_with`] plus the full stage-by-stage trace.
pub fn multiply_traced<S: Word>(
    a: &PackedFloat<S>,
    b: &PackedFloat<S>,
    threshold: u32,
) -> (FpResult<S>, MulTrace<S>) {
    let (result, trace) = run(a, b, threshold, true);
    (result, trace.expect("trace requested"))
}

fn encode<S: Word>(
    format: &FpFormat,
    sign: bool,
    biased_exp: u32,
    stored_frac: UBits<S>,
) -> FpResult<S> {
    let flags = classify_flags(format, biased_exp, &stored_frac);
    let packed = pack(
        format,
        sign,
        UBits::from_u128(format.exp_width, biased_exp as u128),
        stored_frac,
    );
    FpResult { packed, flags }
}

fn run<S: Word>(
    a: &PackedFloat<S>,
    b: &PackedFloat<S>,
    threshold: u32,
    want_trace: bool,
) -> (FpResult<S>, Option<MulTrace<S>>) {
    assert_eq!(a.format, b.format, "format mismatch");
    let format = a.format;
    let f = format.frac_width;
    assert!(
        2 * (f + 1) <= S::BITS,
        "a {}-bit fraction needs {} bits of product storage, have {}",
        f,
        2 * (f + 1),
        S::BITS
    );

    let ua = unpack(a);
    let ub = unpack(b);
    let sign = sign_mul(ua.sign, ub.sign);
    let class_a = classify_operand(&format, &ua);
    let class_b = classify_operand(&format, &ub);

    let mut trace = want_trace.then(|| MulTrace {
        a: ua,
        b: ub,
        sign,
        shortcut: None,
        exp_intermediate: None,
        tree: None,
        product: None,
        norm: None,
        denorm_shift: 0,
    });

    use OperandClass::*;
    let shortcut = match (class_a, class_b) {
        (Nan, _) | (_, Nan) | (Infinity, Zero) | (Zero, Infinity) => {
            // Canonical quiet NaN: all-ones exponent, only the top
            // fraction bit set.
            Some((
                "nan",
                encode(
                    &format,
                    sign,
                    format.exp_max(),
                    UBits::from_u128(f, 1u128 << (f - 1)),
                ),
            ))
        }
        (Infinity, _) | (_, Infinity) => {
            Some(("infinity", encode(&format, sign, format.exp_max(), UBits::zero(f))))
        }
        (Zero, _) | (_, Zero) => Some(("zero", encode(&format, sign, 0, UBits::zero(f)))),
        (Finite, Finite) => None,
    };
    if let Some((label, result)) = shortcut {
        if let Some(t) = trace.as_mut() {
            t.shortcut = Some(label);
        }
        return (result, trace);
    }

    // Finite, nonzero operands from here on. Subnormal inputs carry a
    // zero exponent field but sit at the minimum normal scale, so they
    // enter the exponent sum as 1.
    let effective = |u: &UnpackedFloat<S>| {
        if u.biased_exp.is_zero() {
            UBits::from_u128(format.exp_width, 1)
        } else {
            u.biased_exp
        }
    };
    let ie = exponent_add(&effective(&ua), &effective(&ub), format.bias);

    let product = if let Some(t) = trace.as_mut() {
        let mut observer = TreeObserver::new();
        let p = karatsuba_mul_observed(ua.significand, ub.significand, threshold, &mut observer);
        t.tree = Some(observer.into_tree());
        p
    } else {
        mantissa_mul(ua.significand, ub.significand, threshold)
    };

    let norm = normalize(&format, product, ie);
    if let Some(t) = trace.as_mut() {
        t.exp_intermediate = Some(ie);
        t.product = Some(product);
        t.norm = Some(norm);
    }

    let max = format.exp_max();
    let result = if norm.exp >= max as i64 {
        encode(&format, sign, max, UBits::zero(f))
    } else if norm.exp >= 1 && norm.significand.msb() {
        encode(
            &format,
            sign,
            norm.exp as u32,
            norm.significand.slice(f - 1, 0),
        )
    } else if norm.exp == 1 {
        // Left shifts stopped at the subnormal boundary; the significand
        // is already in subnormal position.
        encode(&format, sign, 0, norm.significand.slice(f - 1, 0))
    } else {
        // Gradual underflow: shift right until the value sits on the
        // subnormal grid, dropping guard bits (truncation toward zero).
        let needed = 1 - norm.exp;
        let stored = if needed > (f + 1) as i64 {
            UBits::zero(f)
        } else {
            norm.significand.shr(needed as u32).slice(f - 1, 0)
        };
        if let Some(t) = trace.as_mut() {
            t.denorm_shift = needed.min((f + 2) as i64) as u32;
        }
        encode(&format, sign, 0, stored)
    };
    (result, trace)
}
