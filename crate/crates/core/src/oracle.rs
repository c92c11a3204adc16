//! Independent reference multiplier used to check the pipeline.
//!
//! Works straight on integer bit patterns: decode the fields with plain
//! shifts, take the exact significand product as a big integer, and
//! re-encode with truncation toward zero and the same overflow,
//! gradual-underflow, and special-operand rules as the pipeline. It
//! shares no arithmetic with the bit-vector, leaf-multiplier, or
//! recursion code it is used to verify.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::fp::{FpFlags, FpFormat};

/// The four-way exception table over final, clamped fields.
fn flags_for(max_exp: u64, exp: u64, frac: u128) -> FpFlags {
    FpFlags {
        zero: exp == 0 && frac == 0,
        infinity: exp == max_exp && frac == 0,
        nan: exp == max_exp && frac != 0,
        denormal: exp == 0 && frac != 0,
    }
}

/// Multiplies two bit patterns of the given format exactly and returns
/// the truncated result pattern with its classification.
pub fn reference_multiply(format: &FpFormat, a: u128, b: u128) -> (u128, FpFlags) {
    let e = format.exp_width;
    let f = format.frac_width;
    let total = format.total_width();
    assert!(total <= 128, "pattern wider than 128 bits");
    for x in [a, b] {
        assert!(
            total == 128 || x < (1 << total),
            "{x:#x} is not a {total}-bit pattern"
        );
    }

    let exp_mask = ((1u128 << e) - 1) as u64;
    let frac_mask = if f == 128 { u128::MAX } else { (1 << f) - 1 };
    let field = |x: u128| {
        let sign = (x >> (total - 1)) & 1 == 1;
        let exp = ((x >> f) as u64) & exp_mask;
        let frac = x & frac_mask;
        (sign, exp, frac)
    };
    let (sign_a, exp_a, frac_a) = field(a);
    let (sign_b, exp_b, frac_b) = field(b);
    let sign = sign_a ^ sign_b;
    let max_exp = exp_mask;

    let encode = |exp: u64, frac: u128| {
        let bits = ((sign as u128) << (total - 1)) | ((exp as u128) << f) | frac;
        (bits, flags_for(max_exp, exp, frac))
    };

    let is_nan = |exp: u64, frac: u128| exp == max_exp && frac != 0;
    let is_inf = |exp: u64, frac: u128| exp == max_exp && frac == 0;
    let is_zero = |exp: u64, frac: u128| exp == 0 && frac == 0;

    if is_nan(exp_a, frac_a)
        || is_nan(exp_b, frac_b)
        || (is_inf(exp_a, frac_a) && is_zero(exp_b, frac_b))
        || (is_inf(exp_b, frac_b) && is_zero(exp_a, frac_a))
    {
        return encode(max_exp, 1 << (f - 1));
    }
    if is_inf(exp_a, frac_a) || is_inf(exp_b, frac_b) {
        return encode(max_exp, 0);
    }
    if is_zero(exp_a, frac_a) || is_zero(exp_b, frac_b) {
        return encode(0, 0);
    }

    // Exact value of an operand: significand * 2^(exp_eff - bias - f),
    // where subnormals (exp field 0) have no hidden bit and sit at the
    // minimum normal scale exp_eff = 1.
    let significand = |exp: u64, frac: u128| {
        if exp == 0 {
            BigUint::from(frac)
        } else {
            BigUint::from(frac | (1u128 << f))
        }
    };
    let exp_eff = |exp: u64| if exp == 0 { 1i64 } else { exp as i64 };

    let ie = exp_eff(exp_a) + exp_eff(exp_b) - format.bias as i64;
    let product = significand(exp_a, frac_a) * significand(exp_b, frac_b);
    debug_assert!(!product.is_zero());
    let lead = product.bits() as i64 - 1;
    let result_exp = ie + lead - 2 * f as i64;

    if result_exp >= max_exp as i64 {
        encode(max_exp, 0)
    } else if result_exp >= 1 {
        // Normal: keep the top f+1 bits below the leading one, drop the
        // rest (round toward zero).
        let top = if lead >= f as i64 {
            &product >> (lead - f as i64) as u64
        } else {
            &product << (f as i64 - lead) as u64
        };
        let frac = top.to_u128().expect("f + 1 bits") & frac_mask;
        encode(result_exp as u64, frac)
    } else {
        // Subnormal grid: value / 2^(1 - bias - f), truncated.
        let shift = (f as i64 + 1 - ie) as u64;
        let frac = if shift >= product.bits() {
            0
        } else {
            (&product >> shift).to_u128().expect("fits the fraction")
        };
        encode(0, frac)
    }
}
