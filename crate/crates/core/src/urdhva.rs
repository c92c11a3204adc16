//! Urdhva-Tiryagbhyam ("vertically and crosswise") leaf multiplier.
//!
//! Column `k` of the product sums every 1-bit partial product `a_i * b_j`
//! with `i + j == k`. Two routes compute the same product:
//!
//! * a behavioral route — [`partial_terms_4x4`] produces the column sums
//!   `t_0..t_6` and [`assemble_product_4x4`] adds the three aligned rows
//!   they decompose into;
//! * a structural route — a cascade of column adders where each adder
//!   takes its column's partial products plus the non-LSB remainder of
//!   the previous adder, emits one product bit, and forwards the rest.
//!   Adders summing three or more operands are built from carry-save
//!   reduction followed by a single two-operand add.
//!
//! [`urdhva_4x4_cascade`] is the fixed six-adder 4x4 unit;
//! [`urdhva_mul`] generalizes the cascade to any width up to
//! [`MAX_LEAF_WIDTH`]. Wider operands belong to [`crate::karatsuba`],
//! which only ever calls leaves of at most this width.

use crate::bits::{add_carry_save, UBits};
use crate::word::Word;

/// Widest operand the column cascade accepts. The ripple-style carry
/// chain grows linearly with the width, so wider multiplies go through
/// the Karatsuba recursion instead.
pub const MAX_LEAF_WIDTH: u32 = 8;

/// Column sums of the 4x4 scheme: `terms[k]` holds
/// `t_k = Σ_{i+j=k} a_i * b_j`, with widths 1, 2, 2, 3, 2, 2, 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialTerms4<S: Word> {
    pub terms: [UBits<S>; 7],
}

/// Per-column record of a traced cascade multiply.
#[derive(Debug, Clone)]
pub struct UrdhvaTrace<S: Word> {
    /// Column sums `t_0..t_{2n-2}`.
    pub terms: Vec<UBits<S>>,
    /// Output of the column adder for each column `1..=2n-2`, before the
    /// LSB is peeled off as a product bit.
    pub adder_sums: Vec<UBits<S>>,
}

fn bits_for(v: u32) -> u32 {
    (u32::BITS - v.leading_zeros()).max(1)
}

/// Number of `(i, j)` pairs with `i + j == k` for `n`-bit operands.
fn column_count(n: u32, k: u32) -> u32 {
    let i_max = k.min(n - 1);
    let i_min = (k + 1).saturating_sub(n);
    i_max - i_min + 1
}

/// Column sums `t_k = Σ_{i+j=k} a_i * b_j` for `k = 0..=2n-2`, each
/// sized to the widest sum its column can produce.
pub fn column_terms<S: Word>(a: UBits<S>, b: UBits<S>) -> Vec<UBits<S>> {
    let n = a.width();
    assert_eq!(n, b.width(), "width mismatch: {} vs {}", n, b.width());
    assert!(
        (1..=MAX_LEAF_WIDTH).contains(&n),
        "column scheme handles 1..={MAX_LEAF_WIDTH} bit operands, got {n}"
    );
    (0..=2 * n - 2)
        .map(|k| {
            let i_max = k.min(n - 1);
            let i_min = (k + 1).saturating_sub(n);
            let mut count = 0u32;
            for i in i_min..=i_max {
                if a.bit(i) && b.bit(k - i) {
                    count += 1;
                }
            }
            UBits::from_u128(bits_for(column_count(n, k)), count as u128)
        })
        .collect()
}

/// The seven column sums of a 4x4 multiply.
pub fn partial_terms_4x4<S: Word>(a: UBits<S>, b: UBits<S>) -> PartialTerms4<S> {
    assert_eq!(a.width(), 4, "operand width must be exactly 4, got {}", a.width());
    assert_eq!(b.width(), 4, "operand width must be exactly 4, got {}", b.width());
    let terms = column_terms(a, b);
    PartialTerms4 {
        terms: terms.try_into().expect("4x4 scheme yields 7 columns"),
    }
}

/// Sums the three aligned rows the `t`-terms decompose into:
/// bit 0 of every term at position `k`, bit 1 at `k + 1`, and the third
/// bit of `t_3` at position 5. Equals `Σ t_k * 2^k`.
pub fn assemble_product_4x4<S: Word>(t: &PartialTerms4<S>) -> UBits<S> {
    let mut s1 = UBits::zero(8);
    let mut s2 = UBits::zero(8);
    for (k, term) in t.terms.iter().enumerate() {
        let k = k as u32;
        s1 = s1 | UBits::from_bit(term.bit(0)).shl_into(k, 8);
        if term.width() > 1 {
            s2 = s2 | UBits::from_bit(term.bit(1)).shl_into(k + 1, 8);
        }
    }
    let s3 = UBits::from_bit(t.terms[3].bit(2)).shl_into(5, 8);

    let (partial, carry) = s1.add_ripple(s2);
    debug_assert!(!carry);
    let (product, carry) = partial.add_ripple(s3);
    debug_assert!(!carry);
    product
}

/// Resolves a multi-operand column adder: carry-save reduction down to
/// two vectors, then one two-operand add.
fn csa_resolve<S: Word>(operands: &[UBits<S>]) -> UBits<S> {
    let (sum, carry) = add_carry_save(operands);
    let width = sum.width();
    let (resolved, overflow) = sum.add_ripple(carry.shl_into(1, width));
    debug_assert!(!overflow, "carry-save working width must cover the column sum");
    resolved
}

/// Adds one column's operands (previous remainder plus this column's
/// partial products), all pre-extended to a width that covers the
/// worst-case sum.
fn column_adder<S: Word>(operands: &[UBits<S>]) -> UBits<S> {
    if operands.len() >= 3 {
        csa_resolve(operands)
    } else {
        let (sum, carry) = operands[0].add_ripple(operands[1]);
        debug_assert!(!carry, "column width must cover the worst-case sum");
        sum
    }
}

/// Fixed 4x4 cascade: six column adders in a chain.
///
/// `p_0` is the single column-0 partial product. Adder `k` (for columns
/// 1 through 6) sums the column's partial products plus the non-LSB
/// remainder of adder `k - 1`; its LSB is product bit `p_k`. The final
/// remainder is `p_7`. Adders 2 to 5 take more than two operands and use
/// carry-save reduction internally.
pub fn urdhva_4x4_cascade<S: Word>(a: UBits<S>, b: UBits<S>) -> UBits<S> {
    assert_eq!(a.width(), 4, "operand width must be exactly 4, got {}", a.width());
    assert_eq!(b.width(), 4, "operand width must be exactly 4, got {}", b.width());
    let pp = |i: u32, j: u32| UBits::<S>::from_bit(a.bit(i) && b.bit(j));

    let p0 = pp(0, 0);

    // Adder 1: a1b0 + a0b1, two 1-bit operands.
    let (s, c) = pp(1, 0).add_ripple(pp(0, 1));
    let sum1 = UBits::from_bit(c).concat(s);
    let r1 = sum1.slice(1, 1);

    // Adder 2: remainder + a2b0 + a1b1 + a0b2, worst case 4.
    let sum2 = column_adder(&[
        r1.zero_extend(3),
        pp(2, 0).zero_extend(3),
        pp(1, 1).zero_extend(3),
        pp(0, 2).zero_extend(3),
    ]);
    let r2 = sum2.shr(1).slice(1, 0);

    // Adder 3: remainder + a3b0 + a2b1 + a1b2 + a0b3, worst case 6.
    let sum3 = column_adder(&[
        r2.zero_extend(3),
        pp(3, 0).zero_extend(3),
        pp(2, 1).zero_extend(3),
        pp(1, 2).zero_extend(3),
        pp(0, 3).zero_extend(3),
    ]);
    let r3 = sum3.shr(1).slice(1, 0);

    // Adder 4: remainder + a3b1 + a2b2 + a1b3, worst case 6.
    let sum4 = column_adder(&[
        r3.zero_extend(3),
        pp(3, 1).zero_extend(3),
        pp(2, 2).zero_extend(3),
        pp(1, 3).zero_extend(3),
    ]);
    let r4 = sum4.shr(1).slice(1, 0);

    // Adder 5: remainder + a3b2 + a2b3, worst case 5.
    let sum5 = column_adder(&[
        r4.zero_extend(3),
        pp(3, 2).zero_extend(3),
        pp(2, 3).zero_extend(3),
    ]);
    let r5 = sum5.shr(1).slice(1, 0);

    // Adder 6: remainder + a3b3, worst case 3; its carry bit is p7.
    let (sum6, carry) = r5.add_ripple(pp(3, 3).zero_extend(2));
    debug_assert!(!carry);

    let mut product = UBits::zero(8);
    for (k, bit) in [
        p0.bit(0),
        sum1.bit(0),
        sum2.bit(0),
        sum3.bit(0),
        sum4.bit(0),
        sum5.bit(0),
        sum6.bit(0),
        sum6.bit(1),
    ]
    .into_iter()
    .enumerate()
    {
        product = product | UBits::from_bit(bit).shl_into(k as u32, 8);
    }
    product
}

fn cascade<S: Word>(
    a: UBits<S>,
    b: UBits<S>,
    mut trace: Option<&mut UrdhvaTrace<S>>,
) -> UBits<S> {
    let n = a.width();
    assert_eq!(n, b.width(), "width mismatch: {} vs {}", n, b.width());
    assert!(
        (1..=MAX_LEAF_WIDTH).contains(&n),
        "operands wider than {MAX_LEAF_WIDTH} bits must go through the karatsuba recursion, got {n}"
    );

    let out_width = 2 * n;
    let mut product = UBits::zero(out_width);
    product = product | UBits::from_bit(a.bit(0) && b.bit(0)).shl_into(0, out_width);
    if n == 1 {
        return product;
    }

    let mut remainder = UBits::zero(1);
    let mut remainder_max = 0u32;
    for k in 1..=2 * n - 2 {
        let count = column_count(n, k);
        let col_max = remainder_max + count;
        let col_width = bits_for(col_max);

        let mut operands = Vec::with_capacity(1 + count as usize);
        operands.push(remainder.zero_extend(col_width));
        let i_max = k.min(n - 1);
        let i_min = (k + 1).saturating_sub(n);
        for i in i_min..=i_max {
            operands.push(UBits::from_bit(a.bit(i) && b.bit(k - i)).zero_extend(col_width));
        }

        let sum = column_adder(&operands);
        if let Some(t) = trace.as_deref_mut() {
            t.adder_sums.push(sum);
        }
        product = product | UBits::from_bit(sum.bit(0)).shl_into(k, out_width);
        remainder_max = col_max >> 1;
        remainder = sum.shr(1).slice(bits_for(remainder_max) - 1, 0);
    }
    debug_assert!(remainder_max <= 1, "final remainder is the top product bit");
    product | UBits::from_bit(remainder.bit(0)).shl_into(2 * n - 1, out_width)
}

/// Column-cascade multiply for operands of 1 to [`MAX_LEAF_WIDTH`] bits.
/// The result is exact and twice the operand width.
pub fn urdhva_mul<S: Word>(a: UBits<S>, b: UBits<S>) -> UBits<S> {
    cascade(a, b, None)
}

/// Same as [`urdhva_mul`] but records the column sums and adder outputs.
pub fn urdhva_mul_traced<S: Word>(a: UBits<S>, b: UBits<S>) -> (UBits<S>, UrdhvaTrace<S>) {
    let mut trace = UrdhvaTrace {
        terms: column_terms(a, b),
        adder_sums: Vec::new(),
    };
    let product = cascade(a, b, Some(&mut trace));
    (product, trace)
}
