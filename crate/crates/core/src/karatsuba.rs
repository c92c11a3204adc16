//! Recursive Karatsuba multiplier terminating in Urdhva leaves.
//!
//! Splitting `x` at `m` bits gives `x = hi * 2^m + lo`, and the product
//! needs only three sub-multiplies thanks to the cross-term identity
//! `hi_a*lo_b + lo_a*hi_b = (hi_a+lo_a)(hi_b+lo_b) - hi_a*hi_b - lo_a*lo_b`.
//!
//! Each node splits at `m = ceil(n/2)` and spawns exactly three
//! half-width multiplies: high halves, low halves, and the truncated
//! m-bit half-sums. The half-sum carry bits never enter a multiplier;
//! they select cheap correction adds when the middle product is
//! reconstructed (`(c*2^m + s)(c'*2^m + s') = s*s' + c*(s'<<m) +
//! c'*(s<<m) + (c&c')<<2m`). That keeps the recursion shape exactly
//! `T(n) = 3T(n/2) + O(n)` at every width, not just powers of two.
//!
//! Every intermediate is non-negative and full width: the subtractions
//! can never borrow and no value ever wraps.

use crate::bits::UBits;
use crate::urdhva::{self, MAX_LEAF_WIDTH};
use crate::word::Word;

/// Leaf width used when no explicit threshold is given.
pub const DEFAULT_LEAF_WIDTH: u32 = 8;

/// An operand split into `hi * 2^split_point + lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPair<S: Word> {
    pub hi: UBits<S>,
    pub lo: UBits<S>,
    /// Number of bits in `lo`.
    pub split_point: u32,
}

/// Splits `x` so that `lo` keeps the low `m` bits and `hi` the rest.
pub fn split<S: Word>(x: UBits<S>, m: u32) -> SplitPair<S> {
    let n = x.width();
    assert!(m > 0 && m < n, "split point {m} out of range for width {n}");
    SplitPair {
        hi: x.slice(n - 1, m),
        lo: x.slice(m - 1, 0),
        split_point: m,
    }
}

/// Recursion event stream, in evaluation order: `Enter` opens a node,
/// then either `Leaf` closes it immediately or the three children's
/// events follow and `Combine` closes it.
pub enum KaratsubaEvent<'a, S: Word> {
    Enter {
        a: &'a UBits<S>,
        b: &'a UBits<S>,
    },
    Leaf {
        a: &'a UBits<S>,
        b: &'a UBits<S>,
        product: &'a UBits<S>,
    },
    Combine {
        split_point: u32,
        a: &'a UBits<S>,
        b: &'a UBits<S>,
        /// Product of the high halves.
        high: &'a UBits<S>,
        /// Product of the low halves.
        low: &'a UBits<S>,
        /// Full middle product `(hi_a + lo_a) * (hi_b + lo_b)`.
        mid: &'a UBits<S>,
        /// `mid - high - low`, the cross term.
        cross: &'a UBits<S>,
        product: &'a UBits<S>,
    },
}

/// Receives recursion events; used for tracing, instrumentation, and
/// structural tests. The no-op observer is `()`.
pub trait KaratsubaObserver<S: Word> {
    fn observe(&mut self, event: KaratsubaEvent<'_, S>);
}

impl<S: Word> KaratsubaObserver<S> for () {
    #[inline]
    fn observe(&mut self, _: KaratsubaEvent<'_, S>) {}
}

/// Multiplies two equal-width operands exactly, returning a product of
/// twice the width. Widths at or below `threshold` go straight to the
/// Urdhva leaf multiplier.
pub fn karatsuba_mul<S: Word>(a: UBits<S>, b: UBits<S>, threshold: u32) -> UBits<S> {
    karatsuba_mul_observed(a, b, threshold, &mut ())
}

/// [`karatsuba_mul`] with an observer attached to the recursion.
pub fn karatsuba_mul_observed<S: Word, O: KaratsubaObserver<S>>(
    a: UBits<S>,
    b: UBits<S>,
    threshold: u32,
    observer: &mut O,
) -> UBits<S> {
    assert_eq!(
        a.width(),
        b.width(),
        "width mismatch: {} vs {}",
        a.width(),
        b.width()
    );
    assert!(
        (1..=MAX_LEAF_WIDTH).contains(&threshold),
        "leaf threshold must be between 1 and {MAX_LEAF_WIDTH}, got {threshold}"
    );
    assert!(
        2 * a.width() <= S::BITS,
        "a {}-bit product does not fit {}-bit storage",
        2 * a.width(),
        S::BITS
    );
    recurse(a, b, threshold, observer)
}

fn add_exact<S: Word>(a: UBits<S>, b: UBits<S>) -> UBits<S> {
    let (sum, carry) = a.add_ripple(b);
    debug_assert!(!carry, "intermediate overflowed its width");
    sum
}

fn sub_exact<S: Word>(a: UBits<S>, b: UBits<S>) -> UBits<S> {
    let (diff, borrow) = a.sub_borrow(b);
    debug_assert!(!borrow, "intermediate went negative");
    diff
}

fn recurse<S: Word, O: KaratsubaObserver<S>>(
    a: UBits<S>,
    b: UBits<S>,
    threshold: u32,
    observer: &mut O,
) -> UBits<S> {
    let n = a.width();
    observer.observe(KaratsubaEvent::Enter { a: &a, b: &b });
    if n <= threshold {
        let product = urdhva::urdhva_mul(a, b);
        observer.observe(KaratsubaEvent::Leaf {
            a: &a,
            b: &b,
            product: &product,
        });
        return product;
    }

    let m = n.div_ceil(2);
    let sa = split(a, m);
    let sb = split(b, m);

    let high = recurse(sa.hi, sb.hi, threshold, observer); // 2*(n - m) bits
    let low = recurse(sa.lo, sb.lo, threshold, observer); // 2*m bits

    // Truncated m-bit half-sums; the carries are applied after the
    // multiply so the middle child stays at width m.
    let (half_a, carry_a) = sa.hi.zero_extend(m).add_ripple(sa.lo);
    let (half_b, carry_b) = sb.hi.zero_extend(m).add_ripple(sb.lo);
    let half_product = recurse(half_a, half_b, threshold, observer); // 2*m bits

    let mid_width = 2 * m + 2;
    let mut mid = half_product.zero_extend(mid_width);
    if carry_a {
        mid = add_exact(mid, half_b.shl_into(m, mid_width));
    }
    if carry_b {
        mid = add_exact(mid, half_a.shl_into(m, mid_width));
    }
    if carry_a && carry_b {
        mid = add_exact(mid, UBits::from_bit(true).shl_into(2 * m, mid_width));
    }

    let cross = sub_exact(
        sub_exact(mid, high.zero_extend(mid_width)),
        low.zero_extend(mid_width),
    );

    let out_width = 2 * n;
    let product = add_exact(
        add_exact(high.shl_into(2 * m, out_width), cross.shl_into(m, out_width)),
        low.zero_extend(out_width),
    );

    observer.observe(KaratsubaEvent::Combine {
        split_point: m,
        a: &a,
        b: &b,
        high: &high,
        low: &low,
        mid: &mid,
        cross: &cross,
        product: &product,
    });
    product
}

/// Leaf widths the recursion visits, in evaluation order (high halves,
/// low halves, half-sums). Its length is the number of leaf multiplies.
pub fn leaf_schedule(n: u32, threshold: u32) -> Vec<u32> {
    assert!(n >= 1, "width must be at least 1");
    assert!(
        (1..=MAX_LEAF_WIDTH).contains(&threshold),
        "leaf threshold must be between 1 and {MAX_LEAF_WIDTH}, got {threshold}"
    );
    let mut leaves = Vec::new();
    fn walk(n: u32, threshold: u32, out: &mut Vec<u32>) {
        if n <= threshold {
            out.push(n);
        } else {
            let m = n.div_ceil(2);
            walk(n - m, threshold, out);
            walk(m, threshold, out);
            walk(m, threshold, out);
        }
    }
    walk(n, threshold, &mut leaves);
    leaves
}

/// Recursion tree capture, one node per multiply.
#[derive(Debug, Clone)]
pub struct TraceNode<S: Word> {
    pub a: UBits<S>,
    pub b: UBits<S>,
    pub product: UBits<S>,
    pub detail: NodeDetail<S>,
}

#[derive(Debug, Clone)]
pub enum NodeDetail<S: Word> {
    Leaf,
    Split {
        split_point: u32,
        high: UBits<S>,
        low: UBits<S>,
        mid: UBits<S>,
        cross: UBits<S>,
        /// Exactly three children, in evaluation order.
        children: Vec<TraceNode<S>>,
    },
}

/// Observer that reconstructs the recursion tree from the event stream.
#[derive(Default)]
pub struct TreeObserver<S: Word> {
    stack: Vec<Vec<TraceNode<S>>>,
    root: Option<TraceNode<S>>,
}

impl<S: Word> TreeObserver<S> {
    pub fn new() -> Self {
        TreeObserver {
            stack: Vec::new(),
            root: None,
        }
    }

    fn attach(&mut self, node: TraceNode<S>) {
        match self.stack.last_mut() {
            Some(siblings) => siblings.push(node),
            None => self.root = Some(node),
        }
    }

    /// The completed tree; panics if no multiply was observed.
    pub fn into_tree(self) -> TraceNode<S> {
        assert!(self.stack.is_empty(), "recursion still open");
        self.root.expect("no multiply observed")
    }
}

impl<S: Word> KaratsubaObserver<S> for TreeObserver<S> {
    fn observe(&mut self, event: KaratsubaEvent<'_, S>) {
        match event {
            KaratsubaEvent::Enter { .. } => self.stack.push(Vec::new()),
            KaratsubaEvent::Leaf { a, b, product } => {
                let children = self.stack.pop().expect("leaf without enter");
                debug_assert!(children.is_empty());
                self.attach(TraceNode {
                    a: *a,
                    b: *b,
                    product: *product,
                    detail: NodeDetail::Leaf,
                });
            }
            KaratsubaEvent::Combine {
                split_point,
                a,
                b,
                high,
                low,
                mid,
                cross,
                product,
            } => {
                let children = self.stack.pop().expect("combine without enter");
                self.attach(TraceNode {
                    a: *a,
                    b: *b,
                    product: *product,
                    detail: NodeDetail::Split {
                        split_point,
                        high: *high,
                        low: *low,
                        mid: *mid,
                        cross: *cross,
                        children,
                    },
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    use super::*;

    type B = UBits<u128>;

    fn rand_pair(rng: &mut ChaCha12Rng, n: u32) -> (B, B) {
        let mask = if n == 128 { u128::MAX } else { (1 << n) - 1 };
        (
            B::new(n, rng.gen::<u128>() & mask),
            B::new(n, rng.gen::<u128>() & mask),
        )
    }

    /// Counts leaves and checks that every internal node spawns exactly
    /// three sub-multiplies.
    #[derive(Default)]
    struct Shape {
        leaf_widths: Vec<u32>,
        open: Vec<u32>,
        children_seen: Vec<u32>,
    }

    impl<S: Word> KaratsubaObserver<S> for Shape {
        fn observe(&mut self, event: KaratsubaEvent<'_, S>) {
            match event {
                KaratsubaEvent::Enter { .. } => {
                    if let Some(count) = self.open.last_mut() {
                        *count += 1;
                    }
                    self.open.push(0);
                }
                KaratsubaEvent::Leaf { a, .. } => {
                    self.leaf_widths.push(a.width());
                    let count = self.open.pop().unwrap();
                    self.children_seen.push(count);
                }
                KaratsubaEvent::Combine { .. } => {
                    let count = self.open.pop().unwrap();
                    self.children_seen.push(count);
                }
            }
        }
    }

    #[test]
    fn split_examples() {
        let s = split(B::new(16, 0xABCD), 8);
        assert_eq!((s.hi.to_u128(), s.lo.to_u128()), (0xAB, 0xCD));
        assert_eq!((s.hi.width(), s.lo.width()), (8, 8));
        let s = split(B::new(3, 0b101), 1);
        assert_eq!((s.hi.to_u128(), s.lo.to_u128()), (0b10, 0b1));
    }

    #[test]
    fn annihilator_and_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for n in [9, 16, 24, 53] {
            let (x, _) = rand_pair(&mut rng, n);
            let zero = B::zero(n);
            let one = B::new(n, 1);
            assert_eq!(karatsuba_mul(x, zero, 8).to_u128(), 0);
            assert_eq!(karatsuba_mul(x, one, 8).to_u128(), x.to_u128());
            assert_eq!(karatsuba_mul(x, one, 8).width(), 2 * n);
        }
    }

    #[test]
    fn pinned_products() {
        assert_eq!(
            karatsuba_mul(B::ones(16), B::ones(16), 8).to_u128(),
            0xFFFE_0001
        );
        assert_eq!(
            karatsuba_mul(B::ones(24), B::ones(24), 8).to_u128(),
            0xFFFF_FE00_0001
        );
    }

    #[test]
    fn matches_big_integer_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for n in (9..=16).chain([24, 32, 53, 64]) {
            for x in [0u128, 1, (1 << n) - 1, 1 << (n - 1)] {
                let xv = B::new(n, x);
                for y in [0u128, 1, (1 << n) - 1, 1 << (n - 1)] {
                    let yv = B::new(n, y);
                    assert_eq!(karatsuba_mul(xv, yv, 8).to_u128(), x * y);
                }
            }
            for _ in 0..2_000 {
                let (a, b) = rand_pair(&mut rng, n);
                assert_eq!(
                    karatsuba_mul(a, b, 8).to_u128(),
                    a.to_u128() * b.to_u128(),
                    "width {n}: {a:?} * {b:?}"
                );
            }
        }
    }

    #[test]
    fn every_internal_node_has_three_children() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for n in 9..=64 {
            let (a, b) = rand_pair(&mut rng, n);
            let mut shape = Shape::default();
            karatsuba_mul_observed(a, b, 8, &mut shape);
            for (i, count) in shape.children_seen.iter().enumerate() {
                assert!(
                    *count == 0 || *count == 3,
                    "node {i} of width-{n} run spawned {count} children"
                );
            }
        }
    }

    #[test]
    fn observed_leaves_match_leaf_schedule() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for n in 8..=64 {
            for threshold in [4, 8] {
                let (a, b) = rand_pair(&mut rng, n);
                let mut shape = Shape::default();
                karatsuba_mul_observed(a, b, threshold, &mut shape);
                assert_eq!(shape.leaf_widths, leaf_schedule(n, threshold));
            }
        }
    }

    #[test]
    fn leaf_schedule_examples() {
        assert_eq!(leaf_schedule(8, 8), vec![8]);
        assert_eq!(leaf_schedule(16, 8), vec![8, 8, 8]);
        assert_eq!(leaf_schedule(32, 8).len(), 9);
        assert_eq!(leaf_schedule(13, 8), vec![6, 7, 7]);
    }

    /// The cross term recovered by the subtractions equals the directly
    /// computed `hi_a*lo_b + lo_a*hi_b` at every node, and the middle
    /// product always dominates `high + low`.
    #[test]
    fn middle_term_identity_at_every_node() {
        struct CheckCross;
        impl KaratsubaObserver<u128> for CheckCross {
            fn observe(&mut self, event: KaratsubaEvent<'_, u128>) {
                if let KaratsubaEvent::Combine {
                    split_point,
                    a,
                    b,
                    high,
                    low,
                    mid,
                    cross,
                    ..
                } = event
                {
                    let sa = split(*a, split_point);
                    let sb = split(*b, split_point);
                    let want = sa.hi.to_u128() * sb.lo.to_u128()
                        + sa.lo.to_u128() * sb.hi.to_u128();
                    assert_eq!(cross.to_u128(), want);
                    assert!(mid.to_u128() >= high.to_u128() + low.to_u128());
                }
            }
        }
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for n in [9, 12, 16, 24, 32, 53, 64] {
            for _ in 0..200 {
                let (a, b) = rand_pair(&mut rng, n);
                karatsuba_mul_observed(a, b, 8, &mut CheckCross);
            }
        }
    }

    #[test]
    fn tree_observer_reconstructs_recursion() {
        let a = B::new(16, 0x1234);
        let b = B::new(16, 0xBEEF);
        let mut tree = TreeObserver::new();
        let product = karatsuba_mul_observed(a, b, 8, &mut tree);
        let root = tree.into_tree();
        assert_eq!(root.product, product);
        match root.detail {
            NodeDetail::Split {
                split_point,
                children,
                ..
            } => {
                assert_eq!(split_point, 8);
                assert_eq!(children.len(), 3);
                assert!(children
                    .iter()
                    .all(|c| matches!(c.detail, NodeDetail::Leaf)));
            }
            NodeDetail::Leaf => panic!("16-bit multiply must split"),
        }
    }

    #[test]
    #[should_panic(expected = "width mismatch")]
    fn rejects_width_mismatch() {
        let _ = karatsuba_mul(B::new(16, 1), B::new(12, 1), 8);
    }

    #[test]
    #[should_panic(expected = "leaf threshold")]
    fn rejects_oversized_threshold() {
        let _ = karatsuba_mul(B::new(16, 1), B::new(16, 1), 9);
    }

    #[test]
    #[should_panic(expected = "split point")]
    fn split_rejects_out_of_range() {
        let _ = split(B::new(8, 1), 8);
    }

    proptest! {
        #[test]
        fn recombination_identity(n in 2..=96u32, m in 1..=95u32, raw in any::<u128>()) {
            prop_assume!(m < n);
            let mask = if n == 128 { u128::MAX } else { (1 << n) - 1 };
            let x = B::new(n, raw & mask);
            let s = split(x, m);
            prop_assert_eq!((s.hi.to_u128() << m) + s.lo.to_u128(), x.to_u128());
        }

        #[test]
        fn threshold_only_changes_structure(
            n in 9..=64u32,
            a in any::<u128>(),
            b in any::<u128>(),
        ) {
            let mask = (1u128 << n) - 1;
            let a = B::new(n, a & mask);
            let b = B::new(n, b & mask);
            let reference = karatsuba_mul(a, b, 8);
            for threshold in [2, 4] {
                prop_assert_eq!(karatsuba_mul(a, b, threshold), reference);
            }
        }

        #[test]
        fn commutative(n in 9..=64u32, a in any::<u128>(), b in any::<u128>()) {
            let mask = (1u128 << n) - 1;
            let a = B::new(n, a & mask);
            let b = B::new(n, b & mask);
            prop_assert_eq!(karatsuba_mul(a, b, 8), karatsuba_mul(b, a, 8));
        }
    }
}
