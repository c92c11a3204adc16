//! Operation-count model of the multiplier structure.
//!
//! Counts are tool-independent structure only: leaf multiplies, word-level
//! add/subtract operations, and recursion depth. Physical delay, area, and
//! clock figures depend on the synthesis target and are out of scope.

use std::collections::BTreeMap;
use std::fmt;

use crate::urdhva::MAX_LEAF_WIDTH;

/// Word-level add/subtract operations per internal recursion node: two
/// half-sum adds, three carry-correction adds reconstructing the middle
/// product, two subtractions recovering the cross term, and two adds
/// assembling the three partial products.
pub const NODE_WORD_ADDS: u64 = 9;

/// Structure counts for one `(width, threshold)` configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub width: u32,
    pub threshold: u32,
    pub leaf_multiplies: u64,
    pub leaf_width_histogram: BTreeMap<u32, u64>,
    pub word_adds: u64,
    pub recursion_depth: u32,
}

impl CostReport {
    pub fn csv_header() -> &'static str {
        "width,threshold,leaf_multiplies,word_adds,recursion_depth"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.width, self.threshold, self.leaf_multiplies, self.word_adds, self.recursion_depth
        )
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width: {}", self.width)?;
        writeln!(f, "threshold: {}", self.threshold)?;
        writeln!(f, "leaf_multiplies: {}", self.leaf_multiplies)?;
        let histogram = self
            .leaf_width_histogram
            .iter()
            .map(|(w, n)| format!("{w}x{n}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(f, "leaf_width_histogram: {histogram}")?;
        writeln!(f, "word_adds: {}", self.word_adds)?;
        write!(f, "recursion_depth: {}", self.recursion_depth)
    }
}

/// Cascade adders in an `n`-bit column-scheme leaf: one per product
/// column above the LSB, so `2n - 2` (6 for 4-bit, 14 for 8-bit).
pub fn urdhva_adder_count(n: u32) -> u64 {
    assert!(
        (2..=MAX_LEAF_WIDTH).contains(&n),
        "adder count is defined for leaf widths 2..={MAX_LEAF_WIDTH}, got {n}"
    );
    (2 * n - 2) as u64
}

fn leaf_word_adds(n: u32) -> u64 {
    if n == 1 {
        0
    } else {
        urdhva_adder_count(n)
    }
}

/// Walks the recursion shape of a `width`-bit multiply without
/// multiplying, tallying leaves, word-level adds, and depth.
pub fn analyze(width: u32, threshold: u32) -> CostReport {
    assert!(width >= 1, "width must be at least 1");
    assert!(
        (1..=MAX_LEAF_WIDTH).contains(&threshold),
        "leaf threshold must be between 1 and {MAX_LEAF_WIDTH}, got {threshold}"
    );
    let mut report = CostReport {
        width,
        threshold,
        leaf_multiplies: 0,
        leaf_width_histogram: BTreeMap::new(),
        word_adds: 0,
        recursion_depth: 0,
    };
    report.recursion_depth = walk(width, threshold, &mut report);
    report
}

fn walk(n: u32, threshold: u32, report: &mut CostReport) -> u32 {
    if n <= threshold {
        report.leaf_multiplies += 1;
        *report.leaf_width_histogram.entry(n).or_insert(0) += 1;
        report.word_adds += leaf_word_adds(n);
        return 0;
    }
    report.word_adds += NODE_WORD_ADDS;
    let m = n.div_ceil(2);
    let high = walk(n - m, threshold, report);
    let low = walk(m, threshold, report);
    let mid = walk(m, threshold, report);
    1 + high.max(low).max(mid)
}

/// Karatsuba versus schoolbook block decomposition at the same leaf size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchoolbookComparison {
    pub width: u32,
    pub threshold: u32,
    pub karatsuba_leaves: u64,
    /// `ceil(width / threshold)^2` block products.
    pub schoolbook_leaves: u64,
    pub karatsuba_word_adds: u64,
    /// Leaf-internal adders plus the adds that sum the block products.
    pub schoolbook_word_adds: u64,
    /// `karatsuba_word_adds - schoolbook_word_adds`: the adds spent to
    /// save `schoolbook_leaves - karatsuba_leaves` multiplies.
    pub word_add_overhead: i64,
}

pub fn compare_schoolbook(width: u32, threshold: u32) -> SchoolbookComparison {
    assert!(
        width >= threshold,
        "width {width} is below the leaf threshold {threshold}"
    );
    let karatsuba = analyze(width, threshold);
    let blocks = width.div_ceil(threshold) as u64;
    let schoolbook_leaves = blocks * blocks;
    let schoolbook_word_adds = schoolbook_leaves * leaf_word_adds(threshold) + schoolbook_leaves - 1;
    SchoolbookComparison {
        width,
        threshold,
        karatsuba_leaves: karatsuba.leaf_multiplies,
        schoolbook_leaves,
        karatsuba_word_adds: karatsuba.word_adds,
        schoolbook_word_adds,
        word_add_overhead: karatsuba.word_adds as i64 - schoolbook_word_adds as i64,
    }
}

impl fmt::Display for SchoolbookComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "karatsuba_leaves: {} (word_adds {})",
            self.karatsuba_leaves, self.karatsuba_word_adds
        )?;
        writeln!(
            f,
            "schoolbook_leaves: {} (word_adds {})",
            self.schoolbook_leaves, self.schoolbook_word_adds
        )?;
        write!(f, "word_add_overhead: {}", self.word_add_overhead)
    }
}

#[cfg(test)]
mod tests {
    use crate::karatsuba::leaf_schedule;

    use super::*;

    #[test]
    fn recurrence_examples() {
        let r = analyze(8, 8);
        assert_eq!((r.leaf_multiplies, r.recursion_depth), (1, 0));
        let r = analyze(16, 8);
        assert_eq!((r.leaf_multiplies, r.recursion_depth), (3, 1));
        let r = analyze(32, 8);
        assert_eq!((r.leaf_multiplies, r.recursion_depth), (9, 2));
    }

    #[test]
    fn power_of_two_scaling_is_three_to_the_k() {
        for k in 0..=3u32 {
            let r = analyze(8 << k, 8);
            assert_eq!(r.leaf_multiplies, 3u64.pow(k));
            assert_eq!(r.recursion_depth, k);
        }
    }

    #[test]
    fn histogram_accounts_for_every_leaf() {
        let r = analyze(16, 8);
        assert_eq!(r.leaf_width_histogram, BTreeMap::from([(8, 3)]));
        let r = analyze(53, 8);
        assert_eq!(r.leaf_multiplies, 27);
        assert_eq!(r.leaf_width_histogram, BTreeMap::from([(6, 5), (7, 22)]));
        let total: u64 = r.leaf_width_histogram.values().sum();
        assert_eq!(total, r.leaf_multiplies);
    }

    #[test]
    fn matches_leaf_schedule_everywhere() {
        for width in 1..=64 {
            for threshold in [2, 4, 8] {
                let r = analyze(width, threshold);
                assert_eq!(
                    r.leaf_multiplies as usize,
                    leaf_schedule(width, threshold).len(),
                    "width {width} threshold {threshold}"
                );
            }
        }
    }

    #[test]
    fn word_adds_spot_checks() {
        assert_eq!(analyze(8, 8).word_adds, 14);
        // One internal node plus three 8-bit leaves.
        assert_eq!(analyze(16, 8).word_adds, NODE_WORD_ADDS + 3 * 14);
    }

    #[test]
    fn adder_count_data_points() {
        assert_eq!(urdhva_adder_count(4), 6);
        assert_eq!(urdhva_adder_count(8), 14);
        assert_eq!(urdhva_adder_count(2), 2);
    }

    #[test]
    #[should_panic(expected = "leaf widths")]
    fn adder_count_rejects_width_one() {
        let _ = urdhva_adder_count(1);
    }

    #[test]
    #[should_panic(expected = "leaf widths")]
    fn adder_count_rejects_width_nine() {
        let _ = urdhva_adder_count(9);
    }

    #[test]
    fn schoolbook_examples() {
        let c = compare_schoolbook(16, 8);
        assert_eq!((c.karatsuba_leaves, c.schoolbook_leaves), (3, 4));
        let c = compare_schoolbook(32, 8);
        assert_eq!((c.karatsuba_leaves, c.schoolbook_leaves), (9, 16));
        let c = compare_schoolbook(8, 8);
        assert_eq!((c.karatsuba_leaves, c.schoolbook_leaves), (1, 1));
    }

    #[test]
    fn leaf_counts_against_schoolbook() {
        // Strictly fewer leaves along the power-of-two ladder, where the
        // recursion keeps every leaf at the threshold width.
        for threshold in [2, 4, 8] {
            for k in 1..=4u32 {
                let c = compare_schoolbook(threshold << k, threshold);
                assert_eq!(c.karatsuba_leaves, 3u64.pow(k));
                assert_eq!(c.schoolbook_leaves, 4u64.pow(k));
            }
        }
        // Balanced ceil-splitting can overshoot at awkward widths whose
        // halves land well below the leaf size; 36 is the smallest such
        // width for the default leaf. The count trade-off is only
        // guaranteed where the split granularity matches the leaves.
        let c = compare_schoolbook(36, 8);
        assert_eq!((c.karatsuba_leaves, c.schoolbook_leaves), (27, 25));
        let c = compare_schoolbook(20, 4);
        assert_eq!((c.karatsuba_leaves, c.schoolbook_leaves), (27, 25));
    }

    #[test]
    fn report_text_is_line_oriented() {
        let text = analyze(32, 8).to_string();
        assert!(text.lines().any(|l| l == "leaf_multiplies: 9"));
        assert!(text.lines().any(|l| l == "recursion_depth: 2"));
        assert_eq!(
            analyze(32, 8).csv_row(),
            format!("32,8,9,{},2", analyze(32, 8).word_adds)
        );
    }
}
