//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use fpmul::bits::UBits;
use fpmul::cost::{analyze, compare_schoolbook, urdhva_adder_count};
use fpmul::fp::{classify_flags, multiply, multiply_with, FpFormat, PackedFloat};
use fpmul::karatsuba::{karatsuba_mul, karatsuba_mul_observed, KaratsubaEvent, KaratsubaObserver};
use fpmul::oracle::reference_multiply;
use fpmul::urdhva::{assemble_product_4x4, partial_terms_4x4, urdhva_4x4_cascade, urdhva_mul};
use fpmul::{PackedSingle, PackedWide, UBits128, Word};

fn report(criterion: u32, ok: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn masked(rng: &mut ChaCha12Rng, width: u32) -> u128 {
    let mask = if width == 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    };
    rng.gen::<u128>() & mask
}

/// Criterion 1: exhaustive leaf correctness. 4x4 in both the cascade and
/// row-assembly forms on all 256 pairs, 8x8 on all 65 536 pairs,
/// bit-exact against integer multiplication, in under a second.
#[test]
fn criterion_1_exhaustive_leaves() {
    let start = Instant::now();
    let mut failures = 0u64;
    for a in 0..16u64 {
        for b in 0..16u64 {
            let av = UBits::<u64>::new(4, a);
            let bv = UBits::<u64>::new(4, b);
            let want = (a * b) as u128;
            if urdhva_4x4_cascade(av, bv).to_u128() != want {
                failures += 1;
            }
            if assemble_product_4x4(&partial_terms_4x4(av, bv)).to_u128() != want {
                failures += 1;
            }
        }
    }
    for a in 0..256u64 {
        for b in 0..256u64 {
            let p = urdhva_mul(UBits::<u64>::new(8, a), UBits::new(8, b));
            if p.to_u128() != (a * b) as u128 {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        failures == 0 && elapsed < Duration::from_secs(1),
        &format!(
            "4x4 both forms (256) and 8x8 (65536) exhaustive, {failures} mismatches, {:?}",
            elapsed
        ),
    );
}

/// Criterion 2: Karatsuba matches a big-integer product oracle on widths
/// 16, 24, 32, 53, 64 — 1e5 random pairs per width plus all boundary
/// combinations — in under 30 s.
#[test]
fn criterion_2_karatsuba_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC2);
    let mut checked = 0u64;
    let mut failures = 0u64;
    for width in [16u32, 24, 32, 53, 64] {
        let boundaries = [0u128, 1, (1 << width) - 1, 1 << (width - 1)];
        for &a in &boundaries {
            for &b in &boundaries {
                let got = karatsuba_mul(UBits128::new(width, a), UBits128::new(width, b), 8);
                checked += 1;
                if got.to_u128() != a * b {
                    failures += 1;
                }
            }
        }
        for _ in 0..100_000 {
            let a = masked(&mut rng, width);
            let b = masked(&mut rng, width);
            let got = karatsuba_mul(UBits128::new(width, a), UBits128::new(width, b), 8);
            checked += 1;
            if got.to_u128() != a * b {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        failures == 0 && elapsed < Duration::from_secs(30),
        &format!("{checked} products across widths 16/24/32/53/64, {failures} mismatches, {elapsed:?}"),
    );
}

#[derive(Default)]
struct LeafCounter {
    leaves: u64,
    histogram: BTreeMap<u32, u64>,
}

impl<S: Word> KaratsubaObserver<S> for LeafCounter {
    fn observe(&mut self, event: KaratsubaEvent<'_, S>) {
        if let KaratsubaEvent::Leaf { a, .. } = event {
            self.leaves += 1;
            *self.histogram.entry(a.width()).or_insert(0) += 1;
        }
    }
}

/// Criterion 3: recurrence structure. analyze(16,8) counts 3 leaf
/// multiplies and analyze(32,8) counts 9; instrumented multiplies agree
/// with the cost model for every width 8..=64 at thresholds 4 and 8.
#[test]
fn criterion_3_recurrence_structure() {
    let mut ok = analyze(16, 8).leaf_multiplies == 3 && analyze(32, 8).leaf_multiplies == 9;
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC3);
    let mut disagreements = Vec::new();
    for width in 8..=64u32 {
        for threshold in [4, 8] {
            let a = UBits128::new(width, masked(&mut rng, width));
            let b = UBits128::new(width, masked(&mut rng, width));
            let mut counter = LeafCounter::default();
            karatsuba_mul_observed(a, b, threshold, &mut counter);
            let model = analyze(width, threshold);
            if counter.leaves != model.leaf_multiplies
                || counter.histogram != model.leaf_width_histogram
            {
                disagreements.push((width, threshold));
            }
        }
    }
    ok &= disagreements.is_empty();
    report(
        3,
        ok,
        &format!(
            "analyze(16,8)={}, analyze(32,8)={}, instrumented vs model disagreements: {:?}",
            analyze(16, 8).leaf_multiplies,
            analyze(32, 8).leaf_multiplies,
            disagreements
        ),
    );
}

/// Criterion 4: adder-count data points for the column cascade.
#[test]
fn criterion_4_adder_counts() {
    let ok = urdhva_adder_count(4) == 6 && urdhva_adder_count(8) == 14;
    report(
        4,
        ok,
        &format!(
            "urdhva_adder_count(4)={}, urdhva_adder_count(8)={}",
            urdhva_adder_count(4),
            urdhva_adder_count(8)
        ),
    );
}

fn pipeline_vs_oracle<S: Word>(
    format: FpFormat,
    trials: u64,
    rng: &mut ChaCha12Rng,
) -> (u64, Option<(u128, u128)>) {
    let total = format.total_width();
    let mut failures = 0;
    let mut first = None;
    for _ in 0..trials {
        let a = masked(rng, total);
        let b = masked(rng, total);
        let got = multiply(
            &PackedFloat::<S>::from_u128(format, a),
            &PackedFloat::<S>::from_u128(format, b),
        );
        let (want_bits, want_flags) = reference_multiply(&format, a, b);
        if got.packed.bits.to_u128() != want_bits || got.flags != want_flags {
            failures += 1;
            first.get_or_insert((a, b));
        }
    }
    (failures, first)
}

/// Criterion 5: the full pipeline matches the decode → exact-product →
/// truncate → encode oracle bit-exactly, flags included, over 1e6 random
/// single-precision and 1e5 random double-precision pairs (uniform bit
/// patterns, so specials and subnormals are well represented), in under
/// two minutes.
#[test]
fn criterion_5_pipeline_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC5);
    let (single_failures, single_first) =
        pipeline_vs_oracle::<u64>(FpFormat::single(), 1_000_000, &mut rng);
    let (double_failures, double_first) =
        pipeline_vs_oracle::<u128>(FpFormat::double(), 100_000, &mut rng);
    let elapsed = start.elapsed();
    report(
        5,
        single_failures == 0 && double_failures == 0 && elapsed < Duration::from_secs(120),
        &format!(
            "1e6 single ({single_failures} mismatches, first {single_first:?}), \
             1e5 double ({double_failures} mismatches, first {double_first:?}), {elapsed:?}"
        ),
    );
}

/// Criterion 6: the exception table — directed products land on each of
/// Zero, Infinity, NaN, Denormal with exactly the stated field patterns
/// and never more than one flag set.
#[test]
fn criterion_6_exception_table() {
    let fmt = FpFormat::single();
    let single = |bits: u32| PackedSingle::from_u128(fmt, bits as u128);
    let exclusive = |f: fpmul::FpFlags| {
        [f.zero, f.infinity, f.nan, f.denormal]
            .iter()
            .filter(|&&x| x)
            .count()
            <= 1
    };
    let mut ok = true;
    let mut notes = Vec::new();

    // Zero: exponent field 0, fraction 0.
    let r = multiply(&single(0x3F80_0000), &single(0x0000_0000));
    ok &= r.flags.zero && exclusive(r.flags) && r.packed.bits.to_u128() == 0;
    notes.push(format!("zero={}", r.flags.token()));

    // Infinity: exponent field all ones (255), fraction 0.
    let r = multiply(&single(0x7F00_0000), &single(0x7F00_0000));
    ok &= r.flags.infinity && exclusive(r.flags) && r.packed.bits.to_u128() == 0x7F80_0000;
    notes.push(format!("infinity={}", r.flags.token()));

    // NaN: exponent field all ones, fraction nonzero.
    let r = multiply(&single(0x7F80_0000), &single(0x0000_0000));
    let bits = r.packed.bits.to_u128();
    ok &= r.flags.nan && exclusive(r.flags) && bits >> 23 & 0xFF == 0xFF && bits & 0x7F_FFFF != 0;
    notes.push(format!("nan={}", r.flags.token()));

    // Denormal: exponent field 0, fraction nonzero (2^-70 * 2^-60).
    let r = multiply(&single(0x1C80_0000), &single(0x2180_0000));
    let bits = r.packed.bits.to_u128();
    ok &= r.flags.denormal && exclusive(r.flags) && bits >> 23 & 0xFF == 0 && bits & 0x7F_FFFF != 0;
    notes.push(format!("denormal={}", r.flags.token()));

    // The same table through the classifier, max exponent generalized
    // away from 255 on a narrower format.
    let narrow = FpFormat::custom(5, 10, 15);
    let frac = |v: u128| UBits::<u64>::from_u128(10, v);
    ok &= classify_flags(&narrow, 0, &frac(0)).zero;
    ok &= classify_flags(&narrow, 31, &frac(0)).infinity;
    ok &= classify_flags(&narrow, 31, &frac(5)).nan;
    ok &= classify_flags(&narrow, 0, &frac(5)).denormal;
    ok &= classify_flags(&narrow, 7, &frac(5)).is_none();

    report(6, ok, &notes.join(", "));
}

/// Criterion 7: leaf threshold affects structure only — results are
/// bit-identical across thresholds 2, 4, 8 on 1e4 random pairs per width.
#[test]
fn criterion_7_threshold_invariance() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC7);
    let mut failures = 0u64;
    for width in [9u32, 16, 24, 32, 53, 64] {
        for _ in 0..10_000 {
            let a = UBits128::new(width, masked(&mut rng, width));
            let b = UBits128::new(width, masked(&mut rng, width));
            let reference = karatsuba_mul(a, b, 8);
            if karatsuba_mul(a, b, 2) != reference || karatsuba_mul(a, b, 4) != reference {
                failures += 1;
            }
        }
    }
    report(
        7,
        failures == 0,
        &format!("thresholds 2/4/8 bit-identical on 6x1e4 pairs, {failures} mismatches"),
    );
}

/// Criterion 8: the published FPGA delay/slice/LUT/f_max figures are
/// synthesis-tool outputs and declared not reproducible here; the
/// structural claims under them are covered instead by the recursion
/// counts (criterion 3), the adder counts (criterion 4), and the bench
/// command's relative-throughput CSV, with no absolute-time assertion.
#[test]
fn criterion_8_declared_substitute() {
    let mut ok = true;
    for (width, leaves) in [(8u32, 1u64), (16, 3), (24, 9), (32, 9)] {
        let model = analyze(width, 8);
        ok &= model.leaf_multiplies == leaves;
        if width > 8 {
            ok &= compare_schoolbook(width, 8).karatsuba_leaves == leaves;
        }
    }
    report(
        8,
        ok,
        "FPGA timing/area tables out of scope; structural substitutes verified for widths 8/16/24/32",
    );
}

/// Double precision end to end: the multiplier the recursion was sized
/// for (53-bit significands, 106-bit products).
#[test]
fn double_precision_spot_checks() {
    let fmt = FpFormat::double();
    let wide = |bits: u64| PackedWide::from_u128(fmt, bits as u128);
    let r = multiply(&wide(0x3FF0_0000_0000_0000), &wide(0x3FF0_0000_0000_0000));
    assert_eq!(r.packed.bits.to_u128(), 0x3FF0_0000_0000_0000);
    let ninety = 90.0f64;
    let forty_two = 42.0f64;
    let r = multiply(&wide(ninety.to_bits()), &wide(forty_two.to_bits()));
    assert_eq!(r.packed.bits.to_u128(), (ninety * forty_two).to_bits() as u128);

    // Explicit leaf threshold sweep survives the full pipeline too.
    let a = wide(0x4009_21FB_5444_2D18); // pi
    let b = wide(0x4005_BF0A_8B14_5769); // e
    let reference = multiply(&a, &b);
    for threshold in [2, 4, 8] {
        assert_eq!(multiply_with(&a, &b, threshold), reference);
    }
}
