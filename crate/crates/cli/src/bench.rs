//! Wall-clock benchmark of the integer multiplier, as CSV.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use fpmul::cost::analyze;
use fpmul::karatsuba::karatsuba_mul;
use fpmul::UBits128;

pub fn run(widths: &[u32], thresholds: &[u32], trials: u64, seed: u64) -> Result<(), String> {
    if trials == 0 {
        return Err("trial count must be positive".into());
    }
    for &width in widths {
        if !(8..=64).contains(&width) {
            return Err(format!("bench widths must be 8..=64, got {width}"));
        }
    }
    for &threshold in thresholds {
        crate::check_threshold(threshold)?;
    }

    println!("width,threshold,leaf_multiplies,ns_per_multiply");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for &width in widths {
        let mask = if width == 64 {
            u64::MAX as u128
        } else {
            (1u128 << width) - 1
        };
        let pairs: Vec<(UBits128, UBits128)> = (0..trials)
            .map(|_| {
                (
                    UBits128::new(width, rng.gen::<u128>() & mask),
                    UBits128::new(width, rng.gen::<u128>() & mask),
                )
            })
            .collect();
        for &threshold in thresholds {
            let leaf_multiplies = analyze(width, threshold).leaf_multiplies;
            let start = Instant::now();
            for &(a, b) in &pairs {
                black_box(karatsuba_mul(black_box(a), black_box(b), threshold));
            }
            let nanos = start.elapsed().as_nanos() as f64 / trials as f64;
            println!("{width},{threshold},{leaf_multiplies},{nanos:.1}");
        }
    }
    Ok(())
}
