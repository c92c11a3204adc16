//! Oracle-backed verification suites behind `fpmul verify`.
//!
//! Every suite prints `<passes>/<total> pass` and reports the first
//! failing counterexample, if any, on stderr. The return value feeds the
//! process exit code: `Ok(true)` for a clean run, `Ok(false)` when any
//! case failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use fpmul::fp::{multiply_with, FpFormat, PackedFloat};
use fpmul::karatsuba::karatsuba_mul;
use fpmul::oracle::reference_multiply;
use fpmul::urdhva::urdhva_mul;
use fpmul::UBits128;

struct Tally {
    total: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            total: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, counterexample: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(counterexample());
            }
        }
    }

    fn finish(self) -> bool {
        println!("{}/{} pass", self.total - self.failures, self.total);
        if let Some(first) = self.first {
            eprintln!("first failure: {first}");
        }
        self.failures == 0
    }
}

fn verify_urdhva(width: u32) -> bool {
    let mut tally = Tally::new();
    for a in 0..(1u64 << width) {
        for b in 0..(1u64 << width) {
            let got = urdhva_mul(UBits128::new(width, a as u128), UBits128::new(width, b as u128));
            let want = (a as u128) * (b as u128);
            tally.record(got.to_u128() == want, || {
                format!("a={a:#x} b={b:#x} got={:#x} want={want:#x}", got.to_u128())
            });
        }
    }
    tally.finish()
}

fn verify_karatsuba(width: u32, trials: u64, seed: u64, threshold: u32) -> Result<bool, String> {
    if !(2..=64).contains(&width) {
        return Err(format!("karatsuba verify width must be 2..=64, got {width}"));
    }
    let mask = (1u128 << width) - 1;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    for _ in 0..trials {
        let a = rng.gen::<u128>() & mask;
        let b = rng.gen::<u128>() & mask;
        let got = karatsuba_mul(UBits128::new(width, a), UBits128::new(width, b), threshold);
        let want = a * b;
        tally.record(got.to_u128() == want, || {
            format!("a={a:#x} b={b:#x} got={:#x} want={want:#x}", got.to_u128())
        });
    }
    Ok(tally.finish())
}

fn verify_fp(
    format: &FpFormat,
    trials: u64,
    seed: u64,
    normals_only: bool,
    threshold: u32,
) -> Result<bool, String> {
    let total_width = format.total_width();
    let max_exp = format.exp_max() as u128;
    if normals_only && max_exp < 2 {
        return Err("this format has no normal numbers to draw".into());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draw = || -> u128 {
        if normals_only {
            let sign = rng.gen::<bool>() as u128;
            let exp = rng.gen_range(1..max_exp);
            let frac = rng.gen::<u128>() & ((1 << format.frac_width) - 1);
            (sign << (total_width - 1)) | (exp << format.frac_width) | frac
        } else if total_width == 128 {
            rng.gen::<u128>()
        } else {
            rng.gen::<u128>() & ((1 << total_width) - 1)
        }
    };

    let mut tally = Tally::new();
    for _ in 0..trials {
        let a = draw();
        let b = draw();
        let got = multiply_with(
            &PackedFloat::<u128>::from_u128(*format, a),
            &PackedFloat::<u128>::from_u128(*format, b),
            threshold,
        );
        let (want_bits, want_flags) = reference_multiply(format, a, b);
        let got_bits = got.packed.bits.to_u128();
        tally.record(got_bits == want_bits && got.flags == want_flags, || {
            format!(
                "a={a:#x} b={b:#x} got={got_bits:#x}/{} want={want_bits:#x}/{}",
                got.flags, want_flags
            )
        });
    }
    Ok(tally.finish())
}

pub fn run(scope: &str, seed: u64, normals_only: bool, threshold: u32) -> Result<bool, String> {
    let parts: Vec<&str> = scope.split(':').collect();
    match parts.as_slice() {
        ["urdhva4"] => Ok(verify_urdhva(4)),
        ["urdhva8"] => Ok(verify_urdhva(8)),
        ["karatsuba", width, trials] => {
            let width = width
                .parse()
                .map_err(|_| format!("invalid width '{width}'"))?;
            let trials = trials
                .parse()
                .map_err(|_| format!("invalid trial count '{trials}'"))?;
            verify_karatsuba(width, trials, seed, threshold)
        }
        ["fp", middle @ .., trials] if !middle.is_empty() => {
            let format = crate::parse_format(&middle.join(":"))?;
            let trials = trials
                .parse()
                .map_err(|_| format!("invalid trial count '{trials}'"))?;
            verify_fp(&format, trials, seed, normals_only, threshold)
        }
        _ => Err(format!(
            "unknown scope '{scope}' (urdhva4, urdhva8, karatsuba:<width>:<trials>, fp:<format>:<trials>)"
        )),
    }
}
