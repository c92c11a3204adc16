//! `fpmul` — multiply packed floats bit-exactly, trace the pipeline,
//! verify against the oracles, and benchmark threshold choices.
//!
//! Exit codes: 0 on success / all checks passing, 1 when a verification
//! run found mismatches, 2 for usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fpmul::cost::{analyze, compare_schoolbook};
use fpmul::fp::{multiply_traced, multiply_with, FpFormat, PackedFloat};
use fpmul::{UBits128, DEFAULT_LEAF_WIDTH};

mod bench;
mod trace;
mod verify;

#[derive(Parser)]
#[command(name = "fpmul", version, about = "Bit-exact floating-point multiplier model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two packed floats given as exact-width hex patterns.
    Mul {
        /// single | double | custom:<exp_width>:<frac_width>:<bias>
        #[arg(long, default_value = "single", value_parser = parse_format)]
        format: FpFormat,
        /// Karatsuba leaf width (1..=8).
        #[arg(long, default_value_t = DEFAULT_LEAF_WIDTH)]
        threshold: u32,
        /// Batch file: one pair of hex tokens per line, '#' starts a comment.
        #[arg(long, conflicts_with = "operands")]
        input: Option<PathBuf>,
        /// The two operands (unless --input is used).
        #[arg(num_args = 0..=2)]
        operands: Vec<String>,
    },
    /// Dump every stage of one multiplication: unpacked fields, exponent
    /// arithmetic, the recursion tree with leaf column terms,
    /// normalization, and packing.
    Trace {
        #[arg(long, default_value = "single", value_parser = parse_format)]
        format: FpFormat,
        #[arg(long, default_value_t = DEFAULT_LEAF_WIDTH)]
        threshold: u32,
        a: String,
        b: String,
    },
    /// Run an oracle-backed verification suite.
    Verify {
        /// urdhva4 | urdhva8 | karatsuba:<width>:<trials> | fp:<format>:<trials>
        scope: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw only normal numbers instead of uniform bit patterns.
        #[arg(long)]
        normals_only: bool,
        #[arg(long, default_value_t = DEFAULT_LEAF_WIDTH)]
        threshold: u32,
    },
    /// Time the integer multiplier; one CSV row per configuration.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "16,24,32,53,64")]
        widths: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "8")]
        thresholds: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the operation-count model for one configuration.
    Cost {
        #[arg(long)]
        width: u32,
        #[arg(long, default_value_t = DEFAULT_LEAF_WIDTH)]
        threshold: u32,
        /// Emit one CSV row instead of the line report.
        #[arg(long)]
        csv: bool,
    },
}

/// Largest packed width the u128-backed pipeline supports.
const MAX_TOTAL_WIDTH: u32 = 128;
const MAX_FRAC_WIDTH: u32 = 63;

fn parse_format(spec: &str) -> Result<FpFormat, String> {
    let format = match spec {
        "single" => FpFormat::single(),
        "double" => FpFormat::double(),
        custom => {
            let parts: Vec<&str> = custom.split(':').collect();
            let fields: [&str; 4] = parts
                .try_into()
                .map_err(|_| format!("unknown format '{spec}' (single, double, or custom:<exp>:<frac>:<bias>)"))?;
            if fields[0] != "custom" {
                return Err(format!(
                    "unknown format '{spec}' (single, double, or custom:<exp>:<frac>:<bias>)"
                ));
            }
            let num = |field: &str, what: &str| {
                field
                    .parse::<u32>()
                    .map_err(|_| format!("invalid {what} '{field}' in format '{spec}'"))
            };
            let exp_width = num(fields[1], "exponent width")?;
            let frac_width = num(fields[2], "fraction width")?;
            let bias = num(fields[3], "bias")?;
            if !(1..=32).contains(&exp_width) {
                return Err(format!("exponent width must be 1..=32, got {exp_width}"));
            }
            if !(1..=MAX_FRAC_WIDTH).contains(&frac_width) {
                return Err(format!("fraction width must be 1..={MAX_FRAC_WIDTH}, got {frac_width}"));
            }
            FpFormat::custom(exp_width, frac_width, bias)
        }
    };
    if format.total_width() > MAX_TOTAL_WIDTH {
        return Err(format!(
            "format is {} bits wide, the limit is {MAX_TOTAL_WIDTH}",
            format.total_width()
        ));
    }
    Ok(format)
}

fn check_threshold(threshold: u32) -> Result<(), String> {
    if (1..=fpmul::MAX_LEAF_WIDTH).contains(&threshold) {
        Ok(())
    } else {
        Err(format!(
            "threshold must be 1..={}, got {threshold}",
            fpmul::MAX_LEAF_WIDTH
        ))
    }
}

fn parse_operand(format: &FpFormat, hex: &str) -> Result<PackedFloat<u128>, String> {
    let bits = UBits128::from_hex(format.total_width(), hex).map_err(|e| e.to_string())?;
    Ok(PackedFloat::new(*format, bits))
}

fn mul_line(format: &FpFormat, threshold: u32, a: &str, b: &str) -> Result<String, String> {
    let a = parse_operand(format, a)?;
    let b = parse_operand(format, b)?;
    let result = multiply_with(&a, &b, threshold);
    Ok(format!("{} flags={}", result.packed.to_hex(), result.flags))
}

fn cmd_mul(
    format: FpFormat,
    threshold: u32,
    input: Option<PathBuf>,
    operands: Vec<String>,
) -> Result<(), String> {
    check_threshold(threshold)?;
    match (input, operands.as_slice()) {
        (None, [a, b]) => {
            println!("{}", mul_line(&format, threshold, a, b)?);
            Ok(())
        }
        (Some(path), []) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            // One output line per input pair, in input order.
            let mut lines = Vec::new();
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                let [a, b]: [&str; 2] = tokens
                    .try_into()
                    .map_err(|_| format!("line {}: expected two hex tokens", idx + 1))?;
                lines.push(
                    mul_line(&format, threshold, a, b)
                        .map_err(|e| format!("line {}: {e}", idx + 1))?,
                );
            }
            for line in lines {
                println!("{line}");
            }
            Ok(())
        }
        (None, _) => Err("expected exactly two hex operands (or --input FILE)".into()),
        (Some(_), _) => Err("--input replaces inline operands".into()),
    }
}

fn cmd_trace(format: FpFormat, threshold: u32, a: &str, b: &str) -> Result<(), String> {
    check_threshold(threshold)?;
    let a = parse_operand(&format, a)?;
    let b = parse_operand(&format, b)?;
    let (result, trace) = multiply_traced(&a, &b, threshold);
    print!("{}", trace::render(&format, threshold, &result, &trace));
    Ok(())
}

fn cmd_cost(width: u32, threshold: u32, csv: bool) -> Result<(), String> {
    check_threshold(threshold)?;
    if width < 1 {
        return Err("width must be at least 1".into());
    }
    let report = analyze(width, threshold);
    if csv {
        println!("{}", fpmul::cost::CostReport::csv_header());
        println!("{}", report.csv_row());
    } else {
        println!("{report}");
        if width >= threshold {
            println!("{}", compare_schoolbook(width, threshold));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Mul {
            format,
            threshold,
            input,
            operands,
        } => cmd_mul(format, threshold, input, operands).map(|_| true),
        Command::Trace {
            format,
            threshold,
            a,
            b,
        } => cmd_trace(format, threshold, &a, &b).map(|_| true),
        Command::Verify {
            scope,
            seed,
            normals_only,
            threshold,
        } => {
            check_threshold(threshold)?;
            verify::run(&scope, seed, normals_only, threshold)
        }
        Command::Bench {
            widths,
            thresholds,
            trials,
            seed,
        } => bench::run(&widths, &thresholds, trials, seed).map(|_| true),
        Command::Cost {
            width,
            threshold,
            csv,
        } => cmd_cost(width, threshold, csv).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // usage errors leave with code 2, --help with 0
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
