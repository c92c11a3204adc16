//! Renders a [`MulTrace`] as the multi-line stage dump of `fpmul trace`.

use std::fmt::Write;

use fpmul::fp::{FpFormat, FpResult, MulTrace, UnpackedFloat};
use fpmul::karatsuba::{NodeDetail, TraceNode};
use fpmul::urdhva::urdhva_mul_traced;

fn operand_line(out: &mut String, name: &str, u: &UnpackedFloat<u128>) {
    let packed_like = fpmul::UBits128::from_bit(u.sign)
        .concat(u.biased_exp)
        .concat(u.significand.slice(u.significand.width() - 2, 0));
    let _ = writeln!(
        out,
        "{name}: {} sign={} exp={} sig={}",
        packed_like.to_hex(),
        u.sign as u8,
        u.biased_exp.to_u128(),
        u.significand.to_hex()
    );
}

fn decimal_list(values: &[fpmul::UBits128]) -> String {
    values
        .iter()
        .map(|v| v.to_u128().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn render_tree(out: &mut String, node: &TraceNode<u128>, depth: usize) {
    let indent = "  ".repeat(depth + 1);
    match &node.detail {
        NodeDetail::Leaf => {
            let (_, leaf) = urdhva_mul_traced(node.a, node.b);
            let _ = writeln!(
                out,
                "{indent}leaf n={} a={} b={} p={} t=[{}] adders=[{}]",
                node.a.width(),
                node.a.to_hex(),
                node.b.to_hex(),
                node.product.to_hex(),
                decimal_list(&leaf.terms),
                decimal_list(&leaf.adder_sums),
            );
        }
        NodeDetail::Split {
            split_point,
            high,
            low,
            mid,
            cross,
            children,
        } => {
            let _ = writeln!(
                out,
                "{indent}node n={} m={split_point} a={} b={} high={} low={} mid={} cross={} p={}",
                node.a.width(),
                node.a.to_hex(),
                node.b.to_hex(),
                high.to_hex(),
                low.to_hex(),
                mid.to_hex(),
                cross.to_hex(),
                node.product.to_hex(),
            );
            for child in children {
                render_tree(out, child, depth + 1);
            }
        }
    }
}

pub fn render(
    format: &FpFormat,
    threshold: u32,
    result: &FpResult<u128>,
    trace: &MulTrace<u128>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "format: 1 + {} + {} bits, bias {}",
        format.exp_width, format.frac_width, format.bias
    );
    operand_line(&mut out, "a", &trace.a);
    operand_line(&mut out, "b", &trace.b);
    let _ = writeln!(
        out,
        "sign: {} xor {} = {}",
        trace.a.sign as u8,
        trace.b.sign as u8,
        trace.sign as u8
    );

    if let Some(label) = trace.shortcut {
        let _ = writeln!(out, "shortcut: {label} operand, arithmetic stages skipped");
    } else {
        let eff = |u: &UnpackedFloat<u128>| u.biased_exp.to_u128().max(1);
        let _ = writeln!(
            out,
            "exponent: {} + {} - {} = {}",
            eff(&trace.a),
            eff(&trace.b),
            format.bias,
            trace.exp_intermediate.unwrap_or_default()
        );
        let _ = writeln!(
            out,
            "mantissa: {0}x{0} karatsuba, leaf width {threshold}",
            format.frac_width + 1
        );
        if let Some(tree) = &trace.tree {
            render_tree(&mut out, tree, 0);
        }
        if let Some(product) = &trace.product {
            let _ = writeln!(out, "product: {}", product.to_hex());
        }
        if let Some(norm) = &trace.norm {
            let _ = writeln!(
                out,
                "normalize: shift={} exp={} sig={} guard={}",
                norm.shift,
                norm.exp,
                norm.significand.to_hex(),
                norm.guard.to_hex()
            );
        }
        if trace.denorm_shift > 0 {
            let _ = writeln!(out, "denormal: {} further right shifts", trace.denorm_shift);
        }
    }

    let total = format.total_width();
    let bits = result.packed.bits;
    let _ = writeln!(
        out,
        "result: sign={} exp={} frac={}",
        bits.bit(total - 1) as u8,
        bits.slice(total - 2, format.frac_width).to_u128(),
        bits.slice(format.frac_width - 1, 0).to_hex()
    );
    let _ = writeln!(out, "packed: {} flags={}", result.packed.to_hex(), result.flags);
    out
}
