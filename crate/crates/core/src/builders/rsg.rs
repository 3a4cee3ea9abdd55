//! Recursive state generator: cells that turn two input lines into three
//! output lines, the third carrying the recurrence sum of the first two.
//!
//! A cell splits each input 50/50 into a pass-through and a branch. The
//! branches are weighted by the recurrence coefficients and combined on a
//! 50/50 splitter whose sum port is the new line; the difference port is
//! discarded. With unit-norm inputs of equal intensity every output then
//! carries half the input intensity, provided the combined line is trimmed
//! by `√2 / ‖c₂ x̂_a + c₁ x̂_b‖` (exactly 1 when the inputs are orthogonal).

use num_complex::Complex64;

use super::BuildError;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::element::Element;
use crate::scalar::Real;
use crate::sequence::SequenceSpec;
use crate::state::{Label, PathId};

struct Cell<'a> {
    tag: String,
    a: &'a str,
    b: &'a str,
    out_a: &'a str,
    out_b: &'a str,
    out_c: &'a str,
    /// Branch weights for the `a` and `b` lines.
    weights: (f64, f64),
    trim: f64,
}

fn push_cell<T: Real>(bld: &mut CircuitBuilder<T>, cell: &Cell<'_>) {
    let p = |s: &str| format!("{}{s}", cell.tag);
    let (ba, bb) = (p("ba"), p("bb"));
    bld.push(Element::hadamard(cell.a, p("va"), cell.out_a, ba.as_str()))
        .push(Element::hadamard(cell.b, p("vb"), cell.out_b, bb.as_str()));
    for (port, w) in [(&ba, cell.weights.0), (&bb, cell.weights.1)] {
        if w.abs() != 1.0 {
            bld.push(Element::atten(port.as_str(), T::lit(w.abs())));
        }
        if w < 0.0 {
            bld.push(Element::phase(port.as_str(), T::PI()));
        }
    }
    bld.push(Element::hadamard(ba.as_str(), bb.as_str(), cell.out_c, p("w")));
    if cell.trim != 1.0 {
        bld.push(Element::atten(cell.out_c, T::lit(cell.trim)));
    }
}

/// A single cell with inputs `in1`, `in2` and outputs `out1`, `out2`,
/// `out3`. For `(|x_a⟩₁ + |x_b⟩₂)/√2` with `x_a ≠ x_b` the three outputs
/// carry amplitude ½ each, `out3` in the state `(|x_a⟩ + |x_b⟩)/√2`; the
/// remaining ¼ leaves through the open port `w`.
pub fn build_rsg_cell<T: Real>() -> Result<Circuit<T>, BuildError> {
    let mut b = Circuit::builder();
    b.source("in1").source("in2");
    push_cell(
        &mut b,
        &Cell { tag: String::new(), a: "in1", b: "in2", out_a: "out1", out_b: "out2", out_c: "out3", weights: (1.0, 1.0), trim: 1.0 },
    );
    Ok(b.build()?)
}

/// Name of the port carrying the `k`-th generated state (1-based).
pub fn rsg_output_port(k: usize) -> String {
    format!("x{k}")
}

fn norm(v: &[Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// `p` nested cells fed from a sorter on source `in`.
///
/// The first two in-range values of `seq` are the seeds; an input
/// `(|x_1⟩ + |x_2⟩)/√2` at `in` produces outputs `x1 .. x{p+2}` of equal
/// intensity `2^{−p}/2`, output `k ≥ 3` proportional to
/// `c₁ x̂_{k−1} + c₂ x̂_{k−2}`. Only order-2 recurrences are supported.
pub fn build_rsg<T: Real>(p: usize, seq: &SequenceSpec) -> Result<Circuit<T>, BuildError> {
    if p == 0 {
        return Err(BuildError::Unsupported("at least one cell is required".into()));
    }
    if seq.order() != 2 {
        return Err(BuildError::Unsupported(format!("order-{} recurrence; cells combine two lines", seq.order())));
    }
    let values = seq.generate()?;
    if values.len() < 2 {
        return Err(BuildError::TooFewValues { needed: 2, got: values.len() });
    }
    let (c1, c2) = (seq.coefficients[0] as f64, seq.coefficients[1] as f64);
    let cmax = c1.abs().max(c2.abs());
    if cmax == 0.0 {
        return Err(BuildError::Unsupported("all coefficients are zero".into()));
    }
    let (w1, w2) = (c1 / cmax, c2 / cmax);

    // Track the normalized label content of every line to size the trims.
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut lines: Vec<[Complex64; 2]> = vec![[one, zero], [zero, one]];

    let mut b = Circuit::builder();
    b.source("in").push(Element::sorter(
        "in",
        "rej",
        [(Label::Oam(values[0]), PathId::from("in1")), (Label::Oam(values[1]), PathId::from("in2"))],
    ));

    let mut names: Vec<String> = Vec::new();
    for j in 1..=p {
        let (xa, xb) = (lines[j - 1], lines[j]);
        let sum = [xa[0] * w2 + xb[0] * w1, xa[1] * w2 + xb[1] * w1];
        let n = norm(&sum);
        if n == 0.0 {
            return Err(BuildError::Unsupported(format!("cell {j} would produce an empty line")));
        }
        let trim = std::f64::consts::SQRT_2 / n;
        if trim > 1.0 + 1e-12 {
            return Err(BuildError::GainRequired { cell: j, gain: trim });
        }
        lines.push([sum[0] / n, sum[1] / n]);

        let a = if j == 1 { "in1".to_string() } else { format!("pa{}", j - 1) };
        let bb = if j == 1 { "in2".to_string() } else { format!("pb{}", j - 1) };
        let (out_b, out_c) = if j == p {
            (rsg_output_port(p + 1), rsg_output_port(p + 2))
        } else {
            (format!("pa{j}"), format!("pb{j}"))
        };
        names.push(rsg_output_port(j));
        push_cell(
            &mut b,
            &Cell {
                tag: format!("k{j}"),
                a: &a,
                b: &bb,
                out_a: &names[j - 1],
                out_b: &out_b,
                out_c: &out_c,
                weights: (w2, w1),
                trim: trim.min(1.0),
            },
        );
    }
    for k in 1..p {
        b.push(Element::atten(rsg_output_port(k), T::lit(2f64.powf(-((p - k) as f64) / 2.0))));
    }
    Ok(b.build()?)
}
