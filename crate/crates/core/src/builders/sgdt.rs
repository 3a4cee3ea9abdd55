//! Generalized superposition detector and its time-reversed twin, the
//! superposition synthesizer.
//!
//! Line `j` of the sorter carries `x_j`. It is attenuated by `|a_j|/a_max`
//! and phase shifted, then the lines are folded into one accumulator on a
//! cascade of splitters: stage `i` mixes the accumulator (weight
//! `√((i−1)/i)`) with line `i` (weight `√(1/i)`), so every line ends up with
//! the same weight `1/√m` on the final `C` output. Each stage's difference
//! port ends on an auxiliary detector `E_i`; the last one is `D`.

use num_complex::Complex64;

use super::{BuildError, SuperpositionTarget};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::element::Element;
use crate::scalar::Real;
use crate::state::{Label, PathId};

/// Synthesizer port carrying `∝ Σ a_j |x_j⟩`.
pub const SYNTH_OUTPUT: &str = "c";
/// Synthesizer port carrying the last cascade difference.
pub const SYNTH_DIFFERENCE: &str = "d";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Detect,
    Synthesize,
}

fn live_lines(target: &SuperpositionTarget) -> Vec<(usize, i64, Complex64)> {
    target
        .coefficients
        .iter()
        .zip(&target.values)
        .enumerate()
        .filter(|(_, (a, _))| a.norm() > 0.0)
        .map(|(j, (a, v))| (j + 1, *v, *a))
        .collect()
}

fn tree<T: Real>(target: &SuperpositionTarget, sense: Sense) -> Result<CircuitBuilder<T>, BuildError> {
    target.validate()?;
    let lines = live_lines(target);
    let amax = target.max_magnitude();
    let mut b = Circuit::builder();
    b.source("in");

    if lines.len() == 1 {
        let (_, v, a) = lines[0];
        let port = match sense {
            Sense::Detect => "x1",
            Sense::Synthesize => SYNTH_OUTPUT,
        };
        b.push(Element::sorter("in", "rej", [(Label::Oam(v), PathId::from(port))]));
        let phi = if sense == Sense::Detect { -a.arg() } else { a.arg() };
        if phi != 0.0 {
            b.push(Element::phase(port, T::lit(phi)));
        }
        if sense == Sense::Detect {
            b.push(Element::shift(port, -v)).detect("C", port);
        }
        return Ok(b);
    }

    let table = lines.iter().map(|&(j, v, _)| (Label::Oam(v), PathId::from(format!("x{j}"))));
    b.push(Element::sorter("in", "rej", table));
    for &(j, v, a) in &lines {
        let port = format!("x{j}");
        if sense == Sense::Detect {
            b.push(Element::shift(port.as_str(), -v));
        }
        let t = a.norm() / amax;
        if t != 1.0 {
            b.push(Element::atten(port.as_str(), T::lit(t)));
        }
        let phi = if sense == Sense::Detect { -a.arg() } else { a.arg() };
        if phi != 0.0 {
            b.push(Element::phase(port.as_str(), T::lit(phi)));
        }
    }

    let m = lines.len();
    let mut acc = format!("x{}", lines[0].0);
    for (i, &(j, _, _)) in lines.iter().enumerate().skip(1) {
        let stage = i + 1;
        let last = stage == m;
        let (sum, diff) = if last {
            (SYNTH_OUTPUT.to_string(), SYNTH_DIFFERENCE.to_string())
        } else {
            (format!("a{stage}"), format!("e{stage}"))
        };
        let ratio = ((stage - 1) as f64 / stage as f64).sqrt();
        b.push(Element::splitter(acc.as_str(), format!("x{j}"), sum.as_str(), diff.as_str(), T::lit(ratio)));
        if sense == Sense::Detect && !last {
            b.detect(format!("E_{stage}"), diff.as_str());
        }
        acc = sum;
    }
    if sense == Sense::Detect {
        b.detect("C", SYNTH_OUTPUT).detect("D", SYNTH_DIFFERENCE);
    }
    Ok(b)
}

/// Detector whose `C` projector is proportional to `Σ_j a_j |x_j⟩`.
///
/// Lines carry the phase `−arg(a_j)`, which is what makes the detector
/// respond to the target itself rather than to its complex conjugate.
pub fn build_sgdt<T: Real>(target: &SuperpositionTarget) -> Result<Circuit<T>, BuildError> {
    Ok(tree(target, Sense::Detect)?.build()?)
}

/// Same tree run forwards as a state source: fed with `Σ_l |l⟩` at `in`,
/// port [`SYNTH_OUTPUT`] carries a state proportional to `Σ_j a_j |x_j⟩`.
/// No shifters and no detectors; all outputs are left open.
pub fn build_synthesizer<T: Real>(target: &SuperpositionTarget) -> Result<Circuit<T>, BuildError> {
    Ok(tree(target, Sense::Synthesize)?.build()?)
}
