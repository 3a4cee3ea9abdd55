//! Polarization analogues of the OAM detectors.
//!
//! A polarizing beam splitter is a sorter over `{H, V}`; each arm is then
//! rotated onto the diagonal and the arms interfere on a 50/50 splitter.

use super::BuildError;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::element::{half_wave_plate, Diagonal, Element};
use crate::scalar::Real;
use crate::state::{Label, PathId, Polarization};

fn pbs<T: Real>(input: &str, reject: &str, h: &str, v: &str) -> Element<T> {
    Element::sorter(
        input,
        reject,
        [(Label::Pol(Polarization::H), PathId::from(h)), (Label::Pol(Polarization::V), PathId::from(v))],
    )
}

/// One interferometer. `v_to` / `h_to` are the wave-plate settings on the
/// V and H arms.
fn arm<T: Real>(b: &mut CircuitBuilder<T>, tag: &str, input: &str, v_to: Diagonal, h_to: Diagonal, c: &str, d: &str) {
    let (v, h) = (format!("{tag}v"), format!("{tag}h"));
    let (pc, pd) = (format!("{tag}c"), format!("{tag}d"));
    b.push(pbs(input, &format!("{tag}r"), &h, &v))
        .push(half_wave_plate(v.as_str(), v_to))
        .push(half_wave_plate(h.as_str(), h_to))
        .push(Element::hadamard(v.as_str(), h.as_str(), pc.as_str(), pd.as_str()))
        .detect(c, pc)
        .detect(d, pd);
}

/// PBS, wave plates and a 50/50 splitter. Light at +45° reaches only `C`,
/// light at −45° only `D`, H or V light splits evenly.
pub fn build_polarization_analyzer<T: Real>() -> Result<Circuit<T>, BuildError> {
    let mut b = Circuit::builder();
    b.source("in");
    arm(&mut b, "", "in", Diagonal::Plus45, Diagonal::Minus45, "C", "D");
    Ok(b.build()?)
}

/// Two analyzers behind a 50/50 splitter, with mirrored wave-plate
/// settings. Detectors `C_ne`, `D_ne` sit on the first and `C_nw`, `D_nw`
/// on the second: +45° light fires only `C_ne` or `D_nw`, −45° light only
/// `C_nw` or `D_ne`.
pub fn build_polarization_pair<T: Real>() -> Result<Circuit<T>, BuildError> {
    let mut b = Circuit::builder();
    b.source("in").push(Element::hadamard("in", "vac", "u", "l"));
    arm(&mut b, "u", "u", Diagonal::Plus45, Diagonal::Minus45, "C_ne", "D_ne");
    arm(&mut b, "l", "l", Diagonal::Minus45, Diagonal::Plus45, "C_nw", "D_nw");
    Ok(b.build()?)
}
