//! Analyzers for two mutually unbiased bases on four OAM values.

use super::BuildError;
use crate::circuit::Circuit;
use crate::element::Element;
use crate::scalar::Real;
use crate::state::{Label, PathId};

/// Returns `(L, M)`.
///
/// `L` sorts the four values onto detectors `L_1..L_4`. `M` shifts the
/// sorted lines to `l = 0` and mixes them on two layers of 50/50 splitters,
/// so `M_1..M_4` project onto `(+ + + +)`, `(+ + − −)`, `(+ − − +)` and
/// `(+ − + −)` over `(x_1, x_2, x_3, x_4)`, each with weight 1.
pub fn build_mub4<T: Real>(values: [i64; 4]) -> Result<(Circuit<T>, Circuit<T>), BuildError> {
    let mut sorted = values;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(BuildError::DuplicateValues);
    }
    let table = |prefix: &str| -> Vec<(Label, PathId)> {
        values.iter().enumerate().map(|(k, &v)| (Label::Oam(v), PathId::from(format!("{prefix}{}", k + 1)))).collect()
    };

    let mut l = Circuit::builder();
    l.source("in").push(Element::sorter("in", "rej", table("o")));
    for k in 1..=4 {
        l.detect(format!("L_{k}"), format!("o{k}"));
    }

    let mut m = Circuit::builder();
    m.source("in").push(Element::sorter("in", "rej", table("x")));
    for (k, &v) in values.iter().enumerate() {
        m.push(Element::shift(format!("x{}", k + 1), -v));
    }
    m.push(Element::hadamard("x1", "x2", "a1", "a2"))
        .push(Element::hadamard("x3", "x4", "a3", "a4"))
        .push(Element::hadamard("a1", "a3", "m1", "m2"))
        .push(Element::hadamard("a2", "a4", "m4", "m3"));
    for k in 1..=4 {
        m.detect(format!("M_{k}"), format!("m{k}"));
    }
    Ok((l.build()?, m.build()?))
}
