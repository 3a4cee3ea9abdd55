//! Sorter-fed interferometer trees: the C/D tree, the Tribonacci tree and
//! the weighted-jump tree.
//!
//! All trees start the same way: a sorter sends each sequence value `x_k`
//! to its own spoke `s<k>`, the spoke is split into parts, and parts of
//! different spokes are shifted to `l = 0` and brought together on a 50/50
//! splitter. Parts with no partner end on auxiliary detectors `E_...`.

use serde::{Deserialize, Serialize};

use super::BuildError;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::element::Element;
use crate::scalar::Real;
use crate::sequence::{SequenceSpec, Term};
use crate::state::{Label, PathId};

/// Which recurrence indices a C/D tree covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    #[default]
    Both,
}

impl Parity {
    fn chains(self) -> &'static [usize] {
        match self {
            Parity::Even => &[0],
            Parity::Odd => &[1],
            Parity::Both => &[0, 1],
        }
    }
}

fn sorter_stage<T: Real>(b: &mut CircuitBuilder<T>, terms: &[Term]) {
    let table = terms.iter().map(|t| (Label::Oam(t.value), PathId::from(format!("s{}", t.index))));
    b.source("in").push(Element::sorter("in", "rej", table));
}

/// Splits spoke `s<k>` into two halves `first<k>`, `second<k>`.
fn halve<T: Real>(b: &mut CircuitBuilder<T>, k: usize, first: &str, second: &str) {
    b.push(Element::hadamard(
        format!("s{k}"),
        format!("z{k}"),
        format!("{first}{k}"),
        format!("{second}{k}"),
    ));
}

/// C/D tree over the chosen index parities.
///
/// Spoke `k` splits into `dn<k>` and `up<k>`. Interferometer `n` combines
/// `dn<n>` with `up<n−2>`, so detector `C_n` sees `(x_n + x_{n−2})/2` and
/// `D_n` sees `(x_n − x_{n−2})/2`.
pub fn build_cd_tree<T: Real>(seq: &SequenceSpec, parity: Parity) -> Result<Circuit<T>, BuildError> {
    let terms = seq.terms()?;
    let mut used: Vec<Term> = Vec::new();
    let mut chains: Vec<Vec<Term>> = Vec::new();
    for &p in parity.chains() {
        let chain: Vec<Term> = terms.iter().copied().filter(|t| t.index % 2 == p).collect();
        if chain.len() < 3 {
            return Err(BuildError::TooFewValues { needed: 3, got: chain.len() });
        }
        used.extend(&chain);
        chains.push(chain);
    }
    used.sort_by_key(|t| t.index);

    let mut b = Circuit::builder();
    sorter_stage(&mut b, &used);
    for t in &used {
        halve(&mut b, t.index, "dn", "up");
    }
    for chain in &chains {
        for pair in chain.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let (dn, up) = (format!("dn{}", hi.index), format!("up{}", lo.index));
            let n = hi.index;
            b.push(Element::shift(dn.as_str(), -hi.value))
                .push(Element::shift(up.as_str(), -lo.value))
                .push(Element::hadamard(dn.as_str(), up.as_str(), format!("c{n}"), format!("d{n}")))
                .detect(format!("C_{n}"), format!("c{n}"))
                .detect(format!("D_{n}"), format!("d{n}"));
        }
        let (first, last) = (chain[0].index, chain[chain.len() - 1].index);
        b.detect(format!("E_{first}"), format!("dn{first}")).detect(format!("E_{last}"), format!("up{last}"));
    }
    Ok(b.build()?)
}

/// Tribonacci tree.
///
/// Spoke `k` splits with weights `1/√5, √(2/5), √(2/5)` into parts `a<k>`,
/// `b<k>`, `c<k>` that feed triples `k`, `k+1` and `k+2`. Triple `n` first
/// combines `b<n−1>` and `c<n−2>` (difference to `E_n`), then adds `a<n>`:
/// `C_n` sees `(x_n + x_{n−1} + x_{n−2})/√10` and `D_n` sees
/// `(x_n − x_{n−1} − x_{n−2})/√10`.
pub fn build_tribonacci_tree<T: Real>(seq: &SequenceSpec) -> Result<Circuit<T>, BuildError> {
    let terms = seq.terms()?;
    if terms.len() < 4 {
        return Err(BuildError::TooFewValues { needed: 4, got: terms.len() });
    }
    let mut b = Circuit::builder();
    sorter_stage(&mut b, &terms);
    for t in &terms {
        let k = t.index;
        b.push(Element::splitter(
            format!("s{k}"),
            format!("z{k}"),
            format!("a{k}"),
            format!("r{k}"),
            T::lit(0.2f64.sqrt()),
        ))
        .push(Element::hadamard(format!("r{k}"), format!("y{k}"), format!("b{k}"), format!("c{k}")));
    }
    let count = terms.len();
    for (p, t) in terms.iter().enumerate() {
        let k = t.index;
        let feeds = [("a", p >= 2), ("b", p + 1 < count), ("c", p + 2 < count)];
        for (slot, used) in feeds {
            let port = format!("{slot}{k}");
            if used {
                b.push(Element::shift(port.as_str(), -t.value));
            } else {
                b.detect(format!("E_{k}_{slot}"), port);
            }
        }
    }
    for p in 2..count {
        let (n, n1, n2) = (terms[p].index, terms[p - 1].index, terms[p - 2].index);
        b.push(Element::hadamard(format!("b{n1}"), format!("c{n2}"), format!("p{n}"), format!("e{n}")))
            .push(Element::hadamard(format!("a{n}"), format!("p{n}"), format!("cc{n}"), format!("dd{n}")))
            .detect(format!("E_{n}"), format!("e{n}"))
            .detect(format!("C_{n}"), format!("cc{n}"))
            .detect(format!("D_{n}"), format!("dd{n}"));
    }
    Ok(b.build()?)
}

/// Weighted-jump tree.
///
/// Spoke `k` splits into `p<k>` (phase π, to interferometer `k`) and `q<k>`
/// (amplitude ½, to interferometer `k+1`), so `C_n` sees
/// `(−x_n + ½ x_{n−1})/2` and `D_n` sees `(−x_n − ½ x_{n−1})/2`.
pub fn build_jump_tree<T: Real>(seq: &SequenceSpec) -> Result<Circuit<T>, BuildError> {
    let terms = seq.terms()?;
    if terms.len() < 2 {
        return Err(BuildError::TooFewValues { needed: 2, got: terms.len() });
    }
    let mut b = Circuit::builder();
    sorter_stage(&mut b, &terms);
    for t in &terms {
        halve(&mut b, t.index, "p", "q");
    }
    for pair in terms.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let n = hi.index;
        let (p, q) = (format!("p{n}"), format!("q{}", lo.index));
        b.push(Element::phase(p.as_str(), T::PI()))
            .push(Element::shift(p.as_str(), -hi.value))
            .push(Element::atten(q.as_str(), T::lit(0.5)))
            .push(Element::shift(q.as_str(), -lo.value))
            .push(Element::hadamard(p.as_str(), q.as_str(), format!("c{n}"), format!("d{n}")))
            .detect(format!("C_{n}"), format!("c{n}"))
            .detect(format!("D_{n}"), format!("d{n}"));
    }
    let (first, last) = (terms[0].index, terms[terms.len() - 1].index);
    b.detect(format!("E_{first}"), format!("p{first}")).detect(format!("E_{last}"), format!("q{last}"));
    Ok(b.build()?)
}
