//! Optical elements and their action on sparse states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cis, Real};
use crate::state::{Label, Mode, PathId, Polarization, PureState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementError {
    #[error("{element}: label {label} is the wrong kind for this element")]
    LabelKind { element: &'static str, label: Label },
    #[error("{element}: {reason}")]
    InvalidParameter { element: &'static str, reason: String },
}

/// Phase convention of a beam splitter.
///
/// With amplitude transmission `r` and `s = √(1 − r²)`:
/// * `Hadamard`:  `c = r·a + s·b`, `d = s·a − r·b`
/// * `Symmetric`: `c = r·a + i s·b`, `d = i s·a + r·b`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BsConvention {
    #[default]
    Hadamard,
    Symmetric,
}

impl fmt::Display for BsConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BsConvention::Hadamard => "hadamard",
            BsConvention::Symmetric => "symmetric",
        })
    }
}

/// Half-wave plate orientations available as presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Diagonal {
    Plus45,
    Minus45,
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Diagonal::Plus45 => "plus45",
            Diagonal::Minus45 => "minus45",
        })
    }
}

/// 2×2 complex matrix acting on a pair of amplitudes, row-major.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum Element<T = f64> {
    /// Two-port coupler; label-blind, acts on every label present.
    BeamSplitter {
        inputs: [PathId; 2],
        outputs: [PathId; 2],
        ratio: T,
        convention: BsConvention,
    },
    PhaseShift { port: PathId, phi: T },
    /// Amplitude transmission `t`; the missing intensity is lost.
    Attenuator { port: PathId, t: T },
    /// Spiral phase plate / hologram: `l → l + delta`.
    OamShift { port: PathId, delta: i64 },
    /// Routes each label listed in `table` to its own path, everything else
    /// to `reject`. Labels are unchanged.
    Sorter {
        input: PathId,
        reject: PathId,
        table: BTreeMap<Label, PathId>,
    },
    /// Inverse of a sorter: label `l` arriving on `table[l]` continues on
    /// `output`; any other label on those paths goes to `reject`.
    Merge {
        output: PathId,
        reject: PathId,
        table: BTreeMap<Label, PathId>,
    },
    /// Unitary on the two-dimensional label subspace `labels` of one path;
    /// other labels pass untouched.
    LabelUnitary {
        port: PathId,
        labels: (Label, Label),
        matrix: Mat2<T>,
    },
}

/// How an element uses paths: consumed inputs, produced outputs, or a single
/// path modified in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortUse {
    Transform { consumes: Vec<PathId>, produces: Vec<PathId> },
    InPlace(PathId),
}

pub fn bs_matrix<T: Real>(ratio: T, convention: BsConvention) -> Mat2<T> {
    let r = ratio;
    let s = (T::one() - r * r).max(T::zero()).sqrt();
    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    match convention {
        BsConvention::Hadamard => [[re(r), re(s)], [re(s), re(-r)]],
        BsConvention::Symmetric => [[re(r), im(s)], [im(s), re(r)]],
    }
}

/// Polarization rotation by ∓45° in the `(H, V)` basis.
///
/// `Plus45` sends `V → (H + V)/√2` and `H → (H − V)/√2`; `Minus45` sends
/// `V → (V − H)/√2` and `H → (H + V)/√2`.
pub fn hwp_matrix<T: Real>(to: Diagonal) -> Mat2<T> {
    let h = T::FRAC_1_SQRT_2();
    let re = |x: T| Complex::new(x, T::zero());
    match to {
        Diagonal::Plus45 => [[re(h), re(h)], [re(-h), re(h)]],
        Diagonal::Minus45 => [[re(h), re(-h)], [re(h), re(h)]],
    }
}

pub fn half_wave_plate<T: Real>(port: impl Into<PathId>, to: Diagonal) -> Element<T> {
    Element::LabelUnitary {
        port: port.into(),
        labels: (Label::Pol(Polarization::H), Label::Pol(Polarization::V)),
        matrix: hwp_matrix(to),
    }
}

/// `‖MᴴM − I‖_max` for a 2×2 matrix.
/// Path receiving light that enters a merge on `input` with a label other
/// than the one listed for it. Each input has its own reject path.
pub fn merge_reject(reject: &PathId, input: &PathId) -> PathId {
    PathId::from(format!("{reject}.{input}"))
}

pub fn unitarity_defect<T: Real>(m: &Mat2<T>) -> T {
    let mut worst = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc: Complex<T> = Complex::default();
            for k in 0..2 {
                acc = acc + m[k][i].conj() * m[k][j];
            }
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((acc - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

impl<T: Real> Element<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::BeamSplitter { .. } => "bs",
            Element::PhaseShift { .. } => "phase",
            Element::Attenuator { .. } => "atten",
            Element::OamShift { .. } => "shift",
            Element::Sorter { .. } => "sorter",
            Element::Merge { .. } => "merge",
            Element::LabelUnitary { .. } => "lunitary",
        }
    }

    pub fn hadamard(a: impl Into<PathId>, b: impl Into<PathId>, c: impl Into<PathId>, d: impl Into<PathId>) -> Self {
        Self::splitter(a, b, c, d, T::FRAC_1_SQRT_2())
    }

    pub fn splitter(
        a: impl Into<PathId>,
        b: impl Into<PathId>,
        c: impl Into<PathId>,
        d: impl Into<PathId>,
        ratio: T,
    ) -> Self {
        Element::BeamSplitter {
            inputs: [a.into(), b.into()],
            outputs: [c.into(), d.into()],
            ratio,
            convention: BsConvention::Hadamard,
        }
    }

    pub fn phase(port: impl Into<PathId>, phi: T) -> Self {
        Element::PhaseShift { port: port.into(), phi }
    }

    pub fn atten(port: impl Into<PathId>, t: T) -> Self {
        Element::Attenuator { port: port.into(), t }
    }

    pub fn shift(port: impl Into<PathId>, delta: i64) -> Self {
        Element::OamShift { port: port.into(), delta }
    }

    pub fn sorter(input: impl Into<PathId>, reject: impl Into<PathId>, table: impl IntoIterator<Item = (Label, PathId)>) -> Self {
        Element::Sorter { input: input.into(), reject: reject.into(), table: table.into_iter().collect() }
    }

    pub fn merge(output: impl Into<PathId>, reject: impl Into<PathId>, table: impl IntoIterator<Item = (Label, PathId)>) -> Self {
        Element::Merge { output: output.into(), reject: reject.into(), table: table.into_iter().collect() }
    }

    pub fn port_use(&self) -> PortUse {
        match self {
            Element::BeamSplitter { inputs, outputs, .. } => {
                PortUse::Transform { consumes: inputs.to_vec(), produces: outputs.to_vec() }
            }
            Element::PhaseShift { port, .. }
            | Element::Attenuator { port, .. }
            | Element::OamShift { port, .. }
            | Element::LabelUnitary { port, .. } => PortUse::InPlace(port.clone()),
            Element::Sorter { input, reject, table } => {
                let mut produces: Vec<PathId> = table.values().cloned().collect();
                produces.push(reject.clone());
                PortUse::Transform { consumes: vec![input.clone()], produces }
            }
            Element::Merge { output, reject, table } => PortUse::Transform {
                consumes: table.values().cloned().collect(),
                produces: std::iter::once(output.clone()).chain(table.values().map(|p| merge_reject(reject, p))).collect(),
            },
        }
    }

    /// Paths whose amplitudes this element reads.
    pub fn input_paths(&self) -> Vec<PathId> {
        match self.port_use() {
            PortUse::Transform { consumes, .. } => consumes,
            PortUse::InPlace(p) => vec![p],
        }
    }

    /// Paths this element writes.
    pub fn output_paths(&self) -> Vec<PathId> {
        match self.port_use() {
            PortUse::Transform { produces, .. } => produces,
            PortUse::InPlace(p) => vec![p],
        }
    }

    /// Checks parameter ranges and port distinctness.
    pub fn validate(&self) -> Result<(), ElementError> {
        let bad = |reason: String| Err(ElementError::InvalidParameter { element: self.kind(), reason });
        match self {
            Element::BeamSplitter { inputs, outputs, ratio, .. } => {
                if !(ratio.is_finite() && *ratio > T::zero() && *ratio < T::one()) {
                    return bad(format!("ratio {ratio} outside (0, 1)"));
                }
                if inputs[0] == inputs[1] || outputs[0] == outputs[1] {
                    return bad("ports must be distinct".into());
                }
            }
            Element::PhaseShift { phi, .. } => {
                if !phi.is_finite() {
                    return bad("phase must be finite".into());
                }
            }
            Element::Attenuator { t, .. } => {
                if !(t.is_finite() && *t >= T::zero() && *t <= T::one()) {
                    return bad(format!("transmission {t} outside [0, 1]"));
                }
            }
            Element::OamShift { .. } => {}
            Element::Sorter { input, reject, table } | Element::Merge { output: input, reject, table } => {
                let outs: BTreeSet<&PathId> = table.values().collect();
                if outs.len() != table.len() {
                    return bad("label table is not injective".into());
                }
                if outs.contains(reject) || outs.contains(input) || input == reject {
                    return bad("table, reject and through ports must be distinct".into());
                }
                let mut kinds = table.keys().map(|l| l.is_oam());
                if let Some(first) = kinds.next() {
                    if kinds.any(|k| k != first) {
                        return bad("mixed OAM and polarization labels".into());
                    }
                }
            }
            Element::LabelUnitary { labels, matrix, .. } => {
                if labels.0 == labels.1 || !labels.0.same_kind(labels.1) {
                    return bad("needs two distinct labels of one kind".into());
                }
                if matrix.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return bad("matrix entries must be finite".into());
                }
                if unitarity_defect(matrix) > T::lit(1e-12) {
                    return bad("matrix is not unitary within 1e-12".into());
                }
            }
        }
        Ok(())
    }

    /// Applies the element to `state`. Amplitudes on paths the element does
    /// not touch are copied unchanged.
    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>, ElementError> {
        let inputs = self.input_paths();
        let mut out = PureState::vacuum();
        let mut touched: Vec<(Mode, Complex<T>)> = Vec::new();
        for (m, a) in state.iter() {
            if inputs.contains(&m.path) {
                touched.push((m.clone(), *a));
            } else {
                out.add(m.clone(), *a);
            }
        }

        match self {
            Element::BeamSplitter { inputs, outputs, ratio, convention } => {
                let m = bs_matrix(*ratio, *convention);
                for (mode, a) in touched {
                    let col = if mode.path == inputs[0] { 0 } else { 1 };
                    out.add(Mode::new(outputs[0].clone(), mode.label), m[0][col] * a);
                    out.add(Mode::new(outputs[1].clone(), mode.label), m[1][col] * a);
                }
            }
            Element::PhaseShift { phi, .. } => {
                let z = cis(*phi);
                for (mode, a) in touched {
                    out.add(mode, a * z);
                }
            }
            Element::Attenuator { t, .. } => {
                for (mode, a) in touched {
                    out.add(mode, a.scale(*t));
                }
            }
            Element::OamShift { delta, .. } => {
                for (mode, a) in touched {
                    match mode.label {
                        Label::Oam(l) => {
                            let moved = l.checked_add(*delta).ok_or_else(|| ElementError::InvalidParameter {
                                element: "shift",
                                reason: format!("label {l} shifted by {delta} overflows"),
                            })?;
                            out.add(Mode::oam(mode.path, moved), a)
                        }
                        other => return Err(ElementError::LabelKind { element: "shift", label: other }),
                    }
                }
            }
            Element::Sorter { reject, table, .. } => {
                for (mode, a) in touched {
                    check_kind("sorter", table, mode.label)?;
                    let dest = table.get(&mode.label).unwrap_or(reject);
                    out.add(Mode::new(dest.clone(), mode.label), a);
                }
            }
            Element::Merge { output, reject, table } => {
                for (mode, a) in touched {
                    check_kind("merge", table, mode.label)?;
                    let dest = if table.get(&mode.label) == Some(&mode.path) {
                        output.clone()
                    } else {
                        merge_reject(reject, &mode.path)
                    };
                    out.add(Mode::new(dest, mode.label), a);
                }
            }
            Element::LabelUnitary { labels, matrix, .. } => {
                for (mode, a) in touched {
                    if !mode.label.same_kind(labels.0) {
                        return Err(ElementError::LabelKind { element: "lunitary", label: mode.label });
                    }
                    let col = if mode.label == labels.0 {
                        0
                    } else if mode.label == labels.1 {
                        1
                    } else {
                        out.add(mode, a);
                        continue;
                    };
                    out.add(Mode::new(mode.path.clone(), labels.0), matrix[0][col] * a);
                    out.add(Mode::new(mode.path, labels.1), matrix[1][col] * a);
                }
            }
        }
        Ok(out)
    }
}

fn check_kind(element: &'static str, table: &BTreeMap<Label, PathId>, label: Label) -> Result<(), ElementError> {
    match table.keys().next() {
        Some(first) if !first.same_kind(label) => Err(ElementError::LabelKind { element, label }),
        _ => Ok(()),
    }
}
