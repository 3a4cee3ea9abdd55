//! Dense transfer-matrix reference for circuits.
//!
//! Nothing here calls [`Element::apply`] or [`Circuit::simulate`]: the mode
//! universe is enumerated up front, every element becomes a dense matrix
//! over it, and the products are formed explicitly. The result is slow and
//! exists to check the sparse engine and the apparatus builders.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;

use crate::circuit::{Circuit, CircuitError};
use crate::element::{bs_matrix, merge_reject, Element, ElementError};
use crate::scalar::{cis, Real};
use crate::state::{Label, Mode, PathId, PureState};

/// Dense matrix indexed by `(output mode, input mode)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix<T = f64> {
    pub input_basis: Vec<Mode>,
    pub output_basis: Vec<Mode>,
    /// Row-major, `matrix[i][j]` is the amplitude in `output_basis[i]` for a
    /// unit input in `input_basis[j]`.
    pub matrix: Vec<Vec<Complex<T>>>,
}

impl<T: Real> TransferMatrix<T> {
    pub fn rows(&self) -> usize {
        self.output_basis.len()
    }

    pub fn cols(&self) -> usize {
        self.input_basis.len()
    }

    pub fn entry(&self, out: &Mode, input: &Mode) -> Complex<T> {
        let i = self.output_basis.iter().position(|m| m == out);
        let j = self.input_basis.iter().position(|m| m == input);
        match (i, j) {
            (Some(i), Some(j)) => self.matrix[i][j],
            _ => Complex::default(),
        }
    }

    pub fn column(&self, j: usize) -> PureState<T> {
        self.output_basis.iter().enumerate().map(|(i, m)| (m.clone(), self.matrix[i][j])).collect()
    }

    /// `M·ψ`, reading only the components of `ψ` on the input basis.
    pub fn apply(&self, psi: &PureState<T>) -> PureState<T> {
        let x: Vec<Complex<T>> = self.input_basis.iter().map(|m| psi.get(m)).collect();
        self.output_basis
            .iter()
            .zip(&self.matrix)
            .map(|(m, row)| {
                let v = row.iter().zip(&x).fold(Complex::default(), |acc, (a, b)| acc + *a * *b);
                (m.clone(), v)
            })
            .collect()
    }

    /// `‖MᴴM − I‖_max`.
    pub fn isometry_defect(&self) -> T {
        let n = self.cols();
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                let mut acc: Complex<T> = Complex::default();
                for row in &self.matrix {
                    acc = acc + row[a].conj() * row[b];
                }
                let id = if a == b { T::one() } else { T::zero() };
                worst = worst.max((acc - Complex::new(id, T::zero())).norm());
            }
        }
        worst
    }
}

/// What a detector responds to: one projector ket per label that can reach
/// it. The firing probability for input `ψ` is `Σ_l |⟨p_l|ψ⟩|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorProjector<T = f64> {
    pub rows: BTreeMap<Label, PureState<T>>,
}

impl<T: Real> DetectorProjector<T> {
    pub fn probability(&self, psi: &PureState<T>) -> T {
        self.rows.values().fold(T::zero(), |acc, p| acc + p.inner(psi).norm_sqr())
    }

    /// The projector when only one label reaches the detector.
    pub fn single(&self) -> Option<&PureState<T>> {
        let mut live = self.rows.values().filter(|p| !p.is_empty());
        let first = live.next()?;
        live.next().is_none().then_some(first)
    }

    /// Trace of the POVM element restricted to the input basis.
    pub fn weight(&self) -> T {
        self.rows.values().fold(T::zero(), |acc, p| acc + p.norm_sqr())
    }
}

fn zero<T: Real>() -> Complex<T> {
    Complex::default()
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Labels that can appear on each path, by forward propagation.
fn label_universe<T: Real>(
    circuit: &Circuit<T>,
    basis: &[Mode],
) -> Result<BTreeSet<Mode>, CircuitError> {
    let mut live: BTreeMap<PathId, BTreeSet<Label>> = BTreeMap::new();
    for m in basis {
        live.entry(m.path.clone()).or_default().insert(m.label);
    }
    let mut universe: BTreeSet<Mode> = basis.iter().cloned().collect();

    for (index, e) in circuit.elements().iter().enumerate() {
        let fail = |source: ElementError| CircuitError::Apply { index, kind: e.kind(), source };
        let mut produced: Vec<(PathId, Label)> = Vec::new();
        let take = |live: &mut BTreeMap<PathId, BTreeSet<Label>>, p: &PathId| live.remove(p).unwrap_or_default();
        match e {
            Element::BeamSplitter { inputs, outputs, .. } => {
                let mut labels = take(&mut live, &inputs[0]);
                labels.extend(take(&mut live, &inputs[1]));
                for l in labels {
                    produced.push((outputs[0].clone(), l));
                    produced.push((outputs[1].clone(), l));
                }
            }
            Element::PhaseShift { port, .. } | Element::Attenuator { port, .. } => {
                for l in take(&mut live, port) {
                    produced.push((port.clone(), l));
                }
            }
            Element::OamShift { port, delta } => {
                for l in take(&mut live, port) {
                    match l {
                        Label::Oam(v) => {
                            let moved = v.checked_add(*delta).ok_or_else(|| {
                                fail(ElementError::InvalidParameter { element: "shift", reason: "label overflow".into() })
                            })?;
                            produced.push((port.clone(), Label::Oam(moved)))
                        }
                        other => return Err(fail(ElementError::LabelKind { element: "shift", label: other })),
                    }
                }
            }
            Element::Sorter { input, reject, table } => {
                for l in take(&mut live, input) {
                    kind_guard("sorter", table, l).map_err(fail)?;
                    produced.push((table.get(&l).unwrap_or(reject).clone(), l));
                }
            }
            Element::Merge { output, reject, table } => {
                for p in table.values() {
                    for l in take(&mut live, p) {
                        kind_guard("merge", table, l).map_err(fail)?;
                        let dest = if table.get(&l) == Some(p) { output.clone() } else { merge_reject(reject, p) };
                        produced.push((dest, l));
                    }
                }
            }
            Element::LabelUnitary { port, labels, .. } => {
                for l in take(&mut live, port) {
                    if !l.same_kind(labels.0) {
                        return Err(fail(ElementError::LabelKind { element: "lunitary", label: l }));
                    }
                    if l == labels.0 || l == labels.1 {
                        produced.push((port.clone(), labels.0));
                        produced.push((port.clone(), labels.1));
                    } else {
                        produced.push((port.clone(), l));
                    }
                }
            }
        }
        for (p, l) in produced {
            universe.insert(Mode::new(p.clone(), l));
            live.entry(p).or_default().insert(l);
        }
    }
    Ok(universe)
}

fn kind_guard(element: &'static str, table: &BTreeMap<Label, PathId>, l: Label) -> Result<(), ElementError> {
    match table.keys().next() {
        Some(k) if !k.same_kind(l) => Err(ElementError::LabelKind { element, label: l }),
        _ => Ok(()),
    }
}

/// Dense matrix of one element over `universe` (square, indexed alike).
fn element_matrix<T: Real>(e: &Element<T>, universe: &[Mode]) -> Vec<Vec<Complex<T>>> {
    let n = universe.len();
    let index: BTreeMap<&Mode, usize> = universe.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = vec![vec![zero::<T>(); n]; n];
    let mut put = |to: Mode, from: usize, v: Complex<T>| {
        if let Some(&i) = index.get(&to) {
            m[i][from] = m[i][from] + v;
        }
    };

    for (j, u) in universe.iter().enumerate() {
        let on = |p: &PathId| &u.path == p;
        match e {
            Element::BeamSplitter { inputs, outputs, ratio, convention } if inputs.iter().any(on) => {
                let b = bs_matrix(*ratio, *convention);
                let col = if on(&inputs[0]) { 0 } else { 1 };
                put(Mode::new(outputs[0].clone(), u.label), j, b[0][col]);
                put(Mode::new(outputs[1].clone(), u.label), j, b[1][col]);
            }
            Element::PhaseShift { port, phi } if on(port) => put(u.clone(), j, cis(*phi)),
            Element::Attenuator { port, t } if on(port) => put(u.clone(), j, Complex::new(*t, T::zero())),
            Element::OamShift { port, delta } if on(port) => {
                if let Some(v) = match u.label {
                    Label::Oam(v) => v.checked_add(*delta),
                    Label::Pol(_) => None,
                } {
                    put(Mode::oam(port.clone(), v), j, one());
                }
            }
            Element::Sorter { input, reject, table } if on(input) => {
                put(Mode::new(table.get(&u.label).unwrap_or(reject).clone(), u.label), j, one());
            }
            Element::Merge { output, reject, table } if table.values().any(on) => {
                let dest = if table.get(&u.label) == Some(&u.path) { output.clone() } else { merge_reject(reject, &u.path) };
                put(Mode::new(dest, u.label), j, one());
            }
            Element::LabelUnitary { port, labels, matrix } if on(port) => {
                if u.label == labels.0 || u.label == labels.1 {
                    let col = if u.label == labels.0 { 0 } else { 1 };
                    put(Mode::new(port.clone(), labels.0), j, matrix[0][col]);
                    put(Mode::new(port.clone(), labels.1), j, matrix[1][col]);
                } else {
                    put(u.clone(), j, one());
                }
            }
            _ => put(u.clone(), j, one()),
        }
    }
    m
}

fn matmul<T: Real>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(zero::<T>(), |acc, (x, brow)| acc + *x * brow[j]))
                .collect()
        })
        .collect()
}

fn terminal_paths<T: Real>(circuit: &Circuit<T>) -> BTreeSet<PathId> {
    let mut t: BTreeSet<PathId> = circuit.detectors().values().cloned().collect();
    t.extend(circuit.open_ports().iter().cloned());
    t
}

/// Dense transfer matrix from `input_basis` to every mode on a terminal
/// path (detectors and open ports).
pub fn transfer_matrix<T: Real>(circuit: &Circuit<T>, input_basis: &[Mode]) -> Result<TransferMatrix<T>, CircuitError> {
    for m in input_basis {
        if !circuit.sources().contains(&m.path) {
            return Err(CircuitError::UnknownSource { port: m.path.clone() });
        }
    }
    let universe: Vec<Mode> = label_universe(circuit, input_basis)?.into_iter().collect();
    let index: BTreeMap<&Mode, usize> = universe.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut x = vec![vec![zero::<T>(); input_basis.len()]; universe.len()];
    for (j, m) in input_basis.iter().enumerate() {
        x[index[m]][j] = x[index[m]][j] + one();
    }
    for e in circuit.elements() {
        x = matmul(&element_matrix(e, &universe), &x);
    }

    let terminal = terminal_paths(circuit);
    let mut output_basis = Vec::new();
    let mut matrix = Vec::new();
    for (i, m) in universe.iter().enumerate() {
        if terminal.contains(&m.path) {
            output_basis.push(m.clone());
            matrix.push(x[i].clone());
        }
    }
    Ok(TransferMatrix { input_basis: input_basis.to_vec(), output_basis, matrix })
}

/// Effective projector of every detector over `input_basis`.
///
/// The ket for label `l` at detector `d` is the conjugated transfer-matrix
/// row of mode `(path(d), l)`.
pub fn detector_projectors<T: Real>(
    circuit: &Circuit<T>,
    input_basis: &[Mode],
) -> Result<BTreeMap<String, DetectorProjector<T>>, CircuitError> {
    let tm = transfer_matrix(circuit, input_basis)?;
    let mut out = BTreeMap::new();
    for (name, path) in circuit.detectors() {
        let mut rows = BTreeMap::new();
        for (m, row) in tm.output_basis.iter().zip(&tm.matrix) {
            if &m.path == path {
                let ket: PureState<T> = input_basis.iter().zip(row).map(|(b, a)| (b.clone(), a.conj())).collect();
                rows.insert(m.label, ket);
            }
        }
        out.insert(name.clone(), DetectorProjector { rows });
    }
    Ok(out)
}

/// `‖MᴴM − I‖_max` of the dense transfer matrix over `basis`.
pub fn check_isometry<T: Real>(circuit: &Circuit<T>, basis: &[Mode]) -> Result<T, CircuitError> {
    Ok(transfer_matrix(circuit, basis)?.isometry_defect())
}
