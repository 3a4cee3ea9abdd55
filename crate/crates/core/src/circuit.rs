//! Circuit graphs and sparse forward simulation.
//!
//! A circuit is a set of wires (paths). Every path is produced exactly once,
//! by a `source`, by an element output, or implicitly as the vacuum port of a
//! beam splitter, and consumed at most once, by an element input or a
//! detector. In-place elements (phase, attenuator, shifter, label unitary)
//! sit on a path between its producer and its consumer, in listing order.
//! Paths that are produced but never consumed are open outputs; sorter
//! reject ports usually end up there.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::element::{Element, ElementError, PortUse};
use crate::scalar::Real;
use crate::state::{PathId, PureState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("element {index}: {source}")]
    InvalidElement { index: usize, source: ElementError },
    #[error("port `{port}` is produced more than once")]
    DuplicatePort { port: PathId, element: Option<usize> },
    #[error("port `{port}` is consumed more than once")]
    PortConsumedTwice { port: PathId, element: Option<usize> },
    #[error("unknown port `{port}`")]
    UnknownPort { port: PathId, element: Option<usize> },
    #[error("detector `{name}` declared twice")]
    DuplicateDetector { name: String },
    #[error("circuit has a cycle through element {element}")]
    Cycle { element: usize },
    #[error("input amplitude on `{port}`, which is not a source")]
    UnknownSource { port: PathId },
    #[error("element {index} ({kind}): {source}")]
    Apply { index: usize, kind: &'static str, source: ElementError },
}

impl CircuitError {
    /// Index of the offending element in the list handed to [`Circuit::new`].
    pub fn element(&self) -> Option<usize> {
        match self {
            CircuitError::InvalidElement { index, .. } => Some(*index),
            CircuitError::DuplicatePort { element, .. }
            | CircuitError::PortConsumedTwice { element, .. }
            | CircuitError::UnknownPort { element, .. } => *element,
            CircuitError::Cycle { element } => Some(*element),
            _ => None,
        }
    }
}

/// Validated, topologically ordered optical circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T = f64> {
    sources: Vec<PathId>,
    elements: Vec<Element<T>>,
    detectors: BTreeMap<String, PathId>,
    vacuum: BTreeSet<PathId>,
    open: BTreeSet<PathId>,
}

/// Result of a forward simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation<T = f64> {
    pub output: PureState<T>,
    /// Intensity removed by attenuators.
    pub absorbed: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Producer {
    Source,
    Element(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Consumer {
    Element(usize),
    Detector,
}

#[derive(Default)]
struct Wire {
    producer: Option<Producer>,
    modifiers: Vec<usize>,
    consumer: Option<Consumer>,
}

impl<T: Real> Circuit<T> {
    /// Validates the graph and orders elements topologically.
    ///
    /// Ties between independent elements are broken by the name of their
    /// first input port, then by listing order, so two listings of the same
    /// graph produce the same circuit.
    pub fn new(
        sources: impl IntoIterator<Item = PathId>,
        elements: Vec<Element<T>>,
        detectors: impl IntoIterator<Item = (String, PathId)>,
    ) -> Result<Self, CircuitError> {
        for (index, e) in elements.iter().enumerate() {
            e.validate().map_err(|source| CircuitError::InvalidElement { index, source })?;
        }

        let mut wires: BTreeMap<PathId, Wire> = BTreeMap::new();
        let mut src_list: Vec<PathId> = Vec::new();
        for s in sources {
            let w = wires.entry(s.clone()).or_default();
            if w.producer.is_some() {
                return Err(CircuitError::DuplicatePort { port: s, element: None });
            }
            w.producer = Some(Producer::Source);
            src_list.push(s);
        }
        src_list.sort();

        for (i, e) in elements.iter().enumerate() {
            match e.port_use() {
                PortUse::Transform { consumes, produces } => {
                    for p in produces {
                        let w = wires.entry(p.clone()).or_default();
                        if w.producer.is_some() {
                            return Err(CircuitError::DuplicatePort { port: p, element: Some(i) });
                        }
                        w.producer = Some(Producer::Element(i));
                    }
                    for p in consumes {
                        let w = wires.entry(p.clone()).or_default();
                        if w.consumer.is_some() {
                            return Err(CircuitError::PortConsumedTwice { port: p, element: Some(i) });
                        }
                        w.consumer = Some(Consumer::Element(i));
                    }
                }
                PortUse::InPlace(p) => wires.entry(p).or_default().modifiers.push(i),
            }
        }

        let mut det_map: BTreeMap<String, PathId> = BTreeMap::new();
        for (name, port) in detectors {
            if det_map.contains_key(&name) {
                return Err(CircuitError::DuplicateDetector { name });
            }
            let w = wires.entry(port.clone()).or_default();
            if w.consumer.is_some() {
                return Err(CircuitError::PortConsumedTwice { port, element: None });
            }
            w.consumer = Some(Consumer::Detector);
            det_map.insert(name, port);
        }

        // Unproduced wires are legal only as the vacuum input of a beam
        // splitter whose other input is real.
        let mut vacuum = BTreeSet::new();
        for (port, w) in &wires {
            if w.producer.is_some() {
                continue;
            }
            let ok = w.modifiers.is_empty()
                && match w.consumer {
                    Some(Consumer::Element(j)) => match &elements[j] {
                        Element::BeamSplitter { inputs, .. } => {
                            let other = if &inputs[0] == port { &inputs[1] } else { &inputs[0] };
                            wires.get(other).and_then(|o| o.producer).is_some()
                        }
                        _ => false,
                    },
                    _ => false,
                };
            if !ok {
                let element = w.modifiers.first().copied().or(match w.consumer {
                    Some(Consumer::Element(j)) => Some(j),
                    _ => None,
                });
                return Err(CircuitError::UnknownPort { port: port.clone(), element });
            }
            vacuum.insert(port.clone());
        }

        let n = elements.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for w in wires.values() {
            let mut chain: Vec<usize> = Vec::new();
            if let Some(Producer::Element(i)) = w.producer {
                chain.push(i);
            }
            chain.extend(&w.modifiers);
            if let Some(Consumer::Element(j)) = w.consumer {
                chain.push(j);
            }
            for pair in chain.windows(2) {
                if pair[0] == pair[1] {
                    return Err(CircuitError::Cycle { element: pair[0] });
                }
                succ[pair[0]].push(pair[1]);
                indeg[pair[1]] += 1;
            }
        }

        let key = |i: usize| -> (String, usize) {
            let first = elements[i].input_paths().into_iter().min().map(|p| p.as_str().to_string());
            (first.unwrap_or_default(), i)
        };
        let mut ready: BinaryHeap<Reverse<(String, usize)>> =
            (0..n).filter(|&i| indeg[i] == 0).map(|i| Reverse(key(i))).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, i))) = ready.pop() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(Reverse(key(j)));
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|i| !order.contains(i)).unwrap();
            return Err(CircuitError::Cycle { element: stuck });
        }

        let open = wires
            .iter()
            .filter(|(_, w)| w.producer.is_some() && w.consumer.is_none())
            .map(|(p, _)| p.clone())
            .collect();

        let mut slots: Vec<Option<Element<T>>> = elements.into_iter().map(Some).collect();
        let elements = order.into_iter().map(|i| slots[i].take().unwrap()).collect();

        Ok(Self { sources: src_list, elements, detectors: det_map, vacuum, open })
    }

    pub fn builder() -> CircuitBuilder<T> {
        CircuitBuilder::default()
    }

    pub fn sources(&self) -> &[PathId] {
        &self.sources
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    pub fn detectors(&self) -> &BTreeMap<String, PathId> {
        &self.detectors
    }

    pub fn detector_path(&self, name: &str) -> Option<&PathId> {
        self.detectors.get(name)
    }

    /// Beam-splitter inputs that carry no light.
    pub fn vacuum_ports(&self) -> &BTreeSet<PathId> {
        &self.vacuum
    }

    /// Produced paths that are neither consumed nor detected.
    pub fn open_ports(&self) -> &BTreeSet<PathId> {
        &self.open
    }

    /// Every path the circuit mentions.
    pub fn paths(&self) -> BTreeSet<PathId> {
        let mut all: BTreeSet<PathId> = self.sources.iter().cloned().collect();
        for e in &self.elements {
            all.extend(e.input_paths());
            all.extend(e.output_paths());
        }
        all.extend(self.detectors.values().cloned());
        all
    }

    /// Same graph with all detectors removed, their paths left open.
    pub fn without_detectors(&self) -> Self {
        let mut c = self.clone();
        c.open.extend(c.detectors.values().cloned());
        c.detectors.clear();
        c
    }

    /// Copy with additional detectors on currently open ports.
    pub fn with_detectors(&self, extra: impl IntoIterator<Item = (String, PathId)>) -> Result<Self, CircuitError> {
        let detectors: Vec<(String, PathId)> = self.detectors.clone().into_iter().chain(extra).collect();
        Circuit::new(self.sources.clone(), self.elements.clone(), detectors)
    }

    pub fn simulate_detailed(&self, input: &PureState<T>) -> Result<Simulation<T>, CircuitError> {
        for m in input.modes() {
            if !self.sources.contains(&m.path) {
                return Err(CircuitError::UnknownSource { port: m.path.clone() });
            }
        }
        let mut state = input.clone();
        let mut absorbed = T::zero();
        for (index, e) in self.elements.iter().enumerate() {
            let next = e.apply(&state).map_err(|source| CircuitError::Apply { index, kind: e.kind(), source })?;
            if let Element::Attenuator { port, .. } = e {
                absorbed = absorbed + state.path_probability(port) - next.path_probability(port);
            }
            state = next;
        }
        Ok(Simulation { output: state, absorbed })
    }

    /// Output state over all terminal paths (detectors and open ports).
    pub fn simulate(&self, input: &PureState<T>) -> Result<PureState<T>, CircuitError> {
        self.simulate_detailed(input).map(|s| s.output)
    }
}

/// Incremental construction helper used by the apparatus builders.
#[derive(Debug, Clone)]
pub struct CircuitBuilder<T = f64> {
    sources: Vec<PathId>,
    elements: Vec<Element<T>>,
    detectors: Vec<(String, PathId)>,
}

impl<T> Default for CircuitBuilder<T> {
    fn default() -> Self {
        Self { sources: Vec::new(), elements: Vec::new(), detectors: Vec::new() }
    }
}

impl<T: Real> CircuitBuilder<T> {
    pub fn source(&mut self, port: impl Into<PathId>) -> &mut Self {
        self.sources.push(port.into());
        self
    }

    pub fn push(&mut self, e: Element<T>) -> &mut Self {
        self.elements.push(e);
        self
    }

    pub fn detect(&mut self, name: impl Into<String>, port: impl Into<PathId>) -> &mut Self {
        self.detectors.push((name.into(), port.into()));
        self
    }

    pub fn build(&self) -> Result<Circuit<T>, CircuitError> {
        Circuit::new(self.sources.clone(), self.elements.clone(), self.detectors.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Mode;
    use num_complex::Complex;

    fn h() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c: Circuit = Circuit::new(["in".into()], vec![], []).unwrap();
        let psi = PureState::basis(Mode::oam("in", 3));
        assert_eq!(c.simulate(&psi).unwrap(), psi);
    }

    #[test]
    fn vacuum_port_is_inferred() {
        let mut b = Circuit::<f64>::builder();
        b.source("in").push(Element::hadamard("in", "aux", "c", "d")).detect("C", "c").detect("D", "d");
        let c = b.build().unwrap();
        assert!(c.vacuum_ports().contains(&PathId::from("aux")));
        let out = c.simulate(&PureState::basis(Mode::oam("in", 0))).unwrap();
        assert!((out.path_probability(&"c".into()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn both_bs_inputs_unknown_is_an_error() {
        let mut b = Circuit::<f64>::builder();
        b.source("in").push(Element::hadamard("x", "y", "c", "d"));
        assert!(matches!(b.build(), Err(CircuitError::UnknownPort { .. })));
    }

    #[test]
    fn in_place_on_unknown_port_is_an_error() {
        let mut b = Circuit::<f64>::builder();
        b.source("in").push(Element::phase("nowhere", 1.0));
        assert!(matches!(b.build(), Err(CircuitError::UnknownPort { .. })));
    }

    #[test]
    fn cycle_detected() {
        let mut b = Circuit::<f64>::builder();
        b.source("s")
            .push(Element::hadamard("s", "x", "a", "b"))
            .push(Element::hadamard("a", "y", "x", "z"));
        assert!(matches!(b.build(), Err(CircuitError::Cycle { .. })));
    }

    #[test]
    fn duplicate_and_double_consumption() {
        let mut b = Circuit::<f64>::builder();
        b.source("s").push(Element::hadamard("s", "v", "s", "d"));
        assert!(matches!(b.build(), Err(CircuitError::DuplicatePort { .. })));

        let mut b = Circuit::<f64>::builder();
        b.source("s").detect("A", "s").detect("B", "s");
        assert!(matches!(b.build(), Err(CircuitError::PortConsumedTwice { .. })));
    }

    #[test]
    fn out_of_order_listing_is_sorted() {
        let mut b = Circuit::<f64>::builder();
        b.source("s").push(Element::phase("a", 0.3)).push(Element::hadamard("s", "v", "a", "b"));
        let c = b.build().unwrap();
        assert_eq!(c.elements()[0].kind(), "bs");
        assert_eq!(c.elements()[1].kind(), "phase");
    }

    #[test]
    fn listing_order_does_not_matter() {
        let e1: Element = Element::hadamard("s", "v", "a", "b");
        let e2: Element = Element::phase("a", 0.3);
        let e3: Element = Element::atten("b", 0.5);
        let c1 = Circuit::new(["s".into()], vec![e1.clone(), e2.clone(), e3.clone()], []).unwrap();
        let c2 = Circuit::new(["s".into()], vec![e3, e2, e1], []).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn absorbed_intensity_tracked() {
        let mut b = Circuit::<f64>::builder();
        b.source("s").push(Element::atten("s", 0.5)).detect("X", "s");
        let sim = b.build().unwrap().simulate_detailed(&PureState::basis(Mode::oam("s", 1))).unwrap();
        assert!((sim.absorbed - 0.75).abs() < 1e-15);
        assert!((sim.output.norm_sqr() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_source_input_rejected() {
        let c: Circuit = Circuit::new(["in".into()], vec![], []).unwrap();
        let psi = PureState::from_amplitudes([(Mode::oam("zz", 0), Complex::new(h(), 0.0))]);
        assert!(matches!(c.simulate(&psi), Err(CircuitError::UnknownSource { .. })));
    }
}
