#![allow(dead_code)]

use num_complex::Complex64;
use oamlab::builders::*;
use oamlab::circuit::Circuit;
use oamlab::element::{BsConvention, Element};
use oamlab::sequence::SequenceSpec;
use oamlab::state::{Label, Mode, PathId, PureState};
use rand::Rng;

pub struct RandomCircuit {
    pub circuit: Circuit,
    pub basis: Vec<Mode>,
    pub lossless: bool,
}

fn cx<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random wiring of at most 20 elements over at most 12 input modes.
pub fn random_circuit<R: Rng>(rng: &mut R) -> RandomCircuit {
    let n_sources = rng.random_range(1..=3usize);
    let n_labels = rng.random_range(1..=(12 / n_sources).min(4)) as i64;
    let mut b = Circuit::builder();
    let mut live: Vec<String> = Vec::new();
    let mut fresh = 0usize;
    let mut name = |prefix: &str| {
        fresh += 1;
        format!("{prefix}{fresh}")
    };
    for i in 0..n_sources {
        let p = format!("s{i}");
        b.source(p.clone());
        live.push(p);
    }
    let mut lossless = true;
    let n_elements = rng.random_range(1..=20);
    for _ in 0..n_elements {
        if live.is_empty() {
            break;
        }
        let pick = rng.random_range(0..live.len());
        match rng.random_range(0..7) {
            0 => {
                let a = live.swap_remove(pick);
                let other = if !live.is_empty() && rng.random_bool(0.7) {
                    live.swap_remove(rng.random_range(0..live.len()))
                } else {
                    name("v")
                };
                let (c, d) = (name("b"), name("b"));
                let conv = if rng.random_bool(0.5) { BsConvention::Hadamard } else { BsConvention::Symmetric };
                b.push(Element::BeamSplitter {
                    inputs: [PathId::from(a), PathId::from(other)],
                    outputs: [PathId::from(c.clone()), PathId::from(d.clone())],
                    ratio: rng.random_range(0.0..=1.0),
                    convention: conv,
                });
                live.push(c);
                live.push(d);
            }
            1 => {
                b.push(Element::phase(live[pick].clone(), rng.random_range(-7.0..7.0)));
            }
            2 => {
                lossless = false;
                b.push(Element::atten(live[pick].clone(), rng.random_range(0.0..=1.0)));
            }
            3 => {
                b.push(Element::shift(live[pick].clone(), rng.random_range(-2..=2)));
            }
            4 => {
                let input = live.swap_remove(pick);
                let reject = name("r");
                let mut table = Vec::new();
                for l in -3..=5 {
                    if rng.random_bool(0.3) {
                        let out = name("o");
                        table.push((Label::Oam(l), PathId::from(out.clone())));
                        live.push(out);
                    }
                }
                b.push(Element::sorter(input, reject.clone(), table));
                live.push(reject);
            }
            5 if live.len() >= 2 => {
                let x = live.swap_remove(pick);
                let y = live.swap_remove(rng.random_range(0..live.len()));
                let l = rng.random_range(-2..=3);
                let (out, reject) = (name("m"), name("r"));
                let (rx, ry) = (format!("{reject}.{x}"), format!("{reject}.{y}"));
                b.push(Element::merge(
                    out.clone(),
                    reject,
                    [(Label::Oam(l), PathId::from(x)), (Label::Oam(l + 1), PathId::from(y))],
                ));
                live.extend([out, rx, ry]);
            }
            _ => {
                let (a, bb) = (cx(rng), cx(rng));
                let n = (a.norm_sqr() + bb.norm_sqr()).sqrt();
                let (a, bb) = (a / n, bb / n);
                let ph = Complex64::from_polar(1.0, rng.random_range(-3.0..3.0));
                let l = rng.random_range(-1..n_labels + 1);
                b.push(Element::LabelUnitary {
                    port: PathId::from(live[pick].clone()),
                    labels: (Label::Oam(l), Label::Oam(l + 1)),
                    matrix: [[a, bb], [-ph * bb.conj(), ph * a.conj()]],
                });
            }
        }
    }
    for (i, p) in live.iter().enumerate() {
        if rng.random_bool(0.4) {
            b.detect(format!("D{i}"), p.clone());
        }
    }
    let circuit = b.build().expect("generated circuit is well formed");
    let basis = (0..n_sources).flat_map(|i| (0..n_labels).map(move |l| Mode::oam(format!("s{i}"), l))).collect();
    RandomCircuit { circuit, basis, lossless }
}

pub fn random_state<R: Rng>(rng: &mut R, basis: &[Mode]) -> PureState {
    basis.iter().map(|m| (m.clone(), cx(rng))).collect::<PureState>().normalized()
}

/// One instance of every builder.
pub fn builder_corpus() -> Vec<(&'static str, Circuit)> {
    let fib = SequenceSpec::fibonacci(1, 100);
    let (l, m) = build_mub4([1, 2, 3, 5]).unwrap();
    let complex = SuperpositionTarget::new(
        vec![Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.7), Complex64::new(0.1, -0.4)],
        vec![1, 4, 9],
    );
    vec![
        ("polarization", build_polarization_analyzer().unwrap()),
        ("polarization pair", build_polarization_pair().unwrap()),
        ("cd tree", build_cd_tree(&fib, Parity::Both).unwrap()),
        ("tribonacci tree", build_tribonacci_tree(&SequenceSpec::tribonacci(1, 100)).unwrap()),
        ("jump tree", build_jump_tree(&fib).unwrap()),
        ("sgdt", build_sgdt(&complex).unwrap()),
        ("synthesizer", build_synthesizer(&complex).unwrap()),
        ("mub L", l),
        ("mub M", m),
        ("rsg cell", build_rsg_cell().unwrap()),
        ("rsg", build_rsg(3, &SequenceSpec::fibonacci(1, 100)).unwrap()),
    ]
}
