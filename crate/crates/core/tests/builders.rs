use std::f64::consts::FRAC_1_SQRT_2 as H;

use num_complex::Complex64;
use oamlab::builders::verify::{self, polarization_probabilities};
use oamlab::builders::*;
use oamlab::circuit::Circuit;
use oamlab::netlist::{emit, parse};
use oamlab::oracle::{detector_projectors, transfer_matrix};
use oamlab::sequence::SequenceSpec;
use oamlab::state::{phase_aligned_deviation, Mode, PathId, PureState};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn oam(items: &[(i64, f64)]) -> PureState {
    items.iter().map(|&(l, a)| (Mode::oam("in", l), re(a))).collect()
}

fn probs(c: &Circuit, psi: &PureState) -> std::collections::BTreeMap<String, f64> {
    let out = c.simulate(psi).unwrap();
    c.detectors().iter().map(|(d, p)| (d.clone(), out.path_probability(p))).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn polarization_analyzer_outcomes() {
    let c: Circuit = build_polarization_analyzer().unwrap();
    let p = polarization_probabilities(&c).unwrap();
    assert!(close(p["V"]["C"], 0.5) && close(p["V"]["D"], 0.5));
    assert!(close(p["H"]["C"], 0.5) && close(p["H"]["D"], 0.5));
    assert!(close(p["+45"]["C"], 1.0) && close(p["+45"]["D"], 0.0));
    assert!(close(p["-45"]["C"], 0.0) && close(p["-45"]["D"], 1.0));
}

#[test]
fn polarization_pair_outcomes() {
    let c: Circuit = build_polarization_pair().unwrap();
    let p = polarization_probabilities(&c).unwrap();
    for d in ["C_ne", "D_ne", "C_nw", "D_nw"] {
        assert!(close(p["V"][d], 0.25), "{d}");
    }
    assert!(close(p["+45"]["C_ne"], 0.5) && close(p["+45"]["D_nw"], 0.5));
    assert!(close(p["+45"]["D_ne"], 0.0) && close(p["+45"]["C_nw"], 0.0));
    assert!(close(p["-45"]["C_nw"], 0.5) && close(p["-45"]["D_ne"], 0.5));
}

fn fib() -> SequenceSpec {
    SequenceSpec::fibonacci(1, 1000)
}

#[test]
fn cd_tree_eigenstate_and_superpositions() {
    let seq = fib();
    let c: Circuit = build_cd_tree(&seq, Parity::Both).unwrap();
    let f = |n: i64| seq.value(n).unwrap();

    // interior eigenstate: four detectors at 1/4
    let n = 6;
    let p = probs(&c, &oam(&[(f(n), 1.0)]));
    for d in [format!("C_{n}"), format!("D_{n}"), format!("C_{}", n + 2), format!("D_{}", n + 2)] {
        assert!(close(p[&d], 0.25), "{d} {}", p[&d]);
    }

    // S_{n-1} = (F_{n-2} + F_n)/√2 never fires D_n
    let p = probs(&c, &oam(&[(f(n - 2), H), (f(n), H)]));
    assert!(p[&format!("D_{n}")] < 1e-30);
    assert!(close(p[&format!("C_{n}")], 0.5));

    // S_{n+1} = (F_n + F_{n+2})/√2
    let p = probs(&c, &oam(&[(f(n), H), (f(n + 2), H)]));
    assert!(close(p[&format!("C_{}", n + 2)], 0.5));
    assert!(p[&format!("D_{}", n + 2)] < 1e-30);
    for d in [format!("C_{n}"), format!("D_{n}"), format!("C_{}", n + 4), format!("D_{}", n + 4)] {
        assert!(close(p[&d], 0.125), "{d}");
    }

    assert!(verify::verify_cd_tree(&c, &seq, Parity::Both).unwrap().passed());
}

#[test]
fn cd_tree_transfer_column() {
    let seq = fib();
    let c: Circuit = build_cd_tree(&seq, Parity::Even).unwrap();
    let vals: Vec<i64> = seq.terms().unwrap().iter().filter(|t| t.index % 2 == 0).map(|t| t.value).collect();
    let basis: Vec<Mode> = vals.iter().map(|&v| Mode::oam("in", v)).collect();
    let tm = transfer_matrix(&c, &basis).unwrap();
    let n = 8;
    let j = vals.iter().position(|&v| v == seq.value(n).unwrap()).unwrap();
    let col = tm.column(j);
    let mut weights: Vec<(String, f64)> = Vec::new();
    for (d, path) in c.detectors() {
        let w = col.path_probability(path);
        if w > 1e-20 {
            weights.push((d.clone(), w));
        }
    }
    weights.sort_by(|a, b| a.0.cmp(&b.0));
    let names: Vec<&str> = weights.iter().map(|w| w.0.as_str()).collect();
    assert_eq!(names, ["C_10", "C_8", "D_10", "D_8"]);
    assert!(weights.iter().all(|w| close(w.1, 0.25)));
}

#[test]
fn cd_tree_too_short() {
    let seq = SequenceSpec::fibonacci(1, 5);
    assert!(matches!(build_cd_tree::<f64>(&seq, Parity::Even), Err(BuildError::TooFewValues { .. })));
}

#[test]
fn tribonacci_tree() {
    let seq = SequenceSpec::tribonacci(1, 500);
    let c: Circuit = build_tribonacci_tree(&seq).unwrap();
    let l = |n: i64| seq.value(n).unwrap();
    let n = 6;
    let s = 1.0 / 3f64.sqrt();
    let p = probs(&c, &oam(&[(l(n - 2), s), (l(n - 1), s), (l(n), s)]));
    let (pc, pd) = (p[&format!("C_{n}")], p[&format!("D_{n}")]);
    assert!(close(pc, 0.3));
    assert!(close(pd / pc, 1.0 / 9.0));

    // (1, −1, −1) is not orthogonal to (1, 1, 1): overlap −1
    let p = probs(&c, &oam(&[(l(n), s), (l(n - 1), -s), (l(n - 2), -s)]));
    assert!(close(p[&format!("C_{n}")], 1.0 / 30.0));
    assert!(close(p[&format!("D_{n}")], 0.3));
    let p = probs(&c, &oam(&[(l(n), H), (l(n - 1), -H)]));
    assert!(p[&format!("C_{n}")] < 1e-30);

    let p = probs(&c, &oam(&[(l(n), 1.0)]));
    assert!(close(p[&format!("C_{n}")], p[&format!("D_{n}")]));

    assert!(verify::verify_tribonacci_tree(&c, &seq).unwrap().passed());
    assert!(build_tribonacci_tree::<f64>(&SequenceSpec::tribonacci(1, 4)).is_err());
}

#[test]
fn jump_tree_projectors() {
    let seq = SequenceSpec::fibonacci(2, 100);
    let c: Circuit = build_jump_tree(&seq).unwrap();
    assert!(verify::verify_jump_tree(&c, &seq).unwrap().passed());
}

#[test]
fn sgdt_targets() {
    let (ln, ln1, ln2) = (24, 13, 7);
    let t = SuperpositionTarget::real(&[1.0, 1.0, 1.0], &[ln, ln1, ln2]);
    let c: Circuit = build_sgdt(&t).unwrap();
    let proj = detector_projectors(&c, &[Mode::oam("in", ln), Mode::oam("in", ln1), Mode::oam("in", ln2)]).unwrap();
    let k = proj["C"].single().unwrap();
    assert!(phase_aligned_deviation(k, &oam(&[(ln, 1.0), (ln1, 1.0), (ln2, 1.0)])) < 1e-10);

    let t = SuperpositionTarget::real(&[-1.0, 0.5], &[8, 5]);
    let c: Circuit = build_sgdt(&t).unwrap();
    let proj = detector_projectors(&c, &[Mode::oam("in", 8), Mode::oam("in", 5)]).unwrap();
    assert!(phase_aligned_deviation(proj["C"].single().unwrap(), &oam(&[(8, -1.0), (5, 0.5)])) < 1e-10);

    let t = SuperpositionTarget::real(&[1.0], &[8]);
    let c: Circuit = build_sgdt(&t).unwrap();
    let p = probs(&c, &oam(&[(8, 1.0)]));
    assert!(close(p["C"], 1.0));

    let zero = SuperpositionTarget::real(&[0.0, 0.0], &[1, 2]);
    assert_eq!(build_sgdt::<f64>(&zero).unwrap_err(), BuildError::ZeroTarget);
    let dup = SuperpositionTarget::real(&[1.0, 1.0], &[2, 2]);
    assert_eq!(build_sgdt::<f64>(&dup).unwrap_err(), BuildError::DuplicateValues);
}

#[test]
fn sgdt_complex_target() {
    let t = SuperpositionTarget::new(
        vec![Complex64::new(0.3, -0.4), Complex64::new(-1.0, 0.2), Complex64::new(0.0, 0.7), re(0.1)],
        vec![3, 5, 8, 13],
    );
    let c: Circuit = build_sgdt(&t).unwrap();
    assert!(verify::verify_sgdt(&c, &t).unwrap().passed());
    // the projector is the target itself, not its conjugate
    let psi: PureState = t.values.iter().zip(&t.coefficients).map(|(&v, &a)| (Mode::oam("in", v), a)).collect();
    let psi = psi.normalized();
    let out = c.simulate(&psi).unwrap();
    let pc = out.path_probability(c.detector_path("C").unwrap());
    let norm2: f64 = t.coefficients.iter().map(|a| a.norm_sqr()).sum();
    let amax2 = t.coefficients.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    // |⟨p|ψ⟩|² with p = a/(a_max·√m) and ψ = a/‖a‖
    assert!((pc - norm2 / (amax2 * 4.0)).abs() < 1e-12);
}

#[test]
fn synthesizer_outputs() {
    let out_state = |c: &Circuit, port: &str, vals: &[i64]| {
        let input: PureState = vals.iter().map(|&v| (Mode::oam("in", v), re(1.0))).collect();
        c.simulate(&input).unwrap().restrict_to_path(&PathId::from(port), &PathId::from("in"))
    };
    let t = SuperpositionTarget::real(&[1.0, 1.0], &[13, 5]);
    let c: Circuit = build_synthesizer(&t).unwrap();
    assert!(c.detectors().is_empty());
    assert!(phase_aligned_deviation(&out_state(&c, SYNTH_OUTPUT, &[13, 5]), &oam(&[(13, 1.0), (5, 1.0)])) < 1e-12);
    assert!(phase_aligned_deviation(&out_state(&c, SYNTH_DIFFERENCE, &[13, 5]), &oam(&[(13, 1.0), (5, -1.0)])) < 1e-12);

    let t = SuperpositionTarget::real(&[1.0, -1.0], &[13, 5]);
    let c: Circuit = build_synthesizer(&t).unwrap();
    assert!(phase_aligned_deviation(&out_state(&c, SYNTH_OUTPUT, &[13, 5]), &oam(&[(13, 1.0), (5, -1.0)])) < 1e-12);

    let t = SuperpositionTarget::real(&[1.0], &[21]);
    let c: Circuit = build_synthesizer(&t).unwrap();
    assert!(phase_aligned_deviation(&out_state(&c, SYNTH_OUTPUT, &[21, 34]), &oam(&[(21, 1.0)])) < 1e-12);
}

#[test]
fn mub4_analyzers() {
    let vals = [5, 8, 13, 21];
    let (l, m): (Circuit, Circuit) = build_mub4(vals).unwrap();
    let psi2 = oam(&[(5, 0.5), (8, 0.5), (13, -0.5), (21, -0.5)]);
    let p = probs(&m, &psi2);
    assert!(close(p["M_2"], 1.0));
    for d in ["M_1", "M_3", "M_4"] {
        assert!(p[d] < 1e-30);
    }
    for &v in &vals {
        let p = probs(&m, &oam(&[(v, 1.0)]));
        for k in 1..=4 {
            assert!(close(p[&format!("M_{k}")], 0.25));
        }
        let p = probs(&l, &oam(&[(v, 1.0)]));
        assert!(close(p.values().sum::<f64>(), 1.0));
    }
    assert!(verify::verify_mub4(&l, &m, vals).unwrap().passed());
    assert_eq!(build_mub4::<f64>([1, 2, 2, 3]).unwrap_err(), BuildError::DuplicateValues);
}

#[test]
fn rsg_cell_examples() {
    let c: Circuit = build_rsg_cell().unwrap();
    let psi: PureState = [(Mode::oam("in1", 3), re(H)), (Mode::oam("in2", 5), re(H))].into_iter().collect();
    let out = c.simulate(&psi).unwrap();
    for port in ["out1", "out2", "out3"] {
        assert!(close(out.path_probability(&port.into()), 0.25), "{port}");
    }
    let o3 = out.restrict_to_path(&"out3".into(), &"in".into());
    assert!(phase_aligned_deviation(&o3, &oam(&[(3, 1.0), (5, 1.0)])) < 1e-12);

    let out = c.simulate(&PureState::basis(Mode::oam("in1", 3))).unwrap();
    assert!(out.path_probability(&"out1".into()) > 0.0);
    assert!(out.path_probability(&"out3".into()) > 0.0);
    assert_eq!(out.path_probability(&"out2".into()), 0.0);

    assert!(c.simulate(&PureState::vacuum()).unwrap().is_empty());
}

#[test]
fn rsg_chains() {
    let seq = SequenceSpec::fibonacci(1, 1000);
    let mut previous = f64::INFINITY;
    for p in 1..=4 {
        let c: Circuit = build_rsg(p, &seq).unwrap();
        let report = verify::verify_rsg(&c, p, &seq).unwrap();
        assert!(report.passed(), "p={p}: {report:?}");
        let outs = verify::rsg_outputs(&c, p, &seq).unwrap();
        assert_eq!(outs.len(), p + 2);
        let intensity = outs[p + 1].norm_sqr();
        assert!(intensity < previous);
        if previous.is_finite() {
            assert!(close(intensity, previous / 2.0));
        }
        previous = intensity;
    }
    let gain = SequenceSpec::custom(vec![1, 2], vec![1, -1], 1, 100);
    assert!(build_rsg::<f64>(3, &gain).is_err());
}

#[test]
fn builders_round_trip_through_netlists() {
    let seq = fib();
    let mut all: Vec<Circuit> = vec![
        build_polarization_analyzer().unwrap(),
        build_polarization_pair().unwrap(),
        build_cd_tree(&seq, Parity::Both).unwrap(),
        build_tribonacci_tree(&SequenceSpec::tribonacci(1, 300)).unwrap(),
        build_jump_tree(&SequenceSpec::fibonacci(2, 55)).unwrap(),
        build_sgdt(&SuperpositionTarget::new(vec![Complex64::new(0.1, 0.9), re(-0.3)], vec![4, 9])).unwrap(),
        build_synthesizer(&SuperpositionTarget::real(&[1.0, 0.5, 0.25], &[1, 2, 3])).unwrap(),
        build_rsg_cell().unwrap(),
        build_rsg(3, &seq).unwrap(),
    ];
    let (l, m) = build_mub4([1, 2, 3, 5]).unwrap();
    all.push(l);
    all.push(m);
    for c in all {
        let text = emit(&c);
        let back = parse(&text).unwrap();
        assert_eq!(back, c, "{text}");
        assert_eq!(emit(&back), text);
    }
}

#[test]
fn f32_instantiation_agrees() {
    let seq = SequenceSpec::fibonacci(1, 100);
    let c32: Circuit<f32> = build_cd_tree(&seq, Parity::Odd).unwrap();
    let psi = PureState::<f32>::basis(Mode::oam("in", 8));
    let out = c32.simulate(&psi).unwrap();
    let total: f32 = c32.detectors().values().map(|p| out.path_probability(p)).sum();
    assert!((total - 1.0).abs() < 1e-5);
}
