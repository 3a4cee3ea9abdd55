//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2 as H;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Ratio;
use oamlab::builders::verify::{polarization_probabilities, verify_sgdt};
use oamlab::builders::*;
use oamlab::circuit::Circuit;
use oamlab::element::Element;
use oamlab::netlist::{emit, parse, parse_netlist};
use oamlab::oracle::{check_isometry, detector_projectors, transfer_matrix};
use oamlab::qkd::{detect_eavesdropper, EveKind, EveModel, Protocol, ProtocolConfig};
use oamlab::sequence::{fibonacci_fraction, SequenceSpec};
use oamlab::state::{inner, make_named_state, phase_aligned_deviation, Mode, PathId, PureState, StateFamily};
use oamlab::walk::{build_walk_stage, run_walk, Chain, WalkState, COIN_C};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn near(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    check((got - want).abs() <= tol, || format!("{what}: got {got}, want {want} (tol {tol:e})"))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn oam(items: &[(i64, f64)]) -> PureState {
    items.iter().map(|&(l, a)| (Mode::oam("in", l), re(a))).collect()
}

fn fib(max: i64) -> SequenceSpec {
    SequenceSpec::fibonacci(1, max).with_label_bound(max.max(1024))
}

fn overlap_algebra() -> Outcome {
    let seq = fib(100);
    let n_values = seq.generate().map_err(|e| e.to_string())?.len();
    check(n_values >= 8, || format!("window has {n_values} values"))?;
    let named = |f, n| make_named_state::<f64>(f, n, &seq, "in").map_err(|e| e.to_string());
    let (first, last) = (1i64, n_values as i64);
    let mut checked = 0;
    for n in first + 1..last {
        for m in [n - 2, n + 2] {
            if m > first && m < last {
                near(inner(&named(StateFamily::S, m)?, &named(StateFamily::S, n)?).norm(), 0.5, 1e-12, "|<S_m|S_n>|")?;
                checked += 1;
            }
        }
    }
    for n in first + 2..=last {
        near(inner(&named(StateFamily::C, n)?, &named(StateFamily::D, n)?).norm(), 0.0, 1e-12, "<C_n|D_n>")?;
        for m in [n - 2, n + 2] {
            if m - 2 >= first && m <= last {
                near(inner(&named(StateFamily::C, n)?, &named(StateFamily::D, m)?).norm(), 0.5, 1e-12, "|<C_n|D_m>|")?;
                checked += 1;
            }
        }
    }
    Ok(format!("{n_values} values, {checked} overlaps"))
}

fn polarization() -> Outcome {
    let fig2: Circuit = build_polarization_analyzer().map_err(|e| e.to_string())?;
    let p = polarization_probabilities(&fig2).map_err(|e| e.to_string())?;
    for input in ["H", "V"] {
        near(p[input]["C"], 0.5, 1e-12, &format!("{input} C"))?;
        near(p[input]["D"], 0.5, 1e-12, &format!("{input} D"))?;
    }
    near(p["+45"]["C"], 1.0, 1e-12, "+45 C")?;
    near(p["+45"]["D"], 0.0, 1e-12, "+45 D")?;

    let fig3: Circuit = build_polarization_pair().map_err(|e| e.to_string())?;
    let p = polarization_probabilities(&fig3).map_err(|e| e.to_string())?;
    for input in ["H", "V"] {
        for (d, v) in &p[input] {
            near(*v, 0.25, 1e-12, &format!("{input} {d}"))?;
        }
    }
    for input in ["+45", "-45"] {
        let live: Vec<&String> = p[input].iter().filter(|(_, v)| **v > 1e-12).map(|(d, _)| d).collect();
        check(live.len() == 2, || format!("{input}: live detectors {live:?}"))?;
        for d in live {
            near(p[input][d], 0.5, 1e-12, &format!("{input} {d}"))?;
        }
    }
    Ok("single analyzer and analyzer pair".into())
}

fn cd_tree() -> Outcome {
    let seq = fib(1597);
    let terms = seq.terms().map_err(|e| e.to_string())?;
    check(terms.len() == 16, || format!("{} values", terms.len()))?;
    let c: Circuit = build_cd_tree(&seq, Parity::Both).map_err(|e| e.to_string())?;
    let basis: Vec<Mode> = terms.iter().map(|t| Mode::oam("in", t.value)).collect();
    let proj = detector_projectors(&c, &basis).map_err(|e| e.to_string())?;
    let val = |i: i64| terms.iter().find(|t| t.index as i64 == i).map(|t| t.value);
    let probs = |psi: &PureState| -> Result<BTreeMap<String, f64>, String> {
        let out = c.simulate(psi).map_err(|e| e.to_string())?;
        let sparse: BTreeMap<String, f64> =
            c.detectors().iter().map(|(d, p)| (d.clone(), out.path_probability(p))).collect();
        for (d, p) in &proj {
            near(sparse[d], p.probability(psi), 1e-10, &format!("{d} sparse vs oracle"))?;
        }
        Ok(sparse)
    };
    let mut inputs = 0;
    for t in &terms {
        let n = t.index as i64;
        if let Some(lo) = val(n - 2) {
            let p = probs(&oam(&[(lo, H), (t.value, H)]))?;
            near(p[&format!("D_{n}")], 0.0, 1e-12, &format!("S_{} -> D_{n}", n - 1))?;
            near(p[&format!("C_{n}")], 0.5, 1e-12, &format!("S_{} -> C_{n}", n - 1))?;
            inputs += 1;
        }
        if val(n - 2).is_some() && val(n + 2).is_some() {
            let p = probs(&oam(&[(t.value, 1.0)]))?;
            for d in [format!("C_{n}"), format!("D_{n}"), format!("C_{}", n + 2), format!("D_{}", n + 2)] {
                near(p[&d], 0.25, 1e-12, &format!("F_{n} -> {d}"))?;
            }
            inputs += 1;
        }
    }
    Ok(format!("16-value chain, {inputs} inputs"))
}

fn random_target(rng: &mut ChaCha8Rng) -> SuperpositionTarget {
    let n = rng.random_range(1..=5);
    let mut values: Vec<i64> = (-20..=20).collect::<Vec<_>>().choose_multiple(rng, n).copied().collect();
    values.sort();
    let coefficients = (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(0.05..1.0), rng.random_range(-3.2..3.2)))
        .collect();
    SuperpositionTarget::new(coefficients, values)
}

fn sgdt_generality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut targets: Vec<SuperpositionTarget> = (0..100).map(|_| random_target(&mut rng)).collect();
    targets.push(SuperpositionTarget::real(&[1.0, 1.0, 1.0], &[4, 7, 13]));
    targets.push(SuperpositionTarget::real(&[-1.0, 0.5], &[5, 3]));
    let mut worst: f64 = 0.0;
    for t in &targets {
        let c: Circuit = build_sgdt(t).map_err(|e| e.to_string())?;
        worst = worst.max(verify_sgdt(&c, t).map_err(|e| e.to_string())?.max_deviation());
    }
    check(worst < 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(format!("{} targets, worst {worst:.1e}", targets.len()))
}

fn mub4() -> Outcome {
    let values = [1, 2, 3, 5];
    let (l, m): (Circuit, Circuit) = build_mub4(values).map_err(|e| e.to_string())?;
    let basis: Vec<Mode> = values.iter().map(|&v| Mode::oam("in", v)).collect();
    let kets = |c: &Circuit| -> Result<Vec<PureState>, String> {
        let p = detector_projectors(c, &basis).map_err(|e| e.to_string())?;
        p.values().map(|d| d.single().cloned().ok_or_else(|| "multi-row projector".to_string())).collect()
    };
    let (kl, km) = (kets(&l)?, kets(&m)?);
    check(kl.len() == 4 && km.len() == 4, || "expected four detectors per analyzer".into())?;
    for set in [&kl, &km] {
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                near(inner(a, b).norm(), if i == j { 1.0 } else { 0.0 }, 1e-12, "gram")?;
            }
        }
    }
    for a in &kl {
        for b in &km {
            near(inner(a, b).norm_sqr(), 0.25, 1e-12, "cross overlap")?;
        }
    }
    Ok("16 cross overlaps = 1/4".into())
}

fn rsg() -> Outcome {
    let seq = fib(1000);
    let values = seq.generate().map_err(|e| e.to_string())?;
    let input = oam(&[(values[0], H), (values[1], H)]);
    for p in 1..=4usize {
        let c: Circuit = build_rsg(p, &seq).map_err(|e| e.to_string())?;
        let outs = verify::rsg_outputs(&c, p, &seq).map_err(|e| e.to_string())?;
        let m0 = outs[0].norm();
        for (k, o) in outs.iter().enumerate() {
            near(o.norm(), m0, 1e-10, &format!("p={p} |x{}|", k + 1))?;
        }
        for k in 2..outs.len() {
            let want = outs[k - 1].normalized().plus(&outs[k - 2].normalized()).normalized();
            near(inner(&outs[k].normalized(), &want).norm(), 1.0, 1e-10, &format!("p={p} fidelity x{}", k + 1))?;
        }
        let equalizer = |e: &Element| matches!(e, Element::Attenuator { port, .. }
            if (1..p).any(|k| port.as_str() == rsg_output_port(k)));
        let raw = Circuit::new(
            c.sources().to_vec(),
            c.elements().iter().filter(|e| !equalizer(e)).cloned().collect(),
            c.detectors().iter().map(|(a, b)| (a.clone(), b.clone())),
        )
        .map_err(|e| e.to_string())?;
        let out = raw.simulate(&input).map_err(|e| e.to_string())?;
        for k in 1..p {
            let now = out.path_probability(&PathId::from(rsg_output_port(k)));
            let next = out.path_probability(&PathId::from(rsg_output_port(k + 1)));
            near(next, now / 2.0, 1e-10, &format!("p={p} halving x{k}->x{}", k + 1))?;
        }
    }
    Ok("p = 1..4".into())
}

mod verify {
    pub use oamlab::builders::verify::rsg_outputs;
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t = random_target(&mut rng);
        let det: Circuit = build_sgdt(&t).map_err(|e| e.to_string())?;
        let syn: Circuit = build_synthesizer(&t).map_err(|e| e.to_string())?;
        let basis: Vec<Mode> = t.values.iter().map(|&v| Mode::oam("in", v)).collect();
        let proj = detector_projectors(&det, &basis).map_err(|e| e.to_string())?;
        let ket = proj.get("C").and_then(|p| p.single()).ok_or("no single C projector")?;
        let uniform: PureState = basis.iter().map(|m| (m.clone(), re(1.0))).collect();
        let out = syn.simulate(&uniform).map_err(|e| e.to_string())?;
        let got = out.restrict_to_path(&PathId::from(SYNTH_OUTPUT), &PathId::from("in"));
        worst = worst.max(phase_aligned_deviation(&got.normalized(), &ket.normalized()));
    }
    check(worst < 1e-10, || format!("worst deviation {worst:e}"))?;
    Ok(format!("50 targets, worst {worst:.1e}"))
}

fn filter_fraction() -> Outcome {
    let f = fibonacci_fraction(2, 55);
    check(f == Ratio::new(8, 54), || format!("got {f}"))?;
    let x = *f.numer() as f64 / *f.denom() as f64;
    near(x, 0.1481481481, 1e-9, "decimal")?;
    Ok(format!("{f} = {x:.4}"))
}

fn qkd_null() -> Outcome {
    let p = Protocol::new(ProtocolConfig { trials: 100_000, seed: 2024, ..Default::default() }).map_err(|e| e.to_string())?;
    let run = p.run();
    let v = detect_eavesdropper(&run.statistics, &p.expected, 1e-3).map_err(|e| e.to_string())?;
    check(!v.tampered, || format!("verdict tampered: {:?}", v.tests))?;
    check(run.sifted > 0 && run.agreeing == run.sifted, || format!("{} of {} agree", run.agreeing, run.sifted))?;
    Ok(format!("clean, {} sifted, 100% agreement", run.sifted))
}

fn qkd_tamper() -> Outcome {
    let mut flagged = 0;
    for seed in 0..100 {
        let cfg = ProtocolConfig {
            trials: 10_000,
            seed,
            eve: EveModel::new(EveKind::InterceptResendL, 1.0),
            ..Default::default()
        };
        let p = Protocol::new(cfg).map_err(|e| e.to_string())?;
        let run = p.run();
        if detect_eavesdropper(&run.statistics, &p.expected, 1e-3).map_err(|e| e.to_string())?.tampered {
            flagged += 1;
        }
    }
    check(flagged >= 99, || format!("{flagged}/100 seeds flagged"))?;
    Ok(format!("{flagged}/100 seeds flagged"))
}

fn oracle_fuzz() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_iso: f64 = 0.0;
    let mut lossless = 0;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rc = common::random_circuit(&mut rng);
        check(rc.basis.len() <= 12 && rc.circuit.elements().len() <= 20, || "generator out of bounds".into())?;
        let tm = transfer_matrix(&rc.circuit, &rc.basis).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let psi = common::random_state(&mut rng, &rc.basis);
            let sparse = rc.circuit.simulate(&psi).map_err(|e| e.to_string())?;
            worst = worst.max(sparse.max_deviation(&tm.apply(&psi)));
        }
        if rc.lossless {
            lossless += 1;
            worst_iso = worst_iso.max(check_isometry(&rc.circuit, &rc.basis).map_err(|e| e.to_string())?);
        }
    }
    check(worst < 1e-10, || format!("simulate vs oracle {worst:e}"))?;
    check(worst_iso < 1e-10, || format!("isometry defect {worst_iso:e}"))?;
    Ok(format!("500 circuits ({lossless} lossless), worst {worst:.1e}"))
}

fn walk() -> Outcome {
    let chain = Chain::new(&SequenceSpec::custom(vec![1, 2], vec![2, -1], 1, 241), Parity::Odd).map_err(|e| e.to_string())?;
    build_walk_stage(&chain).map_err(|e| e.to_string())?;
    let start = WalkState::at(COIN_C, chain.values[chain.len() / 2]);
    let measured = run_walk(&chain, &start, 50, true).map_err(|e| e.to_string())?;
    let coherent = run_walk(&chain, &start, 50, false).map_err(|e| e.to_string())?;

    // Markov oracle: every outgoing mode of a site is hit with |amplitude|² = 1/4,
    // two of them at the same site and one on each neighbour.
    let width = 2 * 50 + 1;
    let mut p = vec![0.0; width];
    p[50] = 1.0;
    let mut classical = vec![0.0];
    for _ in 0..50 {
        let mut q = vec![0.0; width];
        for i in 0..width {
            q[i] += 0.5 * p[i];
            if i > 0 {
                q[i - 1] += 0.25 * p[i];
            }
            if i + 1 < width {
                q[i + 1] += 0.25 * p[i];
            }
        }
        p = q;
        let mean: f64 = p.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
        classical.push(p.iter().enumerate().map(|(i, x)| (i as f64 - mean).powi(2) * x).sum());
    }
    let slope = measured[50].variance() / 50.0;
    let oracle = classical[50] / 50.0;
    check((slope - oracle).abs() <= 0.1 * oracle, || format!("slope {slope} vs oracle {oracle}"))?;
    for t in 8..=50 {
        check(coherent[t].variance() > classical[t], || {
            format!("step {t}: coherent {} <= classical {}", coherent[t].variance(), classical[t])
        })?;
    }
    Ok(format!("slope {slope:.3} (oracle {oracle:.3}), coherent variance at 50: {:.1}", coherent[50].variance()))
}

fn dsl() -> Outcome {
    let corpus = common::builder_corpus();
    for (name, c) in &corpus {
        let back = parse(&emit(c)).map_err(|e| format!("{name}: {e}"))?;
        check(&back == c, || format!("{name}: round trip differs"))?;
    }
    let texts: Vec<String> = corpus.iter().map(|(_, c)| emit(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut diagnostics = 0;
    for _ in 0..10_000 {
        let mut bytes: Vec<char> = texts.choose(&mut rng).unwrap().chars().collect();
        for _ in 0..rng.random_range(1..=4) {
            let i = rng.random_range(0..bytes.len());
            match rng.random_range(0..3) {
                0 => {
                    bytes.remove(i);
                }
                1 => bytes.insert(i, *['{', '}', ':', '-', '>', '#', '\n', ' ', '9', '.', 'e', 'q', '\u{3b1}'].choose(&mut rng).unwrap()),
                _ => {
                    let j = rng.random_range(0..bytes.len());
                    bytes.swap(i, j);
                }
            }
        }
        let text: String = bytes.into_iter().collect();
        match catch_unwind(|| parse_netlist(&text)) {
            Err(_) => return Err(format!("parser panicked on:\n{text}")),
            Ok(Err(e)) => {
                check(e.line >= 1 && e.column >= 1 && !e.message.is_empty(), || format!("bad diagnostic {e:?}"))?;
                diagnostics += 1;
            }
            Ok(Ok(_)) => {}
        }
    }
    Ok(format!("{} builders round-trip, {diagnostics}/10000 mutants diagnosed", corpus.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("overlap algebra", 1, overlap_algebra),
        ("polarization analogs", 1, polarization),
        ("C/D tree", 5, cd_tree),
        ("SGDT generality", 30, sgdt_generality),
        ("MUB-4", 1, mub4),
        ("RSG", 5, rsg),
        ("synthesis/detection duality", 15, duality),
        ("Fibonacci filter fraction", 1, filter_fraction),
        ("QKD null test", 60, qkd_null),
        ("QKD tamper test", 120, qkd_tamper),
        ("oracle equivalence fuzz", 60, oracle_fuzz),
        ("walk", 30, walk),
        ("DSL", 30, dsl),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => Err(format!("{detail}; too slow (limit {limit} s)")),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if result.is_err() {
            failed += 1;
        }
        println!("{tag} {:>2} {name:<30} {:>8.3} s  {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
