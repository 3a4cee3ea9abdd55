//! Oracle self-checks for the builders.
//!
//! Every check compares a detector projector (or a synthesized output)
//! against the intended state after normalizing both and removing the
//! relative global phase.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{rsg_output_port, BuildError, Parity, SuperpositionTarget, SYNTH_OUTPUT};
use crate::circuit::Circuit;
use crate::oracle::{detector_projectors, DetectorProjector};
use crate::sequence::{SequenceSpec, Term};
use crate::state::{phase_aligned_deviation, Label, Mode, PathId, Polarization, PureState};

pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: impl Into<String>, deviation: f64) {
        self.checks.push(Check { name: name.into(), deviation });
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.deviation <= TOLERANCE)
    }

    /// `Err` naming the worst check when any exceeds [`TOLERANCE`].
    pub fn into_result(self) -> Result<Self, BuildError> {
        match self.checks.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation)) {
            Some(c) if c.deviation > TOLERANCE => {
                Err(BuildError::Verification { check: c.name.clone(), deviation: c.deviation })
            }
            _ => Ok(self),
        }
    }
}

fn ket(items: &[(i64, Complex64)]) -> PureState {
    items.iter().map(|&(l, a)| (Mode::oam("in", l), a)).collect()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn basis(values: impl IntoIterator<Item = i64>) -> Vec<Mode> {
    values.into_iter().map(|v| Mode::oam("in", v)).collect()
}

fn single_deviation(p: Option<&DetectorProjector>, target: &PureState) -> f64 {
    match p.and_then(|p| p.single()) {
        Some(k) => phase_aligned_deviation(k, target),
        None => f64::INFINITY,
    }
}

fn weight_deviation(p: Option<&DetectorProjector>, expected: f64) -> f64 {
    p.map_or(f64::INFINITY, |p| (p.weight() - expected).abs())
}

/// `C_n ∝ x_n + x_{n−2}`, `D_n ∝ x_n − x_{n−2}`, weight ½ each.
pub fn verify_cd_tree(circuit: &Circuit, seq: &SequenceSpec, parity: Parity) -> Result<Report, BuildError> {
    let terms = seq.terms()?;
    let keep = |t: &Term| match parity {
        Parity::Even => t.index % 2 == 0,
        Parity::Odd => t.index % 2 == 1,
        Parity::Both => true,
    };
    let used: Vec<Term> = terms.iter().copied().filter(keep).collect();
    let proj = detector_projectors(circuit, &basis(used.iter().map(|t| t.value)))?;
    let mut r = Report::default();
    for lo in &used {
        let Some(hi) = used.iter().find(|t| t.index == lo.index + 2) else { continue };
        let n = hi.index;
        let (c, d) = (proj.get(&format!("C_{n}")), proj.get(&format!("D_{n}")));
        r.push(format!("C_{n} state"), single_deviation(c, &ket(&[(hi.value, re(1.0)), (lo.value, re(1.0))])));
        r.push(format!("D_{n} state"), single_deviation(d, &ket(&[(hi.value, re(1.0)), (lo.value, re(-1.0))])));
        r.push(format!("C_{n} weight"), weight_deviation(c, 0.5));
        r.push(format!("D_{n} weight"), weight_deviation(d, 0.5));
    }
    Ok(r)
}

/// `C_n ∝ l_n + l_{n−1} + l_{n−2}`, `D_n ∝ l_n − l_{n−1} − l_{n−2}`, weight 3/10.
pub fn verify_tribonacci_tree(circuit: &Circuit, seq: &SequenceSpec) -> Result<Report, BuildError> {
    let terms = seq.terms()?;
    let proj = detector_projectors(circuit, &basis(terms.iter().map(|t| t.value)))?;
    let mut r = Report::default();
    for w in terms.windows(3) {
        let n = w[2].index;
        let (c, d) = (proj.get(&format!("C_{n}")), proj.get(&format!("D_{n}")));
        let plus = ket(&[(w[2].value, re(1.0)), (w[1].value, re(1.0)), (w[0].value, re(1.0))]);
        let minus = ket(&[(w[2].value, re(1.0)), (w[1].value, re(-1.0)), (w[0].value, re(-1.0))]);
        r.push(format!("C_{n} state"), single_deviation(c, &plus));
        r.push(format!("D_{n} state"), single_deviation(d, &minus));
        r.push(format!("C_{n} weight"), weight_deviation(c, 0.3));
        r.push(format!("D_{n} weight"), weight_deviation(d, 0.3));
    }
    Ok(r)
}

/// `C_n ∝ −x_n + ½ x_{n−1}`.
pub fn verify_jump_tree(circuit: &Circuit, seq: &SequenceSpec) -> Result<Report, BuildError> {
    let terms = seq.terms()?;
    let proj = detector_projectors(circuit, &basis(terms.iter().map(|t| t.value)))?;
    let mut r = Report::default();
    for w in terms.windows(2) {
        let n = w[1].index;
        let target = ket(&[(w[1].value, re(-1.0)), (w[0].value, re(0.5))]);
        r.push(format!("C_{n} state"), single_deviation(proj.get(&format!("C_{n}")), &target));
    }
    Ok(r)
}

/// `C ∝ Σ_j a_j |x_j⟩`.
pub fn verify_sgdt(circuit: &Circuit, target: &SuperpositionTarget) -> Result<Report, BuildError> {
    let proj = detector_projectors(circuit, &basis(target.values.iter().copied()))?;
    let want: Vec<(i64, Complex64)> = target.values.iter().copied().zip(target.coefficients.iter().copied()).collect();
    let mut r = Report::default();
    r.push("C state", single_deviation(proj.get("C"), &ket(&want)));
    Ok(r)
}

/// Uniform input at `in` gives `∝ Σ_j a_j |x_j⟩` on the output port.
pub fn verify_synthesizer(circuit: &Circuit, target: &SuperpositionTarget) -> Result<Report, BuildError> {
    let input: PureState = target.values.iter().map(|&v| (Mode::oam("in", v), re(1.0))).collect();
    let out = circuit.simulate(&input)?;
    let got = out.restrict_to_path(&PathId::from(SYNTH_OUTPUT), &PathId::from("in"));
    let want: Vec<(i64, Complex64)> = target.values.iter().copied().zip(target.coefficients.iter().copied()).collect();
    let mut r = Report::default();
    r.push("output state", phase_aligned_deviation(&got, &ket(&want)));
    Ok(r)
}

/// `L_k = |x_k⟩`; `M_k` the four sign patterns; all weights 1.
pub fn verify_mub4(l: &Circuit, m: &Circuit, values: [i64; 4]) -> Result<Report, BuildError> {
    let b = basis(values);
    let pl = detector_projectors(l, &b)?;
    let pm = detector_projectors(m, &b)?;
    let signs = [[1.0, 1.0, 1.0, 1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, -1.0, 1.0], [1.0, -1.0, 1.0, -1.0]];
    let mut r = Report::default();
    for k in 0..4 {
        let lk = pl.get(&format!("L_{}", k + 1));
        r.push(format!("L_{} state", k + 1), single_deviation(lk, &ket(&[(values[k], re(1.0))])));
        r.push(format!("L_{} weight", k + 1), weight_deviation(lk, 1.0));
        let pattern: Vec<(i64, Complex64)> = (0..4).map(|i| (values[i], re(signs[k][i]))).collect();
        let mk = pm.get(&format!("M_{}", k + 1));
        r.push(format!("M_{} state", k + 1), single_deviation(mk, &ket(&pattern)));
        r.push(format!("M_{} weight", k + 1), weight_deviation(mk, 1.0));
    }
    Ok(r)
}

/// Output states of the generator for input `(|x_1⟩ + |x_2⟩)/√2`, each
/// moved to a common path `in` for comparison.
pub fn rsg_outputs(circuit: &Circuit, p: usize, seq: &SequenceSpec) -> Result<Vec<PureState>, BuildError> {
    let values = seq.generate()?;
    if values.len() < 2 {
        return Err(BuildError::TooFewValues { needed: 2, got: values.len() });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let input: PureState = [(Mode::oam("in", values[0]), re(h)), (Mode::oam("in", values[1]), re(h))].into_iter().collect();
    let out = circuit.simulate(&input)?;
    Ok((1..=p + 2).map(|k| out.restrict_to_path(&PathId::from(rsg_output_port(k)), &PathId::from("in"))).collect())
}

/// Equal output intensities and `x̂_k ∝ c₁ x̂_{k−1} + c₂ x̂_{k−2}`.
pub fn verify_rsg(circuit: &Circuit, p: usize, seq: &SequenceSpec) -> Result<Report, BuildError> {
    let outs = rsg_outputs(circuit, p, seq)?;
    let (c1, c2) = (seq.coefficients[0] as f64, seq.coefficients[1] as f64);
    let expected = 0.5 * 2f64.powi(-(p as i32));
    let mut r = Report::default();
    for (k, o) in outs.iter().enumerate() {
        r.push(format!("x{} intensity", k + 1), (o.norm_sqr() - expected).abs());
    }
    for k in 2..outs.len() {
        let want = outs[k - 1].normalized().scaled(re(c1)).plus(&outs[k - 2].normalized().scaled(re(c2)));
        r.push(format!("x{} recurrence", k + 1), phase_aligned_deviation(&outs[k], &want));
    }
    Ok(r)
}

/// Probabilities for the four polarization inputs H, V, +45°, −45°.
pub fn polarization_probabilities(circuit: &Circuit) -> Result<BTreeMap<&'static str, BTreeMap<String, f64>>, BuildError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hm = Mode::new("in", Label::Pol(Polarization::H));
    let vm = Mode::new("in", Label::Pol(Polarization::V));
    let inputs: [(&'static str, PureState); 4] = [
        ("H", PureState::basis(hm.clone())),
        ("V", PureState::basis(vm.clone())),
        ("+45", [(hm.clone(), re(h)), (vm.clone(), re(h))].into_iter().collect()),
        ("-45", [(hm, re(-h)), (vm, re(h))].into_iter().collect()),
    ];
    let mut out = BTreeMap::new();
    for (name, psi) in inputs {
        let o = circuit.simulate(&psi)?;
        let probs = circuit.detectors().iter().map(|(d, p)| (d.clone(), o.path_probability(p))).collect();
        out.insert(name, probs);
    }
    Ok(out)
}

/// Expected detector probabilities for the polarization apparatus.
pub fn verify_polarization(circuit: &Circuit, expected: &BTreeMap<&str, BTreeMap<&str, f64>>) -> Result<Report, BuildError> {
    let got = polarization_probabilities(circuit)?;
    let mut r = Report::default();
    for (input, dets) in expected {
        for (det, p) in dets {
            let v = got.get(input).and_then(|m| m.get(*det)).copied().unwrap_or(f64::NAN);
            let dev = if v.is_nan() { f64::INFINITY } else { (v - p).abs() };
            r.push(format!("{input} -> {det}"), dev);
        }
    }
    Ok(r)
}
