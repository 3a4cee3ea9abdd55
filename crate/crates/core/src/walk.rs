//! Quantum walk on one parity chain of a sequence.
//!
//! A stage is the C/D interferometer tree run in the synthesis direction.
//! The walker lives on two coin paths `c` and `d`; the label is the chain
//! value, so the position is the label's place in the chain. At every site
//! a 50/50 splitter mixes `c` and `d` into a down arm and an up arm. The down
//! arm of site `k` interferes with the up arm of site `k−1`. The sum port
//! re-enters `c` at site `k`, the difference port re-enters `d` at site
//! `k−1`. The lowest down arm and the highest up arm are reflected onto `c`
//! and `d` at their own site, which keeps the stage unitary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{BuildError, Parity};
use crate::circuit::{Circuit, CircuitError};
use crate::element::Element;
use crate::sequence::{SequenceError, SequenceSpec};
use crate::state::{Label, Mode, PathId, PureState, TwoPhotonState};

pub const COIN_C: &str = "c";
pub const COIN_D: &str = "d";
const OUT_C: &str = "c_out";
const OUT_D: &str = "d_out";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("chain needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("parity must be even or odd")]
    Parity,
    #[error("mode {0} is not a site of the chain")]
    PortMismatch(String),
    #[error("start value {0} is not on the chain")]
    UnknownStart(i64),
}

/// The values of one parity chain in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub values: Vec<i64>,
}

impl Chain {
    pub fn new(seq: &SequenceSpec, parity: Parity) -> Result<Self, WalkError> {
        let want = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
            Parity::Both => return Err(WalkError::Parity),
        };
        let values: Vec<i64> = seq.terms()?.into_iter().filter(|t| t.index % 2 == want).map(|t| t.value).collect();
        if values.len() < 2 {
            return Err(WalkError::TooFewSites(values.len()));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn site(&self, value: i64) -> Option<usize> {
        self.values.iter().position(|&v| v == value)
    }

    fn site_of(&self, mode: &Mode) -> Result<usize, WalkError> {
        let on_coin = mode.path.as_str() == COIN_C || mode.path.as_str() == COIN_D;
        match mode.label {
            Label::Oam(v) if on_coin => self.site(v).ok_or_else(|| WalkError::PortMismatch(mode.to_string())),
            _ => Err(WalkError::PortMismatch(mode.to_string())),
        }
    }

    /// All `2 × len` coin modes, `c` first.
    pub fn modes(&self) -> Vec<Mode> {
        [COIN_C, COIN_D].iter().flat_map(|p| self.values.iter().map(move |&v| Mode::oam(*p, v))).collect()
    }
}

/// One walk stage with sources `c`, `d` and open outputs `c_out`, `d_out`.
pub fn build_walk_stage(chain: &Chain) -> Result<Circuit, WalkError> {
    let v = &chain.values;
    let k_max = v.len() - 1;
    let mut b = Circuit::builder();
    b.source(COIN_C).source(COIN_D);
    b.push(Element::sorter(COIN_C, "c_rej", v.iter().enumerate().map(|(k, &x)| (Label::Oam(x), PathId::from(format!("c{k}"))))));
    b.push(Element::sorter(COIN_D, "d_rej", v.iter().enumerate().map(|(k, &x)| (Label::Oam(x), PathId::from(format!("d{k}"))))));
    for k in 0..=k_max {
        b.push(Element::hadamard(format!("c{k}"), format!("d{k}"), format!("dn{k}"), format!("up{k}")));
    }
    let mut into_c = vec![(Label::Oam(v[0]), PathId::from("dn0"))];
    let mut into_d = vec![(Label::Oam(v[k_max]), PathId::from(format!("up{k_max}")))];
    for hi in 1..=k_max {
        let lo = hi - 1;
        b.push(Element::shift(format!("dn{hi}"), -v[hi]));
        b.push(Element::shift(format!("up{lo}"), -v[lo]));
        b.push(Element::hadamard(format!("dn{hi}"), format!("up{lo}"), format!("sc{hi}"), format!("sd{hi}")));
        b.push(Element::shift(format!("sc{hi}"), v[hi]));
        b.push(Element::shift(format!("sd{hi}"), v[lo]));
        into_c.push((Label::Oam(v[hi]), PathId::from(format!("sc{hi}"))));
        into_d.push((Label::Oam(v[lo]), PathId::from(format!("sd{hi}"))));
    }
    b.push(Element::merge(OUT_C, "mc_rej", into_c));
    b.push(Element::merge(OUT_D, "md_rej", into_d));
    Ok(b.build()?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub state: PureState,
    pub step: usize,
}

impl WalkState {
    /// The walker at `value` on coin path `coin`.
    pub fn at(coin: &str, value: i64) -> Self {
        Self { state: PureState::basis(Mode::oam(coin, value)), step: 0 }
    }

    pub fn position(&self, chain: &Chain) -> Result<PositionDistribution, WalkError> {
        let mut p = BTreeMap::new();
        for (m, a) in self.state.iter() {
            *p.entry(chain.site_of(m)?).or_insert(0.0) += a.norm_sqr();
        }
        Ok(PositionDistribution { step: self.step, probabilities: p })
    }
}

fn apply_stage(state: &PureState, stage: &Circuit) -> Result<PureState, WalkError> {
    let out = stage.simulate(state)?;
    let mut next = PureState::vacuum();
    for (m, a) in out.iter() {
        let path = match m.path.as_str() {
            OUT_C => COIN_C,
            OUT_D => COIN_D,
            _ => return Err(WalkError::PortMismatch(m.to_string())),
        };
        next.add(Mode::new(path, m.label), *a);
    }
    Ok(next)
}

/// One coherent application of the stage.
pub fn walk_step(state: &WalkState, stage: &Circuit) -> Result<WalkState, WalkError> {
    for m in state.state.modes() {
        if m.path.as_str() != COIN_C && m.path.as_str() != COIN_D {
            return Err(WalkError::PortMismatch(m.to_string()));
        }
    }
    Ok(WalkState { state: apply_stage(&state.state, stage)?, step: state.step + 1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    pub step: usize,
    /// Site index to probability.
    pub probabilities: BTreeMap<usize, f64>,
}

impl PositionDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities.iter().map(|(&k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probabilities.iter().map(|(&k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

/// Walks `steps` stages and reports the position distribution after every
/// step, step 0 included.
///
/// With `measure_each` the walker's mode is measured after every stage, so
/// the distribution is the exact ensemble over measurement records: mode
/// probabilities propagate through `|U_{ij}|²`.
pub fn run_walk(
    chain: &Chain,
    start: &WalkState,
    steps: usize,
    measure_each: bool,
) -> Result<Vec<PositionDistribution>, WalkError> {
    let stage = build_walk_stage(chain)?;
    let mut out = vec![start.position(chain)?];
    if !measure_each {
        let mut s = start.clone();
        for _ in 0..steps {
            s = walk_step(&s, &stage)?;
            out.push(s.position(chain)?);
        }
        return Ok(out);
    }

    let mut columns: BTreeMap<Mode, Vec<(Mode, f64)>> = BTreeMap::new();
    for m in chain.modes() {
        let col = apply_stage(&PureState::basis(m.clone()), &stage)?;
        columns.insert(m, col.iter().map(|(n, a)| (n.clone(), a.norm_sqr())).collect());
    }
    let mut probs: BTreeMap<Mode, f64> = BTreeMap::new();
    for (m, a) in start.state.iter() {
        chain.site_of(m)?;
        *probs.entry(m.clone()).or_insert(0.0) += a.norm_sqr();
    }
    for step in 1..=steps {
        let mut next: BTreeMap<Mode, f64> = BTreeMap::new();
        for (m, p) in &probs {
            for (n, q) in &columns[m] {
                *next.entry(n.clone()).or_insert(0.0) += p * q;
            }
        }
        probs = next;
        let mut pos = BTreeMap::new();
        for (m, p) in &probs {
            *pos.entry(chain.site_of(m)?).or_insert(0.0) += p;
        }
        out.push(PositionDistribution { step, probabilities: pos });
    }
    Ok(out)
}

/// Both photons of a pair walk through their own copy of the stage.
pub fn walk_pair(state: &TwoPhotonState, stage: &Circuit, steps: usize) -> Result<TwoPhotonState, WalkError> {
    let mut s = state.clone();
    for _ in 0..steps {
        let f = |m: &Mode| apply_stage(&PureState::basis(m.clone()), stage);
        s = s.map_slots(f, f)?;
    }
    Ok(s)
}

fn default_walk_sequence() -> SequenceSpec {
    SequenceSpec::custom(vec![1, 2], vec![2, -1], 1, 241)
}
fn default_parity() -> Parity {
    Parity::Odd
}
fn default_coin() -> String {
    COIN_C.to_string()
}
fn default_steps() -> usize {
    50
}

/// File-level description of a walk run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    #[serde(default = "default_walk_sequence")]
    pub sequence: SequenceSpec,
    #[serde(default = "default_parity")]
    pub parity: Parity,
    /// Starting value; the middle site of the chain when absent.
    #[serde(default)]
    pub start: Option<i64>,
    #[serde(default = "default_coin")]
    pub coin: String,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub measure_each: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            sequence: default_walk_sequence(),
            parity: default_parity(),
            start: None,
            coin: default_coin(),
            steps: default_steps(),
            measure_each: false,
        }
    }
}

impl WalkConfig {
    pub fn chain(&self) -> Result<Chain, WalkError> {
        Chain::new(&self.sequence, self.parity)
    }

    pub fn start_state(&self, chain: &Chain) -> Result<WalkState, WalkError> {
        if self.coin != COIN_C && self.coin != COIN_D {
            return Err(WalkError::PortMismatch(self.coin.clone()));
        }
        let value = self.start.unwrap_or(chain.values[chain.len() / 2]);
        if chain.site(value).is_none() {
            return Err(WalkError::UnknownStart(value));
        }
        Ok(WalkState::at(&self.coin, value))
    }

    pub fn run(&self) -> Result<Vec<PositionDistribution>, WalkError> {
        let chain = self.chain()?;
        let start = self.start_state(&chain)?;
        run_walk(&chain, &start, self.steps, self.measure_each)
    }
}

/// `step,position,probability` rows.
pub fn to_csv(dists: &[PositionDistribution]) -> String {
    let mut s = String::from("step,position,probability\n");
    for d in dists {
        for (k, p) in &d.probabilities {
            let _ = writeln!(s, "{},{},{:?}", d.step, k, p);
        }
    }
    s
}

/// The walker's amplitude on `(coin, value)`.
pub fn amplitude(state: &WalkState, coin: &str, value: i64) -> Complex64 {
    state.state.get(&Mode::oam(coin, value))
}
