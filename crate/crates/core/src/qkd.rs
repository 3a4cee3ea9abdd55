//! Entanglement-based key distribution over a window of sequence values.
//!
//! The source emits `Σ_n (|x_{n−1}⟩_A |x_{n−2}⟩_B + |x_{n−2}⟩_A |x_{n−1}⟩_B)`
//! over the pair terms that fit the window. Each party sends the photon to
//! either an L analyzer (a sorter, one detector per value) or a D analyzer
//! (the C/D tree over both index parities). An optional eavesdropper
//! intercepts Bob's photon, measures it with the same analyzers and resends
//! what she saw.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{build_cd_tree, BuildError, Parity};
use crate::circuit::Circuit;
use crate::measurement::{
    chi_square, chi_square_threshold, coincidence_probabilities, pick, trial_rng, ChiSquare, CountTable,
    Distribution, MeasureError, LOSS,
};
use crate::oracle::detector_projectors;
use crate::sequence::{SequenceError, SequenceSpec};
use crate::state::{Label, Mode, PathId, PureState, Slot, TwoPhotonState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QkdError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("not enough counts for a chi-square test in any basis pair")]
    InsufficientCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    L,
    D,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::L => "L",
            Basis::D => "D",
        })
    }
}

const PAIRS: [(Basis, Basis); 4] = [(Basis::L, Basis::L), (Basis::L, Basis::D), (Basis::D, Basis::L), (Basis::D, Basis::D)];

fn pair_key(a: Basis, b: Basis) -> String {
    format!("{a}{b}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EveKind {
    #[default]
    None,
    InterceptResendL,
    InterceptResendD,
    InterceptResendRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveModel {
    #[serde(default)]
    pub kind: EveKind,
    /// Chance that a given photon is intercepted.
    #[serde(default = "one")]
    pub probability: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for EveModel {
    fn default() -> Self {
        Self { kind: EveKind::None, probability: 1.0 }
    }
}

impl EveModel {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(kind: EveKind, probability: f64) -> Self {
        Self { kind, probability }
    }

    fn active(&self) -> bool {
        self.kind != EveKind::None && self.probability > 0.0
    }
}

/// Which trials contribute key symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SiftingRule {
    /// Both L; or one D with a C-type outcome; or both D with C-type outcomes.
    #[default]
    CTypeOnly,
    /// Only trials where both parties used L.
    LOnly,
}

fn default_m0() -> i64 {
    2
}
fn default_window() -> usize {
    8
}
fn default_sequence() -> SequenceSpec {
    SequenceSpec::fibonacci(1, 1024)
}
fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Index of the first window value.
    #[serde(default = "default_m0")]
    pub m0: i64,
    /// Number of window values `N`.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Recurrence; its range only bounds generation, the window is cut by index.
    #[serde(default = "default_sequence")]
    pub sequence: SequenceSpec,
    #[serde(default)]
    pub trials: u64,
    /// Probability that a party chooses the L analyzer.
    #[serde(default = "half")]
    pub l_probability: f64,
    #[serde(default)]
    pub eve: EveModel,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sifting: SiftingRule,
    /// Flat chance that Bob's recorded outcome is replaced by a uniformly
    /// random detector of his analyzer.
    #[serde(default)]
    pub symbol_error: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            m0: default_m0(),
            window: default_window(),
            sequence: default_sequence(),
            trials: 0,
            l_probability: 0.5,
            eve: EveModel::none(),
            seed: 0,
            sifting: SiftingRule::default(),
            symbol_error: 0.0,
        }
    }
}

impl ProtocolConfig {
    /// The window as a sequence restricted to `[x_{m0}, x_{m0+N−1}]`.
    pub fn window_sequence(&self) -> Result<SequenceSpec, QkdError> {
        if self.window < 2 {
            return Err(QkdError::Config(format!("window size {} < 2", self.window)));
        }
        let mut wide = self.sequence.clone();
        wide.range = (-wide.label_bound, wide.label_bound);
        let terms = wide.terms()?;
        let at = |i: i64| terms.iter().find(|t| t.index as i64 == i).map(|t| t.value);
        let last = self.m0 + self.window as i64 - 1;
        let (Some(lo), Some(hi)) = (at(self.m0), at(last)) else {
            return Err(QkdError::Config(format!(
                "window indices {}..={} not available within label bound {}",
                self.m0, last, wide.label_bound
            )));
        };
        let mut w = self.sequence.clone();
        w.range = (lo, hi);
        let got = w.terms()?;
        if got.len() != self.window {
            return Err(QkdError::Config("window values are not strictly increasing".into()));
        }
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), QkdError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.l_probability) {
            return Err(QkdError::Config("l_probability outside [0, 1]".into()));
        }
        if !unit(self.eve.probability) {
            return Err(QkdError::Config("eve probability outside [0, 1]".into()));
        }
        if !unit(self.symbol_error) {
            return Err(QkdError::Config("symbol_error outside [0, 1]".into()));
        }
        self.window_sequence().map(|_| ())
    }
}

/// Ideal post-filter source state on path `in` for both slots.
pub fn generate_pair(config: &ProtocolConfig) -> Result<TwoPhotonState, QkdError> {
    let w = config.window_sequence()?;
    let terms = w.terms()?;
    let mut s = TwoPhotonState::vacuum();
    let one = Complex64::new(1.0, 0.0);
    for pair in terms.windows(2) {
        let (older, newer) = (pair[0].value, pair[1].value);
        s.add(Mode::oam("in", newer), Mode::oam("in", older), one);
        s.add(Mode::oam("in", older), Mode::oam("in", newer), one);
    }
    Ok(s.normalized())
}

/// The L analyzer: sorter with detectors `L_k`.
pub fn build_l_analyzer(window: &SequenceSpec) -> Result<Circuit, QkdError> {
    let terms = window.terms()?;
    let mut b = Circuit::builder();
    b.source("in").push(crate::element::Element::sorter(
        "in",
        "rej",
        terms.iter().map(|t| (Label::Oam(t.value), PathId::from(format!("o{}", t.index)))),
    ));
    for t in &terms {
        b.detect(format!("L_{}", t.index), format!("o{}", t.index));
    }
    Ok(b.build().map_err(BuildError::from)?)
}

/// Detector family and index parsed from a detector name.
fn parse_detector(name: &str) -> Option<(char, i64)> {
    let (family, rest) = name.split_once('_')?;
    let kind = match family {
        "L" | "C" | "D" | "E" => family.chars().next()?,
        _ => return None,
    };
    let index = rest.split('_').next()?.parse().ok()?;
    Some((kind, index))
}

/// Analyzer pair and the projectors Eve uses.
#[derive(Debug, Clone)]
pub struct Analyzers {
    pub l: Circuit,
    pub d: Circuit,
    window: SequenceSpec,
}

impl Analyzers {
    pub fn new(config: &ProtocolConfig) -> Result<Self, QkdError> {
        let window = config.window_sequence()?;
        let l = build_l_analyzer(&window)?;
        let d = build_cd_tree(&window, Parity::Both)?;
        Ok(Self { l, d, window })
    }

    pub fn circuit(&self, b: Basis) -> &Circuit {
        match b {
            Basis::L => &self.l,
            Basis::D => &self.d,
        }
    }

    fn basis_modes(&self) -> Result<Vec<Mode>, QkdError> {
        Ok(self.window.generate()?.into_iter().map(|v| Mode::oam("in", v)).collect())
    }

    /// State Eve prepares after seeing `outcome`.
    fn resend_state(&self, outcome: &str) -> Option<PureState> {
        let (kind, n) = parse_detector(outcome)?;
        let v = |i: i64| self.window.value(i).ok();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let st: PureState = match kind {
            'L' | 'E' => PureState::basis(Mode::oam("in", v(n)?)),
            'C' => [(Mode::oam("in", v(n)?), Complex64::new(h, 0.0)), (Mode::oam("in", v(n - 2)?), Complex64::new(h, 0.0))]
                .into_iter()
                .collect(),
            'D' => [(Mode::oam("in", v(n)?), Complex64::new(h, 0.0)), (Mode::oam("in", v(n - 2)?), Complex64::new(-h, 0.0))]
                .into_iter()
                .collect(),
            _ => return None,
        };
        Some(st)
    }

    /// Eve's outcomes on Bob's photon, each with the collapsed pair
    /// `ψ_A^o ⊗ resend(o)` (unnormalized; squared norm = outcome probability).
    fn intercept_branches(&self, state: &TwoPhotonState, basis: Basis) -> Result<Vec<(String, TwoPhotonState)>, QkdError> {
        let proj = detector_projectors(self.circuit(basis), &self.basis_modes()?).map_err(BuildError::from)?;
        let mut out = Vec::new();
        for (name, p) in proj {
            let Some(ket) = p.single() else {
                return Err(QkdError::Config(format!("detector {name} is not a single projector")));
            };
            let alice = state.project(Slot::B, ket);
            let weight = alice.norm_sqr();
            if weight < 1e-14 {
                continue;
            }
            let resend = self.resend_state(&name).ok_or_else(|| QkdError::Config(format!("no resend state for {name}")))?;
            out.push((name, TwoPhotonState::product(&alice, &resend)));
        }
        Ok(out)
    }
}

/// Applies the intercept-resend channel once, drawing from `rng`.
pub fn eve_channel<R: Rng>(
    analyzers: &Analyzers,
    model: &EveModel,
    state: &TwoPhotonState,
    rng: &mut R,
) -> Result<TwoPhotonState, QkdError> {
    if !model.active() || rng.random::<f64>() >= model.probability {
        return Ok(state.clone());
    }
    let basis = eve_basis(model.kind, rng);
    let branches = analyzers.intercept_branches(state, basis)?;
    let u: f64 = rng.random::<f64>() * state.norm_sqr();
    let mut acc = 0.0;
    for (_, s) in &branches {
        acc += s.norm_sqr();
        if u < acc {
            return Ok(s.normalized());
        }
    }
    Ok(branches.last().map(|b| b.1.normalized()).unwrap_or_default())
}

fn eve_basis<R: Rng>(kind: EveKind, rng: &mut R) -> Basis {
    match kind {
        EveKind::InterceptResendL | EveKind::None => Basis::L,
        EveKind::InterceptResendD => Basis::D,
        EveKind::InterceptResendRandom => {
            if rng.random::<f64>() < 0.5 {
                Basis::L
            } else {
                Basis::D
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveRecord {
    pub basis: Basis,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub alice_basis: Basis,
    pub bob_basis: Basis,
    pub alice: String,
    pub bob: String,
    pub kept: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alice_symbol: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bob_symbol: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve: Option<EveRecord>,
}

/// Window-relative symbol of an outcome, if it carries one.
fn symbol(outcome: &str, m0: i64) -> Option<i64> {
    match parse_detector(outcome)? {
        ('L', k) => Some(k - m0),
        ('C', n) => Some(n - 1 - m0),
        _ => None,
    }
}

fn is_c_type(outcome: &str) -> bool {
    matches!(parse_detector(outcome), Some(('C', _)))
}

fn sift(rule: SiftingRule, a: Basis, b: Basis, alice: &str, bob: &str) -> bool {
    if alice == LOSS || bob == LOSS {
        return false;
    }
    match (rule, a, b) {
        (_, Basis::L, Basis::L) => true,
        (SiftingRule::LOnly, _, _) => false,
        (SiftingRule::CTypeOnly, Basis::L, Basis::D) => is_c_type(bob),
        (SiftingRule::CTypeOnly, Basis::D, Basis::L) => is_c_type(alice),
        (SiftingRule::CTypeOnly, Basis::D, Basis::D) => is_c_type(alice) && is_c_type(bob),
    }
}

/// Whether two kept outcomes are consistent with a source pair.
///
/// * L/L: the values are adjacent in the sequence.
/// * L(k) with C_n: `{n−2, n}` meets `{k−1, k+1}`.
/// * C_n with C_m: some `a ∈ {n, n−2}`, `b ∈ {m, m−2}` are adjacent.
pub fn consistent(alice: &str, bob: &str) -> bool {
    let (Some(a), Some(b)) = (parse_detector(alice), parse_detector(bob)) else { return false };
    let support = |(kind, i): (char, i64)| -> Vec<i64> {
        match kind {
            'L' => vec![i],
            'C' => vec![i, i - 2],
            _ => vec![],
        }
    };
    let (sa, sb) = (support(a), support(b));
    sa.iter().any(|x| sb.iter().any(|y| (x - y).abs() == 1))
}

/// Sampling tables for one channel branch, one per basis pair.
#[derive(Debug, Clone)]
struct Tables {
    joint: BTreeMap<(Basis, Basis), Vec<(String, f64)>>,
}

fn tables(analyzers: &Analyzers, state: &TwoPhotonState) -> Result<(Tables, BTreeMap<String, Distribution>), QkdError> {
    let st = state.normalized();
    let mut joint = BTreeMap::new();
    let mut dists = BTreeMap::new();
    for (a, b) in PAIRS {
        let d = coincidence_probabilities(analyzers.circuit(a), analyzers.circuit(b), &st)?;
        joint.insert((a, b), d.probabilities.iter().filter(|(_, p)| **p > 0.0).map(|(k, p)| (k.clone(), *p)).collect());
        dists.insert(pair_key(a, b), d);
    }
    Ok((Tables { joint }, dists))
}

/// Eve's outcome table and the pair tables conditioned on each outcome.
type Intercept = (Vec<(String, f64)>, BTreeMap<String, Tables>);

/// Precomputed outcome tables for a configuration.
#[derive(Debug, Clone)]
pub struct Protocol {
    pub config: ProtocolConfig,
    pub analyzers: Analyzers,
    /// No-Eve joint distributions keyed `LL`, `LD`, `DL`, `DD`.
    pub expected: BTreeMap<String, Distribution>,
    clean: Tables,
    /// Eve's outcome table and the resulting pair tables, per Eve basis.
    intercepted: BTreeMap<Basis, Intercept>,
    bob_detectors: BTreeMap<Basis, Vec<String>>,
}

impl Protocol {
    pub fn new(config: ProtocolConfig) -> Result<Self, QkdError> {
        config.validate()?;
        let analyzers = Analyzers::new(&config)?;
        let state = generate_pair(&config)?;
        let (clean, expected) = tables(&analyzers, &state)?;

        let mut intercepted = BTreeMap::new();
        let bases: &[Basis] = match config.eve.kind {
            EveKind::None => &[],
            EveKind::InterceptResendL => &[Basis::L],
            EveKind::InterceptResendD => &[Basis::D],
            EveKind::InterceptResendRandom => &[Basis::L, Basis::D],
        };
        for &eb in bases {
            let mut outcome_table = Vec::new();
            let mut per = BTreeMap::new();
            for (name, branch) in analyzers.intercept_branches(&state, eb)? {
                outcome_table.push((name.clone(), branch.norm_sqr()));
                per.insert(name, tables(&analyzers, &branch)?.0);
            }
            intercepted.insert(eb, (outcome_table, per));
        }
        let bob_detectors =
            [Basis::L, Basis::D].into_iter().map(|b| (b, analyzers.circuit(b).detectors().keys().cloned().collect())).collect();
        Ok(Self { config, analyzers, expected, clean, intercepted, bob_detectors })
    }

    pub fn trial(&self, index: u64) -> TrialRecord {
        let cfg = &self.config;
        let mut rng = trial_rng(cfg.seed, index);
        let mut choose = || if rng.random::<f64>() < cfg.l_probability { Basis::L } else { Basis::D };
        let (a, b) = (choose(), choose());

        let mut eve = None;
        let mut table = &self.clean;
        if cfg.eve.active() && rng.random::<f64>() < cfg.eve.probability {
            let eb = eve_basis(cfg.eve.kind, &mut rng);
            if let Some((outcomes, per)) = self.intercepted.get(&eb) {
                let o = pick(outcomes, rng.random::<f64>());
                if let Some(t) = per.get(o) {
                    table = t;
                }
                eve = Some(EveRecord { basis: eb, outcome: o.to_string() });
            }
        }

        let joint = pick(&table.joint[&(a, b)], rng.random::<f64>());
        let (alice, mut bob) = match joint.split_once('|') {
            Some((x, y)) => (x.to_string(), y.to_string()),
            None => (LOSS.to_string(), LOSS.to_string()),
        };
        if cfg.symbol_error > 0.0 && rng.random::<f64>() < cfg.symbol_error && bob != LOSS {
            let dets = &self.bob_detectors[&b];
            bob = dets[rng.random_range(0..dets.len())].clone();
        }
        let kept = sift(cfg.sifting, a, b, &alice, &bob);
        let (alice_symbol, bob_symbol) =
            if kept { (symbol(&alice, cfg.m0), symbol(&bob, cfg.m0)) } else { (None, None) };
        TrialRecord { trial: index, alice_basis: a, bob_basis: b, alice, bob, kept, alice_symbol, bob_symbol, eve }
    }

    /// Runs `config.trials` trials; the transcript is ordered by trial index
    /// and independent of thread count.
    pub fn run(&self) -> ProtocolRun {
        let transcript: Vec<TrialRecord> = (0..self.config.trials).into_par_iter().map(|i| self.trial(i)).collect();
        ProtocolRun::from_transcript(&self.config, transcript)
    }

    /// Fraction of down-converted pairs that survives the value filter.
    pub fn source_retention(&self) -> Result<f64, QkdError> {
        let w = self.config.window_sequence()?;
        let (lo, hi) = w.range;
        Ok(self.config.window as f64 / (hi - lo + 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRun {
    pub transcript: Vec<TrialRecord>,
    pub alice_symbols: Vec<i64>,
    pub bob_symbols: Vec<i64>,
    /// Symbols as bits, present only when the window size is a power of two.
    pub alice_bits: Option<Vec<u8>>,
    pub bob_bits: Option<Vec<u8>>,
    /// Joint outcome counts keyed `LL`, `LD`, `DL`, `DD`.
    pub statistics: BTreeMap<String, CountTable>,
    pub sifted: u64,
    /// Kept trials whose outcomes satisfy [`consistent`].
    pub agreeing: u64,
}

fn to_bits(symbols: &[i64], width: u32) -> Vec<u8> {
    symbols.iter().flat_map(|&s| (0..width).rev().map(move |b| ((s >> b) & 1) as u8)).collect()
}

impl ProtocolRun {
    fn from_transcript(cfg: &ProtocolConfig, transcript: Vec<TrialRecord>) -> Self {
        let mut statistics: BTreeMap<String, CountTable> = PAIRS.iter().map(|&(a, b)| (pair_key(a, b), CountTable::default())).collect();
        let (mut alice_symbols, mut bob_symbols) = (Vec::new(), Vec::new());
        let (mut sifted, mut agreeing) = (0, 0);
        for r in &transcript {
            let outcome = if r.alice == LOSS { LOSS.to_string() } else { format!("{}|{}", r.alice, r.bob) };
            statistics.get_mut(&pair_key(r.alice_basis, r.bob_basis)).unwrap().record(&outcome);
            if r.kept {
                sifted += 1;
                if consistent(&r.alice, &r.bob) {
                    agreeing += 1;
                }
                if let (Some(a), Some(b)) = (r.alice_symbol, r.bob_symbol) {
                    alice_symbols.push(a);
                    bob_symbols.push(b);
                }
            }
        }
        let width = cfg.window.is_power_of_two().then(|| cfg.window.trailing_zeros());
        let alice_bits = width.map(|w| to_bits(&alice_symbols, w));
        let bob_bits = width.map(|w| to_bits(&bob_symbols, w));
        Self { transcript, alice_symbols, bob_symbols, alice_bits, bob_bits, statistics, sifted, agreeing }
    }

    pub fn agreement_rate(&self) -> Option<f64> {
        (self.sifted > 0).then(|| self.agreeing as f64 / self.sifted as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableTest {
    pub chi_square: ChiSquare,
    pub threshold: f64,
    pub rejects: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub tampered: bool,
    pub alpha: f64,
    pub tests: BTreeMap<String, TableTest>,
    /// Basis pairs without enough counts for a test.
    pub skipped: Vec<String>,
}

/// Pearson test of every basis-pair table against the no-Eve oracle;
/// tampered iff any table rejects at `alpha`.
pub fn detect_eavesdropper(
    statistics: &BTreeMap<String, CountTable>,
    expected: &BTreeMap<String, Distribution>,
    alpha: f64,
) -> Result<Verdict, QkdError> {
    let mut tests = BTreeMap::new();
    let mut skipped = Vec::new();
    for (key, observed) in statistics {
        let Some(exp) = expected.get(key) else {
            return Err(QkdError::Config(format!("no expected distribution for {key}")));
        };
        match chi_square(observed, exp) {
            Ok(cs) => {
                let threshold = chi_square_threshold(cs.dof, alpha);
                tests.insert(key.clone(), TableTest { chi_square: cs, threshold, rejects: cs.statistic >= threshold });
            }
            Err(MeasureError::Degenerate { .. }) | Err(MeasureError::NoTrials) => skipped.push(key.clone()),
            Err(e) => return Err(e.into()),
        }
    }
    if tests.is_empty() {
        return Err(QkdError::InsufficientCounts);
    }
    let tampered = tests.values().any(|t| t.rejects);
    Ok(Verdict { tampered, alpha, tests, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detector_names() {
        assert_eq!(parse_detector("C_12"), Some(('C', 12)));
        assert_eq!(parse_detector("E_4"), Some(('E', 4)));
        assert_eq!(parse_detector("X_1"), None);
        assert_eq!(symbol("L_5", 2), Some(3));
        assert_eq!(symbol("C_5", 2), Some(2));
        assert_eq!(symbol("D_5", 2), None);
    }

    #[test]
    fn consistency_relation() {
        assert!(consistent("L_4", "L_5"));
        assert!(!consistent("L_4", "L_6"));
        assert!(consistent("L_4", "C_5"));
        assert!(consistent("L_4", "C_7"));
        assert!(!consistent("L_4", "C_8"));
        assert!(consistent("C_6", "C_7"));
    }

    #[test]
    fn default_window() {
        let w = ProtocolConfig::default().window_sequence().unwrap();
        assert_eq!(w.generate().unwrap(), vec![2, 3, 5, 8, 13, 21, 34, 55]);
        let bad = ProtocolConfig { window: 1, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
