//! Detector statistics: probabilities, seeded sampling, coincidences and
//! Pearson goodness-of-fit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::state::{PureState, TwoPhotonState};

/// Outcome name used for undetected photons.
pub const LOSS: &str = "loss";

/// Probabilities below this are treated as impossible outcomes.
const ZERO_PROBABILITY: f64 = 1e-12;
/// Minimum expected count of a chi-square cell before pooling.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("no trials")]
    NoTrials,
    #[error("observed outcome `{0}` missing from the expected distribution")]
    UnknownOutcome(String),
    #[error("expected distribution is degenerate ({cells} usable cell(s))")]
    Degenerate { cells: usize },
}

/// Detector firing probabilities plus the undetected remainder.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Distribution {
    pub probabilities: BTreeMap<String, f64>,
    pub loss: f64,
}

impl Distribution {
    /// Fills `loss` so the total is one.
    pub fn from_probabilities(probabilities: BTreeMap<String, f64>) -> Self {
        let sum: f64 = probabilities.values().sum();
        Self { probabilities, loss: (1.0 - sum).max(0.0) }
    }

    pub fn get(&self, outcome: &str) -> f64 {
        if outcome == LOSS {
            return self.loss;
        }
        self.probabilities.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum::<f64>() + self.loss
    }

    /// Outcomes with their probabilities, loss last.
    pub fn outcomes(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probabilities.iter().map(|(k, v)| (k.as_str(), *v)).chain(std::iter::once((LOSS, self.loss)))
    }

    /// Same distribution renormalized on detection.
    pub fn post_selected(&self) -> Self {
        let sum: f64 = self.probabilities.values().sum();
        if sum == 0.0 {
            return self.clone();
        }
        Self { probabilities: self.probabilities.iter().map(|(k, v)| (k.clone(), v / sum)).collect(), loss: 0.0 }
    }
}

/// Sampled outcome counts; `lost` counts trials in which nothing fired.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: BTreeMap<String, u64>,
    pub lost: u64,
    pub trials: u64,
}

impl CountTable {
    pub fn get(&self, outcome: &str) -> u64 {
        if outcome == LOSS {
            return self.lost;
        }
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn record(&mut self, outcome: &str) {
        self.trials += 1;
        if outcome == LOSS {
            self.lost += 1;
        } else {
            *self.counts.entry(outcome.to_string()).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: &CountTable) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.lost += other.lost;
        self.trials += other.trials;
    }
}

/// Per-detector probability `Σ_labels |amplitude|²` on the detector path.
pub fn probabilities(circuit: &Circuit, input: &PureState) -> Result<Distribution, MeasureError> {
    let out = circuit.simulate(input)?;
    let probs = circuit.detectors().iter().map(|(d, p)| (d.clone(), out.path_probability(p))).collect();
    Ok(Distribution::from_probabilities(probs))
}

/// Generator for trial `index` under `seed`: ChaCha8 keyed by the seed,
/// stream number = trial index.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Picks an outcome from a cumulative table given a uniform draw.
pub(crate) fn pick(table: &[(String, f64)], u: f64) -> &str {
    let mut acc = 0.0;
    for (name, p) in table {
        acc += p;
        if u < acc {
            return name;
        }
    }
    LOSS
}

fn outcome_table(dist: &Distribution) -> Vec<(String, f64)> {
    dist.probabilities.iter().filter(|(_, p)| **p > 0.0).map(|(k, p)| (k.clone(), *p)).collect()
}

/// Draws `n` independent outcomes. Trial `i` uses [`trial_rng`]`(seed, i)`,
/// so the table does not depend on how trials are scheduled.
pub fn sample(dist: &Distribution, seed: u64, n: u64) -> CountTable {
    let table = outcome_table(dist);
    const CHUNK: u64 = 4096;
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = CountTable::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let u: f64 = trial_rng(seed, i).random();
                t.record(pick(&table, u));
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CountTable::default(), |mut acc, t| {
            acc.merge(&t);
            acc
        })
}

/// Joint detector probabilities for a photon pair, slot A through
/// `circuit_a` and slot B through `circuit_b`. Outcomes are named
/// `"<dA>|<dB>"`; everything else is loss.
pub fn coincidence_probabilities(
    circuit_a: &Circuit,
    circuit_b: &Circuit,
    joint: &TwoPhotonState,
) -> Result<Distribution, MeasureError> {
    let evolved = joint.map_slots(
        |m| circuit_a.simulate(&PureState::basis(m.clone())),
        |m| circuit_b.simulate(&PureState::basis(m.clone())),
    )?;
    let mut by_path_a: BTreeMap<&crate::state::PathId, Vec<&String>> = BTreeMap::new();
    for (d, p) in circuit_a.detectors() {
        by_path_a.entry(p).or_default().push(d);
    }
    let mut by_path_b: BTreeMap<&crate::state::PathId, Vec<&String>> = BTreeMap::new();
    for (d, p) in circuit_b.detectors() {
        by_path_b.entry(p).or_default().push(d);
    }
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();
    for da in circuit_a.detectors().keys() {
        for db in circuit_b.detectors().keys() {
            probs.insert(format!("{da}|{db}"), 0.0);
        }
    }
    for ((ma, mb), x) in evolved.iter() {
        let (Some(das), Some(dbs)) = (by_path_a.get(&ma.path), by_path_b.get(&mb.path)) else { continue };
        for da in das {
            for db in dbs {
                *probs.get_mut(&format!("{da}|{db}")).unwrap() += x.norm_sqr();
            }
        }
    }
    Ok(Distribution::from_probabilities(probs))
}

/// Pearson statistic and degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

/// Pearson chi-square of `observed` against `expected`.
///
/// Cells with expected count below 5 are pooled; a pool that is itself
/// below 5 is merged into the smallest remaining cell. Observations in a
/// cell with zero expectation make the statistic infinite.
pub fn chi_square(observed: &CountTable, expected: &Distribution) -> Result<ChiSquare, MeasureError> {
    if observed.trials == 0 {
        return Err(MeasureError::NoTrials);
    }
    for k in observed.counts.keys() {
        if !expected.probabilities.contains_key(k) {
            return Err(MeasureError::UnknownOutcome(k.clone()));
        }
    }
    let n = observed.trials as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    let mut impossible_seen = false;
    for (name, p) in expected.outcomes() {
        let o = observed.get(name) as f64;
        if p < ZERO_PROBABILITY {
            impossible_seen |= o > 0.0;
            continue;
        }
        let e = p * n;
        if e < MIN_EXPECTED {
            pool = (pool.0 + o, pool.1 + e);
        } else {
            cells.push((o, e));
        }
    }
    if pool.1 > 0.0 {
        if pool.1 >= MIN_EXPECTED || cells.is_empty() {
            cells.push(pool);
        } else {
            let smallest = (0..cells.len()).min_by(|&a, &b| cells[a].1.total_cmp(&cells[b].1)).unwrap();
            cells[smallest].0 += pool.0;
            cells[smallest].1 += pool.1;
        }
    }
    if cells.len() < 2 {
        return Err(MeasureError::Degenerate { cells: cells.len() });
    }
    let dof = cells.len() - 1;
    if impossible_seen {
        return Ok(ChiSquare { statistic: f64::INFINITY, dof });
    }
    let statistic = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    Ok(ChiSquare { statistic, dof })
}

/// Upper `alpha` quantile of the chi-square distribution with `dof`
/// degrees of freedom.
pub fn chi_square_threshold(dof: usize, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 0.0;
    }
    if alpha <= 0.0 || dof == 0 {
        return f64::INFINITY;
    }
    ChiSquared::new(dof as f64).map(|d| d.inverse_cdf(1.0 - alpha)).unwrap_or(f64::INFINITY)
}

/// `true` when the statistic reaches the rejection threshold.
pub fn rejects(test: &ChiSquare, alpha: f64) -> bool {
    test.statistic >= chi_square_threshold(test.dof, alpha)
}
