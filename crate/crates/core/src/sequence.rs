//! Integer recurrences that pick out the OAM values an apparatus works with.
//!
//! Indexing is 1-based and starts at the first initial value, so the
//! Fibonacci sequence here is `F_1 = 1, F_2 = 2, F_3 = 3, F_4 = 5, ...`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on `|l|` for OAM labels.
pub const DEFAULT_LABEL_BOUND: i64 = 1024;

const MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("recurrence needs at least one coefficient")]
    NoCoefficients,
    #[error("recurrence of order {order} needs {order} initial values, got {got}")]
    InitialLength { order: usize, got: usize },
    #[error("term {index} exceeds the label bound {bound}")]
    Overflow { index: usize, bound: i64 },
    #[error("recurrence does not leave the range within {MAX_TERMS} terms")]
    NonTerminating,
    #[error("sequence values are not strictly increasing inside the range (term {index})")]
    NotIncreasing { index: usize },
    #[error("sequence index {index} is outside the generated range")]
    IndexOutOfRange { index: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Fibonacci,
    Lucas,
    Tribonacci,
    Custom,
}

/// A linear integer recurrence restricted to a closed value range.
///
/// `coefficients[i]` multiplies the term `i + 1` places back, so
/// `x_k = coefficients[0] * x_{k-1} + coefficients[1] * x_{k-2} + ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub initial: Vec<i64>,
    pub coefficients: Vec<i64>,
    pub range: (i64, i64),
    #[serde(default = "default_bound")]
    pub label_bound: i64,
}

fn default_bound() -> i64 {
    DEFAULT_LABEL_BOUND
}

/// One generated value together with its recurrence index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub index: usize,
    pub value: i64,
}

impl SequenceSpec {
    pub fn fibonacci(min: i64, max: i64) -> Self {
        Self::with_kind(SequenceKind::Fibonacci, vec![1, 2], vec![1, 1], min, max)
    }

    /// Lucas numbers with the same shifted indexing: `L_1 = 1, L_2 = 3`.
    pub fn lucas(min: i64, max: i64) -> Self {
        Self::with_kind(SequenceKind::Lucas, vec![1, 3], vec![1, 1], min, max)
    }

    pub fn tribonacci(min: i64, max: i64) -> Self {
        Self::with_kind(SequenceKind::Tribonacci, vec![1, 2, 4], vec![1, 1, 1], min, max)
    }

    pub fn custom(initial: Vec<i64>, coefficients: Vec<i64>, min: i64, max: i64) -> Self {
        Self::with_kind(SequenceKind::Custom, initial, coefficients, min, max)
    }

    fn with_kind(kind: SequenceKind, initial: Vec<i64>, coefficients: Vec<i64>, min: i64, max: i64) -> Self {
        Self {
            kind,
            initial,
            coefficients,
            range: (min, max),
            label_bound: DEFAULT_LABEL_BOUND,
        }
    }

    pub fn with_label_bound(mut self, bound: i64) -> Self {
        self.label_bound = bound;
        self
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// In-range terms with their indices, ascending.
    pub fn terms(&self) -> Result<Vec<Term>, SequenceError> {
        let order = self.coefficients.len();
        if order == 0 {
            return Err(SequenceError::NoCoefficients);
        }
        if self.initial.len() != order {
            return Err(SequenceError::InitialLength { order, got: self.initial.len() });
        }
        let (min, max) = self.range;
        if min > max {
            return Ok(Vec::new());
        }

        let mut window: Vec<i64> = Vec::with_capacity(order);
        let mut out: Vec<Term> = Vec::new();
        let mut above = 0usize;
        let mut rising_run = 0usize;
        for index in 1..=MAX_TERMS {
            let value = if index <= order {
                self.initial[index - 1]
            } else {
                let mut acc: i64 = 0;
                for (back, &c) in self.coefficients.iter().enumerate() {
                    let prev = window[window.len() - 1 - back];
                    acc = c
                        .checked_mul(prev)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(SequenceError::Overflow { index, bound: self.label_bound })?;
                }
                acc
            };

            if value.abs() > self.label_bound && value <= max {
                return Err(SequenceError::Overflow { index, bound: self.label_bound });
            }
            if (min..=max).contains(&value) {
                if let Some(last) = out.last() {
                    if value <= last.value {
                        return Err(SequenceError::NotIncreasing { index });
                    }
                }
                out.push(Term { index, value });
            }

            above = if value > max { above + 1 } else { 0 };
            let rising = window.last().is_none_or(|&prev| value > prev);
            rising_run = if rising { rising_run + 1 } else { 0 };
            if above >= order && (rising_run > order || self.coefficients.iter().all(|&c| c >= 0)) {
                return Ok(out);
            }

            if window.len() == order {
                window.remove(0);
            }
            window.push(value);
        }
        Err(SequenceError::NonTerminating)
    }

    /// In-range values, ascending.
    pub fn generate(&self) -> Result<Vec<i64>, SequenceError> {
        Ok(self.terms()?.into_iter().map(|t| t.value).collect())
    }

    /// The value with recurrence index `index`, provided it lies in range.
    pub fn value(&self, index: i64) -> Result<i64, SequenceError> {
        if index < 1 {
            return Err(SequenceError::IndexOutOfRange { index });
        }
        self.terms()?
            .into_iter()
            .find(|t| t.index as i64 == index)
            .map(|t| t.value)
            .ok_or(SequenceError::IndexOutOfRange { index })
    }

    pub fn index_of(&self, value: i64) -> Result<Option<usize>, SequenceError> {
        Ok(self.terms()?.into_iter().find(|t| t.value == value).map(|t| t.index))
    }
}

/// Fraction of the integers in `[min, max]` that are Fibonacci numbers.
///
/// This is the share of down-converted photons that survives a filter
/// passing only Fibonacci-valued OAM. An empty range gives `0`.
pub fn fibonacci_fraction(min: i64, max: i64) -> Ratio<u64> {
    if min > max {
        return Ratio::from_integer(0);
    }
    let mut hits: u64 = 0;
    let (mut a, mut b): (i128, i128) = (1, 2);
    while a <= max as i128 {
        if a >= min as i128 {
            hits += 1;
        }
        (a, b) = (b, a + b);
    }
    let span = (max as i128 - min as i128 + 1) as u64;
    Ratio::new(hits, span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_window_matches_eight_values() {
        let seq = SequenceSpec::fibonacci(2, 55);
        assert_eq!(seq.generate().unwrap(), vec![2, 3, 5, 8, 13, 21, 34, 55]);
        let idx: Vec<usize> = seq.terms().unwrap().iter().map(|t| t.index).collect();
        assert_eq!(idx, (2..=9).collect::<Vec<_>>());
    }

    #[test]
    fn tribonacci_from_direct_iteration() {
        // independent: iterate T_n = T_{n-1} + T_{n-2} + T_{n-3}
        let mut t = vec![1i64, 2, 4];
        while t.len() < 12 {
            let n = t.len();
            t.push(t[n - 1] + t[n - 2] + t[n - 3]);
        }
        let expected: Vec<i64> = t.into_iter().filter(|&v| v <= 1000).collect();
        assert_eq!(&expected[..6], &[1, 2, 4, 7, 13, 24]);
        assert_eq!(SequenceSpec::tribonacci(1, 1000).generate().unwrap(), expected);
    }

    #[test]
    fn empty_range_is_empty() {
        assert!(SequenceSpec::fibonacci(5, 4).generate().unwrap().is_empty());
        assert!(SequenceSpec::tribonacci(5, 4).generate().unwrap().is_empty());
    }

    #[test]
    fn overflow_past_label_bound() {
        let seq = SequenceSpec::fibonacci(1, 5000);
        assert!(matches!(seq.generate(), Err(SequenceError::Overflow { .. })));
        let seq = SequenceSpec::fibonacci(1, 5000).with_label_bound(5000);
        assert_eq!(seq.generate().unwrap().last(), Some(&4181));
    }

    #[test]
    fn lucas_indices() {
        let seq = SequenceSpec::lucas(1, 50);
        assert_eq!(seq.generate().unwrap(), vec![1, 3, 4, 7, 11, 18, 29, 47]);
        assert_eq!(seq.value(4).unwrap(), 7);
    }

    #[test]
    fn value_lookup_respects_range() {
        let seq = SequenceSpec::fibonacci(2, 55);
        assert_eq!(seq.value(2).unwrap(), 2);
        assert_eq!(seq.value(9).unwrap(), 55);
        assert!(seq.value(1).is_err());
        assert!(seq.value(10).is_err());
        assert_eq!(seq.index_of(21).unwrap(), Some(7));
    }

    #[test]
    fn arithmetic_custom_sequence() {
        let seq = SequenceSpec::custom(vec![1, 2], vec![2, -1], 1, 10);
        assert_eq!(seq.generate().unwrap(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn bad_specs() {
        let seq = SequenceSpec::custom(vec![1], vec![], 1, 10);
        assert_eq!(seq.generate(), Err(SequenceError::NoCoefficients));
        let seq = SequenceSpec::custom(vec![1], vec![1, 1], 1, 10);
        assert!(matches!(seq.generate(), Err(SequenceError::InitialLength { .. })));
        let seq = SequenceSpec::custom(vec![3, 1], vec![1, 1], 1, 100);
        assert!(matches!(seq.generate(), Err(SequenceError::NotIncreasing { .. })));
    }

    #[test]
    fn filter_fraction() {
        assert_eq!(fibonacci_fraction(2, 55), Ratio::new(8, 54));
        assert_eq!(fibonacci_fraction(2, 2), Ratio::new(1, 1));
        assert_eq!(fibonacci_fraction(4, 4), Ratio::new(0, 1));
        assert_eq!(fibonacci_fraction(9, 3), Ratio::new(0, 1));
    }

    #[test]
    fn generation_is_deterministic() {
        let seq = SequenceSpec::fibonacci(1, 1000);
        assert_eq!(seq.generate().unwrap(), seq.generate().unwrap());
    }
}
