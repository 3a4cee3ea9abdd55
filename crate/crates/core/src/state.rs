//! Sparse single- and two-photon states over `(path, label)` modes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{negligible, Real};
use crate::sequence::{SequenceError, SequenceSpec};

/// Slack allowed on `‖ψ‖² ≤ 1` before a state counts as unphysical.
pub const NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("invalid label `{0}`")]
    BadLabel(String),
}

/// Name of a spatial path (a wire in a circuit).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathId(Arc<str>);

impl PathId {
    pub fn new(name: &str) -> Self {
        Self(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PathId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for PathId {
    fn from(s: String) -> Self {
        Self(Arc::from(s))
    }
}

impl From<&String> for PathId {
    fn from(s: &String) -> Self {
        Self::new(s)
    }
}

impl Serialize for PathId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for PathId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(PathId::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Internal degree of freedom of a photon on a path: integer OAM charge or a
/// linear polarization tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Oam(i64),
    Pol(Polarization),
}

impl Label {
    pub fn is_oam(self) -> bool {
        matches!(self, Label::Oam(_))
    }

    pub fn same_kind(self, other: Label) -> bool {
        self.is_oam() == other.is_oam()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Oam(l) => write!(f, "{l}"),
            Label::Pol(Polarization::H) => f.write_str("H"),
            Label::Pol(Polarization::V) => f.write_str("V"),
        }
    }
}

impl FromStr for Label {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(Label::Pol(Polarization::H)),
            "V" => Ok(Label::Pol(Polarization::V)),
            _ => s.parse::<i64>().map(Label::Oam).map_err(|_| StateError::BadLabel(s.to_string())),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub path: PathId,
    pub label: Label,
}

impl Mode {
    pub fn new(path: impl Into<PathId>, label: Label) -> Self {
        Self { path: path.into(), label }
    }

    pub fn oam(path: impl Into<PathId>, l: i64) -> Self {
        Self::new(path, Label::Oam(l))
    }

    pub fn pol(path: impl Into<PathId>, p: Polarization) -> Self {
        Self::new(path, Label::Pol(p))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.path, self.label)
    }
}

/// Sparse single-photon amplitude map. May be sub-normalized: whatever is
/// missing from `‖ψ‖²` has been lost to attenuation or discarded ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T = f64> {
    amps: BTreeMap<Mode, Complex<T>>,
}

impl<T: Real> Default for PureState<T> {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl<T: Real> PureState<T> {
    pub fn vacuum() -> Self {
        Self { amps: BTreeMap::new() }
    }

    pub fn basis(mode: Mode) -> Self {
        let mut s = Self::vacuum();
        s.add(mode, Complex::new(T::one(), T::zero()));
        s
    }

    pub fn from_amplitudes(items: impl IntoIterator<Item = (Mode, Complex<T>)>) -> Self {
        let mut s = Self::vacuum();
        for (m, a) in items {
            s.add(m, a);
        }
        s
    }

    /// Adds `amp` to the amplitude of `mode`, dropping the entry if the sum
    /// becomes negligible.
    pub fn add(&mut self, mode: Mode, amp: Complex<T>) {
        use std::collections::btree_map::Entry;
        match self.amps.entry(mode) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + amp;
                if negligible(&v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if !negligible(&amp) {
                    e.insert(amp);
                }
            }
        }
    }

    pub fn get(&self, mode: &Mode) -> Complex<T> {
        self.amps.get(mode).copied().unwrap_or_else(Complex::default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex<T>)> {
        self.amps.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &Mode> {
        self.amps.keys()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.values().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `‖ψ‖² ≤ 1 + NORM_SLACK`.
    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= T::one() + T::lit(NORM_SLACK)
    }

    /// Unit-norm copy; the vacuum stays the vacuum.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            return self.clone();
        }
        self.scaled(Complex::new(n.recip(), T::zero()))
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self::from_amplitudes(self.amps.iter().map(|(m, a)| (m.clone(), *a * c)))
    }

    pub fn conj(&self) -> Self {
        Self::from_amplitudes(self.amps.iter().map(|(m, a)| (m.clone(), a.conj())))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.amps {
            out.add(m.clone(), *a);
        }
        out
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(self, other)
    }

    /// Probability mass on `path`, summed over labels.
    pub fn path_probability(&self, path: &PathId) -> T {
        self.amps
            .iter()
            .filter(|(m, _)| &m.path == path)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr())
    }

    /// Amplitudes on a single path, keyed by label.
    pub fn on_path(&self, path: &PathId) -> BTreeMap<Label, Complex<T>> {
        self.amps
            .iter()
            .filter(|(m, _)| &m.path == path)
            .map(|(m, a)| (m.label, *a))
            .collect()
    }

    /// The part of the state living on `path`, moved onto `to`.
    pub fn restrict_to_path(&self, path: &PathId, to: &PathId) -> Self {
        Self::from_amplitudes(self.on_path(path).into_iter().map(|(l, a)| (Mode::new(to.clone(), l), a)))
    }

    /// Moves every amplitude on `from` to `to`.
    pub fn rename_path(&self, from: &PathId, to: &PathId) -> Self {
        Self::from_amplitudes(self.amps.iter().map(|(m, a)| {
            let path = if &m.path == from { to.clone() } else { m.path.clone() };
            (Mode::new(path, m.label), *a)
        }))
    }

    /// Largest elementwise deviation `max |a(m) − b(m)|`.
    pub fn max_deviation(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (m, a) in &self.amps {
            worst = worst.max((*a - other.get(m)).norm());
        }
        for (m, b) in &other.amps {
            if !self.amps.contains_key(m) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }
}

impl<T: Real> FromIterator<(Mode, Complex<T>)> for PureState<T> {
    fn from_iter<I: IntoIterator<Item = (Mode, Complex<T>)>>(iter: I) -> Self {
        Self::from_amplitudes(iter)
    }
}

/// `⟨a|b⟩ = Σ conj(a(m)) b(m)`; modes present in only one state contribute 0.
pub fn inner<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Complex<T> {
    let (small, large, flip) = if a.len() <= b.len() { (a, b, false) } else { (b, a, true) };
    let mut acc = Complex::default();
    for (m, x) in &small.amps {
        if let Some(y) = large.amps.get(m) {
            acc = acc + if flip { y.conj() * x } else { x.conj() * y };
        }
    }
    acc
}

/// Deviation between two vectors after normalizing both and removing the
/// relative global phase: `max_m |â(m) − e^{iθ} b̂(m)|` with `θ = arg⟨b̂|â⟩`.
pub fn phase_aligned_deviation<T: Real>(a: &PureState<T>, b: &PureState<T>) -> T {
    let (na, nb) = (a.normalized(), b.normalized());
    let ov = inner(&nb, &na);
    let phase = if ov.norm() == T::zero() { Complex::new(T::one(), T::zero()) } else { ov / ov.norm() };
    na.max_deviation(&nb.scaled(phase))
}

/// Which slot of a photon pair an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    A,
    B,
}

/// Sparse amplitude map over ordered photon pairs `(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState<T = f64> {
    amps: BTreeMap<(Mode, Mode), Complex<T>>,
}

impl<T: Real> Default for TwoPhotonState<T> {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl<T: Real> TwoPhotonState<T> {
    pub fn vacuum() -> Self {
        Self { amps: BTreeMap::new() }
    }

    pub fn product(a: &PureState<T>, b: &PureState<T>) -> Self {
        let mut s = Self::vacuum();
        for (ma, xa) in a.iter() {
            for (mb, xb) in b.iter() {
                s.add(ma.clone(), mb.clone(), *xa * *xb);
            }
        }
        s
    }

    pub fn add(&mut self, a: Mode, b: Mode, amp: Complex<T>) {
        use std::collections::btree_map::Entry;
        match self.amps.entry((a, b)) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + amp;
                if negligible(&v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if !negligible(&amp) {
                    e.insert(amp);
                }
            }
        }
    }

    pub fn get(&self, a: &Mode, b: &Mode) -> Complex<T> {
        self.amps.get(&(a.clone(), b.clone())).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Mode, Mode), &Complex<T>)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.values().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn is_physical(&self) -> bool {
        self.norm_sqr() <= T::one() + T::lit(NORM_SLACK)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n == T::zero() {
            return self.clone();
        }
        let k = n.recip();
        let mut out = Self::vacuum();
        for ((a, b), x) in &self.amps {
            out.add(a.clone(), b.clone(), x.scale(k));
        }
        out
    }

    /// Exchanges the roles of the two photons.
    pub fn swapped(&self) -> Self {
        let mut out = Self::vacuum();
        for ((a, b), x) in &self.amps {
            out.add(b.clone(), a.clone(), *x);
        }
        out
    }

    /// Contracts one slot with `⟨bra|` and returns the (unnormalized)
    /// conditional state of the other photon.
    pub fn project(&self, slot: Slot, bra: &PureState<T>) -> PureState<T> {
        let mut out = PureState::vacuum();
        for ((a, b), x) in &self.amps {
            let (measured, kept) = match slot {
                Slot::A => (a, b),
                Slot::B => (b, a),
            };
            let c = bra.get(measured);
            if c != Complex::default() {
                out.add(kept.clone(), c.conj() * x);
            }
        }
        out
    }

    /// Reduced state of one slot when the pair is known to be a product.
    /// Returns `None` when the state is entangled.
    pub fn factor(&self) -> Option<(PureState<T>, PureState<T>)> {
        let ((a0, b0), x0) = self.amps.iter().max_by(|l, r| l.1.norm().partial_cmp(&r.1.norm()).unwrap())?;
        let b_state: PureState<T> =
            self.amps.iter().filter(|((a, _), _)| a == a0).map(|((_, b), x)| (b.clone(), *x)).collect();
        let a_state: PureState<T> =
            self.amps.iter().filter(|((_, b), _)| b == b0).map(|((a, _), x)| (a.clone(), *x / *x0)).collect();
        let rebuilt = Self::product(&a_state, &b_state);
        let tol = T::lit(1e-10);
        let ok = self.amps.iter().all(|((a, b), x)| (*x - rebuilt.get(a, b)).norm() < tol)
            && rebuilt.amps.iter().all(|((a, b), x)| (*x - self.get(a, b)).norm() < tol);
        ok.then_some((a_state, b_state))
    }

    /// Applies independent linear maps to each slot, mode by mode.
    pub fn map_slots<FA, FB, E>(&self, mut fa: FA, mut fb: FB) -> Result<Self, E>
    where
        FA: FnMut(&Mode) -> Result<PureState<T>, E>,
        FB: FnMut(&Mode) -> Result<PureState<T>, E>,
    {
        let mut cache_a: BTreeMap<Mode, PureState<T>> = BTreeMap::new();
        let mut cache_b: BTreeMap<Mode, PureState<T>> = BTreeMap::new();
        let mut out = Self::vacuum();
        for ((a, b), x) in &self.amps {
            if !cache_a.contains_key(a) {
                cache_a.insert(a.clone(), fa(a)?);
            }
            if !cache_b.contains_key(b) {
                cache_b.insert(b.clone(), fb(b)?);
            }
            for (oa, ya) in cache_a[a].iter() {
                for (ob, yb) in cache_b[b].iter() {
                    out.add(oa.clone(), ob.clone(), *x * *ya * *yb);
                }
            }
        }
        Ok(out)
    }
}

/// Families of named single-photon states built on a recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateFamily {
    /// `|F_n⟩`, an OAM eigenstate.
    F,
    /// `(|F_{n−1}⟩ + |F_{n+1}⟩)/√2`.
    S,
    /// `i(|F_n⟩ + |F_{n−2}⟩)/√2`, the state a `C_n` detector looks for.
    C,
    /// `(|F_n⟩ − |F_{n−2}⟩)/√2`, the state a `D_n` detector looks for.
    D,
}

impl FromStr for StateFamily {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "f" => Ok(Self::F),
            "S" | "s" => Ok(Self::S),
            "C" | "c" => Ok(Self::C),
            "D" | "d" => Ok(Self::D),
            _ => Err(StateError::BadLabel(s.to_string())),
        }
    }
}

/// Builds one of the named states on `path`, using `seq` for `F_n`.
pub fn make_named_state<T: Real>(
    family: StateFamily,
    n: i64,
    seq: &SequenceSpec,
    path: impl Into<PathId>,
) -> Result<PureState<T>, StateError> {
    let path = path.into();
    let h = T::FRAC_1_SQRT_2();
    let c = |re: T, im: T| Complex::new(re, im);
    let terms: Vec<(i64, Complex<T>)> = match family {
        StateFamily::F => vec![(seq.value(n)?, c(T::one(), T::zero()))],
        StateFamily::S => vec![(seq.value(n - 1)?, c(h, T::zero())), (seq.value(n + 1)?, c(h, T::zero()))],
        StateFamily::C => vec![(seq.value(n)?, c(T::zero(), h)), (seq.value(n - 2)?, c(T::zero(), h))],
        StateFamily::D => vec![(seq.value(n)?, c(h, T::zero())), (seq.value(n - 2)?, c(-h, T::zero()))],
    };
    Ok(terms.into_iter().map(|(l, a)| (Mode::oam(path.clone(), l), a)).collect())
}
