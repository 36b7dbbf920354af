//! The word model: parameters and observations are words of length at most
//! `M` over a `k`-letter alphabet.
//!
//! A word θ shorter than `M` generates itself with probability
//! `1/(k+1) + δ` and each one-letter extension `θa_i` with probability
//! `1/(k+1) − δ/k`; a full-length word generates itself with probability 1.
//! Observing a full-length `x` makes `x` the MLE with relative likelihood 1,
//! while its truncation `r(x)` gets only `1/(k+1) − δ/k`, even though
//! `P_θ(r(X) = θ) = k/(k+1) − δ` is close to one.
//!
//! Words are indexed by length, then lexicographically: the empty word is
//! index 0, the `k` one-letter words follow, and so on.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ParamGrid, TabularModel};
use crate::scalar::{Rational, Scalar};

/// Default cap on the number of words.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WordModelSpec {
    pub k: u32,
    pub max_len: u32,
    pub delta: Rational,
    pub state_cap: usize,
}

impl WordModelSpec {
    pub fn new(k: u32, max_len: u32, delta: Rational) -> Self {
        Self { k, max_len, delta, state_cap: DEFAULT_STATE_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument("alphabet size k must be at least 2".into()));
        }
        if self.max_len < 1 {
            return Err(Error::InvalidArgument("maximum word length must be at least 1".into()));
        }
        let k = Rational::from_integer(self.k as i64);
        let base = Rational::new(1, self.k as i64 + 1);
        if self.delta <= Rational::from_integer(0) {
            return Err(Error::InvalidArgument("δ must be positive".into()));
        }
        if base + self.delta > Rational::from_integer(1) || base - self.delta / k <= Rational::from_integer(0) {
            return Err(Error::InvalidArgument(format!("δ = {} leaves a probability outside (0, 1)", self.delta)));
        }
        Ok(())
    }

    /// Number of words of length `0..=M`.
    pub fn state_count(&self) -> u128 {
        (0..=self.max_len).map(|l| (self.k as u128).saturating_pow(l)).fold(0u128, u128::saturating_add)
    }

    /// `f_θ(θ)` for a word shorter than `M`.
    pub fn stay_prob(&self) -> Rational {
        Rational::new(1, self.k as i64 + 1) + self.delta
    }

    /// `f_θ(θa_i)` for a word shorter than `M`.
    pub fn extend_prob(&self) -> Rational {
        Rational::new(1, self.k as i64 + 1) - self.delta / Rational::from_integer(self.k as i64)
    }

    /// `P_θ(r(X) = θ) = k/(k+1) − δ` for a word shorter than `M`.
    pub fn parent_prob(&self) -> Rational {
        Rational::new(self.k as i64, self.k as i64 + 1) - self.delta
    }
}

#[derive(Debug, Clone)]
pub struct WordModel<S> {
    spec: WordModelSpec,
    offsets: Vec<usize>,
    grid: Arc<ParamGrid<S>>,
    model: TabularModel<S>,
}

impl<S: Scalar> WordModel<S> {
    /// Builds the model in exact arithmetic (rows are checked to sum to
    /// exactly one) and converts to `S`.
    pub fn build(spec: WordModelSpec) -> Result<Self> {
        spec.validate()?;
        let count = spec.state_count();
        if count > spec.state_cap as u128 {
            return Err(Error::CapExceeded { what: "word model states".into(), count, cap: spec.state_cap as u128 });
        }
        let n = count as usize;
        let k = spec.k as usize;
        let mut offsets = Vec::with_capacity(spec.max_len as usize + 2);
        let mut off = 0usize;
        for l in 0..=spec.max_len {
            offsets.push(off);
            off += k.pow(l);
        }
        offsets.push(off);

        let stay = spec.stay_prob();
        let extend = spec.extend_prob();
        let one = Rational::from_integer(1);
        let mut rows: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(n);
        for l in 0..=spec.max_len as usize {
            for rank in 0..k.pow(l as u32) {
                let i = offsets[l] + rank;
                if l == spec.max_len as usize {
                    rows.push(vec![(i, one)]);
                } else {
                    let mut row = Vec::with_capacity(k + 1);
                    row.push((i, stay));
                    let child0 = offsets[l + 1] + rank * k;
                    row.extend((0..k).map(|c| (child0 + c, extend)));
                    rows.push(row);
                }
            }
        }
        let exact = TabularModel::from_sparse((0..n).map(|i| label(&offsets, k, i)).collect(), vec![one; n], rows)?;
        let model = exact.map_scalar(S::from_rational)?;
        let grid = Arc::new(ParamGrid::atoms((0..n).map(|i| S::from_i64(i as i64)).collect())?);
        Ok(Self { spec, offsets, grid, model })
    }

    pub fn spec(&self) -> &WordModelSpec {
        &self.spec
    }

    pub fn model(&self) -> &TabularModel<S> {
        &self.model
    }

    /// Parameter grid: word indices as scalars.
    pub fn grid(&self) -> &Arc<ParamGrid<S>> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Word length `l(θ)`.
    pub fn length(&self, i: usize) -> u32 {
        (self.offsets.partition_point(|&o| o <= i) - 1) as u32
    }

    /// `r(θ)`: the word with its last letter removed. The empty word has no
    /// truncation.
    pub fn parent(&self, i: usize) -> Option<usize> {
        let l = self.length(i) as usize;
        if l == 0 {
            return None;
        }
        let rank = i - self.offsets[l];
        Some(self.offsets[l - 1] + rank / self.spec.k as usize)
    }

    /// Letters of word `i`, each in `0..k`.
    pub fn letters(&self, i: usize) -> Vec<u32> {
        letters(&self.offsets, self.spec.k as usize, i)
    }

    pub fn index_of(&self, letters: &[u32]) -> Option<usize> {
        let l = letters.len();
        if l > self.spec.max_len as usize || letters.iter().any(|&c| c >= self.spec.k) {
            return None;
        }
        let rank = letters.iter().fold(0usize, |acc, &c| acc * self.spec.k as usize + c as usize);
        Some(self.offsets[l] + rank)
    }

    pub fn label(&self, i: usize) -> String {
        self.model.labels()[i].clone()
    }

    /// `P_θ(r(X) = θ)`, summed over the rows of the model.
    pub fn prob_parent_equals(&self, theta: usize) -> S {
        self.model
            .row(theta)
            .filter(|(x, _)| self.parent(*x) == Some(theta))
            .fold(S::zero(), |acc, (x, _)| acc + self.model.prob(theta, x))
    }
}

fn letters(offsets: &[usize], k: usize, i: usize) -> Vec<u32> {
    let l = offsets.partition_point(|&o| o <= i) - 1;
    let mut rank = i - offsets[l];
    let mut out = vec![0u32; l];
    for slot in out.iter_mut().rev() {
        *slot = (rank % k) as u32;
        rank /= k;
    }
    out
}

fn label(offsets: &[usize], k: usize, i: usize) -> String {
    let ls = letters(offsets, k, i);
    if ls.is_empty() {
        return "ε".to_string();
    }
    ls.iter().map(|c| format!("a{}", c + 1)).collect()
}
