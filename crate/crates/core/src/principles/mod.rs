//! Statistical principles as relations between finite inference bases.
//!
//! An inference base is a finite model `{f_θ : θ ∈ Θ}` over a finite sample
//! space together with an observed sample point. Three relations are
//! implemented:
//!
//! * **L**: the observed likelihood vectors are proportional with a single
//!   constant `c > 0`.
//! * **S**: there is a bijection between the minimal sufficient quotients
//!   that preserves the quotient models and carries the observed block to
//!   the observed block.
//! * **C**: both bases have the same sample space and observed point, and
//!   conditioning one of them on the observed value of an ancillary
//!   partition gives exactly the other's model.
//!
//! Probabilities are exact rationals by default; float bases are accepted,
//! with proportionality and equality decided up to [`Scalar::tolerance`].

mod text;
mod universe;

use std::collections::HashMap;

pub use text::{format_base, format_bases, parse_bases};
pub use universe::{enumerate_universe, verify_birnbaum, BirnbaumReport, NonTransitivity, UniverseCaps};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Largest sample space for which partitions are enumerated.
pub const MAX_PARTITION_POINTS: usize = 8;
/// Largest universe accepted by [`closure`].
pub const MAX_CLOSURE_UNIVERSE: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceBase<S = Rational> {
    sample_labels: Vec<String>,
    theta_labels: Vec<String>,
    /// `probs[θ][x] = f_θ(x)`.
    probs: Vec<Vec<S>>,
    observed: usize,
}

impl<S: Scalar> InferenceBase<S> {
    pub fn new(
        sample_labels: Vec<String>,
        theta_labels: Vec<String>,
        probs: Vec<Vec<S>>,
        observed: usize,
    ) -> Result<Self> {
        if sample_labels.is_empty() || theta_labels.is_empty() {
            return Err(Error::InvalidModel("inference base needs sample points and parameter values".into()));
        }
        if probs.len() != theta_labels.len() {
            return Err(Error::InvalidModel("one row per parameter value required".into()));
        }
        for (t, row) in probs.iter().enumerate() {
            if row.len() != sample_labels.len() {
                return Err(Error::InvalidModel(format!("row {} has {} entries", theta_labels[t], row.len())));
            }
            if row.iter().any(|p| *p < S::zero() || !p.is_finite_value()) {
                return Err(Error::InvalidModel(format!("row {} has a negative entry", theta_labels[t])));
            }
            let total = crate::scalar::sum(row);
            if !total.approx_eq(&S::one(), &S::tolerance()) {
                return Err(Error::InvalidModel(format!("row {} sums to {total}", theta_labels[t])));
            }
        }
        if observed >= sample_labels.len() {
            return Err(Error::OutOfSampleSpace(format!("observed index {observed}")));
        }
        if !probs.iter().any(|row| row[observed] > S::zero()) {
            return Err(Error::ImpossibleData);
        }
        Ok(Self { sample_labels, theta_labels, probs, observed })
    }

    /// Labels `x1…` and `θ1…`.
    pub fn from_rows(probs: Vec<Vec<S>>, observed: usize) -> Result<Self> {
        let nx = probs.first().map_or(0, Vec::len);
        let xs = (1..=nx).map(|i| format!("x{i}")).collect();
        let ts = (1..=probs.len()).map(|i| format!("θ{i}")).collect();
        Self::new(xs, ts, probs, observed)
    }

    pub fn sample_labels(&self) -> &[String] {
        &self.sample_labels
    }

    pub fn theta_labels(&self) -> &[String] {
        &self.theta_labels
    }

    pub fn probs(&self) -> &[Vec<S>] {
        &self.probs
    }

    pub fn observed(&self) -> usize {
        self.observed
    }

    pub fn n_samples(&self) -> usize {
        self.sample_labels.len()
    }

    pub fn n_thetas(&self) -> usize {
        self.theta_labels.len()
    }

    /// `(f_θ(x))_θ`.
    pub fn likelihood(&self, x: usize) -> Vec<S> {
        self.probs.iter().map(|row| row[x].clone()).collect()
    }

    /// `(P_θ(B))_θ`.
    pub fn block_prob(&self, block: &[usize]) -> Vec<S> {
        self.probs.iter().map(|row| block.iter().fold(S::zero(), |acc, &x| acc + row[x].clone())).collect()
    }

    /// Model of the minimal sufficient statistic; sample labels of the
    /// quotient are the member labels joined with `|`.
    pub fn quotient(&self) -> Self {
        let part = minimal_sufficient_partition(self);
        let labels = part
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| self.sample_labels[x].as_str()).collect::<Vec<_>>().join("|"))
            .collect();
        let probs = (0..self.n_thetas())
            .map(|t| {
                part.blocks.iter().map(|b| b.iter().fold(S::zero(), |acc, &x| acc + self.probs[t][x].clone())).collect()
            })
            .collect();
        let observed = part.block_of(self.observed);
        Self { sample_labels: labels, theta_labels: self.theta_labels.clone(), probs, observed }
    }

    /// The model conditioned on `block`, which must have the same positive
    /// probability under every θ. Points outside the block get probability 0.
    pub fn condition_on(&self, block: &[usize]) -> Option<Self> {
        let pb = self.block_prob(block);
        if !(pb[0] > S::zero())
            || pb.iter().any(|p| !p.approx_eq(&pb[0], &S::tolerance()))
            || !block.contains(&self.observed)
        {
            return None;
        }
        let probs = self
            .probs
            .iter()
            .zip(&pb)
            .map(|(row, p)| {
                (0..row.len())
                    .map(|x| if block.contains(&x) { row[x].clone() / p.clone() } else { S::zero() })
                    .collect()
            })
            .collect();
        Some(Self { probs, ..self.clone() })
    }
}

/// `Some(c)` with `c > 0` and `v = c·w`. Two zero vectors count as
/// proportional with `c = 1`.
pub fn proportional<S: Scalar>(v: &[S], w: &[S]) -> Option<S> {
    if v.len() != w.len() {
        return None;
    }
    let Some(k) = w.iter().position(|x| *x != S::zero()) else {
        return v.iter().all(|x| *x == S::zero()).then(S::one);
    };
    let c = v[k].clone() / w[k].clone();
    if !(c > S::zero()) {
        return None;
    }
    let scale = v.iter().chain(w).cloned().fold(S::zero(), |a, b| S::max_of(a, b.abs()));
    let tol = S::tolerance() * S::max_of(scale, S::one());
    v.iter().zip(w).all(|(a, b)| a.approx_eq(&(c.clone() * b.clone()), &tol)).then_some(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionLabel {
    MinimalSufficient,
    Ancillary,
    Generic,
}

/// A partition of the sample space, blocks sorted by their first element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatisticPartition {
    pub blocks: Vec<Vec<usize>>,
    pub label: PartitionLabel,
}

impl StatisticPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>, label: PartitionLabel) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidArgument("blocks must be disjoint and cover 0..n".into()));
                }
            }
        }
        blocks.sort();
        Ok(Self { blocks, label })
    }

    /// Partition from a restricted-growth labelling `x ↦ block id`.
    pub fn from_labels(labels: &[usize], label: PartitionLabel) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (x, &b) in labels.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks.retain(|b: &Vec<usize>| !b.is_empty());
        blocks.sort();
        Self { blocks, label }
    }

    pub fn n_points(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&x)).expect("point is covered")
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Self) -> bool {
        self.blocks.iter().all(|b| {
            let target = coarser.block_of(b[0]);
            b.iter().all(|&x| coarser.block_of(x) == target)
        })
    }
}

/// Points are equivalent when their likelihood vectors are proportional.
/// Points with probability zero under every θ form one block.
pub fn minimal_sufficient_partition<S: Scalar>(base: &InferenceBase<S>) -> StatisticPartition {
    let mut reps: Vec<(Vec<S>, usize)> = Vec::new();
    let mut labels = Vec::with_capacity(base.n_samples());
    for x in 0..base.n_samples() {
        let v = base.likelihood(x);
        let id = match reps.iter().position(|(w, _)| proportional(&v, w).is_some()) {
            Some(i) => reps[i].1,
            None => {
                reps.push((v, reps.len()));
                reps.len() - 1
            }
        };
        labels.push(id);
    }
    StatisticPartition::from_labels(&labels, PartitionLabel::MinimalSufficient)
}

/// Whether the conditional distribution given each block is the same for
/// every θ that gives the block positive probability.
pub fn is_sufficient<S: Scalar>(base: &InferenceBase<S>, partition: &StatisticPartition) -> bool {
    partition.blocks.iter().all(|b| {
        let pb = base.block_prob(b);
        let conditionals: Vec<Vec<S>> = (0..base.n_thetas())
            .filter(|&t| pb[t] > S::zero())
            .map(|t| b.iter().map(|&x| base.probs[t][x].clone() / pb[t].clone()).collect())
            .collect();
        conditionals.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, c)| a.approx_eq(c, &S::tolerance())))
    })
}

/// Whether every block has the same probability under every θ.
pub fn is_ancillary<S: Scalar>(base: &InferenceBase<S>, partition: &StatisticPartition) -> bool {
    partition.blocks.iter().all(|b| {
        let pb = base.block_prob(b);
        pb.iter().all(|p| p.approx_eq(&pb[0], &S::tolerance()))
    })
}

/// All set partitions of `0..n` with at most `max_blocks` blocks, as
/// restricted-growth labellings.
pub fn set_partitions(n: usize, max_blocks: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_PARTITION_POINTS {
        return Err(Error::CapExceeded {
            what: "sample points for partition enumeration".into(),
            count: n as u128,
            cap: MAX_PARTITION_POINTS as u128,
        });
    }
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut labels = vec![0usize; n];
    fn rec(i: usize, used: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for b in 0..=used.min(max - 1) {
            labels[i] = b;
            rec(i + 1, used.max(b + 1), max, labels, out);
        }
    }
    rec(1, 1, max_blocks.max(1), &mut labels, &mut out);
    Ok(out)
}

/// Every partition with at most `max_blocks` blocks whose block
/// probabilities do not depend on θ. The trivial partition is always among
/// them.
pub fn ancillary_partitions<S: Scalar>(base: &InferenceBase<S>, max_blocks: usize) -> Result<Vec<StatisticPartition>> {
    Ok(set_partitions(base.n_samples(), max_blocks)?
        .iter()
        .map(|l| StatisticPartition::from_labels(l, PartitionLabel::Ancillary))
        .filter(|p| is_ancillary(base, p))
        .collect())
}

fn check_thetas<S: Scalar>(b0: &InferenceBase<S>, b1: &InferenceBase<S>) -> Result<()> {
    if b0.theta_labels != b1.theta_labels {
        return Err(Error::InvalidArgument("inference bases have different parameter lists".into()));
    }
    Ok(())
}

/// `Some(c)` when `f_{0θ}(x0) = c·f_{1θ}(x1)` for every θ.
pub fn related_l<S: Scalar>(b0: &InferenceBase<S>, b1: &InferenceBase<S>) -> Result<Option<S>> {
    check_thetas(b0, b1)?;
    Ok(proportional(&b0.likelihood(b0.observed), &b1.likelihood(b1.observed)))
}

/// Witness for S: `mapping[i]` is the block of `b1`'s minimal sufficient
/// partition matched to block `i` of `b0`'s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficiencyWitness {
    pub partition0: StatisticPartition,
    pub partition1: StatisticPartition,
    pub mapping: Vec<usize>,
}

pub fn related_s<S: Scalar>(b0: &InferenceBase<S>, b1: &InferenceBase<S>) -> Result<Option<SufficiencyWitness>> {
    check_thetas(b0, b1)?;
    let p0 = minimal_sufficient_partition(b0);
    let p1 = minimal_sufficient_partition(b1);
    if p0.blocks.len() != p1.blocks.len() {
        return Ok(None);
    }
    let v0: Vec<Vec<S>> = p0.blocks.iter().map(|b| b0.block_prob(b)).collect();
    let v1: Vec<Vec<S>> = p1.blocks.iter().map(|b| b1.block_prob(b)).collect();
    let same = |a: &[S], c: &[S]| a.iter().zip(c).all(|(x, y)| x.approx_eq(y, &S::tolerance()));
    let (o0, o1) = (p0.block_of(b0.observed), p1.block_of(b1.observed));
    if !same(&v0[o0], &v1[o1]) {
        return Ok(None);
    }
    // Equal vectors are interchangeable, so greedy matching succeeds iff a
    // measure-preserving bijection exists.
    let mut mapping = vec![usize::MAX; v0.len()];
    let mut used = vec![false; v1.len()];
    mapping[o0] = o1;
    used[o1] = true;
    for i in (0..v0.len()).filter(|&i| i != o0) {
        match (0..v1.len()).find(|&j| !used[j] && same(&v0[i], &v1[j])) {
            Some(j) => {
                mapping[i] = j;
                used[j] = true;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(SufficiencyWitness { partition0: p0, partition1: p1, mapping }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionDirection {
    /// `b0` conditioned on the ancillary gives `b1`.
    Forward,
    /// `b1` conditioned on the ancillary gives `b0`.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalityWitness {
    pub ancillary: StatisticPartition,
    pub direction: ConditionDirection,
    /// With relabeling: `permutation[x]` is the point of the conditioned
    /// base that plays the role of `x` in the other base.
    pub permutation: Option<Vec<usize>>,
}

/// C relation with exact equality of sample spaces, observed points and
/// conditional models.
pub fn related_c<S: Scalar>(b0: &InferenceBase<S>, b1: &InferenceBase<S>) -> Result<Option<ConditionalityWitness>> {
    related_c_with(b0, b1, false)
}

/// C relation; with `relabel` the conditional model only has to match the
/// other model up to a permutation of sample points that fixes the
/// observed point.
pub fn related_c_with<S: Scalar>(
    b0: &InferenceBase<S>,
    b1: &InferenceBase<S>,
    relabel: bool,
) -> Result<Option<ConditionalityWitness>> {
    check_thetas(b0, b1)?;
    if b0.n_samples() != b1.n_samples() {
        return Ok(None);
    }
    if !relabel && (b0.sample_labels != b1.sample_labels || b0.observed != b1.observed) {
        return Ok(None);
    }
    for (from, to, direction) in [(b0, b1, ConditionDirection::Forward), (b1, b0, ConditionDirection::Backward)] {
        for anc in ancillary_partitions(from, from.n_samples())? {
            let block = &anc.blocks[anc.block_of(from.observed)];
            let Some(cond) = from.condition_on(block) else { continue };
            if relabel {
                if let Some(perm) = match_columns(&cond, to) {
                    return Ok(Some(ConditionalityWitness { ancillary: anc, direction, permutation: Some(perm) }));
                }
            } else if same_table(&cond.probs, &to.probs) {
                return Ok(Some(ConditionalityWitness { ancillary: anc, direction, permutation: None }));
            }
        }
    }
    Ok(None)
}

fn same_table<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> bool {
    a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| x.approx_eq(y, &S::tolerance())))
}

/// A bijection between sample points of `a` and `b` preserving columns and
/// the observed point.
fn match_columns<S: Scalar>(a: &InferenceBase<S>, b: &InferenceBase<S>) -> Option<Vec<usize>> {
    let same =
        |x: usize, y: usize| a.likelihood(x).iter().zip(b.likelihood(y)).all(|(p, q)| p.approx_eq(&q, &S::tolerance()));
    if !same(a.observed, b.observed) {
        return None;
    }
    let mut perm = vec![usize::MAX; a.n_samples()];
    let mut used = vec![false; b.n_samples()];
    perm[b.observed] = a.observed;
    used[a.observed] = true;
    for y in (0..b.n_samples()).filter(|&y| y != b.observed) {
        let x = (0..a.n_samples()).find(|&x| !used[x] && same(x, y))?;
        perm[y] = x;
        used[x] = true;
    }
    Some(perm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    S,
    C,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeLabels {
    pub s: bool,
    pub c: bool,
    pub l: bool,
}

impl EdgeLabels {
    pub fn has(&self, r: Relation) -> bool {
        match r {
            Relation::S => self.s,
            Relation::C => self.c,
            Relation::L => self.l,
        }
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }

    /// Component representative of every element.
    pub fn roots(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|i| self.find(i)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RelationGraph<S = Rational> {
    pub universe: Vec<InferenceBase<S>>,
    /// Labeled pairs `(i, j)` with `i < j` carrying at least one label.
    pub edges: Vec<(usize, usize, EdgeLabels)>,
    /// Relations whose closure was taken.
    pub closed_over: Vec<Relation>,
    component: Vec<usize>,
}

impl<S: Scalar> RelationGraph<S> {
    pub fn in_closure(&self, i: usize, j: usize) -> bool {
        self.component[i] == self.component[j]
    }

    /// Pairs `(i, j)`, `i < j`, in the reflexive-symmetric-transitive
    /// closure (reflexive pairs omitted).
    pub fn closure_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.universe.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.in_closure(i, j)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize, r: Relation) -> bool {
        if i == j {
            return true;
        }
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().any(|&(x, y, l)| x == a && y == b && l.has(r))
    }
}

/// Labels every pair in `universe` with S, C and L, and closes the union
/// of the `over` relations.
pub fn closure<S: Scalar>(universe: Vec<InferenceBase<S>>, over: &[Relation]) -> Result<RelationGraph<S>> {
    if universe.len() > MAX_CLOSURE_UNIVERSE {
        return Err(Error::CapExceeded {
            what: "closure universe".into(),
            count: universe.len() as u128,
            cap: MAX_CLOSURE_UNIVERSE as u128,
        });
    }
    let n = universe.len();
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&universe[i], &universe[j]);
            if a.theta_labels != b.theta_labels {
                continue;
            }
            let labels = EdgeLabels {
                s: related_s(a, b)?.is_some(),
                c: related_c(a, b)?.is_some(),
                l: related_l(a, b)?.is_some(),
            };
            if labels.s || labels.c || labels.l {
                if over.iter().any(|r| labels.has(*r)) {
                    uf.union(i, j);
                }
                edges.push((i, j, labels));
            }
        }
    }
    Ok(RelationGraph { universe, edges, closed_over: over.to_vec(), component: uf.roots() })
}

/// Groups `0..n` by key, preserving first-seen order.
pub(crate) fn group_by_key<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}
