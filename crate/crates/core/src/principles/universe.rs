//! Exhaustive check of the sufficiency/conditionality/likelihood relations
//! over every small rational inference base.
//!
//! Pairwise relation tests would cost `O(N²)` partition enumerations, so
//! each relation is reduced to a canonical key computed once per base:
//!
//! * L: the observed likelihood vector divided by its first nonzero entry.
//! * S: the quotient model of the minimal sufficient statistic as a sorted
//!   multiset of block probability vectors, plus the observed block's vector.
//! * C: every base reachable by conditioning on the observed block of an
//!   ancillary partition, looked up by exact table.
//!
//! The unit tests check the keys against the pairwise functions.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{ancillary_partitions, group_by_key, minimal_sufficient_partition, InferenceBase, UnionFind};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest universe the checker will build.
pub const MAX_UNIVERSE: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniverseCaps {
    /// Sample spaces of size `1..=max_samples`.
    pub max_samples: usize,
    pub n_thetas: usize,
    /// Probabilities `p/q` with `q ≤ max_denominator`.
    pub max_denominator: i64,
}

impl Default for UniverseCaps {
    fn default() -> Self {
        Self { max_samples: 3, n_thetas: 2, max_denominator: 4 }
    }
}

fn fractions(max_den: i64) -> Vec<Rational> {
    let mut f: Vec<Rational> = (1..=max_den).flat_map(|q| (0..=q).map(move |p| Rational::new(p, q))).collect();
    f.sort();
    f.dedup();
    f
}

fn distributions(n: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    fn rec(n: usize, left: Rational, values: &[Rational], cur: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if cur.len() + 1 == n {
            if values.contains(&left) {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for v in values.iter().filter(|v| **v <= left) {
            cur.push(*v);
            rec(n, left - v, values, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, Rational::one(), values, &mut Vec::new(), &mut out);
    out
}

/// Every base with `|X| ≤ max_samples`, exactly `n_thetas` rows whose
/// entries have denominators at most `max_denominator`, and an observed
/// point of positive probability under some θ. Labels are `x1…`, `θ1…`.
pub fn enumerate_universe(caps: UniverseCaps) -> Result<Vec<InferenceBase>> {
    if caps.max_samples == 0 || caps.n_thetas == 0 || caps.max_denominator < 1 {
        return Err(Error::InvalidArgument("universe caps must be positive".into()));
    }
    if caps.max_samples > super::MAX_PARTITION_POINTS {
        return Err(Error::CapExceeded {
            what: "sample points per base".into(),
            count: caps.max_samples as u128,
            cap: super::MAX_PARTITION_POINTS as u128,
        });
    }
    let values = fractions(caps.max_denominator);
    let mut out = Vec::new();
    for nx in 1..=caps.max_samples {
        let rows = distributions(nx, &values);
        let models = (rows.len() as u128).saturating_pow(caps.n_thetas as u32);
        let projected = out.len() as u128 + models.saturating_mul(nx as u128);
        if projected > MAX_UNIVERSE as u128 {
            return Err(Error::CapExceeded {
                what: "universe size".into(),
                count: projected,
                cap: MAX_UNIVERSE as u128,
            });
        }
        let mut idx = vec![0usize; caps.n_thetas];
        loop {
            let table: Vec<Vec<Rational>> = idx.iter().map(|&i| rows[i].clone()).collect();
            for x in 0..nx {
                if table.iter().any(|r| r[x] > Rational::zero()) {
                    out.push(InferenceBase::from_rows(table.clone(), x)?);
                }
            }
            let Some(pos) = (0..caps.n_thetas).rev().find(|&k| idx[k] + 1 < rows.len()) else { break };
            idx[pos] += 1;
            idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    Ok(out)
}

pub(crate) fn l_key(b: &InferenceBase) -> Vec<Rational> {
    let v = b.likelihood(b.observed());
    let first = *v.iter().find(|p| !p.is_zero()).expect("observed point has positive probability");
    v.iter().map(|p| p / first).collect()
}

pub(crate) fn s_key(b: &InferenceBase) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let part = minimal_sufficient_partition(b);
    let mut vs: Vec<Vec<Rational>> = part.blocks.iter().map(|bl| b.block_prob(bl)).collect();
    let obs = vs[part.block_of(b.observed())].clone();
    vs.sort();
    (obs, vs)
}

fn table_key(b: &InferenceBase) -> (usize, Vec<Vec<Rational>>) {
    (b.observed(), b.probs().to_vec())
}

/// Distinct conditional bases (other than `b` itself) obtained from
/// ancillary partitions.
fn c_targets(b: &InferenceBase) -> Result<Vec<(usize, Vec<Vec<Rational>>)>> {
    let mut out = Vec::new();
    for anc in ancillary_partitions(b, b.n_samples())? {
        let block = &anc.blocks[anc.block_of(b.observed())];
        if let Some(c) = b.condition_on(block) {
            if c.probs() != b.probs() {
                out.push(table_key(&c));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Bases `first`, `middle`, `last` with C(first, middle) and C(middle, last)
/// but not C(first, last).
#[derive(Debug, Clone, PartialEq)]
pub struct NonTransitivity {
    pub first: InferenceBase,
    pub middle: InferenceBase,
    pub last: InferenceBase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirnbaumReport {
    pub caps: UniverseCaps,
    pub universe_size: usize,
    /// Unordered pairs of distinct bases in each relation.
    pub l_pairs: u64,
    pub s_pairs: u64,
    pub c_pairs: u64,
    /// Pairs in the equivalence relation generated by S ∪ C.
    pub closure_pairs: u64,
    pub s_not_l: u64,
    pub c_not_l: u64,
    pub closure_not_l: u64,
    /// `closure_pairs / l_pairs`.
    pub fraction_of_l: f64,
    pub non_transitivity: Option<NonTransitivity>,
}

impl BirnbaumReport {
    /// S ⊆ L, C ⊆ L, closure ⊆ L, and C is not transitive.
    pub fn consistent(&self) -> bool {
        self.s_not_l == 0 && self.c_not_l == 0 && self.closure_not_l == 0 && self.non_transitivity.is_some()
    }
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Pairs within `outer` groups that are split by `inner` groups.
fn split_pairs(outer: &[usize], inner: &[usize]) -> (u64, u64) {
    let mut outer_sizes: HashMap<usize, u64> = HashMap::new();
    let mut both: HashMap<(usize, usize), u64> = HashMap::new();
    for (&o, &i) in outer.iter().zip(inner) {
        *outer_sizes.entry(o).or_default() += 1;
        *both.entry((o, i)).or_default() += 1;
    }
    let total: u64 = outer_sizes.values().map(|&n| pairs(n)).sum();
    let kept: u64 = both.values().map(|&n| pairs(n)).sum();
    (total, total - kept)
}

/// L key, S key and conditional targets of one base.
type BaseKeys = (Vec<Rational>, (Vec<Rational>, Vec<Vec<Rational>>), Vec<(usize, Vec<Vec<Rational>>)>);

/// Builds the universe for `caps`, labels every pair, and checks the
/// containments of S, C and their equivalence closure in L.
pub fn verify_birnbaum(caps: UniverseCaps) -> Result<BirnbaumReport> {
    let universe = enumerate_universe(caps)?;
    let n = universe.len();
    let keys: Vec<BaseKeys> =
        universe.par_iter().map(|b| Ok((l_key(b), s_key(b), c_targets(b)?))).collect::<Result<_>>()?;

    let l_class = group_by_key(keys.iter().map(|k| &k.0));
    let s_class = group_by_key(keys.iter().map(|k| &k.1));
    let by_table: HashMap<(usize, Vec<Vec<Rational>>), usize> =
        universe.iter().enumerate().map(|(i, b)| (table_key(b), i)).collect();

    let mut c_adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for (i, k) in keys.iter().enumerate() {
        for t in &k.2 {
            if let Some(&j) = by_table.get(t) {
                c_adj[i].insert(j);
                c_adj[j].insert(i);
            }
        }
    }

    let (l_pairs, _) = split_pairs(&l_class, &l_class);
    let (s_pairs, s_not_l) = split_pairs(&s_class, &l_class);
    let mut c_pairs = 0u64;
    let mut c_not_l = 0u64;
    let mut uf = UnionFind::new(n);
    let mut s_rep: HashMap<usize, usize> = HashMap::new();
    for (i, &s) in s_class.iter().enumerate() {
        uf.union(*s_rep.entry(s).or_insert(i), i);
    }
    for (i, adj) in c_adj.iter().enumerate() {
        for &j in adj.iter().filter(|&&j| j > i) {
            c_pairs += 1;
            c_not_l += u64::from(l_class[i] != l_class[j]);
            uf.union(i, j);
        }
    }
    let comp = uf.roots();
    let (closure_pairs, closure_not_l) = split_pairs(&comp, &l_class);

    let mut non_transitivity = None;
    'search: for (m, adj) in c_adj.iter().enumerate() {
        let mut nbrs: Vec<usize> = adj.iter().copied().collect();
        nbrs.sort_unstable();
        for (a, &f) in nbrs.iter().enumerate() {
            for &l in &nbrs[a + 1..] {
                if !c_adj[f].contains(&l) {
                    non_transitivity = Some(NonTransitivity {
                        first: universe[f].clone(),
                        middle: universe[m].clone(),
                        last: universe[l].clone(),
                    });
                    break 'search;
                }
            }
        }
    }

    Ok(BirnbaumReport {
        caps,
        universe_size: n,
        l_pairs,
        s_pairs,
        c_pairs,
        closure_pairs,
        s_not_l,
        c_not_l,
        closure_not_l,
        fraction_of_l: if l_pairs == 0 { 1.0 } else { closure_pairs as f64 / l_pairs as f64 },
        non_transitivity,
    })
}
