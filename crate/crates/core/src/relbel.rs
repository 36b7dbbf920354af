//! Relative belief ratios and the evidence summaries built on them.
//!
//! The relative belief ratio of a set `A` given information `C` is
//! `RB(A|C) = P(A|C) / P(A)`: values above one are evidence in favor of `A`,
//! values below one evidence against. On a grid the ratio for a marginal
//! parameter ψ is the marginal posterior mass over the marginal prior mass,
//! which is also the ratio of the two densities since both live on the same
//! cell.
//!
//! The strength of the evidence is a posterior probability computed from
//! the RB curve itself. Two variants are provided:
//!
//! * [`StrengthVariant::Directional`] (default): for `RB(ψ0) < 1` the
//!   posterior mass of `{RB ≤ RB(ψ0)}`, for `RB(ψ0) > 1` the posterior mass
//!   of `{RB ≥ RB(ψ0)}`, and `1` when `RB(ψ0) = 1`.
//! * [`StrengthVariant::LowerTail`]: the posterior mass of `{RB ≤ RB(ψ0)}`
//!   regardless of direction.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{marginalize, same_grid, EvalModel, MarginalMap, MassTable, ParamGrid, Point};
use crate::likelihood::{argmax, Argmax};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    InFavor,
    Against,
    Neutral,
}

impl Direction {
    pub fn of<S: Scalar>(rb: &S) -> Self {
        let tol = S::tolerance() / S::from_i64(100);
        if rb.approx_eq(&S::one(), &tol) {
            Direction::Neutral
        } else if *rb > S::one() {
            Direction::InFavor
        } else {
            Direction::Against
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::InFavor => "in_favor",
            Direction::Against => "against",
            Direction::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrengthVariant {
    #[default]
    Directional,
    LowerTail,
}

impl StrengthVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            StrengthVariant::Directional => "directional",
            StrengthVariant::LowerTail => "lower_tail",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceVerdict<S> {
    pub direction: Direction,
    pub rb: S,
    pub strength: Option<S>,
    pub variant: Option<StrengthVariant>,
}

impl<S: Scalar> EvidenceVerdict<S> {
    pub fn from_rb(rb: S) -> Self {
        Self { direction: Direction::of(&rb), rb, strength: None, variant: None }
    }
}

/// `RB(A|C) = P(A|C) / P(A)` on a finite probability space.
pub fn rb_set<S: Scalar>(
    space: &MassTable<S>,
    conditioning: impl Fn(&Point<S>) -> bool,
    target: impl Fn(&Point<S>) -> bool,
) -> Result<EvidenceVerdict<S>> {
    let p_c = crate::grid::prob_of(space, &conditioning);
    let p_a = crate::grid::prob_of(space, &target);
    let p_ac = crate::grid::prob_of(space, |p| conditioning(p) && target(p));
    if !(p_c > S::zero()) {
        return Err(Error::ZeroProbability("P(C) = 0".into()));
    }
    if !(p_a > S::zero()) {
        return Err(Error::ZeroProbability("P(A) = 0".into()));
    }
    Ok(EvidenceVerdict::from_rb(p_ac / p_c / p_a))
}

/// Relative belief values over a marginal grid. `rb[i]` is `None` where the
/// marginal prior mass is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RBCurve<S> {
    grid: Arc<ParamGrid<S>>,
    prior: Vec<S>,
    posterior: Vec<S>,
    rb: Vec<Option<S>>,
}

impl<S: Scalar> RBCurve<S> {
    pub fn grid(&self) -> &Arc<ParamGrid<S>> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.rb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rb.is_empty()
    }

    pub fn prior_mass(&self) -> &[S] {
        &self.prior
    }

    pub fn posterior_mass(&self) -> &[S] {
        &self.posterior
    }

    pub fn values(&self) -> &[Option<S>] {
        &self.rb
    }

    /// RB at a codomain index; an error if undefined there.
    pub fn rb_at(&self, psi: usize) -> Result<&S> {
        self.rb
            .get(psi)
            .ok_or_else(|| Error::NotOnGrid(format!("index {psi}")))?
            .as_ref()
            .ok_or_else(|| Error::ZeroProbability(format!("prior mass of {} is zero", self.grid.point(psi))))
    }

    pub fn index_of(&self, psi: &Point<S>) -> Result<usize> {
        self.grid.index_of(psi).ok_or_else(|| Error::NotOnGrid(psi.to_string()))
    }

    pub fn verdict(&self, psi: usize, variant: StrengthVariant) -> Result<EvidenceVerdict<S>> {
        let rb = self.rb_at(psi)?.clone();
        let s = strength(self, psi, variant)?;
        Ok(EvidenceVerdict { direction: Direction::of(&rb), rb, strength: Some(s), variant: Some(variant) })
    }

    fn posterior_where(&self, keep: impl Fn(&S) -> bool) -> S {
        self.rb
            .iter()
            .zip(&self.posterior)
            .filter(|(rb, _)| rb.as_ref().is_some_and(&keep))
            .fold(S::zero(), |acc, (_, m)| acc + m.clone())
    }
}

/// RB curve for ψ = Ψ(θ) (or θ itself when `map` is `None`).
pub fn rb_curve<S: Scalar>(
    prior: &MassTable<S>,
    posterior: &MassTable<S>,
    map: Option<&MarginalMap<S>>,
) -> Result<RBCurve<S>> {
    if !same_grid(prior.grid(), posterior.grid()) {
        return Err(Error::GridMismatch);
    }
    let (prior_m, post_m) = match map {
        Some(map) => (marginalize(prior, map)?, marginalize(posterior, map)?),
        None => (prior.clone(), posterior.clone()),
    };
    let rb = prior_m
        .masses()
        .iter()
        .zip(post_m.masses())
        .map(|(p, q)| (*p > S::zero()).then(|| q.clone() / p.clone()))
        .collect();
    Ok(RBCurve {
        grid: prior_m.grid().clone(),
        prior: prior_m.masses().to_vec(),
        posterior: post_m.masses().to_vec(),
        rb,
    })
}

/// Posterior probability calibrating the evidence at `psi0`.
pub fn strength<S: Scalar>(curve: &RBCurve<S>, psi0: usize, variant: StrengthVariant) -> Result<S> {
    let rb0 = curve.rb_at(psi0)?.clone();
    Ok(match (variant, Direction::of(&rb0)) {
        (StrengthVariant::Directional, Direction::Neutral) => S::one(),
        (StrengthVariant::Directional, Direction::InFavor) => curve.posterior_where(|r| *r >= rb0),
        (StrengthVariant::Directional, Direction::Against) | (StrengthVariant::LowerTail, _) => {
            curve.posterior_where(|r| *r <= rb0)
        }
    })
}

/// [`strength`] at every ψ, from one sort of the curve. `None` where RB is
/// undefined.
pub fn strength_curve<S: Scalar>(curve: &RBCurve<S>, variant: StrengthVariant) -> Vec<Option<S>> {
    let mut order: Vec<usize> = (0..curve.len()).filter(|&i| curve.rb[i].is_some()).collect();
    order.sort_by(|&a, &b| curve.rb[a].partial_cmp(&curve.rb[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = vec![None; curve.len()];
    // tie blocks in increasing RB order, with the posterior mass of each block
    let mut blocks: Vec<(usize, usize, S)> = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let start = k;
        let mut mass = S::zero();
        while k < order.len() && curve.rb[order[k]] == curve.rb[order[start]] {
            mass = mass + curve.posterior[order[k]].clone();
            k += 1;
        }
        blocks.push((start, k, mass));
    }
    let mut below = S::zero();
    let mut upper: Vec<S> = vec![S::zero(); blocks.len()];
    let mut acc = S::zero();
    for (b, (_, _, m)) in blocks.iter().enumerate().rev() {
        acc = acc + m.clone();
        upper[b] = acc.clone();
    }
    for (b, (start, end, m)) in blocks.iter().enumerate() {
        below = below + m.clone();
        for &i in &order[*start..*end] {
            let rb = curve.rb[i].as_ref().expect("defined");
            out[i] = Some(match (variant, Direction::of(rb)) {
                (StrengthVariant::Directional, Direction::Neutral) => S::one(),
                (StrengthVariant::Directional, Direction::InFavor) => upper[b].clone(),
                _ => below.clone(),
            });
        }
    }
    out
}

/// Maximum relative belief estimate.
pub fn mrbe<S: Scalar>(curve: &RBCurve<S>) -> Argmax<S> {
    argmax(&curve.grid, &curve.rb).expect("prior has positive mass somewhere")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Gamma,
    Plausible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionResult<S> {
    pub kind: RegionKind,
    /// Codomain indices in grid order.
    pub members: Vec<usize>,
    /// Posterior content of the region.
    pub content: S,
    /// γ for a γ-region, q for a plausible region.
    pub threshold: S,
}

/// Smallest RB superlevel set whose posterior content reaches `gamma`.
///
/// Points are taken in decreasing RB order, whole tie blocks at a time, so
/// the result is always a superlevel set and may overshoot `gamma`. The
/// first block (the MRBE ties) is always included.
pub fn gamma_region<S: Scalar>(curve: &RBCurve<S>, gamma: S) -> Result<RegionResult<S>> {
    if gamma < S::zero() || gamma > S::one() {
        return Err(Error::InvalidArgument(format!("γ = {gamma} outside [0, 1]")));
    }
    let mut order: Vec<usize> = (0..curve.len()).filter(|&i| curve.rb[i].is_some()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (curve.rb[a].as_ref().unwrap(), curve.rb[b].as_ref().unwrap());
        rb.partial_cmp(ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let target = gamma.clone() - S::tolerance();
    let mut members = Vec::new();
    let mut content = S::zero();
    let mut k = 0;
    while k < order.len() {
        let level = curve.rb[order[k]].clone().unwrap();
        if !members.is_empty() && (content >= target || level <= S::zero()) {
            break;
        }
        while k < order.len() && curve.rb[order[k]].as_ref() == Some(&level) {
            members.push(order[k]);
            content = content + curve.posterior[order[k]].clone();
            k += 1;
        }
    }
    members.sort_unstable();
    Ok(RegionResult { kind: RegionKind::Gamma, members, content, threshold: gamma })
}

/// `{ψ : RB(ψ) > q}` and its posterior content (the plausibility).
pub fn plausible_region<S: Scalar>(curve: &RBCurve<S>, q: S) -> Result<RegionResult<S>> {
    if q < S::zero() {
        return Err(Error::InvalidArgument("q must be nonnegative".into()));
    }
    let members: Vec<usize> = (0..curve.len()).filter(|&i| curve.rb[i].as_ref().is_some_and(|r| *r > q)).collect();
    let content = members.iter().fold(S::zero(), |acc, &i| acc + curve.posterior[i].clone());
    Ok(RegionResult { kind: RegionKind::Plausible, members, content, threshold: q })
}

/// Prior predictive `m(x)` and conditional prior predictive `m(x|ψ)` from a
/// likelihood column.
///
/// When the ψ-slice has zero prior mass and the map is the identity, the
/// conditional predictive given the single point θ = ψ is the model density
/// `f_ψ(x)` itself.
pub(crate) fn predictives<S: Scalar>(
    prior: &MassTable<S>,
    map: &MarginalMap<S>,
    lik: &[S],
    psi: usize,
) -> Result<(S, S)> {
    let mut marginal = S::zero();
    let mut slice_joint = S::zero();
    let mut slice_mass = S::zero();
    for (i, (p, l)) in prior.masses().iter().zip(lik).enumerate() {
        let joint = p.clone() * l.clone();
        marginal = marginal + joint.clone();
        if map.assignment()[i] == psi {
            slice_joint = slice_joint + joint;
            slice_mass = slice_mass + p.clone();
        }
    }
    let conditional = if slice_mass > S::zero() {
        slice_joint / slice_mass
    } else if map.is_identity() {
        lik[psi].clone()
    } else {
        return Err(Error::ZeroProbability(format!("prior mass of ψ = {} is zero", map.codomain().point(psi))));
    };
    Ok((marginal, conditional))
}

/// `RB(ψ0|x) = m(x|ψ0) / m(x)`, computed from prior predictives only.
pub fn rb_via_predictive<S, M>(
    model: &M,
    prior: &MassTable<S>,
    map: &MarginalMap<S>,
    observed: &M::Datum,
    psi0: usize,
) -> Result<S>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
{
    map.check_domain(prior.grid())?;
    if psi0 >= map.codomain().len() {
        return Err(Error::NotOnGrid(format!("codomain index {psi0}")));
    }
    let lik = model.likelihood_column(prior.grid(), observed)?;
    let (marginal, conditional) = predictives(prior, map, &lik, psi0)?;
    if !(marginal > S::zero()) {
        return Err(Error::ZeroPredictive("m(x) = 0".into()));
    }
    Ok(conditional / marginal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionForm {
    /// `P(A∩B) = 0`: two-term decomposition.
    TwoTerm,
    /// `P(A∩B) > 0`: three-term decomposition.
    ThreeTerm,
}

/// Both sides of the additivity identity
/// `RB(A∪B|C) = RB(A|C)P(A|A∪B) + RB(B|C)P(B|A∪B) − RB(A∩B|C)P(A∩B|A∪B)`.
///
/// Terms for zero-probability sets have zero weight and an undefined ratio;
/// they contribute nothing to the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionDecomposition<S> {
    pub form: UnionForm,
    pub lhs: S,
    pub rb_a: Option<S>,
    pub rb_b: Option<S>,
    pub rb_ab: Option<S>,
    pub weight_a: S,
    pub weight_b: S,
    pub weight_ab: S,
    pub rhs: S,
}

pub fn rb_union<S: Scalar>(
    space: &MassTable<S>,
    conditioning: impl Fn(&Point<S>) -> bool,
    a: impl Fn(&Point<S>) -> bool,
    b: impl Fn(&Point<S>) -> bool,
) -> Result<UnionDecomposition<S>> {
    use crate::grid::prob_of;
    let p_c = prob_of(space, &conditioning);
    if !(p_c > S::zero()) {
        return Err(Error::ZeroProbability("P(C) = 0".into()));
    }
    let p_union = prob_of(space, |p| a(p) || b(p));
    if !(p_union > S::zero()) {
        return Err(Error::ZeroProbability("P(A∪B) = 0".into()));
    }
    let rb = |set: &dyn Fn(&Point<S>) -> bool| -> (Option<S>, S) {
        let p_set = prob_of(space, set);
        if !(p_set > S::zero()) {
            return (None, S::zero());
        }
        let p_joint = prob_of(space, |p| set(p) && conditioning(p));
        (Some(p_joint / p_c.clone() / p_set.clone()), p_set / p_union.clone())
    };
    let (lhs, _) = rb(&|p| a(p) || b(p));
    let (rb_a, weight_a) = rb(&a);
    let (rb_b, weight_b) = rb(&b);
    let (rb_ab, weight_ab) = rb(&|p| a(p) && b(p));
    let term = |r: &Option<S>, w: &S| r.clone().map_or(S::zero(), |r| r * w.clone());
    let rhs = term(&rb_a, &weight_a) + term(&rb_b, &weight_b) - term(&rb_ab, &weight_ab);
    let form = if rb_ab.is_some() { UnionForm::ThreeTerm } else { UnionForm::TwoTerm };
    Ok(UnionDecomposition {
        form,
        lhs: lhs.expect("P(A∪B) > 0"),
        rb_a,
        rb_b,
        rb_ab,
        weight_a,
        weight_b,
        weight_ab,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{condition, TabularModel};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn dice() -> MassTable<Rational> {
        let g = Arc::new(ParamGrid::atoms((1..=6).map(Rational::from_integer).collect()).unwrap());
        MassTable::uniform(g)
    }

    fn v(p: &Point<Rational>) -> i64 {
        p.first().to_integer()
    }

    fn bernoulli() -> (MassTable<Rational>, MassTable<Rational>) {
        let g = Arc::new(ParamGrid::atoms(vec![r(0, 1), r(1, 2), r(1, 1)]).unwrap());
        let prior = MassTable::uniform(g.clone());
        let m = TabularModel::binomial(&g, 1).unwrap();
        let post = condition(&prior, &m, &1).unwrap();
        (prior, post)
    }

    /// Five-point grid, two binomial trials, a prior with ties and a zero.
    fn bernoulli_like() -> (TabularModel<Rational>, MassTable<Rational>) {
        let g = Arc::new(ParamGrid::atoms((0..5).map(|i| Rational::new(i, 4)).collect()).unwrap());
        let m = TabularModel::binomial(&g, 2).unwrap();
        let w = [1, 2, 0, 2, 1].map(Rational::from_integer).to_vec();
        (m, MassTable::from_weights(g, w).unwrap())
    }

    fn two_point() -> RBCurve<f64> {
        let g = Arc::new(ParamGrid::atoms(vec![1.0, 2.0]).unwrap());
        let prior = MassTable::new(g.clone(), vec![0.5, 0.5]).unwrap();
        let post = MassTable::new(g, vec![0.2, 0.8]).unwrap();
        rb_curve(&prior, &post, None).unwrap()
    }

    #[test]
    fn dice_rb_set() {
        let e = rb_set(&dice(), |p| v(p) <= 3, |p| v(p) <= 2).unwrap();
        assert_eq!(e.rb, r(2, 1));
        assert_eq!(e.direction, Direction::InFavor);
        let whole = rb_set(&dice(), |p| v(p) <= 3, |_| true).unwrap();
        assert_eq!(whole.rb, r(1, 1));
        assert_eq!(whole.direction, Direction::Neutral);
        assert!(rb_set(&dice(), |p| v(p) <= 3, |_| false).is_err());
        assert!(rb_set(&dice(), |_| false, |_| true).is_err());
    }

    #[test]
    fn bernoulli_curve() {
        let (prior, post) = bernoulli();
        assert_eq!(post.masses(), &[r(0, 1), r(1, 3), r(2, 3)]);
        let c = rb_curve(&prior, &post, None).unwrap();
        assert_eq!(c.values(), &[Some(r(0, 1)), Some(r(1, 1)), Some(r(2, 1))]);
        let m = mrbe(&c);
        assert_eq!(m.index, 2);
        assert!(!m.tied());
    }

    #[test]
    fn unchanged_belief_is_neutral_everywhere() {
        let (prior, _) = bernoulli();
        let c = rb_curve(&prior, &prior, None).unwrap();
        assert!(c.values().iter().all(|x| *x == Some(r(1, 1))));
        for i in 0..3 {
            assert_eq!(strength(&c, i, StrengthVariant::Directional).unwrap(), r(1, 1));
        }
        assert!(mrbe(&c).tied());
    }

    #[test]
    fn strength_curve_matches_pointwise() {
        let (m, prior) = bernoulli_like();
        let post = condition(&prior, &m, &2).unwrap();
        let curve = rb_curve(&prior, &post, None).unwrap();
        for variant in [StrengthVariant::Directional, StrengthVariant::LowerTail] {
            let all = strength_curve(&curve, variant);
            for (i, s) in all.iter().enumerate() {
                assert_eq!(s.as_ref(), strength(&curve, i, variant).ok().as_ref());
            }
        }
    }

    #[test]
    fn two_point_strengths_and_regions() {
        let c = two_point();
        assert!((c.rb_at(0).unwrap() - 0.4).abs() < 1e-15);
        assert!((c.rb_at(1).unwrap() - 1.6).abs() < 1e-15);
        assert!((strength(&c, 0, StrengthVariant::Directional).unwrap() - 0.2).abs() < 1e-15);
        assert!((strength(&c, 1, StrengthVariant::Directional).unwrap() - 0.8).abs() < 1e-15);
        assert!((strength(&c, 1, StrengthVariant::LowerTail).unwrap() - 1.0).abs() < 1e-15);

        let g = gamma_region(&c, 0.7).unwrap();
        assert_eq!(g.members, vec![1]);
        assert!((g.content - 0.8).abs() < 1e-15);
        assert_eq!(gamma_region(&c, 0.0).unwrap().members, vec![1]);
        assert_eq!(gamma_region(&c, 1.0).unwrap().members, vec![0, 1]);

        let p = plausible_region(&c, 1.0).unwrap();
        assert_eq!(p.members, vec![1]);
        assert!((p.content - 0.8).abs() < 1e-15);
        assert_eq!(plausible_region(&c, 0.0).unwrap().members, vec![0, 1]);
        let empty = plausible_region(&c, 2.0).unwrap();
        assert!(empty.members.is_empty());
        assert_eq!(empty.content, 0.0);
    }

    #[test]
    fn gamma_one_excludes_zero_posterior_points() {
        let (prior, post) = bernoulli();
        let c = rb_curve(&prior, &post, None).unwrap();
        assert_eq!(gamma_region(&c, r(1, 1)).unwrap().members, vec![1, 2]);
        assert_eq!(plausible_region(&c, r(0, 1)).unwrap().members, vec![1, 2]);
    }

    #[test]
    fn zero_prior_mass_is_undefined() {
        let g = Arc::new(ParamGrid::atoms(vec![0.0, 1.0, 2.0]).unwrap());
        let prior = MassTable::new(g.clone(), vec![0.5, 0.0, 0.5]).unwrap();
        let post = MassTable::new(g, vec![0.25, 0.0, 0.75]).unwrap();
        let c = rb_curve(&prior, &post, None).unwrap();
        assert_eq!(c.values()[1], None);
        assert!(c.rb_at(1).is_err());
        assert!(strength(&c, 1, StrengthVariant::Directional).is_err());
        assert!(!gamma_region(&c, 1.0).unwrap().members.contains(&1));
    }

    #[test]
    fn predictive_route_matches_ratio_route() {
        let (prior, post) = bernoulli();
        let g = prior.grid().clone();
        let m = TabularModel::binomial(&g, 1).unwrap();
        let id = MarginalMap::identity(g.clone());
        let c = rb_curve(&prior, &post, None).unwrap();
        for psi in 0..3 {
            assert_eq!(rb_via_predictive(&m, &prior, &id, &1, psi).unwrap(), *c.rb_at(psi).unwrap());
        }
        let constant = MarginalMap::from_fn(g, |_| Point::scalar(r(0, 1))).unwrap();
        assert_eq!(rb_via_predictive(&m, &prior, &constant, &1, 0).unwrap(), r(1, 1));
    }

    #[test]
    fn disjoint_union_two_terms() {
        let d = dice();
        let u = rb_union(&d, |p| v(p) % 2 == 0, |p| v(p) == 2, |p| v(p) >= 5).unwrap();
        assert_eq!(u.form, UnionForm::TwoTerm);
        assert_eq!(u.lhs, u.rhs);
        assert_eq!(u.lhs, r(4, 3));
    }

    #[test]
    fn self_union_degenerates() {
        let d = dice();
        let u = rb_union(&d, |p| v(p) <= 3, |p| v(p) <= 2, |p| v(p) <= 2).unwrap();
        assert_eq!(u.form, UnionForm::ThreeTerm);
        assert_eq!(u.lhs, r(2, 1));
        assert_eq!(u.rhs, r(2, 1));
    }
}
