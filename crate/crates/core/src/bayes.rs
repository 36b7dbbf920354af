//! Posterior summaries and Bayes factors: MAP estimation, Bayes factors in
//! odds and predictive form, spike-and-slab priors and the closed form for
//! the location-normal model with a normal slab.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gauss::NormalGridSpec;
use crate::grid::{
    normal_cdf, normal_sf, prob_of, pushforward, EvalModel, FnTransform, GaussianMeanModel, MassTable, ParamGrid, Point,
};
use crate::likelihood::{argmax, Argmax};
use crate::relbel::{rb_curve, strength, StrengthVariant};
use crate::scalar::Scalar;

/// Maximum a posteriori point: the argmax of posterior *density*
/// (mass / cell volume).
pub fn map_estimate<S: Scalar>(posterior: &MassTable<S>) -> Argmax<S> {
    let d: Vec<Option<S>> = posterior.densities().into_iter().map(Some).collect();
    argmax(posterior.grid(), &d).expect("table is nonempty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BFForm {
    Odds,
    Predictive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BFResult<S> {
    pub bf: S,
    pub prior_odds: S,
    pub posterior_odds: S,
    pub form: BFForm,
}

fn prior_split<S: Scalar>(prior_a: S) -> Result<(S, S)> {
    if !(prior_a > S::zero()) || !(prior_a < S::one()) {
        return Err(Error::UndefinedBayesFactor(format!("prior probability of the hypothesis is {prior_a}")));
    }
    let rest = S::one() - prior_a.clone();
    Ok((prior_a, rest))
}

/// `BF(A|x) = Odds(A|x) / Odds(A)`.
pub fn bayes_factor<S: Scalar>(
    prior: &MassTable<S>,
    posterior: &MassTable<S>,
    subset: impl Fn(&Point<S>) -> bool,
) -> Result<BFResult<S>> {
    if !crate::grid::same_grid(prior.grid(), posterior.grid()) {
        return Err(Error::GridMismatch);
    }
    let (pa, pna) = prior_split(prob_of(prior, &subset))?;
    let qa = prob_of(posterior, &subset);
    let qna = S::one() - qa.clone();
    if !(qna > S::zero()) {
        return Err(Error::UndefinedBayesFactor("posterior probability of the complement is 0".into()));
    }
    let prior_odds = pa / pna;
    let posterior_odds = qa / qna;
    Ok(BFResult { bf: posterior_odds.clone() / prior_odds.clone(), prior_odds, posterior_odds, form: BFForm::Odds })
}

/// `BF(A|x) = m(x|A) / m(x|Aᶜ)`, from conditional prior predictives.
pub fn bf_predictive<S, M>(
    model: &M,
    prior: &MassTable<S>,
    subset: impl Fn(&Point<S>) -> bool,
    observed: &M::Datum,
) -> Result<BFResult<S>>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
{
    let (pa, pna) = prior_split(prob_of(prior, &subset))?;
    let lik = model.likelihood_column(prior.grid(), observed)?;
    let (mut ja, mut jna) = (S::zero(), S::zero());
    for ((p, m), l) in prior.grid().points().iter().zip(prior.masses()).zip(&lik) {
        let joint = m.clone() * l.clone();
        if subset(p) {
            ja = ja + joint;
        } else {
            jna = jna + joint;
        }
    }
    let m_a = ja / pa.clone();
    let m_na = jna / pna.clone();
    if !(m_na > S::zero()) {
        return Err(Error::ZeroPredictive("m(x | complement) = 0".into()));
    }
    let bf = m_a / m_na;
    let prior_odds = pa / pna;
    Ok(BFResult { posterior_odds: bf.clone() * prior_odds.clone(), bf, prior_odds, form: BFForm::Predictive })
}

/// `p·δ_θ0 + (1 − p)·slab`, with the slab giving θ0 no mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeSlabPrior<S> {
    p: S,
    theta0: usize,
    slab: MassTable<S>,
}

impl<S: Scalar> SpikeSlabPrior<S> {
    pub fn new(p: S, theta0: usize, slab: MassTable<S>) -> Result<Self> {
        if !(p > S::zero() && p < S::one()) {
            return Err(Error::InvalidArgument(format!("spike mass p = {p} outside (0, 1)")));
        }
        if theta0 >= slab.len() {
            return Err(Error::NotOnGrid(format!("index {theta0}")));
        }
        if *slab.mass(theta0) != S::zero() {
            return Err(Error::InvalidMasses("slab must give the spike location zero mass".into()));
        }
        Ok(Self { p, theta0, slab })
    }

    /// Slab obtained from `base` by removing θ0 and renormalizing.
    pub fn from_base(p: S, theta0: usize, base: &MassTable<S>) -> Result<Self> {
        if theta0 >= base.len() {
            return Err(Error::NotOnGrid(format!("index {theta0}")));
        }
        let mut w = base.masses().to_vec();
        w[theta0] = S::zero();
        Self::new(p, theta0, MassTable::from_weights(base.grid().clone(), w)?)
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn theta0(&self) -> usize {
        self.theta0
    }

    pub fn slab(&self) -> &MassTable<S> {
        &self.slab
    }

    /// The mixture as a single table.
    pub fn mixture(&self) -> MassTable<S> {
        let q = S::one() - self.p.clone();
        let mut masses: Vec<S> = self.slab.masses().iter().map(|m| m.clone() * q.clone()).collect();
        masses[self.theta0] = self.p.clone();
        MassTable::new(self.slab.grid().clone(), masses).expect("mixture of two distributions")
    }
}

/// `BF(H0|x) = f_θ0(x) / m_slab(x)`, which does not depend on `p`.
pub fn spike_slab_bf<S, M>(model: &M, prior: &SpikeSlabPrior<S>, observed: &M::Datum) -> Result<BFResult<S>>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
{
    let lik = model.likelihood_column(prior.slab.grid(), observed)?;
    let m_slab = prior.slab.masses().iter().zip(&lik).fold(S::zero(), |acc, (m, l)| acc + m.clone() * l.clone());
    if !(m_slab > S::zero()) {
        return Err(Error::ZeroPredictive("slab predictive m(x) = 0".into()));
    }
    let bf = lik[prior.theta0].clone() / m_slab;
    let prior_odds = prior.p.clone() / (S::one() - prior.p.clone());
    Ok(BFResult { posterior_odds: bf.clone() * prior_odds.clone(), bf, prior_odds, form: BFForm::Predictive })
}

/// `BF(H0 = {0}|x)` for `x̄ ~ N(θ, 1/n)` with slab `N(0, σ²)`, where
/// `zbar = x̄√n`:
/// `exp(−nσ²·zbar² / (2(1 + nσ²)))·√(1 + nσ²)`.
pub fn jl_bayes_factor(n: usize, sigma2: f64, zbar: f64) -> f64 {
    let a = n as f64 * sigma2;
    (-a * zbar * zbar / (2.0 * (1.0 + a))).exp() * (1.0 + a).sqrt()
}

/// Strength of the evidence for θ = 0 in the same setting, in closed form.
///
/// The slab posterior is `N(μ, v)` with `μ = nσ²x̄/(1 + nσ²)` and
/// `v = σ²/(1 + nσ²)`, and `RB(θ|x) ≤ RB(0|x)` exactly when
/// `|θ − x̄| ≥ |x̄|`.
pub fn jl_strength(n: usize, sigma2: f64, zbar: f64, variant: StrengthVariant) -> f64 {
    let nf = n as f64;
    let xbar = zbar / nf.sqrt();
    let a = nf * sigma2;
    let mu = a * xbar / (1.0 + a);
    let sd = (sigma2 / (1.0 + a)).sqrt();
    let (lo, hi) = (xbar - xbar.abs(), xbar + xbar.abs());
    let lower = normal_cdf((lo - mu) / sd) + normal_sf((hi - mu) / sd);
    let bf = jl_bayes_factor(n, sigma2, zbar);
    match variant {
        StrengthVariant::LowerTail => lower,
        StrengthVariant::Directional if bf > 1.0 => 1.0 - lower,
        StrengthVariant::Directional if bf < 1.0 => lower,
        StrengthVariant::Directional => 1.0,
    }
}

/// Discretized Jeffreys–Lindley setting on a grid.
#[derive(Debug, Clone)]
pub struct JlGrid {
    pub model: GaussianMeanModel,
    pub xbar: f64,
    /// Discretized `N(0, σ²)` prior, including the cell centred at 0.
    pub prior: MassTable<f64>,
    pub theta0: usize,
}

impl JlGrid {
    /// `N(0, σ²)` over `±8σ` with at least `10⁴` cells; cells near the data
    /// and near 0 are refined to a fraction of the sampling sd.
    pub fn new(n: usize, sigma2: f64, zbar: f64) -> Result<Self> {
        Self::with_resolution(n, sigma2, zbar, 400)
    }

    /// As [`JlGrid::new`], with refined cells no wider than
    /// `1/(per_sd·√n)`.
    pub fn with_resolution(n: usize, sigma2: f64, zbar: f64, per_sd: usize) -> Result<Self> {
        if per_sd == 0 {
            return Err(Error::InvalidArgument("resolution must be positive".into()));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidArgument("σ² must be positive".into()));
        }
        let model = GaussianMeanModel::new(n)?;
        let sd = model.sd();
        let xbar = zbar * sd;
        let lo = xbar.min(0.0) - 14.0 * sd;
        let hi = xbar.max(0.0) + 14.0 * sd;
        let (prior, theta0) = NormalGridSpec::new(0.0, sigma2.sqrt()).refined(lo, hi, sd / per_sd as f64).build()?;
        Ok(Self { model, xbar, prior, theta0 })
    }

    pub fn grid(&self) -> &Arc<ParamGrid<f64>> {
        self.prior.grid()
    }

    pub fn spike_slab(&self, p: f64) -> Result<SpikeSlabPrior<f64>> {
        SpikeSlabPrior::from_base(p, self.theta0, &self.prior)
    }

    pub fn bayes_factor(&self) -> Result<f64> {
        Ok(spike_slab_bf(&self.model, &self.spike_slab(0.5)?, &self.xbar)?.bf)
    }

    /// Strength of the evidence for θ = 0 from the grid RB curve.
    pub fn strength(&self, variant: StrengthVariant) -> Result<f64> {
        let post = crate::grid::condition(&self.prior, &self.model, &self.xbar)?;
        let curve = rb_curve(&self.prior, &post, None)?;
        strength(&curve, self.theta0, variant)
    }
}

/// One instance of MAP non-invariance under a smooth 1-1 reparameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct MapInvariance {
    pub theta_map: f64,
    /// `ψ(θ_MAP)` with `ψ(θ) = θ²`.
    pub transformed_map: f64,
    /// MAP of the pushed-forward posterior of ψ.
    pub psi_map: f64,
}

/// Posterior density `∝ θ(1 − θ)` on `(0, 1]` and `ψ = θ²`.
///
/// The θ-density peaks at 1/2 while the ψ-density `∝ (1 − √ψ)` is largest
/// next to 0, so the two MAP routes disagree.
pub fn map_noninvariance_demo(cells: usize) -> Result<MapInvariance> {
    let grid = Arc::new(crate::grid::make_uniform_grid(0.0, 1.0, cells)?);
    let weights = grid.points().iter().map(|p| p.first() * (1.0 - p.first())).collect();
    let post = MassTable::from_weights(grid, weights)?;
    let theta_map = *map_estimate(&post).point.first();
    let pushed = pushforward(&post, &FnTransform(|p: &Point<f64>| Point::scalar(p.first() * p.first())))?;
    let psi_map = *map_estimate(&pushed).point.first();
    Ok(MapInvariance { theta_map, transformed_map: theta_map * theta_map, psi_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{condition, TabularModel};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn bernoulli() -> (TabularModel<Rational>, MassTable<Rational>) {
        let g = Arc::new(ParamGrid::atoms(vec![r(0, 1), r(1, 2), r(1, 1)]).unwrap());
        (TabularModel::binomial(&g, 1).unwrap(), MassTable::uniform(g))
    }

    #[test]
    fn map_uses_density() {
        let (m, prior) = bernoulli();
        let post = condition(&prior, &m, &1).unwrap();
        assert_eq!(map_estimate(&post).point.first(), &r(1, 1));
        assert!(map_estimate(&prior).tied());
        let g = Arc::new(ParamGrid::from_scalars(vec![0.25, 1.0], vec![0.5, 1.0]).unwrap());
        let t = MassTable::new(g, vec![0.5, 0.5]).unwrap();
        assert_eq!(map_estimate(&t).index, 0);
    }

    #[test]
    fn odds_form() {
        let g = Arc::new(ParamGrid::atoms(vec![1.0_f64, 2.0]).unwrap());
        let prior = MassTable::new(g.clone(), vec![0.5, 0.5]).unwrap();
        let post = MassTable::new(g, vec![0.2, 0.8]).unwrap();
        let bf = bayes_factor(&prior, &post, |p| *p.first() == 2.0).unwrap();
        assert!((bf.bf - 4.0).abs() < 1e-12);
        assert_eq!(bayes_factor(&prior, &prior, |p| *p.first() == 2.0).unwrap().bf, 1.0);
        assert!(matches!(bayes_factor(&prior, &post, |_| false), Err(Error::UndefinedBayesFactor(_))));
        assert!(matches!(bayes_factor(&prior, &post, |_| true), Err(Error::UndefinedBayesFactor(_))));
    }

    #[test]
    fn predictive_form_matches_odds_form() {
        let (m, prior) = bernoulli();
        for x in 0..2 {
            let post = condition(&prior, &m, &x).unwrap();
            for cut in [r(0, 1), r(1, 2)] {
                let a = |p: &Point<Rational>| *p.first() > cut;
                let odds = bayes_factor(&prior, &post, a);
                let pred = bf_predictive(&m, &prior, a, &x);
                match (odds, pred) {
                    (Ok(o), Ok(p)) => {
                        assert_eq!(o.bf, p.bf);
                        assert_eq!(o.posterior_odds, p.posterior_odds);
                    }
                    (o, p) => assert!(o.is_err() && p.is_err(), "{o:?} vs {p:?}"),
                }
            }
        }
    }

    #[test]
    fn spike_slab_is_p_invariant_and_matches_predictive_rb() {
        let (m, base) = bernoulli();
        let values: Vec<Rational> = [r(1, 100), r(1, 2), r(99, 100)]
            .iter()
            .map(|p| {
                let prior = SpikeSlabPrior::from_base(*p, 1, &base).unwrap();
                spike_slab_bf(&m, &prior, &1).unwrap().bf
            })
            .collect();
        assert!(values.iter().all(|v| *v == values[0]));
        // f_{1/2}(1) / m_slab(1) with slab uniform on {0, 1}
        assert_eq!(values[0], r(1, 1));
        let prior = SpikeSlabPrior::from_base(r(1, 2), 1, &base).unwrap();
        let id = crate::grid::MarginalMap::identity(base.grid().clone());
        let rb = crate::relbel::rb_via_predictive(&m, prior.slab(), &id, &1, 1).unwrap();
        assert_eq!(rb, values[0]);
        let mix = prior.mixture();
        let post = condition(&mix, &m, &1).unwrap();
        let odds = bayes_factor(&mix, &post, |p| *p.first() == r(1, 2)).unwrap();
        assert_eq!(odds.bf, values[0]);
    }

    #[test]
    fn slab_must_exclude_spike() {
        let (_, base) = bernoulli();
        assert!(SpikeSlabPrior::new(r(1, 2), 1, base.clone()).is_err());
        assert!(SpikeSlabPrior::from_base(r(0, 1), 1, &base).is_err());
    }

    #[test]
    fn jl_closed_form_values() {
        assert!((jl_bayes_factor(50, 400.0, 1.96) - 20.72).abs() < 0.01);
        assert_eq!(jl_bayes_factor(50, 0.0, 1.96), 1.0);
        assert!(jl_bayes_factor(50, 1e6, 1.96) > 20.72);
        let s = jl_strength(50, 400.0, 1.96, StrengthVariant::LowerTail);
        assert!((s - 0.05).abs() < 0.005);
        let d = jl_strength(50, 400.0, 1.96, StrengthVariant::Directional);
        assert!((s + d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_is_not_invariant() {
        let d = map_noninvariance_demo(1000).unwrap();
        assert!((d.theta_map - 0.5).abs() < 1e-3);
        assert!((d.transformed_map - 0.25).abs() < 1e-3);
        assert!(d.psi_map < 0.01);
    }

    #[test]
    fn jl_grid_matches_closed_forms() {
        for (sigma2, zbar) in [(400.0, 1.96), (1.0, 1.0), (1e4, 3.0), (1e6, 1.96)] {
            let g = JlGrid::new(50, sigma2, zbar).unwrap();
            assert_eq!(*g.grid().point(g.theta0).first(), 0.0);
            let closed = jl_bayes_factor(50, sigma2, zbar);
            let grid = g.bayes_factor().unwrap();
            assert!(((grid - closed) / closed).abs() < 1e-3, "σ² = {sigma2}: {grid} vs {closed}");
            let s = g.strength(StrengthVariant::LowerTail).unwrap();
            let sc = jl_strength(50, sigma2, zbar, StrengthVariant::LowerTail);
            assert!((s - sc).abs() < 2e-3, "σ² = {sigma2}: {s} vs {sc}");
        }
    }
}
