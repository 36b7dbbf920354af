//! Pure-likelihood inference on a grid: likelihood curves, the MLE,
//! (1−γ)-likelihood regions and profile likelihoods.
//!
//! Curves are stored unnormalized. Everything computed here depends only on
//! ratios of curve values, so multiplying a curve by a positive constant
//! changes nothing.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{EvalModel, MarginalMap, ParamGrid, Point};
use crate::scalar::Scalar;

/// Position of a maximum together with every index that ties it.
#[derive(Debug, Clone, PartialEq)]
pub struct Argmax<S> {
    pub index: usize,
    pub point: Point<S>,
    pub ties: Vec<usize>,
}

impl<S> Argmax<S> {
    pub fn tied(&self) -> bool {
        self.ties.len() > 1
    }
}

/// Argmax over `values` restricted to indices where `values[i]` is `Some`.
/// Ties are decided with a relative tolerance of 1e-12 for floats and
/// exactly for rationals; the lowest index is the representative.
pub(crate) fn argmax<S: Scalar>(grid: &ParamGrid<S>, values: &[Option<S>]) -> Option<Argmax<S>> {
    let max = values.iter().flatten().fold(None::<S>, |acc, v| match acc {
        Some(m) if m >= *v => Some(m),
        _ => Some(v.clone()),
    })?;
    let rel = S::tolerance() / S::from_i64(100);
    let slack = max.clone().abs() * rel;
    let ties: Vec<usize> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().filter(|v| max.clone() - (*v).clone() <= slack).map(|_| i))
        .collect();
    let index = ties[0];
    Some(Argmax { index, point: grid.point(index).clone(), ties })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodCurve<S> {
    grid: Arc<ParamGrid<S>>,
    values: Vec<S>,
}

impl<S: Scalar> LikelihoodCurve<S> {
    pub fn new(grid: Arc<ParamGrid<S>>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("one likelihood value per grid point required".into()));
        }
        if values.iter().any(|v| *v < S::zero() || !v.is_finite_value()) {
            return Err(Error::InvalidArgument("likelihood values must be finite and nonnegative".into()));
        }
        if !values.iter().any(|v| *v > S::zero()) {
            return Err(Error::AllZeroLikelihood);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<ParamGrid<S>> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// The same curve multiplied by `c > 0`.
    pub fn scaled(&self, c: S) -> Result<Self> {
        if !(c > S::zero()) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        Self::new(self.grid.clone(), self.values.iter().map(|v| v.clone() * c.clone()).collect())
    }

    pub fn max_value(&self) -> S {
        self.values.iter().cloned().fold(S::zero(), S::max_of)
    }

    /// `L(θ|x) / L(θ_MLE|x)` per grid point.
    pub fn relative(&self) -> Vec<S> {
        let max = self.max_value();
        self.values.iter().map(|v| v.clone() / max.clone()).collect()
    }
}

/// `L(θ|x) = f_θ(x)` over the grid.
pub fn likelihood_curve<S, M>(model: &M, grid: Arc<ParamGrid<S>>, observed: &M::Datum) -> Result<LikelihoodCurve<S>>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
{
    let values = model.likelihood_column(&grid, observed)?;
    LikelihoodCurve::new(grid, values)
}

pub fn mle<S: Scalar>(curve: &LikelihoodCurve<S>) -> Argmax<S> {
    let values: Vec<Option<S>> = curve.values.iter().cloned().map(Some).collect();
    argmax(&curve.grid, &values).expect("curve is nonempty")
}

/// `{θ : L(θ|x) / L(θ_MLE|x) ≥ 1 − γ}`, restricted to the support of the curve.
pub fn likelihood_region<S: Scalar>(curve: &LikelihoodCurve<S>, gamma: S) -> Result<Vec<usize>> {
    if gamma < S::zero() || gamma > S::one() {
        return Err(Error::InvalidArgument(format!("γ = {gamma} outside [0, 1]")));
    }
    let threshold = S::one() - gamma;
    Ok(curve
        .relative()
        .into_iter()
        .enumerate()
        .filter(|(_, r)| *r > S::zero() && *r >= threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Profile likelihood: the maximum of the curve over each preimage Ψ⁻¹{ψ}.
pub fn profile_likelihood<S: Scalar>(curve: &LikelihoodCurve<S>, map: &MarginalMap<S>) -> Result<LikelihoodCurve<S>> {
    map.check_domain(&curve.grid)?;
    let mut values = vec![S::zero(); map.codomain().len()];
    for (i, v) in curve.values.iter().enumerate() {
        let j = map.assignment()[i];
        if *v > values[j] {
            values[j] = v.clone();
        }
    }
    LikelihoodCurve::new(map.codomain().clone(), values)
}
