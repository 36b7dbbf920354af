//! Frequentist evidence: p-values, confidence regions by test inversion,
//! the sample-size insensitivity of p-values, optional stopping, and a
//! mixture model whose exact confidence region is uninformative.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gauss::{normal_quantile, simpson};
use crate::grid::{normal_cdf, normal_sf, GaussianMeanModel, ParamGrid, TabularModel};
use crate::scalar::Scalar;
use crate::sim::{estimate_proportion, Proportion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tail {
    Greater,
    #[default]
    TwoSided,
}

/// A test statistic together with the tail that counts as extreme.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic<S> {
    /// `z = (x̄ − θ0)√n` for the location-normal model.
    MeanZ,
    /// One value per sample point of a tabular model.
    Table(Vec<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec<S> {
    pub statistic: Statistic<S>,
    pub tail: Tail,
}

impl<S: Scalar> TestSpec<S> {
    pub fn z(tail: Tail) -> Self {
        Self { statistic: Statistic::MeanZ, tail }
    }

    pub fn table(values: Vec<S>, tail: Tail) -> Self {
        Self { statistic: Statistic::Table(values), tail }
    }
}

/// p-value of a standard-normal statistic.
pub fn z_p_value(z: f64, tail: Tail) -> f64 {
    match tail {
        Tail::Greater => normal_sf(z),
        Tail::TwoSided => (2.0 * normal_sf(z.abs())).min(1.0),
    }
}

/// p-value of the z-test of `θ = theta0` at observed mean `xbar`.
pub fn z_test_p_value(model: &GaussianMeanModel, theta0: f64, xbar: f64, tail: Tail) -> Result<f64> {
    if !xbar.is_finite() {
        return Err(Error::OutOfSampleSpace("non-finite sample mean".into()));
    }
    Ok(z_p_value((xbar - theta0) / model.sd(), tail))
}

/// p-value of a tabular statistic under row `theta0`.
///
/// `Greater` gives `P(T ≥ t)`. `TwoSided` gives `min(1, 2·min(P(T ≥ t), P(T ≤ t)))`;
/// both tails include the observed atom.
pub fn tabular_p_value<S: Scalar>(
    test: &TestSpec<S>,
    model: &TabularModel<S>,
    theta0: usize,
    observed: usize,
) -> Result<S> {
    let Statistic::Table(values) = &test.statistic else {
        return Err(Error::InvalidArgument("tabular p-value needs a tabulated statistic".into()));
    };
    if values.len() != model.n_samples() {
        return Err(Error::InvalidArgument(format!(
            "statistic has {} values but the model has {} sample points",
            values.len(),
            model.n_samples()
        )));
    }
    if theta0 >= model.n_thetas() {
        return Err(Error::NotOnGrid(format!("row {theta0}")));
    }
    let t = values.get(observed).ok_or_else(|| Error::OutOfSampleSpace(format!("sample index {observed}")))?;
    let (mut upper, mut lower) = (S::zero(), S::zero());
    for (x, _) in model.row(theta0) {
        let p = model.prob(theta0, x);
        if values[x] >= *t {
            upper = upper + p.clone();
        }
        if values[x] <= *t {
            lower = lower + p;
        }
    }
    Ok(match test.tail {
        Tail::Greater => upper,
        Tail::TwoSided => {
            let two = S::from_i64(2) * if upper < lower { upper } else { lower };
            if two > S::one() {
                S::one()
            } else {
                two
            }
        }
    })
}

/// `{θ : p_θ(x) > α}` over `0..len`.
pub fn confidence_region<S: Scalar>(
    len: usize,
    p_value_at: impl Fn(usize) -> Result<S>,
    alpha: S,
) -> Result<Vec<usize>> {
    check_alpha(&alpha)?;
    let mut out = Vec::new();
    for i in 0..len {
        if p_value_at(i)? > alpha {
            out.push(i);
        }
    }
    Ok(out)
}

/// Inverted z-test over a scalar grid.
pub fn z_confidence_region<S: Scalar>(
    model: &GaussianMeanModel,
    grid: &ParamGrid<S>,
    xbar: f64,
    tail: Tail,
    alpha: f64,
) -> Result<Vec<usize>> {
    if grid.arity() != 1 {
        return Err(Error::InvalidArgument("z inversion needs a scalar grid".into()));
    }
    confidence_region(grid.len(), |i| z_test_p_value(model, grid.point(i).first().as_f64(), xbar, tail), alpha)
}

/// Inverted tabular test: row `i` of the model is the null for grid point `i`.
pub fn tabular_confidence_region<S: Scalar>(
    test: &TestSpec<S>,
    model: &TabularModel<S>,
    observed: usize,
    alpha: S,
) -> Result<Vec<usize>> {
    confidence_region(model.n_thetas(), |i| tabular_p_value(test, model, i, observed), alpha)
}

fn check_alpha<S: Scalar>(alpha: &S) -> Result<()> {
    if !(*alpha > S::zero()) || *alpha > S::one() {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside (0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsensitivityRow {
    pub n: usize,
    /// `P_θ0(|X̄ − θ0| < δ)`.
    pub concentration: f64,
    /// `P_θ0(|X̄ − θ0| ≥ δ)`, kept separately so that it stays resolvable
    /// once the concentration rounds to 1.
    pub spread: f64,
    /// Two-sided p-value at the fixed z.
    pub p_value: f64,
}

/// For each `n`, how tightly `X̄` concentrates within `δ` of `θ0` next to the
/// p-value of a fixed z, which ignores `n` entirely.
pub fn sample_size_insensitivity(theta0: f64, n_list: &[usize], delta: f64, z: f64) -> Result<Vec<InsensitivityRow>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("at least one sample size required".into()));
    }
    if !theta0.is_finite() {
        return Err(Error::InvalidArgument("θ0 must be finite".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let m = GaussianMeanModel::new(n)?;
            let spread = 2.0 * normal_sf(delta / m.sd());
            Ok(InsensitivityRow { n, concentration: 1.0 - spread, spread, p_value: z_p_value(z, Tail::TwoSided) })
        })
        .collect()
}

/// `f_θ(x) = (1 − θ)φ(x) + θφ(x − shift)` for `θ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModelSpec {
    pub shift: f64,
    pub thetas: Vec<f64>,
}

impl MixtureModelSpec {
    pub fn new(shift: f64, thetas: Vec<f64>) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidModel("shift must be finite".into()));
        }
        if thetas.is_empty() || thetas.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidModel("mixture weights must lie in [0, 1]".into()));
        }
        Ok(Self { shift, thetas })
    }

    /// `n` equally spaced θ values from 0 to 1 inclusive.
    pub fn with_grid(shift: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModel("θ grid needs at least two points".into()));
        }
        Self::new(shift, (0..n).map(|i| i as f64 / (n - 1) as f64).collect())
    }

    fn centre(&self) -> f64 {
        self.shift / 2.0
    }

    /// `P_θ(|X − shift/2| ≥ d)`.
    pub fn tail(&self, theta: f64, d: f64) -> f64 {
        let c = self.centre();
        let tail_at = |mu: f64| normal_sf(c + d - mu) + normal_cdf(c - d - mu);
        (1.0 - theta) * tail_at(0.0) + theta * tail_at(self.shift)
    }

    /// p-value of the statistic `|X − shift/2|`.
    pub fn p_value(&self, theta: f64, x: f64) -> f64 {
        self.tail(theta, (x - self.centre()).abs()).min(1.0)
    }

    /// Half-width `c_θ` of the acceptance interval `shift/2 ± c_θ`.
    pub fn half_width(&self, theta: f64, alpha: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 40.0 + self.shift.abs());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tail(theta, mid) > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionShape {
    Full,
    Empty,
    Partial,
}

impl RegionShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionShape::Full => "full",
            RegionShape::Empty => "empty",
            RegionShape::Partial => "partial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureRow {
    pub x: f64,
    pub shape: RegionShape,
    /// Smallest and largest θ in the region.
    pub bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDemo {
    pub rows: Vec<MixtureRow>,
    /// x-interval on which the region is the whole θ-grid.
    pub full_window: Option<(f64, f64)>,
}

/// Inverts the level-α tests based on `|X − shift/2|` for each θ on the
/// grid and classifies the resulting regions.
pub fn mixture_region_demo(spec: &MixtureModelSpec, alpha: f64, xs: &[f64]) -> Result<MixtureDemo> {
    check_alpha(&alpha)?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let region: Vec<f64> = spec.thetas.iter().copied().filter(|&t| spec.p_value(t, x) > alpha).collect();
        let shape = match region.len() {
            0 => RegionShape::Empty,
            n if n == spec.thetas.len() => RegionShape::Full,
            _ => RegionShape::Partial,
        };
        let bounds = region.first().map(|lo| (*lo, *region.last().unwrap()));
        rows.push(MixtureRow { x, shape, bounds });
    }
    let c = spec.thetas.iter().map(|&t| spec.half_width(t, alpha)).fold(f64::INFINITY, f64::min);
    let full_window = (c > 0.0).then(|| (spec.centre() - c, spec.centre() + c));
    Ok(MixtureDemo { rows, full_window })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionalStopping {
    pub mc: Proportion,
    /// The same probability by one-dimensional quadrature over the stage-1
    /// statistic with the stage-2 probability in closed form.
    pub quadrature: f64,
    pub alpha: f64,
    /// Estimate exceeds α by more than three standard errors.
    pub inflated: bool,
}

/// Minimum repetitions accepted by [`optional_stopping_sim`].
pub const MIN_REPS: usize = 1000;

/// Size of the two-look procedure: reject if the two-sided z-test on the
/// first `n1` observations rejects at level α, otherwise take `n2` more and
/// test again on all `n1 + n2`.
pub fn optional_stopping_sim(alpha: f64, n1: usize, n2: usize, reps: usize, seed: u64) -> Result<OptionalStopping> {
    check_alpha(&alpha)?;
    if reps < MIN_REPS {
        return Err(Error::InvalidArgument(format!("at least {MIN_REPS} repetitions required, got {reps}")));
    }
    if n1 == 0 {
        return Err(Error::InvalidArgument("first stage needs at least one observation".into()));
    }
    let (a, b) = ((n1 as f64).sqrt(), (n2 as f64).sqrt());
    let total = ((n1 + n2) as f64).sqrt();
    let mc = estimate_proportion(reps, seed, 0, |rng| {
        let z1: f64 = StandardNormal.sample(rng);
        if z_p_value(z1, Tail::TwoSided) <= alpha {
            return true;
        }
        if n2 == 0 {
            return false;
        }
        let w: f64 = StandardNormal.sample(rng);
        z_p_value((a * z1 + b * w) / total, Tail::TwoSided) <= alpha
    });
    let quadrature = optional_stopping_quadrature(alpha, n1, n2);
    Ok(OptionalStopping { mc, quadrature, alpha, inflated: mc.estimate > alpha + 3.0 * mc.se })
}

fn optional_stopping_quadrature(alpha: f64, n1: usize, n2: usize) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let c = normal_quantile(1.0 - alpha / 2.0);
    let first = 2.0 * normal_sf(c);
    if n2 == 0 {
        return first;
    }
    let (a, b) = ((n1 as f64).sqrt(), (n2 as f64).sqrt());
    let total = ((n1 + n2) as f64).sqrt();
    let second = simpson(
        |z1| {
            let hi = (c * total - a * z1) / b;
            let lo = (-c * total - a * z1) / b;
            crate::grid::normal_pdf(z1) * (normal_sf(hi) + normal_cdf(lo))
        },
        -c,
        c,
        20_000,
    );
    first + second
}
