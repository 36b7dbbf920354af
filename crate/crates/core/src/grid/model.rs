use crate::error::{Error, Result};
use crate::grid::normal::normal_pdf;
use crate::grid::{ParamGrid, Point};
use crate::scalar::{FloatScalar, Scalar};

/// A statistical model that can be evaluated as a likelihood column on a grid.
///
/// Two backends ship with the crate: [`TabularModel`] for finite sample
/// spaces and [`GaussianMeanModel`] for the location-normal model reduced to
/// its sample mean. Other models plug in by implementing this trait.
pub trait EvalModel<S: Scalar> {
    type Datum: ?Sized;

    /// `f_θ(x)` for every point θ of `grid`, in grid order.
    fn likelihood_column(&self, grid: &ParamGrid<S>, x: &Self::Datum) -> Result<Vec<S>>;
}

/// Finite sample space with one probability row per parameter point.
///
/// Rows are indexed by grid position and stored sparsely, since models such
/// as the word model have few nonzero entries per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularModel<S> {
    labels: Vec<String>,
    volumes: Vec<S>,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<S>,
}

impl<S: Scalar> TabularModel<S> {
    /// Dense constructor; unit sample volumes.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = labels.len();
        let mut sparse = Vec::with_capacity(rows.len());
        for (t, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidModel(format!("row {t} has {} entries for {n} sample points", row.len())));
            }
            sparse.push(row.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>());
        }
        Self::from_sparse(labels, vec![S::one(); n], sparse)
    }

    /// Sparse constructor: each row lists `(sample index, density)` pairs.
    pub fn from_sparse(labels: Vec<String>, volumes: Vec<S>, rows: Vec<Vec<(usize, S)>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidModel("empty sample space".into()));
        }
        if volumes.len() != n {
            return Err(Error::InvalidModel("one volume per sample point required".into()));
        }
        if volumes.iter().any(|v| !(*v > S::zero())) {
            return Err(Error::InvalidModel("sample volumes must be positive".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidModel("model needs at least one row".into()));
        }
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for (t, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|(j, _)| *j);
            let mut total = S::zero();
            let mut prev: Option<usize> = None;
            for (j, v) in row {
                if j >= n {
                    return Err(Error::InvalidModel(format!("row {t}: sample index {j} out of range")));
                }
                if prev == Some(j) {
                    return Err(Error::InvalidModel(format!("row {t}: duplicate sample index {j}")));
                }
                if v < S::zero() || !v.is_finite_value() {
                    return Err(Error::InvalidModel(format!("row {t}: negative or non-finite entry")));
                }
                prev = Some(j);
                total = total + v.clone() * volumes[j].clone();
                if !v.is_zero() {
                    cols.push(j);
                    vals.push(v);
                }
            }
            if !total.approx_eq(&S::one(), &S::tolerance()) {
                return Err(Error::InvalidModel(format!("row {t} sums to {total}, not 1")));
            }
            row_start.push(cols.len());
        }
        Ok(Self { labels, volumes, row_start, cols, vals })
    }

    /// Binomial(trials, θ) over success counts `0..=trials`, one row per
    /// scalar grid point θ ∈ [0, 1]. With `trials = 1` this is Bernoulli.
    pub fn binomial(grid: &ParamGrid<S>, trials: u32) -> Result<Self> {
        let labels = (0..=trials).map(|k| k.to_string()).collect();
        let mut rows = Vec::with_capacity(grid.len());
        for p in grid.points() {
            if p.arity() != 1 {
                return Err(Error::InvalidModel("binomial needs a scalar grid".into()));
            }
            let theta = p.first().clone();
            if theta < S::zero() || theta > S::one() {
                return Err(Error::InvalidModel(format!("θ = {theta} outside [0, 1]")));
            }
            let q = S::one() - theta.clone();
            let mut row = Vec::with_capacity(trials as usize + 1);
            let mut coef = S::one();
            for k in 0..=trials {
                if k > 0 {
                    coef = coef * S::from_i64((trials - k + 1) as i64) / S::from_i64(k as i64);
                }
                let v = coef.clone() * pow(&theta, k) * pow(&q, trials - k);
                row.push((k as usize, v));
            }
            rows.push(row);
        }
        Self::from_sparse(labels, vec![S::one(); trials as usize + 1], rows)
    }

    pub fn n_thetas(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sample_volumes(&self) -> &[S] {
        &self.volumes
    }

    pub fn sample_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Nonzero `(sample index, density)` entries of row θ.
    pub fn row(&self, theta: usize) -> impl Iterator<Item = (usize, &S)> + '_ {
        let (a, b) = (self.row_start[theta], self.row_start[theta + 1]);
        self.cols[a..b].iter().copied().zip(&self.vals[a..b])
    }

    pub fn dense_row(&self, theta: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.n_samples()];
        for (j, v) in self.row(theta) {
            out[j] = v.clone();
        }
        out
    }

    pub fn density(&self, theta: usize, x: usize) -> S {
        let (a, b) = (self.row_start[theta], self.row_start[theta + 1]);
        match self.cols[a..b].binary_search(&x) {
            Ok(k) => self.vals[a + k].clone(),
            Err(_) => S::zero(),
        }
    }

    /// `f_θ(x)` for every θ, in row order.
    pub fn column(&self, x: usize) -> Result<Vec<S>> {
        if x >= self.n_samples() {
            return Err(Error::OutOfSampleSpace(format!("sample index {x}")));
        }
        Ok((0..self.n_thetas()).map(|t| self.density(t, x)).collect())
    }

    /// Probability of sample point `x` under row θ (density times volume).
    pub fn prob(&self, theta: usize, x: usize) -> S {
        self.density(theta, x) * self.volumes[x].clone()
    }

    /// Model for `k` independent draws; joint sample points are enumerated
    /// with the first draw varying slowest.
    pub fn iid_power(&self, k: u32, cap: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        let n = self.n_samples();
        let count = (n as u128).checked_pow(k).unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::CapExceeded { what: "joint sample space".into(), count, cap: cap as u128 });
        }
        let mut labels = self.labels.clone();
        let mut volumes = self.volumes.clone();
        let mut rows: Vec<Vec<(usize, S)>> =
            (0..self.n_thetas()).map(|t| self.row(t).map(|(j, v)| (j, v.clone())).collect()).collect();
        for _ in 1..k {
            let mut next_labels = Vec::with_capacity(labels.len() * n);
            let mut next_volumes = Vec::with_capacity(labels.len() * n);
            for (l, v) in labels.iter().zip(&volumes) {
                for (l2, v2) in self.labels.iter().zip(&self.volumes) {
                    next_labels.push(format!("{l},{l2}"));
                    next_volumes.push(v.clone() * v2.clone());
                }
            }
            for (t, row) in rows.iter_mut().enumerate() {
                let mut next = Vec::with_capacity(row.len() * (self.row_start[t + 1] - self.row_start[t]));
                for (j, v) in row.iter() {
                    for (j2, v2) in self.row(t) {
                        next.push((j * n + j2, v.clone() * v2.clone()));
                    }
                }
                *row = next;
            }
            labels = next_labels;
            volumes = next_volumes;
        }
        Self::from_sparse(labels, volumes, rows)
    }

    /// Index, in `self.iid_power(draws.len())`, of the joint sample point for
    /// a sequence of single draws from `self`.
    pub fn joint_index(&self, draws: &[usize]) -> usize {
        draws.iter().fold(0, |acc, &d| acc * self.n_samples() + d)
    }

    /// Converts every entry to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<TabularModel<T>> {
        let rows = (0..self.n_thetas()).map(|t| self.row(t).map(|(j, v)| (j, f(v))).collect()).collect();
        TabularModel::from_sparse(self.labels.clone(), self.volumes.iter().map(&f).collect(), rows)
    }
}

fn pow<S: Scalar>(base: &S, exp: u32) -> S {
    (0..exp).fold(S::one(), |acc, _| acc * base.clone())
}

impl<S: Scalar> EvalModel<S> for TabularModel<S> {
    type Datum = usize;

    fn likelihood_column(&self, grid: &ParamGrid<S>, x: &usize) -> Result<Vec<S>> {
        if grid.len() != self.n_thetas() {
            return Err(Error::InvalidModel(format!(
                "model has {} rows but grid has {} points",
                self.n_thetas(),
                grid.len()
            )));
        }
        self.column(*x)
    }
}

/// Location-normal model with unit variance, reduced to the sample mean:
/// `T = x̄ ~ N(θ, 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianMeanModel {
    n: usize,
}

impl GaussianMeanModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("sample size must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Standard deviation of the sample mean, `1/√n`.
    pub fn sd(&self) -> f64 {
        1.0 / (self.n as f64).sqrt()
    }

    /// Density of `x̄` at `xbar` when the mean is `theta`.
    pub fn density_at(&self, theta: f64, xbar: f64) -> f64 {
        let sd = self.sd();
        normal_pdf((xbar - theta) / sd) / sd
    }

    /// Location grid points as `f64`, or an error if the grid is not scalar.
    pub fn locations<S: FloatScalar>(grid: &ParamGrid<S>) -> Result<Vec<f64>> {
        if grid.arity() != 1 {
            return Err(Error::InvalidModel("gaussian_mean needs a scalar grid".into()));
        }
        Ok(grid.points().iter().map(|p: &Point<S>| p.first().as_f64()).collect())
    }
}

impl<S: FloatScalar> EvalModel<S> for GaussianMeanModel {
    type Datum = S;

    fn likelihood_column(&self, grid: &ParamGrid<S>, x: &S) -> Result<Vec<S>> {
        let xbar = x.as_f64();
        if !xbar.is_finite() {
            return Err(Error::OutOfSampleSpace("non-finite sample mean".into()));
        }
        Ok(Self::locations(grid)?.into_iter().map(|theta| S::from_f64(self.density_at(theta, xbar))).collect())
    }
}
