//! Finite parameter grids, probability mass tables, and the operations that
//! move mass around on them: conditioning, marginalization and 1-1
//! push-forward.
//!
//! A grid stores cell midpoints together with positive cell volumes. Masses
//! live on cells; a density is always `mass / volume`. Every table holds its
//! grid behind an `Arc` so priors, posteriors and derived curves share it.

mod model;
mod normal;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub use model::{EvalModel, GaussianMeanModel, TabularModel};
pub use normal::{normal_cdf, normal_pdf, normal_sf};

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// A grid coordinate: a fixed-arity tuple of scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S>(pub Vec<S>);

impl<S: Scalar> Point<S> {
    pub fn scalar(value: S) -> Self {
        Point(vec![value])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; grids built by this crate are mostly one-dimensional.
    pub fn first(&self) -> &S {
        &self.0[0]
    }

    pub fn lex_cmp(&self, other: &Self) -> Option<Ordering> {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b)? {
                Ordering::Equal => continue,
                ord => return Some(ord),
            }
        }
        Some(self.0.len().cmp(&other.0.len()))
    }

    /// Euclidean distance, evaluated in `f64`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = a.as_f64() - b.as_f64();
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl<S: Scalar> From<S> for Point<S> {
    fn from(value: S) -> Self {
        Point::scalar(value)
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Ordered, distinct parameter points with positive cell volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid<S> {
    points: Vec<Point<S>>,
    volumes: Vec<S>,
}

impl<S: Scalar> ParamGrid<S> {
    pub fn new(points: Vec<Point<S>>, volumes: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        if points.len() != volumes.len() {
            return Err(Error::InvalidGrid(format!("{} points but {} volumes", points.len(), volumes.len())));
        }
        let arity = points[0].arity();
        if arity == 0 || points.iter().any(|p| p.arity() != arity) {
            return Err(Error::InvalidGrid("points must share a nonzero arity".into()));
        }
        if points.iter().flat_map(|p| &p.0).any(|v| !v.is_finite_value()) {
            return Err(Error::InvalidGrid("non-finite coordinate".into()));
        }
        if let Some(i) = volumes.iter().position(|v| !(*v > S::zero()) || !v.is_finite_value()) {
            return Err(Error::InvalidGrid(format!("volume at index {i} is not positive")));
        }
        check_distinct(&points)?;
        Ok(Self { points, volumes })
    }

    /// Scalar grid from coordinates and volumes.
    pub fn from_scalars(values: Vec<S>, volumes: Vec<S>) -> Result<Self> {
        Self::new(values.into_iter().map(Point::scalar).collect(), volumes)
    }

    /// Scalar grid with unit volume per point, for atoms of a discrete space.
    pub fn atoms(values: Vec<S>) -> Result<Self> {
        let volumes = vec![S::one(); values.len()];
        Self::from_scalars(values, volumes)
    }

    /// Cartesian product of two scalar grids; volumes multiply.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let mut points = Vec::with_capacity(a.len() * b.len());
        let mut volumes = Vec::with_capacity(a.len() * b.len());
        for (pa, va) in a.points.iter().zip(&a.volumes) {
            for (pb, vb) in b.points.iter().zip(&b.volumes) {
                let mut coords = pa.0.clone();
                coords.extend(pb.0.iter().cloned());
                points.push(Point(coords));
                volumes.push(va.clone() * vb.clone());
            }
        }
        Self::new(points, volumes)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.points[0].arity()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn volumes(&self) -> &[S] {
        &self.volumes
    }

    pub fn point(&self, i: usize) -> &Point<S> {
        &self.points[i]
    }

    pub fn volume(&self, i: usize) -> &S {
        &self.volumes[i]
    }

    pub fn index_of(&self, p: &Point<S>) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Index of the grid point closest to `p` in Euclidean distance.
    pub fn nearest(&self, p: &Point<S>) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.distance(p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn total_volume(&self) -> S {
        sum(&self.volumes)
    }
}

fn check_distinct<S: Scalar>(points: &[Point<S>]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut incomparable = false;
    order.sort_by(|&a, &b| {
        points[a].lex_cmp(&points[b]).unwrap_or_else(|| {
            incomparable = true;
            Ordering::Equal
        })
    });
    if incomparable {
        return Err(Error::InvalidGrid("points are not totally ordered".into()));
    }
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::InvalidGrid(format!(
                "duplicate point {} at indices {} and {}",
                points[w[0]], w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// `n_cells` equal cells over `[lo, hi]`, represented by their midpoints.
pub fn make_uniform_grid<S: Scalar>(lo: S, hi: S, n_cells: usize) -> Result<ParamGrid<S>> {
    if !lo.is_finite_value() || !hi.is_finite_value() {
        return Err(Error::InvalidGrid("non-finite bounds".into()));
    }
    if n_cells == 0 {
        return Err(Error::InvalidGrid("n_cells must be at least 1".into()));
    }
    if !(lo < hi) {
        return Err(Error::InvalidGrid("lo must be below hi".into()));
    }
    let n = S::from_i64(n_cells as i64);
    let width = (hi - lo.clone()) / n;
    let half = S::ratio(1, 2);
    let points = (0..n_cells)
        .map(|i| Point::scalar(lo.clone() + width.clone() * (S::from_i64(i as i64) + half.clone())))
        .collect();
    ParamGrid::new(points, vec![width; n_cells])
}

pub(crate) fn same_grid<S: Scalar>(a: &Arc<ParamGrid<S>>, b: &Arc<ParamGrid<S>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Probability masses on the cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MassTable<S> {
    grid: Arc<ParamGrid<S>>,
    masses: Vec<S>,
}

impl<S: Scalar> MassTable<S> {
    pub fn new(grid: Arc<ParamGrid<S>>, masses: Vec<S>) -> Result<Self> {
        if masses.len() != grid.len() {
            return Err(Error::InvalidMasses(format!("{} masses for a grid of {} points", masses.len(), grid.len())));
        }
        if let Some(i) = masses.iter().position(|m| *m < S::zero() || !m.is_finite_value()) {
            return Err(Error::InvalidMasses(format!("mass at index {i} is negative or non-finite")));
        }
        let total = sum(&masses);
        if !total.approx_eq(&S::one(), &S::tolerance()) {
            return Err(Error::InvalidMasses(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { grid, masses })
    }

    /// Normalizes nonnegative weights into a table.
    pub fn from_weights(grid: Arc<ParamGrid<S>>, weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero() || !w.is_finite_value()) {
            return Err(Error::InvalidMasses("weights must be finite and nonnegative".into()));
        }
        let total = sum(&weights);
        if !(total > S::zero()) {
            return Err(Error::InvalidMasses("weights sum to zero".into()));
        }
        let masses = weights.into_iter().map(|w| w / total.clone()).collect();
        Self::new(grid, masses)
    }

    /// Equal mass on every point.
    pub fn uniform(grid: Arc<ParamGrid<S>>) -> Self {
        let n = S::from_i64(grid.len() as i64);
        let masses = vec![S::one() / n; grid.len()];
        Self { grid, masses }
    }

    /// Mass proportional to cell volume (a flat density).
    pub fn flat_density(grid: Arc<ParamGrid<S>>) -> Result<Self> {
        let weights = grid.volumes().to_vec();
        Self::from_weights(grid, weights)
    }

    pub fn point_mass(grid: Arc<ParamGrid<S>>, index: usize) -> Result<Self> {
        if index >= grid.len() {
            return Err(Error::InvalidArgument(format!("index {index} outside grid")));
        }
        let mut masses = vec![S::zero(); grid.len()];
        masses[index] = S::one();
        Ok(Self { grid, masses })
    }

    pub fn grid(&self) -> &Arc<ParamGrid<S>> {
        &self.grid
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> &S {
        &self.masses[i]
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> S {
        sum(&self.masses)
    }

    pub fn density(&self, i: usize) -> S {
        self.masses[i].clone() / self.grid.volume(i).clone()
    }

    pub fn densities(&self) -> Vec<S> {
        (0..self.len()).map(|i| self.density(i)).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.masses[i] > S::zero()).collect()
    }

    /// The same masses on another grid of identical size.
    pub fn with_grid(&self, grid: Arc<ParamGrid<S>>) -> Result<Self> {
        Self::new(grid, self.masses.clone())
    }
}

/// Bayes update on the grid: posterior mass ∝ prior mass × f_θ(x).
pub fn condition<S, M>(prior: &MassTable<S>, model: &M, observed: &M::Datum) -> Result<MassTable<S>>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
{
    let lik = model.likelihood_column(prior.grid(), observed)?;
    let weights: Vec<S> = prior.masses().iter().zip(lik).map(|(p, l)| p.clone() * l).collect();
    let total = sum(&weights);
    if !(total > S::zero()) {
        return Err(Error::ImpossibleData);
    }
    let masses = weights.into_iter().map(|w| w / total.clone()).collect();
    Ok(MassTable { grid: prior.grid.clone(), masses })
}

/// Conditions on each observation in turn (independent observations).
pub fn condition_all<S, M>(prior: &MassTable<S>, model: &M, observed: &[M::Datum]) -> Result<MassTable<S>>
where
    S: Scalar,
    M: EvalModel<S> + ?Sized,
    M::Datum: Sized,
{
    let mut table = prior.clone();
    for x in observed {
        table = condition(&table, model, x)?;
    }
    Ok(table)
}

/// A 1-1 map on grid points together with the rule for image-cell volumes.
pub trait PointTransform<S: Scalar> {
    fn apply(&self, p: &Point<S>) -> Point<S>;

    /// Volume of the image of the cell centred at `p` with volume `volume`.
    ///
    /// The default handles scalar cells exactly: the cell is the interval
    /// `p ± volume/2` and its image is the interval between the images of
    /// the endpoints. This requires the transform to be monotone on the cell.
    fn image_volume(&self, p: &Point<S>, volume: &S) -> Result<S> {
        if p.arity() != 1 {
            return Err(Error::InvalidArgument("default image volume only covers scalar cells".into()));
        }
        let half = volume.clone() / S::from_i64(2);
        let lo = self.apply(&Point::scalar(p.first().clone() - half.clone()));
        let hi = self.apply(&Point::scalar(p.first().clone() + half));
        if lo.arity() != 1 || hi.arity() != 1 {
            return Err(Error::InvalidArgument("transform changed arity".into()));
        }
        Ok((hi.first().clone() - lo.first().clone()).abs())
    }
}

/// Wraps a closure as a [`PointTransform`] with the default volume rule.
pub struct FnTransform<F>(pub F);

impl<S: Scalar, F: Fn(&Point<S>) -> Point<S>> PointTransform<S> for FnTransform<F> {
    fn apply(&self, p: &Point<S>) -> Point<S> {
        (self.0)(p)
    }
}

/// Moves a table through a 1-1 transform: cell masses are carried over
/// unchanged while cell volumes are transformed.
pub fn pushforward<S, T>(table: &MassTable<S>, transform: &T) -> Result<MassTable<S>>
where
    S: Scalar,
    T: PointTransform<S> + ?Sized,
{
    let grid = table.grid();
    let mut points = Vec::with_capacity(grid.len());
    let mut volumes = Vec::with_capacity(grid.len());
    for (p, v) in grid.points().iter().zip(grid.volumes()) {
        points.push(transform.apply(p));
        volumes.push(transform.image_volume(p, v)?);
    }
    let image = match ParamGrid::new(points, volumes) {
        Ok(g) => g,
        Err(Error::InvalidGrid(msg)) if msg.starts_with("duplicate") => return Err(Error::NonInjective),
        Err(e) => return Err(e),
    };
    Ok(MassTable { grid: Arc::new(image), masses: table.masses.clone() })
}

/// Assignment of every grid point to a value ψ in a finite codomain.
#[derive(Debug, Clone)]
pub struct MarginalMap<S> {
    domain: Arc<ParamGrid<S>>,
    assignment: Vec<usize>,
    codomain: Arc<ParamGrid<S>>,
    identity: bool,
}

impl<S: Scalar> MarginalMap<S> {
    pub fn identity(grid: Arc<ParamGrid<S>>) -> Self {
        let assignment = (0..grid.len()).collect();
        Self { domain: grid.clone(), assignment, codomain: grid, identity: true }
    }

    /// Builds the map from ψ = f(θ). The codomain is the sorted image; each
    /// ψ cell gets the summed volume of its preimage.
    pub fn from_fn(grid: Arc<ParamGrid<S>>, f: impl Fn(&Point<S>) -> Point<S>) -> Result<Self> {
        let values = grid.points().iter().map(f).collect();
        Self::from_values(grid, values)
    }

    pub fn from_values(grid: Arc<ParamGrid<S>>, values: Vec<Point<S>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("{} map values for {} grid points", values.len(), grid.len())));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        let mut incomparable = false;
        order.sort_by(|&a, &b| {
            values[a].lex_cmp(&values[b]).unwrap_or_else(|| {
                incomparable = true;
                Ordering::Equal
            })
        });
        if incomparable {
            return Err(Error::InvalidArgument("map values are not ordered".into()));
        }
        let mut codomain_points: Vec<Point<S>> = Vec::new();
        let mut codomain_volumes: Vec<S> = Vec::new();
        let mut assignment = vec![0; values.len()];
        for &i in &order {
            if codomain_points.last() != Some(&values[i]) {
                codomain_points.push(values[i].clone());
                codomain_volumes.push(S::zero());
            }
            let j = codomain_points.len() - 1;
            assignment[i] = j;
            codomain_volumes[j] = codomain_volumes[j].clone() + grid.volume(i).clone();
        }
        let codomain = Arc::new(ParamGrid::new(codomain_points, codomain_volumes)?);
        Ok(Self { domain: grid, assignment, codomain, identity: false })
    }

    /// Replaces the induced codomain volumes.
    pub fn with_volumes(mut self, volumes: Vec<S>) -> Result<Self> {
        let points = self.codomain.points().to_vec();
        self.codomain = Arc::new(ParamGrid::new(points, volumes)?);
        Ok(self)
    }

    pub fn domain(&self) -> &Arc<ParamGrid<S>> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<ParamGrid<S>> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Grid indices mapped to codomain point `psi`.
    pub fn preimage(&self, psi: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == psi).collect()
    }

    pub(crate) fn check_domain(&self, grid: &Arc<ParamGrid<S>>) -> Result<()> {
        if same_grid(&self.domain, grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Marginal masses: the mass of ψ is the total mass of its preimage.
pub fn marginalize<S: Scalar>(table: &MassTable<S>, map: &MarginalMap<S>) -> Result<MassTable<S>> {
    map.check_domain(table.grid())?;
    if map.is_identity() {
        return Ok(table.clone());
    }
    let mut masses = vec![S::zero(); map.codomain().len()];
    for (i, m) in table.masses().iter().enumerate() {
        let j = map.assignment[i];
        masses[j] = masses[j].clone() + m.clone();
    }
    MassTable::new(map.codomain().clone(), masses)
}

/// Total mass of the grid points satisfying `pred`.
pub fn prob_of<S: Scalar>(table: &MassTable<S>, pred: impl Fn(&Point<S>) -> bool) -> S {
    table
        .grid()
        .points()
        .iter()
        .zip(table.masses())
        .filter(|(p, _)| pred(p))
        .fold(S::zero(), |acc, (_, m)| acc + m.clone())
}

/// Total mass over an explicit index set.
pub fn prob_of_indices<S: Scalar>(table: &MassTable<S>, indices: &[usize]) -> S {
    indices.iter().fold(S::zero(), |acc, &i| acc + table.mass(i).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn uniform_grid_single_cell() {
        let g = make_uniform_grid(0.0, 1.0, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(*g.point(0).first(), 0.5);
        assert_eq!(*g.volume(0), 1.0);
    }

    #[test]
    fn uniform_grid_eleven_cells_exact() {
        let g = make_uniform_grid(r(0, 1), r(1, 1), 11).unwrap();
        for i in 0..11 {
            assert_eq!(*g.point(i).first(), r(2 * i as i64 + 1, 22));
            assert_eq!(*g.volume(i), r(1, 11));
        }
    }

    #[test]
    fn uniform_grid_errors() {
        assert!(make_uniform_grid(0.0, 1.0, 0).is_err());
        assert!(make_uniform_grid(f64::NAN, 1.0, 3).is_err());
        assert!(make_uniform_grid(0.0, f64::INFINITY, 3).is_err());
        assert!(make_uniform_grid(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn grid_rejects_duplicates_and_bad_volumes() {
        assert!(ParamGrid::atoms(vec![0.0, 1.0, 0.0]).is_err());
        assert!(ParamGrid::from_scalars(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(ParamGrid::from_scalars(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(ParamGrid::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn mass_table_validation() {
        let g = Arc::new(ParamGrid::atoms(vec![0.0, 1.0]).unwrap());
        assert!(MassTable::new(g.clone(), vec![0.5, 0.4]).is_err());
        assert!(MassTable::new(g.clone(), vec![1.5, -0.5]).is_err());
        assert!(MassTable::new(g, vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn constant_map_collapses_to_one_point() {
        let g = Arc::new(ParamGrid::atoms(vec![r(0, 1), r(1, 2), r(1, 1)]).unwrap());
        let t = MassTable::new(g.clone(), vec![r(1, 6), r(1, 3), r(1, 2)]).unwrap();
        let map = MarginalMap::from_fn(g, |_| Point::scalar(r(7, 1))).unwrap();
        let m = marginalize(&t, &map).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.masses(), &[r(1, 1)]);
    }

    #[test]
    fn pushforward_detects_non_injective() {
        let g = Arc::new(ParamGrid::atoms(vec![-1.0, 1.0]).unwrap());
        let t = MassTable::uniform(g);
        let sq = FnTransform(|p: &Point<f64>| Point::scalar(p.first() * p.first()));
        assert_eq!(pushforward(&t, &sq), Err(Error::NonInjective));
    }

    #[test]
    fn prob_of_whole_and_empty() {
        let g = Arc::new(make_uniform_grid(0.0, 1.0, 7).unwrap());
        let t = MassTable::uniform(g);
        assert!((prob_of(&t, |_| true) - 1.0_f64).abs() < 1e-15);
        assert_eq!(prob_of(&t, |_| false), 0.0);
    }
}
