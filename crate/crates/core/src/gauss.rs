//! Normal-distribution helpers shared by the Gaussian backends: the
//! quantile function, finite normal mixtures with a common component
//! standard deviation, and discretized normal priors.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{normal_cdf, normal_pdf, normal_sf, MassTable, ParamGrid};

/// Components further than this many standard deviations from the
/// evaluation point are treated as contributing nothing (density) or
/// everything / nothing (CDF).
const WINDOW_SDS: f64 = 12.0;

/// `Φ⁻¹(p)` by bisection followed by Newton polishing.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -normal_quantile(1.0 - p);
    }
    let (mut lo, mut hi) = (-40.0, 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = normal_pdf(z);
        if d == 0.0 {
            break;
        }
        z -= (normal_cdf(z) - p) / d;
    }
    z
}

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `Σ w_i N(μ_i, sd²)` with sorted locations.
#[derive(Debug, Clone)]
pub struct NormalMixture {
    locs: Vec<f64>,
    weights: Vec<f64>,
    prefix: Vec<f64>,
    sd: f64,
}

impl NormalMixture {
    /// Weights are normalized; zero-weight components are dropped.
    pub fn new(locs: Vec<f64>, weights: Vec<f64>, sd: f64) -> Result<Self> {
        if locs.len() != weights.len() {
            return Err(Error::InvalidArgument("one weight per location required".into()));
        }
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::InvalidArgument("mixture sd must be positive".into()));
        }
        let mut comps: Vec<(f64, f64)> = locs.into_iter().zip(weights).filter(|(_, w)| *w > 0.0).collect();
        if comps.iter().any(|(l, w)| !l.is_finite() || !w.is_finite()) {
            return Err(Error::InvalidArgument("non-finite mixture component".into()));
        }
        if comps.is_empty() {
            return Err(Error::ZeroProbability("mixture has no positive weight".into()));
        }
        comps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = comps.iter().map(|c| c.1).sum();
        let (locs, weights): (Vec<f64>, Vec<f64>) = comps.into_iter().map(|(l, w)| (l, w / total)).unzip();
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            prefix.push(acc);
        }
        Ok(Self { locs, weights, prefix, sd })
    }

    pub fn single(loc: f64, sd: f64) -> Result<Self> {
        Self::new(vec![loc], vec![1.0], sd)
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn locs(&self) -> &[f64] {
        &self.locs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Interval outside which the mixture has negligible mass.
    pub fn support(&self) -> (f64, f64) {
        (self.locs[0] - WINDOW_SDS * self.sd, self.locs[self.locs.len() - 1] + WINDOW_SDS * self.sd)
    }

    fn window(&self, t: f64) -> (usize, usize) {
        let r = WINDOW_SDS * self.sd;
        (self.locs.partition_point(|&l| l < t - r), self.locs.partition_point(|&l| l <= t + r))
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let (a, b) = self.window(t);
        let s: f64 = (a..b).map(|i| self.weights[i] * normal_pdf((t - self.locs[i]) / self.sd)).sum();
        s / self.sd
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (a, b) = self.window(t);
        let inner: f64 = (a..b).map(|i| self.weights[i] * normal_cdf((t - self.locs[i]) / self.sd)).sum();
        (self.prefix[a] + inner).min(1.0)
    }

    pub fn sf(&self, t: f64) -> f64 {
        let (a, b) = self.window(t);
        let inner: f64 = (a..b).map(|i| self.weights[i] * normal_sf((t - self.locs[i]) / self.sd)).sum();
        (self.prefix[self.prefix.len() - 1] - self.prefix[b] + inner).min(1.0)
    }

    /// Mass of `[lo, hi]`.
    pub fn interval(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        // Subtract in the tail that keeps precision.
        let mid = 0.5 * (lo + hi);
        if self.cdf(mid) < 0.5 {
            (self.cdf(hi) - self.cdf(lo)).max(0.0)
        } else {
            (self.sf(lo) - self.sf(hi)).max(0.0)
        }
    }

    /// Draws a component index from a uniform `u ∈ [0, 1)`.
    pub fn component(&self, u: f64) -> usize {
        self.prefix[1..].partition_point(|&p| p <= u).min(self.locs.len() - 1)
    }
}

/// Discretization of `N(mean, sd²)` on `mean ± span·sd`.
///
/// The base grid has an odd number of equal cells (at least `min_cells`)
/// with one cell centred exactly at the mean. Base cells meeting
/// `refine = (lo, hi, width)` are split into an odd number of subcells no
/// wider than `width`, which keeps the centred cell centred. Cell masses
/// are exact normal probabilities, renormalized over the truncated range.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalGridSpec {
    pub mean: f64,
    pub sd: f64,
    pub span: f64,
    pub min_cells: usize,
    pub refine: Option<(f64, f64, f64)>,
}

impl NormalGridSpec {
    pub fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd, span: 8.0, min_cells: 10_001, refine: None }
    }

    pub fn refined(mut self, lo: f64, hi: f64, width: f64) -> Self {
        self.refine = Some((lo, hi, width));
        self
    }

    /// Grid and prior table. The index of the cell centred at the mean is
    /// returned alongside.
    pub fn build(&self) -> Result<(MassTable<f64>, usize)> {
        if !(self.sd > 0.0 && self.sd.is_finite() && self.mean.is_finite()) {
            return Err(Error::InvalidArgument("normal grid needs a finite mean and positive sd".into()));
        }
        if !(self.span > 0.0) || self.min_cells == 0 {
            return Err(Error::InvalidArgument("normal grid needs a positive span and cell count".into()));
        }
        let k = (self.min_cells / 2) as i64;
        let big = self.span * self.sd / (k as f64 + 0.5);
        let mut edges: Vec<f64> = Vec::new();
        let mut centre = 0usize;
        for j in -k..=k {
            let lo = (j as f64 - 0.5) * big;
            let hi = (j as f64 + 0.5) * big;
            let pieces = match self.refine {
                Some((a, b, w)) if w > 0.0 && self.mean + hi > a && self.mean + lo < b && w < big => {
                    let m = (big / w).ceil() as usize;
                    m | 1
                }
                _ => 1,
            };
            if edges.is_empty() {
                edges.push(lo);
            }
            for s in 1..=pieces {
                if j == 0 && s == pieces / 2 + 1 {
                    centre = edges.len() - 1;
                }
                edges.push(lo + big * s as f64 / pieces as f64);
            }
        }
        let n = edges.len() - 1;
        let mut points = Vec::with_capacity(n);
        let mut volumes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let (lo, hi) = (edges[i], edges[i + 1]);
            points.push(if i == centre { self.mean } else { self.mean + 0.5 * (lo + hi) });
            volumes.push(hi - lo);
            let (zl, zh) = (lo / self.sd, hi / self.sd);
            weights.push(if zl >= 0.0 { normal_sf(zl) - normal_sf(zh) } else { normal_cdf(zh) - normal_cdf(zl) });
        }
        let grid = Arc::new(ParamGrid::from_scalars(points, volumes)?);
        Ok((MassTable::from_weights(grid, weights)?, centre))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for p in [1e-12, 1e-6, 0.025, 0.3, 0.5, 0.8, 0.975, 1.0 - 1e-9] {
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() < 1e-14 * p.max(1e-2), "p = {p}");
        }
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-12);
        assert!(normal_quantile(0.5).abs() < 1e-15);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 4);
        assert!((v - 3.75).abs() < 1e-12);
    }

    #[test]
    fn mixture_pdf_cdf_consistent() {
        let m = NormalMixture::new(vec![1.0, -1.0, 0.0], vec![1.0, 2.0, 1.0], 0.5).unwrap();
        assert_eq!(m.locs(), &[-1.0, 0.0, 1.0]);
        let direct = |t: f64| {
            (0.5 * normal_pdf((t + 1.0) / 0.5) + 0.25 * normal_pdf(t / 0.5) + 0.25 * normal_pdf((t - 1.0) / 0.5)) / 0.5
        };
        for t in [-3.0, -0.4, 0.0, 0.7, 2.5] {
            assert!((m.pdf(t) - direct(t)).abs() < 1e-14);
            assert!((m.cdf(t) + m.sf(t) - 1.0).abs() < 1e-14);
        }
        let integral = simpson(|t| m.pdf(t), -10.0, 0.3, 4000);
        assert!((integral - m.cdf(0.3)).abs() < 1e-10);
        assert!((m.interval(-0.5, 0.3) - (m.cdf(0.3) - m.cdf(-0.5))).abs() < 1e-14);
        assert_eq!(m.component(0.0), 0);
        assert_eq!(m.component(0.6), 1);
        assert_eq!(m.component(0.99), 2);
    }

    #[test]
    fn normal_grid_has_centred_cell() {
        let (t, c) = NormalGridSpec::new(0.0, 20.0).refined(-1.0, 1.0, 0.01).build().unwrap();
        let g = t.grid();
        assert_eq!(*g.point(c).first(), 0.0);
        assert!(g.len() >= 10_001);
        assert!((g.total_volume() - 320.0).abs() < 1e-9);
        assert!(g.volume(c) <= &0.01);
        // symmetric about the centre
        let n = g.len();
        assert_eq!(c, n / 2);
        for i in [0, 17, c - 1] {
            assert!((g.point(i).first() + g.point(n - 1 - i).first()).abs() < 1e-9);
            assert!((t.mass(i) - t.mass(n - 1 - i)).abs() < 1e-15);
        }
        // mass of the centred cell matches the normal probability
        let w = g.volume(c);
        let expect = normal_cdf(w / 40.0) - normal_cdf(-w / 40.0);
        assert!((t.mass(c) - expect).abs() < 1e-15);
    }

    #[test]
    fn plain_grid_is_uniform() {
        let (t, c) = NormalGridSpec::new(1.0, 1.0).build().unwrap();
        assert_eq!(t.len(), 10_001);
        assert_eq!(c, 5000);
        assert_eq!(*t.grid().point(c).first(), 1.0);
        let w0 = *t.grid().volume(0);
        assert!(t.grid().volumes().iter().all(|w| (w - w0).abs() < 1e-12));
    }
}
