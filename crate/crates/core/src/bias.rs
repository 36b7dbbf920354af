//! A-priori bias: the prior-predictive probability of evidence against a
//! hypothesis `ψ0`, computed either when `ψ0` is true (bias against) or when
//! a meaningfully different `ψ′` is true (bias in favor: small values mean
//! the prior-model pair rarely produces evidence against `ψ0` even when it
//! is false).
//!
//! "Evidence against" is the event `RB(ψ0|x) = m(x|ψ0)/m(x) ≤ 1`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gauss::NormalMixture;
use crate::grid::{normal_cdf, normal_sf, GaussianMeanModel, MarginalMap, MassTable, Point, TabularModel};
use crate::scalar::Scalar;
use crate::sim::{estimate_proportion, Proportion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasMethod {
    /// Summation over a finite sample space.
    Exact,
    /// Root finding plus closed-form normal mixture probabilities.
    Quadrature,
    MonteCarlo {
        reps: usize,
        seed: u64,
    },
}

impl BiasMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BiasMethod::Exact => "exact",
            BiasMethod::Quadrature => "quadrature",
            BiasMethod::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSpec<S> {
    pub psi0: Point<S>,
    pub psi_primes: Vec<Point<S>>,
    /// Smallest difference from `ψ0` that matters in the application.
    pub delta: f64,
    pub method: BiasMethod,
}

impl<S: Scalar> BiasSpec<S> {
    pub fn new(psi0: Point<S>, psi_primes: Vec<Point<S>>, delta: f64, method: BiasMethod) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("meaningful difference δ must be positive".into()));
        }
        for p in &psi_primes {
            if p.arity() != psi0.arity() {
                return Err(Error::InvalidArgument(format!("ψ′ = {p} has the wrong arity")));
            }
            if psi0.distance(p) < delta {
                return Err(Error::InvalidArgument(format!("ψ′ = {p} is within δ = {delta} of ψ0 = {psi0}")));
            }
        }
        if let BiasMethod::MonteCarlo { reps, .. } = method {
            if reps == 0 {
                return Err(Error::InvalidArgument("Monte Carlo needs at least one repetition".into()));
            }
        }
        Ok(Self { psi0, psi_primes, delta, method })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasResult<S> {
    pub against: S,
    pub in_favor: Vec<S>,
    /// Standard errors, for Monte Carlo only.
    pub against_se: Option<f64>,
    pub in_favor_se: Vec<Option<f64>>,
    pub method: BiasMethod,
}

/// Prior weights over the θ-slice of `psi`. `None` when the slice has zero
/// prior mass.
fn slice_weights<S: Scalar>(prior: &MassTable<S>, map: &MarginalMap<S>, psi: usize) -> Option<Vec<(usize, S)>> {
    let members: Vec<(usize, S)> =
        map.preimage(psi).into_iter().map(|i| (i, prior.mass(i).clone())).filter(|(_, m)| *m > S::zero()).collect();
    (!members.is_empty()).then_some(members)
}

/// Where the conditional prior predictive given ψ comes from.
enum Source<S> {
    /// Mixture over grid points with these (unnormalized) weights.
    Slice(Vec<(usize, S)>),
    /// A single grid point: the slice has no prior mass but the map is the
    /// identity, so the predictive is the model at that point.
    Point(usize),
    /// An off-grid scalar parameter value under the identity map.
    OffGrid(S),
}

fn resolve<S: Scalar>(
    prior: &MassTable<S>,
    map: &MarginalMap<S>,
    psi: &Point<S>,
    allow_off_grid: bool,
) -> Result<Source<S>> {
    match map.codomain().index_of(psi) {
        Some(j) => match slice_weights(prior, map, j) {
            Some(w) => Ok(Source::Slice(w)),
            None if map.is_identity() => Ok(Source::Point(j)),
            None => Err(Error::ZeroProbability(format!("prior mass of ψ = {psi} is zero"))),
        },
        None if allow_off_grid && map.is_identity() && psi.arity() == 1 => Ok(Source::OffGrid(psi.first().clone())),
        None => Err(Error::NotOnGrid(psi.to_string())),
    }
}

/// Bias against and in favor on a finite sample space.
pub fn bias_tabular<S: Scalar>(
    model: &TabularModel<S>,
    prior: &MassTable<S>,
    map: &MarginalMap<S>,
    spec: &BiasSpec<S>,
) -> Result<BiasResult<S>> {
    map.check_domain(prior.grid())?;
    if model.n_thetas() != prior.len() {
        return Err(Error::InvalidModel("model rows do not match the prior grid".into()));
    }
    let nx = model.n_samples();
    let predictive = |src: &Source<S>| -> Vec<S> {
        let mut out = vec![S::zero(); nx];
        match src {
            Source::Slice(w) => {
                let total = w.iter().fold(S::zero(), |acc, (_, m)| acc + m.clone());
                for (t, m) in w {
                    for (x, _) in model.row(*t) {
                        out[x] = out[x].clone() + m.clone() * model.prob(*t, x) / total.clone();
                    }
                }
            }
            Source::Point(t) => {
                for (x, _) in model.row(*t) {
                    out[x] = model.prob(*t, x);
                }
            }
            Source::OffGrid(_) => unreachable!("off-grid values are rejected for tabular models"),
        }
        out
    };
    let all: Vec<(usize, S)> = prior.masses().iter().cloned().enumerate().collect();
    let marginal = predictive(&Source::Slice(all));
    let src0 = resolve(prior, map, &spec.psi0, false)?;
    let m0 = predictive(&src0);
    let against_event: Vec<bool> = (0..nx).map(|x| marginal[x] > S::zero() && m0[x] <= marginal[x]).collect();
    let sources: Vec<Source<S>> =
        spec.psi_primes.iter().map(|p| resolve(prior, map, p, false)).collect::<Result<_>>()?;

    match spec.method {
        BiasMethod::Exact => {
            let prob = |m: &[S]| {
                m.iter().zip(&against_event).filter(|(_, e)| **e).fold(S::zero(), |acc, (v, _)| acc + v.clone())
            };
            Ok(BiasResult {
                against: prob(&m0),
                in_favor: sources.iter().map(|s| prob(&predictive(s))).collect(),
                against_se: None,
                in_favor_se: vec![None; sources.len()],
                method: spec.method,
            })
        }
        BiasMethod::MonteCarlo { reps, seed } => {
            let sampler = TabularSampler::new(model);
            let run = |src: &Source<S>, stream: u32| -> Proportion {
                let thetas: Vec<(usize, f64)> = match src {
                    Source::Slice(w) => w.iter().map(|(t, m)| (*t, m.as_f64())).collect(),
                    Source::Point(t) => vec![(*t, 1.0)],
                    Source::OffGrid(_) => unreachable!(),
                };
                let cum = cumulative(thetas.iter().map(|t| t.1));
                estimate_proportion(reps, seed, stream, |rng| {
                    let t = thetas[pick(&cum, rng.random::<f64>())].0;
                    against_event[sampler.draw(t, rng.random::<f64>())]
                })
            };
            let p0 = run(&src0, 0);
            let pf: Vec<Proportion> = sources.iter().enumerate().map(|(k, s)| run(s, k as u32 + 1)).collect();
            Ok(BiasResult {
                against: lossy(p0.estimate)?,
                in_favor: pf.iter().map(|p| lossy(p.estimate)).collect::<Result<_>>()?,
                against_se: Some(p0.se),
                in_favor_se: pf.iter().map(|p| Some(p.se)).collect(),
                method: spec.method,
            })
        }
        BiasMethod::Quadrature => {
            Err(Error::InvalidArgument("quadrature applies to continuous models; use exact".into()))
        }
    }
}

fn lossy<S: Scalar>(x: f64) -> Result<S> {
    S::from_f64_lossy(x).ok_or_else(|| Error::InvalidArgument(format!("{x} not representable")))
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    let total = acc;
    for c in &mut out {
        *c /= total;
    }
    out
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

struct TabularSampler {
    rows: Vec<(Vec<usize>, Vec<f64>)>,
}

impl TabularSampler {
    fn new<S: Scalar>(model: &TabularModel<S>) -> Self {
        let rows = (0..model.n_thetas())
            .map(|t| {
                let xs: Vec<usize> = model.row(t).map(|(x, _)| x).collect();
                let cum = cumulative(xs.iter().map(|&x| model.prob(t, x).as_f64()));
                (xs, cum)
            })
            .collect();
        Self { rows }
    }

    fn draw(&self, theta: usize, u: f64) -> usize {
        let (xs, cum) = &self.rows[theta];
        xs[pick(cum, u)]
    }
}

/// Number of evaluation points used to bracket the boundary of the
/// evidence-against region before bisection.
const ROOT_SCAN: usize = 4000;

/// Bias against and in favor for the location-normal model.
///
/// ψ′ values off the grid are allowed under the identity map; the model at
/// that value is used directly.
pub fn bias_gaussian(
    model: &GaussianMeanModel,
    prior: &MassTable<f64>,
    map: &MarginalMap<f64>,
    spec: &BiasSpec<f64>,
) -> Result<BiasResult<f64>> {
    map.check_domain(prior.grid())?;
    let locs = GaussianMeanModel::locations(prior.grid())?;
    let sd = model.sd();
    let mixture = |src: &Source<f64>| -> Result<NormalMixture> {
        match src {
            Source::Slice(w) => {
                NormalMixture::new(w.iter().map(|(i, _)| locs[*i]).collect(), w.iter().map(|(_, m)| *m).collect(), sd)
            }
            Source::Point(i) => NormalMixture::single(locs[*i], sd),
            Source::OffGrid(v) => NormalMixture::single(*v, sd),
        }
    };
    let marginal = NormalMixture::new(locs.clone(), prior.masses().to_vec(), sd)?;
    let null = mixture(&resolve(prior, map, &spec.psi0, true)?)?;
    let alts: Vec<NormalMixture> = spec
        .psi_primes
        .iter()
        .map(|p| resolve(prior, map, p, true).and_then(|s| mixture(&s)))
        .collect::<Result<_>>()?;
    // log RB(ψ0 | t)
    let log_rb = |t: f64| null.pdf(t).ln() - marginal.pdf(t).ln();
    let against = |t: f64| log_rb(t) <= 0.0;

    match spec.method {
        BiasMethod::Quadrature => {
            let prob = |e: &NormalMixture| region_probability(e, &log_rb);
            Ok(BiasResult {
                against: prob(&null),
                in_favor: alts.iter().map(prob).collect(),
                against_se: None,
                in_favor_se: vec![None; alts.len()],
                method: spec.method,
            })
        }
        BiasMethod::MonteCarlo { reps, seed } => {
            let run = |e: &NormalMixture, stream: u32| {
                estimate_proportion(reps, seed, stream, |rng| {
                    let c = e.component(rng.random::<f64>());
                    let z: f64 = StandardNormal.sample(rng);
                    against(e.locs()[c] + e.sd() * z)
                })
            };
            let p0 = run(&null, 0);
            let pf: Vec<Proportion> = alts.iter().enumerate().map(|(k, e)| run(e, k as u32 + 1)).collect();
            Ok(BiasResult {
                against: p0.estimate,
                in_favor: pf.iter().map(|p| p.estimate).collect(),
                against_se: Some(p0.se),
                in_favor_se: pf.iter().map(|p| Some(p.se)).collect(),
                method: spec.method,
            })
        }
        BiasMethod::Exact => {
            Err(Error::InvalidArgument("exact enumeration needs a finite sample space; use quadrature".into()))
        }
    }
}

/// Probability under `e` of `{t : f(t) ≤ 0}`, locating sign changes of `f`
/// on a scan of the effective support of `e` and refining them by bisection.
fn region_probability(e: &NormalMixture, f: &impl Fn(f64) -> f64) -> f64 {
    let (a, b) = e.support();
    let inside = |t: f64| f(t) <= 0.0;
    let step = (b - a) / ROOT_SCAN as f64;
    let mut total = 0.0;
    let mut start = inside(a).then_some(f64::NEG_INFINITY);
    let mut prev_t = a;
    let mut prev_in = inside(a);
    for k in 1..=ROOT_SCAN {
        let t = if k == ROOT_SCAN { b } else { a + k as f64 * step };
        let now = inside(t);
        if now != prev_in {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == prev_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let edge = 0.5 * (lo + hi);
            match start.take() {
                Some(s) => total += mass(e, s, edge),
                None => start = Some(edge),
            }
        }
        prev_t = t;
        prev_in = now;
    }
    if let Some(s) = start {
        total += mass(e, s, f64::INFINITY);
    }
    total.clamp(0.0, 1.0)
}

fn mass(e: &NormalMixture, lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (false, false) => 1.0,
        (false, true) => e.cdf(hi),
        (true, false) => e.sf(lo),
        (true, true) => e.interval(lo, hi),
    }
}

/// `c_n` such that `RB(0|x) ≤ 1` exactly when `|x̄|√n ≥ c_n`, for
/// `x̄ ~ N(θ, 1/n)` and prior `N(0, σ²)`:
/// `c_n = √max(0, (1 + 1/(nσ²))·log(1 + nσ²))`.
pub fn jl_cutoff(n: usize, sigma2: f64) -> f64 {
    let a = n as f64 * sigma2;
    ((1.0 + 1.0 / a) * a.ln_1p()).max(0.0).sqrt()
}

/// `P(RB(0|X) ≤ 1 | θ) = 1 − Φ(c_n − θ√n) + Φ(−c_n − θ√n)`.
pub fn jl_bias_closed_form(n: usize, sigma2: f64, theta: f64) -> f64 {
    let c = jl_cutoff(n, sigma2);
    let s = theta * (n as f64).sqrt();
    normal_sf(c - s) + normal_cdf(-c - s)
}

/// `P(RB(ψ0|X) ≤ 1 | θ)` for `x̄ ~ N(θ, 1/n)` with a `N(prior_mean, σ²)`
/// prior and the hypothesis `θ = ψ0`.
///
/// `RB(ψ0|t) = N(t; ψ0, 1/n) / N(t; prior_mean, σ² + 1/n)`, and
/// `RB ≤ 1` is a quadratic inequality in `t` whose solution set is
/// `(−∞, r1] ∪ [r2, ∞)`.
pub fn normal_prior_bias(n: usize, prior_mean: f64, sigma2: f64, psi0: f64, theta: f64) -> Result<f64> {
    if n == 0 || !(sigma2 > 0.0) {
        return Err(Error::InvalidArgument("n ≥ 1 and σ² > 0 required".into()));
    }
    let nf = n as f64;
    let s2 = sigma2 + 1.0 / nf;
    // n(t−ψ0)²/2 − (t−m)²/(2s²) − log(n s²)/2 ≥ 0
    let qa = 0.5 * (nf - 1.0 / s2);
    let qb = -nf * psi0 + prior_mean / s2;
    let qc = 0.5 * nf * psi0 * psi0 - 0.5 * prior_mean * prior_mean / s2 - 0.5 * (nf * s2).ln();
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return Ok(1.0);
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let (mut r1, mut r2) = if q != 0.0 { (q / qa, qc / q) } else { (-sq / (2.0 * qa), sq / (2.0 * qa)) };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    let rt = nf.sqrt();
    Ok(normal_cdf((r1 - theta) * rt) + normal_sf((r2 - theta) * rt))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub against: f64,
    pub in_favor: f64,
}

/// Bias against `ψ0` and in favor at `ψ′` along a list of sample sizes, for
/// the location-normal model with a `N(ψ0, σ²)` prior.
pub fn bias_convergence_study(sigma2: f64, psi0: f64, psi_prime: f64, n_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if psi_prime == psi0 {
        return Err(Error::InvalidArgument("ψ′ must differ from ψ0".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            Ok(ConvergenceRow {
                n,
                against: normal_prior_bias(n, psi0, sigma2, psi0, psi0)?,
                in_favor: normal_prior_bias(n, psi0, sigma2, psi0, psi_prime)?,
            })
        })
        .collect()
}
