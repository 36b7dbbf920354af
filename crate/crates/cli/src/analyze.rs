//! `rbel analyze`: config → posterior → RB curve, verdicts, regions, bias.

use std::path::Path;
use std::sync::Arc;

use rbel::bayes::{bayes_factor, map_estimate};
use rbel::bias::{bias_gaussian, bias_tabular, BiasMethod, BiasResult, BiasSpec};
use rbel::freq::{z_test_p_value, Tail};
use rbel::likelihood::{likelihood_region, mle, LikelihoodCurve};
use rbel::relbel::{gamma_region, plausible_region, rb_curve, strength_curve, Direction, RegionResult};
use rbel::{
    condition, condition_all, make_uniform_grid, marginalize, normal_pdf, BigRational, EvalModel, GaussianMeanModel,
    MarginalMap, MassTable, ParamGrid, Point, Scalar, StrengthVariant, TabularModel,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{
    AnalysisConfig, Arithmetic, BiasMethodChoice, GridSpec, MarginalSpec, ModelSpec, Num, PriorSpec, StrengthChoice,
    Transform,
};
use crate::error::{invalid, numeric, CliError, CliResult};
use crate::output::{csv_string, json_string, num, write_atomic};
use crate::scales::{jeffreys_label, ConventionalScales, ROYALL_BENCHMARK, SCALES_HEADING};
use crate::svg::rb_plot;

pub const RB_CURVE_HEADER: [&str; 6] = ["psi", "prior_mass", "posterior_mass", "rb", "verdict", "strength"];
pub const REGIONS_HEADER: [&str; 6] = ["region", "level", "content", "psi", "posterior_mass", "rb"];
pub const BIAS_HEADER: [&str; 6] = ["psi0", "psi_prime", "kind", "value", "se", "method"];

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: AnalysisConfig,
    pub data_summary: DataSummary,
    pub rb_curve: Vec<CurveRow>,
    pub mrbe: Mrbe,
    pub hypotheses: Vec<HypothesisReport>,
    pub gamma_region: RegionReport,
    pub plausible_region: RegionReport,
    pub bias: Vec<BiasRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    pub conventional_scales: ConventionalScales,
}

#[derive(Debug, Serialize)]
pub struct DataSummary {
    pub observations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xbar: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CurveRow {
    pub psi: Value,
    pub prior_mass: f64,
    pub posterior_mass: f64,
    pub rb: Option<f64>,
    pub verdict: &'static str,
    pub strength: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Mrbe {
    pub psi: Value,
    pub rb: f64,
    pub ties: Vec<Value>,
}

#[derive(Debug, Serialize)]
pub struct HypothesisReport {
    pub psi0: Value,
    /// Grid value of ψ whose cell contains ψ0.
    pub psi0_grid: Value,
    pub delta: f64,
    pub rb: Option<f64>,
    pub verdict: &'static str,
    pub strength: Option<f64>,
    pub strength_variant: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RegionReport {
    pub level: f64,
    pub content: f64,
    pub members: Vec<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasRow {
    pub psi0: String,
    pub psi_prime: String,
    pub kind: &'static str,
    pub value: String,
    pub se: String,
    pub method: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub map: Value,
    pub mle: Value,
    pub likelihood_region: Vec<Value>,
    pub bayes_factors: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
}

/// Everything `analyze` writes.
pub struct Analysis {
    pub report: Report,
    pub rb_curve_csv: String,
    pub regions_csv: String,
    pub bias_csv: String,
    pub svg: String,
}

impl Analysis {
    pub fn write(&self, out: &Path) -> CliResult<()> {
        let files: [(&str, String); 5] = [
            ("report.json", json_string(&self.report)?),
            ("rb_curve.csv", self.rb_curve_csv.clone()),
            ("regions.csv", self.regions_csv.clone()),
            ("bias.csv", self.bias_csv.clone()),
            ("rb_plot.svg", self.svg.clone()),
        ];
        for (name, body) in files {
            write_atomic(&out.join(name), body.as_bytes())?;
        }
        Ok(())
    }
}

pub fn run(cfg: AnalysisConfig, base: &Path) -> CliResult<Analysis> {
    let raw = load_data(&cfg, base)?;
    match (&cfg.model, cfg.arithmetic) {
        (ModelSpec::GaussianMean {}, _) => run_gaussian(cfg, &raw),
        (_, Arithmetic::Exact) => run_finite::<BigRational>(cfg, &raw),
        (_, Arithmetic::Float) => run_finite::<f64>(cfg, &raw),
    }
}

fn load_data(cfg: &AnalysisConfig, base: &Path) -> CliResult<Vec<Num>> {
    if let Some(v) = &cfg.data.values {
        return Ok(v.clone());
    }
    let Some(path) = &cfg.data.csv else { return Ok(Vec::new()) };
    let path = base.join(path);
    let mut rdr = csv::Reader::from_path(&path).map_err(|e| CliError::config("data.csv", e))?;
    let col =
        rdr.headers().map_err(|e| CliError::config("data.csv", e))?.iter().position(|h| h.trim() == "x").unwrap_or(0);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::config("data.csv", e))?;
        let v =
            rec.get(col).ok_or_else(|| CliError::config("data.csv", format!("row {} has no column {col}", i + 2)))?;
        out.push(Num(v.trim().to_string()));
    }
    Ok(out)
}

fn nums<S: Scalar>(v: &[Num], field: &str) -> CliResult<Vec<S>> {
    v.iter().enumerate().map(|(i, n)| n.at(&format!("{field}[{i}]"))).collect()
}

fn build_grid<S: Scalar>(spec: &GridSpec) -> CliResult<Arc<ParamGrid<S>>> {
    let grid = match spec {
        GridSpec::Uniform { lo, hi, cells } => make_uniform_grid(lo.at("grid.lo")?, hi.at("grid.hi")?, *cells),
        GridSpec::Explicit { points, volumes } => {
            let p: Vec<S> = nums(points, "grid.points")?;
            let v = match volumes {
                Some(v) => nums(v, "grid.volumes")?,
                None => vec![S::one(); p.len()],
            };
            ParamGrid::from_scalars(p, v)
        }
    };
    grid.map(Arc::new).map_err(invalid("grid"))
}

fn build_prior<S: Scalar>(spec: &PriorSpec, grid: &Arc<ParamGrid<S>>) -> CliResult<MassTable<S>> {
    match spec {
        PriorSpec::Uniform {} => Ok(MassTable::uniform(grid.clone())),
        PriorSpec::Normal { mean, sd } => {
            let (m, s): (f64, f64) = (mean.at("prior.mean")?, sd.at("prior.sd")?);
            if !(s > 0.0) {
                return Err(CliError::config("prior.sd", "must be positive"));
            }
            let w = grid
                .points()
                .iter()
                .zip(grid.volumes())
                .map(|(p, v)| {
                    S::from_f64_lossy(normal_pdf((p.first().as_f64() - m) / s) * v.as_f64()).unwrap_or_else(S::zero)
                })
                .collect();
            MassTable::from_weights(grid.clone(), w).map_err(invalid("prior"))
        }
        PriorSpec::Table { masses } => {
            MassTable::new(grid.clone(), nums(masses, "prior.masses")?).map_err(invalid("prior.masses"))
        }
    }
}

fn build_map<S: Scalar>(spec: Option<&MarginalSpec>, grid: &Arc<ParamGrid<S>>) -> CliResult<MarginalMap<S>> {
    let Some(spec) = spec else { return Ok(MarginalMap::identity(grid.clone())) };
    let map = match (spec.transform, &spec.values) {
        (Some(Transform::Identity), _) => return Ok(MarginalMap::identity(grid.clone())),
        (Some(Transform::Square), _) => {
            MarginalMap::from_fn(grid.clone(), |p| Point::scalar(p.first().clone() * p.first().clone()))
        }
        (Some(Transform::Abs), _) => MarginalMap::from_fn(grid.clone(), |p| Point::scalar(p.first().abs())),
        (None, Some(v)) => MarginalMap::from_values(
            grid.clone(),
            nums::<S>(v, "marginal.values")?.into_iter().map(Point::scalar).collect(),
        ),
        (None, None) => unreachable!("validated"),
    };
    map.map_err(invalid("marginal"))
}

fn psi_value<S: Scalar>(p: &Point<S>) -> Value {
    let f = |x: &S| serde_json::Number::from_f64(x.as_f64()).map_or(Value::Null, Value::Number);
    if p.arity() == 1 {
        f(p.first())
    } else {
        Value::Array(p.0.iter().map(f).collect())
    }
}

/// Index of the ψ cell containing `value`: an exact grid match, or for
/// float grids the nearest point within half a cell.
fn locate<S: Scalar>(grid: &ParamGrid<S>, value: &S, field: &str) -> CliResult<usize> {
    let p = Point::scalar(value.clone());
    if let Some(i) = grid.index_of(&p) {
        return Ok(i);
    }
    if !S::EXACT && grid.arity() == 1 {
        let i = grid.nearest(&p);
        let gap = (grid.point(i).first().as_f64() - value.as_f64()).abs();
        if gap <= 0.5 * grid.volume(i).as_f64() * (1.0 + 1e-12) {
            return Ok(i);
        }
    }
    Err(CliError::config(field, format!("{value} is not a ψ grid value")))
}

fn direction_name<S: Scalar>(rb: Option<&S>) -> &'static str {
    rb.map_or("undefined", |r| Direction::of(r).as_str())
}

struct Finished<S> {
    prior: MassTable<S>,
    posterior: MassTable<S>,
    likelihood: LikelihoodCurve<S>,
    map: MarginalMap<S>,
    summary: DataSummary,
}

fn variant(c: StrengthChoice) -> StrengthVariant {
    match c {
        StrengthChoice::Directional => StrengthVariant::Directional,
        StrengthChoice::LowerTail => StrengthVariant::LowerTail,
    }
}

fn bias_method(cfg: &AnalysisConfig) -> Option<BiasMethod> {
    cfg.bias.as_ref().map(|b| match b.method {
        BiasMethodChoice::Exact => BiasMethod::Exact,
        BiasMethodChoice::Quadrature => BiasMethod::Quadrature,
        BiasMethodChoice::MonteCarlo => BiasMethod::MonteCarlo { reps: b.reps.unwrap_or(0), seed: b.seed.unwrap_or(0) },
    })
}

/// The shared part of the pipeline once prior, posterior and likelihood
/// exist. `bias` evaluates one spec; `p_value` gives a z-test p-value at ψ0.
fn finish<S: Scalar>(
    cfg: AnalysisConfig,
    f: Finished<S>,
    off_grid_psi_prime: bool,
    bias: impl Fn(&BiasSpec<S>) -> rbel::Result<BiasResult<S>>,
    p_value: Option<&dyn Fn(f64) -> rbel::Result<f64>>,
) -> CliResult<Analysis> {
    let variant = variant(cfg.strength_variant);
    let curve = rb_curve(&f.prior, &f.posterior, Some(&f.map)).map_err(numeric("rb_curve"))?;
    let psi_grid = curve.grid().clone();
    let strengths = strength_curve(&curve, variant);

    let mut rows = Vec::with_capacity(curve.len());
    let mut csv_rows = Vec::with_capacity(curve.len());
    for (i, strength) in strengths.iter().enumerate() {
        let rb = curve.values()[i].as_ref();
        rows.push(CurveRow {
            psi: psi_value(psi_grid.point(i)),
            prior_mass: curve.prior_mass()[i].as_f64(),
            posterior_mass: curve.posterior_mass()[i].as_f64(),
            rb: rb.map(Scalar::as_f64),
            verdict: direction_name(rb),
            strength: strength.as_ref().map(Scalar::as_f64),
        });
        csv_rows.push([
            psi_grid.point(i).to_string(),
            fmt_s(&curve.prior_mass()[i]),
            fmt_s(&curve.posterior_mass()[i]),
            rb.map(fmt_s).unwrap_or_default(),
            direction_name(rb).to_string(),
            strength.as_ref().map(fmt_s).unwrap_or_default(),
        ]);
    }

    let best = rbel::relbel::mrbe(&curve);
    let mrbe = Mrbe {
        psi: psi_value(&best.point),
        rb: curve.values()[best.index].as_ref().map_or(f64::NAN, Scalar::as_f64),
        ties: best.ties.iter().map(|&i| psi_value(psi_grid.point(i))).collect(),
    };

    let mut hyps = Vec::new();
    let mut psi0_idx = Vec::new();
    for (i, h) in cfg.hypotheses.iter().enumerate() {
        let field = format!("hypotheses[{i}].psi0");
        let v: S = h.psi0.at(&field)?;
        let idx = locate(&psi_grid, &v, &field)?;
        psi0_idx.push(idx);
        let rb = curve.values()[idx].as_ref();
        hyps.push(HypothesisReport {
            psi0: psi_value(&Point::scalar(v)),
            psi0_grid: psi_value(psi_grid.point(idx)),
            delta: h.delta.at(&format!("hypotheses[{i}].delta"))?,
            rb: rb.map(Scalar::as_f64),
            verdict: direction_name(rb),
            strength: strengths[idx].as_ref().map(Scalar::as_f64),
            strength_variant: variant.as_str(),
        });
    }

    let gamma: S = cfg.gamma.at("gamma")?;
    let q: S = cfg.q.at("q")?;
    let g = gamma_region(&curve, gamma.clone()).map_err(numeric("gamma_region"))?;
    let p = plausible_region(&curve, q).map_err(numeric("plausible_region"))?;
    let region_report = |r: &RegionResult<S>| RegionReport {
        level: r.threshold.as_f64(),
        content: r.content.as_f64(),
        members: r.members.iter().map(|&i| psi_value(psi_grid.point(i))).collect(),
    };
    let mut region_rows = Vec::new();
    for (name, r) in [("gamma", &g), ("plausible", &p)] {
        for &i in &r.members {
            region_rows.push([
                name.to_string(),
                fmt_s(&r.threshold),
                fmt_s(&r.content),
                psi_grid.point(i).to_string(),
                fmt_s(&curve.posterior_mass()[i]),
                curve.values()[i].as_ref().map(fmt_s).unwrap_or_default(),
            ]);
        }
    }

    let mut bias_rows = Vec::new();
    if let (Some(b), Some(method)) = (&cfg.bias, bias_method(&cfg)) {
        for (hyp, &idx) in hyps.iter().zip(&psi0_idx) {
            let psi0 = psi_grid.point(idx).clone();
            let mut primes = Vec::new();
            for (k, n) in b.psi_primes.iter().enumerate() {
                let field = format!("bias.psi_primes[{k}]");
                let v: S = n.at(&field)?;
                let point = if off_grid_psi_prime {
                    Point::scalar(v)
                } else {
                    psi_grid.point(locate(&psi_grid, &v, &field)?).clone()
                };
                primes.push(point);
            }
            let spec = BiasSpec::new(psi0.clone(), primes, hyp.delta, method).map_err(invalid("bias"))?;
            let res = bias(&spec).map_err(numeric("bias"))?;
            let se = |s: Option<f64>| s.map(num).unwrap_or_default();
            bias_rows.push(BiasRow {
                psi0: psi0.to_string(),
                psi_prime: String::new(),
                kind: "against",
                value: fmt_s(&res.against),
                se: se(res.against_se),
                method: method.as_str(),
            });
            for ((pp, v), s) in spec.psi_primes.iter().zip(&res.in_favor).zip(&res.in_favor_se) {
                bias_rows.push(BiasRow {
                    psi0: psi0.to_string(),
                    psi_prime: pp.to_string(),
                    kind: "in_favor",
                    value: fmt_s(v),
                    se: se(*s),
                    method: method.as_str(),
                });
            }
        }
    }

    let comparison = if cfg.compare {
        let marg_prior = marginalize(&f.prior, &f.map).map_err(numeric("marginalize"))?;
        let marg_post = marginalize(&f.posterior, &f.map).map_err(numeric("marginalize"))?;
        let mut bfs = Vec::new();
        for &idx in &psi0_idx {
            let target = psi_grid.point(idx).clone();
            bfs.push(Some(
                bayes_factor(&marg_prior, &marg_post, |p| *p == target).map_err(numeric("bayes_factor"))?.bf.as_f64(),
            ));
        }
        let p_values = match p_value {
            Some(pv) => Some(
                cfg.hypotheses
                    .iter()
                    .enumerate()
                    .map(|(i, h)| pv(h.psi0.at(&format!("hypotheses[{i}].psi0"))?).map_err(numeric("z_test_p_value")))
                    .collect::<CliResult<Vec<f64>>>()?,
            ),
            None => None,
        };
        let lr = likelihood_region(&f.likelihood, gamma.clone()).map_err(numeric("likelihood_region"))?;
        Some(Comparison {
            map: psi_value(&map_estimate(&f.posterior).point),
            mle: psi_value(&mle(&f.likelihood).point),
            likelihood_region: lr.iter().map(|&i| psi_value(f.prior.grid().point(i))).collect(),
            bayes_factors: bfs,
            p_values,
        })
    } else {
        None
    };

    let royall = likelihood_region(&f.likelihood, S::one() - S::from_f64_lossy(ROYALL_BENCHMARK).expect("finite"))
        .map_err(numeric("likelihood_region"))?;
    let scales = ConventionalScales {
        heading: SCALES_HEADING,
        jeffreys: hyps.iter().map(|h| h.rb.map(jeffreys_label)).collect(),
        royall_benchmark: ROYALL_BENCHMARK,
        royall_region: royall.iter().map(|&i| psi_value(f.prior.grid().point(i))).collect(),
    };

    let xs: Vec<f64> = (0..curve.len())
        .map(|i| if psi_grid.arity() == 1 { psi_grid.point(i).first().as_f64() } else { i as f64 })
        .collect();
    let rb_f: Vec<Option<f64>> = curve.values().iter().map(|r| r.as_ref().map(Scalar::as_f64)).collect();
    let dens: Vec<f64> =
        (0..curve.len()).map(|i| curve.posterior_mass()[i].as_f64() / psi_grid.volume(i).as_f64()).collect();

    let report = Report {
        tool: "rbel",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        data_summary: f.summary,
        rb_curve: rows,
        mrbe,
        hypotheses: hyps,
        gamma_region: region_report(&g),
        plausible_region: region_report(&p),
        bias: bias_rows.clone(),
        comparison,
        conventional_scales: scales,
    };
    Ok(Analysis {
        report,
        rb_curve_csv: csv_string(&RB_CURVE_HEADER, &csv_rows)?,
        regions_csv: csv_string(&REGIONS_HEADER, &region_rows)?,
        bias_csv: csv_string(&BIAS_HEADER, &bias_rows)?,
        svg: rb_plot(&xs, &rb_f, &dens),
    })
}

/// Exact values print as `p/q`; floats as the shortest round-trip decimal.
fn fmt_s<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        x.to_string()
    } else {
        num(x.as_f64())
    }
}

fn run_finite<S: Scalar>(cfg: AnalysisConfig, raw: &[Num]) -> CliResult<Analysis> {
    let grid = build_grid::<S>(&cfg.grid)?;
    let prior = build_prior(&cfg.prior, &grid)?;
    let map = build_map(cfg.marginal.as_ref(), &grid)?;
    let model: TabularModel<S> = match &cfg.model {
        ModelSpec::Bernoulli {} => TabularModel::binomial(&grid, 1).map_err(invalid("model"))?,
        ModelSpec::Binomial { trials } => TabularModel::binomial(&grid, *trials).map_err(invalid("model"))?,
        ModelSpec::Tabular { samples, rows } => {
            if rows.len() != grid.len() {
                return Err(CliError::config(
                    "model.rows",
                    format!("{} rows for {} grid points", rows.len(), grid.len()),
                ));
            }
            let rows = rows
                .iter()
                .enumerate()
                .map(|(t, r)| nums(r, &format!("model.rows[{t}]")))
                .collect::<CliResult<Vec<_>>>()?;
            TabularModel::from_rows(samples.clone(), rows).map_err(invalid("model.rows"))?
        }
        ModelSpec::GaussianMean {} => unreachable!("handled separately"),
    };
    let data: Vec<usize> = raw
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let label = match &cfg.model {
                ModelSpec::Tabular { .. } => v.0.clone(),
                _ => v.0.trim().parse::<u32>().map(|k| k.to_string()).unwrap_or_else(|_| v.0.clone()),
            };
            model
                .sample_index(&label)
                .ok_or_else(|| CliError::config(format!("data[{i}]"), format!("`{}` is not a sample point", v.0)))
        })
        .collect::<CliResult<_>>()?;
    let posterior = condition_all(&prior, &model, &data).map_err(numeric("condition"))?;
    let mut lik = vec![S::one(); grid.len()];
    for x in &data {
        let col = model.likelihood_column(&grid, x).map_err(numeric("likelihood"))?;
        for (l, c) in lik.iter_mut().zip(col) {
            *l = l.clone() * c;
        }
    }
    let likelihood = LikelihoodCurve::new(grid.clone(), lik).map_err(numeric("likelihood"))?;
    let summary = DataSummary { observations: data.len(), xbar: None };
    let bias_model = model.clone();
    let bias_prior = prior.clone();
    let bias_map = map.clone();
    finish(
        cfg,
        Finished { prior, posterior, likelihood, map, summary },
        false,
        move |spec| bias_tabular(&bias_model, &bias_prior, &bias_map, spec),
        None,
    )
}

fn run_gaussian(cfg: AnalysisConfig, raw: &[Num]) -> CliResult<Analysis> {
    let (n, xbar) = match (&cfg.data.xbar, cfg.data.n) {
        (Some(x), Some(n)) => (n, x.at::<f64>("data.xbar")?),
        _ => {
            let v: Vec<f64> = nums(raw, "data")?;
            if v.is_empty() {
                return Err(CliError::config("data", "no observations"));
            }
            (v.len(), v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    let model = GaussianMeanModel::new(n).map_err(invalid("data.n"))?;
    let grid = build_grid::<f64>(&cfg.grid)?;
    let prior = build_prior(&cfg.prior, &grid)?;
    let map = build_map(cfg.marginal.as_ref(), &grid)?;
    let posterior = condition(&prior, &model, &xbar).map_err(numeric("condition"))?;
    let lik = model.likelihood_column(&grid, &xbar).map_err(numeric("likelihood"))?;
    let likelihood = LikelihoodCurve::new(grid.clone(), lik).map_err(numeric("likelihood"))?;
    let identity = map.is_identity();
    let summary = DataSummary { observations: n, xbar: Some(xbar) };
    let (bm, bp, bmap) = (model, prior.clone(), map.clone());
    let pv = move |psi0: f64| z_test_p_value(&model, psi0, xbar, Tail::TwoSided);
    finish(
        cfg,
        Finished { prior, posterior, likelihood, map, summary },
        identity,
        move |spec| bias_gaussian(&bm, &bp, &bmap, spec),
        identity.then_some(&pv as &dyn Fn(f64) -> rbel::Result<f64>),
    )
}
