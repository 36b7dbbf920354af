//! `rbel paradox <name>`: the classical pathologies as CSV tables.

use rbel::bayes::{jl_bayes_factor, jl_strength, map_noninvariance_demo, JlGrid};
use rbel::bias::{bias_gaussian, jl_bias_closed_form, BiasMethod, BiasSpec};
use rbel::freq::{mixture_region_demo, optional_stopping_sim, z_p_value, MixtureModelSpec, Tail};
use rbel::likelihood::{likelihood_curve, likelihood_region, mle};
use rbel::principles::{format_base, verify_birnbaum, BirnbaumReport, UniverseCaps};
use rbel::scalar::parse_rational;
use rbel::word::{WordModel, WordModelSpec};
use rbel::{MarginalMap, Point, Rational, Scalar, StrengthVariant};

use crate::error::{numeric, CliError, CliResult};
use crate::output::{csv_string, num};
use crate::scales::{jeffreys_label, SCALES_HEADING};

/// A CSV table preceded by `#` comment lines.
#[derive(Debug, Clone)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self) -> CliResult<String> {
        let mut s = String::new();
        for c in &self.comments {
            for line in c.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push_str(&csv_string(&self.header, &self.rows)?);
        Ok(s)
    }
}

pub const JL_HEADER: [&str; 12] = [
    "n",
    "sigma2",
    "zbar",
    "xbar",
    "bf",
    "bf_grid",
    "bf_grid_rel_err",
    "strength",
    "strength_directional",
    "p_value",
    "bias_against",
    "bias_in_favor",
];

pub const JL_MC_HEADER: [&str; 4] =
    ["bias_against_mc", "bias_against_mc_se", "bias_in_favor_mc", "bias_in_favor_mc_se"];

#[derive(Debug, Clone)]
pub struct JlArgs {
    pub n: usize,
    pub sigma2: Vec<f64>,
    pub zbar: f64,
    pub per_sd: usize,
    /// Monte Carlo columns, `(reps, seed, per_sd)`.
    pub mc: Option<(usize, u64, usize)>,
}

/// `x̄ ~ N(θ, 1/n)`, `H0: θ = 0`, slab `N(0, σ²)`. The BF equals `RB(0|x)`.
pub fn jeffreys_lindley(a: &JlArgs) -> CliResult<Table> {
    if a.n == 0 {
        return Err(CliError::config("--n", "must be at least 1"));
    }
    if a.sigma2.is_empty() || a.sigma2.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(CliError::config("--sigma2", "values must be positive and finite"));
    }
    if !a.zbar.is_finite() {
        return Err(CliError::config("--zbar", "must be finite"));
    }
    let xbar = a.zbar / (a.n as f64).sqrt();
    let mut header = JL_HEADER.to_vec();
    if a.mc.is_some() {
        header.extend(JL_MC_HEADER);
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for &s2 in &a.sigma2 {
        let bf = jl_bayes_factor(a.n, s2, a.zbar);
        let grid = JlGrid::with_resolution(a.n, s2, a.zbar, a.per_sd).map_err(numeric("jl_grid"))?;
        let bf_grid = grid.bayes_factor().map_err(numeric("spike_slab_bf"))?;
        let mut row = vec![
            a.n.to_string(),
            num(s2),
            num(a.zbar),
            num(xbar),
            num(bf),
            num(bf_grid),
            num((bf_grid - bf).abs() / bf),
            num(jl_strength(a.n, s2, a.zbar, StrengthVariant::LowerTail)),
            num(jl_strength(a.n, s2, a.zbar, StrengthVariant::Directional)),
            num(z_p_value(a.zbar, Tail::TwoSided)),
            num(jl_bias_closed_form(a.n, s2, 0.0)),
            num(jl_bias_closed_form(a.n, s2, xbar)),
        ];
        if let Some((reps, seed, per_sd)) = a.mc {
            let g = JlGrid::with_resolution(a.n, s2, a.zbar, per_sd).map_err(numeric("jl_grid"))?;
            let spec = BiasSpec::new(
                Point::scalar(0.0),
                vec![Point::scalar(xbar)],
                xbar.abs(),
                BiasMethod::MonteCarlo { reps, seed },
            )
            .map_err(|e| CliError::config("--zbar", e))?;
            let map = MarginalMap::identity(g.grid().clone());
            let r = bias_gaussian(&g.model, &g.prior, &map, &spec).map_err(numeric("bias_gaussian"))?;
            let se = |s: Option<f64>| s.map(num).unwrap_or_default();
            row.extend([num(r.against), se(r.against_se), num(r.in_favor[0]), se(r.in_favor_se[0])]);
        }
        rows.push(row);
        labels.push(format!("sigma2 = {}: bf = {} reads as \"{}\"", num(s2), num(bf), jeffreys_label(bf)));
    }
    let mut comments = vec![format!("{SCALES_HEADING}:")];
    comments.extend(labels);
    Ok(Table { comments, header, rows })
}

pub const WORD_HEADER: [&str; 10] = [
    "gamma",
    "observed",
    "mle",
    "region",
    "region_size",
    "parent",
    "parent_in_region",
    "parent_relative_likelihood",
    "p_parent_equals_theta",
    "p_parent_equals_theta_decimal",
];

#[derive(Debug, Clone)]
pub struct WordArgs {
    pub k: u32,
    pub max_len: u32,
    pub delta: String,
    pub gamma: Vec<String>,
    /// Observed word such as `a3a7`; the first full-length word by default.
    pub x: Option<String>,
    pub state_cap: usize,
}

fn parse_word(text: &str, k: u32) -> Option<Vec<u32>> {
    if text == "ε" || text.is_empty() {
        return Some(Vec::new());
    }
    let body = text.strip_prefix('a')?;
    body.split('a').map(|s| s.parse::<u32>().ok().filter(|c| (1..=k).contains(c)).map(|c| c - 1)).collect()
}

/// Likelihood regions in the word model, computed exactly.
pub fn likelihood_word(a: &WordArgs) -> CliResult<Table> {
    let delta = parse_rational(&a.delta)
        .ok_or_else(|| CliError::config("--delta", format!("`{}` is not a number", a.delta)))?;
    let gammas: Vec<Rational> = a
        .gamma
        .iter()
        .map(|g| {
            parse_rational(g)
                .filter(|r| *r >= Rational::from_integer(0) && *r <= Rational::from_integer(1))
                .ok_or_else(|| CliError::config("--gamma", format!("`{g}` is not in [0, 1]")))
        })
        .collect::<CliResult<_>>()?;
    let spec = WordModelSpec::new(a.k, a.max_len, delta).with_cap(a.state_cap);
    spec.validate().map_err(|e| CliError::config("--delta", e))?;
    let w = WordModel::<Rational>::build(spec).map_err(|e| match e {
        rbel::Error::CapExceeded { .. } => CliError::config("--state-cap", e),
        e => CliError::Numeric { op: "word_model", source: e },
    })?;
    let letters = match &a.x {
        Some(t) => parse_word(t, a.k)
            .ok_or_else(|| CliError::config("--x", format!("`{t}` is not a word over a1..a{}", a.k)))?,
        None => vec![0; a.max_len as usize],
    };
    let x = w.index_of(&letters).ok_or_else(|| CliError::config("--x", "word is longer than M"))?;
    let curve = likelihood_curve(w.model(), w.grid().clone(), &x).map_err(numeric("likelihood_curve"))?;
    let rel = curve.relative();
    let best = mle(&curve);
    let parent = w.parent(x);
    let p = parent.map(|t| w.prob_parent_equals(t));
    let mut rows = Vec::new();
    for g in gammas {
        let region = likelihood_region(&curve, g).map_err(numeric("likelihood_region"))?;
        let names: Vec<String> = region.iter().map(|&i| w.label(i)).collect();
        rows.push(vec![
            g.to_string(),
            w.label(x),
            w.label(best.index),
            names.join(" "),
            region.len().to_string(),
            parent.map(|t| w.label(t)).unwrap_or_default(),
            parent.map(|t| region.contains(&t).to_string()).unwrap_or_default(),
            parent.map(|t| rel[t].to_string()).unwrap_or_default(),
            p.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            p.as_ref().map(|v| num(v.as_f64())).unwrap_or_default(),
        ]);
    }
    let comments = vec![format!("k = {}, M = {}, delta = {}, words = {}", a.k, a.max_len, w.spec().delta, w.len())];
    Ok(Table { comments, header: WORD_HEADER.to_vec(), rows })
}

pub const MIXTURE_HEADER: [&str; 4] = ["x", "region", "lower", "upper"];

#[derive(Debug, Clone)]
pub struct MixtureArgs {
    pub alpha: f64,
    pub shift: f64,
    pub thetas: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
}

/// Confidence regions from inverting tests in the two-component mixture.
pub fn confidence_mixture(a: &MixtureArgs) -> CliResult<Table> {
    if !(a.x_step > 0.0) || !(a.x_max >= a.x_min) {
        return Err(CliError::config("--x-step", "need x-step > 0 and x-max ≥ x-min"));
    }
    let count = ((a.x_max - a.x_min) / a.x_step + 1e-9).floor() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| a.x_min + i as f64 * a.x_step).collect();
    let spec = MixtureModelSpec::with_grid(a.shift, a.thetas).map_err(|e| CliError::config("--thetas", e))?;
    let demo = mixture_region_demo(&spec, a.alpha, &xs).map_err(|e| CliError::config("--alpha", e))?;
    let rows = demo
        .rows
        .iter()
        .map(|r| {
            let (lo, hi) = r.bounds.map(|(l, h)| (num(l), num(h))).unwrap_or_default();
            vec![num(r.x), r.shape.as_str().to_string(), lo, hi]
        })
        .collect();
    let window = match demo.full_window {
        Some((l, h)) => format!("full_window = [{}, {}], width {}", num(l), num(h), num(h - l)),
        None => "full_window = none".to_string(),
    };
    Ok(Table { comments: vec![window], header: MIXTURE_HEADER.to_vec(), rows })
}

pub const STOPPING_HEADER: [&str; 10] =
    ["alpha", "n1", "n2", "reps", "seed", "estimate", "se", "quadrature", "excess_in_se", "inflated"];

/// Size of the two-look z-test.
pub fn optional_stopping(alpha: f64, n1: usize, n2: usize, reps: usize, seed: u64) -> CliResult<Table> {
    let r = optional_stopping_sim(alpha, n1, n2, reps, seed).map_err(|e| CliError::config("--reps", e))?;
    let row = vec![
        num(alpha),
        n1.to_string(),
        n2.to_string(),
        reps.to_string(),
        seed.to_string(),
        num(r.mc.estimate),
        num(r.mc.se),
        num(r.quadrature),
        num((r.mc.estimate - alpha) / r.mc.se),
        r.inflated.to_string(),
    ];
    Ok(Table { comments: Vec::new(), header: STOPPING_HEADER.to_vec(), rows: vec![row] })
}

pub const MAP_HEADER: [&str; 4] = ["cells", "theta_map", "transformed_map", "psi_map"];

/// MAP of θ and of ψ = θ² under a posterior `∝ θ(1 − θ)`.
pub fn map_invariance(cells: usize) -> CliResult<Table> {
    let r = map_noninvariance_demo(cells).map_err(|e| CliError::config("--cells", e))?;
    let row = vec![cells.to_string(), num(r.theta_map), num(r.transformed_map), num(r.psi_map)];
    Ok(Table { comments: Vec::new(), header: MAP_HEADER.to_vec(), rows: vec![row] })
}

pub const BIRNBAUM_HEADER: [&str; 2] = ["metric", "value"];

pub fn birnbaum_table(report: &BirnbaumReport) -> Table {
    let c = &report.caps;
    let pairs: [(&str, String); 13] = [
        ("max_samples", c.max_samples.to_string()),
        ("n_thetas", c.n_thetas.to_string()),
        ("max_denominator", c.max_denominator.to_string()),
        ("universe_size", report.universe_size.to_string()),
        ("l_pairs", report.l_pairs.to_string()),
        ("s_pairs", report.s_pairs.to_string()),
        ("c_pairs", report.c_pairs.to_string()),
        ("closure_pairs", report.closure_pairs.to_string()),
        ("s_not_l", report.s_not_l.to_string()),
        ("c_not_l", report.c_not_l.to_string()),
        ("closure_not_l", report.closure_not_l.to_string()),
        ("fraction_of_l", num(report.fraction_of_l)),
        ("c_non_transitive", report.non_transitivity.is_some().to_string()),
    ];
    let rows = pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
    let mut comments = Vec::new();
    if let Some(t) = &report.non_transitivity {
        comments.push("C is not transitive: first C middle and middle C last, but not first C last".to_string());
        for (name, b) in [("first", &t.first), ("middle", &t.middle), ("last", &t.last)] {
            comments.push(format!("{name}:"));
            comments.push(format_base(b));
        }
    }
    Table { comments, header: BIRNBAUM_HEADER.to_vec(), rows }
}

/// Exhaustive check of S ⊆ L, C ⊆ L and closure(S ∪ C) ⊆ L.
pub fn birnbaum(caps: UniverseCaps) -> CliResult<Table> {
    let report = verify_birnbaum(caps).map_err(|e| CliError::config("--max-samples", e))?;
    Ok(birnbaum_table(&report))
}
