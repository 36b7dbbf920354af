//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p rbel-cli --test acceptance`.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rbel::bayes::{bayes_factor, bf_predictive, jl_strength, spike_slab_bf, SpikeSlabPrior};
use rbel::bias::{bias_convergence_study, jl_bias_closed_form};
use rbel::freq::{tabular_p_value, z_p_value, Tail, TestSpec};
use rbel::relbel::{gamma_region, mrbe, rb_curve, rb_set, rb_union, rb_via_predictive, Direction};
use rbel::{condition, MarginalMap, MassTable, ParamGrid, Point, Rational, StrengthVariant, TabularModel};
use statrs::distribution::{ContinuousCDF, Normal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Run {
    stdout: Vec<u8>,
    elapsed: Duration,
}

fn rbel(args: &[&str]) -> Result<Run, String> {
    rbel_env(args, &[])
}

fn rbel_env(args: &[&str], env: &[(&str, &str)]) -> Result<Run, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_rbel"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .map_err(|e| format!("could not start rbel: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("rbel {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(Run { stdout: out.stdout, elapsed })
}

/// Rows of a CSV table on stdout, keyed by column name; `#` lines skipped.
fn table(bytes: &[u8]) -> Result<Vec<HashMap<String, String>>, String> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            Ok(header.iter().map(str::to_string).zip(rec.iter().map(str::to_string)).collect())
        })
        .collect()
}

fn field(row: &HashMap<String, String>, name: &str) -> Result<f64, String> {
    row.get(name).ok_or_else(|| format!("column {name} missing"))?.parse().map_err(|e| format!("column {name}: {e}"))
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn phi_sf(z: f64) -> f64 {
    Normal::standard().sf(z)
}

fn phi_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

// 1. Jeffreys-Lindley headline numbers.
fn jeffreys_lindley() -> Outcome {
    let run = rbel(&["paradox", "jeffreys-lindley", "--n", "50", "--sigma2", "400", "--zbar", "1.96"])?;
    let rows = table(&run.stdout)?;
    let row = rows.first().ok_or("no rows")?;
    let bf = field(row, "bf")?;
    let grid = field(row, "bf_grid")?;
    let strength = field(row, "strength")?;
    let text = String::from_utf8_lossy(&run.stdout);
    check((bf - 20.72).abs() <= 0.01, format!("bf = {bf}"))?;
    check((grid - bf).abs() / bf < 0.01, format!("grid bf = {grid} vs {bf}"))?;
    check((strength - 0.05).abs() <= 0.005, format!("strength = {strength}"))?;
    check(format!("{bf:.2}") == "20.72" && format!("{strength:.2}") == "0.05", "rounded row".into())?;
    check(text.contains("20.7"), "row text lacks 20.72".into())?;
    check(run.elapsed < Duration::from_secs(5), format!("took {:?}", run.elapsed))?;
    Ok(format!("bf {bf:.4}, grid {grid:.4}, strength {strength:.4}, {:.2?}", run.elapsed))
}

// 2. Diffuse-limit strength.
fn diffuse_limit() -> Outcome {
    let mut worst: f64 = 0.0;
    for z in ["1", "1.96", "3"] {
        let run = rbel(&["paradox", "jeffreys-lindley", "--n", "50", "--sigma2", "1000000", "--zbar", z])?;
        let rows = table(&run.stdout)?;
        let s = field(&rows[0], "strength")?;
        let zf: f64 = z.parse().unwrap();
        let limit = 2.0 * phi_sf(zf.abs());
        let lib = jl_strength(50, 1e6, zf, StrengthVariant::LowerTail);
        worst = worst.max((s - limit).abs()).max((lib - limit).abs());
        check((s - limit).abs() <= 1e-3, format!("zbar {z}: strength {s} vs {limit}"))?;
    }
    Ok(format!("max |strength - 2(1 - Phi)| = {worst:.2e}"))
}

// 3. Bias numbers and the convergence study.
fn bias() -> Outcome {
    let start = Instant::now();
    let n = 50;
    let xbar = 1.96 / (n as f64).sqrt();
    let closed = jl_bias_closed_form(n, 400.0, xbar);
    let against = jl_bias_closed_form(n, 400.0, 0.0);
    // independent evaluation of P(|X̄|√n ≥ c | θ)
    let c = ((1.0 + 1.0 / (n as f64 * 400.0)) * (n as f64 * 400.0).ln_1p()).sqrt();
    let oracle = phi_sf(c - 1.96) + phi_cdf(-c - 1.96);
    check((closed - oracle).abs() < 1e-9, format!("closed form {closed} vs oracle {oracle}"))?;
    // 40-digit evaluation of the same expression
    let reference = 0.117_600_697_005_937_6;
    check((closed - reference).abs() < 1e-14, format!("closed form {closed} vs reference {reference}"))?;
    check((closed - 0.12).abs() <= 0.01, format!("bias in favor {closed}"))?;
    check(against < 0.01, format!("bias against {against}"))?;

    let run = rbel(&[
        "paradox",
        "jeffreys-lindley",
        "--n",
        "50",
        "--sigma2",
        "400",
        "--zbar",
        "1.96",
        "--reps",
        "1000000",
        "--seed",
        "31",
        "--mc-per-sd",
        "20",
    ])?;
    let row = &table(&run.stdout)?[0];
    let (mc, se) = (field(row, "bias_in_favor_mc")?, field(row, "bias_in_favor_mc_se")?);
    let (mc0, se0) = (field(row, "bias_against_mc")?, field(row, "bias_against_mc_se")?);
    check((mc - closed).abs() <= 3.0 * se, format!("MC {mc} ± {se} vs {closed}"))?;
    check((mc0 - against).abs() <= 3.0 * se0.max(1e-6), format!("MC against {mc0} ± {se0} vs {against}"))?;
    check(mc0 < 0.01, format!("MC against {mc0}"))?;

    let study = bias_convergence_study(1.0, 0.0, 0.5, &[10, 100, 1000, 10_000]).map_err(|e| e.to_string())?;
    let last = study.last().unwrap();
    check(last.against < 0.05 && last.in_favor > 0.95, format!("n = 10^4: {last:?}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!(
        "in favor {closed:.4} (MC {mc:.4} ± {se:.4}), against {against:.4}; n=1e4 against {:.4} in favor {:.4}; {elapsed:.2?}",
        last.against, last.in_favor
    ))
}

// 4. p-value anchors.
fn p_values() -> Outcome {
    let p5 = z_p_value(5.0, Tail::TwoSided);
    let p196 = z_p_value(1.96, Tail::TwoSided);
    check((p5 - 5.73e-7).abs() <= 1e-9, format!("p(5) = {p5}"))?;
    check((p196 - 0.05).abs() <= 1e-4, format!("p(1.96) = {p196}"))?;
    check((p5 - 2.0 * phi_sf(5.0)).abs() <= 1e-15, format!("p(5) vs oracle {}", 2.0 * phi_sf(5.0)))?;
    Ok(format!("p(5) = {p5:.4e}, p(1.96) = {p196:.6}"))
}

// 5. Word-model pathology.
fn word_model() -> Outcome {
    let run = rbel(&["paradox", "likelihood-word", "--k", "100", "--M", "2", "--delta", "0.01", "--gamma", "0.85"])?;
    let rows = table(&run.stdout)?;
    let row = &rows[0];
    let expected = Rational::new(100, 101) - Rational::new(1, 100);
    check(row["region"] == row["observed"] && row["region_size"] == "1", format!("region {}", row["region"]))?;
    check(row["p_parent_equals_theta"] == expected.to_string(), format!("P = {}", row["p_parent_equals_theta"]))?;
    check(row["parent_in_region"] == "false", "parent is in the region".into())?;

    // 999001 words, just under the default cap of 10^6
    let big = rbel(&["paradox", "likelihood-word", "--k", "999", "--M", "2", "--delta", "1/10000", "--gamma", "0.85"])?;
    let brow = &table(&big.stdout)?[0];
    let bexp = Rational::new(999, 1000) - Rational::new(1, 10000);
    check(brow["region_size"] == "1", format!("k=999 region {}", brow["region"]))?;
    check(brow["p_parent_equals_theta"] == bexp.to_string(), format!("k=999 P = {}", brow["p_parent_equals_theta"]))?;
    check(big.elapsed < Duration::from_secs(10), format!("k=999 took {:?}", big.elapsed))?;
    Ok(format!("region {{{}}}, P = {} exactly; 999001 states in {:.2?}", row["region"], expected, big.elapsed))
}

// 6. Mixture confidence region.
fn mixture() -> Outcome {
    let run = rbel(&[
        "paradox",
        "confidence-mixture",
        "--alpha",
        "0.05",
        "--x-min",
        "-6",
        "--x-max",
        "7",
        "--x-step",
        "0.05",
    ])?;
    let rows = table(&run.stdout)?;
    let mut best = (0.0f64, f64::NAN, f64::NAN);
    let mut start: Option<f64> = None;
    for r in &rows {
        let x = field(r, "x")?;
        if r["region"] == "full" {
            let s = *start.get_or_insert(x);
            if x - s > best.0 {
                best = (x - s, s, x);
            }
        } else {
            start = None;
        }
    }
    check(best.0 > 3.0, format!("widest full window {best:?}"))?;
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    check(first["region"] == "empty" && last["region"] == "empty", "extreme x not empty".into())?;
    let window =
        String::from_utf8_lossy(&run.stdout).lines().find(|l| l.starts_with("# full_window")).unwrap_or("").to_string();
    Ok(format!("full on [{:.2}, {:.2}] (sampled), {}", best.1, best.2, window.trim_start_matches("# ")))
}

/// `P(|Z1| > c) + P(|Z1| ≤ c, |aZ1 + bW| > c·t)` by a 2D Simpson rule.
fn two_look_size(alpha: f64, n1: usize, n2: usize) -> f64 {
    let c = Normal::standard().inverse_cdf(1.0 - alpha / 2.0);
    let (a, b, t) = ((n1 as f64).sqrt(), (n2 as f64).sqrt(), ((n1 + n2) as f64).sqrt());
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let simpson = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, m: usize| {
        let h = (hi - lo) / m as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..m {
            s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let inner =
        |z1: f64| simpson(&|w: f64| if ((a * z1 + b * w) / t).abs() > c { pdf(w) } else { 0.0 }, -9.0, 9.0, 6000);
    2.0 * phi_sf(c) + simpson(&|z1: f64| pdf(z1) * inner(z1), -c, c, 2000)
}

// 7. Optional stopping.
fn optional_stopping() -> Outcome {
    let run = rbel(&["paradox", "optional-stopping", "--alpha", "0.05", "--reps", "100000", "--seed", "7"])?;
    let row = &table(&run.stdout)?[0];
    let (est, se, quad) = (field(row, "estimate")?, field(row, "se")?, field(row, "quadrature")?);
    let oracle = two_look_size(0.05, 50, 50);
    check(est - 0.05 > 3.0 * se, format!("estimate {est} ± {se} not above 0.05"))?;
    check((est - oracle).abs() <= 3.0 * se, format!("estimate {est} vs 2D quadrature {oracle}"))?;
    check((quad - oracle).abs() <= 1e-4, format!("1D quadrature {quad} vs 2D {oracle}"))?;
    Ok(format!("estimate {est:.5} ± {se:.5}, 2D quadrature {oracle:.5}, excess {:.1} SE", (est - 0.05) / se))
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

struct Case {
    prior: MassTable<Rational>,
    model: TabularModel<Rational>,
    observed: usize,
    map: MarginalMap<Rational>,
}

fn atoms(n: usize) -> Arc<ParamGrid<Rational>> {
    Arc::new(ParamGrid::atoms((0..n as i64).map(q).collect()).unwrap())
}

fn random_model(rng: &mut StdRng, nt: usize, nx: usize) -> TabularModel<Rational> {
    let rows = (0..nt)
        .map(|_| {
            let mut r: Vec<i64> = (0..nx).map(|_| rng.random_range(0..6)).collect();
            if r.iter().all(|&w| w == 0) {
                r[0] = 1;
            }
            let s: i64 = r.iter().sum();
            r.into_iter().map(|w| Rational::new(w, s)).collect()
        })
        .collect();
    TabularModel::from_rows((0..nx).map(|x| format!("x{x}")).collect(), rows).unwrap()
}

fn random_case(rng: &mut StdRng) -> Case {
    let (nt, nx) = (rng.random_range(2..6), rng.random_range(2..6));
    let model = random_model(rng, nt, nx);
    let grid = atoms(nt);
    let prior = MassTable::from_weights(grid.clone(), (0..nt).map(|_| q(rng.random_range(1..6))).collect()).unwrap();
    let start = rng.random_range(0..nx);
    let observed = (start..start + nx).map(|k| k % nx).find(|&k| (0..nt).any(|t| !model.prob(t, k).is_zero())).unwrap();
    let map =
        MarginalMap::from_values(grid, (0..nt).map(|_| Point::scalar(q(rng.random_range(0..3)))).collect()).unwrap();
    Case { prior, model, observed, map }
}

fn properties_on(c: &Case, rng: &mut StdRng) -> Result<(), String> {
    let e = |e: rbel::Error| e.to_string();
    let post = condition(&c.prior, &c.model, &c.observed).map_err(e)?;
    let curve = rb_curve(&c.prior, &post, Some(&c.map)).map_err(e)?;

    // prior mean of RB
    for m in [None, Some(&c.map)] {
        let cv = rb_curve(&c.prior, &post, m).map_err(e)?;
        let mean: Rational = cv.values().iter().zip(cv.prior_mass()).filter_map(|(r, p)| r.map(|r| r * p)).sum();
        check(mean == Rational::one(), format!("prior mean of RB {mean}"))?;
    }

    // Savage-Dickey: ratio form equals predictive form, and set RB is symmetric
    for psi in 0..curve.len() {
        let via = rb_via_predictive(&c.model, &c.prior, &c.map, &c.observed, psi).map_err(e)?;
        check(curve.rb_at(psi).map_err(e)? == &via, "ratio vs predictive".into())?;
    }
    let space = MassTable::from_weights(atoms(6), (0..6).map(|_| q(rng.random_range(1..6))).collect()).unwrap();
    let idx = |p: &Point<Rational>| p.first().to_integer() as usize;
    let sets: Vec<Vec<bool>> = (0..3).map(|_| (0..6).map(|_| rng.random_bool(0.5)).collect()).collect();
    let (a, b, cs) = (&sets[0], &sets[1], &sets[2]);
    if let (Ok(f), Ok(g)) =
        (rb_set(&space, |p| cs[idx(p)], |p| a[idx(p)]), rb_set(&space, |p| a[idx(p)], |p| cs[idx(p)]))
    {
        check(f.rb == g.rb, "set RB symmetry".into())?;
    }

    // additivity
    if let Ok(d) = rb_union(&space, |p| cs[idx(p)], |p| a[idx(p)], |p| b[idx(p)]) {
        check(d.lhs == d.rhs, format!("additivity {} vs {}", d.lhs, d.rhs))?;
    }

    // two-point complement
    let two = MarginalMap::from_values(
        c.prior.grid().clone(),
        (0..c.prior.len()).map(|i| Point::scalar(q(i64::from(i == 0)))).collect(),
    )
    .map_err(e)?;
    let tc = rb_curve(&c.prior, &post, Some(&two)).map_err(e)?;
    let (d0, d1) = (Direction::of(tc.rb_at(0).map_err(e)?), Direction::of(tc.rb_at(1).map_err(e)?));
    let opposite = matches!(
        (d0, d1),
        (Direction::InFavor, Direction::Against)
            | (Direction::Against, Direction::InFavor)
            | (Direction::Neutral, Direction::Neutral)
    );
    check(opposite, format!("two-point directions {d0:?} {d1:?}"))?;

    // relabeling ψ ↦ 10 − 3ψ: RB, MRBE and γ-regions carry over
    let values: Vec<Point<Rational>> =
        c.map.assignment().iter().map(|&j| Point::scalar(q(10) - q(3) * c.map.codomain().point(j).first())).collect();
    let relabeled = MarginalMap::from_values(c.prior.grid().clone(), values).map_err(e)?;
    let rc = rb_curve(&c.prior, &post, Some(&relabeled)).map_err(e)?;
    let to_new = |j: usize| rc.index_of(&Point::scalar(q(10) - q(3) * curve.grid().point(j).first())).unwrap();
    for j in 0..curve.len() {
        check(curve.values()[j] == rc.values()[to_new(j)], "relabeled RB".into())?;
    }
    let (m0, m1) = (mrbe(&curve), mrbe(&rc));
    let mut ties: Vec<usize> = m0.ties.iter().map(|&j| to_new(j)).collect();
    ties.sort_unstable();
    check(ties == m1.ties, "relabeled MRBE".into())?;
    for g in [Rational::new(1, 2), Rational::new(9, 10)] {
        let (r0, r1) = (gamma_region(&curve, g).map_err(e)?, gamma_region(&rc, g).map_err(e)?);
        let mut mapped: Vec<usize> = r0.members.iter().map(|&j| to_new(j)).collect();
        mapped.sort_unstable();
        check(mapped == r1.members && r0.content == r1.content, "relabeled γ-region".into())?;
    }

    // Bayes factor: odds form equals predictive form
    let pick: Vec<bool> = (0..c.prior.len()).map(|_| rng.random_bool(0.5)).collect();
    let subset = |p: &Point<Rational>| pick[p.first().to_integer() as usize];
    if let (Ok(o), Ok(p)) =
        (bayes_factor(&c.prior, &post, subset), bf_predictive(&c.model, &c.prior, subset, &c.observed))
    {
        check(o.bf == p.bf, "BF odds vs predictive".into())?;
    }

    // spike-slab BF: free of p and equal to RB(θ0) under the slab
    let s1 = SpikeSlabPrior::from_base(Rational::new(1, 10), 0, &c.prior).map_err(e)?;
    let s2 = SpikeSlabPrior::from_base(Rational::new(7, 10), 0, &c.prior).map_err(e)?;
    if let (Ok(b1), Ok(b2)) = (spike_slab_bf(&c.model, &s1, &c.observed), spike_slab_bf(&c.model, &s2, &c.observed)) {
        check(b1.bf == b2.bf, "spike-slab BF depends on p".into())?;
        let id = MarginalMap::identity(c.prior.grid().clone());
        let sd = rb_via_predictive(&c.model, s1.slab(), &id, &c.observed, 0).map_err(e)?;
        check(sd == b1.bf, format!("spike-slab BF {} vs RB {}", b1.bf, sd))?;
    }

    // γ-regions are nested and reach their level
    let (g1, g2) = (rng.random_range(0..=20), rng.random_range(0..=20));
    let (lo, hi) = (Rational::new(g1.min(g2), 20), Rational::new(g1.max(g2), 20));
    let (small, big) = (gamma_region(&curve, lo).map_err(e)?, gamma_region(&curve, hi).map_err(e)?);
    check(small.members.iter().all(|m| big.members.contains(m)) && big.content >= hi, "γ monotonicity".into())?;

    // p-value subuniformity
    let nx = c.model.n_samples();
    let stat: Vec<Rational> = (0..nx).map(|_| q(rng.random_range(-3..4))).collect();
    let test = TestSpec::table(stat, Tail::TwoSided);
    for theta0 in 0..c.model.n_thetas() {
        for k in 1..=20 {
            let alpha = Rational::new(k, 20);
            let size: Rational = (0..nx)
                .filter(|&x| tabular_p_value(&test, &c.model, theta0, x).unwrap() <= alpha)
                .map(|x| c.model.prob(theta0, x))
                .sum();
            check(size <= alpha, format!("size {size} > α {alpha}"))?;
        }
    }
    Ok(())
}

// 8. Property suites on random tabular instances, in exact arithmetic.
fn properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let cases = 300;
    for i in 0..cases {
        let c = random_case(&mut rng);
        properties_on(&c, &mut rng).map_err(|m| format!("case {i}: {m}"))?;
    }
    Ok(format!("{cases} random exact instances, every identity exact (the proptest suites cover the same properties)"))
}

// 9. Birnbaum universe check.
fn birnbaum() -> Outcome {
    let run = rbel(&["paradox", "birnbaum", "--max-samples", "3", "--thetas", "2", "--max-denominator", "4"])?;
    let rows = table(&run.stdout)?;
    let get = |k: &str| rows.iter().find(|r| r["metric"] == k).map(|r| r["value"].clone()).unwrap_or_default();
    for k in ["s_not_l", "c_not_l", "closure_not_l"] {
        check(get(k) == "0", format!("{k} = {}", get(k)))?;
    }
    check(get("c_non_transitive") == "true", "no non-transitivity witness".into())?;
    check(run.elapsed < Duration::from_secs(60), format!("took {:?}", run.elapsed))?;
    Ok(format!(
        "{} bases, 0 violations, closure(S ∪ C) covers {} of L, {:.2?}",
        get("universe_size"),
        get("fraction_of_l"),
        run.elapsed
    ))
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

// 10. Determinism.
fn determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut runs = 0;
    for name in ["bernoulli-three-point", "binomial-coin", "normal-mean"] {
        let cfg = configs.join(format!("{name}.json"));
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            rbel_env(
                &["analyze", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
                &[("RBEL_THREADS", threads)],
            )?;
            outputs.push(dir_bytes(dir.path()));
            runs += 1;
        }
        check(outputs[0] == outputs[1], format!("{name}: outputs differ"))?;
    }
    let paradoxes: [&[&str]; 6] = [
        &["paradox", "jeffreys-lindley", "--reps", "20000", "--seed", "4"],
        &["paradox", "likelihood-word"],
        &["paradox", "confidence-mixture"],
        &["paradox", "optional-stopping", "--reps", "20000", "--seed", "9"],
        &["paradox", "map-invariance"],
        &["paradox", "birnbaum"],
    ];
    for args in paradoxes {
        let a = rbel_env(args, &[("RBEL_THREADS", "1")])?;
        let b = rbel_env(args, &[("RBEL_THREADS", "3")])?;
        check(a.stdout == b.stdout, format!("{}: stdout differs", args[1]))?;
        runs += 2;
    }
    Ok(format!("{runs} invocations, identical bytes pairwise"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Jeffreys-Lindley headline numbers", jeffreys_lindley),
        ("diffuse-limit strength", diffuse_limit),
        ("bias numbers", bias),
        ("p-value anchors", p_values),
        ("word-model pathology", word_model),
        ("mixture confidence region", mixture),
        ("optional stopping", optional_stopping),
        ("property suites", properties),
        ("Birnbaum universe check", birnbaum),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
