//! Analysis configuration (JSON).

use std::fmt;
use std::path::{Path, PathBuf};

use rbel::scalar::parse_rational;
use rbel::Scalar;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

/// A number written either as a JSON number or as a string such as `"1/3"`.
/// The original text is kept so exact arithmetic sees `0.1` as `1/10`.
#[derive(Debug, Clone, PartialEq)]
pub struct Num(pub String);

impl Num {
    pub fn to_scalar<S: Scalar>(&self) -> Option<S> {
        if S::EXACT {
            parse_rational(&self.0).map(|r| S::from_rational(&r))
        } else {
            let x = self.0.trim().parse::<f64>().ok().or_else(|| parse_rational(&self.0).map(|r| r.as_f64()))?;
            S::from_f64_lossy(x)
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.to_scalar::<f64>()
    }

    pub fn at<S: Scalar>(&self, field: &str) -> CliResult<S> {
        self.to_scalar().ok_or_else(|| CliError::config(field, format!("`{}` is not a usable number", self.0)))
    }
}

impl From<&str> for Num {
    fn from(s: &str) -> Self {
        Num(s.to_string())
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Num {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a numeric string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                Ok(Num(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v.to_string()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(serde_json::to_string(&v).map_err(E::custom)?))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    #[default]
    Float,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// One success/failure per observation; data are 0/1.
    Bernoulli {},
    /// Success counts out of `trials`.
    Binomial { trials: u32 },
    /// Explicit rows `f_θ(x)`, one per grid point; data are sample labels.
    Tabular { samples: Vec<String>, rows: Vec<Vec<Num>> },
    /// `x̄ ~ N(θ, 1/n)`; data are raw observations or `xbar` with `n`.
    GaussianMean {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// Cell midpoints of `cells` equal cells over `[lo, hi]`.
    Uniform { lo: Num, hi: Num, cells: usize },
    /// Listed points; unit volumes unless given.
    Explicit {
        points: Vec<Num>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        volumes: Option<Vec<Num>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSpec {
    /// Equal mass on every grid point.
    Uniform {},
    /// `N(mean, sd²)` density at each grid point times its volume, renormalized.
    Normal { mean: Num, sd: Num },
    /// Explicit masses, which must sum to 1.
    Table { masses: Vec<Num> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Square,
    Abs,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
    /// ψ value for each grid point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Num>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Num>>,
    /// CSV file with a header row; the column `x` is used if present,
    /// otherwise the first column. Relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xbar: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypothesis {
    pub psi0: Num,
    /// Smallest difference from ψ0 that matters in the application.
    pub delta: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthChoice {
    #[default]
    Directional,
    LowerTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMethodChoice {
    Exact,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasConfig {
    pub method: BiasMethodChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub psi_primes: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub arithmetic: Arithmetic,
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub prior: PriorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal: Option<MarginalSpec>,
    pub data: DataSpec,
    #[serde(default)]
    pub hypotheses: Vec<Hypothesis>,
    #[serde(default = "default_gamma")]
    pub gamma: Num,
    #[serde(default = "default_q")]
    pub q: Num,
    #[serde(default)]
    pub strength_variant: StrengthChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<BiasConfig>,
    /// Adds MAP, MLE, likelihood region, Bayes factors and (for the
    /// Gaussian model) p-values.
    #[serde(default)]
    pub compare: bool,
}

fn default_gamma() -> Num {
    Num("0.95".into())
}

fn default_q() -> Num {
    Num("1".into())
}

impl AnalysisConfig {
    /// Parses and checks everything that does not need the model built.
    /// `seed` overrides the bias seed.
    pub fn load(path: &Path, seed: Option<u64>) -> CliResult<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: AnalysisConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("line {} column {}", e.line(), e.column()), e))?;
        if let (Some(s), Some(b)) = (seed, cfg.bias.as_mut()) {
            b.seed = Some(s);
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate(&base)?;
        Ok((cfg, base))
    }

    pub fn validate(&self, base: &Path) -> CliResult<()> {
        let gaussian = matches!(self.model, ModelSpec::GaussianMean {});
        if gaussian && self.arithmetic == Arithmetic::Exact {
            return Err(CliError::config("arithmetic", "the gaussian_mean model needs float arithmetic"));
        }
        if matches!(self.prior, PriorSpec::Normal { .. }) && self.arithmetic == Arithmetic::Exact {
            return Err(CliError::config("prior.family", "a normal prior needs float arithmetic"));
        }
        let d = &self.data;
        let sources = usize::from(d.values.is_some()) + usize::from(d.csv.is_some()) + usize::from(d.xbar.is_some());
        if sources != 1 {
            return Err(CliError::config("data", "give exactly one of `values`, `csv` or `xbar`"));
        }
        if d.xbar.is_some() != d.n.is_some() {
            return Err(CliError::config("data", "`xbar` and `n` go together"));
        }
        if d.xbar.is_some() && !gaussian {
            return Err(CliError::config("data.xbar", "summary data only apply to the gaussian_mean model"));
        }
        if let Some(csv) = &d.csv {
            if !base.join(csv).is_file() {
                return Err(CliError::config("data.csv", format!("{} does not exist", base.join(csv).display())));
            }
        }
        for (field, v) in [("gamma", &self.gamma), ("q", &self.q)] {
            let x = v.to_f64().ok_or_else(|| CliError::config(field, "not a number"))?;
            if field == "gamma" && !(0.0..=1.0).contains(&x) {
                return Err(CliError::config(field, "must lie in [0, 1]"));
            }
            if x < 0.0 {
                return Err(CliError::config(field, "must be nonnegative"));
            }
        }
        for (i, h) in self.hypotheses.iter().enumerate() {
            let delta =
                h.delta.to_f64().ok_or_else(|| CliError::config(format!("hypotheses[{i}].delta"), "not a number"))?;
            if !(delta > 0.0) {
                return Err(CliError::config(format!("hypotheses[{i}].delta"), "must be positive"));
            }
        }
        if let Some(m) = &self.marginal {
            if m.transform.is_some() == m.values.is_some() {
                return Err(CliError::config("marginal", "give exactly one of `transform` or `values`"));
            }
        }
        if let Some(b) = &self.bias {
            if self.hypotheses.is_empty() {
                return Err(CliError::config("bias", "bias needs at least one hypothesis"));
            }
            match (b.method, gaussian) {
                (BiasMethodChoice::Exact, true) => {
                    return Err(CliError::config("bias.method", "exact bias needs a finite sample space"))
                }
                (BiasMethodChoice::Quadrature, false) => {
                    return Err(CliError::config("bias.method", "quadrature bias applies to the gaussian_mean model"))
                }
                _ => {}
            }
            if b.method == BiasMethodChoice::MonteCarlo {
                if b.reps.is_none_or(|r| r == 0) {
                    return Err(CliError::config("bias.reps", "Monte Carlo needs a positive repetition count"));
                }
                if b.seed.is_none() {
                    return Err(CliError::config("bias.seed", "Monte Carlo needs a seed (config or --seed)"));
                }
            }
        }
        Ok(())
    }
}
