//! Grid-based measurement of statistical evidence with relative belief
//! ratios, together with executable versions of the classical inference
//! pathologies (likelihood, p-value, confidence-region and Bayes-factor)
//! and a finite-model checker for the sufficiency, conditionality and
//! likelihood relations between inference bases.
//!
//! All grid computations are generic over [`Scalar`], so the same code runs
//! in `f64` for numerical work and in exact [`Rational`] arithmetic where
//! ties and proportionality have to be decided exactly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod bias;
pub mod error;
pub mod freq;
pub mod gauss;
pub mod grid;
pub mod likelihood;
pub mod principles;
pub mod relbel;
pub mod scalar;
pub mod sim;
pub mod word;

pub use error::{Error, Result};
pub use grid::{
    condition, condition_all, make_uniform_grid, marginalize, normal_cdf, normal_pdf, normal_sf, prob_of, pushforward,
    EvalModel, FnTransform, GaussianMeanModel, MarginalMap, MassTable, ParamGrid, Point, PointTransform, TabularModel,
};
pub use principles::{InferenceBase, StatisticPartition};
pub use relbel::{rb_curve, EvidenceVerdict, RBCurve, RegionResult, StrengthVariant};
pub use scalar::{BigRational, FloatScalar, Rational, Scalar};

/// `f64` mass table.
pub type MassTableF64 = MassTable<f64>;
/// Exact rational mass table.
pub type ExactMassTable = MassTable<Rational>;
/// `f64` parameter grid.
pub type ParamGridF64 = ParamGrid<f64>;
/// Exact rational parameter grid.
pub type ExactParamGrid = ParamGrid<Rational>;
/// `f64` relative belief curve.
pub type RBCurveF64 = RBCurve<f64>;
/// Exact rational relative belief curve.
pub type ExactRBCurve = RBCurve<Rational>;
/// Inference base with exact rational probabilities.
pub type ExactInferenceBase = InferenceBase<Rational>;
