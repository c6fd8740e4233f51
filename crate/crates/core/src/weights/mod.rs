//! Köthe weight matrices `A = (a_n(i))`, presented through their logarithm.
//!
//! Every family evaluates `log a_n(i)` (never `a_n(i)` itself): the working
//! families all have the shape `exp(-g(n,i))` and the raw weights leave the
//! `f64` range long before any interesting window size is reached. Values are
//! returned as [`XReal`], which keeps double precision with an extended
//! exponent; see [`crate::xreal`].

pub mod expr;

use crate::xreal::XReal;
use expr::{EvalError, ParseError, WeightExpr};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("invalid family parameter: {0}")]
    InvalidParam(String),
    #[error("weight indices must be >= 1 (got n={n}, i={i})")]
    IndexZero { n: u32, i: usize },
    #[error("alpha sequence has no entry for i={i} (length {len})")]
    AlphaOutOfRange { i: usize, len: usize },
    #[error("non-finite log-weight at (n={n}, i={i}): {source}")]
    Eval {
        n: u32,
        i: usize,
        #[source]
        source: EvalError,
    },
    #[error("weight expression: {0}")]
    Parse(#[from] ParseError),
    #[error("unknown builtin family `{0}`")]
    UnknownBuiltin(String),
}

/// Exponent sequence `(α_i)` used by the power-series and Dragilev families.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSeq {
    /// `α_i = i`.
    Identity,
    /// Explicit user-supplied values `α_1, α_2, …`; evaluation past the end
    /// is an error.
    Explicit(Vec<f64>),
}

impl AlphaSeq {
    fn value(&self, i: usize) -> Result<f64, WeightError> {
        match self {
            AlphaSeq::Identity => Ok(i as f64),
            AlphaSeq::Explicit(v) => v
                .get(i - 1)
                .copied()
                .ok_or(WeightError::AlphaOutOfRange { i, len: v.len() }),
        }
    }
}

/// The shape function `f` of a Dragilev family `a_n(i) = exp(-f(α_i/n))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DragilevShape {
    /// `f(x) = x e^x`.
    XExpX,
    /// `f(x) = sinh(x)`.
    Sinh,
}

/// Built-in weight families.
#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinFamily {
    /// Power series space of finite type: `log a_n(i) = -α_i / n`.
    PowerSeriesFinite { alpha: AlphaSeq },
    /// `log a_n(i) = -n e^{i/n}`: a nuclear G1 matrix whose raw (K1) fails
    /// for finitely many small `i` per row.
    NuclearG1Example,
    /// `log a_n(i) = α_n log i - i` with `α_n = α·n/(n+1) ↑ α ∈ (0,1)`.
    AlphaSeqExample { alpha: f64 },
    /// `log a_n(i) = -(s - 1/2 + 1/(n+1)) log i`.
    PointSpectrumExample { s: u32 },
    /// `log a_n(i) = -e^{α_i/n}` with `α_i = 2·log(log(i+2))`.
    SnGapExample,
    /// `log a_n(i) = -f(α_i/n)` for a Dragilev shape `f`.
    DragilevFinite { shape: DragilevShape, alpha: AlphaSeq },
}

/// Analytic facts attached to a family for test labeling. The verdict engine
/// never reads these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnownFact {
    KnownG1,
    KnownNotG1,
    KnownNuclear,
    KnownNotNuclear,
    KnownVanishing,
}

type LogFn = Arc<dyn Fn(u32, usize) -> Result<XReal, WeightError> + Send + Sync>;

#[derive(Clone)]
enum FamilyKind {
    Builtin(BuiltinFamily),
    Expr(Arc<WeightExpr>),
    Custom(LogFn),
}

/// A Köthe matrix with strictly positive weights, evaluated in log domain.
///
/// Evaluation is pure and deterministic; values are immutable after
/// construction and safe to share across threads.
#[derive(Clone)]
pub struct WeightFamily {
    name: String,
    params: serde_json::Value,
    kind: FamilyKind,
    known_facts: BTreeSet<KnownFact>,
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFamily")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl WeightFamily {
    pub fn builtin(b: BuiltinFamily) -> Result<WeightFamily, WeightError> {
        let (name, params, facts): (&str, serde_json::Value, &[KnownFact]) = match &b {
            BuiltinFamily::PowerSeriesFinite { alpha } => (
                "power-series",
                match alpha {
                    AlphaSeq::Identity => json!({"alpha_seq": "identity"}),
                    AlphaSeq::Explicit(v) => json!({ "alpha_seq": v }),
                },
                &[KnownFact::KnownG1, KnownFact::KnownNuclear, KnownFact::KnownVanishing],
            ),
            BuiltinFamily::NuclearG1Example => (
                "nuclear-g1-example",
                json!({}),
                &[KnownFact::KnownG1, KnownFact::KnownNuclear, KnownFact::KnownVanishing],
            ),
            BuiltinFamily::AlphaSeqExample { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(WeightError::InvalidParam(format!(
                        "alpha-seq requires 0 < alpha < 1, got {alpha}"
                    )));
                }
                (
                    "alpha-seq",
                    json!({ "alpha": alpha }),
                    &[KnownFact::KnownNotG1, KnownFact::KnownVanishing],
                )
            }
            BuiltinFamily::PointSpectrumExample { s } => {
                if *s < 1 {
                    return Err(WeightError::InvalidParam("point-spectrum requires s >= 1".into()));
                }
                (
                    "point-spectrum",
                    json!({ "s": s }),
                    &[
                        KnownFact::KnownNotG1,
                        KnownFact::KnownNotNuclear,
                        KnownFact::KnownVanishing,
                    ],
                )
            }
            BuiltinFamily::SnGapExample => (
                "sn-gap",
                json!({}),
                &[KnownFact::KnownG1, KnownFact::KnownNotNuclear, KnownFact::KnownVanishing],
            ),
            BuiltinFamily::DragilevFinite { shape, alpha } => (
                "dragilev",
                json!({
                    "shape": match shape { DragilevShape::XExpX => "x-exp-x", DragilevShape::Sinh => "sinh" },
                    "alpha_seq": match alpha { AlphaSeq::Identity => json!("identity"), AlphaSeq::Explicit(v) => json!(v) },
                }),
                &[KnownFact::KnownG1, KnownFact::KnownVanishing],
            ),
        };
        Ok(WeightFamily {
            name: name.to_owned(),
            params,
            kind: FamilyKind::Builtin(b),
            known_facts: facts.iter().copied().collect(),
        })
    }

    /// Parses a DSL expression denoting `log a_n(i)`.
    pub fn from_expr_str(src: &str) -> Result<WeightFamily, WeightError> {
        let ast = expr::parse_weight_expr(src)?;
        Ok(WeightFamily {
            name: "expr".to_owned(),
            params: json!({ "log_weight_expr": src }),
            kind: FamilyKind::Expr(Arc::new(ast)),
            known_facts: BTreeSet::new(),
        })
    }

    /// Wraps an arbitrary log-weight function (hand-built test tables).
    pub fn from_log_fn<F>(name: &str, f: F) -> WeightFamily
    where
        F: Fn(u32, usize) -> Result<XReal, WeightError> + Send + Sync + 'static,
    {
        WeightFamily {
            name: name.to_owned(),
            params: json!({}),
            kind: FamilyKind::Custom(Arc::new(f)),
            known_facts: BTreeSet::new(),
        }
    }

    pub fn with_facts(mut self, facts: impl IntoIterator<Item = KnownFact>) -> WeightFamily {
        self.known_facts.extend(facts);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &serde_json::Value {
        &self.params
    }

    pub fn known_facts(&self) -> &BTreeSet<KnownFact> {
        &self.known_facts
    }

    /// `log a_n(i)` as an extended-range real. Fails only for indices < 1,
    /// exhausted explicit alpha sequences, or non-finite DSL evaluations.
    pub fn log_weight(&self, n: u32, i: usize) -> Result<XReal, WeightError> {
        if n < 1 || i < 1 {
            return Err(WeightError::IndexZero { n, i });
        }
        match &self.kind {
            FamilyKind::Builtin(b) => builtin_log_weight(b, n, i),
            FamilyKind::Expr(ast) => ast.eval(i, n).map_err(|source| WeightError::Eval { n, i, source }),
            FamilyKind::Custom(f) => f(n, i),
        }
    }

    /// `log a_n(i)` saturated to `f64` (`-inf` when below the double range).
    pub fn log_weight_f64(&self, n: u32, i: usize) -> Result<f64, WeightError> {
        Ok(self.log_weight(n, i)?.to_f64())
    }
}

fn builtin_log_weight(b: &BuiltinFamily, n: u32, i: usize) -> Result<XReal, WeightError> {
    let nf = n as f64;
    let ifl = i as f64;
    let v = match b {
        BuiltinFamily::PowerSeriesFinite { alpha } => XReal::from_f64(-alpha.value(i)? / nf),
        BuiltinFamily::NuclearG1Example => XReal::exp_of(ifl / nf).mul_f64(-nf),
        BuiltinFamily::AlphaSeqExample { alpha } => {
            let alpha_n = alpha * nf / (nf + 1.0);
            XReal::from_f64(alpha_n * ifl.ln() - ifl)
        }
        BuiltinFamily::PointSpectrumExample { s } => {
            let exponent = *s as f64 - 0.5 + 1.0 / (nf + 1.0);
            XReal::from_f64(-exponent * ifl.ln())
        }
        BuiltinFamily::SnGapExample => {
            let alpha_i = 2.0 * (ifl + 2.0).ln().ln();
            XReal::exp_of(alpha_i / nf).neg()
        }
        BuiltinFamily::DragilevFinite { shape, alpha } => {
            let x = alpha.value(i)? / nf;
            match shape {
                DragilevShape::XExpX => XReal::exp_of(x).mul_f64(-x),
                DragilevShape::Sinh => {
                    XReal::exp_of(x).sub(&XReal::exp_of(-x)).mul_f64(-0.5)
                }
            }
        }
    };
    Ok(v)
}

/// Family specification as accepted in configuration files and on the
/// command line: either a builtin selector with parameters, or a DSL string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: serde_json::Value,
    },
    Expr { log_weight_expr: String },
}

fn param_f64(params: &serde_json::Value, key: &str) -> Option<f64> {
    params.get(key).and_then(|v| v.as_f64())
}

fn param_alpha_seq(params: &serde_json::Value) -> Result<AlphaSeq, WeightError> {
    match params.get("alpha_seq") {
        None => Ok(AlphaSeq::Identity),
        Some(serde_json::Value::String(s)) if s == "identity" => Ok(AlphaSeq::Identity),
        Some(serde_json::Value::Array(a)) => {
            let vals = a
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| WeightError::InvalidParam("alpha_seq entries must be numbers".into())))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.is_empty() {
                return Err(WeightError::InvalidParam("alpha_seq must be nonempty".into()));
            }
            Ok(AlphaSeq::Explicit(vals))
        }
        Some(other) => Err(WeightError::InvalidParam(format!(
            "alpha_seq must be \"identity\" or an array, got {other}"
        ))),
    }
}

impl FamilySpec {
    pub fn build(&self) -> Result<WeightFamily, WeightError> {
        match self {
            FamilySpec::Expr { log_weight_expr } => WeightFamily::from_expr_str(log_weight_expr),
            FamilySpec::Builtin { builtin, params } => {
                let fam = match builtin.as_str() {
                    "power-series" => BuiltinFamily::PowerSeriesFinite { alpha: param_alpha_seq(params)? },
                    "nuclear-g1-example" => BuiltinFamily::NuclearG1Example,
                    "alpha-seq" => BuiltinFamily::AlphaSeqExample {
                        alpha: param_f64(params, "alpha")
                            .ok_or_else(|| WeightError::InvalidParam("alpha-seq requires params.alpha".into()))?,
                    },
                    "point-spectrum" => BuiltinFamily::PointSpectrumExample {
                        s: param_f64(params, "s")
                            .ok_or_else(|| WeightError::InvalidParam("point-spectrum requires params.s".into()))?
                            as u32,
                    },
                    "sn-gap" => BuiltinFamily::SnGapExample,
                    "dragilev" => {
                        let shape = match params.get("shape").and_then(|v| v.as_str()) {
                            Some("x-exp-x") | None => DragilevShape::XExpX,
                            Some("sinh") => DragilevShape::Sinh,
                            Some(other) => {
                                return Err(WeightError::InvalidParam(format!(
                                    "unknown dragilev shape `{other}`"
                                )))
                            }
                        };
                        BuiltinFamily::DragilevFinite { shape, alpha: param_alpha_seq(params)? }
                    }
                    other => return Err(WeightError::UnknownBuiltin(other.to_owned())),
                };
                WeightFamily::builtin(fam)
            }
        }
    }
}

/// All builtin families at default parameters, for sweeps and tests.
pub fn default_builtins() -> Vec<WeightFamily> {
    vec![
        WeightFamily::builtin(BuiltinFamily::PowerSeriesFinite { alpha: AlphaSeq::Identity }).unwrap(),
        WeightFamily::builtin(BuiltinFamily::NuclearG1Example).unwrap(),
        WeightFamily::builtin(BuiltinFamily::AlphaSeqExample { alpha: 0.9 }).unwrap(),
        WeightFamily::builtin(BuiltinFamily::PointSpectrumExample { s: 3 }).unwrap(),
        WeightFamily::builtin(BuiltinFamily::SnGapExample).unwrap(),
        WeightFamily::builtin(BuiltinFamily::DragilevFinite {
            shape: DragilevShape::XExpX,
            alpha: AlphaSeq::Identity,
        })
        .unwrap(),
        WeightFamily::builtin(BuiltinFamily::DragilevFinite {
            shape: DragilevShape::Sinh,
            alpha: AlphaSeq::Identity,
        })
        .unwrap(),
    ]
}
