//! Machine-readable report entries.
//!
//! One entry per criterion evaluation, with a fixed key set:
//! `{criterion, family, params, status, witness, counterexample,
//!   trend: {samples, classification}, paper_anchor}`.
//!
//! The `paper_anchor` is a stable self-contained statement of the criterion
//! being decided, so a report can be read without the library at hand.

use crate::criteria::{Counterexample, Verdict, VerdictStatus, Witness};
use crate::trend::{TrendClass, TrendSample};
use crate::weights::WeightFamily;
use serde::Serialize;

/// Stable anchor strings per criterion.
pub fn anchor(criterion: &str) -> &'static str {
    match criterion {
        "kothe" => "Köthe matrix: (K1) a_n(i) <= a_{n+1}(i) for all i,n; (K2) strict positivity",
        "g1-1" => "(G1-1): 0 < a_n(i+1) <= a_n(i) for all i,n",
        "g1-2" => "(G1-2): for all n there are m>n, C>0 with a_n(i) <= C a_m(i)^2 for all i",
        "vanishing" => {
            "dichotomy under (G1-1): either some row has a positive limit (normable, c0 case) \
             or a_n(i) -> 0 for every n"
        }
        "regular" => "regularity: a_n(i)/a_{n+1}(i) nonincreasing in i",
        "continuity" => {
            "averaging operator continuous iff for all n exists m: \
             sup_i (a_n(i)/i) sum_{j<=i} 1/a_m(j) < inf"
        }
        "compactness" => {
            "averaging operator compact iff exists m for all n: \
             (a_n(i)/i) sum_{j<=i} 1/a_m(j) -> 0 (note the quantifier order)"
        }
        "diff-continuity" => {
            "differentiation operator continuous iff for all n exist m, M: \
             i a_n(i) <= M a_m(i+1)"
        }
        "nuclearity" => {
            "nuclear iff for all n exists m: sup_i i^alpha a_n(i)/a_m(i) < inf \
             (any alpha); equivalently sum_i a_n(i)/a_m(i) < inf"
        }
        "invertibility" => {
            "0 outside the spectrum iff for all n exists m: sup_i i a_n(i)/a_m(i) < inf"
        }
        "membership" => "1/s in the point spectrum iff i^{s-1} a_n(i) -> 0 for all n",
        "sn" => "S_n(A) = { s : sum_i 1/(i^s a_n(i)) < inf }; s_0(n) its infimum",
        "closed-range" => {
            "(I-C) has closed range: T R = R T = I for the shifted operator, with the scaled \
             matrix D_mn column-decaying and row-sum bounded by (i+1) a_n(i+1)/a_m(i+1)"
        }
        "ergodic" => {
            "the operator is power bounded (p_n(Cx) <= p_n(x)) and uniformly mean ergodic; \
             the means converge to Px = x_1*1"
        }
        "spectrum" => {
            "nuclear: spectrum = {1/k}; nonempty S_n: D(1) and {1} contained in the spectrum"
        }
        _ => "unspecified criterion",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendJson {
    pub samples: Vec<TrendSample>,
    pub classification: TrendClass,
}

/// One criterion evaluation in the published wire format.
#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub criterion: String,
    pub family: String,
    pub params: serde_json::Value,
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub counterexample: Option<Counterexample>,
    pub trend: TrendJson,
    pub paper_anchor: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ReportEntry {
    pub fn from_verdict(criterion: &str, family: &WeightFamily, verdict: &Verdict) -> ReportEntry {
        ReportEntry {
            criterion: criterion.to_owned(),
            family: family.name().to_owned(),
            params: family.params().clone(),
            status: verdict.status,
            witness: verdict.witness.clone(),
            counterexample: verdict.counterexample.clone(),
            trend: TrendJson {
                samples: verdict.trend.samples.clone(),
                classification: verdict.trend.class,
            },
            paper_anchor: anchor(criterion).to_owned(),
            notes: verdict.notes.clone(),
        }
    }
}

/// Exit code for a batch of verdicts: 0 all hold, 1 any failure,
/// 2 any inconclusive (failures dominate).
pub fn exit_code(statuses: &[VerdictStatus]) -> i32 {
    if statuses.iter().any(|s| *s == VerdictStatus::Fails) {
        1
    } else if statuses.iter().any(|s| *s == VerdictStatus::Inconclusive) {
        2
    } else {
        0
    }
}
