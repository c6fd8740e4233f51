//! The verdict engine: every `∃m ∀i` weight-ratio criterion, evaluated on a
//! finite window with witness search and three-valued trend-aware outcomes.
//!
//! Outcome semantics:
//! - `Holds` always carries a witness `(m, bound, checked range)`.
//! - `Fails` carries a counterexample (explicit violating indices) or a
//!   certified divergence: every searched witness produced a `Diverges`
//!   trend.
//! - `Inconclusive` carries the trend that blocked certification.
//!
//! Witnesses are searched over `m ∈ (n, n + m_search]` and reported with the
//! smallest succeeding `m`; constants are `exp(observed sup) × 1.01`. Sups
//! are taken over a full window scan, trends over geometric samples.

use crate::kernel::TruncationWindow;
use crate::trend::{TrendClass, TrendReport};
use crate::weights::{WeightError, WeightFamily};
use crate::xreal::{logaddexp, XReal};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

/// Default number of geometric trend samples.
pub const DEFAULT_SAMPLES: usize = 64;
/// Safety factor applied to observed sups when reporting witness constants.
pub const WITNESS_SAFETY: f64 = 1.01;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
    #[error("(K1) fails on the window at (n={n}, i={i}); regularization requires it")]
    K1ViolationOnWindow { n: u32, i: usize },
    #[error("S_n membership evidence violates monotonicity: member at s={member_s}, non-member at s={non_member_s}")]
    SnMonotonicity { member_s: f64, non_member_s: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// The index witness (search parameter `m`, or the largest such over `n`
    /// for aggregated verdicts).
    pub m: u32,
    /// The constant certified on the window (`exp(sup) × 1.01`).
    pub bound: f64,
    pub checked_i_range: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleEntry {
    pub n: u32,
    pub i: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub entries: Vec<CounterexampleEntry>,
    /// Total number of violations found (entries are capped).
    pub total: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub counterexample: Option<Counterexample>,
    pub trend: TrendReport,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }
}

const COUNTEREXAMPLE_CAP: usize = 64;

// ---------------------------------------------------------------------------
// Shared machinery

/// Evaluates `q(i)` on geometric samples and over the full window, returning
/// the trend and the full-window sup.
pub(crate) fn scan_quantity<Q>(
    q: Q,
    window: TruncationWindow,
    samples: usize,
) -> Result<(TrendReport, XReal), CriteriaError>
where
    Q: Fn(usize) -> Result<XReal, WeightError>,
{
    let mut collector = SampleCollector::new(window, samples);
    for i in 1..=window.len() {
        collector.push(i, q(i)?);
    }
    let sup = collector.sup;
    Ok((TrendReport::from_log_samples(collector.out), sup))
}

/// Accumulates a sequentially driven quantity, keeping geometric samples and
/// the running sup.
struct SampleCollector {
    sample_at: Vec<usize>,
    next: usize,
    out: Vec<(usize, XReal)>,
    sup: XReal,
}

impl SampleCollector {
    fn new(window: TruncationWindow, samples: usize) -> SampleCollector {
        SampleCollector {
            sample_at: window.geometric_samples(samples),
            next: 0,
            out: Vec::new(),
            sup: XReal::NEG_INFINITY,
        }
    }

    fn push(&mut self, i: usize, v: XReal) {
        if v > self.sup {
            self.sup = v;
        }
        if self.next < self.sample_at.len() && self.sample_at[self.next] == i {
            self.out.push((i, v));
            self.next += 1;
        }
    }
}

struct PerN {
    n: u32,
    /// Smallest succeeding m with its full-window sup and trend.
    chosen: Option<(u32, XReal, TrendReport)>,
    /// All searched candidates certified divergent.
    all_diverge: bool,
    /// Trend of a representative failed candidate, for diagnostics.
    fallback: Option<(u32, TrendReport)>,
}

/// Witness search for a `∀n ∃m: sup_i q_{n,m}(i) < ∞`-type criterion,
/// reporting the smallest succeeding `m`.
fn search_witness<Q>(
    n: u32,
    m_search: u32,
    window: TruncationWindow,
    q: Q,
) -> Result<PerN, CriteriaError>
where
    Q: Fn(u32, usize) -> Result<XReal, WeightError>,
{
    let mut all_diverge = true;
    let mut fallback: Option<(u32, TrendReport)> = None;
    for m in (n + 1)..=(n + m_search) {
        let (trend, sup) = scan_quantity(|i| q(m, i), window, DEFAULT_SAMPLES)?;
        if trend.bounded_above() {
            return Ok(PerN { n, chosen: Some((m, sup, trend)), all_diverge: false, fallback: None });
        }
        if trend.class != TrendClass::Diverges {
            all_diverge = false;
        }
        if fallback.is_none() {
            fallback = Some((m, trend));
        }
    }
    Ok(PerN { n, chosen: None, all_diverge, fallback })
}

/// Assembles an aggregated verdict from per-n witness searches.
fn assemble_forall_n(per_n: Vec<PerN>, window: TruncationWindow, criterion: &str) -> Verdict {
    let mut notes = Vec::new();
    if per_n.iter().all(|p| p.chosen.is_some()) {
        let mut worst_m = 0u32;
        let mut worst_bound = f64::NEG_INFINITY;
        let mut last_trend = None;
        for p in &per_n {
            let (m, sup, trend) = p.chosen.as_ref().unwrap();
            let bound = sup.to_f64().exp() * WITNESS_SAFETY;
            notes.push(format!("n={}: m={}, bound={:.6e}", p.n, m, bound));
            worst_m = worst_m.max(*m);
            worst_bound = worst_bound.max(bound);
            last_trend = Some(trend.clone());
        }
        return Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness {
                m: worst_m,
                bound: worst_bound,
                checked_i_range: (1, window.len()),
            }),
            counterexample: None,
            trend: last_trend.expect("nonempty"),
            notes,
        };
    }
    // Some n failed to certify.
    let failing: Vec<&PerN> = per_n.iter().filter(|p| p.chosen.is_none()).collect();
    let certified_failure = failing.iter().all(|p| p.all_diverge);
    let witness_free = failing[0];
    let (bad_m, bad_trend) = witness_free.fallback.clone().expect("searched at least one m");
    notes.push(format!(
        "{criterion}: no witness for n={} in the searched range (diagnostic m={bad_m})",
        witness_free.n
    ));
    if certified_failure {
        let entries = bad_trend
            .samples
            .iter()
            .rev()
            .take(4)
            .map(|s| CounterexampleEntry { n: witness_free.n, i: s.i, value: s.value })
            .collect::<Vec<_>>();
        notes.push("every searched witness produced a certified divergence".to_owned());
        return Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample { total: entries.len(), entries }),
            trend: bad_trend,
            notes,
        };
    }
    Verdict {
        status: VerdictStatus::Inconclusive,
        witness: None,
        counterexample: None,
        trend: bad_trend,
        notes,
    }
}

// ---------------------------------------------------------------------------
// (K1)/(K2) and G1

/// Checks the Köthe matrix conditions: (K1) monotone in `n` on the window,
/// (K2) strengthened to strict positivity (guaranteed by construction).
///
/// Families with finitely many (K1) violations confined to small `i` get a
/// repairability note: inductively rescaling finitely many rows restores
/// monotonicity without changing the space.
pub fn check_kothe(
    family: &WeightFamily,
    n_max: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    if n_max < 2 {
        return Err(CriteriaError::InvalidConfig("check_kothe requires n_max >= 2".into()));
    }
    let mut entries = Vec::new();
    let mut total = 0usize;
    let mut max_violating_i = 0usize;
    let mut collector = SampleCollector::new(window, DEFAULT_SAMPLES);
    for i in 1..=window.len() {
        let mut min_margin = XReal::INFINITY;
        for n in 1..n_max {
            let a = family.log_weight(n, i)?;
            let b = family.log_weight(n + 1, i)?;
            let margin = b.sub(&a); // >= 0 means ok
            if margin < min_margin {
                min_margin = margin;
            }
            if a > b {
                total += 1;
                max_violating_i = max_violating_i.max(i);
                if entries.len() < COUNTEREXAMPLE_CAP {
                    entries.push(CounterexampleEntry { n, i, value: a.sub(&b).to_f64().exp() });
                }
            }
        }
        collector.push(i, min_margin);
    }
    let trend = TrendReport::from_log_samples(collector.out);
    if total == 0 {
        return Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness { m: n_max, bound: 1.0, checked_i_range: (1, window.len()) }),
            counterexample: None,
            trend,
            notes: vec!["(K1) holds and weights are strictly positive on the window".into()],
        });
    }
    let mut notes = vec![format!("{total} (K1) violations, largest at i={max_violating_i}")];
    if max_violating_i <= window.len() / 2 {
        notes.push(
            "violations are confined to finitely many small i per row; rescaling those rows \
             inductively yields an equivalent monotone matrix defining the same space"
                .to_owned(),
        );
    }
    Ok(Verdict {
        status: VerdictStatus::Fails,
        witness: None,
        counterexample: Some(Counterexample { entries, total }),
        trend,
        notes,
    })
}

/// (G1-1): `a_n(i+1) ≤ a_n(i)` on the window for every `n ≤ n_max`.
pub fn check_g1_1(
    family: &WeightFamily,
    n_max: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let mut entries = Vec::new();
    let mut total = 0;
    let mut collector = SampleCollector::new(window, DEFAULT_SAMPLES);
    for i in 1..window.len() {
        let mut min_margin = XReal::INFINITY;
        for n in 1..=n_max {
            let here = family.log_weight(n, i)?;
            let next = family.log_weight(n, i + 1)?;
            let margin = here.sub(&next); // >= 0 means ok
            if margin < min_margin {
                min_margin = margin;
            }
            if next > here {
                total += 1;
                if entries.len() < COUNTEREXAMPLE_CAP {
                    entries.push(CounterexampleEntry {
                        n,
                        i,
                        value: next.sub(&here).to_f64().exp(),
                    });
                }
            }
        }
        collector.push(i, min_margin);
    }
    let trend = TrendReport::from_log_samples(collector.out);
    if total == 0 {
        Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness { m: n_max, bound: 1.0, checked_i_range: (1, window.len()) }),
            counterexample: None,
            trend,
            notes: Vec::new(),
        })
    } else {
        Ok(Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample { entries, total }),
            trend,
            notes: Vec::new(),
        })
    }
}

/// (G1-2) for a single `n`: the smallest `m ∈ (n, n+m_search]` with
/// `sup_i a_n(i)/a_m(i)^2` tail-bounded.
pub fn g1_2_for_n(
    family: &WeightFamily,
    n: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let per = search_witness(n, m_search, window, |m, i| {
        let a = family.log_weight(n, i)?;
        let b = family.log_weight(m, i)?;
        Ok(a.sub(&b.mul_f64(2.0)))
    })?;
    match per.chosen {
        Some((m, sup, trend)) => Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness {
                m,
                bound: sup.to_f64().exp() * WITNESS_SAFETY,
                checked_i_range: (1, window.len()),
            }),
            counterexample: None,
            trend,
            notes: vec![format!("n={n}: a_n <= C a_m^2 with m={m}")],
        }),
        None => {
            let (bad_m, trend) = per.fallback.expect("searched");
            Ok(Verdict {
                status: VerdictStatus::Inconclusive,
                witness: None,
                counterexample: None,
                trend,
                notes: vec![format!(
                    "n={n}: every m in (n, n+{m_search}] has a growing sup sequence (diagnostic m={bad_m})"
                )],
            })
        }
    }
}

/// Checks both G1 conditions. The G1-2 verdict aggregates the per-n witness
/// searches; it never certifies failure (a witness might exist beyond the
/// searched range), so its negative outcome is `Inconclusive`.
pub fn check_g1(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<(Verdict, Verdict), CriteriaError> {
    let g1_1 = check_g1_1(family, n_max, window)?;
    let mut notes = Vec::new();
    let mut worst: Option<Witness> = None;
    let mut last_trend = None;
    let mut blocked: Option<TrendReport> = None;
    for n in 1..=n_max {
        let v = g1_2_for_n(family, n, m_search, window)?;
        notes.extend(v.notes.iter().cloned());
        match v.status {
            VerdictStatus::Holds => {
                let w = v.witness.unwrap();
                worst = Some(match worst {
                    None => w,
                    Some(prev) => Witness {
                        m: prev.m.max(w.m),
                        bound: prev.bound.max(w.bound),
                        checked_i_range: w.checked_i_range,
                    },
                });
                last_trend = Some(v.trend);
            }
            _ => {
                blocked = Some(v.trend);
            }
        }
    }
    let g1_2 = match blocked {
        None => Verdict {
            status: VerdictStatus::Holds,
            witness: worst,
            counterexample: None,
            trend: last_trend.expect("n_max >= 1"),
            notes,
        },
        Some(trend) => Verdict {
            status: VerdictStatus::Inconclusive,
            witness: None,
            counterexample: None,
            trend,
            notes,
        },
    };
    Ok((g1_1, g1_2))
}

// ---------------------------------------------------------------------------
// Vanishing / normability dichotomy

/// Classifies the (G1-1) dichotomy: either some row has a positive limit
/// (the space is normable) or every row vanishes.
///
/// `Holds` = every tested row vanishes; `Fails` = normable (a positive-limit
/// row was certified); `Inconclusive` otherwise.
pub fn check_vanishing_and_normability(
    family: &WeightFamily,
    n_max: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let mut notes = Vec::new();
    let g1_1 = check_g1_1(family, n_max, window)?;
    if !g1_1.holds() {
        notes.push("warning: (G1-1) does not hold on the window; the dichotomy presumes it".into());
    }
    let mut trends = Vec::new();
    for n in 1..=n_max {
        let (trend, _) = scan_quantity(|i| family.log_weight(n, i), window, DEFAULT_SAMPLES)?;
        trends.push((n, trend));
    }
    if let Some((n0, t)) = trends.iter().find(|(_, t)| t.certifies_nonvanishing()) {
        let limit = t.samples.last().map_or(f64::NAN, |s| s.value);
        notes.push(format!("normable: row n0={n0} has positive-limit trend L≈{limit:.6e}"));
        return Ok(Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample {
                entries: vec![CounterexampleEntry { n: *n0, i: t.last_i(), value: limit }],
                total: 1,
            }),
            trend: t.clone(),
            notes,
        });
    }
    if trends.iter().all(|(_, t)| t.vanishes()) {
        notes.push("vanishing: a_n(i) → 0 for every tested n".into());
        let (_, t) = trends.pop().expect("n_max >= 1");
        return Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness { m: n_max, bound: 0.0, checked_i_range: (1, window.len()) }),
            counterexample: None,
            trend: t,
            notes,
        });
    }
    let (_, t) = trends
        .into_iter()
        .find(|(_, t)| !t.vanishes())
        .expect("some row not certified");
    Ok(Verdict {
        status: VerdictStatus::Inconclusive,
        witness: None,
        counterexample: None,
        trend: t,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Regularity

/// Regularity: `a_n(i)/a_{n+1}(i)` nonincreasing in `i`, for `n < n_max`.
pub fn check_regular(
    family: &WeightFamily,
    n_max: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let mut entries = Vec::new();
    let mut total = 0;
    let mut collector = SampleCollector::new(window, DEFAULT_SAMPLES);
    for i in 1..window.len() {
        let mut min_margin = XReal::INFINITY;
        for n in 1..n_max {
            let d_here = family.log_weight(n, i)?.sub(&family.log_weight(n + 1, i)?);
            let d_next = family.log_weight(n, i + 1)?.sub(&family.log_weight(n + 1, i + 1)?);
            let margin = d_here.sub(&d_next); // >= 0 means ok
            if margin < min_margin {
                min_margin = margin;
            }
            if d_next > d_here {
                total += 1;
                if entries.len() < COUNTEREXAMPLE_CAP {
                    entries.push(CounterexampleEntry {
                        n,
                        i,
                        value: d_next.sub(&d_here).to_f64().exp(),
                    });
                }
            }
        }
        collector.push(i, min_margin);
    }
    let trend = TrendReport::from_log_samples(collector.out);
    if total == 0 {
        Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness { m: n_max, bound: 1.0, checked_i_range: (1, window.len()) }),
            counterexample: None,
            trend,
            notes: Vec::new(),
        })
    } else {
        Ok(Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample { entries, total }),
            trend,
            notes: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------
// Continuity, compactness, differentiation

/// The continuity quantity `(a_n(i)/i) Σ_{j≤i} 1/a_m(j)` for fixed `(n, m)`,
/// with the prefix sum accumulated in log-sum-exp form.
pub fn continuity_probe(
    family: &WeightFamily,
    n: u32,
    m: u32,
    window: TruncationWindow,
) -> Result<(TrendReport, XReal), CriteriaError> {
    let mut lse = XReal::NEG_INFINITY;
    let mut collector = SampleCollector::new(window, DEFAULT_SAMPLES);
    for i in 1..=window.len() {
        let inv_weight = family.log_weight(m, i)?.neg();
        lse = logaddexp(&lse, &inv_weight);
        let q = family.log_weight(n, i)?.add(&lse).add_f64(-(i as f64).ln());
        collector.push(i, q);
    }
    let sup = collector.sup;
    Ok((TrendReport::from_log_samples(collector.out), sup))
}

/// Continuity of the Cesàro operator: for every `n ≤ n_max` there must be
/// `m > n` with the continuity quantity tail-bounded. Reports the first
/// succeeding `m` per `n`.
pub fn check_continuity_cesaro(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let mut per_n = Vec::new();
    for n in 1..=n_max {
        let mut chosen = None;
        let mut all_diverge = true;
        let mut fallback = None;
        for m in n + 1..=n + m_search {
            let (trend, sup) = continuity_probe(family, n, m, window)?;
            if sup.is_nan() || (!sup.is_finite() && !sup.is_sign_negative()) {
                // Genuine overflow of the prefix sum: report and stop.
                return Ok(Verdict {
                    status: VerdictStatus::Inconclusive,
                    witness: None,
                    counterexample: None,
                    trend,
                    notes: vec![format!(
                        "log-sum-exp overflow at n={n}, m={m}: prefix sums leave the representable range"
                    )],
                });
            }
            if trend.bounded_above() {
                chosen = Some((m, sup, trend));
                break;
            }
            if trend.class != TrendClass::Diverges {
                all_diverge = false;
            }
            if fallback.is_none() {
                fallback = Some((m, trend));
            }
        }
        per_n.push(PerN { n, chosen, all_diverge, fallback });
    }
    Ok(assemble_forall_n(per_n, window, "continuity"))
}

/// Compactness: a single `m` must give a `→0` trend for all `n ≤ n_max`
/// *and* for the adversarial index `n = m+1`, which is what defeats any
/// candidate on non-compact families. Note the quantifier order (∃m ∀n),
/// the reverse of the continuity criterion.
pub fn check_compactness_cesaro(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let mut notes =
        vec!["quantifier order is ∃m ∀n (single m for all n), unlike continuity's ∀n ∃m".into()];
    let mut best_fail: Option<(u32, u32, TrendReport)> = None;
    let mut every_m_certified = true;
    for m in 2..=(1 + m_search) {
        let mut ns: Vec<u32> = (1..=n_max).collect();
        if !ns.contains(&(m + 1)) {
            ns.push(m + 1);
        }
        let mut ok = true;
        let mut m_certified_bad = false;
        let mut sup_all = XReal::NEG_INFINITY;
        let mut last = None;
        for &n in &ns {
            let (trend, sup) = continuity_probe(family, n, m, window)?;
            if !trend.vanishes() {
                ok = false;
                if trend.class == TrendClass::Diverges {
                    m_certified_bad = true;
                }
                if best_fail.is_none() {
                    best_fail = Some((m, n, trend));
                }
                break;
            }
            if sup > sup_all {
                sup_all = sup;
            }
            last = Some(trend);
        }
        if ok {
            notes.push(format!("m={m} gives a c0 trend for all tested n (including n={})", m + 1));
            return Ok(Verdict {
                status: VerdictStatus::Holds,
                witness: Some(Witness {
                    m,
                    bound: sup_all.to_f64().exp() * WITNESS_SAFETY,
                    checked_i_range: (1, window.len()),
                }),
                counterexample: None,
                trend: last.expect("tested some n"),
                notes,
            });
        }
        if !m_certified_bad {
            every_m_certified = false;
        }
    }
    let (bad_m, bad_n, trend) = best_fail.expect("searched at least one m");
    notes.push(format!("first defeated candidate: m={bad_m} at n={bad_n}"));
    if every_m_certified {
        notes.push("every candidate m is defeated by a certified divergence at some n".into());
        let entries = trend
            .samples
            .iter()
            .rev()
            .take(4)
            .map(|s| CounterexampleEntry { n: bad_n, i: s.i, value: s.value })
            .collect::<Vec<_>>();
        return Ok(Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample { total: entries.len(), entries }),
            trend,
            notes,
        });
    }
    Ok(Verdict { status: VerdictStatus::Inconclusive, witness: None, counterexample: None, trend, notes })
}

/// Continuity of the formal differentiation operator: `∃m, M` with
/// `i·a_n(i) ≤ M·a_m(i+1)` on the window.
pub fn check_continuity_diff(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let inner = TruncationWindow::new((window.len().saturating_sub(1)).max(1)).expect("N >= 1");
    let mut per_n = Vec::new();
    for n in 1..=n_max {
        per_n.push(search_witness(n, m_search, inner, |m, i| {
            let a = family.log_weight(n, i)?;
            let b = family.log_weight(m, i + 1)?;
            Ok(a.sub(&b).add_f64((i as f64).ln()))
        })?);
    }
    Ok(assemble_forall_n(per_n, inner, "diff-continuity"))
}

/// Fixed-`(n, m)` probe of `sup_i i^α a_n(i)/a_m(i)`.
pub fn nuclearity_probe(
    family: &WeightFamily,
    n: u32,
    m: u32,
    alpha: f64,
    window: TruncationWindow,
) -> Result<(TrendReport, XReal), CriteriaError> {
    scan_quantity(
        |i| {
            let a = family.log_weight(n, i)?;
            let b = family.log_weight(m, i)?;
            Ok(a.sub(&b).add_f64(alpha * (i as f64).ln()))
        },
        window,
        DEFAULT_SAMPLES,
    )
}

/// First `m ∈ (n, n+m_search]` with `sup_i i^α a_n(i)/a_m(i)` tail-bounded.
pub fn nuclearity_witness(
    family: &WeightFamily,
    n: u32,
    m_search: u32,
    alpha: f64,
    window: TruncationWindow,
) -> Result<Option<(u32, TrendReport)>, CriteriaError> {
    for m in n + 1..=n + m_search {
        let (trend, _) = nuclearity_probe(family, n, m, alpha, window)?;
        if trend.bounded_above() {
            return Ok(Some((m, trend)));
        }
    }
    Ok(None)
}

/// The shared sup-route condition `∀n ∃m: sup_i i^α a_n(i)/a_m(i) < ∞`,
/// which is at once the invertibility criterion (α = 1) and the nuclearity
/// condition.
fn sup_route(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    alpha: f64,
    window: TruncationWindow,
) -> Result<Vec<PerN>, CriteriaError> {
    let mut per_n = Vec::new();
    for n in 1..=n_max {
        per_n.push(search_witness(n, m_search, window, |m, i| {
            let a = family.log_weight(n, i)?;
            let b = family.log_weight(m, i)?;
            Ok(a.sub(&b).add_f64(alpha * (i as f64).ln()))
        })?);
    }
    Ok(per_n)
}

/// Grothendieck–Pietsch partial sums `Σ_i a_n(i)/a_m(i)` for the first `m`
/// with a convergent (plateau) trend.
fn gp_sums_witness(
    family: &WeightFamily,
    n: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Option<(u32, TrendReport)>, CriteriaError> {
    for m in n + 1..=n + m_search {
        let mut lse = XReal::NEG_INFINITY;
        let mut collector = SampleCollector::new(window, DEFAULT_SAMPLES);
        for i in 1..=window.len() {
            let term = family.log_weight(n, i)?.sub(&family.log_weight(m, i)?);
            lse = logaddexp(&lse, &term);
            collector.push(i, lse);
        }
        let trend = TrendReport::from_partial_sums_log(collector.out);
        if trend.class == TrendClass::Bounded {
            return Ok(Some((m, trend)));
        }
    }
    Ok(None)
}

/// Nuclearity: the sup-route with exponent `alpha` plus the direct
/// Grothendieck–Pietsch partial-sum diagnostic; `Holds` requires both routes
/// to produce witnesses (possibly different `m`).
pub fn check_nuclearity(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
    alpha: f64,
) -> Result<Verdict, CriteriaError> {
    if alpha < 0.0 {
        return Err(CriteriaError::InvalidConfig("nuclearity alpha must be >= 0".into()));
    }
    let per_n = sup_route(family, n_max, m_search, alpha, window)?;
    let mut verdict = assemble_forall_n(per_n, window, "nuclearity");
    match verdict.status {
        VerdictStatus::Holds => {
            // Consistency: the partial sums must also converge for each n.
            for n in 1..=n_max {
                match gp_sums_witness(family, n, m_search, window)? {
                    Some((m, _)) => {
                        verdict
                            .notes
                            .push(format!("Grothendieck-Pietsch sums converge at n={n} with m={m}"));
                    }
                    None => {
                        verdict.notes.push(format!(
                            "sup-route certified but Grothendieck-Pietsch sums unresolved at n={n}"
                        ));
                        verdict.status = VerdictStatus::Inconclusive;
                        verdict.witness = None;
                        return Ok(verdict);
                    }
                }
            }
            Ok(verdict)
        }
        VerdictStatus::Fails => {
            verdict.notes.push("partial-sum route consistent with failure".into());
            Ok(verdict)
        }
        VerdictStatus::Inconclusive => Ok(verdict),
    }
}

/// Invertibility of the Cesàro operator (`0 ∉ σ`): exactly the sup-route
/// with α = 1; the condition coincides with the nuclearity criterion, so the
/// computation is shared.
pub fn check_invertibility(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    let per_n = sup_route(family, n_max, m_search, 1.0, window)?;
    let mut v = assemble_forall_n(per_n, window, "invertibility");
    v.notes.push("condition shared with the nuclearity sup-route at alpha=1".into());
    Ok(v)
}

// ---------------------------------------------------------------------------
// Point spectrum membership

/// `1/s ∈ σ_pt` iff `i^{s-1} a_n(i) → 0` for all `n ≤ n_max`.
pub fn check_point_spectrum_membership(
    family: &WeightFamily,
    s: u32,
    n_max: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    if s < 1 {
        return Err(CriteriaError::InvalidConfig("membership requires s >= 1".into()));
    }
    let mut trends = Vec::new();
    for n in 1..=n_max {
        let (trend, _) = scan_quantity(
            |i| Ok(family.log_weight(n, i)?.add_f64((s as f64 - 1.0) * (i as f64).ln())),
            window,
            DEFAULT_SAMPLES,
        )?;
        trends.push((n, trend));
    }
    if let Some((n, t)) = trends.iter().find(|(_, t)| t.certifies_nonvanishing()) {
        let last = t.samples.last().map_or(f64::NAN, |smp| smp.value);
        return Ok(Verdict {
            status: VerdictStatus::Fails,
            witness: None,
            counterexample: Some(Counterexample {
                entries: vec![CounterexampleEntry { n: *n, i: t.last_i(), value: last }],
                total: 1,
            }),
            trend: t.clone(),
            notes: vec![format!("i^{} a_{n}(i) does not vanish", s - 1)],
        });
    }
    if trends.iter().all(|(_, t)| t.vanishes()) {
        let (_, t) = trends.pop().expect("n_max >= 1");
        return Ok(Verdict {
            status: VerdictStatus::Holds,
            witness: Some(Witness { m: n_max, bound: 0.0, checked_i_range: (1, window.len()) }),
            counterexample: None,
            trend: t,
            notes: vec![format!("i^{} a_n(i) → 0 for every tested n", s - 1)],
        });
    }
    let (_, t) = trends.into_iter().find(|(_, t)| !t.vanishes()).expect("nonempty");
    Ok(Verdict {
        status: VerdictStatus::Inconclusive,
        witness: None,
        counterexample: None,
        trend: t,
        notes: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// S_n sets

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SnEntry {
    pub s: f64,
    pub status: Membership,
    pub evidence: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct S0Estimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub clamped_by_g1: bool,
}

/// Membership report for `S_n(A) = {s : Σ 1/(i^s a_n(i)) < ∞}`.
#[derive(Clone, Debug, Serialize)]
pub struct SnReport {
    pub n: u32,
    pub entries: Vec<SnEntry>,
    pub s0_estimate: Option<S0Estimate>,
}

impl SnReport {
    pub fn has_member(&self) -> bool {
        self.entries.iter().any(|e| e.status == Membership::Member)
    }

    pub fn all_non_member(&self) -> bool {
        self.entries.iter().all(|e| e.status == Membership::NonMember)
    }

    pub fn status_of(&self, s: f64) -> Option<Membership> {
        self.entries.iter().find(|e| (e.s - s).abs() < 1e-12).map(|e| e.status)
    }
}

pub fn default_s_grid() -> Vec<f64> {
    (2..=12).map(|k| k as f64 * 0.5).collect()
}

/// Evaluates membership of each grid `s` in `S_n(A)`.
///
/// Evidence, in order: exponential divergence or certified non-vanishing of
/// the terms (non-member); a tight sustained power fit of the terms with
/// exponent ≤ -1.05 (member) or ≥ -0.95 (non-member); a partial-sum plateau
/// (member); bounded terms at `s'` with `s' + 2 < s` (member, the
/// two-exponent reduction). Membership is then propagated monotonically and
/// any contradiction is rejected. `s_0(n) ≥ 1` is enforced when (G1-1) holds
/// on the window.
pub fn compute_sn(
    family: &WeightFamily,
    n: u32,
    s_grid: &[f64],
    window: TruncationWindow,
) -> Result<SnReport, CriteriaError> {
    if s_grid.is_empty() || s_grid.iter().any(|&s| s <= 0.0) {
        return Err(CriteriaError::InvalidConfig("s_grid must be nonempty, positive".into()));
    }
    let mut grid: Vec<f64> = s_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    struct Evidence {
        s: f64,
        term_trend: TrendReport,
        sum_trend: TrendReport,
    }
    let mut evidence = Vec::new();
    for &s in &grid {
        let mut lse = XReal::NEG_INFINITY;
        let mut sum_collector = SampleCollector::new(window, DEFAULT_SAMPLES);
        let mut term_collector = SampleCollector::new(window, DEFAULT_SAMPLES);
        for i in 1..=window.len() {
            let term = family.log_weight(n, i)?.neg().add_f64(-s * (i as f64).ln());
            lse = logaddexp(&lse, &term);
            term_collector.push(i, term);
            sum_collector.push(i, lse);
        }
        evidence.push(Evidence {
            s,
            term_trend: TrendReport::from_log_samples(term_collector.out),
            sum_trend: TrendReport::from_partial_sums_log(sum_collector.out),
        });
    }

    // Bounded-terms exponents for the two-exponent reduction.
    let bounded_terms_at: Vec<f64> = evidence
        .iter()
        .filter(|e| e.term_trend.bounded_above())
        .map(|e| e.s)
        .collect();

    let mut entries: Vec<SnEntry> = Vec::new();
    for e in &evidence {
        let (status, why) = decide_membership(e.s, &e.term_trend, &e.sum_trend, &bounded_terms_at);
        entries.push(SnEntry { s: e.s, status, evidence: why });
    }

    // Monotone propagation with contradiction detection.
    let mut min_member: Option<f64> = None;
    let mut max_non_member: Option<f64> = None;
    for e in &entries {
        match e.status {
            Membership::Member => {
                min_member = Some(min_member.map_or(e.s, |v: f64| v.min(e.s)));
            }
            Membership::NonMember => {
                max_non_member = Some(max_non_member.map_or(e.s, |v: f64| v.max(e.s)));
            }
            Membership::Inconclusive => {}
        }
    }
    if let (Some(mm), Some(mn)) = (min_member, max_non_member) {
        if mn >= mm {
            return Err(CriteriaError::SnMonotonicity { member_s: mm, non_member_s: mn });
        }
    }
    for e in entries.iter_mut() {
        if let Some(mm) = min_member {
            if e.s >= mm && e.status == Membership::Inconclusive {
                e.status = Membership::Member;
                e.evidence = format!("monotone propagation from s={mm}");
            }
        }
        if let Some(mn) = max_non_member {
            if e.s <= mn && e.status == Membership::Inconclusive {
                e.status = Membership::NonMember;
                e.evidence = format!("monotone propagation from s={mn}");
            }
        }
    }

    let s0_estimate = min_member.map(|upper| {
        let g1_ok = check_g1_1(family, n.max(2), window).map(|v| v.holds()).unwrap_or(false);
        let raw_lower = max_non_member.unwrap_or(0.0);
        let clamped_by_g1 = g1_ok && raw_lower < 1.0;
        let lower = if clamped_by_g1 { 1.0_f64.min(upper) } else { raw_lower };
        S0Estimate { estimate: (lower + upper) / 2.0, lower, upper, clamped_by_g1 }
    });

    Ok(SnReport { n, entries, s0_estimate })
}

fn decide_membership(
    s: f64,
    term_trend: &TrendReport,
    sum_trend: &TrendReport,
    bounded_terms_at: &[f64],
) -> (Membership, String) {
    if term_trend.class == TrendClass::Diverges {
        return (Membership::NonMember, "terms diverge".into());
    }
    if term_trend.certifies_nonvanishing() {
        return (Membership::NonMember, "terms do not vanish".into());
    }
    if let Some(f) = term_trend.power_fit {
        if f.tight && f.sustained {
            if f.slope <= -1.05 {
                return (Membership::Member, format!("term exponent ≈ {:.3} < -1", f.slope));
            }
            if f.slope >= -0.95 {
                return (Membership::NonMember, format!("term exponent ≈ {:.3} > -1", f.slope));
            }
        }
    }
    if sum_trend.class == TrendClass::Bounded {
        return (Membership::Member, "partial sums plateau".into());
    }
    if let Some(&t) = bounded_terms_at.iter().find(|&&t| t + 2.0 < s) {
        return (Membership::Member, format!("terms bounded at s={t}; membership on (s+2, ∞)"));
    }
    (Membership::Inconclusive, "no certification at this window".into())
}

// ---------------------------------------------------------------------------
// Regularization

/// Preprocessing mode for [`regularize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularizeMode {
    /// Use the rows as-is: `b_n(i) = Π_{j=n}^{i} a_j(i)` for `i ≥ n`.
    Raw,
    /// Rescale each used row by its diagonal and cap at one, choosing rows
    /// by doubling until each capped row is dominated by the square of the
    /// next.
    Capped,
}

#[derive(Debug)]
pub struct Regularized {
    pub family: WeightFamily,
    /// Source row chosen for each level (identity unless doubling fired).
    pub level_rows: Vec<u32>,
    /// `∀n ∃m, C: a_n ≤ C·b_m` evidence.
    pub a_dominated_by_b: Verdict,
    /// `∀n ∃m, D: b_n ≤ D·a_m` evidence.
    pub b_dominated_by_a: Verdict,
}

/// Builds the regular matrix `B` with `b_n(i) = 1` for `i < n` and
/// `b_n(i) = Π_{j=n}^{i} ã_j(i)` for `i ≥ n`, where `ã` is the source family
/// preprocessed per `mode`. Requires (K1) on the window.
pub fn regularize(
    family: &WeightFamily,
    window: TruncationWindow,
    mode: RegularizeMode,
) -> Result<Regularized, CriteriaError> {
    let n_len = window.len();
    // (K1) precondition.
    for i in 1..=n_len {
        for n in 1..=16u32.min(n_len as u32) {
            let a = family.log_weight(n, i)?;
            let b = family.log_weight(n + 1, i)?;
            if a > b {
                return Err(CriteriaError::K1ViolationOnWindow { n, i });
            }
        }
    }

    // Choose source rows (Capped mode may skip rows by doubling).
    let max_levels = n_len;
    let mut level_rows: Vec<u32> = Vec::with_capacity(max_levels);
    match mode {
        RegularizeMode::Raw => {
            for k in 1..=max_levels {
                level_rows.push(k as u32);
            }
        }
        RegularizeMode::Capped => {
            let mut prev: u32 = 1;
            level_rows.push(1);
            for _k in 2..=max_levels {
                let mut cand = prev + 1;
                let mut tries = 0;
                while !capped_square_dominates(family, prev, cand, window)? && tries < 6 {
                    cand = cand.saturating_mul(2);
                    tries += 1;
                }
                level_rows.push(cand);
                prev = cand;
            }
        }
    }

    // Materialize log ã_k(i) prefix sums: log b_n(i) = Σ_{k=n}^{i} log ã_k(i)
    // for i >= n, and 0 below the diagonal.
    let mut table: Vec<Vec<XReal>> = Vec::with_capacity(n_len);
    for i in 1..=n_len {
        let mut prefixes = Vec::with_capacity(i + 1);
        let mut acc = XReal::ZERO;
        prefixes.push(acc);
        for k in 1..=i {
            let row = level_rows[k - 1];
            let la = family.log_weight(row, i)?;
            let la_tilde = match mode {
                RegularizeMode::Raw => la,
                RegularizeMode::Capped => {
                    let scale = family.log_weight(row, row as usize)?;
                    cap_zero(la.sub(&scale))
                }
            };
            acc = acc.add(&la_tilde);
            prefixes.push(acc);
        }
        table.push(prefixes);
    }
    let table = Arc::new(table);
    let table_for_fn = table.clone();
    let name = format!("regularized({})", family.name());
    let b_family = WeightFamily::from_log_fn(&name, move |n, i| {
        let n_us = n as usize;
        if i > table_for_fn.len() {
            return Err(WeightError::AlphaOutOfRange { i, len: table_for_fn.len() });
        }
        if i < n_us {
            return Ok(XReal::ZERO); // b_n(i) = 1
        }
        let prefixes = &table_for_fn[i - 1];
        // Σ_{k=n}^{i} = prefix(i) - prefix(n-1)
        Ok(prefixes[i].sub(&prefixes[n_us - 1]))
    });

    // Equivalence diagnostics: a_n <= C b_m and b_n <= D a_m.
    let search_n = 3u32;
    let m_search = 8u32;
    let mut per_a = Vec::new();
    let mut per_b = Vec::new();
    for n in 1..=search_n {
        per_a.push(search_witness(n, m_search, window, |m, i| {
            Ok(family.log_weight(n, i)?.sub(&b_family.log_weight(m, i)?))
        })?);
        per_b.push(search_witness(n, m_search, window, |m, i| {
            Ok(b_family.log_weight(n, i)?.sub(&family.log_weight(m, i)?))
        })?);
    }
    let a_dominated_by_b = assemble_forall_n(per_a, window, "a<=Cb");
    let b_dominated_by_a = assemble_forall_n(per_b, window, "b<=Da");

    Ok(Regularized { family: b_family, level_rows, a_dominated_by_b, b_dominated_by_a })
}

fn capped_square_dominates(
    family: &WeightFamily,
    row_lo: u32,
    row_hi: u32,
    window: TruncationWindow,
) -> Result<bool, CriteriaError> {
    let scale_lo = family.log_weight(row_lo, row_lo as usize)?;
    let scale_hi = family.log_weight(row_hi, row_hi as usize)?;
    for i in 1..=window.len() {
        let a = cap_zero(family.log_weight(row_lo, i)?.sub(&scale_lo));
        let b = cap_zero(family.log_weight(row_hi, i)?.sub(&scale_hi));
        if a > b.mul_f64(2.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cap_zero(v: XReal) -> XReal {
    if v > XReal::ZERO {
        XReal::ZERO
    } else {
        v
    }
}

// ---------------------------------------------------------------------------
// Main-theorem verdict bundle

/// The four equivalent statements of the spectral trichotomy for G1 spaces,
/// as independent finite-evidence verdicts.
#[derive(Debug)]
pub struct TheoremVerdicts {
    /// `0 ∉ σ(C)`.
    pub invertibility: Verdict,
    /// `1/2 ∈ σ_pt`.
    pub membership_half: Verdict,
    /// Some integer `s > 1` with `1/s ∈ σ_pt` (statuses per s attached).
    pub exists_s: Verdict,
    /// Every `1/s`, `s ≤ s_max`, in `σ_pt`.
    pub all_s: Verdict,
}

pub fn theorem_verdicts(
    family: &WeightFamily,
    n_max: u32,
    m_search: u32,
    s_max: u32,
    window: TruncationWindow,
) -> Result<TheoremVerdicts, CriteriaError> {
    let invertibility = check_invertibility(family, n_max, m_search, window)?;
    let membership_half = check_point_spectrum_membership(family, 2, n_max, window)?;
    let mut memberships = Vec::new();
    for s in 2..=s_max {
        memberships.push((s, check_point_spectrum_membership(family, s, n_max, window)?));
    }
    let exists_s = aggregate_exists(&memberships);
    let all_s = aggregate_all(&memberships);
    Ok(TheoremVerdicts { invertibility, membership_half, exists_s, all_s })
}

fn aggregate_exists(memberships: &[(u32, Verdict)]) -> Verdict {
    if let Some((s, v)) = memberships.iter().find(|(_, v)| v.holds()) {
        let mut out = v.clone();
        out.notes.push(format!("witnessed by s={s}"));
        return out;
    }
    if memberships.iter().all(|(_, v)| v.status == VerdictStatus::Fails) {
        let mut out = memberships[0].1.clone();
        out.notes.push("no tested s > 1 admits membership".into());
        return out;
    }
    let (_, v) = memberships
        .iter()
        .find(|(_, v)| v.status == VerdictStatus::Inconclusive)
        .expect("mixed statuses include inconclusive");
    v.clone()
}

fn aggregate_all(memberships: &[(u32, Verdict)]) -> Verdict {
    if memberships.iter().all(|(_, v)| v.holds()) {
        let mut out = memberships.last().expect("nonempty").1.clone();
        out.notes.push("all tested s hold".into());
        return out;
    }
    if let Some((s, v)) = memberships.iter().find(|(_, v)| v.status == VerdictStatus::Fails) {
        let mut out = v.clone();
        out.notes.push(format!("fails at s={s}"));
        return out;
    }
    let (_, v) = memberships
        .iter()
        .find(|(_, v)| v.status == VerdictStatus::Inconclusive)
        .expect("mixed statuses include inconclusive");
    v.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{AlphaSeq, BuiltinFamily, WeightFamily};

    fn w(n: usize) -> TruncationWindow {
        TruncationWindow::new(n).unwrap()
    }

    fn psf() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::PowerSeriesFinite { alpha: AlphaSeq::Identity }).unwrap()
    }

    fn nuclear_g1() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::NuclearG1Example).unwrap()
    }

    fn alpha_seq() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::AlphaSeqExample { alpha: 0.9 }).unwrap()
    }

    fn point_spectrum(s: u32) -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::PointSpectrumExample { s }).unwrap()
    }

    fn sn_gap() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::SnGapExample).unwrap()
    }

    #[test]
    fn kothe_power_series_holds() {
        let v = check_kothe(&psf(), 5, w(1000)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
    }

    #[test]
    fn kothe_nuclear_g1_fails_within_documented_range() {
        let v = check_kothe(&nuclear_g1(), 3, w(1000)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);
        let ce = v.counterexample.unwrap();
        assert_eq!(ce.total, ce.entries.len());
        // Violations occur exactly below n(n+1)·ln(1+1/n) per row.
        for n in 1..3u32 {
            let bound = n as f64 * (n as f64 + 1.0) * (1.0 + 1.0 / n as f64).ln();
            let expected: Vec<usize> = (1..=1000).filter(|&i| (i as f64) < bound).collect();
            let got: Vec<usize> = ce.entries.iter().filter(|e| e.n == n).map(|e| e.i).collect();
            assert_eq!(got, expected, "n={n}");
        }
        assert!(v.notes.iter().any(|s| s.contains("equivalent")));
    }

    #[test]
    fn kothe_sn_gap_holds() {
        let v = check_kothe(&sn_gap(), 4, w(1000)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
    }

    #[test]
    fn g1_nuclear_example() {
        let v = g1_2_for_n(&nuclear_g1(), 1, 12, w(512)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert_eq!(v.witness.as_ref().unwrap().m, 2, "the m = 2n pattern at n=1");
        let (g1_1, g1_2) = check_g1(&nuclear_g1(), 3, 12, w(512)).unwrap();
        assert!(g1_1.holds());
        assert!(g1_2.holds());
    }

    #[test]
    fn g1_power_series_equality_case() {
        let v = g1_2_for_n(&psf(), 1, 12, w(2048)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        let wit = v.witness.unwrap();
        assert_eq!(wit.m, 2);
        assert!(wit.bound >= 1.0 && wit.bound <= 1.02, "C = 1 up to the safety factor");
    }

    #[test]
    fn g1_point_spectrum_not_certified() {
        let v = g1_2_for_n(&point_spectrum(3), 1, 12, w(2048)).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
    }

    #[test]
    fn g1_monotone_witness_property() {
        // If G1-2 holds at the first witness m, every larger m in range also
        // works, on the families where (K1) holds.
        for fam in [psf(), sn_gap()] {
            for n in 1..=3u32 {
                let v = g1_2_for_n(&fam, n, 12, w(1024)).unwrap();
                let m0 = v.witness.expect("holds").m;
                for m in m0 + 1..=n + 12 {
                    let (trend, _) = scan_quantity(
                        |i| {
                            let a = fam.log_weight(n, i)?;
                            let b = fam.log_weight(m, i)?;
                            Ok(a.sub(&b.mul_f64(2.0)))
                        },
                        w(1024),
                        DEFAULT_SAMPLES,
                    )
                    .unwrap();
                    assert!(trend.bounded_above(), "{}: n={n} m={m}", fam.name());
                }
            }
        }
    }

    #[test]
    fn vanishing_dichotomy() {
        assert_eq!(
            check_vanishing_and_normability(&psf(), 4, w(2048)).unwrap().status,
            VerdictStatus::Holds
        );
        assert_eq!(
            check_vanishing_and_normability(&alpha_seq(), 4, w(2048)).unwrap().status,
            VerdictStatus::Holds
        );
        let constant = WeightFamily::from_expr_str("0-0").unwrap();
        let v = check_vanishing_and_normability(&constant, 4, w(2048)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails, "constant weights → normable");
        assert!(v.notes.iter().any(|s| s.contains("normable")));
    }

    #[test]
    fn regular_families() {
        assert!(check_regular(&psf(), 5, w(2048)).unwrap().holds());
        assert!(check_regular(&point_spectrum(2), 5, w(2048)).unwrap().holds());
        // Hand-built 2-row table with a swapped pair at i = 10.
        let table = WeightFamily::from_log_fn("swapped", |n, i| {
            let base = -(i as f64) / n as f64;
            let tweak = if n == 1 && i == 10 { -3.0 } else { 0.0 };
            Ok(XReal::from_f64(base + tweak))
        });
        let v = check_regular(&table, 2, w(64)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);
        let ce = v.counterexample.unwrap();
        assert!(ce.entries.iter().any(|e| e.i == 9 || e.i == 10), "violating i reported");
    }

    #[test]
    fn continuity_examples() {
        // Power series: bound <= 1 via the decreasing-weights majorization.
        let (trend, sup) = continuity_probe(&psf(), 1, 2, w(2048)).unwrap();
        assert!(trend.bounded_above());
        assert!(sup.to_f64().exp() <= 1.0 + 1e-12);

        let v = check_continuity_cesaro(&psf(), 4, 12, w(2048)).unwrap();
        assert!(v.holds());
        assert!(v.witness.unwrap().bound <= 1.02);

        // The nuclear example survives its (K1)-violating head.
        let v = check_continuity_cesaro(&nuclear_g1(), 3, 12, w(4096)).unwrap();
        assert!(v.holds());

        // Constant weights: the quantity is exactly 1.
        let constant = WeightFamily::from_expr_str("0-0").unwrap();
        let v = check_continuity_cesaro(&constant, 3, 12, w(2048)).unwrap();
        assert!(v.holds());
        let b = v.witness.unwrap().bound;
        assert!((b / WITNESS_SAFETY - 1.0).abs() <= 1e-9, "bound 1 up to safety: {b}");
    }

    #[test]
    fn compactness_examples() {
        // Power series: not compact; every candidate m is defeated by the
        // adversarial n = m+1 (the growth rate 1/(m(m+1)) needs the larger
        // window to certify for the biggest m).
        let v = check_compactness_cesaro(&psf(), 4, 12, w(4096)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);
        assert!(v.notes.iter().any(|s| s.contains("∃m ∀n")));

        // Toy family whose rows saturate: row 2 dominates all rows.
        let toy = WeightFamily::from_log_fn("two-row-toy", |n, i| {
            let rate = if n == 1 { 2.0 } else { 1.0 };
            Ok(XReal::from_f64(-rate * i as f64))
        });
        let v = check_compactness_cesaro(&toy, 4, 6, w(1024)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);

        // Nuclear G1 example: certified non-compact.
        let v = check_compactness_cesaro(&nuclear_g1(), 3, 8, w(2048)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);

        let v = check_compactness_cesaro(&sn_gap(), 3, 8, w(4096)).unwrap();
        assert_ne!(v.status, VerdictStatus::Holds, "expected non-compact");
    }

    #[test]
    fn diff_continuity_examples() {
        // Nuclear example with the documented witness m = 2n.
        let fam = nuclear_g1();
        let (trend, _) = scan_quantity(
            |i| {
                let a = fam.log_weight(1, i)?;
                let b = fam.log_weight(2, i + 1)?;
                Ok(a.sub(&b).add_f64((i as f64).ln()))
            },
            w(1024),
            DEFAULT_SAMPLES,
        )
        .unwrap();
        assert!(trend.vanishes(), "ratio → 0 with m = 2n");
        assert!(check_continuity_diff(&fam, 3, 12, w(2048)).unwrap().holds());

        assert!(check_continuity_diff(&psf(), 3, 12, w(2048)).unwrap().holds());

        let constant = WeightFamily::from_expr_str("0-0").unwrap();
        let v = check_continuity_diff(&constant, 3, 12, w(2048)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails, "i·1 <= M·1 impossible");
    }

    #[test]
    fn nuclearity_examples() {
        assert!(check_nuclearity(&nuclear_g1(), 4, 12, w(4096), 1.0).unwrap().holds());
        assert!(check_nuclearity(&psf(), 4, 12, w(4096), 1.0).unwrap().holds());
        let v = check_nuclearity(&point_spectrum(2), 3, 12, w(4096), 1.0).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails, "i^(1-δ) diverges for every m");
    }

    #[test]
    fn invertibility_examples() {
        assert!(check_invertibility(&nuclear_g1(), 4, 12, w(4096)).unwrap().holds());
        assert!(check_invertibility(&psf(), 4, 12, w(4096)).unwrap().holds());
        let v = check_invertibility(&alpha_seq(), 1, 12, w(4096)).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails, "1 - α_m + α_1 > 0 for every m");
        assert!(v.counterexample.is_some());
    }

    #[test]
    fn membership_examples() {
        // s = 1 holds for any vanishing family.
        for fam in [psf(), nuclear_g1(), alpha_seq(), point_spectrum(3)] {
            assert!(
                check_point_spectrum_membership(&fam, 1, 4, w(4096)).unwrap().holds(),
                "{}",
                fam.name()
            );
        }
        // Point spectrum example: memberships exactly {1, 1/2, 1/3}.
        let fam = point_spectrum(3);
        for s in 1..=3u32 {
            assert!(check_point_spectrum_membership(&fam, s, 5, w(4096)).unwrap().holds(), "s={s}");
        }
        for s in 4..=8u32 {
            let v = check_point_spectrum_membership(&fam, s, 5, w(4096)).unwrap();
            assert_eq!(v.status, VerdictStatus::Fails, "s={s}");
        }
        // Alpha-seq: every membership holds.
        for s in 1..=8u32 {
            assert!(
                check_point_spectrum_membership(&alpha_seq(), s, 5, w(4096)).unwrap().holds(),
                "s={s}"
            );
        }
    }

    #[test]
    fn sn_gap_reports() {
        // S_1 = ∅ on the default grid; S_2 owns s = 2.5.
        let r1 = compute_sn(&sn_gap(), 1, &default_s_grid(), w(4096)).unwrap();
        assert!(r1.all_non_member(), "{:?}", r1.entries);
        assert!(r1.s0_estimate.is_none());

        let r2 = compute_sn(&sn_gap(), 2, &default_s_grid(), w(4096)).unwrap();
        assert_eq!(r2.status_of(2.5), Some(Membership::Member));
        assert!(r2.s0_estimate.is_some());
    }

    #[test]
    fn sn_point_spectrum_bracket() {
        // a_1 = i^{-3}: terms i^{s-3}; s_0(1) = 4, bracketed by [3.9, 4.1].
        let fam = point_spectrum(3);
        let grid = [3.5, 3.6, 3.9, 4.1, 4.5];
        let r = compute_sn(&fam, 1, &grid, w(4096)).unwrap();
        assert_eq!(r.status_of(3.6), Some(Membership::NonMember));
        assert_eq!(r.status_of(3.9), Some(Membership::NonMember));
        assert_eq!(r.status_of(4.1), Some(Membership::Member));
        let s0 = r.s0_estimate.unwrap();
        assert!(s0.lower >= 3.9 && s0.upper <= 4.1, "bracket [{}, {}]", s0.lower, s0.upper);
    }

    #[test]
    fn sn_power_series_empty() {
        let r = compute_sn(&psf(), 1, &default_s_grid(), w(2048)).unwrap();
        assert!(r.all_non_member());
    }

    #[test]
    fn sn_monotone_in_n() {
        // S_n(A) ⊆ S_{n+1}(A): memberships certified at n stay at n+1.
        let fam = point_spectrum(3);
        let grid = [3.0, 4.1, 5.0];
        let r1 = compute_sn(&fam, 1, &grid, w(4096)).unwrap();
        let r2 = compute_sn(&fam, 2, &grid, w(4096)).unwrap();
        for (e1, e2) in r1.entries.iter().zip(&r2.entries) {
            if e1.status == Membership::Member {
                assert_eq!(e2.status, Membership::Member);
            }
        }
    }

    #[test]
    fn s0_lower_clamped_by_g1() {
        // SnGap at n = 2 with a grid whose certified non-members sit below 1.
        let r = compute_sn(&sn_gap(), 2, &[0.5, 2.5, 3.0], w(4096)).unwrap();
        let s0 = r.s0_estimate.unwrap();
        assert!(s0.lower >= 1.0, "s_0(n) >= 1 under (G1-1), got {}", s0.lower);
    }

    #[test]
    fn regularize_power_series_closed_form() {
        // Raw mode: log b_n(i) = -i(H_i - H_{n-1}) for i >= n.
        let reg = regularize(&psf(), w(256), RegularizeMode::Raw).unwrap();
        let b = &reg.family;
        for n in 1..=4u32 {
            for i in [n as usize, n as usize + 3, 40, 256] {
                let h_range: f64 = (n as usize..=i).map(|j| 1.0 / j as f64).sum();
                let expect = -(i as f64) * h_range;
                let got = b.log_weight_f64(n, i).unwrap();
                assert!(
                    (got - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                    "n={n} i={i}: {got} vs {expect}"
                );
            }
            // b_n(i) = 1 below the diagonal.
            if n > 1 {
                assert_eq!(b.log_weight_f64(n, n as usize - 1).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn regularize_output_is_regular_and_equivalent() {
        // Both modes yield a regular matrix dominated by the source rows.
        for mode in [RegularizeMode::Raw, RegularizeMode::Capped] {
            let reg = regularize(&psf(), w(512), mode).unwrap();
            let v = check_regular(&reg.family, 4, w(512)).unwrap();
            assert!(v.holds(), "regularized matrix is regular ({mode:?})");
            assert!(reg.b_dominated_by_a.holds(), "{mode:?}");
        }
        // The reverse domination a_n <= C b_m needs the capped rows with the
        // square-domination chain (the raw product decays factorially and
        // defines a strictly smaller space).
        let reg = regularize(&psf(), w(512), RegularizeMode::Capped).unwrap();
        assert!(reg.a_dominated_by_b.holds());
        assert!(
            reg.level_rows.windows(2).any(|p| p[1] > p[0] + 1),
            "row doubling engaged: {:?}",
            &reg.level_rows[..8.min(reg.level_rows.len())]
        );
    }

    #[test]
    fn regularize_requires_k1() {
        let err = regularize(&nuclear_g1(), w(128), RegularizeMode::Capped);
        assert!(matches!(err, Err(CriteriaError::K1ViolationOnWindow { .. })));
    }

    #[test]
    fn knopp_property_on_regularized_ratios() {
        // b_n/b_m is positive, nonincreasing, with bounded partial sums;
        // i·(b_n/b_m) must trend to zero.
        let reg = regularize(&psf(), w(2048), RegularizeMode::Raw).unwrap();
        let b = &reg.family;
        for n in 1..=2u32 {
            let m = n + 1;
            let (trend, _) = scan_quantity(
                |i| Ok(b.log_weight(n, i)?.sub(&b.log_weight(m, i)?).add_f64((i as f64).ln())),
                w(2048),
                DEFAULT_SAMPLES,
            )
            .unwrap();
            assert!(trend.vanishes(), "n={n}");
        }
    }

    #[test]
    fn theorem_consistency_on_builtins() {
        for fam in crate::weights::default_builtins() {
            let (g1_1, g1_2) = check_g1(&fam, 3, 12, w(2048)).unwrap();
            if !(g1_1.holds() && g1_2.holds()) {
                continue;
            }
            let tv = theorem_verdicts(&fam, 3, 12, 8, w(4096)).unwrap();
            let statuses = [
                tv.invertibility.status,
                tv.membership_half.status,
                tv.exists_s.status,
                tv.all_s.status,
            ];
            assert!(
                statuses.iter().all(|s| *s == VerdictStatus::Holds)
                    || statuses.iter().all(|s| *s == VerdictStatus::Fails),
                "{}: inconsistent theorem verdicts {statuses:?}",
                fam.name()
            );
        }
    }

    #[test]
    fn verdict_determinism() {
        let a = check_invertibility(&alpha_seq(), 2, 8, w(1024)).unwrap();
        let b = check_invertibility(&alpha_seq(), 2, 8, w(1024)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
