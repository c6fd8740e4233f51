//! Finite-evidence trend classification.
//!
//! Every criterion in this crate is an asymptotic statement quantified over
//! infinitely many indices; on a finite window the best we can produce is a
//! classified trend. The classifier works on geometrically sampled values in
//! log domain and assigns one of four classes:
//!
//! - `ToZero`: the last half of the samples is strictly decreasing and the
//!   final value is below `1e-6 ×` the initial value, or a tight power-law
//!   fit shows a sustained negative exponent (slope ≤ -0.05 in log-log).
//! - `Bounded`: the last-half maximum is within `1.05 ×` the last-quarter
//!   maximum and the tail is not growing past that same factor, or a tight
//!   power-law fit is flat (|slope| < 0.05), or the tail is nonincreasing
//!   (the observed sup is then a genuine bound for the window).
//! - `Diverges`: the last half is strictly increasing and the final value
//!   exceeds `1e6 ×` the initial value, or a tight fit shows a sustained
//!   positive exponent (slope ≥ 0.05).
//! - `Unknown`: anything else; consumers map it to `Inconclusive`.
//!
//! The exponential-scale thresholds (1e-6, 1.05, 1e6) catch the families
//! whose criteria decay or grow at exponential rate; the log-log fit is what
//! resolves polynomial-rate quantities such as `i^{s-1}a_n(i)` at desk-scale
//! windows. Fits must be *sustained*: the slope over the last quarter has to
//! retain at least 70% of the last-half slope with the same sign.
//!
//! Partial sums of a positive series need a restricted policy
//! ([`TrendReport::from_partial_sums_log`]): near the summability boundary
//! the log of the partial sums of a *convergent* series still fits a
//! sustained positive power law on any desk-scale window (`Σ i^{-1.1}` looks
//! exactly like `Σ i^{-0.9}` at N = 4096), so for such quantities the fit may
//! certify a plateau but never divergence. Summability questions are instead
//! settled by fitting the terms; see the S-set computation.

use crate::xreal::XReal;
use serde::Serialize;

/// Extrapolated limit class of a sampled nonnegative quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrendClass {
    #[serde(rename = "to-zero")]
    ToZero,
    #[serde(rename = "bounded")]
    Bounded,
    #[serde(rename = "diverges")]
    Diverges,
    #[serde(rename = "oscillating-unknown")]
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMonotonicity {
    Increasing,
    Decreasing,
    Flat,
    Mixed,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrendSample {
    pub i: usize,
    /// Linear-scale value, saturating to 0 / inf outside the f64 range.
    pub value: f64,
    /// Natural log of the value, saturating.
    pub log_value: f64,
}

/// Least-squares fit of `log value` against `log i` over the tail.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub max_residual: f64,
    /// Whether the fit is close enough to be used as classification evidence.
    pub tight: bool,
    /// Whether the last-quarter slope sustains the last-half slope.
    pub sustained: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub samples: Vec<TrendSample>,
    pub tail: TailMonotonicity,
    /// Max of the last half of the samples, linear scale (saturating).
    pub last_half_max: f64,
    pub class: TrendClass,
    pub power_fit: Option<PowerFit>,
}

const TO_ZERO_LOG: f64 = -13.815_510_557_964_274; // ln(1e-6)
const DIVERGE_LOG: f64 = 13.815_510_557_964_274; // ln(1e6)
const BOUNDED_LOG: f64 = 0.048_790_164_169_432; // ln(1.05)
const FIT_SLOPE: f64 = 0.05;
const FIT_RESIDUAL_ABS: f64 = 0.05;
const FIT_RESIDUAL_REL: f64 = 0.03;
const FIT_SUSTAIN: f64 = 0.7;

fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 3 {
        return None;
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((slope, intercept))
}

/// Fit usage during classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitPolicy {
    /// The fit may certify decay, divergence, or a plateau.
    Full,
    /// For monotone partial sums: the fit may only certify a plateau.
    SumGuard,
}

impl TrendReport {
    /// Builds a report from log-domain samples (value = `exp(log)`).
    pub fn from_log_samples(samples: Vec<(usize, XReal)>) -> TrendReport {
        TrendReport::with_policy(samples, FitPolicy::Full)
    }

    /// Builds a report for partial sums of a positive series, given in log
    /// domain.
    pub fn from_partial_sums_log(samples: Vec<(usize, XReal)>) -> TrendReport {
        TrendReport::with_policy(samples, FitPolicy::SumGuard)
    }

    fn with_policy(samples: Vec<(usize, XReal)>, policy: FitPolicy) -> TrendReport {
        let display: Vec<TrendSample> = samples
            .iter()
            .map(|(i, v)| {
                let log_value = v.to_f64();
                TrendSample { i: *i, value: log_value.exp(), log_value }
            })
            .collect();
        let (class, tail, fit, last_half_max) = classify(&samples, policy);
        TrendReport { samples: display, tail, last_half_max, class, power_fit: fit }
    }

    /// Builds a report from linear-scale nonnegative values.
    pub fn from_values(values: Vec<(usize, f64)>) -> TrendReport {
        TrendReport::from_log_samples(
            values
                .into_iter()
                .map(|(i, v)| (i, XReal::from_f64(v.ln())))
                .collect(),
        )
    }

    /// Builds a report from linear-scale partial sums of a positive series.
    pub fn from_partial_sums(values: Vec<(usize, f64)>) -> TrendReport {
        TrendReport::from_partial_sums_log(
            values
                .into_iter()
                .map(|(i, v)| (i, XReal::from_f64(v.ln())))
                .collect(),
        )
    }

    /// The quantity stays bounded above on the evidence seen.
    pub fn bounded_above(&self) -> bool {
        matches!(self.class, TrendClass::ToZero | TrendClass::Bounded)
    }

    pub fn vanishes(&self) -> bool {
        self.class == TrendClass::ToZero
    }

    /// Positive evidence that the quantity does *not* vanish: certified
    /// divergence, or a tight essentially-nonnegative power fit on a tail
    /// that is not decreasing.
    pub fn certifies_nonvanishing(&self) -> bool {
        if self.class == TrendClass::Diverges {
            return true;
        }
        if self.class == TrendClass::Bounded && self.tail != TailMonotonicity::Decreasing {
            if let Some(f) = self.power_fit {
                return f.tight && f.slope > -0.01;
            }
        }
        false
    }

    pub fn first_i(&self) -> usize {
        self.samples.first().map_or(0, |s| s.i)
    }

    pub fn last_i(&self) -> usize {
        self.samples.last().map_or(0, |s| s.i)
    }

    /// Max over *all* samples, as an (i, linear value) pair.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        self.samples
            .iter()
            .max_by(|a, b| a.log_value.partial_cmp(&b.log_value).unwrap_or(std::cmp::Ordering::Equal))
            .map(|s| (s.i, s.value))
    }
}

fn classify(
    samples: &[(usize, XReal)],
    policy: FitPolicy,
) -> (TrendClass, TailMonotonicity, Option<PowerFit>, f64) {
    if samples.is_empty() {
        return (TrendClass::Unknown, TailMonotonicity::Mixed, None, f64::NAN);
    }
    if samples.iter().any(|(_, v)| v.is_nan() || (!v.is_finite() && !v.is_sign_negative())) {
        // NaN or +inf log values: no honest classification.
        return (TrendClass::Unknown, TailMonotonicity::Mixed, None, f64::NAN);
    }
    let vals: Vec<XReal> = samples.iter().map(|(_, v)| *v).collect();
    let neg_inf = |v: &XReal| !v.is_finite() && v.is_sign_negative();

    // The zero quantity.
    if vals.iter().all(neg_inf) {
        return (TrendClass::ToZero, TailMonotonicity::Flat, None, 0.0);
    }

    let half_start = vals.len() / 2;
    let quarter_start = vals.len() * 3 / 4;
    let last_half = &vals[half_start..];
    let tail = tail_monotonicity(last_half);
    let lh_max = last_half
        .iter()
        .cloned()
        .fold(XReal::NEG_INFINITY, |a, b| if b > a { b } else { a });
    let lq_max = vals[quarter_start..]
        .iter()
        .cloned()
        .fold(XReal::NEG_INFINITY, |a, b| if b > a { b } else { a });
    let last_half_max = lh_max.to_f64().exp();

    let v_initial = vals[0];
    let v_final = *vals.last().unwrap();

    if samples.len() < 4 {
        return (TrendClass::Unknown, tail, None, last_half_max);
    }

    // Exponential-scale rules.
    if tail == TailMonotonicity::Decreasing && v_final <= v_initial.add_f64(TO_ZERO_LOG) {
        return (TrendClass::ToZero, tail, None, last_half_max);
    }
    if tail == TailMonotonicity::Increasing && v_final >= v_initial.add_f64(DIVERGE_LOG) {
        return (TrendClass::Diverges, tail, None, last_half_max);
    }
    // Divergence from an interior trough: quantities that first dip and then
    // explode (the dip may sit inside the last half, making the tail Mixed).
    let argmin = vals
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(k, _)| k)
        .unwrap_or(0);
    if argmin + 2 < vals.len()
        && vals[argmin..].windows(2).all(|w| w[1] > w[0])
        && v_final >= vals[argmin].add_f64(DIVERGE_LOG)
    {
        return (TrendClass::Diverges, tail, None, last_half_max);
    }

    // Power-law refinement on the finite tail samples.
    let fit = power_fit(samples, half_start, quarter_start);
    if let Some(f) = fit {
        if f.tight {
            if policy == FitPolicy::Full {
                if f.slope <= -FIT_SLOPE && f.sustained {
                    return (TrendClass::ToZero, tail, fit, last_half_max);
                }
                if f.slope >= FIT_SLOPE && f.sustained {
                    return (TrendClass::Diverges, tail, fit, last_half_max);
                }
            }
            if f.slope.abs() < FIT_SLOPE {
                return (TrendClass::Bounded, tail, fit, last_half_max);
            }
        }
    }

    // Plateau rule: last-half max within 5% of last-quarter max and the tail
    // not growing past the same factor.
    let growing_tail = tail == TailMonotonicity::Increasing
        && v_final > last_half.first().unwrap().add_f64(BOUNDED_LOG);
    if lh_max <= lq_max.add_f64(BOUNDED_LOG) && !growing_tail {
        return (TrendClass::Bounded, tail, fit, last_half_max);
    }

    // A nonincreasing tail is bounded by its observed sup.
    if matches!(tail, TailMonotonicity::Decreasing | TailMonotonicity::Flat) {
        return (TrendClass::Bounded, tail, fit, last_half_max);
    }

    (TrendClass::Unknown, tail, fit, last_half_max)
}

fn tail_monotonicity(last_half: &[XReal]) -> TailMonotonicity {
    if last_half.len() < 2 {
        return TailMonotonicity::Flat;
    }
    let neg_inf = |v: &XReal| !v.is_finite() && v.is_sign_negative();
    let mut inc = true;
    let mut dec = true;
    let mut flat = true;
    for w in last_half.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            inc = false;
        }
        // Exact-zero ties keep a decay verdict alive.
        if !(b < a || (neg_inf(&a) && neg_inf(&b))) {
            dec = false;
        }
        if a != b {
            flat = false;
        }
    }
    if flat {
        TailMonotonicity::Flat
    } else if inc {
        TailMonotonicity::Increasing
    } else if dec {
        TailMonotonicity::Decreasing
    } else {
        TailMonotonicity::Mixed
    }
}

fn power_fit(
    samples: &[(usize, XReal)],
    half_start: usize,
    quarter_start: usize,
) -> Option<PowerFit> {
    let points: Vec<(f64, f64)> = samples[half_start..]
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| ((*i as f64).ln(), v.to_f64()))
        .collect();
    if points.len() < 4 || points.len() < samples.len() - half_start {
        // Non-finite values in the tail: a power law cannot hold.
        return None;
    }
    let span = points.last().unwrap().0 - points.first().unwrap().0;
    if span < 1.2 {
        return None; // less than a factor ~3.3 of index range: no leverage
    }
    let (slope, intercept) = least_squares(&points)?;
    let mut max_residual = 0.0f64;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for (x, y) in &points {
        max_residual = max_residual.max((y - (intercept + slope * x)).abs());
        vmin = vmin.min(*y);
        vmax = vmax.max(*y);
    }
    let tight = max_residual <= FIT_RESIDUAL_ABS + FIT_RESIDUAL_REL * (vmax - vmin);
    let quarter: Vec<(f64, f64)> = samples[quarter_start..]
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| ((*i as f64).ln(), v.to_f64()))
        .collect();
    let sustained = match least_squares(&quarter) {
        Some((qs, _)) => {
            if slope.abs() < FIT_SLOPE {
                true
            } else {
                qs.signum() == slope.signum() && qs.abs() >= FIT_SUSTAIN * slope.abs()
            }
        }
        None => true, // too few points to contradict
    };
    Some(PowerFit { slope, max_residual, tight, sustained })
}
