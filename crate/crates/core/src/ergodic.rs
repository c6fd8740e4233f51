//! Iterates, Cesàro means, the ergodic projection `Px = x₁·𝟙`, and the
//! closed-range verification through the explicit inverse `R` of the shifted
//! operator `T = S(I−C)S⁻¹`.

use crate::criteria::{self, CriteriaError, Verdict, VerdictStatus, Witness};
use crate::kernel::{
    cesaro_apply, cesaro_apply_in, seminorm, Scalar, SequenceVector, TruncationWindow,
};
use crate::trend::TrendReport;
use crate::weights::WeightFamily;
use crate::xreal::XReal;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

/// `C^k x` by repeated application, `O(kN)`.
pub fn power_iterate(x: &SequenceVector, k: usize) -> SequenceVector {
    let mut out = x.clone();
    for _ in 0..k {
        out = cesaro_apply(&out);
    }
    out
}

/// The Cesàro mean `T_[k] x = (1/k) Σ_{j=1}^{k} C^j x`, single pass.
pub fn cesaro_means(x: &SequenceVector, k: usize) -> SequenceVector {
    assert!(k >= 1, "means need k >= 1");
    let n = x.len();
    let mut iterate = x.entries().to_vec();
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for _ in 1..=k {
        iterate = cesaro_apply_in(&iterate);
        for (a, v) in acc.iter_mut().zip(&iterate) {
            *a += v;
        }
    }
    let kc = Complex64::new(k as f64, 0.0);
    SequenceVector::from_entries(acc.into_iter().map(|v| v / kc).collect())
        .expect("means of finite entries are finite")
}

/// The ergodic projection `Px = x₁·𝟙` onto the fixed-point line.
pub fn ergodic_projection(x: &SequenceVector) -> SequenceVector {
    let first = x.get(1);
    SequenceVector::from_entries(vec![first; x.len()]).expect("constant vector")
}

/// Generic means and projection used by the exact-mode checks.
pub fn cesaro_means_in<T: Scalar>(x: &[T], k: usize) -> Vec<T> {
    assert!(k >= 1);
    let mut iterate = x.to_vec();
    let mut acc = vec![T::zero(); x.len()];
    for _ in 1..=k {
        iterate = cesaro_apply_in(&iterate);
        for (a, v) in acc.iter_mut().zip(&iterate) {
            *a = a.clone() + v.clone();
        }
    }
    let kc = T::from_index(k);
    acc.into_iter().map(|v| v / kc.clone()).collect()
}

pub fn ergodic_projection_in<T: Scalar>(x: &[T]) -> Vec<T> {
    vec![x[0].clone(); x.len()]
}

/// One (n, k) measurement from an ergodic run.
#[derive(Clone, Debug, Serialize)]
pub struct ErgodicSample {
    pub n: u32,
    pub k: usize,
    /// `p_n(C_[k] x − Px)`.
    pub mean_distance: f64,
}

/// Record of a mean-ergodic run: distances `p_n(C_[k]x − Px)` along the
/// schedule plus the power-bound checks `p_n(C^k x) ≤ p_n(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct ErgodicRun {
    pub family: String,
    pub n_max: u32,
    pub schedule: Vec<usize>,
    pub samples: Vec<ErgodicSample>,
    /// Verdict trend of `p_1(C_[k]x − Px)` over the schedule.
    pub trend: TrendReport,
    /// Max observed `p_n(C^k x)/p_n(x) − 1` over schedule points (≤ 0 up to
    /// float slack when power boundedness holds).
    pub power_bound_margin: f64,
    pub notes: Vec<String>,
}

pub fn default_k_schedule() -> Vec<usize> {
    vec![1, 3, 10, 31, 100, 316, 1000]
}

/// Runs the mean-ergodic measurement for `x` against the closed-form limit
/// `Px = x₁·𝟙`.
///
/// The vanishing dichotomy should hold for the family (otherwise `𝟙` is not
/// in the space and the run is flagged with a warning).
pub fn run_ergodic(
    family: &WeightFamily,
    x: &SequenceVector,
    n_max: u32,
    k_schedule: &[usize],
    window: TruncationWindow,
) -> Result<ErgodicRun, CriteriaError> {
    assert_eq!(x.len(), window.len(), "vector must live on the window");
    let mut schedule: Vec<usize> = k_schedule.to_vec();
    schedule.sort_unstable();
    schedule.dedup();
    assert!(!schedule.is_empty() && schedule[0] >= 1, "schedule must start at k >= 1");

    let mut notes = Vec::new();
    let vanishing = criteria::check_vanishing_and_normability(family, n_max, window)?;
    if vanishing.status != VerdictStatus::Holds {
        notes.push(
            "warning: vanishing condition not certified; the constant vector may fall outside \
             the space"
                .to_owned(),
        );
    }

    let projection = ergodic_projection(x);
    let x_norms: Vec<f64> =
        (1..=n_max).map(|n| seminorm(family, n, x)).collect::<Result<_, _>>()?;

    let mut samples = Vec::new();
    let mut power_bound_margin = f64::NEG_INFINITY;
    let mut trend_values = Vec::new();

    // Single pass to the largest k, recording at schedule points.
    let k_max = *schedule.last().unwrap();
    let mut iterate = x.entries().to_vec();
    let mut acc = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut next_idx = 0usize;
    for k in 1..=k_max {
        iterate = cesaro_apply_in(&iterate);
        for (a, v) in acc.iter_mut().zip(&iterate) {
            *a += v;
        }
        if next_idx < schedule.len() && schedule[next_idx] == k {
            next_idx += 1;
            let mean = SequenceVector::from_entries(
                acc.iter().map(|v| v / k as f64).collect(),
            )
            .expect("finite");
            let diff = mean.sub(&projection);
            let iter_vec = SequenceVector::from_entries(iterate.clone()).expect("finite");
            for n in 1..=n_max {
                let d = seminorm(family, n, &diff)?;
                samples.push(ErgodicSample { n, k, mean_distance: d });
                if n == 1 {
                    trend_values.push((k, d));
                }
                let p_iter = seminorm(family, n, &iter_vec)?;
                let base = x_norms[(n - 1) as usize];
                if base > 0.0 {
                    power_bound_margin = power_bound_margin.max(p_iter / base - 1.0);
                }
            }
        }
    }

    let trend = TrendReport::from_values(trend_values);
    Ok(ErgodicRun {
        family: family.name().to_owned(),
        n_max,
        schedule,
        samples,
        trend,
        power_bound_margin,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Closed range: T = S(I−C)S⁻¹ and its inverse R

/// Exact entry of the matrix `R = T^{-1}`: `1/j` below the diagonal,
/// `(i+1)/i` on it, zero above.
pub fn r_matrix_entry(i: usize, j: usize) -> BigRational {
    assert!(i >= 1 && j >= 1);
    if j > i {
        BigRational::from_integer(BigInt::from(0))
    } else if i == j {
        BigRational::new(BigInt::from(i as i64 + 1), BigInt::from(i as i64))
    } else {
        BigRational::new(BigInt::from(1), BigInt::from(j as i64))
    }
}

/// Exact entry of `T = S(I−C)S⁻¹`: `i/(i+1)` on the diagonal,
/// `-1/(i+1)` below, zero above.
pub fn t_matrix_entry(i: usize, j: usize) -> BigRational {
    assert!(i >= 1 && j >= 1);
    if j > i {
        BigRational::from_integer(BigInt::from(0))
    } else if i == j {
        BigRational::new(BigInt::from(i as i64), BigInt::from(i as i64 + 1))
    } else {
        BigRational::new(BigInt::from(-1), BigInt::from(i as i64 + 1))
    }
}

/// Exact check `T·R = I` and `R·T = I` on the window.
pub fn verify_tr_identity(n: usize) -> bool {
    let zero = BigRational::from_integer(BigInt::from(0));
    let one = BigRational::from_integer(BigInt::from(1));
    for i in 1..=n {
        for j in 1..=n {
            let mut tr = zero.clone();
            let mut rt = zero.clone();
            for k in 1..=n {
                tr += t_matrix_entry(i, k) * r_matrix_entry(k, j);
                rt += r_matrix_entry(i, k) * t_matrix_entry(k, j);
            }
            let expect = if i == j { one.clone() } else { zero.clone() };
            if tr != expect || rt != expect {
                return false;
            }
        }
    }
    true
}

/// Closed-range verification: `T·R = R·T = I` exactly on a small window,
/// plus the two conditions on the scaled matrix
/// `D_mn = (a_n(i+1)/a_m(j+1))·r_ij` — column decay and the row-sum bound
/// `Σ_j ≤ (i+1)·a_n(i+1)/a_m(i+1)` trending to zero.
pub fn verify_closed_range(
    family: &WeightFamily,
    n: u32,
    m: u32,
    window: TruncationWindow,
) -> Result<Verdict, CriteriaError> {
    assert!(m > n, "closed-range scaling needs m > n");
    let mut notes = Vec::new();
    let exact_n = window.len().min(30);
    let exact_ok = verify_tr_identity(exact_n);
    notes.push(format!("T·R = R·T = I exactly at N={exact_n}: {exact_ok}"));

    // Column decay at j = 1: (a_n(i+1)/a_m(2))·r_{i,1} → 0.
    let inner = TruncationWindow::new((window.len() - 1).max(2)).expect("N >= 2");
    let (col_trend, _) = criteria::scan_quantity(
        |i| {
            let num = family.log_weight(n, i + 1)?;
            let den = family.log_weight(m, 2)?;
            // r_{i,1} = 1 for i > 1.
            Ok(num.sub(&den))
        },
        inner,
        criteria::DEFAULT_SAMPLES,
    )?;
    notes.push(format!("column j=1 decay: {:?}", col_trend.class));

    // Row sums Σ_j (a_n(i+1)/a_m(j+1)) r_ij, log-sum-exp over j, compared
    // against the closed bound (i+1)·a_n(i+1)/a_m(i+1).
    let mut row_samples = Vec::new();
    let mut bound_samples = Vec::new();
    for i in inner.geometric_samples(criteria::DEFAULT_SAMPLES) {
        let la_n = family.log_weight(n, i + 1)?;
        let mut lse = XReal::NEG_INFINITY;
        for j in 1..=i {
            let r_ij = if j == i { (i as f64 + 1.0) / i as f64 } else { 1.0 / j as f64 };
            let term = la_n.sub(&family.log_weight(m, j + 1)?).add_f64(r_ij.ln());
            lse = crate::xreal::logaddexp(&lse, &term);
        }
        row_samples.push((i, lse));
        let bound = la_n.sub(&family.log_weight(m, i + 1)?).add_f64((i as f64 + 1.0).ln());
        bound_samples.push((i, bound));
    }
    let row_trend = TrendReport::from_log_samples(row_samples);
    let bound_trend = TrendReport::from_log_samples(bound_samples);
    notes.push(format!(
        "row sums: {:?}; closed bound (i+1)a_n(i+1)/a_m(i+1): {:?}",
        row_trend.class, bound_trend.class
    ));

    let conditions_ok =
        col_trend.vanishes() && row_trend.bounded_above() && bound_trend.bounded_above();
    let status = if exact_ok && conditions_ok {
        VerdictStatus::Holds
    } else if !exact_ok {
        VerdictStatus::Fails
    } else {
        VerdictStatus::Inconclusive
    };
    Ok(Verdict {
        status,
        witness: (status == VerdictStatus::Holds).then(|| Witness {
            m,
            bound: row_trend.last_half_max * crate::criteria::WITNESS_SAFETY,
            checked_i_range: (1, inner.len()),
        }),
        counterexample: None,
        trend: row_trend,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{AlphaSeq, BuiltinFamily};

    fn w(n: usize) -> TruncationWindow {
        TruncationWindow::new(n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn psf() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::PowerSeriesFinite { alpha: AlphaSeq::Identity }).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn power_iterate_examples() {
        let e1 = SequenceVector::basis(w(3), 1).unwrap();
        assert_eq!(power_iterate(&e1, 0), e1);
        let ones = SequenceVector::ones(w(5));
        assert_eq!(power_iterate(&ones, 7), ones);
        // Exact rational check of C² e₁ = (1, 3/4, 11/18).
        let x = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        let once = cesaro_apply_in(&x);
        let twice = cesaro_apply_in(&once);
        assert_eq!(twice, vec![rat(1, 1), rat(3, 4), rat(11, 18)]);
        // Float path agrees.
        let it = power_iterate(&e1, 2);
        assert!((it.get(2) - c(0.75)).norm() < 1e-15);
        assert!((it.get(3) - c(11.0 / 18.0)).norm() < 1e-15);
    }

    #[test]
    fn cesaro_means_examples() {
        let e1 = SequenceVector::basis(w(2), 1).unwrap();
        let m1 = cesaro_means(&e1, 1);
        assert_eq!(m1, cesaro_apply(&e1));
        let m2 = cesaro_means(&e1, 2);
        assert!((m2.get(1) - c(1.0)).norm() < 1e-15);
        assert!((m2.get(2) - c(5.0 / 8.0)).norm() < 1e-15);
        // 𝟙 is fixed for every k.
        let ones = SequenceVector::ones(w(8));
        assert_eq!(cesaro_means(&ones, 5), ones);
    }

    #[test]
    fn projection_and_decomposition() {
        let x = SequenceVector::from_real(&[2.0, 5.0, -1.0]).unwrap();
        let p = ergodic_projection(&x);
        assert_eq!(p.entries(), &[c(2.0), c(2.0), c(2.0)]);
        let residual = x.sub(&p);
        assert_eq!(residual.get(1), c(0.0));
        assert_eq!(residual.entries(), &[c(0.0), c(3.0), c(-3.0)]);

        // P∘P = P and P∘C = P, exactly in rationals.
        let xr = vec![rat(2, 1), rat(5, 1), rat(-1, 1)];
        let p1 = ergodic_projection_in(&xr);
        assert_eq!(ergodic_projection_in(&p1), p1);
        let cx = cesaro_apply_in(&xr);
        assert_eq!(ergodic_projection_in(&cx), p1, "first coordinate is C-invariant");

        let e1 = SequenceVector::basis(w(4), 1).unwrap();
        assert_eq!(ergodic_projection(&e1), SequenceVector::ones(w(4)));
        let e2 = SequenceVector::basis(w(4), 2).unwrap();
        assert_eq!(ergodic_projection(&e2), SequenceVector::zero(w(4)));
    }

    #[test]
    fn ergodic_run_converges_on_e1() {
        let fam = psf();
        let window = w(400);
        let e1 = SequenceVector::basis(window, 1).unwrap();
        let run = run_ergodic(&fam, &e1, 1, &[1, 10, 100, 1000], window).unwrap();
        let values: Vec<f64> = run
            .samples
            .iter()
            .filter(|s| s.n == 1)
            .map(|s| s.mean_distance)
            .collect();
        assert_eq!(values.len(), 4);
        assert!(values.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12)), "nonincreasing {values:?}");
        assert!(values[3] / values[0] <= 0.1, "decade drop: {values:?}");
        assert!(run.power_bound_margin <= 1e-14, "power bound: {}", run.power_bound_margin);
    }

    #[test]
    fn ergodic_run_fixed_point_is_exact_zero() {
        let fam = psf();
        let window = w(100);
        let ones = SequenceVector::ones(window);
        let run = run_ergodic(&fam, &ones, 2, &default_k_schedule(), window).unwrap();
        assert!(run.samples.iter().all(|s| s.mean_distance == 0.0), "identically zero");
    }

    #[test]
    fn r_matrix_values() {
        assert_eq!(r_matrix_entry(1, 1), rat(2, 1));
        assert_eq!(r_matrix_entry(2, 1), rat(1, 1));
        assert_eq!(r_matrix_entry(2, 2), rat(3, 2));
        assert_eq!(r_matrix_entry(1, 2), rat(0, 1));
    }

    #[test]
    fn tr_identity_exact() {
        assert!(verify_tr_identity(6));
        assert!(verify_tr_identity(30));
    }

    #[test]
    fn closed_range_power_series() {
        let v = verify_closed_range(&psf(), 1, 2, w(512)).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds, "{:?}", v.notes);
        // The closed bound (i+1)e^{-(i+1)/2} decays to zero.
        assert!(v.notes.iter().any(|s| s.contains("ToZero")), "{:?}", v.notes);
    }
}
