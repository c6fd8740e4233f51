//! Resolvent and spectrum machinery: explicit resolvent rows, the `D - E/λ²`
//! split, scaled row-sum continuity evidence, dual eigenvectors, spectral
//! disks, and region assembly.
//!
//! The candidate point spectrum is `Σ = {1/k}`; `Σ₀ = Σ ∪ {0}`. All closed
//! forms require `λ` to keep a distance of at least [`EPSILON_SIGMA`] from
//! `Σ₀`. Products `Π (1 - 1/(kλ))` accumulate in [`LogComplex`] so that
//! entries survive far past the `f64` underflow threshold.

use crate::criteria::{SnReport, Verdict};
use crate::kernel::{cesaro_dual_in, KernelError, Scalar};
use crate::kernel::{LogComplex, SequenceVector, TriangularKernel, TruncationWindow};
use crate::trend::TrendReport;
use crate::weights::{WeightError, WeightFamily};
use crate::xreal::{logaddexp, XReal};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Minimum tolerated distance from `λ` to `Σ₀`.
pub const EPSILON_SIGMA: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("λ = {lambda} is within {distance:.3e} of Σ₀ (nearest: {nearest}); need ≥ {epsilon:.1e}")]
    LambdaOnSigma {
        lambda: Complex64,
        distance: f64,
        nearest: String,
        epsilon: f64,
    },
    #[error("disk radius parameter must satisfy r >= 1, got {0}")]
    InvalidDiskParameter(f64),
    #[error("a resolvent product factor vanished at k={k}; λ must be off Σ₀")]
    VanishingFactor { k: usize },
    #[error("inconsistent spectral evidence: {0}")]
    InconsistentEvidence(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Distance from `λ` to `Σ₀ = {0} ∪ {1/k}`, with the nearest element named.
pub fn sigma0_distance(lambda: Complex64) -> (f64, String) {
    let mut best = lambda.norm();
    let mut nearest = "0".to_owned();
    let mut consider = |k: u64| {
        let d = (lambda - Complex64::new(1.0 / k as f64, 0.0)).norm();
        if d < best {
            best = d;
            nearest = format!("1/{k}");
        }
    };
    consider(1);
    consider(2);
    if lambda.re > 0.0 {
        let k_star = 1.0 / lambda.re;
        if k_star.is_finite() && k_star > 0.0 {
            let base = k_star.floor() as i64;
            for k in (base - 2)..=(base + 2) {
                if k >= 1 {
                    consider(k as u64);
                }
            }
        }
    }
    (best, nearest)
}

/// Validated resolvent parameters: `λ ∉ Σ₀` within tolerance, with
/// `α = Re(1/λ)` precomputed.
#[derive(Clone, Copy, Debug)]
pub struct ResolventParams {
    lambda: Complex64,
    alpha: f64,
    sigma_distance: f64,
}

impl ResolventParams {
    pub fn new(lambda: Complex64) -> Result<ResolventParams, SpectralError> {
        let (distance, nearest) = sigma0_distance(lambda);
        if distance < EPSILON_SIGMA {
            return Err(SpectralError::LambdaOnSigma {
                lambda,
                distance,
                nearest,
                epsilon: EPSILON_SIGMA,
            });
        }
        let alpha = lambda.re / lambda.norm_sqr();
        Ok(ResolventParams { lambda, alpha, sigma_distance: distance })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `Re(1/λ)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma_distance(&self) -> f64 {
        self.sigma_distance
    }
}

fn product_factor(k: usize, lambda: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) - Complex64::new(1.0, 0.0) / (lambda * k as f64)
}

/// Entry `(i, j)` of `(C - λI)^{-1}`:
/// `-1/(i λ² Π_{k=j}^{i} (1 - 1/(kλ)))` below the diagonal,
/// `1/(1/i - λ)` on it, zero above.
pub fn resolvent_entry(
    i: usize,
    j: usize,
    params: &ResolventParams,
) -> Result<Complex64, SpectralError> {
    if j > i {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lambda = params.lambda;
    if i == j {
        return Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0 / i as f64, 0.0) - lambda));
    }
    let mut product = LogComplex::one();
    for k in j..=i {
        let f = product_factor(k, lambda);
        if f.norm() == 0.0 {
            return Err(SpectralError::VanishingFactor { k });
        }
        product = product.mul(&LogComplex::from_complex(f));
    }
    let numerator = LogComplex::from_complex(-Complex64::new(1.0, 0.0))
        .mul(&LogComplex::from_complex(lambda * lambda).recip())
        .mul(&LogComplex::from_complex(Complex64::new(i as f64, 0.0)).recip());
    Ok(numerator.mul(&product.recip()).to_complex()?)
}

/// The resolvent as a lazily evaluated kernel.
pub fn resolvent_kernel(params: ResolventParams) -> TriangularKernel {
    TriangularKernel::new("resolvent", move |i, j| {
        resolvent_entry(i, j, &params)
            .map_err(|e| KernelError::Entry { i, j, message: e.to_string() })
    })
}

/// The split `(C - λI)^{-1} = D_λ - (1/λ²) E_λ`: `D_λ` diagonal with
/// `1/(1/i - λ)`, `E_λ` strictly lower with `1/(i Π_{k=j}^{i}(1 - 1/(kλ)))`
/// supported on all of `1 ≤ j < i`.
pub fn split_de(params: ResolventParams) -> (TriangularKernel, TriangularKernel) {
    let d = TriangularKernel::new("D_lambda", move |i, j| {
        Ok(if i == j {
            Complex64::new(1.0, 0.0) / (Complex64::new(1.0 / i as f64, 0.0) - params.lambda)
        } else {
            Complex64::new(0.0, 0.0)
        })
    });
    let e = TriangularKernel::new("E_lambda", move |i, j| {
        if j >= i {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut product = LogComplex::one();
        for k in j..=i {
            let f = product_factor(k, params.lambda);
            if f.norm() == 0.0 {
                return Err(KernelError::Entry { i, j, message: format!("vanishing factor at k={k}") });
            }
            product = product.mul(&LogComplex::from_complex(f));
        }
        LogComplex::from_complex(Complex64::new(i as f64, 0.0))
            .mul(&product)
            .recip()
            .to_complex()
            .map_err(|e| KernelError::Entry { i, j, message: e.to_string() })
    });
    (d, e)
}

/// Solves `(C - λI)x = y` on the window by forward substitution, `O(N)`.
pub fn resolvent_apply(
    y: &SequenceVector,
    params: &ResolventParams,
) -> Result<SequenceVector, SpectralError> {
    let n = y.len();
    let lambda = params.lambda;
    let mut x = Vec::with_capacity(n);
    let mut prefix = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        let diag = Complex64::new(1.0 / i as f64, 0.0) - lambda;
        if diag.norm() < 1e-13 {
            return Err(SpectralError::VanishingFactor { k: i });
        }
        let xi = (y.get(i) - prefix / i as f64) / diag;
        prefix += xi;
        x.push(xi);
    }
    Ok(SequenceVector::from_entries(x)?)
}

/// Forward solve plus an independent evaluation through the explicit
/// resolvent rows; returns the solution and the max entrywise deviation.
pub fn resolvent_apply_verified(
    y: &SequenceVector,
    params: &ResolventParams,
) -> Result<(SequenceVector, f64), SpectralError> {
    let solved = resolvent_apply(y, params)?;
    let n = y.len();
    let mut max_dev = 0.0f64;
    let mut scale = 0.0f64;
    for i in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=i {
            acc += resolvent_entry(i, j, params)? * y.get(j);
        }
        max_dev = max_dev.max((acc - solved.get(i)).norm());
        scale = scale.max(solved.get(i).norm());
    }
    Ok((solved, max_dev / scale.max(1e-300)))
}

// ---------------------------------------------------------------------------
// Scaled E-matrix evidence

/// Row-sum evidence for the scaled matrix `Ẽ^{nm}` with entries
/// `(a_n(i)/a_m(j))·e_ij`, plus the two-case majorant used as a diagnostic
/// comparison and the observed range of the product-vs-power ratio.
#[derive(Clone, Debug, Serialize)]
pub struct ScaledRowSums {
    pub alpha: f64,
    pub row_sums: TrendReport,
    /// The majorant: `max(1, 1/(1-α))` for α < 1, `i^α a_n(i)/a_m(i)` for
    /// α ≥ 1.
    pub bound: TrendReport,
    pub bound_case: String,
    /// Observed min/max of `|Π_{k=j}^{i}(1-1/(kλ))| · (i/j)^α`.
    pub product_power_ratio: (f64, f64),
}

/// Prefix sums of `ln |1 - 1/(kλ)|`, 1-based; index 0 holds 0.
fn log_product_prefix(n: usize, lambda: Complex64) -> Result<Vec<f64>, SpectralError> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        let f = product_factor(k, lambda);
        if f.norm() == 0.0 {
            return Err(SpectralError::VanishingFactor { k });
        }
        acc += f.norm().ln();
        out.push(acc);
    }
    Ok(out)
}

/// Computes row sums `Σ_j |ẽ_ij|` of the scaled E-matrix in log-sum-exp form
/// over geometrically sampled rows.
pub fn scaled_e_row_sums(
    family: &WeightFamily,
    n: u32,
    m: u32,
    params: &ResolventParams,
    window: TruncationWindow,
) -> Result<ScaledRowSums, SpectralError> {
    let len = window.len();
    let prefix = log_product_prefix(len, params.lambda)?;
    let alpha = params.alpha;
    let rows = window.geometric_samples(crate::criteria::DEFAULT_SAMPLES);
    let mut sums = Vec::with_capacity(rows.len());
    let mut bound = Vec::with_capacity(rows.len());
    for &i in &rows {
        if i < 2 {
            sums.push((i, XReal::NEG_INFINITY));
            bound.push((i, bound_majorant(family, n, m, alpha, i)?));
            continue;
        }
        let la_n_i = family.log_weight(n, i)?;
        let mut lse = XReal::NEG_INFINITY;
        for j in 1..i {
            // log |e_ij| = -ln i - Σ_{k=j}^{i} ln|1-1/(kλ)|
            let log_e = -(i as f64).ln() - (prefix[i] - prefix[j - 1]);
            let term = la_n_i.sub(&family.log_weight(m, j)?).add_f64(log_e);
            lse = logaddexp(&lse, &term);
        }
        sums.push((i, lse));
        bound.push((i, bound_majorant(family, n, m, alpha, i)?));
    }

    // Product-vs-power ratio sanity over a sparse (i, j) subgrid.
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for &i in rows.iter().filter(|&&i| i >= 2) {
        for &j in rows.iter().filter(|&&j| j < i) {
            let log_ratio = (prefix[i] - prefix[j - 1]) + alpha * ((i as f64) / (j as f64)).ln();
            ratio_min = ratio_min.min(log_ratio.exp());
            ratio_max = ratio_max.max(log_ratio.exp());
        }
    }

    let bound_case = if alpha < 1.0 {
        format!("alpha={alpha:.3} < 1: constant majorant max(1, 1/(1-alpha))")
    } else {
        format!("alpha={alpha:.3} >= 1: majorant i^alpha a_n(i)/a_m(i)")
    };
    Ok(ScaledRowSums {
        alpha,
        row_sums: TrendReport::from_log_samples(sums),
        bound: TrendReport::from_log_samples(bound),
        bound_case,
        product_power_ratio: (ratio_min, ratio_max),
    })
}

fn bound_majorant(
    family: &WeightFamily,
    n: u32,
    m: u32,
    alpha: f64,
    i: usize,
) -> Result<XReal, WeightError> {
    if alpha < 1.0 {
        Ok(XReal::from_f64(1.0f64.max(1.0 / (1.0 - alpha)).ln()))
    } else {
        let a = family.log_weight(n, i)?;
        let b = family.log_weight(m, i)?;
        Ok(a.sub(&b).add_f64(alpha * (i as f64).ln()))
    }
}

/// Column decay evidence: `|ẽ_ij| → 0` over `i` for a fixed column `j`.
pub fn scaled_e_column_trend(
    family: &WeightFamily,
    n: u32,
    m: u32,
    params: &ResolventParams,
    j: usize,
    window: TruncationWindow,
) -> Result<TrendReport, SpectralError> {
    let len = window.len();
    let prefix = log_product_prefix(len, params.lambda)?;
    let la_m_j = family.log_weight(m, j)?;
    let mut samples = Vec::new();
    for i in window.geometric_samples(crate::criteria::DEFAULT_SAMPLES) {
        if i <= j {
            continue;
        }
        let log_e = -(i as f64).ln() - (prefix[i] - prefix[j - 1]);
        samples.push((i, family.log_weight(n, i)?.sub(&la_m_j).add_f64(log_e)));
    }
    Ok(TrendReport::from_log_samples(samples))
}

// ---------------------------------------------------------------------------
// Dual eigenvectors

/// Generic eigenvector recurrence `y_{i+1} = (1 - 1/(λ i)) y_i` for the dual
/// operator, in any scalar. A vanishing factor forces exact zeros onward.
pub fn dual_eigenvector_in<T: Scalar>(lambda: &T, n: usize, y1: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut current = y1;
    for i in 1..=n {
        out.push(current.clone());
        if i < n {
            let factor = T::one() - T::one() / (lambda.clone() * T::from_index(i));
            current = if factor.is_zero() || current.is_zero() {
                T::zero()
            } else {
                factor * current
            };
        }
    }
    out
}

/// Float-mode dual eigenvector for any `λ ≠ 0`. For `λ = 1/s` with integer
/// `s ≤ N` the factor at `i = s` is exactly zero in IEEE arithmetic, so the
/// support cuts off exactly rather than by underflow.
pub fn dual_eigenvector(
    lambda: Complex64,
    window: TruncationWindow,
    y1: Complex64,
) -> SequenceVector {
    assert!(lambda.norm() > 0.0, "λ must be nonzero");
    let entries = dual_eigenvector_in(&lambda, window.len(), y1);
    SequenceVector::from_entries(entries).expect("finite recurrence values")
}

/// Partial sums of `Σ |y_i| / a_n(i)`: membership evidence for the dual
/// space `ℓ₁(1/a_n)`.
pub fn dual_norm_trend(
    family: &WeightFamily,
    n: u32,
    y: &SequenceVector,
) -> Result<TrendReport, SpectralError> {
    let window = y.window();
    let sample_at = window.geometric_samples(crate::criteria::DEFAULT_SAMPLES);
    let mut lse = XReal::NEG_INFINITY;
    let mut samples = Vec::new();
    let mut next = 0usize;
    for i in 1..=y.len() {
        let modulus = y.get(i).norm();
        if modulus > 0.0 {
            let term = family.log_weight(n, i)?.neg().add_f64(modulus.ln());
            lse = logaddexp(&lse, &term);
        }
        if next < sample_at.len() && sample_at[next] == i {
            samples.push((i, lse));
            next += 1;
        }
    }
    Ok(TrendReport::from_partial_sums_log(samples))
}

/// Truncation residual of the dual eigen-identity `C'y = λy` on the window:
/// the missing tail `Σ_{j>N} y_j/j`, with a bound from `|y_j| ≍ j^{-α}`.
#[derive(Clone, Debug, Serialize)]
pub struct DualEigenResidual {
    pub max_residual: f64,
    pub tail_bound: f64,
    pub alpha: f64,
    pub checked_up_to: usize,
}

/// Computes the residual report (reported, not asserted).
pub fn dual_eigen_residual(
    lambda: Complex64,
    window: TruncationWindow,
) -> Result<DualEigenResidual, SpectralError> {
    let params = ResolventParams::new(lambda)?;
    let y = dual_eigenvector(lambda, window, Complex64::new(1.0, 0.0));
    let n = y.len();
    let dual = cesaro_dual_in(y.entries());
    let mut max_residual = 0.0f64;
    let half = (n / 2).max(1);
    for i in 1..=half {
        let residual = (lambda * y.get(i) - dual[i - 1]).norm();
        max_residual = max_residual.max(residual);
    }
    let alpha = params.alpha();
    let y_n = y.get(n).norm();
    // Σ_{j>N} |y_j|/j ≈ |y_N| N^α Σ_{j>N} j^{-α-1} ≈ |y_N| / α.
    let tail_bound = if alpha > 0.0 { y_n / alpha } else { f64::INFINITY };
    Ok(DualEigenResidual { max_residual, tail_bound, alpha, checked_up_to: half })
}

// ---------------------------------------------------------------------------
// Disks and spectrum region

/// The open disk `D(r)` centered at `1/(2r)` with radius `1/(2r)`; members
/// satisfy `Re(1/λ) > r`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Disk {
    pub r: f64,
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(r: f64) -> Result<Disk, SpectralError> {
        if !(r >= 1.0) {
            return Err(SpectralError::InvalidDiskParameter(r));
        }
        Ok(Disk { r, center: 1.0 / (2.0 * r), radius: 1.0 / (2.0 * r) })
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        (lambda - Complex64::new(self.center, 0.0)).norm() < self.radius
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskCheck {
    pub inside: bool,
    pub re_inv_lambda: f64,
    /// When inside, `Re(1/λ) > r` must follow; recorded as a diagnostic.
    pub implication_ok: bool,
}

/// Membership of `λ` in `D(r)` with the `Re(1/λ) > r` diagnostic.
pub fn disk_membership(lambda: Complex64, r: f64) -> Result<DiskCheck, SpectralError> {
    let disk = Disk::new(r)?;
    let inside = disk.contains(lambda);
    let re_inv = if lambda.norm_sqr() > 0.0 { lambda.re / lambda.norm_sqr() } else { f64::NAN };
    Ok(DiskCheck { inside, re_inv_lambda: re_inv, implication_ok: !inside || re_inv > r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumClass {
    /// Nuclear: the spectrum equals `Σ` and 0 is excluded.
    Nuclear,
    /// Some `S_n` nonempty: `D(1) ∪ {1}` is contained in the spectrum.
    NonNuclearWithSn,
    Unknown,
}

/// The assembled spectral picture. Disks are *containment evidence*
/// (`⊆ σ`), never the full spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRegion {
    pub family: String,
    /// `1/k` for `k ≤ k_max` (display slice of the infinite Σ).
    pub sigma_points: Vec<f64>,
    pub zero_included: bool,
    pub disks: Vec<Disk>,
    pub classification: SpectrumClass,
    pub provenance: Vec<String>,
}

/// Verdict inputs for spectrum assembly, produced by the criteria engine on
/// the same family.
#[derive(Debug)]
pub struct SpectrumEvidence {
    pub nuclearity: Verdict,
    pub sn_reports: Vec<SnReport>,
    /// (G1-1, G1-2) when available: D-disk containment is proven for
    /// G1 spaces.
    pub g1: Option<(Verdict, Verdict)>,
}

/// Assembles the spectral region from verdicts.
///
/// Nuclear evidence forces `σ = Σ` with 0 excluded. A certified nonempty
/// `S_n` forces the non-nuclear picture `D(1) ∪ {1} ⊆ σ` with disks
/// `D(s_0(n))` as containment evidence. Contradictory evidence (both at
/// once) is an error: a nonempty `S_n` forbids nuclearity.
pub fn assemble_spectrum(
    family: &WeightFamily,
    evidence: &SpectrumEvidence,
    k_max: u32,
) -> Result<SpectrumRegion, SpectralError> {
    let sigma_points: Vec<f64> = (1..=k_max.max(1)).map(|k| 1.0 / k as f64).collect();
    let any_sn = evidence.sn_reports.iter().any(|r| r.has_member());
    let mut provenance = Vec::new();
    if evidence.nuclearity.holds() {
        if any_sn {
            return Err(SpectralError::InconsistentEvidence(
                "nuclearity holds yet some S_n is certified nonempty; a nonempty S_n forbids \
                 nuclearity"
                    .into(),
            ));
        }
        provenance.push("nuclear: spectrum equals Σ, zero excluded".into());
        return Ok(SpectrumRegion {
            family: family.name().to_owned(),
            sigma_points,
            zero_included: false,
            disks: Vec::new(),
            classification: SpectrumClass::Nuclear,
            provenance,
        });
    }
    if any_sn {
        let mut disks = vec![Disk::new(1.0)?];
        for r in &evidence.sn_reports {
            if let Some(s0) = &r.s0_estimate {
                if s0.estimate >= 1.0 {
                    provenance.push(format!(
                        "n={}: s_0 ≈ {:.3} in [{:.3}, {:.3}] → D(s_0) evidence",
                        r.n, s0.estimate, s0.lower, s0.upper
                    ));
                    disks.push(Disk::new(s0.estimate)?);
                }
            }
        }
        provenance
            .push("D(1) ∪ {1} ⊆ σ: disks are containment evidence, not the full spectrum".into());
        match &evidence.g1 {
            Some((g1_1, g1_2)) if g1_1.holds() && g1_2.holds() => {
                provenance.push("G1 evidence holds: disk containment applies".into());
            }
            _ => {
                provenance.push(
                    "G1 not certified on this family: disk containment is conjectural here".into(),
                );
            }
        }
        return Ok(SpectrumRegion {
            family: family.name().to_owned(),
            sigma_points,
            zero_included: true,
            disks,
            classification: SpectrumClass::NonNuclearWithSn,
            provenance,
        });
    }
    provenance.push(format!(
        "nuclearity {:?} and no certified S_n member: classification unresolved",
        evidence.nuclearity.status
    ));
    Ok(SpectrumRegion {
        family: family.name().to_owned(),
        sigma_points,
        zero_included: false,
        disks: Vec::new(),
        classification: SpectrumClass::Unknown,
        provenance,
    })
}
