//! Extended-range reals: `mantissa × 2^exp2` with an `f64` mantissa and an
//! `i64` binary exponent.
//!
//! Log-domain weights such as `-n·e^{i/n}` leave the `f64` exponent range
//! around `i ≈ 700·n` even though all downstream arithmetic on them (sums,
//! differences, comparisons, log-sum-exp) is perfectly well conditioned.
//! [`XReal`] keeps double precision (53-bit significand) while extending the
//! exponent to `i64`, which is enough for every weight family at any
//! practical window.
//!
//! Infinities propagate like `f64` infinities; `XReal::NEG_INFINITY` doubles
//! as the additive identity of log-sum-exp (the logarithm of zero).

use std::cmp::Ordering;

/// Double-precision real with an extended binary exponent.
///
/// Invariant: either `m == 0.0 && e == 0`, or `0.5 <= |m| < 1.0`, or `m` is
/// non-finite (`e == 0`).
#[derive(Clone, Copy, Debug)]
pub struct XReal {
    m: f64,
    e: i64,
}

/// Splits a finite nonzero `f64` into `(m, e)` with `0.5 <= |m| < 1`.
fn frexp(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x != 0.0);
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    if exp_bits == 0 {
        // Subnormal: renormalize by 2^64 first.
        let scaled = x * f64::from_bits(0x43f0_0000_0000_0000); // 2^64
        let (m, e) = frexp(scaled);
        (m, e - 64)
    } else {
        let e = exp_bits - 1022;
        let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
        (m, e)
    }
}

/// `2^e` as `f64`, saturating to `0` / `inf` outside the representable range.
fn pow2(e: i64) -> f64 {
    if e < -1074 {
        0.0
    } else if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        // Subnormal range.
        f64::from_bits(1u64 << (e + 1074) as u32)
    }
}

impl XReal {
    pub const ZERO: XReal = XReal { m: 0.0, e: 0 };
    pub const INFINITY: XReal = XReal { m: f64::INFINITY, e: 0 };
    pub const NEG_INFINITY: XReal = XReal { m: f64::NEG_INFINITY, e: 0 };

    pub fn from_f64(x: f64) -> XReal {
        if x == 0.0 {
            XReal::ZERO
        } else if !x.is_finite() {
            XReal { m: x, e: 0 }
        } else {
            let (m, e) = frexp(x);
            XReal { m, e }
        }
    }

    /// `e^x` for an `f64` exponent of any magnitude.
    ///
    /// Cody–Waite reduction `x = k·ln2 + r` keeps the result within a few
    /// ulp for `|x|` up to ~3·10^9; beyond that the error grows linearly in
    /// the rounding of `k·ln2`, which is harmless at such magnitudes.
    pub fn exp_of(x: f64) -> XReal {
        if x.is_nan() {
            return XReal { m: f64::NAN, e: 0 };
        }
        if x == f64::INFINITY {
            return XReal::INFINITY;
        }
        if x == f64::NEG_INFINITY {
            return XReal::ZERO;
        }
        const LN2_HI: f64 = 6.931_471_803_691_238_2e-1; // 32-bit head of ln 2
        const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
        let k = (x * std::f64::consts::LOG2_E).round();
        if k.abs() >= 9.0e18 {
            return if k > 0.0 { XReal::INFINITY } else { XReal::ZERO };
        }
        let r = (x - k * LN2_HI) - k * LN2_LO;
        let m = r.exp(); // in [1/sqrt(2)·(1-eps), sqrt(2)·(1+eps)]
        let (mm, me) = frexp(m);
        XReal { m: mm, e: k as i64 + me }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite()
    }

    pub fn is_nan(&self) -> bool {
        self.m.is_nan()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.m < 0.0
    }

    /// Converts back to `f64`, saturating to `±inf` / `±0` outside the range.
    pub fn to_f64(&self) -> f64 {
        if self.m == 0.0 || !self.m.is_finite() {
            return self.m;
        }
        if self.e > 1100 {
            return if self.m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if self.e < -1130 {
            return if self.m > 0.0 { 0.0 } else { -0.0 };
        }
        let h = self.e / 2;
        self.m * pow2(h) * pow2(self.e - h)
    }

    /// Natural log of `|self|` as `f64` (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        if self.m == 0.0 {
            return f64::NEG_INFINITY;
        }
        if !self.m.is_finite() {
            return f64::INFINITY;
        }
        self.m.abs().ln() + self.e as f64 * std::f64::consts::LN_2
    }

    pub fn neg(&self) -> XReal {
        XReal { m: -self.m, e: self.e }
    }

    pub fn add(&self, other: &XReal) -> XReal {
        if !self.m.is_finite() || !other.m.is_finite() {
            return XReal::from_f64(self.m + other.m);
        }
        if self.m == 0.0 {
            return *other;
        }
        if other.m == 0.0 {
            return *self;
        }
        let (hi, lo) = if self.e >= other.e { (self, other) } else { (other, self) };
        let d = hi.e - lo.e;
        if d > 120 {
            return *hi;
        }
        let s = hi.m + lo.m * pow2(-d);
        if s == 0.0 {
            return XReal::ZERO;
        }
        let (m, e) = frexp(s);
        XReal { m, e: hi.e + e }
    }

    pub fn sub(&self, other: &XReal) -> XReal {
        self.add(&other.neg())
    }

    pub fn add_f64(&self, x: f64) -> XReal {
        self.add(&XReal::from_f64(x))
    }

    pub fn mul(&self, other: &XReal) -> XReal {
        if !self.m.is_finite() || !other.m.is_finite() || self.m == 0.0 || other.m == 0.0 {
            return XReal::from_f64(self.m * other.m);
        }
        let p = self.m * other.m; // in (0.25, 1), no overflow
        let (m, e) = frexp(p);
        XReal {
            m,
            e: self.e.saturating_add(other.e).saturating_add(e),
        }
    }

    pub fn mul_f64(&self, x: f64) -> XReal {
        self.mul(&XReal::from_f64(x))
    }

    pub fn abs(&self) -> XReal {
        XReal { m: self.m.abs(), e: self.e }
    }

    /// Sign of the value: -1, 0 or +1 (0 for NaN as well).
    fn sign(&self) -> i8 {
        if self.m > 0.0 {
            1
        } else if self.m < 0.0 {
            -1
        } else {
            0
        }
    }
}

impl PartialEq for XReal {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && (self.e == other.e || self.m == 0.0 || !self.m.is_finite())
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.m.is_nan() || other.m.is_nan() {
            return None;
        }
        let (sa, sb) = (self.sign(), other.sign());
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        // Same nonzero sign; infinities first.
        if !self.m.is_finite() || !other.m.is_finite() {
            return self.m.partial_cmp(&other.m);
        }
        let ord = match self.e.cmp(&other.e) {
            Ordering::Equal => self.m.partial_cmp(&other.m)?,
            o => {
                if sa > 0 {
                    o
                } else {
                    o.reverse()
                }
            }
        };
        Some(ord)
    }
}

/// Log-sum-exp of two log-domain values: `ln(e^a + e^b)`.
pub fn logaddexp(a: &XReal, b: &XReal) -> XReal {
    if a.is_nan() || b.is_nan() {
        return XReal { m: f64::NAN, e: 0 };
    }
    // -inf is the identity (log of zero).
    if a.m == f64::NEG_INFINITY {
        return *b;
    }
    if b.m == f64::NEG_INFINITY {
        return *a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let d = lo.sub(hi).to_f64(); // <= 0
    if d < -745.0 {
        *hi
    } else {
        hi.add_f64(d.exp().ln_1p())
    }
}
