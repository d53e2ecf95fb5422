//! Standard normal kernels evaluated without cancellation.
//!
//! Tail probabilities are always formed from `erfc` of the tail side, never as
//! `1 - small`. Beyond `|z| = 8` everything is carried in log space and the
//! tail/density ratio comes from the Mills-ratio continued fraction, so the
//! ratios needed by the information drift stay finite long after `Φ` itself
//! underflows.

use libm::{erf, erfc};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `ln(sqrt(2π))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this standardized distance the tails switch to log-space evaluation.
pub const FAR_TAIL: f64 = 8.0;

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn log_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// `Φ(z)`.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `1 - Φ(z)`, computed directly from the upper tail.
pub fn ccdf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Mills ratio `(1 - Φ(z)) / φ(z)` for `z ≥ 0`.
pub fn mills_ratio(z: f64) -> f64 {
    if z < FAR_TAIL {
        return ccdf(z) / pdf(z);
    }
    // Backward evaluation of R(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))).
    // At z = 8 sixty levels are far past double precision.
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + k as f64 / tail;
    }
    1.0 / tail
}

/// `ln(1 - Φ(z))`.
pub fn log_ccdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if z < 0.0 {
        // 1 - Φ(z) = 1 - Φ(-|z|) with Φ(-|z|) small
        return (-ccdf(-z)).ln_1p();
    }
    if z < FAR_TAIL {
        return ccdf(z).ln();
    }
    log_pdf(z) + mills_ratio(z).ln()
}

/// `ln Φ(z)`.
pub fn log_cdf(z: f64) -> f64 {
    log_ccdf(-z)
}

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a ≥ b`; `-∞` when they coincide.
pub fn log_sub(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b || a.is_nan() || b.is_nan());
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp_m1()).ln()
}

/// A real number stored as sign and log-magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn positive(ln_abs: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign: 1.0, ln_abs }
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// `e^a - e^b` as a signed log.
    pub fn difference(a: f64, b: f64) -> Self {
        if a == b {
            return Self::ZERO;
        }
        if a > b {
            SignedLog { sign: 1.0, ln_abs: log_sub(a, b) }
        } else {
            SignedLog { sign: -1.0, ln_abs: log_sub(b, a) }
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0.0 {
            return other;
        }
        if other.sign == 0.0 {
            return self;
        }
        if self.sign == other.sign {
            return SignedLog { sign: self.sign, ln_abs: log_add(self.ln_abs, other.ln_abs) };
        }
        let (pos, neg) = if self.sign > 0.0 { (self, other) } else { (other, self) };
        SignedLog::difference(pos.ln_abs, neg.ln_abs)
    }
}

/// `φ(a) - φ(b)` with the larger exponent factored out.
pub fn pdf_difference(a: f64, b: f64) -> SignedLog {
    let la = if a.is_infinite() { f64::NEG_INFINITY } else { -0.5 * a * a };
    let lb = if b.is_infinite() { f64::NEG_INFINITY } else { -0.5 * b * b };
    let d = SignedLog::difference(la, lb);
    SignedLog { sign: d.sign, ln_abs: d.ln_abs - LN_SQRT_2PI }
}

/// `ln P(a ≤ Z ≤ b)` for a standard normal `Z`, `a < b`, either end may be infinite.
pub fn log_interval_prob(a: f64, b: f64) -> f64 {
    if a >= b {
        return f64::NEG_INFINITY;
    }
    if a >= 0.0 {
        log_sub(log_ccdf(a), log_ccdf(b))
    } else if b <= 0.0 {
        log_sub(log_ccdf(-b), log_ccdf(-a))
    } else {
        // straddles the origin: two half-masses of the same sign
        let upper = if b.is_infinite() { 0.5 } else { 0.5 * erf(b * FRAC_1_SQRT_2) };
        let lower = if a.is_infinite() { 0.5 } else { 0.5 * erf(-a * FRAC_1_SQRT_2) };
        (upper + lower).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference tail values computed at 40 digits with mpmath.
    const TAILS: [(f64, f64, f64); 8] = [
        (0.5, 0.308_537_538_725_986_9, -1.175_911_761_593_618_6),
        (1.0, 0.158_655_253_931_457_05, -1.841_021_645_009_263_5),
        (3.0, 1.349_898_031_630_094_5e-3, -6.607_726_221_510_349),
        (5.0, 2.866_515_718_791_939e-7, -15.064_998_393_988_726),
        (8.0, 6.220_960_574_271_784e-16, -35.013_437_159_914_55),
        (10.0, 7.619_853_024_160_526e-24, -53.231_285_150_512_47),
        (20.0, 2.753_624_118_606_233_7e-89, -203.917_155_371_097_26),
        (30.0, 4.906_713_927_148_187e-198, -454.321_243_956_343_2),
    ];

    #[test]
    fn upper_tail_relative_accuracy() {
        for &(z, p, lp) in &TAILS {
            let rel = (ccdf(z) - p).abs() / p;
            assert!(rel < 1e-12, "z={z} rel={rel:e}");
            assert!((log_ccdf(z) - lp).abs() < 1e-12 * lp.abs(), "z={z}");
        }
    }

    #[test]
    fn cdf_and_complement_sum_to_one() {
        let mut z = -8.0;
        while z <= 8.0 {
            let s = cdf(z) + ccdf(z);
            assert!((s - 1.0).abs() <= 2.0 * f64::EPSILON, "z={z} s-1={:e}", s - 1.0);
            z += 0.01;
        }
    }

    #[test]
    fn far_tail_stays_finite() {
        // mpmath: Mills ratio at 40 and ln(1-Φ(1e4))
        assert!((mills_ratio(40.0) - 0.024_984_404_205_720_57).abs() < 1e-15);
        assert!((log_ccdf(1e4) - -50_000_010.129_278_915).abs() < 1e-6);
        assert!(log_cdf(-1e6).is_finite());
    }

    #[test]
    fn interval_probability_matches_direct_form() {
        for &(a, b) in &[(-1.0, 1.0), (0.3, 2.0), (-3.0, -0.2), (-0.1, 0.1)] {
            let direct = cdf(b) - cdf(a);
            assert!((log_interval_prob(a, b).exp() - direct).abs() < 1e-15);
        }
        assert!((log_interval_prob(f64::NEG_INFINITY, 0.0).exp() - 0.5).abs() < 1e-16);
        assert!((log_interval_prob(-1e-9, 1e-9).exp() - 2e-9 * pdf(0.0)).abs() < 1e-22);
    }

    #[test]
    fn signed_log_arithmetic() {
        let d = pdf_difference(0.0, 1.0);
        assert!((d.value() - (pdf(0.0) - pdf(1.0))).abs() < 1e-16);
        let e = pdf_difference(1.0, 0.0);
        assert!((d.add(e)).value().abs() < 1e-16);
        assert_eq!(pdf_difference(2.0, -2.0), SignedLog::ZERO);
    }
}
