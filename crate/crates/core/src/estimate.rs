//! Point estimates with an optional Monte Carlo error and a divergence record.
//!
//! Quantities that are infinite are never reported as numbers: they carry the
//! sequence of truncated values and a fitted growth law instead.

use serde_json::{json, Value};

/// Relative change across the last two truncation levels below which a
/// sequence counts as stabilized.
pub const STABLE_REL_CHANGE: f64 = 0.05;

/// Minimum number of truncation levels behind any trend verdict.
pub const MIN_LEVELS: usize = 4;

/// `y ≈ intercept + slope · x` with the transforms used to build `x` and `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthLaw {
    pub x_label: String,
    pub y_label: String,
    pub slope: f64,
    pub intercept: f64,
}

/// Truncated estimates along a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Trend {
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Option<Vec<f64>>,
    pub law: Option<GrowthLaw>,
}

impl Trend {
    pub fn new(levels: Vec<f64>, values: Vec<f64>) -> Self {
        Trend { levels, values, std_errors: None, law: None }
    }

    pub fn with_law(mut self, law: GrowthLaw) -> Self {
        self.law = Some(law);
        self
    }

    /// Fits `values` against `x(level)` by least squares.
    pub fn fit(mut self, x_label: &str, x: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = self.levels.iter().map(|&l| x(l)).collect();
        let (slope, intercept) = fit_line(&xs, &self.values);
        self.law = Some(GrowthLaw { x_label: x_label.into(), y_label: "value".into(), slope, intercept });
        self
    }

    /// Fits `ln(values)` against `x(level)`.
    pub fn fit_log(mut self, x_label: &str, x: impl Fn(f64) -> f64) -> Self {
        let xs: Vec<f64> = self.levels.iter().map(|&l| x(l)).collect();
        let ys: Vec<f64> = self.values.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = fit_line(&xs, &ys);
        self.law = Some(GrowthLaw { x_label: x_label.into(), y_label: "ln(value)".into(), slope, intercept });
        self
    }

    pub fn classify(&self) -> TrendClass {
        classify_trend(&self.values)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "levels": self.levels, "values": self.values });
        if let Some(se) = &self.std_errors {
            v["std_errors"] = json!(se);
        }
        if let Some(law) = &self.law {
            v["law"] = json!({
                "x": law.x_label,
                "y": law.y_label,
                "slope": law.slope,
                "intercept": law.intercept,
            });
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrendClass {
    Finite,
    Diverging,
    Inconclusive,
}

impl TrendClass {
    pub fn tag(self) -> &'static str {
        match self {
            TrendClass::Finite => "finite",
            TrendClass::Diverging => "diverging",
            TrendClass::Inconclusive => "inconclusive",
        }
    }
}

/// Finite when the last two levels differ by less than 5% relative; diverging
/// when the values grow strictly across every level; inconclusive otherwise
/// (including schedules shorter than [`MIN_LEVELS`]).
pub fn classify_trend(values: &[f64]) -> TrendClass {
    if values.len() < MIN_LEVELS || values.iter().any(|v| v.is_nan()) {
        return TrendClass::Inconclusive;
    }
    let n = values.len();
    let (prev, last) = (values[n - 2], values[n - 1]);
    if last.is_finite() && prev.is_finite() && (last - prev).abs() < STABLE_REL_CHANGE * prev.abs() {
        return TrendClass::Finite;
    }
    // an overflowing level still counts as growth
    if values.windows(2).all(|w| w[1] > w[0] || w[1] == f64::INFINITY) {
        return TrendClass::Diverging;
    }
    TrendClass::Inconclusive
}

#[derive(Clone, Debug, PartialEq)]
pub enum Divergence {
    Finite,
    Diverging(Trend),
    /// Neither stabilized nor monotonically growing over the schedule.
    Inconclusive(Trend),
}

impl Divergence {
    pub fn tag(&self) -> &'static str {
        match self {
            Divergence::Finite => "finite",
            Divergence::Diverging(_) => "diverging",
            Divergence::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn trend(&self) -> Option<&Trend> {
        match self {
            Divergence::Finite => None,
            Divergence::Diverging(t) | Divergence::Inconclusive(t) => Some(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Present exactly when the value is a Monte Carlo mean.
    pub std_error: Option<f64>,
    pub n: usize,
    /// Error bound reported by a quadrature, when one produced the value.
    pub quad_error: Option<f64>,
    pub divergence: Divergence,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: None, n: 1, quad_error: None, divergence: Divergence::Finite }
    }

    pub fn quadrature(value: f64, abs_error: f64, evaluations: usize) -> Self {
        Estimate { value, std_error: None, n: evaluations, quad_error: Some(abs_error), divergence: Divergence::Finite }
    }

    /// Sample mean and standard error, accumulated in index order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::NAN
        };
        Estimate { value: mean, std_error: Some((var / n as f64).sqrt()), n, quad_error: None, divergence: Divergence::Finite }
    }

    /// An estimate whose only content is its trend.
    pub fn from_trend(trend: Trend, n: usize) -> Self {
        match trend.classify() {
            TrendClass::Finite => Estimate {
                value: *trend.values.last().unwrap(),
                std_error: trend.std_errors.as_ref().map(|s| *s.last().unwrap()),
                n,
                quad_error: None,
                divergence: Divergence::Finite,
            },
            TrendClass::Diverging => {
                Estimate { value: f64::INFINITY, std_error: None, n, quad_error: None, divergence: Divergence::Diverging(trend) }
            }
            TrendClass::Inconclusive => {
                Estimate { value: f64::NAN, std_error: None, n, quad_error: None, divergence: Divergence::Inconclusive(trend) }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.divergence == Divergence::Finite
    }

    /// Whether `target` lies within `k` standard errors; quadrature values
    /// compare against `k` times their error bound, exact ones at `1e-12`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        let slack = match (self.std_error, self.quad_error) {
            (Some(se), _) => k * se,
            (None, Some(q)) => k * q,
            (None, None) => 1e-12 * (1.0 + target.abs()),
        };
        (self.value - target).abs() <= slack
    }

    /// 99% normal confidence interval.
    pub fn ci99(&self) -> Option<(f64, f64)> {
        const Z99: f64 = 2.575_829_303_548_901;
        self.std_error.map(|se| (self.value - Z99 * se, self.value + Z99 * se))
    }
}

/// Ordinary least squares `y = intercept + slope·x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_classes() {
        assert_eq!(classify_trend(&[1.0, 2.0, 3.0, 3.05]), TrendClass::Finite);
        assert_eq!(classify_trend(&[1.0, 2.0, 3.0, 4.0]), TrendClass::Diverging);
        assert_eq!(classify_trend(&[1.0, 3.0, 2.0, 4.0]), TrendClass::Inconclusive);
        assert_eq!(classify_trend(&[1.0, 2.0, 3.0]), TrendClass::Inconclusive);
        assert_eq!(classify_trend(&[1.0, 2.0, f64::INFINITY, f64::INFINITY]), TrendClass::Diverging);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 2.0).collect();
        let (s, c) = fit_line(&x, &y);
        assert!((s - 0.5).abs() < 1e-14 && (c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sample_statistics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.std_error.unwrap() - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.6, 1.0));
    }
}
