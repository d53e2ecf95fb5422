//! Information drift `α^G` of the Brownian motion under an initial enlargement.
//!
//! Three kinds of insider information are supported:
//!
//! * the exact terminal value `G = B_T`, with `α_t = (B_T - B_t)/(T - t)`;
//! * the indicator of an interval, `G = 1{c₁ ≤ B_T ≤ c₂}`;
//! * the indicator of the unit union `A = ∪_k [2k-1, 2k]`.
//!
//! For the indicator kinds, given `B_t = x` and `σ = sqrt(T - t)`, each value
//! `g` of the indicator corresponds to a union of intervals `[a_j, b_j]` for
//! `B_T` and
//!
//! ```text
//! P(G = g | B_t = x) = Σ_j Φ(z_bj) - Φ(z_aj)
//! α^g(x, t)          = Σ_j [φ(z_aj) - φ(z_bj)] / (σ · P(G = g | B_t = x))
//! ```
//!
//! with `z = (c - x)/σ`. Equivalently `α^g = ∂ₓ ln P(G = g | B_t = x)`. Both
//! the numerator and the mass are accumulated in log space, so the ratio stays
//! finite when both underflow as `t → T`.

use crate::error::{invalid, Error, Result};
use crate::gauss::{log_add, log_interval_prob, pdf_difference, SignedLog};
use crate::market::BrownianPath;

/// Standardized half-width of the union series window; two guard intervals are
/// added on each side. The Gaussian mass beyond 9σ is below `2.3e-19`.
pub const UNION_WINDOW: f64 = 9.0;
const UNION_GUARD: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InfoKind {
    ExactTerminal,
    Interval { c1: f64, c2: f64 },
    UnitUnion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InsiderInfo {
    pub kind: InfoKind,
    pub horizon: f64,
}

impl InsiderInfo {
    pub fn exact(horizon: f64) -> Result<Self> {
        Self::new(InfoKind::ExactTerminal, horizon)
    }

    pub fn interval(c1: f64, c2: f64, horizon: f64) -> Result<Self> {
        Self::new(InfoKind::Interval { c1, c2 }, horizon)
    }

    pub fn unit_union(horizon: f64) -> Result<Self> {
        Self::new(InfoKind::UnitUnion, horizon)
    }

    pub fn new(kind: InfoKind, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if let InfoKind::Interval { c1, c2 } = kind {
            if !(c1 < c2) || !c1.is_finite() || !c2.is_finite() {
                return Err(invalid(format!("interval needs finite c1 < c2, got [{c1}, {c2}]")));
            }
        }
        Ok(InsiderInfo { kind, horizon })
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self.kind, InfoKind::ExactTerminal)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            InfoKind::ExactTerminal => "exact",
            InfoKind::Interval { .. } => "interval",
            InfoKind::UnitUnion => "union",
        }
    }

    /// Realized value of `G` for a terminal Brownian value.
    pub fn realize(&self, b_terminal: f64) -> f64 {
        match self.kind {
            InfoKind::ExactTerminal => b_terminal,
            InfoKind::Interval { c1, c2 } => indicator(c1 <= b_terminal && b_terminal <= c2),
            InfoKind::UnitUnion => indicator(in_unit_union(b_terminal)),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t < self.horizon) {
            return Err(Error::TimeOutOfRange { t, range: format!("[0, {})", self.horizon) });
        }
        Ok(())
    }

    /// Standardized intervals `(z_a, z_b)` making up `{G = g}` given `B_t = x`.
    fn for_each_interval(&self, g: u8, x: f64, sigma: f64, mut f: impl FnMut(f64, f64)) {
        let z = |c: f64| (c - x) / sigma;
        match self.kind {
            InfoKind::ExactTerminal => unreachable!("exact terminal information has no interval form"),
            InfoKind::Interval { c1, c2 } => {
                if g == 1 {
                    f(z(c1), z(c2));
                } else {
                    f(f64::NEG_INFINITY, z(c1));
                    f(z(c2), f64::INFINITY);
                }
            }
            InfoKind::UnitUnion => {
                // g = 1: [2k-1, 2k]; g = 0: [2k, 2k+1]
                let offset = if g == 1 { -1.0 } else { 0.0 };
                let lo = x - UNION_WINDOW * sigma;
                let hi = x + UNION_WINDOW * sigma;
                let k_lo = ((lo - offset - 1.0) / 2.0).ceil() as i64 - UNION_GUARD;
                let k_hi = ((hi - offset) / 2.0).floor() as i64 + UNION_GUARD;
                for k in k_lo..=k_hi {
                    let a = 2.0 * k as f64 + offset;
                    f(z(a), z(a + 1.0));
                }
            }
        }
    }

    fn require_indicator(&self, op: &str) -> Result<()> {
        if self.is_indicator() {
            Ok(())
        } else {
            Err(Error::UnsupportedInfo(format!("{op} needs indicator information")))
        }
    }

    fn require_g(g: u8) -> Result<()> {
        if g > 1 {
            return Err(invalid(format!("indicator value must be 0 or 1, got {g}")));
        }
        Ok(())
    }

    /// Numerator and log conditional mass of `α^g` at `(x, t)`.
    pub fn drift_terms(&self, g: u8, x: f64, t: f64) -> Result<DriftTerms> {
        self.require_indicator("drift evaluation")?;
        Self::require_g(g)?;
        self.check_time(t)?;
        if !x.is_finite() {
            return Err(invalid("Brownian value must be finite"));
        }
        let sigma = (self.horizon - t).sqrt();
        let mut numerator = SignedLog::ZERO;
        let mut log_mass = f64::NEG_INFINITY;
        self.for_each_interval(g, x, sigma, |za, zb| {
            numerator = numerator.add(pdf_difference(za, zb));
            log_mass = log_add(log_mass, log_interval_prob(za, zb));
        });
        Ok(DriftTerms { numerator, log_mass, sigma })
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Membership in `A = ∪_k [2k-1, 2k]`.
pub fn in_unit_union(b: f64) -> bool {
    let f = b.floor();
    let parity = (f as i64).rem_euclid(2);
    parity == 1 || (b == f && parity == 0)
}

/// Shared building blocks of `α^g`.
#[derive(Clone, Copy, Debug)]
pub struct DriftTerms {
    /// `Σ_j φ(z_aj) - φ(z_bj)`.
    pub numerator: SignedLog,
    /// `ln P(G = g | B_t = x)`.
    pub log_mass: f64,
    /// `sqrt(T - t)`.
    pub sigma: f64,
}

impl DriftTerms {
    pub fn alpha(&self) -> f64 {
        if self.numerator.sign == 0.0 {
            return 0.0;
        }
        self.numerator.sign * (self.numerator.ln_abs - self.log_mass).exp() / self.sigma
    }

    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }
}

/// `α_t^{B_T} = (B_T - B_t)/(T - t)`.
pub fn alpha_exact(b_terminal: f64, b_t: f64, t: f64, horizon: f64) -> Result<f64> {
    if !(t >= 0.0 && t < horizon) {
        return Err(Error::TimeOutOfRange { t, range: format!("[0, {horizon})") });
    }
    Ok((b_terminal - b_t) / (horizon - t))
}

/// `P(G = g | B_t = x)`.
pub fn conditional_mass(info: &InsiderInfo, g: u8, x: f64, t: f64) -> Result<f64> {
    Ok(info.drift_terms(g, x, t)?.mass())
}

/// `ln P(G = g | B_t = x)`.
pub fn log_conditional_mass(info: &InsiderInfo, g: u8, x: f64, t: f64) -> Result<f64> {
    Ok(info.drift_terms(g, x, t)?.log_mass)
}

/// Closed-form `α^g(x, t)` for the indicator kinds.
pub fn alpha_indicator(info: &InsiderInfo, g: u8, x: f64, t: f64) -> Result<f64> {
    let terms = info.drift_terms(g, x, t)?;
    if terms.log_mass == f64::NEG_INFINITY {
        return Err(Error::ZeroMass { g, x, t });
    }
    Ok(terms.alpha())
}

/// `ln Σ_g (α^g)² P(G = g | B_t = x) = ln N² - ln(T - t) - ln P(1|x) - ln P(0|x)`.
///
/// The two conditional masses share the numerator up to sign, so the mixture
/// collapses to a single ratio.
pub fn log_alpha_sq_mixture(info: &InsiderInfo, x: f64, t: f64) -> Result<f64> {
    let one = info.drift_terms(1, x, t)?;
    let zero = info.drift_terms(0, x, t)?;
    if one.numerator.sign == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(2.0 * one.numerator.ln_abs - 2.0 * one.sigma.ln() - one.log_mass - zero.log_mass)
}

/// `α^G` along a path at every node strictly before `T`.
pub fn alpha_on_path(info: &InsiderInfo, realized_g: f64, bpath: &BrownianPath) -> Result<Vec<f64>> {
    let horizon = info.horizon;
    let nodes = bpath.grid.nodes();
    let pinned = bpath.grid.ends_at_horizon().then(|| bpath.last());
    let before: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&bpath.values)
        .filter(|(&t, _)| t < horizon)
        .map(|(&t, &b)| (t, b))
        .collect();
    match info.kind {
        InfoKind::ExactTerminal => {
            if let Some(b_t) = pinned {
                if (b_t - realized_g).abs() > 1e-12 * (1.0 + realized_g.abs()) {
                    return Err(Error::InconsistentInfo(format!(
                        "path pinned at {b_t} but realized B_T = {realized_g}"
                    )));
                }
            }
            before.iter().map(|&(t, b)| alpha_exact(realized_g, b, t, horizon)).collect()
        }
        _ => {
            let g = match realized_g {
                0.0 => 0u8,
                1.0 => 1u8,
                v => return Err(Error::InconsistentInfo(format!("indicator value {v} is not 0 or 1"))),
            };
            if let Some(b_t) = pinned {
                if info.realize(b_t) != realized_g {
                    return Err(Error::InconsistentInfo(format!(
                        "path ends at {b_t}, contradicting G = {g}"
                    )));
                }
            }
            before.iter().map(|&(t, b)| alpha_indicator(info, g, b, t)).collect()
        }
    }
}

/// One row of a drift-surface dump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub t: f64,
    pub x: f64,
    pub g: u8,
    pub alpha: f64,
    pub mass: f64,
}

/// `α^g` and `P(G = g | B_t = x)` over a rectangular `(t, x)` grid, both `g`.
pub fn drift_surface(info: &InsiderInfo, ts: &[f64], xs: &[f64]) -> Result<Vec<SurfacePoint>> {
    info.require_indicator("drift surface")?;
    let mut out = Vec::with_capacity(ts.len() * xs.len() * 2);
    for &t in ts {
        for &x in xs {
            for g in [0u8, 1] {
                let terms = info.drift_terms(g, x, t)?;
                out.push(SurfacePoint { t, x, g, alpha: terms.alpha(), mass: terms.mass() });
            }
        }
    }
    Ok(out)
}
