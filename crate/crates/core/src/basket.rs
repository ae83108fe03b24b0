//! Two-asset basket options on aggregated returns and the EPS quotes built
//! from them.
//!
//! All basket quantities are expressed on the discounted normalized assets,
//! which start at 1.

use crate::error::{invalid, EpsError, Result};
use crate::market::{delta_q, LognormalStep, MarketParams, VolVector};
use crate::mc::{self, McConfig, McEstimate};
use crate::numerics::std_normal_cdf as ncdf;
use crate::structure::{check_weight, EpsStructure, OptionKind};
use crate::vanilla::{EpsQuote, ReturnKind};

/// Which foreign return enters the basket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasketVariant {
    /// `Q·S^f`, the foreign asset converted at the floating rate.
    Effective,
    /// `S^f` converted at a guaranteed rate.
    Quanto,
}

impl BasketVariant {
    pub fn return_kind(self) -> ReturnKind {
        match self {
            BasketVariant::Effective => ReturnKind::AggregatedEffective,
            BasketVariant::Quanto => ReturnKind::AggregatedQuanto,
        }
    }
}

/// Pricing method for aggregated EPSs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasketMethod {
    Geometric,
    Moments,
    MonteCarlo(McConfig),
}

/// Loadings and drift adjustment of the foreign leg.
fn foreign_leg(variant: BasketVariant, params: &MarketParams) -> (VolVector, f64) {
    match variant {
        BasketVariant::Effective => (params.sigma_fe(), 0.0),
        BasketVariant::Quanto => (params.sigma_f, delta_q(params)),
    }
}

fn check_basket_inputs(w: f64, k: f64, params: &MarketParams, t: f64) -> Result<()> {
    check_weight(w)?;
    params.validate()?;
    if !(k > 0.0) {
        return invalid("strike must be positive");
    }
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    Ok(())
}

/// Basket option priced through the geometric-average lognormal proxy.
///
/// When the shifted strike `K̂ = K̃ + λ − κ` is non-positive the call is
/// exercised with certainty (`λ − K̂`) and the put is worthless.
pub fn geometric_basket(
    variant: BasketVariant,
    kind: OptionKind,
    w: f64,
    k: f64,
    params: &MarketParams,
    t: f64,
) -> Result<f64> {
    check_basket_inputs(w, k, params, t)?;
    let (s2, delta) = foreign_leg(variant, params);
    let s1 = params.sigma_d;
    let v = (w * s1 + (1.0 - w) * s2).norm();
    let lambda = (-0.5 * w * (1.0 - w) * (s1 - s2).norm_sq() * t + (1.0 - w) * delta * t).exp();
    let kappa = w + (1.0 - w) * (delta * t).exp();
    let k_tilde = k * (-params.r_d * t).exp();
    let k_hat = k_tilde + lambda - kappa;
    if k_hat <= 0.0 {
        return Ok(match kind {
            OptionKind::Call => lambda - k_hat,
            OptionKind::Put => 0.0,
        });
    }
    let sd = v * t.sqrt();
    if sd == 0.0 {
        return Ok(match kind {
            OptionKind::Call => (lambda - k_hat).max(0.0),
            OptionKind::Put => (k_hat - lambda).max(0.0),
        });
    }
    let dp = ((lambda / k_hat).ln() + 0.5 * sd * sd) / sd;
    let dm = dp - sd;
    Ok(match kind {
        OptionKind::Call => lambda * ncdf(dp) - k_hat * ncdf(dm),
        OptionKind::Put => k_hat * ncdf(-dm) - lambda * ncdf(-dp),
    })
}

pub fn geometric_basket_effective(
    kind: OptionKind,
    w: f64,
    k: f64,
    params: &MarketParams,
    t: f64,
) -> Result<f64> {
    geometric_basket(BasketVariant::Effective, kind, w, k, params, t)
}

pub fn geometric_basket_quanto(
    kind: OptionKind,
    w: f64,
    k: f64,
    params: &MarketParams,
    t: f64,
) -> Result<f64> {
    geometric_basket(BasketVariant::Quanto, kind, w, k, params, t)
}

/// First three raw moments of the discounted normalized basket with derived
/// mean, standard deviation and skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub mu: f64,
    pub sigma: f64,
    pub eta: f64,
}

impl MomentSummary {
    /// Summary from raw moments.
    pub fn from_raw(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let var = m2 - m1 * m1;
        if !(var > 0.0) {
            return Err(EpsError::Degenerate(format!(
                "basket variance {var} is not positive"
            )));
        }
        let sigma = var.sqrt();
        let eta = (m3 - 3.0 * m1 * var - m1 * m1 * m1) / (var * sigma);
        if !eta.is_finite() {
            return Err(EpsError::Degenerate("non-finite skewness".into()));
        }
        Ok(MomentSummary {
            m1,
            m2,
            m3,
            mu: m1,
            sigma,
            eta,
        })
    }
}

/// Moments of `w₁·S̃ᵈ_T + w₂·S̃²_T` with `w₂ = 1−w` (effective) or
/// `(1−w)e^{δT}` (quanto).
pub fn basket_moments(
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
) -> Result<MomentSummary> {
    check_weight(w)?;
    params.validate()?;
    let (s2, delta) = foreign_leg(variant, params);
    let s1 = params.sigma_d;
    let w1 = w;
    let w2 = (1.0 - w) * (delta * t).exp();
    let a = s1.norm_sq() * t;
    let b = s2.norm_sq() * t;
    let c = s1.dot(&s2) * t;
    let m1 = w1 + w2;
    let m2 = w1 * w1 * a.exp() + 2.0 * w1 * w2 * c.exp() + w2 * w2 * b.exp();
    let m3 = w1.powi(3) * (3.0 * a).exp()
        + 3.0 * w1 * w1 * w2 * (a + 2.0 * c).exp()
        + 3.0 * w1 * w2 * w2 * (b + 2.0 * c).exp()
        + w2.powi(3) * (3.0 * b).exp();
    MomentSummary::from_raw(m1, m2, m3)
}

/// Law `c·(e^{sZ+m} + τ)` with `Z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedLognormalParams {
    pub c: f64,
    pub s: f64,
    pub m: f64,
    pub tau: f64,
}

impl ShiftedLognormalParams {
    /// Raw moments `(M₁, M₂, M₃)` of the law.
    pub fn moments(&self) -> (f64, f64, f64) {
        let (s2, m, tau, c) = (self.s * self.s, self.m, self.tau, self.c);
        let e1 = (m + 0.5 * s2).exp();
        let e2 = (2.0 * m + 2.0 * s2).exp();
        let e3 = (3.0 * m + 4.5 * s2).exp();
        (
            c * (e1 + tau),
            e2 + 2.0 * tau * e1 + tau * tau,
            c * (e3 + 3.0 * tau * e2 + 3.0 * tau * tau * e1 + tau.powi(3)),
        )
    }
}

/// Three-moment shifted-lognormal fit. Below `|η| < 1e-12` the skew is
/// ignored and a two-moment lognormal with `τ = 0` is returned.
pub fn fit_shifted_lognormal(summary: &MomentSummary) -> Result<ShiftedLognormalParams> {
    let MomentSummary { mu, sigma, eta, .. } = *summary;
    if !(sigma > 0.0) {
        return Err(EpsError::Degenerate("zero basket variance".into()));
    }
    if eta.abs() < 1e-12 {
        if !(mu > 0.0) {
            return Err(EpsError::Degenerate(
                "lognormal fit needs a positive mean".into(),
            ));
        }
        let s2 = (sigma * sigma / (mu * mu)).ln_1p();
        return Ok(ShiftedLognormalParams {
            c: 1.0,
            s: s2.sqrt(),
            m: mu.ln() - 0.5 * s2,
            tau: 0.0,
        });
    }
    let c = if eta >= 0.0 { 1.0 } else { -1.0 };
    // x = A + 1/A − 1 with A = ∛(1 + η²/2 + |η|√(1 + η²/4)); the two cube
    // roots of the closed form multiply to one.
    let e = 0.5 * eta * eta + eta.abs() * (1.0 + 0.25 * eta * eta).sqrt();
    let a_m1 = (e.ln_1p() / 3.0).exp_m1();
    let x_m1 = a_m1 * a_m1 / (1.0 + a_m1);
    let x = 1.0 + x_m1;
    let s = x_m1.ln_1p().sqrt();
    let m = 0.5 * (sigma * sigma / (x * x_m1)).ln();
    let tau = c * mu - sigma / x_m1.sqrt();
    Ok(ShiftedLognormalParams { c, s, m, tau })
}

/// Call on the fitted law struck at the discounted strike `K e^{−r_d T}`.
pub fn mm_basket_price(fit: &ShiftedLognormalParams, k: f64, r_d: f64, t: f64) -> f64 {
    let ShiftedLognormalParams { c, s, m, tau } = *fit;
    let kt = k * (-r_d * t).exp();
    let fwd = (m + 0.5 * s * s).exp();
    if c > 0.0 {
        if kt <= tau {
            return fwd + tau - kt;
        }
        let d11 = (-(kt - tau).ln() + m + s * s) / s;
        let d12 = d11 - s;
        fwd * ncdf(d11) - (kt - tau) * ncdf(d12)
    } else {
        if kt > -tau {
            return 0.0;
        }
        let d21 = ((-kt - tau).ln() - m - s * s) / s;
        let d22 = d21 + s;
        -fwd * ncdf(d21) + (-kt - tau) * ncdf(d22)
    }
}

/// Moment-matched basket option; the put follows from parity on the exact
/// basket mean.
pub fn mm_basket_option(
    variant: BasketVariant,
    kind: OptionKind,
    w: f64,
    k: f64,
    params: &MarketParams,
    t: f64,
) -> Result<f64> {
    check_basket_inputs(w, k, params, t)?;
    let summary = basket_moments(variant, w, params, t)?;
    let fit = fit_shifted_lognormal(&summary)?;
    Ok(mm_option_from_fit(kind, &summary, &fit, k, params.r_d, t))
}

fn mm_option_from_fit(
    kind: OptionKind,
    summary: &MomentSummary,
    fit: &ShiftedLognormalParams,
    k: f64,
    r_d: f64,
    t: f64,
) -> f64 {
    let call = mm_basket_price(fit, k, r_d, t);
    match kind {
        OptionKind::Call => call,
        OptionKind::Put => call - (summary.mu - k * (-r_d * t).exp()),
    }
}

/// Gross normalized foreign return for a draw, in the basket's currency
/// convention.
#[inline]
fn foreign_gross(variant: BasketVariant, g: &[f64; 3]) -> f64 {
    match variant {
        BasketVariant::Effective => g[1] * g[2],
        BasketVariant::Quanto => g[1],
    }
}

/// Aggregated return `R^{w,·}` for a draw of gross returns.
#[inline]
pub(crate) fn aggregated_gross_return(
    variant: BasketVariant,
    w: f64,
    g: &[f64; 3],
) -> (f64, f64, f64) {
    let xd = g[0];
    let xf = foreign_gross(variant, g);
    (xd, xf, w * (xd - 1.0) + (1.0 - w) * (xf - 1.0))
}

/// Monte Carlo quote `E[e^{−r_d T}·(−ψ(R))]` from exact terminal draws.
pub fn mc_basket_eps(
    s: &EpsStructure,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_weight(w)?;
    params.validate()?;
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    let step = LognormalStep::new(params, t);
    let df = (-params.r_d * t).exp();
    mc::estimate(cfg, |z| {
        let g = step.gross(z);
        let (_, _, r) = aggregated_gross_return(variant, w, &g);
        -df * s.psi_unchecked(r)
    })
}

/// Aggregated EPS quote `Σ Δp·BasketPut(1+lᵢ) − Σ Δf·BasketCall(1+gⱼ)`.
pub fn price_eps_aggregated(
    s: &EpsStructure,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
    method: BasketMethod,
) -> Result<EpsQuote> {
    let kind = variant.return_kind();
    match method {
        BasketMethod::Geometric => {
            let v = s.price_with(|o, k| geometric_basket(variant, o, w, k, params, t))?;
            Ok(EpsQuote::domestic(v, kind))
        }
        BasketMethod::Moments => {
            check_basket_inputs(w, 1.0, params, t)?;
            let summary = basket_moments(variant, w, params, t)?;
            let fit = fit_shifted_lognormal(&summary)?;
            let v =
                s.price_with(|o, k| Ok(mm_option_from_fit(o, &summary, &fit, k, params.r_d, t)))?;
            Ok(EpsQuote::domestic(v, kind))
        }
        BasketMethod::MonteCarlo(cfg) => {
            let est = mc_basket_eps(s, variant, w, params, t, &cfg)?;
            Ok(EpsQuote {
                std_error: Some(est.std_error),
                ..EpsQuote::domestic(est.value, kind)
            })
        }
    }
}
