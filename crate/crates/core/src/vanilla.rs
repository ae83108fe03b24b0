//! Closed-form prices of single-underlying options and separate EPSs.

use crate::error::{invalid, EpsError, Result};
use crate::market::{delta_q, MarketParams};
use crate::numerics::std_normal_cdf as ncdf;
use crate::structure::{check_weight, EpsStructure, OptionKind};

/// Settlement currency of a quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Currency {
    Domestic,
    Foreign,
}

/// Reference return of an EPS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnKind {
    Domestic,
    NominalForeign,
    EffectiveForeign,
    QuantoForeign,
    AggregatedEffective,
    AggregatedQuanto,
}

/// EPS premium as a fraction of notional; negative when the fee leg
/// outweighs protection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsQuote {
    pub value: f64,
    pub kind: ReturnKind,
    pub currency: Currency,
    pub std_error: Option<f64>,
}

impl EpsQuote {
    pub fn domestic(value: f64, kind: ReturnKind) -> Self {
        EpsQuote {
            value,
            kind,
            currency: Currency::Domestic,
            std_error: None,
        }
    }

    /// Value in domestic currency per unit of domestic notional; foreign
    /// quotes convert at the spot rate.
    pub fn domestic_value(&self, params: &MarketParams) -> f64 {
        match self.currency {
            Currency::Domestic => self.value,
            Currency::Foreign => params.q0 * self.value,
        }
    }

    pub fn per_100(&self) -> f64 {
        100.0 * self.value
    }
}

/// Lognormal option price: forward `spot·e^{(rate+carry)T}` discounted at
/// `rate`.
pub fn bs_option(
    kind: OptionKind,
    spot: f64,
    strike: f64,
    rate: f64,
    carry: f64,
    vol: f64,
    t: f64,
) -> Result<f64> {
    if !(spot > 0.0 && strike > 0.0 && t > 0.0) {
        return invalid("spot, strike and maturity must be positive");
    }
    if !(vol >= 0.0) {
        return invalid("volatility must be non-negative");
    }
    let fwd = spot * ((rate + carry) * t).exp();
    let df = (-rate * t).exp();
    if vol == 0.0 {
        let intrinsic = match kind {
            OptionKind::Call => (fwd - strike).max(0.0),
            OptionKind::Put => (strike - fwd).max(0.0),
        };
        return Ok(df * intrinsic);
    }
    let sd = vol * t.sqrt();
    let d1 = ((fwd / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    Ok(match kind {
        OptionKind::Call => df * (fwd * ncdf(d1) - strike * ncdf(d2)),
        OptionKind::Put => df * (strike * ncdf(-d2) - fwd * ncdf(-d1)),
    })
}

/// EPS on a normalized lognormal asset with growth `g` (forward `e^{gT}`),
/// discount rate `r` and volatility `vol`, written as explicit sums over
/// protection and fee breakpoints.
fn eps_lognormal(s: &EpsStructure, g: f64, r: f64, vol: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    let df = (-r * t).exp();
    let carry = ((g - r) * t).exp();
    let sd = vol * t.sqrt();
    // (d+, d−) at strike x, infinite in the zero-volatility limit.
    let ds = |x: f64| -> (f64, f64) {
        if sd == 0.0 {
            let d = if (g * t).exp() > x {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            return (d, d);
        }
        let dp = (-x.ln() + g * t + 0.5 * sd * sd) / sd;
        (dp, dp - sd)
    };
    let mut value = 0.0;
    let mut prev = 0.0;
    for (i, &p) in s.protection_rates().iter().enumerate() {
        let x = 1.0 + if i == 0 { 0.0 } else { s.loss_breaks()[i - 1] };
        let (dp, dm) = ds(x);
        value += (p - prev) * (x * df * ncdf(-dm) - carry * ncdf(-dp));
        prev = p;
    }
    let mut prev = 0.0;
    for (j, &f) in s.fee_rates().iter().enumerate() {
        let x = 1.0 + if j == 0 { 0.0 } else { s.gain_breaks()[j - 1] };
        let (dp, dm) = ds(x);
        value -= (f - prev) * (carry * ncdf(dp) - x * df * ncdf(dm));
        prev = f;
    }
    Ok(value)
}

/// Domestic EPS with volatility ‖σᵈ‖.
pub fn price_eps_domestic(s: &EpsStructure, params: &MarketParams, t: f64) -> Result<EpsQuote> {
    params.validate()?;
    let v = eps_lognormal(s, params.r_d, params.r_d, params.sigma_d.norm(), t)?;
    Ok(EpsQuote::domestic(v, ReturnKind::Domestic))
}

/// EPS on the nominal foreign return, quoted in foreign currency.
pub fn price_eps_nominal_foreign(
    s: &EpsStructure,
    params: &MarketParams,
    t: f64,
) -> Result<EpsQuote> {
    params.validate()?;
    let v = eps_lognormal(s, params.r_f, params.r_f, params.sigma_f.norm(), t)?;
    Ok(EpsQuote {
        value: v,
        kind: ReturnKind::NominalForeign,
        currency: Currency::Foreign,
        std_error: None,
    })
}

/// Foreign equity option struck in domestic currency, written on `Q·S^f`.
pub fn effective_option(
    kind: OptionKind,
    params: &MarketParams,
    strike_domestic: f64,
    t: f64,
) -> Result<f64> {
    params.validate()?;
    bs_option(
        kind,
        params.s_fe0(),
        strike_domestic,
        params.r_d,
        0.0,
        params.sigma_fe().norm(),
        t,
    )
}

/// EPS on the effective foreign return, volatility ‖σᶠ + σ^q‖.
pub fn price_eps_effective(s: &EpsStructure, params: &MarketParams, t: f64) -> Result<EpsQuote> {
    params.validate()?;
    let v = eps_lognormal(s, params.r_d, params.r_d, params.sigma_fe().norm(), t)?;
    Ok(EpsQuote::domestic(v, ReturnKind::EffectiveForeign))
}

/// Quanto option paying `q_bar·(S^f_T − K)⁺` (or the put) in domestic
/// currency.
pub fn quanto_option(
    kind: OptionKind,
    params: &MarketParams,
    strike_foreign: f64,
    t: f64,
    q_bar: f64,
) -> Result<f64> {
    params.validate()?;
    if !(q_bar > 0.0) {
        return invalid("guaranteed rate must be positive");
    }
    let v = bs_option(
        kind,
        params.s_f0,
        strike_foreign,
        params.r_d,
        delta_q(params),
        params.sigma_f.norm(),
        t,
    )?;
    Ok(q_bar * v)
}

/// Quanto foreign EPS scaled by the guaranteed rate `q_bar`.
pub fn price_eps_quanto(
    s: &EpsStructure,
    params: &MarketParams,
    t: f64,
    q_bar: f64,
) -> Result<EpsQuote> {
    params.validate()?;
    if !(q_bar > 0.0) {
        return invalid("guaranteed rate must be positive");
    }
    let g = params.r_d + delta_q(params);
    let v = eps_lognormal(s, g, params.r_d, params.sigma_f.norm(), t)?;
    Ok(EpsQuote::domestic(q_bar * v, ReturnKind::QuantoForeign))
}

/// `w·domestic + (1−w)·foreign`, both in domestic currency.
pub fn net_weighted_cost(w: f64, domestic: &EpsQuote, foreign: &EpsQuote) -> Result<EpsQuote> {
    check_weight(w)?;
    if domestic.currency != Currency::Domestic || foreign.currency != Currency::Domestic {
        return invalid("net weighted cost needs domestic-currency quotes");
    }
    Ok(EpsQuote::domestic(
        w * domestic.value + (1.0 - w) * foreign.value,
        foreign.kind,
    ))
}

/// Multiplier on the fee schedule of `s` that makes the quote vanish.
///
/// The quote is affine in the fee rates, so two evaluations suffice. With a
/// unit fee schedule the multiplier is the fair fee rate itself.
pub fn fair_fee<F>(s: &EpsStructure, mut pricer: F) -> Result<f64>
where
    F: FnMut(&EpsStructure) -> Result<f64>,
{
    let without = pricer(&s.scale_fees(0.0)?)?;
    let with = pricer(s)?;
    let fee_leg = without - with;
    if fee_leg == 0.0 || !fee_leg.is_finite() {
        return Err(EpsError::DivisionByZero("fee leg has zero value".into()));
    }
    Ok(without / fee_leg)
}
