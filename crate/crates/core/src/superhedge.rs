//! Dual-strike digital options, superhedging and approximate hedging of
//! aggregated buffer and floor EPSs.

use crate::basket::{aggregated_gross_return, BasketVariant};
use crate::error::{invalid, EpsError, Result};
use crate::market::{delta_q, LognormalStep, MarketParams};
use crate::mc::{self, McConfig};
use crate::numerics::bivariate_normal_cdf as phi2;
use crate::structure::{
    check_weight, EpsKind, EpsStructure, HedgePosition, OptionKind, TwoLegEps, Underlying,
};
use crate::vanilla::{
    bs_option, price_eps_domestic, price_eps_effective, price_eps_quanto, EpsQuote, ReturnKind,
};

/// Correlation between the domestic and effective foreign log-returns.
pub fn rho_effective(params: &MarketParams) -> Result<f64> {
    params.sigma_fe().cosine(&params.sigma_d)
}

/// Correlation between the domestic and nominal foreign log-returns.
pub fn rho_quanto(params: &MarketParams) -> Result<f64> {
    params.sigma_f.cosine(&params.sigma_d)
}

/// Prices of the four dual-strike digitals at one strike.
///
/// `call_dom` pays `(Ŝᵈ_T − K)⁺·1{Ŝ²_T ≥ K}`, `call_for` pays
/// `(Ŝ²_T − K)⁺·1{Ŝᵈ_T ≥ K}`, and the puts use `(K − ·)⁺` with `≤`
/// indicators, where `Ŝ²` is the effective or quanto foreign asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualDigitals {
    pub call_dom: f64,
    pub call_for: f64,
    pub put_dom: f64,
    pub put_for: f64,
}

fn dual_digitals(
    variant: BasketVariant,
    k: f64,
    params: &MarketParams,
    t: f64,
    scale: f64,
) -> Result<DualDigitals> {
    params.validate()?;
    if !(k > 0.0 && t > 0.0) {
        return invalid("strike and maturity must be positive");
    }
    let (s2, delta, rho) = match variant {
        BasketVariant::Effective => (params.sigma_fe(), 0.0, rho_effective(params)?),
        BasketVariant::Quanto => (params.sigma_f, delta_q(params), rho_quanto(params)?),
    };
    let n1 = params.sigma_d.norm();
    let n2 = s2.norm();
    let c12 = s2.dot(&params.sigma_d);
    let sq = t.sqrt();
    let kt = k * (-params.r_d * t).exp();
    let l = -kt.ln();
    let d1 = (l - 0.5 * n1 * n1 * t) / (n1 * sq);
    let d2 = (l + delta * t - 0.5 * n2 * n2 * t) / (n2 * sq);
    let g1 = (l + 0.5 * n1 * n1 * t) / (n1 * sq);
    let g2 = (l + delta * t + c12 * t - 0.5 * n2 * n2 * t) / (n2 * sq);
    let h1 = (l + c12 * t - 0.5 * n1 * n1 * t) / (n1 * sq);
    let h2 = (l + delta * t + 0.5 * n2 * n2 * t) / (n2 * sq);
    let growth = (delta * t).exp();
    Ok(DualDigitals {
        call_dom: phi2(g1, g2, rho)? - kt * phi2(d1, d2, rho)?,
        call_for: scale * (growth * phi2(h1, h2, rho)? - kt * phi2(d1, d2, rho)?),
        put_dom: kt * phi2(-d1, -d2, rho)? - phi2(-g1, -g2, rho)?,
        put_for: scale * (kt * phi2(-d1, -d2, rho)? - growth * phi2(-h1, -h2, rho)?),
    })
}

/// Effective-variant dual digitals on normalized assets.
pub fn effective_dual_digitals(k: f64, params: &MarketParams, t: f64) -> Result<DualDigitals> {
    dual_digitals(BasketVariant::Effective, k, params, t, 1.0)
}

pub fn dual_digital_call_dom(k: f64, params: &MarketParams, t: f64) -> Result<f64> {
    Ok(effective_dual_digitals(k, params, t)?.call_dom)
}

pub fn dual_digital_call_for(k: f64, params: &MarketParams, t: f64) -> Result<f64> {
    Ok(effective_dual_digitals(k, params, t)?.call_for)
}

pub fn dual_digital_put_dom(k: f64, params: &MarketParams, t: f64) -> Result<f64> {
    Ok(effective_dual_digitals(k, params, t)?.put_dom)
}

pub fn dual_digital_put_for(k: f64, params: &MarketParams, t: f64) -> Result<f64> {
    Ok(effective_dual_digitals(k, params, t)?.put_for)
}

/// Quanto-variant dual digitals. The foreign-paying legs are multiplied by
/// `quanto_scale`; a scale of 1 prices the normalized payoffs.
pub fn quanto_dual_digitals(
    k: f64,
    params: &MarketParams,
    t: f64,
    quanto_scale: f64,
) -> Result<DualDigitals> {
    if !(quanto_scale > 0.0) {
        return invalid("quanto scale must be positive");
    }
    dual_digitals(BasketVariant::Quanto, k, params, t, quanto_scale)
}

/// One priced position of a hedge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricedPosition {
    pub position: HedgePosition,
    pub price: f64,
}

/// Superhedge cost with its itemized positions on normalized assets.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperhedgeCost {
    pub value: f64,
    pub components: Vec<PricedPosition>,
}

fn foreign_tag(variant: BasketVariant) -> Underlying {
    match variant {
        BasketVariant::Effective => Underlying::SFe,
        BasketVariant::Quanto => Underlying::QuantoSF,
    }
}

/// Positions of the superhedge on normalized assets, unpriced.
pub fn superhedge_positions(
    eps: &TwoLegEps,
    variant: BasketVariant,
    w: f64,
) -> Result<Vec<HedgePosition>> {
    check_weight(w)?;
    eps.structure()?;
    let fx = foreign_tag(variant);
    let (kl, kg) = (1.0 + eps.l1, 1.0 + eps.g1);
    let mut out = Vec::new();
    for (weight, own, other) in [(w, Underlying::SD, fx), (1.0 - w, fx, Underlying::SD)] {
        let call = HedgePosition {
            indicator: Some(other),
            ..HedgePosition::new(OptionKind::Call, own, kg, -weight * eps.f)
        };
        match eps.kind {
            EpsKind::Buffer => {
                out.push(HedgePosition::new(OptionKind::Put, own, kl, weight * eps.p));
                out.push(call);
            }
            EpsKind::Floor => {
                out.push(HedgePosition::new(
                    OptionKind::Put,
                    own,
                    1.0,
                    weight * eps.p,
                ));
                out.push(HedgePosition {
                    indicator: Some(other),
                    ..HedgePosition::new(OptionKind::Put, own, kl, -weight * eps.p)
                });
                out.push(call);
            }
        }
    }
    Ok(out)
}

/// Superhedge cost with the foreign quanto legs scaled by `quanto_scale`.
pub fn superhedge_cost_scaled(
    eps: &TwoLegEps,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
    quanto_scale: f64,
) -> Result<SuperhedgeCost> {
    params.validate()?;
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    let positions = superhedge_positions(eps, variant, w)?;
    let scale = match variant {
        BasketVariant::Effective => 1.0,
        BasketVariant::Quanto => quanto_scale,
    };
    let fx = foreign_tag(variant);
    let (carry, vol_f) = match variant {
        BasketVariant::Effective => (0.0, params.sigma_fe().norm()),
        BasketVariant::Quanto => (delta_q(params), params.sigma_f.norm()),
    };
    let dual = |k: f64| dual_digitals(variant, k, params, t, 1.0);
    let mut components = Vec::with_capacity(positions.len());
    let mut value = 0.0;
    for pos in positions {
        let domestic = pos.underlying == Underlying::SD;
        let price = match pos.indicator {
            None if domestic => bs_option(
                pos.kind,
                1.0,
                pos.strike,
                params.r_d,
                0.0,
                params.sigma_d.norm(),
                t,
            )?,
            None => scale * bs_option(pos.kind, 1.0, pos.strike, params.r_d, carry, vol_f, t)?,
            Some(_) => {
                let dd = dual(pos.strike)?;
                match (pos.kind, domestic) {
                    (OptionKind::Call, true) => dd.call_dom,
                    (OptionKind::Put, true) => dd.put_dom,
                    (OptionKind::Call, false) => scale * dd.call_for,
                    (OptionKind::Put, false) => scale * dd.put_for,
                }
            }
        };
        debug_assert!(domestic || pos.underlying == fx);
        value += pos.quantity * price;
        components.push(PricedPosition {
            position: pos,
            price,
        });
    }
    Ok(SuperhedgeCost { value, components })
}

/// Superhedge cost of an aggregated buffer or floor EPS per unit notional.
pub fn superhedge_cost(
    eps: &TwoLegEps,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
) -> Result<SuperhedgeCost> {
    superhedge_cost_scaled(eps, variant, w, params, t, 1.0)
}

/// Superhedge for a general structure; only buffer and floor shapes are
/// supported.
pub fn superhedge_cost_for(
    s: &EpsStructure,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
) -> Result<SuperhedgeCost> {
    let eps = s.as_two_leg().ok_or_else(|| {
        EpsError::Unsupported("superhedge needs a buffer or floor structure".into())
    })?;
    superhedge_cost(&eps, variant, w, params, t)
}

/// Weighted separate-EPS cost on the aggregated strike levels. The quanto leg
/// is priced on the normalized foreign asset (unit guaranteed rate).
pub fn approx_hedge_cost(
    variant: BasketVariant,
    w: f64,
    s: &EpsStructure,
    params: &MarketParams,
    t: f64,
) -> Result<EpsQuote> {
    check_weight(w)?;
    let dom = price_eps_domestic(s, params, t)?.value;
    let foreign = match variant {
        BasketVariant::Effective => price_eps_effective(s, params, t)?.value,
        BasketVariant::Quanto => price_eps_quanto(s, params, t, 1.0)?.value,
    };
    let kind = match variant {
        BasketVariant::Effective => ReturnKind::AggregatedEffective,
        BasketVariant::Quanto => ReturnKind::AggregatedQuanto,
    };
    Ok(EpsQuote::domestic(w * dom + (1.0 - w) * foreign, kind))
}

/// Pathwise comparison of the superhedge payoff against the EPS liability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    pub n_paths: usize,
    /// Paths with superhedge payoff below the liability by more than 1e-12.
    pub violations: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
}

/// Terminal payoff of a position for normalized domestic and foreign levels.
fn position_payoff(pos: &HedgePosition, xd: f64, xf: f64) -> f64 {
    let level = |u: Underlying| if u == Underlying::SD { xd } else { xf };
    let x = level(pos.underlying);
    let gate = match (pos.kind, pos.indicator) {
        (_, None) => true,
        (OptionKind::Call, Some(u)) => level(u) >= pos.strike,
        (OptionKind::Put, Some(u)) => level(u) <= pos.strike,
    };
    if gate {
        pos.payoff(x)
    } else {
        0.0
    }
}

/// Counts paths on which the superhedge fails to cover `−ψ(R)`.
pub fn dominance_check(
    eps: &TwoLegEps,
    variant: BasketVariant,
    w: f64,
    params: &MarketParams,
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<DominanceReport> {
    params.validate()?;
    if !(t > 0.0) {
        return invalid("maturity must be positive");
    }
    let s = eps.structure()?;
    let positions = superhedge_positions(eps, variant, w)?;
    let step = LognormalStep::new(params, t);
    #[derive(Clone)]
    struct Acc {
        n: usize,
        violations: usize,
        min: f64,
        max: f64,
        sum: f64,
    }
    let init = Acc {
        n: 0,
        violations: 0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        sum: 0.0,
    };
    let acc = mc::fold_partitions(
        &McConfig::new(n_paths, seed),
        init,
        |a, z| {
            let g = step.gross(z);
            let (xd, xf, r) = aggregated_gross_return(variant, w, &g);
            let hedge: f64 = positions.iter().map(|p| position_payoff(p, xd, xf)).sum();
            let gap = hedge + s.psi_unchecked(r);
            a.n += 1;
            a.violations += usize::from(gap < -1e-12);
            a.min = a.min.min(gap);
            a.max = a.max.max(gap);
            a.sum += gap;
        },
        |a, b| Acc {
            n: a.n + b.n,
            violations: a.violations + b.violations,
            min: a.min.min(b.min),
            max: a.max.max(b.max),
            sum: a.sum + b.sum,
        },
    )?;
    Ok(DominanceReport {
        n_paths: acc.n,
        violations: acc.violations,
        min_gap: acc.min,
        max_gap: acc.max,
        mean_gap: acc.sum / acc.n as f64,
    })
}
