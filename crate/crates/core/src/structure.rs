//! EPS payoff algebra: structures, the adjusted return ψ and static
//! replication weights.

use crate::error::{invalid, EpsError, Result};
use crate::market::MarketParams;

/// Whether participation rates above one are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateCheck {
    /// Rates must lie in `[0, 1]`.
    #[default]
    Unit,
    /// Rates above one are accepted with a logged warning.
    AllowAboveOne,
}

/// Breakpoints and marginal participation rates of an EPS.
///
/// `protection_rates[i]` applies on `(l_{i+1}, l_i)` with `l_0 = 0` and
/// `l_{n+1} = -1`; `fee_rates[j]` applies on `(g_j, g_{j+1})` with `g_0 = 0`
/// and `g_{m+1} = ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsStructure {
    loss_breaks: Vec<f64>,
    protection_rates: Vec<f64>,
    gain_breaks: Vec<f64>,
    fee_rates: Vec<f64>,
}

/// The two standard single-tier shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsKind {
    Buffer,
    Floor,
}

/// A buffer or floor EPS given by its four parameters. For a buffer `p` is
/// the rate below `l1`; for a floor it is the rate on `(l1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLegEps {
    pub kind: EpsKind,
    pub l1: f64,
    pub g1: f64,
    pub p: f64,
    pub f: f64,
}

impl TwoLegEps {
    pub fn buffer(l1: f64, g1: f64, p: f64, f: f64) -> Self {
        TwoLegEps {
            kind: EpsKind::Buffer,
            l1,
            g1,
            p,
            f,
        }
    }

    pub fn floor(l1: f64, g1: f64, p: f64, f: f64) -> Self {
        TwoLegEps {
            kind: EpsKind::Floor,
            l1,
            g1,
            p,
            f,
        }
    }

    pub fn structure(&self) -> Result<EpsStructure> {
        self.structure_with(RateCheck::Unit)
    }

    pub fn structure_with(&self, check: RateCheck) -> Result<EpsStructure> {
        match self.kind {
            EpsKind::Buffer => make_buffer_with(self.l1, self.g1, self.p, self.f, check),
            EpsKind::Floor => make_floor_with(self.l1, self.g1, self.p, self.f, check),
        }
    }

    /// Same shape with a different fee rate.
    pub fn with_fee(&self, f: f64) -> Self {
        TwoLegEps { f, ..*self }
    }
}

impl EpsStructure {
    pub fn new(
        loss_breaks: Vec<f64>,
        protection_rates: Vec<f64>,
        gain_breaks: Vec<f64>,
        fee_rates: Vec<f64>,
        check: RateCheck,
    ) -> Result<Self> {
        if protection_rates.len() != loss_breaks.len() + 1 {
            return invalid("need one more protection rate than loss breaks");
        }
        if fee_rates.len() != gain_breaks.len() + 1 {
            return invalid("need one more fee rate than gain breaks");
        }
        let mut prev = 0.0;
        for &l in &loss_breaks {
            if !(l < prev && l > -1.0) {
                return invalid(format!(
                    "loss breaks must decrease strictly inside (-1, 0), got {l}"
                ));
            }
            prev = l;
        }
        let mut prev = 0.0;
        for &g in &gain_breaks {
            if !(g > prev && g.is_finite()) {
                return invalid(format!(
                    "gain breaks must increase strictly above 0, got {g}"
                ));
            }
            prev = g;
        }
        for &r in protection_rates.iter().chain(fee_rates.iter()) {
            if !(r >= 0.0 && r.is_finite()) {
                return invalid(format!("participation rate {r} must be non-negative"));
            }
            if r > 1.0 {
                match check {
                    RateCheck::Unit => return invalid(format!("participation rate {r} exceeds 1")),
                    RateCheck::AllowAboveOne => log::warn!("participation rate {r} exceeds 1"),
                }
            }
        }
        Ok(EpsStructure {
            loss_breaks,
            protection_rates,
            gain_breaks,
            fee_rates,
        })
    }

    pub fn loss_breaks(&self) -> &[f64] {
        &self.loss_breaks
    }

    pub fn protection_rates(&self) -> &[f64] {
        &self.protection_rates
    }

    pub fn gain_breaks(&self) -> &[f64] {
        &self.gain_breaks
    }

    pub fn fee_rates(&self) -> &[f64] {
        &self.fee_rates
    }

    /// Recognizes buffer and floor shapes.
    pub fn as_two_leg(&self) -> Option<TwoLegEps> {
        if self.loss_breaks.len() != 1 || self.gain_breaks.len() != 1 || self.fee_rates[0] != 0.0 {
            return None;
        }
        let (l1, g1, f) = (self.loss_breaks[0], self.gain_breaks[0], self.fee_rates[1]);
        let (p1, p2) = (self.protection_rates[0], self.protection_rates[1]);
        if p1 == 0.0 {
            Some(TwoLegEps::buffer(l1, g1, p2, f))
        } else if p2 == 0.0 {
            Some(TwoLegEps::floor(l1, g1, p1, f))
        } else {
            None
        }
    }

    /// Protection part ψ^p(R) ≤ 0.
    pub fn psi_protection(&self, r: f64) -> f64 {
        if r >= 0.0 {
            return 0.0;
        }
        let mut upper = 0.0;
        let mut acc = 0.0;
        for (i, &p) in self.protection_rates.iter().enumerate() {
            let lower = self.loss_breaks.get(i).copied().unwrap_or(-1.0);
            if r < upper {
                acc += p * (upper - r.max(lower));
            }
            upper = lower;
        }
        -acc
    }

    /// Fee part ψ^f(R) ≥ 0.
    pub fn psi_fee(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let mut lower = 0.0;
        let mut acc = 0.0;
        for (j, &f) in self.fee_rates.iter().enumerate() {
            let upper = self.gain_breaks.get(j).copied().unwrap_or(f64::INFINITY);
            if r > lower {
                acc += f * (r.min(upper) - lower);
            }
            lower = upper;
        }
        acc
    }

    /// Adjusted return ψ(R) received by the provider.
    pub fn psi(&self, r: f64) -> Result<f64> {
        if !(r > -1.0) {
            return invalid(format!("return {r} must exceed -1"));
        }
        Ok(self.psi_unchecked(r))
    }

    #[inline]
    pub(crate) fn psi_unchecked(&self, r: f64) -> f64 {
        self.psi_protection(r) + self.psi_fee(r)
    }

    /// Static hedge on the normalized underlying: puts at `1 + l_i` with
    /// quantity `p_{i+1} − p_i`, calls at `1 + g_j` with quantity
    /// `−(f_{j+1} − f_j)`. Its terminal value is `−ψ(R)`.
    pub fn replication_weights(&self, underlying: Underlying) -> HedgePortfolio {
        let mut positions = Vec::new();
        let mut prev = 0.0;
        for (i, &p) in self.protection_rates.iter().enumerate() {
            let level = if i == 0 { 0.0 } else { self.loss_breaks[i - 1] };
            let q = p - prev;
            if q != 0.0 {
                positions.push(HedgePosition::new(
                    OptionKind::Put,
                    underlying,
                    1.0 + level,
                    q,
                ));
            }
            prev = p;
        }
        let mut prev = 0.0;
        for (j, &f) in self.fee_rates.iter().enumerate() {
            let level = if j == 0 { 0.0 } else { self.gain_breaks[j - 1] };
            let q = -(f - prev);
            if q != 0.0 {
                positions.push(HedgePosition::new(
                    OptionKind::Call,
                    underlying,
                    1.0 + level,
                    q,
                ));
            }
            prev = f;
        }
        HedgePortfolio { positions }
    }

    /// Σ quantity·price over the replication weights; the price of the
    /// payoff `−ψ(R)` given a pricer for normalized puts and calls.
    pub fn price_with<F>(&self, mut price: F) -> Result<f64>
    where
        F: FnMut(OptionKind, f64) -> Result<f64>,
    {
        let mut total = 0.0;
        for pos in self.replication_weights(Underlying::Normalized).positions {
            total += pos.quantity * price(pos.kind, pos.strike)?;
        }
        Ok(total)
    }

    /// Copy with every fee rate multiplied by `scale`.
    pub fn scale_fees(&self, scale: f64) -> Result<Self> {
        EpsStructure::new(
            self.loss_breaks.clone(),
            self.protection_rates.clone(),
            self.gain_breaks.clone(),
            self.fee_rates.iter().map(|f| f * scale).collect(),
            RateCheck::AllowAboveOne,
        )
    }
}

/// Buffer EPS: protection `p2` below `l1`, fee `f2` above `g1`.
pub fn make_buffer(l1: f64, g1: f64, p2: f64, f2: f64) -> Result<EpsStructure> {
    make_buffer_with(l1, g1, p2, f2, RateCheck::Unit)
}

pub fn make_buffer_with(
    l1: f64,
    g1: f64,
    p2: f64,
    f2: f64,
    check: RateCheck,
) -> Result<EpsStructure> {
    if !(p2 > 0.0 && f2 > 0.0) {
        return invalid("buffer rates must be positive");
    }
    EpsStructure::new(vec![l1], vec![0.0, p2], vec![g1], vec![0.0, f2], check)
}

/// Floor EPS: protection `p1` on `(l1, 0)`, fee `f2` above `g1`.
pub fn make_floor(l1: f64, g1: f64, p1: f64, f2: f64) -> Result<EpsStructure> {
    make_floor_with(l1, g1, p1, f2, RateCheck::Unit)
}

pub fn make_floor_with(
    l1: f64,
    g1: f64,
    p1: f64,
    f2: f64,
    check: RateCheck,
) -> Result<EpsStructure> {
    if !(p1 > 0.0 && f2 > 0.0) {
        return invalid("floor rates must be positive");
    }
    EpsStructure::new(vec![l1], vec![p1, 0.0], vec![g1], vec![0.0, f2], check)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptionKind {
    Put,
    Call,
}

/// The asset an option position is written on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Underlying {
    /// A generic underlying normalized to 1 at inception.
    Normalized,
    SD,
    SF,
    SFe,
    QuantoSF,
    BasketEffective,
    BasketQuanto,
}

impl Underlying {
    pub fn label(&self) -> &'static str {
        match self {
            Underlying::Normalized => "X",
            Underlying::SD => "S_d",
            Underlying::SF => "S_f",
            Underlying::SFe => "S_fe",
            Underlying::QuantoSF => "QuantoS_f",
            Underlying::BasketEffective => "S_we",
            Underlying::BasketQuanto => "S_wq",
        }
    }
}

/// One option position; `indicator` names the asset gating a dual-strike
/// digital payoff at the same strike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgePosition {
    pub kind: OptionKind,
    pub underlying: Underlying,
    pub strike: f64,
    pub quantity: f64,
    pub indicator: Option<Underlying>,
}

impl HedgePosition {
    pub fn new(kind: OptionKind, underlying: Underlying, strike: f64, quantity: f64) -> Self {
        HedgePosition {
            kind,
            underlying,
            strike,
            quantity,
            indicator: None,
        }
    }

    /// Terminal payoff for an underlying level `x`, ignoring any indicator.
    pub fn payoff(&self, x: f64) -> f64 {
        let intrinsic = match self.kind {
            OptionKind::Put => (self.strike - x).max(0.0),
            OptionKind::Call => (x - self.strike).max(0.0),
        };
        self.quantity * intrinsic
    }
}

/// A static portfolio of option positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HedgePortfolio {
    pub positions: Vec<HedgePosition>,
}

impl HedgePortfolio {
    /// Terminal value when every position's underlying ends at `x`.
    pub fn payoff(&self, x: f64) -> f64 {
        self.positions.iter().map(|p| p.payoff(x)).sum()
    }
}

/// Return on the foreign asset measured in domestic currency.
pub fn effective_return(r_f: f64, r_q: f64) -> f64 {
    r_f + r_q + r_f * r_q
}

/// Weighted return `w·r_d + (1−w)·r_foreign`.
pub fn aggregated_return(w: f64, r_d: f64, r_foreign: f64) -> f64 {
    w * r_d + (1.0 - w) * r_foreign
}

/// Split of a domestic notional into equity holdings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioSplit {
    pub notional: f64,
    pub w: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl PortfolioSplit {
    pub fn new(notional: f64, w: f64, params: &MarketParams) -> Result<Self> {
        check_weight(w)?;
        params.validate()?;
        Ok(PortfolioSplit {
            notional,
            w,
            alpha0: w * notional / params.s_d0,
            beta0: (1.0 - w) * notional / (params.q0 * params.s_f0),
        })
    }
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(EpsError::InvalidInput(format!("weight {w} outside [0, 1]")));
    }
    Ok(())
}
