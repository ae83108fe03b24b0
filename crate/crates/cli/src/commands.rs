//! Command implementations. Each command returns typed results together
//! with renderers for CSV, JSON and plain text.

use serde_json::{json, Value};
use xccy_eps::basket::price_eps_aggregated;
use xccy_eps::market::simulate_path;
use xccy_eps::numerics::GaussianStream;
use xccy_eps::structure::Underlying;
use xccy_eps::superhedge::{approx_hedge_cost, superhedge_cost};
use xccy_eps::vanilla::{
    fair_fee, price_eps_domestic, price_eps_effective, price_eps_nominal_foreign, price_eps_quanto,
};
use xccy_eps::{BasketMethod, BasketVariant, EpsQuote, EpsStructure, MarketParams, OptionKind};

use crate::config::{RowSpec, RunConfig};
use crate::error::CliError;

/// Formats a value with 3 decimals; a result that rounds to zero prints
/// without a sign.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteKind {
    Domestic,
    Nominal,
    Effective,
    Quanto,
    Aggregated,
}

impl QuoteKind {
    pub fn label(self) -> &'static str {
        match self {
            QuoteKind::Domestic => "domestic",
            QuoteKind::Nominal => "nominal",
            QuoteKind::Effective => "effective",
            QuoteKind::Quanto => "quanto",
            QuoteKind::Aggregated => "aggregated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Geometric,
    Moments,
    Mc,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Geometric => "geometric",
            Method::Moments => "moments",
            Method::Mc => "mc",
        }
    }

    fn basket(self, cfg: &RunConfig) -> BasketMethod {
        match self {
            Method::Geometric => BasketMethod::Geometric,
            Method::Moments => BasketMethod::Moments,
            Method::Mc => BasketMethod::MonteCarlo(cfg.mc.config()),
        }
    }
}

pub fn variant_label(v: BasketVariant) -> &'static str {
    match v {
        BasketVariant::Effective => "effective",
        BasketVariant::Quanto => "quanto",
    }
}

/// A priced row with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricedQuote {
    pub quote: EpsQuote,
    pub kind: QuoteKind,
    pub variant: Option<BasketVariant>,
    pub method: &'static str,
}

/// Resolves the method and variant flags for a quote kind. Separate kinds
/// are priced in closed form and take neither flag; aggregated quotes
/// default to the effective variant and moment matching.
pub fn resolve_flags(
    kind: QuoteKind,
    variant: Option<BasketVariant>,
    method: Option<Method>,
) -> Result<(Option<BasketVariant>, Option<Method>), CliError> {
    match kind {
        QuoteKind::Aggregated => Ok((
            Some(variant.unwrap_or(BasketVariant::Effective)),
            Some(method.unwrap_or(Method::Moments)),
        )),
        _ => {
            if let Some(m) = method {
                return Err(CliError::Usage(format!(
                    "--method {} applies to aggregated quotes; {} quotes are closed form",
                    m.label(),
                    kind.label()
                )));
            }
            if variant.is_some() {
                return Err(CliError::Usage(format!(
                    "--variant applies to aggregated quotes, not {}",
                    kind.label()
                )));
            }
            Ok((None, None))
        }
    }
}

fn quote_structure(
    cfg: &RunConfig,
    row: &RowSpec,
    s: &EpsStructure,
    kind: QuoteKind,
    variant: Option<BasketVariant>,
    method: Option<Method>,
) -> Result<EpsQuote, CliError> {
    let (p, t) = (&cfg.market, cfg.maturity);
    let q = match kind {
        QuoteKind::Domestic => price_eps_domestic(s, p, t)?,
        QuoteKind::Nominal => price_eps_nominal_foreign(s, p, t)?,
        QuoteKind::Effective => price_eps_effective(s, p, t)?,
        QuoteKind::Quanto => price_eps_quanto(s, p, t, row.q_bar(p))?,
        QuoteKind::Aggregated => {
            let v = variant.expect("aggregated variant resolved");
            let m = method.expect("aggregated method resolved");
            price_eps_aggregated(s, v, row.w, p, t, m.basket(cfg))?
        }
    };
    Ok(q)
}

/// `price`: one quote for a configured row.
pub fn price(
    cfg: &RunConfig,
    row_index: usize,
    kind: QuoteKind,
    variant: Option<BasketVariant>,
    method: Option<Method>,
) -> Result<PricedQuote, CliError> {
    let row = cfg.row(row_index)?;
    let (variant, method) = resolve_flags(kind, variant, method)?;
    let quote = quote_structure(cfg, row, &row.structure()?, kind, variant, method)?;
    Ok(PricedQuote {
        quote,
        kind,
        variant,
        method: method.map_or("closed-form", Method::label),
    })
}

/// Amount in AUD for a quote on the configured notional.
pub fn quote_amount_aud(cfg: &RunConfig, q: &EpsQuote) -> f64 {
    q.domestic_value(&cfg.market) * cfg.notional
}

fn row_inputs(cfg: &RunConfig, index: usize, row: &RowSpec) -> Value {
    json!({
        "row": index,
        "kind": row.kind_label(),
        "w": row.w,
        "l1": row.l1,
        "g1": row.g1,
        "p": row.p,
        "f": row.f,
        "q_bar": row.q_bar(&cfg.market),
        "maturity": cfg.maturity,
        "notional": cfg.notional,
    })
}

pub fn price_json(cfg: &RunConfig, row_index: usize, pq: &PricedQuote) -> Result<Value, CliError> {
    let row = cfg.row(row_index)?;
    let mut inputs = row_inputs(cfg, row_index, row);
    inputs["return"] = json!(pq.kind.label());
    if let Some(v) = pq.variant {
        inputs["variant"] = json!(variant_label(v));
    }
    if pq.method == "mc" {
        inputs["paths"] = json!(cfg.mc.n_paths);
        inputs["seed"] = json!(cfg.mc.seed);
    }
    let mut out = json!({
        "value": pq.quote.per_100(),
        "per": "100-notional",
        "method": pq.method,
        "amount_aud": quote_amount_aud(cfg, &pq.quote),
        "inputs": inputs,
    });
    if let Some(se) = pq.quote.std_error {
        out["std_error"] = json!(100.0 * se);
    }
    Ok(out)
}

pub fn price_text(cfg: &RunConfig, pq: &PricedQuote) -> String {
    let mut s = fmt3(pq.quote.per_100());
    if let Some(se) = pq.quote.std_error {
        s.push_str(&format!(" ± {}", fmt3(100.0 * se)));
    }
    s.push_str(&format!(
        " per 100 notional ({}, {}); {} AUD on notional {}\n",
        pq.kind.label(),
        pq.method,
        fmt3(quote_amount_aud(cfg, &pq.quote)),
        cfg.notional
    ));
    s
}

/// One row of Table 2: separate quotes weighted by the row's split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparateRow {
    pub domestic: f64,
    pub nominal: f64,
    pub effective: f64,
    pub quanto: f64,
}

/// One row of Tables 3 and 4: aggregated quotes under each method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregatedRow {
    pub simulation: f64,
    pub std_error: f64,
    pub geometric: f64,
    pub moments: f64,
    pub superhedge: f64,
}

/// Quotes behind Table 2, as fractions of notional. The domestic column is
/// the unweighted domestic EPS; the others weight the domestic EPS by `w`
/// and the foreign EPS by `1 − w`.
pub fn separate_row(cfg: &RunConfig, row: &RowSpec) -> Result<SeparateRow, CliError> {
    let (p, t, w) = (&cfg.market, cfg.maturity, row.w);
    let s = row.structure()?;
    let dom = price_eps_domestic(&s, p, t)?.value;
    let nominal = price_eps_nominal_foreign(&s, p, t)?.domestic_value(p);
    let eff = price_eps_effective(&s, p, t)?.value;
    let quanto = price_eps_quanto(&s, p, t, row.q_bar(p))?.value;
    Ok(SeparateRow {
        domestic: dom,
        nominal: w * dom + (1.0 - w) * nominal,
        effective: w * dom + (1.0 - w) * eff,
        quanto: w * dom + (1.0 - w) * quanto,
    })
}

/// Quotes behind Tables 3 and 4 for one row.
pub fn aggregated_row(
    cfg: &RunConfig,
    row: &RowSpec,
    variant: BasketVariant,
) -> Result<AggregatedRow, CliError> {
    let (p, t, w) = (&cfg.market, cfg.maturity, row.w);
    let s = row.structure()?;
    let mc = price_eps_aggregated(
        &s,
        variant,
        w,
        p,
        t,
        BasketMethod::MonteCarlo(cfg.mc.config()),
    )?;
    let geometric = price_eps_aggregated(&s, variant, w, p, t, BasketMethod::Geometric)?.value;
    let moments = price_eps_aggregated(&s, variant, w, p, t, BasketMethod::Moments)?.value;
    let superhedge = superhedge_cost(&row.eps(), variant, w, p, t)?.value;
    Ok(AggregatedRow {
        simulation: mc.value,
        std_error: mc.std_error.unwrap_or(0.0),
        geometric,
        moments,
        superhedge,
    })
}

/// Rows of one reference table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableRows {
    Separate(Vec<SeparateRow>),
    Aggregated(Vec<AggregatedRow>),
}

pub fn table(cfg: &RunConfig, id: u8) -> Result<TableRows, CliError> {
    match id {
        2 => Ok(TableRows::Separate(
            cfg.rows
                .iter()
                .map(|r| separate_row(cfg, r))
                .collect::<Result<_, _>>()?,
        )),
        3 | 4 => {
            let variant = if id == 3 {
                BasketVariant::Effective
            } else {
                BasketVariant::Quanto
            };
            let rows = cfg
                .rows
                .iter()
                .map(|r| aggregated_row(cfg, r, variant))
                .collect::<Result<_, _>>()?;
            Ok(TableRows::Aggregated(rows))
        }
        _ => Err(CliError::Usage(format!(
            "unknown table {id}; expected 2, 3 or 4"
        ))),
    }
}

const ROW_HEADER: &str = "row,kind,w,l1,g1,p,f";

fn row_prefix(index: usize, row: &RowSpec) -> String {
    format!(
        "{index},{},{},{},{},{},{}",
        row.kind_label(),
        row.w,
        row.l1,
        row.g1,
        row.p,
        row.f
    )
}

/// CSV with values per 100 notional at 3 decimals.
pub fn table_csv(cfg: &RunConfig, rows: &TableRows) -> String {
    let mut out = String::new();
    match rows {
        TableRows::Separate(v) => {
            out.push_str(&format!("{ROW_HEADER},domestic,nominal,effective,quanto\n"));
            for (i, (spec, r)) in cfg.rows.iter().zip(v).enumerate() {
                let cols = [r.domestic, r.nominal, r.effective, r.quanto].map(|x| fmt3(100.0 * x));
                out.push_str(&format!("{},{}\n", row_prefix(i + 1, spec), cols.join(",")));
            }
        }
        TableRows::Aggregated(v) => {
            out.push_str(&format!(
                "{ROW_HEADER},simulation,std_error,geometric,moments,super\n"
            ));
            for (i, (spec, r)) in cfg.rows.iter().zip(v).enumerate() {
                let cols = [
                    r.simulation,
                    r.std_error,
                    r.geometric,
                    r.moments,
                    r.superhedge,
                ]
                .map(|x| fmt3(100.0 * x));
                out.push_str(&format!("{},{}\n", row_prefix(i + 1, spec), cols.join(",")));
            }
        }
    }
    out
}

/// JSON array of rows at full precision, per 100 notional.
pub fn table_json(cfg: &RunConfig, rows: &TableRows) -> Value {
    let items: Vec<Value> = match rows {
        TableRows::Separate(v) => cfg
            .rows
            .iter()
            .zip(v)
            .enumerate()
            .map(|(i, (spec, r))| {
                let mut o = row_inputs(cfg, i + 1, spec);
                o["domestic"] = json!(100.0 * r.domestic);
                o["nominal"] = json!(100.0 * r.nominal);
                o["effective"] = json!(100.0 * r.effective);
                o["quanto"] = json!(100.0 * r.quanto);
                o
            })
            .collect(),
        TableRows::Aggregated(v) => cfg
            .rows
            .iter()
            .zip(v)
            .enumerate()
            .map(|(i, (spec, r))| {
                let mut o = row_inputs(cfg, i + 1, spec);
                o["simulation"] = json!(100.0 * r.simulation);
                o["std_error"] = json!(100.0 * r.std_error);
                o["geometric"] = json!(100.0 * r.geometric);
                o["moments"] = json!(100.0 * r.moments);
                o["super"] = json!(100.0 * r.superhedge);
                o
            })
            .collect(),
    };
    json!({ "per": "100-notional", "rows": items })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Replication,
    Superhedge,
    Approximate,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Replication => "replication",
            Strategy::Superhedge => "superhedge",
            Strategy::Approximate => "approximate",
        }
    }
}

/// One traded option of a hedge ticket.
#[derive(Debug, Clone, PartialEq)]
pub struct TicketLine {
    pub long: bool,
    pub kind: OptionKind,
    pub underlying: Underlying,
    pub indicator: Option<Underlying>,
    /// Strike in the display currency of the underlying.
    pub strike: f64,
    pub currency: &'static str,
    /// Exact number of option units; displays round to whole units.
    pub units: f64,
}

impl TicketLine {
    pub fn display_units(&self) -> f64 {
        self.units.round_ties_even()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeTicket {
    pub strategy: Strategy,
    pub variant: BasketVariant,
    pub row: usize,
    pub notional: f64,
    /// Initial level in AUD of each underlying that appears on the ticket.
    pub levels: Vec<(Underlying, f64)>,
    pub lines: Vec<TicketLine>,
    /// Cost of the hedge, as a fraction of notional.
    pub premium: f64,
    pub premium_std_error: Option<f64>,
    pub method: &'static str,
}

impl HedgeTicket {
    pub fn premium_aud(&self) -> f64 {
        self.premium * self.notional
    }
}

/// Initial AUD level of an underlying, and the factor converting a
/// normalized strike to the display currency.
fn levels(u: Underlying, p: &MarketParams, w: f64, q_bar: f64) -> (f64, f64, &'static str) {
    match u {
        Underlying::SD => (p.s_d0, p.s_d0, "AUD"),
        Underlying::SF => (p.s_f0, p.s_f0, "USD"),
        Underlying::SFe => (p.s_fe0(), p.s_fe0(), "AUD"),
        Underlying::QuantoSF => (q_bar * p.s_f0, p.s_f0, "USD"),
        Underlying::BasketEffective => {
            let l = w * p.s_d0 + (1.0 - w) * p.s_fe0();
            (l, l, "AUD")
        }
        Underlying::BasketQuanto => {
            let l = w * p.s_d0 + (1.0 - w) * q_bar * p.s_f0;
            (l, l, "AUD")
        }
        Underlying::Normalized => (1.0, 1.0, ""),
    }
}

fn foreign_underlying(v: BasketVariant) -> Underlying {
    match v {
        BasketVariant::Effective => Underlying::SFe,
        BasketVariant::Quanto => Underlying::QuantoSF,
    }
}

/// `hedge`: the option ticket for a configured row. Unit counts are
/// `notional·|quantity|/level` for the AUD level of each underlying.
pub fn hedge(
    cfg: &RunConfig,
    row_index: usize,
    strategy: Strategy,
    variant: BasketVariant,
    method: Option<Method>,
) -> Result<HedgeTicket, CliError> {
    let row = cfg.row(row_index)?;
    let (p, t, w, n) = (&cfg.market, cfg.maturity, row.w, cfg.notional);
    let q_bar = row.q_bar(p);
    let s = row.structure()?;
    if method.is_some() && strategy != Strategy::Replication {
        return Err(CliError::Usage(format!(
            "--method applies to the replication strategy, not {}",
            strategy.label()
        )));
    }

    // (position kind, underlying, indicator, normalized strike, quantity per unit notional)
    let mut raw: Vec<(OptionKind, Underlying, Option<Underlying>, f64, f64)> = Vec::new();
    let (premium, premium_std_error, method_label) = match strategy {
        Strategy::Replication => {
            let basket = match variant {
                BasketVariant::Effective => Underlying::BasketEffective,
                BasketVariant::Quanto => Underlying::BasketQuanto,
            };
            for pos in s.replication_weights(basket).positions {
                raw.push((pos.kind, basket, None, pos.strike, pos.quantity));
            }
            let m = method.unwrap_or(Method::Moments);
            let q = price_eps_aggregated(&s, variant, w, p, t, m.basket(cfg))?;
            (q.value, q.std_error, m.label())
        }
        Strategy::Superhedge => {
            let cost = superhedge_cost(&row.eps(), variant, w, p, t)?;
            for c in &cost.components {
                let pos = c.position;
                raw.push((
                    pos.kind,
                    pos.underlying,
                    pos.indicator,
                    pos.strike,
                    pos.quantity,
                ));
            }
            (cost.value, None, "closed-form")
        }
        Strategy::Approximate => {
            let fx = foreign_underlying(variant);
            for (weight, u) in [(w, Underlying::SD), (1.0 - w, fx)] {
                for pos in s.replication_weights(u).positions {
                    raw.push((pos.kind, u, None, pos.strike, weight * pos.quantity));
                }
            }
            (
                approx_hedge_cost(variant, w, &s, p, t)?.value,
                None,
                "closed-form",
            )
        }
    };

    let mut lines = Vec::new();
    let mut seen: Vec<(Underlying, f64)> = Vec::new();
    if n > 0.0 {
        for (kind, u, indicator, strike, qty) in raw {
            if qty == 0.0 {
                continue;
            }
            let (level_aud, display, currency) = levels(u, p, w, q_bar);
            if !seen.iter().any(|(x, _)| *x == u) {
                seen.push((u, level_aud));
            }
            lines.push(TicketLine {
                long: qty > 0.0,
                kind,
                underlying: u,
                indicator,
                strike: strike * display,
                currency,
                units: n * qty.abs() / level_aud,
            });
        }
    }
    Ok(HedgeTicket {
        strategy,
        variant,
        row: row_index,
        notional: n,
        levels: seen,
        lines,
        premium: if n > 0.0 { premium } else { 0.0 },
        premium_std_error,
        method: method_label,
    })
}

fn kind_label(k: OptionKind) -> &'static str {
    match k {
        OptionKind::Put => "put",
        OptionKind::Call => "call",
    }
}

pub fn hedge_text(ticket: &HedgeTicket) -> String {
    let mut s = format!(
        "{} hedge, row {}, {} variant, notional {} AUD\n",
        ticket.strategy.label(),
        ticket.row,
        variant_label(ticket.variant),
        ticket.notional
    );
    for (u, level) in &ticket.levels {
        s.push_str(&format!(
            "  {} initial level {} AUD\n",
            u.label(),
            fmt3(*level)
        ));
    }
    for l in &ticket.lines {
        let gate = l
            .indicator
            .map(|g| format!(" gated on {}", g.label()))
            .unwrap_or_default();
        s.push_str(&format!(
            "  {} {} {} on {}{} strike {} {}\n",
            if l.long { "long" } else { "short" },
            l.display_units(),
            kind_label(l.kind),
            l.underlying.label(),
            gate,
            fmt3(l.strike),
            l.currency
        ));
    }
    s.push_str(&format!(
        "premium {} per 100 notional",
        fmt3(100.0 * ticket.premium)
    ));
    if let Some(se) = ticket.premium_std_error {
        s.push_str(&format!(" ± {}", fmt3(100.0 * se)));
    }
    s.push_str(&format!(
        " ({}); {} AUD\n",
        ticket.method,
        fmt3(ticket.premium_aud())
    ));
    s
}

pub fn hedge_json(ticket: &HedgeTicket) -> Value {
    let lines: Vec<Value> = ticket
        .lines
        .iter()
        .map(|l| {
            json!({
                "side": if l.long { "long" } else { "short" },
                "kind": kind_label(l.kind),
                "underlying": l.underlying.label(),
                "indicator": l.indicator.map(|g| g.label()),
                "strike": l.strike,
                "currency": l.currency,
                "units": l.units,
            })
        })
        .collect();
    let levels: Vec<Value> = ticket
        .levels
        .iter()
        .map(|(u, v)| json!({ "underlying": u.label(), "level_aud": v }))
        .collect();
    let mut out = json!({
        "strategy": ticket.strategy.label(),
        "variant": variant_label(ticket.variant),
        "row": ticket.row,
        "notional": ticket.notional,
        "levels": levels,
        "positions": lines,
        "value": 100.0 * ticket.premium,
        "per": "100-notional",
        "premium_aud": ticket.premium_aud(),
        "method": ticket.method,
    });
    if let Some(se) = ticket.premium_std_error {
        out["std_error"] = json!(100.0 * se);
    }
    out
}

/// Fair fee of a row together with the quote repriced at that fee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairFee {
    pub rate: f64,
    pub repriced: EpsQuote,
    pub kind: QuoteKind,
    pub method: &'static str,
}

/// `fair-fee`: the fee rate making the quote of a row vanish, found on the
/// row's structure with a unit fee rate.
pub fn fair_fee_row(
    cfg: &RunConfig,
    row_index: usize,
    kind: QuoteKind,
    variant: Option<BasketVariant>,
    method: Option<Method>,
) -> Result<FairFee, CliError> {
    let row = cfg.row(row_index)?;
    let (variant, method) = resolve_flags(kind, variant, method)?;
    let unit = row.structure()?.scale_fees(1.0 / row.f)?;
    let rate = fair_fee(&unit, |s| {
        quote_structure(cfg, row, s, kind, variant, method)
            .map(|q| q.value)
            .map_err(|e| match e {
                CliError::Model(m) => m,
                other => xccy_eps::EpsError::InvalidInput(other.to_string()),
            })
    })?;
    let repriced = quote_structure(cfg, row, &unit.scale_fees(rate)?, kind, variant, method)?;
    Ok(FairFee {
        rate,
        repriced,
        kind,
        method: method.map_or("closed-form", Method::label),
    })
}

pub fn fair_fee_text(ff: &FairFee) -> String {
    format!(
        "fair fee rate {:.6} ({}, {}); repriced quote {} per 100 notional\n",
        ff.rate,
        ff.kind.label(),
        ff.method,
        fmt3(ff.repriced.per_100())
    )
}

pub fn fair_fee_json(ff: &FairFee) -> Value {
    json!({
        "fair_fee": ff.rate,
        "return": ff.kind.label(),
        "method": ff.method,
        "repriced": ff.repriced.per_100(),
        "per": "100-notional",
    })
}

/// `paths`: long-format CSV of simulated paths, one block per path. Path
/// `i` draws from stream `i` of the seed.
pub fn paths_csv(
    cfg: &RunConfig,
    steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<String, CliError> {
    if steps == 0 || n_paths == 0 {
        return Err(CliError::Usage("steps and paths must be at least 1".into()));
    }
    let mut out = String::from("path,t,s_d,s_f,q,s_fe\n");
    for i in 0..n_paths {
        for pt in simulate_path(
            &cfg.market,
            cfg.maturity,
            steps,
            GaussianStream::new(seed, i as u64),
        )? {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i + 1,
                pt.t,
                pt.s_d,
                pt.s_f,
                pt.q,
                pt.s_fe
            ));
        }
    }
    Ok(out)
}
