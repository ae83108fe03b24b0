//! Run configuration: a `key = value` text file with `[market]`,
//! `[correlation]`, `[run]`, `[mc]` and repeated `[row]` sections.

use std::path::Path;

use xccy_eps::market::build_vol_vectors;
use xccy_eps::structure::EpsKind;
use xccy_eps::{CorrelationInputs, EpsStructure, MarketParams, McConfig, TwoLegEps, VolVector};

use crate::error::CliError;

/// The bundled configuration: reference market and the 26 reference rows.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.conf");

/// One buffer or floor EPS held on a domestic/foreign split `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub kind: EpsKind,
    pub w: f64,
    pub l1: f64,
    pub g1: f64,
    pub p: f64,
    pub f: f64,
    /// Guaranteed rate for quanto legs; the spot rate when absent.
    pub q_bar: Option<f64>,
}

impl RowSpec {
    pub fn eps(&self) -> TwoLegEps {
        TwoLegEps {
            kind: self.kind,
            l1: self.l1,
            g1: self.g1,
            p: self.p,
            f: self.f,
        }
    }

    pub fn structure(&self) -> xccy_eps::Result<EpsStructure> {
        self.eps().structure()
    }

    pub fn q_bar(&self, market: &MarketParams) -> f64 {
        self.q_bar.unwrap_or(market.q0)
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            EpsKind::Buffer => "buffer",
            EpsKind::Floor => "floor",
        }
    }
}

/// Monte Carlo settings of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n_paths: usize,
    pub seed: u64,
}

impl McSettings {
    pub fn config(&self) -> McConfig {
        McConfig::new(self.n_paths, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub market: MarketParams,
    pub maturity: f64,
    /// Notional in AUD.
    pub notional: f64,
    pub mc: McSettings,
    pub rows: Vec<RowSpec>,
}

impl RunConfig {
    /// The bundled default configuration.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled configuration parses")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a configuration; keys that are not given keep the reference
    /// market values, a one-year maturity, a notional of 1,000,000 and
    /// 10⁶ simulation paths.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut market = MarketParams::default();
        let mut vectors_given = false;
        let mut correlation: Option<CorrelationInputs> = None;
        let mut maturity = 1.0;
        let mut notional = 1_000_000.0;
        let mut mc = McSettings {
            n_paths: 1_000_000,
            seed: 20_240_601,
        };
        let mut rows: Vec<PartialRow> = Vec::new();
        let mut section = Section::None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name.trim() {
                    "market" => Section::Market,
                    "correlation" => {
                        correlation.get_or_insert_with(CorrelationInputs::default);
                        Section::Correlation
                    }
                    "run" => Section::Run,
                    "mc" => Section::Mc,
                    "row" => {
                        rows.push(PartialRow {
                            line: line_no,
                            ..Default::default()
                        });
                        Section::Row
                    }
                    other => return Err(config_err(line_no, format!("unknown section [{other}]"))),
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| {
                    config_err(line_no, format!("expected `key = value`, got `{line}`"))
                })?;
            let num =
                || parse_number(value).map_err(|m| config_err(line_no, format!("{key}: {m}")));
            match section {
                Section::None => return Err(config_err(line_no, "key outside of a section")),
                Section::Market => match key {
                    "r_d" => market.r_d = num()?,
                    "r_f" => market.r_f = num()?,
                    "q0" => market.q0 = num()?,
                    "s_d0" => market.s_d0 = num()?,
                    "s_f0" => market.s_f0 = num()?,
                    "sigma_d" | "sigma_f" | "sigma_q" => {
                        let v = parse_vector(value)
                            .map_err(|m| config_err(line_no, format!("{key}: {m}")))?;
                        vectors_given = true;
                        match key {
                            "sigma_d" => market.sigma_d = v,
                            "sigma_f" => market.sigma_f = v,
                            _ => market.sigma_q = v,
                        }
                    }
                    _ => return Err(config_err(line_no, format!("unknown market key `{key}`"))),
                },
                Section::Correlation => {
                    let c = correlation.as_mut().expect("correlation section opened");
                    match key {
                        "vol_d" => c.vol_d = num()?,
                        "vol_f" => c.vol_f = num()?,
                        "vol_q" => c.vol_q = num()?,
                        "rho_df" => c.rho_df = num()?,
                        "rho_dq" => c.rho_dq = num()?,
                        "rho_fq" => c.rho_fq = num()?,
                        _ => {
                            return Err(config_err(
                                line_no,
                                format!("unknown correlation key `{key}`"),
                            ))
                        }
                    }
                }
                Section::Run => match key {
                    "maturity" => maturity = num()?,
                    "notional" => notional = num()?,
                    _ => return Err(config_err(line_no, format!("unknown run key `{key}`"))),
                },
                Section::Mc => match key {
                    "paths" => {
                        mc.n_paths = value
                            .parse()
                            .map_err(|_| config_err(line_no, "paths: expected a count"))?
                    }
                    "seed" => {
                        mc.seed = value
                            .parse()
                            .map_err(|_| config_err(line_no, "seed: expected a u64"))?
                    }
                    _ => return Err(config_err(line_no, format!("unknown mc key `{key}`"))),
                },
                Section::Row => {
                    let row = rows.last_mut().expect("row section opened");
                    match key {
                        "kind" => {
                            row.kind = Some(match value {
                                "buffer" => EpsKind::Buffer,
                                "floor" => EpsKind::Floor,
                                _ => {
                                    return Err(config_err(
                                        line_no,
                                        "kind must be `buffer` or `floor`",
                                    ))
                                }
                            })
                        }
                        "w" => row.w = Some(num()?),
                        "l1" => row.l1 = Some(num()?),
                        "g1" => row.g1 = Some(num()?),
                        "p" => row.p = Some(num()?),
                        "f" => row.f = Some(num()?),
                        "q_bar" => row.q_bar = Some(num()?),
                        _ => return Err(config_err(line_no, format!("unknown row key `{key}`"))),
                    }
                }
            }
        }

        if let Some(c) = correlation {
            if vectors_given {
                return Err(CliError::Config(
                    "give either sigma vectors in [market] or a [correlation] section, not both"
                        .into(),
                ));
            }
            let (d, f, q) = build_vol_vectors(&c).map_err(|e| CliError::Config(e.to_string()))?;
            market.sigma_d = d;
            market.sigma_f = f;
            market.sigma_q = q;
        }
        market
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(CliError::Config("maturity must be positive".into()));
        }
        if !(notional >= 0.0 && notional.is_finite()) {
            return Err(CliError::Config("notional must be non-negative".into()));
        }
        let rows = rows
            .into_iter()
            .map(PartialRow::finish)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RunConfig {
            market,
            maturity,
            notional,
            mc,
            rows,
        })
    }

    /// The 1-based row `index`.
    pub fn row(&self, index: usize) -> Result<&RowSpec, CliError> {
        if index == 0 || index > self.rows.len() {
            return Err(CliError::Usage(format!(
                "row {index} out of range 1..={}",
                self.rows.len()
            )));
        }
        Ok(&self.rows[index - 1])
    }
}

#[derive(Debug, Clone, Copy)]
enum Section {
    None,
    Market,
    Correlation,
    Run,
    Mc,
    Row,
}

#[derive(Debug, Default)]
struct PartialRow {
    line: usize,
    kind: Option<EpsKind>,
    w: Option<f64>,
    l1: Option<f64>,
    g1: Option<f64>,
    p: Option<f64>,
    f: Option<f64>,
    q_bar: Option<f64>,
}

impl PartialRow {
    fn finish(self) -> Result<RowSpec, CliError> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| config_err(self.line, format!("row is missing `{key}`")))
        };
        let row = RowSpec {
            kind: self
                .kind
                .ok_or_else(|| config_err(self.line, "row is missing `kind`"))?,
            w: need(self.w, "w")?,
            l1: need(self.l1, "l1")?,
            g1: need(self.g1, "g1")?,
            p: need(self.p, "p")?,
            f: need(self.f, "f")?,
            q_bar: self.q_bar,
        };
        if !(0.0..=1.0).contains(&row.w) {
            return Err(config_err(
                self.line,
                format!("weight {} outside [0, 1]", row.w),
            ));
        }
        if let Some(q) = row.q_bar {
            if !(q > 0.0) {
                return Err(config_err(self.line, "q_bar must be positive"));
            }
        }
        row.structure()
            .map_err(|e| config_err(self.line, e.to_string()))?;
        Ok(row)
    }
}

fn config_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("line {line}: {}", msg.into()))
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_vector(s: &str) -> Result<VolVector, String> {
    let parts = s
        .split(',')
        .map(|p| parse_number(p.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    match parts[..] {
        [a, b, c] => Ok(VolVector([a, b, c])),
        _ => Err(format!(
            "expected three comma-separated components, got {}",
            parts.len()
        )),
    }
}
