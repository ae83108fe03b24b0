//! Pricing and hedging of cross-currency equity protection swaps (EPSs).
//!
//! An EPS pays its provider `N·ψ(R_T)` at maturity, where `R_T` is the return
//! on a reference portfolio and `ψ` trades losses for gains through
//! protection and fee legs. This crate prices EPSs whose reference return is
//! domestic, foreign (nominal, effective or quanto) or an aggregate of a
//! domestic and a foreign holding, in a three-factor lognormal model under
//! the domestic martingale measure, and builds static, super- and
//! approximate hedges.
//!
//! Quotes are fractions of notional and equal the value of the static hedge
//! whose terminal value is `−ψ(R_T)`: negative quotes mean the fee leg is
//! worth more than the protection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basket;
pub mod error;
pub mod market;
pub mod mc;
pub mod numerics;
pub mod structure;
pub mod superhedge;
pub mod vanilla;

pub use basket::{BasketMethod, BasketVariant};
pub use error::{EpsError, Result};
pub use market::{CorrelationInputs, MarketParams, VolVector};
pub use mc::{McConfig, McEstimate};
pub use structure::{EpsKind, EpsStructure, OptionKind, TwoLegEps};
pub use vanilla::{EpsQuote, ReturnKind};
