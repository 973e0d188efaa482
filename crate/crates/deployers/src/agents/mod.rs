//! Agent state types and pure behavioral rules.
//!
//! Everything here is a pure function of explicit state; mutation happens
//! only in the engine. Wallet balances live in the engine ledger; agents keep
//! a wallet handle.

mod clearing;
mod rules;

pub use clearing::{clearing_house_match, Order, OrderSide, Trade};
pub use rules::*;

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

pub type HouseholdId = u32;
pub type FirmId = u32;
pub type BankId = u32;
pub type WalletId = u32;

/// Reference price all goods start at: one currency unit per goods unit.
pub const REF_PRICE_CENTS: f64 = 100.0;

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("all allocation weights are zero")]
    AllWeightsZero,
    #[error("zero distribution column")]
    ZeroColumn,
    #[error("negative output {0}")]
    NegativeOutput(f64),
    #[error("negative quantity {0}")]
    NegativeQuantity(i64),
    #[error("order references unknown share {0}")]
    UnknownShare(u32),
}

/// Household behavioral parameters (the buffer-stock rule and the price
/// sensitivity of the consumption mix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdParams {
    /// Sensitivity of consumption to the wealth buffer.
    pub kappa: f64,
    /// Buffer size in months of income.
    pub phi: f64,
    /// Price sensitivity of the logit consumption mix.
    pub beta_logit: f64,
    /// Share of monthly surplus kept as bank deposits; the rest goes to
    /// risky assets via the stock market.
    pub deposit_fraction: f64,
}

impl Default for HouseholdParams {
    fn default() -> Self {
        HouseholdParams { kappa: 0.1, phi: 3.0, beta_logit: 1.0, deposit_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Household {
    pub id: HouseholdId,
    pub wallet: WalletId,
    pub cell: u32,
    pub shopping_day: u8,
    pub employer: Option<FirmId>,
    pub owned_firm: Option<FirmId>,
    pub owned_bank: Option<BankId>,
    /// Share holdings per firm, sorted by firm id.
    pub shares: Vec<(FirmId, i64)>,
    /// Personal quoted price per firm share, adjusted after each batch.
    pub share_quotes: Vec<(FirmId, f64)>,
    /// Net income received in each of the last months, most recent last.
    pub income_history: VecDeque<i64>,
    pub income_this_month: i64,
}

impl Household {
    /// Trailing mean of recorded monthly net income, in cents.
    pub fn income_avg(&self) -> i64 {
        if self.income_history.is_empty() {
            return 0;
        }
        let sum: i64 = self.income_history.iter().sum();
        sum / self.income_history.len() as i64
    }

    pub fn holding(&self, firm: FirmId) -> i64 {
        self.shares
            .binary_search_by_key(&firm, |(f, _)| *f)
            .map(|i| self.shares[i].1)
            .unwrap_or(0)
    }

    pub fn add_shares(&mut self, firm: FirmId, qty: i64) {
        match self.shares.binary_search_by_key(&firm, |(f, _)| *f) {
            Ok(i) => {
                self.shares[i].1 += qty;
                if self.shares[i].1 == 0 {
                    self.shares.remove(i);
                }
            }
            Err(i) => {
                if qty != 0 {
                    self.shares.insert(i, (firm, qty));
                }
            }
        }
    }

    pub fn quote_for(&self, firm: FirmId, fallback: f64) -> f64 {
        self.share_quotes
            .iter()
            .find(|(f, _)| *f == firm)
            .map(|(_, q)| *q)
            .unwrap_or(fallback)
    }

    pub fn set_quote(&mut self, firm: FirmId, quote: f64) {
        match self.share_quotes.iter_mut().find(|(f, _)| *f == firm) {
            Some(entry) => entry.1 = quote,
            None => self.share_quotes.push((firm, quote)),
        }
    }
}

/// Monthly profit-and-loss scratchpad, reset at each month start.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FirmMonth {
    /// Revenue from goods sales, cents.
    pub sales_cents: i64,
    /// Units sold.
    pub sales_units: f64,
    /// Value of this month's production at the firm's price, cents.
    pub production_value_cents: i64,
    /// Intermediate consumption purchases, cents.
    pub ic_spent_cents: i64,
    /// Wages paid, cents.
    pub wages_cents: i64,
    /// Interest paid, cents.
    pub interest_cents: i64,
    /// Taxes paid (negative = subsidies received), cents.
    pub taxes_cents: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Firm {
    pub id: FirmId,
    /// Account index of the firm's sector in the scaled targets.
    pub sector: u16,
    pub cell: u32,
    pub owner: HouseholdId,
    pub wallet: WalletId,
    /// Posted price, cents per unit.
    pub price: f64,
    /// Inventory in goods units.
    pub inventory: f64,
    pub employees: Vec<HouseholdId>,
    pub vacancies: u32,
    /// Fixed day of the month for productive activity.
    pub production_day: u8,
    /// Units demanded in each of the last months, most recent last.
    pub demand_window: VecDeque<f64>,
    /// Units demanded so far this month (sold plus turned-away demand).
    pub demand_this_month: f64,
    pub month: FirmMonth,
    /// Profit of recent months, most recent last.
    pub profit_history: VecDeque<i64>,
    pub months_alive: u32,
    pub capital_units: f64,
    pub listed: bool,
    pub shares_outstanding: i64,
    pub alive: bool,
}

impl Firm {
    pub fn mean_demand(&self) -> f64 {
        if self.demand_window.is_empty() {
            return 0.0;
        }
        self.demand_window.iter().sum::<f64>() / self.demand_window.len() as f64
    }

    pub fn inventory_value_cents(&self) -> i64 {
        (self.inventory * self.price).round() as i64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bank {
    pub id: BankId,
    pub owner: HouseholdId,
    /// Reserve account at the central bank.
    pub wallet: WalletId,
    pub cell: u32,
    pub alive: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Loan {
    pub lender: BankId,
    pub borrower: FirmId,
    pub principal_cents: i64,
    pub remaining_cents: i64,
    pub rate_annual: f64,
    pub remaining_term: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Government {
    pub wallet: WalletId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CentralBank {
    /// Base money issued at genesis plus explicit operations since.
    pub issued_base_cents: i64,
    pub base_rate_annual: f64,
    /// Founding criteria for private banks.
    pub min_bank_net_worth_cents: i64,
    pub max_banks: u32,
}

/// Counterparty of an external-interface firm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Counterparty {
    /// Constant counterparty replaying its table flows every month.
    Residual,
    /// A live simulated country, addressed by code.
    Country(String),
}

/// Import/export interface firm: sells foreign goods to domestic agents
/// daily, trades with its foreign counterpart only at month boundaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalFirm {
    pub partner: Counterparty,
    pub wallet: WalletId,
    /// Import-row accounts this firm sells under (1 aggregated or one per
    /// sector), with inventory in units and a posted price each.
    pub import_rows: Vec<usize>,
    pub import_inventory: Vec<f64>,
    pub import_prices: Vec<f64>,
    /// Units demanded per import row this month (for restock orders).
    pub import_demand_this_month: Vec<f64>,
    /// Earmarked but unspent export-order money per export column, cents.
    pub export_columns: Vec<usize>,
    pub pending_export_orders: Vec<i64>,
}
