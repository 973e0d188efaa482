//! SAM and inter-country IO tables: parsing, validation, extraction, scaling.
//!
//! All operations here are pure functions over immutable inputs; they are safe
//! to call from any worker.

mod extract;
mod figaro;
mod sam_text;
mod scale;
mod synthetic;

pub use extract::{extract_country_sam, split_value_added, CountrySamSpec, LaborShareRule, PartnerMode, TradeMode};
pub use figaro::{emit_figaro_csv, parse_figaro_csv, ColHeader, FdCategory, IcioParse, IcioTable, RowHeader};
pub use sam_text::{emit_sam, parse_sam};
pub use scale::{scale_to_agents, ScaleOptions, ScaledTargets};
pub use synthetic::synthetic_icio;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for row-sum / column-sum balance checks.
///
/// The six-sector reference table ships with a transposed digit in one of its
/// printed row sums ((~8.8e-5 relative); tables are accepted with a warning up
/// to this tolerance and rejected beyond it.
pub const DEFAULT_BALANCE_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("non-square body: {0}")]
    NonSquare(String),
    #[error("account {account}: row/column sums differ by {rel_err:.3e} (tolerance {tol:.1e}); row={row_sum}, col={col_sum}")]
    SumMismatch {
        account: String,
        rel_err: f64,
        tol: f64,
        row_sum: f64,
        col_sum: f64,
    },
    #[error("unknown account-kind prefix in code {0:?}")]
    UnknownKind(String),
    #[error("duplicate account code {0:?}")]
    DuplicateAccount(String),
    #[error("negative flow {value} at row {row:?}, column {col:?} (negatives are only allowed in tax rows)")]
    NegativeFlow { row: String, col: String, value: f64 },
    #[error("unparseable numeric cell at row {row:?}, column {col:?}: {text:?}")]
    BadNumber { row: String, col: String, text: String },
    #[error("ragged row {row:?}: expected {expected} cells, found {found}")]
    RaggedRow { row: String, expected: usize, found: usize },
    #[error("label {0:?} does not match the CC_Sss pattern")]
    BadLabel(String),
    #[error("unknown country {0:?}")]
    UnknownCountry(String),
    #[error("{0}")]
    Invalid(String),
    #[error("labor share {share} for sector {sector:?} outside [0, 1]")]
    BadLaborShare { share: f64, sector: String },
    #[error("zero column sum for nonzero producer column {0:?}")]
    ZeroColumn(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Classification of a SAM account, inferred from its code prefix
/// (P/N producer, F GFCF, X external, L labor, K surplus, T tax,
/// G government, H households) or declared explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccountKind {
    Producer,
    Gfcf,
    ExternalSector,
    Labor,
    GrossOpSurplus,
    TaxSSoc,
    TaxProduction,
    TaxProducts,
    TaxIncome,
    Government,
    Households,
}

impl AccountKind {
    pub fn is_tax(self) -> bool {
        matches!(
            self,
            AccountKind::TaxSSoc
                | AccountKind::TaxProduction
                | AccountKind::TaxProducts
                | AccountKind::TaxIncome
        )
    }

    /// Pass-through accounts collect in their row and forward in their column
    /// (factors and taxes); they hold no stock of their own.
    pub fn is_pass_through(self) -> bool {
        self.is_tax() || matches!(self, AccountKind::Labor | AccountKind::GrossOpSurplus)
    }

    fn infer(code: &str) -> Result<AccountKind, TableError> {
        let first = code.chars().next().ok_or_else(|| TableError::UnknownKind(code.into()))?;
        let lower = code.to_ascii_lowercase();
        Ok(match first {
            'P' | 'N' => AccountKind::Producer,
            'F' => AccountKind::Gfcf,
            'X' => AccountKind::ExternalSector,
            'L' => AccountKind::Labor,
            'K' => AccountKind::GrossOpSurplus,
            'G' => AccountKind::Government,
            'H' => AccountKind::Households,
            'T' => {
                if lower.contains("ssoc") || lower.contains("soc") {
                    AccountKind::TaxSSoc
                } else if lower.contains("production") {
                    AccountKind::TaxProduction
                } else if lower.contains("irpf") || lower.contains("income") {
                    AccountKind::TaxIncome
                } else {
                    AccountKind::TaxProducts
                }
            }
            _ => return Err(TableError::UnknownKind(code.into())),
        })
    }
}

/// A labeled SAM account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountId {
    pub code: String,
    pub kind: AccountKind,
}

impl AccountId {
    pub fn new(code: &str) -> Result<AccountId, TableError> {
        Ok(AccountId { code: code.to_string(), kind: AccountKind::infer(code)? })
    }

    pub fn with_kind(code: &str, kind: AccountKind) -> AccountId {
        AccountId { code: code.to_string(), kind }
    }
}

/// Labeled square matrix of monetary flows among accounts.
///
/// Rows receive (sell), columns pay (buy). Flows are money per year in units
/// of `unit_scale` currency each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamTable {
    pub name: String,
    pub region: String,
    pub year: Option<i64>,
    pub population: u64,
    pub active_population: u64,
    /// Initial unemployment rate in percent (from the `InitUnemp` metadata
    /// key); 0 when absent.
    pub init_unemployment_pct: f64,
    /// Currency per matrix unit (from the `Units` metadata key); 1 when absent.
    pub unit_scale: f64,
    pub accounts: Vec<AccountId>,
    /// Row-major `n x n` flows.
    pub flows: Vec<f64>,
    /// Row sums as printed in the source document, kept for lossless
    /// re-emission (they may disagree with the body within tolerance).
    pub declared_row_sums: Option<Vec<f64>>,
    pub declared_col_sums: Option<Vec<f64>>,
    /// Metadata keys we do not interpret, preserved in order for round trips.
    pub extra_metadata: Vec<(String, String)>,
    /// Cell delimiter of the source document (tab or semicolon).
    pub delimiter: char,
}

impl SamTable {
    pub fn n(&self) -> usize {
        self.accounts.len()
    }

    pub fn flow(&self, row: usize, col: usize) -> f64 {
        self.flows[row * self.n() + col]
    }

    pub fn flow_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        let n = self.n();
        &mut self.flows[row * n + col]
    }

    pub fn account_index(&self, code: &str) -> Option<usize> {
        self.accounts.iter().position(|a| a.code == code)
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        (0..self.n()).map(|c| self.flow(row, c)).sum()
    }

    pub fn col_sum(&self, col: usize) -> f64 {
        (0..self.n()).map(|r| self.flow(r, col)).sum()
    }

    pub fn indices_of_kind(&self, kind: AccountKind) -> Vec<usize> {
        self.accounts
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest relative row-vs-column imbalance over all accounts, with the
    /// offending account index.
    pub fn worst_imbalance(&self) -> (usize, f64) {
        let mut worst = (0usize, 0.0f64);
        for i in 0..self.n() {
            let r = self.row_sum(i);
            let c = self.col_sum(i);
            let denom = r.abs().max(c.abs());
            if denom == 0.0 {
                continue;
            }
            let rel = (r - c).abs() / denom;
            if rel > worst.1 {
                worst = (i, rel);
            }
        }
        worst
    }

    /// Validate squareness, balance and the negative-entry rule.
    pub fn validate(&self, balance_tol: f64) -> Result<(), TableError> {
        let n = self.n();
        if self.flows.len() != n * n {
            return Err(TableError::NonSquare(format!(
                "{} accounts but {} cells",
                n,
                self.flows.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for a in &self.accounts {
            if !seen.insert(&a.code) {
                return Err(TableError::DuplicateAccount(a.code.clone()));
            }
        }
        for r in 0..n {
            if self.accounts[r].kind.is_tax() {
                continue;
            }
            for c in 0..n {
                let v = self.flow(r, c);
                if v < 0.0 {
                    return Err(TableError::NegativeFlow {
                        row: self.accounts[r].code.clone(),
                        col: self.accounts[c].code.clone(),
                        value: v,
                    });
                }
            }
        }
        let (worst, rel) = self.worst_imbalance();
        if rel > balance_tol {
            return Err(TableError::SumMismatch {
                account: self.accounts[worst].code.clone(),
                rel_err: rel,
                tol: balance_tol,
                row_sum: self.row_sum(worst),
                col_sum: self.col_sum(worst),
            });
        }
        Ok(())
    }
}

/// Format a table cell: integers print without a decimal point, fractions
/// print with the shortest round-tripping representation.
pub(crate) fn fmt_cell(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{}", v)
    }
}
