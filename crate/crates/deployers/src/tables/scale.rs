//! Scale a SAM down to an agent population and derive simulation targets.

use super::{AccountKind, SamTable, TableError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleOptions {
    pub n_active: u32,
    /// Minimum viable agent population.
    pub min_viable: u32,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        ScaleOptions { n_active: 2000, min_viable: 200 }
    }
}

/// Per-agent monetary targets derived from a SAM.
///
/// All monetary figures are in integer-valued cents of the run currency
/// unless suffixed otherwise; targets are kept in `f64` (they are rates, not
/// ledger balances) so scaling stays exactly homogeneous.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledTargets {
    pub sam_name: String,
    pub accounts: Vec<super::AccountId>,
    /// n_active / active_population.
    pub factor: f64,
    pub cents_per_unit: f64,
    pub n_active: u32,
    /// Target unemployment rate (fraction) the table was built at.
    pub unemployment_target: f64,
    /// Scaled annual flows in cents, row-major.
    pub annual_cents: Vec<f64>,
    /// Column input coefficients: flow / column-sum, row-major; all-zero for
    /// empty columns.
    pub col_coeffs: Vec<f64>,
    /// Workers each producer sector should employ (fractional persons).
    pub employment_target: Vec<f64>,
    /// Assumed wage per worker, cents per month.
    pub monthly_wage_cents: i64,
}

/// Derive scaled targets for an `n_active`-agent run.
pub fn scale_to_agents(sam: &SamTable, opts: &ScaleOptions) -> Result<ScaledTargets, TableError> {
    if sam.active_population == 0 {
        return Err(TableError::Invalid("table declares no active population".into()));
    }
    if opts.n_active < opts.min_viable {
        return Err(TableError::Invalid(format!(
            "n_active {} below minimum viable population {}",
            opts.n_active, opts.min_viable
        )));
    }
    let n = sam.n();
    let factor = opts.n_active as f64 / sam.active_population as f64;
    let cents_per_unit = sam.unit_scale * 100.0;

    let mut annual_cents = vec![0.0f64; n * n];
    for i in 0..n * n {
        annual_cents[i] = sam.flows[i] * cents_per_unit * factor;
    }

    let mut col_coeffs = vec![0.0f64; n * n];
    for c in 0..n {
        let sum = sam.col_sum(c);
        if sum == 0.0 {
            if sam.accounts[c].kind == AccountKind::Producer
                && (0..n).any(|r| sam.flow(r, c) != 0.0)
            {
                return Err(TableError::ZeroColumn(sam.accounts[c].code.clone()));
            }
            continue;
        }
        for r in 0..n {
            col_coeffs[r * n + c] = sam.flow(r, c) / sum;
        }
    }

    let unemployment_target = (sam.init_unemployment_pct / 100.0).clamp(0.0, 0.99);
    let labor_rows = sam.indices_of_kind(AccountKind::Labor);
    let producer_cols = sam.indices_of_kind(AccountKind::Producer);
    let mut labor_total_cents = 0.0f64;
    for &l in &labor_rows {
        for &c in &producer_cols {
            labor_total_cents += annual_cents[l * n + c];
        }
    }
    let employed_target = opts.n_active as f64 * (1.0 - unemployment_target);
    let annual_wage_cents = if labor_total_cents > 0.0 && employed_target > 0.0 {
        labor_total_cents / employed_target
    } else {
        // No labor row (toy tables): keep a positive wage so divisions stay
        // defined; employment targets below are zero anyway.
        cents_per_unit.max(1.0)
    };
    let monthly_wage_cents = (annual_wage_cents / 12.0).round().max(1.0) as i64;

    let mut employment_target = vec![0.0f64; n];
    if labor_total_cents > 0.0 {
        for &c in &producer_cols {
            let sector_labor: f64 = labor_rows.iter().map(|&l| annual_cents[l * n + c]).sum();
            employment_target[c] = sector_labor / annual_wage_cents;
        }
    }

    Ok(ScaledTargets {
        sam_name: sam.name.clone(),
        accounts: sam.accounts.clone(),
        factor,
        cents_per_unit,
        n_active: opts.n_active,
        unemployment_target,
        annual_cents,
        col_coeffs,
        employment_target,
        monthly_wage_cents,
    })
}

impl ScaledTargets {
    pub fn n(&self) -> usize {
        self.accounts.len()
    }

    pub fn annual(&self, row: usize, col: usize) -> f64 {
        self.annual_cents[row * self.n() + col]
    }

    pub fn monthly(&self, row: usize, col: usize) -> f64 {
        self.annual(row, col) / 12.0
    }

    pub fn coeff(&self, row: usize, col: usize) -> f64 {
        self.col_coeffs[row * self.n() + col]
    }

    pub fn account_index(&self, code: &str) -> Option<usize> {
        self.accounts.iter().position(|a| a.code == code)
    }

    pub fn indices_of_kind(&self, kind: AccountKind) -> Vec<usize> {
        self.accounts
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Monthly column totals (what account `col` pays per month, in cents).
    pub fn monthly_column(&self, col: usize) -> Vec<f64> {
        (0..self.n()).map(|r| self.monthly(r, col)).collect()
    }

    /// Annual gross output target of a producer account, in cents.
    pub fn annual_output(&self, col: usize) -> f64 {
        (0..self.n()).map(|r| self.annual(r, col)).sum()
    }

    /// Diagnostic CSV: one row per (receiver, payer) pair with nonzero target.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("receiver,payer,annual_cents,monthly_cents,coefficient\n");
        let n = self.n();
        for r in 0..n {
            for c in 0..n {
                let a = self.annual(r, c);
                if a != 0.0 {
                    out.push_str(&format!(
                        "{},{},{:.2},{:.2},{:.9}\n",
                        self.accounts[r].code,
                        self.accounts[c].code,
                        a,
                        a / 12.0,
                        self.coeff(r, c)
                    ));
                }
            }
        }
        out.push_str(&format!(
            "# factor={} monthly_wage_cents={} unemployment_target={}\n",
            self.factor, self.monthly_wage_cents, self.unemployment_target
        ));
        out
    }
}
