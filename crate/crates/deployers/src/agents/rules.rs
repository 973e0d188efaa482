//! Pure behavioral rules: consumption, pricing, production, credit, entry
//! and exit. The engine owns all mutation; these functions only compute.

use super::{HouseholdParams, RuleError};
use crate::money::{apportion, Cents};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Buffer-stock consumption budget: `C = I + kappa * (W - phi * I)`,
/// clamped below at zero and above at the liquid means available.
pub fn consumption_budget(
    income_avg: Cents,
    wealth: Cents,
    liquid: Cents,
    params: &HouseholdParams,
) -> Cents {
    let i = income_avg as f64;
    let c = i + params.kappa * (wealth as f64 - params.phi * i);
    (c.round() as Cents).clamp(0, liquid.max(0))
}

/// Split a budget across sectors: SAM proportions modulated by a logit in
/// relative prices. `rel_prices[s]` is the current price over the
/// deployment-time reference price. The parts sum to the budget exactly.
pub fn allocate_budget(
    budget: Cents,
    sam_shares: &[f64],
    rel_prices: &[f64],
    beta: f64,
) -> Result<Vec<Cents>, RuleError> {
    debug_assert_eq!(sam_shares.len(), rel_prices.len());
    let weights: Vec<f64> = sam_shares
        .iter()
        .zip(rel_prices)
        .map(|(w, p)| w.max(0.0) * (-beta * p).exp())
        .collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(RuleError::AllWeightsZero);
    }
    Ok(apportion(budget, &weights))
}

/// The supply-demand price rule: a trade happens iff the buyer's price is at
/// least the seller's; afterwards both prices move by a small factor, toward
/// each other on failure and apart on success.
pub fn price_update(buyer_price: f64, seller_price: f64, eps: f64) -> (bool, f64, f64) {
    if buyer_price >= seller_price {
        (true, buyer_price * (1.0 - eps), seller_price * (1.0 + eps))
    } else {
        (false, buyer_price * (1.0 + eps), seller_price * (1.0 - eps))
    }
}

/// Production target: replenish inventories to `lambda_inv` times recent
/// demand. Newborn firms pass the neighborhood's observed unmet demand as
/// their demand estimate.
pub fn production_plan(mean_demand: f64, inventory: f64, lambda_inv: f64) -> f64 {
    (lambda_inv * mean_demand - inventory).max(0.0)
}

/// Production technology for the labor/capital mix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Technology {
    Leontief,
    /// Cost-minimizing Cobb-Douglas mix with labor exponent `alpha`.
    CobbDouglas { alpha: f64 },
}

/// Input coefficients of one producer column, in shares of output value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SectorCoefficients {
    /// Purchasable input rows (domestic producers and import rows) with their
    /// value share.
    pub ic_rows: Vec<(usize, f64)>,
    /// Compensation of employees share.
    pub labor: f64,
    /// Gross operating surplus share.
    pub surplus: f64,
    /// Taxes accrued on production activity (social contributions plus
    /// production taxes); may be negative for subsidized sectors.
    pub tax_activity: f64,
    /// Taxes on products, accrued on sales.
    pub tax_products: f64,
}

/// Monetary requirements to produce `output_units` at price `price`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputPlan {
    /// Intermediate purchases per input row account, cents.
    pub ic_cents: Vec<(usize, Cents)>,
    /// Wage bill, cents, and the integer hires it buys.
    pub labor_cents: Cents,
    pub hires: u32,
    /// Capital services, cents.
    pub capital_cents: Cents,
    /// Taxes expected to accrue, cents.
    pub taxes_cents: Cents,
}

impl InputPlan {
    pub fn ic_total(&self) -> Cents {
        self.ic_cents.iter().map(|(_, v)| v).sum()
    }

    /// Everything that needs financing up front: inputs, wages and taxes.
    pub fn financing_need(&self) -> Cents {
        self.ic_total() + self.labor_cents + self.taxes_cents.max(0)
    }
}

/// Requirements for producing `output_units` of a sector's good, from the
/// sector's SAM column ratios. Labor converts to integer hires at the
/// prevailing wage (ceiling). Under Leontief both labor and capital scale
/// linearly with output; under Cobb-Douglas the labor/capital split of value
/// added follows the exponent.
pub fn input_requirements(
    coeffs: &SectorCoefficients,
    output_units: f64,
    price: f64,
    monthly_wage: Cents,
    tech: Technology,
) -> Result<InputPlan, RuleError> {
    if output_units < 0.0 {
        return Err(RuleError::NegativeOutput(output_units));
    }
    let value = output_units * price;
    let ic_cents: Vec<(usize, Cents)> =
        coeffs.ic_rows.iter().map(|(row, a)| (*row, (a * value).round() as Cents)).collect();
    let (labor_cents, capital_cents) = match tech {
        Technology::Leontief => {
            ((coeffs.labor * value).round() as Cents, (coeffs.surplus * value).round() as Cents)
        }
        Technology::CobbDouglas { alpha } => {
            let va = (coeffs.labor + coeffs.surplus) * value;
            let labor = (va * alpha.clamp(0.0, 1.0)).round() as Cents;
            (labor, (va.round() as Cents) - labor)
        }
    };
    let hires = if labor_cents <= 0 || monthly_wage <= 0 {
        0
    } else {
        ((labor_cents as f64) / (monthly_wage as f64)).ceil() as u32
    };
    let taxes_cents = ((coeffs.tax_activity + coeffs.tax_products) * value).round() as Cents;
    Ok(InputPlan { ic_cents, labor_cents, hires, capital_cents, taxes_cents })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskParams {
    /// Slope of the default probability in the debt-to-equity ratio.
    pub rho: f64,
    /// Risk premium per unit of default probability.
    pub mu: f64,
    pub car: f64,
    pub rrr: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        RiskParams { rho: 0.1, mu: 0.05, car: 0.08, rrr: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoanOffer {
    pub rate_annual: f64,
    pub probability_of_default: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoanDenial {
    /// Post-loan capital adequacy would be violated.
    Car,
    /// Reserves would fall below the required ratio of deposits.
    Rrr,
    /// The borrower has non-positive equity.
    InsolventBorrower,
}

/// Balance-sheet view of a bank for credit decisions.
#[derive(Debug, Clone, Copy, Default)]
pub struct BankPosition {
    pub equity_cents: Cents,
    pub reserves_cents: Cents,
    pub deposits_cents: Cents,
    pub risk_weighted_loans_cents: Cents,
}

/// Price a loan application. The default probability rises with the
/// borrower's debt-to-equity ratio (`PD = 1 - exp(-rho * D/E)` including the
/// requested amount); the offered rate is the base rate plus a premium
/// proportional to it. Applications are served first-come, first-served; an
/// offer exists iff the post-loan capital adequacy and reserve requirements
/// hold.
pub fn loan_offer(
    bank: &BankPosition,
    firm_debt: Cents,
    firm_equity: Cents,
    amount: Cents,
    base_rate_annual: f64,
    risk: &RiskParams,
) -> Result<LoanOffer, LoanDenial> {
    if firm_equity <= 0 {
        return Err(LoanDenial::InsolventBorrower);
    }
    if bank.equity_cents < ((bank.risk_weighted_loans_cents + amount) as f64 * risk.car) as Cents {
        return Err(LoanDenial::Car);
    }
    // The loan is credited as a deposit, so required reserves rise with it.
    if bank.reserves_cents < ((bank.deposits_cents + amount) as f64 * risk.rrr) as Cents {
        return Err(LoanDenial::Rrr);
    }
    let debt_to_equity = (firm_debt + amount) as f64 / firm_equity as f64;
    let pd = 1.0 - (-risk.rho * debt_to_equity.max(0.0)).exp();
    Ok(LoanOffer {
        rate_annual: base_rate_annual + risk.mu * pd,
        probability_of_default: pd,
    })
}

/// Distribute a GFCF value into its goods, services and tax components by
/// the GFCF column coefficients. Components sum to `value` exactly.
pub fn gfcf_distribute(
    value: Cents,
    column: &[(usize, f64)],
) -> Result<Vec<(usize, Cents)>, RuleError> {
    if column.iter().map(|(_, w)| w.max(0.0)).sum::<f64>() <= 0.0 {
        if value == 0 {
            return Ok(column.iter().map(|(row, _)| (*row, 0)).collect());
        }
        return Err(RuleError::ZeroColumn);
    }
    let weights: Vec<f64> = column.iter().map(|(_, w)| *w).collect();
    let parts = apportion(value, &weights);
    Ok(column.iter().map(|(row, _)| *row).zip(parts).collect())
}

/// Outcome of a firm's month-end settlement split.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SettlementPlan {
    /// Taxes on activity (social contributions + production taxes), cents.
    pub tax_activity_cents: Cents,
    /// Taxes on products, cents.
    pub tax_products_cents: Cents,
    pub dividends_cents: Cents,
    pub retained_cents: Cents,
}

/// Compute taxes, dividends and retention from a month's activity.
///
/// Taxes apply the SAM column ratios to their bases (activity taxes on the
/// month's production value, product taxes on sales). Dividends distribute
/// `payout_ratio` of after-tax profit when positive, plus any liquidity in
/// excess of the working-capital buffer; losses yield zero dividends.
pub fn dividend_and_tax_flows(
    production_value: Cents,
    sales: Cents,
    pre_tax_profit_before_taxes: Cents,
    liquidity_after_taxes: Cents,
    buffer_cents: Cents,
    coeffs: &SectorCoefficients,
    payout_ratio: f64,
) -> SettlementPlan {
    let tax_activity_cents = (coeffs.tax_activity * production_value as f64).round() as Cents;
    let tax_products_cents = (coeffs.tax_products * sales as f64).round() as Cents;
    let after_tax = pre_tax_profit_before_taxes - tax_activity_cents - tax_products_cents;
    let mut dividends = ((after_tax.max(0) as f64) * payout_ratio.clamp(0.0, 1.0)).round() as Cents;
    let excess = liquidity_after_taxes - dividends - buffer_cents;
    if excess > 0 {
        dividends += excess;
    }
    dividends = dividends.clamp(0, liquidity_after_taxes.max(0));
    SettlementPlan {
        tax_activity_cents,
        tax_products_cents,
        dividends_cents: dividends,
        retained_cents: after_tax - dividends,
    }
}

/// Probability of opening a firm in each sector: `p_open` scaled by the
/// sector's share of positive unmet demand.
pub fn entry_probabilities(gaps: &[f64], p_open: f64) -> Vec<f64> {
    let total: f64 = gaps.iter().map(|g| g.max(0.0)).sum();
    if total <= 0.0 {
        return vec![0.0; gaps.len()];
    }
    gaps.iter().map(|g| p_open * g.max(0.0) / total).collect()
}

/// Decide whether a household opens a firm this month and in which sector.
pub fn firm_entry_decision<R: Rng>(
    gaps: &[f64],
    p_open: f64,
    rng: &mut R,
) -> Option<usize> {
    let probs = entry_probabilities(gaps, p_open);
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let u: f64 = rng.random::<f64>();
    if u >= total {
        return None;
    }
    let mut acc = 0.0;
    for (s, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(s);
        }
    }
    Some(probs.len() - 1)
}

/// Close when equity has fallen below the floor, or when every month of the
/// loss window ran a loss.
pub fn firm_exit_decision(
    equity: Cents,
    equity_floor: Cents,
    profit_history: &[Cents],
    loss_window: usize,
) -> bool {
    if equity < equity_floor {
        return true;
    }
    if loss_window == 0 || profit_history.len() < loss_window {
        return false;
    }
    profit_history[profit_history.len() - loss_window..].iter().all(|p| *p < 0)
}
