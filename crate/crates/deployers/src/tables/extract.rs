//! Build a per-country SAM out of an inter-country IO table.
//!
//! The home country keeps its full domestic producer block. Each trading
//! partner appears either disaggregated (one import row and one export column
//! per sector) or aggregated (a single row and column); every country not
//! listed as a partner is folded into a single residual account ("RoW").
//!
//! Cells are quantized to hundredths of the source unit and assembled in
//! integers, so aggregated accounts equal the summation of their
//! disaggregated counterparts exactly. Trade, government, household and GFCF
//! accounts are balanced with explicit transfer cells following the
//! conventions of the six-sector reference table: external surpluses transfer
//! to households, household saving finances GFCF, and the remaining GFCF gap
//! is financed by the residual account.

use super::figaro::FdCategory;
use super::{AccountId, IcioTable, SamTable, TableError, DEFAULT_BALANCE_TOL};
use crate::money::apportion;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TradeMode {
    Aggregated,
    Disaggregated,
}

/// A trading partner and the level of detail of its coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartnerMode {
    pub partner: String,
    pub mode: TradeMode,
}

/// What to extract: home country, explicit partners, residual label, and the
/// demographic/unit metadata the table format itself does not carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountrySamSpec {
    pub home: String,
    pub partners: Vec<PartnerMode>,
    pub residual_name: String,
    pub population: u64,
    pub active_population: u64,
    /// Currency per unit of the source table (e.g. 1e6 for tables in millions).
    pub unit_scale: f64,
    pub init_unemployment_pct: f64,
}

impl CountrySamSpec {
    pub fn new(home: &str) -> CountrySamSpec {
        CountrySamSpec {
            home: home.to_string(),
            partners: Vec::new(),
            residual_name: "RoW".to_string(),
            population: 2_000_000,
            active_population: 1_000_000,
            unit_scale: 1e6,
            init_unemployment_pct: 10.0,
        }
    }

    pub fn with_partner(mut self, partner: &str, mode: TradeMode) -> Self {
        self.partners.push(PartnerMode { partner: partner.to_string(), mode });
        self
    }
}

/// Per-sector labor share used to split total value added when the source
/// does not provide the split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaborShareRule {
    pub default_share: f64,
    pub per_sector: Vec<(String, f64)>,
}

impl Default for LaborShareRule {
    fn default() -> Self {
        LaborShareRule { default_share: 0.5, per_sector: Vec::new() }
    }
}

impl LaborShareRule {
    pub fn share_for(&self, sector: &str) -> f64 {
        self.per_sector
            .iter()
            .find(|(s, _)| s == sector)
            .map(|(_, a)| *a)
            .unwrap_or(self.default_share)
    }
}

/// Split value added into labor and gross operating surplus. The two parts
/// always recompose to `va` exactly.
pub fn split_value_added(
    va: f64,
    rule: &LaborShareRule,
    sector: &str,
) -> Result<(f64, f64), TableError> {
    let share = rule.share_for(sector);
    if !(0.0..=1.0).contains(&share) {
        return Err(TableError::BadLaborShare { share, sector: sector.to_string() });
    }
    let labor = share * va;
    let surplus = va - labor;
    if labor < 0.0 || surplus < 0.0 {
        return Err(TableError::Invalid(format!(
            "value-added split for sector {sector:?} produced negative parts (va={va})"
        )));
    }
    Ok((labor, surplus))
}

fn quantize(v: f64) -> i64 {
    (v * 100.0).round() as i64
}

/// Account layout of the intermediate fully-disaggregated matrix.
struct Layout {
    n_sectors: usize,
    partner_countries: Vec<usize>,
    gfcf: usize,
    partner_base: usize,
    row_acct: usize,
    labor: usize,
    surplus: usize,
    taxes: usize,
    gov: usize,
    households: usize,
    dim: usize,
}

impl Layout {
    fn new(n_sectors: usize, partner_countries: Vec<usize>) -> Layout {
        let gfcf = n_sectors;
        let partner_base = gfcf + 1;
        let row_acct = partner_base + partner_countries.len() * n_sectors;
        let labor = row_acct + 1;
        Layout {
            n_sectors,
            partner_countries,
            gfcf,
            partner_base,
            row_acct,
            labor,
            surplus: labor + 1,
            taxes: labor + 2,
            gov: labor + 3,
            households: labor + 4,
            dim: labor + 5,
        }
    }

    fn partner_sector(&self, partner_pos: usize, sector: usize) -> usize {
        self.partner_base + partner_pos * self.n_sectors + sector
    }
}

pub fn extract_country_sam(
    icio: &IcioTable,
    spec: &CountrySamSpec,
    va_split: &LaborShareRule,
) -> Result<SamTable, TableError> {
    let home = icio
        .country_index(&spec.home)
        .ok_or_else(|| TableError::UnknownCountry(spec.home.clone()))?;
    let mut partner_countries = Vec::new();
    for p in &spec.partners {
        if p.partner == spec.home {
            return Err(TableError::Invalid(format!(
                "{} cannot be its own partner",
                spec.home
            )));
        }
        let idx = icio
            .country_index(&p.partner)
            .ok_or_else(|| TableError::UnknownCountry(p.partner.clone()))?;
        if partner_countries.contains(&idx) {
            return Err(TableError::Invalid(format!("duplicate partner {}", p.partner)));
        }
        partner_countries.push(idx);
    }
    let s_count = icio.n_sectors();
    let layout = Layout::new(s_count, partner_countries.clone());
    let residuals: Vec<usize> = (0..icio.n_countries())
        .filter(|c| *c != home && !partner_countries.contains(c))
        .collect();

    let dim = layout.dim;
    let mut cells = vec![0i64; dim * dim];
    let add = |r: usize, c: usize, v: i64, cells: &mut Vec<i64>| {
        cells[r * dim + c] += v;
    };

    // Map an origin or destination (country, sector) to its account.
    let foreign_acct = |country: usize, sector: usize| -> usize {
        match layout.partner_countries.iter().position(|p| *p == country) {
            Some(pos) => layout.partner_sector(pos, sector),
            None => layout.row_acct,
        }
    };

    // Intermediate flows touching the home country.
    for so in 0..s_count {
        for sd in 0..s_count {
            let v = quantize(icio.z(home, so, home, sd));
            add(so, sd, v, &mut cells);
        }
    }
    for &foreign in partner_countries.iter().chain(residuals.iter()) {
        for so in 0..s_count {
            for sd in 0..s_count {
                // Imports: foreign sells into home production.
                let imp = quantize(icio.z(foreign, so, home, sd));
                add(foreign_acct(foreign, so), sd, imp, &mut cells);
                // Exports: home sells into foreign production.
                let exp = quantize(icio.z(home, so, foreign, sd));
                add(so, foreign_acct(foreign, sd), exp, &mut cells);
            }
        }
    }

    // Final demand of the home country, domestic and imported.
    let fd_col = |cat: FdCategory| match cat {
        FdCategory::Household => layout.households,
        FdCategory::Government => layout.gov,
        FdCategory::Gfcf => layout.gfcf,
    };
    for cat in [FdCategory::Household, FdCategory::Government, FdCategory::Gfcf] {
        for so in 0..s_count {
            add(so, fd_col(cat), quantize(icio.fd(home, so, home, cat)), &mut cells);
        }
        for &foreign in partner_countries.iter().chain(residuals.iter()) {
            for so in 0..s_count {
                let v = quantize(icio.fd(foreign, so, home, cat));
                add(foreign_acct(foreign, so), fd_col(cat), v, &mut cells);
            }
        }
    }

    // Exports serving foreign final demand. For a disaggregated partner these
    // are allocated over its sector columns in proportion to the intermediate
    // exports of the same origin row (uniform when that row is all zero), so
    // that aggregation remains exact summation.
    for so in 0..s_count {
        for (pos, &p) in layout.partner_countries.iter().enumerate() {
            let total: f64 = [FdCategory::Household, FdCategory::Government, FdCategory::Gfcf]
                .into_iter()
                .map(|cat| icio.fd(home, so, p, cat))
                .sum();
            let total_q = quantize(total);
            if total_q == 0 {
                continue;
            }
            let mut weights: Vec<f64> =
                (0..s_count).map(|sd| icio.z(home, so, p, sd).max(0.0)).collect();
            if weights.iter().sum::<f64>() <= 0.0 {
                weights = vec![1.0; s_count];
            }
            for (sd, part) in apportion(total_q, &weights).into_iter().enumerate() {
                add(so, layout.partner_sector(pos, sd), part, &mut cells);
            }
        }
        for &r in &residuals {
            let total: f64 = [FdCategory::Household, FdCategory::Government, FdCategory::Gfcf]
                .into_iter()
                .map(|cat| icio.fd(home, so, r, cat))
                .sum();
            add(so, layout.row_acct, quantize(total), &mut cells);
        }
    }

    // Value added and taxes of the home columns.
    for sd in 0..s_count {
        let (labor, surplus) = match (icio.labor(home, sd), icio.surplus(home, sd)) {
            (Some(l), Some(k)) => (l, k),
            _ => match icio.va_total(home, sd) {
                Some(va) => split_value_added(va, va_split, &icio.sectors[sd])?,
                None => (0.0, 0.0),
            },
        };
        add(layout.labor, sd, quantize(labor), &mut cells);
        add(layout.surplus, sd, quantize(surplus), &mut cells);
        add(layout.taxes, sd, quantize(icio.product_taxes(home, sd)), &mut cells);
    }
    for cat in [FdCategory::Household, FdCategory::Government, FdCategory::Gfcf] {
        add(layout.taxes, fd_col(cat), quantize(icio.fd_taxes(home, cat)), &mut cells);
    }

    // Factor and tax pass-throughs.
    let row_sum = |r: usize, cells: &Vec<i64>| -> i64 { cells[r * dim..(r + 1) * dim].iter().sum() };
    let col_sum = |c: usize, cells: &Vec<i64>| -> i64 { (0..dim).map(|r| cells[r * dim + c]).sum() };
    let l_total = row_sum(layout.labor, &cells);
    add(layout.households, layout.labor, l_total, &mut cells);
    let k_total = row_sum(layout.surplus, &cells);
    add(layout.households, layout.surplus, k_total, &mut cells);
    let t_total = row_sum(layout.taxes, &cells);
    add(layout.gov, layout.taxes, t_total, &mut cells);

    // Balance external accounts against households (trade surplus transfers
    // home, deficits transfer out), then the government account, then route
    // household saving into GFCF and let the residual account finance the
    // remaining GFCF gap.
    let balance_with = |acct: usize, counter: usize, cells: &mut Vec<i64>| {
        let diff = row_sum(acct, cells) - col_sum(acct, cells);
        if diff > 0 {
            add(counter, acct, diff, cells);
        } else if diff < 0 {
            add(acct, counter, -diff, cells);
        }
    };
    for pos in 0..layout.partner_countries.len() {
        for s in 0..s_count {
            balance_with(layout.partner_sector(pos, s), layout.households, &mut cells);
        }
    }
    balance_with(layout.gov, layout.households, &mut cells);
    balance_with(layout.households, layout.gfcf, &mut cells);
    balance_with(layout.gfcf, layout.row_acct, &mut cells);

    // Merge aggregated partners down to one row/column each.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut codes: Vec<String> = Vec::new();
    for s in 0..s_count {
        groups.push(vec![s]);
        codes.push(format!("P{:02}_{}", s + 1, icio.sectors[s]));
    }
    groups.push(vec![layout.gfcf]);
    codes.push(format!("F{:02}_GFCF", groups.len()));
    for (pos, pm) in spec.partners.iter().enumerate() {
        match pm.mode {
            TradeMode::Disaggregated => {
                for s in 0..s_count {
                    groups.push(vec![layout.partner_sector(pos, s)]);
                    codes.push(format!(
                        "X{:02}_{}_{}",
                        groups.len(),
                        pm.partner,
                        icio.sectors[s]
                    ));
                }
            }
            TradeMode::Aggregated => {
                groups.push((0..s_count).map(|s| layout.partner_sector(pos, s)).collect());
                codes.push(format!("X{:02}_{}", groups.len(), pm.partner));
            }
        }
    }
    groups.push(vec![layout.row_acct]);
    codes.push(format!("X{:02}_{}", groups.len(), spec.residual_name));
    for (idx, (letter, name)) in [
        (layout.labor, ("L", "CompEmployees")),
        (layout.surplus, ("K", "GrossOpSurplus")),
        (layout.taxes, ("T", "TaxProducts")),
        (layout.gov, ("G", "Government")),
        (layout.households, ("H", "Households")),
    ]
    .map(|(i, names)| (i, names))
    {
        groups.push(vec![idx]);
        codes.push(format!("{}{:02}_{}", letter, groups.len(), name));
    }

    let n = groups.len();
    let mut flows = vec![0.0f64; n * n];
    for (ri, rg) in groups.iter().enumerate() {
        for (ci, cg) in groups.iter().enumerate() {
            let mut total = 0i64;
            for &r in rg {
                for &c in cg {
                    total += cells[r * dim + c];
                }
            }
            flows[ri * n + ci] = total as f64;
        }
    }

    let accounts: Vec<AccountId> =
        codes.iter().map(|c| AccountId::new(c)).collect::<Result<_, _>>()?;
    let table = SamTable {
        name: format!("SAM_{}", spec.home),
        region: spec.home.clone(),
        year: None,
        population: spec.population,
        active_population: spec.active_population,
        init_unemployment_pct: spec.init_unemployment_pct,
        unit_scale: spec.unit_scale / 100.0,
        accounts,
        flows,
        declared_row_sums: None,
        declared_col_sums: None,
        extra_metadata: Vec::new(),
        delimiter: '\t',
    };
    table.validate(DEFAULT_BALANCE_TOL)?;
    Ok(table)
}
