//! Integer money and exact apportionment helpers.
//!
//! All ledger balances and postings are held in integer base units ("cents")
//! so that conservation audits are drift-free. Table flows and behavioral
//! targets stay in `f64` and are rounded to cents only at posting time.

/// Money in integer base units (cents of the run's currency).
pub type Cents = i64;

/// Round a fractional money amount to integer cents (half away from zero).
pub fn to_cents(x: f64) -> Cents {
    x.round() as Cents
}

/// Split `total` across `weights` exactly, using largest-remainder rounding.
///
/// The returned parts sum to `total` whenever some weight is positive; all
/// parts are zero when every weight is zero (or `total` is zero). Negative
/// weights are treated as zero.
pub fn apportion(total: Cents, weights: &[f64]) -> Vec<Cents> {
    let mut parts = vec![0i64; weights.len()];
    if total == 0 || weights.is_empty() {
        return parts;
    }
    let sum: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    if sum <= 0.0 {
        return parts;
    }
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(weights.len());
    let mut assigned: i64 = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.max(0.0);
        let exact = total as f64 * (w / sum);
        let floor = exact.floor();
        parts[i] = floor as i64;
        assigned += parts[i];
        remainders.push((i, exact - floor));
    }
    let mut leftover = total - assigned;
    // Largest remainders first; index order breaks ties deterministically.
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut k = 0;
    while leftover > 0 {
        parts[remainders[k % remainders.len()].0] += 1;
        leftover -= 1;
        k += 1;
    }
    // `total < 0` can only arise from negative flow targets, which callers
    // exclude; guard anyway by walking the smallest remainders.
    let mut k = remainders.len();
    while leftover < 0 {
        k = if k == 0 { remainders.len() - 1 } else { k - 1 };
        parts[remainders[k].0] -= 1;
        leftover += 1;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apportion_sums_exactly() {
        let parts = apportion(100, &[0.5, 0.5]);
        assert_eq!(parts, vec![50, 50]);
        let parts = apportion(101, &[0.5, 0.5]);
        assert_eq!(parts.iter().sum::<i64>(), 101);
        let parts = apportion(7, &[0.1, 0.7, 0.2]);
        assert_eq!(parts.iter().sum::<i64>(), 7);
    }

    #[test]
    fn apportion_zero_weights() {
        assert_eq!(apportion(100, &[0.0, 0.0]), vec![0, 0]);
        assert_eq!(apportion(0, &[1.0, 2.0]), vec![0, 0]);
    }

    #[test]
    fn apportion_ignores_negative_weights() {
        let parts = apportion(10, &[-1.0, 1.0]);
        assert_eq!(parts, vec![0, 10]);
    }
}
