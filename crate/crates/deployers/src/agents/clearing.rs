//! Monthly stock-market clearing house.
//!
//! Collects the month's buy and sell orders per firm share, sorts buys from
//! high to low price and asks from low to high, and allocates greedily from
//! the top of the book while the buy limit covers the ask. Execution is at
//! the ask price; partial fills are allowed and unmatched orders expire.

use super::RuleError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderSide {
    Buy,
    Sell,
}

/// A limit order for one firm's shares. `agent` is an opaque participant id;
/// sellers with `new_issue` create shares instead of selling holdings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub agent: u32,
    pub share: u32,
    pub side: OrderSide,
    pub limit_price: f64,
    pub quantity: i64,
    pub new_issue: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    pub share: u32,
    pub buyer: u32,
    pub seller: u32,
    pub quantity: i64,
    pub price: f64,
    pub from_new_issue: bool,
}

/// Match one month's batch of orders. Orders for distinct shares never
/// interact. Within a share, ties keep submission order.
pub fn clearing_house_match(orders: &[Order]) -> Result<Vec<Trade>, RuleError> {
    for o in orders {
        if o.quantity < 0 {
            return Err(RuleError::NegativeQuantity(o.quantity));
        }
    }
    let mut shares: Vec<u32> = orders.iter().map(|o| o.share).collect();
    shares.sort_unstable();
    shares.dedup();

    let mut trades = Vec::new();
    for share in shares {
        let mut buys: Vec<(usize, Order)> = orders
            .iter()
            .enumerate()
            .filter(|(_, o)| o.share == share && o.side == OrderSide::Buy && o.quantity > 0)
            .map(|(i, o)| (i, o.clone()))
            .collect();
        let mut sells: Vec<(usize, Order)> = orders
            .iter()
            .enumerate()
            .filter(|(_, o)| o.share == share && o.side == OrderSide::Sell && o.quantity > 0)
            .map(|(i, o)| (i, o.clone()))
            .collect();
        // Buys from high to low price, asks from low to high; submission
        // order breaks ties.
        buys.sort_by(|a, b| {
            b.1.limit_price.partial_cmp(&a.1.limit_price).unwrap().then(a.0.cmp(&b.0))
        });
        sells.sort_by(|a, b| {
            a.1.limit_price.partial_cmp(&b.1.limit_price).unwrap().then(a.0.cmp(&b.0))
        });

        let mut s = 0;
        for (_, buy) in buys.iter_mut() {
            while buy.quantity > 0 && s < sells.len() {
                let ask = &mut sells[s].1;
                if ask.quantity == 0 {
                    s += 1;
                    continue;
                }
                if buy.limit_price < ask.limit_price {
                    break;
                }
                let qty = buy.quantity.min(ask.quantity);
                trades.push(Trade {
                    share,
                    buyer: buy.agent,
                    seller: ask.agent,
                    quantity: qty,
                    price: ask.limit_price,
                    from_new_issue: ask.new_issue,
                });
                buy.quantity -= qty;
                ask.quantity -= qty;
                if ask.quantity == 0 {
                    s += 1;
                }
            }
        }
    }
    Ok(trades)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buy(agent: u32, price: f64, qty: i64) -> Order {
        Order { agent, share: 1, side: OrderSide::Buy, limit_price: price, quantity: qty, new_issue: false }
    }

    fn sell(agent: u32, price: f64, qty: i64) -> Order {
        Order { agent, share: 1, side: OrderSide::Sell, limit_price: price, quantity: qty, new_issue: false }
    }

    #[test]
    fn no_orders_no_trades() {
        assert!(clearing_house_match(&[]).unwrap().is_empty());
    }

    #[test]
    fn single_cross_executes_at_ask() {
        let trades = clearing_house_match(&[buy(1, 12.0, 10), sell(2, 9.0, 8)]).unwrap();
        assert_eq!(trades.len(), 1);
        assert_eq!(trades[0].quantity, 8);
        assert_eq!(trades[0].price, 9.0);
    }

    #[test]
    fn greedy_match_stops_at_price_cross() {
        // buys [(12, 5), (10, 5)] vs sells [(9, 6), (11, 3)]:
        // 5@9, then 1@9, then stop because 10 < 11; 6 shares total.
        let trades = clearing_house_match(&[
            buy(1, 12.0, 5),
            buy(2, 10.0, 5),
            sell(3, 9.0, 6),
            sell(4, 11.0, 3),
        ])
        .unwrap();
        let total: i64 = trades.iter().map(|t| t.quantity).sum();
        assert_eq!(total, 6);
        assert_eq!(trades[0].quantity, 5);
        assert_eq!(trades[0].price, 9.0);
        assert_eq!(trades[1].quantity, 1);
        assert_eq!(trades[1].price, 9.0);
    }

    #[test]
    fn rejects_negative_quantity() {
        assert_eq!(
            clearing_house_match(&[buy(1, 10.0, -5)]),
            Err(RuleError::NegativeQuantity(-5))
        );
    }

    #[test]
    fn conserves_quantity_per_share() {
        let orders = [
            buy(1, 10.0, 7),
            buy(2, 11.0, 2),
            sell(3, 9.5, 4),
            sell(4, 10.5, 9),
            sell(5, 8.0, 1),
        ];
        let trades = clearing_house_match(&orders).unwrap();
        let bought: i64 = trades.iter().map(|t| t.quantity).sum();
        let offered: i64 = orders
            .iter()
            .filter(|o| o.side == OrderSide::Sell)
            .map(|o| o.quantity)
            .sum();
        assert!(bought <= offered);
        for t in &trades {
            assert!(t.quantity > 0);
        }
    }
}
