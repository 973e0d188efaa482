//! Agent-based macroeconomic simulator that self-deploys an economy calibrated
//! to a Social Accounting Matrix (or to per-country SAMs extracted from an
//! inter-country input-output table), runs it to a steady state, snapshots it,
//! and supports multi-country what-if simulations with per-country workers
//! coupled by monthly trade exchange.
//!
//! Crate layout:
//! - [`tables`]: SAM / inter-country IO parsing, validation, extraction, scaling.
//! - [`agents`]: pure behavioral rules and state types for households, firms,
//!   banks, government, central bank and external-interface firms.
//! - [`engine`]: the monthly step of one country through a double-entry ledger.
//! - [`deployment`]: Darwinian deployment + calibration controller, snapshots,
//!   what-if scenarios.
//! - [`multicountry`]: lockstep multi-worker world runner with monthly trade
//!   message exchange.
//! - [`analysis`]: survey SAM reconstruction, ratio reports, IO analytics.
//! - [`config`]: run configuration, defaults and config hashing.

pub mod agents;
pub mod analysis;
pub mod config;
pub mod deployment;
pub mod engine;
pub mod money;
pub mod multicountry;
pub mod tables;

pub use tables::{IcioTable, SamTable, ScaledTargets};
