//! Gas-cost model and break-even economics. All arithmetic is exact
//! rational; USD values render at two decimals with round-half-up.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::gas_cost_for_leaves;

pub const CREATE_GAS: u64 = 2_800_000;
pub const SETTLE_GAS: u64 = 2_700_000;
/// Enforcement overhead outside the condition tree; with a 5-leaf tree the
/// total lands on 175,000.
pub const ENFORCE_BASE_GAS: u64 = 160_500;
/// Amortized per-operation gas under 10-way proof aggregation.
pub const AGGREGATED_AMORTIZED_GAS: u64 = 357_000;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum EconomicsError {
    #[error("unknown operation {0:?}")]
    UnknownOp(String),
    #[error("r_custody must be positive")]
    NonPositiveCustodyRate,
    #[error("gas and asset prices must be positive")]
    NonPositivePrice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostedOp {
    Create,
    Settle,
    Enforce,
    Aggregated,
}

impl CostedOp {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "create" => Some(CostedOp::Create),
            "settle" => Some(CostedOp::Settle),
            "enforce" => Some(CostedOp::Enforce),
            "aggregated" => Some(CostedOp::Aggregated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    pub create_gas: u64,
    pub settle_gas: u64,
    pub enforce_base_gas: u64,
    pub aggregated_amortized_gas: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            create_gas: CREATE_GAS,
            settle_gas: SETTLE_GAS,
            enforce_base_gas: ENFORCE_BASE_GAS,
            aggregated_amortized_gas: AGGREGATED_AMORTIZED_GAS,
        }
    }
}

impl CostModel {
    pub fn enforce_gas(&self, tree_leaves: u64) -> u64 {
        self.enforce_base_gas + gas_cost_for_leaves(tree_leaves)
    }

    pub fn gas_for(&self, op: CostedOp, tree_leaves: u64) -> u64 {
        match op {
            CostedOp::Create => self.create_gas,
            CostedOp::Settle => self.settle_gas,
            CostedOp::Enforce => self.enforce_gas(tree_leaves),
            CostedOp::Aggregated => self.aggregated_amortized_gas,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasEnvironment {
    pub label: String,
    pub gas_price_gwei: BigRational,
    pub eth_price_usd: BigRational,
}

impl GasEnvironment {
    pub fn new(label: &str, gas_price_gwei: BigRational, eth_price_usd: BigRational) -> Self {
        GasEnvironment {
            label: label.to_string(),
            gas_price_gwei,
            eth_price_usd,
        }
    }

    fn validate(&self) -> Result<(), EconomicsError> {
        if self.gas_price_gwei <= BigRational::zero() || self.eth_price_usd <= BigRational::zero()
        {
            return Err(EconomicsError::NonPositivePrice);
        }
        Ok(())
    }
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// The five reference environments, all at ETH $2,500.
pub fn reference_environments() -> Vec<GasEnvironment> {
    let eth = rational(2_500, 1);
    vec![
        GasEnvironment::new("L1, congestion", rational(100, 1), eth.clone()),
        GasEnvironment::new("L1, normal", rational(25, 1), eth.clone()),
        GasEnvironment::new("L1, calm", rational(5, 1), eth.clone()),
        GasEnvironment::new("L2 (Base, Optimism)", rational(1, 20), eth.clone()),
        GasEnvironment::new("L2 (Arbitrum, congested)", rational(1, 10), eth),
    ]
}

/// gas * p_gas * 1e-9 * p_ETH, exactly.
pub fn op_cost_usd(
    model: &CostModel,
    env: &GasEnvironment,
    op: CostedOp,
    tree_leaves: u64,
) -> Result<BigRational, EconomicsError> {
    env.validate()?;
    let gas = BigRational::from_integer(BigInt::from(model.gas_for(op, tree_leaves)));
    let gwei = BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64));
    Ok(gas * &env.gas_price_gwei * gwei * &env.eth_price_usd)
}

/// V_break = create_cost / r_custody (r as a fraction, e.g. 1/100).
pub fn break_even(
    model: &CostModel,
    env: &GasEnvironment,
    r_custody: &BigRational,
    cost_basis: CostedOp,
) -> Result<BigRational, EconomicsError> {
    if *r_custody <= BigRational::zero() {
        return Err(EconomicsError::NonPositiveCustodyRate);
    }
    let cost = op_cost_usd(model, env, cost_basis, 0)?;
    Ok(cost / r_custody)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EconomicsRow {
    pub environment: String,
    pub gas_price_gwei: String,
    pub op_cost_usd: String,
    pub break_even_usd: String,
}

/// One row per environment at the given custody rate and cost basis.
pub fn economics_table(
    model: &CostModel,
    envs: &[GasEnvironment],
    r_custody: &BigRational,
    cost_basis: CostedOp,
) -> Result<Vec<EconomicsRow>, EconomicsError> {
    envs.iter()
        .map(|env| {
            let cost = op_cost_usd(model, env, cost_basis, 0)?;
            let be = break_even(model, env, r_custody, cost_basis)?;
            Ok(EconomicsRow {
                environment: env.label.clone(),
                gas_price_gwei: render_rational(&env.gas_price_gwei),
                op_cost_usd: render_usd(&cost),
                break_even_usd: render_usd(&be),
            })
        })
        .collect()
}

/// Two decimals, round half up.
pub fn render_usd(v: &BigRational) -> String {
    let cents_exact = v * BigRational::from_integer(BigInt::from(100));
    // round half up: floor(x + 1/2) for non-negative x
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let rounded = (cents_exact + half).floor().to_integer();
    let negative = rounded.is_negative();
    let abs = rounded.abs();
    let whole = &abs / 100;
    let cents = &abs % 100;
    format!("{}{}.{:02}", if negative { "-" } else { "" }, whole, cents)
}

fn render_rational(v: &BigRational) -> String {
    if v.is_integer() {
        v.to_integer().to_string()
    } else {
        // denominators here are small powers of ten
        let scaled = v * BigRational::from_integer(BigInt::from(100));
        let int = scaled.to_integer();
        let whole = &int / BigInt::from(100);
        let frac = (&int % BigInt::from(100)).abs();
        let s = format!("{whole}.{frac:02}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
