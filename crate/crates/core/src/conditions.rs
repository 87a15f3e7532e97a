//! The condition-tree language: hashing, evaluation against oracle
//! snapshots, the gas model, and operational lint rules.
//!
//! Evaluation is pure over a single immutable snapshot; missing oracle data
//! aborts instead of defaulting, so enforcement can never fire on absent
//! data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldElement;
use crate::hash::{hash2, params_tag};
use crate::types::{Address, Timestamp};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ConditionError {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("oracle data unavailable for {0}")]
    OracleUnavailable(String),
    #[error("fewer than 2 price samples inside the volatility window")]
    InsufficientHistory,
}

/// Comparison operators for price, volatility, and on-chain-state leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmpOp {
    Le,
    Ge,
    Lt,
    Gt,
}

impl CmpOp {
    pub fn apply(&self, lhs: u64, rhs: u64) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    fn code(&self) -> u64 {
        match self {
            CmpOp::Le => 1,
            CmpOp::Ge => 2,
            CmpOp::Lt => 3,
            CmpOp::Gt => 4,
        }
    }
}

/// Time leaves admit only inclusive comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOp {
    Le,
    Ge,
}

impl TimeOp {
    pub fn apply(&self, lhs: u64, rhs: u64) -> bool {
        match self {
            TimeOp::Le => lhs <= rhs,
            TimeOp::Ge => lhs >= rhs,
        }
    }

    fn code(&self) -> u64 {
        match self {
            TimeOp::Le => 1,
            TimeOp::Ge => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionLeaf {
    Price {
        oracle_addr: Address,
        asset_pair: String,
        op: CmpOp,
        threshold: u64,
        /// Optional commitment to the oracle implementation bytecode.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        code_hash: Option<FieldElement>,
    },
    Time {
        timestamp: Timestamp,
        op: TimeOp,
    },
    Volatility {
        oracle_addr: Address,
        asset_pair: String,
        window: u64,
        op: CmpOp,
        threshold: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        code_hash: Option<FieldElement>,
    },
    OnChainState {
        contract_addr: Address,
        calldata: u64,
        op: CmpOp,
        threshold: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum ConditionTree {
    Leaf { leaf: ConditionLeaf },
    And { left: Box<ConditionTree>, right: Box<ConditionTree> },
    Or { left: Box<ConditionTree>, right: Box<ConditionTree> },
    Not { child: Box<ConditionTree> },
}

impl ConditionTree {
    pub fn leaf(leaf: ConditionLeaf) -> Self {
        ConditionTree::Leaf { leaf }
    }

    pub fn and(left: ConditionTree, right: ConditionTree) -> Self {
        ConditionTree::And {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn or(left: ConditionTree, right: ConditionTree) -> Self {
        ConditionTree::Or {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn not(child: ConditionTree) -> Self {
        ConditionTree::Not {
            child: Box::new(child),
        }
    }

    /// Leaf count k.
    pub fn leaf_count(&self) -> u64 {
        match self {
            ConditionTree::Leaf { .. } => 1,
            ConditionTree::And { left, right } | ConditionTree::Or { left, right } => {
                left.leaf_count() + right.leaf_count()
            }
            ConditionTree::Not { child } => child.leaf_count(),
        }
    }

    pub fn validate(&self) -> Result<(), ConditionError> {
        match self {
            ConditionTree::Leaf { leaf } => match leaf {
                ConditionLeaf::Price { asset_pair, .. }
                | ConditionLeaf::Volatility { asset_pair, .. } => {
                    if asset_pair.is_empty() || asset_pair.len() > 31 {
                        Err(ConditionError::MalformedTree(format!(
                            "asset pair length {} out of 1..=31",
                            asset_pair.len()
                        )))
                    } else {
                        Ok(())
                    }
                }
                _ => Ok(()),
            },
            ConditionTree::And { left, right } | ConditionTree::Or { left, right } => {
                left.validate()?;
                right.validate()
            }
            ConditionTree::Not { child } => child.validate(),
        }
    }
}

fn string_to_field(s: &str) -> FieldElement {
    let mut bytes = [0u8; 32];
    let src = s.as_bytes();
    bytes[32 - src.len()..].copy_from_slice(src);
    FieldElement::from_bytes_be(&bytes)
}

/// Canonical preorder token stream. Fixed arity per node code and fixed
/// field count per leaf variant make the stream prefix-decodable, so the
/// serialization is injective on well-formed trees.
fn tokens(tree: &ConditionTree, out: &mut Vec<FieldElement>) {
    let fe = FieldElement::from_u64;
    match tree {
        ConditionTree::And { left, right } => {
            out.push(fe(1));
            tokens(left, out);
            tokens(right, out);
        }
        ConditionTree::Or { left, right } => {
            out.push(fe(2));
            tokens(left, out);
            tokens(right, out);
        }
        ConditionTree::Not { child } => {
            out.push(fe(3));
            tokens(child, out);
        }
        ConditionTree::Leaf { leaf } => match leaf {
            ConditionLeaf::Price {
                oracle_addr,
                asset_pair,
                op,
                threshold,
                code_hash,
            } => {
                out.push(fe(10));
                out.push(oracle_addr.to_field());
                out.push(string_to_field(asset_pair));
                out.push(fe(op.code()));
                out.push(fe(*threshold));
                push_code_hash(out, code_hash);
            }
            ConditionLeaf::Time { timestamp, op } => {
                out.push(fe(11));
                out.push(fe(*timestamp));
                out.push(fe(op.code()));
            }
            ConditionLeaf::Volatility {
                oracle_addr,
                asset_pair,
                window,
                op,
                threshold,
                code_hash,
            } => {
                out.push(fe(12));
                out.push(oracle_addr.to_field());
                out.push(string_to_field(asset_pair));
                out.push(fe(*window));
                out.push(fe(op.code()));
                out.push(fe(*threshold));
                push_code_hash(out, code_hash);
            }
            ConditionLeaf::OnChainState {
                contract_addr,
                calldata,
                op,
                threshold,
            } => {
                out.push(fe(13));
                out.push(contract_addr.to_field());
                out.push(fe(*calldata));
                out.push(fe(op.code()));
                out.push(fe(*threshold));
            }
        },
    }
}

fn push_code_hash(out: &mut Vec<FieldElement>, code_hash: &Option<FieldElement>) {
    match code_hash {
        None => out.push(FieldElement::ZERO),
        Some(h) => {
            out.push(FieldElement::ONE);
            out.push(*h);
        }
    }
}

/// condHash: fold the canonical token stream pairwise with hash_2 under the
/// PARAMS_TAG domain. Any single-node change, including oracle_addr, alters
/// the digest.
pub fn cond_hash(tree: &ConditionTree) -> Result<FieldElement, ConditionError> {
    tree.validate()?;
    let mut toks = Vec::new();
    tokens(tree, &mut toks);
    let mut acc = params_tag();
    for t in toks {
        acc = hash2(acc, t);
    }
    Ok(acc)
}

/// One consistent read of all oracle data; every evaluation draws from a
/// single snapshot and nothing else.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSnapshot {
    pub block_timestamp: Timestamp,
    #[serde(default)]
    pub prices: Vec<PriceEntry>,
    #[serde(default)]
    pub price_history: Vec<HistoryEntry>,
    #[serde(default)]
    pub chain_state: Vec<ChainStateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceEntry {
    pub oracle_addr: Address,
    pub asset_pair: String,
    pub price: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub oracle_addr: Address,
    pub asset_pair: String,
    pub samples: Vec<(Timestamp, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStateEntry {
    pub contract_addr: Address,
    pub calldata: u64,
    pub value: u64,
}

impl OracleSnapshot {
    pub fn price(&self, oracle: Address, pair: &str) -> Option<u64> {
        self.prices
            .iter()
            .find(|e| e.oracle_addr == oracle && e.asset_pair == pair)
            .map(|e| e.price)
    }

    pub fn history(&self, oracle: Address, pair: &str) -> Option<&[(Timestamp, u64)]> {
        self.price_history
            .iter()
            .find(|e| e.oracle_addr == oracle && e.asset_pair == pair)
            .map(|e| e.samples.as_slice())
    }

    pub fn state(&self, contract: Address, calldata: u64) -> Option<u64> {
        self.chain_state
            .iter()
            .find(|e| e.contract_addr == contract && e.calldata == calldata)
            .map(|e| e.value)
    }
}

/// Population standard deviation, integer-floored, of the samples whose
/// timestamps fall in [now - window, now].
pub fn volatility(
    history: &[(Timestamp, u64)],
    window: u64,
    now: Timestamp,
) -> Result<u64, ConditionError> {
    let lo = now.saturating_sub(window);
    let in_window: Vec<u128> = history
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= now)
        .map(|(_, p)| *p as u128)
        .collect();
    let n = in_window.len() as u128;
    if n < 2 {
        return Err(ConditionError::InsufficientHistory);
    }
    let sum: u128 = in_window.iter().sum();
    let sum_sq: u128 = in_window.iter().map(|p| p * p).sum();
    // stdev = floor(sqrt(n*sum_sq - sum^2) / n), exact in integers
    let num = n * sum_sq - sum * sum;
    Ok((isqrt(num) / n) as u64)
}

fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = v;
    let mut y = (x + 1) / 2;
    while y < x {
        x = y;
        y = (x + v / x) / 2;
    }
    x
}

/// Standard boolean semantics over the snapshot; missing oracle keys abort.
pub fn evaluate(tree: &ConditionTree, snapshot: &OracleSnapshot) -> Result<bool, ConditionError> {
    tree.validate()?;
    eval_inner(tree, snapshot)
}

fn eval_inner(tree: &ConditionTree, snap: &OracleSnapshot) -> Result<bool, ConditionError> {
    match tree {
        ConditionTree::And { left, right } => {
            // Both sides evaluate so that missing data aborts regardless of
            // short-circuit order.
            let l = eval_inner(left, snap)?;
            let r = eval_inner(right, snap)?;
            Ok(l && r)
        }
        ConditionTree::Or { left, right } => {
            let l = eval_inner(left, snap)?;
            let r = eval_inner(right, snap)?;
            Ok(l || r)
        }
        ConditionTree::Not { child } => Ok(!eval_inner(child, snap)?),
        ConditionTree::Leaf { leaf } => match leaf {
            ConditionLeaf::Price {
                oracle_addr,
                asset_pair,
                op,
                threshold,
                ..
            } => {
                let price = snap.price(*oracle_addr, asset_pair).ok_or_else(|| {
                    ConditionError::OracleUnavailable(format!("{oracle_addr}/{asset_pair}"))
                })?;
                Ok(op.apply(price, *threshold))
            }
            ConditionLeaf::Time { timestamp, op } => {
                Ok(op.apply(snap.block_timestamp, *timestamp))
            }
            ConditionLeaf::Volatility {
                oracle_addr,
                asset_pair,
                window,
                op,
                threshold,
                ..
            } => {
                let history = snap.history(*oracle_addr, asset_pair).ok_or_else(|| {
                    ConditionError::OracleUnavailable(format!("{oracle_addr}/{asset_pair}"))
                })?;
                let vol = volatility(history, *window, snap.block_timestamp)?;
                Ok(op.apply(vol, *threshold))
            }
            ConditionLeaf::OnChainState {
                contract_addr,
                calldata,
                op,
                threshold,
            } => {
                let value = snap.state(*contract_addr, *calldata).ok_or_else(|| {
                    ConditionError::OracleUnavailable(format!("{contract_addr}/{calldata:#x}"))
                })?;
                Ok(op.apply(value, *threshold))
            }
        },
    }
}

/// G(T_c) = 3000k - 500 for k >= 1 leaves.
pub fn gas_cost(tree: &ConditionTree) -> u64 {
    gas_cost_for_leaves(tree.leaf_count())
}

pub fn gas_cost_for_leaves(k: u64) -> u64 {
    3000 * k - 500
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// A price leaf without a conjoined time leaf: single-block oracle
    /// manipulation can flip it. Any timestamp delta defeats this.
    SingleBlockManipulable,
    /// k > 100, beyond the bound for complex strategies.
    OversizeTree,
    /// k > 20, beyond the recommended operational size.
    LargeOperationalTree,
}

/// Operational lint over the tree shape.
pub fn lint(tree: &ConditionTree) -> Vec<Warning> {
    let mut warnings = Vec::new();
    let k = tree.leaf_count();
    if !price_leaves_protected(tree) {
        warnings.push(Warning::SingleBlockManipulable);
    }
    if k > 100 {
        warnings.push(Warning::OversizeTree);
    }
    if k > 20 {
        warnings.push(Warning::LargeOperationalTree);
    }
    warnings
}

fn has_time(tree: &ConditionTree) -> bool {
    match tree {
        ConditionTree::Leaf { leaf } => matches!(leaf, ConditionLeaf::Time { .. }),
        ConditionTree::And { left, right } | ConditionTree::Or { left, right } => {
            has_time(left) || has_time(right)
        }
        ConditionTree::Not { child } => has_time(child),
    }
}

/// True when every price leaf is conjoined with some time leaf. NOT nodes
/// are pushed to the leaves first (De Morgan), so the check is over the
/// normalized AND/OR structure; a negated time leaf still constrains timing
/// and still counts.
fn price_leaves_protected(tree: &ConditionTree) -> bool {
    protected_nnf(&to_nnf(tree, false))
}

fn to_nnf(tree: &ConditionTree, negate: bool) -> ConditionTree {
    match tree {
        ConditionTree::Not { child } => to_nnf(child, !negate),
        ConditionTree::And { left, right } => {
            let (l, r) = (to_nnf(left, negate), to_nnf(right, negate));
            if negate {
                ConditionTree::or(l, r)
            } else {
                ConditionTree::and(l, r)
            }
        }
        ConditionTree::Or { left, right } => {
            let (l, r) = (to_nnf(left, negate), to_nnf(right, negate));
            if negate {
                ConditionTree::and(l, r)
            } else {
                ConditionTree::or(l, r)
            }
        }
        // Polarity does not matter for the protection check; keep the leaf.
        ConditionTree::Leaf { leaf } => ConditionTree::leaf(leaf.clone()),
    }
}

fn protected_nnf(tree: &ConditionTree) -> bool {
    match tree {
        ConditionTree::Leaf { leaf } => !matches!(leaf, ConditionLeaf::Price { .. }),
        ConditionTree::And { left, right } => {
            if has_time(left) || has_time(right) {
                true
            } else {
                protected_nnf(left) && protected_nnf(right)
            }
        }
        ConditionTree::Or { left, right } => protected_nnf(left) && protected_nnf(right),
        ConditionTree::Not { child } => protected_nnf(child),
    }
}
