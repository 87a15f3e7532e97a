//! The envelope registry: marker sets, the four lifecycle operations with
//! checks-effects-interactions ordering, debt accrual, health factor, and
//! deployment-template policy.
//!
//! The registry is a serial state machine. Marker sets M_active and M_tomb
//! change only inside create/settle/enforce/expire; the one exception is a
//! deliberately broken build used by the differential audits, constructed
//! via [`Registry::with_unrestricted_admin`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conditions::{cond_hash, evaluate, ConditionTree, OracleSnapshot};
use crate::field::FieldElement;
use crate::hash::{hash5, SUITE_ID};
use crate::merkle::MerkleTree;
use crate::relations::{
    verify_encumber, verify_settle, verify_spend, Attestation, EncumberStatement,
    SettleStatement, SpendStatement,
};
use crate::types::{Address, Timestamp};

pub const SECONDS_PER_YEAR: u64 = 31_536_000;
pub const PPM: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum RegistryError {
    #[error("attestation does not verify against the statement")]
    AttestationInvalid,
    #[error("statement root is not the current tree root")]
    StaleRoot,
    #[error("note is already encumbered by an active envelope")]
    AlreadyEncumbered,
    #[error("note's spend nullifier is already in the spent set")]
    NoteAlreadySpent,
    #[error("note is under an active encumbrance and cannot be spent")]
    NoteEncumbered,
    #[error("create is frozen by the break-glass policy")]
    CreateFrozen,
    #[error("no envelope with id {0}")]
    UnknownEnvelope(u64),
    #[error("encumbrance marker is not active")]
    NotActive,
    #[error("repayment {offered} is below accrued debt {due}")]
    InsufficientRepayment { due: u128, offered: u128 },
    #[error("revealed condition tree does not match the committed hash")]
    CondHashMismatch,
    #[error("condition evaluated to false")]
    ConditionFalse,
    #[error("oracle data unavailable: {0}")]
    OracleUnavailable(String),
    #[error("now {now} has not passed deadline {deadline}")]
    NotYetExpired { deadline: Timestamp, now: Timestamp },
    #[error("t_now precedes t_register")]
    TimeReversal,
    #[error("debt is zero; health factor is undefined")]
    DivisionByZero,
    #[error("template provides no mutation path for this request")]
    NoMutationPath,
    #[error("amount exceeds the 128-bit accounting range")]
    Overflow,
    #[error("malformed condition tree: {0}")]
    BadConditionTree(String),
}

impl RegistryError {
    /// Stable short code, used by scenario expectation matching.
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::AttestationInvalid => "attestation_invalid",
            RegistryError::StaleRoot => "stale_root",
            RegistryError::AlreadyEncumbered => "already_encumbered",
            RegistryError::NoteAlreadySpent => "note_already_spent",
            RegistryError::NoteEncumbered => "note_encumbered",
            RegistryError::CreateFrozen => "create_frozen",
            RegistryError::UnknownEnvelope(_) => "unknown_envelope",
            RegistryError::NotActive => "not_active",
            RegistryError::InsufficientRepayment { .. } => "insufficient_repayment",
            RegistryError::CondHashMismatch => "cond_hash_mismatch",
            RegistryError::ConditionFalse => "condition_false",
            RegistryError::OracleUnavailable(_) => "oracle_unavailable",
            RegistryError::NotYetExpired { .. } => "not_yet_expired",
            RegistryError::TimeReversal => "time_reversal",
            RegistryError::DivisionByZero => "division_by_zero",
            RegistryError::NoMutationPath => "no_mutation_path",
            RegistryError::Overflow => "overflow",
            RegistryError::BadConditionTree(_) => "bad_condition_tree",
        }
    }
}

/// The keeper-executable redistribution, committed under intentHash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedistributionIntent {
    pub action_type: u8,
    pub target_addr: Address,
    pub params_hash: FieldElement,
    pub keeper_fee: u128,
    pub max_amount: u128,
}

/// hash_5 over the intent fields in declaration order.
pub fn intent_hash(intent: &RedistributionIntent) -> FieldElement {
    hash5(
        FieldElement::from_u64(intent.action_type as u64),
        intent.target_addr.to_field(),
        intent.params_hash,
        FieldElement::from_u128(intent.keeper_fee),
        FieldElement::from_u128(intent.max_amount),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeStatus {
    Active,
    Settled,
    Enforced,
    Expired,
}

impl EnvelopeStatus {
    pub fn is_terminal(self) -> bool {
        self != EnvelopeStatus::Active
    }
}

/// The per-encumbrance record. The committed fields (cond_hash, intent_hash,
/// position_commit, deadline) have no mutating operation; status only moves
/// Active to a terminal state, and terminal states absorb.
///
/// col_nominal and debt_principal are plaintext here because this registry
/// is a model, not a chain contract; position_commit is what the relation
/// actually binds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub eid: u64,
    pub cm_note: FieldElement,
    pub nf_encumber: FieldElement,
    pub cond_hash: FieldElement,
    pub intent_hash: FieldElement,
    pub position_commit: FieldElement,
    pub deadline: Timestamp,
    pub irm_addr: Address,
    pub status: EnvelopeStatus,
    /// Payout destination bound by the relation's public input; the intent
    /// carries the same address unless the checker was broken.
    pub target_addr: Address,
    pub intent: RedistributionIntent,
    pub irm: InterestRateModel,
    pub col_nominal: u128,
    pub debt_principal: u128,
    pub t_register: Timestamp,
    pub nf_spend: FieldElement,
}

/// Interest rate models, parameters committed at create time. Both are
/// deterministic in (parameters, timestamp) and non-decreasing over an
/// envelope's lifetime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum InterestRateModel {
    Constant { rate_ppm: u64 },
    /// Utilization-kinked model: base + slope1 up to the kink, then slope2
    /// beyond it. Utilization is committed, so the rate is constant per
    /// envelope and AS8 holds trivially.
    PiecewiseLinear {
        base_ppm: u64,
        slope1_ppm: u64,
        slope2_ppm: u64,
        kink_utilization_ppm: u64,
        utilization_ppm: u64,
    },
}

impl InterestRateModel {
    /// Per-year rate in ppm at the given timestamp.
    pub fn rate_ppm(&self, _at: Timestamp) -> u64 {
        match self {
            InterestRateModel::Constant { rate_ppm } => *rate_ppm,
            InterestRateModel::PiecewiseLinear {
                base_ppm,
                slope1_ppm,
                slope2_ppm,
                kink_utilization_ppm,
                utilization_ppm,
            } => {
                let kink = (*kink_utilization_ppm).max(1);
                let u = *utilization_ppm;
                if u <= kink {
                    base_ppm + (*slope1_ppm as u128 * u as u128 / kink as u128) as u64
                } else {
                    let span = (PPM - kink).max(1);
                    base_ppm
                        + slope1_ppm
                        + (*slope2_ppm as u128 * (u - kink) as u128 / span as u128) as u64
                }
            }
        }
    }
}

/// Registry immutability configurations. Strict has no mutation path at
/// all; TimelockParams affects only envelopes created after the lock
/// elapses; BreakGlass can freeze create and nothing else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum DeploymentTemplate {
    Strict,
    TimelockParams {
        timelock_seconds: u64,
        threshold_m: u8,
        threshold_n: u8,
    },
    BreakGlass {
        m: u8,
        n: u8,
        drain_frozen: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct PendingParamChange {
    new_default_rate_ppm: u64,
    effective_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateReceipt {
    pub eid: u64,
    pub nf_encumber: FieldElement,
    pub re_encumbered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettleReceipt {
    pub eid: u64,
    pub repayment: u128,
    pub debt_due: u128,
    pub status: EnvelopeStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnforceReceipt {
    pub eid: u64,
    pub caller: Address,
    pub target_addr: Address,
    pub redistributed: u128,
    pub keeper_fee: u128,
    pub status: EnvelopeStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpireReceipt {
    pub eid: u64,
    pub caller: Address,
    pub status: EnvelopeStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpendReceipt {
    pub nf_spend: FieldElement,
    pub new_commitment: Option<FieldElement>,
    /// The encumbrance marker consulted before acceptance. Every accepted
    /// spend records this read; no acceptance path skips it.
    pub marker_read: FieldElement,
    pub marker_was_active: bool,
}

/// One receipt per applied operation, for scenario reports. Externally
/// tagged so the u128 amounts serialize without buffering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receipt {
    Create(CreateReceipt),
    Settle(SettleReceipt),
    Enforce(EnforceReceipt),
    Expire(ExpireReceipt),
    Spend(SpendReceipt),
}

/// The registry state machine. Single writer; operations apply serially.
#[derive(Debug, Clone)]
pub struct Registry {
    m_active: BTreeSet<FieldElement>,
    m_tomb: BTreeSet<FieldElement>,
    envelopes: BTreeMap<u64, Envelope>,
    spent: BTreeSet<FieldElement>,
    tree: MerkleTree,
    template: DeploymentTemplate,
    next_eid: u64,
    create_frozen: bool,
    default_rate_ppm: u64,
    pending_param: Option<PendingParamChange>,
    /// > 0 while a step-5 interaction hook is on the stack.
    hook_depth: u32,
    /// Operations attempted while a hook was on the stack. Diagnostic only;
    /// protection comes from CEI ordering, not from this counter.
    reentry_attempts: u64,
    admin_backdoor: bool,
    mutations: RegistryMutations,
}

/// Deleted on-chain checks, for harness-soundness testing only. The game
/// suite builds registries with one of these set and must then observe
/// wins; protocol code always runs with the default (all intact).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegistryMutations {
    /// Skip the spend path's active-marker gate.
    pub disable_spend_marker_gate: bool,
    /// Skip settle step 3 (repayment >= accrued debt).
    pub disable_debt_sufficiency: bool,
    /// Skip the redistribution cap at enforce.
    pub disable_redistribution_cap: bool,
}

impl Registry {
    pub fn new(template: DeploymentTemplate) -> Self {
        Registry {
            m_active: BTreeSet::new(),
            m_tomb: BTreeSet::new(),
            envelopes: BTreeMap::new(),
            spent: BTreeSet::new(),
            tree: MerkleTree::with_default_depth(),
            template,
            next_eid: 0,
            create_frozen: false,
            default_rate_ppm: 50_000,
            pending_param: None,
            hook_depth: 0,
            reentry_attempts: 0,
            admin_backdoor: false,
            mutations: RegistryMutations::default(),
        }
    }

    /// A deliberately broken build with one or more on-chain checks
    /// deleted. Only game harnesses should construct this.
    pub fn with_mutations(template: DeploymentTemplate, mutations: RegistryMutations) -> Self {
        let mut r = Self::new(template);
        r.mutations = mutations;
        r
    }

    pub fn with_tree_depth(template: DeploymentTemplate, depth: usize) -> Self {
        let mut r = Self::new(template);
        r.tree = MerkleTree::new(depth).expect("caller passes a valid depth");
        r
    }

    /// A policy-disabled build with an admin path that mutates marker sets
    /// directly. Exists solely so the differential audits can show what
    /// breaks without the no-admin-path assumption; never use in protocol
    /// code.
    pub fn with_unrestricted_admin(template: DeploymentTemplate) -> Self {
        let mut r = Self::new(template);
        r.admin_backdoor = true;
        r
    }

    pub fn template(&self) -> &DeploymentTemplate {
        &self.template
    }

    pub fn tree(&self) -> &MerkleTree {
        &self.tree
    }

    pub fn envelope(&self, eid: u64) -> Option<&Envelope> {
        self.envelopes.get(&eid)
    }

    pub fn envelopes(&self) -> impl Iterator<Item = &Envelope> {
        self.envelopes.values()
    }

    pub fn is_active_marker(&self, nf: FieldElement) -> bool {
        self.m_active.contains(&nf)
    }

    pub fn is_tomb_marker(&self, nf: FieldElement) -> bool {
        self.m_tomb.contains(&nf)
    }

    pub fn is_spent(&self, nf_spend: FieldElement) -> bool {
        self.spent.contains(&nf_spend)
    }

    pub fn reentry_attempts(&self) -> u64 {
        self.reentry_attempts
    }

    pub fn has_admin_backdoor(&self) -> bool {
        self.admin_backdoor
    }

    fn note_reentry(&mut self) {
        if self.hook_depth > 0 {
            self.reentry_attempts += 1;
        }
    }

    /// Add a note commitment to the accumulator (models a shielded deposit
    /// or transfer output landing on chain).
    pub fn register_commitment(&mut self, cm: FieldElement) -> Result<u64, RegistryError> {
        self.tree.insert(cm).map_err(|_| RegistryError::Overflow)
    }

    /// The default rate used when create is called without an explicit
    /// rate model, honoring a timelocked change once it takes effect.
    pub fn effective_default_rate(&self, at: Timestamp) -> u64 {
        match self.pending_param {
            Some(p) if at >= p.effective_at => p.new_default_rate_ppm,
            _ => self.default_rate_ppm,
        }
    }

    /// Parameter governance. Strict and BreakGlass refuse; TimelockParams
    /// schedules a default-rate change that only envelopes created after
    /// the lock elapses can observe. Marker sets are never touched.
    pub fn propose_param_change(
        &mut self,
        new_default_rate_ppm: u64,
        approvals: u8,
        now: Timestamp,
    ) -> Result<Timestamp, RegistryError> {
        match self.template {
            DeploymentTemplate::TimelockParams {
                timelock_seconds,
                threshold_m,
                ..
            } => {
                if approvals < threshold_m {
                    return Err(RegistryError::NoMutationPath);
                }
                let effective_at = now + timelock_seconds;
                self.pending_param = Some(PendingParamChange {
                    new_default_rate_ppm,
                    effective_at,
                });
                Ok(effective_at)
            }
            _ => Err(RegistryError::NoMutationPath),
        }
    }

    /// Break-glass freeze: stops new creates, touches nothing else.
    pub fn set_create_frozen(&mut self, frozen: bool, approvals: u8) -> Result<(), RegistryError> {
        match self.template {
            DeploymentTemplate::BreakGlass { m, .. } => {
                if approvals < m {
                    return Err(RegistryError::NoMutationPath);
                }
                self.create_frozen = frozen;
                Ok(())
            }
            _ => Err(RegistryError::NoMutationPath),
        }
    }

    /// The AS7 violation, available only on policy-disabled builds.
    pub fn admin_unmark(&mut self, nf: FieldElement) -> Result<(), RegistryError> {
        if !self.admin_backdoor {
            return Err(RegistryError::NoMutationPath);
        }
        if !self.m_active.remove(&nf) {
            return Err(RegistryError::NotActive);
        }
        Ok(())
    }

    /// Register an envelope. Checks in order: template policy, attestation,
    /// current root, double-encumbrance (marker not already active), spent
    /// set; then stores the envelope Active and marks nf_encumber.
    #[allow(clippy::too_many_arguments)]
    pub fn create(
        &mut self,
        st: &EncumberStatement,
        att: &Attestation,
        intent: RedistributionIntent,
        deadline: Timestamp,
        irm: Option<InterestRateModel>,
        col_nominal: u128,
        debt_principal: u128,
        nf_spend: FieldElement,
        t_register: Timestamp,
    ) -> Result<CreateReceipt, RegistryError> {
        self.note_reentry();
        if self.create_frozen {
            return Err(RegistryError::CreateFrozen);
        }
        if !verify_encumber(att, st) || intent_hash(&intent) != st.intent_hash {
            return Err(RegistryError::AttestationInvalid);
        }
        if st.tree_root != self.tree.root() {
            return Err(RegistryError::StaleRoot);
        }
        if self.m_active.contains(&st.nf_encumber) {
            return Err(RegistryError::AlreadyEncumbered);
        }
        if self.spent.contains(&nf_spend) {
            return Err(RegistryError::NoteAlreadySpent);
        }
        let re_encumbered = self.m_tomb.contains(&st.nf_encumber);
        if re_encumbered {
            // sequential re-encumbrance: the prior obligation closed, so
            // the tomb marker moves back to active for the fresh envelope
            self.m_tomb.remove(&st.nf_encumber);
        }
        let irm = irm.unwrap_or(InterestRateModel::Constant {
            rate_ppm: self.effective_default_rate(t_register),
        });
        let eid = self.next_eid;
        self.next_eid += 1;
        let envelope = Envelope {
            eid,
            cm_note: st.cm_note,
            nf_encumber: st.nf_encumber,
            cond_hash: st.cond_hash,
            intent_hash: st.intent_hash,
            position_commit: st.position_commit,
            deadline,
            irm_addr: st.irm_addr,
            status: EnvelopeStatus::Active,
            target_addr: st.target_addr,
            intent,
            irm,
            col_nominal,
            debt_principal,
            t_register,
            nf_spend,
        };
        self.envelopes.insert(eid, envelope);
        self.m_active.insert(st.nf_encumber);
        Ok(CreateReceipt {
            eid,
            nf_encumber: st.nf_encumber,
            re_encumbered,
        })
    }

    /// Spend a note: nullifier freshness plus the encumbrance gate. An
    /// active marker for the note's encumbrance nullifier blocks the spend.
    pub fn spend(
        &mut self,
        st: &SpendStatement,
        att: &Attestation,
        new_commitment: Option<FieldElement>,
    ) -> Result<SpendReceipt, RegistryError> {
        self.note_reentry();
        if !verify_spend(att, st) {
            return Err(RegistryError::AttestationInvalid);
        }
        if st.tree_root != self.tree.root() {
            return Err(RegistryError::StaleRoot);
        }
        if self.spent.contains(&st.nf_spend) {
            return Err(RegistryError::NoteAlreadySpent);
        }
        let marker_was_active = self.m_active.contains(&st.nf_encumber_public_input);
        if marker_was_active && !self.mutations.disable_spend_marker_gate {
            return Err(RegistryError::NoteEncumbered);
        }
        self.spent.insert(st.nf_spend);
        if let Some(cm) = new_commitment {
            self.tree.insert(cm).map_err(|_| RegistryError::Overflow)?;
        }
        Ok(SpendReceipt {
            nf_spend: st.nf_spend,
            new_commitment,
            marker_read: st.nf_encumber_public_input,
            marker_was_active,
        })
    }

    pub fn settle(
        &mut self,
        eid: u64,
        st: &SettleStatement,
        att: &Attestation,
        now: Timestamp,
    ) -> Result<SettleReceipt, RegistryError> {
        self.settle_with_hook(eid, st, att, now, |_| {})
    }

    /// The five-step settle path. Steps, in order: verify attestation;
    /// require the marker active; require repayment covers accrued debt;
    /// move the marker and set status; run the interaction hook. The hook
    /// runs strictly after effects, so a re-entrant settle fails at step 2.
    pub fn settle_with_hook(
        &mut self,
        eid: u64,
        st: &SettleStatement,
        att: &Attestation,
        now: Timestamp,
        mut hook: impl FnMut(&mut Registry),
    ) -> Result<SettleReceipt, RegistryError> {
        self.note_reentry();
        // step 1: proof verification
        if st.eid != eid || !verify_settle(att, st) {
            return Err(RegistryError::AttestationInvalid);
        }
        let env = self
            .envelopes
            .get(&eid)
            .ok_or(RegistryError::UnknownEnvelope(eid))?;
        if env.nf_encumber != st.nf_encumber_public_input {
            return Err(RegistryError::AttestationInvalid);
        }
        // step 2: marker check
        if !self.m_active.contains(&st.nf_encumber_public_input) {
            return Err(RegistryError::NotActive);
        }
        // step 3: debt sufficiency
        let rate = env.irm.rate_ppm(now);
        let due = debt_accrued(env.debt_principal, rate, env.t_register, now)?;
        let offered = fe_to_u128(st.repayment_amount).ok_or(RegistryError::Overflow)?;
        if offered < due && !self.mutations.disable_debt_sufficiency {
            return Err(RegistryError::InsufficientRepayment { due, offered });
        }
        // step 4: effects
        self.m_active.remove(&st.nf_encumber_public_input);
        self.m_tomb.insert(st.nf_encumber_public_input);
        self.envelopes.get_mut(&eid).expect("checked above").status = EnvelopeStatus::Settled;
        // step 5: interaction
        self.hook_depth += 1;
        hook(self);
        self.hook_depth -= 1;
        Ok(SettleReceipt {
            eid,
            repayment: offered,
            debt_due: due,
            status: EnvelopeStatus::Settled,
        })
    }

    pub fn enforce(
        &mut self,
        eid: u64,
        snapshot: &OracleSnapshot,
        revealed: &ConditionTree,
        caller: Address,
    ) -> Result<EnforceReceipt, RegistryError> {
        self.enforce_with_hook(eid, snapshot, revealed, caller, |_| {})
    }

    /// Permissionless enforcement: any caller, no key material, no
    /// attestation. Requires the marker active, the revealed tree matching
    /// the committed hash, and the condition true on the snapshot.
    pub fn enforce_with_hook(
        &mut self,
        eid: u64,
        snapshot: &OracleSnapshot,
        revealed: &ConditionTree,
        caller: Address,
        mut hook: impl FnMut(&mut Registry),
    ) -> Result<EnforceReceipt, RegistryError> {
        self.note_reentry();
        let env = self
            .envelopes
            .get(&eid)
            .ok_or(RegistryError::UnknownEnvelope(eid))?
            .clone();
        if !self.m_active.contains(&env.nf_encumber) {
            return Err(RegistryError::NotActive);
        }
        let revealed_hash = cond_hash(revealed)
            .map_err(|e| RegistryError::BadConditionTree(e.to_string()))?;
        if revealed_hash != env.cond_hash {
            return Err(RegistryError::CondHashMismatch);
        }
        match evaluate(revealed, snapshot) {
            Ok(true) => {}
            Ok(false) => return Err(RegistryError::ConditionFalse),
            Err(e) => return Err(RegistryError::OracleUnavailable(e.to_string())),
        }
        // effects
        self.m_active.remove(&env.nf_encumber);
        self.m_tomb.insert(env.nf_encumber);
        self.envelopes.get_mut(&eid).expect("checked above").status = EnvelopeStatus::Enforced;
        // interaction: redistribution capped by the committed max_amount
        let redistributed = if self.mutations.disable_redistribution_cap {
            env.col_nominal
        } else {
            env.col_nominal.min(env.intent.max_amount)
        };
        self.hook_depth += 1;
        hook(self);
        self.hook_depth -= 1;
        Ok(EnforceReceipt {
            eid,
            caller,
            target_addr: env.target_addr,
            redistributed,
            keeper_fee: env.intent.keeper_fee,
            status: EnvelopeStatus::Enforced,
        })
    }

    pub fn expire(
        &mut self,
        eid: u64,
        now: Timestamp,
        caller: Address,
    ) -> Result<ExpireReceipt, RegistryError> {
        self.expire_with_hook(eid, now, caller, |_, _| {})
    }

    /// Permissionless deadline exit; strictly-after semantics (now must
    /// exceed the deadline). The fallback hook receives the receipt.
    pub fn expire_with_hook(
        &mut self,
        eid: u64,
        now: Timestamp,
        caller: Address,
        mut fallback: impl FnMut(&mut Registry, &ExpireReceipt),
    ) -> Result<ExpireReceipt, RegistryError> {
        self.note_reentry();
        let env = self
            .envelopes
            .get(&eid)
            .ok_or(RegistryError::UnknownEnvelope(eid))?;
        if now <= env.deadline {
            return Err(RegistryError::NotYetExpired {
                deadline: env.deadline,
                now,
            });
        }
        let nf = env.nf_encumber;
        if !self.m_active.contains(&nf) {
            return Err(RegistryError::NotActive);
        }
        self.m_active.remove(&nf);
        self.m_tomb.insert(nf);
        self.envelopes.get_mut(&eid).expect("checked above").status = EnvelopeStatus::Expired;
        let receipt = ExpireReceipt {
            eid,
            caller,
            status: EnvelopeStatus::Expired,
        };
        self.hook_depth += 1;
        fallback(self, &receipt);
        self.hook_depth -= 1;
        Ok(receipt)
    }

    /// Structural invariants checked after every scenario step: the marker
    /// sets partition, and each envelope's status agrees with its marker's
    /// location.
    pub fn check_invariants(&self) -> Result<(), String> {
        if let Some(nf) = self.m_active.intersection(&self.m_tomb).next() {
            return Err(format!("marker {} in both M_active and M_tomb", nf.to_hex()));
        }
        for env in self.envelopes.values() {
            let (in_active, in_tomb) = (
                self.m_active.contains(&env.nf_encumber),
                self.m_tomb.contains(&env.nf_encumber),
            );
            let ok = match env.status {
                EnvelopeStatus::Active => in_active && !in_tomb,
                // re-encumbrance can move a tomb marker back to active for
                // a *newer* envelope of the same note
                _ => in_tomb || in_active,
            };
            if !ok {
                return Err(format!(
                    "envelope {} status {:?} disagrees with marker location",
                    env.eid, env.status
                ));
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            hash_suite: SUITE_ID.to_string(),
            template: self.template.clone(),
            next_eid: self.next_eid,
            create_frozen: self.create_frozen,
            m_active: self.m_active.iter().map(|f| f.to_hex()).collect(),
            m_tomb: self.m_tomb.iter().map(|f| f.to_hex()).collect(),
            spent: self.spent.iter().map(|f| f.to_hex()).collect(),
            tree_leaves: self.tree.leaves().iter().map(|f| f.to_hex()).collect(),
            envelopes: self.envelopes.values().cloned().collect(),
        }
    }

    /// SHA-256 over the canonical JSON snapshot; stable across runs.
    pub fn state_digest(&self) -> String {
        let json = serde_json::to_string(&self.snapshot()).expect("snapshot serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Serialized registry state. Marker sets appear as sorted hex strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub hash_suite: String,
    pub template: DeploymentTemplate,
    pub next_eid: u64,
    pub create_frozen: bool,
    pub m_active: Vec<String>,
    pub m_tomb: Vec<String>,
    pub spent: Vec<String>,
    pub tree_leaves: Vec<String>,
    pub envelopes: Vec<Envelope>,
}

/// Canonical value of a field element as u128, if it fits.
pub fn fe_to_u128(f: FieldElement) -> Option<u128> {
    let limbs = f.to_u256();
    if limbs[2] != 0 || limbs[3] != 0 {
        return None;
    }
    Some((limbs[1] as u128) << 64 | limbs[0] as u128)
}

/// Compound debt at per-second granularity: whole years compound
/// geometrically, the fractional year accrues linearly, and the final
/// division rounds up (creditor-favorable).
pub fn debt_accrued(
    principal: u128,
    rate_ppm: u64,
    t_register: Timestamp,
    t_now: Timestamp,
) -> Result<u128, RegistryError> {
    if t_now < t_register {
        return Err(RegistryError::TimeReversal);
    }
    let elapsed = t_now - t_register;
    let whole = elapsed / SECONDS_PER_YEAR;
    let frac = elapsed % SECONDS_PER_YEAR;
    let ppm = BigUint::from(PPM);
    let year = BigUint::from(SECONDS_PER_YEAR);
    let growth = (&ppm + BigUint::from(rate_ppm)).pow(whole as u32);
    let linear = &ppm * &year + BigUint::from(rate_ppm) * BigUint::from(frac);
    let numerator = BigUint::from(principal) * growth * linear;
    let denominator = ppm.pow(whole as u32 + 1) * year;
    let debt = (&numerator + &denominator - BigUint::from(1u8)) / denominator;
    u128::try_from(debt).map_err(|_| RegistryError::Overflow)
}

/// (col_nominal * oracle_price * ltv_ppm) / debt, in ppm fixed point.
pub fn health_factor(
    col_nominal: u128,
    oracle_price: u128,
    ltv_ppm: u64,
    debt: u128,
) -> Result<u128, RegistryError> {
    if debt == 0 {
        return Err(RegistryError::DivisionByZero);
    }
    let num = BigUint::from(col_nominal) * BigUint::from(oracle_price) * BigUint::from(ltv_ppm);
    let hf = num / BigUint::from(debt);
    u128::try_from(hf).map_err(|_| RegistryError::Overflow)
}
