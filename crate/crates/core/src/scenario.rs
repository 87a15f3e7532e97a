//! Scenario files: a JSON script of lifecycle operations applied serially
//! against a fresh registry, producing a report with every receipt, the
//! final state digest, and per-step invariant checks.
//!
//! Key material and blinding factors derive deterministically from the
//! scenario seed, so the same file yields a byte-identical report.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conditions::{ConditionTree, OracleSnapshot};
use crate::curve::KeyPair;
use crate::field::FieldElement;
use crate::hash::SUITE_ID;
use crate::ledger::{encumber_statement_with, ks_escape, restricted_state, AccountClass, KeyId};
use crate::note::{commit, encumbrance_nullifier, spend_nullifier, Note};
use crate::registry::{
    DeploymentTemplate, InterestRateModel, Receipt, RedistributionIntent, Registry,
    RegistryError,
};
use crate::relations::{Checker, SettleStatement, SpendStatement, SpendWitness};
use crate::types::{Address, Timestamp};

pub const SCENARIO_SCHEMA: &str = "envlock-scenario-v1";
pub const REPORT_SCHEMA: &str = "envlock-report-v1";

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorRole {
    Owner,
    Lender,
    Keeper,
    Adversary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorDecl {
    pub name: String,
    pub role: ActorRole,
    pub address: Address,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteDecl {
    pub id: String,
    pub owner: String,
    pub value: u64,
    pub asset_id: u64,
}

/// Intent with the target named by actor, resolved at run time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentDecl {
    pub action_type: u8,
    pub target: String,
    pub keeper_fee: u64,
    pub max_amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeDecl {
    pub id: String,
    pub note: String,
    pub intent: IntentDecl,
    pub deadline: Timestamp,
    pub rate_ppm: u64,
    pub col_nominal: u64,
    pub debt_principal: u64,
    pub condition: ConditionTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub at: Timestamp,
    pub snapshot: OracleSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScriptOp {
    Create {
        envelope: String,
        by: String,
    },
    Settle {
        envelope: String,
        by: String,
        repayment: u64,
        #[serde(default)]
        reentrant: bool,
    },
    Enforce {
        envelope: String,
        caller: String,
    },
    Expire {
        envelope: String,
        caller: String,
    },
    Spend {
        note: String,
        by: String,
    },
    FreezeCreate {
        approvals: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub at: Timestamp,
    #[serde(flatten)]
    pub action: ScriptOp,
    /// "ok" (default) or an error code like "already_encumbered".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Registry,
    KsEscape,
}

impl Default for ScenarioKind {
    fn default() -> Self {
        ScenarioKind::Registry
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub kind: ScenarioKind,
    /// Only for ks_escape scenarios: eoa | erc4337 | eip7702.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub account_class: Option<String>,
    #[serde(default)]
    pub template: Option<DeploymentTemplate>,
    #[serde(default)]
    pub actors: Vec<ActorDecl>,
    #[serde(default)]
    pub notes: Vec<NoteDecl>,
    #[serde(default)]
    pub envelopes: Vec<EnvelopeDecl>,
    #[serde(default)]
    pub oracle_timeline: Vec<TimelineEntry>,
    #[serde(default)]
    pub script: Vec<Step>,
}

impl Scenario {
    pub fn from_json(json: &str) -> Result<Self, ScenarioError> {
        let s: Scenario =
            serde_json::from_str(json).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema != SCENARIO_SCHEMA {
            return Err(ScenarioError::Validation(format!(
                "schema must be {SCENARIO_SCHEMA}, got {}",
                self.schema
            )));
        }
        if self.kind == ScenarioKind::KsEscape {
            let class = self.account_class.as_deref().unwrap_or("");
            if AccountClass::parse(class).is_none() {
                return Err(ScenarioError::Validation(format!(
                    "account_class must be eoa|erc4337|eip7702, got {class:?}"
                )));
            }
            return Ok(());
        }
        let actor = |name: &str| self.actors.iter().any(|a| a.name == name);
        let note = |id: &str| self.notes.iter().any(|n| n.id == id);
        let envelope = |id: &str| self.envelopes.iter().any(|e| e.id == id);
        for n in &self.notes {
            if !actor(&n.owner) {
                return Err(ScenarioError::Validation(format!(
                    "note {} names unknown owner {}",
                    n.id, n.owner
                )));
            }
        }
        for e in &self.envelopes {
            if !note(&e.note) {
                return Err(ScenarioError::Validation(format!(
                    "envelope {} names unknown note {}",
                    e.id, e.note
                )));
            }
            if !actor(&e.intent.target) {
                return Err(ScenarioError::Validation(format!(
                    "envelope {} intent targets unknown actor {}",
                    e.id, e.intent.target
                )));
            }
        }
        let mut last_at = 0;
        for (i, step) in self.script.iter().enumerate() {
            if step.at < last_at {
                return Err(ScenarioError::Validation(format!(
                    "step {i} timestamp {} decreases (previous {last_at})",
                    step.at
                )));
            }
            last_at = step.at;
            let referenced = match &step.action {
                ScriptOp::Create { envelope: e, by }
                | ScriptOp::Settle {
                    envelope: e, by, ..
                } => (envelope(e), by, format!("envelope {e}")),
                ScriptOp::Enforce {
                    envelope: e,
                    caller,
                }
                | ScriptOp::Expire {
                    envelope: e,
                    caller,
                } => (envelope(e), caller, format!("envelope {e}")),
                ScriptOp::Spend { note: n, by } => (note(n), by, format!("note {n}")),
                ScriptOp::FreezeCreate { .. } => (true, &self.actors[0].name, String::new()),
            };
            let (found, by, what) = referenced;
            if !found {
                return Err(ScenarioError::Validation(format!(
                    "step {i} references undeclared {what}"
                )));
            }
            if !actor(by) {
                return Err(ScenarioError::Validation(format!(
                    "step {i} references undeclared actor {by}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub at: Timestamp,
    pub description: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receipt: Option<Receipt>,
    pub as_expected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested_outcome: Option<String>,
    pub invariants_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    pub seed: u64,
    pub hash_suite: String,
    pub kind: ScenarioKind,
    pub steps: Vec<StepReport>,
    pub final_digest: String,
    pub invariants_ok: bool,
    pub unexpected_outcomes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_trace: Option<crate::ledger::EscapeTrace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    ProtocolRejection,
    InvariantViolation,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Success => 0,
            RunStatus::ProtocolRejection => 1,
            RunStatus::InvariantViolation => 2,
        }
    }
}

struct NoteInstance {
    owner: String,
    note: Note,
    leaf_index: u64,
}

/// Deterministic per-name key material: ChaCha seeded from a hash of the
/// scenario seed and the name.
fn derived_rng(seed: u64, name: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(seed.to_be_bytes());
    h.update(name.as_bytes());
    let digest = h.finalize();
    let mut s = [0u8; 32];
    s.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(s)
}

pub fn run(scenario: &Scenario) -> (Report, RunStatus) {
    match scenario.kind {
        ScenarioKind::Registry => run_registry(scenario),
        ScenarioKind::KsEscape => run_ks(scenario),
    }
}

fn run_ks(scenario: &Scenario) -> (Report, RunStatus) {
    let class = AccountClass::parse(scenario.account_class.as_deref().unwrap_or("")).unwrap();
    let owner = KeyId(1);
    let state = restricted_state(class, owner, Address(0xa11ce), Address(0x70ce), 1_000);
    let trace = ks_escape(class, &state, owner);
    let ok = trace.owner_only() && trace.assertion.outside_restriction_scope;
    let steps = trace
        .steps
        .iter()
        .map(|s| StepReport {
            at: 0,
            description: s.description.clone(),
            outcome: "ok".into(),
            receipt: None,
            as_expected: true,
            nested_outcome: None,
            invariants_ok: true,
        })
        .collect();
    let digest = hex::encode(Sha256::digest(
        serde_json::to_string(&trace).expect("trace serializes").as_bytes(),
    ));
    let report = Report {
        schema: REPORT_SCHEMA.into(),
        scenario: scenario.name.clone(),
        seed: scenario.seed,
        hash_suite: SUITE_ID.into(),
        kind: ScenarioKind::KsEscape,
        steps,
        final_digest: digest,
        invariants_ok: ok,
        unexpected_outcomes: 0,
        escape_trace: Some(trace),
    };
    let status = if ok {
        RunStatus::Success
    } else {
        RunStatus::InvariantViolation
    };
    (report, status)
}

fn run_registry(scenario: &Scenario) -> (Report, RunStatus) {
    let template = scenario
        .template
        .clone()
        .unwrap_or(DeploymentTemplate::Strict);
    let mut registry = Registry::new(template);
    let checker = Checker::new();

    let keys: std::collections::BTreeMap<String, KeyPair> = scenario
        .actors
        .iter()
        .map(|a| {
            let mut rng = derived_rng(scenario.seed, &a.name);
            (a.name.clone(), KeyPair::random(&mut rng))
        })
        .collect();
    let addr_of = |name: &str| {
        scenario
            .actors
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.address)
            .unwrap_or(Address(0))
    };

    let mut notes: std::collections::BTreeMap<String, NoteInstance> = Default::default();
    for decl in &scenario.notes {
        let kp = &keys[&decl.owner];
        let mut rng = derived_rng(scenario.seed ^ 0x6e07e, &decl.id);
        let note = Note {
            v: FieldElement::from_u64(decl.value),
            r: FieldElement::random_nonzero(&mut rng),
            pk_x: kp.pk.x,
            pk_y: kp.pk.y,
            aid: FieldElement::from_u64(decl.asset_id),
        };
        let cm = commit(&note).expect("declared notes are valid");
        let leaf_index = registry.register_commitment(cm.0).expect("tree has room");
        notes.insert(
            decl.id.clone(),
            NoteInstance {
                owner: decl.owner.clone(),
                note,
                leaf_index,
            },
        );
    }

    let mut eids: std::collections::BTreeMap<String, u64> = Default::default();
    let mut steps = Vec::new();
    let mut unexpected = 0u64;
    let mut invariants_ok = true;

    let snapshot_at = |at: Timestamp| -> OracleSnapshot {
        scenario
            .oracle_timeline
            .iter()
            .filter(|e| e.at <= at)
            .last()
            .map(|e| e.snapshot.clone())
            .unwrap_or(OracleSnapshot {
                block_timestamp: at,
                ..Default::default()
            })
    };

    for step in &scenario.script {
        let mut nested_outcome = None;
        let (description, result): (String, Result<Option<Receipt>, RegistryError>) = match &step
            .action
        {
            ScriptOp::Create { envelope, by } => {
                let decl = scenario
                    .envelopes
                    .iter()
                    .find(|e| &e.id == envelope)
                    .expect("validated");
                let inst = &notes[&decl.note];
                let kp = &keys[by];
                let intent = RedistributionIntent {
                    action_type: decl.intent.action_type,
                    target_addr: addr_of(&decl.intent.target),
                    params_hash: FieldElement::from_u64(1),
                    keeper_fee: decl.intent.keeper_fee as u128,
                    max_amount: decl.intent.max_amount as u128,
                };
                let (st, w) = encumber_statement_with(
                    &registry,
                    kp,
                    &inst.note,
                    inst.leaf_index,
                    &intent,
                    &decl.condition,
                    FieldElement::from_u64(decl.col_nominal),
                    FieldElement::from_u64(decl.debt_principal),
                    Address(0x12a1),
                );
                let cm = commit(&inst.note).expect("valid note");
                let result = checker
                    .check_encumber(&st, &w, &intent)
                    .map_err(|_| RegistryError::AttestationInvalid)
                    .and_then(|att| {
                        registry.create(
                            &st,
                            &att,
                            intent,
                            decl.deadline,
                            Some(InterestRateModel::Constant {
                                rate_ppm: decl.rate_ppm,
                            }),
                            decl.col_nominal as u128,
                            decl.debt_principal as u128,
                            spend_nullifier(&kp.sk, &cm).expect("valid key").0,
                            step.at,
                        )
                    })
                    .map(|r| {
                        eids.insert(envelope.clone(), r.eid);
                        Some(Receipt::Create(r))
                    });
                (format!("create {envelope} by {by}"), result)
            }
            ScriptOp::Settle {
                envelope,
                by,
                repayment,
                reentrant,
            } => {
                let eid = eids.get(envelope).copied().unwrap_or(u64::MAX);
                let decl = scenario
                    .envelopes
                    .iter()
                    .find(|e| &e.id == envelope)
                    .expect("validated");
                let inst = &notes[&decl.note];
                let kp = &keys[by];
                let cm = commit(&inst.note).expect("valid note");
                let nf = encumbrance_nullifier(inst.note.r, &cm).expect("valid note").0;
                let st = SettleStatement {
                    eid,
                    nf_encumber_public_input: nf,
                    tree_root: registry.tree().root(),
                    repayment_amount: FieldElement::from_u64(*repayment),
                };
                let w = SpendWitness {
                    v: inst.note.v,
                    r: inst.note.r,
                    aid: inst.note.aid,
                    pk_x: inst.note.pk_x,
                    pk_y: inst.note.pk_y,
                    owner_sk: kp.sk,
                    merkle_path: registry
                        .tree()
                        .prove_membership(inst.leaf_index)
                        .expect("registered"),
                };
                let result = checker
                    .check_settle(&st, &w)
                    .map_err(|_| RegistryError::AttestationInvalid)
                    .and_then(|att| {
                        if *reentrant {
                            let mut nested = None;
                            let st2 = st.clone();
                            let att2 = att.clone();
                            let now = step.at;
                            let r = registry.settle_with_hook(
                                eid,
                                &st,
                                &att,
                                step.at,
                                |reg| {
                                    let n = reg.settle(eid, &st2, &att2, now);
                                    nested = Some(match n {
                                        Ok(_) => "ok".to_string(),
                                        Err(e) => e.code().to_string(),
                                    });
                                },
                            );
                            nested_outcome = nested;
                            r
                        } else {
                            registry.settle(eid, &st, &att, step.at)
                        }
                    })
                    .map(|r| Some(Receipt::Settle(r)));
                (format!("settle {envelope} by {by}"), result)
            }
            ScriptOp::Enforce { envelope, caller } => {
                let eid = eids.get(envelope).copied().unwrap_or(u64::MAX);
                let decl = scenario
                    .envelopes
                    .iter()
                    .find(|e| &e.id == envelope)
                    .expect("validated");
                let snap = snapshot_at(step.at);
                let result = registry
                    .enforce(eid, &snap, &decl.condition, addr_of(caller))
                    .map(|r| Some(Receipt::Enforce(r)));
                (format!("enforce {envelope} by {caller}"), result)
            }
            ScriptOp::Expire { envelope, caller } => {
                let eid = eids.get(envelope).copied().unwrap_or(u64::MAX);
                let result = registry
                    .expire(eid, step.at, addr_of(caller))
                    .map(|r| Some(Receipt::Expire(r)));
                (format!("expire {envelope} by {caller}"), result)
            }
            ScriptOp::Spend { note, by } => {
                let inst = &notes[note];
                let kp = &keys[by];
                let cm = commit(&inst.note).expect("valid note");
                let st = SpendStatement {
                    nf_spend: spend_nullifier(&kp.sk, &cm).expect("valid key").0,
                    tree_root: registry.tree().root(),
                    nf_encumber_public_input: encumbrance_nullifier(inst.note.r, &cm)
                        .expect("valid note")
                        .0,
                };
                let w = SpendWitness {
                    v: inst.note.v,
                    r: inst.note.r,
                    aid: inst.note.aid,
                    pk_x: inst.note.pk_x,
                    pk_y: inst.note.pk_y,
                    owner_sk: kp.sk,
                    merkle_path: registry
                        .tree()
                        .prove_membership(inst.leaf_index)
                        .expect("registered"),
                };
                let result = checker
                    .check_spend(&st, &w)
                    .map_err(|_| RegistryError::AttestationInvalid)
                    .and_then(|att| registry.spend(&st, &att, None))
                    .map(|r| Some(Receipt::Spend(r)));
                let own_note = inst.owner == *by;
                (
                    format!(
                        "spend {note} by {by}{}",
                        if own_note { "" } else { " (not the owner)" }
                    ),
                    result,
                )
            }
            ScriptOp::FreezeCreate { approvals } => {
                // policy change; no receipt, outcome only
                let result = registry.set_create_frozen(true, *approvals).map(|_| None);
                (format!("freeze create ({approvals} approvals)"), result)
            }
        };

        let (outcome, receipt) = match result {
            Ok(receipt) => ("ok".to_string(), receipt),
            Err(e) => (e.code().to_string(), None),
        };
        let expected = step.expect.as_deref().unwrap_or("ok");
        let as_expected = outcome == expected;
        if !as_expected {
            unexpected += 1;
        }
        let step_invariants = registry.check_invariants();
        if step_invariants.is_err() {
            invariants_ok = false;
        }
        steps.push(StepReport {
            at: step.at,
            description,
            outcome,
            receipt,
            as_expected,
            nested_outcome,
            invariants_ok: step_invariants.is_ok(),
        });
    }

    let report = Report {
        schema: REPORT_SCHEMA.into(),
        scenario: scenario.name.clone(),
        seed: scenario.seed,
        hash_suite: SUITE_ID.into(),
        kind: ScenarioKind::Registry,
        steps,
        final_digest: registry.state_digest(),
        invariants_ok,
        unexpected_outcomes: unexpected,
        escape_trace: None,
    };
    let status = if !invariants_ok {
        RunStatus::InvariantViolation
    } else if unexpected > 0 {
        RunStatus::ProtocolRejection
    } else {
        RunStatus::Success
    };
    (report, status)
}
