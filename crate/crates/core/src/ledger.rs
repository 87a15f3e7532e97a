//! Two ledger models side by side: the account-based model whose
//! restrictions an owner key can always escape, and the private-state
//! (commitment/nullifier) model where the envelope registry makes the same
//! escape searches come up empty.
//!
//! The account model's transaction alphabet is deliberately minimal:
//! transfer, token_transfer, deploy_wallet, set_delegate_authorization,
//! call_via_wallet. That is enough to express all three escape
//! constructions and nothing more.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{ConditionLeaf, ConditionTree, OracleSnapshot, TimeOp};
use crate::curve::KeyPair;
use crate::field::FieldElement;
use crate::hash::hash2;
use crate::hash::params_tag;
use crate::note::{commit, encumbrance_nullifier, random_note, spend_nullifier, Note};
use crate::registry::{
    intent_hash, DeploymentTemplate, InterestRateModel, RedistributionIntent,
    Registry, RegistryError,
};
use crate::relations::{
    Checker, EncumberStatement, EncumberWitness, SpendStatement, SpendWitness,
};
use crate::types::{Address, Timestamp};

// ---------------------------------------------------------------------------
// Account-based ledger model
// ---------------------------------------------------------------------------

/// Delegate/wallet code identifiers. The ledger interprets these; there is
/// no bytecode.
pub const STANDARD_WALLET: u64 = 1;
pub const ALL_REVERTING_DELEGATE: u64 = 2;
pub const PERMISSIVE_DELEGATE: u64 = 3;
pub const BLOCKING_POLICY: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeyId(pub u64);

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub balance: u128,
    pub code: Option<u64>,
    pub nonce: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    pub id: u64,
    pub token: Address,
    /// Addresses the mechanism has registered; the proofs' "restriction
    /// scope". The mechanism observes these, it cannot intercept them.
    pub scope: BTreeSet<Address>,
    pub active: bool,
}

/// Account-ledger state. Mechanisms live in their own storage
/// (`restrictions`); authorization consults only the key-to-account map.
#[derive(Debug, Clone, Default)]
pub struct AblmState {
    pub accounts: BTreeMap<Address, Account>,
    pub token_slots: BTreeMap<(Address, Address), u128>,
    pub restrictions: BTreeMap<u64, Restriction>,
    controlled: BTreeMap<KeyId, BTreeSet<Address>>,
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum AblmError {
    #[error("key controls no account")]
    NoAccount,
    #[error("authorizer does not control {0}")]
    NoAuthorization(Address),
    #[error("insufficient balance at {0}")]
    InsufficientBalance(Address),
    #[error("delegate at {0} reverted")]
    DelegateReverted(Address),
    #[error("wallet policy at {0} blocked the call")]
    PolicyBlocked(Address),
    #[error("direct transfer from delegated account {0} must route through its delegate")]
    DelegatedAccount(Address),
}

/// An account field, as named by write domains and trace write sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRef {
    Balance(Address),
    Nonce(Address),
    Code(Address),
    TokenSlot(Address, Address),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tx", rename_all = "snake_case")]
pub enum Transaction {
    Transfer {
        from: Address,
        to: Address,
        amount: u128,
    },
    TokenTransfer {
        token: Address,
        from: Address,
        to: Address,
        amount: u128,
    },
    /// Factory deployment (or redeployment) of a standard single-key wallet
    /// at `at`, controlled by the authorizer. Validation is key-only, so the
    /// previous code at `at` gets no veto.
    DeployWallet { at: Address },
    /// Protocol-layer delegation update. Applied before any delegate code
    /// could run; the current delegate is not invoked.
    SetDelegateAuthorization {
        account: Address,
        delegate: Option<u64>,
    },
    CallViaWallet {
        wallet: Address,
        inner: Box<Transaction>,
    },
}

impl AblmState {
    pub fn grant_control(&mut self, key: KeyId, addr: Address) {
        self.controlled.entry(key).or_default().insert(addr);
        self.accounts.entry(addr).or_default();
    }

    pub fn controls(&self, key: KeyId, addr: Address) -> bool {
        self.controlled
            .get(&key)
            .map(|s| s.contains(&addr))
            .unwrap_or(false)
    }

    fn outbound_allowed(&self, from: Address) -> Result<(), AblmError> {
        match self.accounts.get(&from).and_then(|a| a.code) {
            None | Some(STANDARD_WALLET) | Some(PERMISSIVE_DELEGATE) => Ok(()),
            Some(ALL_REVERTING_DELEGATE) => Err(AblmError::DelegateReverted(from)),
            Some(BLOCKING_POLICY) => Err(AblmError::PolicyBlocked(from)),
            Some(_) => Err(AblmError::PolicyBlocked(from)),
        }
    }

    /// Apply one transaction authorized solely by `key`. Returns the set of
    /// account fields written.
    pub fn apply(&mut self, key: KeyId, tx: &Transaction) -> Result<Vec<FieldRef>, AblmError> {
        match tx {
            Transaction::Transfer { from, to, amount } => {
                if !self.controls(key, *from) {
                    return Err(AblmError::NoAuthorization(*from));
                }
                self.outbound_allowed(*from)?;
                self.move_balance(*from, *to, *amount)
            }
            Transaction::TokenTransfer {
                token,
                from,
                to,
                amount,
            } => {
                if !self.controls(key, *from) {
                    return Err(AblmError::NoAuthorization(*from));
                }
                self.outbound_allowed(*from)?;
                self.move_token(*token, *from, *to, *amount)
            }
            Transaction::DeployWallet { at } => {
                if !self.controls(key, *at) {
                    // factory deployment to a fresh address claims it
                    if self.accounts.contains_key(at) {
                        return Err(AblmError::NoAuthorization(*at));
                    }
                    self.grant_control(key, *at);
                }
                let acct = self.accounts.entry(*at).or_default();
                acct.code = Some(STANDARD_WALLET);
                acct.nonce += 1;
                Ok(vec![FieldRef::Code(*at), FieldRef::Nonce(*at)])
            }
            Transaction::SetDelegateAuthorization { account, delegate } => {
                if !self.controls(key, *account) {
                    return Err(AblmError::NoAuthorization(*account));
                }
                // deliberately no outbound_allowed check: this is the
                // protocol layer, the installed delegate never runs
                let acct = self.accounts.entry(*account).or_default();
                acct.code = *delegate;
                acct.nonce += 1;
                Ok(vec![FieldRef::Code(*account), FieldRef::Nonce(*account)])
            }
            Transaction::CallViaWallet { wallet, inner } => {
                if !self.controls(key, *wallet) {
                    return Err(AblmError::NoAuthorization(*wallet));
                }
                self.outbound_allowed(*wallet)?;
                match inner.as_ref() {
                    Transaction::Transfer { from, to, amount } if from == wallet => {
                        self.move_balance(*from, *to, *amount)
                    }
                    Transaction::TokenTransfer {
                        token,
                        from,
                        to,
                        amount,
                    } if from == wallet => self.move_token(*token, *from, *to, *amount),
                    _ => Err(AblmError::NoAuthorization(*wallet)),
                }
            }
        }
    }

    fn move_balance(
        &mut self,
        from: Address,
        to: Address,
        amount: u128,
    ) -> Result<Vec<FieldRef>, AblmError> {
        let src = self.accounts.entry(from).or_default();
        if src.balance < amount {
            return Err(AblmError::InsufficientBalance(from));
        }
        src.balance -= amount;
        src.nonce += 1;
        self.accounts.entry(to).or_default().balance += amount;
        Ok(vec![
            FieldRef::Balance(from),
            FieldRef::Nonce(from),
            FieldRef::Balance(to),
        ])
    }

    fn move_token(
        &mut self,
        token: Address,
        from: Address,
        to: Address,
        amount: u128,
    ) -> Result<Vec<FieldRef>, AblmError> {
        let src = self.token_slots.entry((token, from)).or_default();
        if *src < amount {
            return Err(AblmError::InsufficientBalance(from));
        }
        *src -= amount;
        *self.token_slots.entry((token, to)).or_default() += amount;
        self.accounts.entry(from).or_default().nonce += 1;
        Ok(vec![
            FieldRef::TokenSlot(token, from),
            FieldRef::Nonce(from),
            FieldRef::TokenSlot(token, to),
        ])
    }

    /// The set of fields some transaction authorized solely by `key` can
    /// write, found by enumerating the alphabet against the current state.
    pub fn write_domain(&self, key: KeyId) -> Result<BTreeSet<FieldRef>, AblmError> {
        let owned = self.controlled.get(&key).ok_or(AblmError::NoAccount)?;
        if owned.is_empty() {
            return Err(AblmError::NoAccount);
        }
        let probe_to = Address(u128::MAX);
        let mut domain = BTreeSet::new();
        for addr in owned {
            let mut candidates: Vec<Transaction> = vec![
                Transaction::Transfer {
                    from: *addr,
                    to: probe_to,
                    amount: 0,
                },
                Transaction::SetDelegateAuthorization {
                    account: *addr,
                    delegate: None,
                },
                Transaction::DeployWallet { at: *addr },
            ];
            for ((token, holder), _) in self.token_slots.iter() {
                if holder == addr {
                    candidates.push(Transaction::TokenTransfer {
                        token: *token,
                        from: *addr,
                        to: probe_to,
                        amount: 0,
                    });
                    candidates.push(Transaction::CallViaWallet {
                        wallet: *addr,
                        inner: Box::new(Transaction::TokenTransfer {
                            token: *token,
                            from: *addr,
                            to: probe_to,
                            amount: 0,
                        }),
                    });
                }
            }
            for tx in candidates {
                let mut scratch = self.clone();
                if let Ok(written) = scratch.apply(key, &tx) {
                    domain.extend(written);
                }
            }
        }
        Ok(domain)
    }
}

// ---------------------------------------------------------------------------
// Escape traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountClass {
    Eoa,
    Erc4337SingleKey,
    Eip7702Delegated,
}

impl AccountClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eoa" => Some(AccountClass::Eoa),
            "erc4337" => Some(AccountClass::Erc4337SingleKey),
            "eip7702" => Some(AccountClass::Eip7702Delegated),
            _ => None,
        }
    }
}

impl std::fmt::Display for AccountClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AccountClass::Eoa => "eoa",
            AccountClass::Erc4337SingleKey => "erc4337",
            AccountClass::Eip7702Delegated => "eip7702",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub description: String,
    pub authorizer: KeyId,
    pub transaction: Transaction,
    pub written: Vec<FieldRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalAssertion {
    pub asset_token: Address,
    pub asset_location: Address,
    pub amount: u128,
    pub outside_restriction_scope: bool,
    pub restriction_still_recorded: bool,
}

/// An executed escape: owner-key-only transactions ending with the asset
/// outside the restriction scope while the restriction record still sits
/// untouched in mechanism storage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeTrace {
    pub class: AccountClass,
    pub owner_key: KeyId,
    pub steps: Vec<TraceStep>,
    pub assertion: FinalAssertion,
}

impl EscapeTrace {
    pub fn owner_only(&self) -> bool {
        self.steps.iter().all(|s| s.authorizer == self.owner_key)
    }
}

/// Build the restricted starting state for a class: owner key, one account
/// holding `amount` of `token`, and an active restriction scoped to that
/// account.
pub fn restricted_state(
    class: AccountClass,
    owner: KeyId,
    home: Address,
    token: Address,
    amount: u128,
) -> AblmState {
    let mut state = AblmState::default();
    state.grant_control(owner, home);
    state.token_slots.insert((token, home), amount);
    let code = match class {
        AccountClass::Eoa => None,
        AccountClass::Erc4337SingleKey => Some(BLOCKING_POLICY),
        AccountClass::Eip7702Delegated => Some(ALL_REVERTING_DELEGATE),
    };
    state.accounts.get_mut(&home).unwrap().code = code;
    state.restrictions.insert(
        7,
        Restriction {
            id: 7,
            token,
            scope: BTreeSet::from([home]),
            active: true,
        },
    );
    state
}

/// Construct and execute the escape for the given class. The returned trace
/// has already been replayed against the restricted state; every step's
/// write set is the one the ledger actually performed.
pub fn ks_escape(class: AccountClass, state: &AblmState, owner: KeyId) -> EscapeTrace {
    let restriction = state
        .restrictions
        .values()
        .find(|r| r.active)
        .expect("caller passes a state with an active restriction");
    let token = restriction.token;
    let home = *restriction.scope.iter().next().expect("non-empty scope");
    let amount = state.token_slots.get(&(token, home)).copied().unwrap_or(0);
    let fresh = Address(0xf9e5);

    let planned: Vec<(String, Transaction)> = match class {
        AccountClass::Eoa => vec![
            (
                "owner signs a token transfer straight past the mechanism".into(),
                Transaction::TokenTransfer {
                    token,
                    from: home,
                    to: fresh,
                    amount,
                },
            ),
        ],
        AccountClass::Erc4337SingleKey => vec![
            (
                "factory redeploys the wallet under the same key; validation \
                 is key-only, the blocking policy gets no veto"
                    .into(),
                Transaction::DeployWallet { at: home },
            ),
            (
                "owner moves the asset through the redeployed wallet".into(),
                Transaction::CallViaWallet {
                    wallet: home,
                    inner: Box::new(Transaction::TokenTransfer {
                        token,
                        from: home,
                        to: fresh,
                        amount,
                    }),
                },
            ),
        ],
        AccountClass::Eip7702Delegated => vec![
            (
                "new authorization tuple replaces the delegate at the \
                 protocol layer; the reverting delegate is never invoked"
                    .into(),
                Transaction::SetDelegateAuthorization {
                    account: home,
                    delegate: Some(PERMISSIVE_DELEGATE),
                },
            ),
            (
                "owner moves the asset through the permissive delegate".into(),
                Transaction::CallViaWallet {
                    wallet: home,
                    inner: Box::new(Transaction::TokenTransfer {
                        token,
                        from: home,
                        to: fresh,
                        amount,
                    }),
                },
            ),
        ],
    };

    let mut replay = state.clone();
    let mut steps = Vec::new();
    for (description, tx) in planned {
        let written = replay
            .apply(owner, &tx)
            .expect("escape steps execute by construction");
        steps.push(TraceStep {
            description,
            authorizer: owner,
            transaction: tx,
            written,
        });
    }
    let landed = replay.token_slots.get(&(token, fresh)).copied().unwrap_or(0);
    let restriction_after = replay.restrictions.get(&restriction.id).unwrap();
    EscapeTrace {
        class,
        owner_key: owner,
        steps,
        assertion: FinalAssertion {
            asset_token: token,
            asset_location: fresh,
            amount: landed,
            outside_restriction_scope: !restriction_after.scope.contains(&fresh)
                && landed == amount
                && amount > 0,
            restriction_still_recorded: restriction_after.active,
        },
    }
}

// ---------------------------------------------------------------------------
// Private-state world fixture
// ---------------------------------------------------------------------------

/// One encumbered note inside a live registry: the shared starting point
/// for audits, games, and scenarios.
#[derive(Debug, Clone)]
pub struct PslmWorld {
    pub registry: Registry,
    pub owner: KeyPair,
    pub note: Note,
    pub leaf_index: u64,
    pub eid: u64,
    pub intent: RedistributionIntent,
    pub cond_tree: ConditionTree,
    pub deadline: Timestamp,
    pub t_register: Timestamp,
}

impl PslmWorld {
    /// Registry under the strict template with one active envelope.
    pub fn strict(seed: u64) -> Self {
        Self::build(seed, Registry::new(DeploymentTemplate::Strict))
    }

    /// Same world, but the registry carries an admin path that mutates
    /// marker sets directly. For differential audits only.
    pub fn with_admin_backdoor(seed: u64) -> Self {
        Self::build(
            seed,
            Registry::with_unrestricted_admin(DeploymentTemplate::Strict),
        )
    }

    pub fn build(seed: u64, mut registry: Registry) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let owner = KeyPair::random(&mut rng);
        let mut note = random_note(&mut rng, owner.pk.x, owner.pk.y);
        note.v = FieldElement::from_u64(1_000_000);
        let cm = commit(&note).unwrap();
        let leaf_index = registry.register_commitment(cm.0).unwrap();
        let intent = RedistributionIntent {
            action_type: 1,
            target_addr: Address(0x1e4de4),
            params_hash: FieldElement::from_u64(77),
            keeper_fee: 5_000,
            max_amount: 900_000,
        };
        // enforceable whenever the block clock passes 2_000_000
        let cond_tree = ConditionTree::leaf(ConditionLeaf::Time {
            timestamp: 2_000_000,
            op: TimeOp::Ge,
        });
        let deadline: Timestamp = 9_000_000;
        let t_register: Timestamp = 1_000_000;
        let (st, w) = encumber_statement(&registry, &owner, &note, leaf_index, &intent, &cond_tree);
        let att = Checker::new().check_encumber(&st, &w, &intent).unwrap();
        let receipt = registry
            .create(
                &st,
                &att,
                intent.clone(),
                deadline,
                Some(InterestRateModel::Constant { rate_ppm: 50_000 }),
                1_000_000,
                500_000,
                spend_nullifier(&owner.sk, &cm).unwrap().0,
                t_register,
            )
            .unwrap();
        PslmWorld {
            registry,
            owner,
            note,
            leaf_index,
            eid: receipt.eid,
            intent,
            cond_tree,
            deadline,
            t_register,
        }
    }

    pub fn nf_encumber(&self) -> FieldElement {
        let cm = commit(&self.note).unwrap();
        encumbrance_nullifier(self.note.r, &cm).unwrap().0
    }

    /// A snapshot making the committed condition true (or false).
    pub fn snapshot(&self, cond_true: bool) -> OracleSnapshot {
        OracleSnapshot {
            block_timestamp: if cond_true { 3_000_000 } else { 1_500_000 },
            ..Default::default()
        }
    }

    /// A fresh honest spend statement/witness for the encumbered note
    /// against the current root.
    pub fn spend_parts(&self) -> (SpendStatement, SpendWitness) {
        let cm = commit(&self.note).unwrap();
        let st = SpendStatement {
            nf_spend: spend_nullifier(&self.owner.sk, &cm).unwrap().0,
            tree_root: self.registry.tree().root(),
            nf_encumber_public_input: self.nf_encumber(),
        };
        let w = SpendWitness {
            v: self.note.v,
            r: self.note.r,
            aid: self.note.aid,
            pk_x: self.note.pk_x,
            pk_y: self.note.pk_y,
            owner_sk: self.owner.sk,
            merkle_path: self.registry.tree().prove_membership(self.leaf_index).unwrap(),
        };
        (st, w)
    }
}

/// Assemble an honest encumbrance statement and witness for `note` against
/// the registry's current tree, with fixture defaults for the position.
pub fn encumber_statement(
    registry: &Registry,
    owner: &KeyPair,
    note: &Note,
    leaf_index: u64,
    intent: &RedistributionIntent,
    cond_tree: &ConditionTree,
) -> (EncumberStatement, EncumberWitness) {
    encumber_statement_with(
        registry,
        owner,
        note,
        leaf_index,
        intent,
        cond_tree,
        note.v,
        FieldElement::from_u64(500_000),
        Address(0x1231),
    )
}

/// Same as [`encumber_statement`] with the position fields explicit.
#[allow(clippy::too_many_arguments)]
pub fn encumber_statement_with(
    registry: &Registry,
    owner: &KeyPair,
    note: &Note,
    leaf_index: u64,
    intent: &RedistributionIntent,
    cond_tree: &ConditionTree,
    col: FieldElement,
    debt: FieldElement,
    irm_addr: Address,
) -> (EncumberStatement, EncumberWitness) {
    let cm = commit(note).unwrap();
    let st = EncumberStatement {
        cm_note: cm.0,
        nf_encumber: encumbrance_nullifier(note.r, &cm).unwrap().0,
        cond_hash: crate::conditions::cond_hash(cond_tree).unwrap(),
        intent_hash: intent_hash(intent),
        position_commit: crate::hash::hash3(col, debt, cm.0),
        tree_root: registry.tree().root(),
        irm_addr_commit: hash2(irm_addr.to_field(), params_tag()),
        irm_addr,
        target_addr: intent.target_addr,
    };
    let w = EncumberWitness {
        v: note.v,
        r: note.r,
        aid: note.aid,
        pk_x: note.pk_x,
        pk_y: note.pk_y,
        owner_sk: owner.sk,
        merkle_path: registry.tree().prove_membership(leaf_index).unwrap(),
        col_nominal: col,
        debt_principal: debt,
    };
    (st, w)
}

// ---------------------------------------------------------------------------
// NCEE audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PropertyVerdict {
    Holds { detail: String },
    Fails { detail: String, witness: Vec<String> },
}

impl PropertyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyVerdict::Holds { .. })
    }
}

/// The four-property verdict. Every Fails carries a reproducing witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NceeVerdict {
    pub model: String,
    pub search_depth: usize,
    pub p1_self_custody: PropertyVerdict,
    pub p2_transition_restriction: PropertyVerdict,
    pub p3_irrevocability: PropertyVerdict,
    pub p4_permissionless: PropertyVerdict,
}

impl NceeVerdict {
    pub fn all_hold(&self) -> bool {
        self.p1_self_custody.holds()
            && self.p2_transition_restriction.holds()
            && self.p3_irrevocability.holds()
            && self.p4_permissionless.holds()
    }
}

fn trace_witness(trace: &EscapeTrace) -> Vec<String> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| format!("step {}: {}", i + 1, s.description))
        .chain(std::iter::once(format!(
            "asset lands at {} outside the restriction scope; the \
             restriction record is still active",
            trace.assertion.asset_location
        )))
        .collect()
}

/// Audit the account model against the four properties. The owner holds
/// their own key throughout, and for every account class the escape trace
/// is an owner-only restriction removal, so irrevocability fails.
pub fn ncee_audit_ablm(class: AccountClass) -> NceeVerdict {
    let owner = KeyId(1);
    let mechanism = KeyId(99);
    let home = Address(0xa11ce);
    let token = Address(0x70ce);
    let state = restricted_state(class, owner, home, token, 1_000);
    let trace = ks_escape(class, &state, owner);
    assert!(trace.owner_only());

    // P4 probe: the mechanism key attempts a seizure of the restricted slot
    let mut seizure_state = state.clone();
    let seizure = seizure_state.apply(
        mechanism,
        &Transaction::TokenTransfer {
            token,
            from: home,
            to: Address(0x5e12e),
            amount: 1_000,
        },
    );

    NceeVerdict {
        model: format!("ablm/{class}"),
        search_depth: trace.steps.len(),
        p1_self_custody: PropertyVerdict::Holds {
            detail: "owner retains sole key control; no co-signer appears in any path".into(),
        },
        p2_transition_restriction: PropertyVerdict::Fails {
            detail: "owner-authorized move of the restricted asset outside mechanism paths"
                .into(),
            witness: trace_witness(&trace),
        },
        p3_irrevocability: PropertyVerdict::Fails {
            detail: "owner alone escapes the active restriction".into(),
            witness: trace_witness(&trace),
        },
        p4_permissionless: PropertyVerdict::Fails {
            detail: format!(
                "mechanism cannot write the owner's account to enforce: {}",
                seizure.expect_err("mechanism holds no authorization")
            ),
            witness: vec!["token_transfer authorized by the mechanism key is rejected".into()],
        },
    }
}

/// Adversarial operation alphabet for the private-state searches. Every
/// entry is something a party could actually submit; attestations are
/// obtained from the intact checker or not at all.
fn pslm_alphabet() -> Vec<&'static str> {
    vec![
        "spend_encumbered",
        "spend_forged_marker",
        "create_second_envelope",
        "settle_underpaid",
        "expire_early",
        "enforce_cond_false",
        "admin_unmark",
        "register_commitment",
    ]
}

fn pslm_apply(world: &mut PslmWorld, op: &str) -> Result<(), RegistryError> {
    let checker = Checker::new();
    match op {
        "spend_encumbered" => {
            let (st, w) = world.spend_parts();
            let att = checker
                .check_spend(&st, &w)
                .map_err(|_| RegistryError::AttestationInvalid)?;
            world.registry.spend(&st, &att, None).map(|_| ())
        }
        "spend_forged_marker" => {
            // claim an unrelated marker so the on-chain check passes; the
            // checker's binding equality must refuse the attestation
            let (mut st, w) = world.spend_parts();
            st.nf_encumber_public_input = FieldElement::from_u64(0xdead);
            let att = checker
                .check_spend(&st, &w)
                .map_err(|_| RegistryError::AttestationInvalid)?;
            world.registry.spend(&st, &att, None).map(|_| ())
        }
        "create_second_envelope" => {
            let owner = world.owner.clone();
            let note = world.note.clone();
            let (st, w) = encumber_statement(
                &world.registry,
                &owner,
                &note,
                world.leaf_index,
                &world.intent,
                &world.cond_tree,
            );
            let att = checker
                .check_encumber(&st, &w, &world.intent)
                .map_err(|_| RegistryError::AttestationInvalid)?;
            let cm = commit(&note).unwrap();
            world
                .registry
                .create(
                    &st,
                    &att,
                    world.intent.clone(),
                    world.deadline,
                    None,
                    1_000_000,
                    500_000,
                    spend_nullifier(&owner.sk, &cm).unwrap().0,
                    world.t_register,
                )
                .map(|_| ())
        }
        "settle_underpaid" => {
            // a third party without owner material cannot form the witness;
            // the closest submittable artifact is a zero-repayment claim
            // with no attestation behind it, which dies at step 1
            Err(RegistryError::AttestationInvalid)
        }
        "expire_early" => world
            .registry
            .expire(world.eid, world.deadline, Address(0xadd))
            .map(|_| ()),
        "enforce_cond_false" => {
            let snap = world.snapshot(false);
            let tree = world.cond_tree.clone();
            world
                .registry
                .enforce(world.eid, &snap, &tree, Address(0xadd))
                .map(|_| ())
        }
        "admin_unmark" => {
            let nf = world.nf_encumber();
            world.registry.admin_unmark(nf)
        }
        "register_commitment" => {
            world
                .registry
                .register_commitment(FieldElement::from_u64(0x5eed))
                .map(|_| ())
        }
        other => panic!("unknown op {other}"),
    }
}

/// Depth-first search over operation sequences; returns the first sequence
/// after which `goal` holds.
fn search_sequences(
    world: &PslmWorld,
    depth: usize,
    goal: &dyn Fn(&PslmWorld) -> bool,
) -> Option<Vec<String>> {
    fn rec(
        world: &PslmWorld,
        prefix: &mut Vec<String>,
        depth: usize,
        goal: &dyn Fn(&PslmWorld) -> bool,
    ) -> Option<Vec<String>> {
        if goal(world) {
            return Some(prefix.clone());
        }
        if depth == 0 {
            return None;
        }
        for op in pslm_alphabet() {
            let mut next = world.clone();
            let outcome = pslm_apply(&mut next, op);
            prefix.push(format!(
                "{op} -> {}",
                match &outcome {
                    Ok(()) => "accepted".to_string(),
                    Err(e) => format!("rejected ({e})"),
                }
            ));
            if let Some(found) = rec(&next, prefix, depth - 1, goal) {
                return Some(found);
            }
            prefix.pop();
        }
        None
    }
    rec(world, &mut Vec::new(), depth, goal)
}

/// Audit the private-state model. `violate_as7` swaps in the
/// policy-disabled registry build carrying an admin marker mutation path.
pub fn ncee_audit_pslm(depth: usize, violate_as7: bool) -> NceeVerdict {
    let world = if violate_as7 {
        PslmWorld::with_admin_backdoor(11)
    } else {
        PslmWorld::strict(11)
    };
    let nf = world.nf_encumber();
    let cm = commit(&world.note).unwrap();
    let owner_nf_spend = spend_nullifier(&world.owner.sk, &cm).unwrap().0;

    // P1: structural. The owner keeps sk; no operation demands another
    // party's signature on the owner's behalf.
    let p1 = PropertyVerdict::Holds {
        detail: "owner_sk never leaves the owner; no path requires a co-signer".into(),
    };

    // P2: search for an accepted spend of the encumbered note while its
    // marker is active.
    let p2_goal = |w: &PslmWorld| {
        w.registry.is_spent(owner_nf_spend) && w.registry.is_active_marker(nf)
    };
    let p2 = match search_sequences(&world, depth, &p2_goal) {
        None => PropertyVerdict::Holds {
            detail: format!(
                "no owner-authorized spend of the encumbered note accepted within depth {depth}"
            ),
        },
        Some(witness) => PropertyVerdict::Fails {
            detail: "encumbered note spent while its marker was active".into(),
            witness,
        },
    };

    // P3: search for marker removal through anything but the three exits.
    let p3_goal = |w: &PslmWorld| !w.registry.is_active_marker(nf);
    let p3 = match search_sequences(&world, depth, &p3_goal) {
        None => PropertyVerdict::Holds {
            detail: format!(
                "no non-exit operation sequence removes the marker within depth {depth}"
            ),
        },
        Some(witness) => PropertyVerdict::Fails {
            detail: "marker removed outside settle/enforce/expire".into(),
            witness,
        },
    };

    // P4: a non-owner, non-privileged caller enforces with the condition
    // true.
    let mut w4 = world.clone();
    let snap = w4.snapshot(true);
    let tree = w4.cond_tree.clone();
    let keeper = Address(0x4ee9e4);
    let p4 = match w4.registry.enforce(w4.eid, &snap, &tree, keeper) {
        Ok(receipt) => PropertyVerdict::Holds {
            detail: format!(
                "arbitrary caller enforced with the condition true; keeper fee {} paid",
                receipt.keeper_fee
            ),
        },
        Err(e) => PropertyVerdict::Fails {
            detail: format!("permissionless enforcement rejected: {e}"),
            witness: vec![format!("enforce by {keeper} failed: {e}")],
        },
    };

    NceeVerdict {
        model: if violate_as7 {
            "pslm (policy-disabled build)".into()
        } else {
            "pslm/strict".into()
        },
        search_depth: depth,
        p1_self_custody: p1,
        p2_transition_restriction: p2,
        p3_irrevocability: p3,
        p4_permissionless: p4,
    }
}
