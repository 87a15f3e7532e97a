//! The three circuit statements — Encumber, Spend, Settle — as explicit
//! relation checkers over (public inputs, private witness), plus the
//! attestation layer standing in for a SNARK.
//!
//! An [`Attestation`] can only be constructed by a successful `check_*`
//! call: its constructor is private to this module, so "no attestation
//! without a verified witness" holds by encapsulation. That is the model of
//! the proof system's knowledge soundness. Zero knowledge is modeled by
//! information flow: attestations carry a statement digest and kind only,
//! never witness material.
//!
//! For harness-soundness testing the checker can be built as a *mutant*
//! with one named constraint deleted; the intact checker is the default and
//! the only one protocol code should use.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{derive_pubkey, Scalar};
use crate::field::{u256_cmp, FieldElement};
use crate::hash::{encumber_tag, hash2, hash3, hash4, params_tag, spend_tag};
use crate::merkle::{verify_path, MerklePath};
use crate::registry::{intent_hash, RedistributionIntent};
use crate::types::Address;

pub const CHECKER_VERSION: &str = "relation-checker-v1";

/// Numbered violations of the Encumbrance relation. Constraint 5 (spend
/// nullifier freshness) is intentionally absent: it is an on-chain registry
/// check, not part of the relation.
#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum EncumberViolation {
    #[error("constraint 1: note commitment binding failed")]
    Constraint1CommitmentBinding,
    #[error("constraint 2: public key does not derive from owner_sk")]
    Constraint2PkDerivation,
    #[error("constraint 3: encumbrance nullifier not derived from (r, cm)")]
    Constraint3EncumbranceNullifier,
    #[error("constraint 4: Merkle path does not verify against tree_root")]
    Constraint4MerkleInclusion,
    #[error("constraint 6: intentHash does not bind the intent fields")]
    Constraint6IntentHash,
    #[error("constraint 7: position commitment binding failed")]
    Constraint7PositionCommit,
    #[error("constraint 8: col_nominal != v")]
    Constraint8CollateralEqualsValue,
    #[error("constraint 9: amount bounds violated (v > 0, max_amount <= v, keeper_fee < max_amount)")]
    Constraint9AmountBounds,
    #[error("constraint 10: irm_addr_commit does not bind irm_addr")]
    Constraint10IrmBinding,
    #[error("constraint 11: degenerate owner_sk = 0")]
    Constraint11DegenerateKey,
    #[error("constraint 12: zero blinding factor")]
    Constraint12ZeroBlinding,
    #[error("constraint 13: intent target does not match bound target_addr")]
    Constraint13TargetBinding,
}

#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum SpendViolation {
    #[error("note commitment binding failed")]
    CommitmentBinding,
    #[error("public key does not derive from owner_sk")]
    PkDerivation,
    #[error("spend nullifier not derived from (owner_sk, cm)")]
    SpendNullifier,
    #[error("Merkle path does not verify against tree_root")]
    MerkleInclusion,
    #[error("recomputed encumbrance nullifier differs from the public input")]
    NullifierBindingViolation,
}

#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum SettleViolation {
    #[error("note commitment binding failed")]
    CommitmentBinding,
    #[error("ownership violation: pk does not derive from owner_sk")]
    OwnershipViolation,
    #[error("Merkle path does not verify against tree_root")]
    MerkleInclusion,
    #[error("recomputed encumbrance nullifier differs from the public input")]
    NullifierBindingViolation,
    #[error("repayment_amount is not below 2^128")]
    RangeViolation,
}

/// Nine public inputs of the Encumbrance relation, pi[0]..pi[8].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncumberStatement {
    pub cm_note: FieldElement,
    pub nf_encumber: FieldElement,
    pub cond_hash: FieldElement,
    pub intent_hash: FieldElement,
    pub position_commit: FieldElement,
    pub tree_root: FieldElement,
    pub irm_addr_commit: FieldElement,
    pub irm_addr: Address,
    pub target_addr: Address,
}

#[derive(Debug, Clone)]
pub struct EncumberWitness {
    pub v: FieldElement,
    pub r: FieldElement,
    pub aid: FieldElement,
    pub pk_x: FieldElement,
    pub pk_y: FieldElement,
    pub owner_sk: Scalar,
    pub merkle_path: MerklePath,
    pub col_nominal: FieldElement,
    pub debt_principal: FieldElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpendStatement {
    pub nf_spend: FieldElement,
    pub tree_root: FieldElement,
    /// The envelope addition: the claimed encumbrance nullifier, checked
    /// on-chain against the active marker set.
    pub nf_encumber_public_input: FieldElement,
}

#[derive(Debug, Clone)]
pub struct SpendWitness {
    pub v: FieldElement,
    pub r: FieldElement,
    pub aid: FieldElement,
    pub pk_x: FieldElement,
    pub pk_y: FieldElement,
    pub owner_sk: Scalar,
    pub merkle_path: MerklePath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettleStatement {
    pub eid: u64,
    pub nf_encumber_public_input: FieldElement,
    pub tree_root: FieldElement,
    pub repayment_amount: FieldElement,
}

pub type SettleWitness = SpendWitness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttestationKind {
    Encumber,
    Spend,
    Settle,
}

impl AttestationKind {
    fn tag(self) -> FieldElement {
        FieldElement::from_u64(match self {
            AttestationKind::Encumber => 0x656e63, // "enc"
            AttestationKind::Spend => 0x737064,    // "spd"
            AttestationKind::Settle => 0x73746c,   // "stl"
        })
    }
}

/// A verified statement/witness pair, sealed by the checker. Constructible
/// only inside this module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attestation {
    kind: AttestationKind,
    statement_digest: FieldElement,
    checker_version: String,
}

impl Attestation {
    pub fn kind(&self) -> AttestationKind {
        self.kind
    }

    pub fn statement_digest(&self) -> FieldElement {
        self.statement_digest
    }

    pub fn checker_version(&self) -> &str {
        &self.checker_version
    }
}

fn fold(kind: AttestationKind, fields: &[FieldElement]) -> FieldElement {
    let mut acc = kind.tag();
    for f in fields {
        acc = hash2(acc, *f);
    }
    acc
}

impl EncumberStatement {
    pub fn digest(&self) -> FieldElement {
        fold(
            AttestationKind::Encumber,
            &[
                self.cm_note,
                self.nf_encumber,
                self.cond_hash,
                self.intent_hash,
                self.position_commit,
                self.tree_root,
                self.irm_addr_commit,
                self.irm_addr.to_field(),
                self.target_addr.to_field(),
            ],
        )
    }
}

impl SpendStatement {
    pub fn digest(&self) -> FieldElement {
        fold(
            AttestationKind::Spend,
            &[self.nf_spend, self.tree_root, self.nf_encumber_public_input],
        )
    }
}

impl SettleStatement {
    pub fn digest(&self) -> FieldElement {
        fold(
            AttestationKind::Settle,
            &[
                FieldElement::from_u64(self.eid),
                self.nf_encumber_public_input,
                self.tree_root,
                self.repayment_amount,
            ],
        )
    }
}

/// A named constraint deletion, for mutation testing of the game harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Delete one numbered Encumbrance constraint (5 is on-chain and has no
    /// mutant here).
    EncumberConstraint(u8),
    /// Delete the Spend circuit's nullifier-binding equality.
    SpendNullifierBinding,
    /// Delete the Settle circuit's ownership equality.
    SettleOwnership,
    /// Delete the Settle circuit's repayment range constraint.
    SettleRange,
}

/// The trusted relation checker.
#[derive(Debug, Clone, Default)]
pub struct Checker {
    mutation: Option<Mutation>,
}

impl Checker {
    /// The intact checker.
    pub fn new() -> Self {
        Checker { mutation: None }
    }

    /// A deliberately broken checker with one constraint deleted. Only game
    /// harnesses should construct this.
    pub fn mutant(mutation: Mutation) -> Self {
        Checker {
            mutation: Some(mutation),
        }
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    fn keeps(&self, m: Mutation) -> bool {
        self.mutation != Some(m)
    }

    fn seal(&self, kind: AttestationKind, digest: FieldElement) -> Attestation {
        Attestation {
            kind,
            statement_digest: digest,
            checker_version: CHECKER_VERSION.to_string(),
        }
    }

    /// Check the Encumbrance relation (constraints 1-13, minus the
    /// on-chain-only constraint 5) and seal an attestation on success.
    ///
    /// The intent is part of the witness: its fields are the preimage of
    /// the public intentHash.
    pub fn check_encumber(
        &self,
        st: &EncumberStatement,
        w: &EncumberWitness,
        intent: &RedistributionIntent,
    ) -> Result<Attestation, EncumberViolation> {
        use EncumberViolation as V;
        use Mutation::EncumberConstraint as MC;

        // 11/12 first so later constraints can assume usable key material.
        if self.keeps(MC(11)) && w.owner_sk.is_zero() {
            return Err(V::Constraint11DegenerateKey);
        }
        if self.keeps(MC(12)) && w.r.is_zero() {
            return Err(V::Constraint12ZeroBlinding);
        }
        let cm = hash4(w.v, w.r, w.pk_x, w.aid);
        if self.keeps(MC(1)) && cm != st.cm_note {
            return Err(V::Constraint1CommitmentBinding);
        }
        if self.keeps(MC(2)) {
            match derive_pubkey(&w.owner_sk) {
                Ok(pk) if pk.x == w.pk_x && pk.y == w.pk_y => {}
                _ => return Err(V::Constraint2PkDerivation),
            }
        }
        if self.keeps(MC(3)) && hash3(w.r, cm, encumber_tag()) != st.nf_encumber {
            return Err(V::Constraint3EncumbranceNullifier);
        }
        if self.keeps(MC(4)) && !verify_path(st.tree_root, cm, &w.merkle_path) {
            return Err(V::Constraint4MerkleInclusion);
        }
        if self.keeps(MC(6)) && intent_hash(intent) != st.intent_hash {
            return Err(V::Constraint6IntentHash);
        }
        // 8 before 7 so a collateral mismatch reports as the semantic
        // constraint rather than the commitment binding.
        if self.keeps(MC(8)) && w.col_nominal != w.v {
            return Err(V::Constraint8CollateralEqualsValue);
        }
        if self.keeps(MC(7))
            && hash3(w.col_nominal, w.debt_principal, cm) != st.position_commit
        {
            return Err(V::Constraint7PositionCommit);
        }
        if self.keeps(MC(9)) {
            let bounds_ok = !w.v.is_zero()
                && fe_at_least_u128(w.v, intent.max_amount)
                && intent.keeper_fee < intent.max_amount;
            if !bounds_ok {
                return Err(V::Constraint9AmountBounds);
            }
        }
        if self.keeps(MC(10))
            && hash2(st.irm_addr.to_field(), params_tag()) != st.irm_addr_commit
        {
            return Err(V::Constraint10IrmBinding);
        }
        if self.keeps(MC(13)) && intent.target_addr != st.target_addr {
            return Err(V::Constraint13TargetBinding);
        }
        Ok(self.seal(AttestationKind::Encumber, st.digest()))
    }

    /// Check the Spend relation, including the envelope addition binding
    /// the recomputed encumbrance nullifier to the public input.
    pub fn check_spend(
        &self,
        st: &SpendStatement,
        w: &SpendWitness,
    ) -> Result<Attestation, SpendViolation> {
        let cm = hash4(w.v, w.r, w.pk_x, w.aid);
        let pk = derive_pubkey(&w.owner_sk).map_err(|_| SpendViolation::PkDerivation)?;
        if pk.x != w.pk_x || pk.y != w.pk_y {
            return Err(SpendViolation::PkDerivation);
        }
        if hash3(w.owner_sk.to_field(), cm, spend_tag()) != st.nf_spend {
            return Err(SpendViolation::SpendNullifier);
        }
        if !verify_path(st.tree_root, cm, &w.merkle_path) {
            return Err(SpendViolation::MerkleInclusion);
        }
        if self.keeps(Mutation::SpendNullifierBinding)
            && hash3(w.r, cm, encumber_tag()) != st.nf_encumber_public_input
        {
            return Err(SpendViolation::NullifierBindingViolation);
        }
        Ok(self.seal(AttestationKind::Spend, st.digest()))
    }

    /// Check the Settle relation. The debt-sufficiency comparison is *not*
    /// here; that is the registry's on-chain check.
    pub fn check_settle(
        &self,
        st: &SettleStatement,
        w: &SettleWitness,
    ) -> Result<Attestation, SettleViolation> {
        let cm = hash4(w.v, w.r, w.pk_x, w.aid);
        if self.keeps(Mutation::SettleOwnership) {
            let pk =
                derive_pubkey(&w.owner_sk).map_err(|_| SettleViolation::OwnershipViolation)?;
            if pk.x != w.pk_x || pk.y != w.pk_y {
                return Err(SettleViolation::OwnershipViolation);
            }
        }
        if !verify_path(st.tree_root, cm, &w.merkle_path) {
            return Err(SettleViolation::MerkleInclusion);
        }
        if hash3(w.r, cm, encumber_tag()) != st.nf_encumber_public_input {
            return Err(SettleViolation::NullifierBindingViolation);
        }
        if self.keeps(Mutation::SettleRange) {
            let limbs = st.repayment_amount.to_u256();
            if limbs[2] != 0 || limbs[3] != 0 {
                return Err(SettleViolation::RangeViolation);
            }
        }
        Ok(self.seal(AttestationKind::Settle, st.digest()))
    }
}

/// Registry-side verification: true iff the attestation was issued for
/// exactly this statement digest and kind.
pub fn verify_encumber(att: &Attestation, st: &EncumberStatement) -> bool {
    att.kind == AttestationKind::Encumber && att.statement_digest == st.digest()
}

pub fn verify_spend(att: &Attestation, st: &SpendStatement) -> bool {
    att.kind == AttestationKind::Spend && att.statement_digest == st.digest()
}

pub fn verify_settle(att: &Attestation, st: &SettleStatement) -> bool {
    att.kind == AttestationKind::Settle && att.statement_digest == st.digest()
}

/// v >= x where v is a canonical field value and x a u128 amount.
fn fe_at_least_u128(v: FieldElement, x: u128) -> bool {
    let bound = [x as u64, (x >> 64) as u64, 0, 0];
    u256_cmp(&v.to_u256(), &bound) != std::cmp::Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::KeyPair;
    use crate::merkle::MerkleTree;
    use crate::note::{commit, encumbrance_nullifier, random_note, Note};
    use crate::registry::intent_hash;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    pub(crate) struct Fixture {
        pub kp: KeyPair,
        pub note: Note,
        pub tree: MerkleTree,
        pub st: EncumberStatement,
        pub w: EncumberWitness,
        pub intent: RedistributionIntent,
    }

    pub(crate) fn honest_fixture(seed: u64) -> Fixture {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = KeyPair::random(&mut rng);
        let mut note = random_note(&mut rng, kp.pk.x, kp.pk.y);
        // keep v comfortably above the intent amounts
        note.v = FieldElement::from_u64(1_000_000);
        let cm = commit(&note).unwrap();
        let mut tree = MerkleTree::new(8).unwrap();
        let idx = tree.insert(cm.0).unwrap();
        let path = tree.prove_membership(idx).unwrap();
        let intent = RedistributionIntent {
            action_type: 1,
            target_addr: Address(0xbeef),
            params_hash: FieldElement::from_u64(55),
            keeper_fee: 1_000,
            max_amount: 900_000,
        };
        let nf_enc = encumbrance_nullifier(note.r, &cm).unwrap();
        let col = note.v;
        let debt = FieldElement::from_u64(400_000);
        let st = EncumberStatement {
            cm_note: cm.0,
            nf_encumber: nf_enc.0,
            cond_hash: FieldElement::from_u64(123),
            intent_hash: intent_hash(&intent),
            position_commit: hash3(col, debt, cm.0),
            tree_root: tree.root(),
            irm_addr_commit: hash2(Address(0x1).to_field(), params_tag()),
            irm_addr: Address(0x1),
            target_addr: Address(0xbeef),
        };
        let w = EncumberWitness {
            v: note.v,
            r: note.r,
            aid: note.aid,
            pk_x: note.pk_x,
            pk_y: note.pk_y,
            owner_sk: kp.sk,
            merkle_path: path,
            col_nominal: col,
            debt_principal: debt,
        };
        Fixture {
            kp,
            note,
            tree,
            st,
            w,
            intent,
        }
    }

    #[test]
    fn honest_encumber_attests_and_verifies() {
        let f = honest_fixture(1);
        let att = Checker::new().check_encumber(&f.st, &f.w, &f.intent).unwrap();
        assert!(verify_encumber(&att, &f.st));
        assert_eq!(att.kind(), AttestationKind::Encumber);
    }

    #[test]
    fn each_constraint_trips_on_its_own_mutation() {
        use EncumberViolation as V;
        let checker = Checker::new();
        let cases: Vec<(Box<dyn Fn(&mut Fixture)>, V)> = vec![
            (
                Box::new(|f: &mut Fixture| f.st.cm_note += FieldElement::ONE),
                V::Constraint1CommitmentBinding,
            ),
            (
                Box::new(|f: &mut Fixture| f.w.pk_y += FieldElement::ONE),
                V::Constraint2PkDerivation,
            ),
            (
                Box::new(|f: &mut Fixture| f.st.nf_encumber += FieldElement::ONE),
                V::Constraint3EncumbranceNullifier,
            ),
            (
                Box::new(|f: &mut Fixture| {
                    f.w.merkle_path.siblings[0] += FieldElement::ONE
                }),
                V::Constraint4MerkleInclusion,
            ),
            (
                Box::new(|f: &mut Fixture| f.st.intent_hash += FieldElement::ONE),
                V::Constraint6IntentHash,
            ),
            (
                Box::new(|f: &mut Fixture| f.st.position_commit += FieldElement::ONE),
                V::Constraint7PositionCommit,
            ),
            (
                Box::new(|f: &mut Fixture| {
                    f.w.col_nominal += FieldElement::ONE;
                    // keep constraint 7 satisfied so only 8 trips
                    f.st.position_commit =
                        hash3(f.w.col_nominal, f.w.debt_principal, f.st.cm_note);
                }),
                V::Constraint8CollateralEqualsValue,
            ),
            (
                Box::new(|f: &mut Fixture| {
                    f.intent.keeper_fee = f.intent.max_amount; // strict < violated
                    f.st.intent_hash = intent_hash(&f.intent);
                }),
                V::Constraint9AmountBounds,
            ),
            (
                Box::new(|f: &mut Fixture| f.st.irm_addr_commit += FieldElement::ONE),
                V::Constraint10IrmBinding,
            ),
            (
                Box::new(|f: &mut Fixture| f.w.owner_sk = Scalar::from_u64(0)),
                V::Constraint11DegenerateKey,
            ),
            (
                Box::new(|f: &mut Fixture| {
                    f.w.r = FieldElement::ZERO;
                }),
                V::Constraint12ZeroBlinding,
            ),
            (
                Box::new(|f: &mut Fixture| {
                    f.intent.target_addr = Address(0xdead);
                    f.st.intent_hash = intent_hash(&f.intent);
                }),
                V::Constraint13TargetBinding,
            ),
        ];
        for (i, (mutate, expected)) in cases.into_iter().enumerate() {
            let mut f = honest_fixture(100 + i as u64);
            mutate(&mut f);
            let got = checker.check_encumber(&f.st, &f.w, &f.intent);
            assert_eq!(got.unwrap_err(), expected, "case {i}");
        }
    }

    #[test]
    fn max_amount_above_value_trips_constraint_9() {
        let mut f = honest_fixture(2);
        f.intent.max_amount = 2_000_000; // > v
        f.st.intent_hash = intent_hash(&f.intent);
        assert_eq!(
            Checker::new().check_encumber(&f.st, &f.w, &f.intent),
            Err(EncumberViolation::Constraint9AmountBounds)
        );
    }

    #[test]
    fn mutant_checker_accepts_what_intact_rejects() {
        let mut f = honest_fixture(3);
        f.st.nf_encumber += FieldElement::ONE;
        assert!(Checker::new().check_encumber(&f.st, &f.w, &f.intent).is_err());
        assert!(Checker::mutant(Mutation::EncumberConstraint(3))
            .check_encumber(&f.st, &f.w, &f.intent)
            .is_ok());
    }

    fn spend_fixture(seed: u64) -> (SpendStatement, SpendWitness, FieldElement) {
        let f = honest_fixture(seed);
        let cm = commit(&f.note).unwrap();
        let nf_spend = hash3(f.kp.sk.to_field(), cm.0, spend_tag());
        let nf_enc = hash3(f.note.r, cm.0, encumber_tag());
        let st = SpendStatement {
            nf_spend,
            tree_root: f.tree.root(),
            nf_encumber_public_input: nf_enc,
        };
        let w = SpendWitness {
            v: f.note.v,
            r: f.note.r,
            aid: f.note.aid,
            pk_x: f.note.pk_x,
            pk_y: f.note.pk_y,
            owner_sk: f.kp.sk,
            merkle_path: f.tree.prove_membership(0).unwrap(),
        };
        (st, w, nf_enc)
    }

    #[test]
    fn honest_spend_attests() {
        let (st, w, _) = spend_fixture(4);
        let att = Checker::new().check_spend(&st, &w).unwrap();
        assert!(verify_spend(&att, &st));
    }

    #[test]
    fn phantom_nullifier_injection_rejected() {
        // Attack A: claim an nf_encumber_public_input unrelated to the note.
        let (mut st, w, _) = spend_fixture(5);
        st.nf_encumber_public_input = FieldElement::from_u64(0xbad);
        assert_eq!(
            Checker::new().check_spend(&st, &w),
            Err(SpendViolation::NullifierBindingViolation)
        );
    }

    #[test]
    fn cross_note_nullifier_swap_rejected() {
        // Attack B: present a different note's genuine encumbrance nullifier.
        let (mut st, w, _) = spend_fixture(6);
        let other = honest_fixture(7);
        let other_cm = commit(&other.note).unwrap();
        st.nf_encumber_public_input = hash3(other.note.r, other_cm.0, encumber_tag());
        assert_eq!(
            Checker::new().check_spend(&st, &w),
            Err(SpendViolation::NullifierBindingViolation)
        );
    }

    #[test]
    fn settle_rejects_wrong_owner_and_out_of_range_repayment() {
        let f = honest_fixture(8);
        let cm = commit(&f.note).unwrap();
        let nf_enc = hash3(f.note.r, cm.0, encumber_tag());
        let st = SettleStatement {
            eid: 0,
            nf_encumber_public_input: nf_enc,
            tree_root: f.tree.root(),
            repayment_amount: FieldElement::from_u64(500_000),
        };
        let w = SettleWitness {
            v: f.note.v,
            r: f.note.r,
            aid: f.note.aid,
            pk_x: f.note.pk_x,
            pk_y: f.note.pk_y,
            owner_sk: f.kp.sk,
            merkle_path: f.tree.prove_membership(0).unwrap(),
        };
        assert!(Checker::new().check_settle(&st, &w).is_ok());

        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let mut wrong = w.clone();
        wrong.owner_sk = KeyPair::random(&mut rng).sk;
        assert_eq!(
            Checker::new().check_settle(&st, &wrong),
            Err(SettleViolation::OwnershipViolation)
        );

        // repayment_amount = 2^128 exactly: strict bound violated
        let mut big = st.clone();
        big.repayment_amount = FieldElement::from_u256([0, 0, 1, 0]);
        assert_eq!(
            Checker::new().check_settle(&big, &w),
            Err(SettleViolation::RangeViolation)
        );
    }

    #[test]
    fn attestation_binds_statement_and_kind() {
        let f = honest_fixture(10);
        let att = Checker::new().check_encumber(&f.st, &f.w, &f.intent).unwrap();
        let mut other = f.st.clone();
        other.cond_hash += FieldElement::ONE;
        assert!(!verify_encumber(&att, &other));

        // kind confusion: an encumber attestation is never a settle one
        let sst = SettleStatement {
            eid: 0,
            nf_encumber_public_input: f.st.nf_encumber,
            tree_root: f.st.tree_root,
            repayment_amount: FieldElement::ZERO,
        };
        assert!(!verify_settle(&att, &sst));
    }
}
