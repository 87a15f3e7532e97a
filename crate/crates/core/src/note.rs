//! The note model and the two-namespace nullifier construction.
//!
//! A spend nullifier is keyed by the owner's secret key; an encumbrance
//! nullifier is keyed by the note's blinding factor and is independent of
//! any key material. The two namespaces are separated by domain tags.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::Scalar;
use crate::field::FieldElement;
use crate::hash::{encumber_tag, hash3, hash4, spend_tag};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum NoteError {
    #[error("note value must be nonzero")]
    ZeroValue,
    #[error("blinding factor must be nonzero")]
    ZeroBlinding,
    #[error("degenerate key: sk = 0")]
    DegenerateKey,
}

/// The private-state asset record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    /// Asset value in nominal units.
    pub v: FieldElement,
    /// Blinding factor; nonzero so commitments are never deterministic.
    pub r: FieldElement,
    /// Owner public key x-coordinate (enters the commitment).
    pub pk_x: FieldElement,
    /// Owner public key y-coordinate (carried for relation checks only).
    pub pk_y: FieldElement,
    /// Asset identifier.
    pub aid: FieldElement,
}

impl Note {
    pub fn validate(&self) -> Result<(), NoteError> {
        if self.v.is_zero() {
            return Err(NoteError::ZeroValue);
        }
        if self.r.is_zero() {
            return Err(NoteError::ZeroBlinding);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NoteCommitment(pub FieldElement);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpendNullifier(pub FieldElement);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncumbranceNullifier(pub FieldElement);

/// cm(N) = hash_4(v, r, pk_x, aid).
pub fn commit(note: &Note) -> Result<NoteCommitment, NoteError> {
    note.validate()?;
    Ok(NoteCommitment(hash4(note.v, note.r, note.pk_x, note.aid)))
}

/// nf_spend = hash_3(sk, cm, SPEND_TAG); keyed by the owner secret.
pub fn spend_nullifier(sk: &Scalar, cm: &NoteCommitment) -> Result<SpendNullifier, NoteError> {
    if sk.is_zero() {
        return Err(NoteError::DegenerateKey);
    }
    Ok(SpendNullifier(hash3(sk.to_field(), cm.0, spend_tag())))
}

/// nf_encumber = hash_3(r, cm, ENCUMBER_TAG); a pure function of (r, cm)
/// with no key material.
pub fn encumbrance_nullifier(
    r: FieldElement,
    cm: &NoteCommitment,
) -> Result<EncumbranceNullifier, NoteError> {
    if r.is_zero() {
        return Err(NoteError::ZeroBlinding);
    }
    Ok(EncumbranceNullifier(hash3(r, cm.0, encumber_tag())))
}

/// position_commit = hash_3(col_nominal, debt_principal, cm).
pub fn position_commit(
    col_nominal: FieldElement,
    debt_principal: FieldElement,
    cm: &NoteCommitment,
) -> FieldElement {
    hash3(col_nominal, debt_principal, cm.0)
}

/// Blinded variant: hash_4(col_nominal, debt_principal, cm, col_rand).
/// Same codomain as `position_commit`, usable as a drop-in replacement.
pub fn blinded_position_commit(
    col_nominal: FieldElement,
    debt_principal: FieldElement,
    cm: &NoteCommitment,
    col_rand: FieldElement,
) -> Result<FieldElement, NoteError> {
    if col_rand.is_zero() {
        return Err(NoteError::ZeroBlinding);
    }
    Ok(hash4(col_nominal, debt_principal, cm.0, col_rand))
}

/// Deterministic random note generation for tests and scenarios.
pub fn random_note<R: rand::Rng + ?Sized>(rng: &mut R, pk_x: FieldElement, pk_y: FieldElement) -> Note {
    Note {
        v: FieldElement::random_nonzero(rng),
        r: FieldElement::random_nonzero(rng),
        pk_x,
        pk_y,
        aid: FieldElement::random(rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::KeyPair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sample_note(rng: &mut ChaCha20Rng) -> (KeyPair, Note) {
        let kp = KeyPair::random(rng);
        let note = random_note(rng, kp.pk.x, kp.pk.y);
        (kp, note)
    }

    #[test]
    fn commit_is_deterministic_and_blinding_sensitive() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let (_, note) = sample_note(&mut rng);
            let mut other = note;
            other.r = FieldElement::random_nonzero(&mut rng);
            assert_eq!(commit(&note), commit(&note));
            if other.r != note.r {
                assert_ne!(commit(&note).unwrap(), commit(&other).unwrap());
            }
        }
    }

    #[test]
    fn zero_blinding_and_zero_value_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let (_, mut note) = sample_note(&mut rng);
        note.r = FieldElement::ZERO;
        assert_eq!(commit(&note), Err(NoteError::ZeroBlinding));
        note.r = FieldElement::ONE;
        note.v = FieldElement::ZERO;
        assert_eq!(commit(&note), Err(NoteError::ZeroValue));
    }

    #[test]
    fn encumbrance_nullifier_ignores_owner_key() {
        // Re-keying the note (hypothetically) leaves nf_encumber unchanged
        // as long as (r, cm) are fixed.
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let (_, note) = sample_note(&mut rng);
        let cm = commit(&note).unwrap();
        let nf1 = encumbrance_nullifier(note.r, &cm).unwrap();
        let nf2 = encumbrance_nullifier(note.r, &cm).unwrap();
        assert_eq!(nf1, nf2);
    }

    #[test]
    fn spend_nullifiers_differ_across_keys() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let (_, note) = sample_note(&mut rng);
        let cm = commit(&note).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..1000 {
            let kp = KeyPair::random(&mut rng);
            let nf = spend_nullifier(&kp.sk, &cm).unwrap();
            assert!(seen.insert(nf), "spend nullifier collision");
        }
    }

    #[test]
    fn namespaces_do_not_cross_even_with_equal_first_inputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        for _ in 0..1000 {
            let (kp, note) = sample_note(&mut rng);
            let cm = commit(&note).unwrap();
            let spend = spend_nullifier(&kp.sk, &cm).unwrap();
            // Treat sk's field embedding as if it were a blinding factor.
            let as_r = kp.sk.to_field();
            if as_r.is_zero() {
                continue;
            }
            let enc = encumbrance_nullifier(as_r, &cm).unwrap();
            assert_ne!(spend.0, enc.0);
        }
    }

    #[test]
    fn position_commit_binds_every_field() {
        let mut rng = ChaCha20Rng::seed_from_u64(36);
        let (_, note) = sample_note(&mut rng);
        let cm = commit(&note).unwrap();
        let col = FieldElement::from_u64(500);
        let debt = FieldElement::from_u64(100);
        let base = position_commit(col, debt, &cm);
        assert_eq!(base, position_commit(col, debt, &cm));
        assert_ne!(base, position_commit(col, debt + FieldElement::ONE, &cm));
        assert_ne!(base, position_commit(col + FieldElement::ONE, debt, &cm));
    }

    #[test]
    fn blinded_position_commit_hides_and_rejects_zero_rand() {
        let mut rng = ChaCha20Rng::seed_from_u64(37);
        let (_, note) = sample_note(&mut rng);
        let cm = commit(&note).unwrap();
        let col = FieldElement::from_u64(500);
        let debt = FieldElement::from_u64(100);
        let r1 = FieldElement::random_nonzero(&mut rng);
        let r2 = FieldElement::random_nonzero(&mut rng);
        let a = blinded_position_commit(col, debt, &cm, r1).unwrap();
        let b = blinded_position_commit(col, debt, &cm, r2).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, blinded_position_commit(col, debt, &cm, r1).unwrap());
        assert_eq!(
            blinded_position_commit(col, debt, &cm, FieldElement::ZERO),
            Err(NoteError::ZeroBlinding)
        );
    }
}
