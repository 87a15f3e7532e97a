//! Executable model of non-custodial enforced encumbrance.
//!
//! A commitment/nullifier private-state ledger with an envelope registry,
//! explicit relation checkers standing in for SNARK circuits, condition-tree
//! enforcement, account-ledger escape-trace demonstrations, adversarial game
//! harnesses, and a gas/break-even economics model.

pub mod conditions;
pub mod curve;
pub mod economics;
pub mod field;
pub mod games;
pub mod hash;
pub mod ledger;
pub mod merkle;
pub mod note;
pub mod registry;
pub mod relations;
pub mod scenario;
pub mod types;
