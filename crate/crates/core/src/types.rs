//! Small shared protocol types.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::FieldElement;

/// An on-chain address, modeled as a compact integer identifier.
/// Serializes as a 0x-prefixed hex string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub u128);

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{:#x}", self.0))
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let digits = s.strip_prefix("0x").unwrap_or(&s);
        u128::from_str_radix(digits, 16)
            .map(Address)
            .map_err(serde::de::Error::custom)
    }
}

impl Address {
    pub fn to_field(&self) -> FieldElement {
        FieldElement::from_u128(self.0)
    }
}

impl std::fmt::Display for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "addr:{:#x}", self.0)
    }
}

/// Seconds since epoch, protocol units.
pub type Timestamp = u64;
