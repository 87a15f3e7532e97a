//! Arithmetic in the scalar field of BN254 (a 254-bit prime field).
//!
//! Elements are kept in Montgomery form as four little-endian u64 limbs.
//! This field is the ambient type of every commitment, nullifier, and hash
//! value in the protocol, and doubles as the base field of the embedded
//! Grumpkin curve.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Little-endian 256-bit integer as raw limbs.
pub type U256 = [u64; 4];

/// The BN254 scalar field modulus
/// 21888242871839275222246405745257275088548364400416034343698204186575808495617.
pub const MODULUS: U256 = [
    0x43e1f593f0000001,
    0x2833e84879b97091,
    0xb85045b68181585d,
    0x30644e72e131a029,
];

/// -MODULUS^{-1} mod 2^64, for Montgomery reduction.
const MONT_INV: u64 = 0xc2e1f593efffffff;

/// R = 2^256 mod MODULUS (the Montgomery representation of 1).
const R: U256 = [
    0xac96341c4ffffffb,
    0x36fc76959f60cd29,
    0x666ea36f7879462e,
    0x0e0a77c19a07df2f,
];

/// R^2 mod MODULUS, used to convert into Montgomery form.
const R2: U256 = [
    0x1bb8e645ae216da7,
    0x53fe3ab1e35c59e3,
    0x8c49833d53bb8085,
    0x0216d0b17f4e44a5,
];

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum FieldError {
    #[error("inverse of zero is undefined")]
    ZeroInverse,
    #[error("value is not a canonical field element")]
    NotCanonical,
    #[error("malformed field element encoding: {0}")]
    BadEncoding(String),
}

/// An element of the prime field, always reduced to [0, p).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement(U256);

// ---- raw u256 helpers ----

#[inline]
pub fn u256_cmp(a: &U256, b: &U256) -> std::cmp::Ordering {
    for i in (0..4).rev() {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

#[inline]
fn adc(a: u64, b: u64, carry: &mut u64) -> u64 {
    let t = (a as u128) + (b as u128) + (*carry as u128);
    *carry = (t >> 64) as u64;
    t as u64
}

#[inline]
fn sbb(a: u64, b: u64, borrow: &mut u64) -> u64 {
    let t = (a as u128).wrapping_sub((b as u128) + (*borrow as u128));
    *borrow = ((t >> 64) as u64) & 1;
    t as u64
}

#[inline]
fn mac(a: u64, b: u64, c: u64, carry: &mut u64) -> u64 {
    let t = (a as u128) + (b as u128) * (c as u128) + (*carry as u128);
    *carry = (t >> 64) as u64;
    t as u64
}

fn u256_sub(a: &U256, b: &U256) -> U256 {
    let mut borrow = 0;
    let mut out = [0u64; 4];
    for i in 0..4 {
        out[i] = sbb(a[i], b[i], &mut borrow);
    }
    out
}

/// Reduce an arbitrary 256-bit value mod p by repeated subtraction
/// (at most five iterations since p > 2^253).
fn reduce_raw(mut v: U256) -> U256 {
    while u256_cmp(&v, &MODULUS) != std::cmp::Ordering::Less {
        v = u256_sub(&v, &MODULUS);
    }
    v
}

/// CIOS Montgomery multiplication; inputs and output in Montgomery form, < p.
fn mont_mul(a: &U256, b: &U256) -> U256 {
    let mut t = [0u64; 6];
    for i in 0..4 {
        let mut carry = 0u64;
        for j in 0..4 {
            t[j] = mac(t[j], a[j], b[i], &mut carry);
        }
        let mut c = 0u64;
        t[4] = adc(t[4], carry, &mut c);
        t[5] = c;

        let m = t[0].wrapping_mul(MONT_INV);
        let mut carry = 0u64;
        mac(t[0], m, MODULUS[0], &mut carry);
        for j in 1..4 {
            t[j - 1] = mac(t[j], m, MODULUS[j], &mut carry);
        }
        let mut c = 0u64;
        t[3] = adc(t[4], carry, &mut c);
        t[4] = t[5] + c;
        t[5] = 0;
    }
    let out = [t[0], t[1], t[2], t[3]];
    if t[4] != 0 || u256_cmp(&out, &MODULUS) != std::cmp::Ordering::Less {
        u256_sub(&out, &MODULUS)
    } else {
        out
    }
}

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement([0, 0, 0, 0]);
    pub const ONE: FieldElement = FieldElement(R);

    /// Construct from a canonical (non-Montgomery) 256-bit integer,
    /// reducing mod p.
    pub fn from_u256(raw: U256) -> Self {
        FieldElement(mont_mul(&reduce_raw(raw), &R2))
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_u256([v, 0, 0, 0])
    }

    pub fn from_u128(v: u128) -> Self {
        Self::from_u256([v as u64, (v >> 64) as u64, 0, 0])
    }

    /// Canonical little-endian limb representation in [0, p).
    pub fn to_u256(&self) -> U256 {
        mont_mul(&self.0, &[1, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0, 0]
    }

    pub fn to_bytes_be(&self) -> [u8; 32] {
        let c = self.to_u256();
        let mut out = [0u8; 32];
        for i in 0..4 {
            out[8 * i..8 * i + 8].copy_from_slice(&c[3 - i].to_be_bytes());
        }
        out
    }

    pub fn from_bytes_be(bytes: &[u8; 32]) -> Self {
        let mut limbs = [0u64; 4];
        for i in 0..4 {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[8 * i..8 * i + 8]);
            limbs[3 - i] = u64::from_be_bytes(b);
        }
        Self::from_u256(limbs)
    }

    /// 0x-prefixed big-endian hex, the wire form used in all JSON artifacts.
    pub fn to_hex(&self) -> String {
        format!("0x{}", hex::encode(self.to_bytes_be()))
    }

    pub fn from_hex(s: &str) -> Result<Self, FieldError> {
        let s = s.strip_prefix("0x").unwrap_or(s);
        if s.len() > 64 {
            return Err(FieldError::BadEncoding("more than 64 hex digits".into()));
        }
        let padded = format!("{:0>64}", s);
        let bytes = hex::decode(&padded)
            .map_err(|e| FieldError::BadEncoding(e.to_string()))?;
        let mut arr = [0u8; 32];
        arr.copy_from_slice(&bytes);
        Ok(Self::from_bytes_be(&arr))
    }

    pub fn square(&self) -> Self {
        FieldElement(mont_mul(&self.0, &self.0))
    }

    pub fn double(&self) -> Self {
        *self + *self
    }

    /// Exponentiation by a canonical 256-bit exponent.
    pub fn pow(&self, exp: &U256) -> Self {
        let mut acc = FieldElement::ONE;
        for i in (0..4).rev() {
            for bit in (0..64).rev() {
                acc = acc.square();
                if (exp[i] >> bit) & 1 == 1 {
                    acc *= *self;
                }
            }
        }
        acc
    }

    /// Multiplicative inverse via Fermat; errors on zero.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let mut e = MODULUS;
        // p - 2
        let mut borrow = 0;
        e[0] = sbb(e[0], 2, &mut borrow);
        let mut i = 1;
        while borrow != 0 && i < 4 {
            e[i] = sbb(e[i], 0, &mut borrow);
            i += 1;
        }
        Ok(self.pow(&e))
    }

    /// Legendre symbol: 1 for nonzero squares, p-1 for non-squares, 0 for zero.
    pub fn legendre(&self) -> Self {
        // (p - 1) / 2
        let e = [
            0xa1f0fac9f8000000,
            0x9419f4243cdcb848,
            0xdc2822db40c0ac2e,
            0x183227397098d014,
        ];
        self.pow(&e)
    }

    pub fn is_square(&self) -> bool {
        self.is_zero() || self.legendre() == FieldElement::ONE
    }

    /// Tonelli-Shanks square root (p - 1 = 2^28 * t). Returns the
    /// lexicographically smaller of the two roots, or None for non-squares.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(FieldElement::ZERO);
        }
        if !self.is_square() {
            return None;
        }
        // t = (p - 1) / 2^28
        let t: U256 = [
            0x9b9709143e1f593f,
            0x181585d2833e8487,
            0x131a029b85045b68,
            0x000000030644e72e,
        ];
        // (t + 1) / 2
        let t_plus_1_half: U256 = [
            0xcdcb848a1f0faca0,
            0x0c0ac2e9419f4243,
            0x098d014dc2822db4,
            0x0000000183227397,
        ];
        // Find a quadratic non-residue to seed the search.
        let mut z = FieldElement::from_u64(2);
        while z.is_square() {
            z += FieldElement::ONE;
        }
        let mut m = 28u32;
        let mut c = z.pow(&t);
        let mut u = self.pow(&t);
        let mut r = self.pow(&t_plus_1_half);
        while u != FieldElement::ONE {
            // least i with u^(2^i) = 1
            let mut i = 0u32;
            let mut probe = u;
            while probe != FieldElement::ONE {
                probe = probe.square();
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            u *= c;
            r *= b;
        }
        debug_assert_eq!(r.square(), *self);
        let neg = -r;
        if u256_cmp(&r.to_u256(), &neg.to_u256()) == std::cmp::Ordering::Greater {
            Some(neg)
        } else {
            Some(r)
        }
    }

    /// Uniform random element (rejection sampling on the raw limbs).
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let raw: U256 = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            if u256_cmp(&raw, &MODULUS) == std::cmp::Ordering::Less {
                return Self::from_u256(raw);
            }
        }
    }

    /// Nonzero uniform random element.
    pub fn random_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = Self::random(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        let mut carry = 0;
        let mut out = [0u64; 4];
        for i in 0..4 {
            out[i] = adc(self.0[i], rhs.0[i], &mut carry);
        }
        // p < 2^254 so the limb sum never overflows 2^256
        FieldElement(reduce_raw(out))
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        if u256_cmp(&self.0, &rhs.0) == std::cmp::Ordering::Less {
            let mut carry = 0;
            let mut tmp = [0u64; 4];
            for i in 0..4 {
                tmp[i] = adc(self.0[i], MODULUS[i], &mut carry);
            }
            let mut borrow = 0;
            let mut out = [0u64; 4];
            for i in 0..4 {
                out[i] = sbb(tmp[i], rhs.0[i], &mut borrow);
            }
            debug_assert_eq!(carry, borrow);
            FieldElement(out)
        } else {
            FieldElement(u256_sub(&self.0, &rhs.0))
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        FieldElement(mont_mul(&self.0, &rhs.0))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        if self.is_zero() {
            self
        } else {
            FieldElement(u256_sub(&MODULUS, &self.0))
        }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: FieldElement) {
        *self = *self + rhs;
    }
}
impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: FieldElement) {
        *self = *self - rhs;
    }
}
impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: FieldElement) {
        *self = *self * rhs;
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        u256_cmp(&self.to_u256(), &other.to_u256())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.to_hex())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FieldElement::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn modulus_big() -> BigUint {
        BigUint::parse_bytes(
            b"21888242871839275222246405745257275088548364400416034343698204186575808495617",
            10,
        )
        .unwrap()
    }

    fn to_big(f: &FieldElement) -> BigUint {
        BigUint::from_bytes_be(&f.to_bytes_be())
    }

    #[test]
    fn montgomery_constants_match_bigint() {
        let p = modulus_big();
        let mut limbs = [0u64; 4];
        let digits = p.to_u64_digits();
        limbs[..digits.len()].copy_from_slice(&digits);
        assert_eq!(limbs, MODULUS);

        let r = (BigUint::from(1u8) << 256u32) % &p;
        // ONE is stored as R; converting out of Montgomery form must give 1.
        assert_eq!(FieldElement::ONE.to_u256(), [1, 0, 0, 0]);
        assert_eq!(to_big(&FieldElement::ONE), BigUint::from(1u8));
        // Round-tripping the value R through from_u256 checks R2.
        let r_elem = {
            let mut l = [0u64; 4];
            let d = r.to_u64_digits();
            l[..d.len()].copy_from_slice(&d);
            FieldElement::from_u256(l)
        };
        assert_eq!(to_big(&r_elem), r);
    }

    #[test]
    fn arithmetic_matches_bigint_oracle() {
        let p = modulus_big();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            let (ab, bb) = (to_big(&a), to_big(&b));
            assert_eq!(to_big(&(a + b)), (&ab + &bb) % &p);
            assert_eq!(to_big(&(a * b)), (&ab * &bb) % &p);
            assert_eq!(to_big(&(a - b)), ((&p + &ab) - &bb) % &p);
            assert_eq!(to_big(&(-a)), (&p - &ab) % &p);
        }
    }

    #[test]
    fn inverse_roundtrip_and_zero_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..50 {
            let a = FieldElement::random_nonzero(&mut rng);
            assert_eq!(a * a.inverse().unwrap(), FieldElement::ONE);
        }
        assert_eq!(FieldElement::ZERO.inverse(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn sqrt_agrees_with_square() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..25 {
            let a = FieldElement::random(&mut rng);
            let sq = a.square();
            let root = sq.sqrt().expect("square must have a root");
            assert!(root == a || root == -a);
        }
    }

    #[test]
    fn hex_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let a = FieldElement::random(&mut rng);
        assert_eq!(FieldElement::from_hex(&a.to_hex()).unwrap(), a);
        assert_eq!(FieldElement::from_hex("0x01").unwrap(), FieldElement::ONE);
    }
}
