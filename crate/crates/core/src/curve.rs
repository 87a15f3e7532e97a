//! Owner-key derivation on the embedded curve.
//!
//! The curve is Grumpkin: short Weierstrass y^2 = x^3 - 17 over the ambient
//! field, whose group order is the BN254 base-field prime. The generator is
//! the point with the smallest x-coordinate admitting a valid y (x = 1),
//! taking the lexicographically smaller root.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{u256_cmp, FieldElement, U256};

/// Grumpkin group order (= BN254 base-field modulus).
pub const GROUP_ORDER: U256 = [
    0x3c208c16d87cfd47,
    0x97816a916871ca8d,
    0xb85045b68181585d,
    0x30644e72e131a029,
];

fn curve_b() -> FieldElement {
    -FieldElement::from_u64(17)
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum CurveError {
    #[error("degenerate key: sk = 0")]
    DegenerateKey,
    #[error("scalar is not below the group order")]
    ScalarOutOfRange,
    #[error("point is not on the curve")]
    NotOnCurve,
}

/// A scalar in [0, GROUP_ORDER), canonical limbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar(U256);

impl Scalar {
    pub fn from_u256(raw: U256) -> Result<Self, CurveError> {
        if u256_cmp(&raw, &GROUP_ORDER) != std::cmp::Ordering::Less {
            return Err(CurveError::ScalarOutOfRange);
        }
        Ok(Scalar(raw))
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar([v, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0, 0]
    }

    pub fn limbs(&self) -> &U256 {
        &self.0
    }

    /// The scalar embedded into the ambient field (well defined since the
    /// group order exceeds the field modulus by less than 2^130, and used
    /// only as hash input material).
    pub fn to_field(&self) -> FieldElement {
        FieldElement::from_u256(self.0)
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let raw: U256 = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            if raw != [0, 0, 0, 0]
                && u256_cmp(&raw, &GROUP_ORDER) == std::cmp::Ordering::Less
            {
                return Scalar(raw);
            }
        }
    }
}

/// Affine curve point; `infinity` is the group identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePoint {
    pub x: FieldElement,
    pub y: FieldElement,
    pub infinity: bool,
}

impl AffinePoint {
    pub const IDENTITY: AffinePoint = AffinePoint {
        x: FieldElement::ZERO,
        y: FieldElement::ZERO,
        infinity: true,
    };

    pub fn new(x: FieldElement, y: FieldElement) -> Result<Self, CurveError> {
        let p = AffinePoint {
            x,
            y,
            infinity: false,
        };
        if p.is_on_curve() {
            Ok(p)
        } else {
            Err(CurveError::NotOnCurve)
        }
    }

    pub fn is_on_curve(&self) -> bool {
        self.infinity || self.y.square() == self.x.square() * self.x + curve_b()
    }
}

/// Jacobian coordinates for scalar multiplication.
#[derive(Clone, Copy)]
struct Jacobian {
    x: FieldElement,
    y: FieldElement,
    z: FieldElement,
}

impl Jacobian {
    const IDENTITY: Jacobian = Jacobian {
        x: FieldElement::ONE,
        y: FieldElement::ONE,
        z: FieldElement::ZERO,
    };

    fn from_affine(p: &AffinePoint) -> Jacobian {
        if p.infinity {
            Jacobian::IDENTITY
        } else {
            Jacobian {
                x: p.x,
                y: p.y,
                z: FieldElement::ONE,
            }
        }
    }

    fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    fn double(&self) -> Jacobian {
        if self.is_identity() || self.y.is_zero() {
            return Jacobian::IDENTITY;
        }
        // a = 0 doubling formulas
        let a = self.x.square();
        let b = self.y.square();
        let c = b.square();
        let d = ((self.x + b).square() - a - c).double();
        let e = a.double() + a;
        let f = e.square();
        let x3 = f - d.double();
        let y3 = e * (d - x3) - c.double().double().double();
        let z3 = (self.y * self.z).double();
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    fn add(&self, other: &Jacobian) -> Jacobian {
        if self.is_identity() {
            return *other;
        }
        if other.is_identity() {
            return *self;
        }
        let z1z1 = self.z.square();
        let z2z2 = other.z.square();
        let u1 = self.x * z2z2;
        let u2 = other.x * z1z1;
        let s1 = self.y * z2z2 * other.z;
        let s2 = other.y * z1z1 * self.z;
        if u1 == u2 {
            if s1 == s2 {
                return self.double();
            }
            return Jacobian::IDENTITY;
        }
        let h = u2 - u1;
        let i = h.double().square();
        let j = h * i;
        let r = (s2 - s1).double();
        let v = u1 * i;
        let x3 = r.square() - j - v.double();
        let y3 = r * (v - x3) - (s1 * j).double();
        let z3 = ((self.z + other.z).square() - z1z1 - z2z2) * h;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    fn to_affine(&self) -> AffinePoint {
        if self.is_identity() {
            return AffinePoint::IDENTITY;
        }
        let zinv = self.z.inverse().expect("nonzero z");
        let zinv2 = zinv.square();
        AffinePoint {
            x: self.x * zinv2,
            y: self.y * zinv2 * zinv,
            infinity: false,
        }
    }
}

/// The fixed generator: smallest x with a valid y.
pub fn generator() -> AffinePoint {
    static GEN: OnceLock<AffinePoint> = OnceLock::new();
    *GEN.get_or_init(|| {
        let mut x = FieldElement::ONE;
        loop {
            let rhs = x.square() * x + curve_b();
            if let Some(y) = rhs.sqrt() {
                if !y.is_zero() {
                    return AffinePoint {
                        x,
                        y,
                        infinity: false,
                    };
                }
            }
            x += FieldElement::ONE;
        }
    })
}

pub fn point_add(a: &AffinePoint, b: &AffinePoint) -> AffinePoint {
    Jacobian::from_affine(a)
        .add(&Jacobian::from_affine(b))
        .to_affine()
}

pub fn point_double(a: &AffinePoint) -> AffinePoint {
    Jacobian::from_affine(a).double().to_affine()
}

pub fn scalar_mul(k: &Scalar, p: &AffinePoint) -> AffinePoint {
    let mut acc = Jacobian::IDENTITY;
    let base = Jacobian::from_affine(p);
    let limbs = k.limbs();
    for i in (0..4).rev() {
        for bit in (0..64).rev() {
            acc = acc.double();
            if (limbs[i] >> bit) & 1 == 1 {
                acc = acc.add(&base);
            }
        }
    }
    acc.to_affine()
}

/// Keypair on the embedded curve; sk is nonzero and below the group order.
#[derive(Debug, Clone, Copy)]
pub struct KeyPair {
    pub sk: Scalar,
    pub pk: AffinePoint,
}

impl KeyPair {
    pub fn from_sk(sk: Scalar) -> Result<Self, CurveError> {
        let pk = derive_pubkey(&sk)?;
        Ok(KeyPair { sk, pk })
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let sk = Scalar::random_nonzero(rng);
        KeyPair::from_sk(sk).expect("nonzero in-range scalar")
    }
}

/// sk * G; rejects the degenerate sk = 0.
pub fn derive_pubkey(sk: &Scalar) -> Result<AffinePoint, CurveError> {
    if sk.is_zero() {
        return Err(CurveError::DegenerateKey);
    }
    let p = scalar_mul(sk, &generator());
    debug_assert!(p.is_on_curve() && !p.infinity);
    Ok(p)
}
