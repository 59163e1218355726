//! Single-word arithmetic in `Z/MZ` used by the fast pairing filter.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::LaurentError;

/// The Mersenne prime `2^61 - 1`, the default filter modulus.
pub const MERSENNE_61: u64 = (1u64 << 61) - 1;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce_i64(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

/// An evaluation point `q -> q0` in `Z/MZ` with `q0` a unit.
///
/// The inverse of `q0` and its square are cached since the pairing
/// traversal steps the exponent by one or two in either direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ModPointRepr", into = "ModPointRepr")]
pub struct ModPoint {
    q0: u64,
    modulus: u64,
    q0_inv: u64,
}

impl ModPoint {
    pub fn new(q0: u64, modulus: u64) -> Result<Self, LaurentError> {
        if modulus == 0 {
            return Err(LaurentError::NonUnit { q0, modulus });
        }
        let q0 = q0 % modulus;
        let q0_inv = inv_mod(q0, modulus).ok_or(LaurentError::NonUnit { q0, modulus })?;
        Ok(ModPoint {
            q0,
            modulus,
            q0_inv,
        })
    }

    /// Build the point from a signed representative of `q0`.
    pub fn from_signed(q0: i64, modulus: u64) -> Result<Self, LaurentError> {
        if modulus == 0 {
            return Err(LaurentError::NonUnit { q0: 0, modulus });
        }
        Self::new(reduce_i64(q0, modulus), modulus)
    }

    pub fn q0(&self) -> u64 {
        self.q0
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn q0_inv(&self) -> u64 {
        self.q0_inv
    }

    /// The point `1/q0` with the same modulus.
    pub fn reciprocal(&self) -> ModPoint {
        ModPoint {
            q0: self.q0_inv,
            modulus: self.modulus,
            q0_inv: self.q0,
        }
    }

    /// `q0^e` for any integer exponent.
    pub fn power(&self, e: i64) -> u64 {
        if e >= 0 {
            pow_mod(self.q0, e as u64, self.modulus)
        } else {
            pow_mod(self.q0_inv, e.unsigned_abs(), self.modulus)
        }
    }
}

impl fmt::Display for ModPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.q0, self.modulus)
    }
}

impl FromStr for ModPoint {
    type Err = LaurentError;

    /// Parses `q0:M`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LaurentError::Parse(format!("expected q0:M, got {s:?}"));
        let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
        let q0: i64 = a.trim().parse().map_err(|_| bad())?;
        let m: u64 = b.trim().parse().map_err(|_| bad())?;
        ModPoint::from_signed(q0, m)
    }
}

#[derive(Serialize, Deserialize)]
struct ModPointRepr {
    q0: String,
    modulus: String,
}

impl From<ModPoint> for ModPointRepr {
    fn from(p: ModPoint) -> Self {
        ModPointRepr {
            q0: p.q0.to_string(),
            modulus: p.modulus.to_string(),
        }
    }
}

impl TryFrom<ModPointRepr> for ModPoint {
    type Error = String;

    fn try_from(r: ModPointRepr) -> Result<Self, Self::Error> {
        let q0: u64 = r.q0.parse().map_err(|e| format!("bad q0: {e}"))?;
        let m: u64 = r.modulus.parse().map_err(|e| format!("bad modulus: {e}"))?;
        ModPoint::new(q0, m).map_err(|e| e.to_string())
    }
}
