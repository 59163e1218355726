//! Integer Laurent polynomials in one variable `q`.
//!
//! Storage is dense over `[min_deg, max_deg]` and every constructor trims,
//! so two equal polynomials always have identical representations. The zero
//! polynomial is `min_deg = 0` with no coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::LaurentError;
use crate::modular::{add_mod, mul_mod, ModPoint};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    min_deg: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        Self::new(exp, vec![coeff.into()])
    }

    /// Build from `coeffs[i]` = coefficient of `q^(min_deg + i)`, trimming zeros.
    pub fn new(min_deg: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { min_deg, coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(min_deg: i64, coeffs: &[i64]) -> Self {
        Self::new(min_deg, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Sum of `sign * q^exp` terms.
    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let terms: Vec<(i64, i64)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.1).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.1).max().unwrap();
        let mut dense = vec![0i64; (hi - lo + 1) as usize];
        for (c, e) in terms {
            dense[(e - lo) as usize] += c;
        }
        Self::from_i64s(lo, &dense)
    }

    fn trim(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.min_deg = 0;
            }
            Some(i) => {
                if i > 0 {
                    self.coeffs.drain(..i);
                    self.min_deg += i as i64;
                }
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.min_deg == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn min_deg(&self) -> i64 {
        self.min_deg
    }

    /// Highest exponent; equals `min_deg` for monomials, 0 for zero.
    pub fn max_deg(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.min_deg + self.coeffs.len() as i64 - 1
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        let i = exp - self.min_deg;
        if i < 0 || i as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// `±q^s` for some `s`.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].abs().is_one()
    }

    /// If this is `c * q^s`, return `(c, s)`.
    pub fn as_monomial(&self) -> Option<(&BigInt, i64)> {
        (self.coeffs.len() == 1).then(|| (&self.coeffs[0], self.min_deg))
    }

    /// Multiply by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            min_deg: self.min_deg + s,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.min_deg, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `P(1/q)`.
    pub fn mirror(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly {
            min_deg: -self.max_deg(),
            coeffs,
        }
    }

    /// Canonical representative of the `±q^s` orbit: lowest exponent 0 and
    /// positive constant term.
    pub fn normalize(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let sign_flip = self.coeffs[0].is_negative();
        LaurentPoly {
            min_deg: 0,
            coeffs: if sign_flip {
                self.coeffs.iter().map(|c| -c).collect()
            } else {
                self.coeffs.clone()
            },
        }
    }

    /// Canonical representative of the orbit under `±q^s` and `q <-> 1/q`.
    pub fn normalize_with_mirror(&self) -> Self {
        let a = self.normalize();
        let b = self.mirror().normalize();
        if a.coeffs <= b.coeffs {
            a
        } else {
            b
        }
    }

    /// Equality up to `±q^s`.
    pub fn associated(&self, other: &Self) -> bool {
        self.normalize() == other.normalize()
    }

    /// Sum of coefficients, i.e. `P(1)`.
    pub fn value_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// `P(-1)`.
    pub fn value_at_minus_one(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if (self.min_deg + i as i64).rem_euclid(2) == 0 {
                acc += c;
            } else {
                acc -= c;
            }
        }
        acc
    }

    /// Exact value at a nonzero rational point.
    ///
    /// Computed as `r^d * N / s^(d + D)` with `N = sum c_i r^i s^(D-i)` so that
    /// all intermediate arithmetic stays in integers.
    pub fn evaluate(&self, point: &BigRational) -> Result<BigRational, LaurentError> {
        if point.is_zero() {
            return Err(LaurentError::ZeroPoint);
        }
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let (r, s) = (point.numer(), point.denom());
        let numer = self.homogenized_numerator(r, s);
        let top = self.coeffs.len() as i64 - 1;
        let mut value = BigRational::new(numer, pow_big(s, top as u64));
        value *= rational_pow(point, self.min_deg);
        Ok(value)
    }

    /// `sum c_i r^i s^(D-i)`, zero exactly when `P(r/s) = 0`.
    fn homogenized_numerator(&self, r: &BigInt, s: &BigInt) -> BigInt {
        let mut h = BigInt::zero();
        let mut s_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            h = h * r + c * &s_pow;
            s_pow *= s;
        }
        h
    }

    pub fn is_root(&self, point: &BigRational) -> bool {
        !point.is_zero()
            && (self.is_zero() || self.homogenized_numerator(point.numer(), point.denom()).is_zero())
    }

    /// Image under `q -> q0` in `Z/MZ`.
    pub fn eval_mod(&self, point: &ModPoint) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let m = point.modulus();
        let big_m = BigInt::from(m);
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            let cm = c.mod_floor(&big_m).to_u64().unwrap();
            acc = add_mod(mul_mod(acc, point.q0(), m), cm, m);
        }
        mul_mod(acc, point.power(self.min_deg), m)
    }

    /// All rational roots, by the rational root theorem on the normalized
    /// polynomial.
    pub fn rational_roots(&self) -> Result<RootSet, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        let p = self.normalize();
        let constant = p.coeffs[0].abs();
        let leading = p.coeffs.last().unwrap().abs();
        let nums = divisors(&constant)?;
        let dens = divisors(&leading)?;
        let mut roots = BTreeSet::new();
        for a in &nums {
            for b in &dens {
                if !a.gcd(b).is_one() {
                    continue;
                }
                for sign in [1i32, -1] {
                    let x = BigRational::new(BigInt::from(sign) * a, b.clone());
                    if p.is_root(&x) {
                        roots.insert(x);
                    }
                }
            }
        }
        let reciprocal_pairs = roots
            .iter()
            .filter(|x| x.abs() != BigRational::one() && roots.contains(&x.recip()))
            .cloned()
            .collect();
        Ok(RootSet {
            roots,
            reciprocal_pairs,
        })
    }

    fn binop(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        if self.is_zero() && other.is_zero() {
            return Self::zero();
        }
        let lo = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.min_deg,
            (_, true) => self.min_deg,
            _ => self.min_deg.min(other.min_deg),
        };
        let hi = self.max_deg().max(other.max_deg());
        let zero = BigInt::zero();
        let coeffs = (lo..=hi)
            .map(|e| {
                let a = self.coeff_ref(e).unwrap_or(&zero);
                let b = other.coeff_ref(e).unwrap_or(&zero);
                f(a, b)
            })
            .collect();
        Self::new(lo, coeffs)
    }

    fn coeff_ref(&self, exp: i64) -> Option<&BigInt> {
        let i = exp - self.min_deg;
        if i < 0 {
            None
        } else {
            self.coeffs.get(i as usize)
        }
    }
}

fn pow_big(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}

fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Positive divisors of `n > 0` by trial division.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>, LaurentError> {
    let v = n
        .to_u64()
        .filter(|&v| v < (1u64 << 48))
        .ok_or_else(|| LaurentError::CoefficientTooLarge(n.to_string()))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            small.push(d);
            if d != v / d {
                large.push(v / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small.into_iter().map(BigInt::from).collect())
}

/// Rational roots of a polynomial, with the subset closed under `x -> 1/x`
/// that excludes the roots of unity `±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    pub roots: BTreeSet<BigRational>,
    pub reciprocal_pairs: BTreeSet<BigRational>,
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.binop(rhs, |a, b| a + b)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.binop(rhs, |a, b| a - b)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            min_deg: self.min_deg,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.min_deg + rhs.min_deg, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.min_deg + i as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let show_coeff = e == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Wire form `{"min_deg": d, "coeffs": [c0, c1, ...]}`; coefficients that do
/// not fit in an `i64` are written as decimal strings.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    min_deg: i64,
    coeffs: Vec<serde_json::Value>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect();
        PolyRepr {
            min_deg: self.min_deg,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .into_iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| D::Error::custom("non-integer coefficient")),
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| D::Error::custom(e.to_string())),
                _ => Err(D::Error::custom("coefficient must be a number or string")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = LaurentPoly::new(repr.min_deg, coeffs.clone());
        if p.coeffs != coeffs || (p.is_zero() && repr.min_deg != 0) {
            return Err(D::Error::custom("polynomial is not canonically trimmed"));
        }
        Ok(p)
    }
}

/// Accumulates `sum eps_i q^(a_i)` into a dense machine-word histogram.
///
/// Used by the pairing where the exponent span and the coefficients are
/// bounded by the crossing count.
#[derive(Clone, Debug, Default)]
pub struct TermAccumulator {
    offset: i64,
    dense: Vec<i64>,
}

impl TermAccumulator {
    pub fn with_span(lo: i64, hi: i64) -> Self {
        TermAccumulator {
            offset: lo,
            dense: vec![0; (hi - lo + 1).max(0) as usize],
        }
    }

    #[inline]
    pub fn push(&mut self, sign: i64, exp: i64) {
        let i = exp - self.offset;
        if i < 0 {
            let grow = (-i) as usize;
            let mut v = vec![0; grow];
            v.append(&mut self.dense);
            self.dense = v;
            self.offset = exp;
        } else if i as usize >= self.dense.len() {
            self.dense.resize(i as usize + 1, 0);
        }
        self.dense[(exp - self.offset) as usize] += sign;
    }

    pub fn finish(&self) -> LaurentPoly {
        LaurentPoly::from_i64s(self.offset, &self.dense)
    }
}
