//! The reduced Burau representation over three coefficient rings: Laurent
//! polynomials (generic `q`), exact rationals (`q = q0`), and `Z/MZ`
//! (`q` sent to a unit).
//!
//! σᵢ acts on the standard basis by `e_{i-1} -> e_{i-1} + e_i`,
//! `e_i -> -q e_i`, `e_{i+1} -> q e_i + e_{i+1}`, so row `i` of its matrix is
//! `(.., 1, -q, q, ..)` and every other row is the identity. For four strands
//! this gives
//!
//! ```text
//! σ1: [-q q 0]   σ2: [1  0 0]   σ3: [1 0  0]
//!     [ 0 1 0]       [1 -q q]       [0 1  0]
//!     [ 0 0 1]       [0  0 1]       [0 1 -q]
//! ```
//!
//! Inverse generators use the symbolic inverse, whose row `i` is
//! `(.., q⁻¹, -q⁻¹, 1, ..)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

use crate::braid::BraidWord;
use crate::error::{BraidError, LaurentError};
use crate::laurent::LaurentPoly;
use crate::modular::{add_mod, mul_mod, sub_mod, ModPoint};

/// A commutative ring with a distinguished unit `q`.
pub trait BurauRing {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn q(&self) -> Self::Elem;
    fn q_inv(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }
}

/// `Z[q, q⁻¹]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Generic;

impl BurauRing for Generic {
    type Elem = LaurentPoly;
    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero()
    }
    fn one(&self) -> LaurentPoly {
        LaurentPoly::one()
    }
    fn q(&self) -> LaurentPoly {
        LaurentPoly::q()
    }
    fn q_inv(&self) -> LaurentPoly {
        LaurentPoly::monomial(1, -1)
    }
    fn add(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a + b
    }
    fn sub(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a - b
    }
    fn mul(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a * b
    }
    fn is_zero(&self, a: &LaurentPoly) -> bool {
        a.is_zero()
    }
}

/// `Q` with `q = q0`.
#[derive(Clone, Debug)]
pub struct RationalAt {
    q0: BigRational,
    q0_inv: BigRational,
}

impl RationalAt {
    pub fn new(q0: BigRational) -> Result<Self, LaurentError> {
        if q0.is_zero() {
            return Err(LaurentError::ZeroPoint);
        }
        Ok(RationalAt {
            q0_inv: q0.recip(),
            q0,
        })
    }

    pub fn integer(q0: i64) -> Result<Self, LaurentError> {
        Self::new(BigRational::from_integer(BigInt::from(q0)))
    }

    pub fn point(&self) -> &BigRational {
        &self.q0
    }
}

impl BurauRing for RationalAt {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn q(&self) -> BigRational {
        self.q0.clone()
    }
    fn q_inv(&self) -> BigRational {
        self.q0_inv.clone()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// `Z/MZ` with `q = q0`, a unit.
#[derive(Clone, Copy, Debug)]
pub struct ModularAt(pub ModPoint);

impl BurauRing for ModularAt {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0.modulus()
    }
    fn q(&self) -> u64 {
        self.0.q0()
    }
    fn q_inv(&self) -> u64 {
        self.0.q0_inv()
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.0.modulus())
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.0.modulus())
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0.modulus())
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Square matrix stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    size: usize,
    entries: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
        Matrix {
            size,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.size + col]
    }

    fn set(&mut self, row: usize, col: usize, v: T) {
        self.entries[row * self.size + col] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    /// Entrywise map into another ring.
    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|c| self.entries[r * self.size + c].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.entries.chunks(self.size.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

pub fn identity<R: BurauRing>(ring: &R, size: usize) -> Matrix<R::Elem> {
    let mut m = Matrix {
        size,
        entries: vec![ring.zero(); size * size],
    };
    for i in 0..size {
        m.set(i, i, ring.one());
    }
    m
}

pub fn mat_mul<R: BurauRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.size, b.size);
    let n = a.size;
    let mut out = vec![ring.zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a.entries[i * n + k];
            if ring.is_zero(aik) {
                continue;
            }
            for j in 0..n {
                let bkj = &b.entries[k * n + j];
                if ring.is_zero(bkj) {
                    continue;
                }
                let t = ring.mul(aik, bkj);
                out[i * n + j] = ring.add(&out[i * n + j], &t);
            }
        }
    }
    Matrix { size: n, entries: out }
}

/// Matrix of σᵢ^±1 (1-based `index`) in the reduced representation of
/// `B_strands`.
pub fn generator_matrix<R: BurauRing>(
    ring: &R,
    strands: usize,
    index: usize,
    inverse: bool,
) -> Matrix<R::Elem> {
    let size = strands - 1;
    let mut m = identity(ring, size);
    let i = index - 1;
    let (left, diag, right) = if inverse {
        (ring.q_inv(), ring.neg(&ring.q_inv()), ring.one())
    } else {
        (ring.one(), ring.neg(&ring.q()), ring.q())
    };
    if i > 0 {
        m.set(i, i - 1, left);
    }
    m.set(i, i, diag);
    if i + 1 < size {
        m.set(i, i + 1, right);
    }
    m
}

/// Left-multiply `acc` by the sparse generator matrix, touching one row.
fn apply_generator_left<R: BurauRing>(ring: &R, letter: i32, acc: &mut Matrix<R::Elem>) {
    let n = acc.size;
    let i = letter.unsigned_abs() as usize - 1;
    let (left, diag, right) = if letter < 0 {
        (ring.q_inv(), ring.neg(&ring.q_inv()), ring.one())
    } else {
        (ring.one(), ring.neg(&ring.q()), ring.q())
    };
    let mut new_row = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = ring.mul(&diag, acc.get(i, j));
        if i > 0 {
            v = ring.add(&v, &ring.mul(&left, acc.get(i - 1, j)));
        }
        if i + 1 < n {
            v = ring.add(&v, &ring.mul(&right, acc.get(i + 1, j)));
        }
        new_row.push(v);
    }
    for (j, v) in new_row.into_iter().enumerate() {
        acc.set(i, j, v);
    }
}

/// Burau matrix of a braid word: `M(l1 l2 ... lm) = M(l1) M(l2) ... M(lm)`.
pub fn burau<R: BurauRing>(ring: &R, word: &BraidWord) -> Matrix<R::Elem> {
    let mut acc = identity(ring, word.strands() - 1);
    for &l in word.letters().iter().rev() {
        apply_generator_left(ring, l, &mut acc);
    }
    acc
}

pub fn burau_generic(word: &BraidWord) -> Matrix<LaurentPoly> {
    burau(&Generic, word)
}

pub fn burau_rational(word: &BraidWord, q0: &BigRational) -> Result<Matrix<BigRational>, BraidError> {
    Ok(burau(&RationalAt::new(q0.clone())?, word))
}

pub fn burau_mod(word: &BraidWord, point: ModPoint) -> Matrix<u64> {
    burau(&ModularAt(point), word)
}

pub fn is_identity<R: BurauRing>(ring: &R, m: &Matrix<R::Elem>) -> bool {
    m == &identity(ring, m.size)
}

/// If `m = s I`, return `s`.
pub fn scalar_value<R: BurauRing>(ring: &R, m: &Matrix<R::Elem>) -> Option<R::Elem> {
    let s = m.get(0, 0).clone();
    for i in 0..m.size {
        for j in 0..m.size {
            let e = m.get(i, j);
            let ok = if i == j { *e == s } else { ring.is_zero(e) };
            if !ok {
                return None;
            }
        }
    }
    Some(s)
}

/// Determinant by cofactor expansion along the first row; the matrices here
/// are `(n-1) x (n-1)` for small `n`.
pub fn determinant<R: BurauRing>(ring: &R, m: &Matrix<R::Elem>) -> R::Elem {
    let cols: Vec<usize> = (0..m.size).collect();
    det_rec(ring, m, 0, &cols)
}

fn det_rec<R: BurauRing>(ring: &R, m: &Matrix<R::Elem>, row: usize, cols: &[usize]) -> R::Elem {
    if cols.is_empty() {
        return ring.one();
    }
    let mut acc = ring.zero();
    for (k, &c) in cols.iter().enumerate() {
        let e = m.get(row, c);
        if ring.is_zero(e) {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = ring.mul(e, &det_rec(ring, m, row + 1, &rest));
        acc = if k % 2 == 0 {
            ring.add(&acc, &term)
        } else {
            ring.sub(&acc, &term)
        };
    }
    acc
}

/// Exact predicates on a Burau image.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFacts<T> {
    pub is_identity: bool,
    pub scalar: Option<T>,
    pub det: T,
}

pub fn matrix_predicates<R: BurauRing>(ring: &R, m: &Matrix<R::Elem>) -> MatrixFacts<R::Elem> {
    MatrixFacts {
        is_identity: is_identity(ring, m),
        scalar: scalar_value(ring, m),
        det: determinant(ring, m),
    }
}

/// Evaluate a generic matrix at a rational point, entrywise.
pub fn specialize(m: &Matrix<LaurentPoly>, q0: &BigRational) -> Result<Matrix<BigRational>, LaurentError> {
    let rows = m
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|p| p.evaluate(q0)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows))
}
