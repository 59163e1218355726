//! Braid words over the Artin generators.
//!
//! A word is read left to right but acts right to left: the word `uv`
//! applies `v` first. Everything downstream (Burau products, the free group
//! action, conjugators) follows this convention, so the matrix of `uv` is
//! `M(u) * M(v)`.
//!
//! Two text syntaxes are accepted. Letter syntax uses `a = σ1`, `b = σ2`,
//! `c = σ3`, ... with uppercase for inverses and optional `^k` exponents.
//! Numeric syntax is whitespace-separated signed generator indices, e.g.
//! `"1 -2 3"`. On top of both, [`parse_expr`] understands parentheses,
//! commutator brackets `[x, y] = x y x⁻¹ y⁻¹` and named definitions.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::error::BraidError;

/// Signed generator: `+i` is σᵢ, `-i` is σᵢ⁻¹ (1-based).
pub type Letter = i32;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> Self {
        BraidWord {
            strands,
            letters: Vec::new(),
        }
    }

    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        for &l in &letters {
            let index = l.unsigned_abs() as usize;
            if l == 0 || index >= strands {
                return Err(BraidError::IndexOutOfRange { index, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Single generator σᵢ^sign.
    pub fn generator(strands: usize, index: usize, inverse: bool) -> Result<Self, BraidError> {
        let l = index as Letter;
        Self::new(strands, vec![if inverse { -l } else { l }])
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    fn check(&self, other: &Self) -> Result<(), BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        Ok(())
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self, BraidError> {
        self.check(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    pub fn inverse(&self) -> Self {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// `self^k`, with negative powers taken of the inverse.
    pub fn power(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord {
            strands: self.strands,
            letters,
        }
    }

    /// `w x w⁻¹`.
    pub fn conjugate(w: &Self, x: &Self) -> Result<Self, BraidError> {
        w.compose(x)?.compose(&w.inverse())
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Self, y: &Self) -> Result<Self, BraidError> {
        x.compose(y)?.compose(&x.inverse())?.compose(&y.inverse())
    }

    /// Cancel adjacent `σᵢ^ε σᵢ^-ε` pairs until none remain.
    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        BraidWord {
            strands: self.strands,
            letters: out,
        }
    }

    /// Image of each strand position under the underlying permutation;
    /// `perm[i]` is where the puncture at position `i` ends up.
    pub fn permutation(&self) -> Vec<usize> {
        let mut pos: Vec<usize> = (0..self.strands).collect();
        // rightmost letter acts first
        for &l in self.letters.iter().rev() {
            let i = l.unsigned_abs() as usize - 1;
            for p in pos.iter_mut() {
                if *p == i {
                    *p = i + 1;
                } else if *p == i + 1 {
                    *p = i;
                }
            }
        }
        pos
    }

    /// Whitespace-separated signed indices.
    pub fn to_numeric(&self) -> String {
        self.letters
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Same word on more strands.
    pub fn widen(&self, strands: usize) -> Result<Self, BraidError> {
        Self::new(strands, self.letters.clone())
    }
}

impl fmt::Display for BraidWord {
    /// Letter syntax with runs collapsed: `a^-3 b^-2 c ...` prints as
    /// `A^3 B^2 c`. Falls back to numeric syntax past 26 generators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        if self.strands > 27 {
            return write!(f, "{}", self.to_numeric());
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let ch = (b'a' + (l.unsigned_abs() as u8 - 1)) as char;
            let ch = if l < 0 { ch.to_ascii_uppercase() } else { ch };
            if j - i > 1 {
                parts.push(format!("{ch}^{}", j - i));
            } else {
                parts.push(ch.to_string());
            }
            i = j;
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BraidWord[{}]({self})", self.strands)
    }
}

/// Parse a braid word in letter or numeric syntax.
pub fn parse_word(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
    parse_expr(text, strands, &HashMap::new())
}

/// Parse a braid expression with products, powers, parentheses,
/// commutators and named sub-words.
///
/// A run of letters that matches a key of `defs` is replaced by its word;
/// any other run is read letter by letter as generators.
pub fn parse_expr(
    text: &str,
    strands: usize,
    defs: &HashMap<String, BraidWord>,
) -> Result<BraidWord, BraidError> {
    if strands < 2 {
        return Err(BraidError::TooFewStrands(strands));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        strands,
        defs,
    };
    let w = p.product(&[])?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    strands: usize,
    defs: &'a HashMap<String, BraidWord>,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> BraidError {
        BraidError::BadSyntax(format!("{what} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn product(&mut self, stops: &[u8]) -> Result<BraidWord, BraidError> {
        let mut acc = BraidWord::identity(self.strands);
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(c) if stops.contains(&c) => break,
                Some(_) => {
                    let t = self.factor()?;
                    acc.letters.extend_from_slice(&t.letters);
                }
            }
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Option<i64>, BraidError> {
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            self.pos = save;
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        self.integer().map(Some)
    }

    fn integer(&mut self) -> Result<i64, BraidError> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<i64>().map_err(|_| self.err("expected integer"))
    }

    fn factor(&mut self) -> Result<BraidWord, BraidError> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.product(b")")?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                w
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.product(b",")?;
                if self.peek() != Some(b',') {
                    return Err(self.err("expected ','"));
                }
                self.pos += 1;
                let y = self.product(b"]")?;
                if self.peek() != Some(b']') {
                    return Err(self.err("expected ']'"));
                }
                self.pos += 1;
                BraidWord::commutator(&x, &y)?
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' => {
                let v = self.integer()?;
                let index = v.unsigned_abs() as usize;
                if v == 0 || index >= self.strands {
                    return Err(BraidError::IndexOutOfRange {
                        index,
                        strands: self.strands,
                    });
                }
                BraidWord::new(self.strands, vec![v as Letter])?
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => return self.letter_run(),
            Some(_) => return Err(self.err("unexpected character")),
            None => return Err(self.err("unexpected end")),
        };
        Ok(match self.exponent()? {
            Some(k) => base.power(k),
            None => base,
        })
    }

    /// A maximal run of identifier characters. A defined name is
    /// substituted whole and may carry an exponent; otherwise the run is a
    /// sequence of generator letters, and an exponent binds to the last one.
    fn letter_run(&mut self) -> Result<BraidWord, BraidError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            // digits only continue a name, never start one
            self.pos += 1;
        }
        let run = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(w) = self.defs.get(run) {
            if w.strands != self.strands {
                return Err(BraidError::StrandMismatch(w.strands, self.strands));
            }
            let w = w.clone();
            return Ok(match self.exponent()? {
                Some(k) => w.power(k),
                None => w,
            });
        }
        if !run.bytes().all(|c| c.is_ascii_alphabetic()) {
            self.pos = start;
            return Err(self.err(&format!("unknown name {run:?}")));
        }
        let mut letters = Vec::with_capacity(run.len());
        for c in run.bytes() {
            let index = (c.to_ascii_lowercase() - b'a') as usize + 1;
            if index >= self.strands {
                return Err(BraidError::IndexOutOfRange {
                    index,
                    strands: self.strands,
                });
            }
            let l = index as Letter;
            letters.push(if c.is_ascii_uppercase() { -l } else { l });
        }
        let mut w = BraidWord::new(self.strands, letters)?;
        if let Some(k) = self.exponent()? {
            let last = w.letters.pop().unwrap();
            let single = BraidWord::new(self.strands, vec![last])?;
            w.letters.extend_from_slice(&single.power(k).letters);
        }
        Ok(w)
    }
}

/// The word ψ used to build the explicit kernel element at `q = 2`.
pub const PSI: &str = "a^-3 b^-2 c^-1 b c^4 b^-1 c b a b c^2 b a^-1 b^-1 c^-2";

/// `[(ba)^3, ψ⁻¹ b ψ]` on four strands.
pub fn q2_kernel_braid() -> BraidWord {
    let mut defs = HashMap::new();
    defs.insert("psi".to_string(), parse_word(PSI, 4).unwrap());
    parse_expr("[(ba)^3, psi^-1 b psi]", 4, &defs).unwrap()
}
