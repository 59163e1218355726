//! Free groups and the Artin action of braids, used as an exact triviality
//! test: a braid is trivial iff its automorphism of `F_n` is the identity.
//!
//! σᵢ acts by `xᵢ -> xᵢ x_{i+1} xᵢ⁻¹`, `x_{i+1} -> xᵢ`, fixing the other
//! generators. With the word convention of [`crate::braid`], the automorphism
//! of `uv` is `φ_u ∘ φ_v`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::BraidError;

/// Cap on the length of any image word.
pub const DEFAULT_LETTER_CAP: usize = 1 << 24;

/// A freely reduced word; `+k` is `x_k`, `-k` is `x_k⁻¹` (1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn generator(k: usize) -> Self {
        FreeWord(vec![k as i32])
    }

    /// Reduce an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        FreeWord(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        FreeWord(out)
    }

    /// Cyclic reduction: strip `a ... a⁻¹` from the two ends.
    pub fn cyclically_reduced(&self) -> Self {
        let w = &self.0;
        let (mut i, mut j) = (0usize, w.len());
        while j > i + 1 && w[i] == -w[j - 1] {
            i += 1;
            j -= 1;
        }
        FreeWord(w[i..j].to_vec())
    }

    /// Least rotation of the cyclically reduced word; a complete invariant
    /// of the conjugacy class.
    pub fn conjugacy_canonical(&self) -> Self {
        let w = self.cyclically_reduced().0;
        if w.is_empty() {
            return FreeWord(w);
        }
        let n = w.len();
        let best = (0..n)
            .min_by(|&a, &b| {
                (0..n)
                    .map(|t| w[(a + t) % n])
                    .cmp((0..n).map(|t| w[(b + t) % n]))
            })
            .unwrap();
        FreeWord((0..n).map(|t| w[(best + t) % n]).collect())
    }

    /// Number of occurrences of `x_k^{±1}`.
    pub fn count(&self, k: usize) -> usize {
        self.0.iter().filter(|l| l.unsigned_abs() as usize == k).count()
    }
}

fn push_reduced(out: &mut Vec<i32>, l: i32) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("x{l}")
                } else {
                    format!("x{}^-1", -l)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

/// An endomorphism of `F_n` given by the images of the generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeGroupAutomorphism {
    images: Vec<FreeWord>,
}

impl FreeGroupAutomorphism {
    pub fn identity(rank: usize) -> Self {
        FreeGroupAutomorphism {
            images: (1..=rank).map(FreeWord::generator).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.0 == [i as i32 + 1])
    }

    /// Image of a word, freely reduced.
    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        let mut out = Vec::new();
        for &l in &w.0 {
            let img = &self.images[l.unsigned_abs() as usize - 1].0;
            if l > 0 {
                for &m in img {
                    push_reduced(&mut out, m);
                }
            } else {
                for &m in img.iter().rev() {
                    push_reduced(&mut out, -m);
                }
            }
        }
        FreeWord(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        FreeGroupAutomorphism {
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    fn total_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).sum()
    }
}

/// Image of `x_j` under a single generator σᵢ^±1 (letter is signed, 1-based).
fn generator_image(letter: i32, j: usize) -> Vec<i32> {
    let i = letter.unsigned_abs() as usize;
    let (xi, xi1) = (i as i32, i as i32 + 1);
    match (letter > 0, j) {
        (true, j) if j == i => vec![xi, xi1, -xi],
        (true, j) if j == i + 1 => vec![xi],
        (false, j) if j == i => vec![xi1],
        (false, j) if j == i + 1 => vec![-xi1, xi, xi1],
        _ => vec![j as i32],
    }
}

/// Automorphism of a single generator.
pub fn generator_automorphism(rank: usize, letter: i32) -> FreeGroupAutomorphism {
    FreeGroupAutomorphism {
        images: (1..=rank)
            .map(|j| FreeWord(generator_image(letter, j)))
            .collect(),
    }
}

/// The automorphism `φ_w` induced by a braid word, with images capped at
/// [`DEFAULT_LETTER_CAP`] letters in total.
pub fn artin_action(word: &BraidWord) -> Result<FreeGroupAutomorphism, BraidError> {
    artin_action_capped(word, DEFAULT_LETTER_CAP)
}

pub fn artin_action_capped(
    word: &BraidWord,
    cap: usize,
) -> Result<FreeGroupAutomorphism, BraidError> {
    let n = word.strands();
    let mut acc = FreeGroupAutomorphism::identity(n);
    // φ_{l1..lm} = φ_{l1} ∘ ... ∘ φ_{lm}; extend on the right so each step
    // only substitutes the short images of one generator.
    for &l in word.letters() {
        let images = (1..=n)
            .map(|j| acc.apply(&FreeWord(generator_image(l, j))))
            .collect();
        acc = FreeGroupAutomorphism { images };
        if acc.total_len() > cap {
            return Err(BraidError::Overflow(cap));
        }
    }
    Ok(acc)
}

/// `x_1 x_2 ... x_n`, fixed by every braid automorphism.
pub fn boundary_word(rank: usize) -> FreeWord {
    FreeWord((1..=rank as i32).collect())
}
