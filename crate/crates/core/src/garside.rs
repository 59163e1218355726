//! Garside left normal form in `B_n`, used as an exact triviality oracle.
//!
//! A braid is written `Δ^p · s_1 ⋯ s_r` with each `s_i` a simple braid,
//! stored as its permutation in one-line notation (0-based). Composition is
//! `(π∘ρ)(j) = π(ρ(j))`, and the word `σ_i σ_j` maps to `s_i ∘ s_j`.

use crate::braid::BraidWord;
use crate::error::BraidError;

type Perm = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub strands: usize,
    pub delta_power: i64,
    pub factors: Vec<Vec<usize>>,
}

impl NormalForm {
    pub fn is_identity(&self) -> bool {
        self.delta_power == 0 && self.factors.is_empty()
    }

    /// Canonical length: number of non-Δ simple factors.
    pub fn canonical_length(&self) -> usize {
        self.factors.len()
    }
}

fn identity(n: usize) -> Perm {
    (0..n).collect()
}


/// `π ∘ s_i` (0-based `i` swaps positions `i`, `i+1`).
fn right_mul(a: &mut Perm, i: usize) {
    a.swap(i, i + 1);
}

/// `s_i ∘ π`.
fn left_mul(a: &mut Perm, i: usize) {
    for v in a.iter_mut() {
        if *v == i {
            *v = i + 1;
        } else if *v == i + 1 {
            *v = i;
        }
    }
}

/// `ℓ(π ∘ s_i) < ℓ(π)`: the braid ends with `σ_i`.
fn finishes_with(a: &Perm, i: usize) -> bool {
    a[i] > a[i + 1]
}

/// `ℓ(s_i ∘ π) < ℓ(π)`: the braid starts with `σ_i`.
fn starts_with(a: &Perm, i: usize) -> bool {
    let pos = |v: usize| a.iter().position(|&x| x == v).unwrap();
    pos(i) > pos(i + 1)
}

fn delta(n: usize) -> Perm {
    (0..n).rev().collect()
}

/// `Δ π Δ⁻¹`, i.e. `σ_i ↦ σ_{n-i}`.
fn flip(a: &Perm) -> Perm {
    let n = a.len();
    a.iter().rev().map(|&v| n - 1 - v).collect()
}

/// Make `(a, b)` left-weighted: move every starting generator of `b` that
/// `a` can absorb.
fn weight_pair(a: &mut Perm, b: &mut Perm) -> bool {
    let mut changed = false;
    loop {
        let n = a.len();
        let Some(i) = (0..n - 1).find(|&i| starts_with(b, i) && !finishes_with(a, i)) else {
            return changed;
        };
        right_mul(a, i);
        left_mul(b, i);
        changed = true;
    }
}

pub fn left_normal_form(word: &BraidWord) -> NormalForm {
    let n = word.strands();
    let id = identity(n);
    let d = delta(n);
    let mut power = 0i64;
    let mut factors: Vec<Perm> = Vec::new();
    for &l in word.letters() {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            let mut s = id.clone();
            right_mul(&mut s, i);
            factors.push(s);
        } else {
            // σ_i⁻¹ = Δ⁻¹ (Δ σ_i⁻¹), then slide Δ⁻¹ to the front
            power -= 1;
            for f in factors.iter_mut() {
                *f = flip(f);
            }
            let mut s = d.clone();
            right_mul(&mut s, i);
            factors.push(s);
        }
    }
    // bubble until every adjacent pair is left-weighted
    loop {
        let mut changed = false;
        for j in (0..factors.len().saturating_sub(1)).rev() {
            let (lo, hi) = factors.split_at_mut(j + 1);
            changed |= weight_pair(&mut lo[j], &mut hi[0]);
        }
        if !changed {
            break;
        }
    }
    let lead = factors.iter().take_while(|f| **f == d).count();
    let mut factors: Vec<Perm> = factors.split_off(lead);
    power += lead as i64;
    while factors.last() == Some(&id) {
        factors.pop();
    }
    debug_assert!(factors.iter().all(|f| *f != id && *f != d));
    NormalForm { strands: n, delta_power: power, factors }
}

/// Exact word problem: `w` represents the trivial braid.
pub fn is_trivial_braid(word: &BraidWord) -> bool {
    left_normal_form(word).is_identity()
}

/// `u` and `v` represent the same braid.
pub fn braids_equal(u: &BraidWord, v: &BraidWord) -> Result<bool, BraidError> {
    Ok(is_trivial_braid(&u.compose(&v.inverse())?))
}
