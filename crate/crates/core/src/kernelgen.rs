//! From pairing hits to explicit braid words.
//!
//! An arc between two punctures is stored as the conjugacy class of the
//! boundary of its regular neighbourhood, a cyclic word `x_a W x_b W⁻¹` in
//! the free group. Generator `x_j` loops counterclockwise around `p_j`; the
//! ray dual to `x_j` leaves `p_j` towards `N`, then runs west to the
//! boundary (`p_n`'s ray rises towards `N` first). Crossing a ray
//! downwards reads `x_j`, upwards `x_j⁻¹`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::burau::{burau_generic, burau_rational, is_identity, Generic, RationalAt};
use crate::error::{BraidError, ForkError, KernelError};
use crate::forkpair::{build_diagram, CurveDiagram, ForkSpec, LowerFeature, UpperFeature};
use crate::freegroup::{artin_action_capped, generator_automorphism, FreeWord};
use crate::garside;

/// Isotopy class of an arc joining two distinct punctures.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcCoords {
    rank: usize,
    curve: FreeWord,
}

impl ArcCoords {
    /// From any word conjugate to the boundary curve, either orientation.
    pub fn from_curve(rank: usize, word: &FreeWord) -> Self {
        let a = word.conjugacy_canonical();
        let b = word.inverse().conjugacy_canonical();
        ArcCoords {
            rank,
            curve: a.min(b),
        }
    }

    /// The arc `p_a p_b` read off a path word `W`: boundary `x_a W x_b W⁻¹`.
    pub fn from_path(rank: usize, a: usize, path: &FreeWord, b: usize) -> Self {
        let w = FreeWord::generator(a)
            .concat(path)
            .concat(&FreeWord::generator(b))
            .concat(&path.inverse());
        Self::from_curve(rank, &w)
    }

    /// The straight arc `p_i p_{i+1}`.
    pub fn standard(rank: usize, i: usize) -> Self {
        Self::from_path(rank, i, &FreeWord::empty(), i + 1)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn curve(&self) -> &FreeWord {
        &self.curve
    }

    /// Endpoint punctures: the generators with non-zero exponent sum.
    pub fn ends(&self) -> (usize, usize) {
        let mut sums = vec![0i64; self.rank + 1];
        for &l in self.curve.letters() {
            sums[l.unsigned_abs() as usize] += l.signum() as i64;
        }
        let e: Vec<usize> = (1..=self.rank).filter(|&j| sums[j] != 0).collect();
        (e[0], e[1])
    }

    /// Letters per generator: intersections of the reduced curve with each ray.
    pub fn intersections(&self) -> Vec<usize> {
        (1..=self.rank).map(|j| self.curve.count(j)).collect()
    }

    pub fn complexity(&self) -> usize {
        self.curve.len()
    }

    /// `Some(i)` when this is the straight arc `p_i p_{i+1}`.
    pub fn standard_index(&self) -> Option<usize> {
        if self.complexity() != 2 {
            return None;
        }
        let (a, b) = self.ends();
        (b == a + 1 && *self == Self::standard(self.rank, a)).then_some(a)
    }

    /// Image under a single generator `σ_i^±1`.
    fn apply_letter(&self, letter: i32) -> Self {
        let phi = generator_automorphism(self.rank, letter);
        Self::from_curve(self.rank, &phi.apply(&self.curve))
    }
}

/// Image of an arc under `φ_w` (the rightmost letter acts first).
pub fn coords_action(word: &BraidWord, c: &ArcCoords) -> ArcCoords {
    word.letters()
        .iter()
        .rev()
        .fold(c.clone(), |acc, &l| acc.apply_letter(l))
}

/// Horizontal ray positions, in doubled crossing coordinates, for the upper
/// punctures `p_1 .. p_{n-1}`.
fn upper_puncture_x(d: &CurveDiagram) -> Vec<i64> {
    let spec = &d.spec;
    let c = spec.counts();
    let mut xs = Vec::new();
    let mut pos = 0i64;
    let mut around = |m: u64, p: usize, pos: &mut i64| {
        *pos += m as i64;
        if spec.has_end(p) {
            xs.push(2 * *pos);
            *pos += 1;
        } else {
            xs.push(2 * *pos - 1);
        }
        *pos += m as i64;
    };
    if spec.n() == 4 {
        pos += c[3] as i64;
        around(c[0], 1, &mut pos);
        around(c[1], 2, &mut pos);
        pos += c[3] as i64;
        around(c[2], 3, &mut pos);
    } else {
        around(c[0], 1, &mut pos);
        around(c[1], 2, &mut pos);
    }
    xs
}

/// The arc of a standard-form tine edge.
///
/// For the all-zero specs the arc stays above `N` and passes over any
/// puncture between its ends.
pub fn arc_of_spec(spec: &ForkSpec) -> Result<ArcCoords, ForkError> {
    let n = spec.n();
    let (a, b) = spec.ends();
    let d = build_diagram(spec)?;
    if d.k == 0 {
        return Ok(ArcCoords::from_path(n, a, &FreeWord::empty(), b));
    }
    let xs = upper_puncture_x(&d);
    let up = (n - 1) as i32;
    // a vertical passage at doubled x, going down or up, through the rays of
    // every upper puncture to its right
    let leg = |x: i64, down: bool, out: &mut Vec<i32>| {
        if down {
            out.extend((1..=up).filter(|&j| xs[j as usize - 1] > x));
        } else {
            out.extend((1..=up).rev().filter(|&j| xs[j as usize - 1] > x).map(|j| -j));
        }
    };
    let mut path = Vec::new();
    let first = d.traversal[0].position;
    leg(2 * first as i64, true, &mut path);
    for pair in d.traversal.windows(2) {
        let (u, v) = (pair[0].position, pair[1].position);
        let below = matches!(d.crossings[u].lower, LowerFeature::Arc { partner, .. } if partner == v)
            && pair[0].sign < 0;
        if below {
            // only the left leg of a lower arc meets p_n's ray
            path.push(if v > u { n as i32 } else { -(n as i32) });
        } else {
            leg(2 * u as i64, false, &mut path);
            leg(2 * v as i64, true, &mut path);
        }
    }
    let last = d.traversal.last().unwrap().position;
    if let UpperFeature::Terminal(_) = d.crossings[last].upper {
        if d.traversal.len() % 2 == 0 {
            leg(2 * last as i64, false, &mut path);
        }
    }
    Ok(ArcCoords::from_path(n, a, &FreeWord::from_letters(path), b))
}

/// `(σ_1 ⋯ σ_{m-1})^m` on `n` strands: the full twist on the first `m`.
pub fn full_twist_word(n: usize, m: usize) -> Result<BraidWord, KernelError> {
    if m < 2 || m > n {
        return Err(KernelError::BadRange { m, n });
    }
    let cycle: Vec<i32> = (1..m as i32).collect();
    Ok(BraidWord::new(n, cycle.repeat(m))?)
}

pub const DEFAULT_PLATEAU_BUDGET: usize = 10_000;

/// A conjugator `w` with `coords_action(w, standard(i)) = target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synthesis {
    #[serde(with = "word_text")]
    pub word: BraidWord,
    /// Index `i` of the straight arc `p_i p_{i+1}` that `word` moves onto the target.
    pub standard: usize,
    pub moves: usize,
}

/// Greedy complexity descent from `target` to a straight adjacent arc, with a
/// breadth-first plateau search of at most `budget` states whenever no single
/// generator lowers the complexity.
pub fn synthesize_from_coords(target: &ArcCoords, budget: usize) -> Result<Synthesis, KernelError> {
    let n = target.rank();
    let letters: Vec<i32> = (1..n as i32).flat_map(|i| [i, -i]).collect();
    let mut cur = target.clone();
    let mut moves: Vec<i32> = Vec::new();
    let standard = loop {
        if let Some(i) = cur.standard_index() {
            break i;
        }
        let best = letters
            .iter()
            .map(|&l| (cur.apply_letter(l), l))
            .min_by_key(|(c, _)| c.complexity())
            .unwrap();
        if best.0.complexity() < cur.complexity() {
            cur = best.0;
            moves.push(best.1);
            continue;
        }
        let (next, path) = plateau(&cur, &letters, budget).ok_or(KernelError::Unreachable {
            budget,
            complexity: cur.complexity(),
        })?;
        cur = next;
        moves.extend(path);
    };
    // std = φ_{m_t} ∘ ... ∘ φ_{m_1}(target), so target = φ_w(std) with
    // w = m_1⁻¹ m_2⁻¹ ... m_t⁻¹
    let word = BraidWord::new(n, moves.iter().map(|l| -l).collect())?;
    debug_assert_eq!(coords_action(&word, &ArcCoords::standard(n, standard)), *target);
    Ok(Synthesis {
        word,
        standard,
        moves: moves.len(),
    })
}

/// Breadth-first search for a state of lower complexity, or a straight arc.
fn plateau(start: &ArcCoords, letters: &[i32], budget: usize) -> Option<(ArcCoords, Vec<i32>)> {
    let goal = start.complexity();
    let mut seen: HashSet<ArcCoords> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start.clone(), Vec::new())]);
    while let Some((c, path)) = queue.pop_front() {
        for &l in letters {
            let next = c.apply_letter(l);
            if !seen.insert(next.clone()) {
                continue;
            }
            let mut p = path.clone();
            p.push(l);
            if next.complexity() < goal || next.standard_index().is_some() {
                return Some((next, p));
            }
            if seen.len() > budget {
                return None;
            }
            queue.push_back((next, p));
        }
    }
    None
}

pub fn synthesize_conjugator(target: &ForkSpec) -> Result<Synthesis, KernelError> {
    let arc = arc_of_spec(target)?;
    let s = synthesize_from_coords(&arc, DEFAULT_PLATEAU_BUDGET)?;
    if coords_action(&s.word, &ArcCoords::standard(arc.rank(), s.standard)) != arc {
        return Err(KernelError::Unreachable {
            budget: DEFAULT_PLATEAU_BUDGET,
            complexity: arc.complexity(),
        });
    }
    Ok(s)
}

/// Outcome of the braid-level triviality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtinMethod {
    /// Free-group images expanded in full.
    Expansion,
    /// Images too long to expand; decided by the Garside normal form.
    NormalForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinCheck {
    pub trivial: bool,
    pub method: ArtinMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub artin: ArtinCheck,
    /// Generic Burau image is the identity.
    pub generic: bool,
    /// Burau image at each target is the identity, keyed by `q0`.
    pub per_q0: BTreeMap<String, bool>,
    pub exponent_sum: i64,
}

impl Checks {
    /// Non-trivial braid with identity Burau image at `q0`.
    pub fn kernel_at(&self, q0: &BigRational) -> bool {
        !self.artin.trivial && self.per_q0.get(&q0.to_string()) == Some(&true)
    }

    /// Non-trivial braid with identity generic Burau image.
    pub fn generic_kernel(&self) -> bool {
        !self.artin.trivial && self.generic
    }
}

const EXPANSION_CAP: usize = 1 << 16;

pub fn verify_candidate(word: &BraidWord, targets: &[BigRational]) -> Result<Checks, KernelError> {
    let artin = match artin_action_capped(word, EXPANSION_CAP) {
        Ok(phi) => ArtinCheck {
            trivial: phi.is_identity(),
            method: ArtinMethod::Expansion,
        },
        Err(BraidError::Overflow(_)) => ArtinCheck {
            trivial: garside::is_trivial_braid(word),
            method: ArtinMethod::NormalForm,
        },
        Err(e) => return Err(e.into()),
    };
    let generic = is_identity(&Generic, &burau_generic(word));
    let mut per_q0 = BTreeMap::new();
    for q0 in targets {
        let m = burau_rational(word, q0)?;
        let ring = RationalAt::new(q0.clone())?;
        per_q0.insert(q0.to_string(), is_identity(&ring, &m));
    }
    Ok(Checks {
        artin,
        generic,
        per_q0,
        exponent_sum: word.exponent_sum(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: Option<ForkSpec>,
    pub recipe: String,
    pub twist_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_word_text")]
    pub conjugator: Option<BraidWord>,
    pub standard_arc: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCandidate {
    #[serde(with = "word_text")]
    pub word: BraidWord,
    pub provenance: Provenance,
    pub checks: Checks,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateMode {
    Specialization(BigRational),
    Generic,
}

/// `[T, w σ_i^e w⁻¹]` for the hit `spec`, where `T` is the full twist on the
/// punctures above `N` and `w σ_i w⁻¹` is the half twist along the tine edge.
pub fn build_candidate(spec: &ForkSpec, mode: &CandidateMode) -> Result<KernelCandidate, KernelError> {
    let p = crate::forkpair::pairing_poly(spec)?;
    let d = build_diagram(spec)?;
    match mode {
        CandidateMode::Specialization(q0) => {
            if !(p.is_root(q0) && p.is_root(&q0.recip())) {
                return Err(KernelError::Precondition(format!(
                    "pairing of {spec} does not vanish at {q0} and its inverse"
                )));
            }
        }
        CandidateMode::Generic => {
            if !p.is_zero() || d.k == 0 {
                return Err(KernelError::Precondition(format!(
                    "pairing of {spec} is not an exact zero with k > 0"
                )));
            }
        }
    }
    let syn = synthesize_conjugator(spec)?;
    let n = spec.n();
    let twist = full_twist_word(n, n - 1)?;
    let targets: Vec<BigRational> = match mode {
        CandidateMode::Specialization(q0) => vec![q0.clone()],
        CandidateMode::Generic => Vec::new(),
    };
    for e in [1u32, 2] {
        let band = BraidWord::generator(n, syn.standard, false)?.power(e as i64);
        let half = BraidWord::conjugate(&syn.word, &band)?;
        let word = BraidWord::commutator(&twist, &half)?;
        let checks = verify_candidate(&word, &targets)?;
        let ok = match mode {
            CandidateMode::Specialization(q0) => checks.kernel_at(q0),
            CandidateMode::Generic => checks.generic_kernel(),
        };
        if ok {
            return Ok(KernelCandidate {
                word,
                provenance: Provenance {
                    spec: Some(spec.clone()),
                    recipe: "commutator of the full twist above N with a twist along the tine edge"
                        .into(),
                    twist_exponent: Some(e),
                    conjugator: Some(syn.word.clone()),
                    standard_arc: Some(syn.standard),
                },
                checks,
            });
        }
    }
    Err(KernelError::VerificationFailed)
}

/// Verify a hand-written word, e.g. the published `q = 2` kernel element.
pub fn manual_candidate(word: BraidWord, recipe: &str, targets: &[BigRational]) -> Result<KernelCandidate, KernelError> {
    let checks = verify_candidate(&word, targets)?;
    Ok(KernelCandidate {
        word,
        provenance: Provenance {
            spec: None,
            recipe: recipe.into(),
            twist_exponent: None,
            conjugator: None,
            standard_arc: None,
        },
        checks,
    })
}

mod word_text {
    use super::BraidWord;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        strands: usize,
        letters: String,
    }

    pub fn serialize<S: Serializer>(w: &BraidWord, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            strands: w.strands(),
            letters: w.to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BraidWord, D::Error> {
        let r = Repr::deserialize(d)?;
        crate::braid::parse_word(&r.letters, r.strands).map_err(serde::de::Error::custom)
    }
}

mod opt_word_text {
    use super::BraidWord;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Option<BraidWord>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => super::word_text::serialize(w, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BraidWord>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::word_text")] BraidWord);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}
