//! Standard-form forks against the horizontal noodle in `D_3` / `D_4`.
//!
//! The noodle `N` runs left to right with `p_1 .. p_{n-1}` above it and `p_n`
//! below. A fork's tine edge is described by how many arcs above `N` wrap
//! around each upper puncture (and around `{p_1, p_2}` when `n = 4`) and by
//! its two endpoints. Below `N` every crossing is joined by nested arcs
//! around `p_n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ForkError, LaurentError};
use crate::laurent::{LaurentPoly, TermAccumulator};
use crate::modular::{add_mod, mul_mod, sub_mod, ModPoint};

/// Counts of upper arcs and the two tine-edge endpoints.
///
/// `counts` is `(c1, c2, c3, c12)` for `n = 4` and `(c1, c2)` for `n = 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ForkSpec {
    n: usize,
    counts: Vec<u64>,
    ends: (usize, usize),
}

impl ForkSpec {
    pub fn new(n: usize, counts: &[u64], ends: (usize, usize)) -> Result<Self, ForkError> {
        let want = match n {
            3 => 2,
            4 => 4,
            _ => return Err(ForkError::BadSpec(format!("n must be 3 or 4, got {n}"))),
        };
        if counts.len() != want {
            return Err(ForkError::BadSpec(format!(
                "n={n} takes {want} counts, got {}",
                counts.len()
            )));
        }
        let (a, b) = (ends.0.min(ends.1), ends.0.max(ends.1));
        if a == b || a < 1 || b > n {
            return Err(ForkError::BadSpec(format!(
                "ends must be two distinct punctures in 1..={n}"
            )));
        }
        Ok(ForkSpec {
            n,
            counts: counts.to_vec(),
            ends: (a, b),
        })
    }

    pub fn d4(c1: u64, c2: u64, c3: u64, c12: u64, ends: (usize, usize)) -> Result<Self, ForkError> {
        Self::new(4, &[c1, c2, c3, c12], ends)
    }

    pub fn d3(c1: u64, c2: u64, ends: (usize, usize)) -> Result<Self, ForkError> {
        Self::new(3, &[c1, c2], ends)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Endpoints, smaller first.
    pub fn ends(&self) -> (usize, usize) {
        self.ends
    }

    pub fn has_end(&self, p: usize) -> bool {
        self.ends.0 == p || self.ends.1 == p
    }

    fn count_sum(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The tine edge that never meets `N`.
    pub fn is_disjoint(&self) -> bool {
        self.count_sum() == 0 && !self.has_end(self.n)
    }

    /// Left-right reflection (`n = 4`, no `c12` arcs): counts reversed and
    /// upper endpoints `i -> 4 - i`.
    pub fn mirror(&self) -> Option<Self> {
        if self.n != 4 || self.counts[3] != 0 {
            return None;
        }
        let f = |p: usize| if p == 4 { 4 } else { 4 - p };
        let c = &self.counts;
        Self::d4(c[2], c[1], c[0], 0, (f(self.ends.0), f(self.ends.1))).ok()
    }
}

impl fmt::Display for ForkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.counts.iter().map(u64::to_string).collect();
        write!(
            f,
            "n={};c={};ends={},{}",
            self.n,
            c.join(","),
            self.ends.0,
            self.ends.1
        )
    }
}

impl FromStr for ForkSpec {
    type Err = ForkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| ForkError::BadSpec(format!("{m}: {s:?}"));
        let (mut n, mut counts, mut ends) = (None, None, None);
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let nums = |v: &str| -> Result<Vec<u64>, ForkError> {
                v.split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| bad("bad integer")))
                    .collect()
            };
            match key.trim() {
                "n" => n = Some(val.trim().parse::<usize>().map_err(|_| bad("bad n"))?),
                "c" => counts = Some(nums(val)?),
                "ends" => {
                    let e = nums(val)?;
                    if e.len() != 2 {
                        return Err(bad("ends needs two punctures"));
                    }
                    ends = Some((e[0] as usize, e[1] as usize));
                }
                _ => return Err(bad("unknown key")),
            }
        }
        let n = n.ok_or_else(|| bad("missing n"))?;
        let counts = counts.ok_or_else(|| bad("missing c"))?;
        let ends = ends.ok_or_else(|| bad("missing ends"))?;
        Self::new(n, &counts, ends)
    }
}

impl TryFrom<String> for ForkSpec {
    type Error = ForkError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ForkSpec> for String {
    fn from(s: ForkSpec) -> String {
        s.to_string()
    }
}

/// Which upper arcs a crossing belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcGroup {
    P1,
    P2,
    P3,
    P12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpperFeature {
    /// Upper arc joining this crossing to `partner`, enclosing `enclosed` punctures.
    Arc {
        group: ArcGroup,
        partner: usize,
        enclosed: u32,
    },
    /// The tine edge leaves puncture `p` straight down through this crossing.
    Terminal(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowerFeature {
    Arc { partner: usize, enclosed: u32 },
    Terminal(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub upper: UpperFeature,
    pub lower: LowerFeature,
}

/// One crossing visit along the tine edge: `sign * q^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    pub position: usize,
    pub sign: i8,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDiagram {
    pub spec: ForkSpec,
    pub k: usize,
    /// Crossings of the tine edge with `N`, left to right.
    pub crossings: Vec<Crossing>,
    /// Visits from the smaller endpoint to the larger one.
    pub traversal: Vec<Visit>,
}

/// Crossing count `2·Σc + |ends ∩ {1..n-1}|`; zero for the disjoint edge.
pub fn intersection_count(spec: &ForkSpec) -> Result<usize, ForkError> {
    if spec.is_disjoint() {
        return Ok(0);
    }
    let above = (1..spec.n).filter(|&p| spec.has_end(p)).count();
    let k = 2 * spec.count_sum() as usize + above;
    let below = usize::from(spec.has_end(spec.n));
    if k % 2 != below {
        return Err(ForkError::ParityViolation);
    }
    Ok(k)
}

#[derive(Clone, Copy)]
enum Slot {
    Left(ArcGroup),
    Right(ArcGroup),
    Terminal(usize),
    /// A non-endpoint upper puncture; not a crossing.
    Puncture,
}

fn layout(spec: &ForkSpec) -> Vec<Slot> {
    use ArcGroup::*;
    let c = &spec.counts;
    let mut out = Vec::new();
    let rep = |s: Slot, m: u64, out: &mut Vec<Slot>| out.extend((0..m).map(|_| s));
    let around = |g: ArcGroup, m: u64, p: usize, out: &mut Vec<Slot>| {
        rep(Slot::Left(g), m, out);
        out.push(if spec.has_end(p) {
            Slot::Terminal(p)
        } else {
            Slot::Puncture
        });
        rep(Slot::Right(g), m, out);
    };
    if spec.n == 4 {
        rep(Slot::Left(P12), c[3], &mut out);
        around(P1, c[0], 1, &mut out);
        around(P2, c[1], 2, &mut out);
        rep(Slot::Right(P12), c[3], &mut out);
        around(P3, c[2], 3, &mut out);
    } else {
        around(P1, c[0], 1, &mut out);
        around(P2, c[1], 2, &mut out);
    }
    out
}

/// Lay out the crossings, match them above and below `N`, and walk the tine
/// edge from its smaller endpoint.
pub fn build_diagram(spec: &ForkSpec) -> Result<CurveDiagram, ForkError> {
    let k = intersection_count(spec)?;
    if k == 0 {
        return Ok(CurveDiagram {
            spec: spec.clone(),
            k,
            crossings: Vec::new(),
            traversal: Vec::new(),
        });
    }
    // Doubled x-coordinates: crossing j sits at 2j, a free puncture at an odd
    // coordinate between its neighbours, p_n at k - 1.
    let slots = layout(spec);
    let mut upper_x = Vec::new();
    let mut upper: Vec<Option<UpperFeature>> = vec![None; k];
    let mut stack: Vec<(usize, ArcGroup)> = Vec::new();
    let mut pending: Vec<(usize, usize, ArcGroup)> = Vec::new();
    let mut j = 0usize;
    for s in slots {
        match s {
            Slot::Left(g) => {
                stack.push((j, g));
                j += 1;
            }
            Slot::Right(g) => {
                let (l, lg) = stack.pop().expect("nested layout");
                debug_assert_eq!(lg, g);
                pending.push((l, j, g));
                j += 1;
            }
            Slot::Terminal(p) => {
                upper[j] = Some(UpperFeature::Terminal(p));
                upper_x.push(2 * j as i64);
                j += 1;
            }
            Slot::Puncture => upper_x.push(2 * j as i64 - 1),
        }
    }
    debug_assert_eq!(j, k);
    for (l, r, g) in pending {
        let enclosed = upper_x
            .iter()
            .filter(|&&x| 2 * l as i64 <= x && x <= 2 * r as i64)
            .count() as u32;
        upper[l] = Some(UpperFeature::Arc {
            group: g,
            partner: r,
            enclosed,
        });
        upper[r] = Some(UpperFeature::Arc {
            group: g,
            partner: l,
            enclosed,
        });
    }
    let crossings: Vec<Crossing> = (0..k)
        .map(|j| {
            let partner = k - 1 - j;
            let lower = if partner == j {
                LowerFeature::Terminal(spec.n)
            } else {
                LowerFeature::Arc {
                    partner,
                    enclosed: 1,
                }
            };
            Crossing {
                upper: upper[j].expect("every crossing has an upper feature"),
                lower,
            }
        })
        .collect();

    let start = crossings
        .iter()
        .position(|c| c.upper == UpperFeature::Terminal(spec.ends.0))
        .expect("smaller endpoint lies above N");
    let mut traversal = vec![Visit {
        position: start,
        sign: -1,
        exponent: 0,
    }];
    let (mut pos, mut sign, mut a) = (start, -1i8, 0i64);
    let mut below = true;
    loop {
        let step = if below {
            match crossings[pos].lower {
                LowerFeature::Terminal(_) => break,
                LowerFeature::Arc { partner, enclosed } => {
                    let s = if partner > pos { 1 } else { -1 };
                    (partner, s * enclosed as i64)
                }
            }
        } else {
            match crossings[pos].upper {
                UpperFeature::Terminal(_) => break,
                UpperFeature::Arc {
                    partner, enclosed, ..
                } => {
                    let s = if partner < pos { 1 } else { -1 };
                    (partner, s * enclosed as i64)
                }
            }
        };
        pos = step.0;
        a += step.1;
        sign = -sign;
        traversal.push(Visit {
            position: pos,
            sign,
            exponent: a,
        });
        below = !below;
        if traversal.len() > k {
            break;
        }
    }
    if traversal.len() != k {
        return Err(ForkError::Disconnected {
            visited: traversal.len(),
            k,
        });
    }
    Ok(CurveDiagram {
        spec: spec.clone(),
        k,
        crossings,
        traversal,
    })
}

impl CurveDiagram {
    /// `Σ εᵢ q^{aᵢ}` before normalization.
    pub fn raw_pairing(&self) -> LaurentPoly {
        let mut acc = TermAccumulator::with_span(-(self.k as i64), self.k as i64);
        for v in &self.traversal {
            acc.push(v.sign as i64, v.exponent);
        }
        acc.finish()
    }

    /// Residue of `Σ εᵢ q0^{aᵢ}` using a running power.
    pub fn pairing_residue(&self, point: &ModPoint) -> u64 {
        let m = point.modulus();
        let (mut acc, mut pow, mut prev) = (0u64, 1u64 % m, 0i64);
        let step_pow = |d: i64| point.power(d);
        for v in &self.traversal {
            let d = v.exponent - prev;
            if d != 0 {
                pow = mul_mod(pow, step_pow(d), m);
            }
            prev = v.exponent;
            acc = if v.sign > 0 {
                add_mod(acc, pow, m)
            } else {
                sub_mod(acc, pow, m)
            };
        }
        acc
    }
}

/// A residue of the pairing at one filter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModEval {
    pub point: ModPoint,
    pub residue: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingValue {
    Exact(LaurentPoly),
    Filtered(Vec<ModEval>),
}

impl PairingValue {
    pub fn exact(&self) -> Option<&LaurentPoly> {
        match self {
            PairingValue::Exact(p) => Some(p),
            PairingValue::Filtered(_) => None,
        }
    }

    pub fn residues(&self) -> Option<Vec<u64>> {
        match self {
            PairingValue::Exact(_) => None,
            PairingValue::Filtered(v) => Some(v.iter().map(|e| e.residue).collect()),
        }
    }

    /// Exact zero, or every residue zero.
    pub fn vanishes(&self) -> bool {
        match self {
            PairingValue::Exact(p) => p.is_zero(),
            PairingValue::Filtered(v) => v.iter().all(|e| e.residue == 0),
        }
    }
}

/// The normalized pairing `⟨N, F⟩`.
pub fn pairing_exact(spec: &ForkSpec) -> Result<PairingValue, ForkError> {
    Ok(PairingValue::Exact(pairing_poly(spec)?))
}

/// Normalized pairing as a bare polynomial.
pub fn pairing_poly(spec: &ForkSpec) -> Result<LaurentPoly, ForkError> {
    Ok(build_diagram(spec)?.raw_pairing().normalize())
}

/// Pairing residues under each `(q0, M)` filter, without building the
/// polynomial.
pub fn pairing_mod(spec: &ForkSpec, filters: &[ModPoint]) -> Result<PairingValue, ForkError> {
    let d = build_diagram(spec)?;
    Ok(PairingValue::Filtered(
        filters
            .iter()
            .map(|p| ModEval {
                point: *p,
                residue: d.pairing_residue(p),
            })
            .collect(),
    ))
}

/// Filter points from raw `(q0, M)` pairs.
pub fn filter_points(pairs: &[(u64, u64)]) -> Result<Vec<ModPoint>, LaurentError> {
    pairs.iter().map(|&(q, m)| ModPoint::new(q, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::MERSENNE_61;

    fn spec(s: &str) -> ForkSpec {
        s.parse().unwrap()
    }

    #[test]
    fn text_form_round_trips() {
        let s = spec("n=4;c=24,18,11,0;ends=3,1");
        assert_eq!(s.to_string(), "n=4;c=24,18,11,0;ends=1,3");
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"n=4;c=24,18,11,0;ends=1,3\"");
        assert!("n=5;c=1;ends=1,2".parse::<ForkSpec>().is_err());
        assert!("n=4;c=1,2,3;ends=1,2".parse::<ForkSpec>().is_err());
        assert!("n=4;c=0,0,0,0;ends=2,2".parse::<ForkSpec>().is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(intersection_count(&spec("n=4;c=24,18,11,0;ends=1,3")).unwrap(), 108);
        assert_eq!(intersection_count(&spec("n=3;c=2,3;ends=1,2")).unwrap(), 12);
        assert_eq!(intersection_count(&spec("n=4;c=0,0,0,0;ends=1,4")).unwrap(), 1);
        assert_eq!(intersection_count(&spec("n=4;c=0,0,0,0;ends=1,2")).unwrap(), 0);
    }

    #[test]
    fn figure_four_pairing() {
        let s = spec("n=4;c=24,18,11,0;ends=1,3");
        let d = build_diagram(&s).unwrap();
        assert_eq!(d.k, 108);
        let lower_arcs = d
            .crossings
            .iter()
            .filter(|c| matches!(c.lower, LowerFeature::Arc { .. }))
            .count();
        assert_eq!(lower_arcs / 2, 54);
        let p = pairing_poly(&s).unwrap();
        assert_eq!(p, LaurentPoly::from_i64s(0, &[2, -9, 18, -25, 25, -18, 9, -2]));
    }

    #[test]
    fn single_loop_around_p1() {
        let p = pairing_poly(&spec("n=4;c=1,0,0,0;ends=1,2")).unwrap();
        assert_eq!(p, LaurentPoly::from_i64s(0, &[1, -1, 1, -1]));
    }

    #[test]
    fn closed_loop_is_disconnected() {
        assert_eq!(
            build_diagram(&spec("n=4;c=1,1,0,0;ends=1,2")),
            Err(ForkError::Disconnected { visited: 2, k: 6 })
        );
    }

    #[test]
    fn disjoint_edge_pairs_to_zero() {
        assert!(pairing_poly(&spec("n=4;c=0,0,0,0;ends=1,2")).unwrap().is_zero());
        let v = pairing_mod(&spec("n=4;c=0,0,0,0;ends=1,3"), &[ModPoint::new(2, 101).unwrap()]).unwrap();
        assert_eq!(v.residues().unwrap(), vec![0]);
    }

    #[test]
    fn residues() {
        let fig4 = spec("n=4;c=24,18,11,0;ends=1,3");
        let f = [
            ModPoint::new(2, MERSENNE_61).unwrap(),
            ModPoint::new(1, 1_000_003).unwrap(),
        ];
        assert_eq!(pairing_mod(&fig4, &f).unwrap().residues().unwrap(), vec![0, 0]);
        // raw sum is -1 + q - q^2 + q^3; normalized 1 - 2 + 4 - 8 = -5
        let p = pairing_poly(&spec("n=4;c=1,0,0,0;ends=1,2")).unwrap();
        let at = ModPoint::new(2, 101).unwrap();
        assert_eq!(p.eval_mod(&at), 96);
        let raw = pairing_mod(&spec("n=4;c=1,0,0,0;ends=1,2"), &[at]).unwrap();
        assert_eq!(raw.residues().unwrap(), vec![5]);
    }

    #[test]
    fn d3_example() {
        let s = spec("n=3;c=2,3;ends=1,2");
        let p = pairing_poly(&s).unwrap();
        assert_eq!(p.value_at_minus_one().magnitude(), &12u32.into());
        assert_eq!(p, LaurentPoly::from_i64s(0, &[1, -2, 3, -3, 2, -1]));
    }

    #[test]
    fn mirror_reverses_exponents() {
        let s = spec("n=4;c=24,18,11,0;ends=1,3");
        let m = s.mirror().unwrap();
        assert_eq!(m.to_string(), "n=4;c=11,18,24,0;ends=1,3");
        let (p, pm) = (pairing_poly(&s).unwrap(), pairing_poly(&m).unwrap());
        assert_eq!(pm, p.mirror().normalize());
    }
}
