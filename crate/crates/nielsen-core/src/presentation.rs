//! Fuchsian-type presentations, signature types, the exceptional
//! classifier, quotients, the congruence decision criterion and
//! constructive Nielsen certificates.
//!
//! The base presentation is
//! `< s_1, ..., s_l | s_1^g1, ..., s_l^gl, s_1 s_2 ... s_l >` with all
//! exponents at least 2. Three extensions append auxiliary generators and
//! replace the long relator by `s_1 ... s_l W`: orientable handles
//! (`W = [a_1,b_1]...[a_g,b_g]`), crosscaps (`W = c_1^2 ... c_h^2`), or an
//! arbitrary extra word over fresh generators `d_1, ..., d_q`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::word::{apply_nielsen, FreeWord, NielsenOp};

/// Errors of the presentation layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresError {
    InvalidExponent(i64),
    MalformedRecord(String),
    /// The plain presentation needs at least three generators.
    TooFewGenerators,
    /// More than one of genus, crosscaps, extra relator was requested.
    ConflictingStructure,
    /// Generating systems do not fit the presentation.
    InvalidGenSys(String),
    /// The two systems do not belong to the same presentation shape.
    IncompatibleSystems,
    NotInvertible { u: i64, gamma: u32 },
    /// A certificate was requested for a pair the criterion rejects.
    NotEquivalent,
}

impl fmt::Display for PresError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresError::InvalidExponent(g) => write!(f, "invalid exponent {g}: all must be >= 2"),
            PresError::MalformedRecord(msg) => write!(f, "malformed record: {msg}"),
            PresError::TooFewGenerators => write!(f, "need at least 3 generators"),
            PresError::ConflictingStructure => {
                write!(f, "at most one of genus, crosscaps, extra relator may be set")
            }
            PresError::InvalidGenSys(msg) => write!(f, "invalid generating system: {msg}"),
            PresError::IncompatibleSystems => write!(f, "generating systems are incompatible"),
            PresError::NotInvertible { u, gamma } => {
                write!(f, "{u} is not invertible mod {gamma}")
            }
            PresError::NotEquivalent => write!(f, "systems are not equivalent by the criterion"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PresError {}

/// A Fuchsian-type presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuchsianPresentation {
    exponents: Vec<u32>,
    genus: u32,
    crosscaps: u32,
    /// Word over auxiliary generators `d_1, d_2, ...` (1-based, local
    /// indices), appended to the long relator.
    extra_relator: Option<FreeWord>,
}

impl FuchsianPresentation {
    pub fn new(
        exponents: Vec<u32>,
        genus: u32,
        crosscaps: u32,
        extra_relator: Option<FreeWord>,
    ) -> Result<Self, PresError> {
        for &g in &exponents {
            if g < 2 {
                return Err(PresError::InvalidExponent(g as i64));
            }
        }
        let structures =
            usize::from(genus > 0) + usize::from(crosscaps > 0) + usize::from(extra_relator.is_some());
        if structures > 1 {
            return Err(PresError::ConflictingStructure);
        }
        if structures == 0 && exponents.len() < 3 {
            return Err(PresError::TooFewGenerators);
        }
        if exponents.is_empty() {
            return Err(PresError::TooFewGenerators);
        }
        if let Some(w) = &extra_relator {
            if w.is_identity() {
                return Err(PresError::MalformedRecord(
                    "extra relator word must be nonempty".to_string(),
                ));
            }
        }
        Ok(FuchsianPresentation { exponents, genus, crosscaps, extra_relator })
    }

    pub fn plain(exponents: Vec<u32>) -> Result<Self, PresError> {
        FuchsianPresentation::new(exponents, 0, 0, None)
    }

    /// Internal constructor for quotients, which may drop below the
    /// three-generator minimum of the input syntax.
    fn raw(exponents: Vec<u32>, genus: u32, crosscaps: u32, extra: Option<FreeWord>) -> Self {
        FuchsianPresentation { exponents, genus, crosscaps, extra_relator: extra }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn crosscaps(&self) -> u32 {
        self.crosscaps
    }

    pub fn extra_relator(&self) -> Option<&FreeWord> {
        self.extra_relator.as_ref()
    }

    /// Number of torsion generators `s_i`.
    pub fn ell(&self) -> usize {
        self.exponents.len()
    }

    /// Count of exponents at least 3.
    pub fn m(&self) -> usize {
        self.exponents.iter().filter(|&&g| g >= 3).count()
    }

    /// Count of exponents equal to 2.
    pub fn n_two(&self) -> usize {
        self.exponents.iter().filter(|&&g| g == 2).count()
    }

    /// Number of auxiliary generators appended after the `s_i`.
    pub fn aux_count(&self) -> usize {
        (2 * self.genus + self.crosscaps) as usize
            + self.extra_relator.as_ref().map(|w| w.max_generator()).unwrap_or(0)
    }

    /// The word `W` over auxiliary generators (global indices `ell+1, ...`)
    /// appended to the long relator; empty for the base presentation.
    pub fn aux_word(&self) -> FreeWord {
        let base = self.ell();
        if self.genus > 0 {
            let mut w = FreeWord::identity();
            for j in 0..self.genus as usize {
                let a = base + 2 * j + 1;
                let b = base + 2 * j + 2;
                w = w.concat(&FreeWord::normalize(&[
                    a as i64,
                    b as i64,
                    -(a as i64),
                    -(b as i64),
                ]));
            }
            w
        } else if self.crosscaps > 0 {
            let mut w = FreeWord::identity();
            for i in 0..self.crosscaps as usize {
                w = w.concat(&FreeWord::power(base + i + 1, 2));
            }
            w
        } else if let Some(extra) = &self.extra_relator {
            FreeWord::from_syllables(
                extra.syllables().iter().map(|&(g, e)| (g + base, e)),
            )
        } else {
            FreeWord::identity()
        }
    }

    /// Human-readable name of a generator by its global index.
    pub fn generator_name(&self, idx: usize) -> String {
        let base = self.ell();
        if idx <= base {
            return format!("s{idx}");
        }
        let off = idx - base;
        if self.genus > 0 {
            let pair = (off - 1) / 2 + 1;
            if off % 2 == 1 {
                format!("a{pair}")
            } else {
                format!("b{pair}")
            }
        } else if self.crosscaps > 0 {
            format!("c{off}")
        } else {
            format!("d{off}")
        }
    }
}

/// The type `(gamma_1, ..., gamma_m | n)` of a presentation: exponents at
/// least 3 in non-increasing order, and the count `n` of order-2 generators
/// (with crosscaps counted into `n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureType {
    pub exponents: Vec<u32>,
    pub n: u32,
}

impl fmt::Display for SignatureType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, " | {})", self.n)
    }
}

/// Sorts the exponents at least 3 and counts the rest; crosscap handles are
/// counted as additional order-2 contributions.
pub fn signature_type(p: &FuchsianPresentation) -> SignatureType {
    let mut exponents: Vec<u32> = p.exponents.iter().copied().filter(|&g| g >= 3).collect();
    exponents.sort_unstable_by(|a, b| b.cmp(a));
    SignatureType { exponents, n: p.n_two() as u32 + p.crosscaps }
}

/// Which quotient to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientKind {
    /// Halve every even exponent; generators of new order 1 are dropped.
    FullTwo,
    /// Halve exactly the even exponents not divisible by 4 and not equal
    /// to 2.
    CanonicalFour,
}

/// The full 2-quotient or the canonical 4-quotient of a presentation.
pub fn quotient(p: &FuchsianPresentation, kind: QuotientKind) -> FuchsianPresentation {
    let exponents = p
        .exponents
        .iter()
        .filter_map(|&g| match kind {
            QuotientKind::FullTwo => {
                let g2 = if g % 2 == 0 { g / 2 } else { g };
                if g2 >= 2 {
                    Some(g2)
                } else {
                    None
                }
            }
            QuotientKind::CanonicalFour => {
                if g % 2 == 0 && g % 4 != 0 && g != 2 {
                    Some(g / 2)
                } else {
                    Some(g)
                }
            }
        })
        .collect();
    FuchsianPresentation::raw(exponents, p.genus, p.crosscaps, p.extra_relator.clone())
}

/// The exceptional conditions of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExceptionalCondition {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl ExceptionalCondition {
    pub fn label(&self) -> &'static str {
        match self {
            ExceptionalCondition::A => "a",
            ExceptionalCondition::B => "b",
            ExceptionalCondition::C => "c",
            ExceptionalCondition::D => "d",
            ExceptionalCondition::E => "e",
            ExceptionalCondition::F => "f",
        }
    }
}

impl fmt::Display for ExceptionalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

// The star convention: an entry matches k* (k odd) when it equals k or 2k.
// Entries that are even but not twice an odd number never match any star.
fn star_k(entry: u32) -> Option<u32> {
    if entry % 2 == 1 {
        Some(entry)
    } else if (entry / 2) % 2 == 1 && entry != 2 {
        Some(entry / 2)
    } else {
        None
    }
}

/// Evaluates the six exceptional conditions on a signature type; returns the
/// first matched condition.
pub fn exceptional_type(sig: &SignatureType) -> Option<ExceptionalCondition> {
    let e = &sig.exponents;
    let m = e.len();
    let n_even = sig.n % 2 == 0;

    if m <= 3 {
        return Some(ExceptionalCondition::A);
    }
    if n_even && m == 4 {
        // pattern (gamma_1, 5*, 4, 3*) with distinct slots; the starred
        // entries keep the pattern stable under the halving quotient
        let mut matches_b = false;
        for i4 in 0..4 {
            if e[i4] != 4 {
                continue;
            }
            for i5 in 0..4 {
                if i5 == i4 || star_k(e[i5]) != Some(5) {
                    continue;
                }
                if (0..4).any(|i3| i3 != i4 && i3 != i5 && star_k(e[i3]) == Some(3)) {
                    matches_b = true;
                }
            }
        }
        if matches_b {
            return Some(ExceptionalCondition::B);
        }
        if e[2] == 4 && e[3] == 4 {
            return Some(ExceptionalCondition::C);
        }
    }
    if !n_even {
        if m == 4 {
            return Some(ExceptionalCondition::D);
        }
        if m == 5 || m == 6 {
            let stars: Option<Vec<u32>> = e.iter().map(|&g| star_k(g)).collect();
            if let Some(ks) = stars {
                let c3 = ks.iter().filter(|&&k| k == 3).count();
                let c5 = ks.iter().filter(|&&k| k == 5).count();
                if m == 5 {
                    // roles: one 3*, two entries with k in {3,5}, two free
                    if c3 >= 1 && (c3 - 1) + c5 >= 2 {
                        return Some(ExceptionalCondition::E);
                    }
                } else {
                    // roles: four 3*, one with k in {3,5}, one free
                    if c3 >= 4 && (c3 >= 5 || c5 >= 1) {
                        return Some(ExceptionalCondition::F);
                    }
                }
            }
        }
    }
    None
}

/// Classifies a presentation, honoring the extension conventions: crosscaps
/// count into `n`; the extra-relator extension is classified through its
/// torsion quotient, which carries the same exponents.
pub fn is_exceptional(p: &FuchsianPresentation) -> Option<ExceptionalCondition> {
    exceptional_type(&signature_type(p))
}

/// The representation-existence cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RepCase {
    C1,
    C2i,
    C2ii,
    C3,
    C4i,
    C4ii,
    C4iii,
    C4iv,
}

impl fmt::Display for RepCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepCase::C1 => "(1)",
            RepCase::C2i => "(2)(i)",
            RepCase::C2ii => "(2)(ii)",
            RepCase::C3 => "(3)",
            RepCase::C4i => "(4)(i)",
            RepCase::C4ii => "(4)(ii)",
            RepCase::C4iii => "(4)(iii)",
            RepCase::C4iv => "(4)(iv)",
        };
        write!(f, "{s}")
    }
}

/// Outcome of the case check, including the two sides of the halved-exponent
/// inequality used by the first case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepCaseReport {
    pub case: Option<RepCase>,
    /// `sum over gamma_i >= 3 of 1/gamma'_i` with even exponents halved.
    pub lhs: f64,
    /// `m - 2`.
    pub rhs: f64,
}

/// Finds the first representation-existence case whose hypotheses hold.
pub fn rep_case(p: &FuchsianPresentation) -> RepCaseReport {
    let big: Vec<u32> = p.exponents.iter().copied().filter(|&g| g >= 3).collect();
    let m = big.len();
    let n = p.n_two();
    let lhs: f64 = big
        .iter()
        .map(|&g| {
            let gp = if g % 2 == 0 { g / 2 } else { g };
            1.0 / gp as f64
        })
        .sum();
    let rhs = m as f64 - 2.0;

    let all_odd = big.iter().all(|&g| g % 2 == 1);
    let count_ge = |t: u32| big.iter().filter(|&&g| g >= t).count();

    let case = if big.iter().any(|&g| g % 4 == 0) && lhs < rhs {
        Some(RepCase::C1)
    } else if all_odd && n % 2 == 0 && m >= 4 {
        Some(RepCase::C2i)
    } else if all_odd && n % 2 == 0 && m == 3 && count_ge(5) >= 1 {
        Some(RepCase::C2ii)
    } else if all_odd && n % 2 == 1 && m >= 6 {
        Some(RepCase::C3)
    } else if all_odd && n % 2 == 1 && m == 5 && count_ge(7) >= 1 {
        Some(RepCase::C4i)
    } else if all_odd && n % 2 == 1 && m == 5 && count_ge(5) >= 2 {
        Some(RepCase::C4ii)
    } else if all_odd && n % 2 == 1 && m == 4 && count_ge(7) >= 2 {
        Some(RepCase::C4iii)
    } else if all_odd && n % 2 == 1 && m == 4 && count_ge(5) == 4 {
        Some(RepCase::C4iv)
    } else {
        None
    };
    RepCaseReport { case, lhs, rhs }
}

/// A standard generating system: the tuple `s_i^{u_i}` for all `i` except
/// one missing index, each `u_i` a unit mod `gamma_i`. The missing index
/// carries the formal exponent 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardGenSys {
    missing: usize,
    exponents: Vec<i64>,
}

impl StandardGenSys {
    pub fn new(missing: usize, exponents: Vec<i64>) -> Self {
        StandardGenSys { missing, exponents }
    }

    pub fn missing(&self) -> usize {
        self.missing
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn validate_for(&self, p: &FuchsianPresentation) -> Result<(), PresError> {
        let ell = p.ell();
        if self.missing < 1 || self.missing > ell {
            return Err(PresError::InvalidGenSys(format!(
                "missing index {} out of range 1..={ell}",
                self.missing
            )));
        }
        if self.exponents.len() != ell - 1 {
            return Err(PresError::InvalidGenSys(format!(
                "expected {} exponents, got {}",
                ell - 1,
                self.exponents.len()
            )));
        }
        for (i, &u) in self.present_indices(p).zip(self.exponents.iter()) {
            let gamma = p.exponents[i - 1] as i64;
            if gcd_i64(u.rem_euclid(gamma), gamma) != 1 {
                return Err(PresError::InvalidGenSys(format!(
                    "exponent {u} at index {i} is not a unit mod {gamma}"
                )));
            }
        }
        Ok(())
    }

    /// The torsion indices carried by the tuple, ascending.
    pub fn present_indices<'a>(
        &'a self,
        p: &FuchsianPresentation,
    ) -> impl Iterator<Item = usize> + 'a {
        let ell = p.ell();
        let missing = self.missing;
        (1..=ell).filter(move |&i| i != missing)
    }

    /// `u_i`, with the formal value 1 at the missing index.
    pub fn exponent_at(&self, i: usize) -> i64 {
        use core::cmp::Ordering;
        match i.cmp(&self.missing) {
            Ordering::Less => self.exponents[i - 1],
            Ordering::Equal => 1,
            Ordering::Greater => self.exponents[i - 2],
        }
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `z` with `z * u = 1 mod gamma` and `1 <= z <= gamma`.
pub fn mod_inverse(u: i64, gamma: u32) -> Result<i64, PresError> {
    let g = gamma as i64;
    let u = u.rem_euclid(g);
    for z in 1..=g {
        if (z * u) % g == 1 % g {
            return Ok(z);
        }
    }
    Err(PresError::NotInvertible { u, gamma })
}

/// The vector `z_i` with `z_i u_i = 1 mod gamma_i` for every index (the
/// missing index gets `z = 1`).
pub fn mod_inverse_exponents(
    p: &FuchsianPresentation,
    u: &StandardGenSys,
) -> Result<Vec<i64>, PresError> {
    (1..=p.ell())
        .map(|i| mod_inverse(u.exponent_at(i), p.exponents[i - 1]))
        .collect()
}

/// Decision verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equivalent,
    Inequivalent,
    ExceptionalUnknown,
}

/// One congruence check `u_i = +-v_i mod gamma_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexCheck {
    pub index: usize,
    pub gamma: u32,
    pub u: i64,
    pub v: i64,
    pub pass: bool,
}

/// One replay step of a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateStep {
    pub op: NielsenOp,
    pub tuple: Vec<FreeWord>,
}

/// An explicit chain of Nielsen operations carrying U's tuple to V's, with
/// every intermediate tuple recorded. Words are over the group generators
/// (global indices: torsion first, then auxiliaries).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NielsenCertificate {
    pub initial: Vec<FreeWord>,
    pub steps: Vec<CertificateStep>,
}

impl NielsenCertificate {
    pub fn final_tuple(&self) -> &[FreeWord] {
        self.steps.last().map(|s| s.tuple.as_slice()).unwrap_or(&self.initial)
    }

    pub fn ops(&self) -> impl Iterator<Item = &NielsenOp> {
        self.steps.iter().map(|s| &s.op)
    }

    /// Re-applies every recorded operation and checks the stored
    /// intermediate tuples.
    pub fn replay(&self) -> bool {
        let mut t = self.initial.clone();
        for step in &self.steps {
            match apply_nielsen(&t, &step.op) {
                Ok(next) => t = next,
                Err(_) => return false,
            }
            if t != step.tuple {
                return false;
            }
        }
        true
    }
}

/// Structured decision outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub condition: Option<ExceptionalCondition>,
    pub signature: SignatureType,
    pub checks: Vec<IndexCheck>,
    pub certificate: Option<NielsenCertificate>,
}

fn congruent_up_to_sign(u: i64, v: i64, gamma: u32) -> bool {
    let g = gamma as i64;
    (u - v).rem_euclid(g) == 0 || (u + v).rem_euclid(g) == 0
}

/// The congruence decision criterion: two standard systems are equivalent
/// exactly when `u_i = +-v_i mod gamma_i` at every index, provided the
/// classifier clears the presentation. Equivalent verdicts carry an
/// explicit certificate.
pub fn criterion_decide(
    p: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
) -> Result<DecisionReport, PresError> {
    u.validate_for(p)?;
    v.validate_for(p)?;

    let signature = signature_type(p);
    let condition = exceptional_type(&signature);

    let checks: Vec<IndexCheck> = (1..=p.ell())
        .map(|i| {
            let gamma = p.exponents[i - 1];
            let (ui, vi) = (u.exponent_at(i), v.exponent_at(i));
            IndexCheck {
                index: i,
                gamma,
                u: ui,
                v: vi,
                pass: congruent_up_to_sign(ui, vi, gamma),
            }
        })
        .collect();

    let verdict = if condition.is_some() {
        Verdict::ExceptionalUnknown
    } else if checks.iter().all(|c| c.pass) {
        Verdict::Equivalent
    } else {
        Verdict::Inequivalent
    };

    let certificate = if verdict == Verdict::Equivalent {
        Some(nielsen_certificate(p, u, v)?)
    } else {
        None
    };

    Ok(DecisionReport { verdict, condition, signature, checks, certificate })
}

// One factor of the long relator with the missing generator rotated away:
// either a torsion generator or an auxiliary letter with an exponent.
#[derive(Clone, Copy)]
enum Factor {
    Std(usize),
    Aux { idx: usize, exp: i64 },
}

// The cyclic factorization `s_j^{-1} = F_1 F_2 ... F_r` obtained by rotating
// the long relator `s_1 ... s_l W`: torsion generators after `j`, then the
// auxiliary word, then those before `j`.
fn rotated_relator_factors(p: &FuchsianPresentation, j: usize) -> Vec<Factor> {
    let ell = p.ell();
    let mut out = Vec::new();
    for i in j + 1..=ell {
        out.push(Factor::Std(i));
    }
    for &(g, e) in p.aux_word().syllables() {
        out.push(Factor::Aux { idx: g, exp: e });
    }
    for i in 1..j {
        out.push(Factor::Std(i));
    }
    out
}

struct CertBuilder<'a> {
    p: &'a FuchsianPresentation,
    z: Vec<i64>,
    // global generator index -> tuple position
    position: Vec<usize>,
    tuple: Vec<FreeWord>,
    steps: Vec<CertificateStep>,
    initial: Vec<FreeWord>,
}

impl<'a> CertBuilder<'a> {
    fn new(p: &'a FuchsianPresentation, u: &'a StandardGenSys) -> Result<Self, PresError> {
        let z = mod_inverse_exponents(p, u)?;
        let ell = p.ell();
        let aux = p.aux_count();
        let mut position = vec![usize::MAX; ell + aux + 1];
        let mut tuple = Vec::new();
        for i in u.present_indices(p) {
            position[i] = tuple.len();
            tuple.push(FreeWord::power(i, u.exponent_at(i)));
        }
        for a in 1..=aux {
            position[ell + a] = tuple.len();
            tuple.push(FreeWord::generator(ell + a));
        }
        let initial = tuple.clone();
        Ok(CertBuilder { p, z, position, tuple, steps: Vec::new(), initial })
    }

    fn apply(&mut self, op: NielsenOp) -> Result<(), PresError> {
        self.tuple = apply_nielsen(&self.tuple, &op)
            .map_err(|e| PresError::MalformedRecord(format!("internal: {e}")))?;
        self.steps.push(CertificateStep { op, tuple: self.tuple.clone() });
        Ok(())
    }

    // Left- or right-multiplies the entry at `target` by the group element
    // `F^{-1}` for a single relator factor, using only Nielsen moves on the
    // current tuple.
    fn multiply_by_factor_inverse(
        &mut self,
        target: usize,
        factor: Factor,
        left: bool,
    ) -> Result<(), PresError> {
        let (pos, times, invert_around) = match factor {
            Factor::Std(i) => {
                let gamma = self.p.exponents[i - 1] as i64;
                // entry_i = s_i^{u_i}; entry_i^m = s_i^{-1} for m = gamma - z_i
                let m = (gamma - self.z[i - 1]).rem_euclid(gamma);
                (self.position[i], m as u64, false)
            }
            Factor::Aux { idx, exp } => {
                // aux entries are the bare generators: need gen^{-exp}
                (self.position[idx], exp.unsigned_abs(), exp > 0)
            }
        };
        if times == 0 {
            return Ok(());
        }
        if invert_around {
            self.apply(NielsenOp::Invert(pos))?;
        }
        for _ in 0..times {
            let op = if left {
                NielsenOp::LeftMultiply { i: target, j: pos }
            } else {
                NielsenOp::RightMultiply { i: target, j: pos }
            };
            self.apply(op)?;
        }
        if invert_around {
            self.apply(NielsenOp::Invert(pos))?;
        }
        Ok(())
    }

    fn finish(self) -> NielsenCertificate {
        NielsenCertificate { initial: self.initial, steps: self.steps }
    }
}

/// Constructs an explicit Nielsen chain carrying U's tuple to V's tuple, for
/// a pair the congruence criterion accepts. The chain first rewrites the
/// entry of V's missing generator through the rotated long relator, then
/// fixes signs, then reorders.
pub fn nielsen_certificate(
    p: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
) -> Result<NielsenCertificate, PresError> {
    u.validate_for(p)?;
    v.validate_for(p)?;
    for i in 1..=p.ell() {
        if !congruent_up_to_sign(u.exponent_at(i), v.exponent_at(i), p.exponents[i - 1]) {
            return Err(PresError::NotEquivalent);
        }
    }

    let j = u.missing();
    let k = v.missing();
    let mut b = CertBuilder::new(p, u)?;

    if j != k {
        let target = b.position[k];
        let gamma_k = p.exponents[k - 1] as i64;
        // u_k = +-1 mod gamma_k because v_k is the formal 1
        let u_k = u.exponent_at(k);
        if (u_k - 1).rem_euclid(gamma_k) == 0 {
            // entry is s_k; flip it to s_k^{-1} first
            b.apply(NielsenOp::Invert(target))?;
        }
        let factors = rotated_relator_factors(p, j);
        let pos_k = factors
            .iter()
            .position(|f| matches!(f, Factor::Std(i) if *i == k))
            .expect("missing generator must occur in the rotated relator");
        // entry currently represents s_k^{-1}; surround it so it becomes
        // s_j = (F_1 ... F_r)^{-1} with F_{pos_k} = s_k
        for &f in factors[pos_k + 1..].iter() {
            b.multiply_by_factor_inverse(target, f, true)?;
        }
        for &f in factors[..pos_k].iter().rev() {
            b.multiply_by_factor_inverse(target, f, false)?;
        }
        let gamma_j = p.exponents[j - 1] as i64;
        let v_j = v.exponent_at(j);
        if (v_j + 1).rem_euclid(gamma_j) == 0 && (v_j - 1).rem_euclid(gamma_j) != 0 {
            b.apply(NielsenOp::Invert(target))?;
        }
        // the slot that held s_k now carries index j
        b.position[j] = target;
        b.position[k] = usize::MAX;
    }

    // sign fixes at the untouched indices
    for i in 1..=p.ell() {
        if i == j || i == k {
            continue;
        }
        let gamma = p.exponents[i - 1] as i64;
        let (ui, vi) = (u.exponent_at(i), v.exponent_at(i));
        if (ui - vi).rem_euclid(gamma) != 0 && (ui + vi).rem_euclid(gamma) == 0 {
            b.apply(NielsenOp::Invert(b.position[i]))?;
        }
    }

    // reorder into V's index order (torsion ascending without k, then aux)
    let mut perm = Vec::with_capacity(b.tuple.len());
    for i in v.present_indices(p) {
        perm.push(b.position[i]);
    }
    for a in 1..=p.aux_count() {
        perm.push(b.position[p.ell() + a]);
    }
    let identity: Vec<usize> = (0..perm.len()).collect();
    if perm != identity {
        b.apply(NielsenOp::Permute(perm))?;
    }

    Ok(b.finish())
}

/// Parses a word over auxiliary generators written like `d1 d2^-1 d1^2`
/// (separators: whitespace or `*`). The letter prefix is arbitrary; indices
/// are 1-based.
pub fn parse_aux_word(s: &str) -> Result<FreeWord, PresError> {
    let mut syllables = Vec::new();
    for token in s.split(|c: char| c.is_whitespace() || c == '*') {
        if token.is_empty() {
            continue;
        }
        let (head, exp) = match token.split_once('^') {
            Some((h, e)) => {
                let exp: i64 = e
                    .parse()
                    .map_err(|_| PresError::MalformedRecord(format!("bad exponent in '{token}'")))?;
                (h, exp)
            }
            None => (token, 1),
        };
        let digits: String = head.chars().skip_while(|c| c.is_alphabetic()).collect();
        let idx: usize = digits
            .parse()
            .map_err(|_| PresError::MalformedRecord(format!("bad generator token '{token}'")))?;
        if idx == 0 {
            return Err(PresError::MalformedRecord(format!("bad generator token '{token}'")));
        }
        syllables.push((idx, exp));
    }
    Ok(FreeWord::from_syllables(syllables))
}
