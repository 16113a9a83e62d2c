//! The mixed evaluation representation into 2x2 matrices over
//! `K[t]/(t^p - 1)`, Fox-Jacobian evaluation, the determinant invariant
//! `Pi(u1, u2, 1) * D(V, U)`, and invariant-based inequivalence
//! certification.
//!
//! The representation sends `s_1` to `diag(zeta_1 t, zeta_1^-1 t^-1)`,
//! `s_2` to `diag(t^-1, t)`, the remaining torsion generators to constant
//! embeddings of a numeric representation of the quotient killing `s_2`,
//! and every auxiliary generator to the identity. Here `p >= 3` is the
//! shared divisor of the first two exponents and `zeta_1` a primitive
//! root for the first. Coefficients are generic: exact cyclotomic when no
//! numeric matrices are needed, complex floating point otherwise.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::presentation::{
    is_exceptional, mod_inverse_exponents, quotient, ExceptionalCondition, FuchsianPresentation,
    PresError, QuotientKind, StandardGenSys,
};
use crate::ring::{pi_product, ApproxC, Coefficient, RingElement, RingError, RingMatrix};
use crate::sl2::{build_cyclic_faithful, build_quotient_rep, RepData, Sl2Error};
use crate::word::{fox_derivative, FoxPolynomial, FreeWord, WordError};

/// Errors of the invariant pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaError {
    /// The first two exponents share no divisor of size at least 3.
    NoSharedDivisor,
    /// The exact backend was requested but a generator image is not
    /// expressible in exact coefficients.
    BackendUnavailable,
    UnknownGenerator(usize),
    CheckFailed { relator: String, variable: usize, deviation: f64 },
    ExceptionalPresentation(ExceptionalCondition),
    Build(Sl2Error),
    Ring(RingError),
    Pres(PresError),
    Word(WordError),
}

impl fmt::Display for EtaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaError::NoSharedDivisor => {
                write!(f, "no generator pair shares a divisor of size at least 3")
            }
            EtaError::BackendUnavailable => write!(f, "exact backend unavailable for this input"),
            EtaError::UnknownGenerator(i) => write!(f, "unknown generator symbol {i}"),
            EtaError::CheckFailed { relator, variable, deviation } => write!(
                f,
                "annihilation check failed for relator {relator} at variable {variable} \
                 (deviation {deviation:e})"
            ),
            EtaError::ExceptionalPresentation(c) => {
                write!(f, "presentation matches exceptional condition {c}")
            }
            EtaError::Build(e) => write!(f, "{e}"),
            EtaError::Ring(e) => write!(f, "{e}"),
            EtaError::Pres(e) => write!(f, "{e}"),
            EtaError::Word(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EtaError {}

impl From<Sl2Error> for EtaError {
    fn from(e: Sl2Error) -> Self {
        EtaError::Build(e)
    }
}

impl From<RingError> for EtaError {
    fn from(e: RingError) -> Self {
        EtaError::Ring(e)
    }
}

impl From<PresError> for EtaError {
    fn from(e: PresError) -> Self {
        EtaError::Pres(e)
    }
}

impl From<WordError> for EtaError {
    fn from(e: WordError) -> Self {
        EtaError::Word(e)
    }
}

/// A 2x2 matrix over `K[t]/(t^p - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<C: Coefficient> {
    pub e: [RingElement<C>; 4],
}

impl<C: Coefficient> Mat2<C> {
    pub fn identity(p: u32) -> Self {
        let (o, z) = (RingElement::one(p), RingElement::zero(p));
        Mat2 { e: [o.clone(), z.clone(), z, o] }
    }

    pub fn zero(p: u32) -> Self {
        let z = RingElement::<C>::zero(p);
        Mat2 { e: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn diag(a: RingElement<C>, d: RingElement<C>) -> Self {
        let z = RingElement::zero(a.modulus());
        Mat2 { e: [a, z.clone(), z, d] }
    }

    pub fn constant(p: u32, entries: [C; 4]) -> Self {
        let [a, b, c, d] = entries;
        Mat2 {
            e: [
                RingElement::constant(p, a),
                RingElement::constant(p, b),
                RingElement::constant(p, c),
                RingElement::constant(p, d),
            ],
        }
    }

    pub fn modulus(&self) -> u32 {
        self.e[0].modulus()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.e;
        let [w, x, y, z] = &o.e;
        Mat2 {
            e: [
                a.mul(w).add(&b.mul(y)),
                a.mul(x).add(&b.mul(z)),
                c.mul(w).add(&d.mul(y)),
                c.mul(x).add(&d.mul(z)),
            ],
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2 {
            e: [
                self.e[0].add(&o.e[0]),
                self.e[1].add(&o.e[1]),
                self.e[2].add(&o.e[2]),
                self.e[3].add(&o.e[3]),
            ],
        }
    }

    pub fn scale(&self, s: &RingElement<C>) -> Self {
        Mat2 {
            e: [
                self.e[0].mul(s),
                self.e[1].mul(s),
                self.e[2].mul(s),
                self.e[3].mul(s),
            ],
        }
    }

    pub fn scale_int(&self, s: i64) -> Self {
        let c = RingElement::constant(self.modulus(), C::from_i64(s));
        self.scale(&c)
    }

    pub fn det(&self) -> RingElement<C> {
        self.e[0].mul(&self.e[3]).sub(&self.e[1].mul(&self.e[2]))
    }

    /// The adjugate, which inverts a determinant-1 matrix.
    pub fn inverse_unimodular(&self) -> Self {
        Mat2 {
            e: [
                self.e[3].clone(),
                self.e[1].neg(),
                self.e[2].neg(),
                self.e[0].clone(),
            ],
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse_unimodular() } else { self.clone() };
        let mut acc = Mat2::identity(self.modulus());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.e.iter().all(|x| x.is_zero_within(tol))
    }

    /// Largest numeric deviation from the zero matrix.
    pub fn zero_deviation(&self) -> f64 {
        self.e
            .iter()
            .flat_map(|x| x.approx_coeffs())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// The evaluation representation: one matrix image per group generator
/// (torsion generators first, then auxiliaries).
#[derive(Debug, Clone)]
pub struct EtaRep<C: Coefficient> {
    /// Modulus of the coefficient ring `K[t]/(t^p - 1)`.
    pub p: u32,
    /// Order of the first root, the first exponent.
    pub q: u64,
    /// Exponent of the chosen primitive root for the first generator.
    pub zeta_k: u32,
    pub images: Vec<Mat2<C>>,
    /// The numeric quotient representation the constant images came from.
    pub quotient_rep: RepData,
}

impl<C: Coefficient> EtaRep<C> {
    pub fn image(&self, generator: usize) -> Result<&Mat2<C>, EtaError> {
        self.images.get(generator - 1).ok_or(EtaError::UnknownGenerator(generator))
    }

    pub fn zeta1(&self) -> C {
        C::root_of_unity(self.q, self.zeta_k as i64)
    }
}

/// The shared modulus for a generator pair: their gcd when it is at
/// least 3.
pub fn shared_divisor(gamma_a: u32, gamma_b: u32) -> Option<u32> {
    let mut a = gamma_a;
    let mut b = gamma_b;
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a >= 3 {
        Some(a)
    } else {
        None
    }
}

/// True when the pipeline can run with exact cyclotomic coefficients: no
/// torsion generator beyond the first two needs a numeric image.
pub fn exact_backend_applies(p: &FuchsianPresentation) -> bool {
    p.exponents().iter().skip(2).all(|&g| g <= 2)
}

/// Builds the evaluation representation for the pair at positions 1, 2.
/// Callers wanting another pair permute the presentation first.
pub fn build_eta<C: Coefficient>(
    pres: &FuchsianPresentation,
    root_choices: Option<&[u32]>,
    seed: u64,
) -> Result<EtaRep<C>, EtaError> {
    let exps = pres.exponents();
    if exps.len() < 2 {
        return Err(EtaError::NoSharedDivisor);
    }
    let p = shared_divisor(exps[0], exps[1]).ok_or(EtaError::NoSharedDivisor)?;
    let q = exps[0] as u64;
    let zeta_k = root_choices.map(|rc| rc[0]).unwrap_or(1);

    let quotient_rep = build_quotient_rep(pres, 2, 1, root_choices, seed)?;

    let zeta1 = C::root_of_unity(q, zeta_k as i64);
    let mut images = Vec::with_capacity(pres.ell() + pres.aux_count());
    images.push(Mat2::diag(
        RingElement::monomial(p, 1, zeta1.clone()),
        RingElement::monomial(p, -1, zeta1.conj()),
    ));
    images.push(Mat2::diag(RingElement::t_power(p, -1), RingElement::t_power(p, 1)));
    for i in 3..=pres.ell() {
        let m = quotient_rep.image(i);
        let entries = m.entries();
        let mut converted = [C::zero(), C::zero(), C::zero(), C::zero()];
        for (slot, z) in converted.iter_mut().zip(entries.iter()) {
            *slot = C::from_complex(*z).ok_or(EtaError::BackendUnavailable)?;
        }
        images.push(Mat2::constant(p, converted));
    }
    for _ in 0..pres.aux_count() {
        images.push(Mat2::identity(p));
    }

    Ok(EtaRep { p, q, zeta_k, images, quotient_rep })
}

/// How a generating system's tuple positions map to group generators.
#[derive(Debug, Clone)]
pub struct TupleLayout {
    /// Generator index per tuple position (torsion ascending without the
    /// missing one, then auxiliaries).
    pub generators: Vec<usize>,
    /// The tuple exponent per position (1 for auxiliaries).
    pub exponents: Vec<i64>,
}

pub fn tuple_layout(pres: &FuchsianPresentation, sys: &StandardGenSys) -> TupleLayout {
    let mut generators = Vec::new();
    let mut exponents = Vec::new();
    for i in sys.present_indices(pres) {
        generators.push(i);
        exponents.push(sys.exponent_at(i));
    }
    for a in 1..=pres.aux_count() {
        generators.push(pres.ell() + a);
        exponents.push(1);
    }
    TupleLayout { generators, exponents }
}

/// The images of the tuple symbols `X_i = s_{g(i)}^{u_{g(i)}}`.
pub fn symbol_images<C: Coefficient>(
    eta: &EtaRep<C>,
    layout: &TupleLayout,
) -> Result<Vec<Mat2<C>>, EtaError> {
    layout
        .generators
        .iter()
        .zip(layout.exponents.iter())
        .map(|(&g, &u)| Ok(eta.image(g)?.pow(u)))
        .collect()
}

/// Evaluates a word in tuple symbols (1-based positions).
pub fn eval_word<C: Coefficient>(
    symbols: &[Mat2<C>],
    w: &FreeWord,
    p: u32,
) -> Result<Mat2<C>, EtaError> {
    let mut acc = Mat2::identity(p);
    for &(g, e) in w.syllables() {
        let m = symbols.get(g - 1).ok_or(EtaError::UnknownGenerator(g))?;
        acc = acc.mul(&m.pow(e));
    }
    Ok(acc)
}

/// Evaluates a Fox polynomial in tuple symbols: ring-homomorphic in both
/// addition and multiplication.
pub fn eval_eta<C: Coefficient>(
    symbols: &[Mat2<C>],
    poly: &FoxPolynomial,
    p: u32,
) -> Result<Mat2<C>, EtaError> {
    if let Some(m) = eval_single_symbol(symbols, poly, p)? {
        return Ok(m);
    }
    let mut acc = Mat2::zero(p);
    for (w, coeff) in poly.terms() {
        let m = eval_word(symbols, w, p)?;
        acc = acc.add(&m.scale_int(coeff));
    }
    Ok(acc)
}

// Fast path for polynomials whose terms are all powers of one symbol (the
// shape of every torsion-power derivative): running products instead of
// one independent power per term.
fn eval_single_symbol<C: Coefficient>(
    symbols: &[Mat2<C>],
    poly: &FoxPolynomial,
    p: u32,
) -> Result<Option<Mat2<C>>, EtaError> {
    let mut generator: Option<usize> = None;
    let mut terms: Vec<(i64, i64)> = Vec::new();
    for (w, coeff) in poly.terms() {
        match w.syllables() {
            [] => terms.push((0, coeff)),
            [(g, e)] => {
                if *generator.get_or_insert(*g) != *g {
                    return Ok(None);
                }
                terms.push((*e, coeff));
            }
            _ => return Ok(None),
        }
    }
    let g = match generator {
        Some(g) => g,
        None => return Ok(None),
    };
    let base = symbols.get(g - 1).ok_or(EtaError::UnknownGenerator(g))?;
    let base_inv = base.inverse_unimodular();
    terms.sort_unstable();
    let mut acc = Mat2::zero(p);
    let mut cur_exp = 0i64;
    let mut cur = Mat2::identity(p);
    for &(e, coeff) in terms.iter().filter(|&&(e, _)| e >= 0) {
        while cur_exp < e {
            cur = cur.mul(base);
            cur_exp += 1;
        }
        acc = acc.add(&cur.scale_int(coeff));
    }
    cur_exp = 0;
    cur = Mat2::identity(p);
    for &(e, coeff) in terms.iter().rev().filter(|&&(e, _)| e < 0) {
        while cur_exp > e {
            cur = cur.mul(&base_inv);
            cur_exp -= 1;
        }
        acc = acc.add(&cur.scale_int(coeff));
    }
    Ok(Some(acc))
}

/// Canonical lifts of V's tuple entries as words in U's tuple symbols: the
/// power lift at shared indices and the rotated-relator word at V's extra
/// index.
pub fn standard_lifts(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
) -> Result<Vec<FreeWord>, PresError> {
    u.validate_for(pres)?;
    v.validate_for(pres)?;
    let z = mod_inverse_exponents(pres, u)?;
    let layout_u = tuple_layout(pres, u);
    let pos_of = |g: usize| -> usize {
        layout_u.generators.iter().position(|&x| x == g).expect("generator present") + 1
    };
    let j = u.missing();

    let mut lifts = Vec::new();
    for i in v.present_indices(pres) {
        if i != j {
            lifts.push(FreeWord::power(pos_of(i), z[i - 1] * v.exponent_at(i)));
        } else {
            let y0 = rotated_relator_word(pres, u, &z, &layout_u).inverse();
            lifts.push(y0.pow(v.exponent_at(j)));
        }
    }
    for a in 1..=pres.aux_count() {
        lifts.push(FreeWord::generator(pos_of(pres.ell() + a)));
    }
    Ok(lifts)
}

// The word in U's symbols representing s_{j+1} ... s_{j-1} (the long
// relator rotated to isolate the missing generator), which equals
// s_j^{-1} in the group.
fn rotated_relator_word(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    z: &[i64],
    layout_u: &TupleLayout,
) -> FreeWord {
    let pos_of = |g: usize| -> usize {
        layout_u.generators.iter().position(|&x| x == g).expect("generator present") + 1
    };
    let j = u.missing();
    let ell = pres.ell();
    let mut w = FreeWord::identity();
    for i in j + 1..=ell {
        w = w.concat(&FreeWord::power(pos_of(i), z[i - 1]));
    }
    for &(g, e) in pres.aux_word().syllables() {
        w = w.concat(&FreeWord::power(pos_of(g), e));
    }
    for i in 1..j {
        w = w.concat(&FreeWord::power(pos_of(i), z[i - 1]));
    }
    w
}

/// The defining relators written in U's tuple symbols: the torsion powers
/// `X_h^{gamma}` and the rotated long relator power.
pub fn relators_in_symbols(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
) -> Result<Vec<(String, FreeWord)>, PresError> {
    u.validate_for(pres)?;
    let z = mod_inverse_exponents(pres, u)?;
    let layout_u = tuple_layout(pres, u);
    let mut out = Vec::new();
    for (pos, &g) in layout_u.generators.iter().enumerate() {
        if g <= pres.ell() {
            let gamma = pres.exponents()[g - 1] as i64;
            out.push((format!("X{}^{}", pos + 1, gamma), FreeWord::power(pos + 1, gamma)));
        }
    }
    let j = u.missing();
    let gamma_j = pres.exponents()[j - 1] as i64;
    let r0 = rotated_relator_word(pres, u, &z, &layout_u).pow(gamma_j);
    out.push(("R0".to_string(), r0));
    Ok(out)
}

/// The invariant `Pi(u1, u2, 1) * D(V, U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue<C: Coefficient> {
    pub value: RingElement<C>,
    pub exact: bool,
}

/// Assembles the evaluated Fox Jacobian of the lifts and multiplies its
/// determinant by `Pi(u1, u2, 1)`.
pub fn invariant_product<C: Coefficient>(
    eta: &EtaRep<C>,
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    lifts: &[FreeWord],
) -> Result<InvariantValue<C>, EtaError> {
    let layout = tuple_layout(pres, u);
    let n = layout.generators.len();
    assert_eq!(lifts.len(), n, "one lift per tuple position");
    let symbols = symbol_images(eta, &layout)?;

    let mut blocks: Vec<Vec<Option<Mat2<C>>>> = vec![vec![None; n]; n];
    let mut off_diag_rows: Vec<usize> = Vec::new();
    for (h, lift) in lifts.iter().enumerate() {
        for i in 0..n {
            let d = fox_derivative(lift, i + 1, n)?;
            if d.is_zero() {
                continue;
            }
            if i != h && !off_diag_rows.contains(&h) {
                off_diag_rows.push(h);
            }
            blocks[h][i] = Some(eval_eta(&symbols, &d, eta.p)?);
        }
    }

    // Block-diagonal except at most one block row: after a symmetric block
    // permutation moving that row last the matrix is block triangular, so
    // the determinant is the product of the diagonal block determinants.
    let det = if off_diag_rows.len() <= 1 {
        let mut det = RingElement::<C>::one(eta.p);
        for (h, row) in blocks.iter().enumerate() {
            let block = row[h].clone().unwrap_or_else(|| Mat2::zero(eta.p));
            det = det.mul(&block.det());
        }
        det
    } else {
        let mut m = RingMatrix::zero(2 * n, eta.p);
        for (h, row) in blocks.iter().enumerate() {
            for (i, b) in row.iter().enumerate() {
                if let Some(b) = b {
                    m.set(2 * h, 2 * i, b.e[0].clone());
                    m.set(2 * h, 2 * i + 1, b.e[1].clone());
                    m.set(2 * h + 1, 2 * i, b.e[2].clone());
                    m.set(2 * h + 1, 2 * i + 1, b.e[3].clone());
                }
            }
        }
        m.det_division_free()
    };

    let pi = reference_pi(eta, u)?;
    Ok(InvariantValue { value: pi.mul(&det), exact: C::EXACT })
}

/// `Pi(u1, u2, 1)` for U's first two exponents under the chosen root.
pub fn reference_pi<C: Coefficient>(
    eta: &EtaRep<C>,
    u: &StandardGenSys,
) -> Result<RingElement<C>, EtaError> {
    let zeta = eta.zeta1();
    Ok(pi_product(
        u.exponent_at(1),
        u.exponent_at(2),
        &C::one(),
        eta.p,
        eta.q,
        &zeta,
    )?)
}

/// A recovered scalar from matching an invariant against `Pi(v1, v2, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractedR {
    pub re: f64,
    pub im: f64,
    /// Largest coefficient mismatch of `inv - r * Pi(v1, v2, 1)`.
    pub residual: f64,
}

/// Solves `inv = Pi(v1, v2, r)` for the scalar `r` by least squares over
/// the numeric coefficient embedding; `None` when no consistent scalar
/// exists within `tol`.
pub fn extract_r<C: Coefficient>(
    inv: &InvariantValue<C>,
    v1: i64,
    v2: i64,
    eta: &EtaRep<C>,
    tol: f64,
) -> Option<ExtractedR> {
    let zeta = eta.zeta1();
    let pi = pi_product(v1, v2, &C::one(), eta.p, eta.q, &zeta).ok()?;
    let pc = pi.approx_coeffs();
    let ic = inv.value.approx_coeffs();
    let denom: f64 = pc.iter().map(|z| z.norm_sqr()).sum();
    if denom < 1e-30 {
        return None;
    }
    let num: Complex64 = pc.iter().zip(ic.iter()).map(|(p, i)| p.conj() * i).sum();
    let r = num / denom;
    let residual = pc
        .iter()
        .zip(ic.iter())
        .map(|(p, i)| (i - r * p).norm())
        .fold(0.0, f64::max);
    if residual > tol {
        return None;
    }
    Some(ExtractedR { re: r.re, im: r.im, residual })
}

/// One entry of the relator annihilation sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnihilationEntry {
    pub relator: String,
    pub variable: usize,
    pub deviation: f64,
    pub pass: bool,
}

/// Outcome of the relator annihilation sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnihilationReport {
    pub entries: Vec<AnnihilationEntry>,
    pub tolerance: f64,
}

/// Checks `Pi(u1, u2, 1) * eval(dR/dX_i) = 0` for every defining relator
/// `R` and variable index; the well-definedness of the invariant rests on
/// exactly these products vanishing.
pub fn relator_annihilation_check<C: Coefficient>(
    eta: &EtaRep<C>,
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
) -> Result<AnnihilationReport, EtaError> {
    let tolerance = 1e-8;
    let layout = tuple_layout(pres, u);
    let n = layout.generators.len();
    let symbols = symbol_images(eta, &layout)?;
    let pi = reference_pi(eta, u)?;
    let mut entries = Vec::new();
    for (name, relator) in relators_in_symbols(pres, u)? {
        for i in 1..=n {
            let d = fox_derivative(&relator, i, n)?;
            let m = eval_eta(&symbols, &d, eta.p)?.scale(&pi);
            let deviation = m.zero_deviation();
            let pass = if C::EXACT {
                m.is_zero_within(0.0)
            } else {
                deviation <= tolerance
            };
            if !pass {
                return Err(EtaError::CheckFailed { relator: name, variable: i, deviation });
            }
            entries.push(AnnihilationEntry { relator: name.clone(), variable: i, deviation, pass });
        }
    }
    Ok(AnnihilationReport { entries, tolerance })
}

/// Options for the certification sweep.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub seed: u64,
    pub tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { seed: 1, tol: 1e-8 }
    }
}

/// Per-position outcome of the certification sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PositionStatus {
    /// The invariants agree at this position.
    Consistent,
    /// The invariants differ: a witness of inequivalence.
    Witness,
    /// No partner exponent shares a divisor of size at least 3.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositionResult {
    pub index: usize,
    pub gamma: u32,
    pub partner: Option<usize>,
    pub p: Option<u32>,
    pub status: PositionStatus,
    /// The recovered scalar of the matched invariant form, when available.
    pub r: Option<ExtractedR>,
    /// Coefficients of `Pi(u1, u2, 1)` as (re, im), witness positions only.
    pub expected: Option<Vec<(f64, f64)>>,
    /// Coefficients of the computed invariant, witness positions only.
    pub actual: Option<Vec<(f64, f64)>>,
}

/// Overall verdict of the certification sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertVerdict {
    Inequivalent,
    Consistent,
    /// Every position lacked a usable partner.
    AllSkipped,
}

/// Outcome of the invariant certification sweep.
#[derive(Debug, Clone, Serialize)]
pub struct CertifiedReport {
    pub verdict: CertVerdict,
    pub backend: &'static str,
    pub tolerance: f64,
    /// True when the canonical quotient was applied first.
    pub reduced: bool,
    pub positions: Vec<PositionResult>,
}

fn permuted_problem(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
    first: usize,
    second: usize,
) -> Result<(FuchsianPresentation, StandardGenSys, StandardGenSys), PresError> {
    let ell = pres.ell();
    let mut order = vec![first, second];
    order.extend((1..=ell).filter(|&i| i != first && i != second));
    let exponents: Vec<u32> = order.iter().map(|&i| pres.exponents()[i - 1]).collect();
    let p2 = FuchsianPresentation::new(
        exponents,
        pres.genus(),
        pres.crosscaps(),
        pres.extra_relator().cloned(),
    )?;
    let remap = |sys: &StandardGenSys| -> StandardGenSys {
        let missing = order.iter().position(|&i| i == sys.missing()).unwrap() + 1;
        let exps: Vec<i64> = (1..=ell)
            .filter(|&t| t != missing)
            .map(|t| sys.exponent_at(order[t - 1]))
            .collect();
        StandardGenSys::new(missing, exps)
    };
    Ok((p2, remap(u), remap(v)))
}

fn reduce_to_canonical(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
) -> Result<(FuchsianPresentation, StandardGenSys, StandardGenSys, bool), PresError> {
    let reduced = quotient(pres, QuotientKind::CanonicalFour);
    if reduced == *pres {
        return Ok((pres.clone(), u.clone(), v.clone(), false));
    }
    // exponents only shrink (never drop), so systems carry over; units mod
    // gamma stay units mod any divisor of gamma
    let remap = |sys: &StandardGenSys| {
        let exps = (1..=pres.ell())
            .filter(|&i| i != sys.missing())
            .map(|i| sys.exponent_at(i).rem_euclid(reduced.exponents()[i - 1] as i64))
            .collect();
        StandardGenSys::new(sys.missing(), exps)
    };
    Ok((reduced.clone(), remap(u), remap(v), true))
}

fn best_partner(exponents: &[u32], i: usize) -> Option<(usize, u32)> {
    let mut best: Option<(usize, u32)> = None;
    for (jm1, &g) in exponents.iter().enumerate() {
        let j = jm1 + 1;
        if j == i || g < 3 {
            continue;
        }
        if let Some(p) = shared_divisor(exponents[i - 1], g) {
            if best.map(|(_, bp)| p > bp).unwrap_or(true) {
                best = Some((j, p));
            }
        }
    }
    best
}

fn certify_with_backend<C: Coefficient>(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
    opts: &CertifyOptions,
    reduced: bool,
) -> Result<CertifiedReport, EtaError> {
    let mut positions = Vec::new();
    let mut any_witness = false;
    let mut any_checked = false;

    for i in 1..=pres.ell() {
        let gamma = pres.exponents()[i - 1];
        if gamma < 5 {
            continue;
        }
        let partner = best_partner(pres.exponents(), i);
        let (j, p) = match partner {
            Some(x) => x,
            None => {
                positions.push(PositionResult {
                    index: i,
                    gamma,
                    partner: None,
                    p: None,
                    status: PositionStatus::Skipped,
                    r: None,
                    expected: None,
                    actual: None,
                });
                continue;
            }
        };
        any_checked = true;
        let (p2, u2, v2) = permuted_problem(pres, u, v, i, j)?;
        let eta: EtaRep<C> = build_eta(&p2, None, opts.seed)?;
        let lifts = standard_lifts(&p2, &u2, &v2)?;
        let inv = invariant_product(&eta, &p2, &u2, &lifts)?;
        let pi = reference_pi(&eta, &u2)?;
        let consistent = inv.value.eq_within(&pi, opts.tol);
        let r = extract_r(&inv, v2.exponent_at(1), v2.exponent_at(2), &eta, 1e-6);
        let (status, expected, actual) = if consistent {
            (PositionStatus::Consistent, None, None)
        } else {
            any_witness = true;
            let ser = |x: &RingElement<C>| {
                Some(x.approx_coeffs().iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())
            };
            (PositionStatus::Witness, ser(&pi), ser(&inv.value))
        };
        positions.push(PositionResult {
            index: i,
            gamma,
            partner: Some(j),
            p: Some(p),
            status,
            r,
            expected,
            actual,
        });
    }

    let verdict = if any_witness {
        CertVerdict::Inequivalent
    } else if any_checked {
        CertVerdict::Consistent
    } else {
        CertVerdict::AllSkipped
    };
    Ok(CertifiedReport {
        verdict,
        backend: if C::EXACT { "exact" } else { "approx" },
        tolerance: opts.tol,
        reduced,
        positions,
    })
}

/// Sweeps every tuple position with exponent at least 5, builds the
/// evaluation representation with that position first and its best
/// partner second, and compares the invariant of V against
/// `Pi(u1, u2, 1)`. A difference witnesses inequivalence; agreement at
/// every usable position is reported as consistent, never as a proof of
/// equivalence.
pub fn certify_inequivalence(
    pres: &FuchsianPresentation,
    u: &StandardGenSys,
    v: &StandardGenSys,
    opts: &CertifyOptions,
) -> Result<CertifiedReport, EtaError> {
    u.validate_for(pres)?;
    v.validate_for(pres)?;
    if let Some(c) = is_exceptional(pres) {
        return Err(EtaError::ExceptionalPresentation(c));
    }
    let (pres, u, v, reduced) = reduce_to_canonical(pres, u, v)?;
    if exact_backend_applies(&pres) {
        certify_with_backend::<crate::cyclo::CycNumber>(&pres, &u, &v, opts, reduced)
    } else {
        certify_with_backend::<ApproxC>(&pres, &u, &v, opts, reduced)
    }
}

/// Numeric spot-check of an equivalence certificate: under several
/// independently built representations, the certificate's final tuple must
/// evaluate to the same matrices as V's standard tuple. Probabilistic (the
/// representations are not faithful), never a proof.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub replay_ok: bool,
    pub representations: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

pub fn verify_certificate(
    pres: &FuchsianPresentation,
    cert: &crate::presentation::NielsenCertificate,
    v: &StandardGenSys,
    seed: u64,
) -> Result<CertificateCheck, EtaError> {
    let tol = 1e-7;
    let replay_ok = cert.replay();
    let layout_v = tuple_layout(pres, v);
    let mut max_deviation: f64 = 0.0;
    let reps = 5usize;
    for s in 0..reps as u64 {
        let rep = build_cyclic_faithful(pres, None, seed.wrapping_add(s))?;
        let final_tuple = cert.final_tuple();
        for (pos, (&g, &e)) in layout_v
            .generators
            .iter()
            .zip(layout_v.exponents.iter())
            .enumerate()
        {
            let target = rep.image(g).pow(e);
            let got = rep.eval(&final_tuple[pos]);
            max_deviation = max_deviation.max(got.dist(&target));
        }
    }
    Ok(CertificateCheck {
        replay_ok,
        representations: reps,
        max_deviation,
        pass: replay_ok && max_deviation <= tol,
    })
}
