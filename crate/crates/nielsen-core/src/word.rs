//! Reduced words in a finitely generated free group, Nielsen operations on
//! tuples of words, and the Fox-derivative calculus over the integral group
//! ring of the free group.
//!
//! Generator indices are 1-based (the generators are `X_1, X_2, ...`);
//! positions inside a tuple of words are 0-based.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use alloc::collections::BTreeMap;
use serde::{Deserialize, Serialize};

/// Errors of the word layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    /// A generator or tuple index was outside the allowed range.
    IndexOutOfRange { index: usize, bound: usize },
    /// The vector passed to `Permute` is not a permutation.
    NotAPermutation,
    /// Matrix dimensions do not allow the requested product.
    DimensionMismatch,
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            WordError::NotAPermutation => write!(f, "not a permutation"),
            WordError::DimensionMismatch => write!(f, "matrix dimension mismatch"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WordError {}

/// A freely reduced word, stored in syllable (run-length) form.
///
/// Invariants: adjacent syllables carry distinct generator indices, no
/// syllable has exponent zero, and the empty list is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FreeWord {
    syllables: Vec<(usize, i64)>,
}

impl FreeWord {
    /// The empty word.
    pub fn identity() -> Self {
        FreeWord { syllables: Vec::new() }
    }

    /// The single generator `X_i` (1-based).
    pub fn generator(i: usize) -> Self {
        assert!(i >= 1, "generator indices are 1-based");
        FreeWord { syllables: vec![(i, 1)] }
    }

    /// `X_i^e`.
    pub fn power(i: usize, e: i64) -> Self {
        assert!(i >= 1, "generator indices are 1-based");
        if e == 0 {
            FreeWord::identity()
        } else {
            FreeWord { syllables: vec![(i, e)] }
        }
    }

    /// Builds a reduced word from raw syllables, merging and cancelling as
    /// needed.
    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        let mut w = FreeWord::identity();
        for (g, e) in syllables {
            assert!(g >= 1, "generator indices are 1-based");
            w.push_syllable(g, e);
        }
        w
    }

    fn push_syllable(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    /// Freely reduces a letter sequence; letter `k > 0` is `X_k`, `k < 0` is
    /// `X_{-k}^{-1}`. Zero letters are rejected.
    pub fn normalize(letters: &[i64]) -> Self {
        let mut w = FreeWord::identity();
        for &l in letters {
            assert!(l != 0, "letter 0 has no meaning");
            let g = l.unsigned_abs() as usize;
            w.push_syllable(g, l.signum());
        }
        w
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Word length (number of letters of the reduced word).
    pub fn len(&self) -> u64 {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    /// Largest generator index occurring, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.syllables.iter().map(|&(g, _)| g).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// Reduced concatenation `self * other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &(g, e) in &other.syllables {
            w.push_syllable(g, e);
        }
        w
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Self {
        if k == 0 || self.is_identity() {
            return FreeWord::identity();
        }
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `v * self * v^-1`.
    pub fn conjugate_by(&self, v: &Self) -> Self {
        v.concat(self).concat(&v.inverse())
    }

    /// Iterates over single letters as signed generator indices.
    pub fn letters(&self) -> impl Iterator<Item = i64> + '_ {
        self.syllables.iter().flat_map(|&(g, e)| {
            let l = if e > 0 { g as i64 } else { -(g as i64) };
            core::iter::repeat(l).take(e.unsigned_abs() as usize)
        })
    }

    /// Renders the word with a caller-supplied generator namer.
    pub fn format_with<F: Fn(usize) -> alloc::string::String>(&self, namer: F) -> alloc::string::String {
        use alloc::string::String;
        use core::fmt::Write;
        if self.is_identity() {
            return String::from("1");
        }
        let mut out = String::new();
        for (idx, &(g, e)) in self.syllables.iter().enumerate() {
            if idx > 0 {
                out.push('*');
            }
            let name = namer(g);
            if e == 1 {
                let _ = write!(out, "{name}");
            } else {
                let _ = write!(out, "{name}^{e}");
            }
        }
        out
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(|g| alloc::format!("x{g}")))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

// Shortlex order on the letter expansion: shorter words first, ties broken
// letter by letter with X_g before X_g^{-1} and smaller indices first. Gives
// FoxPolynomial a canonical term order, so equality is structural.
impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.letters().zip(other.letters()) {
            let key = |l: i64| (l.unsigned_abs(), l < 0);
            match key(a).cmp(&key(b)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the integral group ring `ZF(X)`: a finite integer-linear
/// combination of reduced words.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FoxPolynomial {
    terms: BTreeMap<FreeWord, i64>,
}

impl FoxPolynomial {
    pub fn zero() -> Self {
        FoxPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        FoxPolynomial::from_word(FreeWord::identity())
    }

    pub fn from_word(w: FreeWord) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, 1);
        FoxPolynomial { terms }
    }

    pub fn constant(c: i64) -> Self {
        let mut p = FoxPolynomial::zero();
        p.add_term(FreeWord::identity(), c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeWord, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: FreeWord, c: i64) {
        use alloc::collections::btree_map::Entry;
        if c == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        FoxPolynomial {
            terms: self.terms.iter().map(|(w, &c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: i64) -> Self {
        if s == 0 {
            return FoxPolynomial::zero();
        }
        FoxPolynomial {
            terms: self.terms.iter().map(|(w, &c)| (w.clone(), c * s)).collect(),
        }
    }

    /// Group-ring product: concatenates-and-reduces words, distributes over
    /// terms.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = FoxPolynomial::zero();
        for (wa, ca) in self.terms() {
            for (wb, cb) in other.terms() {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }

    /// Left multiplication by a single word.
    pub fn word_mul(w: &FreeWord, p: &Self) -> Self {
        let mut out = FoxPolynomial::zero();
        for (t, c) in p.terms() {
            out.add_term(w.concat(t), c);
        }
        out
    }
}

impl fmt::Debug for FoxPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{w}")?;
        }
        Ok(())
    }
}

/// An elementary Nielsen operation on a tuple of words. Tuple positions are
/// 0-based; `Permute(p)` sends the old tuple `t` to the tuple with entries
/// `t[p[0]], t[p[1]], ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NielsenOp {
    Permute(Vec<usize>),
    /// Replace entry `i` by `entry_i * entry_j`.
    RightMultiply { i: usize, j: usize },
    /// Replace entry `i` by `entry_j * entry_i`.
    LeftMultiply { i: usize, j: usize },
    /// Replace entry `i` by its inverse.
    Invert(usize),
}

impl NielsenOp {
    fn check(&self, arity: usize) -> Result<(), WordError> {
        let oob = |index: usize| WordError::IndexOutOfRange { index, bound: arity };
        match self {
            NielsenOp::Permute(p) => {
                if p.len() != arity {
                    return Err(WordError::NotAPermutation);
                }
                let mut seen = vec![false; arity];
                for &s in p {
                    if s >= arity {
                        return Err(oob(s));
                    }
                    if seen[s] {
                        return Err(WordError::NotAPermutation);
                    }
                    seen[s] = true;
                }
                Ok(())
            }
            NielsenOp::RightMultiply { i, j } | NielsenOp::LeftMultiply { i, j } => {
                if *i == *j {
                    return Err(WordError::NotAPermutation);
                }
                if *i >= arity {
                    return Err(oob(*i));
                }
                if *j >= arity {
                    return Err(oob(*j));
                }
                Ok(())
            }
            NielsenOp::Invert(i) => {
                if *i >= arity {
                    return Err(oob(*i));
                }
                Ok(())
            }
        }
    }

    /// A short chain of elementary operations undoing `self`.
    pub fn inverse(&self) -> Vec<NielsenOp> {
        match self {
            NielsenOp::Permute(p) => {
                let mut inv = vec![0usize; p.len()];
                for (dst, &src) in p.iter().enumerate() {
                    inv[src] = dst;
                }
                vec![NielsenOp::Permute(inv)]
            }
            // (x_i x_j) x_j^-1 = x_i, realized with the j-entry inverted
            // around the multiplication.
            NielsenOp::RightMultiply { i, j } => vec![
                NielsenOp::Invert(*j),
                NielsenOp::RightMultiply { i: *i, j: *j },
                NielsenOp::Invert(*j),
            ],
            NielsenOp::LeftMultiply { i, j } => vec![
                NielsenOp::Invert(*j),
                NielsenOp::LeftMultiply { i: *i, j: *j },
                NielsenOp::Invert(*j),
            ],
            NielsenOp::Invert(i) => vec![NielsenOp::Invert(*i)],
        }
    }
}

/// Applies one elementary Nielsen operation to a tuple of words.
pub fn apply_nielsen(tuple: &[FreeWord], op: &NielsenOp) -> Result<Vec<FreeWord>, WordError> {
    op.check(tuple.len())?;
    let mut out = tuple.to_vec();
    match op {
        NielsenOp::Permute(p) => {
            out = p.iter().map(|&s| tuple[s].clone()).collect();
        }
        NielsenOp::RightMultiply { i, j } => {
            out[*i] = tuple[*i].concat(&tuple[*j]);
        }
        NielsenOp::LeftMultiply { i, j } => {
            out[*i] = tuple[*j].concat(&tuple[*i]);
        }
        NielsenOp::Invert(i) => {
            out[*i] = tuple[*i].inverse();
        }
    }
    Ok(out)
}

/// Applies a chain of operations in order.
pub fn apply_nielsen_chain(
    tuple: &[FreeWord],
    ops: &[NielsenOp],
) -> Result<Vec<FreeWord>, WordError> {
    let mut t = tuple.to_vec();
    for op in ops {
        t = apply_nielsen(&t, op)?;
    }
    Ok(t)
}

/// The derivative of the single syllable `X^e` with respect to its own
/// generator: `1 + X + ... + X^{e-1}` for `e > 0` and
/// `-(X^{-1} + ... + X^{e})` for `e < 0`.
fn syllable_derivative(g: usize, e: i64) -> FoxPolynomial {
    let mut p = FoxPolynomial::zero();
    if e > 0 {
        for k in 0..e {
            p.add_term(FreeWord::power(g, k), 1);
        }
    } else {
        for k in 1..=(-e) {
            p.add_term(FreeWord::power(g, -k), -1);
        }
    }
    p
}

/// The `i`-th Fox derivative of `w`, computed syllable by syllable via the
/// product rule.
pub fn fox_derivative(w: &FreeWord, i: usize, arity: usize) -> Result<FoxPolynomial, WordError> {
    if i < 1 || i > arity {
        return Err(WordError::IndexOutOfRange { index: i, bound: arity });
    }
    if w.max_generator() > arity {
        return Err(WordError::IndexOutOfRange {
            index: w.max_generator(),
            bound: arity,
        });
    }
    let mut out = FoxPolynomial::zero();
    let mut prefix = FreeWord::identity();
    for &(g, e) in w.syllables() {
        if g == i {
            for (t, c) in syllable_derivative(g, e).terms() {
                out.add_term(prefix.concat(t), c);
            }
        }
        prefix = prefix.concat(&FreeWord::power(g, e));
    }
    Ok(out)
}

/// A matrix of Fox polynomials; row `k` holds the derivatives of word `k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FoxJacobian {
    rows: usize,
    cols: usize,
    entries: Vec<FoxPolynomial>,
}

impl FoxJacobian {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![FoxPolynomial::zero(); n * n];
        for k in 0..n {
            entries[k * n + k] = FoxPolynomial::one();
        }
        FoxJacobian { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FoxPolynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn mul(&self, other: &Self) -> Result<Self, WordError> {
        if self.cols != other.rows {
            return Err(WordError::DimensionMismatch);
        }
        let mut entries = vec![FoxPolynomial::zero(); self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b);
                    entries[r * other.cols + c] = entries[r * other.cols + c].add(&prod);
                }
            }
        }
        Ok(FoxJacobian { rows: self.rows, cols: other.cols, entries })
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let want = if r == c { FoxPolynomial::one() } else { FoxPolynomial::zero() };
                if *self.get(r, c) != want {
                    return false;
                }
            }
        }
        true
    }

    /// Applies a word substitution to every entry.
    pub fn substitute(&self, images: &[FreeWord]) -> Self {
        FoxJacobian {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| substitute_poly(p, images)).collect(),
        }
    }
}

/// The Fox Jacobian of a list of words; rectangular rows are allowed.
pub fn jacobian(words: &[FreeWord], arity: usize) -> Result<FoxJacobian, WordError> {
    let mut entries = Vec::with_capacity(words.len() * arity);
    for w in words {
        for i in 1..=arity {
            entries.push(fox_derivative(w, i, arity)?);
        }
    }
    Ok(FoxJacobian { rows: words.len(), cols: arity, entries })
}

/// The Jacobian of the tuple obtained by applying `op` to the identity tuple
/// `(X_1, ..., X_arity)`: a generalized elementary matrix.
pub fn jacobian_of_elementary(op: &NielsenOp, arity: usize) -> Result<FoxJacobian, WordError> {
    let id: Vec<FreeWord> = (1..=arity).map(FreeWord::generator).collect();
    let tuple = apply_nielsen(&id, op)?;
    jacobian(&tuple, arity)
}

/// The homomorphism `X_g -> images[g-1]` applied to a word.
pub fn substitute(w: &FreeWord, images: &[FreeWord]) -> FreeWord {
    let mut out = FreeWord::identity();
    for &(g, e) in w.syllables() {
        assert!(g >= 1 && g <= images.len(), "substitution image missing");
        out = out.concat(&images[g - 1].pow(e));
    }
    out
}

/// Term-by-term extension of [`substitute`] to group-ring elements.
pub fn substitute_poly(p: &FoxPolynomial, images: &[FreeWord]) -> FoxPolynomial {
    let mut out = FoxPolynomial::zero();
    for (w, c) in p.terms() {
        out.add_term(substitute(w, images), c);
    }
    out
}

/// Reduced form of `(V_1 R_1^{e_1} V_1^{-1} ... V_q R_q^{e_q} V_q^{-1}) * W`:
/// an alternative lift of the same group element whenever the `R`s are
/// relators.
pub fn perturb_by_relators(w: &FreeWord, insertions: &[(FreeWord, FreeWord, i8)]) -> FreeWord {
    let mut prefix = FreeWord::identity();
    for (v, r, eps) in insertions {
        let conj = r.pow(*eps as i64).conjugate_by(v);
        prefix = prefix.concat(&conj);
    }
    prefix.concat(w)
}
