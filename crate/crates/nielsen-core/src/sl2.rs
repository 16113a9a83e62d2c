//! Numeric construction and verification of cyclic-faithful
//! representations into SL2(C).
//!
//! Each torsion generator of order at least 3 must land on a conjugate of
//! the primitive matrix `diag(zeta, zeta^-1)` for a chosen primitive root
//! `zeta`; order-2 generators are forced to `-I`. The long relator pins the
//! product of all images to the identity. The builder realizes the trace
//! prescriptions by chaining a two-matrix trace solver over partial
//! products with randomized intermediate traces, closing the chain exactly,
//! and verifying the result. A failed build is reported as such, never
//! interpreted as nonexistence.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::presentation::FuchsianPresentation;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Errors of the numeric representation layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sl2Error {
    /// The retry budget ran out. A report, not a nonexistence claim.
    BuildFailed(String),
    /// The generator to diagonalize has a central image.
    DegenerateDiagonalization,
    /// A root choice is incompatible with its exponent.
    BadRootChoice { index: usize, gamma: u32, k: u32 },
}

impl fmt::Display for Sl2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Error::BuildFailed(msg) => write!(f, "representation build failed: {msg}"),
            Sl2Error::DegenerateDiagonalization => {
                write!(f, "image is central and cannot be diagonalized nontrivially")
            }
            Sl2Error::BadRootChoice { index, gamma, k } => {
                write!(f, "root exponent {k} is not a unit mod {gamma} at index {index}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Sl2Error {}

/// A 2x2 complex matrix, in practice of determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Matrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Sl2Matrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Sl2Matrix { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::zero());
        Sl2Matrix::new(o, z, z, o)
    }

    pub fn neg_identity() -> Self {
        let (o, z) = (Complex64::new(-1.0, 0.0), Complex64::zero());
        Sl2Matrix::new(o, z, z, o)
    }

    pub fn diag(x: Complex64, y: Complex64) -> Self {
        let z = Complex64::zero();
        Sl2Matrix::new(x, z, z, y)
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Sl2Matrix::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn neg(&self) -> Self {
        Sl2Matrix::new(-self.a, -self.b, -self.c, -self.d)
    }

    /// The adjugate, which inverts a determinant-1 matrix.
    pub fn inverse(&self) -> Self {
        Sl2Matrix::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut acc = Sl2Matrix::identity();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Largest entrywise absolute difference.
    pub fn dist(&self, o: &Self) -> f64 {
        let ds = [
            (self.a - o.a).norm(),
            (self.b - o.b).norm(),
            (self.c - o.c).norm(),
            (self.d - o.d).norm(),
        ];
        ds.into_iter().fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// `diag(zeta, zeta^-1)` for a unit-modulus `zeta`.
pub fn primitive_matrix(zeta: Complex64) -> Sl2Matrix {
    Sl2Matrix::diag(zeta, zeta.inv())
}

/// `e^{2 pi i k / n}`.
pub fn root_of_unity(n: u32, k: u32) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// A pair (A, B) in SL2 with tr A = x, tr B = y, tr(AB) = z. Closed form:
/// any trace triple is realized by `A = [[x,-1],[1,0]]` together with
/// `B = [[0,b],[b-z,y]]` where `b` solves `b^2 - zb + 1 = 0`.
pub fn fricke_triple(x: Complex64, y: Complex64, z: Complex64) -> (Sl2Matrix, Sl2Matrix) {
    let one = Complex64::new(1.0, 0.0);
    let a = Sl2Matrix::new(x, -one, one, Complex64::zero());
    let b_entry = (z + (z * z - 4.0 * one).sqrt()) / 2.0;
    let b = Sl2Matrix::new(Complex64::zero(), b_entry, b_entry - z, y);
    (a, b)
}

/// Given a fixed matrix `q`, produces `B` in SL2 with `tr B = y` and
/// `tr(qB) = z`. The free off-diagonal parameter keeps the determinant
/// constraint a solvable quadratic for generic `q`; a scalar `q` admits a
/// solution only when `z = q_11 * y`.
pub fn fricke_step(q: &Sl2Matrix, y: Complex64, z: Complex64, rng: &mut ChaCha8Rng) -> Option<Sl2Matrix> {
    let one = Complex64::new(1.0, 0.0);
    if q.b.norm() > 1e-12 || q.c.norm() > 1e-12 {
        // swap roles so the division below lands on the larger entry
        if q.b.norm() >= q.c.norm() {
            // unknowns a, d = y - a, c; b free and random
            let b = random_unit(rng);
            // trace condition: q.a*a + q.b*c + q.c*b + q.d*(y - a) = z
            let beta = (q.d - q.a) / q.b;
            let alpha = (z - q.c * b - q.d * y) / q.b;
            // determinant: a(y - a) - b(alpha + beta a) = 1
            let a = solve_quadratic(one, -(y - b * beta), b * alpha + one)?;
            let c = alpha + beta * a;
            Some(Sl2Matrix::new(a, b, c, y - a))
        } else {
            let c = random_unit(rng);
            let beta = (q.d - q.a) / q.c;
            let alpha = (z - q.b * c - q.d * y) / q.c;
            let a = solve_quadratic(one, -(y - c * beta), c * alpha + one)?;
            let b = alpha + beta * a;
            Some(Sl2Matrix::new(a, b, c, y - a))
        }
    } else if (q.a - q.d).norm() > 1e-12 {
        // diagonal q: the trace condition fixes a
        let a = (z - q.d * y) / (q.a - q.d);
        let d = y - a;
        let bc = a * d - one;
        Some(Sl2Matrix::new(a, one, bc, d))
    } else if (z - q.a * y).norm() < 1e-9 {
        // scalar q: any trace-y matrix works
        Some(Sl2Matrix::new(y, -one, one, Complex64::zero()))
    } else {
        None
    }
}

fn solve_quadratic(a2: Complex64, a1: Complex64, a0: Complex64) -> Option<Complex64> {
    if a2.norm() < 1e-14 {
        if a1.norm() < 1e-14 {
            return None;
        }
        return Some(-a0 / a1);
    }
    let disc = (a1 * a1 - 4.0 * a2 * a0).sqrt();
    Some((-a1 + disc) / (2.0 * a2))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

fn random_trace(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if (z - 2.0).norm() > 1e-3 && (z + 2.0).norm() > 1e-3 {
            return z;
        }
    }
}

/// A built representation: one image per generator of the presentation
/// (torsion generators first, then auxiliaries mapped to the identity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepData {
    #[serde(serialize_with = "serialize_matrices")]
    pub generator_images: Vec<Sl2Matrix>,
    /// `(gamma_i, k_i)` per torsion generator; the chosen root is
    /// `e^{2 pi i k_i / gamma_i}`.
    pub root_choices: Vec<(u32, u32)>,
    pub killed_index: Option<usize>,
    pub diagonalized_index: Option<usize>,
    /// Largest entry of `product(images) - I`.
    pub residual: f64,
}

fn serialize_matrices<S: serde::Serializer>(
    ms: &Vec<Sl2Matrix>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(ms.len()))?;
    for m in ms {
        let flat: Vec<[f64; 2]> = m.entries().iter().map(|z| [z.re, z.im]).collect();
        seq.serialize_element(&flat)?;
    }
    seq.end()
}

impl RepData {
    pub fn image(&self, generator: usize) -> &Sl2Matrix {
        &self.generator_images[generator - 1]
    }

    /// Evaluates a word over the presentation's generators.
    pub fn eval(&self, w: &crate::word::FreeWord) -> Sl2Matrix {
        let mut acc = Sl2Matrix::identity();
        for &(g, e) in w.syllables() {
            acc = acc.mul(&self.generator_images[g - 1].pow(e));
        }
        acc
    }
}

fn resolve_roots(
    p: &FuchsianPresentation,
    root_choices: Option<&[u32]>,
) -> Result<Vec<(u32, u32)>, Sl2Error> {
    let mut out = Vec::with_capacity(p.ell());
    for (i, &gamma) in p.exponents().iter().enumerate() {
        let k = root_choices.map(|rc| rc[i]).unwrap_or(1);
        if gcd(k as u64, gamma as u64) != 1 {
            return Err(Sl2Error::BadRootChoice { index: i + 1, gamma, k });
        }
        out.push((gamma, k));
    }
    Ok(out)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

const RETRY_BUDGET: usize = 50;
const BUILD_TOL: f64 = 1e-9;

/// Builds images for the torsion generators of `p` with the product of all
/// images equal to the identity; order-2 generators are hard-coded to `-I`,
/// auxiliary generators to `I`. Deterministic in `seed`.
pub fn build_cyclic_faithful(
    p: &FuchsianPresentation,
    root_choices: Option<&[u32]>,
    seed: u64,
) -> Result<RepData, Sl2Error> {
    let roots = resolve_roots(p, root_choices)?;
    build_with_killed(p, &roots, None, seed)
}

fn build_with_killed(
    p: &FuchsianPresentation,
    roots: &[(u32, u32)],
    killed: Option<usize>,
    seed: u64,
) -> Result<RepData, Sl2Error> {
    // indices (1-based) of the generators solved by the chain
    let chain: Vec<usize> = (1..=p.ell())
        .filter(|&i| Some(i) != killed && p.exponents()[i - 1] >= 3)
        .collect();
    let n_two = (1..=p.ell())
        .filter(|&i| Some(i) != killed && p.exponents()[i - 1] == 2)
        .count();
    // the -I factors contribute (-1)^n, so the chain must close there
    let eps = if n_two % 2 == 0 { 1.0 } else { -1.0 };
    let target = Complex64::new(eps, 0.0);

    let traces: Vec<Complex64> = chain
        .iter()
        .map(|&i| {
            let (gamma, k) = roots[i - 1];
            let zeta = root_of_unity(gamma, k);
            zeta + zeta.inv()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut solved: Option<Vec<Sl2Matrix>> = None;
    let m = chain.len();
    'attempt: for _ in 0..RETRY_BUDGET {
        match m {
            0 => {
                if eps == 1.0 {
                    solved = Some(Vec::new());
                } else {
                    break;
                }
            }
            1 => {
                // the lone image must be the scalar eps * I
                if (traces[0] - 2.0 * target).norm() <= BUILD_TOL {
                    solved = Some(alloc::vec![Sl2Matrix::diag(target, target)]);
                }
                break;
            }
            _ => {
                let mut images = Vec::with_capacity(m);
                let (g1, k1) = roots[chain[0] - 1];
                let mut q = primitive_matrix(root_of_unity(g1, k1));
                images.push(q);
                for step in 1..m - 1 {
                    // the last intermediate product must have the trace
                    // that lets the closing matrix carry trace[m-1]
                    let z = if step == m - 2 {
                        target * traces[m - 1]
                    } else {
                        random_trace(&mut rng)
                    };
                    let mk = match fricke_step(&q, traces[step], z, &mut rng) {
                        Some(mk) => mk,
                        None => continue 'attempt,
                    };
                    q = q.mul(&mk);
                    images.push(mk);
                }
                let closer = q.inverse().mul(&Sl2Matrix::diag(target, target));
                if (closer.trace() - traces[m - 1]).norm() > BUILD_TOL {
                    continue 'attempt;
                }
                images.push(closer);
                solved = Some(images);
            }
        }
        if solved.is_some() {
            break;
        }
    }
    let solved = solved.ok_or_else(|| {
        Sl2Error::BuildFailed(format!(
            "no solution after {RETRY_BUDGET} attempts for exponents {:?} (killed {:?})",
            p.exponents(),
            killed
        ))
    })?;

    let mut generator_images = Vec::with_capacity(p.ell() + p.aux_count());
    let mut chain_pos = 0usize;
    for i in 1..=p.ell() {
        if Some(i) == killed {
            generator_images.push(Sl2Matrix::identity());
        } else if p.exponents()[i - 1] == 2 {
            generator_images.push(Sl2Matrix::neg_identity());
        } else {
            generator_images.push(solved[chain_pos]);
            chain_pos += 1;
        }
    }
    for _ in 0..p.aux_count() {
        generator_images.push(Sl2Matrix::identity());
    }

    let residual = product_residual(&generator_images, p.ell());
    Ok(RepData {
        generator_images,
        root_choices: roots.to_vec(),
        killed_index: killed,
        diagonalized_index: None,
        residual,
    })
}

fn product_residual(images: &[Sl2Matrix], ell: usize) -> f64 {
    let mut prod = Sl2Matrix::identity();
    for img in &images[..ell] {
        prod = prod.mul(img);
    }
    prod.dist(&Sl2Matrix::identity())
}

/// Builds a representation of `p` with the generator `killed` mapped to the
/// identity, conjugated so the image of `diagonalized` is exactly
/// `diag(zeta, zeta^-1)` for its chosen root.
pub fn build_quotient_rep(
    p: &FuchsianPresentation,
    killed: usize,
    diagonalized: usize,
    root_choices: Option<&[u32]>,
    seed: u64,
) -> Result<RepData, Sl2Error> {
    assert_ne!(killed, diagonalized);
    let roots = resolve_roots(p, root_choices)?;
    if roots[diagonalized - 1].0 < 3 {
        return Err(Sl2Error::DegenerateDiagonalization);
    }
    let mut rep = build_with_killed(p, &roots, Some(killed), seed)?;

    let (gamma, k) = roots[diagonalized - 1];
    let zeta = root_of_unity(gamma, k);
    let m = rep.generator_images[diagonalized - 1];
    let s = eigenbasis(&m, zeta).ok_or(Sl2Error::DegenerateDiagonalization)?;
    let s_inv = s.inverse();
    for img in rep.generator_images.iter_mut() {
        *img = s_inv.mul(img).mul(&s);
    }
    // snap the diagonalized image exactly
    rep.generator_images[diagonalized - 1] = primitive_matrix(zeta);
    rep.diagonalized_index = Some(diagonalized);
    rep.residual = product_residual(&rep.generator_images, p.ell());
    Ok(rep)
}

// A determinant-1 matrix of eigenvectors for eigenvalues zeta, zeta^-1 of m.
fn eigenbasis(m: &Sl2Matrix, zeta: Complex64) -> Option<Sl2Matrix> {
    let eigvec = |lambda: Complex64| -> Option<(Complex64, Complex64)> {
        if m.b.norm() > 1e-9 {
            Some((m.b, lambda - m.a))
        } else if m.c.norm() > 1e-9 {
            Some((lambda - m.d, m.c))
        } else {
            // already diagonal; pick coordinate vectors by matching entries
            if (m.a - lambda).norm() < 1e-7 {
                Some((Complex64::new(1.0, 0.0), Complex64::zero()))
            } else if (m.d - lambda).norm() < 1e-7 {
                Some((Complex64::zero(), Complex64::new(1.0, 0.0)))
            } else {
                None
            }
        }
    };
    let (v1a, v1b) = eigvec(zeta)?;
    let (v2a, v2b) = eigvec(zeta.inv())?;
    let s = Sl2Matrix::new(v1a, v2a, v1b, v2b);
    let det = s.det();
    if det.norm() < 1e-12 {
        return None;
    }
    let scale = det.sqrt().inv();
    Some(Sl2Matrix::new(s.a * scale, s.b * scale, s.c * scale, s.d * scale))
}

/// Per-generator numeric checks of a representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorCheck {
    pub index: usize,
    pub gamma: u32,
    pub trace_error: f64,
    pub order_error: f64,
    pub det_error: f64,
    pub pass: bool,
}

/// Outcome of checking a representation against its presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub generators: Vec<GeneratorCheck>,
    pub product_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks traces against the chosen roots, orders, determinants and the
/// long-relator product. Order-2 generators must be exactly `-I` like
/// structures within tolerance; a killed generator must be the identity.
pub fn verify_rep(rep: &RepData, p: &FuchsianPresentation) -> VerificationReport {
    let tolerance = 1e-8;
    let mut generators = Vec::with_capacity(p.ell());
    for i in 1..=p.ell() {
        let img = rep.image(i);
        let (gamma, k) = rep.root_choices[i - 1];
        let det_error = (img.det() - Complex64::new(1.0, 0.0)).norm();
        let (trace_error, order_error) = if rep.killed_index == Some(i) {
            (
                (img.trace() - Complex64::new(2.0, 0.0)).norm(),
                img.dist(&Sl2Matrix::identity()),
            )
        } else if gamma == 2 {
            (
                (img.trace() + Complex64::new(2.0, 0.0)).norm(),
                img.dist(&Sl2Matrix::neg_identity()),
            )
        } else {
            let zeta = root_of_unity(gamma, k);
            (
                (img.trace() - (zeta + zeta.inv())).norm(),
                img.pow(gamma as i64).dist(&Sl2Matrix::identity()),
            )
        };
        let pass = trace_error <= tolerance && order_error <= tolerance && det_error <= tolerance;
        generators.push(GeneratorCheck { index: i, gamma, trace_error, order_error, det_error, pass });
    }
    let product_residual = product_residual(&rep.generator_images, p.ell());
    let pass = generators.iter().all(|g| g.pass) && product_residual <= tolerance;
    VerificationReport { generators, product_residual, tolerance, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::FreeWord;

    fn plain(exps: &[u32]) -> FuchsianPresentation {
        FuchsianPresentation::plain(exps.to_vec()).unwrap()
    }

    #[test]
    fn primitive_matrices() {
        let m = primitive_matrix(Complex64::new(-1.0, 0.0));
        assert!(m.dist(&Sl2Matrix::neg_identity()) < 1e-15);
        let zeta = root_of_unity(5, 1);
        let m = primitive_matrix(zeta);
        assert!(m.pow(5).dist(&Sl2Matrix::identity()) < 1e-9);
        assert!((m.trace().re - 2.0 * (TAU / 5.0).cos()).abs() < 1e-12);
        assert!(m.trace().im.abs() < 1e-12);
    }

    #[test]
    fn fricke_triple_traces() {
        let z = Complex64::zero();
        let (a, b) = fricke_triple(z, z, z);
        assert!(a.trace().norm() < 1e-12);
        assert!(b.trace().norm() < 1e-12);
        assert!(a.mul(&b).trace().norm() < 1e-12);
        assert!((a.det() - 1.0).norm() < 1e-12);
        assert!((b.det() - 1.0).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let y = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = fricke_triple(x, y, z);
            assert!((a.trace() - x).norm() < 1e-10);
            assert!((b.trace() - y).norm() < 1e-10);
            assert!((a.mul(&b).trace() - z).norm() < 1e-10);
            assert!((a.det() - 1.0).norm() < 1e-10);
            assert!((b.det() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn fricke_step_postconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (q, _) = fricke_triple(
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                Complex64::zero(),
                Complex64::zero(),
            );
            let y = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = fricke_step(&q, y, z, &mut rng).unwrap();
            assert!((b.trace() - y).norm() < 1e-9);
            assert!((q.mul(&b).trace() - z).norm() < 1e-9);
            assert!((b.det() - 1.0).norm() < 1e-9);
        }
        // diagonal and scalar branches
        let q = Sl2Matrix::diag(Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0));
        let y = Complex64::new(0.5, 0.25);
        let z = Complex64::new(-1.0, 0.5);
        let b = fricke_step(&q, y, z, &mut rng).unwrap();
        assert!((b.trace() - y).norm() < 1e-10);
        assert!((q.mul(&b).trace() - z).norm() < 1e-10);
        let id = Sl2Matrix::identity();
        assert!(fricke_step(&id, y, y, &mut rng).is_some());
        assert!(fricke_step(&id, y, z, &mut rng).is_none());
    }

    #[test]
    fn all_order_two_build() {
        let p = plain(&[2, 2, 2, 2]);
        let rep = build_cyclic_faithful(&p, None, 1).unwrap();
        for img in &rep.generator_images {
            assert!(img.dist(&Sl2Matrix::neg_identity()) < 1e-15);
        }
        assert!(rep.residual < 1e-12);
        assert!(verify_rep(&rep, &p).pass);
    }

    #[test]
    fn odd_count_of_involutions_fails() {
        // (-I)^3 = -I cannot close to I with no order-3 generators present
        let p = plain(&[2, 2, 2]);
        assert!(matches!(build_cyclic_faithful(&p, None, 1), Err(Sl2Error::BuildFailed(_))));
    }

    #[test]
    fn triangle_and_larger_builds() {
        for exps in [
            &[5u32, 5, 5][..],
            &[5, 5, 5, 5, 5],
            &[7, 5, 3, 3, 3, 2, 2],
            &[8, 4, 3, 2],
            &[3, 3, 3, 2, 2],
        ] {
            let p = plain(exps);
            let rep = build_cyclic_faithful(&p, None, 42).unwrap();
            let report = verify_rep(&rep, &p);
            assert!(report.pass, "exponents {exps:?}: {report:?}");
            assert!(rep.residual < 1e-9);
        }
    }

    #[test]
    fn two_torsion_generators_need_matching_traces() {
        // chain of length 2 closes only when tr(s2) = tr(s1^-1)
        let p = plain(&[5, 5, 2, 2]);
        let rep = build_cyclic_faithful(&p, None, 3).unwrap();
        assert!(verify_rep(&rep, &p).pass);
        // with mismatched roots the closing trace cannot match
        assert!(build_cyclic_faithful(&p, Some(&[1, 2, 1, 1]), 3).is_err());
    }

    #[test]
    fn determinism() {
        let p = plain(&[5, 5, 5, 5, 5]);
        let a = build_cyclic_faithful(&p, None, 9).unwrap();
        let b = build_cyclic_faithful(&p, None, 9).unwrap();
        assert_eq!(a, b);
        let c = build_cyclic_faithful(&p, None, 10).unwrap();
        assert!(a.generator_images[2].dist(&c.generator_images[2]) > 1e-6);
    }

    #[test]
    fn root_choice_override() {
        let p = plain(&[5, 5, 5]);
        let rep = build_cyclic_faithful(&p, Some(&[2, 1, 1]), 4).unwrap();
        let zeta = root_of_unity(5, 2);
        assert!((rep.image(1).trace() - (zeta + zeta.inv())).norm() < 1e-9);
        assert!(matches!(
            build_cyclic_faithful(&p, Some(&[5, 1, 1]), 4),
            Err(Sl2Error::BadRootChoice { index: 1, .. })
        ));
    }

    #[test]
    fn quotient_rep_diagonalizes() {
        let p = plain(&[5, 5, 5, 5, 5]);
        let rep = build_quotient_rep(&p, 2, 1, None, 5).unwrap();
        let zeta = root_of_unity(5, 1);
        assert!(rep.image(1).dist(&primitive_matrix(zeta)) < 1e-15);
        assert!(rep.image(2).dist(&Sl2Matrix::identity()) < 1e-15);
        for i in [3, 4, 5] {
            assert!(rep.image(i).pow(5).dist(&Sl2Matrix::identity()) < 1e-8);
        }
        assert!(rep.residual < 1e-8);
        assert!(verify_rep(&rep, &p).pass);
    }

    #[test]
    fn verify_flags_perturbations() {
        let p = plain(&[5, 5, 5]);
        let mut rep = build_cyclic_faithful(&p, None, 6).unwrap();
        rep.generator_images[1].a += Complex64::new(1e-3, 0.0);
        let report = verify_rep(&rep, &p);
        assert!(!report.pass);
        assert!(!report.generators[1].pass);
        assert!(report.generators[0].pass);
    }

    #[test]
    fn word_evaluation_respects_relators() {
        let p = plain(&[5, 5, 5, 5, 5]);
        let rep = build_cyclic_faithful(&p, None, 12).unwrap();
        let relator = FreeWord::normalize(&[1, 2, 3, 4, 5]);
        assert!(rep.eval(&relator).dist(&Sl2Matrix::identity()) < 1e-8);
        let w = FreeWord::power(3, 5);
        assert!(rep.eval(&w).dist(&Sl2Matrix::identity()) < 1e-8);
        let winv = FreeWord::generator(3).concat(&FreeWord::generator(3).inverse());
        assert!(rep.eval(&winv).dist(&Sl2Matrix::identity()) < 1e-12);
    }

    #[test]
    fn aux_generators_map_to_identity() {
        let p = FuchsianPresentation::new(alloc::vec![5, 5, 5], 1, 0, None).unwrap();
        let rep = build_cyclic_faithful(&p, None, 2).unwrap();
        assert_eq!(rep.generator_images.len(), 5);
        assert!(rep.generator_images[3].dist(&Sl2Matrix::identity()) < 1e-15);
        assert!(rep.generator_images[4].dist(&Sl2Matrix::identity()) < 1e-15);
    }
}
