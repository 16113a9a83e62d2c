//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycNumber`] is an element of `Q(zeta_N)` stored as a rational
//! polynomial of degree below `phi(N)` in the basis `1, x, ..., x^{phi(N)-1}`
//! of `Q[x]/(Phi_N(x))`, where `Phi_N` is the `N`-th cyclotomic polynomial
//! and `x` stands for `zeta_N = e^{2*pi*i/N}`. Mixed-conductor arithmetic
//! promotes both operands to the least common multiple of their conductors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Exact division of monic integer polynomials (ascending coefficients);
/// panics if the division is not exact.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    assert!(rem.len() >= den.len());
    let qn = rem.len() - den.len();
    let mut quot = vec![BigInt::zero(); qn + 1];
    for i in (dn..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dn] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[i - dn + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "polynomial division not exact");
    quot
}

/// The `n`-th cyclotomic polynomial, ascending integer coefficients, monic.
///
/// Computed as `(x^n - 1) / prod_{d | n, d < n} Phi_d(x)`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut table: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for d in divisors(n) {
        let mut poly = vec![BigInt::zero(); d as usize + 1];
        poly[0] = BigInt::from(-1);
        poly[d as usize] = BigInt::one();
        for (e, phi_e) in &table {
            if d % e == 0 {
                poly = poly_div_exact(&poly, phi_e);
            }
        }
        table.push((d, poly));
    }
    table.pop().unwrap().1
}

/// Reduces an ascending rational coefficient vector modulo `Phi_n` and trims
/// it to length `phi(n)`.
fn reduce_mod_cyclotomic(mut coeffs: Vec<BigRational>, n: u64) -> Vec<BigRational> {
    let modulus = cyclotomic_polynomial(n);
    let deg = modulus.len() - 1; // = phi(n)
    if coeffs.len() > deg {
        for i in (deg..coeffs.len()).rev() {
            if coeffs[i].is_zero() {
                continue;
            }
            let c = core::mem::replace(&mut coeffs[i], BigRational::zero());
            for (j, mj) in modulus.iter().enumerate().take(deg) {
                let delta = &c * BigRational::from_integer(mj.clone());
                coeffs[i - deg + j] -= delta;
            }
        }
    }
    coeffs.resize(deg, BigRational::zero());
    coeffs
}

/// An exact element of the cyclotomic field `Q(zeta_N)`.
#[derive(Clone)]
pub struct CycNumber {
    conductor: u64,
    coeffs: Vec<BigRational>, // length phi(conductor)
}

impl CycNumber {
    pub fn zero() -> Self {
        CycNumber { conductor: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        CycNumber { conductor: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycNumber { conductor: 1, coeffs: vec![q] }
    }

    pub fn from_i64(x: i64) -> Self {
        CycNumber::from_rational(big(x))
    }

    /// Rational built from a numerator/denominator pair.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        CycNumber::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `zeta_N^k` reduced modulo `Phi_N`.
    pub fn zeta_power(n: u64, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::one();
        CycNumber { conductor: n, coeffs: reduce_mod_cyclotomic(coeffs, n) }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The same number expressed in `Q(zeta_m)`; `m` must be a multiple of
    /// the current conductor.
    pub fn promoted(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "conductor must divide the target");
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        CycNumber { conductor: m, coeffs: reduce_mod_cyclotomic(coeffs, m) }
    }

    fn promote_pair(a: &Self, b: &Self) -> (Self, Self, u64) {
        let m = a.conductor.lcm(&b.conductor);
        (a.promoted(m), b.promoted(m), m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, m) = CycNumber::promote_pair(self, other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        CycNumber { conductor: m, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b, m) = CycNumber::promote_pair(self, other);
        let mut coeffs = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                coeffs[i + j] += x * y;
            }
        }
        CycNumber { conductor: m, coeffs: reduce_mod_cyclotomic(coeffs, m) }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CycNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Complex conjugation: `zeta_N -> zeta_N^{N-1}`.
    pub fn conj(&self) -> Self {
        let n = self.conductor;
        let mut coeffs = vec![BigRational::zero(); n as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = ((n as usize) - k) % n as usize;
            coeffs[e] += c;
        }
        CycNumber { conductor: n, coeffs: reduce_mod_cyclotomic(coeffs, n) }
    }

    /// Nonnegative integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = CycNumber::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Numeric embedding via `zeta_N -> e^{2*pi*i/N}`.
    pub fn approx(&self) -> Complex64 {
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * core::f64::consts::PI * (k as f64) / n;
            let root = Complex64::new(angle.cos(), angle.sin());
            let c = c.to_f64().unwrap_or_else(|| {
                // fall back for very large rationals
                let num = c.numer().to_f64().unwrap_or(f64::NAN);
                let den = c.denom().to_f64().unwrap_or(f64::NAN);
                num / den
            });
            acc += root * c;
        }
        acc
    }

    /// Canonical textual form at the given conductor (used as a grouping
    /// key); `m` must be a multiple of the conductor.
    pub fn canonical_key(&self, m: u64) -> String {
        use core::fmt::Write;
        let p = self.promoted(m);
        let mut out = String::new();
        for c in &p.coeffs {
            let _ = write!(out, "{}/{};", c.numer(), c.denom());
        }
        out
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = CycNumber::promote_pair(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNumber {}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc(N={}; ", self.conductor)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_negative() {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
            if k > 0 {
                write!(f, "*z^{k}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials_small() {
        let as_i64 = |p: Vec<BigInt>| -> Vec<i64> { p.iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_basics() {
        assert_eq!(CycNumber::zeta_power(2, 1), CycNumber::from_i64(-1));
        let i = CycNumber::zeta_power(4, 1);
        assert_eq!(i.mul(&i), CycNumber::from_i64(-1));
        // 1 + z5 + z5^2 + z5^3 + z5^4 = 0
        let mut s = CycNumber::zero();
        for k in 0..5 {
            s = s.add(&CycNumber::zeta_power(5, k));
        }
        assert!(s.is_zero());
        // multiplicative order
        let z = CycNumber::zeta_power(12, 3);
        assert_eq!(z.pow(4), CycNumber::one());
        assert_ne!(z.pow(2), CycNumber::one());
    }

    #[test]
    fn mixed_conductor_arithmetic() {
        // z6 = -z3^2
        let z6 = CycNumber::zeta_power(6, 1);
        let z3 = CycNumber::zeta_power(3, 1);
        assert_eq!(z6, z3.mul(&z3).neg());
        let sum = z6.add(&CycNumber::from_ratio(1, 2));
        assert_eq!(sum.sub(&z6), CycNumber::from_ratio(1, 2));
    }

    #[test]
    fn conjugation() {
        let z = CycNumber::zeta_power(7, 2);
        assert_eq!(z.conj(), CycNumber::zeta_power(7, -2));
        assert_eq!(z.mul(&z.conj()), CycNumber::one());
        // conjugation fixes rationals
        let r = CycNumber::from_ratio(-3, 4);
        assert_eq!(r.conj(), r);
    }

    #[test]
    fn approx_embedding_agrees() {
        // (z8 + 1/3)^2 * conj(z8) evaluated both ways
        let z = CycNumber::zeta_power(8, 1);
        let x = z.add(&CycNumber::from_ratio(1, 3));
        let exact = x.mul(&x).mul(&z.conj()).approx();
        let zf = Complex64::from_polar(1.0, core::f64::consts::PI / 4.0);
        let xf = zf + Complex64::new(1.0 / 3.0, 0.0);
        let float = xf * xf * zf.conj();
        assert!((exact - float).norm() < 1e-12);
    }

    #[test]
    fn canonical_key_is_conductor_independent() {
        let a = CycNumber::from_i64(2);
        let b = CycNumber::zeta_power(5, 1).add(&CycNumber::zeta_power(5, 2))
            .add(&CycNumber::zeta_power(5, 3)).add(&CycNumber::zeta_power(5, 4))
            .add(&CycNumber::from_i64(3));
        assert_eq!(a, b);
        assert_eq!(a.canonical_key(5), b.canonical_key(5));
    }
}
