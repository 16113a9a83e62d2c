//! Nielsen (in)equivalence of standard generating systems of Fuchsian-type
//! groups.
//!
//! The crate is organized bottom-up:
//!
//! * [`word`] — reduced words in a free group, Nielsen operations on tuples,
//!   and the Fox-derivative calculus over the integral group ring;
//! * [`cyclo`] — exact arithmetic in cyclotomic fields `Q(zeta_N)`;
//! * [`ring`] — the commutative ring `R_p = K[t]/(t^p - 1)` over a pluggable
//!   coefficient backend (exact cyclotomic or complex floating point), the
//!   invariant element `Pi(a, b, r)` and division-free determinants;
//! * [`scan`] — the exhaustive injectivity scan for `Pi`;
//! * [`presentation`] — Fuchsian-type presentations, the exceptional
//!   classifier, quotients, the congruence decision criterion and
//!   constructive Nielsen certificates;
//! * [`sl2`] — numeric construction of cyclic-faithful representations into
//!   `SL2(C)`;
//! * [`eta`] — the mixed evaluation representation into 2x2 matrices over
//!   `R_p`, the determinant invariant and inequivalence certification.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature just forwards to the dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cyclo;
pub mod eta;
pub mod presentation;
pub mod ring;
pub mod scan;
pub mod sl2;
pub mod word;
