//! Randomized property checks for the algebraic identities the pipeline
//! rests on: free reduction, the Fox product and inverse rules, the chain
//! rule along Nielsen chains, symmetries of the invariant element, bar
//! involution, determinant backend agreement, and decision symmetry.

use nielsen_core::cyclo::CycNumber;
use nielsen_core::presentation::{
    criterion_decide, FuchsianPresentation, StandardGenSys, Verdict,
};
use nielsen_core::ring::{pi_product, ApproxC, RingElement, RingMatrix};
use nielsen_core::word::{
    apply_nielsen_chain, fox_derivative, jacobian, substitute, FoxPolynomial, FreeWord,
    NielsenOp,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(
        (1..=rank as i64).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]),
        0..=max_len,
    )
    .prop_map(|letters| FreeWord::normalize(&letters))
}

proptest! {
    #[test]
    fn free_reduction_cancels_inverses(w in word_strategy(4, 12), v in word_strategy(4, 12)) {
        prop_assert!(w.concat(&w.inverse()).is_identity());
        prop_assert_eq!(w.concat(&v).inverse(), v.inverse().concat(&w.inverse()));
        // normalization is idempotent under concatenation with identity
        prop_assert_eq!(w.concat(&FreeWord::identity()), w);
    }

    #[test]
    fn fox_product_rule(u in word_strategy(4, 10), v in word_strategy(4, 10), i in 1usize..=4) {
        let lhs = fox_derivative(&u.concat(&v), i, 4).unwrap();
        let du = fox_derivative(&u, i, 4).unwrap();
        let dv = fox_derivative(&v, i, 4).unwrap();
        let rhs = du.add(&FoxPolynomial::word_mul(&u, &dv));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_inverse_rule(w in word_strategy(4, 10), i in 1usize..=4) {
        let lhs = fox_derivative(&w.inverse(), i, 4).unwrap();
        let dw = fox_derivative(&w, i, 4).unwrap();
        let rhs = FoxPolynomial::word_mul(&w.inverse(), &dw).neg();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fox_conjugation_rule(w in word_strategy(3, 8), v in word_strategy(3, 6), i in 1usize..=3) {
        // d(vwv^-1) = dv + v dw - (vwv^-1) dv
        let c = w.conjugate_by(&v);
        let lhs = fox_derivative(&c, i, 3).unwrap();
        let dv = fox_derivative(&v, i, 3).unwrap();
        let dw = fox_derivative(&w, i, 3).unwrap();
        let rhs = dv
            .add(&FoxPolynomial::word_mul(&v, &dw))
            .sub(&FoxPolynomial::word_mul(&c, &dv));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_rule_along_nielsen_chains(
        arity in 2usize..=4,
        seed_ops in prop::collection::vec(0usize..4, 1..=6),
    ) {
        // derive a concrete op list from the sampled arity
        let mut ops = Vec::new();
        for (k, &tag) in seed_ops.iter().enumerate() {
            let i = k % arity;
            let j = (k + 1) % arity;
            ops.push(match tag {
                0 => NielsenOp::Invert(i),
                1 => NielsenOp::RightMultiply { i, j },
                2 => NielsenOp::LeftMultiply { i, j },
                _ => NielsenOp::Permute((0..arity).map(|x| (x + 1) % arity).collect()),
            });
        }
        let id: Vec<FreeWord> = (1..=arity).map(FreeWord::generator).collect();
        let y_in_x = apply_nielsen_chain(&id, &ops).unwrap();
        let mut inv_ops = Vec::new();
        for op in ops.iter().rev() {
            inv_ops.extend(op.inverse());
        }
        let x_in_y = apply_nielsen_chain(&id, &inv_ops).unwrap();
        for (i, xw) in x_in_y.iter().enumerate() {
            prop_assert_eq!(substitute(xw, &y_in_x), FreeWord::generator(i + 1));
        }
        let a = jacobian(&x_in_y, arity).unwrap().substitute(&y_in_x);
        let b = jacobian(&y_in_x, arity).unwrap();
        prop_assert!(a.mul(&b).unwrap().is_identity());
    }

    #[test]
    fn pi_symmetries(
        p in 3u32..=7,
        mult in 1u64..=3,
        a_raw in 1i64..100,
        b_raw in 1i64..100,
        num in 1i64..=5,
        den in 1i64..=4,
    ) {
        let q = p as u64 * mult;
        let units_q: Vec<i64> = (1..q as i64).filter(|&x| gcd(x, q as i64) == 1).collect();
        let units_p: Vec<i64> = (1..p as i64).filter(|&x| gcd(x, p as i64) == 1).collect();
        let a = units_q[a_raw as usize % units_q.len()];
        let b = units_p[b_raw as usize % units_p.len()];
        let r = CycNumber::from_ratio(num, den);
        let zeta = CycNumber::zeta_power(q, 1);
        let base = pi_product(a, b, &r, p, q, &zeta).unwrap();
        prop_assert_eq!(&pi_product(-a, -b, &r, p, q, &zeta).unwrap(), &base);
        prop_assert_eq!(&pi_product(a, -b, &r, p, q, &zeta).unwrap(), &base);
        prop_assert_eq!(&pi_product(-a, b, &r, p, q, &zeta).unwrap(), &base);
        // scaling is linear in r
        let one = CycNumber::one();
        let unscaled = pi_product(a, b, &one, p, q, &zeta).unwrap();
        prop_assert_eq!(&unscaled.scale(&r), &base);
    }

    #[test]
    fn bar_is_a_ring_involution(
        p in 2u32..=6,
        coeffs_a in prop::collection::vec((-3i64..=3, 1i64..=2), 1..=4),
        coeffs_b in prop::collection::vec((-3i64..=3, 1i64..=2), 1..=4),
    ) {
        let build = |cs: &[(i64, i64)]| {
            let mut x = RingElement::<CycNumber>::zero(p);
            for (k, &(num, den)) in cs.iter().enumerate() {
                x = x.add(&RingElement::monomial(p, k as i64, CycNumber::from_ratio(num, den)));
            }
            x
        };
        let a = build(&coeffs_a);
        let b = build(&coeffs_b);
        prop_assert_eq!(&a.bar().bar(), &a);
        prop_assert_eq!(&a.mul(&b).bar(), &a.bar().mul(&b.bar()));
        prop_assert_eq!(&a.add(&b).bar(), &a.bar().add(&b.bar()));
    }

    #[test]
    fn determinant_backends_agree(
        n in 1usize..=4,
        p in 2u32..=4,
        entries in prop::collection::vec((-2i64..=2, -4i64..=4), 16),
    ) {
        let mut m = RingMatrix::<ApproxC>::zero(n, p);
        let mut it = entries.iter().cycle();
        for r in 0..n {
            for c in 0..n {
                let &(coeff, exp) = it.next().unwrap();
                if coeff != 0 {
                    m.set(r, c, RingElement::monomial(p, exp, ApproxC(Complex64::new(coeff as f64, 0.0))));
                }
            }
        }
        let fast = m.det_division_free();
        let slow = m.det_cofactor();
        prop_assert!(fast.eq_within(&slow, 1e-9), "deviation {}", fast.deviation(&slow));
    }

    #[test]
    fn decision_is_symmetric_and_certificates_replay(
        exps in prop::collection::vec(prop::sample::select(vec![2u32, 3, 4, 5, 7]), 3..=5),
        u_raw in prop::collection::vec(1i64..=6, 5),
        v_raw in prop::collection::vec(1i64..=6, 5),
        missing_u in 1usize..=5,
        missing_v in 1usize..=5,
    ) {
        let pres = FuchsianPresentation::plain(exps.clone()).unwrap();
        let ell = pres.ell();
        let mu = (missing_u - 1) % ell + 1;
        let mv = (missing_v - 1) % ell + 1;
        let unit = |raw: i64, gamma: u32| -> i64 {
            (1..gamma as i64)
                .map(|k| (raw + k - 1) % gamma as i64 + 1)
                .find(|&x| gcd(x, gamma as i64) == 1)
                .unwrap_or(1)
        };
        let make = |missing: usize, raw: &[i64]| {
            let exps_sys: Vec<i64> = (1..=ell)
                .filter(|&i| i != missing)
                .map(|i| unit(raw[i - 1], exps[i - 1]))
                .collect();
            StandardGenSys::new(missing, exps_sys)
        };
        let u = make(mu, &u_raw);
        let v = make(mv, &v_raw);
        let ab = criterion_decide(&pres, &u, &v).unwrap();
        let ba = criterion_decide(&pres, &v, &u).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict);
        if ab.verdict == Verdict::Equivalent {
            let cert = ab.certificate.as_ref().unwrap();
            prop_assert!(cert.replay());
        }
    }

    #[test]
    fn quotient_units_split(reduced_idx in 0usize..5, k_raw in 1i64..200) {
        // for gamma = 2 * odd, a residue and its shift by odd are never
        // both units: the unit classes of the quotient lift uniquely
        let reduced = [3i64, 5, 7, 9, 11][reduced_idx];
        let full = 2 * reduced;
        let k = k_raw % full;
        if k > 0 {
            prop_assert!(!(gcd(k, full) == 1 && gcd(k + reduced, full) == 1));
        }
    }
}
