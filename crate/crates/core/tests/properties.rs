//! Property tests for the series kernel: ring axioms, inversion and
//! reversion round trips, truncation monotonicity and the involution laws.

use lgcone::rat::{rat, rat_int, Rat};
use lgcone::series::{
    compose, reversion, GradedSeries, Mono, MultiIndex, StateVec, Substitution, Trunc, VarKind,
    Window, ZSeries,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

const TR: Trunc = Trunc { u_deg: 5, t_deg: 3 };

fn arb_mono() -> impl Strategy<Value = MultiIndex> {
    (
        proptest::collection::vec((0u16..4, 1u32..3), 0..3),
        proptest::collection::vec((0u16..3, 1u32..2), 0..2),
    )
        .prop_map(|(u, t)| MultiIndex {
            u: Mono::from_pairs(&u),
            t: Mono::from_pairs(&t),
        })
}

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-8i64..=8, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn arb_series() -> impl Strategy<Value = GradedSeries<Rat>> {
    proptest::collection::vec((arb_mono(), arb_rat()), 0..6).prop_map(|terms| {
        let mut s = GradedSeries::zero(TR);
        for (idx, c) in terms {
            s.add_term(idx, c);
        }
        s
    })
}

fn arb_unit_series() -> impl Strategy<Value = GradedSeries<Rat>> {
    (arb_series(), (1i64..6, 1i64..4)).prop_map(|(mut s, (n, d))| {
        s.add_term(MultiIndex::one(), rat(n, d) - s.constant_term());
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn invert_round_trip(a in arb_unit_series()) {
        let inv = a.invert().unwrap();
        prop_assert_eq!(a.mul(&inv), GradedSeries::one(TR));
    }

    #[test]
    fn truncation_monotonicity(a in arb_series(), b in arb_series()) {
        let small = Trunc { u_deg: 3, t_deg: 2 };
        let big_then_cut = a.mul(&b).truncated(small);
        let cut_then_mul = a.truncated(small).mul(&b.truncated(small));
        prop_assert_eq!(big_then_cut, cut_then_mul);
    }

    #[test]
    fn negate_z_involution(terms in proptest::collection::vec((-4i32..=4, arb_mono(), 0u16..4, arb_rat()), 0..8)) {
        let w = Window::new(-4, 4);
        let mut f = ZSeries::<StateVec>::zero(TR, w);
        for (z, idx, s, c) in terms {
            f.add_term(z, GradedSeries::basis_term(idx, s, c, TR));
        }
        prop_assert_eq!(f.negate_z().negate_z(), f);
    }

    #[test]
    fn polarization_split_is_lossless(terms in proptest::collection::vec((-3i32..=3, arb_mono(), 0u16..4, arb_rat()), 0..8)) {
        let w = Window::new(-3, 3);
        let mut f = ZSeries::<StateVec>::zero(TR, w);
        for (z, idx, s, c) in terms {
            f.add_term(z, GradedSeries::basis_term(idx, s, c, TR));
        }
        let back = f.positive_part().windowed(w).add(&f.negative_part().windowed(w));
        prop_assert_eq!(back, f);
    }

    #[test]
    fn reversion_round_trip(
        coeffs in proptest::collection::vec((arb_rat(), 1u32..4, 0u32..3), 0..4)
    ) {
        // u1 -> u1 + higher terms in (u1, u2); u2 -> u2
        let trunc = Trunc { u_deg: 6, t_deg: 0 };
        let mut c1 = GradedSeries::zero(trunc);
        c1.add_term(MultiIndex::u_var(1), Rat::one());
        for (r, e1, e2) in coeffs {
            let idx = MultiIndex {
                u: Mono::from_pairs(&[(1, e1), (2, e2)]),
                t: Mono::one(),
            };
            if idx.u.count() >= 2 {
                c1.add_term(idx, r);
            }
        }
        let mut c2 = GradedSeries::zero(trunc);
        c2.add_term(MultiIndex::u_var(2), Rat::one());
        let comps = BTreeMap::from([(1u16, c1.clone()), (2u16, c2.clone())]);
        let inv = reversion(&comps, trunc).unwrap();
        let fwd: Substitution = comps.iter().map(|(&i, s)| ((VarKind::U, i), s.clone())).collect();
        let bwd: Substitution = inv.iter().map(|(&i, s)| ((VarKind::U, i), s.clone())).collect();
        for &i in &[1u16, 2] {
            let mut ident = GradedSeries::zero(trunc);
            ident.add_term(MultiIndex::u_var(i), Rat::one());
            prop_assert_eq!(compose(&comps[&i], &bwd, trunc).unwrap(), ident.clone());
            prop_assert_eq!(compose(&inv[&i], &fwd, trunc).unwrap(), ident);
        }
    }
}

/// Independent Lagrange-inversion oracle for a univariate reversion:
/// [w^n] f^{-1} = (1/n) [v^{n-1}] (v / f(v))^n.
fn lagrange_inverse_coeffs(f_coeffs: &[Rat], order: usize) -> Vec<Rat> {
    // f(v) = v + sum_{k>=2} f_k v^k, f_coeffs[k] = f_{k+2}
    let mul_poly = |a: &Vec<Rat>, b: &Vec<Rat>| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if i + j <= order && !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    // g(v) = f(v)/v = 1 + sum f_{k+2} v^{k+1}
    let mut g = vec![Rat::zero(); order + 1];
    g[0] = Rat::one();
    for (k, c) in f_coeffs.iter().enumerate() {
        if k + 1 <= order {
            g[k + 1] = c.clone();
        }
    }
    // h = 1/g by the geometric series
    let mut h = vec![Rat::zero(); order + 1];
    h[0] = Rat::one();
    for n in 1..=order {
        let mut acc = Rat::zero();
        for k in 1..=n {
            if !g[k].is_zero() {
                acc += &g[k] * &h[n - k];
            }
        }
        h[n] = -acc;
    }
    let mut out = vec![Rat::zero(); order + 1];
    if order >= 1 {
        out[1] = Rat::one();
    }
    // powers of h: (v/f)^n = h^n
    let mut hp = h.clone();
    for n in 2..=order {
        hp = mul_poly(&hp, &h);
        // [v^{n-1}] hp / n
        out[n] = hp[n - 1].clone() / rat_int(n as i64);
    }
    out
}

#[test]
fn reversion_matches_lagrange_oracle() {
    // f(u) = u + u^2 + (1/3)u^3
    let order = 7usize;
    let trunc = Trunc {
        u_deg: order as u32,
        t_deg: 0,
    };
    let mut f = GradedSeries::zero(trunc);
    f.add_term(MultiIndex::u_var(1), Rat::one());
    f.add_term(
        MultiIndex {
            u: Mono::from_pairs(&[(1, 2)]),
            t: Mono::one(),
        },
        Rat::one(),
    );
    f.add_term(
        MultiIndex {
            u: Mono::from_pairs(&[(1, 3)]),
            t: Mono::one(),
        },
        rat(1, 3),
    );
    let inv = reversion(&BTreeMap::from([(1u16, f)]), trunc).unwrap();
    let oracle = lagrange_inverse_coeffs(&[Rat::one(), rat(1, 3)], order);
    for n in 1..=order {
        let got = inv[&1].coefficient(&MultiIndex {
            u: Mono::from_pairs(&[(1, n as u32)]),
            t: Mono::one(),
        });
        assert_eq!(got, oracle[n], "coefficient of u^{n}");
    }
}

#[test]
fn invert_matches_geometric_oracle() {
    // (1 + u)^{-1} has coefficients (-1)^n; frozen from the geometric series
    let trunc = Trunc { u_deg: 6, t_deg: 0 };
    let mut a = GradedSeries::one(trunc);
    a.add_term(MultiIndex::u_var(1), Rat::one());
    let inv = a.invert().unwrap();
    for n in 0..=6u32 {
        let idx = MultiIndex {
            u: Mono::from_pairs(&[(1, n)]),
            t: Mono::one(),
        };
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(inv.coefficient(&idx), rat_int(sign));
    }
}
