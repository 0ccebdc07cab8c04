//! Property tests for the algebraic invariants: Cavalieri integral laws,
//! energy/gradient identities, lattice contraction, fiber geometry, and the
//! metric axioms on small spaces.

use std::sync::Arc;

use proptest::prelude::*;

use capmod::l0cap::{simple_approximate, CapClass, CapContext};
use capmod::outer::{integrate, OuterMeasure};
use capmod::sobolev::{dirichlet_energy, gradient_modulus, lattice_min_max, VertexFunction};
use capmod::space::{k2, space_from_lists, Space};
use capmod::subset::Subset;
use capmod::tangent::{parallelogram_deviation, pointwise_norm, DartField};

fn path3() -> Space {
    space_from_lists(
        &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
        &[("a", "b", 1.0), ("b", "c", 1.0)],
        None,
    )
    .unwrap()
}

/// Monotone set function on 3 points from arbitrary raw nonnegative values.
fn monotone_table(raw: &[f64; 8]) -> Vec<f64> {
    let mut table = vec![0.0; 8];
    for m in 1..8usize {
        let mut v: f64 = raw[m].abs();
        for i in 0..3 {
            if m >> i & 1 == 1 {
                v = v.max(table[m & !(1 << i)]);
            }
        }
        table[m] = v;
    }
    table
}

proptest! {
    #[test]
    fn counting_integral_is_the_sum(f in prop::collection::vec(0.0..10.0f64, 4)) {
        let mu = OuterMeasure::counting(4);
        let total: f64 = f.iter().sum();
        let integral = integrate(&mu, &f, None).unwrap();
        prop_assert!((integral - total).abs() <= 1e-12 * (1.0 + total));
    }

    #[test]
    fn integral_monotone_and_homogeneous(
        raw in prop::array::uniform8(0.0..4.0f64),
        f in prop::collection::vec(0.0..4.0f64, 3),
        bump in prop::collection::vec(0.0..2.0f64, 3),
        lambda in 0.01..5.0f64,
    ) {
        let mu = OuterMeasure::from_table(3, monotone_table(&raw)).unwrap();
        let g: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let int_f = integrate(&mu, &f, None).unwrap();
        let int_g = integrate(&mu, &g, None).unwrap();
        prop_assert!(int_f <= int_g + 1e-12);
        let scaled: Vec<f64> = f.iter().map(|&v| lambda * v).collect();
        let lhs = integrate(&mu, &scaled, None).unwrap();
        prop_assert!((lhs - lambda * int_f).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn chebyshev_inequality(
        raw in prop::array::uniform8(0.0..4.0f64),
        f in prop::collection::vec(0.0..4.0f64, 3),
        lambda in 0.05..4.0f64,
    ) {
        let mu = OuterMeasure::from_table(3, monotone_table(&raw)).unwrap();
        let level = VertexFunction(f.clone()).superlevel(lambda);
        let restricted = integrate(&mu, &f, Some(&level)).unwrap();
        prop_assert!(mu.value(&level) <= restricted / lambda + 1e-12);
    }

    #[test]
    fn gradient_modulus_squares_to_twice_energy(f in prop::collection::vec(-5.0..5.0f64, 3)) {
        let s = path3();
        let f = VertexFunction(f);
        let g = gradient_modulus(&s, &f);
        let sum_sq: f64 = g.values().iter().map(|x| x * x).sum();
        let energy = dirichlet_energy(&s, &f);
        prop_assert!((sum_sq - 2.0 * energy).abs() <= 1e-12 * (1.0 + energy));
    }

    #[test]
    fn normal_contraction(
        f in prop::collection::vec(-5.0..5.0f64, 3),
        g in prop::collection::vec(-5.0..5.0f64, 3),
    ) {
        let s = path3();
        let r = lattice_min_max(&s, &VertexFunction(f), &VertexFunction(g));
        prop_assert!(r.contraction_ok);
    }

    #[test]
    fn fiber_parallelogram_identity(
        v in prop::collection::vec(-4.0..4.0f64, 4),
        w in prop::collection::vec(-4.0..4.0f64, 4),
    ) {
        let s = path3();
        prop_assert!(parallelogram_deviation(&s, &DartField(v), &DartField(w)) <= 1e-12);
    }

    #[test]
    fn fiber_norm_triangle(
        v in prop::collection::vec(-4.0..4.0f64, 4),
        w in prop::collection::vec(-4.0..4.0f64, 4),
    ) {
        let s = path3();
        let v = DartField(v);
        let w = DartField(w);
        let nv = pointwise_norm(&s, &v);
        let nw = pointwise_norm(&s, &w);
        let nsum = pointwise_norm(&s, &v.add(&w));
        for x in 0..3 {
            prop_assert!(nsum.values()[x] <= nv.values()[x] + nw.values()[x] + 1e-12);
        }
    }

    #[test]
    fn subset_de_morgan(a in 0u64..256, b in 0u64..256) {
        let a = Subset::from_mask(8, a);
        let b = Subset::from_mask(8, b);
        prop_assert_eq!(
            a.union(&b).complement().mask(),
            a.complement().intersection(&b.complement()).mask()
        );
        prop_assert_eq!(a.difference(&b).mask(), a.intersection(&b.complement()).mask());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dcap_metric_axioms_on_k2(
        f in prop::collection::vec(-2.0..2.0f64, 2),
        g in prop::collection::vec(-2.0..2.0f64, 2),
        h in prop::collection::vec(-2.0..2.0f64, 2),
    ) {
        let ctx = CapContext::new(Arc::new(k2()));
        let f = CapClass::new(VertexFunction(f));
        let g = CapClass::new(VertexFunction(g));
        let h = CapClass::new(VertexFunction(h));
        let dfg = ctx.dcap(&f, &g).unwrap();
        let dgf = ctx.dcap(&g, &f).unwrap();
        let dgh = ctx.dcap(&g, &h).unwrap();
        let dfh = ctx.dcap(&f, &h).unwrap();
        prop_assert_eq!(dfg, dgf);
        prop_assert!(dfh <= dfg + dgh + 1e-12);
        prop_assert_eq!(ctx.dcap(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn quantization_is_eps_close(
        f in prop::collection::vec(-3.0..3.0f64, 2),
        eps in 0.01..2.0f64,
    ) {
        let ctx = CapContext::new(Arc::new(k2()));
        let f = CapClass::new(VertexFunction(f));
        let q = simple_approximate(&f, eps).unwrap();
        for x in 0..2 {
            prop_assert!((f.rep.values()[x] - q.rep.values()[x]).abs() < eps);
        }
        prop_assert!(ctx.dcap(&f, &q).unwrap() <= eps + 1e-12);
    }
}
