//! Acceptance suite: ten criteria, each a separate test that prints one
//! pass/fail line. Tolerances and budgets are pinned here; the seeds make
//! every run reproducible.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capmod::capacity::{brute_force_capacity, capacity, capacity_outer_measure};
use capmod::gen;
use capmod::l0cap::{pr_project, CapClass, CapContext};
use capmod::outer::{integrate, is_submodular, proof_measure, CheckMode, OuterMeasure};
use capmod::quasi::{check_linkqusob, check_sandwich, dqu, qcr, DquMethod};
use capmod::sobolev::{gradient_modulus, MClass, VertexFunction};
use capmod::space::{grid_1d, grid_2d, k2};
use capmod::study::{scenario_capae_vs_dcap, scenario_dominated_convergence_failure};
use capmod::subset::Subset;
use capmod::tangent::{
    factor_through, gradient_field, parallelogram_deviation, pointwise_norm, pr_bar, qcr_field,
    scalar_mul, DartField,
};

struct Criterion {
    name: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    fn begin(name: &'static str, budget_secs: u64) -> Self {
        Criterion {
            name,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
        }
    }

    fn finish(self, pass: bool, detail: String) {
        let elapsed = self.start.elapsed();
        let in_budget = elapsed <= self.budget;
        let verdict = if pass && in_budget { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict} ({detail}; {elapsed:.2?} of {:?} budget)",
            self.name, self.budget
        );
        assert!(pass, "criterion {} failed: {detail}", self.name);
        assert!(
            in_budget,
            "criterion {} exceeded its {:?} budget: {elapsed:.2?}",
            self.name, self.budget
        );
    }
}

#[test]
fn acceptance_01_capacity_oracle_equivalence() {
    let c = Criterion::begin("1 capacity-oracle equivalence", 10);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let space = gen::random_connected_space(&mut rng, n, (0.0, 2.0), (0.1, 5.0));
        let e = gen::random_subset(&mut rng, n);
        let direct = capacity(&space, &e).unwrap().value;
        let oracle = brute_force_capacity(&space, &e, rng.random()).unwrap();
        worst = worst.max((direct - oracle).abs());
    }
    c.finish(worst <= 1e-6, format!("max |solver - oracle| = {worst:.3e}"));
}

#[test]
fn acceptance_02_capacity_is_submodular_outer_measure() {
    let c = Criterion::begin("2 Cap is a submodular outer measure", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut submod = 0.0f64;
    let mut mono = 0.0f64;
    let mut dom = 0.0f64;
    for _ in 0..10 {
        let space = Arc::new(gen::random_connected_space(&mut rng, 5, (0.0, 2.0), (0.1, 5.0)));
        let mu = capacity_outer_measure(Arc::clone(&space));
        let table: Vec<f64> = (0..32u64).map(|m| mu.value(&Subset::from_mask(5, m))).collect();
        for e in 0..32u64 {
            for f in e..32u64 {
                submod = submod.max(
                    table[(e | f) as usize] + table[(e & f) as usize]
                        - table[e as usize]
                        - table[f as usize],
                );
            }
            for f in 0..32u64 {
                if e & f == e {
                    mono = mono.max(table[e as usize] - table[f as usize]);
                }
            }
            let mass: f64 = Subset::from_mask(5, e).iter().map(|x| space.mass(x)).sum();
            dom = dom.max(mass - table[e as usize]);
        }
    }
    let worst = submod.max(mono).max(dom);
    c.finish(
        worst <= 1e-9,
        format!("worst gaps: submodular {submod:.2e}, monotone {mono:.2e}, m<=Cap {dom:.2e}"),
    );
}

/// Independent oracle for criterion 3: exhaustive sweep over all pairs of
/// step functions with values in {0,1,2,3} (indicator pairs included),
/// evaluated by the raw Cavalieri sum over unit thresholds.
fn step_sweep_finds_violation(table: &[f64], n: usize) -> bool {
    let nf = 4usize.pow(n as u32);
    let val = |code: usize, x: usize| (code >> (2 * x)) & 3;
    let mut integrals = vec![0.0f64; nf];
    for code in 0..nf {
        for t in 1..=3usize {
            let mut mask = 0usize;
            for x in 0..n {
                if val(code, x) >= t {
                    mask |= 1 << x;
                }
            }
            integrals[code] += table[mask];
        }
    }
    for a in 0..nf {
        for b in a..nf {
            let mut lhs = 0.0;
            for t in 1..=6usize {
                let mut mask = 0usize;
                for x in 0..n {
                    if val(a, x) + val(b, x) >= t {
                        mask |= 1 << x;
                    }
                }
                lhs += table[mask];
            }
            if lhs > integrals[a] + integrals[b] + 1e-12 {
                return true;
            }
        }
    }
    false
}

#[test]
fn acceptance_03_subadditivity_theorem_equivalence() {
    let c = Criterion::begin("3 subadditivity theorem equivalence", 60);
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut mismatches = 0usize;
    let mut prefix_failures = 0usize;
    let mut submodular_count = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let table = gen::random_monotone_set_function(&mut rng, n, 8, 0.25);
        let mu = OuterMeasure::from_table(n, table.clone()).unwrap();
        let verdict = is_submodular(&mu, &CheckMode::Exhaustive).unwrap();
        let found = step_sweep_finds_violation(&table, n);
        if verdict.submodular != !found {
            mismatches += 1;
        }
        if verdict.submodular {
            submodular_count += 1;
            for _ in 0..5 {
                let f: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
                let g: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
                if !proof_measure(&mu, &f, &g).unwrap().prefix_identity_holds(&mu) {
                    prefix_failures += 1;
                }
            }
        }
    }
    c.finish(
        mismatches == 0 && prefix_failures == 0,
        format!(
            "200 set functions, {submodular_count} submodular; verdict mismatches {mismatches}, prefix failures {prefix_failures}"
        ),
    );
}

#[test]
fn acceptance_04_refinement_1d_target() {
    let c = Criterion::begin("4 1-d refinement toward 2", 5);
    let mut errors = Vec::new();
    let mut final_value = 0.0;
    for n in [251usize, 501, 1001, 2001] {
        let g = grid_1d(-10.0, 10.0, n).unwrap();
        let center = (n - 1) / 2;
        let value = capacity(&g, &Subset::from_indices(n, [center]).unwrap())
            .unwrap()
            .value;
        errors.push((value - 2.0).abs());
        final_value = value;
    }
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    let in_band = (1.96..=2.04).contains(&final_value);
    c.finish(
        monotone && in_band,
        format!("cap(center) at n=2001: {final_value:.6}; errors {errors:?}"),
    );
}

#[test]
fn acceptance_05_refinement_2d_decay() {
    let c = Criterion::begin("5 2-d point-capacity decay", 20);
    let mut values = Vec::new();
    for n in [16usize, 32, 64] {
        let g = grid_2d(-1.0, 1.0, n).unwrap();
        let ic = (n - 1) / 2;
        let center = g.vertex(&format!("x{ic}_{ic}")).unwrap();
        values.push(
            capacity(&g, &Subset::from_indices(g.len(), [center]).unwrap())
                .unwrap()
                .value,
        );
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let ratio = values[2] / values[0];
    c.finish(
        decreasing && ratio < 0.9,
        format!("values {values:.4?}, ratio 64/16 = {ratio:.4}"),
    );
}

#[test]
fn acceptance_06_metric_sandwich_and_scan_exactness() {
    let c = Criterion::begin("6 metric sandwich + scan exactness", 60);
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut sandwich_ok = true;
    let mut scan_gap = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(4..=12);
        let ctx = CapContext::new(Arc::new(gen::random_connected_space(
            &mut rng,
            n,
            (0.0, 2.0),
            (0.1, 5.0),
        )));
        for _ in 0..10 {
            let f = CapClass::new(gen::random_vertex_function(&mut rng, n, -2.0, 2.0));
            let g = CapClass::new(gen::random_vertex_function(&mut rng, n, -2.0, 2.0));
            let report = check_sandwich(&ctx, &f, &g).unwrap();
            sandwich_ok &= report.left_ok && report.right_ok;
            let brute = dqu(&ctx, &f, &g, DquMethod::BruteForce).unwrap().value;
            let scan = dqu(&ctx, &f, &g, DquMethod::ExactScan).unwrap().value;
            scan_gap = scan_gap.max((brute - scan).abs());
        }
    }
    c.finish(
        sandwich_ok && scan_gap <= 1e-12,
        format!("100 pairs; max |scan - brute| = {scan_gap:.3e}"),
    );
}

#[test]
fn acceptance_07_sobolev_link() {
    let c = Criterion::begin("7 d_QU <= 3 norm^(2/3)", 60);
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let mut ok = true;
    let mut max_ratio = 0.0f64;
    for k in 0..100 {
        let space = if k % 2 == 0 {
            let n = rng.random_range(2..=8);
            gen::random_connected_space(&mut rng, n, (0.1, 2.0), (0.1, 5.0))
        } else {
            // half the pairs on spaces with a massless vertex
            let n = rng.random_range(3..=8);
            let mut space = None;
            for _ in 0..10 {
                let s = gen::random_connected_space(&mut rng, n, (0.0, 2.0), (0.1, 5.0));
                if !s.fully_charged() {
                    space = Some(s);
                    break;
                }
            }
            space.unwrap_or_else(|| gen::random_connected_space(&mut rng, n, (0.0, 0.5), (0.1, 5.0)))
        };
        let n = space.len();
        let ctx = CapContext::new(Arc::new(space));
        let f = gen::random_vertex_function(&mut rng, n, -2.0, 2.0);
        let g = gen::random_vertex_function(&mut rng, n, -2.0, 2.0);
        let report = check_linkqusob(&ctx, &f, &g).unwrap();
        ok &= report.dqu <= report.bound + 1e-10;
        if report.bound > 0.0 {
            max_ratio = max_ratio.max(report.dqu / report.bound);
        }
    }
    c.finish(ok, format!("100 pairs; max d_QU/bound = {max_ratio:.4}"));
}

#[test]
fn acceptance_08_module_suite() {
    let c = Criterion::begin("8 module identities at 1e-12", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut axioms = 0.0f64;
    let mut hilbert = 0.0f64;
    let mut norm_identity_ok = true;
    let mut section_ok = true;
    let mut qcr_linear = 0.0f64;
    let mut factor_ok = true;
    for i in 0..500 {
        let n = rng.random_range(2..=8);
        let space = if i % 2 == 0 {
            gen::random_connected_space(&mut rng, n, (0.1, 2.0), (0.1, 5.0))
        } else {
            gen::random_connected_space(&mut rng, n.max(3), (0.0, 2.0), (0.1, 5.0))
        };
        let n = space.len();
        let v = gen::random_dart_field(&mut rng, &space, -2.0, 2.0);
        let w = gen::random_dart_field(&mut rng, &space, -2.0, 2.0);
        let h = gen::random_vertex_function(&mut rng, n, -2.0, 2.0);

        // axioms: triangle + homogeneity
        let nv = pointwise_norm(&space, &v);
        let nw = pointwise_norm(&space, &w);
        let nsum = pointwise_norm(&space, &v.add(&w));
        for x in 0..n {
            axioms = axioms.max(nsum.values()[x] - nv.values()[x] - nw.values()[x]);
        }
        let nhv = pointwise_norm(&space, &scalar_mul(&space, &h, &v));
        for x in 0..n {
            axioms = axioms.max((nhv.values()[x] - h.values()[x].abs() * nv.values()[x]).abs());
        }
        hilbert = hilbert.max(parallelogram_deviation(&space, &v, &w));

        // |pr(v)| = Pr(|v|) m-a.e., and the gradient-norm identity
        let q = pr_bar(&space, &v);
        norm_identity_ok &= q
            .norm(&space)
            .eq_m(&space, &MClass::new(pointwise_norm(&space, &v)));
        let f = gen::random_vertex_function(&mut rng, n, -2.0, 2.0);
        norm_identity_ok &= pointwise_norm(&space, &gradient_field(&space, &f)).values()
            == gradient_modulus(&space, &f).values();

        // Pr after QCR is the identity, at both levels
        let class = MClass::new(f.clone());
        section_ok &= pr_project(&qcr(&space, &class)).eq_m(&space, &class);
        section_ok &= pr_bar(&space, &qcr_field(&space, &q)) == q;

        // QCR linearity
        let d = MClass::new(gen::random_vertex_function(&mut rng, n, -2.0, 2.0));
        let (alpha, beta) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let lhs = qcr(&space, &class.scale(alpha).add(&d.scale(beta)));
        let rhs = qcr(&space, &class).scale(alpha).add(&qcr(&space, &d).scale(beta));
        for x in 0..n {
            qcr_linear = qcr_linear.max((lhs.rep.values()[x] - rhs.rep.values()[x]).abs());
        }

        // factorization commutes
        if i % 10 == 0 {
            let vectors: Vec<DartField> = (0..3)
                .map(|_| gen::random_dart_field(&mut rng, &space, -2.0, 2.0))
                .collect();
            let sp = space.clone();
            let (s, rep) = factor_through(&space, move |u| pr_bar(&sp, u), &vectors).unwrap();
            factor_ok &= rep.commutes_exactly && rep.m_linear_max_err <= 1e-12;
            let u = pr_bar(&space, &vectors[0]);
            factor_ok &= s(&u) == u;
        }
    }
    let worst = axioms.max(hilbert).max(qcr_linear);
    c.finish(
        worst <= 1e-12 && norm_identity_ok && section_ok && factor_ok,
        format!(
            "500 samples; worst deviation {worst:.2e}, exact identities hold: {}",
            norm_identity_ok && section_ok && factor_ok
        ),
    );
}

#[test]
fn acceptance_09_counterexample_scenarios() {
    let c = Criterion::begin("9 counterexample scenarios at n=1001", 60);
    let dom = scenario_dominated_convergence_failure(1001, 10).unwrap();
    let cap = scenario_capae_vs_dcap(1001, 10).unwrap();
    c.finish(
        dom.pass && cap.pass,
        format!(
            "dominated-convergence scenario pass={}, cap-a.e.-vs-d_Cap scenario pass={}",
            dom.pass, cap.pass
        ),
    );
}

#[test]
fn acceptance_10_k2_closed_forms() {
    let c = Criterion::begin("10 K2 closed-form fixture", 5);
    let space = Arc::new(k2());
    let a = space.subset_of_ids(&["a"]).unwrap();
    let x = Subset::full(2);
    let cap_a = capacity(&space, &a).unwrap().value;
    let cap_x = capacity(&space, &x).unwrap().value;
    let ctx = CapContext::new(Arc::clone(&space));
    let chi_a = CapClass::new(VertexFunction(vec![1.0, 0.0]));
    let zero = CapClass::zero(2);
    let dcap = ctx.dcap(&chi_a, &zero).unwrap();
    let dqu_val = dqu(&ctx, &chi_a, &zero, DquMethod::BruteForce).unwrap().value;
    // the chi_a integral against Cap also hits the closed form
    let integral = integrate(ctx.cap_measure(), chi_a.rep.values(), None).unwrap();
    let pass = (cap_a - 1.5).abs() <= 1e-12
        && (cap_x - 2.0).abs() <= 1e-12
        && (dcap - 0.75).abs() <= 1e-12
        && (dqu_val - 0.75).abs() <= 1e-12
        && (integral - 1.5).abs() <= 1e-12;
    c.finish(
        pass,
        format!("Cap(a)={cap_a}, Cap(X)={cap_x}, d_Cap={dcap}, d_QU={dqu_val}"),
    );
}
