//! The quasi-uniform distance d_QU, its sandwich against d_Cap and the
//! Sobolev-norm bound, and the quasi-continuous-representative operator QCR
//! (harmonic extension at m-null vertices).

use crate::error::{Error, Result};
use crate::l0cap::{CapContext, CapClass};
use crate::sobolev::{canonical_representative, w12_class_norm_sq, MClass, VertexFunction};
use crate::space::Space;
use crate::subset::Subset;

pub const METRIC_SLACK: f64 = 1e-10;
const DQU_BRUTE_LIMIT: usize = 14;

/// Two discrete readings of quasi-continuity. On a finite discrete topology
/// every function is continuous, so the topologically faithful space QC_triv
/// is everything; the selection-faithful space QC_canon (harmonic at m-null
/// vertices) is what makes the projection injective and QCR unique. R1 means
/// every vertex carries positive mass, where the two readings coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QCRegime {
    R1FullyCharged,
    R2WithNullVertices,
}

pub fn regime(space: &Space) -> QCRegime {
    if space.fully_charged() {
        QCRegime::R1FullyCharged
    } else {
        QCRegime::R2WithNullVertices
    }
}

/// Membership in the canonical subspace: harmonic at every m-null vertex
/// (and 0 on fully massless components).
pub fn is_canonical(space: &Space, f: &VertexFunction, tol: f64) -> bool {
    for x in 0..space.len() {
        if space.cap_null().contains(x) {
            if f.0[x] != 0.0 {
                return false;
            }
        } else if space.mass(x) == 0.0 {
            let mut r = 0.0;
            for &(y, eid) in space.neighbors(x) {
                r += space.edges()[eid].w * (f.0[x] - f.0[y]);
            }
            if r.abs() > tol {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DquMethod {
    /// Threshold scan over superlevel sets of |f-g| ∧ 1; exact for constant
    /// exhaustions, where the optimal exceptional set is a superlevel set.
    ExactScan,
    /// Enumerates all exceptional sets; |V| <= 14.
    BruteForce,
    /// The threshold scan run under a general exhaustion: an upper bound.
    UpperBound,
}

#[derive(Debug, Clone)]
pub struct DquResult {
    pub value: f64,
    pub optimal_set: Subset,
    pub method: DquMethod,
    /// Set when an exact scan was requested under a non-constant exhaustion
    /// and the result is only an upper bound.
    pub downgraded: bool,
}

/// d_QU(f, g) = inf_E Σ_k [Cap(E ∩ A_k) / (2^k (Cap(A_k) ∨ 1))
///                         + 2^{-k} sup_{A_k ∖ E} |f-g| ∧ 1].
pub fn dqu(
    ctx: &CapContext,
    f: &CapClass,
    g: &CapClass,
    method: DquMethod,
) -> Result<DquResult> {
    let space = ctx.space();
    let v = f.rep.abs_min_one(&g.rep);
    let cost = |e: &Subset| -> f64 {
        let mut total = 0.0;
        for (a_k, w) in space.exhaustion().iter().zip(space.exhaustion_weights()) {
            let cap_term = ctx.cap(&e.intersection(a_k)) / ctx.cap(a_k).max(1.0);
            let sup = a_k
                .difference(e)
                .iter()
                .map(|x| v.0[x])
                .fold(0.0f64, f64::max);
            total += w * (cap_term + sup);
        }
        total
    };

    match method {
        DquMethod::BruteForce => {
            let n = space.len();
            if n > DQU_BRUTE_LIMIT {
                return Err(Error::BruteForceTooLarge {
                    size: n,
                    limit: DQU_BRUTE_LIMIT,
                });
            }
            let mut best = (f64::INFINITY, Subset::empty(n));
            for mask in 0..(1u64 << n) {
                let e = Subset::from_mask(n, mask);
                let c = cost(&e);
                if c < best.0 {
                    best = (c, e);
                }
            }
            Ok(DquResult {
                value: best.0,
                optimal_set: best.1,
                method: DquMethod::BruteForce,
                downgraded: false,
            })
        }
        DquMethod::ExactScan | DquMethod::UpperBound => {
            let downgraded =
                method == DquMethod::ExactScan && !space.constant_exhaustion();
            let effective = if downgraded || method == DquMethod::UpperBound {
                DquMethod::UpperBound
            } else {
                DquMethod::ExactScan
            };
            // Candidate thresholds: 0 and every distinct value of |f-g| ∧ 1.
            let mut lambdas: Vec<f64> = v.0.clone();
            lambdas.push(0.0);
            lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            lambdas.dedup();
            let mut best: Option<(f64, f64, Subset)> = None;
            for &lam in &lambdas {
                let e = v.strict_superlevel(lam);
                let c = cost(&e);
                // ties keep the smallest optimal lambda
                if best.as_ref().is_none_or(|(bc, _, _)| c < *bc) {
                    best = Some((c, lam, e));
                }
            }
            let (value, _, optimal_set) = best.expect("at least one candidate");
            Ok(DquResult {
                value,
                optimal_set,
                method: effective,
                downgraded,
            })
        }
    }
}

/// Best exact evaluation available: the scan for constant exhaustions, brute
/// force for small general spaces.
pub fn dqu_exact(ctx: &CapContext, f: &CapClass, g: &CapClass) -> Result<DquResult> {
    if ctx.space().constant_exhaustion() {
        dqu(ctx, f, g, DquMethod::ExactScan)
    } else {
        dqu(ctx, f, g, DquMethod::BruteForce)
    }
}

#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub dcap: f64,
    pub dqu: f64,
    pub left_ok: bool,
    pub right_ok: bool,
}

/// d_Cap <= d_QU <= 2 sqrt(d_Cap), with 1e-10 slack.
pub fn check_sandwich(ctx: &CapContext, f: &CapClass, g: &CapClass) -> Result<SandwichReport> {
    let dcap = ctx.dcap(f, g)?;
    let dqu = dqu_exact(ctx, f, g)?.value;
    Ok(SandwichReport {
        dcap,
        dqu,
        left_ok: dcap <= dqu + METRIC_SLACK,
        right_ok: dqu <= 2.0 * dcap.sqrt() + METRIC_SLACK,
    })
}

/// The quasi-continuous representative of an m-class: the canonical
/// minimizer (harmonic extension at m-null vertices, 0 on fully massless
/// components). Linear, and a section of the projection.
pub fn qcr(space: &Space, class: &MClass) -> CapClass {
    CapClass::new(canonical_representative(space, class))
}

#[derive(Debug, Clone)]
pub struct LinkReport {
    /// d_QU between the canonical representatives of the two classes.
    pub dqu: f64,
    /// 3 ‖[f-g]_m‖^{2/3} computed from the squared class norm.
    pub bound: f64,
    pub class_norm_sq: f64,
    pub ok: bool,
}

/// d_QU([f], [g]) <= 3 ‖[f]_m - [g]_m‖_{W^{1,2}}^{2/3}, evaluated on the
/// canonical representatives (the discrete continuous representatives, which
/// is the hypothesis under which the bound is provable).
pub fn check_linkqusob(
    ctx: &CapContext,
    f: &VertexFunction,
    g: &VertexFunction,
) -> Result<LinkReport> {
    let space = ctx.space();
    let diff = MClass::new(f.sub(g));
    let class_norm_sq = w12_class_norm_sq(space, &diff).norm_sq;
    let fc = qcr(space, &MClass::new(f.clone()));
    let gc = qcr(space, &MClass::new(g.clone()));
    let d = dqu_exact(ctx, &fc, &gc)?.value;
    let bound = 3.0 * class_norm_sq.powf(1.0 / 3.0);
    Ok(LinkReport {
        dqu: d,
        bound,
        class_norm_sq,
        ok: d <= bound + METRIC_SLACK,
    })
}

#[derive(Debug, Clone)]
pub struct QuVerdict {
    pub converges: bool,
    pub tail_dqu: Vec<f64>,
    /// Indices with d_QU(f_{n_j}, f) <= 2^{-j}, witnessing a summable
    /// subsequence when one exists.
    pub subsequence: Vec<usize>,
}

/// Checks d_QU(f_n, f) -> 0 on the window tail and extracts the summable
/// subsequence that witnesses quasi-uniform convergence.
pub fn qu_convergence(
    ctx: &CapContext,
    seq: &[CapClass],
    limit: &CapClass,
    window: usize,
    tol: f64,
) -> Result<QuVerdict> {
    let mut dists = Vec::with_capacity(seq.len());
    for f_n in seq {
        dists.push(dqu_exact(ctx, f_n, limit)?.value);
    }
    let start = seq.len().saturating_sub(window);
    let tail_dqu = dists[start..].to_vec();
    let converges = tail_dqu.iter().all(|&d| d <= tol);
    let mut subsequence = Vec::new();
    let mut j = 1i32;
    for (n, &d) in dists.iter().enumerate() {
        if d <= 0.5f64.powi(j) {
            subsequence.push(n);
            j += 1;
        }
    }
    Ok(QuVerdict {
        converges,
        tail_dqu,
        subsequence,
    })
}

#[derive(Debug, Clone)]
pub struct NormQcrReport {
    /// The assertion |QCR(f)| = QCR(|f|) is made in regime R1 and, in R2,
    /// when the canonical extension keeps one sign on each null component.
    pub applicable: bool,
    pub holds: bool,
    pub max_deviation: f64,
}

/// Compares |QCR(f)| with QCR(|f|). Harmonic extension does not commute with
/// absolute value across sign changes, so outside the applicable regime the
/// deviation is reported without being asserted.
pub fn check_normqcr(space: &Space, class: &MClass) -> NormQcrReport {
    let canon = canonical_representative(space, class);
    let abs_class = MClass::new(class.rep.abs());
    let canon_of_abs = canonical_representative(space, &abs_class);
    let abs_of_canon = canon.abs();
    let max_deviation = abs_of_canon
        .0
        .iter()
        .zip(&canon_of_abs.0)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let applicable = match regime(space) {
        QCRegime::R1FullyCharged => true,
        QCRegime::R2WithNullVertices => {
            // constant sign of the canonical extension on each component that
            // contains a null vertex
            let mut comp_min = vec![f64::INFINITY; space.component_count()];
            let mut comp_max = vec![f64::NEG_INFINITY; space.component_count()];
            let mut comp_has_null = vec![false; space.component_count()];
            for x in 0..space.len() {
                let c = space.component_of(x);
                comp_min[c] = comp_min[c].min(canon.0[x]);
                comp_max[c] = comp_max[c].max(canon.0[x]);
                if space.mass(x) == 0.0 {
                    comp_has_null[c] = true;
                }
            }
            (0..space.component_count())
                .filter(|&c| comp_has_null[c])
                .all(|c| comp_min[c] >= 0.0 || comp_max[c] <= 0.0)
        }
    };
    NormQcrReport {
        applicable,
        holds: max_deviation <= 1e-12,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::space::{k2, space_from_lists, Space};

    fn ctx(space: Space) -> CapContext {
        CapContext::new(Arc::new(space))
    }

    fn path_with_null() -> Space {
        space_from_lists(
            &[("a", 1.0), ("b", 0.0), ("c", 1.0)],
            &[("a", "b", 1.0), ("b", "c", 1.0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dqu_k2_brute_force_candidates() {
        let c = ctx(k2());
        let f = CapClass::new(VertexFunction(vec![1.0, 0.0]));
        let g = CapClass::zero(2);
        // E ∈ {∅, {a}, {b}, X} cost 1, 0.75, 1.75, 1
        let r = dqu(&c, &f, &g, DquMethod::BruteForce).unwrap();
        assert!((r.value - 0.75).abs() < 1e-15);
        assert_eq!(r.optimal_set.mask(), 0b01);
        let scan = dqu(&c, &f, &g, DquMethod::ExactScan).unwrap();
        assert_eq!(scan.value, r.value);
        assert!(!scan.downgraded);
    }

    #[test]
    fn dqu_zero_distance_and_saturated_difference() {
        let c = ctx(k2());
        let f = CapClass::new(VertexFunction(vec![0.4, -0.7]));
        assert_eq!(dqu(&c, &f, &f, DquMethod::ExactScan).unwrap().value, 0.0);
        // |f-g| >= 1 everywhere: min(1, Cap-normalized full-set cost)
        let g = CapClass::new(VertexFunction(vec![1.6, -2.0]));
        let r = dqu(&c, &f, &g, DquMethod::BruteForce).unwrap();
        let full_cost: f64 = 2.0 / 2.0; // Cap(X)/(Cap(X) ∨ 1)
        assert!((r.value - full_cost.min(1.0)).abs() < 1e-15);
    }

    #[test]
    fn exact_scan_downgrades_under_nonconstant_exhaustion() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 1.0)],
            &[("a", "b", 1.0)],
            Some(vec![vec!["a"], vec!["a", "b"]]),
        )
        .unwrap();
        let c = ctx(s);
        let f = CapClass::new(VertexFunction(vec![1.0, 0.0]));
        let g = CapClass::zero(2);
        let r = dqu(&c, &f, &g, DquMethod::ExactScan).unwrap();
        assert!(r.downgraded);
        assert_eq!(r.method, DquMethod::UpperBound);
        let brute = dqu(&c, &f, &g, DquMethod::BruteForce).unwrap();
        assert!(brute.value <= r.value + 1e-15);
    }

    #[test]
    fn sandwich_on_k2() {
        let c = ctx(k2());
        let f = CapClass::new(VertexFunction(vec![1.0, 0.0]));
        let g = CapClass::zero(2);
        let r = check_sandwich(&c, &f, &g).unwrap();
        assert!((r.dcap - 0.75).abs() < 1e-15);
        assert!((r.dqu - 0.75).abs() < 1e-15);
        assert!(r.left_ok && r.right_ok);
        let same = check_sandwich(&c, &f, &f).unwrap();
        assert_eq!(same.dcap, 0.0);
        assert_eq!(same.dqu, 0.0);
    }

    #[test]
    fn qcr_harmonic_extension() {
        let s = path_with_null();
        let class = MClass::new(VertexFunction(vec![0.0, 99.0, 1.0]));
        let rep = qcr(&s, &class);
        assert!((rep.rep.0[1] - 0.5).abs() < 1e-12);
        // section of the projection
        assert!(crate::l0cap::pr_project(&rep).eq_m(&s, &class));
        // constants extend to constants, and normqcr holds there
        let ones = MClass::new(VertexFunction(vec![1.0, -3.0, 1.0]));
        let rep = qcr(&s, &ones);
        assert_eq!(rep.rep.0, vec![1.0, 1.0, 1.0]);
        let report = check_normqcr(&s, &ones);
        assert!(report.applicable && report.holds);
    }

    #[test]
    fn qcr_identity_in_r1() {
        let s = k2();
        assert_eq!(regime(&s), QCRegime::R1FullyCharged);
        let class = MClass::new(VertexFunction(vec![0.3, -0.8]));
        assert_eq!(qcr(&s, &class).rep, class.rep);
    }

    #[test]
    fn normqcr_fails_across_sign_change_and_is_reported() {
        let s = path_with_null();
        assert_eq!(regime(&s), QCRegime::R2WithNullVertices);
        let class = MClass::new(VertexFunction(vec![-1.0, 0.0, 1.0]));
        let report = check_normqcr(&s, &class);
        // canonical extension (-1, 0, 1) crosses zero: |QCR f| = (1,0,1) but
        // QCR|f| = (1,1,1)
        assert!(!report.applicable);
        assert!(!report.holds);
        assert!((report.max_deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_uniqueness_in_r2() {
        let s = path_with_null();
        let c1 = MClass::new(VertexFunction(vec![0.2, 123.0, -0.4]));
        let c2 = MClass::new(VertexFunction(vec![0.2, -55.0, -0.4]));
        // equal m-a.e. implies identical canonical representatives, exactly
        assert_eq!(qcr(&s, &c1).rep, qcr(&s, &c2).rep);
        assert!(is_canonical(&s, &qcr(&s, &c1).rep, 1e-12));
    }

    #[test]
    fn linkqusob_on_k2() {
        let c = ctx(k2());
        let f = VertexFunction(vec![1.0, 0.0]);
        let g = VertexFunction::zeros(2);
        let r = check_linkqusob(&c, &f, &g).unwrap();
        // ‖χ_a‖² = 2, bound 3·2^{1/3} ≈ 3.7798 >= 0.75
        assert!((r.class_norm_sq - 2.0).abs() < 1e-12);
        assert!((r.bound - 3.0 * 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(r.ok);
        let same = check_linkqusob(&c, &f, &f).unwrap();
        assert_eq!(same.dqu, 0.0);
        assert!(same.ok);
    }

    #[test]
    fn linkqusob_holds_with_junk_at_null_vertex() {
        let c = ctx(path_with_null());
        // raw representative spikes at the null vertex; the class norm is 0,
        // and so is d_QU between canonical representatives
        let f = VertexFunction(vec![0.0, 100.0, 0.0]);
        let g = VertexFunction::zeros(3);
        let r = check_linkqusob(&c, &f, &g).unwrap();
        assert_eq!(r.class_norm_sq, 0.0);
        assert!(r.dqu <= 1e-15);
        assert!(r.ok);
    }

    #[test]
    fn qu_convergence_shrinking() {
        let c = ctx(k2());
        let seq: Vec<CapClass> = (1..=40)
            .map(|n| CapClass::new(VertexFunction(vec![1.0 / n as f64, 0.0])))
            .collect();
        let v = qu_convergence(&c, &seq, &CapClass::zero(2), 5, 0.05).unwrap();
        assert!(v.converges);
        assert!(!v.subsequence.is_empty());
        let stay = qu_convergence(&c, &seq, &CapClass::new(VertexFunction(vec![1.0, 0.0])), 5, 0.05)
            .unwrap();
        assert!(!stay.converges);
    }
}
