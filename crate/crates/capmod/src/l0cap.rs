//! The metric space L0(Cap): Cap-classes of vertex functions, the exhaustion-
//! weighted distance d_Cap, convergence characterizations, simple-function
//! density, and the projection to m-classes.

use std::sync::Arc;

use crate::capacity::capacity_outer_measure;
use crate::error::{Error, Result};
use crate::outer::{integrate, OuterMeasure};
use crate::sobolev::{MClass, VertexFunction};
use crate::space::Space;
use crate::subset::Subset;

/// A vertex function up to Cap-null vertices (those in fully massless
/// components); equality is agreement off that set.
#[derive(Debug, Clone)]
pub struct CapClass {
    pub rep: VertexFunction,
}

impl CapClass {
    pub fn new(rep: VertexFunction) -> Self {
        CapClass { rep }
    }

    pub fn zero(n: usize) -> Self {
        CapClass::new(VertexFunction::zeros(n))
    }

    pub fn eq_cap(&self, space: &Space, other: &CapClass) -> bool {
        (0..space.len())
            .filter(|&x| !space.cap_null().contains(x))
            .all(|x| self.rep.0[x] == other.rep.0[x])
    }

    pub fn add(&self, other: &CapClass) -> CapClass {
        CapClass::new(self.rep.add(&other.rep))
    }

    pub fn sub(&self, other: &CapClass) -> CapClass {
        CapClass::new(self.rep.sub(&other.rep))
    }

    pub fn mul(&self, other: &CapClass) -> CapClass {
        CapClass::new(self.rep.mul(&other.rep))
    }

    pub fn scale(&self, c: f64) -> CapClass {
        CapClass::new(self.rep.scale(c))
    }

    pub fn min(&self, other: &CapClass) -> CapClass {
        CapClass::new(self.rep.min(&other.rep))
    }

    pub fn max(&self, other: &CapClass) -> CapClass {
        CapClass::new(self.rep.max(&other.rep))
    }
}

/// Shared evaluation context: a space together with its capacity measure,
/// whose cache makes repeated metric evaluations cheap. The cache is the
/// only synchronization point; everything else is pure.
pub struct CapContext {
    space: Arc<Space>,
    cap: OuterMeasure,
}

impl CapContext {
    pub fn new(space: Arc<Space>) -> Self {
        let cap = capacity_outer_measure(Arc::clone(&space));
        CapContext { space, cap }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<Space> {
        Arc::clone(&self.space)
    }

    pub fn cap_measure(&self) -> &OuterMeasure {
        &self.cap
    }

    pub fn cap(&self, s: &Subset) -> f64 {
        self.cap.value(s)
    }

    fn check_len(&self, f: &VertexFunction) -> Result<()> {
        if f.len() != self.space.len() {
            return Err(Error::FunctionSizeMismatch {
                expected: self.space.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// d_Cap(f, g) = Σ_k 2^{-k} (Cap(A_k) ∨ 1)^{-1} ∫_{A_k} |f-g| ∧ 1 dCap,
    /// with the stabilized exhaustion tail summed in closed form.
    pub fn dcap(&self, f: &CapClass, g: &CapClass) -> Result<f64> {
        self.check_len(&f.rep)?;
        self.check_len(&g.rep)?;
        let diff = f.rep.abs_min_one(&g.rep);
        let weights = self.space.exhaustion_weights();
        let mut total = 0.0;
        for (a_k, w) in self.space.exhaustion().iter().zip(weights) {
            let denom = self.cap(a_k).max(1.0);
            let integral = integrate(&self.cap, diff.values(), Some(a_k))?;
            total += w * integral / denom;
        }
        Ok(total)
    }

    /// Distance induced on any family with a pointwise norm: d(0, |v|).
    pub fn dcap_of_norm(&self, norm: &VertexFunction) -> Result<f64> {
        self.dcap(
            &CapClass::new(norm.clone()),
            &CapClass::zero(self.space.len()),
        )
    }
}

/// Forgets values on m-null vertices.
pub fn pr_project(c: &CapClass) -> MClass {
    MClass::new(c.rep.clone())
}

/// Floor-quantization onto the grid eps·Z: sup-norm error < eps, hence
/// d_Cap(f, result) <= eps.
pub fn simple_approximate(c: &CapClass, eps: f64) -> Result<CapClass> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEps(eps));
    }
    Ok(CapClass::new(c.rep.map(|x| eps * (x / eps).floor())))
}

#[derive(Debug, Clone)]
pub struct ConvergenceVerdict {
    /// Criterion (i): d_Cap(f_n, f) below tol on the window tail.
    pub dcap_converges: bool,
    /// Criterion (ii): Cap(B ∩ {|f_n - f| > eps}) below tol on the tail, for
    /// every eps in the grid and B along the exhaustion.
    pub cap_criterion_converges: bool,
    pub agree: bool,
    pub tail_dcap: Vec<f64>,
    pub worst_tail_cap: f64,
}

/// Evaluates both convergence characterizations on the tail of an explicit
/// finite sequence and reports whether they agree.
pub fn check_convergence(
    ctx: &CapContext,
    seq: &[CapClass],
    limit: &CapClass,
    eps_grid: &[f64],
    window: usize,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    let start = seq.len().saturating_sub(window);
    let mut tail_dcap = Vec::new();
    for f_n in &seq[start..] {
        tail_dcap.push(ctx.dcap(f_n, limit)?);
    }
    let dcap_converges = tail_dcap.iter().all(|&d| d <= tol);

    let mut worst: f64 = 0.0;
    for f_n in &seq[start..] {
        let diff = f_n.rep.sub(&limit.rep).abs();
        for &eps in eps_grid {
            let over = diff.strict_superlevel(eps);
            for b in ctx.space().exhaustion() {
                worst = worst.max(ctx.cap(&over.intersection(b)));
            }
        }
    }
    let cap_criterion_converges = worst <= tol;
    Ok(ConvergenceVerdict {
        dcap_converges,
        cap_criterion_converges,
        agree: dcap_converges == cap_criterion_converges,
        tail_dcap,
        worst_tail_cap: worst,
    })
}

/// Picks n_1 < n_2 < ... so that every pair in the tail from n_j onward
/// satisfies the j-th bound; this realizes consecutive bounds
/// pair(f_{n_j}, f_{n_{j+1}}) <= 2^{-j} the way the Cauchy constructions do.
fn tail_subsequence(
    len: usize,
    mut pair_ok: impl FnMut(usize, usize, i32) -> Result<bool>,
) -> Result<Vec<usize>> {
    let mut picked: Vec<usize> = Vec::new();
    let mut j = 1i32;
    while j <= 60 {
        let lo = picked.last().map_or(0, |&p| p + 1);
        let mut found = None;
        'scan: for n in lo..len {
            for a in n..len {
                for b in a + 1..len {
                    if !pair_ok(a, b, j)? {
                        continue 'scan;
                    }
                }
            }
            found = Some(n);
            break;
        }
        match found {
            Some(n) => {
                picked.push(n);
                j += 1;
                if n == len - 1 {
                    break;
                }
            }
            None => break,
        }
    }
    Ok(picked)
}

/// Extraction of a subsequence with d_Cap(f_{n_j}, f_{n_{j+1}}) <= 2^{-j};
/// None when the finite list cannot sustain the rule.
pub fn extract_ae_subsequence(ctx: &CapContext, seq: &[CapClass]) -> Result<Option<Vec<usize>>> {
    if seq.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let picked = tail_subsequence(seq.len(), |a, b, j| {
        Ok(ctx.dcap(&seq[a], &seq[b])? <= 0.5f64.powi(j))
    })?;
    if picked.len() >= 2 || seq.len() == 1 {
        Ok(Some(picked))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone)]
pub struct CompleteLimit {
    pub limit: CapClass,
    pub subsequence: Vec<usize>,
    /// Vertices where the increment bound failed at the last step; the limit
    /// is 0 there.
    pub exceptional: Subset,
    pub exceptional_capacity: f64,
    pub certified: bool,
}

/// Finite surrogate of the completeness construction: extracts a subsequence
/// whose increments satisfy Cap(A_k ∩ {|f_{n_i} - f_{n_{i+1}}| > 2^{-i}}) <= 2^{-i},
/// takes the pointwise limit off the exceptional set (0 on it), and certifies
/// convergence to it by the Cap criterion.
pub fn complete_limit(
    ctx: &CapContext,
    seq: &[CapClass],
    eps_grid: &[f64],
    window: usize,
    tol: f64,
) -> Result<CompleteLimit> {
    let n = ctx.space().len();
    if seq.is_empty() {
        return Ok(CompleteLimit {
            limit: CapClass::zero(n),
            subsequence: Vec::new(),
            exceptional: Subset::empty(n),
            exceptional_capacity: 0.0,
            certified: false,
        });
    }
    // Subsequence by the capacity increment rule.
    let increment_ok = |a: &CapClass, b: &CapClass, i: i32| -> bool {
        let bound = 0.5f64.powi(i);
        let over = a.rep.sub(&b.rep).abs().strict_superlevel(bound);
        ctx.space()
            .exhaustion()
            .iter()
            .all(|ak| ctx.cap(&over.intersection(ak)) <= bound)
    };
    let mut picked = tail_subsequence(seq.len(), |a, b, i| Ok(increment_ok(&seq[a], &seq[b], i)))?;
    if picked.is_empty() {
        picked.push(seq.len() - 1);
    }
    let last_pair_bound = 0.5f64.powi((picked.len() as i32 - 1).max(1));
    let exceptional = if picked.len() >= 2 {
        let a = &seq[picked[picked.len() - 2]];
        let b = &seq[picked[picked.len() - 1]];
        a.rep.sub(&b.rep).abs().strict_superlevel(last_pair_bound)
    } else {
        Subset::empty(n)
    };
    let mut limit_vals = seq[*picked.last().unwrap()].rep.0.clone();
    for x in exceptional.iter() {
        limit_vals[x] = 0.0;
    }
    let limit = CapClass::new(VertexFunction(limit_vals));
    let exceptional_capacity = ctx.cap(&exceptional);
    let verdict = check_convergence(ctx, seq, &limit, eps_grid, window, tol)?;
    Ok(CompleteLimit {
        limit,
        subsequence: picked,
        exceptional,
        exceptional_capacity,
        certified: verdict.cap_criterion_converges,
    })
}
