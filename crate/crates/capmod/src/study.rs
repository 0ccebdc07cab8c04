//! Scenario studies: grid-refinement behavior of point capacities and the
//! counterexample scenarios (failure of dominated convergence, pointwise
//! convergence without metric convergence).

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use crate::capacity::capacity;
use crate::error::{Error, Result};
use crate::l0cap::{check_convergence, CapClass, CapContext};
use crate::outer::integrate;
use crate::quasi::qu_convergence;
use crate::report::{CheckRecord, Report};
use crate::sobolev::VertexFunction;
use crate::space::{grid_1d, grid_2d};
use crate::subset::Subset;

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg.to_string()))
    }
}

fn increasing(ns: &[usize]) -> bool {
    !ns.is_empty() && ns.windows(2).all(|w| w[0] < w[1])
}

/// Capacity of the center vertex on refining grids over [-l, l]; the values
/// approach 2, the infimum realized by the exponentially decaying profile on
/// the line, and the error shrinks monotonically along the refinement.
pub fn study_refine_1d(l: f64, n_list: &[usize]) -> Result<Report> {
    let start = Instant::now();
    require(l >= 5.0, "l must be at least 5")?;
    require(increasing(n_list), "n_list must be strictly increasing")?;
    const TARGET: f64 = 2.0;

    let mut checks = Vec::new();
    let mut errors = Vec::new();
    let mut values = Vec::new();
    for &n in n_list {
        let g = grid_1d(-l, l, n)?;
        let center = (n - 1) / 2;
        let e = Subset::from_indices(n, [center])?;
        let r = capacity(&g, &e)?;
        checks.push(CheckRecord::info(
            format!("cap(center) n={n}"),
            json!(r.value),
        ));
        errors.push((r.value - TARGET).abs());
        values.push(r.value);
    }
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    checks.push(CheckRecord::is_true(
        "refinement error decreases monotonically",
        monotone,
    ));
    checks.push(CheckRecord::approx(
        format!("cap(center) at n={} within 2% of 2", n_list.last().unwrap()),
        TARGET,
        *values.last().unwrap(),
        0.04,
    ));
    // sanity anchor: the whole grid has constant potential 1 and capacity
    // equal to the total mass, exactly 2l
    let n_last = *n_list.last().unwrap();
    let g = grid_1d(-l, l, n_last)?;
    let whole = capacity(&g, &Subset::full(n_last))?;
    checks.push(CheckRecord::approx(
        "cap(whole grid) = total mass",
        2.0 * l,
        whole.value,
        1e-9 * l,
    ));

    let mut params = BTreeMap::new();
    params.insert("l".into(), json!(l));
    params.insert("n_list".into(), json!(n_list));
    params.insert("solver_tolerance".into(), json!("direct sparse factorization"));
    Ok(Report::assemble(
        "study:refine_1d",
        "line-refinement-point-capacity-toward-2",
        params,
        checks,
        start.elapsed(),
    ))
}

/// Capacity of the center vertex on n-by-n grids over [-1,1]^2 with unit
/// edge weights: strictly decreasing in n, with at least a 10% drop from the
/// coarsest to the finest grid (points are capacity-null in the plane).
pub fn study_refine_2d(n_list: &[usize]) -> Result<Report> {
    let start = Instant::now();
    require(increasing(n_list), "n_list must be strictly increasing")?;
    require(
        n_list.last().is_none_or(|&n| n <= 512),
        "grid size capped at 512",
    )?;

    let mut checks = Vec::new();
    let mut values = Vec::new();
    for &n in n_list {
        let g = grid_2d(-1.0, 1.0, n)?;
        let ic = (n - 1) / 2;
        let center = g
            .vertex(&format!("x{ic}_{ic}"))
            .expect("center vertex exists");
        let e = Subset::from_indices(g.len(), [center])?;
        let r = capacity(&g, &e)?;
        checks.push(CheckRecord::info(
            format!("cap(center) n={n}"),
            json!(r.value),
        ));
        values.push(r.value);
    }
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    checks.push(CheckRecord::is_true(
        "cap(center) strictly decreasing in n",
        strictly_decreasing,
    ));
    if values.len() >= 2 {
        let ratio = values.last().unwrap() / values.first().unwrap();
        checks.push(CheckRecord::at_most(
            "cap(n_max) / cap(n_min) < 0.9",
            ratio,
            0.9,
            0.0,
        ));
    }
    // whole-grid anchor: constant potential, capacity = total mass = 4
    let n_last = *n_list.last().unwrap();
    let g = grid_2d(-1.0, 1.0, n_last)?;
    let whole = capacity(&g, &Subset::full(g.len()))?;
    checks.push(CheckRecord::approx(
        "cap(whole grid) = total mass",
        4.0,
        whole.value,
        1e-9,
    ));

    let mut params = BTreeMap::new();
    params.insert("n_list".into(), json!(n_list));
    params.insert("edge_weight".into(), json!(1.0));
    Ok(Report::assemble(
        "study:refine_2d",
        "planar-point-capacity-decay",
        params,
        checks,
        start.elapsed(),
    ))
}

/// Distinct interior translates of a singleton on a uniform grid of the line.
fn singleton_translates(n: usize, count: usize) -> Result<(Arc<crate::space::Space>, Vec<usize>)> {
    require(100 * count <= n, "count must be much smaller than n")?;
    require(count >= 2, "need at least two translates")?;
    let g = Arc::new(grid_1d(-10.0, 10.0, n)?);
    let center = (n - 1) / 2;
    let stride = (n / (4 * count)).max(1);
    let points: Vec<usize> = (0..count).map(|k| center + k * stride).collect();
    require(
        points.iter().all(|&p| p < n),
        "translates fall inside the grid",
    )?;
    Ok((g, points))
}

/// Translated singletons of (nearly) equal positive capacity: their
/// indicators tend to 0 pointwise while the integrals stay bounded below, so
/// no dominated-convergence statement can hold for this integral.
pub fn scenario_dominated_convergence_failure(n: usize, count: usize) -> Result<Report> {
    let start = Instant::now();
    let (g, points) = singleton_translates(n, count)?;
    let ctx = CapContext::new(Arc::clone(&g));

    let caps: Vec<f64> = points
        .iter()
        .map(|&p| Ok(ctx.cap(&Subset::from_indices(n, [p])?)))
        .collect::<Result<_>>()?;
    let cap_first = caps[0];
    let min_cap = caps.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_cap = caps.iter().cloned().fold(0.0f64, f64::max);

    let mut checks = Vec::new();
    checks.push(CheckRecord::info("capacities", json!(caps)));
    checks.push(CheckRecord::at_most(
        "translates agree within 5%",
        max_cap / min_cap - 1.0,
        0.05,
        0.0,
    ));
    checks.push(CheckRecord::is_true(
        "all translates at least half the first",
        caps.iter().all(|&c| c >= 0.5 * cap_first),
    ));

    // ∫ χ_{P_k} dCap = Cap(P_k): the integral sequence stays bounded below
    // while the pointwise limit is 0 (each vertex is hit at most once).
    let mut integrals = Vec::new();
    for &p in &points {
        let chi = VertexFunction::indicator(&Subset::from_indices(n, [p])?);
        integrals.push(integrate(ctx.cap_measure(), chi.values(), None)?);
    }
    let min_integral = integrals.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(CheckRecord::is_true(
        "integral sequence bounded below by a positive constant",
        min_integral >= 0.5 * cap_first && min_integral > 0.0,
    ));
    let distinct = {
        let mut sorted = points.clone();
        sorted.dedup();
        sorted.len() == points.len()
    };
    checks.push(CheckRecord::is_true(
        "translates are distinct, so the pointwise limit is 0",
        distinct,
    ));
    let zero_integral = integrate(ctx.cap_measure(), &vec![0.0; n], None)?;
    checks.push(CheckRecord::approx(
        "integral of the pointwise limit",
        0.0,
        zero_integral,
        0.0,
    ));

    let mut params = BTreeMap::new();
    params.insert("n".into(), json!(n));
    params.insert("count".into(), json!(count));
    params.insert("points".into(), json!(points));
    Ok(Report::assemble(
        "scenario:dominated_convergence_failure",
        "translated-singletons-defeat-dominated-convergence",
        params,
        checks,
        start.elapsed(),
    ))
}

/// The same moving-singleton data read through the metrics: pointwise
/// convergence to 0 holds with no exceptional set, yet neither d_Cap nor
/// d_QU convergence does; a stationary singleton scaled by 1/k converges in
/// both, and the zero sequence trivially converges.
pub fn scenario_capae_vs_dcap(n: usize, count: usize) -> Result<Report> {
    let start = Instant::now();
    let (g, points) = singleton_translates(n, count)?;
    let ctx = CapContext::new(Arc::clone(&g));
    let zero = CapClass::zero(n);
    const EPS_GRID: [f64; 2] = [0.5, 0.25];
    const WINDOW: usize = 5;
    const TOL: f64 = 0.05;

    let moving: Vec<CapClass> = points
        .iter()
        .map(|&p| {
            Ok(CapClass::new(VertexFunction::indicator(
                &Subset::from_indices(n, [p])?,
            )))
        })
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let v = check_convergence(&ctx, &moving, &zero, &EPS_GRID, WINDOW, TOL)?;
    checks.push(CheckRecord::is_true(
        "moving singleton: d_Cap criterion fails",
        !v.dcap_converges,
    ));
    checks.push(CheckRecord::is_true(
        "moving singleton: Cap criterion fails",
        !v.cap_criterion_converges,
    ));
    checks.push(CheckRecord::is_true(
        "moving singleton: criteria agree",
        v.agree,
    ));
    let qv = qu_convergence(&ctx, &moving, &zero, WINDOW, TOL)?;
    checks.push(CheckRecord::is_true(
        "moving singleton: d_QU fails",
        !qv.converges,
    ));
    let mut dcaps = Vec::new();
    for f in &moving {
        dcaps.push(ctx.dcap(f, &zero)?);
    }
    let floor = dcaps.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(CheckRecord::is_true(
        "d_Cap(f_k, 0) bounded below by a positive constant",
        floor > 1e-6,
    ));
    checks.push(CheckRecord::info("dcap values", json!(dcaps)));
    // pointwise limit 0 with no exceptional vertex: every vertex is in at
    // most one singleton
    let mut seen = std::collections::HashSet::new();
    let pointwise = points.iter().all(|&p| seen.insert(p));
    checks.push(CheckRecord::is_true(
        "pointwise convergence to 0 off no exceptional set",
        pointwise,
    ));

    // contrast: stationary singleton scaled by 1/k converges in both senses
    let stationary: Vec<CapClass> = (1..=40)
        .map(|k| {
            Ok(CapClass::new(
                VertexFunction::indicator(&Subset::from_indices(n, [points[0]])?)
                    .scale(1.0 / k as f64),
            ))
        })
        .collect::<Result<_>>()?;
    let sv = check_convergence(&ctx, &stationary, &zero, &EPS_GRID, WINDOW, TOL)?;
    checks.push(CheckRecord::is_true(
        "scaled stationary singleton converges (d_Cap and Cap criteria)",
        sv.dcap_converges && sv.cap_criterion_converges && sv.agree,
    ));
    let sq = qu_convergence(&ctx, &stationary, &zero, WINDOW, TOL)?;
    checks.push(CheckRecord::is_true(
        "scaled stationary singleton converges (d_QU)",
        sq.converges,
    ));

    let zeros: Vec<CapClass> = (0..6).map(|_| zero.clone()).collect();
    let zv = check_convergence(&ctx, &zeros, &zero, &EPS_GRID, 3, 1e-12)?;
    checks.push(CheckRecord::is_true(
        "zero sequence converges",
        zv.dcap_converges && zv.cap_criterion_converges,
    ));

    let mut params = BTreeMap::new();
    params.insert("n".into(), json!(n));
    params.insert("count".into(), json!(count));
    params.insert("eps_grid".into(), json!(EPS_GRID));
    params.insert("window".into(), json!(WINDOW));
    params.insert("tol".into(), json!(TOL));
    Ok(Report::assemble(
        "scenario:capae_vs_dcap",
        "pointwise-convergence-without-metric-convergence",
        params,
        checks,
        start.elapsed(),
    ))
}
