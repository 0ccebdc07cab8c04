//! The discrete metric measure space: a finite weighted graph with vertex
//! masses and an exhaustion sequence of vertex subsets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::Subset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable after construction; cheap to share behind `Arc`.
#[derive(Debug, Clone)]
pub struct Space {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mass: Vec<f64>,
    edges: Vec<Edge>,
    /// Per vertex: (neighbor, edge id).
    adj: Vec<Vec<(usize, usize)>>,
    exhaustion: Vec<Subset>,
    component: Vec<usize>,
    component_count: usize,
    /// Components whose total mass is zero; their vertices are Cap-null.
    cap_null: Subset,
}

/// Raw description accepted by [`build_space`]; also the JSON schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescription {
    pub vertices: Vec<VertexDescription>,
    pub edges: Vec<EdgeDescription>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDescription {
    pub id: String,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDescription {
    pub u: String,
    pub v: String,
    pub w: f64,
}

/// Validates a description and builds the space. With no exhaustion given,
/// installs the admissible default A_k = X for all k.
pub fn build_space(desc: &SpaceDescription) -> Result<Space> {
    let n = desc.vertices.len();
    let mut ids = Vec::with_capacity(n);
    let mut index = HashMap::with_capacity(n);
    let mut mass = Vec::with_capacity(n);
    for v in &desc.vertices {
        if !v.mass.is_finite() {
            return Err(Error::NonFinite(format!("mass of `{}`", v.id)));
        }
        if v.mass < 0.0 {
            return Err(Error::NegativeMass(v.id.clone(), v.mass));
        }
        if index.insert(v.id.clone(), ids.len()).is_some() {
            return Err(Error::DuplicateVertex(v.id.clone()));
        }
        ids.push(v.id.clone());
        mass.push(v.mass);
    }

    let mut edges = Vec::with_capacity(desc.edges.len());
    let mut seen = std::collections::HashSet::new();
    for e in &desc.edges {
        let u = *index
            .get(&e.u)
            .ok_or_else(|| Error::UnknownVertex(e.u.clone()))?;
        let v = *index
            .get(&e.v)
            .ok_or_else(|| Error::UnknownVertex(e.v.clone()))?;
        if u == v {
            return Err(Error::SelfLoop(e.u.clone()));
        }
        if !e.w.is_finite() {
            return Err(Error::NonFinite(format!("weight of ({},{})", e.u, e.v)));
        }
        if e.w <= 0.0 {
            return Err(Error::NonPositiveWeight(e.u.clone(), e.v.clone(), e.w));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        if !seen.insert((a, b)) {
            return Err(Error::DuplicateEdge(e.u.clone(), e.v.clone()));
        }
        edges.push(Edge { u: a, v: b, w: e.w });
    }

    let mut adj = vec![Vec::new(); n];
    for (eid, e) in edges.iter().enumerate() {
        adj[e.u].push((e.v, eid));
        adj[e.v].push((e.u, eid));
    }

    let exhaustion = match &desc.exhaustion {
        None => vec![Subset::full(n)],
        Some(sets) => {
            if sets.is_empty() {
                return Err(Error::BadExhaustion("empty sequence".into()));
            }
            let mut out = Vec::with_capacity(sets.len());
            for (k, set) in sets.iter().enumerate() {
                let mut s = Subset::empty(n);
                for id in set {
                    let i = *index
                        .get(id)
                        .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
                    s.insert(i);
                }
                if s.is_empty() {
                    return Err(Error::BadExhaustion(format!("A_{} is empty", k + 1)));
                }
                if let Some(prev) = out.last() {
                    if !Subset::is_subset_of(prev, &s) {
                        return Err(Error::BadExhaustion(format!(
                            "A_{} is not contained in A_{}",
                            k,
                            k + 1
                        )));
                    }
                }
                out.push(s);
            }
            if out.last().unwrap().len() != n {
                return Err(Error::BadExhaustion(
                    "sequence does not exhaust the vertex set".into(),
                ));
            }
            out
        }
    };

    // Connected components and the Cap-null set (fully massless components).
    let mut component = vec![usize::MAX; n];
    let mut component_count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = component_count;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if component[y] == usize::MAX {
                    component[y] = component_count;
                    stack.push(y);
                }
            }
        }
        component_count += 1;
    }
    let mut comp_mass = vec![0.0; component_count];
    for x in 0..n {
        comp_mass[component[x]] += mass[x];
    }
    let mut cap_null = Subset::empty(n);
    for x in 0..n {
        if comp_mass[component[x]] == 0.0 {
            cap_null.insert(x);
        }
    }

    Ok(Space {
        ids,
        index,
        mass,
        edges,
        adj,
        exhaustion,
        component,
        component_count,
        cap_null,
    })
}

impl Space {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, usize)] {
        &self.adj[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn exhaustion(&self) -> &[Subset] {
        &self.exhaustion
    }

    /// True when every A_k equals the full vertex set.
    pub fn constant_exhaustion(&self) -> bool {
        self.exhaustion.iter().all(|a| a.len() == self.len())
    }

    /// Weights 2^{-k} attached to the exhaustion terms, with the stabilized
    /// tail Σ_{k≥K} 2^{-k} folded into the last term; they always sum to 1.
    pub fn exhaustion_weights(&self) -> Vec<f64> {
        let k = self.exhaustion.len();
        let mut w = Vec::with_capacity(k);
        for i in 1..k {
            w.push(0.5f64.powi(i as i32));
        }
        w.push(0.5f64.powi(k as i32 - 1));
        w
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.component[x]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn component_members(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.component[x] == c).collect()
    }

    /// Vertices x with Cap({x}) = 0: exactly those in fully massless components.
    pub fn cap_null(&self) -> &Subset {
        &self.cap_null
    }

    /// Vertices with m = 0.
    pub fn m_null(&self) -> Subset {
        let mut s = Subset::empty(self.len());
        for x in 0..self.len() {
            if self.mass[x] == 0.0 {
                s.insert(x);
            }
        }
        s
    }

    /// True when every vertex carries positive mass (regime R1).
    pub fn fully_charged(&self) -> bool {
        self.mass.iter().all(|&m| m > 0.0)
    }

    pub fn subset_of_ids(&self, ids: &[&str]) -> Result<Subset> {
        let mut s = Subset::empty(self.len());
        for id in ids {
            let i = self
                .vertex(id)
                .ok_or_else(|| Error::UnknownVertex((*id).to_string()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn describe(&self) -> SpaceDescription {
        SpaceDescription {
            vertices: (0..self.len())
                .map(|i| VertexDescription {
                    id: self.ids[i].clone(),
                    mass: self.mass[i],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDescription {
                    u: self.ids[e.u].clone(),
                    v: self.ids[e.v].clone(),
                    w: e.w,
                })
                .collect(),
            exhaustion: Some(
                self.exhaustion
                    .iter()
                    .map(|s| s.iter().map(|i| self.ids[i].clone()).collect())
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.describe()).expect("description serializes")
    }

    pub fn from_json(text: &str) -> Result<Space> {
        let desc: SpaceDescription = serde_json::from_str(text)?;
        build_space(&desc)
    }
}

/// Convenience builder used throughout tests and examples.
pub fn space_from_lists(
    vertices: &[(&str, f64)],
    edges: &[(&str, &str, f64)],
    exhaustion: Option<Vec<Vec<&str>>>,
) -> Result<Space> {
    build_space(&SpaceDescription {
        vertices: vertices
            .iter()
            .map(|(id, m)| VertexDescription {
                id: (*id).to_string(),
                mass: *m,
            })
            .collect(),
        edges: edges
            .iter()
            .map(|(u, v, w)| EdgeDescription {
                u: (*u).to_string(),
                v: (*v).to_string(),
                w: *w,
            })
            .collect(),
        exhaustion: exhaustion.map(|sets| {
            sets.into_iter()
                .map(|s| s.into_iter().map(str::to_string).collect())
                .collect()
        }),
    })
}

/// Two unit-mass vertices joined by a unit edge: the standing closed-form fixture.
pub fn k2() -> Space {
    space_from_lists(&[("a", 1.0), ("b", 1.0)], &[("a", "b", 1.0)], None).unwrap()
}

/// Uniform 1-d grid on [lo, hi] with n vertices: trapezoidal masses
/// (h, halved at the two endpoints) and edge weights 1/h, so the Dirichlet
/// energy is the finite-difference approximation of the integral of (f')^2.
pub fn grid_1d(lo: f64, hi: f64, n: usize) -> Result<Space> {
    if n < 2 {
        return Err(Error::GridTooSmall(n));
    }
    if !(lo < hi) {
        return Err(Error::BadGridBounds(lo, hi));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let vertices = (0..n)
        .map(|i| VertexDescription {
            id: format!("x{i}"),
            mass: if i == 0 || i == n - 1 { h / 2.0 } else { h },
        })
        .collect();
    let edges = (0..n - 1)
        .map(|i| EdgeDescription {
            u: format!("x{i}"),
            v: format!("x{}", i + 1),
            w: 1.0 / h,
        })
        .collect();
    build_space(&SpaceDescription {
        vertices,
        edges,
        exhaustion: None,
    })
}

/// n-by-n lattice on [lo, hi]^2 with trapezoidal masses (h^2 interior,
/// boundary-adjusted) and unit edge weights, the conformally invariant
/// choice in dimension 2.
pub fn grid_2d(lo: f64, hi: f64, n: usize) -> Result<Space> {
    if n < 2 {
        return Err(Error::GridTooSmall(n));
    }
    if !(lo < hi) {
        return Err(Error::BadGridBounds(lo, hi));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let trap = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut vertices = Vec::with_capacity(n * n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            vertices.push(VertexDescription {
                id: format!("x{i}_{j}"),
                mass: h * h * trap(i) * trap(j),
            });
            if i + 1 < n {
                edges.push(EdgeDescription {
                    u: format!("x{i}_{j}"),
                    v: format!("x{}_{j}", i + 1),
                    w: 1.0,
                });
            }
            if j + 1 < n {
                edges.push(EdgeDescription {
                    u: format!("x{i}_{j}"),
                    v: format!("x{i}_{}", j + 1),
                    w: 1.0,
                });
            }
        }
    }
    build_space(&SpaceDescription {
        vertices,
        edges,
        exhaustion: None,
    })
}

/// All-pairs shortest-path distances with edge length 1/sqrt(w), so high
/// conductance means short. Unreachable pairs carry the infinite sentinel.
#[derive(Debug, Clone)]
pub struct Metric {
    n: usize,
    dist: Vec<f64>,
}

pub const UNREACHABLE: f64 = f64::INFINITY;

impl Metric {
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }

    pub fn is_reachable(&self, x: usize, y: usize) -> bool {
        self.distance(x, y).is_finite()
    }
}

pub fn shortest_path_metric(space: &Space) -> Metric {
    let n = space.len();
    let mut dist = vec![UNREACHABLE; n * n];
    // Dijkstra from each source; lengths 1/sqrt(w).
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        let mut heap = std::collections::BinaryHeap::new();
        row[s] = 0.0;
        heap.push((std::cmp::Reverse(ordered(0.0)), s));
        while let Some((std::cmp::Reverse(d), x)) = heap.pop() {
            let d = d.0;
            if d > row[x] {
                continue;
            }
            for &(y, eid) in space.neighbors(x) {
                let nd = d + 1.0 / space.edges()[eid].w.sqrt();
                if nd < row[y] {
                    row[y] = nd;
                    heap.push((std::cmp::Reverse(ordered(nd)), y));
                }
            }
        }
    }
    Metric { n, dist }
}

#[derive(PartialEq, PartialOrd)]
struct OrderedF64(f64);
impl Eq for OrderedF64 {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other).expect("distances are never NaN")
    }
}
fn ordered(x: f64) -> OrderedF64 {
    OrderedF64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_default_exhaustion() {
        let s = k2();
        assert_eq!(s.len(), 2);
        assert_eq!(s.exhaustion().len(), 1);
        assert_eq!(s.exhaustion()[0].len(), 2);
        assert_eq!(s.exhaustion_weights(), vec![1.0]);
    }

    #[test]
    fn self_loop_rejected() {
        let err = space_from_lists(&[("a", 1.0)], &[("a", "a", 1.0)], None).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(_)));
    }

    #[test]
    fn nested_exhaustion_accepted() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 1.0)],
            &[("a", "b", 1.0)],
            Some(vec![vec!["a"], vec!["a", "b"]]),
        )
        .unwrap();
        assert_eq!(s.exhaustion().len(), 2);
        assert_eq!(s.exhaustion_weights(), vec![0.5, 0.5]);
        assert!(!s.constant_exhaustion());
    }

    #[test]
    fn non_nested_exhaustion_rejected() {
        let err = space_from_lists(
            &[("a", 1.0), ("b", 1.0)],
            &[("a", "b", 1.0)],
            Some(vec![vec!["b"], vec!["a"]]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadExhaustion(_)));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            space_from_lists(&[("a", 1.0), ("a", 1.0)], &[], None),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(
            space_from_lists(&[("a", 1.0)], &[("a", "b", 1.0)], None),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            space_from_lists(&[("a", 1.0), ("b", 1.0)], &[("a", "b", 0.0)], None),
            Err(Error::NonPositiveWeight(_, _, _))
        ));
        assert!(matches!(
            space_from_lists(&[("a", -0.5)], &[], None),
            Err(Error::NegativeMass(_, _))
        ));
        assert!(matches!(
            space_from_lists(
                &[("a", 1.0), ("b", 1.0)],
                &[("a", "b", 1.0), ("b", "a", 2.0)],
                None
            ),
            Err(Error::DuplicateEdge(_, _))
        ));
    }

    #[test]
    fn grid_1d_structure() {
        let g = grid_1d(0.0, 1.0, 3).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.masses(), &[0.25, 0.5, 0.25]);
        assert_eq!(g.edges().len(), 2);
        assert!((g.edges()[0].w - 2.0).abs() < 1e-15);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);

        let g2 = grid_1d(0.0, 0.5, 2).unwrap();
        assert_eq!(g2.edges().len(), 1);
        assert!((g2.edges()[0].w - 2.0).abs() < 1e-15);

        assert!(grid_1d(1.0, 0.0, 5).is_err());
        assert!(grid_1d(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_1d_total_mass_exact_any_n() {
        for n in [2, 7, 64, 251] {
            let g = grid_1d(-3.0, 5.0, n).unwrap();
            assert!((g.total_mass() - 8.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn grid_2d_structure() {
        let g = grid_2d(0.0, 1.0, 2).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges().len(), 4);
        assert!(g.edges().iter().all(|e| e.w == 1.0));

        let g = grid_2d(0.0, 1.0, 3).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.edges().len(), 12);
        let center = g.vertex("x1_1").unwrap();
        assert!((g.mass(center) - 0.25).abs() < 1e-15);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);

        assert!(grid_2d(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn metric_on_path() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 1.0), ("b", "c", 1.0)],
            None,
        )
        .unwrap();
        let m = shortest_path_metric(&s);
        assert_eq!(m.distance(0, 2), 2.0);
        assert_eq!(m.distance(0, 0), 0.0);
    }

    #[test]
    fn metric_disconnected_and_axioms() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)],
            &[("a", "b", 4.0), ("c", "d", 1.0)],
            None,
        )
        .unwrap();
        let m = shortest_path_metric(&s);
        assert!(!m.is_reachable(0, 2));
        assert_eq!(m.distance(0, 1), 0.5);
        // symmetry + triangle inequality, exhaustively
        let n = s.len();
        for x in 0..n {
            assert_eq!(m.distance(x, x), 0.0);
            for y in 0..n {
                assert_eq!(m.distance(x, y), m.distance(y, x));
                for z in 0..n {
                    assert!(m.distance(x, z) <= m.distance(x, y) + m.distance(y, z) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_passes_validation() {
        for space in [
            k2(),
            grid_1d(-1.0, 1.0, 5).unwrap(),
            grid_2d(0.0, 1.0, 3).unwrap(),
        ] {
            let text = space.to_json();
            let back = Space::from_json(&text).unwrap();
            assert_eq!(back.len(), space.len());
            assert_eq!(back.edges().len(), space.edges().len());
            assert_eq!(back.masses(), space.masses());
        }
    }

    #[test]
    fn unknown_json_field_named_in_error() {
        let text = r#"{"vertices":[{"id":"a","mass":1.0}],"edges":[],"extra":3}"#;
        let err = Space::from_json(text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn cap_null_is_fully_massless_components() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 0.0), ("c", 0.0), ("d", 0.0)],
            &[("a", "b", 1.0), ("c", "d", 1.0)],
            None,
        )
        .unwrap();
        // b is massless but tethers to a massive component: positive capacity
        assert!(!s.cap_null().contains(1));
        // c, d form a fully massless component
        assert!(s.cap_null().contains(2) && s.cap_null().contains(3));
    }
}
