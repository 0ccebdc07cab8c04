//! The discrete W^{1,2} structure: Dirichlet energy, pointwise gradient
//! modulus, squared Sobolev norms, lattice operations, and m-classes with
//! canonical (harmonic-at-null) representatives.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::solver::SystemBuilder;
use crate::space::Space;
use crate::subset::Subset;

/// A real value per vertex, indexed like the space's vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(pub Vec<f64>);

impl VertexFunction {
    pub fn zeros(n: usize) -> Self {
        VertexFunction(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        VertexFunction(vec![c; n])
    }

    pub fn indicator(set: &Subset) -> Self {
        let mut v = vec![0.0; set.ground_size()];
        for i in set.iter() {
            v[i] = 1.0;
        }
        VertexFunction(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> VertexFunction {
        VertexFunction(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn zip(&self, other: &VertexFunction, f: impl Fn(f64, f64) -> f64) -> VertexFunction {
        assert_eq!(self.len(), other.len());
        VertexFunction(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> VertexFunction {
        self.map(|x| c * x)
    }

    pub fn abs(&self) -> VertexFunction {
        self.map(f64::abs)
    }

    pub fn min(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, f64::min)
    }

    pub fn max(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, f64::max)
    }

    /// Pointwise truncation |f| ∧ 1 is a common operand in the metrics.
    pub fn abs_min_one(&self, other: &VertexFunction) -> VertexFunction {
        self.zip(other, |a, b| (a - b).abs().min(1.0))
    }

    pub fn support(&self) -> Subset {
        let mut s = Subset::empty(self.len());
        for (i, &x) in self.0.iter().enumerate() {
            if x != 0.0 {
                s.insert(i);
            }
        }
        s
    }

    /// Superlevel set {f >= t}.
    pub fn superlevel(&self, t: f64) -> Subset {
        let mut s = Subset::empty(self.len());
        for (i, &x) in self.0.iter().enumerate() {
            if x >= t {
                s.insert(i);
            }
        }
        s
    }

    /// Strict superlevel set {f > t}.
    pub fn strict_superlevel(&self, t: f64) -> Subset {
        let mut s = Subset::empty(self.len());
        for (i, &x) in self.0.iter().enumerate() {
            if x > t {
                s.insert(i);
            }
        }
        s
    }

    pub fn to_json(&self, space: &Space) -> String {
        let map: BTreeMap<&str, f64> = (0..self.len()).map(|i| (space.id(i), self.0[i])).collect();
        serde_json::to_string_pretty(&map).expect("map serializes")
    }

    /// Accepts either a bare id->value map or {"values": {...}, "canonical": bool}.
    pub fn from_json(space: &Space, text: &str) -> Result<VertexFunction> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let map = match &value {
            serde_json::Value::Object(obj) if obj.contains_key("values") => obj
                .get("values")
                .and_then(|v| v.as_object())
                .ok_or_else(|| Error::Precondition("\"values\" must be an object".into()))?,
            serde_json::Value::Object(obj) => obj,
            _ => {
                return Err(Error::Precondition(
                    "vertex function JSON must be an object".into(),
                ))
            }
        };
        let mut out = vec![f64::NAN; space.len()];
        for (id, v) in map {
            if id == "canonical" {
                continue;
            }
            let i = space
                .vertex(id)
                .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
            out[i] = v
                .as_f64()
                .ok_or_else(|| Error::NonFinite(format!("value of `{id}`")))?;
        }
        for (i, &x) in out.iter().enumerate() {
            if x.is_nan() {
                return Err(Error::MissingVertexValue(space.id(i).to_string()));
            }
        }
        Ok(VertexFunction(out))
    }
}

/// E(f) = Σ_edges w (f(x) - f(y))^2.
pub fn dirichlet_energy(space: &Space, f: &VertexFunction) -> f64 {
    space
        .edges()
        .iter()
        .map(|e| {
            let d = f.0[e.u] - f.0[e.v];
            e.w * d * d
        })
        .sum()
}

/// |Df|(x) = sqrt(Σ_{y~x} w(x,y) (f(y) - f(x))^2), the one-sided incident-edge
/// sum; satisfies Σ_x |Df|(x)^2 = 2 E(f).
pub fn gradient_modulus(space: &Space, f: &VertexFunction) -> VertexFunction {
    let mut out = vec![0.0; space.len()];
    for (x, slot) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for &(y, eid) in space.neighbors(x) {
            // summed as (sqrt(w) d)^2 so the modulus agrees bit-for-bit with
            // the pointwise norm of the gradient dart field
            let t = space.edges()[eid].w.sqrt() * (f.0[y] - f.0[x]);
            s += t * t;
        }
        *slot = s.sqrt();
    }
    VertexFunction(out)
}

/// Squared W^{1,2} norm: Σ m f^2 + E(f). The energy enters un-mass-weighted
/// so refined 1-d grids converge to the continuum functional.
pub fn w12_norm_sq(space: &Space, f: &VertexFunction) -> f64 {
    let mass_term: f64 = space
        .masses()
        .iter()
        .zip(&f.0)
        .map(|(&m, &v)| m * v * v)
        .sum();
    mass_term + dirichlet_energy(space, f)
}

/// A vertex function up to m-null vertices; equality is agreement on {m > 0}.
#[derive(Debug, Clone)]
pub struct MClass {
    pub rep: VertexFunction,
}

impl MClass {
    pub fn new(rep: VertexFunction) -> Self {
        MClass { rep }
    }

    pub fn eq_m(&self, space: &Space, other: &MClass) -> bool {
        (0..space.len())
            .filter(|&x| space.mass(x) > 0.0)
            .all(|x| self.rep.0[x] == other.rep.0[x])
    }

    pub fn add(&self, other: &MClass) -> MClass {
        MClass::new(self.rep.add(&other.rep))
    }

    pub fn sub(&self, other: &MClass) -> MClass {
        MClass::new(self.rep.sub(&other.rep))
    }

    pub fn scale(&self, c: f64) -> MClass {
        MClass::new(self.rep.scale(c))
    }

    /// Classes are given by their values on {m > 0}; entries at m-null
    /// vertices are optional (they do not identify the class) and default to 0.
    pub fn from_json(space: &Space, text: &str) -> Result<MClass> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let map = match &value {
            serde_json::Value::Object(obj) if obj.contains_key("values") => obj
                .get("values")
                .and_then(|v| v.as_object())
                .ok_or_else(|| Error::Precondition("\"values\" must be an object".into()))?,
            serde_json::Value::Object(obj) => obj,
            _ => {
                return Err(Error::Precondition(
                    "class JSON must be an object".into(),
                ))
            }
        };
        let mut out = vec![0.0; space.len()];
        let mut present = vec![false; space.len()];
        for (id, v) in map {
            if id == "canonical" {
                continue;
            }
            let i = space
                .vertex(id)
                .ok_or_else(|| Error::UnknownVertex(id.clone()))?;
            out[i] = v
                .as_f64()
                .ok_or_else(|| Error::NonFinite(format!("value of `{id}`")))?;
            present[i] = true;
        }
        for x in 0..space.len() {
            if space.mass(x) > 0.0 && !present[x] {
                return Err(Error::MissingVertexValue(space.id(x).to_string()));
            }
        }
        Ok(MClass::new(VertexFunction(out)))
    }
}

/// Result of minimizing the squared norm over representatives of an m-class.
#[derive(Debug, Clone)]
pub struct ClassNorm {
    pub norm_sq: f64,
    /// The minimizer: harmonic at m-null vertices, 0 on fully massless components.
    pub canonical: VertexFunction,
}

/// Minimizes Σ m f^2 + E(f) over the values at m-null vertices. The minimizer
/// solves (Lf)(x) = 0 at every free vertex; components without any mass get 0.
pub fn w12_class_norm_sq(space: &Space, class: &MClass) -> ClassNorm {
    let canonical = canonical_representative(space, class);
    ClassNorm {
        norm_sq: w12_norm_sq(space, &canonical),
        canonical,
    }
}

pub(crate) fn canonical_representative(space: &Space, class: &MClass) -> VertexFunction {
    let n = space.len();
    let mut out = class.rep.0.clone();
    let cap_null = space.cap_null();
    let mut free: Vec<usize> = Vec::new();
    for x in 0..n {
        if cap_null.contains(x) {
            out[x] = 0.0; // component carries no mass at all
        } else if space.mass(x) == 0.0 {
            free.push(x);
        }
    }
    if free.is_empty() {
        return VertexFunction(out);
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &x) in free.iter().enumerate() {
        pos[x] = k;
    }
    let mut sys = SystemBuilder::new(free.len());
    let mut rhs = vec![0.0; free.len()];
    for (k, &x) in free.iter().enumerate() {
        for &(y, eid) in space.neighbors(x) {
            let w = space.edges()[eid].w;
            sys.add_diag(k, w);
            if pos[y] != usize::MAX {
                if x < y {
                    sys.add_offdiag(k, pos[y], -w);
                }
            } else {
                rhs[k] += w * out[y];
            }
        }
    }
    let sol = sys
        .solve(&rhs)
        .expect("grounded Laplacian at m-null vertices is positive definite");
    for (k, &x) in free.iter().enumerate() {
        out[x] = sol[k];
    }
    VertexFunction(out)
}

#[derive(Debug, Clone)]
pub struct LatticeResult {
    pub min: VertexFunction,
    pub max: VertexFunction,
    /// ||f∨g||^2 + ||f∧g||^2 <= ||f||^2 + ||g||^2 (with 1e-12 slack). The
    /// continuum identity holds with equality; the discrete gradient is
    /// nonlocal across edges, so only this direction survives.
    pub contraction_ok: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn lattice_min_max(space: &Space, f: &VertexFunction, g: &VertexFunction) -> LatticeResult {
    let min = f.min(g);
    let max = f.max(g);
    let lhs = w12_norm_sq(space, &max) + w12_norm_sq(space, &min);
    let rhs = w12_norm_sq(space, f) + w12_norm_sq(space, g);
    LatticeResult {
        min,
        max,
        contraction_ok: lhs <= rhs + 1e-12,
        lhs,
        rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{grid_1d, k2, space_from_lists};

    fn path3() -> Space {
        space_from_lists(
            &[("a", 1.0), ("b", 1.0), ("c", 1.0)],
            &[("a", "b", 1.0), ("b", "c", 1.0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn energy_basics() {
        let s = k2();
        assert_eq!(dirichlet_energy(&s, &VertexFunction(vec![0.0, 1.0])), 1.0);
        assert_eq!(dirichlet_energy(&s, &VertexFunction::constant(2, 3.0)), 0.0);
    }

    #[test]
    fn energy_of_linear_function_on_grid_is_one() {
        // f(x) = x on grid_1d(0,1,n): E(f) = Σ (1/h) h^2 = 1 exactly
        for n in [2, 5, 17, 101] {
            let g = grid_1d(0.0, 1.0, n).unwrap();
            let h = 1.0 / (n - 1) as f64;
            let f = VertexFunction((0..n).map(|i| i as f64 * h).collect());
            assert!((dirichlet_energy(&g, &f) - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn gradient_modulus_values() {
        let s = k2();
        let f = VertexFunction(vec![0.0, 1.0]);
        assert_eq!(gradient_modulus(&s, &f).0, vec![1.0, 1.0]);
        assert_eq!(
            gradient_modulus(&s, &VertexFunction::constant(2, 5.0)).0,
            vec![0.0, 0.0]
        );

        let p = path3();
        let f = VertexFunction(vec![0.0, 1.0, 0.0]);
        let g = gradient_modulus(&p, &f);
        assert!((g.0[0] - 1.0).abs() < 1e-15);
        assert!((g.0[1] - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((g.0[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_modulus_squares_to_twice_energy() {
        let p = path3();
        let f = VertexFunction(vec![0.3, -1.2, 0.7]);
        let g = gradient_modulus(&p, &f);
        let sum_sq: f64 = g.0.iter().map(|x| x * x).sum();
        assert!((sum_sq - 2.0 * dirichlet_energy(&p, &f)).abs() < 1e-12);
    }

    #[test]
    fn norm_sq_values() {
        let s = k2();
        assert_eq!(w12_norm_sq(&s, &VertexFunction::constant(2, 1.0)), 2.0);
        assert_eq!(w12_norm_sq(&s, &VertexFunction(vec![1.0, 0.5])), 1.5);
        assert_eq!(w12_norm_sq(&s, &VertexFunction::zeros(2)), 0.0);
    }

    #[test]
    fn class_norm_minimizes_at_null_vertex() {
        let s = space_from_lists(
            &[("a", 1.0), ("b", 0.0), ("c", 1.0)],
            &[("a", "b", 1.0), ("b", "c", 1.0)],
            None,
        )
        .unwrap();
        let class = MClass::new(VertexFunction(vec![0.0, 7.0, 1.0]));
        let cn = w12_class_norm_sq(&s, &class);
        assert!((cn.canonical.0[1] - 0.5).abs() < 1e-12);
        assert!((cn.norm_sq - 1.5).abs() < 1e-12);
        // perturbing the canonical value strictly increases the norm
        for delta in [1e-3, -1e-3] {
            let mut pert = cn.canonical.clone();
            pert.0[1] += delta;
            assert!(w12_norm_sq(&s, &pert) > cn.norm_sq);
        }
    }

    #[test]
    fn class_norm_identity_when_fully_charged() {
        let s = path3();
        let f = VertexFunction(vec![0.2, 0.4, -0.9]);
        let cn = w12_class_norm_sq(&s, &MClass::new(f.clone()));
        assert_eq!(cn.canonical, f);
        assert_eq!(cn.norm_sq, w12_norm_sq(&s, &f));
    }

    #[test]
    fn isolated_massless_vertex_gets_zero() {
        let s = space_from_lists(&[("a", 1.0), ("z", 0.0)], &[], None).unwrap();
        let class = MClass::new(VertexFunction(vec![2.0, 9.0]));
        let cn = w12_class_norm_sq(&s, &class);
        assert_eq!(cn.canonical.0[1], 0.0);
    }

    #[test]
    fn lattice_example() {
        let s = k2();
        let f = VertexFunction(vec![0.0, 1.0]);
        let g = VertexFunction(vec![1.0, 0.0]);
        let r = lattice_min_max(&s, &f, &g);
        assert_eq!(r.max.0, vec![1.0, 1.0]);
        assert_eq!(r.min.0, vec![0.0, 0.0]);
        // ||f ∨ g||^2 + ||f ∧ g||^2 = 2 + 0, strictly below ||f||^2 + ||g||^2 = 4
        assert!((r.lhs - 2.0).abs() < 1e-15);
        assert!((r.rhs - 4.0).abs() < 1e-15);
        assert!(r.contraction_ok);

        // f = g and f <= g give equality
        let r = lattice_min_max(&s, &f, &f);
        assert!((r.lhs - r.rhs).abs() < 1e-15);
        let fl = VertexFunction(vec![-1.0, 0.0]);
        let r = lattice_min_max(&s, &fl, &f);
        assert_eq!(r.min.0, fl.0);
        assert_eq!(r.max.0, f.0);
        assert!((r.lhs - r.rhs).abs() < 1e-15);
    }

    #[test]
    fn function_json_round_trip() {
        let s = path3();
        let f = VertexFunction(vec![0.25, -1.5, 3.0]);
        let text = f.to_json(&s);
        let back = VertexFunction::from_json(&s, &text).unwrap();
        assert_eq!(back, f);
        // missing vertex is an error
        assert!(VertexFunction::from_json(&s, r#"{"a":1.0}"#).is_err());
    }
}
