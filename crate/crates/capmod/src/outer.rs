//! Outer measures on a finite ground set: Cavalieri integration,
//! submodularity checking with witnesses, the constructive measure behind
//! the subadditivity theorem, and limsup sets for Borel-Cantelli.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::Subset;

const EXHAUSTIVE_LIMIT: usize = 16;
pub const VIOLATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Unknown,
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifiedFlags {
    pub monotone: Flag,
    pub subadditive: Flag,
    pub submodular: Flag,
}

impl Default for VerifiedFlags {
    fn default() -> Self {
        VerifiedFlags {
            monotone: Flag::Unknown,
            subadditive: Flag::Unknown,
            submodular: Flag::Unknown,
        }
    }
}

/// A monotone-candidate set function with lazy caching. Evaluation must be
/// pure: the same subset always yields the same value. Reads of the cache are
/// concurrent; writes are serialized behind the lock.
pub struct OuterMeasure {
    ground: usize,
    label: String,
    eval: Box<dyn Fn(&Subset) -> f64 + Send + Sync>,
    cache: RwLock<HashMap<Subset, f64>>,
    flags: Mutex<VerifiedFlags>,
}

impl std::fmt::Debug for OuterMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OuterMeasure")
            .field("ground", &self.ground)
            .field("label", &self.label)
            .finish()
    }
}

impl OuterMeasure {
    /// Checks μ(∅) = 0 eagerly; all other properties are checked on demand.
    pub fn new(
        ground: usize,
        label: impl Into<String>,
        eval: impl Fn(&Subset) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let mu = OuterMeasure {
            ground,
            label: label.into(),
            eval: Box::new(eval),
            cache: RwLock::new(HashMap::new()),
            flags: Mutex::new(VerifiedFlags::default()),
        };
        let on_empty = mu.value(&Subset::empty(ground));
        if on_empty != 0.0 {
            return Err(Error::NonZeroOnEmpty(on_empty));
        }
        Ok(mu)
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flags(&self) -> VerifiedFlags {
        *self.flags.lock().unwrap()
    }

    pub fn value(&self, s: &Subset) -> f64 {
        assert_eq!(s.ground_size(), self.ground, "subset over wrong ground set");
        if let Some(&v) = self.cache.read().unwrap().get(s) {
            return v;
        }
        let v = (self.eval)(s);
        self.cache.write().unwrap().insert(s.clone(), v);
        v
    }

    pub fn counting(n: usize) -> Self {
        OuterMeasure::new(n, "counting", |s| s.len() as f64).expect("vanishes on empty set")
    }

    pub fn sqrt_card(n: usize) -> Self {
        OuterMeasure::new(n, "sqrt_card", |s| (s.len() as f64).sqrt()).expect("vanishes on empty")
    }

    pub fn card_squared(n: usize) -> Self {
        OuterMeasure::new(n, "card_squared", |s| {
            let c = s.len() as f64;
            c * c
        })
        .expect("vanishes on empty")
    }

    /// Table-backed set function over a ground set of n points; `table` must
    /// list all 2^n values indexed by bitmask.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        if n > EXHAUSTIVE_LIMIT {
            return Err(Error::GroundTooLarge {
                size: n,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        if table.len() != 1usize << n {
            return Err(Error::BadTableSize(table.len()));
        }
        OuterMeasure::new(n, "table", move |s| table[s.mask() as usize])
    }
}

/// JSON schema for ingestible set functions.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetFunctionJson {
    Table {
        /// Keys are subset bitmasks in hex ("0x5" or "5"), one per subset.
        values: std::collections::BTreeMap<String, f64>,
    },
    Builtin {
        name: BuiltinName,
        size: usize,
    },
    Capacity {
        space: crate::space::SpaceDescription,
    },
}

#[derive(Debug, Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinName {
    Counting,
    SqrtCard,
    CardSquared,
}

impl SetFunctionJson {
    pub fn instantiate(&self) -> Result<OuterMeasure> {
        match self {
            SetFunctionJson::Table { values } => {
                let len = values.len();
                if len == 0 || len & (len - 1) != 0 {
                    return Err(Error::BadTableSize(len));
                }
                let n = len.trailing_zeros() as usize;
                let mut table = vec![f64::NAN; len];
                for (key, &v) in values {
                    let digits = key.strip_prefix("0x").unwrap_or(key);
                    let mask = u64::from_str_radix(digits, 16)
                        .map_err(|_| Error::BadTableKey(key.clone()))?;
                    if mask as usize >= len {
                        return Err(Error::BadTableKey(key.clone()));
                    }
                    table[mask as usize] = v;
                }
                if table.iter().any(|v| v.is_nan()) {
                    return Err(Error::BadTableSize(len));
                }
                OuterMeasure::from_table(n, table)
            }
            SetFunctionJson::Builtin { name, size } => Ok(match name {
                BuiltinName::Counting => OuterMeasure::counting(*size),
                BuiltinName::SqrtCard => OuterMeasure::sqrt_card(*size),
                BuiltinName::CardSquared => OuterMeasure::card_squared(*size),
            }),
            SetFunctionJson::Capacity { space } => {
                let space = Arc::new(crate::space::build_space(space)?);
                Ok(crate::capacity::capacity_outer_measure(space))
            }
        }
    }
}

/// Exact finite Cavalieri sum Σ (t_i - t_{i-1}) μ({f >= t_i}) over the sorted
/// distinct positive values of f (restricted to `restrict_to` when given);
/// agrees with the integral of μ({f > t}) dt.
pub fn integrate(
    mu: &OuterMeasure,
    f: &[f64],
    restrict_to: Option<&Subset>,
) -> Result<f64> {
    if f.len() != mu.ground_size() {
        return Err(Error::FunctionSizeMismatch {
            expected: mu.ground_size(),
            found: f.len(),
        });
    }
    for (i, &v) in f.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::NonFinite(format!("integrand at point {i}")));
        }
        if v < 0.0 {
            return Err(Error::NegativeValue { vertex: i, value: v });
        }
    }
    let member = |i: usize| restrict_to.is_none_or(|r| r.contains(i));
    let mut thresholds: Vec<f64> = (0..f.len())
        .filter(|&i| member(i) && f[i] > 0.0)
        .map(|i| f[i])
        .collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    let mut total = 0.0;
    let mut prev = 0.0;
    for &t in &thresholds {
        let mut level = Subset::empty(mu.ground_size());
        for i in 0..f.len() {
            if member(i) && f[i] >= t {
                level.insert(i);
            }
        }
        total += (t - prev) * mu.value(&level);
        prev = t;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub enum CheckMode {
    /// All unordered subset pairs; ground set of at most 16 points.
    Exhaustive,
    /// `budget` random pairs from the given seed.
    Sampled { budget: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SubmodularityVerdict {
    pub submodular: bool,
    /// A pair with μ(E∪F) + μ(E∩F) > μ(E) + μ(F) + tol, when found.
    pub witness: Option<(Subset, Subset, f64)>,
    pub pairs_checked: u64,
}

pub fn is_submodular(mu: &OuterMeasure, mode: &CheckMode) -> Result<SubmodularityVerdict> {
    let verdict = match mode {
        CheckMode::Exhaustive => {
            let n = mu.ground_size();
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::GroundTooLarge {
                    size: n,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            let size = 1usize << n;
            let table: Vec<f64> = (0..size)
                .map(|m| mu.value(&Subset::from_mask(n, m as u64)))
                .collect();
            // Deterministic parallel scan: keep the lexicographically first witness.
            let found = (0..size as u64)
                .into_par_iter()
                .filter_map(|e| {
                    let mut best: Option<(u64, u64, f64)> = None;
                    for f in e..size as u64 {
                        let gap = table[(e | f) as usize] + table[(e & f) as usize]
                            - table[e as usize]
                            - table[f as usize];
                        if gap > VIOLATION_TOL {
                            best = Some((e, f, gap));
                            break;
                        }
                    }
                    best
                })
                .min_by_key(|&(e, f, _)| (e, f));
            SubmodularityVerdict {
                submodular: found.is_none(),
                witness: found
                    .map(|(e, f, gap)| (Subset::from_mask(n, e), Subset::from_mask(n, f), gap)),
                pairs_checked: (size as u64) * (size as u64 + 1) / 2,
            }
        }
        CheckMode::Sampled { budget, seed } => {
            let n = mu.ground_size();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut witness = None;
            let mut checked = 0;
            for _ in 0..*budget {
                let e = random_subset(&mut rng, n);
                let f = random_subset(&mut rng, n);
                checked += 1;
                let gap = mu.value(&e.union(&f)) + mu.value(&e.intersection(&f))
                    - mu.value(&e)
                    - mu.value(&f);
                if gap > VIOLATION_TOL {
                    witness = Some((e, f, gap));
                    break;
                }
            }
            SubmodularityVerdict {
                submodular: witness.is_none(),
                witness,
                pairs_checked: checked,
            }
        }
    };
    let mut flags = mu.flags.lock().unwrap();
    flags.submodular = if verdict.submodular { Flag::Yes } else { Flag::No };
    if !verdict.submodular {
        // a submodularity violation also defeats nothing about monotonicity;
        // only the submodular flag is settled here
    }
    Ok(verdict)
}

/// On-demand monotonicity check with the same modes.
pub fn is_monotone(mu: &OuterMeasure, mode: &CheckMode) -> Result<Option<(Subset, Subset, f64)>> {
    let witness = match mode {
        CheckMode::Exhaustive => {
            let n = mu.ground_size();
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::GroundTooLarge {
                    size: n,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            let size = 1usize << n;
            let table: Vec<f64> = (0..size)
                .map(|m| mu.value(&Subset::from_mask(n, m as u64)))
                .collect();
            let mut witness = None;
            'outer: for e in 0..size as u64 {
                for f in 0..size as u64 {
                    if e & f == e && table[e as usize] > table[f as usize] + VIOLATION_TOL {
                        witness = Some((
                            Subset::from_mask(n, e),
                            Subset::from_mask(n, f),
                            table[e as usize] - table[f as usize],
                        ));
                        break 'outer;
                    }
                }
            }
            witness
        }
        CheckMode::Sampled { budget, seed } => {
            let n = mu.ground_size();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut witness = None;
            for _ in 0..*budget {
                let e = random_subset(&mut rng, n);
                let f = e.union(&random_subset(&mut rng, n));
                let gap = mu.value(&e) - mu.value(&f);
                if gap > VIOLATION_TOL {
                    witness = Some((e, f, gap));
                    break;
                }
            }
            witness
        }
    };
    let mut flags = mu.flags.lock().unwrap();
    flags.monotone = if witness.is_none() { Flag::Yes } else { Flag::No };
    Ok(witness)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Subset {
    let mut s = Subset::empty(n);
    for i in 0..n {
        if rng.random::<bool>() {
            s.insert(i);
        }
    }
    s
}

/// Searches for f, g >= 0 with ∫(f+g) dμ > ∫f dμ + ∫g dμ: first indicator
/// pairs driven by a submodularity witness, then random step functions with
/// values in {0,1,2,3}. Returns the violating pair or None within budget.
pub fn find_subadditivity_violation(
    mu: &OuterMeasure,
    budget: usize,
    seed: u64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let n = mu.ground_size();
    let mode = if n <= 12 {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { budget, seed }
    };
    let verdict = is_submodular(mu, &mode)?;
    if let Some((e, f, _)) = verdict.witness {
        let chi_e = indicator_values(&e);
        let chi_f = indicator_values(&f);
        if violates_subadditivity(mu, &chi_e, &chi_f)? {
            return Ok(Some((chi_e, chi_f)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    for _ in 0..budget {
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(0..4) as f64).collect();
        if violates_subadditivity(mu, &f, &g)? {
            return Ok(Some((f, g)));
        }
    }
    Ok(None)
}

pub fn violates_subadditivity(mu: &OuterMeasure, f: &[f64], g: &[f64]) -> Result<bool> {
    let sum: Vec<f64> = f.iter().zip(g).map(|(a, b)| a + b).collect();
    Ok(integrate(mu, &sum, None)? > integrate(mu, f, None)? + integrate(mu, g, None)? + VIOLATION_TOL)
}

fn indicator_values(s: &Subset) -> Vec<f64> {
    let mut v = vec![0.0; s.ground_size()];
    for i in s.iter() {
        v[i] = 1.0;
    }
    v
}

/// The finite measure ν built in the subadditivity theorem's proof: atoms of
/// the algebra generated by f and g, ordered so f+g is nonincreasing, with
/// ν fixed by prefix values of μ.
#[derive(Debug, Clone)]
pub struct ProofMeasure {
    pub atoms: Vec<Subset>,
    pub atom_values: Vec<f64>,
}

impl ProofMeasure {
    /// Linear integral Σ h(A_i) ν(A_i) for an atom-measurable h.
    pub fn integrate(&self, h: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (i, atom) in self.atoms.iter().enumerate() {
            let val = atom_value(atom, h, i)?;
            total += val * self.atom_values[i];
        }
        Ok(total)
    }

    /// ν(A_1 ∪ ... ∪ A_i) must reproduce μ on every prefix, exactly.
    pub fn prefix_identity_holds(&self, mu: &OuterMeasure) -> bool {
        let mut prefix = Subset::empty(mu.ground_size());
        let mut running = 0.0;
        for (atom, &v) in self.atoms.iter().zip(&self.atom_values) {
            prefix = prefix.union(atom);
            running += v;
            if running != mu.value(&prefix) {
                return false;
            }
        }
        true
    }
}

fn atom_value(atom: &Subset, h: &[f64], index: usize) -> Result<f64> {
    let mut iter = atom.iter();
    let first = iter.next().expect("atoms are nonempty");
    let val = h[first];
    for i in iter {
        if h[i] != val {
            return Err(Error::NotAtomMeasurable(index));
        }
    }
    Ok(val)
}

/// Builds the proof measure for the pair (f, g). Requires μ monotone (a
/// negative prefix difference signals a nonmonotone input measure).
pub fn proof_measure(mu: &OuterMeasure, f: &[f64], g: &[f64]) -> Result<ProofMeasure> {
    let n = mu.ground_size();
    if f.len() != n || g.len() != n {
        return Err(Error::FunctionSizeMismatch {
            expected: n,
            found: f.len().max(g.len()),
        });
    }
    // Atoms: fibers of x -> (f(x), g(x)), enumerated by first occurrence.
    let mut keys: Vec<(u64, u64)> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        let key = (f[x].to_bits(), g[x].to_bits());
        match keys.iter().position(|&k| k == key) {
            Some(i) => members[i].push(x),
            None => {
                keys.push(key);
                members.push(vec![x]);
            }
        }
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    // Nonincreasing f+g; ties keep first-occurrence order (stable sort).
    order.sort_by(|&a, &b| {
        let sa = f[members[a][0]] + g[members[a][0]];
        let sb = f[members[b][0]] + g[members[b][0]];
        sb.partial_cmp(&sa).unwrap()
    });

    let mut atoms = Vec::with_capacity(order.len());
    let mut atom_values = Vec::with_capacity(order.len());
    let mut prefix = Subset::empty(n);
    let mut prev_mu = 0.0;
    for (i, &o) in order.iter().enumerate() {
        let atom = Subset::from_indices(n, members[o].iter().copied())?;
        prefix = prefix.union(&atom);
        let here = mu.value(&prefix);
        let nu = here - prev_mu;
        if nu < -VIOLATION_TOL {
            return Err(Error::NonMonotoneMeasure { atom: i, value: nu });
        }
        atoms.push(atom);
        atom_values.push(nu);
        prev_mu = here;
    }
    Ok(ProofMeasure { atoms, atom_values })
}

#[derive(Debug, Clone)]
pub struct ClaimNu {
    pub integral_mu: f64,
    pub integral_nu: f64,
    /// h is nonincreasing along the atom order, which forces equality.
    pub ordered: bool,
    pub holds: bool,
    pub equality: bool,
}

/// Compares ∫h dμ with ∫h dν for an atom-measurable h; the ν-integral never
/// exceeds the μ-integral, with equality when h respects the atom order.
pub fn check_claim_nu(mu: &OuterMeasure, f: &[f64], g: &[f64], h: &[f64]) -> Result<ClaimNu> {
    let pm = proof_measure(mu, f, g)?;
    let mut vals = Vec::with_capacity(pm.atoms.len());
    for (i, atom) in pm.atoms.iter().enumerate() {
        vals.push(atom_value(atom, h, i)?);
    }
    let ordered = vals.windows(2).all(|w| w[0] >= w[1]);
    let integral_mu = integrate(mu, h, None)?;
    let integral_nu = pm.integrate(h)?;
    Ok(ClaimNu {
        integral_mu,
        integral_nu,
        ordered,
        holds: integral_nu <= integral_mu + VIOLATION_TOL,
        equality: (integral_nu - integral_mu).abs() <= VIOLATION_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// E_m = ∅ for indices beyond the list: the limsup is empty.
    Empty,
    /// The list repeats forever: every listed set recurs, so the limsup is
    /// the union.
    Cyclic,
}

/// limsup of the infinitized sequence ⋂_n ⋃_{m>=n} E_m under the tail rule.
pub fn limsup_of_sets(sets: &[Subset], tail: TailRule) -> Subset {
    let n = sets.first().map_or(0, Subset::ground_size);
    match tail {
        TailRule::Empty => Subset::empty(n),
        TailRule::Cyclic => sets
            .iter()
            .fold(Subset::empty(n), |acc, s| acc.union(s)),
    }
}

/// Wraps the capacity of a space as a cached outer measure (re-exported via
/// the capacity module; lives there to keep dependencies one-way).
pub use crate::capacity::capacity_outer_measure;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cavalieri_counting() {
        let mu = OuterMeasure::counting(3);
        // f = (0,1,3): 1·μ({f>=1}) + 2·μ({f>=3}) = 1·2 + 2·1 = 4 = Σf
        assert_eq!(integrate(&mu, &[0.0, 1.0, 3.0], None).unwrap(), 4.0);
        assert_eq!(integrate(&mu, &[0.0, 0.0, 0.0], None).unwrap(), 0.0);
    }

    #[test]
    fn cavalieri_sqrt_card() {
        let mu = OuterMeasure::sqrt_card(3);
        let got = integrate(&mu, &[1.0, 1.0, 0.0], None).unwrap();
        assert!((got - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cavalieri_rejects_bad_input() {
        let mu = OuterMeasure::counting(2);
        assert!(matches!(
            integrate(&mu, &[-0.1, 0.0], None),
            Err(Error::NegativeValue { .. })
        ));
        assert!(integrate(&mu, &[f64::NAN, 0.0], None).is_err());
    }

    #[test]
    fn restricted_integral() {
        let mu = OuterMeasure::counting(3);
        let e = Subset::from_mask(3, 0b011);
        assert_eq!(integrate(&mu, &[2.0, 3.0, 10.0], Some(&e)).unwrap(), 5.0);
    }

    #[test]
    fn submodularity_verdicts() {
        let counting = OuterMeasure::counting(4);
        assert!(is_submodular(&counting, &CheckMode::Exhaustive)
            .unwrap()
            .submodular);

        let sq = OuterMeasure::card_squared(2);
        let verdict = is_submodular(&sq, &CheckMode::Exhaustive).unwrap();
        assert!(!verdict.submodular);
        let (e, f, gap) = verdict.witness.unwrap();
        // the first violating pair is ({a},{b}): 4 + 0 > 1 + 1
        assert_eq!((e.mask(), f.mask()), (0b01, 0b10));
        assert!((gap - 2.0).abs() < 1e-12);

        let sqrt = OuterMeasure::sqrt_card(4);
        assert!(is_submodular(&sqrt, &CheckMode::Exhaustive)
            .unwrap()
            .submodular);
    }

    #[test]
    fn exhaustive_limit_enforced() {
        let mu = OuterMeasure::counting(17);
        assert!(matches!(
            is_submodular(&mu, &CheckMode::Exhaustive),
            Err(Error::GroundTooLarge { .. })
        ));
    }

    #[test]
    fn violation_search_finds_indicator_pair() {
        let sq = OuterMeasure::card_squared(2);
        let (f, g) = find_subadditivity_violation(&sq, 100, 7)
            .unwrap()
            .expect("card^2 is not submodular");
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let lhs = integrate(&sq, &sum, None).unwrap();
        let rhs = integrate(&sq, &f, None).unwrap() + integrate(&sq, &g, None).unwrap();
        assert!(lhs > rhs + VIOLATION_TOL);
        // the witness-driven pair is (χ_a, χ_b) with ∫(f+g) = 4 > 1 + 1
        assert_eq!(lhs, 4.0);
        assert_eq!(rhs, 2.0);
    }

    #[test]
    fn violation_search_respects_theorem_for_submodular() {
        for mu in [OuterMeasure::counting(3), OuterMeasure::sqrt_card(3)] {
            assert!(find_subadditivity_violation(&mu, 10_000, 3)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn proof_measure_prefix_differences() {
        // X = {a,b}, μ({a}) = μ({b}) = 1, μ(X) = 1.5, f = χ_a, g = χ_b
        let mu = OuterMeasure::from_table(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        let f = [1.0, 0.0];
        let g = [0.0, 1.0];
        let pm = proof_measure(&mu, &f, &g).unwrap();
        assert_eq!(pm.atoms.len(), 2);
        assert_eq!(pm.atoms[0].mask(), 0b01);
        assert_eq!(pm.atoms[1].mask(), 0b10);
        assert_eq!(pm.atom_values, vec![1.0, 0.5]);
        assert!(pm.prefix_identity_holds(&mu));

        // h = f + g ≡ 1: both integrals 1.5, equality (constant is ordered)
        let claim = check_claim_nu(&mu, &f, &g, &[1.0, 1.0]).unwrap();
        assert!(claim.ordered && claim.equality);
        assert_eq!(claim.integral_mu, 1.5);
        assert_eq!(claim.integral_nu, 1.5);

        // h = f: ∫dν = 1 = ∫dμ, ordered
        let claim = check_claim_nu(&mu, &f, &g, &f).unwrap();
        assert!(claim.ordered && claim.equality);
        assert_eq!(claim.integral_nu, 1.0);

        // h = g: ∫dν = 0.5 < 1 = ∫dμ, not ordered
        let claim = check_claim_nu(&mu, &f, &g, &g).unwrap();
        assert!(!claim.ordered && claim.holds && !claim.equality);
        assert_eq!(claim.integral_nu, 0.5);
        assert_eq!(claim.integral_mu, 1.0);
    }

    #[test]
    fn proof_measure_additive_measure_gives_atom_masses() {
        let mu = OuterMeasure::counting(3);
        let f = [2.0, 1.0, 0.0];
        let g = [0.0, 1.0, 0.0];
        let pm = proof_measure(&mu, &f, &g).unwrap();
        for (atom, &v) in pm.atoms.iter().zip(&pm.atom_values) {
            assert_eq!(v, atom.len() as f64);
        }
    }

    #[test]
    fn proof_measure_equal_functions_uses_level_sets() {
        let mu = OuterMeasure::counting(4);
        let f = [1.0, 2.0, 1.0, 0.0];
        let pm = proof_measure(&mu, &f, &f).unwrap();
        assert_eq!(pm.atoms.len(), 3); // level sets of f alone
        assert_eq!(pm.atoms[0].mask(), 0b0010); // f = 2 first
    }

    #[test]
    fn proof_measure_rejects_nonmonotone() {
        // μ({a}) = 2 but μ(X) = 1: prefix difference goes negative
        let mu = OuterMeasure::from_table(2, vec![0.0, 2.0, 0.5, 1.0]).unwrap();
        let err = proof_measure(&mu, &[1.0, 0.0], &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneMeasure { .. }));
    }

    #[test]
    fn claim_nu_rejects_non_atom_measurable() {
        let mu = OuterMeasure::counting(2);
        // f = g = constant: a single atom {a,b}; h distinguishing them fails
        let err = check_claim_nu(&mu, &[1.0, 1.0], &[1.0, 1.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::NotAtomMeasurable(_)));
    }

    #[test]
    fn limsup_rules() {
        let a = Subset::from_mask(2, 0b01);
        let b = Subset::from_mask(2, 0b10);
        assert_eq!(
            limsup_of_sets(&[a.clone()], TailRule::Cyclic).mask(),
            0b01
        );
        assert!(limsup_of_sets(&[a.clone(), b.clone()], TailRule::Empty).is_empty());
        assert_eq!(limsup_of_sets(&[a, b], TailRule::Cyclic).mask(), 0b11);
    }

    #[test]
    fn empty_set_must_vanish() {
        assert!(matches!(
            OuterMeasure::new(2, "bad", |_| 1.0),
            Err(Error::NonZeroOnEmpty(_))
        ));
    }
}
