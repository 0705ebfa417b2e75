//! Discrete weighted measure spaces, self-maps with their preimage fibers,
//! and nonnegative weight functions.
//!
//! Every point carries strictly positive mass, so "almost everywhere" on these
//! spaces means "at every point" and any total self-map is non-singular.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_decimal, RationalInputs};

/// Default cap on the number of backward-invariant sets enumerated.
pub const DEFAULT_SET_CAP: usize = 4096;

/// A finite point set `0..n` with positive masses `m_j = μ({j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasureSpace {
    masses: Vec<f64>,
}

impl DiscreteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    what: "masses",
                    index,
                    literal: value.to_string(),
                });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveMass { index, value });
            }
        }
        Ok(Self { masses })
    }

    /// Space of `n` points with unit mass each.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, j: usize) -> f64 {
        self.masses[j]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass-weighted integral `Σ_j f(j) m_j`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.masses).map(|(v, m)| v * m).sum()
    }
}

/// A total self-map `φ` on point indices together with its preimage fibers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformation {
    map: Vec<usize>,
    fibers: Vec<Vec<usize>>,
}

impl Transformation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let len = map.len();
        if len == 0 {
            return Err(Error::EmptySpace);
        }
        let mut fibers = vec![Vec::new(); len];
        for (index, &target) in map.iter().enumerate() {
            if target >= len {
                return Err(Error::MapOutOfRange { index, target, len });
            }
            fibers[target].push(index);
        }
        Ok(Self { map, fibers })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
            fibers: (0..n).map(|j| vec![j]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    /// `φ⁻¹({k})`, in increasing index order.
    pub fn fiber(&self, k: usize) -> &[usize] {
        &self.fibers[k]
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &k)| j == k)
    }

    pub fn is_permutation(&self) -> bool {
        self.fibers.iter().all(|f| f.len() == 1)
    }

    /// `self ∘ inner`, i.e. `j ↦ self(inner(j))`.
    pub fn compose(&self, inner: &Transformation) -> Transformation {
        let map = inner.map.iter().map(|&k| self.map[k]).collect();
        Transformation::new(map).expect("composition of total maps is total")
    }

    /// `φⁿ`, with `φ⁰` the identity.
    pub fn iterate(&self, n: usize) -> Transformation {
        iterate_map(self, n)
    }

    /// `φ⁻¹(S)` as a point set.
    pub fn preimage(&self, set: &PointSet) -> PointSet {
        let membership = self.map.iter().map(|&k| set.contains(k)).collect();
        PointSet { membership }
    }

    /// The smallest backward-invariant set containing `x`: every `y` with
    /// `φᵏ(y) = x` for some `k ≥ 0`.
    pub fn backward_closure(&self, x: usize) -> PointSet {
        let mut set = PointSet::empty(self.len());
        let mut stack = vec![x];
        set.insert(x);
        while let Some(k) = stack.pop() {
            for &i in &self.fibers[k] {
                if !set.contains(i) {
                    set.insert(i);
                    stack.push(i);
                }
            }
        }
        set
    }
}

/// Returns `φⁿ` with fibers rebuilt; `n = 0` gives the identity.
pub fn iterate_map(phi: &Transformation, n: usize) -> Transformation {
    let len = phi.len();
    let map = (0..len).map(|j| (0..n).fold(j, |k, _| phi.map[k])).collect();
    Transformation::new(map).expect("iterates of a total map are total")
}

/// Nonnegative weight `u` over points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    values: Vec<f64>,
}

impl WeightFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    what: "u",
                    index,
                    literal: value.to_string(),
                });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|u|²` pointwise.
    pub fn squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * v).collect()
    }
}

/// Membership vector over the points of a space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    membership: Vec<bool>,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        Self {
            membership: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            membership: vec![true; n],
        }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut set = Self::empty(n);
        for &i in indices {
            if i >= n {
                return Err(Error::PointOutOfRange(i));
            }
            set.insert(i);
        }
        Ok(set)
    }

    pub fn from_membership(membership: Vec<bool>) -> Self {
        Self { membership }
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn contains(&self, i: usize) -> bool {
        self.membership[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.membership[i] = true;
    }

    pub fn is_empty(&self) -> bool {
        !self.membership.iter().any(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.membership.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let membership = self
            .membership
            .iter()
            .zip(&other.membership)
            .map(|(a, b)| *a || *b)
            .collect();
        PointSet { membership }
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.membership.iter().zip(&other.membership).all(|(a, b)| !*a || *b)
    }

    pub fn measure(&self, space: &DiscreteMeasureSpace) -> f64 {
        self.indices().iter().map(|&i| space.mass(i)).sum()
    }

    /// `φ⁻¹(S) ⊆ S`, checked by direct fiber membership.
    pub fn is_backward_invariant(&self, phi: &Transformation) -> bool {
        self.indices()
            .iter()
            .all(|&k| phi.fiber(k).iter().all(|&i| self.contains(i)))
    }
}

/// Result of [`backward_invariant_sets`].
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardInvariantSets {
    /// Minimal nonempty backward-invariant sets.
    pub minimal: Vec<PointSet>,
    /// All distinct nonempty unions of backward closures found, minimal sets included.
    pub sets: Vec<PointSet>,
    /// `true` when enumeration stopped at the cap.
    pub truncated: bool,
}

/// Enumerates the nonempty sets `S` with `φ⁻¹(S) ⊆ S`.
///
/// Every such set is a union of backward closures of its points, so the
/// family is generated by the distinct closures. Enumeration stops once `cap`
/// sets have been produced and the result is flagged as truncated.
pub fn backward_invariant_sets(phi: &Transformation, cap: usize) -> BackwardInvariantSets {
    let n = phi.len();
    let generators: BTreeSet<PointSet> = (0..n).map(|x| phi.backward_closure(x)).collect();
    let generators: Vec<PointSet> = generators.into_iter().collect();

    let minimal: Vec<PointSet> = generators
        .iter()
        .filter(|g| !generators.iter().any(|other| other != *g && other.is_subset_of(g)))
        .cloned()
        .collect();

    let mut seen: HashSet<PointSet> = HashSet::new();
    let mut sets: Vec<PointSet> = Vec::new();
    let mut truncated = false;
    'outer: for g in &generators {
        let snapshot_len = sets.len();
        let mut candidates = vec![g.clone()];
        candidates.extend(sets[..snapshot_len].iter().map(|s| s.union(g)));
        for candidate in candidates {
            if seen.contains(&candidate) {
                continue;
            }
            if sets.len() >= cap {
                truncated = true;
                break 'outer;
            }
            seen.insert(candidate.clone());
            sets.push(candidate);
        }
    }
    sets.sort_by_key(|s| (s.count(), s.indices()));

    BackwardInvariantSets {
        minimal,
        sets,
        truncated,
    }
}

/// On-disk document: `{"masses": [...], "phi": [...], "u": [...]}`.
///
/// The optional `boundary` array lists points where a user-supplied finite
/// truncation of an infinite space cuts fibers short.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub masses: Vec<serde_json::Number>,
    pub phi: Vec<serde_json::Number>,
    pub u: Vec<serde_json::Number>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundary: Vec<usize>,
}

/// A validated `(space, φ, u)` triple with exact copies of the inputs.
#[derive(Debug, Clone)]
pub struct WeightedSystem {
    pub space: DiscreteMeasureSpace,
    pub phi: Transformation,
    pub u: WeightFunction,
    pub rational: Option<RationalInputs>,
    pub boundary: Vec<usize>,
}

impl WeightedSystem {
    pub fn new(space: DiscreteMeasureSpace, phi: Transformation, u: WeightFunction) -> Result<Self> {
        if space.len() != phi.len() || space.len() != u.len() {
            return Err(Error::LengthMismatch {
                masses: space.len(),
                phi: phi.len(),
                u: u.len(),
            });
        }
        Ok(Self {
            space,
            phi,
            u,
            rational: None,
            boundary: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Serializes back to the input document format.
    pub fn to_document(&self) -> InputDocument {
        let num =
            |v: f64| -> serde_json::Number { serde_json::Number::from_f64(v).expect("validated values are finite") };
        InputDocument {
            masses: self.space.masses().iter().map(|&v| num(v)).collect(),
            phi: self.phi.map().iter().map(|&k| serde_json::Number::from(k)).collect(),
            u: self.u.values().iter().map(|&v| num(v)).collect(),
            boundary: self.boundary.clone(),
        }
    }
}

fn parse_real(what: &'static str, index: usize, n: &serde_json::Number) -> Result<(f64, BigRational)> {
    let literal = n.to_string();
    let exact = parse_decimal(&literal).ok_or_else(|| Error::NonFinite {
        what,
        index,
        literal: literal.clone(),
    })?;
    let value: f64 = literal.parse().map_err(|_| Error::NonFinite {
        what,
        index,
        literal: literal.clone(),
    })?;
    if !value.is_finite() {
        return Err(Error::NonFinite { what, index, literal });
    }
    Ok((value, exact))
}

/// Parses and validates an input document.
pub fn load_space(document: &str) -> Result<WeightedSystem> {
    let doc: InputDocument = serde_json::from_str(document).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_document(&doc)
}

pub fn from_document(doc: &InputDocument) -> Result<WeightedSystem> {
    if doc.masses.len() != doc.phi.len() || doc.masses.len() != doc.u.len() {
        return Err(Error::LengthMismatch {
            masses: doc.masses.len(),
            phi: doc.phi.len(),
            u: doc.u.len(),
        });
    }
    let (masses, exact_masses): (Vec<f64>, Vec<BigRational>) = doc
        .masses
        .iter()
        .enumerate()
        .map(|(i, n)| parse_real("masses", i, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (u, exact_u): (Vec<f64>, Vec<BigRational>) = doc
        .u
        .iter()
        .enumerate()
        .map(|(i, n)| parse_real("u", i, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let map = doc
        .phi
        .iter()
        .enumerate()
        .map(|(index, n)| {
            n.as_u64().map(|k| k as usize).ok_or_else(|| Error::InvalidIndex {
                index,
                literal: n.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let space = DiscreteMeasureSpace::new(masses)?;
    let phi = Transformation::new(map)?;
    let u = WeightFunction::new(u)?;
    for &b in &doc.boundary {
        if b >= space.len() {
            return Err(Error::PointOutOfRange(b));
        }
    }
    let mut system = WeightedSystem::new(space, phi, u)?;
    system.rational = Some(RationalInputs {
        masses: exact_masses,
        u: exact_u,
    });
    system.boundary = doc.boundary.clone();
    Ok(system)
}
