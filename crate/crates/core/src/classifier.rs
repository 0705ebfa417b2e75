//! Isometry-class verdicts from the `J_n` sequence.
//!
//! Because `W*ᵏWᵏ = M_{J_k}`, the defect operator `B_m` and its compression
//! `W*B_mW` are multiplication operators by
//!
//! ```text
//! G⁰_m = Σ_{k=0}^{m} (−1)^{m−k} C(m,k) J_k
//! G_m  = Σ_{k=0}^{m} (−1)^{m−k} C(m,k) J_{k+1}
//! ```
//!
//! so `W` is an m-isometry iff `G⁰_m = 0` at every point and a
//! quasi-m-isometry iff `G_m = 0` at every point.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, RationalInputs};
use crate::measure_space::{DiscreteMeasureSpace, PointSet, Transformation, WeightFunction};
use crate::operator_calculus::{j_recursive, j_recursive_exact, JSequence};

/// Default absolute tolerance on defect entries.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest supported order; keeps every `C(m, k)` inside `u128`.
pub const MAX_ORDER: usize = 100;

/// Residuals in `(tol, BORDERLINE_FACTOR·tol]` are flagged as borderline.
pub const BORDERLINE_FACTOR: f64 = 10.0;

/// Per-point defect sums of order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectVectors {
    pub order: usize,
    /// `G⁰_m`, built from `J_0..J_m`.
    pub g0: Vec<f64>,
    /// `G_m`, built from `J_1..J_{m+1}`.
    pub g: Vec<f64>,
}

/// Exact counterpart of [`DefectVectors`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDefectVectors {
    pub order: usize,
    pub g0: Vec<BigRational>,
    pub g: Vec<BigRational>,
}

/// Worst point and residual of one zero test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub residual: f64,
    pub point: Option<usize>,
    pub passed: bool,
    pub borderline: bool,
}

impl Witness {
    /// Zero test `max_j |values(j)| ≤ tolerance`.
    pub fn from_values(values: &[f64], tolerance: f64) -> Self {
        let (point, residual) =
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((None, 0.0_f64), |(bp, br), (i, r)| {
                    if bp.is_none() || r > br || r.is_nan() {
                        (Some(i), r)
                    } else {
                        (bp, br)
                    }
                });
        let passed = residual <= tolerance;
        let borderline = residual > tolerance && residual <= BORDERLINE_FACTOR * tolerance;
        Self {
            residual,
            point,
            passed,
            borderline,
        }
    }

    /// Exact zero test.
    pub fn from_exact(values: &[BigRational]) -> Self {
        let worst = values
            .iter()
            .enumerate()
            .max_by(|a, b| num_traits::Signed::abs(a.1).cmp(&num_traits::Signed::abs(b.1)));
        let point = worst.map(|(i, _)| i);
        let passed = values.iter().all(Zero::is_zero);
        Self {
            residual: exact::to_f64(&exact::max_abs(values)),
            point,
            passed,
            borderline: false,
        }
    }
}

/// A named statement emitted alongside a verdict, with whether it held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub isometry: Witness,
    pub m_isometry: Witness,
    pub quasi_isometry: Witness,
    pub quasi_m_isometry: Witness,
}

/// Classification of one operator at one order `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub m: usize,
    pub tolerance: f64,
    pub exact: bool,
    pub is_isometry: bool,
    pub is_m_isometry: bool,
    pub is_quasi_isometry: bool,
    pub is_quasi_m_isometry: bool,
    pub witnesses: Witnesses,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<Claim>,
}

impl Verdict {
    fn from_witnesses(m: usize, tolerance: f64, exact: bool, witnesses: Witnesses) -> Self {
        Self {
            m,
            tolerance,
            exact,
            is_isometry: witnesses.isometry.passed,
            is_m_isometry: witnesses.m_isometry.passed,
            is_quasi_isometry: witnesses.quasi_isometry.passed,
            is_quasi_m_isometry: witnesses.quasi_m_isometry.passed,
            witnesses,
            claims: Vec::new(),
        }
    }

    /// The four class memberships in a fixed order, for agreement checks.
    pub fn classes(&self) -> [bool; 4] {
        [
            self.is_isometry,
            self.is_m_isometry,
            self.is_quasi_isometry,
            self.is_quasi_m_isometry,
        ]
    }

    pub fn any_borderline(&self) -> bool {
        let w = &self.witnesses;
        w.isometry.borderline || w.m_isometry.borderline || w.quasi_isometry.borderline || w.quasi_m_isometry.borderline
    }

    pub fn claim(&self, name: &str) -> Option<bool> {
        self.claims.iter().find(|c| c.name == name).map(|c| c.holds)
    }
}

fn check_order(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroOrder);
    }
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge(m));
    }
    Ok(())
}

/// `(−1)^{m−k} C(m,k)` for `k = 0..=m`, as exact integers.
pub fn signed_binomials(m: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity(m + 1);
    let mut c: u128 = 1;
    for k in 0..=m {
        if k > 0 {
            c = c * (m - k + 1) as u128 / k as u128;
        }
        let sign = if (m - k).is_multiple_of(2) { 1 } else { -1 };
        out.push(sign * c as i128);
    }
    out
}

fn alternating_sum<T: Num + Clone + FromPrimitive>(levels: &[Vec<T>], m: usize, shift: usize) -> Vec<T> {
    let coefficients: Vec<T> = signed_binomials(m)
        .into_iter()
        .map(|c| T::from_i128(c).expect("binomial fits the scalar type"))
        .collect();
    let n = levels[0].len();
    (0..n)
        .map(|j| {
            coefficients
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, c)| acc + c.clone() * levels[k + shift][j].clone())
        })
        .collect()
}

fn check_levels(have: usize, m: usize) -> Result<()> {
    check_order(m)?;
    if have < m + 2 {
        return Err(Error::InsufficientLevels {
            have,
            need: m + 2,
            order: m,
        });
    }
    Ok(())
}

/// `G⁰_m` and `G_m` per point; needs levels `0..=m+1`.
pub fn defect_sums(j: &JSequence, m: usize) -> Result<DefectVectors> {
    check_levels(j.levels().len(), m)?;
    Ok(DefectVectors {
        order: m,
        g0: alternating_sum(j.levels(), m, 0),
        g: alternating_sum(j.levels(), m, 1),
    })
}

pub fn defect_sums_exact(levels: &[Vec<BigRational>], m: usize) -> Result<ExactDefectVectors> {
    check_levels(levels.len(), m)?;
    Ok(ExactDefectVectors {
        order: m,
        g0: alternating_sum(levels, m, 0),
        g: alternating_sum(levels, m, 1),
    })
}

/// Verdict from a precomputed `J` sequence with levels `0..=m+1`.
pub fn classify_sequence(j: &JSequence, m: usize, tolerance: f64) -> Result<Verdict> {
    let defects = defect_sums(j, m)?;
    let j1 = j.level(1);
    let j2 = j.level(2);
    let iso: Vec<f64> = j1.iter().map(|v| v - 1.0).collect();
    let quasi: Vec<f64> = j2.iter().zip(j1).map(|(a, b)| a - b).collect();
    Ok(Verdict::from_witnesses(
        m,
        tolerance,
        false,
        Witnesses {
            isometry: Witness::from_values(&iso, tolerance),
            m_isometry: Witness::from_values(&defects.g0, tolerance),
            quasi_isometry: Witness::from_values(&quasi, tolerance),
            quasi_m_isometry: Witness::from_values(&defects.g, tolerance),
        },
    ))
}

/// Classifies `W = M_u C_φ` at order `m`.
pub fn classify(
    space: &DiscreteMeasureSpace,
    u: &WeightFunction,
    phi: &Transformation,
    m: usize,
    tolerance: f64,
) -> Result<Verdict> {
    check_order(m)?;
    let j = j_recursive(space, u, phi, m + 1)?;
    classify_sequence(&j, m, tolerance)
}

/// The unweighted composition operator `C_φ`, where `J_k = h_k`.
pub fn classify_composition(
    space: &DiscreteMeasureSpace,
    phi: &Transformation,
    m: usize,
    tolerance: f64,
) -> Result<Verdict> {
    let u = WeightFunction::constant(space.len(), 1.0)?;
    classify(space, &u, phi, m, tolerance)
}

/// Verdict from exact `J` levels; every zero test is exact.
pub fn classify_exact_levels(levels: &[Vec<BigRational>], m: usize) -> Result<Verdict> {
    let defects = defect_sums_exact(levels, m)?;
    let one = exact::one();
    let iso: Vec<BigRational> = levels[1].iter().map(|v| v - &one).collect();
    let quasi: Vec<BigRational> = levels[2].iter().zip(&levels[1]).map(|(a, b)| a - b).collect();
    Ok(Verdict::from_witnesses(
        m,
        0.0,
        true,
        Witnesses {
            isometry: Witness::from_exact(&iso),
            m_isometry: Witness::from_exact(&defects.g0),
            quasi_isometry: Witness::from_exact(&quasi),
            quasi_m_isometry: Witness::from_exact(&defects.g),
        },
    ))
}

/// Exact classification from rational inputs.
pub fn classify_exact(rational: &RationalInputs, phi: &Transformation, m: usize) -> Result<Verdict> {
    check_order(m)?;
    let levels = j_recursive_exact(rational, phi, m + 1)?;
    classify_exact_levels(&levels, m)
}

/// `J_k = c^k` levels for the multiplication and normal cases.
fn power_levels<T: Num + Clone>(base: &[T], depth: usize) -> Vec<Vec<T>> {
    let mut levels = vec![vec![T::one(); base.len()]];
    for k in 1..=depth {
        let next = levels[k - 1]
            .iter()
            .zip(base)
            .map(|(a, b)| a.clone() * b.clone())
            .collect();
        levels.push(next);
    }
    levels
}

/// Multiplication operator `M_u` (φ the identity).
///
/// Membership comes from the factored conditions: quasi-m-isometric iff
/// every `u(j)` is `0` or `1`, m-isometric iff every `u(j)` is `1`. Neither
/// depends on `m`. The binomial sums at order `m` and at order 2 are also
/// evaluated; the claim `order_independent` records whether their verdicts
/// coincide with the factored ones.
pub fn classify_multiplication(u: &WeightFunction, m: usize, tolerance: f64) -> Result<Verdict> {
    check_order(m)?;
    let abs_minus_one: Vec<f64> = u.values().iter().map(|v| v.abs() - 1.0).collect();
    let zero_or_one: Vec<f64> = u.values().iter().map(|v| v.abs().min((v.abs() - 1.0).abs())).collect();

    let witnesses = Witnesses {
        isometry: Witness::from_values(&abs_minus_one, tolerance),
        m_isometry: Witness::from_values(&abs_minus_one, tolerance),
        quasi_isometry: Witness::from_values(&zero_or_one, tolerance),
        quasi_m_isometry: Witness::from_values(&zero_or_one, tolerance),
    };
    let mut verdict = Verdict::from_witnesses(m, tolerance, false, witnesses);

    let levels = power_levels(&u.squared(), m.max(2) + 1);
    let j = JSequence::from_levels(levels)?;
    let at_m = classify_sequence(&j, m, tolerance)?;
    let at_2 = classify_sequence(&j, 2, tolerance)?;
    let agrees =
        |v: &Verdict| v.is_m_isometry == verdict.is_m_isometry && v.is_quasi_m_isometry == verdict.is_quasi_m_isometry;
    verdict.claims.push(Claim {
        name: "order_independent".into(),
        holds: agrees(&at_m) && agrees(&at_2),
    });
    Ok(verdict)
}

/// Exact multiplication-operator verdict at order `m` straight from the binomial sums.
pub fn classify_multiplication_exact(u: &[BigRational], m: usize) -> Result<Verdict> {
    check_order(m)?;
    let squared: Vec<BigRational> = u.iter().map(|v| v * v).collect();
    classify_exact_levels(&power_levels(&squared, m + 1), m)
}

/// Normal `W`, where `W*ᵏWᵏ = (W*W)ᵏ` and the defects collapse to
/// `J(J−1)^m` and `(J−1)^m` with `J = J_1`.
///
/// Memberships are decided on the roots (`J ∈ {0,1}`, `J = 1`), which makes
/// the m-classes coincide with quasi-isometry and isometry; the polynomial
/// residuals are reported as claims.
pub fn classify_normal(j1: &[f64], m: usize, tolerance: f64) -> Result<Verdict> {
    check_order(m)?;
    let minus_one: Vec<f64> = j1.iter().map(|v| v - 1.0).collect();
    let zero_or_one: Vec<f64> = j1.iter().map(|v| v.abs().min((v - 1.0).abs())).collect();
    let mut verdict = Verdict::from_witnesses(
        m,
        tolerance,
        false,
        Witnesses {
            isometry: Witness::from_values(&minus_one, tolerance),
            m_isometry: Witness::from_values(&minus_one, tolerance),
            quasi_isometry: Witness::from_values(&zero_or_one, tolerance),
            quasi_m_isometry: Witness::from_values(&zero_or_one, tolerance),
        },
    );
    let exponent = i32::try_from(m).expect("order bounded by MAX_ORDER");
    let poly_m: Vec<f64> = j1.iter().map(|v| (v - 1.0).powi(exponent)).collect();
    let poly_quasi: Vec<f64> = j1.iter().map(|v| v * (v - 1.0).powi(exponent)).collect();
    let poly_m_ok = Witness::from_values(&poly_m, tolerance).passed;
    let poly_quasi_ok = Witness::from_values(&poly_quasi, tolerance).passed;
    verdict.claims = vec![
        Claim {
            name: "quasi_m_iff_quasi_isometry".into(),
            holds: verdict.is_quasi_m_isometry == verdict.is_quasi_isometry,
        },
        Claim {
            name: "m_isometry_iff_isometry".into(),
            holds: verdict.is_m_isometry == verdict.is_isometry,
        },
        Claim {
            name: "polynomial_m_isometry_agrees".into(),
            holds: poly_m_ok == verdict.is_m_isometry,
        },
        Claim {
            name: "polynomial_quasi_m_isometry_agrees".into(),
            holds: poly_quasi_ok == verdict.is_quasi_m_isometry,
        },
    ];
    Ok(verdict)
}

/// Predicted spectral moduli for a normal operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPrediction {
    /// Allowed `|λ|` values, when the verdict forces a containment.
    pub predicted_moduli: Option<Vec<f64>>,
    /// Distinct values of `J_1`.
    pub ess_range_of_j: Vec<f64>,
    /// `|λ|` with `|λ|² ∈ ess range(J)`.
    pub moduli_from_square: Vec<f64>,
    /// `|λ|` with `|λ|^{1/2} ∈ ess range(J)`.
    pub moduli_from_square_root: Vec<f64>,
}

/// Distinct values up to a relative gap of `1e-12`, sorted ascending.
pub fn distinct_values(values: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in sorted {
        match out.last() {
            Some(&last) if (v - last).abs() <= 1e-12 * last.abs().max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

pub fn spectrum_prediction(verdict: &Verdict, j1: &[f64]) -> SpectrumPrediction {
    let ess_range_of_j = distinct_values(j1);
    let predicted_moduli = if verdict.is_m_isometry {
        Some(vec![1.0])
    } else if verdict.is_quasi_m_isometry {
        Some(vec![0.0, 1.0])
    } else {
        None
    };
    SpectrumPrediction {
        predicted_moduli,
        moduli_from_square: ess_range_of_j.iter().map(|v| v.sqrt()).collect(),
        moduli_from_square_root: ess_range_of_j.iter().map(|v| v * v).collect(),
        ess_range_of_j,
    }
}

/// Largest level evaluated when checking a certificate's growth-law gap.
const MAX_CERTIFICATE_LEVEL: usize = 4096;

/// Witness that `W` is not a 2-isometry.
///
/// `set` is backward-invariant with `δ ≤ J_1 < 1` on it, so `J_n ≥ δⁿ` there
/// for every `n`. A 2-isometry satisfies `J_{k+2} − 2J_{k+1} + J_k = 0` for all
/// `k`, hence `J_n = 1 + n(J_1 − 1)`, which turns negative once
/// `n > 1/(1 − J_1)`. The two cannot both hold at `refutation_levels[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotTwoIsometryCertificate {
    pub set: Vec<usize>,
    pub measure: f64,
    pub delta: f64,
    /// `δ² − 2J_1 + 1` per point of `set`, a lower bound for `J_2 − 2J_1 + 1`
    /// from `J_2 ≥ δ²`. It may be negative.
    pub lower_bounds: Vec<f64>,
    /// `J_2 − 2J_1 + 1` per point of `set`.
    pub defects: Vec<f64>,
    /// Smallest `n` with `δⁿ > 1 + n(J_1 − 1)`, per point of `set`.
    pub refutation_levels: Vec<usize>,
    /// `J_n − (1 + n(J_1 − 1))` at the refutation level; positive by
    /// construction. Omitted when the level exceeds the evaluation limit.
    pub growth_gaps: Vec<Option<f64>>,
}

fn refutation_level(delta: f64, j1: f64) -> usize {
    // n = 1 never refutes: δ ≤ J_1 = 1 + (J_1 − 1)
    let mut power = delta;
    let mut n = 1usize;
    loop {
        n += 1;
        power *= delta;
        let growth = 1.0 + n as f64 * (j1 - 1.0);
        if power > growth {
            return n;
        }
    }
}

/// Searches for the largest backward-invariant set on which `0 < J_1 < 1`.
///
/// The backward-invariant subsets of a set `P` are exactly the unions of
/// backward closures contained in `P`, so the union of all such closures is
/// the largest candidate. `None` does not prove `W` is a 2-isometry.
pub fn certify_not_two_isometry(
    space: &DiscreteMeasureSpace,
    u: &WeightFunction,
    phi: &Transformation,
) -> Result<Option<NotTwoIsometryCertificate>> {
    let j = j_recursive(space, u, phi, 2)?;
    let j1 = j.level(1);
    let j2 = j.level(2);
    let n = space.len();
    let candidate = PointSet::from_membership(j1.iter().map(|&v| v > 0.0 && v < 1.0).collect());

    let mut closures: BTreeMap<usize, PointSet> = BTreeMap::new();
    let mut set = PointSet::empty(n);
    for x in candidate.indices() {
        let closure = closures.entry(x).or_insert_with(|| phi.backward_closure(x));
        if closure.is_subset_of(&candidate) {
            set = set.union(closure);
        }
    }
    if set.is_empty() {
        return Ok(None);
    }
    debug_assert!(set.is_backward_invariant(phi));

    let indices = set.indices();
    let delta = indices.iter().map(|&i| j1[i]).fold(f64::INFINITY, f64::min);
    let lower_bounds = indices.iter().map(|&i| delta * delta - 2.0 * j1[i] + 1.0).collect();
    let defects = indices.iter().map(|&i| j2[i] - 2.0 * j1[i] + 1.0).collect();
    let refutation_levels: Vec<usize> = indices.iter().map(|&i| refutation_level(delta, j1[i])).collect();

    let deepest = refutation_levels.iter().copied().max().unwrap_or(0);
    let levels = (deepest <= MAX_CERTIFICATE_LEVEL)
        .then(|| j_recursive(space, u, phi, deepest))
        .transpose()?;
    let growth_gaps = indices
        .iter()
        .zip(&refutation_levels)
        .map(|(&i, &level)| {
            levels
                .as_ref()
                .map(|all| all.level(level)[i] - (1.0 + level as f64 * (j1[i] - 1.0)))
        })
        .collect();

    Ok(Some(NotTwoIsometryCertificate {
        measure: set.measure(space),
        set: indices,
        delta,
        lower_bounds,
        defects,
        refutation_levels,
        growth_gaps,
    }))
}
