//! Radon–Nikodym densities, conditional expectations and the `J_n` sequence
//! of a weighted composition operator `W = M_u C_φ` on a discrete space.
//!
//! With `e_j` the point masses, `W*ⁿWⁿ` is multiplication by
//!
//! ```text
//! J_n = h_n · E_n(|u_n|²) ∘ φ⁻ⁿ,      J_0 = 1,
//! ```
//!
//! and the same sequence satisfies the one-step recursion
//! `J_n = h · E(J_{n−1}|u|²) ∘ φ⁻¹`. On atoms this reads
//! `J_n(j) = (1/m_j) Σ_{i ∈ φ⁻¹(j)} J_{n−1}(i) u(i)² m_i`.

use num_rational::BigRational;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::exact::RationalInputs;
use crate::measure_space::{iterate_map, DiscreteMeasureSpace, Transformation, WeightFunction};

/// `h = d(μ∘φ⁻¹)/dμ`, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    pub values: Vec<f64>,
}

/// `u_n = Π_{k<n} u∘φᵏ`, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleWeight {
    pub values: Vec<f64>,
}

/// Conditional expectation of `f` onto `φ⁻¹(F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalExpectation {
    /// `E(f)(i)`: the mass-weighted average of `f` over the fiber containing `i`.
    pub pointwise: Vec<f64>,
    /// `E(f)∘φ⁻¹(k)`: the same average indexed by the fiber's image point,
    /// `None` where the fiber is empty.
    pub by_fiber: Vec<Option<f64>>,
}

/// `J_0, …, J_N` per point.
#[derive(Debug, Clone, PartialEq)]
pub struct JSequence {
    levels: Vec<Vec<f64>>,
}

impl JSequence {
    /// Wraps precomputed levels. `levels[0]` must be all ones.
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::InsufficientLevels {
                have: 0,
                need: 1,
                order: 0,
            });
        };
        let n = first.len();
        if first.iter().any(|&v| v != 1.0) {
            return Err(Error::Assertion("J_0 must be identically 1".into()));
        }
        for level in &levels {
            if level.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: level.len(),
                });
            }
            if level.iter().any(|&v| v.is_nan() || v < 0.0) {
                return Err(Error::Assertion("J_n must be nonnegative".into()));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    /// Highest level index `N`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn points(&self) -> usize {
        self.levels[0].len()
    }
}

/// `h(k) = (1/m_k) Σ_{j∈φ⁻¹(k)} m_j`; zero on empty fibers.
pub fn radon_nikodym(space: &DiscreteMeasureSpace, phi: &Transformation) -> DensityVector {
    let values = (0..space.len())
        .map(|k| phi.fiber(k).iter().map(|&j| space.mass(j)).sum::<f64>() / space.mass(k))
        .collect();
    DensityVector { values }
}

/// `u(j)·u(φ(j))···u(φⁿ⁻¹(j))`; all ones for `n = 0`.
pub fn cocycle(u: &WeightFunction, phi: &Transformation, n: usize) -> CocycleWeight {
    let values = (0..u.len())
        .map(|j| {
            let mut point = j;
            let mut product = 1.0;
            for _ in 0..n {
                product *= u.values()[point];
                point = phi.apply(point);
            }
            product
        })
        .collect();
    CocycleWeight { values }
}

pub fn conditional_expectation(
    space: &DiscreteMeasureSpace,
    phi: &Transformation,
    f: &[f64],
) -> Result<ConditionalExpectation> {
    if f.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: f.len(),
        });
    }
    let by_fiber: Vec<Option<f64>> = phi
        .fibers()
        .iter()
        .map(|fiber| {
            if fiber.is_empty() {
                return None;
            }
            let weighted: f64 = fiber.iter().map(|&j| f[j] * space.mass(j)).sum();
            let mass: f64 = fiber.iter().map(|&j| space.mass(j)).sum();
            Some(weighted / mass)
        })
        .collect();
    let pointwise = (0..space.len())
        .map(|i| by_fiber[phi.apply(i)].expect("fiber of φ(i) contains i"))
        .collect();
    Ok(ConditionalExpectation { pointwise, by_fiber })
}

/// One recursion step `J ↦ (1/m_j) Σ_{i∈φ⁻¹(j)} J(i) |u(i)|² m_i`, generic over
/// the scalar so the same code runs in `f64` and in exact rationals.
fn recursion_step<T: Num + Clone>(masses: &[T], u_squared: &[T], phi: &Transformation, previous: &[T]) -> Vec<T> {
    (0..masses.len())
        .map(|j| {
            let sum = phi.fiber(j).iter().fold(T::zero(), |acc, &i| {
                acc + previous[i].clone() * u_squared[i].clone() * masses[i].clone()
            });
            sum / masses[j].clone()
        })
        .collect()
}

pub(crate) fn j_levels<T: Num + Clone>(
    masses: &[T],
    u_squared: &[T],
    phi: &Transformation,
    depth: usize,
) -> Vec<Vec<T>> {
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![T::one(); masses.len()]);
    for n in 1..=depth {
        let next = recursion_step(masses, u_squared, phi, &levels[n - 1]);
        levels.push(next);
    }
    levels
}

fn check_lengths(space: &DiscreteMeasureSpace, u: &WeightFunction, phi: &Transformation) -> Result<()> {
    if space.len() != u.len() || space.len() != phi.len() {
        return Err(Error::LengthMismatch {
            masses: space.len(),
            phi: phi.len(),
            u: u.len(),
        });
    }
    Ok(())
}

/// `J_0..J_depth` by the one-step recursion.
pub fn j_recursive(
    space: &DiscreteMeasureSpace,
    u: &WeightFunction,
    phi: &Transformation,
    depth: usize,
) -> Result<JSequence> {
    check_lengths(space, u, phi)?;
    let levels = j_levels(space.masses(), &u.squared(), phi, depth);
    Ok(JSequence { levels })
}

/// Exact-rational `J_0..J_depth`.
pub fn j_recursive_exact(
    rational: &RationalInputs,
    phi: &Transformation,
    depth: usize,
) -> Result<Vec<Vec<BigRational>>> {
    if rational.masses.len() != phi.len() || rational.u.len() != phi.len() {
        return Err(Error::LengthMismatch {
            masses: rational.masses.len(),
            phi: phi.len(),
            u: rational.u.len(),
        });
    }
    Ok(j_levels(&rational.masses, &rational.u_squared(), phi, depth))
}

/// `J_n = h_n · E_n(|u_n|²) ∘ φ⁻ⁿ`, assembled from `φⁿ` without the recursion.
pub fn j_direct(space: &DiscreteMeasureSpace, u: &WeightFunction, phi: &Transformation, n: usize) -> Result<Vec<f64>> {
    check_lengths(space, u, phi)?;
    let phi_n = iterate_map(phi, n);
    let h_n = radon_nikodym(space, &phi_n);
    let u_n = cocycle(u, phi, n);
    let u_n_sq: Vec<f64> = u_n.values.iter().map(|v| v * v).collect();
    let expectation = conditional_expectation(space, &phi_n, &u_n_sq)?;
    Ok(h_n
        .values
        .iter()
        .zip(&expectation.by_fiber)
        .map(|(h, e)| e.map_or(0.0, |e| h * e))
        .collect())
}

/// `|∫ J_n |f|² dμ − ‖Wⁿ f‖²|` with `‖Wⁿf‖² = Σ_j |u_n(j)|² |f(φⁿ(j))|² m_j`.
pub fn norm_identity_residual(
    space: &DiscreteMeasureSpace,
    u: &WeightFunction,
    phi: &Transformation,
    n: usize,
    f: &[f64],
) -> Result<f64> {
    if f.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: f.len(),
        });
    }
    let jn = j_recursive(space, u, phi, n)?;
    let lhs: f64 = (0..space.len())
        .map(|j| jn.level(n)[j] * f[j] * f[j] * space.mass(j))
        .sum();
    let phi_n = iterate_map(phi, n);
    let u_n = cocycle(u, phi, n);
    let rhs: f64 = (0..space.len())
        .map(|j| {
            let w = u_n.values[j];
            let fv = f[phi_n.apply(j)];
            w * w * fv * fv * space.mass(j)
        })
        .sum();
    Ok((lhs - rhs).abs())
}
