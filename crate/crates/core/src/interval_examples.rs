//! Weighted composition operators on `L²[0,1]` with Lebesgue measure and
//! `φ(x) = x²`.
//!
//! `φ` is injective, so the conditional expectation onto `φ⁻¹(F)` is the
//! identity and the recursion for `J_n` reduces to a pointwise one:
//!
//! ```text
//! J_n(x) = h(x) · |u(√x)|² · J_{n−1}(√x),      h(x) = 1 / (2√x).
//! ```

use num_rational::BigRational;
use num_traits::Signed;

use crate::classifier::{classify_sequence, defect_sums_exact, Verdict, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::exact::rational;
use crate::operator_calculus::JSequence;

/// `φ(x) = x²` on `[0,1]` with a weight given by `|u|²`.
#[derive(Clone, Copy)]
pub struct InjectiveIntervalSystem {
    pub weight_squared: fn(f64) -> f64,
}

impl InjectiveIntervalSystem {
    pub fn phi(x: f64) -> f64 {
        x * x
    }

    pub fn phi_inverse(x: f64) -> f64 {
        x.sqrt()
    }

    /// Radon–Nikodym derivative of Lebesgue measure under `x ↦ x²`.
    pub fn h(x: f64) -> f64 {
        1.0 / (2.0 * x.sqrt())
    }

    /// `J_n(x)` from the pointwise recursion, `x ∈ (0,1]`.
    pub fn j(&self, n: usize, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::OutsideInterval(x));
        }
        let mut value = 1.0;
        let mut point = x;
        for _ in 0..n {
            let pre = Self::phi_inverse(point);
            value *= Self::h(point) * (self.weight_squared)(pre);
            point = pre;
        }
        Ok(value)
    }
}

/// `|u|² = x(x² + 1)`.
pub fn example_a_system() -> InjectiveIntervalSystem {
    InjectiveIntervalSystem {
        weight_squared: |x| x * (x * x + 1.0),
    }
}

/// `|u|² = ⌊x⌋`.
pub fn example_b_system() -> InjectiveIntervalSystem {
    InjectiveIntervalSystem {
        weight_squared: |x| x.floor(),
    }
}

fn check_unit_interval(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideInterval(x));
    }
    Ok(())
}

/// `J_n(x)` for `u(x) = √(x(x²+1))`, via `J_n(x) = ((x+1)/2) · J_{n−1}(√x)`.
///
/// The factor `h(x)·u(√x)² = (x+1)/2` extends continuously to `x = 0`, which
/// gives `J_n(0) = 2⁻ⁿ`.
pub fn example_a_j(n: usize, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let mut value = 1.0;
    let mut point = x;
    for _ in 0..n {
        value *= (point + 1.0) / 2.0;
        point = point.sqrt();
    }
    Ok(value)
}

/// `J_1 = (x+1)/2`.
pub fn example_a_j1_closed(x: f64) -> f64 {
    (x + 1.0) / 2.0
}

/// `J_2 = (√x+1)(x+1)/4`.
pub fn example_a_j2_closed(x: f64) -> f64 {
    (x.sqrt() + 1.0) * (x + 1.0) / 4.0
}

/// The general-`k` closed form `(√x+1)(x+1)^{k−1}/2ᵏ`, reported for comparison
/// only. It agrees with the recursion at `k ≤ 2` and not beyond.
pub fn example_a_jk_candidate(k: usize, x: f64) -> f64 {
    (x.sqrt() + 1.0) * (x + 1.0).powi(k as i32 - 1) / 2f64.powi(k as i32)
}

/// `J_2 − 2J_1 + 1`.
pub fn example_a_defect2(x: f64) -> Result<f64> {
    Ok(example_a_j(2, x)? - 2.0 * example_a_j(1, x)? + 1.0)
}

/// `[(x+1)(√x−3) + 4]/4`, the expansion of `J_2 − 2J_1 + 1`.
pub fn example_a_defect2_expanded(x: f64) -> f64 {
    ((x + 1.0) * (x.sqrt() - 3.0) + 4.0) / 4.0
}

/// `(√x+1)(x−4√x+2)/4`, the factorization reported for comparison only.
pub fn example_a_defect2_candidate(x: f64) -> f64 {
    let s = x.sqrt();
    (s + 1.0) * (x - 4.0 * s + 2.0) / 4.0
}

/// One row of the example (a) grid table.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub j1: f64,
    pub j2: f64,
    pub defect: f64,
    pub j3: f64,
    pub j3_candidate: f64,
    pub defect_candidate: f64,
}

/// Uniform grid `x_i = i/points`, `i = 1..=points`.
pub fn example_a_grid(points: usize) -> Result<Vec<GridRow>> {
    (1..=points)
        .map(|i| {
            let x = i as f64 / points as f64;
            Ok(GridRow {
                x,
                j1: example_a_j(1, x)?,
                j2: example_a_j(2, x)?,
                defect: example_a_defect2(x)?,
                j3: example_a_j(3, x)?,
                j3_candidate: example_a_jk_candidate(3, x),
                defect_candidate: example_a_defect2_candidate(x),
            })
        })
        .collect()
}

/// Verdict for `u(x) = √⌊x⌋`, where `J_n = 0` almost everywhere for `n ≥ 1`.
///
/// The `a.e.` data is a single representative point with `J_0 = 1` and
/// `J_n = 0` after it.
pub fn example_b_classification(m: usize) -> Result<Verdict> {
    let mut levels = vec![vec![1.0]];
    levels.extend((1..=m + 1).map(|_| vec![0.0]));
    classify_sequence(&JSequence::from_levels(levels)?, m, DEFAULT_TOLERANCE)
}

/// `(|G_m|, |G⁰_m|)` for `J_n = 4⁻ⁿ` on `[0,1)`, in exact arithmetic.
pub fn example_c_defects(m: usize) -> Result<(BigRational, BigRational)> {
    let levels: Vec<Vec<BigRational>> = (0..=m + 1).map(|k| vec![rational(1, 4).pow(k as i32)]).collect();
    let defects = defect_sums_exact(&levels, m)?;
    Ok((defects.g[0].abs(), defects.g0[0].abs()))
}

/// Floating-point verdict for example (c) at order `m`.
pub fn example_c_classification(m: usize) -> Result<Verdict> {
    let levels = (0..=m + 1).map(|k| vec![0.25f64.powi(k as i32)]).collect();
    classify_sequence(&JSequence::from_levels(levels)?, m, DEFAULT_TOLERANCE)
}

/// `|∫_a^b f(√x)/(2√x) dx − ∫_{√a}^{√b} f(t) dt|` for `0 ≤ a < b ≤ 1`.
///
/// The left side is integrated in `s` with `x = s⁴`, which turns the
/// `x^{-1/2}` singularity at 0 into the smooth integrand `2s·f(s²)`; the right
/// side is integrated directly in `t`.
pub fn change_of_variables_residual(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    check_unit_interval(a)?;
    check_unit_interval(b)?;
    let target = 1e-10;
    let left = quadrature::integrate(|s| 2.0 * s * f(s * s), a.powf(0.25), b.powf(0.25), target).integral;
    let right = quadrature::integrate(&f, a.sqrt(), b.sqrt(), target).integral;
    Ok((left - right).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn example_a_values() {
        assert_relative_eq!(example_a_j(1, 0.25).unwrap(), 0.625, epsilon = 1e-15);
        assert_relative_eq!(example_a_j(2, 0.25).unwrap(), 0.46875, epsilon = 1e-15);
        let j3 = 0.625 * ((0.5f64.sqrt() + 1.0) * 1.5 / 4.0);
        assert_relative_eq!(example_a_j(3, 0.25).unwrap(), j3, epsilon = 1e-15);
        assert_relative_eq!(j3, 0.400103151840597, epsilon = 1e-14);
        assert_eq!(example_a_j(0, 0.3).unwrap(), 1.0);
        assert_eq!(example_a_j(1, 0.0).unwrap(), 0.5);
        assert_eq!(example_a_j(4, 0.0).unwrap(), 0.0625);
        assert!(example_a_j(1, 1.5).is_err());
        assert!(example_a_j(1, -0.1).is_err());
    }

    #[test]
    fn candidate_general_form_fails_at_three() {
        assert_relative_eq!(
            example_a_jk_candidate(2, 0.25),
            example_a_j(2, 0.25).unwrap(),
            epsilon = 1e-15
        );
        let gap = (example_a_jk_candidate(3, 0.25) - example_a_j(3, 0.25).unwrap()).abs();
        assert!(gap > 1e-3);
        // (x^{1/4}+1)(√x+1)(x+1)/8
        let x: f64 = 0.25;
        let closed = (x.powf(0.25) + 1.0) * (x.sqrt() + 1.0) * (x + 1.0) / 8.0;
        assert_relative_eq!(example_a_j(3, x).unwrap(), closed, epsilon = 1e-15);
    }

    #[test]
    fn defect_values() {
        assert_relative_eq!(example_a_defect2(0.25).unwrap(), 0.21875, epsilon = 1e-15);
        assert_eq!(example_a_defect2(1.0).unwrap(), 0.0);
        assert_relative_eq!(example_a_defect2(0.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(example_a_defect2_expanded(0.25), 0.21875, epsilon = 1e-15);
        assert_relative_eq!(example_a_defect2_candidate(0.25), 0.09375, epsilon = 1e-15);
    }

    #[test]
    fn pointwise_recursion_matches_closed_factor() {
        let sys = example_a_system();
        for i in 1..=50 {
            let x = i as f64 / 50.0;
            for n in 0..=5 {
                assert_relative_eq!(sys.j(n, x).unwrap(), example_a_j(n, x).unwrap(), max_relative = 1e-13);
            }
        }
        assert!(sys.j(1, 0.0).is_err());
    }

    #[test]
    fn inverse_map() {
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let back = InjectiveIntervalSystem::phi_inverse(InjectiveIntervalSystem::phi(x));
            assert_relative_eq!(back, x, epsilon = 1e-15);
        }
    }

    #[test]
    fn example_b_vanishes_below_one() {
        let sys = example_b_system();
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert_eq!(sys.j(1, x).unwrap(), 0.0);
            assert_eq!(sys.j(3, x).unwrap(), 0.0);
        }
        for m in [1, 3] {
            let v = example_b_classification(m).unwrap();
            assert!(v.is_quasi_m_isometry && !v.is_m_isometry);
            assert_eq!(v.witnesses.m_isometry.residual, 1.0);
            assert_eq!(v.witnesses.quasi_m_isometry.residual, 0.0);
        }
    }

    #[test]
    fn example_c_values() {
        let (g, g0) = example_c_defects(1).unwrap();
        assert_eq!(g, rational(3, 16));
        assert_eq!(g0, rational(3, 4));
        let (g, g0) = example_c_defects(2).unwrap();
        assert_eq!(g, rational(9, 64));
        assert_eq!(g0, rational(9, 16));
        let (g, g0) = example_c_defects(4).unwrap();
        assert_eq!(g0, rational(81, 256));
        assert_eq!(g, rational(81, 1024));
        let v = example_c_classification(3).unwrap();
        assert!(!v.is_quasi_m_isometry && !v.is_m_isometry);
    }

    #[test]
    fn quadrature_identity() {
        let r = change_of_variables_residual(|t| 3.0 * t * t - t + 2.0, 0.0, 1.0).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        let r = change_of_variables_residual(|t| t.powi(5), 0.09, 0.64).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        assert!(change_of_variables_residual(|t| t, 0.0, 2.0).is_err());
    }
}
