//! Dense-matrix ground truth for the closed-form classification.
//!
//! `W` is written in the orthonormal basis `e_j = χ_{j} / √m_j` of `ℓ²(m)`.
//! In this basis the adjoint is the transpose and
//!
//! ```text
//! A[i][j] = u(i) · √(m_i / m_j)   if φ(i) = j,   0 otherwise.
//! ```
//!
//! Everything here is built from the operator definitions only, never from
//! the `J` sequence, so it can referee the classifier.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::classifier::{signed_binomials, Verdict, Witness, Witnesses};
use crate::error::{Error, Result};
use crate::measure_space::{DiscreteMeasureSpace, Transformation, WeightFunction};

/// Default cap on the dimension the oracle accepts.
pub const DEFAULT_MATRIX_CAP: usize = 64;

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 10_000;

/// Tolerance for `{|λ|²} = σ(A*A)` on normal matrices.
pub const SPECTRUM_MATCH_TOLERANCE: f64 = 1e-8;

/// `W` as a dense real matrix in the orthonormal point basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> DMatrix<f64> {
        self.entries.transpose()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x
    }
}

pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

pub fn build_matrix(space: &DiscreteMeasureSpace, u: &WeightFunction, phi: &Transformation) -> Result<OperatorMatrix> {
    let n = space.len();
    if u.len() != n || phi.len() != n {
        return Err(Error::LengthMismatch {
            masses: n,
            phi: phi.len(),
            u: u.len(),
        });
    }
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = phi.apply(i);
        entries[(i, j)] = u.values()[i] * (space.mass(i) / space.mass(j)).sqrt();
    }
    Ok(OperatorMatrix { entries })
}

/// `(A*)ᵏ Aᵏ`.
pub fn power_gram(a: &OperatorMatrix, k: usize) -> DMatrix<f64> {
    let n = a.dim();
    let mut power = DMatrix::identity(n, n);
    for _ in 0..k {
        power = &a.entries * power;
    }
    power.transpose() * power
}

/// `B_m` and the compression `A* B_m A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectOperators {
    pub m: usize,
    pub b_m: DMatrix<f64>,
    pub quasi: DMatrix<f64>,
}

pub fn defect_operator(a: &OperatorMatrix, m: usize) -> Result<DefectOperators> {
    if m == 0 {
        return Err(Error::ZeroOrder);
    }
    let n = a.dim();
    let mut b_m = DMatrix::zeros(n, n);
    let mut power = DMatrix::identity(n, n);
    for (k, c) in signed_binomials(m).into_iter().enumerate() {
        if k > 0 {
            power = &a.entries * power;
        }
        b_m += (power.transpose() * &power) * c as f64;
    }
    let quasi = a.adjoint() * &b_m * &a.entries;
    Ok(DefectOperators { m, b_m, quasi })
}

/// Largest absolute entry of `matrix`.
pub fn max_abs(matrix: &DMatrix<f64>) -> f64 {
    matrix.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Largest absolute off-diagonal entry.
pub fn off_diagonal_max(matrix: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            if i != j {
                worst = worst.max(matrix[(i, j)].abs());
            }
        }
    }
    worst
}

fn row_max_abs(matrix: &DMatrix<f64>) -> Vec<f64> {
    matrix
        .row_iter()
        .map(|row| row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub normal: bool,
    pub residual: f64,
}

/// `max |A*A − AA*| ≤ tolerance`.
pub fn normality_check(a: &OperatorMatrix, tolerance: f64) -> NormalityReport {
    let at = a.adjoint();
    let commutator = &at * &a.entries - &a.entries * &at;
    let residual = max_abs(&commutator);
    NormalityReport {
        normal: residual <= tolerance,
        residual,
    }
}

/// Symmetric-matrix summary: residual against a reference and sorted eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianReport {
    pub label: String,
    pub max_residual: f64,
    pub eigenvalues: Vec<f64>,
}

fn symmetric_eigen(matrix: &DMatrix<f64>, label: &'static str) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let asym = max_abs(&(matrix - matrix.transpose()));
    let scale = max_abs(matrix).max(1.0);
    if asym > 1e-12 * scale {
        return Err(Error::Assertion(format!(
            "{label} is not symmetric (asymmetry {asym:e})"
        )));
    }
    let symmetrized = (matrix + matrix.transpose()) * 0.5;
    SymmetricEigen::try_new(symmetrized, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenNoConvergence(label))
}

pub fn sorted_symmetric_eigenvalues(matrix: &DMatrix<f64>, label: &'static str) -> Result<Vec<f64>> {
    let eig = symmetric_eigen(matrix, label)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn hermitian_report(label: &str, matrix: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<HermitianReport> {
    Ok(HermitianReport {
        label: label.to_string(),
        max_residual: max_abs(&(matrix - reference)),
        eigenvalues: sorted_symmetric_eigenvalues(matrix, "gram matrix")?,
    })
}

/// Eigenvalues of `A` from a real Schur decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// `(re, im)` pairs, sorted by modulus then argument.
    pub eigenvalues: Vec<(f64, f64)>,
    pub moduli: Vec<f64>,
    pub normal: bool,
    /// For normal `A`: max gap between sorted `|λ|²` and sorted `σ(A*A)`.
    pub gram_mismatch: Option<f64>,
}

/// Francis QR stalls on scaled cyclic permutations, whose eigenvalues all
/// share one modulus. Retrying on `A + σI` breaks the tie; the shift is
/// subtracted afterwards.
fn general_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = matrix.nrows();
    let scale = max_abs(matrix).max(1.0);
    for shift in [0.0, 0.371_9, -0.618_3, 1.277_1] {
        let shifted = matrix + DMatrix::<f64>::identity(n, n) * (shift * scale);
        if let Some(schur) = Schur::try_new(shifted, EIGEN_EPS, EIGEN_MAX_ITER) {
            return Ok(schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z - Complex::new(shift * scale, 0.0))
                .collect());
        }
    }
    Err(Error::EigenNoConvergence("operator matrix"))
}

pub fn spectrum_eigen(a: &OperatorMatrix) -> Result<SpectrumReport> {
    let mut eigenvalues = general_eigenvalues(&a.entries)?;
    eigenvalues.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.arg().total_cmp(&y.arg())));
    let moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();

    let scale = max_abs(&a.entries).max(1.0);
    let normality = normality_check(a, 1e-10 * scale * scale);
    let gram_mismatch = if normality.normal {
        let gram = a.adjoint() * &a.entries;
        let gram_eigs = sorted_symmetric_eigenvalues(&gram, "A*A")?;
        let mut squared: Vec<f64> = moduli.iter().map(|r| r * r).collect();
        squared.sort_by(f64::total_cmp);
        let gap = squared
            .iter()
            .zip(&gram_eigs)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0_f64, f64::max);
        if gap > SPECTRUM_MATCH_TOLERANCE * scale * scale {
            return Err(Error::Assertion(format!(
                "normal matrix with |λ|² differing from σ(A*A) by {gap:e}"
            )));
        }
        Some(gap)
    } else {
        None
    };
    Ok(SpectrumReport {
        eigenvalues: eigenvalues.iter().map(|z| (z.re, z.im)).collect(),
        moduli,
        normal: normality.normal,
        gram_mismatch,
    })
}

/// `M^p` for symmetric positive semidefinite `M` via its eigendecomposition.
pub fn symmetric_power(matrix: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(matrix, "p-th power input")?;
    let powered = eig.eigenvalues.map(|l| l.max(0.0).powf(p));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&powered) * eig.eigenvectors.transpose())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponormalityReport {
    pub p: f64,
    pub holds: bool,
    pub min_eigenvalue: f64,
}

/// `(A*A)^p − (AA*)^p ⪰ −tolerance`.
pub fn p_hyponormality_check(a: &OperatorMatrix, p: f64, tolerance: f64) -> Result<HyponormalityReport> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Assertion(format!("p must be positive, got {p}")));
    }
    let at = a.adjoint();
    let left = symmetric_power(&(&at * &a.entries), p)?;
    let right = symmetric_power(&(&a.entries * &at), p)?;
    let difference = left - right;
    let eigs = sorted_symmetric_eigenvalues(&difference, "hyponormality difference")?;
    let min_eigenvalue = eigs.first().copied().unwrap_or(0.0);
    Ok(HyponormalityReport {
        p,
        holds: min_eigenvalue >= -tolerance,
        min_eigenvalue,
    })
}

/// Verdict from the operator definitions: `A*A = I`, `B_m = 0`,
/// `A*²A² = A*A`, `A*B_mA = 0`. Witness points are matrix rows.
pub fn oracle_verdict(a: &OperatorMatrix, m: usize, tolerance: f64) -> Result<Verdict> {
    let n = a.dim();
    let defects = defect_operator(a, m)?;
    let g1 = power_gram(a, 1);
    let g2 = power_gram(a, 2);
    let iso = &g1 - DMatrix::<f64>::identity(n, n);
    let quasi_iso = &g2 - &g1;
    let witnesses = Witnesses {
        isometry: Witness::from_values(&row_max_abs(&iso), tolerance),
        m_isometry: Witness::from_values(&row_max_abs(&defects.b_m), tolerance),
        quasi_isometry: Witness::from_values(&row_max_abs(&quasi_iso), tolerance),
        quasi_m_isometry: Witness::from_values(&row_max_abs(&defects.quasi), tolerance),
    };
    Ok(Verdict {
        m,
        tolerance,
        exact: false,
        is_isometry: witnesses.isometry.passed,
        is_m_isometry: witnesses.m_isometry.passed,
        is_quasi_isometry: witnesses.quasi_isometry.passed,
        is_quasi_m_isometry: witnesses.quasi_m_isometry.passed,
        witnesses,
        claims: Vec::new(),
    })
}

/// `⟨Ax, y⟩ − ⟨x, A*y⟩` for the given vectors.
pub fn adjoint_residual(a: &OperatorMatrix, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (a.apply(x).dot(y) - x.dot(&(a.adjoint() * y))).abs()
}

/// Coordinates of a function `f` on points in the orthonormal basis: `f(j)·√m_j`.
pub fn to_orthonormal(space: &DiscreteMeasureSpace, f: &[f64]) -> DVector<f64> {
    DVector::from_iterator(f.len(), f.iter().zip(space.masses()).map(|(v, m)| v * m.sqrt()))
}

/// Inverse of [`to_orthonormal`].
pub fn from_orthonormal(space: &DiscreteMeasureSpace, x: &DVector<f64>) -> Vec<f64> {
    x.iter().zip(space.masses()).map(|(v, m)| v / m.sqrt()).collect()
}
