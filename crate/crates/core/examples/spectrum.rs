//! For a normal W the spectrum is governed by the essential range of J_1.
//! Here W is unitary (a weighted 4-cycle with J_1 = 1), so every eigenvalue
//! lies on the unit circle.

use wcomp::classifier::{classify_normal, spectrum_prediction, DEFAULT_TOLERANCE};
use wcomp::matrix_oracle::{build_matrix, normality_check, spectrum_eigen};
use wcomp::measure_space::load_space;
use wcomp::operator_calculus::j_recursive;

fn main() -> wcomp::Result<()> {
    let s = load_space(include_str!("../data/weighted_cycle.json"))?;
    let a = build_matrix(&s.space, &s.u, &s.phi)?;
    println!("normal: {}", normality_check(&a, 1e-10).normal);

    let j = j_recursive(&s.space, &s.u, &s.phi, 1)?;
    let verdict = classify_normal(j.level(1), 2, DEFAULT_TOLERANCE)?;
    let prediction = spectrum_prediction(&verdict, j.level(1));
    println!("ess range of J_1: {:?}", prediction.ess_range_of_j);
    println!("predicted moduli: {:?}", prediction.predicted_moduli);

    let spectrum = spectrum_eigen(&a)?;
    for (re, im) in &spectrum.eigenvalues {
        println!("  λ = {re:+.12} {im:+.12}i   |λ| = {:.12}", re.hypot(*im));
    }
    Ok(())
}
