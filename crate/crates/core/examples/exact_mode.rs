//! A residual of 5e-9 sits within 10x of the default tolerance. Floating
//! point flags it as borderline; rational arithmetic settles it.

use wcomp::classifier::{classify, classify_exact, DEFAULT_TOLERANCE};
use wcomp::measure_space::load_space;

fn main() -> wcomp::Result<()> {
    let s = load_space(include_str!("../data/borderline.json"))?;

    let float = classify(&s.space, &s.u, &s.phi, 2, DEFAULT_TOLERANCE)?;
    println!(
        "float: isometry {} (residual {:e}, borderline {})",
        float.is_isometry, float.witnesses.isometry.residual, float.witnesses.isometry.borderline
    );

    let rational = s.rational.as_ref().expect("decimal literals parse exactly");
    let exact = classify_exact(rational, &s.phi, 2)?;
    println!(
        "exact: isometry {} (J_1 - 1 = {:e}), 2-isometry {}",
        exact.is_isometry, exact.witnesses.isometry.residual, exact.is_m_isometry
    );
    Ok(())
}
