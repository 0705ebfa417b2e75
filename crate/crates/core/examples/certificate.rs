//! Certificate that a damped swap is not a 2-isometry.
//!
//! On a backward-invariant set where `0 < δ ≤ J_1 < 1`, `J_n ≥ δⁿ` for
//! every n, while a 2-isometry would force `J_n = 1 + n(J_1 − 1)`.

use wcomp::classifier::{certify_not_two_isometry, classify, DEFAULT_TOLERANCE};
use wcomp::measure_space::load_space;

fn main() -> wcomp::Result<()> {
    let s = load_space(include_str!("../data/damped_swap.json"))?;
    match certify_not_two_isometry(&s.space, &s.u, &s.phi)? {
        Some(cert) => {
            println!("set {:?}, measure {}, delta {}", cert.set, cert.measure, cert.delta);
            for (i, p) in cert.set.iter().enumerate() {
                println!(
                    "  point {p}: J_2 - 2J_1 + 1 = {:.6}, refuted at n = {}, gap {:?}",
                    cert.defects[i], cert.refutation_levels[i], cert.growth_gaps[i]
                );
            }
        }
        None => println!("no certificate"),
    }
    let v = classify(&s.space, &s.u, &s.phi, 2, DEFAULT_TOLERANCE)?;
    println!("order-2 test passes: {}", v.is_m_isometry);
    Ok(())
}
