//! The three interval examples on L²[0,1] with φ(x) = x².

use wcomp::interval_examples::{
    example_a_defect2, example_a_j, example_a_j1_closed, example_a_j2_closed, example_b_classification,
    example_c_defects,
};

fn main() -> wcomp::Result<()> {
    println!("(a) u² = x(x²+1)");
    println!("{:>6} {:>12} {:>12} {:>14}", "x", "J_1", "J_2", "J_2-2J_1+1");
    for i in [1, 10, 25, 50, 75, 90, 99, 100] {
        let x = f64::from(i) / 100.0;
        assert!((example_a_j(1, x)? - example_a_j1_closed(x)).abs() < 1e-12);
        assert!((example_a_j(2, x)? - example_a_j2_closed(x)).abs() < 1e-12);
        println!(
            "{x:>6.2} {:>12.9} {:>12.9} {:>14.6e}",
            example_a_j(1, x)?,
            example_a_j(2, x)?,
            example_a_defect2(x)?
        );
    }

    println!("\n(b) u = sqrt(floor(x))");
    for m in 1..=4 {
        let v = example_b_classification(m)?;
        println!(
            "  m={m}: m-isometry {}, quasi-m-isometry {}",
            v.is_m_isometry, v.is_quasi_m_isometry
        );
    }

    println!("\n(c) J_n = 4^-n");
    for m in 1..=6 {
        let (g, g0) = example_c_defects(m)?;
        println!("  m={m}: |G_m| = {g}, |G0_m| = {g0}");
    }
    Ok(())
}
