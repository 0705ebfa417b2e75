//! J_0..J_5 for a truncated weighted shift, from the recursion and from
//! the direct formula `h_n E_n(|u_n|²) ∘ φ⁻ⁿ`.

use wcomp::measure_space::load_space;
use wcomp::operator_calculus::{j_direct, j_recursive};

fn main() -> wcomp::Result<()> {
    let system = load_space(include_str!("../data/truncated_shift.json"))?;
    let depth = 5;
    let j = j_recursive(&system.space, &system.u, &system.phi, depth)?;

    println!(
        "point  {}",
        (0..=depth)
            .map(|k| format!("{:>12}", format!("J_{k}")))
            .collect::<String>()
    );
    for p in 0..system.len() {
        let row: String = (0..=depth).map(|k| format!("{:>12.6}", j.level(k)[p])).collect();
        println!("{p:>5}  {row}");
    }

    let mut gap = 0.0_f64;
    for n in 0..=depth {
        let direct = j_direct(&system.space, &system.u, &system.phi, n)?;
        for (a, b) in direct.iter().zip(j.level(n)) {
            gap = gap.max((a - b).abs());
        }
    }
    println!("max |direct - recursive| = {gap:e}");
    Ok(())
}
