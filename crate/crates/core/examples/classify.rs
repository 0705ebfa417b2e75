//! Closed-form verdicts for the bundled sample spaces at orders 1..4.

use wcomp::classifier::{classify, DEFAULT_TOLERANCE};
use wcomp::measure_space::load_space;

const SAMPLES: [(&str, &str); 5] = [
    ("three_cycle", include_str!("../data/three_cycle.json")),
    ("weighted_cycle", include_str!("../data/weighted_cycle.json")),
    ("constant_map", include_str!("../data/constant_map.json")),
    ("zero_weight", include_str!("../data/zero_weight.json")),
    ("damped_swap", include_str!("../data/damped_swap.json")),
];

fn mark(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "-"
    }
}

fn main() -> wcomp::Result<()> {
    println!("{:<16} m  isometry  m-isometry  quasi-iso  quasi-m", "space");
    for (name, doc) in SAMPLES {
        let s = load_space(doc)?;
        for m in 1..=4 {
            let v = classify(&s.space, &s.u, &s.phi, m, DEFAULT_TOLERANCE)?;
            println!(
                "{name:<16} {m}  {:<8}  {:<10}  {:<9}  {}",
                mark(v.is_isometry),
                mark(v.is_m_isometry),
                mark(v.is_quasi_isometry),
                mark(v.is_quasi_m_isometry)
            );
        }
    }
    Ok(())
}
