//! For a multiplication operator the m-classes do not depend on m:
//! M_u is an m-isometry iff |u| = 1, and quasi-m-isometric iff |u| ∈ {0, 1}.

use wcomp::classifier::{classify_multiplication, DEFAULT_TOLERANCE};
use wcomp::measure_space::WeightFunction;

fn main() -> wcomp::Result<()> {
    let weights = [
        vec![1.0, 1.0, 1.0],
        vec![0.0, 1.0, 1.0],
        vec![0.5, 1.0, 2.0],
        vec![1.0 + 1e-7],
    ];
    for values in weights {
        let u = WeightFunction::new(values.clone())?;
        let verdicts: Vec<String> = (1..=5)
            .map(|m| {
                let v = classify_multiplication(&u, m, DEFAULT_TOLERANCE).unwrap();
                format!("m={m}:{}{}", u8::from(v.is_m_isometry), u8::from(v.is_quasi_m_isometry))
            })
            .collect();
        println!("u = {values:?}  {}", verdicts.join(" "));
    }
    Ok(())
}
