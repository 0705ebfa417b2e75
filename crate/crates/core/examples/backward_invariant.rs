//! Backward-invariant sets of a few maps, and the lower bound `J_n ≥ δⁿ` on them.

use wcomp::measure_space::{
    backward_invariant_sets, DiscreteMeasureSpace, Transformation, WeightFunction, DEFAULT_SET_CAP,
};
use wcomp::operator_calculus::j_recursive;

fn main() -> wcomp::Result<()> {
    for map in [vec![1, 2, 0], vec![0, 0], vec![0, 1], vec![1, 1, 3, 2]] {
        let phi = Transformation::new(map.clone())?;
        let family = backward_invariant_sets(&phi, DEFAULT_SET_CAP);
        let sets: Vec<Vec<usize>> = family.sets.iter().map(|s| s.indices()).collect();
        println!("phi = {map:?}: {sets:?}");
    }

    let space = DiscreteMeasureSpace::new(vec![1.0, 2.0, 0.5, 1.5])?;
    let phi = Transformation::new(vec![1, 1, 3, 2])?;
    let u = WeightFunction::new(vec![0.8, 0.6, 1.2, 0.9])?;
    let j = j_recursive(&space, &u, &phi, 6)?;
    for set in backward_invariant_sets(&phi, DEFAULT_SET_CAP).sets {
        let idx = set.indices();
        let delta = idx.iter().map(|&i| j.level(1)[i]).fold(f64::INFINITY, f64::min);
        if delta <= 0.0 {
            continue;
        }
        let margin = (1..=6)
            .flat_map(|n| idx.iter().map(move |&i| (n, i)))
            .map(|(n, i)| j.level(n)[i] - delta.powi(n as i32))
            .fold(f64::INFINITY, f64::min);
        println!("S = {idx:?}: delta = {delta:.4}, min (J_n - delta^n) over n <= 6 = {margin:.4e}");
    }
    Ok(())
}
