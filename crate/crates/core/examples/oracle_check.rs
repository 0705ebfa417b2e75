//! Builds the dense matrix of W for random spaces and compares its
//! `(A*)^k A^k` and defect operators with the closed-form data.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcomp::classifier::{classify, DEFAULT_TOLERANCE};
use wcomp::matrix_oracle::{build_matrix, max_abs, oracle_verdict, power_gram};
use wcomp::measure_space::{DiscreteMeasureSpace, Transformation, WeightFunction};
use wcomp::operator_calculus::j_recursive;

fn main() -> wcomp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0_f64;
    let mut agree = 0;
    let trials = 50;
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let space = DiscreteMeasureSpace::new((0..n).map(|_| rng.gen_range(0.1..=10.0)).collect())?;
        let phi = Transformation::new((0..n).map(|_| rng.gen_range(0..n)).collect())?;
        let u = WeightFunction::new((0..n).map(|_| rng.gen_range(0.0..=2.0)).collect())?;

        let a = build_matrix(&space, &u, &phi)?;
        let j = j_recursive(&space, &u, &phi, 4)?;
        for k in 0..=4 {
            let diag = DMatrix::from_diagonal(&DVector::from_column_slice(j.level(k)));
            worst = worst.max(max_abs(&(power_gram(&a, k) - diag)));
        }
        let closed = classify(&space, &u, &phi, 3, DEFAULT_TOLERANCE)?;
        let oracle = oracle_verdict(&a, 3, DEFAULT_TOLERANCE)?;
        agree += usize::from(closed.classes() == oracle.classes());
    }
    println!("max |(A*)^k A^k - diag(J_k)| over {trials} spaces, k <= 4: {worst:e}");
    println!("verdict agreement at m = 3: {agree}/{trials}");
    Ok(())
}
