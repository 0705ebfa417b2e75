//! Seeded instance generators shared by the integration suites.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wcomp::measure_space::{DiscreteMeasureSpace, Transformation, WeightFunction};

pub use rand::SeedableRng;

pub struct Instance {
    pub space: DiscreteMeasureSpace,
    pub phi: Transformation,
    pub u: WeightFunction,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_map(rng: &mut ChaCha8Rng, n: usize) -> Transformation {
    let map = if rng.gen_bool(0.3) {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    } else {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    };
    Transformation::new(map).unwrap()
}

/// n ≤ 8, masses in [0.1, 10], u in [0, 2]. About a quarter of the draws
/// use "nice" masses {0.5, 1, 2} or u in {0, 1} so that the true classes
/// show up, not only the generic all-false verdict.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=8);
    let nice_masses = rng.gen_bool(0.25);
    let masses: Vec<f64> = (0..n)
        .map(|_| {
            if nice_masses {
                *[0.5, 1.0, 2.0].choose(rng).unwrap()
            } else {
                rng.gen_range(0.1..=10.0)
            }
        })
        .collect();
    let binary_u = rng.gen_bool(0.25);
    let u: Vec<f64> = (0..n)
        .map(|_| {
            if binary_u {
                f64::from(rng.gen_range(0..=1u8))
            } else {
                rng.gen_range(0.0..=2.0)
            }
        })
        .collect();
    Instance {
        space: DiscreteMeasureSpace::new(masses).unwrap(),
        phi: random_map(rng, n),
        u: WeightFunction::new(u).unwrap(),
    }
}

/// A normal instance: φ is a permutation and `J_1` is constant on each cycle.
///
/// For a permutation `J_1(φ(i)) = u(i)² m_i / m_{φ(i)}`, so choosing
/// `u(i) = √(c·m_{φ(i)}/m_i)` pins `J_1 = c` on the cycle through `i`.
/// `A` is then a direct sum of scaled cyclic permutations.
pub fn normal_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=8);
    let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=10.0)).collect();
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    let phi = Transformation::new(p.clone()).unwrap();

    let mut level = vec![f64::NAN; n];
    for start in 0..n {
        if !level[start].is_nan() {
            continue;
        }
        let c = match rng.gen_range(0..3) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.05..=3.0),
        };
        let mut i = start;
        loop {
            level[i] = c;
            i = p[i];
            if i == start {
                break;
            }
        }
    }
    let u: Vec<f64> = (0..n).map(|i| (level[i] * masses[p[i]] / masses[i]).sqrt()).collect();
    Instance {
        space: DiscreteMeasureSpace::new(masses).unwrap(),
        phi,
        u: WeightFunction::new(u).unwrap(),
    }
}
