use nalgebra::DVector;
use proptest::prelude::*;

use wcomp::classifier::{classify, defect_sums, defect_sums_exact, DEFAULT_TOLERANCE};
use wcomp::cli::{cmd_classify, cmd_jseq, cmd_oracle, RunReport};
use wcomp::exact::rational;
use wcomp::interval_examples::{change_of_variables_residual, example_c_defects};
use wcomp::matrix_oracle::{adjoint_residual, build_matrix, defect_operator, off_diagonal_max, power_gram};
use wcomp::measure_space::{
    backward_invariant_sets, iterate_map, DiscreteMeasureSpace, PointSet, Transformation, WeightFunction,
    DEFAULT_SET_CAP,
};
use wcomp::operator_calculus::{conditional_expectation, j_direct, j_recursive, norm_identity_residual, radon_nikodym};

#[derive(Debug, Clone)]
struct System {
    masses: Vec<f64>,
    map: Vec<usize>,
    u: Vec<f64>,
}

impl System {
    fn parts(&self) -> (DiscreteMeasureSpace, Transformation, WeightFunction) {
        (
            DiscreteMeasureSpace::new(self.masses.clone()).unwrap(),
            Transformation::new(self.map.clone()).unwrap(),
            WeightFunction::new(self.u.clone()).unwrap(),
        )
    }

    fn document(&self) -> String {
        serde_json::json!({ "masses": self.masses, "phi": self.map, "u": self.u }).to_string()
    }
}

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![
        2 => 0.0..=2.0f64,
        1 => prop::sample::select(vec![0.0, 1.0]),
    ]
}

fn system() -> impl Strategy<Value = System> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1..=10.0f64, n),
            prop::collection::vec(0..n, n),
            prop::collection::vec(weight(), n),
        )
            .prop_map(|(masses, map, u)| System { masses, map, u })
    })
}

fn map() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=8).prop_flat_map(|n| prop::collection::vec(0..n, n))
}

fn with_vector(s: System) -> impl Strategy<Value = (System, Vec<f64>)> {
    let n = s.masses.len();
    (Just(s), prop::collection::vec(-1.0..=1.0f64, n))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fibers_partition_points(map in map()) {
        let phi = Transformation::new(map.clone()).unwrap();
        let mut seen = vec![0usize; map.len()];
        for (k, fiber) in phi.fibers().iter().enumerate() {
            for &j in fiber {
                prop_assert_eq!(map[j], k);
                seen[j] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn iterates_compose(map in map(), a in 0usize..=4, b in 0usize..=4) {
        let phi = Transformation::new(map).unwrap();
        let joined = iterate_map(&phi, a + b);
        let composed = iterate_map(&phi, a).compose(&iterate_map(&phi, b));
        prop_assert_eq!(joined.map(), composed.map());
    }

    #[test]
    fn returned_sets_are_backward_invariant(map in map()) {
        let phi = Transformation::new(map).unwrap();
        let family = backward_invariant_sets(&phi, DEFAULT_SET_CAP);
        prop_assert!(!family.sets.is_empty());
        for set in &family.sets {
            for k in set.indices() {
                prop_assert!(phi.fiber(k).iter().all(|&j| set.contains(j)));
            }
            // the preimage of a backward-invariant set is contained in it
            prop_assert!(phi.preimage(set).is_subset_of(set));
        }
    }

    #[test]
    fn direct_and_recursive_j_agree(s in system()) {
        let (space, phi, u) = s.parts();
        let rec = j_recursive(&space, &u, &phi, 6).unwrap();
        for n in 0..=6 {
            let direct = j_direct(&space, &u, &phi, n).unwrap();
            for (d, r) in direct.iter().zip(rec.level(n)) {
                prop_assert!(close(*d, *r, 1e-12), "n={} direct {} recursive {}", n, d, r);
            }
        }
    }

    #[test]
    fn density_conserves_mass(s in system()) {
        let (space, phi, _) = s.parts();
        let h = radon_nikodym(&space, &phi);
        let pushed: f64 = h.values.iter().zip(space.masses()).map(|(h, m)| h * m).sum();
        prop_assert!(close(pushed, space.total_mass(), 1e-12));
    }

    #[test]
    fn expectation_is_projection_preserving_integrals(
        (s, f) in system().prop_flat_map(with_vector),
        picks in prop::collection::vec(any::<bool>(), 8),
    ) {
        let (space, phi, _) = s.parts();
        let e = conditional_expectation(&space, &phi, &f).unwrap();
        let ee = conditional_expectation(&space, &phi, &e.pointwise).unwrap();
        for (a, b) in e.pointwise.iter().zip(&ee.pointwise) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let b = PointSet::from_membership(picks[..space.len()].to_vec());
        let pre = phi.preimage(&b);
        let integral = |g: &[f64]| -> f64 { pre.indices().iter().map(|&j| g[j] * space.mass(j)).sum() };
        prop_assert!((integral(&e.pointwise) - integral(&f)).abs() <= 1e-10);
    }

    #[test]
    fn norm_identity_holds((s, f) in system().prop_flat_map(with_vector), n in 0usize..=4) {
        let (space, phi, u) = s.parts();
        let residual = norm_identity_residual(&space, &u, &phi, n, &f).unwrap();
        prop_assert!(residual <= 1e-10, "residual {}", residual);
    }

    #[test]
    fn geometric_levels_collapse(p in 0i64..=12, q in 1i64..=6, m in 1usize..=6) {
        let c = rational(p, q);
        let levels: Vec<_> = (0..=m + 1).map(|k| vec![c.pow(k as i32)]).collect();
        let defects = defect_sums_exact(&levels, m).unwrap();
        let base = (&c - rational(1, 1)).pow(m as i32);
        prop_assert_eq!(&defects.g0[0], &base);
        prop_assert_eq!(&defects.g[0], &(&c * &base));
    }

    #[test]
    fn quasi_two_implies_higher_orders(s in system()) {
        let (space, phi, u) = s.parts();
        if classify(&space, &u, &phi, 2, DEFAULT_TOLERANCE).unwrap().is_quasi_m_isometry {
            for m in 3..=5 {
                prop_assert!(classify(&space, &u, &phi, m, DEFAULT_TOLERANCE).unwrap().is_quasi_m_isometry);
            }
        }
    }

    #[test]
    fn gram_powers_are_diagonal_j(s in system()) {
        let (space, phi, u) = s.parts();
        let a = build_matrix(&space, &u, &phi).unwrap();
        for k in 0..=4 {
            let gram = power_gram(&a, k);
            let direct = j_direct(&space, &u, &phi, k).unwrap();
            prop_assert!(off_diagonal_max(&gram) <= 1e-10);
            for (i, v) in direct.iter().enumerate() {
                prop_assert!(close(gram[(i, i)], *v, 1e-10));
            }
        }
    }

    #[test]
    fn defect_operators_match_classifier(s in system(), m in 1usize..=4) {
        let (space, phi, u) = s.parts();
        let a = build_matrix(&space, &u, &phi).unwrap();
        let ops = defect_operator(&a, m).unwrap();
        let j = j_recursive(&space, &u, &phi, m + 1).unwrap();
        let sums = defect_sums(&j, m).unwrap();
        let scale = j.levels().iter().flatten().fold(1.0_f64, |acc, v| acc.max(*v));
        prop_assert!(off_diagonal_max(&ops.b_m) <= 1e-10 * scale);
        prop_assert!(off_diagonal_max(&ops.quasi) <= 1e-10 * scale);
        for i in 0..space.len() {
            prop_assert!((ops.b_m[(i, i)] - sums.g0[i]).abs() <= 1e-10 * scale);
            prop_assert!((ops.quasi[(i, i)] - sums.g[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn adjoint_is_transpose((s, x) in system().prop_flat_map(with_vector), seed in 0u64..1000) {
        let (space, phi, u) = s.parts();
        let a = build_matrix(&space, &u, &phi).unwrap();
        let y = DVector::from_fn(space.len(), |i, _| (((seed + 7 * i as u64) % 17) as f64 / 17.0) - 0.5);
        prop_assert!(adjoint_residual(&a, &DVector::from_vec(x), &y) <= 1e-12);
    }

    #[test]
    fn reports_round_trip(s in system(), m in 1usize..=3) {
        let doc = s.document();
        for report in [
            cmd_classify(&doc, m, DEFAULT_TOLERANCE, false).unwrap(),
            cmd_classify(&doc, m, DEFAULT_TOLERANCE, true).unwrap(),
            cmd_oracle(&doc, m, DEFAULT_TOLERANCE, 64).unwrap(),
            cmd_jseq(&doc, 3).unwrap(),
        ] {
            let back = RunReport::from_json(&report.to_json()).unwrap();
            prop_assert_eq!(&back, &report);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn substitution_matches_density(
        a in 0.0..0.5f64,
        width in 0.05..0.5f64,
        coeffs in prop::collection::vec(-3.0..3.0f64, 4),
    ) {
        let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        prop_assert!(change_of_variables_residual(f, a, a + width).unwrap() <= 1e-8);
    }
}

#[test]
fn example_c_ratio_is_three_quarters() {
    for m in 1..=8 {
        let (g, _) = example_c_defects(m).unwrap();
        let (next, _) = example_c_defects(m + 1).unwrap();
        assert_eq!(next / g, rational(3, 4));
    }
}
