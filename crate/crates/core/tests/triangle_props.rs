use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankrange_core::sampling::uniform_phases;
use rankrange_core::{
    build_region, containment_check, ingest_spectrum, interior_point, reflect_labels,
    solve_barycentric, validate_triangle, weak_vertices, TriangleSpec,
};

fn sorted(mut g: [usize; 3]) -> [usize; 3] {
    g.sort_unstable();
    g
}

proptest! {
    #[test]
    fn reflection_keeps_gap_multiset(n in 3usize..40, pivot in 1usize..80, picks in prop::array::uniform3(0usize..1000)) {
        let labels = picks.map(|p| p % n + 1);
        prop_assume!(labels[0] != labels[1] && labels[1] != labels[2] && labels[0] != labels[2]);
        let t = TriangleSpec::new(labels[0] as i64, labels[1] as i64, labels[2] as i64, n).unwrap();
        let r = reflect_labels(n, pivot % n + 1);
        let image = t.map(|j| r.apply(j)).unwrap();
        prop_assert_eq!(sorted(t.gaps()), sorted(image.gaps()));
        // an involution
        prop_assert_eq!(image.map(|j| r.apply(j)).unwrap(), t);
    }
}

/// Every triangle whose gaps are at most `k` contains the region.
#[test]
fn gap_rule_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..30 {
        let n: usize = rng.random_range(4..=9);
        let k = rng.random_range(2..=n.div_ceil(2).max(2));
        let es = ingest_spectrum(&uniform_phases(&mut rng, n)).unwrap();
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    let t = TriangleSpec::new(a as i64, b as i64, c as i64, n).unwrap();
                    if validate_triangle(&t, k) {
                        assert!(
                            containment_check(&es, &t, k, 64),
                            "{t} fails for N = {n}, k = {k}"
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn weights_are_convex_deterministic_and_mostly_weak() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n: usize = rng.random_range(5..=12);
        let k = rng.random_range(2..=n / 2);
        let es = ingest_spectrum(&uniform_phases(&mut rng, n)).unwrap();
        let Some(lambda) = interior_point(&build_region(&es, k).unwrap(), 32) else {
            continue;
        };
        let a = rng.random_range(1..=n);
        let t = TriangleSpec::new(
            a as i64,
            (a + k) as i64,
            (a + 2 * k).min(a + n - 1) as i64,
            n,
        );
        let Ok(t) = t else { continue };
        if !validate_triangle(&t, k) {
            continue;
        }
        let w = solve_barycentric(&es, &t, lambda).unwrap();
        let again = solve_barycentric(&es, &t, lambda).unwrap();
        assert_eq!(w.weights.map(f64::to_bits), again.weights.map(f64::to_bits));
        assert!(w.weights.iter().all(|&p| (0.0..=1.0).contains(&p)));
        assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(w.residual < 1e-9);
        assert!(weak_vertices(&w).len() >= 2);
    }
}
