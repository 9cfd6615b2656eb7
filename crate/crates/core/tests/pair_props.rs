use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankrange_core::linalg::inner;
use rankrange_core::pair::{
    imag_orthogonality_residual, real_orthogonality_residual, PairPath, PairSolution,
};
use rankrange_core::sampling::uniform_phases;
use rankrange_core::{
    ingest_spectrum, solve_barycentric, solve_pair, EigenSystem64, SharedVertexProblem,
    TriangleSpec,
};

/// Random five-label spectrum with a target inside two triangles that share
/// one label. Returns `None` when the sampled triangles barely overlap.
fn instance(rng: &mut ChaCha8Rng) -> Option<(EigenSystem64, SharedVertexProblem<f64>)> {
    let es = ingest_spectrum(&uniform_phases(rng, 5)).unwrap();
    let mut labels = [1usize, 2, 3, 4, 5];
    for i in (1..5).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let [s, t1, t2, r1, r2] = labels.map(|j| j as i64);
    let first = TriangleSpec::new(s, t1, t2, 5).unwrap();
    let second = TriangleSpec::new(s, r1, r2, 5).unwrap();
    let values = es.eigenvalues();
    for _ in 0..50 {
        let mut w: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|p| *p /= sum);
        let lambda: Complex64 = [s, t1, t2]
            .iter()
            .zip(w)
            .map(|(&j, p)| values[j as usize - 1] * p)
            .sum();
        let (Ok(a), Ok(b)) = (
            solve_barycentric(&es, &first, lambda),
            solve_barycentric(&es, &second, lambda),
        ) else {
            continue;
        };
        let p1 = a.weight_of(s as usize).unwrap();
        let q1 = b.weight_of(s as usize).unwrap();
        let rest = |w: &rankrange_core::BarycentricWeights64| {
            w.entries()
                .filter(|&(j, _)| j != s as usize)
                .collect::<Vec<_>>()
        };
        let problem = SharedVertexProblem::new(s as usize, p1, q1, rest(&a), rest(&b)).unwrap();
        let problem = if p1 > 0.5 { problem.swapped() } else { problem };
        if problem.p1 > 0.5 {
            continue;
        }
        return Some((es, problem));
    }
    None
}

fn gram_defect(s: &PairSolution<f64>, n: usize) -> f64 {
    let u = s.first.dense(n);
    let v = s.second.dense(n);
    let mut worst: f64 = 0.0;
    worst = worst
        .max((inner(&u, &u).re - 1.0).abs())
        .max(inner(&u, &u).im.abs());
    worst = worst
        .max((inner(&v, &v).re - 1.0).abs())
        .max(inner(&v, &v).im.abs());
    worst.max(inner(&u, &v).norm())
}

#[test]
fn random_shared_vertex_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut solved, mut closed) = (0, 0);
    while solved < 10_000 {
        let Some((es, problem)) = instance(&mut rng) else {
            continue;
        };
        let s = solve_pair(&problem, &es).unwrap();
        assert!(!s.swapped);
        assert!(gram_defect(&s, 5) <= 1e-10, "{problem:?}");
        for v in [&s.first, &s.second] {
            assert!(v.norm_residual <= 1e-10);
            assert!(
                v.compression_residual <= 1e-10,
                "{problem:?}: {}",
                v.compression_residual
            );
        }
        if let Some(p) = s.parameters {
            assert!(
                real_orthogonality_residual(problem.p1, problem.q1, p.alpha, p.beta, p.x, p.y)
                    <= 1e-10
            );
            assert!(
                imag_orthogonality_residual(problem.p1, problem.q1, p.alpha, p.beta, p.x, p.y)
                    <= 1e-10
            );
            assert!((p.x * p.x + p.a * p.x + p.b).abs() <= 1e-10);
        }
        if s.path == PairPath::ClosedForm {
            assert!(s.parameters.unwrap().b.abs() <= 1e-12);
            closed += 1;
        }
        solved += 1;
    }
    assert!(closed > 9_000);
}

/// The pair is orthonormal with the right diagonal, yet the off-diagonal of
/// the compression is `e^{−iα}·cosτ·(λ − λ_s)`, nonzero away from the shared
/// eigenvalue. This is what the refinement step in assembly removes.
#[test]
fn closed_form_pair_leaves_an_off_diagonal_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut seen = 0;
    while seen < 200 {
        let Some((es, problem)) = instance(&mut rng) else {
            continue;
        };
        let s = solve_pair(&problem, &es).unwrap();
        if s.path != PairPath::ClosedForm {
            continue;
        }
        let p = s.parameters.unwrap();
        let u = s.first.dense(5);
        let v = s.second.dense(5);
        let values = es.eigenvalues();
        let lambda: Complex64 = u.iter().zip(&values).map(|(z, l)| l * z.norm_sqr()).sum();
        let sigma_v: Vec<Complex64> = v.iter().zip(&values).map(|(z, l)| z * l).collect();
        let off = inner(&u, &sigma_v) - lambda * inner(&u, &v);
        let predicted =
            Complex64::from_polar(p.tau.cos(), -p.alpha) * (lambda - values[problem.shared - 1]);
        assert!((off - predicted).norm() < 1e-10, "{off} vs {predicted}");
        seen += 1;
    }
}
