use atsp_core::held_karp::solve_held_karp;
use atsp_core::maxent::{fit_gamma, sample_tree, symmetrize, tree_marginals, GammaVector};
use atsp_core::oracle::enumerate_cuts;
use atsp_core::{gen_instance, GenModel};

fn membership(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|v| mask & (1 << v) != 0).collect()
}

#[test]
fn symmetrized_point_lies_in_the_tree_polytope_slack() {
    for seed in 0..8 {
        let n = 8;
        let inst = gen_instance(n, GenModel::EuclideanPerturbed, seed).unwrap();
        let hk = solve_held_karp(&inst).unwrap();
        let z = symmetrize(&hk.x, &inst);
        assert!((z.total() - (n as f64 - 1.0)).abs() <= 1e-6);
        let floor = 2.0 * (1.0 - 1.0 / n as f64) - 1e-6;
        for mask in enumerate_cuts(n).unwrap() {
            assert!(z.cut_value(&membership(mask, n)) >= floor);
        }
        assert!(z.cost() < hk.x.cost(&inst) + 1e-9);
    }
}

#[test]
fn fit_on_held_karp_points() {
    for seed in 0..6 {
        let n = 7;
        let inst = gen_instance(n, GenModel::UniformMetric, 40 + seed).unwrap();
        let hk = solve_held_karp(&inst).unwrap();
        let z = symmetrize(&hk.x, &inst);
        let fit = fit_gamma(&z, 0.2).unwrap();
        // Re-evaluate with a fresh determinant computation.
        let q = tree_marginals(&fit.gamma).unwrap();
        for (qe, ze) in q.iter().zip(&z.z) {
            assert!(*qe <= 1.2 * ze + 1e-12, "seed {seed}: {qe} > 1.2 * {ze}");
        }
        assert!((q.iter().sum::<f64>() - (n as f64 - 1.0)).abs() <= 1e-8);
        // Deterministic.
        assert_eq!(fit_gamma(&z, 0.2).unwrap().gamma, fit.gamma);
    }
}

#[test]
fn empirical_edge_frequencies_track_marginals() {
    let n = 7;
    let inst = gen_instance(n, GenModel::EuclideanPerturbed, 3).unwrap();
    let hk = solve_held_karp(&inst).unwrap();
    let z = symmetrize(&hk.x, &inst);
    let gamma = fit_gamma(&z, 0.2).unwrap().gamma;
    check_frequencies(&gamma, 4000);

    let k4: Vec<_> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
    check_frequencies(&GammaVector::new(4, k4, vec![0.0; 6]), 4000);
    check_frequencies(
        &GammaVector::from_lambdas(3, vec![(0, 1), (1, 2), (0, 2)], &[1.0, 1.0, 2.0]),
        4000,
    );
}

fn check_frequencies(gamma: &GammaVector, samples: u64) {
    let q = tree_marginals(gamma).unwrap();
    let mut hits = vec![0u64; gamma.edges.len()];
    for seed in 0..samples {
        let t = sample_tree(gamma, seed).unwrap();
        for e in &t.edges {
            let i = gamma.edges.iter().position(|x| x == e).unwrap();
            hits[i] += 1;
        }
    }
    for (i, &h) in hits.iter().enumerate() {
        let freq = h as f64 / samples as f64;
        let sd = (q[i] * (1.0 - q[i]) / samples as f64).sqrt();
        assert!(
            (freq - q[i]).abs() <= 4.0 * sd + 1e-12,
            "edge {:?}: freq {freq} vs q {}",
            gamma.edges[i],
            q[i]
        );
    }
}
