use atsp_core::oracle::{exact_atsp, exact_atspp};
use atsp_core::{gen_instance, GenModel, Instance};

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

fn all_orders(items: Vec<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items = items;
    permutations(&mut items, 0, &mut out);
    out
}

#[test]
fn tours_match_enumeration() {
    for seed in 0..20 {
        let inst = gen_instance(8, GenModel::EuclideanPerturbed, 100 + seed).unwrap();
        let tour = exact_atsp(&inst).unwrap();
        let best = all_orders((1..8).collect())
            .into_iter()
            .map(|p| {
                let order: Vec<usize> = std::iter::once(0).chain(p).collect();
                inst.order_cost(&order, true)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((tour.cost - best).abs() <= 1e-9 * best, "seed {seed}: {} vs {best}", tour.cost);
        assert_eq!(tour.order[0], 0);
        assert!((inst.order_cost(&tour.order, true) - tour.cost).abs() <= 1e-9);
    }
}

#[test]
fn paths_match_enumeration() {
    for seed in 0..10u64 {
        let n = 7;
        let inst = gen_instance(n, GenModel::UniformMetric, 200 + seed).unwrap();
        let (s, t) = ((seed % 7) as usize, ((seed + 2) % 7) as usize);
        let path = exact_atspp(&inst, s, t).unwrap();
        let interior: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
        let best = all_orders(interior)
            .into_iter()
            .map(|p| {
                let order: Vec<usize> = std::iter::once(s).chain(p).chain([t]).collect();
                inst.order_cost(&order, false)
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(path.cost, best);
        assert_eq!((path.order[0], path.order[n - 1]), (s, t));
    }
}

#[test]
fn non_metric_inputs_are_solved_exactly_too() {
    let inst = Instance::from_rows(
        "nm",
        &[
            vec![0.0, 1.0, 100.0, 1.0],
            vec![100.0, 0.0, 1.0, 100.0],
            vec![1.0, 100.0, 0.0, 100.0],
            vec![100.0, 1.0, 100.0, 0.0],
        ],
    )
    .unwrap();
    let tour = exact_atsp(&inst).unwrap();
    assert_eq!(tour.order, vec![0, 3, 1, 2]);
    assert_eq!(tour.cost, 4.0);
}
