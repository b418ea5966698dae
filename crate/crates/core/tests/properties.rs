mod common;

use factor_pricing::bench::{gen_lcmnl_instance, gen_linear_instance, random_m_matrix};
use factor_pricing::clustering::{
    clustered_factor_profit, fpf_cluster, kmeans_cluster, kmeans_trace, ClusterPartition, KMeansOptions,
};
use factor_pricing::guarantees::{check_a1, check_p1_p2, finite_set_beta};
use factor_pricing::market::io::{parse_market, to_json, MarketFile};
use factor_pricing::market::{aggregate_profit, lcp_adjust, DemandModel, LinearModel, MarketInstance};
use factor_pricing::pricing::{
    factor_optimize, personalized_optimize, price_ratio, robust_factor, FactorKind, PersonalizedSolution, QBracket,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize, m: usize, mnl: bool) -> MarketInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if mnl {
        gen_lcmnl_instance(n, m, &mut rng).unwrap()
    } else {
        gen_linear_instance(n, m, &mut rng).unwrap()
    }
}

fn random_factor(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..n).map(|_| rng.random_range(-1.0..1.0f64).exp()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factor_profit_never_exceeds_personalized(seed: u64, n in 1usize..6, m in 1usize..5, mnl: bool) {
        let market = instance(seed, n, m, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let f = random_factor(seed, n);
        let r = factor_optimize(&market, &f, QBracket::Personalized(&ps)).unwrap();
        prop_assert!(r.profit <= ps.aggregate * (1.0 + 1e-9));
        prop_assert!(r.profit > 0.0);
    }

    #[test]
    fn factor_scale_does_not_matter(seed: u64, n in 1usize..5, m in 1usize..4, mnl: bool, scale in 0.01f64..100.0) {
        let market = instance(seed, n, m, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let f = random_factor(seed, n);
        let g: Vec<f64> = f.iter().map(|x| x * scale).collect();
        let a = factor_optimize(&market, &f, QBracket::Personalized(&ps)).unwrap();
        let b = factor_optimize(&market, &g, QBracket::Personalized(&ps)).unwrap();
        prop_assert!((a.profit - b.profit).abs() <= 1e-8 * a.profit);
        prop_assert!((price_ratio(&ps, &f) - price_ratio(&ps, &g)).abs() <= 1e-9 * price_ratio(&ps, &f));
    }

    #[test]
    fn segment_order_does_not_matter(seed: u64, n in 1usize..5, m in 2usize..6, mnl: bool) {
        let market = instance(seed, n, m, mnl);
        let order: Vec<usize> = (0..m).rev().collect();
        let swapped = market.permuted(&order).unwrap();
        let p = random_factor(seed, n);
        let x = aggregate_profit(&market, &p).unwrap();
        let y = aggregate_profit(&swapped, &p).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        let px = personalized_optimize(&market).unwrap();
        let py = personalized_optimize(&swapped).unwrap();
        prop_assert!((px.aggregate - py.aggregate).abs() <= 1e-12 * px.aggregate);
    }

    #[test]
    fn personalized_prices_are_local_optima(seed: u64, n in 1usize..5, mnl: bool, step in 1e-4f64..1e-2) {
        let market = instance(seed, n, 1, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let model = &market.segments()[0].model;
        let best = model.profit(&ps.prices[0]).unwrap();
        for i in 0..n {
            for sign in [-1.0, 1.0] {
                let mut p = ps.prices[0].clone();
                p[i] += sign * step;
                prop_assert!(model.profit(&p).unwrap() <= best + 1e-12);
            }
        }
    }

    #[test]
    fn lcp_solution_satisfies_complementarity(seed: u64, n in 1usize..8, scale in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_m_matrix(n, scale, &mut rng);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let model = LinearModel::new(a.clone(), b.clone()).unwrap();
        let r = lcp_adjust(&model, &p).unwrap();
        let q: Vec<f64> = (0..n).map(|i| a[i] - (0..n).map(|k| b[(i, k)] * p[k]).sum::<f64>()).collect();
        for i in 0..n {
            let w = q[i] + (0..n).map(|k| b[(i, k)] * r.y[k]).sum::<f64>();
            prop_assert!(r.y[i] >= 0.0);
            prop_assert!(r.adjusted_demand[i] >= 0.0);
            prop_assert!((w - r.adjusted_demand[i]).abs() <= 1e-9);
            prop_assert!((r.y[i] * w).abs() <= 1e-9);
        }
        let (y, _) = common::lcp_oracle(&b.rows(), &q);
        for i in 0..n {
            prop_assert!((y[i] - r.y[i]).abs() <= 1e-9);
        }
        // Restoring demand never lowers profit below the raw formula.
        let raw: f64 = q.iter().zip(&p).map(|(d, p)| d * p).sum();
        prop_assert!(r.adjusted_profit >= raw - 1e-12);
    }

    #[test]
    fn mnl_demand_is_a_substitutes_system(seed: u64, n in 1usize..7) {
        let market = instance(seed, n, 1, true);
        let model = &market.segments()[0].model;
        let p = random_factor(seed, n);
        let d = model.demand(&p).unwrap();
        prop_assert!(d.iter().all(|&x| x > 0.0));
        prop_assert!(d.iter().sum::<f64>() < 1.0);
        let j = model.jacobian(&p).unwrap();
        for i in 0..n {
            prop_assert!(j[(i, i)] < 0.0);
            for k in 0..n {
                if k != i {
                    prop_assert!(j[(i, k)] >= 0.0);
                }
            }
        }
        prop_assert!(check_p1_p2(model, &vec![1.0; n], &[p]).unwrap().p2);
    }

    #[test]
    fn generated_m_matrices_satisfy_p1_p2_for_uniform(seed: u64, n in 1usize..10, m in 1usize..4) {
        let market = instance(seed, n, m, false);
        for s in market.segments() {
            let r = check_p1_p2(&s.model, &vec![1.0; n], &[]).unwrap();
            prop_assert!(r.p1 && r.p2);
        }
    }

    #[test]
    fn robust_factor_beats_random_factors(seed: u64, n in 1usize..6, m in 1usize..6, mnl: bool) {
        let market = instance(seed, n, m, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let robust = robust_factor(&ps);
        for k in 0..20 {
            let f = random_factor(seed.wrapping_add(k), n);
            prop_assert!(price_ratio(&ps, &f) >= robust.rho_star * (1.0 - 1e-12));
        }
    }

    #[test]
    fn finite_set_beta_is_at_most_the_log_bound(mut q in prop::collection::vec(0.01f64..100.0, 1..12)) {
        q.sort_by(|a, b| b.total_cmp(a));
        q.dedup();
        let beta = finite_set_beta(&q).unwrap();
        let ratio = q[0] / q[q.len() - 1];
        prop_assert!(beta >= 1.0 - 1e-12);
        prop_assert!(beta <= 1.0 + ratio.ln() + 1e-12);
    }

    #[test]
    fn g_steps_down_in_q(seed: u64, n in 1usize..5, m in 1usize..5, mnl: bool) {
        let market = instance(seed, n, m, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let f = FactorKind::Economic.build(&ps).unwrap();
        let prof = check_a1(&market, &ps, &f, 200).unwrap();
        for w in prof.grid.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for w in prof.g_values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn fpf_is_within_twice_the_optimal_diameter(seed: u64, m in 1usize..8, k in 1usize..4, n in 1usize..4) {
        let k = k.min(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prices: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0f64).exp()).collect()).collect();
        let ps = PersonalizedSolution::new(prices.clone(), vec![1.0; m], vec![1.0 / m as f64; m]).unwrap();
        let part = fpf_cluster(&ps, k).unwrap();
        prop_assert_eq!(part.k(), k);
        let opt = common::brute_force_min_diameter(&prices, k);
        prop_assert!(part.worst_rho.ln() <= 2.0 * opt + 1e-12);
    }

    #[test]
    fn kmeans_inertia_never_increases(seed: u64, m in 2usize..10, k in 1usize..4) {
        let k = k.min(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prices: Vec<Vec<f64>> = (0..m).map(|_| (0..3).map(|_| rng.random_range(0.1..5.0)).collect()).collect();
        let ps = PersonalizedSolution::new(prices, vec![1.0; m], vec![1.0 / m as f64; m]).unwrap();
        let trace = kmeans_trace(&ps, k, &KMeansOptions { seed, ..KMeansOptions::default() }).unwrap();
        for w in trace.inertia.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        prop_assert_eq!(trace.partition.k(), k);
    }

    #[test]
    fn one_cluster_per_segment_recovers_personalized(seed: u64, n in 1usize..4, m in 1usize..5, mnl: bool) {
        let market = instance(seed, n, m, mnl);
        let ps = personalized_optimize(&market).unwrap();
        let singletons = ClusterPartition::from_assignment(&ps, (0..m).collect()).unwrap();
        let all = clustered_factor_profit(&market, &ps, &singletons, FactorKind::Economic).unwrap();
        prop_assert!((all.profit - ps.aggregate).abs() <= 1e-7 * ps.aggregate);
        let one = ClusterPartition::from_assignment(&ps, vec![0; m]).unwrap();
        let whole = clustered_factor_profit(&market, &ps, &one, FactorKind::Economic).unwrap();
        let plain = factor_optimize(&market, &FactorKind::Economic.build(&ps).unwrap(), QBracket::Personalized(&ps)).unwrap();
        prop_assert!((whole.profit - plain.profit).abs() <= 1e-9 * plain.profit);
        let km = kmeans_cluster(&ps, m.min(2), 50, seed).unwrap();
        prop_assert!(clustered_factor_profit(&market, &ps, &km, FactorKind::Economic).unwrap().profit <= ps.aggregate * (1.0 + 1e-9));
    }

    #[test]
    fn instance_files_round_trip(seed: u64, n in 1usize..5, m in 1usize..4, mnl: bool) {
        let file = MarketFile::from(instance(seed, n, m, mnl));
        let back = parse_market(&to_json(&file)).unwrap();
        prop_assert_eq!(to_json(&back), to_json(&file));
        let p = random_factor(seed, n);
        prop_assert_eq!(aggregate_profit(file.market(), &p).unwrap(), aggregate_profit(back.market(), &p).unwrap());
    }

    #[test]
    fn mnl_profit_matches_direct_formula(seed: u64, n in 1usize..6) {
        let market = instance(seed, n, 1, true);
        let DemandModel::Mnl(mnl) = &market.segments()[0].model else { unreachable!() };
        let p = random_factor(seed, n);
        let lib = market.segments()[0].model.profit(&p).unwrap();
        let direct = common::mnl_profit(mnl.a(), mnl.b(), &p);
        prop_assert!((lib - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-300);
    }
}
