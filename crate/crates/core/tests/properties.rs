use mmo_core::communication::{aggregate, scheme_weights};
use mmo_core::*;
use proptest::prelude::*;

fn solution(position: Vec<f64>, fitness: f64) -> EvaluatedSolution {
    EvaluatedSolution::new(SolutionVector::new(position).unwrap(), fitness).unwrap()
}

fn team(max_k: usize, dim: usize) -> impl Strategy<Value = Vec<EvaluatedSolution>> {
    prop::collection::vec(
        (prop::collection::vec(-100.0..100.0f64, dim), 0.0..1e3f64),
        1..=max_k,
    )
    .prop_map(|members| members.into_iter().map(|(p, f)| solution(p, f)).collect())
}

fn any_scheme() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(SchemeId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weights_form_a_convex_combination(bests in team(7, 3), scheme in any_scheme()) {
        let snapshot = TeamSnapshot::new(bests).unwrap();
        let w = scheme_weights(scheme, &snapshot);
        prop_assert_eq!(w.len(), snapshot.len());
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_lies_in_the_bounding_box_of_the_team(bests in team(7, 4), scheme in any_scheme()) {
        let snapshot = TeamSnapshot::new(bests.clone()).unwrap();
        let x = aggregate(scheme, &snapshot);
        for d in 0..4 {
            let lo = bests.iter().map(|b| b.position[d]).fold(f64::INFINITY, f64::min);
            let hi = bests.iter().map(|b| b.position[d]).fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
            prop_assert!(x[d] >= lo - slack && x[d] <= hi + slack);
        }
    }

    #[test]
    fn best_rank_returns_the_argmin_exactly(bests in team(7, 3)) {
        let snapshot = TeamSnapshot::new(bests.clone()).unwrap();
        let min = bests.iter().map(|b| b.fitness).fold(f64::INFINITY, f64::min);
        let first = bests.iter().find(|b| b.fitness == min).unwrap();
        let chosen = aggregate(SchemeId::BestRank, &snapshot);
        prop_assert_eq!(chosen.as_slice(), first.position.as_slice());
    }

    #[test]
    fn aggregation_ignores_member_order(
        bests in team(7, 3),
        scheme in any_scheme(),
        perm_seed in any::<u64>(),
    ) {
        // Distinct fitness values make the ranking itself order-independent.
        let bests: Vec<EvaluatedSolution> = bests
            .into_iter()
            .enumerate()
            .map(|(i, b)| solution(b.position.to_vec(), b.fitness + i as f64 * 1e-3))
            .collect();
        let mut shuffled = bests.clone();
        RngStream::new(perm_seed).shuffle(&mut shuffled);
        let a = aggregate(scheme, &TeamSnapshot::new(bests).unwrap());
        let b = aggregate(scheme, &TeamSnapshot::new(shuffled).unwrap());
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn single_member_team_collapses_to_that_member(bests in team(1, 5), scheme in any_scheme()) {
        let snapshot = TeamSnapshot::new(bests.clone()).unwrap();
        prop_assert_eq!(scheme_weights(scheme, &snapshot), vec![1.0]);
        let collapsed = aggregate(scheme, &snapshot);
        prop_assert_eq!(collapsed.as_slice(), bests[0].position.as_slice());
    }
}

fn random_config(rng: &mut RngStream) -> (MmoConfig, BenchmarkKind) {
    let mut roster: Vec<OptimizerKind> = OptimizerKind::ALL
        .into_iter()
        .filter(|_| rng.bernoulli(0.5))
        .collect();
    if roster.is_empty() {
        roster.push(OptimizerKind::ALL[rng.index(7)]);
    }
    let config = MmoConfig {
        roster,
        agents: 4 + rng.index(12),
        scheme: SchemeId::ALL[rng.index(SchemeId::ALL.len())],
        frequency: 1 + rng.index(8) as u64,
        generations: 20 + rng.index(20) as u64,
        seed: rng.index(1 << 30) as u64,
        ..MmoConfig::default()
    };
    (config, BenchmarkKind::ALL[rng.index(3)])
}

#[test]
fn archive_never_worsens_across_random_configs() {
    let mut rng = RngStream::new(2024);
    for case in 0..100 {
        let (config, kind) = random_config(&mut rng);
        let objective = BenchmarkSpec::new(kind, 2).unwrap();
        let mut ensemble = Ensemble::new(config.clone(), &objective).unwrap();
        let mut last = ensemble.archive().fitness;
        for _ in 0..config.generations {
            ensemble.step_generation().unwrap();
            let archive = ensemble.archive().fitness;
            assert!(archive <= last, "case {case}: archive rose from {last} to {archive}");
            for opt in ensemble.optimizers() {
                assert!(archive <= opt.global_best().fitness, "case {case}: archive above an optimizer");
            }
            last = archive;
        }
        let result = ensemble.finish();
        assert_eq!(result.trajectory.len() as u64, config.generations + 1);
        assert!(result.trajectory.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(result.best.fitness, objective.evaluate(&result.best.position));
    }
}

#[test]
fn single_roster_ensemble_matches_standalone_bitwise() {
    let objective = BenchmarkSpec::new(BenchmarkKind::Rosenbrock, 4).unwrap();
    for kind in OptimizerKind::ALL {
        let standalone = run_standalone(kind, 12, &OptimizerParams::default(), &objective, 99, 60).unwrap();
        for (scheme, frequency) in [(SchemeId::ExponentialWeighted, 1000), (SchemeId::BestRank, 1), (SchemeId::BestRank, 7)] {
            let config = MmoConfig {
                roster: vec![kind],
                agents: 12,
                scheme,
                frequency,
                generations: 60,
                seed: 99,
                ..MmoConfig::default()
            };
            let ensemble = run_mmo(&config, &objective).unwrap();
            assert_eq!(ensemble.best, standalone.best, "{kind} {scheme} f={frequency}");
            assert_eq!(ensemble.trajectory, standalone.trajectory, "{kind} {scheme} f={frequency}");
            assert_eq!(ensemble.evaluation_count, standalone.evaluation_count);
        }
    }
}

#[test]
fn sequential_and_parallel_runs_are_identical() {
    let objective = BenchmarkSpec::new(BenchmarkKind::Griewank, 6).unwrap();
    for scheme in SchemeId::ALL {
        let base = MmoConfig {
            agents: 15,
            scheme,
            frequency: 3,
            generations: 40,
            seed: 5,
            ..MmoConfig::default()
        };
        let seq = run_mmo(
            &MmoConfig {
                execution: Execution::Sequential,
                ..base.clone()
            },
            &objective,
        )
        .unwrap();
        let par = run_mmo(
            &MmoConfig {
                execution: Execution::Parallel,
                ..base
            },
            &objective,
        )
        .unwrap();
        assert_eq!(seq, par, "{scheme}");
    }
}

#[test]
fn evaluation_budget_is_accounted_exactly() {
    let objective = BenchmarkSpec::new(BenchmarkKind::Zakharov, 3).unwrap();
    let params = OptimizerParams::default();
    let n = 20u64;
    let g = 25u64;
    let abandoned = (params.cs.abandon_fraction * n as f64).floor() as u64;
    for scheme in SchemeId::ALL {
        for frequency in [1u64, 4, 100] {
            let config = MmoConfig {
                agents: n as usize,
                scheme,
                frequency,
                generations: g,
                params: params.clone(),
                ..MmoConfig::default()
            };
            let result = run_mmo(&config, &objective).unwrap();
            let per_generation = 7 * n + abandoned;
            let initial = 7 * n;
            let events = g / frequency;
            let expected = initial + g * per_generation + events * scheme.evaluations_per_event();
            assert_eq!(result.evaluation_count, expected, "{scheme} f={frequency}");
            assert_eq!(result.communication_events, events);
        }
    }
}

#[test]
fn best_scheme_broadcast_aligns_overwriting_optimizers() {
    let objective = BenchmarkSpec::new(BenchmarkKind::Rosenbrock, 5).unwrap();
    let config = MmoConfig {
        agents: 10,
        scheme: SchemeId::BestRank,
        frequency: 5,
        generations: 20,
        seed: 3,
        ..MmoConfig::default()
    };
    let mut ensemble = Ensemble::new(config, &objective).unwrap();
    for g in 1..=20u64 {
        ensemble.step_generation().unwrap();
        if g % 5 == 0 {
            let overwriting: Vec<&EvaluatedSolution> = ensemble
                .optimizers()
                .iter()
                .filter(|o| o.kind().overwrites_global_best())
                .map(|o| o.global_best())
                .collect();
            assert_eq!(overwriting.len(), 4);
            assert!(overwriting.iter().all(|b| *b == overwriting[0]));
        }
    }
}

#[test]
fn disabled_communication_matches_independent_runs() {
    let objective = BenchmarkSpec::new(BenchmarkKind::Griewank, 3).unwrap();
    let config = MmoConfig {
        agents: 8,
        frequency: 1000,
        generations: 30,
        seed: 11,
        ..MmoConfig::default()
    };
    let result = run_mmo(&config, &objective).unwrap();
    let independent: Vec<MmoResult> = OptimizerKind::ALL
        .into_iter()
        .map(|k| run_standalone(k, 8, &config.params, &objective, 11, 30).unwrap())
        .collect();
    for ((kind, fitness), solo) in result.per_optimizer_final.iter().zip(&independent) {
        assert_eq!(*fitness, solo.best.fitness, "{kind}");
    }
    let best = independent.iter().map(|r| r.best.fitness).fold(f64::INFINITY, f64::min);
    assert_eq!(result.best.fitness, best);
    assert_eq!(result.communication_events, 0);
}
