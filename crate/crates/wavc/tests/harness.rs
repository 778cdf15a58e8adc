use wavc::config::{CodeConfig, ErrorCriterion, ExperimentConfig, JammerConfig, LayoutKind};
use wavc::harness::{wilson_interval, Outcome, Simulation};
use wavc::{run_trials, Error};
use wavc_core::jammer::JammerStrategy;
use wavc_core::window::{verify_windows, RangeMode};
use wavc_core::{Distribution, Symbol};

fn small_guarded(w: f64, p: f64, data_bits: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::bitflip(w, p, 32, 32);
    cfg.code = Some(CodeConfig {
        layout: LayoutKind::Thm1,
        n: 96,
        data_bits: Some(data_bits),
        p_x: Some(vec![0.75, 0.25]),
        guard: Some(vec![0.8, 0.2]),
        key_len: Some(96),
        ..CodeConfig::default()
    });
    cfg
}

/// Plain 12-symbol code: short enough to enumerate every state sequence.
fn toy(p_s: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::bitflip(0.45, 0.25, 12, 6);
    cfg.code = Some(CodeConfig {
        layout: LayoutKind::Plain,
        n: 12,
        data_bits: Some(2),
        p_x: Some(vec![0.6, 0.4]),
        l_max: Some(1),
        ..CodeConfig::default()
    });
    cfg.jammer = Some(JammerConfig::Iid { p_s: Some(vec![1.0 - p_s, p_s]), margin: None });
    cfg.error_criterion = ErrorCriterion::Max;
    cfg
}

#[test]
fn wilson_reference_values() {
    let (lo, hi) = wilson_interval(0, 10);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.277_533).abs() < 1e-5);
    let (lo, hi) = wilson_interval(5, 10);
    assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    let (lo, hi) = wilson_interval(1000, 1000);
    assert!(hi == 1.0 && lo > 0.99);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut cfg = small_guarded(0.4, 0.1, 6);
    cfg.jammers = vec![JammerConfig::Iid { p_s: Some(vec![0.94, 0.06]), margin: None }, JammerConfig::Spoof { on_invalid: Default::default() }];
    cfg.trials = 300;
    cfg.seed = 5;
    cfg.record_trials = true;
    let run = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_trials(&cfg).unwrap());
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    assert_eq!(one.per_strategy[0].records.len(), 300);
}

#[test]
fn seed_changes_the_draws() {
    let mut cfg = small_guarded(0.4, 0.1, 6);
    cfg.jammer = Some(JammerConfig::Iid { p_s: Some(vec![0.94, 0.06]), margin: None });
    cfg.trials = 50;
    cfg.record_trials = true;
    let a = run_trials(&cfg).unwrap();
    cfg.seed = 1;
    let b = run_trials(&cfg).unwrap();
    assert_ne!(a.per_strategy[0].records, b.per_strategy[0].records);
}

#[test]
fn zero_noise_gives_zero_error() {
    for layout in [LayoutKind::Thm1, LayoutKind::Plain] {
        let mut cfg = small_guarded(0.4, 0.0, 6);
        cfg.code.as_mut().unwrap().layout = layout;
        cfg.jammers = vec![JammerConfig::Iid { p_s: None, margin: None }, JammerConfig::Spoof { on_invalid: Default::default() }];
        cfg.trials = 200;
        cfg.error_criterion = ErrorCriterion::Max;
        let r = run_trials(&cfg).unwrap();
        for s in &r.per_strategy {
            assert_eq!(s.outcomes.correct, 200, "{layout:?} {}", s.jammer);
            assert_eq!(s.err_avg, 0.0);
            assert_eq!(s.err_max_est, Some(0.0));
            assert_eq!(s.ci_lo, 0.0);
        }
        assert_eq!(r.max_over_strategies.unwrap().err, 0.0);
    }
}

/// Exact average error of the toy code: every state sequence weighted by its i.i.d.
/// probability conditioned on passing every window, decoded once per message.
fn exact_error(sim: &Simulation, p_s: f64) -> f64 {
    let n = sim.code.total_len();
    let (messages, set) = sim.message_set();
    assert!(set.exhaustive);
    let mut total_weight = 0.0;
    let mut err = 0.0;
    for mask in 0u32..1 << n {
        let s: Vec<Symbol> = (0..n).map(|k| ((mask >> k) & 1) as Symbol).collect();
        if !verify_windows(&s, sim.spec.w_s, &sim.spec.lambda, RangeMode::Inclusive).unwrap().valid {
            continue;
        }
        let ones = mask.count_ones() as i32;
        let weight = p_s.powi(ones) * (1.0 - p_s).powi(n as i32 - ones);
        total_weight += weight;
        for m in &messages {
            let x = sim.code.encode(m, 0, 0).unwrap();
            let y: Vec<Symbol> = x.iter().zip(&s).map(|(a, b)| a ^ b).collect();
            if sim.code.decode(&y).unwrap().message.as_deref() != Some(&m[..]) {
                err += weight / messages.len() as f64;
            }
        }
    }
    err / total_weight
}

#[test]
fn monte_carlo_matches_exact_enumeration() {
    for (p_s, seed) in [(0.08, 1), (0.15, 2)] {
        let mut cfg = toy(p_s);
        cfg.trials = 4000;
        cfg.seed = seed;
        let sim = Simulation::from_config(&cfg).unwrap();
        let exact = exact_error(&sim, p_s);
        let r = run_trials(&cfg).unwrap();
        let s = &r.per_strategy[0];
        assert!(exact > 0.01, "toy instance should be noisy: {exact}");
        assert!(s.ci_lo <= exact && exact <= s.ci_hi, "p_s={p_s}: exact {exact}, estimate {} [{}, {}]", s.err_avg, s.ci_lo, s.ci_hi);
    }
}

#[test]
fn outcomes_partition_trials_and_max_dominates_average() {
    for seed in 0..4 {
        let mut cfg = toy(0.12);
        cfg.trials = 400;
        cfg.seed = seed;
        let r = run_trials(&cfg).unwrap();
        let s = &r.per_strategy[0];
        assert_eq!(s.outcomes.total(), s.trials);
        assert_eq!(s.trials + s.generation_failures, 400);
        assert!((s.err_avg - (1.0 - s.outcomes.correct as f64 / s.trials as f64)).abs() < 1e-15);
        assert!(s.err_max_est.unwrap() >= s.err_avg);
        assert!(s.ci_lo <= s.err_avg && s.err_avg <= s.ci_hi);
    }
}

#[test]
fn large_message_sets_are_sampled() {
    let mut cfg = small_guarded(0.4, 0.0, 12);
    cfg.jammer = Some(JammerConfig::Iid { p_s: None, margin: None });
    cfg.trials = 20;
    cfg.error_criterion = ErrorCriterion::Max;
    let r = run_trials(&cfg).unwrap();
    let set = r.per_strategy[0].message_set.clone().unwrap();
    assert!(!set.exhaustive && set.size == 1024);
    assert!(set.label().contains("subset"));
    let sim = Simulation::from_config(&cfg).unwrap();
    assert_eq!(sim.message_set().0, Simulation::from_config(&cfg).unwrap().message_set().0);
}

#[test]
fn generation_failures_respect_the_budget() {
    let mut cfg = small_guarded(0.4, 0.05, 4);
    cfg.jammer = Some(JammerConfig::Iid { p_s: Some(vec![0.5, 0.5]), margin: None });
    cfg.trials = 10;
    cfg.rejection_cap = 2;
    cfg.failure_budget = 3;
    assert!(matches!(run_trials(&cfg), Err(Error::FailureBudget { failures: 10, budget: 3 })));
    cfg.failure_budget = usize::MAX;
    assert!(matches!(run_trials(&cfg), Err(Error::Runtime(wavc_core::Error::Generation { .. }))));
}

#[test]
fn generation_failures_are_counted() {
    // Weight-1/10 states against a 3/32 window cap: some draws exceed it.
    let mut cfg = small_guarded(0.4, 3.0 / 32.0, 4);
    cfg.jammer = Some(JammerConfig::Iid { p_s: Some(vec![0.95, 0.05]), margin: None });
    cfg.trials = 100;
    cfg.rejection_cap = 0;
    let s = run_trials(&cfg).unwrap().per_strategy.remove(0);
    assert!(s.generation_failures > 0 && s.trials > 0);
    assert_eq!(s.trials + s.generation_failures, 100);
}

#[test]
fn reported_invalid_spoofs_are_flagged() {
    // Codewords of weight about 1/4 against a 0.05 state cap.
    let mut cfg = small_guarded(0.4, 0.05, 4);
    cfg.jammer = Some(JammerConfig::Spoof { on_invalid: wavc::config::OnInvalid::Report });
    cfg.trials = 30;
    cfg.record_trials = true;
    let s = run_trials(&cfg).unwrap().per_strategy.remove(0);
    assert_eq!(s.invalid_states, 30);
    assert!(s.records.iter().all(|r| !r.jam_valid));
}

#[test]
fn records_describe_each_trial() {
    let mut cfg = toy(0.15);
    cfg.trials = 40;
    cfg.record_trials = true;
    let s = run_trials(&cfg).unwrap().per_strategy.remove(0);
    for (t, r) in s.records.iter().enumerate() {
        assert_eq!(r.trial, t);
        // Max criterion cycles through the four messages.
        assert_eq!(r.message, format!("{:x}", t % 4));
        assert_eq!(r.keys, (0, 0));
        assert!(r.list_size <= 1);
    }
    let errors = s.records.iter().filter(|r| r.outcome != Outcome::Correct).count();
    assert_eq!(errors, s.outcomes.errors());
}

#[test]
fn strategies_share_one_code() {
    let cfg = small_guarded(0.4, 0.1, 6);
    let sim = Simulation::from_config(&cfg).unwrap();
    let strategy = JammerStrategy::Iid { p_s: Distribution::bernoulli(0.0).unwrap() };
    let a = sim.run(&strategy, "a").unwrap();
    let b = sim.run(&strategy, "a").unwrap();
    assert_eq!(a, b);
    assert!(run_trials(&cfg).is_err(), "a run without jammers is a config error");
}
