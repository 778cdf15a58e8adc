//! Quick invariant checks run by `wavc selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wavc_core::capacity::{bitflip_list_capacity, list_capacity, CapacityOptions};
use wavc_core::codec::{hash_message, BinaryField, HashParams};
use wavc_core::symmetrize::{bitflip_symmetrizable, ecn_symmetrizable, effective_bitflip_cap, gamma_prime};
use wavc_core::window::{verify_windows, RangeMode};
use wavc_core::{Channel, ConstraintSet, Distribution, Symbol};

use crate::config::{CodeConfig, ExperimentConfig, JammerConfig, LayoutKind};
use crate::harness::run_trials;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<String, String>;

const CHECKS: [(&str, Check); 6] = [
    ("bitflip_capacity_closed_form", capacity_closed_form),
    ("bitflip_symmetrizability", symmetrizability),
    ("window_verifier_brute_force", windows_brute_force),
    ("enlarged_input_set", enlarged_set),
    ("hash_linear_in_first_key", hash_linearity),
    ("noiseless_simulation", noiseless_simulation),
];

pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            log::info!("selftest {name}: {}", if passed { "pass" } else { "fail" });
            CheckResult { name, passed, detail }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn capacity_closed_form() -> Result<String, String> {
    let opts = CapacityOptions::default();
    let mut worst: f64 = 0.0;
    for w in [0.1, 0.2, 0.3] {
        for p in [0.05, 0.15, 0.25] {
            let gamma = ConstraintSet::weight_cap(w).map_err(|e| e.to_string())?;
            let lambda = ConstraintSet::weight_cap(p).map_err(|e| e.to_string())?;
            let r = list_capacity(&Channel::xor(), &gamma, &lambda, &opts).map_err(|e| e.to_string())?;
            let exact = bitflip_list_capacity(w, p).map_err(|e| e.to_string())?;
            worst = worst.max((r.value - exact).abs());
        }
    }
    ensure(worst <= 1e-3, || format!("deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn symmetrizability() -> Result<String, String> {
    let mut checked = 0;
    for i in 1..10 {
        for j in 1..10 {
            let (w, p) = (0.05 * i as f64, 0.05 * j as f64);
            if (w - p).abs() < 0.02 {
                continue;
            }
            let lambda = ConstraintSet::weight_cap(p).map_err(|e| e.to_string())?;
            let px = Distribution::bernoulli(w).map_err(|e| e.to_string())?;
            let lp = ecn_symmetrizable(&px, &Channel::xor(), &lambda).map_err(|e| e.to_string())?;
            let cf = bitflip_symmetrizable(w, p).map_err(|e| e.to_string())?;
            ensure(lp.symmetrizable == cf, || format!("disagreement at w={w}, p={p}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} grid points agree"))
}

fn windows_brute_force() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cs = ConstraintSet::weight_cap(0.3).map_err(|e| e.to_string())?;
    for _ in 0..300 {
        let n = rng.gen_range(1..=48);
        let seq: Vec<Symbol> = (0..n).map(|_| Symbol::from(rng.gen_bool(0.3))).collect();
        let w = rng.gen_range(1..=n);
        let report = verify_windows(&seq, w, &cs, RangeMode::Inclusive).map_err(|e| e.to_string())?;
        let brute = (0..=n - w).all(|i| {
            let ones = seq[i..i + w].iter().filter(|&&s| s == 1).count();
            ones as f64 <= 0.3 * w as f64 + 1e-9
        });
        ensure(report.valid == brute, || format!("mismatch at n={n}, w={w}"))?;
    }
    Ok("300 sequences agree".into())
}

fn enlarged_set() -> Result<String, String> {
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for w in [0.1, 0.2, 0.3] {
            let g = ConstraintSet::weight_cap(w).map_err(|e| e.to_string())?;
            let cap = effective_bitflip_cap(&gamma_prime(&g, alpha).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let want = f64::min(w / alpha, 0.5);
            ensure((cap - want).abs() <= 1e-9, || format!("alpha={alpha}, w={w}: {cap} vs {want}"))?;
        }
    }
    Ok("12 cases".into())
}

fn hash_linearity() -> Result<String, String> {
    let field = BinaryField::new(8).map_err(|e| e.to_string())?;
    let params = HashParams::for_message_bits(field, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let m: Vec<bool> = (0..40).map(|_| rng.gen()).collect();
        let (a, b, r2) = (rng.gen_range(0..256), rng.gen_range(0..256), rng.gen_range(0..256));
        let ha = hash_message(&m, a, r2, &params).map_err(|e| e.to_string())?;
        let hb = hash_message(&m, b, r2, &params).map_err(|e| e.to_string())?;
        ensure(ha ^ hb == a ^ b, || format!("hash not linear in r1 for r2={r2}"))?;
    }
    Ok("200 draws".into())
}

fn noiseless_simulation() -> Result<String, String> {
    let mut cfg = ExperimentConfig::bitflip(0.4, 0.0, 32, 32);
    cfg.code = Some(CodeConfig {
        layout: LayoutKind::Thm1,
        n: 96,
        data_bits: Some(6),
        p_x: Some(vec![0.75, 0.25]),
        guard: Some(vec![0.8, 0.2]),
        key_len: Some(96),
        ..CodeConfig::default()
    });
    cfg.jammer = Some(JammerConfig::Iid { p_s: Some(vec![1.0, 0.0]), margin: None });
    cfg.trials = 64;
    cfg.error_criterion = crate::config::ErrorCriterion::Max;
    let report = run_trials(&cfg).map_err(|e| e.to_string())?;
    let s = &report.per_strategy[0];
    ensure(s.err_avg == 0.0 && s.err_max_est == Some(0.0), || format!("error {} in {} trials", s.err_avg, s.trials))?;
    Ok(format!("{} trials, no errors", s.trials))
}
