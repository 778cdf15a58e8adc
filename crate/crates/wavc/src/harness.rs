//! Monte Carlo driver: one code build, many independent trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use wavc_core::capacity::{list_capacity, CapacityOptions};
use wavc_core::codec::{build_three_phase, DecodeStatus, Layout, ThreePhaseCode};
use wavc_core::jammer::JammerStrategy;
use wavc_core::prob::block_channel_sample;
use wavc_core::WindowedAvcSpec;

use crate::config::{jammer_strategy, ErrorCriterion, ExperimentConfig};
use crate::error::{Error, Result};

/// Messages swept under the max criterion when there are more than this many.
pub const MAX_MESSAGE_SET: usize = 1 << 10;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Correct,
    /// The list decoder returned nothing.
    ListFailure,
    /// No list entry matched the decoded keys.
    DisambiguationFailure,
    /// Several candidates survived and the returned one was wrong.
    Ambiguity,
    /// A single wrong candidate was returned.
    WrongMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Message bits as a hex string, bit 0 least significant.
    pub message: String,
    pub keys: (u64, u64),
    pub jam_rejections: usize,
    pub jam_valid: bool,
    pub list_size: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub correct: usize,
    pub list_failure: usize,
    pub disambiguation_failure: usize,
    pub ambiguity: usize,
    pub wrong_message: usize,
}

impl OutcomeCounts {
    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Correct => self.correct += 1,
            Outcome::ListFailure => self.list_failure += 1,
            Outcome::DisambiguationFailure => self.disambiguation_failure += 1,
            Outcome::Ambiguity => self.ambiguity += 1,
            Outcome::WrongMessage => self.wrong_message += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.correct + self.errors()
    }

    pub fn errors(&self) -> usize {
        self.list_failure + self.disambiguation_failure + self.ambiguity + self.wrong_message
    }
}

/// Messages used for the max-criterion estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageSet {
    pub size: usize,
    pub exhaustive: bool,
}

impl MessageSet {
    pub fn label(&self) -> String {
        if self.exhaustive {
            format!("exhaustive over {} messages", self.size)
        } else {
            format!("fixed random subset of {} messages", self.size)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub jammer: String,
    /// Completed trials; the outcome counts partition them.
    pub trials: usize,
    pub outcomes: OutcomeCounts,
    /// Trials abandoned because the jammer hit its rejection cap.
    pub generation_failures: usize,
    /// Completed trials whose state sequence violated the state constraint (reporting spoofers only).
    pub invalid_states: usize,
    pub mean_jam_rejections: f64,
    pub mean_list_size: f64,
    /// `1 - correct / trials`.
    pub err_avg: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Largest per-message error over `message_set` (max criterion only).
    pub err_max_est: Option<f64>,
    pub message_set: Option<MessageSet>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeSummary {
    pub layout: String,
    pub message_block: usize,
    pub total_len: usize,
    pub data_bits: usize,
    /// Data bits per transmitted symbol.
    pub rate: f64,
}

/// Worst strategy among those configured.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyMax {
    pub jammer: String,
    pub err: f64,
    pub label: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub code: CodeSummary,
    pub per_strategy: Vec<RunStats>,
    pub max_over_strategies: Option<StrategyMax>,
}

/// Wilson score interval at 95% for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Independent stream for `trial`: the master seed keys ChaCha8, the trial index selects the stream.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// SplitMix64 finalizer; derives sub-seeds from a master seed and an index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hex(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "0".into();
    }
    bits.chunks(4)
        .rev()
        .map(|c| {
            let v = c.iter().enumerate().fold(0u32, |a, (k, &b)| a | (u32::from(b) << k));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

fn bits_of(index: u64, bits: usize) -> Vec<bool> {
    (0..bits).map(|k| k < 64 && (index >> k) & 1 == 1).collect()
}

enum TrialResult {
    Done(TrialRecord, usize),
    GenerationFailure,
}

/// A built code plus the run settings shared by all strategies.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub spec: WindowedAvcSpec,
    pub code: ThreePhaseCode,
    pub trials: usize,
    pub seed: u64,
    pub criterion: ErrorCriterion,
    pub rejection_cap: usize,
    pub failure_budget: usize,
    pub record_trials: bool,
}

impl Simulation {
    pub fn new(spec: WindowedAvcSpec, code: ThreePhaseCode, trials: usize, seed: u64) -> Self {
        Simulation {
            spec,
            code,
            trials,
            seed,
            criterion: ErrorCriterion::Average,
            rejection_cap: wavc_core::jammer::DEFAULT_REJECTION_CAP,
            failure_budget: usize::MAX,
            record_trials: false,
        }
    }

    /// Builds the code described by `cfg`, seeding construction from the master seed.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let spec = cfg.spec()?;
        let code_cfg = cfg.code.as_ref().ok_or_else(|| Error::Config("simulation needs a `code` section".into()))?;
        let data_bits = code_cfg.resolve_data_bits(|| {
            Ok(list_capacity(&spec.channel, &spec.gamma, &spec.lambda, &CapacityOptions::default())?.value)
        })?;
        let params = code_cfg.params(&spec, cfg.bitflip, data_bits, derive_seed(cfg.seed, u64::MAX))?;
        let code = build_three_phase(&spec, &params)?;
        log::info!(
            "built code: message block {}, total length {}, {} data bits, {} segments",
            code.plan.n1,
            code.total_len(),
            code.data_bits(),
            code.list_code.code.segments.len()
        );
        Ok(Simulation {
            criterion: cfg.error_criterion,
            rejection_cap: cfg.rejection_cap,
            failure_budget: cfg.failure_budget,
            record_trials: cfg.record_trials,
            ..Simulation::new(spec, code, cfg.trials, cfg.seed)
        })
    }

    pub fn summary(&self) -> CodeSummary {
        let layout = match self.code.params.layout {
            Layout::Plain => "plain",
            Layout::Guarded { .. } => "thm1",
            Layout::Interleaved(_) => "thm2",
        };
        CodeSummary {
            layout: layout.into(),
            message_block: self.code.plan.n1,
            total_len: self.code.total_len(),
            data_bits: self.code.data_bits(),
            rate: self.code.rate(),
        }
    }

    /// Message indices swept under the max criterion.
    pub fn message_set(&self) -> (Vec<Vec<bool>>, MessageSet) {
        let bits = self.code.data_bits();
        if bits <= 10 {
            let m = 1usize << bits;
            let msgs = (0..m as u64).map(|i| bits_of(i, bits)).collect();
            return (msgs, MessageSet { size: m, exhaustive: true });
        }
        let mut rng = trial_rng(derive_seed(self.seed, u64::MAX - 1), 0);
        let msgs = (0..MAX_MESSAGE_SET).map(|_| (0..bits).map(|_| rng.gen::<bool>()).collect()).collect();
        (msgs, MessageSet { size: MAX_MESSAGE_SET, exhaustive: false })
    }

    fn trial(&self, strategy: &JammerStrategy, t: usize, fixed: Option<&[bool]>) -> Result<TrialResult> {
        let mut rng = trial_rng(self.seed, t as u64);
        let code = &self.code;
        let message = match fixed {
            Some(m) => m.to_vec(),
            None => code.sample_message(&mut rng),
        };
        let keys = code.sample_keys(&mut rng);
        let x = code.encode(&message, keys.0, keys.1)?;
        let jam = match strategy.generate(code, self.spec.w_s, &self.spec.lambda, &mut rng, self.rejection_cap) {
            Ok(j) => j,
            Err(wavc_core::Error::Generation { .. }) => return Ok(TrialResult::GenerationFailure),
            Err(e) => return Err(e.into()),
        };
        let y = block_channel_sample(&x, &jam.states, &self.spec.channel, &mut rng)?;
        let out = code.decode(&y)?;
        let right = out.message.as_deref() == Some(&message[..]);
        let outcome = match out.status {
            _ if right => Outcome::Correct,
            DecodeStatus::ListFailure => Outcome::ListFailure,
            DecodeStatus::DisambiguationFailure => Outcome::DisambiguationFailure,
            DecodeStatus::Ambiguous => Outcome::Ambiguity,
            DecodeStatus::Unique => Outcome::WrongMessage,
        };
        let record = TrialRecord {
            trial: t,
            message: hex(&message),
            keys,
            jam_rejections: jam.rejections,
            jam_valid: jam.window_valid,
            list_size: out.list_size,
            outcome,
        };
        Ok(TrialResult::Done(record, t))
    }

    /// Runs all trials against `strategy`. Trial `t` uses stream `t` of the master seed,
    /// so the result does not depend on the number of worker threads.
    pub fn run(&self, strategy: &JammerStrategy, label: &str) -> Result<RunStats> {
        let (messages, set) = match self.criterion {
            ErrorCriterion::Max => {
                let (m, s) = self.message_set();
                (Some(m), Some(s))
            }
            ErrorCriterion::Average => (None, None),
        };
        let results: Vec<TrialResult> = (0..self.trials)
            .into_par_iter()
            .map(|t| self.trial(strategy, t, messages.as_ref().map(|m| &m[t % m.len()][..])))
            .collect::<Result<_>>()?;
        let mut outcomes = OutcomeCounts::default();
        let mut failures = 0;
        let mut invalid = 0;
        let (mut rejections, mut list_sizes) = (0usize, 0usize);
        let slots = messages.as_ref().map_or(0, Vec::len);
        let mut per_message = vec![(0usize, 0usize); slots];
        let mut records = Vec::new();
        for r in results {
            match r {
                TrialResult::GenerationFailure => failures += 1,
                TrialResult::Done(rec, t) => {
                    outcomes.add(rec.outcome);
                    invalid += usize::from(!rec.jam_valid);
                    rejections += rec.jam_rejections;
                    list_sizes += rec.list_size;
                    if slots > 0 {
                        let slot = &mut per_message[t % slots];
                        slot.0 += usize::from(rec.outcome != Outcome::Correct);
                        slot.1 += 1;
                    }
                    if self.record_trials {
                        records.push(rec);
                    }
                }
            }
        }
        if failures > self.failure_budget {
            return Err(Error::FailureBudget { failures, budget: self.failure_budget });
        }
        let n = outcomes.total();
        if n == 0 {
            return Err(Error::Runtime(wavc_core::Error::Generation {
                attempts: self.rejection_cap + 1,
                reason: format!("every one of {failures} trials failed to generate a jammer state"),
            }));
        }
        let err_avg = outcomes.errors() as f64 / n as f64;
        let err_max_est = set.as_ref().map(|_| {
            per_message
                .iter()
                .filter(|(_, t)| *t > 0)
                .map(|&(e, t)| e as f64 / t as f64)
                .fold(0.0, f64::max)
        });
        let (ci_lo, ci_hi) = wilson_interval(outcomes.errors(), n);
        log::info!("{label}: {} errors in {n} trials, {failures} generation failures", outcomes.errors());
        Ok(RunStats {
            jammer: label.into(),
            trials: n,
            outcomes,
            generation_failures: failures,
            invalid_states: invalid,
            mean_jam_rejections: rejections as f64 / n as f64,
            mean_list_size: list_sizes as f64 / n as f64,
            err_avg,
            ci_lo,
            ci_hi,
            err_max_est,
            message_set: set,
            records,
        })
    }
}

/// Builds the code once and runs every configured jammer against it.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<RunReport> {
    let sim = Simulation::from_config(cfg)?;
    let jammers = cfg.jammer_configs();
    if jammers.is_empty() {
        return Err(Error::Config("simulation needs at least one jammer".into()));
    }
    let mut per_strategy = Vec::with_capacity(jammers.len());
    for j in &jammers {
        let strategy = jammer_strategy(j, &sim.spec, &sim.code.params.p_x)?;
        per_strategy.push(sim.run(&strategy, &j.label())?);
    }
    let max_over_strategies = per_strategy
        .iter()
        .map(|s| (s, s.err_max_est.unwrap_or(s.err_avg)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(s, err)| StrategyMax { jammer: s.jammer.clone(), err, label: "lower bound on the error against the worst-case jammer" });
    Ok(RunReport { code: sim.summary(), per_strategy, max_over_strategies })
}
