//! JSON experiment configuration and its translation into library objects.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wavc_core::capacity::{list_capacity, CapacityOptions};
use wavc_core::codec::{InterleaveParams, Layout, ThreePhaseParams};
use wavc_core::jammer::{shrink_towards_idle, JammerStrategy, SpoofFallback, DEFAULT_MARGIN, DEFAULT_REJECTION_CAP};
use wavc_core::symmetrize::ecn_symmetrizable;
use wavc_core::{Channel, ConstraintSet, Distribution, HalfSpace, WindowedAvcSpec};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Alphabets {
    pub x: usize,
    pub s: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceConfig {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Windows {
    pub w_x: usize,
    pub w_s: usize,
}

/// Bit-flip channel `y = x xor s` with input weight cap `w` and state weight cap `p`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Bitflip {
    pub w: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    /// Message block, guard word, key block.
    #[default]
    Thm1,
    /// Message block, ramped interleaved separator and key windows.
    Thm2,
    /// Message block only.
    Plain,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CodeConfig {
    pub layout: LayoutKind,
    /// Message block length.
    pub n: usize,
    pub data_bits: Option<usize>,
    /// Data bits per message-block symbol.
    pub rate: Option<f64>,
    /// Data bits as a fraction of `C_list * n`.
    pub rate_fraction: Option<f64>,
    pub p_x: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub guard: Option<Vec<f64>>,
    pub key_len: Option<usize>,
    pub key_dist: Option<Vec<f64>>,
    pub allow_symmetrizable_key: bool,
    /// Window ratio of the interleaved layout; defaults to `w_s / w_x`.
    pub alpha: Option<f64>,
    /// Ramp granularity of the interleaved layout.
    pub lambda: Option<f64>,
    pub t1: Option<Vec<f64>>,
    pub t2: Option<Vec<f64>>,
    /// Hash field degree `k` for `GF(2^k)`.
    pub q_degree: Option<u32>,
    pub l_max: Option<usize>,
    pub segment_bits: Option<usize>,
    pub profile_slack: Option<f64>,
    pub max_expansions: Option<usize>,
    /// Construction seed; derived from the master seed when absent.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum OnInvalid {
    Report,
    #[default]
    Clip,
    Reject,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum JammerConfig {
    /// I.i.d. states; defaults to the capacity-minimizing state distribution pulled towards idle.
    Iid {
        #[serde(default)]
        p_s: Option<Vec<f64>>,
        #[serde(default)]
        margin: Option<f64>,
    },
    Spoof {
        #[serde(default)]
        on_invalid: OnInvalid,
    },
    /// Spoofing through a map `U(s|x)`, one row per input letter; defaults to a witness for `p_x`.
    Symmetrize {
        #[serde(default)]
        u: Option<Vec<Vec<f64>>>,
    },
}

impl JammerConfig {
    pub fn label(&self) -> String {
        match self {
            JammerConfig::Iid { p_s: None, .. } => "iid".into(),
            JammerConfig::Iid { p_s: Some(p), .. } => format!("iid{}", fmt_vec(p)),
            JammerConfig::Spoof { on_invalid } => format!("spoof-{}", format!("{on_invalid:?}").to_lowercase()),
            JammerConfig::Symmetrize { .. } => "symmetrize".into(),
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(";"))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ErrorCriterion {
    #[default]
    Average,
    /// Per-message error estimates over an exhaustive or sampled message set.
    Max,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub w: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    #[serde(rename = "R")]
    pub rate: Option<Vec<f64>>,
    pub jammer: Option<Vec<JammerConfig>>,
    /// Skip simulation and report capacity predictions only.
    pub capacity_only: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub alphabets: Option<Alphabets>,
    /// Row-major table: row `x * |S| + s` holds `W(.|x, s)`.
    #[serde(default)]
    pub channel: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: Option<Vec<HalfSpaceConfig>>,
    #[serde(default)]
    pub lambda: Option<Vec<HalfSpaceConfig>>,
    #[serde(default)]
    pub bitflip: Option<Bitflip>,
    pub windows: Windows,
    /// Blocklength used for the window regime check; defaults to the largest of the windows and the message block.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub code: Option<CodeConfig>,
    #[serde(default)]
    pub jammer: Option<JammerConfig>,
    #[serde(default)]
    pub jammers: Vec<JammerConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub error_criterion: ErrorCriterion,
    #[serde(default = "default_cap")]
    pub rejection_cap: usize,
    /// Generation failures tolerated before a run is aborted.
    #[serde(default = "default_failure_budget")]
    pub failure_budget: usize,
    #[serde(default)]
    pub record_trials: bool,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_trials() -> usize {
    1000
}

fn default_cap() -> usize {
    DEFAULT_REJECTION_CAP
}

fn default_failure_budget() -> usize {
    usize::MAX
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Bit-flip instance with no code or jammer.
    pub fn bitflip(w: f64, p: f64, w_x: usize, w_s: usize) -> Self {
        ExperimentConfig {
            alphabets: None,
            channel: None,
            gamma: None,
            lambda: None,
            bitflip: Some(Bitflip { w, p }),
            windows: Windows { w_x, w_s },
            n: None,
            code: None,
            jammer: None,
            jammers: Vec::new(),
            trials: default_trials(),
            seed: 0,
            error_criterion: ErrorCriterion::Average,
            rejection_cap: default_cap(),
            failure_budget: default_failure_budget(),
            record_trials: false,
            sweep: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let explicit = self.alphabets.is_some() || self.channel.is_some();
        match (self.bitflip.is_some(), explicit) {
            (true, true) => return Err(Error::Config("give either `bitflip` or `alphabets`/`channel`, not both".into())),
            (false, false) => return Err(Error::Config("missing channel: give `bitflip` or `alphabets` and `channel`".into())),
            _ => {}
        }
        self.spec()?;
        Ok(())
    }

    pub fn blocklength(&self) -> usize {
        let n1 = self.code.as_ref().map_or(0, |c| c.n);
        self.n.unwrap_or(0).max(self.windows.w_x).max(self.windows.w_s).max(n1)
    }

    pub fn spec(&self) -> Result<WindowedAvcSpec> {
        let n = self.blocklength();
        let Windows { w_x, w_s } = self.windows;
        if let Some(b) = self.bitflip {
            return WindowedAvcSpec::bitflip(b.w, b.p, w_x, w_s, n).map_err(config_err);
        }
        let a = self.alphabets.as_ref().ok_or_else(|| Error::Config("missing `alphabets`".into()))?;
        let table = self.channel.as_ref().ok_or_else(|| Error::Config("missing `channel`".into()))?;
        let channel = Channel::from_table(a.x, a.s, a.y, table).map_err(config_err)?;
        let gamma = constraint_set(a.x, self.gamma.as_deref().unwrap_or_default(), "gamma")?;
        let lambda = constraint_set(a.s, self.lambda.as_deref().unwrap_or_default(), "lambda")?;
        WindowedAvcSpec::new(channel, gamma, lambda, w_x, w_s, n).map_err(config_err)
    }

    /// Configured jammers, in order.
    pub fn jammer_configs(&self) -> Vec<JammerConfig> {
        self.jammer.iter().chain(&self.jammers).cloned().collect()
    }
}

pub(crate) fn config_err(e: wavc_core::Error) -> Error {
    Error::Config(e.to_string())
}

fn constraint_set(dim: usize, rows: &[HalfSpaceConfig], name: &str) -> Result<ConstraintSet> {
    let hs = rows.iter().map(|h| HalfSpace::new(h.coeffs.clone(), h.bound)).collect();
    ConstraintSet::new(dim, hs).map_err(|e| Error::Config(format!("{name}: {e}")))
}

fn distribution(v: &[f64], dim: usize, name: &str) -> Result<Distribution> {
    if v.len() != dim {
        return Err(Error::Config(format!("{name} has {} entries, expected {dim}", v.len())));
    }
    Distribution::new(v.to_vec()).map_err(|e| Error::Config(format!("{name}: {e}")))
}

/// An input distribution with interior margin at least `delta`: the capacity
/// maximizer moved towards the centroid of the vertices of `gamma` on a 1/20 grid.
pub fn default_input(spec: &WindowedAvcSpec, delta: f64) -> Result<Distribution> {
    let r = list_capacity(&spec.channel, &spec.gamma, &spec.lambda, &CapacityOptions::default()).map_err(Error::Runtime)?;
    let verts = spec.gamma.vertices();
    let dim = spec.gamma.dim();
    let centroid: Vec<f64> = (0..dim).map(|k| verts.iter().map(|v| v.get(k)).sum::<f64>() / verts.len() as f64).collect();
    let centroid = Distribution::from_weights(centroid).map_err(Error::Runtime)?;
    for step in 0..=20 {
        let p = r.argmax_p.mix(&centroid, step as f64 / 20.0).map_err(Error::Runtime)?;
        if spec.gamma.interior_margin(&p) >= delta + 1e-9 {
            return Ok(p);
        }
    }
    Err(Error::Config(format!("no input distribution with interior margin {delta} found; give `code.p_x`")))
}

/// Interleaved-layout defaults for the bit-flip family: type-2 positions idle, type-1
/// weight as large as the densest window allows.
fn bitflip_interleave(w: f64, alpha: f64, lambda: f64, delta: f64) -> Result<(Distribution, Distribution)> {
    let t1 = (w / (alpha * (1.0 + lambda)) - delta).min(0.5);
    if t1 <= 0.0 {
        return Err(Error::Config(format!("no positive type-1 weight for w={w}, alpha={alpha}")));
    }
    Ok((Distribution::bernoulli(t1).map_err(config_err)?, Distribution::bernoulli(0.0).map_err(config_err)?))
}

impl CodeConfig {
    /// Number of data bits, resolving `rate_fraction` against `c_list`.
    pub fn resolve_data_bits(&self, c_list: impl FnOnce() -> Result<f64>) -> Result<usize> {
        let given = [self.data_bits.is_some(), self.rate.is_some(), self.rate_fraction.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::Config("code needs exactly one of `data_bits`, `rate`, `rate_fraction`".into()));
        }
        let bits = match (self.data_bits, self.rate, self.rate_fraction) {
            (Some(b), _, _) => b,
            (_, Some(r), _) => (r * self.n as f64).floor() as usize,
            (_, _, Some(f)) => (f * c_list()? * self.n as f64).floor() as usize,
            _ => unreachable!(),
        };
        Ok(bits)
    }

    pub fn params(&self, spec: &WindowedAvcSpec, bitflip: Option<Bitflip>, data_bits: usize, seed: u64) -> Result<ThreePhaseParams> {
        if self.n == 0 {
            return Err(Error::Config("code.n must be positive".into()));
        }
        let nx = spec.channel.nx();
        let base = ThreePhaseParams::new(Layout::Plain, self.n, data_bits, Distribution::uniform(nx).map_err(config_err)?);
        let delta = self.delta.unwrap_or(base.delta);
        let p_x = match &self.p_x {
            Some(v) => distribution(v, nx, "code.p_x")?,
            None => default_input(spec, delta)?,
        };
        let layout = match self.layout {
            LayoutKind::Plain => Layout::Plain,
            LayoutKind::Thm1 => Layout::Guarded {
                guard: match &self.guard {
                    Some(v) => distribution(v, nx, "code.guard")?,
                    None => p_x.clone(),
                },
            },
            LayoutKind::Thm2 => {
                let alpha = self.alpha.unwrap_or_else(|| spec.alpha());
                let lambda = self.lambda.unwrap_or(0.1);
                let (t1, t2) = match (&self.t1, &self.t2, bitflip) {
                    (Some(a), Some(b), _) => (distribution(a, nx, "code.t1")?, distribution(b, nx, "code.t2")?),
                    (None, None, Some(b)) => bitflip_interleave(b.w, alpha, lambda, delta)?,
                    _ => return Err(Error::Config("the thm2 layout needs `code.t1` and `code.t2`".into())),
                };
                Layout::Interleaved(InterleaveParams { alpha, lambda, t1, t2 })
            }
        };
        let mut p = ThreePhaseParams::new(layout, self.n, data_bits, p_x);
        p.delta = delta;
        p.seed = self.seed.unwrap_or(seed);
        p.allow_symmetrizable_key = self.allow_symmetrizable_key;
        if let Some(v) = &self.key_dist {
            p.key_dist = Some(distribution(v, nx, "code.key_dist")?);
        }
        macro_rules! set {
            ($($field:ident => $target:ident),*) => { $(if let Some(v) = self.$field { p.$target = v; })* };
        }
        set!(key_len => key_blocklength, q_degree => field_degree, l_max => l_max, segment_bits => segment_bits,
             profile_slack => profile_slack, max_expansions => max_expansions);
        Ok(p)
    }
}

/// Builds the strategy for `cfg`; `p_x` is the code's input distribution.
pub fn jammer_strategy(cfg: &JammerConfig, spec: &WindowedAvcSpec, p_x: &Distribution) -> Result<JammerStrategy> {
    let ns = spec.channel.ns();
    Ok(match cfg {
        JammerConfig::Iid { p_s, margin } => {
            let p_s = match p_s {
                Some(v) => distribution(v, ns, "jammer.p_s")?,
                None => {
                    let r = list_capacity(&spec.channel, &spec.gamma, &spec.lambda, &CapacityOptions::default()).map_err(Error::Runtime)?;
                    shrink_towards_idle(&r.argmin_q, &spec.lambda, margin.unwrap_or(DEFAULT_MARGIN)).map_err(config_err)?
                }
            };
            JammerStrategy::Iid { p_s }
        }
        JammerConfig::Spoof { on_invalid } => JammerStrategy::Spoof {
            on_invalid: match on_invalid {
                OnInvalid::Report => SpoofFallback::Report,
                OnInvalid::Clip => SpoofFallback::Clip,
                OnInvalid::Reject => SpoofFallback::Reject,
            },
        },
        JammerConfig::Symmetrize { u } => {
            let u = match u {
                Some(rows) => {
                    if rows.len() != spec.channel.nx() {
                        return Err(Error::Config(format!("jammer.u has {} rows, expected {}", rows.len(), spec.channel.nx())));
                    }
                    rows.iter().map(|r| distribution(r, ns, "jammer.u")).collect::<Result<Vec<_>>>()?
                }
                None => ecn_symmetrizable(p_x, &spec.channel, &spec.lambda)
                    .map_err(Error::Runtime)?
                    .witness
                    .ok_or_else(|| Error::Config("input distribution is not symmetrizable; give `jammer.u`".into()))?,
            };
            JammerStrategy::Symmetrize { u }
        }
    })
}
