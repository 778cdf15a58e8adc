//! Grid sweeps over bit-flip instances, code sizes, rates and jammers.

use serde::Serialize;
use wavc_core::capacity::{windowed_capacity_verdict, VerdictOptions};

use crate::config::{CodeConfig, ExperimentConfig, JammerConfig};
use crate::error::{Error, Result};
use crate::harness::{derive_seed, run_trials};
use crate::output::{opt6, sig6};

pub const HEADER: [&str; 13] =
    ["w", "p", "alpha", "n", "R", "jammer", "c_list", "verdict", "err_avg", "err_max_est", "ci_lo", "ci_hi", "status"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub w: Option<f64>,
    pub p: Option<f64>,
    pub alpha: f64,
    pub n: usize,
    #[serde(rename = "R")]
    pub rate: Option<f64>,
    pub jammer: Option<String>,
    pub c_list: Option<f64>,
    pub verdict: Option<String>,
    pub err_avg: Option<f64>,
    pub err_max_est: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub status: String,
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            opt6(self.w),
            opt6(self.p),
            sig6(self.alpha),
            self.n.to_string(),
            opt6(self.rate),
            self.jammer.clone().unwrap_or_default(),
            opt6(self.c_list),
            self.verdict.clone().unwrap_or_default(),
            opt6(self.err_avg),
            opt6(self.err_max_est),
            opt6(self.ci_lo),
            opt6(self.ci_hi),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Clone)]
struct Cell {
    w: Option<f64>,
    p: Option<f64>,
    alpha: f64,
    n: usize,
    rate: Option<f64>,
    jammer: Option<JammerConfig>,
}

fn cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let grid = cfg.sweep.clone().unwrap_or_default();
    if (grid.w.is_some() || grid.p.is_some()) && cfg.bitflip.is_none() {
        return Err(Error::Config("sweeping `w` or `p` needs a `bitflip` channel".into()));
    }
    let ws: Vec<Option<f64>> = grid.w.as_ref().map_or(vec![cfg.bitflip.map(|b| b.w)], |v| v.iter().copied().map(Some).collect());
    let ps: Vec<Option<f64>> = grid.p.as_ref().map_or(vec![cfg.bitflip.map(|b| b.p)], |v| v.iter().copied().map(Some).collect());
    let alphas = grid.alpha.clone().unwrap_or_else(|| vec![cfg.windows.w_s as f64 / cfg.windows.w_x as f64]);
    let ns = grid.n.clone().unwrap_or_else(|| vec![cfg.code.as_ref().map_or(cfg.blocklength(), |c| c.n)]);
    let rates: Vec<Option<f64>> = grid.rate.as_ref().map_or(vec![None], |r| r.iter().copied().map(Some).collect());
    let configured = cfg.jammer_configs();
    let jammers: Vec<Option<JammerConfig>> = match &grid.jammer {
        Some(j) => j.iter().cloned().map(Some).collect(),
        None if configured.is_empty() => vec![None],
        None => configured.into_iter().map(Some).collect(),
    };
    let mut out = Vec::new();
    for &w in &ws {
        for &p in &ps {
            for &alpha in &alphas {
                for &n in &ns {
                    for &rate in &rates {
                        for j in &jammers {
                            out.push(Cell { w, p, alpha, n, rate, jammer: j.clone() });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn cell_config(base: &ExperimentConfig, cell: &Cell, seed: u64) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    cfg.sweep = None;
    cfg.seed = seed;
    if let (Some(b), Some(w), Some(p)) = (cfg.bitflip.as_mut(), cell.w, cell.p) {
        b.w = w;
        b.p = p;
    }
    let w_s = (cell.alpha * cfg.windows.w_x as f64).round();
    if !(cell.alpha > 0.0) || w_s < 1.0 || (w_s - cell.alpha * cfg.windows.w_x as f64).abs() > 1e-9 {
        return Err(Error::Config(format!("alpha {} times w_x {} is not a positive integer", cell.alpha, cfg.windows.w_x)));
    }
    cfg.windows.w_s = w_s as usize;
    cfg.n = Some(cfg.n.unwrap_or(0).max(cell.n));
    if let Some(code) = cfg.code.as_mut() {
        code.n = cell.n;
        if let Some(r) = cell.rate {
            *code = CodeConfig { data_bits: None, rate: Some(r), rate_fraction: None, ..code.clone() };
        }
    }
    cfg.jammer = cell.jammer.clone();
    cfg.jammers.clear();
    Ok(cfg)
}

fn run_cell(base: &ExperimentConfig, cell: &Cell, seed: u64, capacity_only: bool, opts: &VerdictOptions) -> Result<SweepRow> {
    let cfg = cell_config(base, cell, seed)?;
    let spec = cfg.spec()?;
    let verdict = windowed_capacity_verdict(&spec, opts)?;
    let mut row = SweepRow {
        w: cell.w,
        p: cell.p,
        alpha: cell.alpha,
        n: cell.n,
        rate: cell.rate,
        jammer: cell.jammer.as_ref().map(JammerConfig::label),
        c_list: Some(verdict.c_list),
        verdict: Some(verdict.status.label().into()),
        err_avg: None,
        err_max_est: None,
        ci_lo: None,
        ci_hi: None,
        status: "ok".into(),
    };
    if capacity_only || cfg.code.is_none() || cell.jammer.is_none() {
        return Ok(row);
    }
    let report = run_trials(&cfg)?;
    let stats = &report.per_strategy[0];
    row.rate = Some(report.code.data_bits as f64 / report.code.message_block as f64);
    row.err_avg = Some(stats.err_avg);
    row.err_max_est = stats.err_max_est;
    row.ci_lo = Some(stats.ci_lo);
    row.ci_hi = Some(stats.ci_hi);
    if stats.generation_failures > 0 {
        row.status = format!("ok ({} generation failures)", stats.generation_failures);
    }
    Ok(row)
}

/// One row per grid cell; cell `i` runs with seed `derive_seed(master, i)`. A cell that
/// fails records the error in its status column.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let capacity_only = cfg.sweep.as_ref().is_some_and(|s| s.capacity_only);
    let opts = VerdictOptions::default();
    let cells = cells(cfg)?;
    let mut rows = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        let row = run_cell(cfg, cell, derive_seed(cfg.seed, i as u64), capacity_only, &opts).unwrap_or_else(|e| {
            log::warn!("sweep cell {i} failed: {e}");
            SweepRow {
                w: cell.w,
                p: cell.p,
                alpha: cell.alpha,
                n: cell.n,
                rate: cell.rate,
                jammer: cell.jammer.as_ref().map(JammerConfig::label),
                c_list: None,
                verdict: None,
                err_avg: None,
                err_max_est: None,
                ci_lo: None,
                ci_hi: None,
                status: format!("error: {e}"),
            }
        });
        rows.push(row);
    }
    Ok(rows)
}
