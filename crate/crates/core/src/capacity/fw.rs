//! Away-step Frank-Wolfe over the convex hull of a finite vertex set.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct FwOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    /// Frank-Wolfe gap: `value - min` is at most this for convex objectives.
    pub gap: f64,
    pub iterations: usize,
}

pub(crate) struct FwProblem<'a> {
    pub vertices: &'a [Vec<f64>],
    pub max_iter: usize,
    pub tol: f64,
}

fn combine(vertices: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let d = vertices[0].len();
    let mut x = vec![0.0; d];
    for (v, &a) in vertices.iter().zip(weights) {
        if a != 0.0 {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += a * vi;
            }
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Golden-section minimization of a unimodal function on `[0, hi]`.
fn golden(f: &mut dyn FnMut(f64) -> f64, hi: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..64 {
        if b - a < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    for t in [0.0, hi] {
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Minimizes a convex `f` with gradient `grad` starting from the best vertex.
pub(crate) fn minimize(
    prob: &FwProblem<'_>,
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    start: Option<&[f64]>,
) -> FwOutcome {
    let k = prob.vertices.len();
    let mut weights = vec![0.0; k];
    match start {
        Some(w) if w.len() == k => weights.copy_from_slice(w),
        _ => {
            let best = (0..k)
                .map(|i| (i, f(&prob.vertices[i])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            weights[best] = 1.0;
        }
    }
    let mut x = combine(prob.vertices, &weights);
    let mut fx = f(&x);
    let mut it = 0;
    while it < prob.max_iter {
        it += 1;
        let g = grad(&x);
        let gx = dot(&g, &x);
        let scores: Vec<f64> = prob.vertices.iter().map(|v| dot(&g, v)).collect();
        let s = (0..k).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
        let gap = (gx - scores[s]).max(0.0);
        if gap <= prob.tol {
            break;
        }
        let away = (0..k)
            .filter(|&i| weights[i] > 0.0)
            .max_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .unwrap();
        let away_gain = scores[away] - gx;
        let (dir, gmax, fw_step) = if gap >= away_gain || weights[away] >= 1.0 {
            let d: Vec<f64> = prob.vertices[s].iter().zip(&x).map(|(a, b)| a - b).collect();
            (d, 1.0, true)
        } else {
            let d: Vec<f64> = x.iter().zip(&prob.vertices[away]).map(|(a, b)| a - b).collect();
            let wa = weights[away];
            (d, wa / (1.0 - wa), false)
        };
        let mut line = |t: f64| {
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            f(&y)
        };
        let (mut t, ft) = golden(&mut line, gmax);
        if !fw_step && t >= gmax * (1.0 - 1e-9) {
            t = gmax;
        }
        if ft >= fx && t == 0.0 {
            // No progress possible along the chosen direction.
            break;
        }
        if fw_step {
            for w in weights.iter_mut() {
                *w *= 1.0 - t;
            }
            weights[s] += t;
        } else {
            for w in weights.iter_mut() {
                *w *= 1.0 + t;
            }
            weights[away] -= t;
            if t == gmax || weights[away] < 1e-12 {
                // Drop step: the away vertex leaves the active set.
                weights[away] = 0.0;
                let total: f64 = weights.iter().sum();
                for w in weights.iter_mut() {
                    *w /= total;
                }
            }
        }
        x = combine(prob.vertices, &weights);
        fx = f(&x);
    }
    // Final certificate at the returned point.
    let g = grad(&x);
    let gx = dot(&g, &x);
    let smin = prob.vertices.iter().map(|v| dot(&g, v)).fold(f64::INFINITY, f64::min);
    let gap = (gx - smin).max(0.0);
    FwOutcome { point: x, value: fx, gap, iterations: it }
}
