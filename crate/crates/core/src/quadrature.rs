//! Adaptive Gauss-Kronrod quadrature on intervals and rectangles.
//!
//! Both integrators bisect the region with the largest error estimate until
//! every component meets `max(abs_tol, rel_tol * |integral|)`. The error of a
//! region is the difference between the 15-point Kronrod rule and its
//! embedded 7-point Gauss rule (tensor products of them in 2-D).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes on [-1, 1] with Kronrod and Gauss weights (Gauss weight 0 for
/// Kronrod-only nodes).
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[j] = (-XGK[j], WGK[j], wg);
        out[14 - j] = (XGK[j], WGK[j], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Integral estimates with their accumulated error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

struct Region<R> {
    bounds: R,
    values: Vec<f64>,
    errors: Vec<f64>,
    priority: f64,
}

impl<R> PartialEq for Region<R> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<R> Eq for Region<R> {}
impl<R> PartialOrd for Region<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R> Ord for Region<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

/// Shared bisection driver. `eval` returns (values, errors) for a region,
/// `split` cuts a region into pieces.
fn adapt<R: Copy>(
    initial: Vec<R>,
    tol: &[Tolerance],
    max_regions: usize,
    evals_per_region: usize,
    mut eval: impl FnMut(&R) -> (Vec<f64>, Vec<f64>),
    split: impl Fn(&R) -> Vec<R>,
) -> Result<Integral> {
    let dim = tol.len();
    let mut totals = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;

    let priority = |errors: &[f64], totals: &[f64]| -> f64 {
        errors
            .iter()
            .zip(totals)
            .zip(tol)
            .map(|((e, t), tol)| e / tol.target(*t).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    };

    let mut fresh = Vec::new();
    for bounds in initial {
        let (values, errors) = eval(&bounds);
        evaluations += evals_per_region;
        for i in 0..dim {
            totals[i] += values[i];
            total_err[i] += errors[i];
        }
        fresh.push((bounds, values, errors));
    }
    for (bounds, values, errors) in fresh {
        let p = priority(&errors, &totals);
        heap.push(Region { bounds, values, errors, priority: p });
    }

    let converged = |totals: &[f64], errs: &[f64]| {
        totals
            .iter()
            .zip(errs)
            .zip(tol)
            .all(|((t, e), tol)| *e <= tol.target(*t))
    };

    while !converged(&totals, &total_err) {
        if heap.len() >= max_regions {
            let worst = totals
                .iter()
                .zip(&total_err)
                .zip(tol)
                .map(|((t, e), tol)| (*e, tol.target(*t)))
                .max_by(|a, b| (a.0 / a.1).total_cmp(&(b.0 / b.1)))
                .unwrap_or((0.0, 0.0));
            return Err(Error::QuadratureNonConvergence {
                achieved: worst.0,
                tolerance: worst.1,
            });
        }
        let Some(worst) = heap.pop() else { break };
        for i in 0..dim {
            totals[i] -= worst.values[i];
            total_err[i] -= worst.errors[i];
        }
        let mut children = Vec::new();
        for bounds in split(&worst.bounds) {
            let (values, errors) = eval(&bounds);
            evaluations += evals_per_region;
            for i in 0..dim {
                totals[i] += values[i];
                total_err[i] += errors[i];
            }
            children.push((bounds, values, errors));
        }
        for (bounds, values, errors) in children {
            let p = priority(&errors, &totals);
            heap.push(Region { bounds, values, errors, priority: p });
        }
        // Running sums drift; resum occasionally.
        if heap.len() % 1024 == 0 {
            totals.iter_mut().for_each(|t| *t = 0.0);
            total_err.iter_mut().for_each(|e| *e = 0.0);
            for r in heap.iter() {
                for i in 0..dim {
                    totals[i] += r.values[i];
                    total_err[i] += r.errors[i];
                }
            }
        }
    }

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for r in heap.iter() {
        for i in 0..dim {
            values[i] += r.values[i];
            errors[i] += r.errors[i];
        }
    }
    Ok(Integral {
        values,
        errors,
        evaluations,
    })
}

/// Integrates a vector-valued `f` over `[a, b]`, forcing region boundaries
/// at `breaks` (points where `f` jumps or kinks).
pub fn integrate_1d<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: &[Tolerance],
) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]),
{
    let dim = tol.len();
    let mut points: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let initial: Vec<(f64, f64)> = points.windows(2).map(|w| (w[0], w[1])).collect();

    let nodes = rule();
    let mut buf = vec![0.0; dim];
    let eval = |&(lo, hi): &(f64, f64)| {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut kron = vec![0.0; dim];
        let mut gauss = vec![0.0; dim];
        for &(x, wk, wg) in nodes.iter() {
            f(mid + half * x, &mut buf);
            for i in 0..dim {
                kron[i] += wk * buf[i];
                gauss[i] += wg * buf[i];
            }
        }
        let err = kron
            .iter()
            .zip(&gauss)
            .map(|(k, g)| (half * (k - g)).abs())
            .collect();
        (kron.iter().map(|k| k * half).collect(), err)
    };
    let split = |&(lo, hi): &(f64, f64)| {
        let mid = 0.5 * (lo + hi);
        vec![(lo, mid), (mid, hi)]
    };
    adapt(initial, tol, 20_000, 15, eval, split)
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    /// Cuts the rectangle along the given interior grid lines.
    pub fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<Rect> {
        let cuts = |lo: f64, hi: f64, at: &[f64]| {
            let mut v: Vec<f64> = at.iter().copied().filter(|c| *c > lo && *c < hi).collect();
            v.push(lo);
            v.push(hi);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let xc = cuts(self.x0, self.x1, xs);
        let yc = cuts(self.y0, self.y1, ys);
        let mut out = Vec::new();
        for xw in xc.windows(2) {
            for yw in yc.windows(2) {
                out.push(Rect::new(xw[0], xw[1], yw[0], yw[1]));
            }
        }
        out
    }
}

/// Integrates a vector-valued `f(x, y)` over the union of `pieces` with a
/// tensor-product Gauss-Kronrod rule, quartering the worst rectangle until
/// the tolerance is met.
pub fn integrate_2d<F>(
    f: F,
    pieces: &[Rect],
    tol: &[Tolerance],
    max_regions: usize,
) -> Result<Integral>
where
    F: Fn(f64, f64, &mut [f64]),
{
    let dim = tol.len();
    let nodes = rule();
    let mut buf = vec![0.0; dim];
    let eval = |r: &Rect| {
        let hx = 0.5 * (r.x1 - r.x0);
        let mx = 0.5 * (r.x1 + r.x0);
        let hy = 0.5 * (r.y1 - r.y0);
        let my = 0.5 * (r.y1 + r.y0);
        let mut kron = vec![0.0; dim];
        let mut gauss = vec![0.0; dim];
        for &(xn, wkx, wgx) in nodes.iter() {
            let x = mx + hx * xn;
            for &(yn, wky, wgy) in nodes.iter() {
                f(x, my + hy * yn, &mut buf);
                let wk = wkx * wky;
                let wg = wgx * wgy;
                for i in 0..dim {
                    kron[i] += wk * buf[i];
                    gauss[i] += wg * buf[i];
                }
            }
        }
        let area = hx * hy;
        let err = kron
            .iter()
            .zip(&gauss)
            .map(|(k, g)| (area * (k - g)).abs())
            .collect();
        (kron.iter().map(|k| k * area).collect(), err)
    };
    let split = |r: &Rect| {
        let mx = 0.5 * (r.x0 + r.x1);
        let my = 0.5 * (r.y0 + r.y1);
        vec![
            Rect::new(r.x0, mx, r.y0, my),
            Rect::new(mx, r.x1, r.y0, my),
            Rect::new(r.x0, mx, my, r.y1),
            Rect::new(mx, r.x1, my, r.y1),
        ]
    };
    adapt(pieces.to_vec(), tol, max_regions, 225, eval, split)
}
