//! Certified numerical radius.
//!
//! `w(A) = max_θ g(θ)` with `g(θ) = λ_max(H(θ))`, `H(θ) = (e^{iθ}A + e^{−iθ}A*)/2`,
//! the support function of the numerical range. Every sample `g(θ_j)` is a
//! supporting line of `W(A)`, so consecutive samples bound `g` on the
//! interval between them by the corresponding corner of the circumscribed
//! polygon. Intervals whose bound still exceeds the best sample by more than
//! the tolerance are bisected until the enclosure closes.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, CScalar, I};
use crate::par::Exec;
use std::cell::RefCell;

use crate::spectral::{max_eigenvalue_scratch, operator_norm, EigScratch};

const INITIAL_GRID: usize = 256;
const MAX_GRID_LOG2: u32 = 20;
const GOLDEN_WIDTH: f64 = 1e-12;
const GOLDEN_PEAKS: usize = 3;
/// Below this angular gap the corner of two support lines is ill-conditioned
/// and the plain Lipschitz bound is used instead.
const CORNER_MIN_GAP: f64 = 1e-9;

/// Enclosure `lo ≤ w(A) ≤ hi`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub lo: f64,
    pub hi: f64,
    pub theta_star: f64,
    /// `(θ, g(θ))`, sorted by angle.
    pub samples: Vec<(f64, f64)>,
}

impl RadiusEstimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// The point estimate used everywhere downstream.
    pub fn value(&self) -> f64 {
        self.lo
    }
}

/// `(e^{iθ}A + e^{−iθ}A*)/2`.
pub fn rotated_real_part(a: &CMatrix, theta: f64) -> CMatrix {
    let e = CScalar::from_polar(1.0, theta);
    let b = a.scale(e);
    CMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        (b.get(i, j) + b.get(j, i).conj()) * 0.5
    })
}

/// `1e-9 · max(1, ‖A‖)`.
pub fn default_tol(a: &CMatrix) -> f64 {
    1e-9 * operator_norm(a).max(1.0)
}

/// `H(θ) = cos θ · Re A + sin θ · Im A` with both parts Hermitian.
struct SupportFunction {
    re: CMatrix,
    im: CMatrix,
}

impl SupportFunction {
    fn new(a: &CMatrix) -> Self {
        let ia = a.scale(I);
        let half = |m: &CMatrix| {
            CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
                (m.get(i, j) + m.get(j, i).conj()) * 0.5
            })
        };
        SupportFunction {
            re: half(a),
            im: half(&ia),
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        self.eval_within(theta, None)
    }

    /// `g(θ)`, optionally told an interval that is known to contain it.
    fn eval_within(&self, theta: f64, bracket: Option<(f64, f64)>) -> f64 {
        thread_local! {
            static SCRATCH: RefCell<EigScratch> = RefCell::new(EigScratch::default());
        }
        let (s, c) = theta.sin_cos();
        SCRATCH.with(|cell| {
            let scratch = &mut *cell.borrow_mut();
            scratch.a.clear();
            scratch.a.extend(
                self.re
                    .data()
                    .iter()
                    .zip(self.im.data())
                    .map(|(r, i)| r * c + i * s),
            );
            max_eigenvalue_scratch(scratch, self.re.rows(), bracket)
        })
    }
}

/// Upper bound for `g` on `[a, b]` given `g(a) = ga`, `g(b) = gb`.
fn interval_bound(a: f64, ga: f64, b: f64, gb: f64, lip: f64) -> f64 {
    let gap = b - a;
    let lipschitz = 0.5 * (ga + gb + lip * gap);
    if !(CORNER_MIN_GAP..PI).contains(&gap) {
        return lipschitz;
    }
    // Corner v of the lines Re(e^{ia} z) = ga and Re(e^{ib} z) = gb, written
    // as z' = e^{im} v in the frame of the bisector m. Then
    // Re(e^{i(m+φ)} v) = |z'| cos(φ + arg z'), maximal at φ = −arg z'.
    let h = 0.5 * gap;
    let x = (ga + gb) / (2.0 * h.cos());
    let y = (ga - gb) / (2.0 * h.sin());
    let corner = if x > 0.0 && y.abs() <= x * h.tan() {
        x.hypot(y)
    } else {
        ga.max(gb)
    };
    corner.min(lipschitz)
}

fn golden_max(f: &SupportFunction, mut a: f64, mut b: f64, out: &mut Vec<(f64, f64)>) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f.eval(x1);
    let mut f2 = f.eval(x2);
    out.push((x1, f1));
    out.push((x2, f2));
    while b - a > GOLDEN_WIDTH {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f.eval(x2);
            out.push((x2, f2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f.eval(x1);
            out.push((x1, f1));
        }
    }
}

/// A sample together with the cached bound on the interval to its successor.
#[derive(Clone, Copy)]
struct Node {
    theta: f64,
    g: f64,
    /// `None` until computed, and again whenever the successor changes.
    bound: Option<f64>,
}

fn merge(nodes: &mut Vec<Node>, fresh: Vec<(f64, f64)>) {
    let mut fresh: Vec<Node> = fresh
        .into_iter()
        .map(|(t, g)| Node {
            theta: t.rem_euclid(TAU),
            g,
            bound: None,
        })
        .collect();
    fresh.sort_by(|x, y| x.theta.total_cmp(&y.theta));
    let old = std::mem::take(nodes);
    let mut merged: Vec<Node> = Vec::with_capacity(old.len() + fresh.len());
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < fresh.len() {
        let take_old = j == fresh.len() || (i < old.len() && old[i].theta <= fresh[j].theta);
        let next = if take_old {
            i += 1;
            old[i - 1]
        } else {
            j += 1;
            fresh[j - 1]
        };
        match merged.last_mut() {
            Some(prev) if prev.theta == next.theta => {}
            Some(prev) => {
                if next.bound.is_none() {
                    prev.bound = None;
                }
                merged.push(next);
            }
            None => merged.push(next),
        }
    }
    // the wrap-around interval ends at the first node
    if let (Some(first), Some(last)) = (merged.first().copied(), merged.last_mut()) {
        if first.bound.is_none() {
            last.bound = None;
        }
    }
    *nodes = merged;
}

/// `w(A)` to absolute tolerance `tol`, sequential.
pub fn numerical_radius(a: &CMatrix, tol: f64) -> Result<RadiusEstimate> {
    numerical_radius_with(a, tol, Exec::Sequential)
}

/// `w(A)` with the default tolerance.
pub fn numerical_radius_default(a: &CMatrix) -> Result<RadiusEstimate> {
    numerical_radius(a, default_tol(a))
}

pub fn numerical_radius_with(a: &CMatrix, tol: f64, exec: Exec) -> Result<RadiusEstimate> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "numerical radius needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Contract(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a.rows() == 0 || a.is_zero() {
        return Ok(RadiusEstimate {
            lo: 0.0,
            hi: 0.0,
            theta_star: 0.0,
            samples: vec![(0.0, 0.0)],
        });
    }
    let f = SupportFunction::new(a);
    let lip = operator_norm(a);
    // eigenvalue rounding in each sample, kept on the safe side of the enclosure
    let margin = 64.0 * f64::EPSILON * a.rows() as f64 * lip;
    let min_gap = TAU / (1u64 << MAX_GRID_LOG2) as f64;

    let grid: Vec<f64> = (0..INITIAL_GRID)
        .map(|k| TAU * k as f64 / INITIAL_GRID as f64)
        .collect();
    let values = exec.map(&grid, |&t| f.eval(t));

    // polish the highest local peaks
    let n0 = grid.len();
    let mut peaks: Vec<usize> = (0..n0)
        .filter(|&k| values[k] >= values[(k + n0 - 1) % n0] && values[k] >= values[(k + 1) % n0])
        .collect();
    peaks.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    peaks.truncate(GOLDEN_PEAKS);
    let h = TAU / INITIAL_GRID as f64;
    let polished: Vec<Vec<(f64, f64)>> = exec.map(&peaks, |&k| {
        let mut out = Vec::new();
        golden_max(&f, grid[k] - h, grid[k] + h, &mut out);
        out
    });
    let mut nodes = Vec::new();
    merge(
        &mut nodes,
        grid.iter()
            .copied()
            .zip(values)
            .chain(polished.into_iter().flatten())
            .collect(),
    );

    loop {
        let m = nodes.len();
        for j in 0..m {
            if nodes[j].bound.is_none() {
                let b = if j + 1 < m {
                    nodes[j + 1]
                } else {
                    Node {
                        theta: nodes[0].theta + TAU,
                        ..nodes[0]
                    }
                };
                let a = nodes[j];
                nodes[j].bound = Some(interval_bound(a.theta, a.g, b.theta, b.g, lip) + margin);
            }
        }
        let star = nodes
            .iter()
            .fold(nodes[0], |acc, x| if x.g > acc.g { *x } else { acc });
        let lo = star.g.max(0.0);
        let mut hi = lo;
        let mut split: Vec<(f64, (f64, f64))> = Vec::new();
        let mut stuck = false;
        for j in 0..m {
            let u = nodes[j].bound.unwrap_or(f64::INFINITY);
            hi = hi.max(u);
            if u > lo + tol {
                let (ta, ga) = (nodes[j].theta, nodes[j].g);
                let (tb, gb) = if j + 1 < m {
                    (nodes[j + 1].theta, nodes[j + 1].g)
                } else {
                    (nodes[0].theta + TAU, nodes[0].g)
                };
                if tb - ta < 2.0 * min_gap {
                    stuck = true;
                } else {
                    // g is lip-Lipschitz and bounded by the corner
                    let reach = 0.5 * lip * (tb - ta);
                    let bracket = (
                        (ga - reach).max(gb - reach),
                        (ga + reach).min(gb + reach).min(u),
                    );
                    split.push((0.5 * (ta + tb), bracket));
                }
            }
        }
        let done = hi - lo <= tol;
        if done || stuck || split.is_empty() {
            let est = RadiusEstimate {
                lo,
                hi,
                theta_star: star.theta,
                samples: nodes.iter().map(|n| (n.theta, n.g)).collect(),
            };
            return if done {
                Ok(est)
            } else {
                Err(Error::Uncertified(Box::new(est)))
            };
        }
        let values = exec.map(&split, |&(t, b)| f.eval_within(t, Some(b)));
        merge(
            &mut nodes,
            split.into_iter().map(|s| s.0).zip(values).collect(),
        );
    }
}
