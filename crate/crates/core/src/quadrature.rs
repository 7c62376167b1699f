//! Composite Gauss–Legendre quadrature on `[0, 1]`.

use std::convert::Infallible;

use thiserror::Error;

pub const MAX_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("Gauss-Legendre order {0} outside 1..={MAX_POINTS}")]
    PointsOutOfRange(usize),
    #[error("breakpoints must be strictly increasing from 0 to 1")]
    BadBreakpoints,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Roots of `P_p` are found by Newton iteration from the Chebyshev-like
/// initial guess; the weights are `2 / ((1 - t²) P_p'(t)²)`.
pub fn gauss_nodes(points: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    if !(1..=MAX_POINTS).contains(&points) {
        return Err(QuadratureError::PointsOutOfRange(points));
    }
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// A composite rule: `points` Gauss nodes on every cell of the breakpoint
/// partition, after splitting each cell into `2^refinement` equal parts.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: usize,
    breakpoints: Vec<f64>,
    refinement: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(points: usize, breakpoints: Vec<f64>, refinement: u32) -> Result<Self, QuadratureError> {
        let (nodes, weights) = gauss_nodes(points)?;
        let valid = breakpoints.len() >= 2
            && breakpoints[0] == 0.0
            && *breakpoints.last().unwrap() == 1.0
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !valid {
            return Err(QuadratureError::BadBreakpoints);
        }
        Ok(QuadratureRule {
            points,
            breakpoints,
            refinement,
            nodes,
            weights,
        })
    }

    /// Uniform dyadic partition with `2^level` cells.
    pub fn dyadic(points: usize, level: u32, refinement: u32) -> Result<Self, QuadratureError> {
        let cells = 1usize << level;
        let breakpoints = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        Self::new(points, breakpoints, refinement)
    }

    /// Default rule for a Galerkin space of dimension `m`: 8 points per
    /// cell, a dyadic grid one level finer than the finest basis kink, and
    /// two refinement levels.
    pub fn for_dimension(m: usize) -> Self {
        let level = ceil_log2(m + 2) + 1;
        Self::dyadic(8, level, 2).expect("default rule is valid")
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    /// Same rule with every cell split into `2^extra` more parts.
    pub fn refined(&self, extra: u32) -> Self {
        QuadratureRule {
            refinement: self.refinement + extra,
            ..self.clone()
        }
    }

    pub fn integrate<F>(&self, mut f: F) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        let r: Result<f64, Infallible> = self.try_integrate(|x| Ok(f(x)));
        match r {
            Ok(v) => v,
        }
    }

    pub fn try_integrate<F, E>(&self, f: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        self.try_integrate_over(0.0, 1.0, &[], f)
    }

    /// Integral over `[lo, hi]` using the rule's cells clipped to that range,
    /// with `extra` breakpoints (e.g. integrand kinks) merged in.
    pub fn try_integrate_over<F, E>(&self, lo: f64, hi: f64, extra: &[f64], mut f: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        if hi <= lo {
            return Ok(0.0);
        }
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .chain(extra.iter().copied())
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let parts = 1usize << self.refinement;
        let mut total = 0.0;
        for cell in cuts.windows(2) {
            let (a, b) = (cell[0], cell[1]);
            let width = (b - a) / parts as f64;
            for s in 0..parts {
                let left = a + s as f64 * width;
                let half = 0.5 * width;
                let mid = left + half;
                let mut acc = 0.0;
                for (t, w) in self.nodes.iter().zip(&self.weights) {
                    acc += w * f(mid + half * t)?;
                }
                total += half * acc;
            }
        }
        Ok(total)
    }
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn integrate<F>(f: F, rule: &QuadratureRule) -> f64
where
    F: FnMut(f64) -> f64,
{
    rule.integrate(f)
}
