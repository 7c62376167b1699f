//! Haar system and the Faber–Schauder tents obtained by integrating it.
//!
//! Indices are 1-based: `h_1 ≡ 1`, and for `k = 2^j + i` (`1 ≤ i ≤ 2^j`)
//! `h_k` is `+2^{j/2}` on the left half of `[(i-1)/2^j, i/2^j]` and
//! `-2^{j/2}` on the right half. `g_1 ≡ 1` and `g_k = ∫_0^x h_{k-1}` for
//! `k ≥ 2`, so `g_2(x) = x` and every `g_k` with `k ≥ 3` is a tent that
//! vanishes at both endpoints.

use thiserror::Error;

use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("basis index {index} is below the minimum {min}")]
    IndexTooSmall { index: usize, min: usize },
    #[error("point {0} outside [0, 1]")]
    OutOfDomain(f64),
}

fn check_domain(x: f64) -> Result<(), BasisError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(BasisError::OutOfDomain(x))
    }
}

/// Haar index `k ≥ 1`, decomposed as `k = 2^j + i` for `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarIndex(usize);

impl HaarIndex {
    pub fn new(k: usize) -> Result<Self, BasisError> {
        if k == 0 {
            return Err(BasisError::IndexTooSmall { index: k, min: 1 });
        }
        Ok(HaarIndex(k))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `(j, i)` with `k = 2^j + i`, `1 ≤ i ≤ 2^j`; `None` for `k = 1`.
    pub fn level_shift(self) -> Option<(u32, usize)> {
        if self.0 < 2 {
            return None;
        }
        let j = (self.0 - 1).ilog2();
        Some((j, self.0 - (1usize << j)))
    }

    /// Support `[lo, hi]`, jump location and amplitude for `k ≥ 2`.
    fn shape(self) -> Option<Tent> {
        self.level_shift().map(|(j, i)| {
            let scale = (1u64 << j) as f64;
            Tent {
                lo: (i - 1) as f64 / scale,
                mid: (i as f64 - 0.5) / scale,
                hi: i as f64 / scale,
                amplitude: scale.sqrt(),
            }
        })
    }

    /// Step value with the right-limit convention at interior jumps and the
    /// left limit at `x = 1`.
    pub fn eval(self, x: f64) -> Result<f64, BasisError> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(self, x: f64) -> f64 {
        match self.shape() {
            None => 1.0,
            Some(t) => {
                let inside = if t.hi == 1.0 { x >= t.lo } else { x >= t.lo && x < t.hi };
                if !inside {
                    0.0
                } else if x < t.mid {
                    t.amplitude
                } else {
                    -t.amplitude
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tent {
    lo: f64,
    mid: f64,
    hi: f64,
    amplitude: f64,
}

/// Faber–Schauder function `g_k`, `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchauderFn {
    index: usize,
    tent: Option<Tent>,
}

impl SchauderFn {
    pub fn new(k: usize) -> Result<Self, BasisError> {
        if k == 0 {
            return Err(BasisError::IndexTooSmall { index: k, min: 1 });
        }
        let tent = if k >= 3 { HaarIndex(k - 1).shape() } else { None };
        Ok(SchauderFn { index: k, tent })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Closed interval outside of which the function is zero (`[0,1]` for
    /// `g_1`, `g_2`).
    pub fn support(&self) -> (f64, f64) {
        self.tent.map_or((0.0, 1.0), |t| (t.lo, t.hi))
    }

    pub fn peak(&self) -> Option<(f64, f64)> {
        self.tent.map(|t| (t.mid, t.amplitude * (t.mid - t.lo)))
    }

    /// Points where the function may fail to be smooth, including 0 and 1.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        if let Some(t) = self.tent {
            pts.extend([t.lo, t.mid, t.hi]);
        }
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn eval(&self, x: f64) -> Result<f64, BasisError> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match (self.index, self.tent) {
            (1, _) => 1.0,
            (2, _) => x,
            (_, Some(t)) => {
                if x <= t.lo || x >= t.hi {
                    0.0
                } else if x <= t.mid {
                    t.amplitude * (x - t.lo)
                } else {
                    t.amplitude * (t.hi - x)
                }
            }
            _ => unreachable!("tent present for k >= 3"),
        }
    }

    pub fn deriv(&self, x: f64) -> Result<f64, BasisError> {
        check_domain(x)?;
        Ok(self.deriv_unchecked(x))
    }

    pub(crate) fn deriv_unchecked(&self, x: f64) -> f64 {
        if self.index == 1 {
            0.0
        } else {
            HaarIndex(self.index - 1).eval_unchecked(x)
        }
    }
}

pub fn haar_eval(k: usize, x: f64) -> Result<f64, BasisError> {
    HaarIndex::new(k)?.eval(x)
}

pub fn schauder_eval(k: usize, x: f64) -> Result<f64, BasisError> {
    SchauderFn::new(k)?.eval(x)
}

pub fn schauder_deriv(k: usize, x: f64) -> Result<f64, BasisError> {
    SchauderFn::new(k)?.deriv(x)
}

/// `∫ g_p' g_q'`, which is `δ_pq` by orthonormality of the Haar system.
pub fn stiffness_entry(p: usize, q: usize) -> Result<f64, BasisError> {
    for k in [p, q] {
        if k < 2 {
            return Err(BasisError::IndexTooSmall { index: k, min: 2 });
        }
    }
    Ok(if p == q { 1.0 } else { 0.0 })
}

/// Exact `∫_0^1 φ ψ` for two functions that are linear between the given
/// breakpoints: Simpson's rule is exact for the quadratic product on each
/// piece.
pub(crate) fn piecewise_linear_product<F, G>(phi: F, psi: G, lo: f64, hi: f64, kinks: &[f64]) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if hi <= lo {
        return 0.0;
    }
    let mut pts: Vec<f64> = kinks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let c = 0.5 * (a + b);
            let fa = phi(a) * psi(a);
            let fc = phi(c) * psi(c);
            let fb = phi(b) * psi(b);
            (b - a) / 6.0 * (fa + 4.0 * fc + fb)
        })
        .sum()
}

/// Exact `∫_0^1 g_p g_q`.
pub fn mass_entry(p: usize, q: usize) -> Result<f64, BasisError> {
    let gp = SchauderFn::new(p)?;
    let gq = SchauderFn::new(q)?;
    Ok(mass_between(&gp, &gq))
}

pub(crate) fn mass_between(gp: &SchauderFn, gq: &SchauderFn) -> f64 {
    let (a0, a1) = gp.support();
    let (b0, b1) = gq.support();
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    let mut kinks = gp.breakpoints();
    kinks.extend(gq.breakpoints());
    piecewise_linear_product(|x| gp.eval_unchecked(x), |x| gq.eval_unchecked(x), lo, hi, &kinks)
}

/// `∫_0^1 w g_k` by composite quadrature over the support of `g_k`, with the
/// tent's kinks added to the rule's breakpoints.
pub fn load_entry<F, E>(w: F, k: usize, rule: &QuadratureRule) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<BasisError>,
{
    let g = SchauderFn::new(k)?;
    load_with(&g, w, rule)
}

pub(crate) fn load_with<F, E>(g: &SchauderFn, mut w: F, rule: &QuadratureRule) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (lo, hi) = g.support();
    rule.try_integrate_over(lo, hi, &g.breakpoints(), |x| Ok(w(x)? * g.eval_unchecked(x)))
}

/// The H¹₀ basis `{g_3, …, g_{m+2}}` of dimension `m`.
pub fn interior_basis(m: usize) -> Vec<SchauderFn> {
    (3..m + 3)
        .map(|k| SchauderFn::new(k).expect("k >= 3"))
        .collect()
}
