//! Small dense symmetric solves and the two-parameter affine least squares
//! used by the inverse solver.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix not SPD: non-positive pivot {value:e} at index {index}")]
    NotSpd { index: usize, value: f64 },
    #[error("dimension mismatch: matrix order {expected}, vector length {found}")]
    Dimension { expected: usize, found: usize },
    #[error("lambda not identifiable: singular normal matrix")]
    NotIdentifiable,
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
}

/// Symmetric matrix stored as its packed lower triangle, so `A_ij == A_ji`
/// holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    lower: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            lower: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            a.set(i, i, 1.0);
        }
        a
    }

    /// Builds from `f(i, j)` evaluated for `j <= i` only.
    pub fn from_lower_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut lower = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                lower.push(f(i, j));
            }
        }
        SymMatrix { n, lower }
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.lower[Self::idx(i, j)] = v;
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(x)).map(|(a, b)| a * b).sum()
    }
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`, no pivoting.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self, LinalgError> {
        let n = a.order();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || d.is_nan() {
                return Err(LinalgError::NotSpd { index: j, value: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn check(&self, b: &[f64]) -> Result<(), LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::Dimension {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(())
    }

    /// Forward substitution `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check(b)?;
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = self.l[i * n..i * n + i].iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        Ok(y)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        let mut x = self.solve_lower(b)?;
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[k * n + i] * x[k]).sum();
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
        Ok(x)
    }

    /// `√(bᵀ A⁻¹ b) = ‖L⁻¹ b‖₂`.
    pub fn inverse_norm(&self, b: &[f64]) -> Result<f64, LinalgError> {
        Ok(norm2(&self.solve_lower(b)?))
    }
}

pub fn cholesky_solve(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.order() {
        return Err(LinalgError::Dimension {
            expected: a.order(),
            found: b.len(),
        });
    }
    Cholesky::factor(a)?.solve(b)
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// One residual row `r0 + λ₁ p + λ₂ q`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AffineRow {
    pub r0: f64,
    pub p: f64,
    pub q: f64,
}

impl AffineRow {
    pub fn new(r0: f64, p: f64, q: f64) -> Self {
        AffineRow { r0, p, q }
    }

    #[inline]
    pub fn at(&self, l1: f64, l2: f64) -> f64 {
        self.r0 + l1 * self.p + l2 * self.q
    }
}

/// Relative threshold on `det / (Spp Sqq)` below which the normal matrix is
/// treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;

/// Unconstrained minimizer of `Σ (r0 + λ₁ p + λ₂ q)²` from the 2×2 normal
/// equations.
pub fn lsq_affine_2(rows: &[AffineRow]) -> Result<(f64, f64), LinalgError> {
    if rows.len() < 2 {
        return Err(LinalgError::TooFewRows(rows.len()));
    }
    let (mut spp, mut spq, mut sqq, mut sp0, mut sq0) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rows {
        spp += r.p * r.p;
        spq += r.p * r.q;
        sqq += r.q * r.q;
        sp0 += r.p * r.r0;
        sq0 += r.q * r.r0;
    }
    let det = spp * sqq - spq * spq;
    if !(spp > 0.0 && sqq > 0.0) || det <= SINGULAR_RTOL * spp * sqq {
        return Err(LinalgError::NotIdentifiable);
    }
    let l1 = (-sp0 * sqq + sq0 * spq) / det;
    let l2 = (-sq0 * spp + sp0 * spq) / det;
    Ok((l1, l2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let x = cholesky_solve(&SymMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_against_hand_elimination() {
        // Oracle: eliminate x0 from row 2 by hand.
        let (a, b, c) = (4.0, 2.0, 3.0);
        let (f, g) = (8.0, 7.0);
        let x1 = (g - b / a * f) / (c - b / a * b);
        let x0 = (f - b * x1) / a;
        assert_eq!((x0, x1), (1.25, 1.5));

        let mut m = SymMatrix::zeros(2);
        m.set(0, 0, a);
        m.set(1, 0, b);
        m.set(1, 1, c);
        let x = cholesky_solve(&m, &[f, g]).unwrap();
        assert!((x[0] - x0).abs() < 1e-15 && (x[1] - x1).abs() < 1e-15);
    }

    #[test]
    fn zero_pivot_is_not_spd() {
        let mut m = SymMatrix::identity(3);
        m.set(1, 1, 0.0);
        assert!(matches!(
            cholesky_solve(&m, &[1.0, 1.0, 1.0]),
            Err(LinalgError::NotSpd { index: 1, .. })
        ));
    }

    #[test]
    fn indefinite_is_not_spd() {
        let mut m = SymMatrix::identity(2);
        m.set(0, 1, 2.0);
        assert!(matches!(Cholesky::factor(&m), Err(LinalgError::NotSpd { index: 1, .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            cholesky_solve(&SymMatrix::identity(2), &[1.0]),
            Err(LinalgError::Dimension { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn symmetric_storage() {
        let mut m = SymMatrix::zeros(3);
        m.set(0, 2, 5.0);
        assert_eq!(m.get(2, 0), 5.0);
        assert_eq!(m.get(0, 2), 5.0);
    }

    #[test]
    fn lsq_exact_system() {
        let rows = [AffineRow::new(-1.0, 1.0, 0.0), AffineRow::new(-2.0, 0.0, 1.0)];
        let (a, b) = lsq_affine_2(&rows).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lsq_singular() {
        let rows = [AffineRow::new(1.0, 0.0, 0.0), AffineRow::new(2.0, 0.0, 0.0)];
        assert_eq!(lsq_affine_2(&rows), Err(LinalgError::NotIdentifiable));
        let collinear = [AffineRow::new(1.0, 1.0, 2.0), AffineRow::new(2.0, 2.0, 4.0)];
        assert_eq!(lsq_affine_2(&collinear), Err(LinalgError::NotIdentifiable));
        assert_eq!(lsq_affine_2(&rows[..1]), Err(LinalgError::TooFewRows(1)));
    }
}
