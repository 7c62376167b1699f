//! Collage-type identification of `(λ₁, λ₂)`.
//!
//! For a target `(u_m, v_m)` and test functions `g_{k+2}`, `k = 1..n`, the
//! residual of the weak form is affine in the coefficients:
//!
//! ```text
//! r_k(λ₁, λ₂) = ∫u_m' g' + ∫v_m' g' - ∫f g - ∫g g  +  λ₁ ∫u_m g  +  λ₂ ∫v_m g
//!             = r0_k + λ₁ p_k + λ₂ q_k
//! ```
//!
//! so every objective below is a convex function of `λ` that is cheap to
//! evaluate once the triples are known.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basis::{interior_basis, load_with};
use crate::expr::Expression;
use crate::forward::{assemble_equation, h1_gram, mass_matrix, Component, GalerkinSolution, ProblemSpec};
use crate::linalg::{lsq_affine_2, norm2, AffineRow, Cholesky, LinalgError, SymMatrix};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// How the residual vector is reduced to a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ObjectiveMode {
    /// `|Σ r_k|`, the absolute value of the summed residual.
    AbsSum,
    /// `Σ |r_k|`
    L1,
    /// `√(Σ r_k²)`
    #[default]
    L2,
    /// `√(rᵀ G⁻¹ r)` with the H¹ Gram matrix `G` of the test functions: the
    /// dual norm of the residual on their span.
    DualNorm,
}

impl ObjectiveMode {
    pub const ALL: [ObjectiveMode; 4] = [
        ObjectiveMode::AbsSum,
        ObjectiveMode::L1,
        ObjectiveMode::L2,
        ObjectiveMode::DualNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveMode::AbsSum => "paper-abs-sum",
            ObjectiveMode::L1 => "l1",
            ObjectiveMode::L2 => "l2",
            ObjectiveMode::DualNorm => "dual-norm",
        }
    }
}

impl fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown objective mode `{0}` (expected paper-abs-sum, l1, l2 or dual-norm)")]
pub struct UnknownMode(pub String);

impl FromStr for ObjectiveMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ObjectiveMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMode(s.to_string()))
    }
}

/// `[λ₁min, λ₁max] × [λ₂min, λ₂max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConstraint {
    pub lambda1: (f64, f64),
    pub lambda2: (f64, f64),
}

impl Default for BoxConstraint {
    fn default() -> Self {
        BoxConstraint {
            lambda1: (0.5, 3.0),
            lambda2: (0.5, 3.0),
        }
    }
}

impl BoxConstraint {
    pub fn new(lambda1: (f64, f64), lambda2: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSpec(format!("box bounds for {name} must satisfy min < max, got [{lo}, {hi}]")));
            }
        }
        Ok(BoxConstraint { lambda1, lambda2 })
    }

    pub fn contains(&self, (a, b): (f64, f64)) -> bool {
        (self.lambda1.0..=self.lambda1.1).contains(&a) && (self.lambda2.0..=self.lambda2.1).contains(&b)
    }

    pub fn project(&self, (a, b): (f64, f64)) -> (f64, f64) {
        (a.clamp(self.lambda1.0, self.lambda1.1), b.clamp(self.lambda2.0, self.lambda2.1))
    }
}

/// Affine residual triples of a target, plus what the dual-norm objective
/// needs.
#[derive(Debug, Clone)]
pub struct ResidualModel {
    rows: Vec<AffineRow>,
    gram: SymMatrix,
    /// Rows mapped through `L⁻¹`, `G = L Lᵀ`, so the dual norm is the
    /// Euclidean norm of the mapped residual.
    whitened: Vec<AffineRow>,
}

impl ResidualModel {
    pub fn new(rows: Vec<AffineRow>, gram: SymMatrix) -> Result<Self> {
        if gram.order() != rows.len() {
            return Err(Error::Dimension(format!(
                "{} residual rows but Gram matrix of order {}",
                rows.len(),
                gram.order()
            )));
        }
        let chol = Cholesky::factor(&gram)?;
        let col = |f: fn(&AffineRow) -> f64| chol.solve_lower(&rows.iter().map(f).collect::<Vec<_>>());
        let (r0, p, q) = (col(|r| r.r0)?, col(|r| r.p)?, col(|r| r.q)?);
        let whitened = (0..rows.len()).map(|k| AffineRow::new(r0[k], p[k], q[k])).collect();
        Ok(ResidualModel { rows, gram, whitened })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[AffineRow] {
        &self.rows
    }

    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }

    pub fn residuals(&self, (l1, l2): (f64, f64)) -> Vec<f64> {
        self.rows.iter().map(|r| r.at(l1, l2)).collect()
    }

    pub fn objective(&self, (l1, l2): (f64, f64), mode: ObjectiveMode) -> f64 {
        match mode {
            ObjectiveMode::AbsSum => self.rows.iter().map(|r| r.at(l1, l2)).sum::<f64>().abs(),
            ObjectiveMode::L1 => self.rows.iter().map(|r| r.at(l1, l2).abs()).sum(),
            ObjectiveMode::L2 => self.rows.iter().map(|r| r.at(l1, l2).powi(2)).sum::<f64>().sqrt(),
            ObjectiveMode::DualNorm => self.whitened.iter().map(|r| r.at(l1, l2).powi(2)).sum::<f64>().sqrt(),
        }
    }

    /// Unconstrained minimizer of the l2 or dual-norm objective.
    pub fn closed_form(&self, mode: ObjectiveMode) -> std::result::Result<(f64, f64), LinalgError> {
        match mode {
            ObjectiveMode::DualNorm => lsq_affine_2(&self.whitened),
            _ => lsq_affine_2(&self.rows),
        }
    }

    pub fn identifiable(&self) -> bool {
        lsq_affine_2(&self.rows).is_ok()
    }
}

pub fn objective(model: &ResidualModel, lambda: (f64, f64), mode: ObjectiveMode) -> f64 {
    model.objective(lambda, mode)
}

/// `∫ w_m' g_{k+2}'`: by Haar orthonormality this is the `k`-th coefficient
/// (zero past the target's dimension); the lift contributes nothing.
fn stiffness_moment(target: &GalerkinSolution, c: Component, k: usize) -> f64 {
    target.coeffs(c).get(k).copied().unwrap_or(0.0)
}

/// Residual triples of `target` against the first `n` interior basis
/// functions for the sources `f`, `g`.
pub fn build_residual(target: &GalerkinSolution, n: usize, f: &Expression, g: &Expression) -> Result<ResidualModel> {
    if n == 0 {
        return Err(Error::Dimension("need at least one test function".into()));
    }
    let rule = QuadratureRule::for_dimension(n.max(target.dimension()));
    let rows = interior_basis(n)
        .par_iter()
        .enumerate()
        .map(|(k, gk)| {
            let load_f = load_with(gk, |x| f.evaluate(x).map_err(Error::from), &rule)?;
            let load_g = load_with(gk, |x| g.evaluate(x).map_err(Error::from), &rule)?;
            let r0 = stiffness_moment(target, Component::First, k) + stiffness_moment(target, Component::Second, k)
                - load_f
                - load_g;
            Ok(AffineRow::new(
                r0,
                target.moment(Component::First, gk),
                target.moment(Component::Second, gk),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ResidualModel::new(rows, h1_gram(n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeSettings {
    /// Grid points per axis, endpoints included.
    pub grid: usize,
    pub simplex_edge: f64,
    /// Stop when the simplex diameter falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MinimizeSettings {
    fn default() -> Self {
        MinimizeSettings {
            grid: 251,
            simplex_edge: 0.02,
            tolerance: 1e-6,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Grid,
    NelderMead,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub lambda: (f64, f64),
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub grid_best: Candidate,
    pub refined: Candidate,
    pub iterations: usize,
    /// Closed-form minimizer projected onto the box (l2 and dual-norm only).
    pub closed_form: Option<Candidate>,
    pub identifiable: bool,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeResult {
    pub lambda: (f64, f64),
    pub value: f64,
    pub diagnostics: Diagnostics,
}

/// Grid scan, projected Nelder–Mead polish from the grid winner and, for the
/// quadratic modes, the closed-form least-squares point; best value wins.
pub fn minimize(
    model: &ResidualModel,
    bounds: &BoxConstraint,
    mode: ObjectiveMode,
    settings: &MinimizeSettings,
) -> Result<MinimizeResult> {
    if settings.grid < 2 {
        return Err(Error::InvalidSpec(format!("grid needs at least 2 points per axis, got {}", settings.grid)));
    }
    let f = |l: (f64, f64)| model.objective(l, mode);
    let grid_best = grid_scan(&f, bounds, settings.grid);
    let (refined, iterations) = nelder_mead(&f, bounds, grid_best.lambda, settings);
    let refined = if refined.value <= grid_best.value { refined } else { grid_best };

    let identifiable = model.identifiable();
    let closed_form = match mode {
        ObjectiveMode::L2 | ObjectiveMode::DualNorm => model.closed_form(mode).ok().map(|l| {
            let lambda = bounds.project(l);
            Candidate {
                lambda,
                value: f(lambda),
            }
        }),
        _ => None,
    };

    let (best, source) = match closed_form {
        Some(c) if c.value <= refined.value => (c, Source::ClosedForm),
        _ if refined == grid_best => (grid_best, Source::Grid),
        _ => (refined, Source::NelderMead),
    };
    Ok(MinimizeResult {
        lambda: best.lambda,
        value: best.value,
        diagnostics: Diagnostics {
            grid_best,
            refined,
            iterations,
            closed_form,
            identifiable,
            source,
        },
    })
}

fn axis(range: (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

/// Exhaustive scan; ties go to the lowest λ₁, then the lowest λ₂.
fn grid_scan<F>(f: &F, bounds: &BoxConstraint, n: usize) -> Candidate
where
    F: Fn((f64, f64)) -> f64 + Sync,
{
    let (value, i, j) = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = axis(bounds.lambda1, i, n);
            (0..n)
                .map(|j| (f((a, axis(bounds.lambda2, j, n))), i, j))
                .min_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)))
                .expect("n >= 2")
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)))
        .expect("n >= 2");
    Candidate {
        lambda: (axis(bounds.lambda1, i, n), axis(bounds.lambda2, j, n)),
        value,
    }
}

/// Two-dimensional Nelder–Mead with every trial point projected onto the
/// box. Returns the best vertex and the iteration count.
fn nelder_mead<F>(f: &F, bounds: &BoxConstraint, start: (f64, f64), s: &MinimizeSettings) -> (Candidate, usize)
where
    F: Fn((f64, f64)) -> f64,
{
    let eval = |p: (f64, f64)| {
        let p = bounds.project(p);
        Candidate { lambda: p, value: f(p) }
    };
    // Step away from the start, flipping direction at the box walls.
    let offset = |x: f64, (lo, hi): (f64, f64)| if x + s.simplex_edge <= hi { x + s.simplex_edge } else { (x - s.simplex_edge).max(lo) };
    let mut simplex = [
        eval(start),
        eval((offset(start.0, bounds.lambda1), start.1)),
        eval((start.0, offset(start.1, bounds.lambda2))),
    ];
    let order = |s: &mut [Candidate; 3]| s.sort_by(|a, b| a.value.total_cmp(&b.value));
    let diameter = |s: &[Candidate; 3]| {
        let d = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        d(s[0].lambda, s[1].lambda).max(d(s[0].lambda, s[2].lambda)).max(d(s[1].lambda, s[2].lambda))
    };
    let along = |from: (f64, f64), to: (f64, f64), t: f64| (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1));

    let mut iterations = 0;
    order(&mut simplex);
    while iterations < s.max_iterations && diameter(&simplex) > s.tolerance {
        iterations += 1;
        let [best, good, worst] = simplex;
        let centroid = ((best.lambda.0 + good.lambda.0) / 2.0, (best.lambda.1 + good.lambda.1) / 2.0);
        let reflected = eval(along(centroid, worst.lambda, -1.0));
        if reflected.value < best.value {
            let expanded = eval(along(centroid, worst.lambda, -2.0));
            simplex[2] = if expanded.value < reflected.value { expanded } else { reflected };
        } else if reflected.value < good.value {
            simplex[2] = reflected;
        } else {
            let contracted = if reflected.value < worst.value {
                eval(along(centroid, reflected.lambda, 0.5))
            } else {
                eval(along(centroid, worst.lambda, 0.5))
            };
            if contracted.value < worst.value.min(reflected.value) {
                simplex[2] = contracted;
            } else {
                simplex[1] = eval(along(best.lambda, good.lambda, 0.5));
                simplex[2] = eval(along(best.lambda, worst.lambda, 0.5));
            }
        }
        order(&mut simplex);
    }
    (simplex[0], iterations)
}

/// Outcome of comparing the distance to the true discrete solution with
/// the residual-based bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollageCheck {
    /// `‖y - x̄‖` in the product H¹ norm.
    pub distance: f64,
    /// Dual norm of `a(y, ·) - x*` on the discrete test space `V_m × V_m`.
    pub residual_norm: f64,
    /// `min(1, λ₁) + min(1, λ₂)`
    pub rho_sum: f64,
    /// `min(min(1, λ₁), min(1, λ₂))`
    pub rho_min: f64,
    pub bound_sum: f64,
    pub bound_min: f64,
    /// `distance <= bound_min + 1e-9`
    pub holds: bool,
    /// `distance <= bound_sum + 1e-9`
    pub holds_with_sum: bool,
}

pub const COLLAGE_SLACK: f64 = 1e-9;

/// Checks `‖y - x̄‖ ≤ ‖a(y,·) - x*‖_* / ρ` for a discrete `y` with the same
/// boundary data as `spec`, where `x̄` is the Galerkin solution of dimension
/// `m`.
pub fn collage_bound_check(spec: &ProblemSpec, y: &GalerkinSolution, m: usize) -> Result<CollageCheck> {
    if y.dimension() != m {
        return Err(Error::Dimension(format!(
            "candidate has dimension {} but the test space has dimension {m}",
            y.dimension()
        )));
    }
    for c in Component::BOTH {
        let lift = spec.equation(c).lift();
        if y.lift(c) != lift {
            return Err(Error::InvalidSpec(format!(
                "candidate does not satisfy the boundary conditions of the {c} equation"
            )));
        }
    }
    let rule = QuadratureRule::for_dimension(m);
    let mass = mass_matrix(m);
    let gram = SymMatrix::identity(m).add_scaled(1.0, &mass);
    let gram_chol = Cholesky::factor(&gram)?;

    let mut distance_sq = 0.0;
    let mut residual_sq = 0.0;
    for c in Component::BOTH {
        let sys = assemble_equation(spec.equation(c), m, &rule)?;
        let exact = Cholesky::factor(&sys.matrix)?.solve(&sys.rhs)?;
        let cy = y.coeffs(c);
        let diff: Vec<f64> = cy.iter().zip(&exact).map(|(a, b)| a - b).collect();
        distance_sq += gram.quad_form(&diff);
        let residual: Vec<f64> = sys.matrix.mul_vec(cy).iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
        residual_sq += norm2(&gram_chol.solve_lower(&residual)?).powi(2);
    }
    let distance = distance_sq.sqrt();
    let residual_norm = residual_sq.sqrt();
    let rho = spec.first().coercivity();
    let rho2 = spec.second().coercivity();
    let rho_sum = rho + rho2;
    let rho_min = rho.min(rho2);
    let bound_sum = residual_norm / rho_sum;
    let bound_min = residual_norm / rho_min;
    Ok(CollageCheck {
        distance,
        residual_norm,
        rho_sum,
        rho_min,
        bound_sum,
        bound_min,
        holds: distance <= bound_min + COLLAGE_SLACK,
        holds_with_sum: distance <= bound_sum + COLLAGE_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{solve_forward, Lift};

    fn single_row(r0: f64, p: f64, q: f64) -> ResidualModel {
        ResidualModel::new(vec![AffineRow::new(r0, p, q)], SymMatrix::identity(1)).unwrap()
    }

    #[test]
    fn mode_names_round_trip() {
        for m in ObjectiveMode::ALL {
            assert_eq!(m.name().parse::<ObjectiveMode>().unwrap(), m);
        }
        assert!("l3".parse::<ObjectiveMode>().is_err());
        assert_eq!(ObjectiveMode::default(), ObjectiveMode::L2);
    }

    #[test]
    fn zero_model_vanishes_everywhere() {
        let model = ResidualModel::new(vec![AffineRow::default(); 4], SymMatrix::identity(4)).unwrap();
        for mode in ObjectiveMode::ALL {
            assert_eq!(model.objective((1.3, 0.7), mode), 0.0);
        }
        assert!(!model.identifiable());
    }

    #[test]
    fn single_row_root() {
        let model = single_row(-1.0, 1.0, 0.0);
        for mode in ObjectiveMode::ALL {
            assert_eq!(model.objective((1.0, 123.0), mode), 0.0);
        }
    }

    #[test]
    fn dual_norm_with_identity_gram_is_l2() {
        let rows = vec![
            AffineRow::new(0.3, -1.2, 0.5),
            AffineRow::new(-2.0, 0.1, 0.9),
            AffineRow::new(0.7, 0.4, -0.3),
        ];
        let model = ResidualModel::new(rows, SymMatrix::identity(3)).unwrap();
        let l = (1.1, 2.2);
        assert_eq!(
            model.objective(l, ObjectiveMode::DualNorm),
            model.objective(l, ObjectiveMode::L2)
        );
    }

    #[test]
    fn gram_size_must_match() {
        assert!(ResidualModel::new(vec![AffineRow::default(); 2], SymMatrix::identity(3)).is_err());
    }

    #[test]
    fn box_validation() {
        assert!(BoxConstraint::new((1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(BoxConstraint::new((2.0, 1.0), (0.0, 1.0)).is_err());
        let b = BoxConstraint::default();
        assert_eq!(b.project((0.1, 5.0)), (0.5, 3.0));
        assert!(b.contains((std::f64::consts::E, std::f64::consts::FRAC_PI_2)));
    }

    #[test]
    fn grid_tie_break_prefers_lowest_lambdas() {
        // constant objective: every grid point ties
        let model = ResidualModel::new(vec![AffineRow::new(1.0, 0.0, 0.0); 2], SymMatrix::identity(2)).unwrap();
        let r = minimize(&model, &BoxConstraint::default(), ObjectiveMode::L1, &MinimizeSettings::default()).unwrap();
        assert_eq!(r.diagnostics.grid_best.lambda, (0.5, 0.5));
        assert_eq!(r.lambda, (0.5, 0.5));
        assert!(!r.diagnostics.identifiable);
    }

    #[test]
    fn grid_rejects_degenerate_size() {
        let model = single_row(0.0, 1.0, 1.0);
        let s = MinimizeSettings {
            grid: 1,
            ..Default::default()
        };
        assert!(minimize(&model, &BoxConstraint::default(), ObjectiveMode::L2, &s).is_err());
    }

    #[test]
    fn nelder_mead_finds_interior_minimum() {
        // l1 with two rows has a kink minimum at (1.234, 2.345)
        let rows = vec![AffineRow::new(-1.234, 1.0, 0.0), AffineRow::new(-2.345, 0.0, 1.0)];
        let model = ResidualModel::new(rows, SymMatrix::identity(2)).unwrap();
        let r = minimize(&model, &BoxConstraint::default(), ObjectiveMode::L1, &MinimizeSettings::default()).unwrap();
        assert!((r.lambda.0 - 1.234).abs() < 1e-5 && (r.lambda.1 - 2.345).abs() < 1e-5, "{:?}", r.lambda);
        assert_eq!(r.diagnostics.source, Source::NelderMead);
    }

    #[test]
    fn closed_form_wins_for_l2() {
        let rows = vec![AffineRow::new(-1.234, 1.0, 0.0), AffineRow::new(-2.345, 0.0, 1.0)];
        let model = ResidualModel::new(rows, SymMatrix::identity(2)).unwrap();
        let r = minimize(&model, &BoxConstraint::default(), ObjectiveMode::L2, &MinimizeSettings::default()).unwrap();
        assert_eq!(r.diagnostics.source, Source::ClosedForm);
        assert!((r.lambda.0 - 1.234).abs() < 1e-14);
        assert!(r.value < 1e-14);
    }

    #[test]
    fn minimum_on_the_boundary() {
        // minimizer (0.1, 5.0) lies outside; the box optimum is its projection
        let rows = vec![AffineRow::new(-0.1, 1.0, 0.0), AffineRow::new(-5.0, 0.0, 1.0)];
        let model = ResidualModel::new(rows, SymMatrix::identity(2)).unwrap();
        for mode in ObjectiveMode::ALL.into_iter().filter(|m| *m != ObjectiveMode::AbsSum) {
            let r = minimize(&model, &BoxConstraint::default(), mode, &MinimizeSettings::default()).unwrap();
            assert!((r.lambda.0 - 0.5).abs() < 1e-6 && (r.lambda.1 - 3.0).abs() < 1e-6, "{mode}: {:?}", r.lambda);
        }
    }

    #[test]
    fn zero_target_gives_zero_triples() {
        let zero = Expression::parse("0").unwrap();
        let lift = Lift { left: 0.0, right: 0.0 };
        let target = GalerkinSolution::new(vec![0.0; 7], vec![0.0; 7], lift, lift).unwrap();
        let model = build_residual(&target, 7, &zero, &zero).unwrap();
        assert!(model.rows().iter().all(|r| *r == AffineRow::default()));
        let r = minimize(&model, &BoxConstraint::default(), ObjectiveMode::L2, &MinimizeSettings::default()).unwrap();
        assert!(!r.diagnostics.identifiable);
        assert_eq!(r.diagnostics.closed_form, None);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn exact_target_has_zero_residual() {
        let spec = ProblemSpec::benchmark();
        let target = solve_forward(&spec, 15).unwrap();
        let model = build_residual(&target, 7, &spec.first().source, &spec.second().source).unwrap();
        let v = model.objective(spec.lambdas(), ObjectiveMode::L2);
        assert!(v <= 1e-9, "{v}");
    }

    #[test]
    fn collage_rejects_mismatches() {
        let spec = ProblemSpec::benchmark();
        let y = solve_forward(&spec, 7).unwrap();
        assert!(matches!(collage_bound_check(&spec, &y, 15), Err(Error::Dimension(_))));
        let other = GalerkinSolution::new(
            y.coeffs(Component::First).to_vec(),
            y.coeffs(Component::Second).to_vec(),
            Lift { left: 0.0, right: 0.0 },
            y.lift(Component::Second),
        )
        .unwrap();
        assert!(matches!(collage_bound_check(&spec, &other, 7), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn collage_at_solution() {
        let spec = ProblemSpec::benchmark();
        let y = solve_forward(&spec, 15).unwrap();
        let c = collage_bound_check(&spec, &y, 15).unwrap();
        assert!(c.distance < 1e-14 && c.residual_norm < 1e-12);
        assert!(c.holds && c.holds_with_sum);
        assert_eq!(c.rho_min, 1.0);
        assert_eq!(c.rho_sum, 2.0);
    }
}
