//! Galerkin solver for the two decoupled Dirichlet problems.
//!
//! Each unknown is split as `u = u_b + Σ c_k g_{k+2}` with the affine lift
//! `u_b(x) = α + (β - α) x`. Testing against `g_{l+2}` gives
//! `(I + λ M) c = F - λ L`, where `M` is the Schauder mass matrix, `F_l = ∫ w g_{l+2}`
//! and `L_l = ∫ u_b g_{l+2}`; the lift's derivative term drops because
//! `∫ g_{l+2}' = 0`.

use std::fmt;

use rayon::prelude::*;

use crate::basis::{interior_basis, load_with, mass_between, piecewise_linear_product, SchauderFn};
use crate::expr::Expression;
use crate::linalg::{Cholesky, SymMatrix};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

pub const MAX_DIMENSION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    First,
    Second,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::First, Component::Second];

    pub fn index(self) -> usize {
        match self {
            Component::First => 0,
            Component::Second => 1,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::First => "first",
            Component::Second => "second",
        })
    }
}

/// One equation `-w'' + λ w = source`, `w(0) = left`, `w(1) = right`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    pub lambda: f64,
    pub left: f64,
    pub right: f64,
    pub source: Expression,
    pub exact: Option<Expression>,
}

impl EquationSpec {
    pub fn lift(&self) -> Lift {
        Lift {
            left: self.left,
            right: self.right,
        }
    }

    /// Coercivity constant of `∫ w'² + λ ∫ w²` in the H¹ norm.
    pub fn coercivity(&self) -> f64 {
        self.lambda.min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    equations: [EquationSpec; 2],
}

impl ProblemSpec {
    pub fn new(first: EquationSpec, second: EquationSpec) -> Result<Self> {
        for (eq, c) in [(&first, Component::First), (&second, Component::Second)] {
            if !(eq.lambda > 0.0 && eq.lambda.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "lambda of the {c} equation must be positive and finite, got {}",
                    eq.lambda
                )));
            }
            if !eq.left.is_finite() || !eq.right.is_finite() {
                return Err(Error::InvalidSpec(format!("boundary values of the {c} equation must be finite")));
            }
        }
        Ok(ProblemSpec {
            equations: [first, second],
        })
    }

    /// The coupled benchmark with `(λ₁, λ₂) = (e, π/2)` and exact solutions
    /// `u = exp(x²/10)`, `v = sin((x+1)²)`.
    pub fn benchmark() -> Self {
        let parse = |s: &str| Expression::parse(s).expect("benchmark expression parses");
        let first = EquationSpec {
            lambda: std::f64::consts::E,
            left: 1.0,
            right: 0.1f64.exp(),
            source: parse(BENCHMARK_F),
            exact: Some(parse(BENCHMARK_U)),
        };
        let second = EquationSpec {
            lambda: std::f64::consts::FRAC_PI_2,
            left: 1f64.sin(),
            right: 4f64.sin(),
            source: parse(BENCHMARK_G),
            exact: Some(parse(BENCHMARK_V)),
        };
        ProblemSpec::new(first, second).expect("benchmark is valid")
    }

    pub fn equation(&self, c: Component) -> &EquationSpec {
        &self.equations[c.index()]
    }

    pub fn first(&self) -> &EquationSpec {
        &self.equations[0]
    }

    pub fn second(&self) -> &EquationSpec {
        &self.equations[1]
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.equations[0].lambda, self.equations[1].lambda)
    }

    pub fn with_lambdas(&self, l1: f64, l2: f64) -> Result<Self> {
        let mut first = self.equations[0].clone();
        let mut second = self.equations[1].clone();
        first.lambda = l1;
        second.lambda = l2;
        ProblemSpec::new(first, second)
    }
}

pub const BENCHMARK_F: &str = "(e - 1/5)*exp(x^2/10) - (x^2/25)*exp(x^2/10)";
pub const BENCHMARK_G: &str = "-2*cos((x+1)^2) + (pi/2)*sin((x+1)^2) + 4*(1+x)^2*sin((x+1)^2)";
pub const BENCHMARK_U: &str = "exp(x^2/10)";
pub const BENCHMARK_V: &str = "sin((x+1)^2)";

/// Affine boundary lift `left + (right - left) x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    pub left: f64,
    pub right: f64,
}

impl Lift {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.left + (self.right - self.left) * x
    }

    #[inline]
    pub fn slope(&self) -> f64 {
        self.right - self.left
    }

    /// Exact `∫ lift · g`.
    pub fn moment(&self, g: &SchauderFn) -> f64 {
        let (lo, hi) = g.support();
        piecewise_linear_product(|x| self.eval(x), |x| g.eval_unchecked(x), lo, hi, &g.breakpoints())
    }
}

/// Values of both approximations and their derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionPoint {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSolution {
    m: usize,
    coeffs: [Vec<f64>; 2],
    lifts: [Lift; 2],
    basis: Vec<SchauderFn>,
}

impl GalerkinSolution {
    pub fn new(coeffs_u: Vec<f64>, coeffs_v: Vec<f64>, lift_u: Lift, lift_v: Lift) -> Result<Self> {
        let m = coeffs_u.len();
        if coeffs_v.len() != m {
            return Err(Error::Dimension(format!(
                "coefficient vectors have lengths {m} and {}",
                coeffs_v.len()
            )));
        }
        Ok(GalerkinSolution {
            m,
            coeffs: [coeffs_u, coeffs_v],
            lifts: [lift_u, lift_v],
            basis: interior_basis(m),
        })
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self, c: Component) -> &[f64] {
        &self.coeffs[c.index()]
    }

    pub fn lift(&self, c: Component) -> Lift {
        self.lifts[c.index()]
    }

    pub fn value(&self, c: Component, x: f64) -> f64 {
        let i = c.index();
        self.lifts[i].eval(x)
            + self.coeffs[i]
                .iter()
                .zip(&self.basis)
                .filter(|(ck, _)| **ck != 0.0)
                .map(|(ck, g)| ck * g.eval_unchecked(x))
                .sum::<f64>()
    }

    pub fn derivative(&self, c: Component, x: f64) -> f64 {
        let i = c.index();
        self.lifts[i].slope()
            + self.coeffs[i]
                .iter()
                .zip(&self.basis)
                .filter(|(ck, _)| **ck != 0.0)
                .map(|(ck, g)| ck * g.deriv_unchecked(x))
                .sum::<f64>()
    }

    pub fn evaluate(&self, x: f64) -> Result<SolutionPoint> {
        if !(0.0..=1.0).contains(&x) {
            return Err(crate::basis::BasisError::OutOfDomain(x).into());
        }
        Ok(SolutionPoint {
            u: self.value(Component::First, x),
            v: self.value(Component::Second, x),
            du: self.derivative(Component::First, x),
            dv: self.derivative(Component::Second, x),
        })
    }

    /// Exact `∫ w_m g` of one component against a Schauder function.
    pub fn moment(&self, c: Component, g: &SchauderFn) -> f64 {
        let i = c.index();
        self.lifts[i].moment(g)
            + self.coeffs[i]
                .iter()
                .zip(&self.basis)
                .map(|(cl, gl)| cl * mass_between(gl, g))
                .sum::<f64>()
    }
}

/// Schauder mass matrix `M_kl = ∫ g_{k+2} g_{l+2}` for `k, l = 1..m`.
pub fn mass_matrix(m: usize) -> SymMatrix {
    let basis = interior_basis(m);
    SymMatrix::from_lower_fn(m, |i, j| mass_between(&basis[i], &basis[j]))
}

/// `I + M`, the H¹ Gram matrix of `{g_3, …, g_{m+2}}`.
pub fn h1_gram(m: usize) -> SymMatrix {
    SymMatrix::identity(m).add_scaled(1.0, &mass_matrix(m))
}

/// Load vector `∫ w g_{k+2}`, `k = 1..m`.
pub fn load_vector(source: &Expression, m: usize, rule: &QuadratureRule) -> Result<Vec<f64>> {
    interior_basis(m)
        .iter()
        .map(|g| load_with(g, |x| source.evaluate(x).map_err(Error::from), rule))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: SymMatrix,
    pub rhs: Vec<f64>,
}

/// Galerkin system of one equation. `lambda` is not validated here, so the
/// degenerate `λ = 0` case can be assembled.
pub fn assemble_equation(eq: &EquationSpec, m: usize, rule: &QuadratureRule) -> Result<LinearSystem> {
    let mass = mass_matrix(m);
    assemble_with_mass(eq, &mass, rule)
}

fn assemble_with_mass(eq: &EquationSpec, mass: &SymMatrix, rule: &QuadratureRule) -> Result<LinearSystem> {
    let m = mass.order();
    let matrix = SymMatrix::identity(m).add_scaled(eq.lambda, mass);
    let lift = eq.lift();
    let loads = load_vector(&eq.source, m, rule)?;
    let rhs = interior_basis(m)
        .iter()
        .zip(loads)
        .map(|(g, f)| f - eq.lambda * lift.moment(g))
        .collect();
    Ok(LinearSystem { matrix, rhs })
}

pub fn assemble(spec: &ProblemSpec, m: usize, c: Component) -> Result<(SymMatrix, Vec<f64>)> {
    check_dimension(m)?;
    let sys = assemble_equation(spec.equation(c), m, &QuadratureRule::for_dimension(m))?;
    Ok((sys.matrix, sys.rhs))
}

fn check_dimension(m: usize) -> Result<()> {
    if !(1..=MAX_DIMENSION).contains(&m) {
        return Err(Error::Dimension(format!("m = {m} outside 1..={MAX_DIMENSION}")));
    }
    Ok(())
}

/// Solves both equations in the span of `{g_3, …, g_{m+2}}`.
pub fn solve_forward(spec: &ProblemSpec, m: usize) -> Result<GalerkinSolution> {
    check_dimension(m)?;
    let rule = QuadratureRule::for_dimension(m);
    let mass = mass_matrix(m);
    let solved: Vec<Vec<f64>> = Component::BOTH
        .par_iter()
        .map(|&c| {
            let sys = assemble_with_mass(spec.equation(c), &mass, &rule)?;
            let coeffs = Cholesky::factor(&sys.matrix)?.solve(&sys.rhs)?;
            if coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpec(format!("non-finite coefficients in the {c} equation")));
            }
            Ok(coeffs)
        })
        .collect::<Result<_>>()?;
    let [cu, cv]: [Vec<f64>; 2] = solved.try_into().expect("two equations");
    GalerkinSolution::new(cu, cv, spec.first().lift(), spec.second().lift())
}

/// L² errors of the value and derivative, and the H¹ error, for one equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub l2: f64,
    pub deriv_l2: f64,
    pub h1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub m: usize,
    pub rows: [ErrorRow; 2],
}

impl ErrorReport {
    pub fn row(&self, c: Component) -> &ErrorRow {
        &self.rows[c.index()]
    }
}

/// A reference function with a derivative, to measure errors against.
pub trait ExactSolution {
    fn value(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64) -> Result<f64>;
}

/// Expressions are differentiated numerically (see [`derivative`]).
impl ExactSolution for Expression {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        derivative(self, x)
    }
}

/// One component of a discrete solution, with its exact derivative.
#[derive(Debug, Clone, Copy)]
pub struct ComponentOf<'a>(pub &'a GalerkinSolution, pub Component);

impl ExactSolution for ComponentOf<'_> {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.0.value(self.1, x))
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.0.derivative(self.1, x))
    }
}

/// Errors against exact solutions given as expressions.
pub fn error_report(sol: &GalerkinSolution, exact_u: &Expression, exact_v: &Expression) -> Result<ErrorReport> {
    error_report_with(sol, exact_u, exact_v)
}

/// L² norms are computed on the default rule for the solution's dimension,
/// whose cells contain every basis kink.
pub fn error_report_with<U, V>(sol: &GalerkinSolution, exact_u: &U, exact_v: &V) -> Result<ErrorReport>
where
    U: ExactSolution + ?Sized,
    V: ExactSolution + ?Sized,
{
    let rule = QuadratureRule::for_dimension(sol.dimension());
    let u = component_errors(sol, Component::First, exact_u, &rule)?;
    let v = component_errors(sol, Component::Second, exact_v, &rule)?;
    Ok(ErrorReport {
        m: sol.dimension(),
        rows: [u, v],
    })
}

pub fn spec_error_report(spec: &ProblemSpec, sol: &GalerkinSolution) -> Result<ErrorReport> {
    let exact_u = spec.first().exact.as_ref().ok_or(Error::MissingExact(Component::First))?;
    let exact_v = spec.second().exact.as_ref().ok_or(Error::MissingExact(Component::Second))?;
    error_report(sol, exact_u, exact_v)
}

fn component_errors<X>(sol: &GalerkinSolution, c: Component, exact: &X, rule: &QuadratureRule) -> Result<ErrorRow>
where
    X: ExactSolution + ?Sized,
{
    let l2_sq = rule.try_integrate(|x| {
        let d = exact.value(x)? - sol.value(c, x);
        Ok::<_, Error>(d * d)
    })?;
    let deriv_sq = rule.try_integrate(|x| {
        let d = exact.derivative(x)? - sol.derivative(c, x);
        Ok::<_, Error>(d * d)
    })?;
    Ok(ErrorRow {
        l2: l2_sq.sqrt(),
        deriv_l2: deriv_sq.sqrt(),
        h1: (l2_sq + deriv_sq).sqrt(),
    })
}

/// Fourth-order finite difference of an expression. Central away from the
/// ends of `[0, 1]`, one-sided within two steps of them so evaluations stay
/// inside the interval.
pub fn derivative(expr: &Expression, x: f64) -> Result<f64> {
    const H: f64 = 1e-3;
    let f = |t: f64| expr.evaluate(t).map_err(Error::from);
    if x - 2.0 * H >= 0.0 && x + 2.0 * H <= 1.0 {
        Ok((f(x - 2.0 * H)? - 8.0 * f(x - H)? + 8.0 * f(x + H)? - f(x + 2.0 * H)?) / (12.0 * H))
    } else {
        let s = if x - 2.0 * H < 0.0 { 1.0 } else { -1.0 };
        let h = s * H;
        Ok((-25.0 * f(x)? + 48.0 * f(x + h)? - 36.0 * f(x + 2.0 * h)? + 16.0 * f(x + 3.0 * h)?
            - 3.0 * f(x + 4.0 * h)?)
            / (12.0 * h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_source(lambda: f64, left: f64, right: f64) -> EquationSpec {
        EquationSpec {
            lambda,
            left,
            right,
            source: Expression::parse("0").unwrap(),
            exact: None,
        }
    }

    #[test]
    fn rejects_non_positive_lambda() {
        let a = zero_source(0.0, 0.0, 0.0);
        let b = zero_source(1.0, 0.0, 0.0);
        assert!(matches!(ProblemSpec::new(a, b), Err(Error::InvalidSpec(_))));
        let a = zero_source(1.0, 0.0, 0.0);
        let b = zero_source(-2.0, 0.0, 0.0);
        assert!(ProblemSpec::new(a, b).is_err());
    }

    #[test]
    fn zero_lambda_gives_identity() {
        let eq = zero_source(0.0, 0.0, 0.0);
        let sys = assemble_equation(&eq, 15, &QuadratureRule::for_dimension(15)).unwrap();
        assert_eq!(sys.matrix, SymMatrix::identity(15));
    }

    #[test]
    fn single_unknown_closed_form() {
        let spec = ProblemSpec::benchmark();
        let (a, b) = assemble(&spec, 1, Component::First).unwrap();
        let lambda = std::f64::consts::E;
        assert!((a.get(0, 0) - (1.0 + lambda / 12.0)).abs() < 1e-15);
        // rhs from an independent trapezoid sum of (f - λ u_b) g_3
        let f = Expression::parse(BENCHMARK_F).unwrap();
        let lift = spec.first().lift();
        let g3 = SchauderFn::new(3).unwrap();
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * (f.evaluate(x).unwrap() - lambda * lift.eval(x)) * g3.eval(x).unwrap();
        }
        let b_oracle = acc * h;
        assert!((b[0] - b_oracle).abs() < 1e-9, "{} vs {}", b[0], b_oracle);
        let sol = solve_forward(&spec, 1).unwrap();
        let expected = b[0] / (1.0 + lambda / 12.0);
        assert!((sol.coeffs(Component::First)[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_data_gives_zero_coefficients() {
        let spec = ProblemSpec::new(zero_source(2.0, 0.0, 0.0), zero_source(0.5, 0.0, 0.0)).unwrap();
        let sol = solve_forward(&spec, 31).unwrap();
        assert!(sol.coeffs(Component::First).iter().all(|&c| c == 0.0));
        assert!(sol.coeffs(Component::Second).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn affine_exact_solution_needs_no_correction() {
        // u = 1 + 2x solves -u'' + 3u = 3 + 6x with u(0) = 1, u(1) = 3.
        let eq = EquationSpec {
            lambda: 3.0,
            left: 1.0,
            right: 3.0,
            source: Expression::parse("3 + 6*x").unwrap(),
            exact: Some(Expression::parse("1 + 2*x").unwrap()),
        };
        let sys = assemble_equation(&eq, 15, &QuadratureRule::for_dimension(15)).unwrap();
        assert!(sys.rhs.iter().all(|b| b.abs() < 1e-15), "{:?}", sys.rhs);
        let spec = ProblemSpec::new(eq.clone(), eq).unwrap();
        let sol = solve_forward(&spec, 15).unwrap();
        assert!(sol.coeffs(Component::First).iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn boundary_values_are_interpolated() {
        let spec = ProblemSpec::benchmark();
        let sol = solve_forward(&spec, 7).unwrap();
        let p0 = sol.evaluate(0.0).unwrap();
        let p1 = sol.evaluate(1.0).unwrap();
        assert_eq!((p0.u, p0.v), (1.0, 1f64.sin()));
        assert_eq!((p1.u, p1.v), (0.1f64.exp(), 4f64.sin()));
        assert!(sol.evaluate(1.2).is_err());
    }

    #[test]
    fn zero_coefficients_evaluate_to_lift() {
        let lift = Lift { left: 2.0, right: -1.0 };
        let sol = GalerkinSolution::new(vec![0.0; 3], vec![0.0; 3], lift, lift).unwrap();
        let p = sol.evaluate(0.5).unwrap();
        assert_eq!(p.u, 0.5);
        assert_eq!(p.du, -3.0);
    }

    #[test]
    fn dimension_bounds() {
        let spec = ProblemSpec::benchmark();
        assert!(matches!(solve_forward(&spec, 0), Err(Error::Dimension(_))));
        assert!(matches!(solve_forward(&spec, 257), Err(Error::Dimension(_))));
    }

    #[test]
    fn mismatched_coefficients() {
        let lift = Lift { left: 0.0, right: 0.0 };
        assert!(GalerkinSolution::new(vec![0.0; 3], vec![0.0; 2], lift, lift).is_err());
    }

    #[test]
    fn missing_exact_solution() {
        let spec = ProblemSpec::new(zero_source(1.0, 0.0, 0.0), zero_source(1.0, 0.0, 0.0)).unwrap();
        let sol = solve_forward(&spec, 3).unwrap();
        assert!(matches!(spec_error_report(&spec, &sol), Err(Error::MissingExact(Component::First))));
    }

    #[test]
    fn self_comparison_is_exact() {
        let sol = solve_forward(&ProblemSpec::benchmark(), 15).unwrap();
        let r = error_report_with(&sol, &ComponentOf(&sol, Component::First), &ComponentOf(&sol, Component::Second))
            .unwrap();
        for row in r.rows {
            assert!(row.l2 < 1e-12 && row.deriv_l2 < 1e-12 && row.h1 < 1e-12);
        }
    }

    #[test]
    fn derivative_stencils() {
        let e = Expression::parse("sin((x+1)^2)").unwrap();
        for &x in &[0.0f64, 0.0005, 0.3, 0.9995, 1.0] {
            let exact = 2.0 * (x + 1.0) * ((x + 1.0) * (x + 1.0)).cos();
            assert!((derivative(&e, x).unwrap() - exact).abs() < 1e-9, "x={x}");
        }
    }
}
