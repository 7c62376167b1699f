use std::fmt::Write as _;

use galerkin_collage::forward::{spec_error_report, Component, ErrorReport};
use galerkin_collage::{build_residual, minimize, solve_forward, GalerkinSolution, MinimizeSettings, ObjectiveMode};
use rayon::prelude::*;

use crate::config::{RunConfig, FORWARD_DIMENSIONS, INVERSE_TARGETS};

pub const FORWARD_HEADER: &str = "m,err_u_L2,err_v_L2,err_du_L2,err_dv_L2,err_u_H1,err_v_H1";
pub const INVERSE_HEADER: &str = "target_m,n,mode,lambda1_hat,lambda2_hat,objective_value";
pub const PLOT_POINTS: usize = 1024;

/// Nine significant digits, `.` decimal separator.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.8e}")
}

#[derive(Debug, Clone)]
pub struct ForwardOutput {
    pub reports: Vec<ErrorReport>,
    pub csv: String,
    pub plot: String,
}

/// Solves for each dimension in the config and reports errors against the
/// exact solutions. Dimensions are solved in parallel; rows keep config order.
pub fn cmd_forward(config: &RunConfig) -> galerkin_collage::Result<ForwardOutput> {
    let dims = config.forward_dimensions();
    let solved = dims
        .par_iter()
        .map(|&m| {
            let sol = solve_forward(&config.spec, m)?;
            let report = spec_error_report(&config.spec, &sol)?;
            Ok((sol, report))
        })
        .collect::<galerkin_collage::Result<Vec<_>>>()?;

    let mut csv = String::new();
    writeln!(csv, "{FORWARD_HEADER}").unwrap();
    for (_, r) in &solved {
        let (u, v) = (r.row(Component::First), r.row(Component::Second));
        let cols = [u.l2, v.l2, u.deriv_l2, v.deriv_l2, u.h1, v.h1].map(fmt_real);
        writeln!(csv, "{},{}", r.m, cols.join(",")).unwrap();
    }
    let solutions: Vec<&GalerkinSolution> = solved.iter().map(|(s, _)| s).collect();
    let plot = plot_data(config, &solutions)?;
    Ok(ForwardOutput {
        reports: solved.into_iter().map(|(_, r)| r).collect(),
        csv,
        plot,
    })
}

/// gnuplot data: one block per dimension, separated by two blank lines, with
/// columns `x u_m v_m u v u_m' v_m'`. Missing exact solutions print `nan`.
pub fn plot_data(config: &RunConfig, solutions: &[&GalerkinSolution]) -> galerkin_collage::Result<String> {
    let mut out = String::new();
    for (b, sol) in solutions.iter().enumerate() {
        if b > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# m = {}", sol.dimension()).unwrap();
        writeln!(out, "# x u_m v_m u v du_m dv_m").unwrap();
        for i in 0..PLOT_POINTS {
            let x = i as f64 / (PLOT_POINTS - 1) as f64;
            let p = sol.evaluate(x)?;
            let exact = |c: Component| -> galerkin_collage::Result<String> {
                match &config.spec.equation(c).exact {
                    Some(e) => Ok(fmt_real(e.evaluate(x)?)),
                    None => Ok("nan".to_string()),
                }
            };
            writeln!(
                out,
                "{} {} {} {} {} {} {}",
                fmt_real(x),
                fmt_real(p.u),
                fmt_real(p.v),
                exact(Component::First)?,
                exact(Component::Second)?,
                fmt_real(p.du),
                fmt_real(p.dv)
            )
            .unwrap();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseRow {
    pub target_m: usize,
    pub n: usize,
    pub mode: ObjectiveMode,
    pub lambda: (f64, f64),
    pub value: f64,
    pub identifiable: bool,
}

#[derive(Debug, Clone)]
pub struct InverseOutput {
    pub rows: Vec<InverseRow>,
    pub csv: String,
}

/// For each target dimension: forward-solve at the configured λ, build the
/// residual model with `n` test functions and minimize it over the box.
pub fn cmd_inverse(config: &RunConfig) -> galerkin_collage::Result<InverseOutput> {
    let settings = MinimizeSettings {
        grid: config.grid,
        ..MinimizeSettings::default()
    };
    let rows = config
        .inverse_targets()
        .par_iter()
        .map(|&m| {
            let target = solve_forward(&config.spec, m)?;
            let model = build_residual(
                &target,
                config.n,
                &config.spec.first().source,
                &config.spec.second().source,
            )?;
            let r = minimize(&model, &config.bounds, config.mode, &settings)?;
            Ok(InverseRow {
                target_m: m,
                n: config.n,
                mode: config.mode,
                lambda: r.lambda,
                value: r.value,
                identifiable: r.diagnostics.identifiable,
            })
        })
        .collect::<galerkin_collage::Result<Vec<_>>>()?;

    let mut csv = String::new();
    writeln!(csv, "{INVERSE_HEADER}").unwrap();
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.target_m,
            r.n,
            r.mode,
            fmt_real(r.lambda.0),
            fmt_real(r.lambda.1),
            fmt_real(r.value)
        )
        .unwrap();
    }
    Ok(InverseOutput { rows, csv })
}

/// Benchmark config with the forward dimensions pinned.
pub fn table1_config() -> RunConfig {
    RunConfig {
        m: Some(FORWARD_DIMENSIONS.to_vec()),
        ..RunConfig::benchmark()
    }
}

/// Benchmark config with the inverse targets pinned.
pub fn table2_config() -> RunConfig {
    RunConfig {
        m: Some(INVERSE_TARGETS.to_vec()),
        ..RunConfig::benchmark()
    }
}
