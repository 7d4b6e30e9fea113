//! Command implementations.

use crate::out::{csv_field, csv_header, num, Sink};
use crate::{svg, Cli, CliError, Command, CriterionArg, GammaParamArg, SidedArg};
use alloc_design_core::reference::{
    deficit_sweep_figure, power_curve_figure, BINOMIAL_ALLOCATION_ROWS, GAMMA_ALLOCATION_ROWS,
    MTD_ALLOCATION_ROWS, POISSON_ALLOCATION_ROWS,
};
use alloc_design_core::{
    allocation_to_count, bahadur_allocation_closed_form, bahadur_allocation_numeric,
    bernoulli_neyman_allocation, exact_mtd_error, exact_power, fit_quadratic,
    general_bahadur_allocation, minimal_sample_size, monte_carlo_selection_error,
    mtd_bahadur_allocation, mtd_neyman_allocation, neyman_allocation, optimal_allocation_exact,
    AllocationFraction, Design, MgfModel, MtdSpec, OptimalAllocation, Sided, SuccessPair, TestSpec,
};
use std::path::Path;

const TABLE_TOL: f64 = 1e-8;

fn test_spec(k: f64, sided: SidedArg) -> Result<TestSpec, CliError> {
    Ok(TestSpec::new(
        k,
        match sided {
            SidedArg::One => Sided::One,
            SidedArg::Two => Sided::Two,
        },
    )?)
}

fn parse_model(spec: &str) -> Result<MgfModel, CliError> {
    Ok(spec.parse::<MgfModel>()?)
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let prec = cli.precision;
    let text = match &cli.command {
        Command::Allocate { p_a, p_b, model_a, model_b, criterion, tol } => {
            cmd_allocate(*p_a, *p_b, model_a.as_deref(), model_b.as_deref(), *criterion, *tol, prec)?
        }
        Command::Power { p_a, p_b, n, n_a, k, sided, json } => {
            let pair = SuccessPair::new(*p_a, *p_b)?;
            let design = Design::new(*n, *n_a)?;
            let test = test_spec(*k, *sided)?;
            let power = exact_power(&pair, &design, &test);
            if *json {
                let v = serde_json::json!({
                    "p_a": p_a, "p_b": p_b, "n": n, "n_a": n_a,
                    "k": k, "sided": if *sided == SidedArg::One { "one" } else { "two" },
                    "power": power,
                });
                format!("{v}\n")
            } else {
                format!("power {}\n", num(power, prec))
            }
        }
        Command::OptimalNu { p_a, p_b, n, k, sided, curve, json } => {
            let pair = SuccessPair::new(*p_a, *p_b)?;
            let test = test_spec(*k, *sided)?;
            let opt = optimal_allocation_exact(&pair, *n, &test)?;
            if let Some(path) = curve {
                let mut f = Sink::new(Some(path))?;
                f.write_all(&curve_csv(&opt, prec))?;
            }
            let nu = opt.n_a as f64 / *n as f64;
            if *json {
                let v = serde_json::json!({
                    "n": n, "n_a_star": opt.n_a, "nu_star": nu, "power": opt.power,
                });
                format!("{v}\n")
            } else {
                format!(
                    "NA_star {}\nnu_star {}\npower {}\n",
                    opt.n_a,
                    num(nu, prec),
                    num(opt.power, prec)
                )
            }
        }
        Command::Mtd { p_a, p_b, p0, n, n_a, json } => {
            let spec = MtdSpec::new(*p_a, *p_b, *p0)?;
            let design = Design::new(*n, *n_a)?;
            let err = exact_mtd_error(&spec, &design);
            if *json {
                let v = serde_json::json!({
                    "p_a": p_a, "p_b": p_b, "p0": p0, "n": n, "n_a": n_a,
                    "error_probability": err,
                });
                format!("{v}\n")
            } else {
                format!("error_probability {}\n", num(err, prec))
            }
        }
        Command::MinimalN { p_a, p_b, alpha, beta, rule, n_max, stable_window, json } => {
            let pair = SuccessPair::new(*p_a, *p_b)?;
            let nu = parse_rule(rule, &pair)?;
            let found =
                minimal_sample_size(&pair, *alpha, *beta, |_| nu, *n_max, *stable_window)?;
            match found {
                None => {
                    return Err(CliError::Numerical(format!(
                        "no n <= {n_max} reaches power {beta} at level {alpha}"
                    )))
                }
                Some(n) => {
                    if *json {
                        let v = serde_json::json!({
                            "n": n, "rule": rule, "alpha": alpha, "beta": beta,
                        });
                        format!("{v}\n")
                    } else {
                        format!("n {n}\n")
                    }
                }
            }
        }
        Command::Table { which, gamma_param } => cmd_table(*which, *gamma_param, prec)?,
        Command::Figure { which, grid_step, svg } => {
            cmd_figure(which, *grid_step, svg.as_deref(), prec)?
        }
        Command::Simulate { model_a, model_b, n, n_a, reps, seed, json } => {
            let a = parse_model(model_a)?;
            let b = parse_model(model_b)?;
            let design = Design::new(*n, *n_a)?;
            let mc = monte_carlo_selection_error(&a, &b, &design, *reps, *seed)?;
            if *json {
                let v = serde_json::json!({
                    "model_a": model_a, "model_b": model_b, "n": n, "n_a": n_a,
                    "reps": reps, "seed": seed,
                    "estimate": mc.estimate, "std_error": mc.std_error,
                });
                format!("{v}\n")
            } else {
                format!(
                    "estimate {}\nstd_error {}\n",
                    num(mc.estimate, prec),
                    num(mc.std_error, prec)
                )
            }
        }
    };
    let mut sink = Sink::new(cli.output.as_deref())?;
    sink.write_all(&text)?;
    Ok(())
}

fn cmd_allocate(
    p_a: Option<f64>,
    p_b: Option<f64>,
    model_a: Option<&str>,
    model_b: Option<&str>,
    criterion: CriterionArg,
    tol: f64,
    prec: usize,
) -> Result<String, CliError> {
    let (a, b) = match (p_a, p_b, model_a, model_b) {
        (Some(pa), Some(pb), None, None) => (MgfModel::bernoulli(pa)?, MgfModel::bernoulli(pb)?),
        (None, None, Some(ma), Some(mb)) => (parse_model(ma)?, parse_model(mb)?),
        _ => {
            return Err(CliError::Usage(
                "give either --pA and --pB, or --model-a and --model-b".into(),
            ))
        }
    };
    let bernoulli_pair = match (a, b) {
        (MgfModel::Bernoulli { p: pa }, MgfModel::Bernoulli { p: pb }) => {
            Some(SuccessPair::new(pa, pb)?)
        }
        _ => None,
    };
    match criterion {
        CriterionArg::Neyman => {
            let nu = neyman_allocation(&a, &b);
            Ok(format!("nu_star {}\n", num(nu.value(), prec)))
        }
        CriterionArg::BahadurClosed => {
            let pair = bernoulli_pair.ok_or_else(|| {
                CliError::Usage("the closed form applies to binary responses only".into())
            })?;
            let nu = bahadur_allocation_closed_form(&pair)?;
            Ok(format!("nu_star {}\n", num(nu.value(), prec)))
        }
        CriterionArg::Bahadur => {
            let result = match bernoulli_pair {
                Some(pair) => bahadur_allocation_numeric(&pair, tol)?,
                None => general_bahadur_allocation(&a, &b, tol)?,
            };
            Ok(format!(
                "nu_star {}\nrate {}\n",
                num(result.nu_star.value(), prec),
                num(result.rate_at_min, prec)
            ))
        }
    }
}

fn parse_rule(rule: &str, pair: &SuccessPair) -> Result<AllocationFraction, CliError> {
    match rule {
        "balanced" => Ok(AllocationFraction::balanced()),
        "neyman" => Ok(bernoulli_neyman_allocation(pair)),
        "bahadur" => Ok(bahadur_allocation_closed_form(pair)?),
        other => match other.strip_prefix("fixed:") {
            Some(v) => {
                let nu: f64 = v
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad fixed allocation '{v}'")))?;
                Ok(AllocationFraction::new(nu)?)
            }
            None => Err(CliError::Usage(format!(
                "unknown rule '{other}' (balanced | neyman | bahadur | fixed:<nu>)"
            ))),
        },
    }
}

fn curve_csv(opt: &OptimalAllocation, prec: usize) -> String {
    let mut s = csv_header("optimal-nu");
    s.push_str("n_a,nu,power\n");
    let n = opt.curve.n as f64;
    for pt in &opt.curve.points {
        s.push_str(&format!(
            "{},{},{}\n",
            pt.n_a,
            num(pt.n_a as f64 / n, prec),
            num(pt.power, prec)
        ));
    }
    s
}

fn cmd_table(which: u8, gamma_param: Option<GammaParamArg>, prec: usize) -> Result<String, CliError> {
    let mut s = csv_header("table");
    s.push_str(&format!("# which {which}\n"));
    match which {
        1 => {
            s.push_str("p_a,p_b,bahadur,neyman\n");
            for row in BINOMIAL_ALLOCATION_ROWS {
                let pair = SuccessPair::new(row.p_a, row.p_b)?;
                let bah = bahadur_allocation_closed_form(&pair)?.value();
                let ney = bernoulli_neyman_allocation(&pair).value();
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    row.p_a,
                    row.p_b,
                    num(bah, prec),
                    num(ney, prec)
                ));
            }
        }
        2 => {
            s.push_str("p_a,p_b,p0,bahadur,pitman\n");
            for row in MTD_ALLOCATION_ROWS {
                let spec = MtdSpec::new(row.p_a, row.p_b, row.p0)?;
                let bah = mtd_bahadur_allocation(&spec, TABLE_TOL)?.nu_star.value();
                let pit = mtd_neyman_allocation(&spec.pair()).value();
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.p_a,
                    row.p_b,
                    row.p0,
                    num(bah, prec),
                    num(pit, prec)
                ));
            }
        }
        3 => {
            s.push_str(
                "model_a,model_b,variant,bahadur,neyman,neyman_variance_ratio,bahadur_ref,neyman_ref,note\n",
            );
            for row in POISSON_ALLOCATION_ROWS {
                let a = MgfModel::poisson(row.lambda_a)?;
                let b = MgfModel::poisson(row.lambda_b)?;
                let bah = general_bahadur_allocation(&a, &b, TABLE_TOL)?.nu_star.value();
                let ney = neyman_allocation(&a, &b).value();
                let var_ratio = a.variance() / (a.variance() + b.variance());
                s.push_str(&format!(
                    "{},{},,{},{},{},{},{},\n",
                    csv_field(&a.to_string()),
                    csv_field(&b.to_string()),
                    num(bah, prec),
                    num(ney, prec),
                    num(var_ratio, prec),
                    row.bahadur,
                    row.neyman
                ));
            }
            let variants: &[GammaParamArg] = match gamma_param {
                None => &[GammaParamArg::Scale, GammaParamArg::Rate],
                Some(GammaParamArg::Scale) => &[GammaParamArg::Scale],
                Some(GammaParamArg::Rate) => &[GammaParamArg::Rate],
            };
            for row in GAMMA_ALLOCATION_ROWS {
                for &variant in variants {
                    let (label, a, b) = match variant {
                        GammaParamArg::Scale => (
                            "scale",
                            MgfModel::gamma(row.shape_a, row.second_a)?,
                            MgfModel::gamma(row.shape_b, row.second_b)?,
                        ),
                        GammaParamArg::Rate => (
                            "rate",
                            MgfModel::gamma(row.shape_a, 1.0 / row.second_a)?,
                            MgfModel::gamma(row.shape_b, 1.0 / row.second_b)?,
                        ),
                    };
                    let bah = general_bahadur_allocation(&a, &b, TABLE_TOL)?.nu_star.value();
                    let ney = neyman_allocation(&a, &b).value();
                    let var_ratio = a.variance() / (a.variance() + b.variance());
                    let mut notes = Vec::new();
                    if (bah - row.bahadur).abs() <= 1e-3 {
                        notes.push("bahadur matches the reference value");
                    }
                    if (var_ratio - row.neyman).abs() <= 1e-3 {
                        notes.push("reference neyman equals the variance ratio");
                    }
                    s.push_str(&format!(
                        "{},{},{label},{},{},{},{},{},{}\n",
                        csv_field(&format!("gamma({},{})", row.shape_a, row.second_a)),
                        csv_field(&format!("gamma({},{})", row.shape_b, row.second_b)),
                        num(bah, prec),
                        num(ney, prec),
                        num(var_ratio, prec),
                        row.bahadur,
                        row.neyman,
                        csv_field(&notes.join("; "))
                    ));
                }
            }
        }
        other => return Err(CliError::Usage(format!("unknown table {other} (1, 2 or 3)"))),
    }
    Ok(s)
}

fn cmd_figure(
    which: &str,
    grid_step: f64,
    svg_path: Option<&Path>,
    prec: usize,
) -> Result<String, CliError> {
    match which {
        "3" => figure_power_curve(svg_path, prec),
        "1a" => figure_deficit_sweep(deficit_sweep_figure::N_MODERATE, grid_step, svg_path, prec),
        "1b" => figure_deficit_sweep(deficit_sweep_figure::N_LARGE, grid_step, svg_path, prec),
        other => Err(CliError::Usage(format!("unknown figure '{other}' (1a, 1b or 3)"))),
    }
}

fn figure_power_curve(svg_path: Option<&Path>, prec: usize) -> Result<String, CliError> {
    let pair = SuccessPair::new(power_curve_figure::P_A, power_curve_figure::P_B)?;
    let test = TestSpec::two_sided(power_curve_figure::CRITICAL_VALUE)?;
    let opt = optimal_allocation_exact(&pair, power_curve_figure::N, &test)?;
    let n = power_curve_figure::N as f64;

    let fit_points: Vec<(f64, f64)> = opt
        .curve
        .points
        .iter()
        .map(|pt| (pt.n_a as f64 / n, pt.power))
        .filter(|&(nu, _)| (power_curve_figure::FIT_LO..=power_curve_figure::FIT_HI).contains(&nu))
        .collect();
    let fit = fit_quadratic(&fit_points)?;

    let mut s = csv_header("figure");
    s.push_str("# which 3\n");
    s.push_str(&format!(
        "# params n={} p_a={} p_b={} K={} sided=two\n",
        power_curve_figure::N,
        power_curve_figure::P_A,
        power_curve_figure::P_B,
        power_curve_figure::CRITICAL_VALUE
    ));
    s.push_str(&format!(
        "# fit a={} b={} c={} rmse={} window=[{},{}]\n",
        num(fit.a, prec),
        num(fit.b, prec),
        num(fit.c, prec),
        num(fit.rmse, prec),
        power_curve_figure::FIT_LO,
        power_curve_figure::FIT_HI
    ));
    s.push_str(&format!(
        "# vlines balanced={} bahadur={} neyman={}\n",
        num(power_curve_figure::BALANCED_NU, prec),
        num(power_curve_figure::BAHADUR_NU, prec),
        num(power_curve_figure::NEYMAN_NU, prec)
    ));
    s.push_str("n_a,nu,power\n");
    for pt in &opt.curve.points {
        s.push_str(&format!(
            "{},{},{}\n",
            pt.n_a,
            num(pt.n_a as f64 / n, prec),
            num(pt.power, prec)
        ));
    }

    if let Some(path) = svg_path {
        let scatter: Vec<(f64, f64)> =
            opt.curve.points.iter().map(|pt| (pt.n_a as f64 / n, pt.power)).collect();
        let parabola: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let nu = power_curve_figure::FIT_LO
                    + (power_curve_figure::FIT_HI - power_curve_figure::FIT_LO) * i as f64 / 200.0;
                (nu, fit.a * nu * nu + fit.b * nu + fit.c)
            })
            .collect();
        let series = [
            svg::Series { label: "exact power", color: "#1f6f8b", points: scatter, line: false },
            svg::Series { label: "parabolic fit", color: "#d1495b", points: parabola, line: true },
        ];
        let vlines = [
            (power_curve_figure::BALANCED_NU, "balanced"),
            (power_curve_figure::BAHADUR_NU, "bahadur"),
            (power_curve_figure::NEYMAN_NU, "neyman"),
        ];
        let chart = svg::chart("power vs allocation", "nu", "power", &series, &vlines);
        let mut f = Sink::new(Some(path))?;
        f.write_all(&chart)?;
    }
    Ok(s)
}

fn figure_deficit_sweep(
    n: u64,
    grid_step: f64,
    svg_path: Option<&Path>,
    prec: usize,
) -> Result<String, CliError> {
    const ALLOWED_STEPS: [f64; 3] = [0.01, 0.025, 0.05];
    if !ALLOWED_STEPS.iter().any(|s| (s - grid_step).abs() < 1e-12) {
        return Err(CliError::Usage(format!(
            "grid step {grid_step} must be one of 0.01, 0.025, 0.05"
        )));
    }
    let test = TestSpec::two_sided(deficit_sweep_figure::CRITICAL_VALUE)?;
    let span = deficit_sweep_figure::P_A_MAX - deficit_sweep_figure::P_A_MIN;
    let count = (span / grid_step).round() as u64;

    let mut s = csv_header("figure");
    s.push_str(&format!("# which {}\n", if n == deficit_sweep_figure::N_MODERATE { "1a" } else { "1b" }));
    s.push_str(&format!(
        "# params n={n} K={} sided=two p_b=p_a+{} grid_step={grid_step}\n",
        deficit_sweep_figure::CRITICAL_VALUE,
        deficit_sweep_figure::OFFSET
    ));
    s.push_str("p_a,p_b,max_power,deficit_neyman,deficit_balanced,deficit_bahadur\n");

    let mut rows = Vec::new();
    for i in 0..=count {
        let p_a = deficit_sweep_figure::P_A_MIN + grid_step * i as f64;
        let p_b = p_a + deficit_sweep_figure::OFFSET;
        let pair = SuccessPair::new(p_a, p_b)?;
        let opt = optimal_allocation_exact(&pair, n, &test)?;
        let deficit_at = |nu: f64| -> Result<f64, CliError> {
            let design = Design::new(n, allocation_to_count(n, nu))?;
            Ok((opt.power - exact_power(&pair, &design, &test)).max(0.0))
        };
        let ney = deficit_at(bernoulli_neyman_allocation(&pair).value())?;
        let bal = deficit_at(0.5)?;
        let bah = deficit_at(bahadur_allocation_closed_form(&pair)?.value())?;
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(p_a, 2.min(prec)),
            num(p_b, 2.min(prec)),
            num(opt.power, prec),
            num(ney, prec),
            num(bal, prec),
            num(bah, prec)
        ));
        rows.push((p_a, ney, bal, bah));
    }

    if let Some(path) = svg_path {
        let series = [
            svg::Series {
                label: "neyman",
                color: "#222222",
                points: rows.iter().map(|r| (r.0, r.1)).collect(),
                line: true,
            },
            svg::Series {
                label: "balanced",
                color: "#d1495b",
                points: rows.iter().map(|r| (r.0, r.2)).collect(),
                line: true,
            },
            svg::Series {
                label: "bahadur",
                color: "#1f6f8b",
                points: rows.iter().map(|r| (r.0, r.3)).collect(),
                line: true,
            },
        ];
        let chart = svg::chart("power deficit vs p_a", "p_a", "max power - power", &series, &[]);
        let mut f = Sink::new(Some(path))?;
        f.write_all(&chart)?;
    }
    Ok(s)
}
