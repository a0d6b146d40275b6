//! `twistor`: evaluate, invert and verify the explicit twistor-line
//! families of the Eguchi-Hanson space.
//!
//! Every subcommand is a thin adapter over the library; no numeric logic
//! lives here. Data goes to stdout, diagnostics to stderr.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use twistor_lines::{
    eval_line, limit_curve, solve_line_through, trajectory_map, verify_all, verify_suite,
    ChordalTolerance, Family, LimitDirection, LineParams, ReducibleLimit, SolverTrace,
    SpacePoint, SpherePoint, TwistorError, VerificationPlan,
};

const EXIT_HELP: &str = "exit codes:\n  \
    0  success\n  \
    2  usage error (bad literal, bad flag, unknown suite)\n  \
    3  domain rejection (diagonal point, degenerate fiber, reducible class)\n  \
    4  numerical failure (solver roundtrip above tolerance)";

#[derive(Parser)]
#[command(
    name = "twistor",
    about = "Twistor lines of the Eguchi-Hanson space: curve evaluation, the \
             unique-line solver, symmetry transport, degeneration limits and a \
             numerical verification harness",
    after_help = EXIT_HELP
)]
struct Cli {
    /// Output format for data on stdout (default: json, except trajectory
    /// which defaults to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Chordal tolerance for solver and on-diagonal decisions.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Seed for the verification sampler (TWISTOR_SEED overrides).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Attach solver intermediates to solve output.
    #[arg(long, global = true)]
    trace: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    #[value(alias = "0")]
    Zero,
    #[value(alias = "inf")]
    Infinity,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the curve with parameters (d, a) at t; with --samples,
    /// emit CSV rows along the |t|-circle through t.
    Eval {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        d: SpherePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a: SpherePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        t: SpherePoint,
        /// Sample the curve along the circle of radius |t| in the last
        /// factor (requires t outside 0 and infinity).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Solve for the unique curve of a family through (x, y, t).
    Solve {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: SpherePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y: SpherePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        t: SpherePoint,
        /// Family: m+ or m-.
        #[arg(long, value_parser = parse_family)]
        family: Family,
    },
    /// Run verification suites and print the report.
    Verify {
        /// Samples per suite.
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated |t| shells, e.g. 0.5,1,2.
        #[arg(long)]
        shells: Option<String>,
        /// Run a single suite by name.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Emit CSV tracing the trajectory curve of d in the fiber over t.
    Trajectory {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        d: SpherePoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        t: SpherePoint,
        /// Number of sample points along the x-circle.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Radius of the sampled x-circle.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Print the structured reducible limit of the family at d.
    Limit {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        d: SpherePoint,
        /// Degeneration direction of a: zero or infinity.
        #[arg(long, value_enum)]
        dir: Direction,
    },
}

/// Parses the complex-literal grammar `a+bi` / `a-bi` / `a` / `bi` / `inf`
/// (no whitespace; scientific notation allowed in each part).
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let err = || format!("cannot parse {s:?} as a complex literal (a+bi, a, bi, inf)");
    let body = s.strip_suffix(['i', 'I']);
    let Some(body) = body else {
        let re: f64 = s.parse().map_err(|_| err())?;
        if !re.is_finite() {
            return Err(err());
        }
        return Ok(Complex64::new(re, 0.0));
    };
    // Split the imaginary coefficient off at the last sign that is not an
    // exponent sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-')
            && bytes[i - 1] != b'e'
            && bytes[i - 1] != b'E'
        {
            split = Some(i);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re: f64 = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse().map_err(|_| err())?
    };
    let im: f64 = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| err())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(err());
    }
    Ok(Complex64::new(re, im))
}

fn parse_point(s: &str) -> Result<SpherePoint, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(SpherePoint::infinity());
    }
    parse_complex(s).map(SpherePoint::from_affine)
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s {
        "m+" | "M+" => Ok(Family::Mplus),
        "m-" | "M-" => Ok(Family::Mminus),
        _ => Err(format!("family must be m+ or m-, got {s:?}")),
    }
}

/// Affine value with negative zeros normalized for display.
fn affine_for_display(p: &SpherePoint) -> Option<Complex64> {
    p.to_affine().map(|z| Complex64::new(z.re + 0.0, z.im + 0.0))
}

/// Affine JSON rendering: {re, im} object, or the literal "inf".
fn point_json(p: &SpherePoint) -> Value {
    match affine_for_display(p) {
        Some(z) => json!({ "re": z.re, "im": z.im }),
        None => Value::String("inf".into()),
    }
}

fn point_text(p: &SpherePoint) -> String {
    match affine_for_display(p) {
        None => "inf".into(),
        Some(z) => {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else if z.re == 0.0 {
                format!("{}i", z.im)
            } else if z.im < 0.0 {
                format!("{}-{}i", z.re, -z.im)
            } else {
                format!("{}+{}i", z.re, z.im)
            }
        }
    }
}

fn point_csv(p: &SpherePoint) -> (String, String) {
    match affine_for_display(p) {
        Some(z) => (format!("{}", z.re), format!("{}", z.im)),
        None => ("inf".into(), "inf".into()),
    }
}

fn print_sorted_json(value: &Value) {
    // serde_json maps are ordered; building through Value keeps keys sorted.
    println!("{}", serde_json::to_string_pretty(value).expect("valid json"));
}

fn params_json(p: &LineParams) -> Value {
    json!({ "a": point_json(&p.a()), "d": point_json(&p.d()), "class": format!("{:?}", p.classify()) })
}

fn trace_json(trace: &SolverTrace) -> Value {
    json!({
        "b": point_json(&trace.b),
        "c_candidates": [point_json(&trace.c_candidates[0]), point_json(&trace.c_candidates[1])],
        "chosen_family": trace.chosen_family.to_string(),
        "ill_conditioned": trace.ill_conditioned,
        "params_candidates": [
            params_json(&trace.params_candidates[0]),
            params_json(&trace.params_candidates[1]),
        ],
    })
}

fn space_rows(points: &[SpacePoint]) -> String {
    let mut out = String::from("t_re,t_im,x_re,x_im,y_re,y_im\n");
    for p in points {
        let (tr, ti) = point_csv(&p.t);
        let (xr, xi) = point_csv(&p.x);
        let (yr, yi) = point_csv(&p.y);
        out.push_str(&format!("{tr},{ti},{xr},{xi},{yr},{yi}\n"));
    }
    out
}

fn limit_json(limit: &ReducibleLimit) -> Value {
    let comp = |c: &twistor_lines::CurveComponent| {
        json!({
            "anchor": {
                "t": point_json(&c.anchor.t),
                "x": point_json(&c.anchor.x),
                "y": point_json(&c.anchor.y),
            },
            "degree": c.degree,
        })
    };
    json!({
        "direction": match limit.direction {
            LimitDirection::TowardZero => "zero",
            LimitDirection::TowardInfinity => "infinity",
        },
        "extra_components": [comp(&limit.extra_components[0]), comp(&limit.extra_components[1])],
        "vertical": params_json(&limit.vertical),
        "vertical_degree": [0, 0, 1],
    })
}

fn exit_for(err: &TwistorError) -> u8 {
    match err {
        TwistorError::NumericalFailure { .. } => 4,
        TwistorError::InvalidPlan(_)
        | TwistorError::InvalidTolerance(_)
        | TwistorError::InvalidRadius(_)
        | TwistorError::InvalidPoint => 2,
        _ => 3,
    }
}

fn fail(err: &TwistorError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_for(err))
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tolerance = match ChordalTolerance::new(cli.tolerance.unwrap_or(1e-9)) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    let seed = std::env::var("TWISTOR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .or(cli.seed)
        .unwrap_or(42);

    let format = cli.format.unwrap_or(match cli.command {
        Command::Trajectory { .. } => Format::Csv,
        _ => Format::Json,
    });

    match cli.command {
        Command::Eval { d, a, t, samples } => {
            let params = LineParams::new(d, a);
            if let Some(n) = samples {
                if n == 0 {
                    return usage("samples must be positive");
                }
                let radius = match t.to_affine() {
                    Some(z) if z.norm() > 0.0 => z.norm(),
                    _ => return usage("t-path sampling needs t outside 0 and infinity"),
                };
                let ts: Vec<SpherePoint> = (0..n)
                    .map(|k| {
                        SpherePoint::from_affine(Complex64::from_polar(
                            radius,
                            std::f64::consts::TAU * k as f64 / n as f64,
                        ))
                    })
                    .collect();
                match twistor_lines::curve_csv(&params, &ts) {
                    Ok(csv) => print!("{csv}"),
                    Err(e) => return fail(&e),
                }
                return ExitCode::SUCCESS;
            }
            let point = match eval_line(&params, &t) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            match format {
                Format::Json => print_sorted_json(&json!({
                    "t": point_json(&point.t),
                    "x": point_json(&point.x),
                    "y": point_json(&point.y),
                })),
                Format::Csv => print!("{}", space_rows(&[point])),
                Format::Table => {
                    println!("x = {}", point_text(&point.x));
                    println!("y = {}", point_text(&point.y));
                    println!("t = {}", point_text(&point.t));
                }
            }
            ExitCode::SUCCESS
        }
        Command::Solve { x, y, t, family } => {
            let p = SpacePoint::new(x, y, t);
            let (params, trace) = match solve_line_through(&p, family, &tolerance) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            match format {
                Format::Json => {
                    let mut obj = Map::new();
                    obj.insert("a".into(), point_json(&params.a()));
                    obj.insert("class".into(), json!(format!("{:?}", params.classify())));
                    obj.insert("d".into(), point_json(&params.d()));
                    obj.insert("family".into(), json!(family.to_string()));
                    if cli.trace {
                        obj.insert("trace".into(), trace_json(&trace));
                    }
                    print_sorted_json(&Value::Object(obj));
                }
                Format::Csv => {
                    let (dr, di) = point_csv(&params.d());
                    let (ar, ai) = point_csv(&params.a());
                    println!("d_re,d_im,a_re,a_im");
                    println!("{dr},{di},{ar},{ai}");
                }
                Format::Table => {
                    println!("d = {}", point_text(&params.d()));
                    println!("a = {}", point_text(&params.a()));
                    println!("class = {:?}", params.classify());
                    if cli.trace {
                        println!("b = {}", point_text(&trace.b));
                        println!(
                            "c = {} | {}",
                            point_text(&trace.c_candidates[0]),
                            point_text(&trace.c_candidates[1])
                        );
                        println!("ill_conditioned = {}", trace.ill_conditioned);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Command::Verify {
            samples,
            shells,
            suite,
        } => {
            let mut plan = VerificationPlan {
                seed,
                ..VerificationPlan::default()
            };
            if let Some(n) = samples {
                plan.samples_per_suite = n;
            }
            if let Some(shell_list) = shells {
                let parsed: Result<Vec<f64>, _> =
                    shell_list.split(',').map(|s| s.trim().parse::<f64>()).collect();
                match parsed {
                    Ok(list) if !list.is_empty() => plan.t_shells = list,
                    _ => return usage(&format!("cannot parse shells {shell_list:?}")),
                }
            }
            let report = match suite {
                Some(name) => match verify_suite(&plan, &name) {
                    Ok(s) => twistor_lines::VerificationReport {
                        plan: plan.clone(),
                        status: s.status,
                        suites: vec![s],
                    },
                    Err(e) => return fail(&e),
                },
                None => match verify_all(&plan) {
                    Ok(r) => r,
                    Err(e) => return fail(&e),
                },
            };
            match format {
                Format::Table => print!("{}", report.render_table()),
                _ => println!("{}", report.to_json()),
            }
            if report.status == twistor_lines::Status::Pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Trajectory {
            d,
            t,
            samples,
            radius,
        } => {
            if samples == 0 {
                return usage("samples must be positive");
            }
            if !(radius.is_finite() && radius > 0.0) {
                return usage("radius must be positive");
            }
            let map = match trajectory_map(&d, &t) {
                Ok(m) => m,
                // A degenerate fiber is a usage error for trajectory output.
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let points: Vec<SpacePoint> = (0..samples)
                .map(|k| {
                    let x = SpherePoint::from_affine(Complex64::from_polar(
                        radius,
                        std::f64::consts::TAU * k as f64 / samples as f64,
                    ));
                    SpacePoint::new(x, map.apply(&x), t)
                })
                .collect();
            match format {
                Format::Json => {
                    let rows: Vec<Value> = points
                        .iter()
                        .map(|p| {
                            json!({
                                "t": point_json(&p.t),
                                "x": point_json(&p.x),
                                "y": point_json(&p.y),
                            })
                        })
                        .collect();
                    print_sorted_json(&Value::Array(rows));
                }
                _ => print!("{}", space_rows(&points)),
            }
            ExitCode::SUCCESS
        }
        Command::Limit { d, dir } => {
            let limit = limit_curve(
                &d,
                match dir {
                    Direction::Zero => LimitDirection::TowardZero,
                    Direction::Infinity => LimitDirection::TowardInfinity,
                },
            );
            match format {
                Format::Table => {
                    println!(
                        "vertical: d = {}, degree (0,0,1)",
                        point_text(&limit.vertical.d())
                    );
                    for c in &limit.extra_components {
                        println!(
                            "component degree ({},{},{}) through (x,y,t) = ({}, {}, {})",
                            c.degree[0],
                            c.degree[1],
                            c.degree[2],
                            point_text(&c.anchor.x),
                            point_text(&c.anchor.y),
                            point_text(&c.anchor.t),
                        );
                    }
                }
                _ => print_sorted_json(&limit_json(&limit)),
            }
            ExitCode::SUCCESS
        }
    }
}
