//! Command line interface to the eigenline toolkit.
//!
//! One command per process; identical seeds yield byte-identical structured
//! output. Exit codes: 0 on success, 2 when a degenerate or near-degenerate
//! configuration was detected, 1 on errors.

use clap::{Parser, Subcommand, ValueEnum};
use eigenline::cubic3::{self, CubicClass, LineCount};
use eigenline::eigen::{
    self, Completeness, DegreeOpts, EigenLine, SolveOpts, StationaryType,
};
use eigenline::io::{self, FieldTag, InputObject};
use eigenline::odeflow;
use eigenline::scalar::fmt_f64_15;
use eigenline::tensor::PolyMap;
use eigenline::upoly::{self, UnivarPoly};
use num_rational::BigRational;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "eigenline", version, about = "Eigenlines of tensors and homogeneous maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for all randomized searches (deterministic output per seed).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restart budget override for the multistart solvers.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Residual / classification tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Override the field tag of the input document.
    #[arg(long, global = true, value_enum)]
    field: Option<FieldArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bezout count of eigenlines: (m^n - 1)/(m - 1).
    Count { n: usize, m: u32 },
    /// Enumerate the eigenlines of a map document.
    Solve { file: PathBuf },
    /// Full harmonic-cubic pipeline on a form document.
    Cubic3 { file: PathBuf },
    /// Count and isolate real roots of a univariate polynomial.
    Sturm {
        /// Polynomial such as "-1*t^3+3*t^2+3*t-1" (rational coefficients).
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Count within [a, b] instead of the whole line.
        #[arg(long, num_args = 2)]
        range: Option<Vec<String>>,
        /// Isolation interval width.
        #[arg(long, default_value = "1/1048576")]
        width: String,
    },
    /// Brouwer degree of a map document (global when no target is given).
    Degree {
        file: PathBuf,
        /// Target point, comma separated.
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<f64>>,
    },
    /// Differential-equation views of a homogeneous map.
    Ode {
        #[command(subcommand)]
        sub: OdeCmd,
    },
}

#[derive(Subcommand)]
enum OdeCmd {
    /// Closed-form ray solution along one eigenline.
    Ray {
        file: PathBuf,
        /// Index into the canonical eigenline list.
        #[arg(long, default_value_t = 0)]
        line: usize,
        /// Initial amplitude.
        #[arg(long, default_value_t = 1.0)]
        y0: f64,
    },
    /// Spectrum at the stationary points at infinity.
    Infinity { file: PathBuf },
}

struct Report {
    command: String,
    result: Value,
    text: String,
    warnings: Vec<String>,
    degenerate: bool,
}

fn main() -> ExitCode {
    // usage errors exit 1; code 2 is reserved for degenerate findings
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => {
                    print!("{}", report.text);
                    for w in &report.warnings {
                        eprintln!("warning: {}", w);
                    }
                }
                Format::Structured => {
                    let doc = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": report.command,
                        "seed": cli.seed,
                        "result": report.result,
                        "warnings": report.warnings,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            if report.degenerate {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Box<dyn std::error::Error>> {
    match &cli.cmd {
        Cmd::Count { n, m } => {
            let c = eigen::bezout_count(*n, *m)?;
            Ok(Report {
                command: "count".into(),
                result: json!({ "n": n, "m": m, "count": c }),
                text: format!("{}\n", c),
                warnings: vec![],
                degenerate: false,
            })
        }
        Cmd::Solve { file } => cmd_solve(cli, file),
        Cmd::Cubic3 { file } => cmd_cubic3(cli, file),
        Cmd::Sturm { poly, range, width } => cmd_sturm(poly, range.as_deref(), width),
        Cmd::Degree { file, target } => cmd_degree(cli, file, target.as_deref()),
        Cmd::Ode { sub } => match sub {
            OdeCmd::Ray { file, line, y0 } => cmd_ode_ray(cli, file, *line, *y0),
            OdeCmd::Infinity { file } => cmd_ode_infinity(cli, file),
        },
    }
}

fn solve_opts(cli: &Cli) -> SolveOpts {
    SolveOpts {
        seed: cli.seed,
        restarts: cli.restarts,
        tol: cli.tol.max(1e-14),
        ..Default::default()
    }
}

fn line_json(l: &EigenLine) -> Value {
    let rep: Value = if l.real {
        Value::Array(
            l.rep.iter().map(|z| Value::String(fmt_f64_15(z.re))).collect(),
        )
    } else {
        Value::Array(
            l.rep
                .iter()
                .map(|z| json!([fmt_f64_15(z.re), fmt_f64_15(z.im)]))
                .collect(),
        )
    };
    json!({
        "rep": rep,
        "lambda_class": l.lambda_class.as_i32(),
        "lambda": [fmt_f64_15(l.lambda.re), fmt_f64_15(l.lambda.im)],
        "simple": l.simple,
        "residual": fmt_f64_15(l.residual),
        "real": l.real,
    })
}

fn line_text(i: usize, l: &EigenLine) -> String {
    let rep = if l.real {
        l.rep.iter().map(|z| fmt_f64_15(z.re)).collect::<Vec<_>>().join(", ")
    } else {
        l.rep
            .iter()
            .map(|z| format!("{}{}i", fmt_f64_15(z.re), format_signed(z.im)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "line {:2}: [{}]  class {:+}  simple {}  residual {}\n",
        i,
        rep,
        l.lambda_class.as_i32(),
        l.simple,
        fmt_f64_15(l.residual)
    )
}

fn format_signed(x: f64) -> String {
    if x >= 0.0 {
        format!("+{}", fmt_f64_15(x))
    } else {
        format!("-{}", fmt_f64_15(-x))
    }
}

fn rat_str(r: &BigRational) -> String {
    if r.denom() == &num_bigint::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn cmd_solve(cli: &Cli, file: &PathBuf) -> Result<Report, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file)?;
    let parsed = io::parse_input(&text)?;
    let opts = solve_opts(cli);
    let field = match cli.field {
        Some(FieldArg::Real) => FieldTag::Real,
        Some(FieldArg::Complex) => FieldTag::Complex,
        None => parsed.field,
    };
    let report = match (&parsed.object, field) {
        (InputObject::RationalMap(m), FieldTag::Real) => {
            eigen::enumerate_eigenlines(&m.to_f64(), &opts)?
        }
        (InputObject::FloatMap(m), FieldTag::Real) => eigen::enumerate_eigenlines(m, &opts)?,
        (InputObject::RationalMap(m), FieldTag::Complex) => {
            eigen::enumerate_eigenlines_complex(&m.to_f64().to_c64(), &opts)?
        }
        (InputObject::FloatMap(m), FieldTag::Complex) => {
            eigen::enumerate_eigenlines_complex(&m.to_c64(), &opts)?
        }
        _ => return Err("solve expects a map document".into()),
    };
    let completeness = match report.completeness {
        Completeness::Complete => "complete",
        Completeness::Shortfall => "shortfall",
        Completeness::PossiblyInfinite => "possibly-infinite",
    };
    let mut text_out = format!(
        "bezout count {}  found {}  ({})\n",
        report.bezout,
        report.lines.len(),
        completeness
    );
    for (i, l) in report.lines.iter().enumerate() {
        text_out.push_str(&line_text(i, l));
    }
    let mut warnings = vec![];
    let degenerate = report.completeness != Completeness::Complete;
    if degenerate {
        warnings.push(format!("enumeration {}", completeness));
    }
    Ok(Report {
        command: "solve".into(),
        result: json!({
            "bezout": report.bezout,
            "completeness": completeness,
            "lines": report.lines.iter().map(line_json).collect::<Vec<_>>(),
        }),
        text: text_out,
        warnings,
        degenerate,
    })
}

fn class_name(c: &CubicClass) -> String {
    match c {
        CubicClass::Axial => "axial".into(),
        CubicClass::AxialQuadric => "axial-quadric".into(),
        CubicClass::SemiAxial { kind, swapped } => {
            let k = match kind {
                cubic3::SemiAxialKind::EqualAlphas => "equal-alphas",
                cubic3::SemiAxialKind::ThreeAlphaDegenerate => "three-alpha-degenerate",
                cubic3::SemiAxialKind::ThreeAlphaQuadric => "three-alpha-quadric",
                cubic3::SemiAxialKind::General => "general",
            };
            format!("semi-axial/{}{}", k, if *swapped { " (labels swapped)" } else { "" })
        }
        CubicClass::GenericEqualAlphas => "generic-equal-alphas".into(),
        CubicClass::Generic => "generic".into(),
        CubicClass::Degenerate => "degenerate".into(),
    }
}

fn stationary_name(t: StationaryType) -> &'static str {
    match t {
        StationaryType::Maximum => "max",
        StationaryType::Minimum => "min",
        StationaryType::Saddle => "saddle",
        StationaryType::Degenerate => "degenerate",
    }
}

fn cmd_cubic3(cli: &Cli, file: &PathBuf) -> Result<Report, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file)?;
    let parsed = io::parse_input(&text)?;
    let report = match &parsed.object {
        InputObject::RationalForm(f) => cubic3::analyze_rational(f, cli.seed, cli.tol)?,
        InputObject::FloatForm(f) => cubic3::analyze(f, cli.seed, cli.tol)?,
        _ => return Err("cubic3 expects a form document".into()),
    };
    let count_json = match report.real_line_count {
        LineCount::Finite(k) => json!(k),
        LineCount::Infinite => json!("infinite"),
    };
    let rho_json = report.rho.as_ref().map(|r| {
        r.coeffs().iter().map(rat_str).collect::<Vec<_>>()
    });
    let intervals_json = report.rho_roots.as_ref().map(|rr| {
        rr.roots
            .iter()
            .map(|r| json!([rat_str(&r.lo), rat_str(&r.hi)]))
            .collect::<Vec<_>>()
    });
    let quadric_json = report.quadric.as_ref().map(|q| {
        q.terms()
            .map(|(mi, c)| json!({ "exponents": mi.0.clone(), "value": rat_str(c) }))
            .collect::<Vec<_>>()
    });
    let profile_json: Vec<Value> = report
        .critical_profile
        .iter()
        .map(|p| {
            json!({
                "point": p.point.iter().map(|v| fmt_f64_15(*v)).collect::<Vec<_>>(),
                "type": stationary_name(p.stationary_type),
                "index": p.index,
            })
        })
        .collect();
    let ph_json = report.ph_check.map(|ph| {
        json!({ "sum": ph.index_sum_over_points, "expected": ph.expected, "pass": ph.pass })
    });

    let mut t = String::new();
    t.push_str(&format!("classification: {}\n", class_name(&report.classification.class)));
    t.push_str(&format!(
        "canonical parameters: a2 = {}, a3 = {}, b2 = {}, b3 = {} (scale {})\n",
        rat_str(&report.canonical.alpha2),
        rat_str(&report.canonical.alpha3),
        rat_str(&report.canonical.beta2),
        rat_str(&report.canonical.beta3),
        rat_str(&report.canonical.scale),
    ));
    if let Some(r) = &report.rho {
        t.push_str(&format!("rho(t) = {}\n", r));
    }
    match report.real_line_count {
        LineCount::Finite(k) => t.push_str(&format!("real eigenlines: {}\n", k)),
        LineCount::Infinite => {
            t.push_str("real eigenlines: infinite family\n");
            if let Some(q) = &report.quadric {
                t.push_str(&format!("quadric (canonical coordinates): {:?} = 0\n", q));
            }
        }
    }
    for (i, l) in report.eigenlines.iter().enumerate() {
        t.push_str(&line_text(i, l));
    }
    t.push_str(&format!(
        "critical points: {} maxima, {} minima, {} saddles\n",
        report.maxima_count, report.minima_count, report.saddle_count
    ));
    if let Some(ph) = &report.ph_check {
        t.push_str(&format!(
            "index sum {} (expected {}): {}\n",
            ph.index_sum_over_points,
            ph.expected,
            if ph.pass { "pass" } else { "FAIL" }
        ));
    }

    // infinite families sit on the degeneracy locus: flag them too
    let degenerate = report.classification.class == CubicClass::Degenerate
        || report.real_line_count == LineCount::Infinite
        || !report.warnings.is_empty();
    Ok(Report {
        command: "cubic3".into(),
        result: json!({
            "classification": class_name(&report.classification.class),
            "canonical": {
                "alpha2": rat_str(&report.canonical.alpha2),
                "alpha3": rat_str(&report.canonical.alpha3),
                "beta2": rat_str(&report.canonical.beta2),
                "beta3": rat_str(&report.canonical.beta3),
                "scale": rat_str(&report.canonical.scale),
                "exact": report.canonical.exact,
                "basis": report.canonical.basis.iter()
                    .map(|row| row.iter().map(|v| fmt_f64_15(*v)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            },
            "rho": rho_json,
            "isolating_intervals": intervals_json,
            "real_line_count": count_json,
            "eigenlines": report.eigenlines.iter().map(line_json).collect::<Vec<_>>(),
            "quadric": quadric_json,
            "critical_profile": profile_json,
            "maxima_count": report.maxima_count,
            "minima_count": report.minima_count,
            "saddle_count": report.saddle_count,
            "ph_check": ph_json,
        }),
        text: t,
        warnings: report.warnings.clone(),
        degenerate,
    })
}

fn cmd_sturm(
    poly: &str,
    range: Option<&[String]>,
    width: &str,
) -> Result<Report, Box<dyn std::error::Error>> {
    let p = UnivarPoly::parse(poly)?;
    let w = parse_rat(width)?;
    let range_parsed = match range {
        Some([a, b]) => Some((parse_rat(a)?, parse_rat(b)?)),
        Some(_) => return Err("--range takes exactly two endpoints".into()),
        None => None,
    };
    let report = match &range_parsed {
        Some((a, b)) => upoly::real_roots(&p, Some((a, b)), &w)?,
        None => upoly::real_roots(&p, None, &w)?,
    };
    let mut t = format!("{} real root{}\n", report.count, if report.count == 1 { "" } else { "s" });
    for r in &report.roots {
        if r.exact {
            t.push_str(&format!("  root {} (exact, multiplicity {})\n", rat_str(&r.approx), r.multiplicity));
        } else {
            t.push_str(&format!(
                "  root in ({}, {}] ~ {} (multiplicity {})\n",
                rat_str(&r.lo),
                rat_str(&r.hi),
                fmt_f64_15(eigenline::scalar::rat_to_f64(&r.approx)),
                r.multiplicity
            ));
        }
    }
    let mut warnings = vec![];
    if report.degenerate {
        warnings.push("multiple root present: gcd(p, p') nonconstant".into());
    }
    let degenerate = report.degenerate;
    Ok(Report {
        command: "sturm".into(),
        result: json!({
            "count": report.count,
            "degenerate": report.degenerate,
            "roots": report.roots.iter().map(|r| json!({
                "lo": rat_str(&r.lo),
                "hi": rat_str(&r.hi),
                "approx": rat_str(&r.approx),
                "multiplicity": r.multiplicity,
                "exact": r.exact,
            })).collect::<Vec<_>>(),
        }),
        text: t,
        warnings,
        degenerate,
    })
}

fn parse_rat(s: &str) -> Result<BigRational, Box<dyn std::error::Error>> {
    // reuse the polynomial constant parser
    let p = UnivarPoly::parse(s)?;
    if p.deg().is_none_or(|d| d == 0) {
        Ok(p.coeff(0))
    } else {
        Err(format!("expected a rational constant, got '{}'", s).into())
    }
}

fn cmd_degree(
    cli: &Cli,
    file: &PathBuf,
    target: Option<&[f64]>,
) -> Result<Report, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file)?;
    let parsed = io::parse_input(&text)?;
    let opts = DegreeOpts { seed: cli.seed, restarts: cli.restarts, tol: cli.tol.max(1e-12) };
    let map = parsed.as_real_map_f64()?;
    let pm = PolyMap::homogeneous(map);
    let rep = match target {
        Some(y) => eigen::brouwer_degree(&pm, y, &opts)?,
        None => eigen::global_degree(&pm, &opts)?,
    };
    let t = format!(
        "degree {}  (samples {}, solutions per sample {:?}{})\n",
        rep.degree,
        rep.samples,
        rep.solutions_per_sample,
        if rep.certified { ", certified" } else { "" }
    );
    let mut warnings = vec![];
    if !rep.certified {
        warnings.push("solution count not certified against the complex count".into());
    }
    let degenerate = !rep.certified;
    Ok(Report {
        command: "degree".into(),
        result: json!({
            "degree": rep.degree,
            "samples": rep.samples,
            "solutions_per_sample": rep.solutions_per_sample,
            "certified": rep.certified,
        }),
        text: t,
        warnings,
        degenerate,
    })
}

fn cmd_ode_ray(
    cli: &Cli,
    file: &PathBuf,
    line_idx: usize,
    y0: f64,
) -> Result<Report, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file)?;
    let parsed = io::parse_input(&text)?;
    let map = parsed.as_real_map_f64()?;
    let report = eigen::enumerate_eigenlines(&map, &solve_opts(cli))?;
    let line = report
        .lines
        .get(line_idx)
        .ok_or_else(|| format!("line index {} out of range (found {})", line_idx, report.lines.len()))?;
    if !line.real {
        return Err("requested line is not real; ray solutions need a real line".into());
    }
    let sol = odeflow::ray_solution(&map, line, y0)?;
    let mut t = format!(
        "ray along [{}], alpha = {}\n",
        sol.c.iter().map(|v| fmt_f64_15(*v)).collect::<Vec<_>>().join(", "),
        fmt_f64_15(sol.alpha)
    );
    match sol.blow_up_time {
        Some(tt) => t.push_str(&format!("blow-up at t = {}\n", fmt_f64_15(tt))),
        None => t.push_str("no forward blow-up\n"),
    }
    Ok(Report {
        command: "ode-ray".into(),
        result: json!({
            "line": line_json(line),
            "alpha": fmt_f64_15(sol.alpha),
            "y0": fmt_f64_15(sol.y0),
            "m": sol.m,
            "blow_up_time": sol.blow_up_time.map(fmt_f64_15),
        }),
        text: t,
        warnings: vec![],
        degenerate: false,
    })
}

fn cmd_ode_infinity(cli: &Cli, file: &PathBuf) -> Result<Report, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(file)?;
    let parsed = io::parse_input(&text)?;
    let map = parsed.as_real_map_f64()?;
    let report = eigen::enumerate_eigenlines(&map, &solve_opts(cli))?;
    let pm = PolyMap::homogeneous(map);
    let mut points = Vec::new();
    let mut t = String::new();
    for line in report.lines.iter().filter(|l| l.real) {
        let pt = odeflow::infinity_spectrum(&pm, line)?;
        t.push_str(&format!(
            "direction [{}], alpha = {}, spectrum {{{}}}\n",
            pt.direction.iter().map(|v| fmt_f64_15(*v)).collect::<Vec<_>>().join(", "),
            fmt_f64_15(pt.alpha),
            pt.spectrum
                .iter()
                .map(|s| format!("{}{}i", fmt_f64_15(s.re), format_signed(s.im)))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        points.push(json!({
            "direction": pt.direction.iter().map(|v| fmt_f64_15(*v)).collect::<Vec<_>>(),
            "alpha": fmt_f64_15(pt.alpha),
            "spectrum": pt.spectrum.iter()
                .map(|s| json!([fmt_f64_15(s.re), fmt_f64_15(s.im)]))
                .collect::<Vec<_>>(),
        }));
    }
    let degenerate = report.completeness != Completeness::Complete;
    let warnings = if degenerate {
        vec!["eigenline enumeration incomplete".into()]
    } else {
        vec![]
    };
    Ok(Report {
        command: "ode-infinity".into(),
        result: json!({ "points": points }),
        text: t,
        warnings,
        degenerate,
    })
}
