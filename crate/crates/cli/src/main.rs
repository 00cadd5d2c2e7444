//! `isopompeiu`: spectra, freak radii and Pompeiu-failure certificates from
//! the command line.
//!
//! Exit status: 0 when every check in the run passes, 2 on invalid input,
//! 3 on a numerical failure or a failed check.

mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isopompeiu::circle::{self, ArcClassification};
use isopompeiu::foliation::ALLOWED_G;
use isopompeiu::report::{self, OutputFormat, RunConfig, Table};
use isopompeiu::{
    cartan_polynomial, closed_form_spectrum, freak_set_detailed, gram_polynomial, make_foliation, sampling,
    solve_radial_spectrum, verifier, Error, FoliationSpec, DEFAULT_SEED,
};

#[derive(Parser, Debug)]
#[command(
    name = "isopompeiu",
    version,
    about = "Pompeiu-failure certificates for isoparametric tubes in round spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form and collocation radial spectra side by side.
    Spectrum {
        #[command(flatten)]
        fol: FoliationArgs,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Freak radii: interior zeros of the content functions.
    Zeros {
        #[command(flatten)]
        fol: FoliationArgs,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo integrals over rotated tubes.
    Verify(VerifyArgs),
    /// Arc classification on the circle, or multi-arc integrals with --k.
    Circle(CircleArgs),
    /// First eigenvalue of Clifford tori.
    Lambda2 {
        /// Comma-separated radii r in (0, 1).
        #[arg(long, default_value = "0.3,0.5,0.7071067811865476,0.8,0.9")]
        r: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residuals of the spherical-harmonic addition formula.
    Addition {
        #[arg(long)]
        n: u32,
        /// Harmonic degrees, comma-separated.
        #[arg(long, default_value = "1,2,3")]
        l: String,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficients of the radial polynomials P_k(x).
    Polys {
        #[command(flatten)]
        fol: FoliationArgs,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct FoliationArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    g: u32,
    /// Defaults from n - 1 = g (m0 + m1) / 2 with m0 = m1.
    #[arg(long)]
    m0: Option<u32>,
    #[arg(long)]
    m1: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    #[value(alias = "text")]
    Json,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    fol: FoliationArgs,
    /// Non-radial harmonic degree l.
    #[arg(long, conflicts_with = "freak_k", required_unless_present = "freak_k")]
    degree: Option<u32>,
    /// Radial index k; the radii must be zeros of its content function.
    #[arg(long)]
    freak_k: Option<usize>,
    /// Comma-separated radii; accepts forms like pi/4.
    #[arg(long)]
    radii: Option<String>,
    /// Haar rotations in addition to the identity.
    #[arg(long, default_value_t = 20)]
    rotations: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Radius of an identity-rotation radial control.
    #[arg(long)]
    control_t: Option<String>,
    /// Radial index of the --control-t eigenfunction under --degree.
    #[arg(long, default_value_t = 1)]
    control_k: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CircleArgs {
    /// alpha / pi as a fraction or decimal.
    #[arg(long, default_value = "1/3")]
    alpha_over_pi: String,
    #[arg(long, default_value_t = circle::DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u64,
    /// Number of arcs; switches to the multi-arc table.
    #[arg(long)]
    k: Option<usize>,
    /// Frequencies l, comma-separated.
    #[arg(long, default_value = "1,2,3,4,5,6,7,8,9,10,11,12")]
    l: String,
    #[arg(long, default_value = "0.2")]
    t: String,
    #[arg(long, default_value_t = 10)]
    offsets: usize,
    #[command(flatten)]
    out: OutputArgs,
}

/// Exit-worthy failure: a message and a status code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_usage() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Output of a command plus the checks that decide the exit status.
struct Outcome {
    body: String,
    failures: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Spectrum { out, .. }
        | Command::Zeros { out, .. }
        | Command::Lambda2 { out, .. }
        | Command::Addition { out, .. }
        | Command::Polys { out, .. } => out.clone(),
        Command::Verify(v) => v.out.clone(),
        Command::Circle(c) => c.out.clone(),
    };
    let result = match out.workers {
        Some(0) => Err(usage("--workers must be at least 1")),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => Err(usage(format!("cannot build worker pool: {e}"))),
        },
        None => run(&cli.command),
    };
    match result.and_then(|o| emit(&o, &out).map(|_| o)) {
        Ok(o) if o.failures.is_empty() => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("{} failing check(s):", o.failures.len());
            for f in &o.failures {
                eprintln!("  {f}");
            }
            ExitCode::from(3)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(o: &Outcome, out: &OutputArgs) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, &o.body).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(o.body.as_bytes()).map_err(|e| Failure {
                code: 3,
                message: e.to_string(),
            })
        }
    }
}

fn format_of(out: &OutputArgs) -> OutputFormat {
    match out.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    }
}

fn render<T: serde::Serialize>(cfg: &RunConfig, table: &Table, doc: &T) -> String {
    match cfg.format {
        OutputFormat::Csv => table.to_csv(cfg),
        OutputFormat::Json => report::json_document(cfg, doc),
    }
}

fn foliation(args: &FoliationArgs) -> Result<FoliationSpec, Failure> {
    if !ALLOWED_G.contains(&args.g) {
        return Err(Error::InvalidG(args.g).into());
    }
    let total = 2 * args.n.saturating_sub(1);
    if !total.is_multiple_of(args.g) {
        return Err(usage(format!(
            "n - 1 = {} is not a multiple of g / 2 = {}/2",
            args.n.saturating_sub(1),
            args.g
        )));
    }
    let sum = total / args.g;
    let (m0, m1) = match (args.m0, args.m1) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, sum.checked_sub(a).ok_or_else(|| usage("m0 exceeds 2(n-1)/g"))?),
        (None, Some(b)) => (sum.checked_sub(b).ok_or_else(|| usage("m1 exceeds 2(n-1)/g"))?, b),
        (None, None) if sum.is_multiple_of(2) => (sum / 2, sum / 2),
        (None, None) => return Err(usage("cannot infer equal multiplicities; pass --m0 and --m1")),
    };
    Ok(make_foliation(args.n, args.g, m0, m1)?)
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Spectrum { fol, kmax, out } => cmd_spectrum(fol, *kmax, out),
        Command::Zeros { fol, kmax, out } => cmd_zeros(fol, *kmax, out),
        Command::Verify(v) => cmd_verify(v),
        Command::Circle(c) => cmd_circle(c),
        Command::Lambda2 { r, out } => cmd_lambda2(r, out),
        Command::Addition {
            n,
            l,
            points,
            seed,
            out,
        } => cmd_addition(*n, l, *points, *seed, out),
        Command::Polys { fol, kmax, out } => cmd_polys(fol, *kmax, out),
    }
}

fn cmd_spectrum(fol: &FoliationArgs, kmax: usize, out: &OutputArgs) -> Result<Outcome, Failure> {
    let spec = foliation(fol)?;
    let mut cfg = RunConfig::new("spectrum").with_foliation(&spec);
    cfg.kmax = Some(kmax);
    cfg.format = format_of(out);
    let closed = closed_form_spectrum(&spec, kmax);
    let solved = solve_radial_spectrum(&spec, kmax)?;
    let mut failures = Vec::new();
    for (e, &c) in solved.iter().zip(&closed) {
        let rel = (e.lambda - c).abs() / c.abs().max(1.0);
        if rel > 1e-8 {
            failures.push(format!(
                "k={} numeric={} closed_form={} rel_error={rel:e}",
                e.k, e.lambda, c
            ));
        }
    }
    let table = report::spectrum_table(&closed, &solved);
    let doc = serde_json::json!({ "closed_form": closed, "eigenpairs": solved });
    Ok(Outcome {
        body: render(&cfg, &table, &doc),
        failures,
    })
}

fn cmd_zeros(fol: &FoliationArgs, kmax: usize, out: &OutputArgs) -> Result<Outcome, Failure> {
    let spec = foliation(fol)?;
    let mut cfg = RunConfig::new("zeros").with_foliation(&spec);
    cfg.kmax = Some(kmax);
    cfg.format = format_of(out);
    let fs = freak_set_detailed(&spec, kmax)?;
    let lambdas = closed_form_spectrum(&spec, kmax);
    let table = report::freak_table(&spec, &fs.zeros, &lambdas);
    let doc = serde_json::json!({
        "zeros": fs.zeros,
        "solver": fs.metadata,
        "scan_points": isopompeiu::content::SCAN_POINTS,
        "bisection_tol": isopompeiu::content::BISECTION_TOL,
        "dedup_tol": isopompeiu::content::DEDUP_TOL,
    });
    Ok(Outcome {
        body: render(&cfg, &table, &doc),
        failures: Vec::new(),
    })
}

fn cmd_verify(v: &VerifyArgs) -> Result<Outcome, Failure> {
    let spec = foliation(&v.fol)?;
    let poly = cartan_polynomial(&spec)?;
    let radii = match &v.radii {
        Some(s) => Some(parse::parse_list(s).map_err(usage)?),
        None => None,
    };
    if v.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mut cfg = RunConfig::new("verify").with_foliation(&spec);
    cfg.rotations = Some(v.rotations);
    cfg.n_samples = Some(v.samples);
    cfg.seed = Some(v.seed);
    cfg.format = format_of(&v.out);

    let mut reports = Vec::new();
    if let Some(degree) = v.degree {
        let radii = radii.ok_or_else(|| usage("--radii is required with --degree"))?;
        cfg.degree = Some(degree);
        cfg.radii = radii.clone();
        reports = verifier::verify_nonradial_failure(&spec, &poly, degree, &radii, v.rotations, v.samples, v.seed)?;
        if let Some(ct) = &v.control_t {
            let ct = parse::parse_real(ct).map_err(usage)?;
            cfg.k = Some(v.control_k);
            cfg.extra.insert("control_t".into(), report::fmt_float(ct));
            reports.push(verifier::radial_positive_control(
                &spec,
                &poly,
                v.control_k,
                ct,
                v.samples,
                v.seed,
            )?);
        }
    } else if let Some(k) = v.freak_k {
        cfg.k = Some(k);
        let radii = match radii {
            Some(r) => r,
            None => {
                let eig = solve_radial_spectrum(&spec, k)?.pop().expect("k + 1 eigenpairs");
                isopompeiu::content_function(&spec, &eig)?.zeros
            }
        };
        if radii.is_empty() {
            return Err(usage(format!("the content function for k = {k} has no interior zeros")));
        }
        cfg.radii = radii.clone();
        let control_t = match &v.control_t {
            Some(s) => Some(parse::parse_real(s).map_err(usage)?),
            None => None,
        };
        if let Some(ct) = control_t {
            cfg.extra.insert("control_t".into(), report::fmt_float(ct));
        }
        for &t in &radii {
            let r = verifier::verify_freak_radius(&spec, &poly, k, t, v.rotations, v.samples, v.seed, control_t)?;
            reports.push(r.witness);
            reports.push(r.control);
        }
    }

    let failures = report::failing_cells(&reports);
    let table = report::verify_table(&reports);
    Ok(Outcome {
        body: render(&cfg, &table, &reports),
        failures,
    })
}

fn cmd_circle(c: &CircleArgs) -> Result<Outcome, Failure> {
    let mut cfg = RunConfig::new("circle");
    cfg.format = format_of(&c.out);
    if let Some(k) = c.k {
        let t = parse::parse_real(&c.t).map_err(usage)?;
        let ls: Vec<usize> =
            c.l.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| usage(format!("bad frequency {s:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
        let offsets: Vec<f64> = (0..c.offsets)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / c.offsets.max(1) as f64)
            .collect();
        cfg.k = Some(k);
        cfg.extra.insert("l".into(), c.l.clone());
        cfg.extra.insert("t".into(), report::fmt_float(t));
        cfg.extra.insert("offsets".into(), c.offsets.to_string());
        let reports: Vec<_> = ls
            .iter()
            .map(|&l| circle::multi_arc_test(k, l, t, &offsets))
            .collect::<Result<_, _>>()?;
        let failures = reports
            .iter()
            .filter(|r| !r.consistent)
            .map(|r| {
                format!(
                    "k={} l={} max|integral|={:e} expected_vanish={}",
                    r.k, r.l, r.max_abs_integral, r.expected_vanish
                )
            })
            .collect();
        let table = report::circle_table(&reports);
        return Ok(Outcome {
            body: render(&cfg, &table, &reports),
            failures,
        });
    }

    let s = parse::parse_real(&c.alpha_over_pi).map_err(usage)?;
    cfg.extra.insert("alpha_over_pi".into(), c.alpha_over_pi.clone());
    cfg.extra
        .insert("max_denominator".into(), c.max_denominator.to_string());
    let class = circle::pompeiu_classify_arc(s * std::f64::consts::PI, c.max_denominator)?;
    let mut table = Table::new(&["alpha_over_pi", "verdict", "m", "n", "witness", "residual"]);
    let mut failures = Vec::new();
    match &class {
        ArcClassification::Fails {
            alpha_over_pi,
            m,
            n,
            witness_frequency,
            witness_residual,
        } => {
            if *witness_residual > 1e-12 {
                failures.push(format!(
                    "witness cos({witness_frequency}x) leaves residual {witness_residual:e}"
                ));
            }
            table.push(vec![
                report::fmt_float(*alpha_over_pi),
                "FAILS".into(),
                m.to_string(),
                n.to_string(),
                format!("cos({witness_frequency}x)"),
                report::fmt_float(*witness_residual),
            ]);
        }
        ArcClassification::HasProperty {
            alpha_over_pi,
            injectivity,
            ..
        } => {
            if !injectivity.pass {
                failures.push(format!("injectivity check failed at J = {}", injectivity.truncation));
            }
            table.push(vec![
                report::fmt_float(*alpha_over_pi),
                "HAS_PROPERTY".into(),
                String::new(),
                String::new(),
                String::new(),
                report::fmt_float(injectivity.implied_coeff_bound),
            ]);
        }
    }
    Ok(Outcome {
        body: render(&cfg, &table, &class),
        failures,
    })
}

fn cmd_lambda2(r: &str, out: &OutputArgs) -> Result<Outcome, Failure> {
    let rs = parse::parse_list(r).map_err(usage)?;
    let mut cfg = RunConfig::new("lambda2");
    cfg.format = format_of(out);
    cfg.extra.insert(
        "r".into(),
        rs.iter().map(|&x| report::fmt_float(x)).collect::<Vec<_>>().join(","),
    );
    let rows: Vec<_> = rs
        .iter()
        .map(|&x| verifier::clifford_lambda2(x))
        .collect::<Result<_, _>>()?;
    let failures = rows
        .iter()
        .filter(|l| !l.bound_ok)
        .map(|l| format!("r={} lambda2={} exceeds 2", l.r, l.lambda2))
        .collect();
    Ok(Outcome {
        body: render(&cfg, &report::lambda2_table(&rows), &rows),
        failures,
    })
}

fn cmd_addition(n: u32, l: &str, points: usize, seed: u64, out: &OutputArgs) -> Result<Outcome, Failure> {
    let ls: Vec<u32> = l
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| usage(format!("bad degree {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let mut cfg = RunConfig::new("addition");
    cfg.n = Some(n);
    cfg.seed = Some(seed);
    cfg.format = format_of(out);
    cfg.extra.insert("l".into(), l.to_string());
    cfg.extra.insert("points".into(), points.to_string());
    if !(2..=isopompeiu::harmonics::MAX_HARMONIC_N).contains(&n) {
        return Err(Error::DimensionLimit {
            n,
            degree: ls.iter().copied().max().unwrap_or(0),
            max_degree: isopompeiu::harmonics::MAX_HARMONIC_DEGREE,
        }
        .into());
    }
    let mut pts = sampling::sample_sphere(n, points + 1, seed);
    let y = pts.remove(0);
    let rows: Vec<_> = ls
        .iter()
        .map(|&d| isopompeiu::addition_formula_check(n, d, &y, &pts))
        .collect::<Result<_, _>>()?;
    let failures = rows
        .iter()
        .filter(|r| r.max_residual() > 1e-9)
        .map(|r| format!("n={} l={} max residual {:e}", r.n, r.degree, r.max_residual()))
        .collect();
    Ok(Outcome {
        body: render(&cfg, &report::addition_table(&rows), &rows),
        failures,
    })
}

fn cmd_polys(fol: &FoliationArgs, kmax: usize, out: &OutputArgs) -> Result<Outcome, Failure> {
    let spec = foliation(fol)?;
    let mut cfg = RunConfig::new("polys").with_foliation(&spec);
    cfg.kmax = Some(kmax);
    cfg.format = format_of(out);
    let polys: Vec<Vec<f64>> = (0..=kmax).map(|k| gram_polynomial(&spec, k)).collect();
    Ok(Outcome {
        body: render(&cfg, &report::polys_table(&polys), &polys),
        failures: Vec::new(),
    })
}
