//! `seppack`: batch front-end to the seppack library.
//!
//! Every verb prints one JSON envelope
//! `{"tool", "version", "verb", "seed", "tolerances", "result"}`.
//! Inputs are read from the given path or, when no path is given, from stdin;
//! an input may be the bare object or an envelope produced by another verb.
//!
//! Exit codes: 0 computed and satisfied, 1 violated or refuted,
//! 2 inconclusive, 3 input or usage error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use seppack::bounds::{
    csep_simplified_bound, csep_upper_bound, default_boundary_samples, density_check,
    dg_certificate, hadwiger_bounds, isoperimetric_ratio, lambda_sep_estimate, planar_bound,
};
use seppack::constructors::{
    axis_basis, cross_polytope_config, example_5d, grid_packing_2d, spiky_body_3d, touching_vectors,
};
use seppack::linearization::{
    check_condition_tol, check_interior_bound, from_configuration, steinitz_core, Condition,
    PairSystem,
};
use seppack::packing::{check_packing_tol, contact_graph_tol, contact_statistics, Packing};
use seppack::search::hadwiger_config_search;
use seppack::separability::{self, certify_with, check_rho_separable_with, CertificateStatus};
use seppack::{ConvexBody, Tolerances};

#[derive(Parser)]
#[command(
    name = "seppack",
    version,
    about = "Totally separable packings: checks, certificates and bounds"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Master seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the main comparison tolerance of the verb (touching slack
    /// for packings, interval slack for pair systems).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    /// Flattened `key = value` lines.
    Text,
}

#[derive(Subcommand)]
enum Verb {
    /// Check that no two translates overlap.
    CheckPacking(PackingIn),
    /// Contact graph and contact statistics.
    Contacts(PackingIn),
    /// Certify total separability with explicit hyperplanes.
    Certify(PackingIn),
    /// Certify rho-separability around every member.
    RhoCheck {
        #[command(flatten)]
        input: PackingIn,
        #[arg(long)]
        rho: f64,
    },
    /// Check a Hadwiger configuration; member 0 is the central body.
    VerifyConfig(PackingIn),
    /// Evaluate the pair-system conditions.
    Conditions {
        #[command(flatten)]
        input: SystemIn,
        /// One of Lin, StrictC, Smooth, OpenLin; all four when omitted.
        #[arg(long)]
        which: Option<Condition>,
    },
    /// Minimal subset with the origin in the interior of its hull.
    Steinitz(SystemIn),
    /// Covering constant of the axis cross-polytope configuration.
    LambdaSep {
        #[command(flatten)]
        input: BodyIn,
        /// Boundary sample count (dimension-dependent default).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Isoperimetric ratio surface^d / volume^(d-1).
    Iq {
        #[command(flatten)]
        input: BodyIn,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Hadwiger-number table and contact-number bounds.
    Bounds {
        #[arg(long)]
        dim: usize,
        /// Number of translates; enables the contact bounds.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Ratio of the ball's isoperimetric ratio to the body's.
        #[arg(long, default_value_t = 1.0)]
        iq: f64,
    },
    /// Density ratio of a rho-separable packing against delta.
    Density {
        #[command(flatten)]
        input: PackingIn,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Half-body piece certificate for a pair system (axis cross-polytope by default).
    DgCert {
        #[command(flatten)]
        input: BodyIn,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// k x k grid packing along the axis basis of a planar body.
    Grid {
        #[command(flatten)]
        input: BodyIn,
        #[arg(long)]
        k: usize,
    },
    /// The six-pair one-sided system in dimension five.
    #[command(name = "example-5d")]
    Example5d,
    /// Smoothed spiky polytope in dimension three.
    Spiky {
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Annealing search for a Lin system of the target size.
    Search {
        #[command(flatten)]
        input: BodyIn,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 100_000)]
        iterations: usize,
    },
}

#[derive(Args)]
struct PackingIn {
    /// Packing JSON; stdin when omitted.
    #[arg(long)]
    packing: Option<PathBuf>,
}

#[derive(Args)]
struct SystemIn {
    /// Pair-system JSON; stdin when omitted.
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Args)]
struct BodyIn {
    /// Body JSON; stdin when omitted.
    #[arg(long)]
    body: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Violated = 1,
    Inconclusive = 2,
    InputError = 3,
}

impl From<CertificateStatus> for Status {
    fn from(s: CertificateStatus) -> Self {
        match s {
            CertificateStatus::Certified => Status::Ok,
            CertificateStatus::Refuted => Status::Violated,
            CertificateStatus::Inconclusive => Status::Inconclusive,
        }
    }
}

fn holds(b: bool) -> Status {
    if b {
        Status::Ok
    } else {
        Status::Violated
    }
}

/// Failure before a report could be produced.
struct Failure(String);

impl From<seppack::Error> for Failure {
    fn from(e: seppack::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(Value, Status), Failure>;

fn report<T: Serialize>(value: &T, status: Status) -> Outcome {
    Ok((
        serde_json::to_value(value).map_err(|e| Failure(e.to_string()))?,
        status,
    ))
}

fn read_input<T: DeserializeOwned>(path: Option<&Path>, what: &str) -> Result<T, Failure> {
    let (name, text) = match path {
        Some(p) if p != Path::new("-") => {
            let text =
                fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            (p.display().to_string(), text)
        }
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure(format!("stdin: {e}")))?;
            ("<stdin>".to_string(), text)
        }
    };
    let located = |e: serde_json::Error| {
        Failure(format!(
            "{name}:{}:{}: invalid {what}: {e}",
            e.line(),
            e.column()
        ))
    };
    let raw: Value = serde_json::from_str(&text).map_err(located)?;
    let inner = match raw {
        Value::Object(mut m) if m.contains_key("tool") && m.contains_key("result") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        other => other,
    };
    // re-parse from text so schema errors keep their position when there is no envelope
    match serde_json::from_value(inner) {
        Ok(v) => Ok(v),
        Err(e) => match serde_json::from_str::<T>(&text) {
            Err(located_err) if located_err.line() > 0 => Err(located(located_err)),
            _ => Err(Failure(format!("{name}: invalid {what}: {e}"))),
        },
    }
}

fn axis_basis_checked(body: &ConvexBody) -> Result<Vec<seppack::Vector>, Failure> {
    let axes = axis_basis(body)?;
    if !body.is_auerbach_basis(&axes)? {
        return Err(Failure(
            "the coordinate axes are not an Auerbach basis of the body".into(),
        ));
    }
    Ok(axes)
}

fn search_options(touch: f64, seed: u64) -> separability::SearchOptions {
    separability::SearchOptions {
        seed,
        touch_tol: touch,
        ..separability::SearchOptions::default()
    }
}

fn run(verb: &Verb, c: &Common, tol: &Tolerances) -> Outcome {
    let seed = c.seed;
    match verb {
        Verb::CheckPacking(i) => {
            let p: Packing = read_input(i.packing.as_deref(), "packing")?;
            let r = check_packing_tol(&p, tol.touch);
            report(&r, holds(r.valid))
        }
        Verb::Contacts(i) => {
            let p: Packing = read_input(i.packing.as_deref(), "packing")?;
            let g = contact_graph_tol(&p, tol.touch)?;
            let stats = contact_statistics(&g);
            report(
                &json!({"n": g.n, "edges": g.edges, "statistics": stats}),
                Status::Ok,
            )
        }
        Verb::Certify(i) => {
            let p: Packing = read_input(i.packing.as_deref(), "packing")?;
            let cert = certify_with(&p, &search_options(tol.touch, seed))?;
            let status = cert.status.into();
            report(&cert, status)
        }
        Verb::RhoCheck { input, rho } => {
            let p: Packing = read_input(input.packing.as_deref(), "packing")?;
            let r = check_rho_separable_with(&p, *rho, &search_options(tol.touch, seed))?;
            let status = r.status.into();
            report(&r, status)
        }
        Verb::VerifyConfig(i) => {
            let p: Packing = read_input(i.packing.as_deref(), "packing")?;
            verify_config(&p, tol, seed)
        }
        Verb::Conditions { input, which } => {
            let s: PairSystem = read_input(input.system.as_deref(), "pair system")?;
            let which: Vec<Condition> = match which {
                Some(w) => vec![*w],
                None => vec![
                    Condition::Lin,
                    Condition::StrictC,
                    Condition::Smooth,
                    Condition::OpenLin,
                ],
            };
            let reports: Vec<_> = which
                .iter()
                .map(|&w| check_condition_tol(&s, w, tol))
                .collect();
            let ok = reports.iter().all(|r| r.holds);
            if reports.len() == 1 {
                report(&reports[0], holds(ok))
            } else {
                report(&reports, holds(ok))
            }
        }
        Verb::Steinitz(i) => {
            let s: PairSystem = read_input(i.system.as_deref(), "pair system")?;
            let core = steinitz_core(&s.vectors())?;
            let bound = check_interior_bound(&s)?;
            let status = holds(bound.bound_holds);
            report(&json!({"core": core, "interior_bound": bound}), status)
        }
        Verb::LambdaSep { input, samples } => {
            let body: ConvexBody = read_input(input.body.as_deref(), "body")?;
            let axes = axis_basis_checked(&body)?;
            let n = samples.unwrap_or_else(|| default_boundary_samples(body.dim()));
            report(&lambda_sep_estimate(&body, &axes, n, seed)?, Status::Ok)
        }
        Verb::Iq { input, samples } => {
            let body: ConvexBody = read_input(input.body.as_deref(), "body")?;
            report(&isoperimetric_ratio(&body, *samples, seed)?, Status::Ok)
        }
        Verb::Bounds {
            dim,
            n,
            lambda,
            delta,
            iq,
        } => {
            let mut out = json!({"hadwiger": hadwiger_bounds(*dim)?});
            if let Some(n) = *n {
                out["contact"] = json!({
                    "n": n,
                    "lambda": lambda,
                    "delta": delta,
                    "iq_ratio": iq,
                    "upper": csep_upper_bound(*dim, n, *lambda, *delta, *iq)?,
                    "simplified": csep_simplified_bound(*dim, n, *lambda)?,
                    "planar": if *dim == 2 { Some(planar_bound(n)?) } else { None },
                });
            }
            report(&out, Status::Ok)
        }
        Verb::Density {
            input,
            rho,
            delta,
            samples,
        } => {
            let p: Packing = read_input(input.packing.as_deref(), "packing")?;
            let r = density_check(&p, *rho, *delta, *samples, seed)?;
            let status = holds(r.satisfied == Some(true));
            report(&r, status)
        }
        Verb::DgCert {
            input,
            system,
            samples,
        } => {
            let body: ConvexBody = read_input(input.body.as_deref(), "body")?;
            let s: PairSystem = match system {
                Some(path) => read_input(Some(path), "pair system")?,
                None => {
                    let axes = axis_basis_checked(&body)?;
                    from_configuration(&body, &cross_polytope_config(&body, &axes)?)?
                }
            };
            let r = dg_certificate(&body, &s, *samples, seed)?;
            let status = holds(r.holds);
            report(&r, status)
        }
        Verb::Grid { input, k } => {
            let body: ConvexBody = read_input(input.body.as_deref(), "body")?;
            let axes = axis_basis_checked(&body)?;
            report(&grid_packing_2d(&body, &axes, *k)?, Status::Ok)
        }
        Verb::Example5d => report(&example_5d(), Status::Ok),
        Verb::Spiky { eps } => report(&spiky_body_3d(*eps)?, Status::Ok),
        Verb::Search {
            input,
            target,
            iterations,
        } => {
            let body: ConvexBody = read_input(input.body.as_deref(), "body")?;
            let r = hadwiger_config_search(&body, *target, *iterations, seed)?;
            // not finding a configuration is evidence, not a refutation
            let status = if r.success {
                Status::Ok
            } else {
                Status::Inconclusive
            };
            report(&r, status)
        }
    }
}

/// Member 0 is the central body; the others must touch it and, together
/// with it, form a totally separable packing.
fn verify_config(p: &Packing, tol: &Tolerances, seed: u64) -> Outcome {
    let touching = touching_vectors(p);
    let sym = p.symmetric_body();
    let gauges: Vec<f64> = touching.iter().map(|v| sym.gauge(v)).collect();
    let all_touch = gauges.iter().all(|g| (g - 2.0).abs() <= tol.touch * 2.0);
    let packing = check_packing_tol(p, tol.touch);
    let cert = if packing.valid {
        Some(certify_with(p, &search_options(tol.touch, seed))?)
    } else {
        None
    };
    let lin = if all_touch && p.body().is_smooth() && p.body().is_symmetric() {
        let s = from_configuration(p.body(), &touching)?;
        Some(check_condition_tol(&s, Condition::Lin, tol))
    } else {
        None
    };
    let status = match (&cert, &lin) {
        _ if !packing.valid || !all_touch => Status::Violated,
        (Some(c), _) if c.status != CertificateStatus::Certified => c.status.into(),
        (_, Some(l)) if !l.holds => Status::Violated,
        _ => Status::Ok,
    };
    report(
        &json!({
            "n": touching.len(),
            "packing_valid": packing.valid,
            "all_touch_center": all_touch,
            "center_gauges": gauges,
            "certificate_status": cert.as_ref().map(|c| c.status),
            "lin": lin,
        }),
        status,
    )
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (k, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{k}]"), x, out);
            }
        }
        _ => out.push(format!("{prefix} = {v}")),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure(format!("stdout: {e}")))
        }
    }
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::CheckPacking(_) => "check-packing",
        Verb::Contacts(_) => "contacts",
        Verb::Certify(_) => "certify",
        Verb::RhoCheck { .. } => "rho-check",
        Verb::VerifyConfig(_) => "verify-config",
        Verb::Conditions { .. } => "conditions",
        Verb::Steinitz(_) => "steinitz",
        Verb::LambdaSep { .. } => "lambda-sep",
        Verb::Iq { .. } => "iq",
        Verb::Bounds { .. } => "bounds",
        Verb::Density { .. } => "density",
        Verb::DgCert { .. } => "dg-cert",
        Verb::Grid { .. } => "grid",
        Verb::Example5d => "example-5d",
        Verb::Spiky { .. } => "spiky",
        Verb::Search { .. } => "search",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::InputError as u8
            } else {
                0
            });
        }
    };
    let mut tol = Tolerances::default();
    if let Some(t) = cli.common.tol {
        if !(t >= 0.0 && t.is_finite()) {
            eprintln!("seppack: --tol must be a finite non-negative number");
            return ExitCode::from(Status::InputError as u8);
        }
        match cli.verb {
            Verb::Conditions { .. } => tol.interval = t,
            _ => tol.touch = t,
        }
    }
    let (result, status) = match run(&cli.verb, &cli.common, &tol) {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("seppack: {msg}");
            return ExitCode::from(Status::InputError as u8);
        }
    };
    let envelope = json!({
        "tool": "seppack",
        "version": env!("CARGO_PKG_VERSION"),
        "verb": verb_name(&cli.verb),
        "seed": cli.common.seed,
        "tolerances": tol,
        "status": match status {
            Status::Ok => "ok",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
            Status::InputError => "input-error",
        },
        "result": result,
    });
    let text = match cli.common.format {
        Format::Json => {
            serde_json::to_string_pretty(&envelope).expect("JSON values serialise") + "\n"
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &envelope, &mut lines);
            lines.join("\n") + "\n"
        }
    };
    if let Err(Failure(msg)) = emit(&text, cli.common.out.as_deref()) {
        eprintln!("seppack: {msg}");
        return ExitCode::from(Status::InputError as u8);
    }
    ExitCode::from(status as u8)
}
