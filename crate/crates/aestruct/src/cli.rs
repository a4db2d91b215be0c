//! Command-line front end.
//!
//! Subcommands: `validate`, `eval`, `connection`, `classify`, `check`,
//! `catalog`. The spec argument is a path to a spec JSON file; a name
//! matching a bundled catalog entry (with or without a `.json` suffix)
//! is accepted when no such file exists on disk.
//!
//! Exit codes: 0 success / all checks pass; 1 check failures or failed
//! structure validation; 2 usage, IO, or evaluation errors. Errors go to
//! the error stream, results to the output stream. Text output prints
//! numbers with 6 significant digits, JSON with 17. The environment
//! variable `AESTRUCT_SEED` (an unsigned integer) overrides the spec's
//! sampling seed.

use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::classify::{classify, ClassificationReport};
use crate::connections::{
    build_connection, f_tensor, naturality_residuals, potential, torsion, ConnectionKind,
};
use crate::structure::{
    catalog, catalog_spec, frame_at, fundamental_tensor, load_spec, nabla_g_phi, nijenhuis,
    second_nijenhuis, validate_structure, ManifoldSpec,
};
use crate::tensor::{indices, TensorValue};
use crate::verify::{run_suite, render_report, CheckConfig, CheckStatus, ReportFormat};

#[derive(Parser)]
#[command(
    name = "aestruct",
    version,
    about = "Chart-level (alpha, epsilon)-structures: adapted connections and identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure equations of a spec at sampled points.
    Validate {
        /// Spec file path or bundled spec name.
        spec: String,
        #[arg(long, default_value_t = crate::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate a tensor field of the structure at one point.
    Eval {
        spec: String,
        /// Comma-separated coordinates, e.g. 0.1,-0.2
        #[arg(long)]
        point: String,
        /// One of: christoffel, nablaJ, phi, nablaPhi, nijenhuis, second-nijenhuis
        #[arg(long)]
        what: String,
    },
    /// Build an adapted connection at one point and show derived data.
    Connection {
        spec: String,
        #[arg(long)]
        point: String,
        /// One of: levi-civita, first-canonical, kobayashi-nomizu, yano,
        /// chern, well-adapted, bismut, skew, canonical
        #[arg(long)]
        kind: String,
        /// Family parameter; required with --kind canonical, invalid otherwise.
        #[arg(long)]
        s: Option<f64>,
        /// One of: gamma, torsion, potential, naturality, f-tensor
        #[arg(long, default_value = "gamma")]
        show: String,
    },
    /// Detect structural types at sampled points.
    Classify {
        spec: String,
        #[arg(long, default_value_t = crate::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the full identity suite against a spec.
    Check {
        spec: String,
        #[arg(long, default_value_t = crate::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
        /// json or text
        #[arg(long, default_value = "text")]
        format: String,
        /// Write the report to this path instead of the output stream.
        #[arg(long)]
        output: Option<String>,
    },
    /// List the bundled example specs; --emit writes them as files.
    Catalog {
        /// Directory to write one <name>.json file per bundled spec.
        #[arg(long)]
        emit: Option<String>,
    },
}

type CmdResult = Result<i32, (i32, String)>;

fn usage(msg: impl Into<String>) -> (i32, String) {
    (2, msg.into())
}

/// Entry point used by `main`; reads real stdout/stderr and the process
/// environment.
pub fn run_from_env() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    run(&argv, &mut out, &mut err)
}

/// Run one command; returns the exit code and writes results to `out`,
/// errors to `err`.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Validate { spec, samples, tol } => cmd_validate(&spec, samples, tol, out),
        Command::Eval { spec, point, what } => cmd_eval(&spec, &point, &what, out),
        Command::Connection {
            spec,
            point,
            kind,
            s,
            show,
        } => cmd_connection(&spec, &point, &kind, s, &show, out),
        Command::Classify { spec, samples, tol } => cmd_classify(&spec, samples, tol, out),
        Command::Check {
            spec,
            samples,
            tol,
            format,
            output,
        } => cmd_check(&spec, samples, tol, &format, output.as_deref(), out),
        Command::Catalog { emit } => cmd_catalog(emit.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "{msg}");
            code
        }
    }
}

/// Load the spec argument: an existing file wins; otherwise a bundled
/// catalog name (optionally with a .json suffix) is accepted. The
/// AESTRUCT_SEED environment variable, when set, replaces the seed.
fn load_spec_arg(arg: &str) -> Result<ManifoldSpec, (i32, String)> {
    let path = Path::new(arg);
    let mut spec = if path.exists() {
        let bytes = std::fs::read(path)
            .map_err(|e| usage(format!("cannot read spec file '{arg}': {e}")))?;
        load_spec(&bytes).map_err(|e| usage(format!("invalid spec '{arg}': {e}")))?
    } else {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(arg);
        catalog_spec(stem).ok_or_else(|| {
            usage(format!(
                "spec '{arg}' is neither a readable file nor a bundled spec name"
            ))
        })?
    };
    if let Ok(value) = std::env::var("AESTRUCT_SEED") {
        spec.seed = parse_seed(&value).map_err(usage)?;
    }
    Ok(spec)
}

fn parse_seed(value: &str) -> Result<u64, String> {
    value
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("AESTRUCT_SEED must be an unsigned integer, got '{value}'"))
}

fn parse_point(spec: &ManifoldSpec, text: &str) -> Result<Vec<f64>, (i32, String)> {
    let mut point = Vec::new();
    for part in text.split(',') {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse coordinate '{part}' in --point")))?;
        point.push(v);
    }
    if point.len() != spec.n() {
        return Err(usage(format!(
            "--point has {} coordinates but spec '{}' has dimension {}",
            point.len(),
            spec.name,
            spec.n()
        )));
    }
    Ok(point)
}

const PRINT_FLOOR: f64 = 1e-13;

/// Print the nonzero components of a tensor, one line each, 1-based
/// indices, in lexicographic index order.
fn print_components(
    out: &mut dyn Write,
    t: &TensorValue,
    label: impl Fn(&[usize]) -> String,
) -> std::io::Result<()> {
    let mut any = false;
    for idx in indices(t.rank(), t.dim()) {
        let v = t.get(&idx);
        if v.abs() > PRINT_FLOOR {
            writeln!(out, "{} = {:.5e}", label(&idx), v)?;
            any = true;
        }
    }
    if any {
        writeln!(out, "all other components are 0 (below {PRINT_FLOOR:e})")?;
    } else {
        writeln!(out, "all components are 0 (below {PRINT_FLOOR:e})")?;
    }
    Ok(())
}

fn label_kij(name: &str) -> impl Fn(&[usize]) -> String + '_ {
    move |idx| format!("{name}^{}_{{{},{}}}", idx[0] + 1, idx[1] + 1, idx[2] + 1)
}

fn label_lower(name: &str) -> impl Fn(&[usize]) -> String + '_ {
    move |idx| {
        let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        format!("{name}_{{{}}}", parts.join(","))
    }
}

fn point_header(point: &[f64]) -> String {
    let parts: Vec<String> = point.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_validate(spec_arg: &str, samples: usize, tol: f64, out: &mut dyn Write) -> CmdResult {
    let spec = load_spec_arg(spec_arg)?;
    let report = validate_structure(&spec, samples, tol)
        .map_err(|e| usage(format!("validation aborted: {e}")))?;
    let w = |o: &mut dyn Write| -> std::io::Result<()> {
        writeln!(o, "spec: {}", report.spec_name)?;
        writeln!(o, "samples: {}  tol: {:.5e}", report.samples, report.tol)?;
        writeln!(o, "J^2 residual: {:.5e}", report.j_squared_residual)?;
        writeln!(o, "compatibility residual: {:.5e}", report.compatibility_residual)?;
        writeln!(o, "trace residual: {:.5e}", report.trace_residual)?;
        writeln!(
            o,
            "metric symmetry residual: {:.5e}",
            report.metric_symmetry_residual
        )?;
        writeln!(o, "min |det g|: {:.5e}", report.min_abs_det)?;
        if spec.epsilon > 0.0 {
            writeln!(
                o,
                "positive definite: {}",
                if report.spd_ok { "yes" } else { "no" }
            )?;
        }
        for warning in &report.warnings {
            writeln!(o, "warning: {warning}")?;
        }
        writeln!(o, "result: {}", if report.pass { "PASS" } else { "FAIL" })?;
        Ok(())
    };
    w(out).map_err(|e| usage(format!("write error: {e}")))?;
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_eval(spec_arg: &str, point_arg: &str, what: &str, out: &mut dyn Write) -> CmdResult {
    let spec = load_spec_arg(spec_arg)?;
    let point = parse_point(&spec, point_arg)?;
    let frame = frame_at(&spec, &point)
        .map_err(|e| usage(format!("evaluation failed: {e}")))?;
    let (tensor, label): (TensorValue, Box<dyn Fn(&[usize]) -> String>) = match what {
        "christoffel" => (frame.gamma_g.clone(), Box::new(label_kij("Gamma"))),
        "nablaJ" => (frame.nabla_g_j.clone(), Box::new(label_kij("(nablaJ)"))),
        "phi" => (fundamental_tensor(&frame), Box::new(label_lower("Phi"))),
        "nablaPhi" => (nabla_g_phi(&frame), Box::new(label_lower("(nablaPhi)"))),
        "nijenhuis" => (nijenhuis(&frame), Box::new(label_kij("N"))),
        "second-nijenhuis" => (second_nijenhuis(&frame), Box::new(label_kij("Nt"))),
        other => {
            return Err(usage(format!(
                "unknown --what '{other}'; expected christoffel, nablaJ, phi, nablaPhi, nijenhuis or second-nijenhuis"
            )))
        }
    };
    writeln!(out, "{what} for {} at {}", spec.name, point_header(&point))
        .and_then(|_| print_components(out, &tensor, label))
        .map_err(|e| usage(format!("write error: {e}")))?;
    Ok(0)
}

fn parse_kind(kind: &str, s: Option<f64>) -> Result<ConnectionKind, (i32, String)> {
    if s.is_some() && kind != "canonical" {
        return Err(usage("--s is only valid with --kind canonical"));
    }
    Ok(match kind {
        "levi-civita" => ConnectionKind::LeviCivita,
        "first-canonical" => ConnectionKind::FirstCanonical,
        "kobayashi-nomizu" => ConnectionKind::KobayashiNomizu,
        "yano" => ConnectionKind::Yano,
        "chern" => ConnectionKind::Chern,
        "well-adapted" => ConnectionKind::WellAdapted,
        "bismut" => ConnectionKind::Bismut,
        "skew" => ConnectionKind::Skew,
        "canonical" => match s {
            Some(s) => ConnectionKind::Canonical(s),
            None => return Err(usage("--kind canonical requires --s")),
        },
        other => {
            return Err(usage(format!(
                "unknown --kind '{other}'; expected levi-civita, first-canonical, kobayashi-nomizu, yano, chern, well-adapted, bismut, skew or canonical"
            )))
        }
    })
}

fn cmd_connection(
    spec_arg: &str,
    point_arg: &str,
    kind_arg: &str,
    s: Option<f64>,
    show: &str,
    out: &mut dyn Write,
) -> CmdResult {
    let spec = load_spec_arg(spec_arg)?;
    let point = parse_point(&spec, point_arg)?;
    let kind = parse_kind(kind_arg, s)?;
    let frame = frame_at(&spec, &point)
        .map_err(|e| usage(format!("evaluation failed: {e}")))?;
    let conn = build_connection(&frame, &kind).map_err(|e| usage(e.to_string()))?;
    let w = |o: &mut dyn Write| -> Result<(), (i32, String)> {
        let header = |o: &mut dyn Write, what: &str| {
            writeln!(
                o,
                "{what} of {} for {} at {}",
                conn.kind_name,
                spec.name,
                point_header(&point)
            )
        };
        let io = |r: std::io::Result<()>| r.map_err(|e| usage(format!("write error: {e}")));
        match show {
            "gamma" => {
                io(header(o, "gamma"))?;
                io(print_components(o, &conn.gamma, label_kij("Gamma")))
            }
            "torsion" => {
                io(header(o, "torsion"))?;
                io(print_components(o, &torsion(&conn), label_kij("T")))
            }
            "potential" => {
                io(header(o, "potential"))?;
                io(print_components(o, &potential(&conn), label_kij("S")))
            }
            "naturality" => {
                io(header(o, "naturality"))?;
                let (rj, rg) = naturality_residuals(&conn);
                io(writeln!(o, "max |nabla J| = {rj:.5e}"))?;
                io(writeln!(o, "max |nabla g| = {rg:.5e}"))
            }
            "f-tensor" => {
                io(header(o, "f-tensor"))?;
                io(print_components(o, &f_tensor(&conn), label_lower("F")))
            }
            other => Err(usage(format!(
                "unknown --show '{other}'; expected gamma, torsion, potential, naturality or f-tensor"
            ))),
        }
    };
    w(out)?;
    Ok(0)
}

fn cmd_classify(spec_arg: &str, samples: usize, tol: f64, out: &mut dyn Write) -> CmdResult {
    let spec = load_spec_arg(spec_arg)?;
    let report = classify(&spec, samples, tol)
        .map_err(|e| usage(format!("classification aborted: {e}")))?;
    let w = |o: &mut dyn Write| -> std::io::Result<()> {
        writeln!(
            o,
            "spec: {} (alpha={}, epsilon={})",
            report.spec_name, report.alpha, report.epsilon
        )?;
        writeln!(o, "samples: {}  tol: {:.5e}", report.samples, report.tol)?;
        for p in &report.predicates {
            writeln!(
                o,
                "{}: {} (max_residual={:.5e})",
                p.name,
                if p.verdict { "holds" } else { "fails" },
                p.max_residual
            )?;
        }
        for c in &report.consistency {
            if !c.ok {
                writeln!(o, "consistency violation: {}", c.name)?;
            }
        }
        writeln!(
            o,
            "consistency: {}",
            if report.consistent() { "ok" } else { "VIOLATED" }
        )?;
        Ok(())
    };
    w(out).map_err(|e| usage(format!("write error: {e}")))?;
    Ok(if report.consistent() { 0 } else { 1 })
}

fn cmd_check(
    spec_arg: &str,
    samples: usize,
    tol: f64,
    format: &str,
    output: Option<&str>,
    out: &mut dyn Write,
) -> CmdResult {
    let format = match format {
        "json" => ReportFormat::Json,
        "text" => ReportFormat::Text,
        other => return Err(usage(format!("unknown --format '{other}'; expected json or text"))),
    };
    let spec = load_spec_arg(spec_arg)?;
    let cfg = CheckConfig {
        samples,
        tol,
        ..CheckConfig::default()
    };
    let reports = run_suite(&spec, &cfg)
        .map_err(|e| usage(format!("suite aborted: {e}")))?;
    let rendered = render_report(&reports, format);
    match output {
        Some(path) => {
            std::fs::write(path, rendered.as_bytes())
                .map_err(|e| usage(format!("cannot write '{path}': {e}")))?;
        }
        None => {
            write!(out, "{rendered}").map_err(|e| usage(format!("write error: {e}")))?;
            if format == ReportFormat::Json {
                let _ = writeln!(out);
            }
        }
    }
    let failed = reports
        .iter()
        .any(|r| matches!(r.status, CheckStatus::Fail));
    Ok(if failed { 1 } else { 0 })
}

fn cmd_catalog(emit: Option<&str>, out: &mut dyn Write) -> CmdResult {
    match emit {
        None => {
            for (name, _) in catalog() {
                let spec = catalog_spec(name).expect("bundled spec must load");
                writeln!(
                    out,
                    "{name}  n={}  alpha={}  epsilon={}",
                    spec.n(),
                    spec.alpha,
                    spec.epsilon
                )
                .map_err(|e| usage(format!("write error: {e}")))?;
            }
            Ok(0)
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| usage(format!("cannot create '{dir}': {e}")))?;
            for (name, json) in catalog() {
                let path = Path::new(dir).join(format!("{name}.json"));
                std::fs::write(&path, json.as_bytes())
                    .map_err(|e| usage(format!("cannot write '{}': {e}", path.display())))?;
                writeln!(out, "wrote {}", path.display())
                    .map_err(|e| usage(format!("write error: {e}")))?;
            }
            Ok(0)
        }
    }
}

/// JSON form of a classification report (17 significant digits), for
/// embedding in other tooling.
pub fn classification_to_json(report: &ClassificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"spec\":\"{}\",\"alpha\":{:.16e},\"epsilon\":{:.16e},\"samples\":{},\"tol\":{:.16e},\"predicates\":[",
        report.spec_name, report.alpha, report.epsilon, report.samples, report.tol
    ));
    for (i, p) in report.predicates.iter().enumerate() {
        out.push_str(&format!(
            "{}{{\"name\":\"{}\",\"max_residual\":{:.16e},\"verdict\":{},\"samples\":{}}}",
            if i > 0 { "," } else { "" },
            p.name,
            p.max_residual,
            p.verdict,
            p.samples
        ));
    }
    out.push_str("],\"consistency\":[");
    for (i, c) in report.consistency.iter().enumerate() {
        out.push_str(&format!(
            "{}{{\"name\":\"{}\",\"ok\":{}}}",
            if i > 0 { "," } else { "" },
            c.name,
            c.ok
        ));
    }
    out.push_str("]}");
    out
}
