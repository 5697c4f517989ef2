//! The `minlift` command line: `catalog`, `check` and `sweep`.
//!
//! Every command prints a fixed-width table followed by a JSON document on
//! stdout. Exit codes: 0 pass, 1 criterion failure, 2 usage error, 3 numeric,
//! domain or I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::DEFAULT_NODES;
use crate::criteria::{
    check_css_univalence, check_hs, check_injectivity_boundary, check_koepf, check_local_univalence,
    check_rotational_symmetry, check_taylor, dilatation_gap, normalization_scan, search_koepf_alpha,
    CriterionReport, DiskGrid,
};
use crate::error::{Error, Result};
use crate::lift::family_member;
use crate::mappings::{
    catalog, catalog_dilatation_label, combine, FamilySpec, HarmonicMap, CATALOG_NAMES, COMBINE_DILATATION_TOL,
    IMAGINARY_DIRECTION,
};
use crate::surface::export::{self, MeshFormat};
use crate::surface::{build_mesh, verify_minimality, MinimalityReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Boundary samples for the injectivity check in sweeps.
pub const SWEEP_BOUNDARY_SAMPLES: usize = 2000;
/// Boundary circle radius as a fraction of the grid radius.
pub const SWEEP_BOUNDARY_FRACTION: f64 = 0.9;
const SWEEP_SEED: u64 = 0x6d69_6e6c_6966_7400;

#[derive(Debug, Parser)]
#[command(name = "minlift", version, about = "Harmonic mappings, univalence checks and minimal-surface lifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in mappings.
    Catalog,
    /// Run one criterion on a mapping or a pair.
    Check(CheckArgs),
    /// Lift a one-parameter family and export a mesh per member.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionName {
    LocalUnivalence,
    Hs,
    Koepf,
    Taylor,
    Css,
    DilatationEqual,
    Symmetry,
    Injectivity,
    Normalization,
}

/// Which analytic function the shear-based checks receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhiConvention {
    /// `h - e^{2iβ} g`
    Css,
    /// `h - g`, whatever `β` is
    Paper,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of rings.
    #[arg(long, default_value_t = 100)]
    pub nr: usize,
    /// Number of angles per ring.
    #[arg(long, default_value_t = 256)]
    pub ntheta: usize,
    /// Grid radius; defaults to min(0.95, r_max - 0.01).
    #[arg(long)]
    pub rmax: Option<f64>,
}

impl GridArgs {
    fn grid_for(&self, map_r_max: f64) -> Result<DiskGrid> {
        let r = self.rmax.unwrap_or(DiskGrid::default_for(map_r_max).r_max);
        if r >= map_r_max {
            return Err(Error::domain(Complex64::new(r, 0.0), map_r_max));
        }
        DiskGrid::new(self.nr, self.ntheta, r)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Catalog mapping to test.
    #[arg(long, conflicts_with_all = ["pair", "map_json"])]
    pub map: Option<String>,
    /// Two catalog mappings `a,b`; other criteria use their combination at `--s`.
    #[arg(long, value_parser = parse_pair)]
    pub pair: Option<(String, String)>,
    /// Mapping stored as JSON.
    #[arg(long, conflicts_with = "pair")]
    pub map_json: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub criterion: CriterionName,
    /// Combination parameter used with `--pair`.
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = IMAGINARY_DIRECTION, allow_negative_numbers = true)]
    pub beta: f64,
    /// Koepf/Taylor angle; koepf searches 64 angles when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Rotation order for `symmetry`.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Override the pass tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Boundary radius for `injectivity`; defaults to 0.9 of the grid radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Boundary samples for `injectivity`.
    #[arg(long, default_value_t = SWEEP_BOUNDARY_SAMPLES)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = PhiConvention::Css)]
    pub phi_convention: PhiConvention,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long, default_value_t = 6)]
    pub steps: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Gauss–Legendre nodes for the height integral.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// obj, ply, csv or json.
    #[arg(long, default_value = "obj")]
    pub format: MeshFormat,
}

fn parse_pair(text: &str) -> std::result::Result<(String, String), String> {
    match text.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(',') => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("expected `a,b`, got `{text}`")),
    }
}

/// Result of a command: text for stdout plus the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownName(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        Error::DilatationMismatch { .. } => EXIT_FAIL,
        Error::Domain { .. }
        | Error::Pole { .. }
        | Error::NonFinite { .. }
        | Error::DegenerateCurve { .. }
        | Error::Io(_)
        | Error::Json(_) => EXIT_NUMERIC,
    }
}

/// Parses `args` (program name first), runs the command and prints its output.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Some(n) = std::env::var("MINLIFT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        crate::par::init_threads(n);
    }
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            outcome.code
        }
        Err(e) => {
            eprintln!("minlift: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Catalog => cmd_catalog(),
        Command::Check(args) => cmd_check(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn with_json(mut table: String, doc: &Value) -> Result<String> {
    table.push('\n');
    table.push_str(&serde_json::to_string_pretty(doc)?);
    table.push('\n');
    Ok(table)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.9}{:+.9}i", z.re, z.im)
}

pub fn cmd_catalog() -> Result<Outcome> {
    let mut table = format!("{:<14} {:<8} {:>6}  {:<8} {}\n", "name", "omega", "r_max", "q", "h ; g");
    let mut rows = Vec::new();
    for name in CATALOG_NAMES {
        let f = catalog(name)?;
        let omega = catalog_dilatation_label(name).unwrap_or("?");
        let _ = writeln!(
            table,
            "{:<14} {:<8} {:>6.2}  {:<8} {} ; {}",
            name,
            omega,
            f.r_max(),
            f.q().to_string(),
            f.h(),
            f.g()
        );
        rows.push(json!({
            "name": name,
            "h": f.h().to_string(),
            "g": f.g().to_string(),
            "q": f.q().to_string(),
            "omega": omega,
            "r_max": f.r_max(),
        }));
    }
    let stdout = with_json(table, &json!({ "command": "catalog", "entries": rows }))?;
    Ok(Outcome { stdout, code: EXIT_PASS })
}

fn load_map(args: &CheckArgs) -> Result<HarmonicMap> {
    if let Some(name) = &args.map {
        return catalog(name);
    }
    if let Some(path) = &args.map_json {
        return HarmonicMap::from_json(&std::fs::read_to_string(path)?);
    }
    match &args.pair {
        Some(pair) => combine(&catalog(&pair.0)?, &catalog(&pair.1)?, args.s),
        None => Err(Error::InvalidArgument("one of --map, --map-json or --pair is required".into())),
    }
}

fn shear_phi(f: &HarmonicMap, args: &CheckArgs) -> crate::AnalyticExpr {
    match args.phi_convention {
        PhiConvention::Css => f.shear(args.beta),
        PhiConvention::Paper => f.h().clone() - f.g().clone(),
    }
}

fn report_table(subject: &str, r: &CriterionReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{:<18} {}", "criterion", r.criterion);
    let _ = writeln!(t, "{:<18} {}", "map", subject);
    let _ = writeln!(t, "{:<18} {}x{} r_max={}", "grid", r.grid.n_r, r.grid.n_theta, r.grid.r_max);
    let _ = writeln!(t, "{:<18} {:.12e}", "min_value", r.min_value);
    let _ = writeln!(t, "{:<18} {}", "argmin", fmt_complex(r.argmin));
    let _ = writeln!(t, "{:<18} {:e}", "tolerance", r.tolerance);
    for (k, v) in &r.parameters {
        let _ = writeln!(t, "{:<18} {}", k, v);
    }
    let _ = writeln!(t, "{:<18} {}", "result", if r.passed { "PASS" } else { "FAIL" });
    t
}

fn report_outcome(subject: &str, report: CriterionReport, tol: Option<f64>) -> Result<Outcome> {
    let report = match tol {
        Some(t) => report.with_tolerance(t),
        None => report,
    };
    let doc = json!({ "command": "check", "map": subject, "report": report });
    let code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome { stdout: with_json(report_table(subject, &report), &doc)?, code })
}

pub fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    if args.criterion == CriterionName::DilatationEqual {
        return check_pair_dilatation(args);
    }
    let f = load_map(args)?;
    let subject = f.name().to_string();
    let grid = args.grid.grid_for(f.r_max())?;
    let report = match args.criterion {
        CriterionName::LocalUnivalence => check_local_univalence(&f, &grid)?,
        CriterionName::Hs => check_hs(&shear_phi(&f, args), &grid)?,
        CriterionName::Koepf => match args.alpha {
            Some(alpha) => check_koepf(&shear_phi(&f, args), args.beta, alpha, &grid)?,
            None => search_koepf_alpha(&shear_phi(&f, args), args.beta, &grid)?,
        },
        CriterionName::Taylor => check_taylor(&shear_phi(&f, args), args.beta, args.alpha.unwrap_or(0.0), &grid)?,
        CriterionName::Css => check_css_univalence(&f, args.beta, &grid)?,
        CriterionName::Symmetry => check_rotational_symmetry(&f, args.k, &grid)?,
        CriterionName::Injectivity => {
            let r = args.radius.unwrap_or(SWEEP_BOUNDARY_FRACTION * grid.r_max);
            check_injectivity_boundary(&f, r, args.samples)?
        }
        CriterionName::Normalization => return check_normalization(&f, args, &grid),
        CriterionName::DilatationEqual => unreachable!(),
    };
    report_outcome(&subject, report, args.tol)
}

fn check_pair_dilatation(args: &CheckArgs) -> Result<Outcome> {
    let pair = args
        .pair
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("dilatation-equal needs --pair a,b".into()))?;
    let (a, b) = (catalog(&pair.0)?, catalog(&pair.1)?);
    let grid = args.grid.grid_for(a.r_max().min(b.r_max()))?;
    let tolerance = args.tol.unwrap_or(COMBINE_DILATATION_TOL);
    let (gap, at) = dilatation_gap(&a, &b, &grid)?;
    let passed = gap <= tolerance;
    let subject = format!("{},{}", pair.0, pair.1);
    let mut table = String::new();
    let _ = writeln!(table, "{:<18} dilatation_equal", "criterion");
    let _ = writeln!(table, "{:<18} {}", "pair", subject);
    let _ = writeln!(table, "{:<18} {}x{} r_max={}", "grid", grid.n_r, grid.n_theta, grid.r_max);
    let _ = writeln!(table, "{:<18} {:.12e}", "max_gap", gap);
    let _ = writeln!(table, "{:<18} {}", "argmax", fmt_complex(at));
    let _ = writeln!(table, "{:<18} {:e}", "tolerance", tolerance);
    let _ = writeln!(table, "{:<18} {}", "result", if passed { "PASS" } else { "FAIL" });
    let doc = json!({
        "command": "check",
        "map": subject,
        "report": {
            "criterion": "dilatation_equal",
            "grid": grid,
            "max_gap": gap,
            "argmax": at,
            "tolerance": tolerance,
            "passed": passed,
        }
    });
    Ok(Outcome { stdout: with_json(table, &doc)?, code: if passed { EXIT_PASS } else { EXIT_FAIL } })
}

fn check_normalization(f: &HarmonicMap, args: &CheckArgs, grid: &DiskGrid) -> Result<Outcome> {
    let scan = normalization_scan(&shear_phi(f, args), grid.r_max, 8, grid.n_theta, 0.05)?;
    let mut table = String::new();
    let _ = writeln!(table, "{:<18} normalization (diagnostic)", "criterion");
    let _ = writeln!(table, "{:<18} {}", "map", f.name());
    for ((r, hi), lo) in scan.radii.iter().zip(&scan.sup_points).zip(&scan.inf_points) {
        let _ = writeln!(table, "r={:<16.6} sup@{}  inf@{}", r, fmt_complex(*hi), fmt_complex(*lo));
    }
    let _ = writeln!(table, "{:<18} {}", "sup_near_plus_one", scan.sup_near_plus_one);
    let _ = writeln!(table, "{:<18} {}", "inf_near_minus_one", scan.inf_near_minus_one);
    let doc = json!({ "command": "check", "map": f.name(), "normalization": scan });
    Ok(Outcome { stdout: with_json(table, &doc)?, code: EXIT_PASS })
}

/// Verification record for one sweep member.
#[derive(Debug, Clone, Serialize)]
pub struct MemberSummary {
    pub s: f64,
    pub file: String,
    pub local_univalence: CriterionReport,
    pub css_imaginary: CriterionReport,
    /// Whether `css_imaginary` counts toward `passed`.
    pub css_gating: bool,
    pub injectivity: CriterionReport,
    /// Informational; only meaningful for symmetric families.
    pub symmetry: CriterionReport,
    pub minimality: MinimalityReport,
    pub passed: bool,
}

/// Mesh file name for member `s` of `family`.
pub fn member_file_name(family: &str, s: f64, format: MeshFormat) -> String {
    format!("family_{}_s{}.{}", family, (100.0 * s).round() as i64, format.extension())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    let spec = FamilySpec::uniform(catalog(&args.from)?, catalog(&args.to)?, args.steps)?;
    let grid = args.grid.grid_for(spec.r_max())?;
    let pre = crate::mappings::precondition_grid(&spec.endpoint_a, &spec.endpoint_b);
    let (gap, _) = dilatation_gap(&spec.endpoint_a, &spec.endpoint_b, &pre)?;
    if gap > COMBINE_DILATATION_TOL {
        return Err(Error::DilatationMismatch { max_gap: gap, tolerance: COMBINE_DILATATION_TOL });
    }
    std::fs::create_dir_all(&args.out)?;
    let family = spec.name();
    let css_gating = [&spec.endpoint_a, &spec.endpoint_b]
        .iter()
        .map(|f| check_css_univalence(f, IMAGINARY_DIRECTION, &grid).map(|r| r.passed))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|p| p);
    let boundary_r = SWEEP_BOUNDARY_FRACTION * grid.r_max;

    let mut members = Vec::new();
    for (i, &s) in spec.parameters().iter().enumerate() {
        let f = family_member(&spec, s)?;
        let mesh = build_mesh(&f, &grid, args.nodes)?;
        let file = member_file_name(&family, s, args.format);
        export::export(&mesh, args.format, &args.out.join(&file))?;
        let local_univalence = check_local_univalence(&f, &grid)?;
        let css_imaginary = check_css_univalence(&f, IMAGINARY_DIRECTION, &grid)?;
        let injectivity = check_injectivity_boundary(&f, boundary_r, SWEEP_BOUNDARY_SAMPLES)?;
        let symmetry = check_rotational_symmetry(&f, 4, &grid)?;
        let minimality = verify_minimality(&f, &mesh, SWEEP_SEED + i as u64)?;
        let passed = local_univalence.passed
            && injectivity.passed
            && minimality.passed
            && (!css_gating || css_imaginary.passed);
        members.push(MemberSummary {
            s,
            file,
            local_univalence,
            css_imaginary,
            css_gating,
            injectivity,
            symmetry,
            minimality,
            passed,
        });
    }
    let all_passed = members.iter().all(|m| m.passed);
    let doc = json!({
        "command": "sweep",
        "family": family,
        "grid": grid,
        "nodes": args.nodes,
        "format": args.format.extension(),
        "boundary_radius": boundary_r,
        "boundary_samples": SWEEP_BOUNDARY_SAMPLES,
        "css_gating": css_gating,
        "members": members,
        "passed": all_passed,
    });
    let summary_path = args.out.join(format!("family_{family}_summary.json"));
    export::write_atomic(&summary_path, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;

    let mut table = format!(
        "{:<6} {:<44} {:>11} {:>11} {:>11} {:>9} {:>9} {:>9}  {}\n",
        "s", "file", "jacobian", "css", "boundary", "iso", "|H|", "lap", "result"
    );
    for m in &members {
        let _ = writeln!(
            table,
            "{:<6.3} {:<44} {:>11.3e} {:>11.3e} {:>11.3e} {:>9.1e} {:>9.1e} {:>9.1e}  {}",
            m.s,
            m.file,
            m.local_univalence.min_value,
            m.css_imaginary.min_value,
            m.injectivity.min_value,
            m.minimality.max_iso_ratio,
            m.minimality.max_mean_curvature,
            m.minimality.max_laplacian,
            if m.passed { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(table, "summary: {}", summary_path.display());
    let stdout = with_json(table, &doc)?;
    Ok(Outcome { stdout, code: if all_passed { EXIT_PASS } else { EXIT_FAIL } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<Outcome> {
        let cli = Cli::try_parse_from(std::iter::once("minlift").chain(args.iter().copied())).unwrap();
        execute(&cli.command)
    }

    #[test]
    fn catalog_lists_six_rows() {
        let out = run(&["catalog"]).unwrap();
        let rows: Vec<&str> = out.stdout.lines().take_while(|l| !l.is_empty()).collect();
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().any(|r| r.starts_with("enneper ") && r.contains("z^2")));
        assert!(rows.iter().any(|r| r.starts_with("noid4") && r.contains("0.95")));
    }

    #[test]
    fn dilatation_equal_pair_fails() {
        let out = run(&["check", "--pair", "enneper,scherk-doubly", "--criterion", "dilatation-equal"]).unwrap();
        assert_eq!(out.code, EXIT_FAIL);
        let out = run(&["check", "--pair", "enneper,scherk-singly", "--criterion", "dilatation-equal"]).unwrap();
        assert_eq!(out.code, EXIT_PASS);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::UnknownName("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Domain { re: 1.0, im: 0.0, r_max: 0.99 }), EXIT_NUMERIC);
        let err = run(&["check", "--map", "torus", "--criterion", "hs"]).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
        let err = run(&["check", "--map", "enneper", "--criterion", "hs", "--rmax", "0.995"]).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_NUMERIC);
    }

    #[test]
    fn file_names() {
        assert_eq!(member_file_name("enneper4-to-noid4", 1.0 / 3.0, MeshFormat::Obj), "family_enneper4-to-noid4_s33.obj");
        assert_eq!(member_file_name("a-to-b", 0.0, MeshFormat::Ply), "family_a-to-b_s0.ply");
    }
}
