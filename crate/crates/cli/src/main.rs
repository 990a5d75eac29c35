//! Command-line front end: solve → analyze → report pipelines over the
//! problem files, with deterministic, byte-stable outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use signorini_core::{
    analysis, cases, complementarity_product, component_stability, critical_points,
    error_norms, extract_coincidence, fit_exponent, io, mesh_hierarchy, partition_dofs,
    solve_level, AnalyticField, ConditionPair, ConditionTag, CornerMap, DiscreteSolution,
    FitCenter, FitWindow, GradingParams, ObstacleData, Point, Problem, SolveOptions, TriMesh,
};

#[derive(Parser)]
#[command(name = "signorini", version, about = "Finite-element laboratory for the scalar Signorini problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem on a refinement hierarchy and write solution
    /// files, meshes and solver traces.
    Solve(RunConfig),
    /// Extract the coincidence structure and the complementarity product
    /// from existing solution files.
    Analyze {
        #[command(flatten)]
        config: RunConfig,
        /// Exclusion radius around critical points for the
        /// complementarity product.
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
    },
    /// Fit the singular exponent at a critical point or at a detected
    /// coincidence endpoint of the finest solution.
    Fit {
        #[command(flatten)]
        config: RunConfig,
        /// Expansion center: `cp:<index>` (critical point) or
        /// `endpoint:<index>` (detected coincidence endpoint).
        #[arg(long)]
        center: String,
        /// Fit window `r_min,r_max` (defaults to [4h_loc, half the
        /// distance to the nearest other center]).
        #[arg(long)]
        window: Option<String>,
        /// Number of geometrically spaced arcs.
        #[arg(long)]
        arcs: Option<usize>,
    },
    /// Check the sector energy identity of the conformal corner map.
    VerifyMap {
        /// Sector opening in radians (fractions like 3pi/2 accepted).
        #[arg(long)]
        alpha: String,
        /// Gauss points per direction.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Output directory (prints to stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error norms against the exact solution and fitted convergence
    /// rates from existing solution files.
    Convergence(RunConfig),
    /// List or emit the built-in benchmark cases.
    Case {
        #[command(subcommand)]
        action: CaseAction,
    },
}

#[derive(Subcommand)]
enum CaseAction {
    /// Print the names of the built-in cases.
    List,
    /// Emit the problem file of a case (stdout, or <out>/<name>.json).
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Problem file (JSON).
    #[arg(long)]
    problem: PathBuf,
    /// Target mesh size of the coarsest level.
    #[arg(long, default_value_t = 0.25)]
    h: f64,
    /// Number of refinement levels (level 0 is the coarsest).
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Radial grading `cp-index=mu,radius` toward a critical point;
    /// mu accepts fractions like 1/3.
    #[arg(long)]
    grade: Option<String>,
    /// Relative residual tolerance of the inner linear solves.
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Input(String),
    Solver(String),
    Analysis(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Solver(_) => "solver",
            CliError::Analysis(_) => "analysis",
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Solver(m) | CliError::Analysis(m) => m,
        }
    }
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Analysis(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.message() }
            });
            eprintln!("{record}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(config) => cmd_solve(&config),
        Command::Analyze { config, delta } => cmd_analyze(&config, delta),
        Command::Fit {
            config,
            center,
            window,
            arcs,
        } => cmd_fit(&config, &center, window.as_deref(), arcs),
        Command::VerifyMap {
            alpha,
            resolution,
            out,
        } => cmd_verify_map(&alpha, resolution, out.as_deref()),
        Command::Convergence(config) => cmd_convergence(&config),
        Command::Case { action } => match action {
            CaseAction::List => {
                for name in cases::case_names() {
                    println!("{name}");
                }
                Ok(())
            }
            CaseAction::Emit { name, out } => cmd_case_emit(&name, out.as_deref()),
        },
    }
}

fn parse_angle(text: &str) -> Result<f64, CliError> {
    let t = text.trim().to_lowercase();
    let parse_side = |s: &str| -> Option<f64> {
        let s = s.trim();
        if s.is_empty() {
            return Some(1.0);
        }
        if let Some(rest) = s.strip_suffix("pi") {
            let factor = rest.trim();
            if factor.is_empty() {
                Some(std::f64::consts::PI)
            } else {
                factor.parse::<f64>().ok().map(|f| f * std::f64::consts::PI)
            }
        } else {
            s.parse::<f64>().ok()
        }
    };
    let value = if let Some((num, den)) = t.split_once('/') {
        match (parse_side(num), parse_side(den)) {
            (Some(n), Some(d)) if d != 0.0 => Some(n / d),
            _ => None,
        }
    } else {
        parse_side(&t)
    };
    value.ok_or_else(|| CliError::Input(format!("cannot parse angle '{text}'")))
}

fn parse_fraction(text: &str) -> Result<f64, CliError> {
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad fraction '{text}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad fraction '{text}'")))?;
        if d == 0.0 {
            return Err(CliError::Input(format!("zero denominator in '{text}'")));
        }
        Ok(n / d)
    } else {
        text.trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad number '{text}'")))
    }
}

fn load_problem(config: &RunConfig) -> Result<Problem, CliError> {
    let text = fs::read_to_string(&config.problem)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", config.problem.display())))?;
    io::problem_from_json(&text).map_err(|e| CliError::Input(e.to_string()))
}

fn grading_params(
    config: &RunConfig,
    problem: &Problem,
) -> Result<Option<GradingParams>, CliError> {
    let Some(spec) = &config.grade else {
        return Ok(None);
    };
    let (idx_str, rest) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Input(format!("--grade expects cp=mu,R, got '{spec}'")))?;
    let (mu_str, r_str) = rest
        .split_once(',')
        .ok_or_else(|| CliError::Input(format!("--grade expects cp=mu,R, got '{spec}'")))?;
    let idx: usize = idx_str
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("bad critical point index '{idx_str}'")))?;
    let cps = critical_points(&problem.boundary);
    let cp = cps
        .get(idx)
        .ok_or_else(|| CliError::Input(format!("critical point {idx} of {} does not exist", cps.len())))?;
    let mu = parse_fraction(mu_str)?;
    let radius = parse_fraction(r_str)?;
    if !(mu > 0.0 && mu <= 1.0) || radius <= 0.0 {
        return Err(CliError::Input(format!(
            "grading needs mu in (0,1] and radius > 0, got mu={mu}, R={radius}"
        )));
    }
    Ok(Some(GradingParams {
        center: cp.location,
        mu,
        radius,
    }))
}

fn build_meshes(config: &RunConfig, problem: &Problem) -> Result<Vec<TriMesh>, CliError> {
    if config.levels < 1 {
        return Err(CliError::Input("--levels must be at least 1".into()));
    }
    if !config.h.is_finite() || config.h <= 0.0 {
        return Err(CliError::Input("--h must be positive".into()));
    }
    if !(config.tol > 0.0 && config.tol < 1.0) {
        return Err(CliError::Input("--tol must be in (0, 1)".into()));
    }
    let grading = grading_params(config, problem)?;
    mesh_hierarchy(&problem.boundary, config.h, config.levels, grading)
        .map_err(|e| CliError::Input(e.to_string()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn mesh_path(out: &Path, level: usize) -> PathBuf {
    out.join(format!("mesh_L{level}.txt"))
}
fn solution_path(out: &Path, level: usize) -> PathBuf {
    out.join(format!("solution_L{level}.csv"))
}
fn trace_path(out: &Path, level: usize) -> PathBuf {
    out.join(format!("trace_L{level}.json"))
}

fn cmd_solve(config: &RunConfig) -> Result<(), CliError> {
    let problem = load_problem(config)?;
    let meshes = build_meshes(config, &problem)?;
    fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", config.out.display())))?;
    let opts = SolveOptions {
        linear_tol: config.tol,
        ..SolveOptions::default()
    };
    let mut all_pass = true;
    for (k, mesh) in meshes.iter().enumerate() {
        let level = solve_level(&problem, mesh, &opts)
            .map_err(|e| CliError::Solver(format!("level {k}: {e}")))?;
        write_file(&mesh_path(&config.out, k), &mesh.to_text())?;
        write_file(
            &solution_path(&config.out, k),
            &io::solution_to_csv(mesh, &level.assembled.partition, &level.solution),
        )?;
        let artifact = io::SolveArtifact::new(mesh, &level.solution, level.kkt);
        write_file(&trace_path(&config.out, k), &artifact.to_json())?;
        all_pass &= level.kkt.passes(1e-10);
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Solver(
            "complementarity residuals above 1e-10 (see trace files)".into(),
        ))
    }
}

/// Load a previously solved level: mesh, solution and artifact.
fn load_level(
    config: &RunConfig,
    problem: &Problem,
    level: usize,
) -> Result<(TriMesh, signorini_core::DofPartition, ObstacleData, DiscreteSolution), CliError> {
    let mesh_text = fs::read_to_string(mesh_path(&config.out, level)).map_err(|_| {
        CliError::Analysis(format!(
            "missing solution at level {level}: run `solve` into {} first",
            config.out.display()
        ))
    })?;
    let mesh = TriMesh::from_text(&mesh_text).map_err(|e| CliError::Analysis(e.to_string()))?;
    let csv = fs::read_to_string(solution_path(&config.out, level))
        .map_err(|_| CliError::Analysis(format!("missing solution CSV at level {level}")))?;
    let (values, multiplier) = io::solution_from_csv(&csv, mesh.node_count())
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let artifact_text = fs::read_to_string(trace_path(&config.out, level))
        .map_err(|_| CliError::Analysis(format!("missing trace at level {level}")))?;
    let artifact =
        io::SolveArtifact::from_json(&artifact_text).map_err(|e| CliError::Analysis(e.to_string()))?;
    let partition = partition_dofs(&mesh, &problem.boundary);
    let obstacle = match &problem.gap {
        None => ObstacleData::zeros(mesh.node_count()),
        Some(field) => ObstacleData::from_field(&mesh, field),
    };
    let solution = DiscreteSolution {
        values,
        multiplier,
        active: artifact.active,
        iterations: artifact.iterations,
        trace: artifact.trace,
    };
    Ok((mesh, partition, obstacle, solution))
}

#[derive(Serialize)]
struct AnalyzeSummary<'a> {
    levels: usize,
    delta: f64,
    interval_counts: Vec<usize>,
    isolated_counts: Vec<usize>,
    max_products: Vec<f64>,
    stability: &'a signorini_core::StabilityVerdict,
}

fn cmd_analyze(config: &RunConfig, delta: f64) -> Result<(), CliError> {
    let problem = load_problem(config)?;
    let critical: Vec<Point> = critical_points(&problem.boundary)
        .iter()
        .map(|c| c.location)
        .collect();
    let mut reports = Vec::new();
    let mut max_products = Vec::new();
    for k in 0..config.levels {
        let (mesh, partition, obstacle, solution) = load_level(config, &problem, k)?;
        let report = extract_coincidence(&solution, &mesh, &problem.boundary, &partition, &obstacle);
        write_file(
            &config.out.join(format!("coincidence_L{k}.json")),
            &to_pretty_json(&report),
        )?;
        let comp = complementarity_product(
            &solution,
            &mesh,
            &problem.boundary,
            &partition,
            &critical,
            delta,
        );
        let mut csv = String::from("arclength,tangential,flux_density,product\n");
        for s in &comp.samples {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                s.arclength, s.tangential, s.flux_density, s.product
            ));
        }
        write_file(&config.out.join(format!("complementarity_L{k}.csv")), &csv)?;
        max_products.push(comp.max_product);
        reports.push(report);
    }
    let stability = component_stability(&reports)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    let summary = AnalyzeSummary {
        levels: config.levels,
        delta,
        interval_counts: reports.iter().map(|r| r.intervals.len()).collect(),
        isolated_counts: reports.iter().map(|r| r.isolated.len()).collect(),
        max_products,
        stability: &stability,
    };
    write_file(&config.out.join("stability.json"), &to_pretty_json(&summary))?;
    Ok(())
}

fn cmd_fit(
    config: &RunConfig,
    center_sel: &str,
    window: Option<&str>,
    arcs: Option<usize>,
) -> Result<(), CliError> {
    let problem = load_problem(config)?;
    let finest = config.levels - 1;
    let (mesh, partition, obstacle, solution) = load_level(config, &problem, finest)?;
    let cps = critical_points(&problem.boundary);

    let (center, predicted, label) = match center_sel.split_once(':') {
        Some(("cp", idx)) => {
            let idx: usize = idx
                .parse()
                .map_err(|_| CliError::Input(format!("bad center '{center_sel}'")))?;
            let cp = cps.get(idx).ok_or_else(|| {
                CliError::Input(format!("critical point {idx} of {} does not exist", cps.len()))
            })?;
            let pair = ConditionPair::of_critical_point(cp)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let (lambda, _) = analysis::predicted_leading_exponent(&pair, cp.angle);
            (FitCenter::from_critical_point(cp), lambda, pair.label())
        }
        Some(("endpoint", idx)) => {
            let idx: usize = idx
                .parse()
                .map_err(|_| CliError::Input(format!("bad center '{center_sel}'")))?;
            let report =
                extract_coincidence(&solution, &mesh, &problem.boundary, &partition, &obstacle);
            let location = *report.endpoints.get(idx).ok_or_else(|| {
                CliError::Analysis(format!(
                    "coincidence endpoint {idx} not found ({} detected)",
                    report.endpoints.len()
                ))
            })?;
            let direction = boundary_direction_at(&mesh, location)?;
            (
                FitCenter::endpoint(location, direction),
                1.5,
                "endpoint".to_string(),
            )
        }
        _ => {
            return Err(CliError::Input(format!(
                "--center must be cp:<index> or endpoint:<index>, got '{center_sel}'"
            )))
        }
    };

    let other_centers: Vec<Point> = cps
        .iter()
        .map(|c| c.location)
        .filter(|p| p.dist(center.location) > 1e-9)
        .collect();
    let window = match window {
        Some(text) => {
            let (a, b) = text
                .split_once(',')
                .ok_or_else(|| CliError::Input(format!("--window expects a,b, got '{text}'")))?;
            FitWindow {
                r_min: parse_fraction(a)?,
                r_max: parse_fraction(b)?,
            }
        }
        None => analysis::default_window(&mesh, &center, &other_centers)
            .map_err(|e| CliError::Analysis(e.to_string()))?,
    };
    let arcs = arcs.unwrap_or_else(|| analysis::default_arc_count(&window));
    let mut report = fit_exponent(&solution.values, &mesh, &center, window, arcs, 64)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    report.predicted = Some(predicted);

    let mut csv = String::from("r,g\n");
    for (r, g) in &report.samples {
        csv.push_str(&format!("{r},{g}\n"));
    }
    write_file(&config.out.join("loglog.csv"), &csv)?;
    #[derive(Serialize)]
    struct FitOutput<'a> {
        center_kind: &'a str,
        #[serde(flatten)]
        report: &'a signorini_core::ExponentReport,
    }
    write_file(
        &config.out.join("exponent.json"),
        &to_pretty_json(&FitOutput {
            center_kind: &label,
            report: &report,
        }),
    )?;
    Ok(())
}

/// Direction of the Signorini boundary edge a point sits on.
fn boundary_direction_at(mesh: &TriMesh, p: Point) -> Result<f64, CliError> {
    let mut best: Option<(f64, f64)> = None;
    for e in mesh.boundary() {
        if e.tag != ConditionTag::Signorini {
            continue;
        }
        let a = mesh.nodes()[e.nodes[0]];
        let b = mesh.nodes()[e.nodes[1]];
        let d = b - a;
        let t = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        let dist = p.dist(a + d * t);
        if best.is_none_or(|(bd, _)| dist < bd) {
            best = Some((dist, d.angle()));
        }
    }
    best.map(|(_, angle)| angle)
        .ok_or_else(|| CliError::Analysis("no Signorini boundary edge near the endpoint".into()))
}

fn cmd_verify_map(alpha: &str, resolution: usize, out: Option<&Path>) -> Result<(), CliError> {
    let alpha_val = parse_angle(alpha)?;
    if !(alpha_val > 0.0 && alpha_val < 2.0 * std::f64::consts::PI) {
        return Err(CliError::Input(format!(
            "alpha must be in (0, 2π), got {alpha_val}"
        )));
    }
    if !(2..=4096).contains(&resolution) {
        return Err(CliError::Input("resolution must be in [2, 4096]".into()));
    }
    let map = CornerMap::new(Point::new(0.0, 0.0), alpha_val, 0.0);
    let identity = signorini_core::energy_identity_check(
        &AnalyticField::HarmonicQuadratic,
        &map,
        1.0,
        resolution,
    );
    #[derive(Serialize)]
    struct VerifyOutput {
        alpha: f64,
        resolution: usize,
        field: AnalyticField,
        #[serde(flatten)]
        identity: signorini_core::EnergyIdentity,
    }
    let output = to_pretty_json(&VerifyOutput {
        alpha: alpha_val,
        resolution,
        field: AnalyticField::HarmonicQuadratic,
        identity,
    });
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
            write_file(&dir.join("verify_map.json"), &output)
        }
        None => {
            println!("{output}");
            Ok(())
        }
    }
}

fn cmd_convergence(config: &RunConfig) -> Result<(), CliError> {
    let problem = load_problem(config)?;
    let Some(exact) = problem.exact else {
        return Err(CliError::Analysis(
            "problem has no exact solution field".into(),
        ));
    };
    let mut rows = Vec::new();
    let mut hs = Vec::new();
    let mut l2s = Vec::new();
    let mut h1s = Vec::new();
    for k in 0..config.levels {
        let (mesh, _, _, solution) = load_level(config, &problem, k)?;
        let err = error_norms(&solution.values, &mesh, &exact);
        let h = mesh.max_edge_length();
        rows.push(format!(
            "{},{},{},{},{}",
            k,
            h,
            mesh.node_count(),
            err.l2,
            err.h1
        ));
        hs.push(h);
        l2s.push(err.l2);
        h1s.push(err.h1);
    }
    let l2_rate = signorini_core::convergence_rate(&hs, &l2s);
    let h1_rate = signorini_core::convergence_rate(&hs, &h1s);
    let mut csv = String::from("level,h,nodes,l2_error,h1_error\n");
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    csv.push_str(&format!("rates,,,{l2_rate},{h1_rate}\n"));
    write_file(&config.out.join("convergence.csv"), &csv)?;
    Ok(())
}

fn cmd_case_emit(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let case = cases::by_name(name)
        .ok_or_else(|| CliError::Input(format!("unknown case '{name}' (see `case list`)")))?;
    let problem = Problem::from(&case);
    let json = io::problem_to_json(&problem);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
            write_file(&dir.join(format!("{name}.json")), &json)
        }
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut json = serde_json::to_string_pretty(value).expect("report serializes");
    json.push('\n');
    json
}
