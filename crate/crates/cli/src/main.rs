//! `mvlab`: shrinking-ball mean values, comparison checks and gauge tests
//! from the command line.
//!
//! Exit status: 0 when the check passes, 1 when the mathematics says no
//! (no convergence, a failed bound, a violated hypothesis), 2 on usage or
//! input errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvlab_core::admissible::{check_admissible, check_star, geometric_grid, AdmissibilityReport, StarReport};
use mvlab_core::counterexample::{counterexample_demo, CounterexampleConfig};
use mvlab_core::meanvalue::{comparison_check, convergence_study, density_condition, proof_bounds_check};
use mvlab_core::measure::{ad_regularity_check, cantor_ad_set, densities, sample_hypersurface, segment_measure};
use mvlab_core::potential::verify_layer_cake;
use mvlab_core::report::{fmt_ext, fmt_f64, to_json, Envelope};
use mvlab_core::{
    scenarios, Dimension, DiscreteMeasure, EpsSchedule, Error, ExtReal, Field, FunctionSpec, GaugeFunction, Point,
    ProofBoundConfig, SurfaceSpec, Verdict,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mvlab", version, about = "Shrinking-ball mean values of subharmonic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Means of a function over shrinking balls, compared with its value at x0.
    MeanValue(MeanValueArgs),
    /// Audit `u >= v` off a null set and test the conclusion at check points.
    Compare(CompareArgs),
    /// Test a gauge function for admissibility.
    Admissible(AdmissibleArgs),
    /// Ahlfors-David regularity of a measure.
    AdCheck(AdCheckArgs),
    /// Upper and lower densities, or the density condition for a Riesz function.
    Density(DensityArgs),
    /// Check `int f dmu = int_0^inf mu({f >= t}) dt`.
    LayerCake(LayerCakeArgs),
    /// Verify the two pointwise bounds on f_eps.
    ProofBounds(ProofBoundsArgs),
    /// The co-dimension-2 counterexample in R^3.
    Counterexample(CounterexampleArgs),
    /// Write a measure file.
    GenMeasure(GenMeasureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; defaults to the extension of --out, else json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    eps_start: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_factor: f64,
    #[arg(long, default_value_t = 8)]
    eps_steps: usize,
}

impl ScheduleArgs {
    fn schedule(&self) -> Result<EpsSchedule, Error> {
        EpsSchedule::new(self.eps_start, self.eps_factor, self.eps_steps)
    }
}

#[derive(Args)]
struct MeanValueArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// Function JSON file.
    #[arg(long)]
    function: PathBuf,
    /// Measure JSON file.
    #[arg(long)]
    measure: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    x0: Point,
    #[command(flatten)]
    sched: ScheduleArgs,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Limit to compare against (a number or -inf); defaults to u(x0).
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    /// Levels the means must cross when the target is -inf.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_value = "-10,-100")]
    thresholds: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareScenario {
    /// Unit circle, subharmonic v, u = v + bump vanishing at one null atom.
    Circle,
    /// The co-dimension-2 counterexample; the conclusion fails at 0.
    Codim2,
}

#[derive(Args)]
struct CompareArgs {
    /// Shipped scenario; replaces the file arguments.
    #[arg(long, value_enum, conflicts_with_all = ["u", "v", "measure"])]
    scenario: Option<CompareScenario>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, required_unless_present = "scenario")]
    u: Option<PathBuf>,
    #[arg(long, required_unless_present = "scenario")]
    v: Option<PathBuf>,
    #[arg(long, required_unless_present = "scenario")]
    measure: Option<PathBuf>,
    /// Points of the null set (repeatable).
    #[arg(long = "null-point", allow_hyphen_values = true)]
    null_points: Vec<Point>,
    /// Treat every zero-weight atom of the measure as part of the null set.
    #[arg(long)]
    null_zero_weight: bool,
    /// Points where the conclusion is tested (repeatable).
    #[arg(long = "check-point", allow_hyphen_values = true)]
    check_points: Vec<Point>,
    #[arg(long)]
    eps_start: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    eps_factor: f64,
    #[arg(long, default_value_t = 5)]
    eps_steps: usize,
    #[arg(long)]
    tol: Option<f64>,
    /// Atom count (or resolution) for a shipped scenario.
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AdmissibleArgs {
    /// Gauge JSON, inline or `@file`.
    #[arg(long)]
    gauge: String,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_start: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_factor: f64,
    #[arg(long, default_value_t = 16)]
    eps_steps: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AdCheckArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long)]
    s: f64,
    #[arg(long, allow_hyphen_values = true)]
    x0: Point,
    #[arg(long, value_delimiter = ',', required = true)]
    radii: Vec<f64>,
    /// Riesz function; evaluates the density condition at x0.
    #[arg(long)]
    function: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct LayerCakeArgs {
    #[arg(long)]
    function: PathBuf,
    #[arg(long)]
    measure: PathBuf,
    /// Largest accepted relative gap.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProofScenario {
    Segment,
    SingleAtom,
}

#[derive(Args)]
struct ProofBoundsArgs {
    /// Shipped scenario with its own measure, gauge, constants and grids.
    #[arg(long, value_enum, conflicts_with_all = ["measure", "gauge"])]
    scenario: Option<ProofScenario>,
    /// Grid size per axis for a shipped scenario.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, required_unless_present = "scenario")]
    measure: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<Point>,
    /// Gauge JSON, inline or `@file`.
    #[arg(long, required_unless_present = "scenario")]
    gauge: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.5)]
    gamma: f64,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "M")]
    m: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    /// Sample points w (repeatable).
    #[arg(long = "w", allow_hyphen_values = true)]
    w: Vec<Point>,
    #[arg(long)]
    eps_start: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    eps_factor: f64,
    #[arg(long, default_value_t = 8)]
    eps_steps: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    resolution: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    clamp: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    /// `[a, b]` on the first axis.
    Segment,
    /// Sphere of the given radius (n = 2, 3).
    Sphere,
    /// Flat patch spanned by the first k axes.
    Flat,
    /// Four-corner Cantor set in the plane.
    Cantor,
}

#[derive(Args)]
struct GenMeasureArgs {
    #[arg(long, value_enum)]
    kind: MeasureKind,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<Point>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    extent: f64,
    #[arg(long, default_value_t = 6)]
    level: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Exit 1: a hypothesis of the theorem under test does not hold.
    Math(String),
    /// Exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Hypothesis { .. } => Failure::Math(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

struct Rendered {
    pass: bool,
    json: String,
    csv: String,
    summary: String,
}

fn render<T: Serialize>(command: &str, pass: bool, report: &T, csv: String, summary: String) -> CliResult<Rendered> {
    let json = to_json(&Envelope::new(command, pass, report))?;
    Ok(Rendered { pass, json, csv, summary })
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T, Error>) -> CliResult<T> {
    r.map_err(|e| match e {
        Error::Hypothesis { .. } => Failure::Math(e.to_string()),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })
}

fn load_measure(path: &Path, dim: Option<usize>) -> CliResult<DiscreteMeasure> {
    let mu = with_path(path, DiscreteMeasure::from_json(&read(path)?))?;
    if let Some(n) = dim {
        if mu.dim().get() != n {
            return Err(Failure::Input(format!(
                "{}: measure lives in R^{}, but --dim is {n}",
                path.display(),
                mu.dim().get()
            )));
        }
    }
    Ok(mu)
}

fn load_function(path: &Path, dim: Option<usize>) -> CliResult<FunctionSpec> {
    let f = with_path(path, FunctionSpec::from_json(&read(path)?))?;
    if let (Some(n), Some(fd)) = (dim, f.dim()) {
        if n != fd {
            return Err(Failure::Input(format!("{}: function lives in R^{fd}, but --dim is {n}", path.display())));
        }
    }
    Ok(f)
}

fn load_gauge(arg: &str) -> CliResult<GaugeFunction> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => arg.to_string(),
    };
    let g: GaugeFunction = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("gauge: {e}")))?;
    g.validate()?;
    Ok(g)
}

fn dimension(n: usize) -> CliResult<Dimension> {
    Ok(Dimension::new(n)?)
}

fn parse_target(s: &str) -> CliResult<ExtReal> {
    match s {
        "-inf" => Ok(ExtReal::NegInf),
        _ => s
            .parse::<f64>()
            .ok()
            .and_then(ExtReal::from_f64)
            .filter(|v| v.is_finite())
            .ok_or_else(|| Failure::Input(format!("target must be a finite number or -inf, got '{s}'"))),
    }
}

fn coords(p: &[f64]) -> String {
    p.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

fn mean_value_cmd(a: &MeanValueArgs) -> CliResult<Rendered> {
    let mu = load_measure(&a.measure, a.dim)?;
    let f = load_function(&a.function, Some(mu.dim().get()))?;
    let sched = a.sched.schedule()?;
    let target = match &a.target {
        Some(s) => parse_target(s)?,
        None => f.value(&a.x0)?,
    };
    let rep = convergence_study(&f, &mu, &a.x0, &sched, target, a.tol, &a.thresholds)?;
    let summary = format!(
        "mean-value: {} (final mean {}, target {}, final error {})",
        if rep.converged { "converged" } else { "not converged" },
        fmt_ext(rep.limit_estimate),
        fmt_ext(rep.target),
        fmt_ext(rep.final_error())
    );
    let csv = rep.to_csv();
    render("mean-value", rep.converged, &rep, csv, summary)
}

fn compare_cmd(a: &CompareArgs) -> CliResult<Rendered> {
    let (mu, u, v, null_points, check_points, sched, tol) = match a.scenario {
        Some(which) => {
            let sc = match which {
                CompareScenario::Circle => scenarios::circle_comparison(a.resolution.unwrap_or(200_000))?,
                CompareScenario::Codim2 => scenarios::codim2_comparison(1000, a.resolution.unwrap_or(100_000))?,
            };
            let sched = match a.eps_start {
                Some(start) => EpsSchedule::new(start, a.eps_factor, a.eps_steps)?,
                None => sc.schedule,
            };
            let mut nulls = sc.null_points;
            nulls.extend(a.null_points.iter().cloned());
            let checks = if a.check_points.is_empty() { sc.check_points } else { a.check_points.clone() };
            (sc.measure, sc.u, sc.v, nulls, checks, sched, a.tol.unwrap_or(sc.tol))
        }
        None => {
            let m_path = a.measure.as_ref().expect("required by clap");
            let mu = load_measure(m_path, a.dim)?;
            let n = Some(mu.dim().get());
            let u = load_function(a.u.as_ref().expect("required by clap"), n)?;
            let v = load_function(a.v.as_ref().expect("required by clap"), n)?;
            if a.check_points.is_empty() {
                return Err(Failure::Input("at least one --check-point is required".into()));
            }
            let start = a.eps_start.ok_or_else(|| Failure::Input("--eps-start is required".into()))?;
            let sched = EpsSchedule::new(start, a.eps_factor, a.eps_steps)?;
            (mu, u, v, a.null_points.clone(), a.check_points.clone(), sched, a.tol.unwrap_or(1e-9))
        }
    };
    let zero_weight = a.null_zero_weight;
    let null = |x: &[f64]| {
        null_points.iter().any(|p| p.as_slice() == x) || (zero_weight && mu.atoms().any(|(q, w)| w == 0.0 && q == x))
    };
    let rep = comparison_check(&u, &v, &mu, null, &check_points, &sched, tol)?;
    let mut csv = String::from("x0,in_null_set,eps,mean_u,mean_v,ok\n");
    for p in &rep.points {
        for m in &p.means {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                coords(&p.x0),
                p.in_null_set,
                fmt_f64(m.eps),
                fmt_ext(m.mean_u),
                fmt_ext(m.mean_v),
                m.ok
            );
        }
    }
    let mut summary = format!(
        "compare: hypothesis audit {}, conclusion {}",
        if rep.hypothesis_audit_passed { "passed" } else { "FAILED" },
        if rep.conclusion_holds { "holds" } else { "FAILS" }
    );
    if let Some(v) = rep.violations.first() {
        let _ = write!(summary, "; u >= v violated at atom {} (u = {}, v = {})", v.atom, v.u, v.v);
    }
    for p in rep.points.iter().filter(|p| !p.conclusion_ok) {
        let _ = write!(summary, "; u(x0) < v(x0) at {} ({} < {})", p.x0, p.u_x0, p.v_x0);
    }
    render("compare", rep.pass, &rep, csv, summary)
}

#[derive(Serialize)]
struct AdmissibleOutput {
    gauge: GaugeFunction,
    admissible: AdmissibilityReport,
    star: StarReport,
}

fn admissible_cmd(a: &AdmissibleArgs) -> CliResult<Rendered> {
    let gauge = load_gauge(&a.gauge)?;
    let n = dimension(a.dim)?;
    let grid = geometric_grid(a.eps_start, a.eps_factor, a.eps_steps);
    let admissible = check_admissible(&gauge, n, a.c, &grid)?;
    let star = check_star(&gauge, n, a.c, &grid)?;
    let pass = admissible.verdict == Verdict::Pass && star.consistent;
    let mut csv = String::from("eps,ratio,star_ratio\n");
    for ((e, r), sr) in grid.iter().zip(&admissible.ratios).zip(&star.ratios) {
        let _ = writeln!(csv, "{},{},{}", fmt_f64(*e), fmt_ext(*r), fmt_ext(*sr));
    }
    let summary = format!(
        "admissible: verdict {:?}{}, M estimate {}, star verdict {:?}",
        admissible.verdict,
        if admissible.divergent { " (divergent)" } else { "" },
        fmt_ext(admissible.m_estimate),
        star.verdict
    );
    render("admissible", pass, &AdmissibleOutput { gauge, admissible, star }, csv, summary)
}

fn ad_check_cmd(a: &AdCheckArgs) -> CliResult<Rendered> {
    let mu = load_measure(&a.measure, None)?;
    let rep = ad_regularity_check(&mu, a.k, a.samples, &a.radii)?;
    let mut csv = String::from("radius,min_ratio,max_ratio\n");
    for j in 0..rep.radii.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            fmt_f64(rep.radii[j]),
            fmt_f64(rep.min_ratio_per_radius[j]),
            fmt_f64(rep.max_ratio_per_radius[j])
        );
    }
    let summary = format!(
        "ad-check: {} (C0 = {}, fitted dimension {})",
        if rep.pass { "regular" } else { "NOT regular" },
        fmt_f64(rep.c0),
        fmt_f64(rep.fitted_dimension)
    );
    render("ad-check", rep.pass, &rep, csv, summary)
}

fn density_cmd(a: &DensityArgs) -> CliResult<Rendered> {
    let mu = load_measure(&a.measure, None)?;
    match &a.function {
        None => {
            let est = densities(&mu, a.s, &a.x0, &a.radii)?;
            let mut csv = String::from("radius,ratio\n");
            for (r, q) in est.radii.iter().zip(&est.ratios) {
                let _ = writeln!(csv, "{},{}", fmt_f64(*r), fmt_f64(*q));
            }
            let summary = format!("density: upper {}, lower {}", fmt_f64(est.upper), fmt_f64(est.lower));
            render("density", true, &est, csv, summary)
        }
        Some(path) => {
            let rf = match load_function(path, Some(mu.dim().get()))? {
                FunctionSpec::Riesz(rf) => rf,
                _ => {
                    return Err(Failure::Input(format!(
                        "{}: the density condition needs a Riesz function",
                        path.display()
                    )))
                }
            };
            let rep = density_condition(&rf, &mu, a.s, &a.x0, &a.radii)?;
            let mut csv = String::from("w,mass,distance,upper_density,contribution\n");
            for t in &rep.terms {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    coords(&t.w),
                    fmt_f64(t.mass),
                    fmt_f64(t.distance),
                    fmt_f64(t.upper_density),
                    fmt_ext(t.contribution)
                );
            }
            let summary = format!(
                "density: condition value {}{}",
                fmt_ext(rep.value),
                if rep.singular { " (singular at x0)" } else { "" }
            );
            render("density", rep.finite, &rep, csv, summary)
        }
    }
}

#[derive(Serialize)]
struct LayerCakeOutput {
    lhs: f64,
    rhs: f64,
    gap: f64,
    relative_gap: f64,
    tol: f64,
}

fn layer_cake_cmd(a: &LayerCakeArgs) -> CliResult<Rendered> {
    let mu = load_measure(&a.measure, None)?;
    let f = load_function(&a.function, Some(mu.dim().get()))?;
    let lc = verify_layer_cake(&f, &mu)?;
    let out = LayerCakeOutput { lhs: lc.lhs, rhs: lc.rhs, gap: lc.gap, relative_gap: lc.relative_gap(), tol: a.tol };
    let pass = out.relative_gap <= a.tol;
    let csv = format!(
        "lhs,rhs,gap,relative_gap\n{},{},{},{}\n",
        fmt_f64(out.lhs),
        fmt_f64(out.rhs),
        fmt_f64(out.gap),
        fmt_f64(out.relative_gap)
    );
    let summary = format!("layer-cake: relative gap {}", fmt_f64(out.relative_gap));
    render("layer-cake", pass, &out, csv, summary)
}

fn proof_bounds_cmd(a: &ProofBoundsArgs) -> CliResult<Rendered> {
    let sc = match a.scenario {
        Some(ProofScenario::Segment) => scenarios::proof_segment(a.grid)?,
        Some(ProofScenario::SingleAtom) => scenarios::proof_single_atom(a.grid)?,
        None => {
            let mu = load_measure(a.measure.as_ref().expect("required by clap"), None)?;
            let gauge = load_gauge(a.gauge.as_ref().expect("required by clap"))?;
            let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Input(format!("--{name} is required")));
            let config = ProofBoundConfig::new(
                a.p,
                a.gamma,
                need(a.a, "A")?,
                need(a.b, "B")?,
                need(a.m, "M")?,
                need(a.eps1, "eps1")?,
            )?;
            let start = need(a.eps_start, "eps-start")?;
            if a.w.is_empty() {
                return Err(Failure::Input("at least one --w sample is required".into()));
            }
            scenarios::ProofScenario {
                x0: a.x0.clone().unwrap_or_else(|| Point::origin(mu.dim().get())),
                measure: mu,
                config,
                gauge,
                w_samples: a.w.clone(),
                eps_samples: EpsSchedule::new(start, a.eps_factor, a.eps_steps)?.values(),
            }
        }
    };
    let rep = proof_bounds_check(
        &sc.measure,
        &sc.x0,
        sc.measure.dim(),
        &sc.config,
        &sc.gauge,
        &sc.w_samples,
        &sc.eps_samples,
        a.tol,
    )?;
    let mut csv = String::from("w,eps,case,f_eps,bound,margin\n");
    for e in &rep.entries {
        let case = match e.case {
            mvlab_core::meanvalue::BoundCase::Far => "far",
            mvlab_core::meanvalue::BoundCase::Near => "near",
        };
        let _ = writeln!(
            csv,
            "{},{},{case},{},{},{}",
            coords(&e.w),
            fmt_f64(e.eps),
            fmt_ext(e.f_eps),
            fmt_f64(e.bound),
            fmt_ext(e.margin)
        );
    }
    let summary = if rep.precondition_ok {
        format!(
            "proof-bounds: {} ({} entries, worst far margin {}, worst near margin {})",
            if rep.pass { "all bounds hold" } else { "BOUND VIOLATED" },
            rep.entries.len(),
            rep.worst_far.map_or("-".into(), fmt_ext),
            rep.worst_near.map_or("-".into(), fmt_ext)
        )
    } else {
        let f = &rep.precondition_failures[0];
        format!(
            "proof-bounds: precondition failed, {} at {} r = {} ({} vs {})",
            f.condition,
            f.center,
            fmt_f64(f.radius),
            fmt_f64(f.observed),
            fmt_f64(f.required)
        )
    };
    render("proof-bounds", rep.pass, &rep, csv, summary)
}

fn counterexample_cmd(a: &CounterexampleArgs) -> CliResult<Rendered> {
    let cfg = CounterexampleConfig::new(a.n)?.with_clamp(a.clamp)?;
    let rep = counterexample_demo(&cfg, a.eps, a.resolution)?;
    let csv = format!(
        "N,eps,resolution,line_mean,value_at_0,gap\n{},{},{},{},{},{}\n",
        rep.n_terms,
        fmt_f64(rep.eps),
        rep.resolution,
        fmt_f64(rep.line_mean),
        fmt_f64(rep.value_at_0),
        fmt_f64(rep.gap)
    );
    let summary = format!(
        "counterexample: line mean {}, value at 0 {}, gap {}",
        fmt_f64(rep.line_mean),
        fmt_f64(rep.value_at_0),
        fmt_f64(rep.gap)
    );
    render("counterexample", rep.pass, &rep, csv, summary)
}

fn gen_measure_cmd(a: &GenMeasureArgs) -> CliResult<String> {
    let n = dimension(a.dim)?;
    let center = a.center.clone().unwrap_or_else(|| Point::origin(a.dim));
    let mu = match a.kind {
        MeasureKind::Segment => segment_measure(n, a.a, a.b, a.resolution)?,
        MeasureKind::Sphere => sample_hypersurface(&SurfaceSpec::sphere(n, center, a.radius), a.resolution)?,
        MeasureKind::Flat => {
            if a.k == 0 || a.k >= a.dim {
                return Err(Failure::Input(format!("flat dimension k must lie in 1..{}", a.dim)));
            }
            let frame = (0..a.k)
                .map(|i| {
                    let mut e = vec![0.0; a.dim];
                    e[i] = 1.0;
                    Point::new(e)
                })
                .collect();
            sample_hypersurface(&SurfaceSpec::flat(n, center, frame, a.extent), a.resolution)?
        }
        MeasureKind::Cantor => cantor_ad_set(n, 1.0, a.level)?,
    };
    Ok(mu.to_json()?)
}

fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &OutArgs, r: &Rendered) -> CliResult<()> {
    let format = out.format.unwrap_or_else(|| match &out.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let body = match format {
        Format::Csv => &r.csv,
        Format::Json => &r.json,
    };
    match &out.out {
        Some(path) => {
            write_atomic(path, body)?;
            eprintln!("{}", r.summary);
        }
        None => {
            print!("{body}");
            eprintln!("{}", r.summary);
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<bool> {
    let (rendered, out) = match &cli.command {
        Command::MeanValue(a) => (mean_value_cmd(a)?, &a.out),
        Command::Compare(a) => (compare_cmd(a)?, &a.out),
        Command::Admissible(a) => (admissible_cmd(a)?, &a.out),
        Command::AdCheck(a) => (ad_check_cmd(a)?, &a.out),
        Command::Density(a) => (density_cmd(a)?, &a.out),
        Command::LayerCake(a) => (layer_cake_cmd(a)?, &a.out),
        Command::ProofBounds(a) => (proof_bounds_cmd(a)?, &a.out),
        Command::Counterexample(a) => (counterexample_cmd(a)?, &a.out),
        Command::GenMeasure(a) => {
            let json = gen_measure_cmd(a)?;
            match &a.out {
                Some(p) => write_atomic(p, &json)?,
                None => print!("{json}"),
            }
            return Ok(true);
        }
    };
    emit(out, &rendered)?;
    Ok(rendered.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(msg)) => {
            eprintln!("mvlab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("mvlab: error: {msg}");
            ExitCode::from(2)
        }
    }
}
