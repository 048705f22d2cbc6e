//! End-to-end runs behind the `slabwalk` subcommands.
//!
//! Each command reads a [`RunConfig`], writes its outputs into the output
//! directory and reports failure through [`CliError`], whose
//! [`exit_code`](CliError::exit_code) the binary returns.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{Check, ConfigError, RunConfig, Target};
use crate::graph::{enumerate_graph, glue, glue_unweighted, BoxSpec, GraphError, WeightedGraph, MAX_BOX_CELLS};
use crate::kernel::{
    escape_prob, estimate_alpha, estimate_beta, first_return, heat_kernel_diag, ratio_experiment,
    visit_decomposition_series, zd, EscapeEstimate, KernelError, KernelSeries, RatioTable, Semantics,
};
use crate::lattice::{Parity, SlabRegion};
use crate::numeric::{g17, Interval};
use crate::schedule::{gamma_from_constants, ConstantsReport, ScaleSchedule, ScheduleError};
use crate::verify::{
    check_delmotte, check_nk, check_poincare, check_volume_doubling, smoothing_profile, window_tag, ProbeConfig,
    Report, ReportLine, VerifyError, SMOOTHING_MIN_T,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("check failure: {0}")]
    CheckFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal fault: {0}")]
    Internal(String),
}

impl CliError {
    /// 0 success, 1 check failure, 2 configuration error, 3 resource guard.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) | CliError::Internal(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::Overflow(_) => CliError::Resource(e.to_string()),
            ScheduleError::Parse { .. } | ScheduleError::InvalidDims { .. } | ScheduleError::InvalidSeed(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::HorizonShortfall { .. } => CliError::Resource(e.to_string()),
            KernelError::GammaTooLarge { .. } | KernelError::EmptyWindow | KernelError::SeriesTooShort { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BoxTooLarge { .. } => CliError::Resource(e.to_string()),
            GraphError::InvalidDelta(_) | GraphError::InvalidSegment | GraphError::InvalidBox(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Kernel(k) => k.into(),
            VerifyError::AllProbesConstant => CliError::Internal(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(RunConfig::parse(&text)?)
}

/// Writes `content` to `dir/name`, creating `dir`.
fn write_output(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    debug_assert!(content.is_empty() || content.ends_with('\n'));
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, content).map_err(|source| CliError::Io { path: path.clone(), source })?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Enumerates `region` inside the configured cube. Clamped axes use the
/// smaller of the clamp and the radius.
pub fn build_region(region: &SlabRegion, s: usize, cfg: &RunConfig) -> Result<WeightedGraph, CliError> {
    let d = region.dim();
    let r = cfg.box_radius as i64;
    let mut lo = vec![-r; d];
    let mut hi = vec![r; d];
    if let Some(b) = region.clamp() {
        for i in s..d {
            lo[i] = -r.min(b);
            hi[i] = r.min(b);
        }
    }
    let bx = BoxSpec::bounds(lo, hi)?;
    let cells = bx.cell_count();
    let limit = (cfg.max_vertices as u128).min(MAX_BOX_CELLS);
    if cells > limit {
        return Err(CliError::Resource(format!("box has {cells} cells, above the limit of {limit}")));
    }
    let g = enumerate_graph(|p| region.contains(p), &bx)?;
    log::info!("built graph with {} vertices, {} edges", g.vertex_count(), g.edge_count());
    Ok(g)
}

fn origin(g: &WeightedGraph) -> Result<usize, CliError> {
    g.x().ok_or_else(|| CliError::Internal("graph has no origin marker".into()))
}

/// Result of the schedule induction.
#[derive(Debug, Clone)]
pub struct Induction {
    pub schedule: ScaleSchedule,
    pub reports: Vec<ConstantsReport>,
    /// Why the induction stopped early, if it did.
    pub halted: Option<String>,
}

struct RoundGraphs {
    half: [WeightedGraph; 2],
    clamped: [WeightedGraph; 2],
}

fn build_pair(sched: &ScaleSchedule, k: usize, cfg: &RunConfig, clamped: bool) -> Result<[WeightedGraph; 2], CliError> {
    let region = |p| {
        if clamped {
            SlabRegion::clamped(sched, p, k)
        } else {
            SlabRegion::half(sched, p, k)
        }
        .map_err(|e| CliError::Internal(e.to_string()))
    };
    let (re, ro) = (region(Parity::Even)?, region(Parity::Odd)?);
    let ge = build_region(&re, sched.free_dims(), cfg)?;
    let go = if ro == re { ge.clone() } else { build_region(&ro, sched.free_dims(), cfg)? };
    Ok([ge, go])
}

fn window_horizon(g: &WeightedGraph, want: usize) -> Result<usize, CliError> {
    Ok(want.min(crate::kernel::exact_horizon(g, origin(g)?)))
}

/// Constants for the next round from graphs built on the current prefix.
fn estimate_round(sched: &ScaleSchedule, cfg: &RunConfig) -> Result<ConstantsReport, CliError> {
    let k = sched.len();
    let graphs = RoundGraphs { half: build_pair(sched, k, cfg, false)?, clamped: build_pair(sched, k, cfg, true)? };
    let cap = |g: u64| cfg.gamma_cap.map_or(g, |c| g.min(c));
    let mut guess = cap(sched.gamma(k).unwrap_or(1));
    let (mut alpha, mut beta, mut horizon) = (0.0f64, 0.0f64, 0);
    for pass in 0..cfg.passes {
        let want = (4 * guess.saturating_pow(4)).min(cfg.t_max as u64).max(1) as usize;
        alpha = 0.0;
        beta = 0.0;
        horizon = want;
        for g in &graphs.half {
            let w = window_horizon(g, want)?;
            horizon = horizon.min(w);
            let series = heat_kernel_diag(g, origin(g)?, w, Semantics::Lazy)?;
            alpha = alpha.max(estimate_alpha(&series, cfg.d_eff())?);
        }
        for g in &graphs.clamped {
            let w = window_horizon(g, want)?;
            horizon = horizon.min(w);
            let fr = first_return(g, origin(g)?, w)?;
            beta = beta.max(estimate_beta(&fr.f, cfg.s)?);
        }
        let gamma = cap(gamma_from_constants(alpha, beta)?);
        log::info!("round {}: pass {pass} window [1,{horizon}] alpha={alpha} beta={beta} gamma={gamma}", k + 1);
        if gamma == guess {
            break;
        }
        guess = gamma;
    }
    let escape = |g: &WeightedGraph| -> Result<Interval, CliError> {
        let t = window_horizon(g, cfg.t_max)?;
        Ok(escape_prob(g, origin(g)?, t, cfg.d_eff())?.interval)
    };
    let epsilon_e = escape(&graphs.half[0])?;
    let epsilon_o = escape(&graphs.half[1])?;
    Ok(ConstantsReport { alpha, beta, horizon, epsilon_e, epsilon_o })
}

/// Runs `cfg.scales - 1` induction rounds from the seed scale.
pub fn induct(cfg: &RunConfig) -> Result<Induction, CliError> {
    let mut schedule = ScaleSchedule::with_seed(cfg.d, cfg.s, cfg.a_seed)?;
    let mut reports = Vec::new();
    let mut halted = None;
    for k in 2..=cfg.scales {
        let report = match estimate_round(&schedule, cfg) {
            Ok(r) => r,
            Err(CliError::Resource(msg)) => {
                halted = Some(format!("round {k}: {msg}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let next = match schedule.extend(&report, cfg.gamma_cap) {
            Ok(s) => s,
            Err(ScheduleError::Overflow(_)) => {
                halted = Some(format!("round {k}: a_{k} overflows"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        reports.push(report);
        if next.a(k) > cfg.box_radius as u64 {
            halted = Some(format!("round {k}: a_{k} = {} exceeds box_radius = {}", next.a(k), cfg.box_radius));
            break;
        }
        schedule = next;
    }
    Ok(Induction { schedule, reports, halted })
}

/// The schedule named by the config: a schedule file, explicit periods, or
/// a fresh induction.
pub fn load_schedule(cfg: &RunConfig) -> Result<ScaleSchedule, CliError> {
    if let Some(path) = &cfg.schedule {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        return Ok(ScaleSchedule::parse(&text, cfg.d, cfg.s)?);
    }
    if let Some(periods) = &cfg.periods {
        return ScaleSchedule::from_periods(cfg.d, cfg.s, periods).map_err(|e| CliError::Config(e.to_string()));
    }
    let ind = induct(cfg)?;
    if let Some(why) = ind.halted {
        return Err(CliError::Resource(why));
    }
    Ok(ind.schedule)
}

/// One row per induction round; `gamma` is the value applied after the cap.
fn constants_csv(sched: &ScaleSchedule, reports: &[ConstantsReport]) -> String {
    let mut out = String::from("k,alpha,beta,horizon,eps_e_lower,eps_e_upper,eps_o_lower,eps_o_upper,delta,gamma\n");
    for (i, r) in reports.iter().enumerate() {
        let delta = r.delta().map(g17).unwrap_or_default();
        let gamma = sched.gamma(i + 2).map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            i + 2,
            g17(r.alpha),
            g17(r.beta),
            r.horizon,
            g17(r.epsilon_e.lower),
            g17(r.epsilon_e.upper),
            g17(r.epsilon_o.lower),
            g17(r.epsilon_o.upper),
            delta,
            gamma
        )
        .unwrap();
    }
    out
}

pub fn cmd_schedule(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let ind = induct(cfg)?;
    let files = vec![
        write_output(out, "schedule.txt", &ind.schedule.to_text())?,
        write_output(out, "constants.csv", &constants_csv(&ind.schedule, &ind.reports))?,
    ];
    match ind.halted {
        Some(why) => Err(CliError::Resource(format!("{why}; wrote the completed prefix of {} scales", ind.schedule.len()))),
        None => Ok(files),
    }
}

/// The two halves at the final scale, glued.
pub struct GluedBuild {
    pub graph: WeightedGraph,
    pub delta: f64,
    pub escape: Option<[EscapeEstimate; 2]>,
    pub schedule: ScaleSchedule,
}

pub fn build_glued(cfg: &RunConfig) -> Result<GluedBuild, CliError> {
    let schedule = load_schedule(cfg)?;
    let k = schedule.len();
    let region = |p| SlabRegion::half(&schedule, p, k).map_err(|e| CliError::Internal(e.to_string()));
    let re = region(Parity::Even)?;
    let ro = if cfg.mirror_halves { re.clone() } else { region(Parity::Odd)? };
    let he = build_region(&re, cfg.s, cfg)?;
    let ho = if ro == re { he.clone() } else { build_region(&ro, cfg.s, cfg)? };
    let (delta, escape) = match cfg.delta_override {
        Some(d) => (d, None),
        None => {
            let est = |g: &WeightedGraph| -> Result<EscapeEstimate, CliError> {
                let t = window_horizon(g, cfg.t_max)?;
                Ok(escape_prob(g, origin(g)?, t, cfg.d_eff())?)
            };
            let (ee, eo) = (est(&he)?, est(&ho)?);
            let delta = 0.5 * ee.interval.lower.min(eo.interval.lower);
            if !(delta > 0.0 && delta < 1.0) {
                return Err(CliError::Config(format!(
                    "escape lower bounds {} and {} give no usable glue weight; set delta_override",
                    ee.interval, eo.interval
                )));
            }
            (delta, Some([ee, eo]))
        }
    };
    let graph = match cfg.glue_segment {
        Some(len) => glue_unweighted(&he, &ho, len)?,
        None => glue(&he, &ho, delta)?,
    };
    Ok(GluedBuild { graph, delta, escape, schedule })
}

/// Graph for `build`, `kernel` and `verify`.
pub fn build_target(cfg: &RunConfig) -> Result<WeightedGraph, CliError> {
    let clamped = |p| -> Result<WeightedGraph, CliError> {
        let sched = load_schedule(cfg)?;
        let region = SlabRegion::clamped(&sched, p, sched.len()).map_err(|e| CliError::Internal(e.to_string()))?;
        build_region(&region, cfg.s, cfg)
    };
    let half = |p| -> Result<WeightedGraph, CliError> {
        let sched = load_schedule(cfg)?;
        let region = SlabRegion::half(&sched, p, sched.len()).map_err(|e| CliError::Internal(e.to_string()))?;
        build_region(&region, cfg.s, cfg)
    };
    match cfg.target {
        Target::Lattice => build_region(&SlabRegion::full(cfg.d, cfg.s), cfg.s, cfg),
        Target::HalfEven => half(Parity::Even),
        Target::HalfOdd => half(Parity::Odd),
        Target::ClampedEven => clamped(Parity::Even),
        Target::ClampedOdd => clamped(Parity::Odd),
        Target::Glued => Ok(build_glued(cfg)?.graph),
    }
}

pub fn cmd_build(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let g = build_target(cfg)?;
    Ok(vec![write_output(out, "graph.txt", &g.dump())?])
}

fn check_horizon(series: &KernelSeries, cfg: &RunConfig) -> Result<(), CliError> {
    if series.horizon() > series.exact_horizon && !cfg.allow_approximate {
        return Err(CliError::Resource(format!(
            "T = {} exceeds the exact horizon {}",
            series.horizon(),
            series.exact_horizon
        )));
    }
    Ok(())
}

pub fn cmd_kernel(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut columns: Vec<(&str, KernelSeries)> = Vec::new();
    if cfg.target == Target::Lattice {
        columns.push(("p_xx", zd::lazy_diagonal(cfg.d, cfg.t_max)));
    } else {
        let g = build_target(cfg)?;
        columns.push(("p_xx", heat_kernel_diag(&g, origin(&g)?, cfg.t_max, Semantics::Lazy)?));
        if let Some(y) = g.y() {
            columns.push(("p_yy", heat_kernel_diag(&g, y, cfg.t_max, Semantics::Lazy)?));
        }
    }
    for (_, s) in &columns {
        check_horizon(s, cfg)?;
    }
    let exact = columns.iter().map(|(_, s)| s.exact_horizon).min().unwrap();
    let mut csv = String::from("t");
    for (name, _) in &columns {
        write!(csv, ",{name}").unwrap();
    }
    if cfg.allow_approximate {
        csv.push_str(",approx");
    }
    csv.push('\n');
    for t in 0..=cfg.t_max {
        write!(csv, "{t}").unwrap();
        for (_, s) in &columns {
            write!(csv, ",{}", g17(s.at(t))).unwrap();
        }
        if cfg.allow_approximate {
            csv.push_str(if t > exact { ",*" } else { "," });
        }
        csv.push('\n');
    }
    Ok(vec![write_output(out, "kernel.csv", &csv)?])
}

/// Checkpoint lines; checkpoints past the exact part of the table are
/// reported as INFO with no value.
fn nk_lines(table: &RatioTable, sched: &ScaleSchedule, factor: f64) -> Result<Vec<ReportLine>, CliError> {
    let reach = table.exact_horizon.min(table.rows.len().saturating_sub(1));
    let covered = (1..=sched.len()).take_while(|&k| sched.checkpoint(k).map_or(true, |t| t as usize <= reach)).count();
    let mut lines: Vec<ReportLine> = check_nk(table, &sched.truncated(covered), factor)?
        .into_iter()
        .map(|c| ReportLine::judged(format!("nk_k{}", c.k), window_tag(c.t, c.t), c.ratio, c.threshold, c.pass))
        .collect();
    for k in covered + 1..=sched.len() {
        if let Some(t) = sched.checkpoint(k) {
            lines.push(ReportLine::info(format!("nk_k{k}"), window_tag(t as usize, t as usize), f64::NAN));
        }
    }
    Ok(lines)
}

pub fn cmd_experiment(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let built = build_glued(cfg)?;
    let table = ratio_experiment(&built.graph, cfg.t_max, cfg.allow_approximate)?;
    let mut report = Report::default();
    for line in nk_lines(&table, &built.schedule, cfg.factor)? {
        report.push(line);
    }
    let mut summary = String::new();
    writeln!(summary, "vertices {}", built.graph.vertex_count()).unwrap();
    writeln!(summary, "edges {}", built.graph.edge_count()).unwrap();
    writeln!(summary, "delta {}", g17(built.delta)).unwrap();
    if let Some([e, o]) = &built.escape {
        writeln!(summary, "epsilon_e {} {}", g17(e.interval.lower), g17(e.interval.upper)).unwrap();
        writeln!(summary, "epsilon_o {} {}", g17(o.interval.lower), g17(o.interval.upper)).unwrap();
    }
    let horizon = if table.exact_horizon == usize::MAX { "inf".to_string() } else { table.exact_horizon.to_string() };
    writeln!(summary, "exact_horizon {horizon}").unwrap();
    writeln!(summary, "periods {}", built.schedule.scales().iter().map(|s| s.a.to_string()).collect::<Vec<_>>().join(",")).unwrap();
    Ok(vec![
        write_output(out, "ratio.csv", &table.to_csv())?,
        write_output(out, "nk_report.txt", &report.render())?,
        write_output(out, "experiment.txt", &summary)?,
    ])
}

pub fn cmd_decompose(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let built = build_glued(cfg)?;
    let g = &built.graph;
    let (x, y) = (origin(g)?, g.y().ok_or_else(|| CliError::Internal("glued graph has no y".into()))?);
    let table = visit_decomposition_series(g, x, y, cfg.t_max, cfg.decompose_gamma)?;
    Ok(vec![write_output(out, "decomposition.csv", &table.to_csv())?])
}

/// Runs the configured checks; the report is written before a failing
/// check is turned into an error.
pub fn run_checks(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    if cfg.checks.is_empty() {
        return Ok(report);
    }
    let needs_graph = cfg.checks.iter().any(|c| matches!(c, Check::Volume | Check::Poincare | Check::Nk))
        || cfg.target != Target::Lattice;
    let graph = if needs_graph { Some(build_target(cfg)?) } else { None };
    let max_time = cfg.times.iter().map(|&t| t + (t as f64).sqrt() as usize).max().unwrap_or(0);
    let series = match (&graph, cfg.target) {
        (_, Target::Lattice) => zd::lazy_diagonal(cfg.d, cfg.t_max.max(max_time)),
        (Some(g), _) => heat_kernel_diag(g, origin(g)?, cfg.t_max, Semantics::Lazy)?,
        (None, _) => unreachable!("non-lattice targets always build a graph"),
    };
    let mut checks = cfg.checks.clone();
    checks.sort();
    checks.dedup();
    for check in checks {
        match check {
            Check::Delmotte => {
                let (a, b) = cfg.window();
                let fit = check_delmotte(&series, cfg.d_eff(), a..=b)?;
                let w = window_tag(a, b);
                report.push(ReportLine::info("delmotte_c", w.clone(), fit.c_lower));
                report.push(ReportLine::info("delmotte_C", w.clone(), fit.c_upper));
                let th = cfg.thresholds.delmotte;
                report.push(ReportLine::judged("delmotte_ratio", w, fit.ratio(), th, fit.ratio() <= th));
            }
            Check::Volume => {
                let g = graph.as_ref().unwrap();
                let fit = check_volume_doubling(g, origin(g)?, &cfg.radii)?;
                let th = cfg.volume_threshold();
                let (a, b) = fit.window;
                report.push(ReportLine::judged("volume_doubling", window_tag(a, b), fit.c_upper, th, fit.c_upper <= th));
            }
            Check::Poincare => {
                let g = graph.as_ref().unwrap();
                let probes = ProbeConfig { seed: cfg.probe_seed, ..ProbeConfig::default() };
                let mut values = Vec::new();
                for &r in &cfg.radii {
                    let w = window_tag(r, 2 * r);
                    match check_poincare(g, origin(g)?, r, &probes) {
                        Ok(res) => {
                            values.push(res.value);
                            report.push(ReportLine::info(format!("poincare_r{r}"), w, res.value));
                        }
                        Err(VerifyError::AllProbesConstant) => {
                            report.push(ReportLine::info(format!("poincare_r{r}"), w, f64::NAN));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                if values.len() >= 2 {
                    let spread = spread(&values);
                    let (a, b) = (cfg.radii.iter().min().unwrap(), cfg.radii.iter().max().unwrap());
                    let th = cfg.thresholds.poincare;
                    report.push(ReportLine::judged("poincare_stability", window_tag(*a, *b), spread, th, spread <= th));
                }
            }
            Check::Smoothing => {
                let mut judged = Vec::new();
                for &t in &cfg.times {
                    let c = smoothing_profile(&series, t)?;
                    let w = (t as f64).sqrt() as usize;
                    report.push(ReportLine::info(format!("smoothing_t{t}"), window_tag(t.saturating_sub(w), t + w), c));
                    if t >= SMOOTHING_MIN_T {
                        judged.push((t, c));
                    }
                }
                judged.sort_by_key(|&(t, _)| t);
                if judged.len() >= 2 {
                    let worst = judged
                        .windows(2)
                        .map(|p| if p[0].1 > 0.0 && p[1].1 > 0.0 { (p[0].1 / p[1].1).max(p[1].1 / p[0].1) } else { f64::INFINITY })
                        .fold(1.0, f64::max);
                    let th = cfg.thresholds.smoothing;
                    let w = window_tag(judged[0].0, judged[judged.len() - 1].0);
                    report.push(ReportLine::judged("smoothing_stability", w, worst, th, worst <= th));
                }
            }
            Check::Nk => {
                let built = build_glued(cfg)?;
                let table = ratio_experiment(&built.graph, cfg.t_max, cfg.allow_approximate)?;
                for line in nk_lines(&table, &built.schedule, cfg.factor)? {
                    report.push(line);
                }
            }
        }
    }
    Ok(report)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}

pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = run_checks(cfg)?;
    let path = write_output(out, "verify_report.txt", &report.render())?;
    if report.any_failed() {
        let failed: Vec<&str> = report
            .lines
            .iter()
            .filter(|l| l.status == crate::verify::Status::Fail)
            .map(|l| l.name.as_str())
            .collect();
        return Err(CliError::CheckFailed(failed.join(", ")));
    }
    Ok(vec![path])
}
