//! Batch front door: family selection, criterion sweeps, spectrum,
//! resolvent, and ergodic runs with machine-readable reports.
//!
//! Exit codes: 0 when every requested verdict holds, 1 when any fails,
//! 2 when any is inconclusive, 3 on usage or precondition errors.

mod complexlit;
mod config;

use cesaro::criteria::{self, Verdict, VerdictStatus};
use cesaro::ergodic;
use cesaro::kernel::{SequenceVector, TruncationWindow};
use cesaro::oracle::{oracle_suite, OracleConfig};
use cesaro::report::{exit_code, ReportEntry};
use cesaro::spectral::{
    assemble_spectrum, disk_membership, resolvent_apply_verified, sigma0_distance,
    ResolventParams, SpectrumEvidence,
};
use cesaro::weights::{default_builtins, WeightFamily};
use clap::{Args, Parser, Subcommand};
use config::{load_config, parse_family_arg, RunDefaults};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cesaro",
    about = "Spectral and ergodic analysis of the averaging operator on weighted c0-type sequence spaces",
    version
)]
struct Cli {
    /// Optional TOML or JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Builtin family name (see `families`) or an inline JSON spec, e.g.
    /// '{"log_weight_expr": "-i/n"}' (bare keys are tolerated).
    #[arg(long)]
    family: Option<String>,
    /// Shortcut parameter for `alpha-seq`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Shortcut parameter for `point-spectrum`.
    #[arg(long)]
    s: Option<u32>,
    /// Shortcut parameter for `dragilev` (`x-exp-x` or `sinh`).
    #[arg(long)]
    shape: Option<String>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Truncation window N.
    #[arg(long)]
    window: Option<usize>,
    /// Max seminorm index n.
    #[arg(long)]
    n_max: Option<u32>,
    /// Witness search breadth: m ranges over (n, n + m_search].
    #[arg(long)]
    m_search: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Run criteria checks; writes a JSON report.
    Check {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Comma-separated list: kothe,g1,vanishing,regular,continuity,
        /// compactness,diff,nuclear,invertibility,membership,sn,closed-range.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        /// Max integer s for membership sweeps.
        #[arg(long, default_value_t = 8)]
        s_max: u32,
        /// Grid for S_n computations.
        #[arg(long, value_delimiter = ',')]
        s_grid: Vec<f64>,
        /// Output path for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the spectral region; optional λ-grid CSV for plotting.
    Spectrum {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        k_max: Option<u32>,
        /// λ-grid over the real axis: min:max:steps.
        #[arg(long, allow_hyphen_values = true)]
        grid_re: Option<String>,
        /// λ-grid over the imaginary axis: min:max:steps.
        #[arg(long, allow_hyphen_values = true)]
        grid_im: Option<String>,
        /// CSV output for the λ grid.
        #[arg(long)]
        grid_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve (C − λI)x = y from a CSV right-hand side.
    Resolvent {
        #[command(flatten)]
        family: FamilyArgs,
        /// λ as a complex literal, e.g. `0.4+0.3i`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Right-hand side CSV (`index,re,im`).
        #[arg(long)]
        rhs: PathBuf,
        /// Output CSV for the solution.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean-ergodic run: CSV of (k, n, value) plus a JSON summary.
    Ergodic {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Initial vector: `e<k>`, `ones`, or a CSV path.
        #[arg(long, default_value = "e1")]
        x: String,
        /// Iteration checkpoints.
        #[arg(long, value_delimiter = ',')]
        k_schedule: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Exact-rational oracle suite.
    Oracle {
        /// Window for the exact checks (N <= 50).
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List builtin weight families.
    Families,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("CESARO_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let defaults = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Check { family, sweep, props, s_max, s_grid, out } => {
            cmd_check(&defaults, family, sweep, props, s_max, s_grid, out)
        }
        Command::Spectrum { family, sweep, k_max, grid_re, grid_im, grid_out, out } => {
            cmd_spectrum(&defaults, family, sweep, k_max, grid_re, grid_im, grid_out, out)
        }
        Command::Resolvent { family, lambda, rhs, out } => {
            cmd_resolvent(&defaults, family, lambda, rhs, out)
        }
        Command::Ergodic { family, sweep, x, k_schedule, out, summary_out } => {
            cmd_ergodic(&defaults, family, sweep, x, k_schedule, out, summary_out)
        }
        Command::Oracle { n, out } => cmd_oracle(n, out),
        Command::Families => cmd_families(),
    }
}

fn resolve_family(defaults: &RunDefaults, args: &FamilyArgs) -> Result<WeightFamily, String> {
    parse_family_arg(defaults, args.family.as_deref(), args.alpha, args.s, args.shape.as_deref())
}

fn window_of(defaults: &RunDefaults, sweep: &SweepArgs) -> Result<TruncationWindow, String> {
    let n = sweep.window.unwrap_or(defaults.window);
    TruncationWindow::new(n).map_err(|e| e.to_string())
}

fn push_entry(
    criterion: &str,
    fam: &WeightFamily,
    v: &Verdict,
    entries: &mut Vec<ReportEntry>,
    statuses: &mut Vec<VerdictStatus>,
) {
    println!("{criterion}: {:?}", v.status);
    statuses.push(v.status);
    entries.push(ReportEntry::from_verdict(criterion, fam, v));
}

fn cmd_check(
    defaults: &RunDefaults,
    family: FamilyArgs,
    sweep: SweepArgs,
    props: Vec<String>,
    s_max: u32,
    s_grid: Vec<f64>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let fam = resolve_family(defaults, &family)?;
    let window = window_of(defaults, &sweep)?;
    let n_max = sweep.n_max.unwrap_or(defaults.n_max);
    let m_search = sweep.m_search.unwrap_or(defaults.m_search);
    let s_grid = if s_grid.is_empty() { criteria::default_s_grid() } else { s_grid };
    let props: Vec<String> = if props.is_empty() {
        ["kothe", "g1", "vanishing", "regular", "continuity", "nuclear", "invertibility"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        props
    };

    let mut entries: Vec<ReportEntry> = Vec::new();
    let mut statuses: Vec<VerdictStatus> = Vec::new();

    for prop in &props {
        match prop.as_str() {
            "kothe" => {
                let v = criteria::check_kothe(&fam, n_max.max(2), window).map_err(err)?;
                push_entry("kothe", &fam, &v, &mut entries, &mut statuses);
            }
            "g1" => {
                let (g1_1, g1_2) =
                    criteria::check_g1(&fam, n_max, m_search, window).map_err(err)?;
                push_entry("g1-1", &fam, &g1_1, &mut entries, &mut statuses);
                push_entry("g1-2", &fam, &g1_2, &mut entries, &mut statuses);
            }
            "vanishing" => {
                let v =
                    criteria::check_vanishing_and_normability(&fam, n_max, window).map_err(err)?;
                push_entry("vanishing", &fam, &v, &mut entries, &mut statuses);
            }
            "regular" => {
                let v = criteria::check_regular(&fam, n_max.max(2), window).map_err(err)?;
                push_entry("regular", &fam, &v, &mut entries, &mut statuses);
            }
            "continuity" => {
                let v = criteria::check_continuity_cesaro(&fam, n_max, m_search, window)
                    .map_err(err)?;
                push_entry("continuity", &fam, &v, &mut entries, &mut statuses);
            }
            "compactness" => {
                let v = criteria::check_compactness_cesaro(&fam, n_max, m_search, window)
                    .map_err(err)?;
                push_entry("compactness", &fam, &v, &mut entries, &mut statuses);
            }
            "diff" => {
                let v = criteria::check_continuity_diff(&fam, n_max, m_search, window)
                    .map_err(err)?;
                push_entry("diff-continuity", &fam, &v, &mut entries, &mut statuses);
            }
            "nuclear" => {
                let v =
                    criteria::check_nuclearity(&fam, n_max, m_search, window, 1.0).map_err(err)?;
                push_entry("nuclearity", &fam, &v, &mut entries, &mut statuses);
            }
            "invertibility" => {
                let v =
                    criteria::check_invertibility(&fam, n_max, m_search, window).map_err(err)?;
                push_entry("invertibility", &fam, &v, &mut entries, &mut statuses);
            }
            "membership" => {
                for s in 1..=s_max {
                    let v = criteria::check_point_spectrum_membership(&fam, s, n_max, window)
                        .map_err(err)?;
                    push_entry(&format!("membership(1/{s})"), &fam, &v, &mut entries, &mut statuses);
                }
            }
            "sn" => {
                for n in 1..=n_max.min(3) {
                    let r = criteria::compute_sn(&fam, n, &s_grid, window).map_err(err)?;
                    let members =
                        r.entries.iter().filter(|e| e.status == criteria::Membership::Member).count();
                    println!(
                        "sn(n={n}): {members} members on the grid, s0 {:?}",
                        r.s0_estimate.as_ref().map(|s| s.estimate)
                    );
                }
            }
            "closed-range" => {
                let v = ergodic::verify_closed_range(&fam, 1, 2, window).map_err(err)?;
                push_entry("closed-range", &fam, &v, &mut entries, &mut statuses);
            }
            other => return Err(format!("unknown prop `{other}`")),
        }
    }

    let json = serde_json::to_string_pretty(&entries).map_err(err)?;
    if let Some(path) = out {
        write_atomic(&path, &json)?;
        println!("report written to {}", path.display());
    }
    Ok(exit_code(&statuses))
}

fn parse_axis(spec: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid axis must be min:max:steps, got `{spec}`"));
    }
    let min: f64 = parts[0].parse().map_err(|_| format!("bad axis min `{}`", parts[0]))?;
    let max: f64 = parts[1].parse().map_err(|_| format!("bad axis max `{}`", parts[1]))?;
    let steps: usize = parts[2].parse().map_err(|_| format!("bad axis steps `{}`", parts[2]))?;
    if steps < 2 || max <= min {
        return Err(format!("degenerate axis `{spec}`"));
    }
    Ok((min, max, steps))
}

#[allow(clippy::too_many_arguments)]
fn cmd_spectrum(
    defaults: &RunDefaults,
    family: FamilyArgs,
    sweep: SweepArgs,
    k_max: Option<u32>,
    grid_re: Option<String>,
    grid_im: Option<String>,
    grid_out: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let fam = resolve_family(defaults, &family)?;
    let window = window_of(defaults, &sweep)?;
    let n_max = sweep.n_max.unwrap_or(defaults.n_max);
    let m_search = sweep.m_search.unwrap_or(defaults.m_search);
    let k_max = k_max.unwrap_or(defaults.k_max);

    let nuclearity =
        criteria::check_nuclearity(&fam, n_max, m_search, window, 1.0).map_err(err)?;
    let g1 = criteria::check_g1(&fam, n_max, m_search, window).map_err(err)?;
    let mut sn_reports = Vec::new();
    for n in 1..=n_max.min(3) {
        sn_reports
            .push(criteria::compute_sn(&fam, n, &criteria::default_s_grid(), window).map_err(err)?);
    }
    let evidence = SpectrumEvidence { nuclearity, sn_reports, g1: Some(g1) };
    let region = assemble_spectrum(&fam, &evidence, k_max).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&region).map_err(err)?;
    println!("{json}");
    if let Some(path) = out {
        write_atomic(&path, &json)?;
    }

    if let Some(path) = grid_out {
        let (re_min, re_max, re_steps) =
            parse_axis(grid_re.as_deref().unwrap_or("-0.2:1.2:57"))?;
        let (im_min, im_max, im_steps) =
            parse_axis(grid_im.as_deref().unwrap_or("-0.6:0.6:49"))?;
        use rayon::prelude::*;
        let points: Vec<(f64, f64)> = (0..re_steps)
            .flat_map(|a| {
                let re = re_min + (re_max - re_min) * a as f64 / (re_steps - 1) as f64;
                (0..im_steps)
                    .map(move |b| (re, im_min + (im_max - im_min) * b as f64 / (im_steps - 1) as f64))
            })
            .collect();
        let rows: Vec<String> = points
            .par_iter()
            .map(|&(re, im)| {
                let lambda = num_complex::Complex64::new(re, im);
                let (dist, nearest) = sigma0_distance(lambda);
                let d1 = disk_membership(lambda, 1.0).expect("r = 1 is valid");
                let re_inv =
                    if lambda.norm_sqr() > 0.0 { lambda.re / lambda.norm_sqr() } else { f64::NAN };
                format!("{re},{im},{dist},{nearest},{},{re_inv}", d1.inside)
            })
            .collect();
        let mut csv = String::from("re,im,dist_sigma0,nearest,in_disk_1,re_inv_lambda\n");
        for r in rows {
            csv.push_str(&r);
            csv.push('\n');
        }
        write_atomic(&path, &csv)?;
        println!("λ-grid written to {}", path.display());
    }
    Ok(0)
}

fn cmd_resolvent(
    defaults: &RunDefaults,
    family: FamilyArgs,
    lambda: String,
    rhs: PathBuf,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let _fam = resolve_family(defaults, &family)?;
    let lambda = complexlit::parse_complex(&lambda).map_err(|e| e.to_string())?;
    let params = ResolventParams::new(lambda).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(&rhs)
        .map_err(|e| format!("cannot read rhs {}: {e}", rhs.display()))?;
    let y = SequenceVector::from_csv(&text).map_err(|e| e.to_string())?;
    let (x, deviation) = resolvent_apply_verified(&y, &params).map_err(|e| e.to_string())?;

    // Residual of the forward equation.
    let cx = cesaro::kernel::cesaro_apply(&x);
    let mut residual = 0.0f64;
    for i in 1..=x.len() {
        residual = residual.max((cx.get(i) - lambda * x.get(i) - y.get(i)).norm());
    }
    let summary = serde_json::json!({
        "lambda": format!("{lambda}"),
        "alpha": params.alpha(),
        "sigma_distance": params.sigma_distance(),
        "n": x.len(),
        "max_residual": residual,
        "closed_form_deviation": deviation,
    });
    println!("{}", serde_json::to_string_pretty(&summary).map_err(err)?);
    let path = out.unwrap_or_else(|| PathBuf::from("resolvent_solution.csv"));
    write_atomic(&path, &x.to_csv())?;
    println!("solution written to {}", path.display());
    Ok(0)
}

fn parse_x_spec(spec: &str, window: TruncationWindow) -> Result<SequenceVector, String> {
    match spec {
        "ones" => Ok(SequenceVector::ones(window)),
        s if s.starts_with('e') && s[1..].chars().all(|c| c.is_ascii_digit()) && s.len() > 1 => {
            let k: usize = s[1..].parse().map_err(|_| format!("bad basis spec `{s}`"))?;
            SequenceVector::basis(window, k).map_err(|e| e.to_string())
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read x from {path}: {e}"))?;
            SequenceVector::from_csv(&text).map_err(|e| e.to_string())
        }
    }
}

fn cmd_ergodic(
    defaults: &RunDefaults,
    family: FamilyArgs,
    sweep: SweepArgs,
    x: String,
    k_schedule: Vec<usize>,
    out: Option<PathBuf>,
    summary_out: Option<PathBuf>,
) -> Result<i32, String> {
    let fam = resolve_family(defaults, &family)?;
    let window = window_of(defaults, &sweep)?;
    let n_max = sweep.n_max.unwrap_or(defaults.n_max);
    let schedule = if k_schedule.is_empty() { ergodic::default_k_schedule() } else { k_schedule };
    let x = parse_x_spec(&x, window)?;
    let run = ergodic::run_ergodic(&fam, &x, n_max, &schedule, window).map_err(err)?;

    let mut csv = String::from("k,n,value\n");
    for s in &run.samples {
        csv.push_str(&format!("{},{},{}\n", s.k, s.n, s.mean_distance));
    }
    if let Some(path) = out {
        write_atomic(&path, &csv)?;
        println!("run written to {}", path.display());
    } else {
        print!("{csv}");
    }
    let summary = serde_json::json!({
        "family": run.family,
        "trend": run.trend.class,
        "power_bound_margin": run.power_bound_margin,
        "notes": run.notes,
    });
    let summary_text = serde_json::to_string_pretty(&summary).map_err(err)?;
    println!("{summary_text}");
    if let Some(path) = summary_out {
        write_atomic(&path, &summary_text)?;
    }
    Ok(0)
}

fn cmd_oracle(n: usize, out: Option<PathBuf>) -> Result<i32, String> {
    let report = oracle_suite(n, &OracleConfig::default()).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&report).map_err(err)?;
    println!("{json}");
    if let Some(path) = out {
        write_atomic(&path, &json)?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn cmd_families() -> Result<i32, String> {
    println!("builtin weight families (log a_n(i) shown):\n");
    for fam in default_builtins() {
        let formula = match fam.name() {
            "power-series" => "-α_i/n with α_i = i (or a user sequence)",
            "nuclear-g1-example" => {
                "-n·e^(i/n): nuclear G1; raw (K1) fails for finitely many small i"
            }
            "alpha-seq" => {
                "α_n·log i − i with α_n = α·n/(n+1) ↑ α: invertibility fails, memberships hold"
            }
            "point-spectrum" => {
                "-(s − 1/2 + 1/(n+1))·log i: point spectrum exactly {1, 1/2, …, 1/s}"
            }
            "sn-gap" => "-e^(α_i/n), α_i = 2·log log(i+2): S_1 empty but S_2 nonempty",
            "dragilev" => "-f(α_i/n) for f = x·e^x or sinh x",
            _ => "",
        };
        println!("  {:<20} {}", fam.name(), formula);
        println!("  {:<20} params: {}", "", fam.params());
        let facts: Vec<String> = fam.known_facts().iter().map(|f| format!("{f:?}")).collect();
        println!("  {:<20} known facts (labels only): {}\n", "", facts.join(", "));
    }
    Ok(0)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Writes atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, content: &str) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    std::fs::write(&tmp, content).map_err(|e| format!("write {}: {e}", tmp.display()))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("rename to {}: {e}", path.display()))
}
