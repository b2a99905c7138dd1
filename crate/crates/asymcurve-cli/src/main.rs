use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use asymcurve::{
    assemble_gamma, build_gamma_n, classify, read_curve_csv, uniform_approx_n, write_curve_csv,
    write_curve_svg, BuildOptions, ClassifyConfig, SampledCurve, UaMode,
};
use asymcurve_cli::checks::{exit_code, format_check_line, parse_suite, run_suite};
use asymcurve_cli::config::{budget_with_env, RunConfig};

#[derive(Parser)]
#[command(
    name = "asymcurve",
    version,
    about = "Builds and analyzes a family of bump-refined planar curves",
    after_help = "The ASYMCURVE_BUDGET environment variable caps the sample \
                  budget and takes precedence over --budget."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Equal,
    Dp,
}

impl From<ModeArg> for UaMode {
    fn from(m: ModeArg) -> UaMode {
        match m {
            ModeArg::Equal => UaMode::Equal,
            ModeArg::Dp => UaMode::Dp,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the refinement tower for one block and write its deepest
    /// level as CSV, with a build manifest next to it.
    Build {
        /// Block exponent; the curve spans x in [2^-n, 2^-(n-1)].
        #[arg(long)]
        n: u32,
        /// Number of refinement levels to build.
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = asymcurve::construction::DEFAULT_SAMPLES_PER_BUMP)]
        samples_per_bump: u32,
        /// Total sample budget across all levels.
        #[arg(long, default_value_t = asymcurve::construction::DEFAULT_SAMPLE_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assemble the closed curve from all blocks up to n-max and write it
    /// as CSV, with an assembly record next to it.
    Assemble {
        #[arg(long)]
        n_max: u32,
        /// Cap on the refinement depth of each block.
        #[arg(long)]
        depth_cap: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full classification battery on a curve CSV.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Chord-filter ladder as fractions of the curve diameter.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        /// Pair-evaluation budget per scan.
        #[arg(long)]
        pairs: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal piece count of an inscribed polygon with per-piece
    /// chord-arc ratio at most 1 + epsilon.
    Approx {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Piece-count cap for the search.
        #[arg(long)]
        n_max: u64,
        #[arg(long, value_enum, default_value = "equal")]
        mode: ModeArg,
        /// Arclength window "S0,S1"; the whole curve when omitted.
        #[arg(long, value_delimiter = ',')]
        sub: Option<Vec<f64>>,
    },
    /// Run the verification suite and report every check.
    Verify {
        /// "all", one check id like L7, or a comma list.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Reference size; scales every built artifact.
        #[arg(long)]
        n: Option<u32>,
        /// Write the full suite report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render a curve CSV as a single-path SVG.
    ExportSvg {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Stroke width in curve units; 0.2% of the extent when omitted.
        #[arg(long)]
        stroke: Option<f64>,
    },
}

fn read_curve(path: &Path) -> Result<SampledCurve> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_curve_csv(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Sibling path carrying a secondary artifact: "curve.csv" -> "curve.<kind>".
fn sibling(path: &Path, kind: &str) -> PathBuf {
    path.with_extension(kind)
}

fn cmd_build(n: u32, depth: u32, samples_per_bump: u32, budget: u64, out: &Path) -> Result<()> {
    let opts = BuildOptions {
        samples_per_bump,
        budget: budget_with_env(budget)?,
        ..BuildOptions::default()
    };
    let stack = build_gamma_n(n, depth, &opts)?;
    let top = stack.top();
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_curve_csv(top, BufWriter::new(file))?;
    let manifest_path = sibling(out, "manifest.json");
    write_json(&manifest_path, &stack.manifest(&opts))?;
    println!(
        "built n={n} depth={depth}: {} samples, length {:.9e} -> {} (manifest {})",
        top.sample_count(),
        top.total_len(),
        out.display(),
        manifest_path.display()
    );
    Ok(())
}

fn cmd_assemble(n_max: u32, depth_cap: u32, out: &Path) -> Result<()> {
    let opts = BuildOptions {
        budget: budget_with_env(BuildOptions::default().budget)?,
        ..BuildOptions::default()
    };
    let (curve, record) = assemble_gamma(n_max, depth_cap, &opts)?;
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_curve_csv(&curve, BufWriter::new(file))?;
    let record_path = sibling(out, "record.json");
    write_json(&record_path, &record)?;
    println!(
        "assembled n_max={n_max} depth_cap={depth_cap}: {} samples, length {:.9e} -> {} (record {})",
        curve.sample_count(),
        curve.total_len(),
        out.display(),
        record_path.display()
    );
    Ok(())
}

fn cmd_analyze(
    input: &Path,
    deltas: Option<Vec<f64>>,
    pairs: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<()> {
    let curve = read_curve(input)?;
    let mut cfg = ClassifyConfig::default();
    if let Some(d) = deltas {
        cfg.delta_fracs = d;
    }
    if let Some(p) = pairs {
        cfg.pair_budget = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = classify(&curve, &cfg)?;
    match out {
        Some(path) => {
            write_json(path, &report)?;
            println!("analyzed {} -> {}", input.display(), path.display());
        }
        None => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            print!("{text}");
        }
    }
    Ok(())
}

fn cmd_approx(
    input: &Path,
    epsilon: f64,
    n_max: u64,
    mode: UaMode,
    sub: Option<Vec<f64>>,
) -> Result<()> {
    let curve = read_curve(input)?;
    let window = match sub {
        None => None,
        Some(v) if v.len() == 2 => Some((v[0], v[1])),
        Some(v) => bail!("--sub expects exactly two values, got {}", v.len()),
    };
    let dp_stride = (curve.sample_count() / 20_000).max(1);
    let outcome = uniform_approx_n(&curve, window, epsilon, n_max, mode, dp_stride)?;
    let mut text = serde_json::to_string_pretty(&outcome)?;
    text.push('\n');
    print!("{text}");
    Ok(())
}

fn cmd_verify(suite: &str, n: Option<u32>, report_path: Option<&Path>) -> Result<u8> {
    let groups = parse_suite(suite)?;
    let mut cfg = RunConfig::default();
    if let Some(n) = n {
        cfg.n = n;
        cfg.n_max = n;
        cfg.depth_cap = n;
    }
    cfg.budget = budget_with_env(cfg.budget)?;
    cfg.report = report_path.map(Path::to_path_buf);
    cfg.validate()?;
    let report = run_suite(&cfg, &groups);
    for check in &report.checks {
        println!("{}", format_check_line(check));
    }
    println!(
        "suite: {} checks, {} passed, {} failed, {} errored, {} gating failures (config {})",
        report.summary.total,
        report.summary.passed,
        report.summary.failed,
        report.summary.errored,
        report.summary.gating_failed,
        &report.config_digest[..12]
    );
    for (what, dt) in &report.timings_ms {
        println!("  time {what}: {dt:.1} ms");
    }
    if let Some(path) = report_path {
        write_json(path, &report)?;
        println!("report -> {}", path.display());
    }
    Ok(exit_code(&report))
}

fn cmd_export_svg(input: &Path, out: &Path, stroke: Option<f64>) -> Result<()> {
    let curve = read_curve(input)?;
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(file);
    write_curve_svg(&curve, &mut w, stroke)?;
    w.flush()?;
    println!(
        "rendered {} samples -> {}",
        curve.sample_count(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Build {
            n,
            depth,
            samples_per_bump,
            budget,
            out,
        } => cmd_build(n, depth, samples_per_bump, budget, &out).map(|_| 0),
        Cmd::Assemble {
            n_max,
            depth_cap,
            out,
        } => cmd_assemble(n_max, depth_cap, &out).map(|_| 0),
        Cmd::Analyze {
            input,
            deltas,
            pairs,
            seed,
            out,
        } => cmd_analyze(&input, deltas, pairs, seed, out.as_deref()).map(|_| 0),
        Cmd::Approx {
            input,
            epsilon,
            n_max,
            mode,
            sub,
        } => cmd_approx(&input, epsilon, n_max, mode.into(), sub).map(|_| 0),
        Cmd::Verify { suite, n, report } => cmd_verify(&suite, n, report.as_deref()),
        Cmd::ExportSvg { input, out, stroke } => {
            cmd_export_svg(&input, &out, stroke).map(|_| 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
