//! Command-line frontend.
//!
//! Exit codes: 0 = certified and cloud contained; 2 = partial certificate;
//! 3 = containment violation (soundness alarm); 4 = configuration error;
//! 5 = internal/module error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use limitcone::config::ScenarioConfig;
use limitcone::report::{read_csv_points, verify_containment, ReportBundle};
use limitcone::scalar::Scalar;
use limitcone::scenario::{run_scenario, ScenarioError};
use limitcone::svg;

#[derive(Parser)]
#[command(name = "limitcone", version, about = "Simple hulls and certified limit cones in (PSL2R)^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Override precision_bits from the config.
    #[arg(long)]
    precision_bits: Option<usize>,
    /// Override q_max from the config.
    #[arg(long)]
    q_max: Option<i64>,
    /// Override word_max_len from the config.
    #[arg(long)]
    word_max_len: Option<usize>,
    /// Override out_dir from the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: build the representation, certify the hull, check the
    /// word cloud, and write report.json, curves.csv and cone.svg.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Render the cone figure from a stored bundle directory.
    Render {
        bundle: PathBuf,
        #[arg(short, long, default_value = "cone.svg")]
        out: PathBuf,
    },
    /// Recheck containment of the stored cloud against the stored hull.
    Verify { bundle: PathBuf },
}

const EXIT_PARTIAL: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_CONFIG: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version print and exit cleanly; usage errors are config errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match cli.command {
        Command::Run { config, overrides } => cmd_run(&config, &overrides),
        Command::Render { bundle, out } => cmd_render(&bundle, &out),
        Command::Verify { bundle } => cmd_verify(&bundle),
    }
}

fn cmd_run(config_path: &Path, overrides: &Overrides) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut raw = match limitcone::config::RawConfig::parse(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(p) = overrides.precision_bits {
        raw.set("precision_bits", p.to_string());
    }
    if let Some(q) = overrides.q_max {
        raw.set("q_max", q.to_string());
    }
    if let Some(w) = overrides.word_max_len {
        raw.set("word_max_len", w.to_string());
    }
    if let Some(d) = &overrides.out_dir {
        raw.set("out_dir", d.display().to_string());
    }
    let cfg = match ScenarioConfig::from_raw(raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = match run_scenario(&cfg, &text) {
        Ok(r) => r,
        Err(ScenarioError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    let rendered = svg::render(&result.bundle, &result.cloud_bary);
    if let Err(e) =
        limitcone::report::write_bundle(&cfg.out_dir, &result.bundle, &result.rows, &rendered)
    {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INTERNAL);
    }
    let b = &result.bundle;
    println!(
        "{}: verdict {}, {} hull vertices, {} facets; cloud {} points ({} words, {} non-hyperbolic), violations {}",
        b.scenario,
        b.hull.verdict,
        b.hull.vertices.len(),
        b.hull.facets.len(),
        b.cloud.distinct_points,
        b.cloud.total_words,
        b.cloud.nonhyperbolic,
        b.cloud.violations
    );
    println!("wrote {}", cfg.out_dir.display());
    if b.cloud.violations > 0 {
        eprintln!("soundness alarm: {} cloud points outside the certified hull", b.cloud.violations);
        ExitCode::from(EXIT_VIOLATION)
    } else if b.hull.verdict != "certified" {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

fn load_bundle(dir: &Path) -> Result<ReportBundle, String> {
    let path = if dir.is_dir() { dir.join("report.json") } else { dir.to_path_buf() };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ReportBundle::from_json(&text).map_err(|e| e.to_string())
}

fn cmd_render(bundle_path: &Path, out: &Path) -> ExitCode {
    let bundle = match load_bundle(bundle_path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if bundle.hull.vertices.is_empty() {
        eprintln!("error: bundle has an empty hull");
        return ExitCode::from(EXIT_INTERNAL);
    }
    // cloud points for dots, when the csv sits next to the report
    let csv_path = if bundle_path.is_dir() {
        bundle_path.join("curves.csv")
    } else {
        bundle_path.parent().unwrap_or(Path::new(".")).join("curves.csv")
    };
    let cloud: Vec<[f64; 3]> = match std::fs::read_to_string(&csv_path) {
        Ok(text) => match read_csv_points(&text) {
            Ok(pts) => pts
                .iter()
                .filter(|p| p.kind == "word")
                .map(|p| [p.bary[0].to_f64(), p.bary[1].to_f64(), p.bary[2].to_f64()])
                .collect(),
            Err(_) => Vec::new(),
        },
        Err(_) => Vec::new(),
    };
    let rendered = svg::render(&bundle, &cloud);
    if let Err(e) = std::fs::write(out, rendered) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(EXIT_INTERNAL);
    }
    println!("wrote {}", out.display());
    ExitCode::SUCCESS
}

fn cmd_verify(dir: &Path) -> ExitCode {
    let bundle = match load_bundle(dir) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let csv_path = if dir.is_dir() { dir.join("curves.csv") } else { dir.parent().unwrap_or(Path::new(".")).join("curves.csv") };
    let text = match std::fs::read_to_string(&csv_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", csv_path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let points = match read_csv_points(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    let tol = bundle
        .cloud
        .containment_tolerance
        .to_scalar()
        .unwrap_or_else(|_| Scalar::from_decimal("1e-12", 256).expect("literal"));
    match verify_containment(&bundle, &points, &tol) {
        Ok(out) => {
            println!(
                "verified {} points against {} hull vertices: {} violations",
                out.checked,
                bundle.hull.vertices.len(),
                out.violations
            );
            if out.violations > 0 {
                eprintln!("soundness alarm: stored cloud escapes the stored hull");
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
