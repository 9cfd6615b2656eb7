//! `rankrange`: rank-k numerical ranges of unitary matrices from the shell.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 the input is rejected
//! (not unitary, target outside the region, unsupported dimension, failed
//! verification), 3 internal failure (broken invariant, oracle mismatch).

mod demo;
mod svg;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rankrange_core::region::boundary_samples;
use rankrange_core::schema::{InputFile, ProjectorFile, RegionFile, SpectrumFile};
use rankrange_core::{
    brute_force_contains, build_region, construct_projector, contains, interior_point,
    verify_projector, Complex64, Error, ResidualReport,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "rankrange",
    version,
    about = "Rank-k numerical ranges and compression projectors of unitary matrices"
)]
struct Cli {
    /// Tolerance for unitarity, membership and projector verification.
    #[arg(
        long,
        global = true,
        env = "RANKRANGE_TOL",
        default_value_t = 1e-9,
        allow_hyphen_values = true
    )]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the sorted eigenphases of a matrix or spectrum file.
    Spectrum { input: PathBuf },
    /// Write the chord constraints of the rank-k region.
    Region {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Also export this many boundary samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render the region as SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Classify a target as inside, boundary or outside.
    Member {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        /// Cross-check against the subset-hull definition.
        #[arg(long)]
        oracle: bool,
    },
    /// Build a rank-k projector P with PσP = λP.
    Project {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Target; defaults to an interior point of the region.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<Complex64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a projector file against a matrix or spectrum file.
    Verify {
        input: PathBuf,
        projector: PathBuf,
        /// Override the rank stored in the projector file.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the seeded battery and stream one JSON record per instance.
    Demo {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        per_shape: usize,
        #[arg(long)]
        oracle: bool,
        /// Record wall time per instance (makes the output nondeterministic).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
    Rejected(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) if e.is_rejection() => 2,
            Failure::Core(e) if e.is_internal() => 3,
            Failure::Core(_) => 1,
            Failure::Rejected(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Rejected(m) | Failure::Internal(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected RE,IM")?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part: {e}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| format!("imaginary part: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err("components must be finite".into());
    }
    Ok(Complex64::new(re, im))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable") + "\n"
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
    }
}

fn residual_line(r: &ResidualReport) -> String {
    format!(
        "residuals: hermitian {:.3e} idempotent {:.3e} trace {:.3e} compression {:.3e} -> {}",
        r.hermitian,
        r.idempotent,
        r.trace,
        r.compression,
        if r.pass { "pass" } else { "FAIL" }
    )
}

fn run(cli: Cli) -> Outcome {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    match cli.command {
        Command::Spectrum { input } => {
            let es = read_json::<InputFile>(&input)?.eigensystem(tol)?;
            emit(
                None,
                &to_json(&SpectrumFile {
                    phases: es.phases().to_vec(),
                }),
            )
        }
        Command::Region {
            input,
            k,
            samples,
            out,
            svg,
        } => {
            let es = read_json::<InputFile>(&input)?.eigensystem(tol)?;
            let region = build_region(&es, k)?;
            let mut file = RegionFile::from(&region);
            if let Some(count) = samples {
                file.boundary = Some(match boundary_samples(&region, count) {
                    Ok(points) => points.iter().map(|z| [z.re, z.im]).collect(),
                    Err(Error::EmptyRegion) => vec![],
                    Err(e) => return Err(e.into()),
                });
            }
            emit(out.as_deref(), &to_json(&file))?;
            if let Some(path) = svg {
                fs::write(&path, svg::render(&es, &region))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Member {
            input,
            k,
            lambda,
            oracle,
        } => {
            let es = read_json::<InputFile>(&input)?.eigensystem(tol)?;
            let verdict = contains(&build_region(&es, k)?, lambda, tol);
            if !oracle {
                println!("{verdict}");
                return Ok(());
            }
            let reference = brute_force_contains(&es, k, lambda, tol)?;
            println!("{verdict} (oracle: {reference})");
            if reference != verdict {
                return Err(Failure::Internal(format!(
                    "oracle mismatch: chords say {verdict}, hulls say {reference}"
                )));
            }
            Ok(())
        }
        Command::Project {
            input,
            k,
            lambda,
            out,
        } => {
            let es = read_json::<InputFile>(&input)?.eigensystem(tol)?;
            let lambda = match lambda {
                Some(l) => l,
                None => {
                    let region = build_region(&es, k)?;
                    interior_point(&region, 64)
                        .filter(|&z| region.margin(z) > tol)
                        .ok_or(Error::EmptyRegion)?
                }
            };
            let p = construct_projector(&es, k, lambda)?;
            let report = verify_projector(&p.matrix, es.matrix(), lambda, k, tol)?;
            let mut file = ProjectorFile::from(&p);
            file.residuals = report;
            emit(out.as_deref(), &to_json(&file))?;
            let line = residual_line(&report);
            if out.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            if !report.pass {
                return Err(Failure::Internal(
                    "constructed projector failed verification".into(),
                ));
            }
            Ok(())
        }
        Command::Verify {
            input,
            projector,
            k,
        } => {
            let sigma = read_json::<InputFile>(&input)?.sigma()?;
            let file: ProjectorFile = read_json(&projector)?;
            let report = verify_projector(
                &file.matrix()?,
                &sigma,
                file.lambda(),
                k.unwrap_or(file.k),
                tol,
            )?;
            emit(None, &to_json(&report))?;
            eprintln!("{}", residual_line(&report));
            if !report.pass {
                return Err(Failure::Rejected(
                    "projector does not satisfy P σ P = λ P within tolerance".into(),
                ));
            }
            Ok(())
        }
        Command::Demo {
            seed,
            per_shape,
            oracle,
            timing,
            out,
        } => {
            let config = demo::DemoConfig {
                seed,
                per_shape,
                oracle,
                timing,
                tol,
            };
            let (records, summary, branches) = demo::run(&config, &demo::default_shapes());
            let text: String = records.iter().map(to_json).collect();
            emit(out.as_deref(), &text)?;
            let branch_list: Vec<String> =
                branches.iter().map(|(b, n)| format!("{b}={n}")).collect();
            eprintln!(
                "demo seed {seed}: {} passed, {} failed, {} skipped; branches {}",
                summary.passed,
                summary.failed,
                summary.skipped,
                branch_list.join(" ")
            );
            if summary.failed > 0 {
                return Err(Failure::Internal(format!(
                    "{} demo instances failed",
                    summary.failed
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
