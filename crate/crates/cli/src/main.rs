//! `psvd` command line: truncated SVD, PCA, low-rank reconstruction, a
//! convergence benchmark grid and a power-method baseline.
//!
//! Exit codes: 0 on success, 2 on input or usage errors, 3 when the
//! iteration did not converge (results are still written).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use psvd::analytics::{pca, PcaMode};
use psvd::io::{
    iris_species, read_matrix, write_matrix_csv, write_pca_result, write_svd_result, Fixture,
    MatrixSource,
};
use psvd::matrix::Vector;
use psvd::solver::{
    classic_power_method, deflate, initial_subspace, low_rank_approx, psvd, reconstruction_rate,
    PsvdConfig,
};
use psvd::{Error, Matrix};

#[derive(Parser)]
#[command(name = "psvd", version, about = "Truncated SVD by subspace power iteration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute singular values and vectors
    Svd(SvdArgs),
    /// Principal component analysis
    Pca(PcaArgs),
    /// Rank-r reconstruction with rate, error and compression summary
    Reconstruct(ReconstructArgs),
    /// Median iterations to convergence over a (q, eta) grid
    BenchConvergence(BenchArgs),
    /// All eigenpairs of the Gram matrix by power iteration with deflation
    PowerBaseline(PowerArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Path to a CSV file (or MatrixMarket when it ends in .mtx/.mm)
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Built-in example matrix: Xa, Xb, Xc, iris or digit
    #[arg(long)]
    fixture: Option<String>,
    /// Skip the first CSV row as a header
    #[arg(long)]
    has_header: bool,
    /// CSV cell delimiter
    #[arg(long, default_value = ",")]
    delimiter: char,
}

impl SourceArgs {
    fn load(&self) -> Result<(Matrix, Option<Fixture>), Error> {
        let source = match (&self.input, &self.fixture) {
            (Some(path), None) => {
                let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
                if ext.eq_ignore_ascii_case("mtx") || ext.eq_ignore_ascii_case("mm") {
                    MatrixSource::MatrixMarket { path: path.clone() }
                } else {
                    MatrixSource::Csv {
                        path: path.clone(),
                        has_header: self.has_header,
                        delimiter: self.delimiter,
                    }
                }
            }
            (None, Some(name)) => MatrixSource::Fixture(name.parse()?),
            _ => {
                return Err(Error::Config {
                    message: "exactly one of --input or --fixture is required".into(),
                })
            }
        };
        let fixture = match &source {
            MatrixSource::Fixture(f) => Some(*f),
            _ => None,
        };
        Ok((read_matrix(&source)?, fixture))
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Number of singular triplets (defaults to min(rows, cols))
    #[arg(long)]
    rank: Option<usize>,
    /// Gram-matrix power, 1..=4
    #[arg(long, default_value_t = 2)]
    q: usize,
    /// Gradient step
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Convergence tolerance on the iterate step norm
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Maximum iterations
    #[arg(long, default_value_t = 200)]
    itmax: usize,
    /// Seed for the random initial subspace
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Divide the matrix by its largest absolute entry first
    #[arg(long)]
    prescale: bool,
}

impl SolverArgs {
    fn config(&self, full_rank: usize) -> PsvdConfig {
        PsvdConfig::new(self.rank.unwrap_or(full_rank))
            .with_power(self.q)
            .with_eta(self.eta)
            .with_eps(self.tol)
            .with_itmax(self.itmax)
            .with_seed(self.seed)
            .with_prescale(self.prescale)
    }
}

#[derive(Args)]
struct SvdArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory for d.csv, U.csv, W.csv and report.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of components (defaults to the column count)
    #[arg(long)]
    components: Option<usize>,
    /// covariance or correlation
    #[arg(long, default_value = "covariance")]
    mode: String,
    /// Also write a labeled scores file for external plotting
    #[arg(long, requires = "out")]
    plot_data: bool,
    /// Directory for eigenvalues, axes, scores and report.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory for xr.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated powers to benchmark
    #[arg(long, default_value = "2")]
    q_list: String,
    /// Comma-separated step values to benchmark
    #[arg(long, default_value = "1")]
    eta_list: String,
    /// Seeds per cell; the median is reported
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Directory for bench.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Convergence tolerance on the iterate difference
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Maximum iterations per eigenpair
    #[arg(long, default_value_t = 200)]
    itmax: usize,
    /// Seed for the start vectors
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Svd(args) => run_svd(args),
        Command::Pca(args) => run_pca(args),
        Command::Reconstruct(args) => run_reconstruct(args),
        Command::BenchConvergence(args) => run_bench(args),
        Command::PowerBaseline(args) => run_power_baseline(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_svd(args: SvdArgs) -> Result<u8, Error> {
    let (x, _) = args.source.load()?;
    let cfg = args.solver.config(x.rows().min(x.cols()));
    let start = Instant::now();
    let res = psvd(&x, &cfg)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;

    for &d in res.d.iter() {
        println!("{d:.8}");
    }
    if let Some(dir) = &args.out {
        write_svd_result(&res, &cfg, elapsed_ms, dir)?;
    }
    if res.report.converged {
        Ok(0)
    } else {
        eprintln!(
            "not converged after {} iterations (delta {:.3e} > {:.3e})",
            res.report.iterations, res.report.final_delta, cfg.eps
        );
        Ok(3)
    }
}

fn run_pca(args: PcaArgs) -> Result<u8, Error> {
    let (x, fixture) = args.source.load()?;
    let mode = match args.mode.to_ascii_lowercase().as_str() {
        "covariance" => PcaMode::Covariance,
        "correlation" => PcaMode::Correlation,
        other => {
            return Err(Error::Config {
                message: format!("unknown mode '{other}'; expected covariance or correlation"),
            })
        }
    };
    let r = args.components.unwrap_or(x.cols());
    let cfg = args.solver.config(x.cols());
    let start = Instant::now();
    let res = pca(&x, r, mode, &cfg)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;

    for j in 0..res.eigenvalues.len() {
        println!("{:.8}\t{:.4}", res.eigenvalues.get(j), res.explained.get(j));
    }

    if let Some(dir) = &args.out {
        write_pca_result(&res, &cfg, elapsed_ms, dir)?;
        if args.plot_data {
            let labels: Vec<String> = match fixture {
                Some(Fixture::Iris) => iris_species().iter().map(|s| s.to_string()).collect(),
                _ => (1..=x.rows()).map(|i| i.to_string()).collect(),
            };
            let mut text = String::new();
            for (i, label) in labels.iter().enumerate().take(res.scores.rows()) {
                let coords: Vec<String> =
                    res.scores.row(i).iter().map(|v| format!("{v}")).collect();
                text.push_str(&format!("{label},{}\n", coords.join(",")));
            }
            let path = dir.join("plot_data.csv");
            std::fs::write(&path, text)
                .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        }
    }
    Ok(0)
}

fn run_reconstruct(args: ReconstructArgs) -> Result<u8, Error> {
    let (x, _) = args.source.load()?;
    let full_rank = x.rows().min(x.cols());
    let r = args.solver.rank.ok_or_else(|| Error::Config {
        message: "--rank is required for reconstruct".into(),
    })?;
    if r == 0 || r > full_rank {
        return Err(Error::Config {
            message: format!("rank must be in 1..={full_rank}, got {r}"),
        });
    }

    let mut solver = args.solver;
    solver.rank = Some(full_rank);
    let cfg = solver.config(full_rank);
    let res = psvd(&x, &cfg)?;

    let xr = low_rank_approx(&res, r)?;
    let rate = reconstruction_rate(&res.d, r)?;
    let squared_error: f64 = res.d.iter().skip(r).map(|d| d * d).sum();
    let (m, n) = (x.rows() as f64, x.cols() as f64);
    let compression = m * n / (r as f64 * (m + n + 1.0));

    write_matrix_csv(&xr, &args.out.join("xr.csv"))?;
    println!(
        "rank={r} rate={rate:.3}% squared_error={squared_error:.8} compression={compression:.4}"
    );
    Ok(0)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>().map_err(|_| Error::Config {
                message: format!("invalid {what} value '{t}'"),
            })
        })
        .collect()
}

fn run_bench(args: BenchArgs) -> Result<u8, Error> {
    let (x, _) = args.source.load()?;
    let qs: Vec<usize> = parse_list(&args.q_list, "q")?;
    let etas: Vec<f64> = parse_list(&args.eta_list, "eta")?;
    if qs.is_empty() || etas.is_empty() || args.repeats == 0 {
        return Err(Error::Config {
            message: "q-list, eta-list and repeats must be non-empty".into(),
        });
    }

    let full_rank = x.rows().min(x.cols());
    let base = args.solver.config(full_rank);

    let mut rows = Vec::new();
    let header: Vec<String> = etas.iter().map(|e| format!("{e}")).collect();
    println!("q\\eta\t{}", header.join("\t"));
    for &q in &qs {
        let mut medians = Vec::new();
        for &eta in &etas {
            let mut counts: Vec<usize> = (0..args.repeats)
                .map(|i| {
                    let cfg = base
                        .clone()
                        .with_power(q)
                        .with_eta(eta)
                        .with_seed(base.seed + i as u64);
                    match psvd(&x, &cfg) {
                        Ok(res) if res.report.converged => res.report.iterations,
                        // A failure or non-convergence both count as itmax+1,
                        // matching the printed convention.
                        _ => base.itmax + 1,
                    }
                })
                .collect();
            counts.sort_unstable();
            let median = counts[(counts.len() - 1) / 2];
            medians.push(median);
            rows.push((q, eta, median));
        }
        let cells: Vec<String> = medians.iter().map(|m| m.to_string()).collect();
        println!("{q}\t{}", cells.join("\t"));
    }

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Io { path: dir.display().to_string(), source: e })?;
        let mut text = String::from("q,eta,median_iterations\n");
        for (q, eta, median) in rows {
            text.push_str(&format!("{q},{eta},{median}\n"));
        }
        let path = dir.join("bench.csv");
        std::fs::write(&path, text)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    }
    Ok(0)
}

fn run_power_baseline(args: PowerArgs) -> Result<u8, Error> {
    let (x, _) = args.source.load()?;
    let mut s = x.gram_matrix();
    let n = s.rows();

    for j in 0..n {
        let start = initial_subspace(n, 1, args.seed.wrapping_add(j as u64))?;
        let v0 = Vector::new(start.column(0))?;
        let out = classic_power_method(&s, &v0, args.tol, args.itmax)?;
        let value = out.pair.value.max(0.0).sqrt();
        let note = if out.converged { "" } else { "  (not converged)" };
        println!("{value:.8}  iterations={}{note}", out.iterations);
        s = deflate(&s, &out.pair)?;
    }
    Ok(0)
}
