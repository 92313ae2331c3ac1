use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gfsc_cli::{
    default_log_grid, grid_search, render_table, run_experiment, ExperimentConfig, GridSpec,
    Method, Report,
};
use gfsc_core::dataset::{self, DatasetManifest, Orientation, ViewSpec};
use gfsc_core::error::{Error, Result};
use gfsc_core::synth::generate_synthetic;
use gfsc_core::types::{Hyperparams, MultiViewDataset};

/// Multi-view spectral clustering by weighted graph fusion: solvers,
/// baselines, and the repetition/grid experiment protocol.
#[derive(Parser)]
#[command(name = "gfsc", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one method on a dataset with seeded repetitions
    Run(RunArgs),
    /// Sweep (alpha, beta, gamma) over value grids with the repetition
    /// protocol; emits the accuracy surface and the best cell
    Grid(GridArgs),
    /// Run the baseline battery: SC on each view, SC(Ave), KM on
    /// concatenated features, GF, and GFSC, as one comparison table
    Baseline(BaselineArgs),
    /// Generate a synthetic planted-partition dataset on disk
    Synth(SynthArgs),
    /// Convert a raw dataset distribution into the CSV + manifest layout
    Convert(ConvertArgs),
}

#[derive(Args)]
struct ParamArgs {
    /// Self-expressiveness regularization
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Fusion-term regularization
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Cluster-structure regularization
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Number of clusters (defaults to the manifest's expected class count)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Base seed; repetition r uses seed + r
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeded repetitions per configuration
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Worker threads for repetitions and grid cells
    #[arg(long)]
    workers: Option<usize>,
    /// Initialize the solvers from averaged stand-alone graphs instead of
    /// random matrices
    #[arg(long)]
    warm_start: bool,
    /// Normalize embedding rows before the final k-means inside GFSC
    #[arg(long)]
    normalize_rows: bool,
}

impl ParamArgs {
    fn hyperparams(&self, manifest_k: Option<usize>) -> Result<Hyperparams> {
        let k = self
            .k
            .or(manifest_k)
            .ok_or_else(|| Error::Input("--k is required when no manifest provides it".into()))?;
        let params = Hyperparams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            k,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
        };
        params.validate()?;
        Ok(params)
    }

    fn config(&self, name: &str, method: Method, params: Hyperparams) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(name, method, params);
        config.repetitions = self.reps;
        config.workers = self.workers;
        config.warm_start = self.warm_start;
        config.normalize_rows = self.normalize_rows;
        config
    }
}

#[derive(Args)]
struct RunArgs {
    /// Dataset manifest (TOML)
    #[arg(long)]
    manifest: PathBuf,
    /// gfsc | gf | sc-view:V | sc-ave | kmeans-concat
    #[arg(long, default_value = "gfsc")]
    method: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Write the machine-readable report (JSON) here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-run trace files (with timing) into this directory
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "gfsc")]
    method: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated alpha values (default: 1e-7..1e7 log grid)
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Comma-separated beta values (default: 1e-7..1e7 log grid)
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Comma-separated gamma values (default: 1e-7..1e7 log grid)
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    /// Write the full grid report (JSON) here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the accuracy surface (CSV) here
    #[arg(long)]
    surface: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Write all reports (JSON array) here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Samples
    #[arg(long, default_value_t = 150)]
    n: usize,
    /// Views
    #[arg(long, default_value_t = 2)]
    views: usize,
    /// Planted clusters
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Additive Gaussian noise level
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the CSV views, labels, and manifest
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(subcommand)]
    format: ConvertCmd,
}

#[derive(Subcommand)]
enum ConvertCmd {
    /// UCI Multiple Features handwritten digits (six mfeat-* files)
    Mfeat {
        /// Directory holding the raw mfeat-* files
        #[arg(long)]
        src: PathBuf,
        /// Output dataset directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(manifest_path: &Path) -> Result<(DatasetManifest, MultiViewDataset)> {
    let manifest = DatasetManifest::from_path(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(std::path::Path::new("."));
    let data = dataset::load_dataset_from(&manifest, base)?;
    Ok((manifest, data))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (manifest, data) = load(&args.manifest)?;
    let method: Method = args.method.parse()?;
    let params = args.params.hyperparams(Some(manifest.expected_k))?;
    let config = args.params.config(&manifest.name, method, params);
    let outcome = run_experiment(&config, &data)?;
    if outcome.report.summary.failed_runs == outcome.report.runs.len() {
        let first = outcome
            .report
            .runs
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_default();
        return Err(Error::Numerics(format!(
            "all {} repetitions failed; first error: {first}",
            outcome.report.runs.len()
        )));
    }
    print!("{}", render_table(std::slice::from_ref(&outcome.report)));
    let s = &outcome.report.summary;
    match method {
        Method::Gfsc | Method::Gf => println!(
            "runs: {} converged, {} failed, mean iterations {:.1}",
            s.converged_runs, s.failed_runs, s.mean_iterations
        ),
        _ => println!(
            "runs: {} ok, {} failed",
            outcome.report.runs.len() - s.failed_runs,
            s.failed_runs
        ),
    }
    if let Some(out) = args.out {
        outcome.report.save(&out)?;
        println!("report written to {}", out.display());
    }
    if let Some(dir) = args.traces {
        gfsc_cli::report::write_traces(&dir, &config.method.to_string(), &outcome.traces)?;
        println!("traces written to {}", dir.display());
    }
    Ok(())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let (manifest, data) = load(&args.manifest)?;
    let method: Method = args.method.parse()?;
    let params = args.params.hyperparams(Some(manifest.expected_k))?;
    let config = args.params.config(&manifest.name, method, params);
    let grid = GridSpec {
        alphas: args.alphas.unwrap_or_else(default_log_grid),
        betas: args.betas.unwrap_or_else(default_log_grid),
        gammas: args.gammas.unwrap_or_else(default_log_grid),
    };
    eprintln!(
        "grid: {} cells x {} repetitions",
        grid.cell_count(),
        config.repetitions
    );
    let report = grid_search(&config, &grid, &data)?;
    let best = report.best_cell();
    println!(
        "best cell: alpha={:.1e} beta={:.1e} gamma={:.1e}",
        best.alpha, best.beta, best.gamma
    );
    print!("{}", render_table(std::slice::from_ref(&best.report)));
    if let Some(out) = &args.out {
        report.save(out)?;
        println!("grid report written to {}", out.display());
    }
    if let Some(surface) = &args.surface {
        std::fs::write(surface, report.surface_csv())?;
        println!("surface written to {}", surface.display());
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let (manifest, data) = load(&args.manifest)?;
    let params = args.params.hyperparams(Some(manifest.expected_k))?;
    let mut methods: Vec<Method> = (0..data.t()).map(Method::ScView).collect();
    methods.extend([
        Method::ScAve,
        Method::KmeansConcat,
        Method::Gf,
        Method::Gfsc,
    ]);

    let mut reports: Vec<Report> = Vec::new();
    for method in methods {
        let config = args.params.config(&manifest.name, method, params.clone());
        let outcome = run_experiment(&config, &data)?;
        reports.push(outcome.report);
    }
    print!("{}", render_table(&reports));
    if let Some(out) = args.out {
        let text = serde_json::to_string_pretty(&reports)
            .map_err(|e| Error::Input(format!("cannot serialize reports: {e}")))?;
        std::fs::write(&out, text)?;
        println!("reports written to {}", out.display());
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let data = generate_synthetic(args.n, args.views, args.k, args.noise, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let mut specs = Vec::new();
    for (v, view) in data.views().iter().enumerate() {
        let name = format!("view{v}.csv");
        // store samples as rows
        dataset::write_csv_matrix(&args.out.join(&name), &view.t().to_owned())?;
        specs.push(ViewSpec {
            path: name,
            orientation: Orientation::SamplesXFeatures,
            header: false,
            name: Some(format!("view{v}")),
        });
    }
    dataset::write_labels(&args.out.join("labels.csv"), data.labels().unwrap())?;
    let manifest = DatasetManifest {
        name: format!("synthetic-n{}-t{}-k{}", args.n, args.views, args.k),
        expected_n: args.n,
        expected_t: args.views,
        expected_k: args.k,
        labels_path: Some("labels.csv".into()),
        views: specs,
    };
    let path = args.out.join("manifest.toml");
    std::fs::write(&path, manifest.to_toml()?)?;
    println!("{}", path.display());
    Ok(())
}

fn real_main(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Grid(args) => cmd_grid(args),
        Cmd::Baseline(args) => cmd_baseline(args),
        Cmd::Synth(args) => cmd_synth(args),
        Cmd::Convert(args) => match args.format {
            ConvertCmd::Mfeat { src, out } => {
                let manifest = gfsc_cli::convert::convert_mfeat(&src, &out)?;
                println!("{}", manifest.display());
                Ok(())
            }
        },
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Numerics(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
