use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nnsparse::gmm::{learn, mixture_l1_distance, sample_mixture, LearnOptions};
use nnsparse::instances::{
    default_set_count, encode_setcover, encode_setcover_raw, gen_planted_setcover, gen_synthetic, PlantedCase,
};
use nnsparse::io;
use nnsparse::{solve, Error, SolverParams, StopRule};

#[derive(Parser, Debug)]
#[command(name = "nnsparse", version, about = "Sparse nonnegative least-ℓ1 solver and Gaussian mixture learner")]
struct Cli {
    /// Summary format on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Human,
    Tsv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stop {
    Theory,
    Residual,
}

impl From<Stop> for StopRule {
    fn from(s: Stop) -> Self {
        match s {
            Stop::Theory => StopRule::Theory,
            Stop::Residual => StopRule::Residual,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file; writes solution.txt and trace.tsv.
    Solve(SolveArgs),
    /// Learn a mixture from a sample file; writes mixture.txt.
    Learn(LearnArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Draw samples from a mixture file; writes samples.txt.
    Sample(SampleArgs),
    /// Print a single number.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Stop::Residual)]
    stop: Stop,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LearnArgs {
    samples: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps1: Option<f64>,
    /// Number of samples whose ordered pairs become candidates.
    #[arg(long, default_value_t = nnsparse::gmm::DEFAULT_CANDIDATE_SAMPLES)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Stop::Theory)]
    stop: Stop,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Planted set cover; writes instance.txt and, for yes, witness.txt.
    Planted {
        #[arg(long)]
        m: usize,
        /// Defaults to ⌈m / ln m⌉.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "yes")]
        case: PlantedCase,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Dense system with a planted sparse witness; writes instance.txt and witness.txt.
    Synthetic {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        eps0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Encode a sets file (one set of 0-based elements per line); writes instance.txt.
    Setcover {
        sets: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    mixture: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum EvalCommand {
    /// `‖Ax/‖x‖₁ − b‖₁` of a solution or witness file on an instance.
    Residual { instance: PathBuf, solution: PathBuf },
    /// Quadrature `∫|f − g|` between two mixture files.
    Mixture {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse { .. }) => 2,
            Failure::Lib(Error::DegenerateTarget | Error::InfeasibleSupport) => 3,
            Failure::Lib(Error::InsufficientSamples { .. }) => 4,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => f.write_str(e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes every file or none: contents go to temporaries first and are
/// renamed only once all of them are on disk.
fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<(), Failure> {
    let io_err = |p: &Path, e: std::io::Error| Failure::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut staged = Vec::new();
    for (name, content) in files {
        let tmp = dir.join(format!(".{name}.partial"));
        if let Err(e) = fs::write(&tmp, content) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(io_err(&tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dst) in &staged {
        fs::rename(tmp, dst).map_err(|e| io_err(dst, e))?;
    }
    Ok(())
}

fn print_summary(format: Format, fields: &[(&str, String)]) {
    match format {
        Format::Human => {
            let parts: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("{}", parts.join(" "));
        }
        Format::Tsv => {
            let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
            println!("{}", keys.join("\t"));
            println!("{}", vals.join("\t"));
        }
    }
}

fn run_solve(a: &SolveArgs, format: Format) -> Result<(), Failure> {
    let raw = io::parse_instance(&read(&a.instance)?)?;
    let system = raw.normalize()?;
    let mut params = SolverParams::new(a.k, a.epsilon)?;
    if let Some(b) = a.budget {
        params = params.with_budget(b)?;
    }
    let report = solve(&system, &params, a.stop.into())?;
    write_all(
        &a.out,
        &[
            ("solution.txt", io::format_solution(&report.solution)),
            ("trace.tsv", io::format_trace(&report.trace)),
        ],
    )?;
    print_summary(
        format,
        &[
            ("residual", report.residual.to_string()),
            ("support", report.solution.support().to_string()),
            ("stop", report.stop_reason.to_string()),
        ],
    );
    Ok(())
}

fn run_learn(a: &LearnArgs, format: Format) -> Result<(), Failure> {
    let samples = io::parse_samples(&read(&a.samples)?)?;
    let opts = LearnOptions {
        eps1: a.eps1,
        n_candidates: a.candidates,
        bound: None,
        seed: a.seed,
        budget: a.budget,
        stop: a.stop.into(),
    };
    let out = learn(&samples, a.k, a.epsilon, &opts)?;
    write_all(&a.out, &[("mixture.txt", io::format_mixture(&out.mixture))])?;
    print_summary(
        format,
        &[
            ("binned_residual", out.report.residual.to_string()),
            ("components", out.mixture.k().to_string()),
        ],
    );
    Ok(())
}

fn parse_sets(text: &str) -> Result<Vec<Vec<usize>>, Failure> {
    let mut sets = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let set = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("invalid element {t:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        sets.push(set);
    }
    Ok(sets)
}

fn run_gen(g: &GenCommand) -> Result<(), Failure> {
    match g {
        GenCommand::Planted { m, n, k, case, seed, out } => {
            let n = n.unwrap_or_else(|| default_set_count(*m));
            let inst = gen_planted_setcover(*m, n, *k, *case, *seed)?;
            let mut files = vec![("instance.txt", io::format_instance(&inst.raw))];
            if let Some(w) = &inst.witness {
                files.push(("witness.txt", io::format_witness(w)));
            }
            write_all(out, &files)?;
            if !inst.regime_ok {
                eprintln!("note: (m, k) lies outside m^(3/4) < k < m/ln^2 m");
            }
            if inst.empty_parts > 0 {
                eprintln!("note: {} planted part(s) are empty", inst.empty_parts);
            }
        }
        GenCommand::Synthetic { m, n, k, eps0, seed, out } => {
            let inst = gen_synthetic(*m, *n, *k, *eps0, *seed)?;
            write_all(
                out,
                &[
                    ("instance.txt", io::format_instance(&inst.raw)),
                    ("witness.txt", io::format_witness(&inst.witness)),
                ],
            )?;
        }
        GenCommand::Setcover { sets, m, out } => {
            let sets = parse_sets(&read(sets)?)?;
            let raw = encode_setcover_raw(&sets, *m)?;
            // Validates the sets before anything is written.
            let system = encode_setcover(&sets, *m)?;
            if !system.dropped_columns().is_empty() {
                eprintln!("note: empty sets dropped: {:?}", system.dropped_columns());
            }
            write_all(out, &[("instance.txt", io::format_instance(&raw))])?;
        }
    }
    Ok(())
}

fn run_sample(a: &SampleArgs) -> Result<(), Failure> {
    let mix = io::parse_mixture(&read(&a.mixture)?)?;
    let samples = sample_mixture(&mix, a.n, a.seed);
    write_all(&a.out, &[("samples.txt", io::format_samples(&samples))])
}

fn run_eval(e: &EvalCommand) -> Result<(), Failure> {
    let value = match e {
        EvalCommand::Residual { instance, solution } => {
            let system = io::parse_instance(&read(instance)?)?.normalize()?;
            let text = read(solution)?;
            // Witness files carry a header line but the same weights.
            let x = if text.trim_start().starts_with("witness") {
                io::parse_witness(&text)?.xstar
            } else {
                io::parse_solution(&text)?
            };
            if let Some((id, _)) = x.iter().find(|&(id, _)| system.column(id).is_none()) {
                return Err(Error::InvalidParameter(format!(
                    "solution uses column {id}, which is not in the normalized system"
                ))
                .into());
            }
            system.residual_of(&x)?
        }
        EvalCommand::Mixture { a, b, resolution } => {
            let f = io::parse_mixture(&read(a)?)?;
            let g = io::parse_mixture(&read(b)?)?;
            mixture_l1_distance(&f, &g, *resolution)?.distance
        }
    };
    println!("{value}");
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("NNSPARSE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Io(format!("NNSPARSE_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.cmd {
        Command::Solve(a) => run_solve(a, cli.format),
        Command::Learn(a) => run_learn(a, cli.format),
        Command::Gen(g) => run_gen(g),
        Command::Sample(a) => run_sample(a),
        Command::Eval(e) => run_eval(e),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
