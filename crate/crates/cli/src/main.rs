//! `essspec`: spectral experiments on finite compressions of band-limited
//! operators.
//!
//! Exit codes: 0 on success, 1 when a checked criterion is violated, 2 on
//! usage or configuration errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use essential_spectrum::compression::{
    commutator_hs_norm, compress, degree_estimate, dfnorm_bound, DEFAULT_DEGREE_WINDOW, DEFAULT_RANK_TOL,
};
use essential_spectrum::config::{BuiltOperator, OperatorConfig};
use essential_spectrum::operator::{appendix_permutation, permutation_operator};
use essential_spectrum::report::{classification_table, fmt_f64, write_csv, write_json, ReportHeader, Table};
use essential_spectrum::spectral::{
    classify, counting, default_eps, default_pitch, density, integrate, spectrum_estimate, szego_reference,
    DEFAULT_SCHEDULE,
};
use essential_spectrum::{EigLadder, Error, Filtration, IndexMode, Thresholds};

#[derive(Parser)]
#[command(name = "essspec", version, about = "Spectra and essential spectra from finite compressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue averages against the symbol's pushforward average.
    Szego {
        #[command(flatten)]
        common: Common,
        /// Largest accepted gap at the last ladder step.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// Essential spectrum estimate from a grid sweep.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
    },
    /// Labels for user-supplied points.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
        /// Comma-separated points to classify.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        points: Vec<f64>,
    },
    /// Eigenvalues of one compression over a sweep of rotation angles.
    Butterfly {
        #[command(flatten)]
        common: Common,
        /// Compression index.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// `start:stop:steps`, `steps` evenly spaced angles including both ends.
        #[arg(long, value_parser = parse_theta_grid, allow_hyphen_values = true)]
        theta_grid: ThetaGrid,
    },
    /// Density of the zero eigenvalue for the permutation example.
    Appendix {
        #[command(flatten)]
        common: Common,
        /// Window radius around 0.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Degree, diagonal norm bound and commutator Hilbert-Schmidt norms.
    Degree {
        #[command(flatten)]
        common: Common,
        /// Window for the degree supremum.
        #[arg(long, default_value_t = DEFAULT_DEGREE_WINDOW)]
        n_max: usize,
        /// Relative threshold for numerical rank.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Operator config file (TOML).
    #[arg(long = "op")]
    op: Option<PathBuf>,
    /// Comma-separated, strictly increasing compression indices.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SCHEDULE.to_vec())]
    schedule: Vec<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for ladder steps and angle sweeps.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct Window {
    /// Window radius; 5% of the spectral diameter when absent.
    #[arg(long)]
    eps: Option<f64>,
    /// Grid pitch; half the window radius when absent.
    #[arg(long)]
    grid_pitch: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
struct ThetaGrid {
    start: f64,
    stop: f64,
    steps: usize,
}

impl ThetaGrid {
    fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            s => (0..s).map(|j| self.start + (self.stop - self.start) * j as f64 / (s - 1) as f64).collect(),
        }
    }
}

fn parse_theta_grid(s: &str) -> Result<ThetaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(format!("expected start:stop:steps, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number `{x}`"));
    let steps = steps.trim().parse::<usize>().map_err(|_| format!("bad step count `{steps}`"))?;
    Ok(ThetaGrid { start: num(start)?, stop: num(stop)?, steps })
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Convergence { .. }) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn load(common: &Common) -> Result<(OperatorConfig, BuiltOperator), Failure> {
    let path = common.op.as_ref().ok_or_else(|| usage("this command needs --op <config>"))?;
    let cfg = OperatorConfig::from_path(path)?;
    let op = cfg.build()?;
    Ok((cfg, op))
}

fn emit<T: serde::Serialize>(common: &Common, header: &ReportHeader, table: &Table, data: &T) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match &common.out {
        Some(path) => {
            Box::new(File::create(path).map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match common.format {
        Format::Csv => write_csv(&mut sink, header, table)?,
        Format::Json => write_json(&mut sink, header, data)?,
    }
    sink.flush().map_err(|e| usage(format!("cannot write output: {e}")))
}

fn base_header(command: &str, cfg: Option<OperatorConfig>, common: &Common) -> ReportHeader {
    ReportHeader::new(command, cfg).param("schedule", &common.schedule)
}

fn cmd_szego(common: &Common, tol: f64) -> Result<bool, Failure> {
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let (cfg, op) = load(common)?;
    let sym = op.symbol().ok_or_else(|| usage("szego needs a symbol-based (kind = \"laurent\") config"))?.clone();
    let ladder = EigLadder::for_operator(op.as_operator(), &common.schedule)?;
    let tests: [(&str, fn(f64) -> f64); 5] =
        [("1", |_| 1.0), ("x", |x| x), ("x^2", |x| x * x), ("x^3", |x| x * x * x), ("|x|", f64::abs)];
    let mut table = Table::new(["n", "dim", "u", "integral", "reference", "gap"]);
    let mut ok = true;
    let last = ladder.steps().len() - 1;
    for (name, u) in tests {
        let reference = szego_reference(&sym, u);
        for (i, mu) in ladder.measures().iter().enumerate() {
            let value = integrate(mu, u);
            let gap = (value - reference).abs();
            if i == last && gap > tol {
                ok = false;
            }
            let step = &ladder.steps()[i];
            table.push(vec![
                step.n.to_string(),
                step.dim.to_string(),
                name.to_string(),
                fmt_f64(value),
                fmt_f64(reference),
                fmt_f64(gap),
            ]);
        }
    }
    let header = base_header("szego", Some(cfg), common).param("tol", tol);
    emit(common, &header, &table, &table)?;
    Ok(ok)
}

fn window(ladder: &EigLadder, w: &Window) -> Result<(f64, f64), Failure> {
    let eps = w.eps.unwrap_or_else(|| default_eps(ladder));
    let h = w.grid_pitch.unwrap_or_else(|| default_pitch(eps));
    if !(eps > 0.0) || !(h > 0.0) {
        return Err(usage("--eps and --grid-pitch must be positive"));
    }
    Ok((eps, h))
}

fn cmd_spectrum(common: &Common, w: &Window) -> Result<bool, Failure> {
    let (cfg, op) = load(common)?;
    let ladder = EigLadder::for_operator(op.as_operator(), &common.schedule)?;
    let (eps, h) = window(&ladder, w)?;
    let est = spectrum_estimate(&ladder, h, eps)?;
    let header = base_header("spectrum", Some(cfg), common)
        .param("eps", eps)
        .param("grid_pitch", h)
        .param("intervals", &est.intervals);
    for (lo, hi) in &est.intervals {
        eprintln!("[{lo:.6}, {hi:.6}]");
    }
    emit(common, &header, &classification_table(&est.report), &est)?;
    Ok(true)
}

fn cmd_classify(common: &Common, w: &Window, points: &[f64]) -> Result<bool, Failure> {
    let (cfg, op) = load(common)?;
    let ladder = EigLadder::for_operator(op.as_operator(), &common.schedule)?;
    let (eps, _) = window(&ladder, w)?;
    let report = classify(&ladder, points, eps, &Thresholds::default())?;
    let header = base_header("classify", Some(cfg), common).param("eps", eps);
    emit(common, &header, &classification_table(&report), &report)?;
    Ok(true)
}

fn cmd_butterfly(common: &Common, n: usize, grid: &ThetaGrid) -> Result<bool, Failure> {
    let path = common.op.as_ref().ok_or_else(|| usage("butterfly needs --op <config>"))?;
    let cfg = OperatorConfig::from_path(path)?;
    if cfg.kind != Some(essential_spectrum::config::OperatorKind::AlmostMathieu) {
        return Err(usage("butterfly needs kind = \"almost_mathieu\""));
    }
    let thetas = grid.points();
    if thetas.is_empty() {
        return Err(usage("empty --theta-grid"));
    }
    let filt = Filtration::bilateral();
    let rows = thetas
        .par_iter()
        .map(|&theta| {
            let mut c = cfg.clone();
            c.theta = Some(theta);
            c.sigma = None;
            let op = c.build()?;
            let eigs = compress(op.as_operator(), &filt, n)?.eigenvalues()?;
            let mut row = vec![fmt_f64(theta)];
            row.extend(eigs.values().iter().map(|&x| fmt_f64(x)));
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let dim = filt.dim(n);
    let mut table = Table::new(std::iter::once("theta".to_string()).chain((1..=dim).map(|i| format!("lambda_{i}"))));
    for row in rows {
        table.push(row);
    }
    let header = ReportHeader::new("butterfly", Some(cfg))
        .param("n", n)
        .param("theta_grid", format!("{}:{}:{}", grid.start, grid.stop, grid.steps));
    emit(common, &header, &table, &table)?;
    Ok(true)
}

fn cmd_appendix(common: &Common, eps: f64) -> Result<bool, Failure> {
    if !(eps > 0.0) {
        return Err(usage("--eps must be positive"));
    }
    let max_n = *common.schedule.iter().max().ok_or_else(|| usage("empty --schedule"))?;
    let (cfg, op) = match &common.op {
        Some(_) => {
            let (cfg, op) = load(common)?;
            (Some(cfg), op)
        }
        None => (None, BuiltOperator::Permutation(permutation_operator(appendix_permutation(max_n.max(16))?))),
    };
    let BuiltOperator::Permutation(perm_op) = &op else {
        return Err(usage("appendix needs kind = \"permutation\""));
    };
    let ladder = EigLadder::for_operator(perm_op, &common.schedule)?;
    let mut table = Table::new(["n", "dim", "count", "zero_columns", "density", "reference"]);
    let mut ok = true;
    for step in ladder.steps() {
        let count = counting(&step.eigs, -eps, eps)?;
        let zero_columns = perm_op.permutation().escape_count(step.n);
        let d = density(&step.eigs, -eps, eps)?;
        let reference = 0.25 * (1.0 - (step.n as f64).powf(-0.5));
        ok &= count == zero_columns && d >= reference;
        table.push(vec![
            step.n.to_string(),
            step.dim.to_string(),
            count.to_string(),
            zero_columns.to_string(),
            fmt_f64(d),
            fmt_f64(reference),
        ]);
    }
    let header = base_header("appendix", cfg, common).param("eps", eps);
    emit(common, &header, &table, &table)?;
    Ok(ok)
}

fn cmd_degree(common: &Common, n_max: usize, tol: f64) -> Result<bool, Failure> {
    let (cfg, op) = load(common)?;
    let spec = op.spec().ok_or_else(|| usage("degree needs a band-limited operator"))?;
    let filt = Filtration::new(spec.mode());
    let mut table = Table::new(["quantity", "k", "n", "value"]);
    let blank = String::new;
    for (k, sup) in spec.diag_sups().into_iter().filter(|&(k, _)| spec.has_diagonal(k)) {
        let deg = degree_estimate(&spec.single_diagonal(k)?, &filt, n_max, tol)?;
        table.push(vec!["diagonal_sup".into(), k.to_string(), blank(), fmt_f64(sup)]);
        table.push(vec!["diagonal_degree".into(), k.to_string(), blank(), deg.to_string()]);
    }
    table.push(vec!["degree".into(), blank(), blank(), degree_estimate(spec, &filt, n_max, tol)?.to_string()]);
    let bound = match spec.mode() {
        IndexMode::Bilateral => Some(dfnorm_bound(spec)?),
        IndexMode::Unilateral => None,
    };
    if let Some(b) = bound {
        table.push(vec!["dfnorm_bound".into(), blank(), blank(), fmt_f64(b)]);
    }
    let norms =
        common.schedule.par_iter().map(|&n| commutator_hs_norm(spec, &filt, n)).collect::<Result<Vec<_>, Error>>()?;
    let mut ok = true;
    for (&n, hs) in common.schedule.iter().zip(norms) {
        ok &= bound.is_none_or(|b| hs <= b);
        table.push(vec!["commutator_hs".into(), blank(), n.to_string(), fmt_f64(hs)]);
    }
    let header = base_header("degree", Some(cfg), common).param("n_max", n_max).param("rank_tol", tol);
    emit(common, &header, &table, &table)?;
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let common = match &cli.command {
        Command::Szego { common, .. }
        | Command::Spectrum { common, .. }
        | Command::Classify { common, .. }
        | Command::Butterfly { common, .. }
        | Command::Appendix { common, .. }
        | Command::Degree { common, .. } => common,
    };
    if common.schedule.is_empty() || common.schedule.windows(2).any(|w| w[0] >= w[1]) || common.schedule[0] == 0 {
        return Err(usage("--schedule must be a strictly increasing list of positive integers"));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| usage(format!("cannot start workers: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Szego { common, tol } => cmd_szego(common, *tol),
        Command::Spectrum { common, window } => cmd_spectrum(common, window),
        Command::Classify { common, window, points } => cmd_classify(common, window, points),
        Command::Butterfly { common, n, theta_grid } => cmd_butterfly(common, *n, theta_grid),
        Command::Appendix { common, eps } => cmd_appendix(common, *eps),
        Command::Degree { common, n_max, tol } => cmd_degree(common, *n_max, *tol),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("essspec: criteria violated");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("essspec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
