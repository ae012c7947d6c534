use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tentqmc::experiment::run_experiment;
use tentqmc::formats::{self, BoundRow};
use tentqmc::nets::DigitalNet;
use tentqmc::search::{run_search, SearchConfig, SearchMode};
use tentqmc::sobolev::{bound_b, default_lambda_grid, existence_bound_opt, wce_squared};
use tentqmc::transforms::{default_shift_precision, digital_shift, fold_shifted_net, sample_shift, ShiftVector};
use tentqmc::{BAdicReal, Caps, Error, ErrorKind, KernelParams, PolyLatticeSpec, PolyZb, Result, RngSpec, Weights};

#[derive(Parser)]
#[command(name = "tentqmc", version, about = "Folded polynomial lattice rules for quasi-Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the points of a rule as CSV.
    Gen(GenArgs),
    /// Rank generating vectors by the truncated bound.
    Search(SearchArgs),
    /// Evaluate the truncated bound and the existence bound for given vectors.
    Bound(BoundArgs),
    /// Square worst-case error of a point set read from CSV.
    Wce(WceArgs),
    /// Randomized convergence experiment over a range of m.
    Experiment(ExperimentArgs),
}

/// A rule given by a spec file or by flags.
#[derive(Args)]
struct RuleArgs {
    /// Spec file with `b=`, `m=`, `n=`, `p=`, `q1=`... lines.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    /// Modulus degree.
    #[arg(long)]
    n: Option<usize>,
    /// Modulus coefficients, ascending, comma separated. Defaults to the
    /// first irreducible polynomial of degree n.
    #[arg(long)]
    p: Option<String>,
}

impl RuleArgs {
    fn skeleton(&self) -> Result<(u32, usize, usize, PolyZb)> {
        if let Some(path) = &self.spec {
            if self.base.is_some() || self.m.is_some() || self.n.is_some() || self.p.is_some() {
                return Err(Error::invalid("--spec cannot be combined with --base/--m/--n/--p"));
            }
            let spec = formats::parse_spec(&read(path)?)?;
            return Ok((spec.base(), spec.m(), spec.n(), spec.modulus().clone()));
        }
        let base = self.base.unwrap_or(2);
        let m = self.m.ok_or_else(|| Error::invalid("--m is required without --spec"))?;
        let n = self.n.unwrap_or(m);
        let p = match &self.p {
            Some(p) => PolyZb::parse(base, p)?,
            None => PolyZb::first_irreducible(base, n)?,
        };
        Ok((base, m, n, p))
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Generating vector as `q1;q2;...`, each a coefficient list.
    #[arg(long)]
    q: Option<String>,
    /// Generating matrices file instead of a polynomial lattice rule.
    #[arg(long, conflicts_with_all = ["spec", "q"])]
    net: Option<PathBuf>,
    /// Apply a random digital shift drawn from this seed.
    #[arg(long)]
    shift: Option<u64>,
    /// Shift precision in digits; defaults to n + alpha + 2.
    #[arg(long)]
    shift_precision: Option<usize>,
    /// Smoothness used for the default shift precision.
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Apply the tent transformation.
    #[arg(long)]
    fold: bool,
    /// Print base-b digit strings `d1d2...(t)` instead of decimals.
    #[arg(long)]
    digits: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
    Greedy,
}

#[derive(Args)]
struct MeritArgs {
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Weights file; defaults to product weights all equal to 1.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Digits per coordinate in the bound; defaults to n + alpha + 2.
    #[arg(long)]
    truncation: Option<u32>,
    /// Walsh constant; defaults to the calibrated value.
    #[arg(long)]
    cwalsh: Option<f64>,
}

impl MeritArgs {
    fn params(&self, base: u32) -> Result<KernelParams> {
        match self.cwalsh {
            Some(c) => KernelParams::new(self.alpha, base, c),
            None => KernelParams::calibrated(self.alpha, base),
        }
    }

    fn weights(&self, dim: usize) -> Result<Weights> {
        let w = match &self.weights {
            Some(path) => formats::parse_weights(&read(path)?)?,
            None => Weights::product(vec![1.0; dim])?,
        };
        if w.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: w.dim() });
        }
        Ok(w)
    }

    fn truncation(&self, n: usize) -> u32 {
        self.truncation.unwrap_or((n + self.alpha as usize + 2) as u32)
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Dimension.
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    merit: MeritArgs,
    #[arg(long, value_enum, default_value_t = Mode::Random)]
    mode: Mode,
    /// Random-mode draws.
    #[arg(long, default_value_t = 32)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fill the `seconds` column (makes output run dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Generating vector `q1;q2;...`; repeat to compare several. Taken from
    /// the --spec file when omitted.
    #[arg(long)]
    q: Vec<String>,
    #[command(flatten)]
    merit: MeritArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WceArgs {
    /// CSV file, one point per row.
    #[arg(long)]
    points: PathBuf,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Plan file of `key=value` lines.
    #[arg(long)]
    plan: PathBuf,
    /// Use n = alpha m.
    #[arg(long)]
    classic: bool,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen(a: &GenArgs, caps: &Caps) -> Result<()> {
    let gen = match &a.net {
        Some(path) => formats::parse_net(&read(path)?)?,
        None => {
            let (base, m, n, p) = a.rule.skeleton()?;
            let q = match (&a.q, &a.rule.spec) {
                (Some(q), _) => formats::parse_poly_list(base, q)?,
                (None, Some(path)) => formats::parse_spec(&read(path)?)?.q().to_vec(),
                (None, None) => return Err(Error::invalid("--q is required without --spec")),
            };
            PolyLatticeSpec::new(base, m, n, p, q)?.matrices()
        }
    };
    let net = DigitalNet::from_matrices(gen, caps)?;
    let precision = a
        .shift_precision
        .unwrap_or_else(|| default_shift_precision(net.precision(), a.alpha));
    let sigma = match a.shift {
        Some(seed) => sample_shift(&RngSpec::new(seed, 0), net.dim(), net.base(), precision)?,
        None => ShiftVector::zero(net.base(), net.dim(), net.precision())?,
    };
    let points: Vec<Vec<BAdicReal>> = if a.fold {
        fold_shifted_net(&net, &sigma)?
    } else if a.shift.is_some() {
        digital_shift(&net.points(), &sigma)?
    } else {
        net.points()
    };
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| if a.digits { x.to_string() } else { formats::format_float(x.to_f64()) })
                .collect()
        })
        .collect();
    emit(a.out.as_deref(), &formats::points_csv(&rows)?)
}

fn search(a: &SearchArgs, caps: &Caps) -> Result<()> {
    let (base, m, n, modulus) = a.rule.skeleton()?;
    let cfg = SearchConfig {
        base,
        m,
        n,
        modulus,
        dim: a.s,
        params: a.merit.params(base)?,
        weights: a.merit.weights(a.s)?,
        truncation: a.merit.truncation(n),
        caps: *caps,
    };
    let mode = match a.mode {
        Mode::Exhaustive => SearchMode::Exhaustive,
        Mode::Random => SearchMode::Random { k: a.k, rng: RngSpec::new(a.seed, 0) },
        Mode::Greedy => SearchMode::Greedy,
    };
    let start = Instant::now();
    let ranked = run_search(&cfg, &mode)?;
    let seconds = a.timing.then(|| start.elapsed().as_secs_f64());
    emit(a.out.as_deref(), &formats::search_csv(&ranked, seconds)?)
}

fn bound(a: &BoundArgs, caps: &Caps) -> Result<()> {
    let (base, m, n, p) = a.rule.skeleton()?;
    let qs: Vec<Vec<PolyZb>> = if a.q.is_empty() {
        let path = a.rule.spec.as_ref().ok_or_else(|| Error::invalid("--q is required without --spec"))?;
        vec![formats::parse_spec(&read(path)?)?.q().to_vec()]
    } else {
        a.q.iter().map(|q| formats::parse_poly_list(base, q)).collect::<Result<_>>()?
    };
    let params = a.merit.params(base)?;
    let t = a.merit.truncation(n);
    let mut rows = Vec::with_capacity(qs.len());
    for q in qs {
        let spec = PolyLatticeSpec::new(base, m, n, p.clone(), q)?;
        let weights = a.merit.weights(spec.dim())?;
        let merit = bound_b(&spec.matrices(), &params, &weights, t, caps)?;
        let existence = if params.alpha >= 2 {
            let grid = default_lambda_grid(params.alpha, 64);
            Some(existence_bound_opt(params.alpha, base, &grid, &weights, params.c_walsh, m as u32, n as u32)?)
        } else {
            None
        };
        rows.push(BoundRow {
            q: spec.q().to_vec(),
            p: p.clone(),
            truncation: t,
            c_walsh: params.c_walsh,
            bound_value: merit.value,
            existence_bound: existence.map(|e| e.0),
            lambda_opt: existence.map(|e| e.1),
        });
    }
    rows.sort_by(|x, y| x.bound_value.total_cmp(&y.bound_value));
    emit(a.out.as_deref(), &formats::bound_csv(&rows)?)
}

fn wce(a: &WceArgs) -> Result<()> {
    let points = formats::parse_points_csv(&read(&a.points)?)?;
    let dim = points[0].len();
    let weights = match &a.weights {
        Some(path) => formats::parse_weights(&read(path)?)?,
        None => Weights::product(vec![1.0; dim])?,
    };
    // The Walsh constant does not enter the kernel.
    let params = KernelParams::new(a.alpha, 2, 1.0)?;
    let v = wce_squared(&points, &params, &weights)?;
    emit(None, &format!("{}\n", formats::format_float(v)))
}

fn experiment(a: &ExperimentArgs, caps: &Caps) -> Result<()> {
    let mut plan = formats::parse_plan(&read(&a.plan)?)?;
    plan.classic |= a.classic;
    if let Some(r) = a.replicates {
        plan.replicates = r;
    }
    if let Some(s) = a.seed {
        plan.rng.seed = s;
    }
    plan.validate()?;
    let start = Instant::now();
    let rows = run_experiment(&plan, caps, |row| {
        eprintln!(
            "[{:.1}s] m={} n={} rmse={}{}",
            start.elapsed().as_secs_f64(),
            row.m,
            row.n,
            formats::format_float(row.rmse),
            if row.clamped { " (negative mean clamped to 0)" } else { "" }
        );
    })?;
    emit(a.out.as_deref(), &formats::experiment_csv(&rows)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps::from_env();
    let result = match &cli.cmd {
        Command::Gen(a) => gen(a, &caps),
        Command::Search(a) => search(a, &caps),
        Command::Bound(a) => bound(a, &caps),
        Command::Wce(a) => wce(a),
        Command::Experiment(a) => experiment(a, &caps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Capacity => 3,
                ErrorKind::Io => 4,
            })
        }
    }
}
