mod config;
mod output;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cmixing::bounds::{
    algebraic_bound_1d, algebraic_bound_parts, build_blocking, geometric_bound_1d,
    geometric_bound_parts, hang_steinwart_bound, block_gap_algebraic, block_gap_geometric,
    BoundReport, ClassBounds,
};
use cmixing::empirical::{
    check_conditions_cor7, check_conditions_prop6, cor7_bound, prop6_bound, ChainParams,
    EntropySpec,
};
use cmixing::harness::{
    bound_comparison, rate_experiment, tail_probability_detailed, BoundComparisonConfig,
};
use cmixing::io::{read_csv, write_dataset_csv, write_meta, write_series_csv, SeriesMeta};
use cmixing::processes::{
    make_modal_dataset, make_regression_dataset, simulate_lattice_field, simulate_markov_chain,
    Dataset, MixingSpec, SampleGrid, Series, SkewedLaw, TransitionMatrix, Truth,
};
use cmixing::smoothers::{
    kde, modal_regression, nw_mean, two_step_variance, EstimateGrid, KernelId, KernelSpec,
};
use config::{parse_bandwidth, parse_process, parse_regression_fn};
use serde::Serialize;
use std::hash::{BuildHasher, Hasher, RandomState};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "cmix",
    version,
    about = "Tail bounds for C-mixing processes, kernel smoothers, and their Monte Carlo validation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a process (optionally with a regression or modal layer) to CSV
    Simulate(SimulateArgs),
    /// Evaluate a tail bound; one JSON object per deviation level
    Bound(BoundArgs),
    /// Build the blocking partition and emit block membership
    Blocks(BlocksArgs),
    /// Evaluate the chaining side conditions (C1-C4 or D1-D4)
    Conditions(ConditionsArgs),
    /// Run a kernel estimator over a CSV dataset
    Estimate(EstimateArgs),
    /// Run the tail experiments of a config file
    VerifyTail(VerifyArgs),
    /// Run the rate experiments of a config file
    VerifyRate(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Jsonl,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Simulate(args) => simulate(args),
        Cmd::Bound(args) => bound(args),
        Cmd::Blocks(args) => blocks(args),
        Cmd::Conditions(args) => conditions(args),
        Cmd::Estimate(args) => estimate(args),
        Cmd::VerifyTail(args) => verify_tail(args),
        Cmd::VerifyRate(args) => verify_rate(args),
    }
}

/// Default seed: the CMIX_SEED environment variable if set, otherwise
/// drawn from entropy. Either way the resolved value is echoed in the
/// output metadata.
fn resolve_seed(seed: Option<u64>) -> Result<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    if let Ok(v) = std::env::var("CMIX_SEED") {
        return v
            .parse()
            .with_context(|| format!("CMIX_SEED=`{v}` is not a valid seed"));
    }
    Ok(RandomState::new().build_hasher().finish())
}

// ---------------------------------------------------------------- simulate

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// doubling | logistic[:burn_in] | rademacher | sticky:<states>,<rho> |
    /// markov | lattice
    #[arg(long)]
    process: String,
    /// Sample size (non-lattice processes)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Row-stochastic matrix, rows separated by `;`: "0.9,0.1;0.1,0.9"
    #[arg(long)]
    transition: Option<String>,
    /// Real state labels, comma-separated
    #[arg(long)]
    labels: Option<String>,
    /// Lattice: total index dimension d
    #[arg(long)]
    d: Option<usize>,
    /// Lattice: effective dimension d'
    #[arg(long)]
    d_eff: Option<usize>,
    /// Lattice: fixed count on non-diverging directions
    #[arg(long, default_value_t = 1)]
    n0: usize,
    /// Lattice: diverging counts, comma-separated
    #[arg(long)]
    n_k: Option<String>,
    /// Lattice: moving-average window range R
    #[arg(long)]
    range: Option<usize>,
    /// Regression layer: mean function (const:<c> | sin2pi | sin-het | ...)
    #[arg(long)]
    mean_fn: Option<String>,
    /// Regression layer: noise scale function
    #[arg(long)]
    sigma_fn: Option<String>,
    /// Regression layer: bound L with |Y| <= L
    #[arg(long)]
    y_bound: Option<f64>,
    /// Modal layer: dominant bump center function
    #[arg(long)]
    mode_center: Option<String>,
    #[arg(long)]
    mode_offset: Option<f64>,
    #[arg(long)]
    mode_weight: Option<f64>,
    #[arg(long)]
    mode_width: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().context("matrix entry"))
                .collect()
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| v.trim().parse::<f64>().context("numeric list")).collect()
}

fn parse_usizes(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|v| v.trim().parse::<usize>().context("integer list")).collect()
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let series: Series = match args.process.as_str() {
        "markov" => {
            let rows = parse_matrix(args.transition.as_deref().context("--transition required")?)?;
            let labels = parse_floats(args.labels.as_deref().context("--labels required")?)?;
            let chain = TransitionMatrix::new(rows)?;
            simulate_markov_chain(&chain, &labels, args.n.context("--n required")?, seed)?
        }
        "lattice" => {
            let n_k = parse_usizes(args.n_k.as_deref().context("--n-k required")?)?;
            let d_eff = args.d_eff.unwrap_or(n_k.len());
            let d = args.d.unwrap_or(d_eff);
            let grid = SampleGrid::new(d, d_eff, args.n0, n_k)?;
            simulate_lattice_field(&grid, args.range.context("--range required")?, seed)?
        }
        other => parse_process(other)?.simulate(args.n.context("--n required")?, seed)?,
    };

    enum Layer {
        None,
        Regression,
        Modal,
    }
    let layer = if args.mean_fn.is_some() {
        Layer::Regression
    } else if args.mode_center.is_some() {
        Layer::Modal
    } else {
        Layer::None
    };

    let mut body = Vec::new();
    let meta = match layer {
        Layer::None => {
            match args.format {
                Format::Csv => write_series_csv(&mut body, &series)?,
                Format::Jsonl => {
                    for (i, v) in series.values.iter().enumerate() {
                        body.extend_from_slice(
                            format!("{}\n", serde_json::json!({"index": i, "x": v})).as_bytes(),
                        );
                    }
                }
            }
            SeriesMeta {
                generator: series.generator.clone(),
                seed,
                grid: series.grid.clone(),
                truth: Some(Truth {
                    density: series.generator.marginal_density(),
                    ..Truth::default()
                }),
                y_bound: None,
            }
        }
        Layer::Regression => {
            let mean = parse_regression_fn(args.mean_fn.as_deref().unwrap())?;
            let sigma = parse_regression_fn(args.sigma_fn.as_deref().context("--sigma-fn required")?)?;
            let l = args.y_bound.context("--y-bound required")?;
            let data = make_regression_dataset(&series, mean, sigma, l, seed ^ 0x5eed)?;
            write_dataset(&mut body, &data, args.format)?;
            dataset_meta(&series, &data, seed)
        }
        Layer::Modal => {
            let law = SkewedLaw {
                center: parse_regression_fn(args.mode_center.as_deref().unwrap())?,
                offset: args.mode_offset.context("--mode-offset required")?,
                weight: args.mode_weight.context("--mode-weight required")?,
                width: args.mode_width.context("--mode-width required")?,
            };
            let data = make_modal_dataset(&series, &law, seed ^ 0x5eed)?;
            write_dataset(&mut body, &data, args.format)?;
            dataset_meta(&series, &data, seed)
        }
    };
    output::write_atomic(&args.out, &body)?;
    let mut meta_bytes = Vec::new();
    write_meta(&mut meta_bytes, &meta)?;
    output::write_atomic(&output::meta_path(&args.out), &meta_bytes)?;
    Ok(())
}

fn write_dataset(body: &mut Vec<u8>, data: &Dataset, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_dataset_csv(body, data)?,
        Format::Jsonl => {
            for i in 0..data.len() {
                body.extend_from_slice(
                    format!(
                        "{}\n",
                        serde_json::json!({"index": i, "x": data.point(i), "y": data.y[i]})
                    )
                    .as_bytes(),
                );
            }
        }
    }
    Ok(())
}

fn dataset_meta(series: &Series, data: &Dataset, seed: u64) -> SeriesMeta {
    SeriesMeta {
        generator: series.generator.clone(),
        seed,
        grid: series.grid.clone(),
        truth: data.truth.clone(),
        y_bound: data.y_bound,
    }
}

// ------------------------------------------------------------------- bound

#[derive(Args, Serialize)]
struct BoundArgs {
    /// geometric | geometric-1d | algebraic | algebraic-1d |
    /// hang-steinwart | prop6 | cor7
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: f64,
    /// Deviation levels, comma-separated
    #[arg(long)]
    t: String,
    /// Sup-norm envelope A
    #[arg(long)]
    a: f64,
    /// Semi-norm envelope B
    #[arg(long, default_value_t = 0.0)]
    semi_b: f64,
    #[arg(long)]
    sigma2: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma_f2: f64,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Decay rate constant b of C(r)
    #[arg(long)]
    mix_b: f64,
    #[arg(long)]
    gamma: f64,
    /// Decay base nu (geometric family), default e
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 1)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    d_eff: u32,
    /// Truncation level L_N (prop6/cor7)
    #[arg(long)]
    l_n: Option<f64>,
    /// Covering constant c (prop6/cor7)
    #[arg(long, default_value_t = 1.0)]
    cov_c: f64,
    /// Bandwidth h of the covering model (prop6/cor7)
    #[arg(long)]
    h: Option<f64>,
    /// Input dimension D of the covering model (prop6/cor7)
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
}

fn bound(args: BoundArgs) -> Result<()> {
    let ts = parse_floats(&args.t)?;
    let cb = ClassBounds::new(args.a, args.semi_b, args.sigma2)?
        .with_class_variance(args.sigma_f2)?;
    let nu = args.nu.unwrap_or(std::f64::consts::E);
    let mut lines = Vec::new();
    lines.push(serde_json::to_string(&serde_json::json!({"config": &args}))?);
    let mut csv = String::from("family,n,t,raw,bound,n0,n_ge_n0\n");
    for &t in &ts {
        let report: BoundReport = match args.family.as_str() {
            "geometric" => {
                let spec = MixingSpec::geometric(nu, args.mix_b, args.gamma)?;
                geometric_bound_parts(
                    args.n,
                    t,
                    &spec,
                    &cb,
                    args.omega.context("--omega required")?,
                    args.m,
                    args.d_eff,
                )?
            }
            "geometric-1d" => geometric_bound_1d(
                args.n,
                t,
                args.mix_b,
                args.gamma,
                &cb,
                args.omega.context("--omega required")?,
            )?,
            "algebraic" => {
                let spec = MixingSpec::algebraic(args.mix_b, args.gamma)?;
                algebraic_bound_parts(
                    args.n,
                    t,
                    &spec,
                    &cb,
                    args.alpha.context("--alpha required")?,
                    args.m,
                    args.d_eff,
                )?
            }
            "algebraic-1d" => algebraic_bound_1d(args.n, t, args.mix_b, args.gamma, &cb)?,
            "hang-steinwart" => hang_steinwart_bound(args.n, t, args.mix_b, args.gamma, &cb)?,
            "prop6" | "cor7" => {
                let params = ChainParams::new(
                    args.n,
                    t,
                    args.l_n.unwrap_or(1.0),
                    cb,
                    args.omega.context("--omega required")?,
                    args.mix_b,
                    args.gamma,
                )?;
                let spec =
                    EntropySpec::new(args.cov_c, args.h.context("--h required")?, args.dim)?;
                if args.family == "prop6" {
                    prop6_bound(&params, &spec)?
                } else {
                    cor7_bound(&params, &spec)?
                }
            }
            other => bail!("unknown bound family `{other}`"),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            args.family, args.n, t, report.raw, report.bound, report.n0, report.n_ge_n0
        ));
        lines.push(serde_json::to_string(&report)?);
    }
    let body = match args.format {
        Format::Jsonl => format!("{}\n", lines.join("\n")).into_bytes(),
        Format::Csv => csv.into_bytes(),
    };
    output::emit(args.out.as_deref(), &body)
}

// ------------------------------------------------------------------ blocks

#[derive(Args, Serialize)]
struct BlocksArgs {
    /// Diverging counts n_k, comma-separated
    #[arg(long)]
    n_k: String,
    /// Block gap P; omit to derive it from a mixing law
    #[arg(long)]
    gap: Option<usize>,
    /// Derive the gap: geometric | algebraic
    #[arg(long)]
    auto: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    mix_b: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn blocks(args: BlocksArgs) -> Result<()> {
    let n_k = parse_usizes(&args.n_k)?;
    let d_eff = n_k.len();
    let grid = SampleGrid::new(d_eff, d_eff, 1, n_k)?;
    let gap = match (args.gap, args.auto.as_deref()) {
        (Some(p), None) => p,
        (None, Some("geometric")) => {
            let spec = MixingSpec::geometric(
                args.nu.unwrap_or(std::f64::consts::E),
                args.mix_b.context("--mix-b required")?,
                args.gamma.context("--gamma required")?,
            )?;
            block_gap_geometric(
                grid.n_hat() as f64,
                &spec,
                args.omega.context("--omega required")?,
            )?
        }
        (None, Some("algebraic")) => {
            let spec = MixingSpec::algebraic(
                args.mix_b.context("--mix-b required")?,
                args.gamma.context("--gamma required")?,
            )?;
            block_gap_algebraic(
                grid.n_hat() as f64,
                &spec,
                args.alpha.context("--alpha required")?,
                d_eff,
            )?
        }
        _ => bail!("give exactly one of --gap or --auto"),
    };
    let blocking = build_blocking(&grid, gap)?;
    let mut body = String::new();
    match args.format {
        Format::Csv => {
            let coord_headers: Vec<String> = (1..=d_eff).map(|k| format!("i_{k}")).collect();
            body.push_str(&format!("block_id,scalar_index,{}\n", coord_headers.join(",")));
            for (bid, block) in blocking.blocks.iter().enumerate() {
                for &s in block {
                    let coords = blocking.lattice_of_scalar(s);
                    let coords: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                    body.push_str(&format!("{bid},{s},{}\n", coords.join(",")));
                }
            }
        }
        Format::Jsonl => {
            body.push_str(&format!(
                "{}\n",
                serde_json::json!({"config": &args, "gap": gap})
            ));
            for (bid, block) in blocking.blocks.iter().enumerate() {
                body.push_str(&format!(
                    "{}\n",
                    serde_json::json!({"block_id": bid, "members": block})
                ));
            }
        }
    }
    output::emit(args.out.as_deref(), body.as_bytes())
}

// -------------------------------------------------------------- conditions

#[derive(Args, Serialize)]
struct ConditionsArgs {
    /// c (weighted, C1-C4) or d (unweighted, D1-D4)
    #[arg(long, default_value = "c")]
    variant: String,
    #[arg(long)]
    n: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    l_n: f64,
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    semi_b: f64,
    #[arg(long)]
    sigma2: f64,
    #[arg(long)]
    sigma_f2: f64,
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    mix_b: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    cov_c: f64,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn conditions(args: ConditionsArgs) -> Result<()> {
    let cb = ClassBounds::new(args.a, args.semi_b, args.sigma2)?
        .with_class_variance(args.sigma_f2)?;
    let params =
        ChainParams::new(args.n, args.t, args.l_n, cb, args.omega, args.mix_b, args.gamma)?;
    let spec = EntropySpec::new(args.cov_c, args.h, args.dim)?;
    let report = match args.variant.as_str() {
        "c" => check_conditions_prop6(&params, &spec)?,
        "d" => check_conditions_cor7(&params, &spec)?,
        other => bail!("variant must be `c` or `d`, got `{other}`"),
    };
    let body = format!(
        "{}\n",
        serde_json::to_string(&serde_json::json!({"config": &args, "conditions": report}))?
    );
    output::emit(args.out.as_deref(), body.as_bytes())
}

// ---------------------------------------------------------------- estimate

#[derive(Args, Serialize)]
struct EstimateArgs {
    /// kde | mean | var | mode
    #[arg(long)]
    estimator: String,
    #[arg(long)]
    input: PathBuf,
    /// optimal | geometric | mode | value:<x>
    #[arg(long)]
    bandwidth: String,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Mixing order for the geometric bandwidth rule
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 128)]
    grid_points: usize,
    /// Evaluation range; defaults to the interior [Mh, 1-Mh]
    #[arg(long)]
    grid_lo: Option<f64>,
    #[arg(long)]
    grid_hi: Option<f64>,
    /// Mode search grid spacing as a fraction of h^2
    #[arg(long, default_value_t = 0.25)]
    y_spacing_factor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let raw = std::fs::read(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let parsed = read_csv(std::io::BufReader::new(raw.as_slice()))?;
    if parsed.dim != 1 {
        bail!("the estimate command handles 1-dimensional covariates, got D = {}", parsed.dim);
    }
    let needs_y = args.estimator != "kde";
    if needs_y && parsed.y.is_none() {
        bail!("estimator `{}` needs a `y` column in {}", args.estimator, args.input.display());
    }
    let n = parsed.x.len();
    let data = parsed.into_dataset(None, None)?;
    let kernel = KernelSpec::new(
        KernelId::parse(&args.kernel).map_err(|e| anyhow::anyhow!(e.to_string()))?,
        1,
    );
    let rule = parse_bandwidth(&args.bandwidth, args.gamma)?;
    let h = rule.bandwidth(n as f64, args.alpha, 1)?;
    let margin = kernel.support_radius() * h;
    let grid = match (args.grid_lo, args.grid_hi) {
        (Some(lo), Some(hi)) => EstimateGrid::uniform_1d(lo, hi, args.grid_points),
        (None, None) => EstimateGrid::interior_1d(margin.min(0.49), args.grid_points)?,
        _ => bail!("give both --grid-lo and --grid-hi or neither"),
    };

    let values: Vec<Option<f64>> = match args.estimator.as_str() {
        "kde" => kde(&data.x, 1, h, &kernel, &grid)?.into_iter().map(Some).collect(),
        "mean" => nw_mean(&data, h, &kernel, &grid)?.values,
        "var" | "variance" => two_step_variance(&data, h, &kernel, &grid)?.values,
        "mode" => {
            let spacing = args.y_spacing_factor.min(1.0) * h * h;
            let (lo, hi) = data
                .y
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &y| (l.min(y), u.max(y)));
            let span = (hi - lo).max(spacing);
            let count = ((span / spacing).ceil() as usize + 1).max(8);
            let grid_y: Vec<f64> =
                (0..count).map(|i| lo + span * i as f64 / (count - 1) as f64).collect();
            modal_regression(&data, h, &kernel, &kernel, &grid, &grid_y)?.values
        }
        other => bail!("unknown estimator `{other}`"),
    };

    let mut body = String::new();
    match args.format {
        Format::Csv => {
            body.push_str("grid_point,estimate,defined\n");
            for (i, v) in values.iter().enumerate() {
                let x = grid.point(i)[0];
                match v {
                    Some(v) => body.push_str(&format!("{x},{v},1\n")),
                    None => body.push_str(&format!("{x},NaN,0\n")),
                }
            }
        }
        Format::Jsonl => {
            body.push_str(&format!(
                "{}\n",
                serde_json::json!({"config": &args, "bandwidth": h})
            ));
            for (i, v) in values.iter().enumerate() {
                body.push_str(&format!(
                    "{}\n",
                    serde_json::json!({
                        "grid_point": grid.point(i)[0],
                        "estimate": v,
                        "defined": v.is_some(),
                    })
                ));
            }
        }
    }
    output::emit(args.out.as_deref(), body.as_bytes())?;
    if let Some(out) = &args.out {
        let meta = serde_json::json!({"config": &args, "bandwidth": h, "n": n});
        output::write_atomic(&output::meta_path(out), serde_json::to_string_pretty(&meta)?.as_bytes())?;
    }
    Ok(())
}

// ------------------------------------------------------------- verify-tail

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// JSON-lines report (one line per experiment result)
    #[arg(long)]
    report: PathBuf,
    /// CSV of raw per-replication values
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Worker-thread cap; any value yields byte-identical output
    #[arg(long)]
    workers: Option<usize>,
}

fn with_pool<T>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T>
where
    T: Send,
{
    match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn verify_tail(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let file = config::parse_file(&text)?;
    if file.tail.is_empty() {
        bail!("config `{}` has no [[tail]] sections", args.config.display());
    }
    let mut report_lines = vec![serde_json::to_string(&serde_json::json!({"config": &file}))?];
    let mut raw_csv = String::from("experiment,n,rep,abs_mean\n");
    for section in &file.tail {
        let cfg = match section.alg_gamma {
            Some(g) => {
                BoundComparisonConfig::calibrated(section.omega, section.mix_b, section.gamma, g)
            }
            None => BoundComparisonConfig {
                omega: section.omega,
                mix_b: section.mix_b,
                gamma: section.gamma,
                alg_b: 1.0,
                alg_gamma: section.gamma + 2.0,
            },
        };
        for exp in section.experiments()? {
            let (rows, abs_means) = with_pool(args.workers, || {
                let detailed = tail_probability_detailed(&exp)?;
                let rows = bound_comparison(&exp, &cfg)?;
                Ok::<_, cmixing::Error>((rows, detailed.1))
            })??;
            for (rep, m) in abs_means.iter().enumerate() {
                raw_csv.push_str(&format!("{},{},{rep},{m}\n", section.name, exp.n));
            }
            let sound = rows
                .iter()
                .all(|r| !r.n_ge_n0_geometric || r.empirical <= r.eq_geometric);
            report_lines.push(serde_json::to_string(&serde_json::json!({
                "experiment": section.name,
                "n": exp.n,
                "rows": rows,
                "sound": sound,
            }))?);
        }
    }
    output::write_atomic(&args.report, format!("{}\n", report_lines.join("\n")).as_bytes())?;
    if let Some(raw) = &args.raw {
        output::write_atomic(raw, raw_csv.as_bytes())?;
    }
    Ok(())
}

fn verify_rate(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let file = config::parse_file(&text)?;
    if file.rate.is_empty() {
        bail!("config `{}` has no [[rate]] sections", args.config.display());
    }
    let mut report_lines = vec![serde_json::to_string(&serde_json::json!({"config": &file}))?];
    let mut raw_csv = String::from("experiment,n,rep,sup_error\n");
    for section in &file.rate {
        let exp = section.experiment()?;
        let report = with_pool(args.workers, || rate_experiment(&exp))??;
        for (ni, errors) in report.raw_errors.iter().enumerate() {
            for (rep, e) in errors.iter().enumerate() {
                raw_csv.push_str(&format!("{},{},{rep},{e}\n", section.name, report.ns[ni]));
            }
        }
        report_lines.push(serde_json::to_string(&serde_json::json!({
            "experiment": section.name,
            "estimator": section.estimator,
            "ns": report.ns,
            "bandwidths": report.bandwidths,
            "median_sup_errors": report.median_sup_errors,
            "slope": report.slope,
            "slope_se": report.slope_se,
            "target_exponent": report.target_exponent,
            "aborted": report.aborted,
            "min_estimate": report.min_estimate,
        }))?);
    }
    output::write_atomic(&args.report, format!("{}\n", report_lines.join("\n")).as_bytes())?;
    if let Some(raw) = &args.raw {
        output::write_atomic(raw, raw_csv.as_bytes())?;
    }
    Ok(())
}
