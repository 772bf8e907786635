use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orlicz_lab::config::{
    oscillation_sequence, parse_domain, parse_f64_list, parse_field, parse_integrand, parse_n_list,
    parse_phi, parse_phi_family,
};
use orlicz_lab::experiments::{
    ConvergenceTable, counterexample_nonuniform_ainc, counterexample_scaled_base,
    embedding_sharpness_experiment, gamma_modular_experiment, gamma_norm_experiment,
    norm_convergence_experiment,
};
use orlicz_lab::phi::PhiFunction;
use orlicz_lab::{domain, modular, Error, Result};

/// Numerical lab for generalized Orlicz norms, modulars and supremal limits.
#[derive(Parser)]
#[command(name = "orlicz-lab", version)]
struct Cli {
    /// Optional key=value file; each line supplies a flag not already given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg quasinorm of a field (id: op-luxemburg-norm).
    Norm(PointwiseArgs),
    /// Modular (integral energy) of a field (id: op-modular).
    Modular(PointwiseArgs),
    /// Scripted convergence experiments; see `experiment --help` for ids.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct PointwiseArgs {
    /// Φ-function spec, e.g. `power:p=2`, `infinity`, `double_phase:p=2,q=4`.
    #[arg(long)]
    phi: String,
    /// Field spec, e.g. `const:1`, `linear`, `sin:k=3`.
    #[arg(long)]
    field: String,
    /// Domain spec `box:<lo,hi,...>:res=<cells>`.
    #[arg(long)]
    domain: String,
    /// Mask spec: `all`, `ball:r=1`, `annulus:rmin=0.5,rmax=1`.
    #[arg(long, default_value = "all")]
    mask: String,
    /// Relative tolerance of the norm bisection.
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    /// Include first-order gradient terms (Sobolev version).
    #[arg(long)]
    sobolev: bool,
}

/// Experiment ids: norm-convergence, scaled-base, nonuniform-ainc,
/// gamma-norm, gamma-modular, embedding-sharpness.
#[derive(Args)]
struct ExperimentArgs {
    /// One of the ids listed above.
    id: String,
    /// Φ-function family spec (`power`, `scaled_power`, `scaled_base:a=2`,
    /// `variable_exponent`, `nondoubling`).
    #[arg(long, default_value = "power")]
    phi_family: String,
    /// Base field spec; for embedding-sharpness, a `;`-separated list.
    #[arg(long)]
    field: Option<String>,
    /// Integrand spec (`abs_xi`, `abs_xi_pow:g=2`, `sqrt_abs_xi`).
    #[arg(long, default_value = "abs_xi")]
    integrand: String,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, default_value = "all")]
    mask: String,
    /// Index list `1,2,4` or doubling range `1..128`.
    #[arg(long, default_value = "1..128")]
    n: String,
    /// Growth exponents for nonuniform-ainc.
    #[arg(long, default_value = "5,10,20,40")]
    p_list: String,
    /// Exponents for embedding-sharpness.
    #[arg(long, default_value = "1,2,5,10,20,50,100,200")]
    q_list: String,
    /// Base scaling for the scaled-base counterexample.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Upper growth exponent γ for embedding-sharpness.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// aInc constant L for embedding-sharpness.
    #[arg(long, default_value_t = 1.0)]
    big_l: f64,
    /// (A0) constant c for embedding-sharpness.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    /// Pass tolerance for the asserted conclusion.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory for CSV tables and the run index.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Recorded in the run index; all experiments are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = match expand_config_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    if let Ok(threads) = std::env::var("ORLICZ_LAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: ORLICZ_LAB_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Splices `key=value` lines from `--config <file>` into the argument list,
/// skipping keys already present on the command line.
fn expand_config_args(mut args: Vec<String>) -> Result<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else { return Ok(args) };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| Error::Config("--config requires a file path".into()))?
        .clone();
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read config file `{path}`: {e}")))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line `{line}` is not key=value")))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        if !args.iter().any(|a| *a == flag) {
            args.push(flag);
            args.push(value.trim().to_string());
        }
    }
    Ok(args)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Norm(args) => {
            let value = pointwise(&args, true)?;
            println!("{value}");
            Ok(true)
        }
        Command::Modular(args) => {
            let value = pointwise(&args, false)?;
            println!("{value}");
            Ok(true)
        }
        Command::Experiment(args) => run_experiment(args),
    }
}

fn pointwise(args: &PointwiseArgs, norm: bool) -> Result<f64> {
    let dom = parse_domain(&args.domain, Some(&args.mask))?;
    let phi = parse_phi(&args.phi)?;
    let expr = parse_field(&args.field)?;
    if args.sobolev {
        return if norm {
            Ok(modular::sobolev_norm(&phi, &expr, &dom, args.rel_tol)?.value)
        } else {
            modular::sobolev_modular(&phi, &expr, &dom)
        };
    }
    let field = domain::sample(&expr, &dom)?;
    if norm {
        Ok(modular::luxemburg_norm(&phi, &field, &dom, args.rel_tol)?.value)
    } else {
        Ok(modular::modular(&phi, &field, &dom))
    }
}

fn run_experiment(args: ExperimentArgs) -> Result<bool> {
    let tables = match args.id.as_str() {
        "norm-convergence" => {
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,1:res=10000"), Some(&args.mask))?;
            let u = parse_field(args.field.as_deref().unwrap_or("linear"))?;
            let (family, p_of_n) = parse_phi_family(&args.phi_family)?;
            let n_list = parse_n_list(&args.n)?;
            vec![norm_convergence_experiment(
                &*family,
                &*p_of_n,
                &u,
                &dom,
                &n_list,
                args.rel_tol,
                args.tol.unwrap_or(0.05),
            )?]
        }
        "scaled-base" => {
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,1:res=10000"), Some(&args.mask))?;
            let u = parse_field(args.field.as_deref().unwrap_or("const:1"))?;
            let n_list = parse_n_list(&args.n)?;
            vec![counterexample_scaled_base(
                args.a,
                &u,
                &dom,
                &n_list,
                args.rel_tol,
                args.tol.unwrap_or(1e-3),
            )?]
        }
        "nonuniform-ainc" => {
            // a domain with |Ω| > 1 keeps the norm away from the sup norm
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,3:res=3000"), Some(&args.mask))?;
            let u = parse_field(args.field.as_deref().unwrap_or("const:1"))?;
            let p_list = parse_f64_list(&args.p_list)?;
            let (growth, norms) = counterexample_nonuniform_ainc(&p_list, &u, &dom, args.rel_tol)?;
            vec![growth, norms]
        }
        "gamma-norm" => {
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,1:res=10000"), Some(&args.mask))?;
            let u = parse_field(args.field.as_deref().unwrap_or("linear"))?;
            let f = parse_integrand(&args.integrand)?;
            let (family, p_of_n) = parse_phi_family(&args.phi_family)?;
            let n_list = parse_n_list(&args.n)?;
            let (recovery, liminf) = gamma_norm_experiment(
                &*family,
                &*p_of_n,
                &f,
                &u,
                oscillation_sequence(u.clone()),
                &dom,
                &n_list,
                args.rel_tol,
                args.tol.unwrap_or(1e-3),
            )?;
            vec![recovery, liminf]
        }
        "gamma-modular" => {
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,1:res=10000"), Some(&args.mask))?;
            let u = parse_field(args.field.as_deref().unwrap_or("linear"))?;
            let f = parse_integrand(&args.integrand)?;
            let (family, p_of_n) = parse_phi_family(&args.phi_family)?;
            let n_list = parse_n_list(&args.n)?;
            let (energy, hypothesis) = gamma_modular_experiment(
                &*family,
                &*p_of_n,
                &f,
                &u,
                &dom,
                &n_list,
                args.tol.unwrap_or(1e-2),
            )?;
            vec![energy, hypothesis]
        }
        "embedding-sharpness" => {
            let dom = parse_domain(args.domain.as_deref().unwrap_or("box:0,1:res=10000"), Some(&args.mask))?;
            let specs = args.field.as_deref().unwrap_or("const:1;linear;sin:k=1");
            let fields = specs
                .split(';')
                .map(|s| domain::sample(&parse_field(s)?, &dom))
                .collect::<Result<Vec<_>>>()?;
            let q_list = parse_f64_list(&args.q_list)?;
            vec![embedding_sharpness_experiment(
                |q| PhiFunction::power(q).expect("q >= 1"),
                args.gamma,
                args.big_l,
                args.c,
                &fields,
                &dom,
                &q_list,
                args.rel_tol,
            )?]
        }
        other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
    };
    emit_tables(&args.out, args.seed, &tables)?;
    let mut passed = true;
    for table in &tables {
        let status = status_of(table);
        println!("{}: {}", table.id, status);
        for note in &table.notes {
            println!("  note: {note}");
        }
        if !table.passed {
            passed = false;
        }
    }
    Ok(passed)
}

fn status_of(table: &ConvergenceTable) -> &'static str {
    if table.informational {
        "informational"
    } else if table.passed {
        "pass"
    } else {
        "fail"
    }
}

fn emit_tables(out: &Path, seed: u64, tables: &[ConvergenceTable]) -> Result<()> {
    fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create output directory {out:?}: {e}")))?;
    let mut index = String::from("experiment_id,file,seed,status\n");
    for table in tables {
        let file = format!("{}.csv", table.id);
        let path = out.join(&file);
        let mut handle = fs::File::create(&path)
            .map_err(|e| Error::Config(format!("cannot write {path:?}: {e}")))?;
        table.write_csv(&mut handle)?;
        index.push_str(&format!("{},{},{},{}\n", table.id, file, seed, status_of(table)));
    }
    fs::write(out.join("index.csv"), index)
        .map_err(|e| Error::Config(format!("cannot write run index: {e}")))?;
    Ok(())
}
