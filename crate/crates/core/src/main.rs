//! Command-line driver for the numerical laboratory.
//!
//! Exit codes: 0 when every scientific assertion of the requested
//! experiment holds, 1 when an assertion fails, 2 on infrastructure
//! errors (bad arguments, I/O, solver breakdown).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orlicz_lab::config::{parse_kv_file, parse_list, RunConfig};
use orlicz_lab::error::{Error, Result};
use orlicz_lab::experiments::{
    covering_demo, modular_experiment, ratio_sweep_experiment, theorem_demo, Direction,
    Experiment,
};
use orlicz_lab::grid::{random_bandlimited_field, BallGrid, ScalarField};
use orlicz_lab::probes::{cone_lower_bound, default_r_in, default_r_out, make_cutoff, ConeRegion};
use orlicz_lab::report::{config_hash, write_manifest, CsvCell, CsvTable};
use orlicz_lab::solver::{solve_fd_disk, solve_green_ball};
use orlicz_lab::svg;
use orlicz_lab::young::{
    check_delta2, check_nabla2, default_a_candidates, default_scan, YoungFunction,
};

#[derive(Parser)]
#[command(name = "orlicz-lab", version, about = "Modular estimates for the Poisson problem on the ball")]
struct Cli {
    /// key=value config file; command-line flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Young function, e.g. power:p=2, powerlog:alpha=2, linear, exp, tabulated:file.csv
    #[arg(long)]
    phi: Option<String>,
    /// grid points per axis (odd, >= 65)
    #[arg(long)]
    m: Option<usize>,
    /// fd or green
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// output directory for report.csv and plots
    #[arg(long)]
    out: Option<PathBuf>,
    /// comma-separated amplitudes for the forcing probes
    #[arg(long, value_name = "LIST")]
    t_list: Option<String>,
    /// comma-separated concentration widths
    #[arg(long, value_name = "LIST")]
    eps_list: Option<String>,
    /// Lebesgue exponent used by the covering machinery
    #[arg(long)]
    p: Option<f64>,
    /// the weight M in the energy normalization
    #[arg(long)]
    mweight: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Report Young-function sanity and the two growth conditions
    CheckYoung(CommonArgs),
    /// Solve the Poisson problem for a seeded source and report residuals
    Solve(CommonArgs),
    /// Compare the direct and layer-cake modulars on a seeded field
    Modular(CommonArgs),
    /// Estimate the modular ratio over a family of random sources
    RatioSweep(CommonArgs),
    /// Run one direction of the characterization
    TheoremDemo {
        /// sufficiency, delta2, or nabla2
        #[arg(long, default_value = "sufficiency")]
        direction: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Walk the stopping-radius covering argument and render the cover
    CoveringDemo(CommonArgs),
    /// Measure the cone lower bound for the second derivative
    ConeBound(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn build_config(file: &Option<PathBuf>, args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = file {
        cfg.apply(&parse_kv_file(path)?)?;
    }
    if let Some(v) = &args.phi {
        cfg.phi = v.clone();
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = &args.backend {
        cfg.backend = v.clone();
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.to_string_lossy().into_owned());
    }
    if let Some(v) = &args.t_list {
        cfg.t_list = parse_list("t_list", v)?;
    }
    if let Some(v) = &args.eps_list {
        cfg.eps_list = parse_list("eps_list", v)?;
    }
    if let Some(v) = args.p {
        cfg.p = v;
    }
    if let Some(v) = args.mweight {
        cfg.m_weight = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, exp: &Experiment) -> Result<()> {
    for line in &exp.summary {
        println!("{line}");
    }
    if let Some(out) = &cfg.out {
        let dir = Path::new(out);
        exp.table.write(&dir.join("report.csv"))?;
        write_manifest(&dir.join("manifest.txt"), &cfg.as_pairs())?;
        println!("wrote {}", dir.join("report.csv").display());
    }
    println!("verdict: {}", if exp.pass { "pass" } else { "fail" });
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::CheckYoung(args) => {
            let cfg = build_config(&cli.config, args)?;
            let phi = YoungFunction::from_spec(&cfg.phi)?;
            let scan = default_scan();
            let d2 = check_delta2(&phi, &scan)?;
            let n2 = check_nabla2(&phi, &scan, &default_a_candidates())?;
            let young = phi.is_young_sampled();
            println!("phi = {}", phi.name());
            println!("young sampled check: {}", if young { "pass" } else { "fail" });
            match d2.satisfied {
                true => println!("delta2: satisfied, K = {:.9}, alpha1 = {:.9}", d2.k, d2.alpha1),
                false => println!("delta2: not satisfied (witness t = {:?})", d2.witness_t),
            }
            match n2.satisfied {
                true => println!("nabla2: satisfied, a = {:.9}, alpha2 = {:.9}", n2.a, n2.alpha2),
                false => println!("nabla2: not satisfied (witness t = {:?})", n2.witness_t),
            }
            if let Some(out) = &cfg.out {
                let mut table = CsvTable::new(&[
                    "config", "phi", "young", "delta2", "k", "alpha1", "nabla2", "a", "alpha2",
                ]);
                table.push_row(&[
                    CsvCell::Text(format!("{:016x}", config_hash(&cfg.as_pairs()))),
                    CsvCell::Text(phi.name()),
                    CsvCell::Bool(young),
                    CsvCell::Bool(d2.satisfied),
                    CsvCell::Float(d2.k),
                    CsvCell::Float(d2.alpha1),
                    CsvCell::Bool(n2.satisfied),
                    CsvCell::Float(n2.a),
                    CsvCell::Float(n2.alpha2),
                ]);
                table.write(&Path::new(out).join("report.csv"))?;
                write_manifest(&Path::new(out).join("manifest.txt"), &cfg.as_pairs())?;
            }
            Ok(true)
        }
        Command::Solve(args) => {
            let cfg = build_config(&cli.config, args)?;
            let grid = BallGrid::new(2, cfg.m)?;
            let f = source_field(&grid, cfg.seed)?;
            let u = match cfg.backend.as_str() {
                "fd" => {
                    let (u, report) = solve_fd_disk(&f)?;
                    println!(
                        "backend = {}, m = {}, residual = {:.3e}, boundary max = {:.3e}, iterations = {}",
                        report.backend, report.resolution, report.residual,
                        report.boundary_max, report.iterations
                    );
                    u
                }
                "green" => {
                    let stride = 4;
                    let targets: Vec<usize> = grid
                        .inside_nodes()
                        .enumerate()
                        .filter_map(|(k, idx)| (k % stride == 0).then_some(idx))
                        .collect();
                    let u = solve_green_ball(&f, Some(&targets))?;
                    println!(
                        "backend = green, m = {}, targets = {}",
                        cfg.m,
                        targets.len()
                    );
                    u
                }
                other => return Err(Error::Param(format!("unknown backend {other:?}"))),
            };
            println!("max |u| = {:.9e}", u.max_abs());
            if let Some(out) = &cfg.out {
                let dir = Path::new(out);
                std::fs::create_dir_all(dir)?;
                let mut csv = std::fs::File::create(dir.join("solution.csv"))?;
                u.write_csv(&mut csv)?;
                write_manifest(&dir.join("manifest.txt"), &cfg.as_pairs())?;
                println!("wrote {}", dir.join("solution.csv").display());
            }
            Ok(true)
        }
        Command::Modular(args) => {
            let cfg = build_config(&cli.config, args)?;
            let phi = YoungFunction::from_spec(&cfg.phi)?;
            let exp =
                modular_experiment(&phi, cfg.m, cfg.seed, config_hash(&cfg.as_pairs()))?;
            emit(&cfg, &exp)?;
            Ok(exp.pass)
        }
        Command::RatioSweep(args) => {
            let cfg = build_config(&cli.config, args)?;
            let phi = YoungFunction::from_spec(&cfg.phi)?;
            let d2 = check_delta2(&phi, &default_scan())?;
            let n2 = check_nabla2(&phi, &default_scan(), &default_a_candidates())?;
            if !(d2.satisfied && n2.satisfied) {
                println!(
                    "warning: {} fails the growth conditions, the sweep may be unbounded",
                    phi.name()
                );
            }
            let exp = ratio_sweep_experiment(
                &[phi],
                cfg.m,
                cfg.seed,
                config_hash(&cfg.as_pairs()),
            )?;
            emit(&cfg, &exp)?;
            Ok(exp.pass)
        }
        Command::TheoremDemo { direction, common } => {
            let cfg = build_config(&cli.config, common)?;
            let phi = YoungFunction::from_spec(&cfg.phi)?;
            let dir: Direction = direction.parse()?;
            let exp = theorem_demo(
                dir,
                &phi,
                cfg.m,
                cfg.seed,
                &cfg.t_list,
                &cfg.eps_list,
                config_hash(&cfg.as_pairs()),
            )?;
            emit(&cfg, &exp)?;
            Ok(exp.pass)
        }
        Command::CoveringDemo(args) => {
            let cfg = build_config(&cli.config, args)?;
            let lambdas = [0.01, 0.1, 1.0];
            let demo = covering_demo(
                cfg.m,
                cfg.seed,
                cfg.p,
                cfg.m_weight,
                &lambdas,
                config_hash(&cfg.as_pairs()),
            )?;
            emit(&cfg, &demo.experiment)?;
            if let (Some(out), Some((grid, level, balls))) = (&cfg.out, &demo.render) {
                let path = Path::new(out).join("cover.svg");
                svg::plot_cover(&path, "stopping-radius cover", grid, level, balls)?;
                println!("wrote {}", path.display());
            }
            Ok(demo.experiment.pass)
        }
        Command::ConeBound(args) => {
            let cfg = build_config(&cli.config, args)?;
            let grid = BallGrid::new(2, cfg.m)?;
            let cutoff = make_cutoff(&grid, default_r_in(2), default_r_out(2))?;
            let cone = ConeRegion::default_for(2);
            let mut table = CsvTable::new(&["config", "t", "c_min", "axis_slope"]);
            let hash = config_hash(&cfg.as_pairs());
            let mut pass = true;
            let mut pts = Vec::new();
            for &t in &cfg.t_list {
                let bound = cone_lower_bound(t, &cone, &cutoff, &grid)?;
                pass &= bound.c_min > 0.0;
                println!(
                    "t = {t}: c_min = {:.6e}, axis slope = {:.4}",
                    bound.c_min, bound.axis_slope
                );
                table.push_row(&[
                    CsvCell::Text(format!("{hash:016x}")),
                    CsvCell::Float(t),
                    CsvCell::Float(bound.c_min),
                    CsvCell::Float(bound.axis_slope),
                ]);
                pts.push((t, bound.c_min));
            }
            if let Some(out) = &cfg.out {
                let dir = Path::new(out);
                table.write(&dir.join("report.csv"))?;
                write_manifest(&dir.join("manifest.txt"), &cfg.as_pairs())?;
                if pts.iter().all(|&(x, y)| x > 0.0 && y > 0.0) {
                    svg::plot_loglog(
                        &dir.join("cone.svg"),
                        "cone lower bound",
                        "t",
                        "c_min(t)",
                        &[svg::Series { label: "c_min", points: &pts }],
                    )?;
                }
                println!("wrote {}", dir.join("report.csv").display());
            }
            println!("verdict: {}", if pass { "pass" } else { "fail" });
            Ok(pass)
        }
    }
}

/// Seed 0 selects the constant source, anything else a band-limited one.
fn source_field(grid: &std::sync::Arc<BallGrid>, seed: u64) -> Result<ScalarField> {
    if seed == 0 {
        Ok(ScalarField::constant(grid, 1.0))
    } else {
        random_bandlimited_field(grid, 4, seed)
    }
}
