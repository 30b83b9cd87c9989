use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coevo_harness::{
    analyze, export, export_analysis, load_config, preset, run_experiment, run_sweep,
    sweep_values, write_sweep, Engine, ExperimentConfig, HarnessError, Result, SweepMode, PRESETS,
};

#[derive(Parser)]
#[command(name = "coevo", version, about = "Tumour/CTL phenotype coevolution simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named figure scenario (see `coevo presets`)
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    engine: Option<Engine>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replicates (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the IBM and/or PDE and write totals, snapshots and analysis CSVs
    Simulate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steady states, eigenvalues, dispersion curve and pattern verdict
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat analyze (or simulate, with --simulate) along one parameter
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        simulate: bool,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List preset names
    Presets,
}

fn resolve(source: &Source) -> Result<ExperimentConfig> {
    match (&source.config, &source.preset) {
        (Some(path), _) => load_config(path),
        (None, Some(name)) => preset(name),
        (None, None) => Err(HarnessError::Config("--config or --preset required".into())),
    }
}

fn apply(cfg: &mut ExperimentConfig, run: &RunFlags, out: &Option<PathBuf>) -> Result<()> {
    if let Some(e) = run.engine {
        cfg.engine = e;
    }
    if let Some(r) = run.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out_dir = o.clone();
    }
    if run.workers == Some(0) {
        return Err(HarnessError::Config("--workers must be at least 1".into()));
    }
    cfg.validate()
}

fn simulate(source: Source, run: RunFlags, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = resolve(&source)?;
    apply(&mut cfg, &run, &out)?;
    let report = analyze(&cfg)?;
    let res = run_experiment(&cfg, run.workers)?;
    let files = export(&res, &report, &cfg.out_dir)?;
    if let Some(p) = &res.pde {
        println!(
            "pde: rho_C = {:.6e}, rho_T = {:.6e}, I_bar = {:.4}, {}",
            p.trajectory.final_rho_c(),
            p.trajectory.final_rho_t(),
            p.classification.i_bar,
            p.classification.label
        );
    }
    if !res.replicates.is_empty() {
        println!(
            "ibm: {} replicates, tumour extinct in {}, mean rho_C = {:.6e}, mean rho_T = {:.6e}, majority {}",
            res.replicates.len(),
            res.extinct_replicates(),
            res.rho_c.mean.last().unwrap(),
            res.rho_t.mean.last().unwrap(),
            res.majority.map(|l| l.to_string()).unwrap_or_default()
        );
    }
    println!("wrote {} files to {}", files.len(), cfg.out_dir.display());
    Ok(())
}

fn analyze_cmd(source: Source, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = resolve(&source)?;
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    let r = analyze(&cfg)?;
    let s = &r.steady;
    println!("gamma* = {:.6}", s.gamma_threshold);
    println!(
        "semitrivial ({:.6e}, {:.6e}) {}",
        s.semitrivial.0,
        s.semitrivial.1,
        if r.semitrivial.stable { "stable" } else { "unstable" }
    );
    match (s.nontrivial, &r.nontrivial) {
        (Some((c, t)), Some(e)) => println!(
            "nontrivial ({c:.6e}, {t:.6e}) {}",
            if e.stable { "stable" } else { "unstable" }
        ),
        _ => println!("nontrivial: none"),
    }
    println!("beta_C = {:.6e}, cfl = {:.4}", r.beta_c, r.cfl);
    if let Some(p) = &r.pattern {
        println!(
            "pattern bound {:?} at m = {:?}: {:?}",
            p.bound, p.minimizing_mode, p.verdict
        );
    }
    export_analysis(&cfg, &r, &cfg.out_dir)?;
    println!("wrote analysis to {}", cfg.out_dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    source: Source,
    param: String,
    from: f64,
    to: f64,
    steps: usize,
    simulate: bool,
    run: RunFlags,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = resolve(&source)?;
    apply(&mut cfg, &run, &out)?;
    let values = sweep_values(from, to, steps)?;
    let mode = if simulate {
        SweepMode::Simulate
    } else {
        SweepMode::Analyze
    };
    let points = run_sweep(&cfg, &param, &values, mode, run.workers)?;
    for (i, p) in points.iter().enumerate() {
        if let Some(res) = &p.result {
            export(res, &p.report, &cfg.out_dir.join(format!("point_{i:03}")))?;
        }
    }
    let path = write_sweep(&param, &points, &cfg.out_dir)?;
    println!("{} points, wrote {}", points.len(), path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { source, run, out } => simulate(source, run, out),
        Command::Analyze { source, out } => analyze_cmd(source, out),
        Command::Sweep {
            source,
            param,
            from,
            to,
            steps,
            simulate,
            run,
            out,
        } => sweep_cmd(source, param, from, to, steps, simulate, run, out),
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
