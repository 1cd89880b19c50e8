use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpi3d::fields::{format_field_coefficients, lfv_mask, write_field_coefficients, Topology};
use mpi3d_cli::{apply_overrides, compare_files, CliError, Experiment, ExperimentConfig, Stage, SweepParameter, Workspace};

#[derive(Parser)]
#[command(name = "mpi3d", version, about = "Field-free-line MPI simulation and reconstruction")]
struct Cli {
    /// TOML experiment configuration; defaults are used for anything missing.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set approx.nodes=8`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ApproxFlags {
    /// Node count N.
    #[arg(long)]
    nodes: Option<usize>,
    /// Amplitude threshold b in mT.
    #[arg(long)]
    threshold_mt: Option<f64>,
    /// secant, tangent or midpoint.
    #[arg(long)]
    scheme: Option<String>,
    /// equidistant or l1_optimal.
    #[arg(long)]
    strategy: Option<String>,
}

#[derive(Args, Default)]
struct FbpFlags {
    #[arg(long)]
    displacements: Option<usize>,
    #[arg(long)]
    deconvolve: Option<bool>,
    /// Noise-to-signal ratio of the Wiener deconvolution.
    #[arg(long)]
    nsr: Option<f64>,
    #[arg(long)]
    cos_guard: Option<f64>,
    /// Keep every n-th sample.
    #[arg(long)]
    decimation: Option<usize>,
    /// Zero-pad the sinogram to this half width; 0 disables padding.
    #[arg(long)]
    pad_half_width_mm: Option<f64>,
    /// ram-lak or hann.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the phantom on the signal and reconstruction grids.
    Phantom,
    /// Simulate noisy receive-coil traces.
    Simulate,
    /// High-pass the simulated traces.
    Filter,
    /// Build and store one system matrix per coil.
    Sysmat(ApproxFlags),
    /// Reconstruct with LSQR from stored matrices and filtered traces.
    Lsqr {
        #[command(flatten)]
        approx: ApproxFlags,
        #[arg(long)]
        iterations: Option<usize>,
        /// Use matrices and traces even if their hashes do not match.
        #[arg(long)]
        force: bool,
    },
    /// Sinogram extraction and filtered back projection.
    Fbp(FbpFlags),
    /// NRMSE of two grid files, or of the stored reconstructions against the phantom.
    Compare { reconstruction: Option<PathBuf>, reference: Option<PathBuf> },
    /// Reconstruct once per parameter value.
    Sweep {
        #[arg(long)]
        force: bool,
        /// threshold_b, node_count_n or scheme.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values; the standard set if omitted.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Every stage from phantom to compare.
    Run {
        #[command(flatten)]
        approx: ApproxFlags,
        #[command(flatten)]
        fbp: FbpFlags,
        #[arg(long)]
        force: bool,
    },
    /// Print the field expansion and its zero-field locus.
    FieldInfo {
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        /// Write the coefficient file here.
        #[arg(long)]
        write_coefficients: Option<PathBuf>,
        /// Count recon-grid cells with lo ≤ |B| ≤ hi (mT) at `time`.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        lfv_mt: Option<Vec<f64>>,
    },
}

fn push<T: ToString>(o: &mut Vec<String>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        o.push(format!("{key}={}", v.to_string()));
    }
}

fn quoted(v: &Option<String>) -> Option<String> {
    v.as_ref().map(|s| format!("{s:?}"))
}

impl ApproxFlags {
    fn overrides(&self, o: &mut Vec<String>) {
        push(o, "approx.nodes", &self.nodes);
        push(o, "approx.threshold_mt", &self.threshold_mt);
        push(o, "approx.scheme", &quoted(&self.scheme));
        push(o, "approx.strategy", &quoted(&self.strategy));
    }
}

impl FbpFlags {
    fn overrides(&self, o: &mut Vec<String>) {
        push(o, "fbp.displacements", &self.displacements);
        push(o, "fbp.deconvolve", &self.deconvolve);
        push(o, "fbp.nsr", &self.nsr);
        push(o, "fbp.cos_guard", &self.cos_guard);
        push(o, "fbp.decimation", &self.decimation);
        push(o, "fbp.pad_half_width_mm", &self.pad_half_width_mm);
        push(o, "fbp.window", &quoted(&self.window));
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let mut o = cli.overrides.clone();
    match &cli.command {
        Command::Sysmat(a) | Command::Sweep { approx: a, .. } => a.overrides(&mut o),
        Command::Lsqr { approx, iterations, .. } => {
            approx.overrides(&mut o);
            push(&mut o, "solver.iterations", iterations);
        }
        Command::Fbp(f) => f.overrides(&mut o),
        Command::Run { approx, fbp, .. } => {
            approx.overrides(&mut o);
            fbp.overrides(&mut o);
        }
        _ => {}
    }
    let mut c = apply_overrides(&base, &o)?;
    if let Some(out) = &cli.out {
        c.output.dir = out.clone();
    }
    Ok(c)
}

fn field_info(exp: &Experiment, time: f64, write: &Option<PathBuf>, lfv: &Option<Vec<f64>>) -> Result<(), CliError> {
    let m = &exp.model;
    println!("topology: {}", exp.topology.name());
    println!("ideal: {}", m.is_ideal());
    println!("terms: {}  max degree: {}  validity radius: {} m", m.terms().len(), m.max_degree(), m.radius());
    print!("{}", format_field_coefficients(m));
    if m.is_ideal() {
        match exp.topology {
            Topology::RotatingFfl { .. } | Topology::StaticFfl { .. } => {
                let l = exp.topology.ffl_locus(time)?;
                let n = l.normal();
                println!("FFL at t = {time}: normal ({}, {}, {}), distance {} m", n.x, n.y, n.z, l.signed_distance());
            }
            _ => {
                let p = exp.topology.ffp_position(time)?;
                println!("FFP at t = {time}: ({}, {}, {}) m", p.x, p.y, p.z);
            }
        }
    }
    if let Some(b) = lfv {
        let cells = lfv_mask(m, time, &exp.truth, b[0] * 1e-3, b[1] * 1e-3)?;
        println!("low-field volume: {} of {} cells", cells.len(), exp.truth.len());
    }
    if let Some(p) = write {
        write_field_coefficients(m, p)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Compare { reconstruction: Some(a), reference } = &cli.command {
        let b = reference.as_ref().ok_or_else(|| CliError::Config("compare needs two grid files".into()))?;
        println!("nrmse,{:.16e}", compare_files(a, b)?);
        return Ok(());
    }
    let exp = Experiment::new(load_config(cli)?)?;
    if let Command::FieldInfo { time, write_coefficients, lfv_mt } = &cli.command {
        return field_info(&exp, *time, write_coefficients, lfv_mt);
    }
    let mut ws = Workspace::new(&exp)?;
    match &cli.command {
        Command::Phantom => ws.run(Stage::Phantom)?,
        Command::Simulate => ws.run(Stage::Simulate)?,
        Command::Filter => ws.run(Stage::Filter)?,
        Command::Sysmat(_) => ws.run(Stage::Sysmat)?,
        Command::Lsqr { force, .. } => {
            ws.force = *force;
            println!("nrmse,{:.16e}", ws.lsqr()?);
        }
        Command::Fbp(_) => println!("nrmse,{:.16e}", ws.fbp()?),
        Command::Compare { .. } => {
            for (m, e) in ws.compare()? {
                println!("{m},{e:.16e}");
            }
        }
        Command::Sweep { parameter, values, force, .. } => {
            ws.force = *force;
            let p: SweepParameter = parameter.parse()?;
            let values = if values.is_empty() { p.default_values() } else { values.clone() };
            for pt in ws.sweep(p, &values)? {
                println!("{},{:.16e}", pt.value, pt.nrmse);
            }
        }
        Command::Run { force, .. } => {
            ws.force = *force;
            for s in Stage::ALL {
                ws.run(s)?;
            }
            for (m, e) in ws.compare()? {
                println!("{m},{e:.16e}");
            }
        }
        Command::FieldInfo { .. } => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
