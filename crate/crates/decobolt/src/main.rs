//! Command-line interface: rates, kernel, evolve, feasibility, scenario.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 numerical or
//! invariant failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use decobolt::channels::{self, Environment};
use decobolt::config::{self, ScenarioConfig};
use decobolt::evolution::{DensityMatrix, Trajectory, GUARD_BAND_LIMIT};
use decobolt::experiments::{self, FeasibilityReport, GratingPattern, ScenarioResult};
use decobolt::kernel::{log_spaced, DecoherenceKernel};
use decobolt::quantities::{BodySpec, CONSTANTS};
use decobolt::svg;
use decobolt::{Error, QuadratureConfig, Result};

#[derive(Parser)]
#[command(
    name = "decobolt",
    version,
    about = "Collisional decoherence of a body's center of mass: rates, kernels, density-matrix evolution, interference feasibility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-channel collision rates and the composed environment
    Rates {
        /// Scenario TOML file
        #[arg(long)]
        config: PathBuf,
        /// Also write the table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the table as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decoherence kernel γ(r) on a log-spaced radial grid, as CSV
    Kernel {
        #[arg(long)]
        config: PathBuf,
        /// Smallest separation, e.g. "1 nm" (default 1e-3/k̄)
        #[arg(long, value_name = "LENGTH")]
        r_min: Option<String>,
        /// Largest separation (default 1e3/k̄)
        #[arg(long, value_name = "LENGTH")]
        r_max: Option<String>,
        /// Number of radial points
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate the density matrix and emit the observable trajectory
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV path (overrides [outputs])
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Final-state binary snapshot path
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Interference feasibility bounds for a body
    Feasibility {
        /// Body radius, e.g. "10 um"
        #[arg(long)]
        radius: String,
        /// Mass density (kg/m³)
        #[arg(long)]
        density: f64,
        /// Temperature, e.g. "1 K"
        #[arg(long)]
        temperature: String,
        /// Wavelength-to-slit ratio δ
        #[arg(long)]
        delta: f64,
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Built-in case studies
    Scenario {
        name: ScenarioName,
        /// Emit the full report as JSON instead of text
        #[arg(long)]
        json: bool,
        /// Write the diffraction pattern CSV (fullerene only)
        #[arg(long)]
        pattern: Option<PathBuf>,
        /// Write the diffraction pattern SVG plot (fullerene only)
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioName {
    Dust,
    Fullerene,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let quad = QuadratureConfig::from_env()?;
    match cli.command {
        Command::Rates { config, csv, json } => cmd_rates(&config, csv, json, &quad),
        Command::Kernel { config, r_min, r_max, points, out } => {
            cmd_kernel(&config, r_min, r_max, points, out, &quad)
        }
        Command::Evolve { config, trajectory, snapshot } => {
            cmd_evolve(&config, trajectory, snapshot, &quad)
        }
        Command::Feasibility { radius, density, temperature, delta, json } => {
            cmd_feasibility(&radius, density, &temperature, delta, json)
        }
        Command::Scenario { name, json, pattern, svg } => {
            cmd_scenario(name, json, pattern, svg, &quad)
        }
    }
}

#[derive(Serialize)]
struct RatesReport {
    channels: Vec<RatesRow>,
    total_rate: f64,
    mean_wavevector: f64,
    mean_wavelength: f64,
}

#[derive(Serialize)]
struct RatesRow {
    name: String,
    rate: f64,
    decoherence_time: Option<f64>,
}

fn cmd_rates(
    path: &Path,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
    quad: &QuadratureConfig,
) -> Result<()> {
    let config = ScenarioConfig::load(path)?;
    let env = config.environment(quad)?;
    if env.is_empty() {
        return Err(Error::Config("environment has no channels".into()));
    }
    let report = rates_report(&env, quad)?;

    println!("{:<28}{:>18}{:>18}", "channel", "rate [1/s]", "tau [s]");
    for row in &report.channels {
        println!(
            "{:<28}{:>18}{:>18}",
            row.name,
            format!("{:.6e}", row.rate),
            row.decoherence_time.map_or("inf".into(), |t| format!("{t:.6e}"))
        );
    }
    println!(
        "{:<28}{:>18}{:>18}",
        "total",
        format!("{:.6e}", report.total_rate),
        format!("{:.6e}", 1.0 / report.total_rate)
    );
    println!();
    println!("{:<28}{:>18}", "mean wavevector [1/m]", format!("{:.6e}", report.mean_wavevector));
    println!("{:<28}{:>18}", "mean wavelength [m]", format!("{:.6e}", report.mean_wavelength));

    let csv = csv.or_else(|| config.outputs.rates_csv.clone());
    if let Some(path) = csv {
        let mut text = String::from("name,rate,decoherence_time\n");
        for row in &report.channels {
            text.push_str(&format!(
                "{},{:.12e},{}\n",
                row.name,
                row.rate,
                row.decoherence_time.map_or("inf".into(), |t| format!("{t:.12e}"))
            ));
        }
        write_file(&path, text.as_bytes())?;
    }
    let json = json.or_else(|| config.outputs.rates_json.clone());
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))?;
        write_file(&path, text.as_bytes())?;
    }
    Ok(())
}

fn rates_report(env: &Environment, quad: &QuadratureConfig) -> Result<RatesReport> {
    let mut rows = Vec::new();
    for spec in &env.channels {
        let rate = spec.rate(quad)?;
        rows.push(RatesRow {
            name: spec.kind_name().to_string(),
            rate,
            decoherence_time: (rate > 0.0).then(|| 1.0 / rate),
        });
    }
    let composed = channels::compose(env, quad)?;
    Ok(RatesReport {
        channels: rows,
        total_rate: composed.rate(),
        mean_wavevector: composed.mean_k()?,
        mean_wavelength: composed.mean_wavelength()?,
    })
}

fn cmd_kernel(
    path: &Path,
    r_min: Option<String>,
    r_max: Option<String>,
    points: usize,
    out: Option<PathBuf>,
    quad: &QuadratureConfig,
) -> Result<()> {
    let config = ScenarioConfig::load(path)?;
    let env = config.environment(quad)?;
    let composed = channels::compose(&env, quad)?;
    let kernel = DecoherenceKernel::build(composed)?;
    let k = kernel.mean_k();
    if k == 0.0 {
        return Err(Error::Config("kernel radial grid undefined: k̄ = 0".into()));
    }
    let r_lo = r_min.map(|s| config::parse_length(&s)).transpose()?.unwrap_or(1e-3 / k);
    let r_hi = r_max.map(|s| config::parse_length(&s)).transpose()?.unwrap_or(1e3 / k);
    if !(r_lo > 0.0 && r_lo < r_hi) {
        return Err(Error::Config(format!("need 0 < r-min < r-max, got {r_lo:e} and {r_hi:e}")));
    }
    if points < 2 {
        return Err(Error::Config(format!("need at least 2 radial points, got {points}")));
    }

    let coefficient = kernel.small_r_coefficient();
    let rate = kernel.saturation_rate();
    let mut text = String::from("r,gamma,gamma_smallr_approx,rate\n");
    for (r, gamma) in kernel.tabulate(&log_spaced(r_lo, r_hi, points))? {
        text.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r,
            gamma,
            coefficient * r * r,
            rate
        ));
    }
    match out.or_else(|| config.outputs.kernel_csv.clone()) {
        Some(path) => write_file(&path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_evolve(
    path: &Path,
    trajectory: Option<PathBuf>,
    snapshot: Option<PathBuf>,
    quad: &QuadratureConfig,
) -> Result<()> {
    let config = ScenarioConfig::load(path)?;
    let body = config.body()?;
    let grid = config.grid()?;
    let initial = config.initial()?;
    let experiment = config.experiment()?;
    let total_time = experiment
        .time
        .ok_or_else(|| Error::Config("experiment.time required for evolve".into()))?
        .0;
    let hamiltonian = config.hamiltonian()?;

    let kernel = if config.channel.is_empty() {
        None
    } else {
        let env = config.environment(quad)?;
        Some(DecoherenceKernel::build(channels::compose(&env, quad)?)?)
    };

    let state = DensityMatrix::gaussian(
        grid,
        body.mass(),
        initial.center.0,
        initial.width.0,
        CONSTANTS.hbar * initial.wavevector,
    )?;
    let steps = (total_time / grid.time_step).round() as usize;
    let stride = experiment.stride.unwrap_or_else(|| (steps / 100).max(1));
    let result = state.evolve(kernel.as_ref(), &hamiltonian, total_time, stride)?;

    let audit = result.final_state.audit();
    println!(
        "invariant audit: trace_deviation={:.3e} hermiticity_residual={:.3e} guard_band_mass={:.3e}",
        audit.trace_deviation, audit.hermiticity_residual, audit.guard_band_mass
    );
    if audit.trace_deviation > 1e-6
        || audit.hermiticity_residual > 1e-8
        || audit.guard_band_mass > GUARD_BAND_LIMIT
    {
        return Err(Error::Numerical(format!(
            "final-state invariant breach (trace {:.3e}, hermiticity {:.3e}, guard {:.3e})",
            audit.trace_deviation, audit.hermiticity_residual, audit.guard_band_mass
        )));
    }

    if let Some(path) = trajectory.or_else(|| config.outputs.trajectory.clone()) {
        write_file(&path, trajectory_csv(&result).as_bytes())?;
    }
    if let Some(path) = snapshot.or_else(|| config.outputs.snapshot.clone()) {
        let mut buffer = Vec::new();
        result
            .final_state
            .write_snapshot(&mut buffer)
            .map_err(|e| Error::Numerical(format!("snapshot write failed: {e}")))?;
        write_file(&path, &buffer)?;
    }
    Ok(())
}

fn trajectory_csv(result: &Trajectory) -> String {
    let mut text = String::from("t,mean_x,mean_p,var_x,var_p,purity\n");
    for s in &result.samples {
        text.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            s.time, s.mean_x, s.mean_p, s.var_x, s.var_p, s.purity
        ));
    }
    text
}

fn cmd_feasibility(
    radius: &str,
    density: f64,
    temperature: &str,
    delta: f64,
    json: bool,
) -> Result<()> {
    let radius = config::parse_length(radius)?;
    let temperature = config::parse_temperature(temperature)?;
    let body = BodySpec::new(radius, density)?;
    let report = experiments::feasibility(&body, temperature, delta)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))?
        );
    } else {
        print_feasibility(&report);
    }
    Ok(())
}

fn print_feasibility(report: &FeasibilityReport) {
    println!("{:<32}{:>16}", "delta", format!("{:.6e}", report.delta));
    println!("{:<32}{:>16}", "radius [m]", format!("{:.6e}", report.radius));
    println!(
        "{:<32}{:>16}",
        "required wavelength 2*delta*a [m]",
        format!("{:.6e}", report.required_wavelength)
    );
    println!("{:<32}{:>16}", "max wavelength [m]", format!("{:.6e}", report.max_wavelength));
    println!("{:<32}{:>16}", "thermal velocity [m/s]", format!("{:.6e}", report.thermal_velocity));
    println!("{:<32}{:>16}", "max radius [m]", format!("{:.6e}", report.max_radius));
    println!("{:<32}{:>16}", "verdict", if report.feasible { "feasible" } else { "infeasible" });
}

fn cmd_scenario(
    name: ScenarioName,
    json: bool,
    pattern: Option<PathBuf>,
    svg_path: Option<PathBuf>,
    quad: &QuadratureConfig,
) -> Result<()> {
    let result = match name {
        ScenarioName::Dust => experiments::run_dust_scenario(quad)?,
        ScenarioName::Fullerene => experiments::run_fullerene_scenario(quad)?,
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result)
                .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))?
        );
    } else {
        print_scenario(&result);
    }

    if pattern.is_some() || svg_path.is_some() {
        let pattern_data = match name {
            ScenarioName::Fullerene => experiments::fullerene_grating_pattern(quad)?,
            ScenarioName::Dust => {
                return Err(Error::Config(
                    "the dust scenario has no grating; pattern output is fullerene-only".into(),
                ))
            }
        };
        if let Some(path) = pattern {
            write_file(&path, pattern_csv(&pattern_data).as_bytes())?;
        }
        if let Some(path) = svg_path {
            let doc = svg::line_plot(
                &[
                    svg::Series {
                        label: "baseline".into(),
                        points: pattern_data
                            .momenta
                            .iter()
                            .zip(&pattern_data.baseline)
                            .map(|(p, w)| (*p, *w))
                            .collect(),
                    },
                    svg::Series {
                        label: "decohered".into(),
                        points: pattern_data
                            .momenta
                            .iter()
                            .zip(&pattern_data.decohered)
                            .map(|(p, w)| (*p, *w))
                            .collect(),
                    },
                ],
                &svg::PlotOptions {
                    title: "fullerene diffraction pattern".into(),
                    x_label: "momentum [kg m/s]".into(),
                    y_label: "probability".into(),
                    ..Default::default()
                },
            );
            write_file(&path, doc.as_bytes())?;
        }
    }
    Ok(())
}

fn pattern_csv(pattern: &GratingPattern) -> String {
    let mut text = String::from("momentum,probability,probability_decohered\n");
    for i in 0..pattern.momenta.len() {
        text.push_str(&format!(
            "{:.12e},{:.12e},{:.12e}\n",
            pattern.momenta[i], pattern.baseline[i], pattern.decohered[i]
        ));
    }
    text
}

fn print_scenario(result: &ScenarioResult) {
    println!("scenario: {}", result.name);
    println!(
        "body: radius {:.3e} m, mass {:.4e} kg{}",
        result.body.radius,
        result.body.mass,
        result
            .body
            .internal_temperature
            .map_or(String::new(), |t| format!(", internal temperature {t} K"))
    );
    println!("exposure time: {:.3e} s", result.elapsed);
    println!();
    println!(
        "{:<30}{:>16}{:>16}{:>14}{:>10}",
        "channel", "rate [1/s]", "tau [s]", "t*N", "included"
    );
    for c in &result.channels {
        println!(
            "{:<30}{:>16}{:>16}{:>14}{:>10}",
            c.name,
            format!("{:.4e}", c.rate),
            c.decoherence_time.map_or("inf".into(), |t| format!("{t:.4e}")),
            format!("{:.4e}", c.exposure),
            if c.included { "yes" } else { "no" }
        );
    }
    println!();
    println!("{:<30}{:>16}", "total rate [1/s]", format!("{:.6e}", result.total_rate));
    println!("{:<30}{:>16}", "t*N budget", format!("{:.6e}", result.exposure_total));
    println!("{:<30}{:>16}", "coherence factor", format!("{:.6e}", result.coherence_factor));
    println!("{:<30}{:>16}", "mean wavelength [m]", format!("{:.6e}", result.mean_wavelength));
    println!(
        "{:<30}{:>16}",
        "coherence length [m]",
        result.coherence_length.map_or("inf".into(), |l| format!("{l:.6e}"))
    );
    if let (Some(period), Some(exceeds)) =
        (result.grating_period, result.coherence_exceeds_grating)
    {
        println!(
            "{:<30}{:>16}",
            "grating period [m]",
            format!("{period:.6e}")
        );
        println!(
            "{:<30}{:>16}",
            "l_coh > grating period",
            if exceeds { "yes" } else { "no" }
        );
    }
    println!(
        "{:<30}{:>16}",
        "interference feasible",
        if result.feasibility.feasible { "yes" } else { "no" }
    );
    println!();
    println!("notes:");
    for note in &result.notes {
        println!("  - {note}");
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(bytes)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}
