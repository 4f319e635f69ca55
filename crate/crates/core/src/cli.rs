//! `ktfloor` command line.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 strict audit failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::{Accounting, RcStage};
use crate::error::{Error, Result};
use crate::error_model::{
    first_passage_mc_with_workers, floor_long, floor_short, ErrorSpec, FirstPassageEstimate,
    FloorResult,
};
use crate::format::sci;
use crate::gate::{audit_claim, run_cycle_with, AuditReport, ClaimVerdict, FollowerGate};
use crate::noise::OuProcess;
use crate::quantities::PhysicalEnvironment;
use crate::sweep::{load_config, run_sweep, short_floor_default, RunManifest};
use crate::tank::{break_even, write_waveform_csv, BreakEven, TankCircuit, TransferReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ktfloor",
    version,
    about = "Thermal-noise dissipation floors of voltage-controlled logic"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum dissipation for an error probability (short or long observation)
    Floor(FloorArgs),
    /// Full 0-1-0 cycle audit of a follower gate
    Cycle(CycleArgs),
    /// Monte Carlo threshold-crossing probability vs the analytic prediction
    Mc(McArgs),
    /// Resonant LC transfer and switch-cost break-even
    Tank(TankArgs),
    /// Sample a Johnson-noise path on the input capacitance as CSV
    Path(PathArgs),
    /// Run a JSON-configured parameter sweep to CSV
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct FloorArgs {
    /// Error probability, in (0, 0.5)
    #[arg(long)]
    epsilon: f64,
    /// Temperature, K
    #[arg(long, default_value_t = 300.0)]
    temp: f64,
    /// Observation time, s (selects the long-observation floor)
    #[arg(long, requires = "tau")]
    t_obs: Option<f64>,
    /// Correlation time, s
    #[arg(long, requires = "t_obs")]
    tau: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccountingArg {
    PerOperation,
    PerCycle,
}

impl From<AccountingArg> for Accounting {
    fn from(a: AccountingArg) -> Self {
        match a {
            AccountingArg::PerOperation => Accounting::PerOperation,
            AccountingArg::PerCycle => Accounting::PerCycle,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("friction").required(true).args(["friction_per_transition", "friction_kt"])))]
struct CycleArgs {
    /// Input capacitance, F
    #[arg(long)]
    cap: f64,
    /// Logic swing U1, V
    #[arg(long)]
    swing: f64,
    #[arg(long, default_value_t = 300.0)]
    temp: f64,
    /// Closed-switch resistance, ohm
    #[arg(long, default_value_t = 1e3)]
    res: f64,
    /// Mechanical loss per logic transition, J
    #[arg(long)]
    friction_per_transition: Option<f64>,
    /// Mechanical loss per logic transition, kT
    #[arg(long)]
    friction_kt: Option<f64>,
    /// Decision threshold as a fraction of the swing
    #[arg(long, default_value_t = 0.5)]
    threshold_fraction: f64,
    /// Claimed energy per logic operation, J
    #[arg(long, conflicts_with = "claimed_kt")]
    claimed: Option<f64>,
    /// Claimed energy per logic operation, kT
    #[arg(long)]
    claimed_kt: Option<f64>,
    #[arg(long, value_enum, default_value = "per-operation")]
    accounting: AccountingArg,
    /// Exit 3 if the claim neglects input charging
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long)]
    cap: f64,
    #[arg(long)]
    res: f64,
    #[arg(long, default_value_t = 300.0)]
    temp: f64,
    /// Threshold in units of the noise sigma sqrt(kT/C)
    #[arg(long)]
    threshold_sigma: f64,
    /// Observation window, s; observations fall every R*C
    #[arg(long)]
    t_obs: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, env = "KTFLOOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct TankArgs {
    /// Inductance, H
    #[arg(long)]
    l: f64,
    #[arg(long)]
    c1: f64,
    #[arg(long)]
    c2: f64,
    /// Series resistance, ohm
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Initial voltage on C1, V
    #[arg(long)]
    v0: f64,
    /// Control energy per switch event, kT [default: short floor at 1e-30]
    #[arg(long)]
    e_switch_kt: Option<f64>,
    #[arg(long, default_value_t = 2)]
    n_switch: u32,
    #[arg(long, default_value_t = 300.0)]
    temp: f64,
    /// ODE step, s [default: sqrt(L*min(C1,C2))/100]
    #[arg(long)]
    dt: Option<f64>,
    /// Write the simulated waveform as CSV
    #[arg(long)]
    dump_waveform: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[arg(long)]
    cap: f64,
    #[arg(long)]
    res: f64,
    #[arg(long, default_value_t = 300.0)]
    temp: f64,
    /// Sample spacing, s
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "KTFLOOR_SEED", default_value_t = 0)]
    seed: u64,
    /// Start voltage, V [default: drawn from the stationary law]
    #[arg(long)]
    v0: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep config or run manifest (JSON)
    config: PathBuf,
    /// Override the config's output_path
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Floor(a) => cmd_floor(a, out),
        Command::Cycle(a) => cmd_cycle(a, out),
        Command::Mc(a) => cmd_mc(a, out),
        Command::Tank(a) => cmd_tank(a, out),
        Command::Path(a) => cmd_path(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn row(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key:<28}{value}")?;
    Ok(())
}

fn energy(out: &mut dyn Write, key: &str, joule: f64, kt: f64) -> Result<()> {
    row(out, key, format!("{kt:.2} kT ({} J)", sci(joule)))
}

#[derive(Serialize)]
struct FloorOutput {
    epsilon: f64,
    temperature: f64,
    observation_time: Option<f64>,
    correlation_time: Option<f64>,
    #[serde(flatten)]
    floor: FloorResult,
}

fn cmd_floor(a: FloorArgs, out: &mut dyn Write) -> Result<i32> {
    let env = PhysicalEnvironment::new(a.temp)?;
    let floor = match (a.t_obs, a.tau) {
        (Some(t_o), Some(tau)) => floor_long(&ErrorSpec::new(a.epsilon, t_o, tau)?, &env)?,
        _ => floor_short(&ErrorSpec::short(a.epsilon)?, &env)?,
    };
    if a.json {
        emit_json(
            &FloorOutput {
                epsilon: a.epsilon,
                temperature: a.temp,
                observation_time: a.t_obs,
                correlation_time: a.tau,
                floor,
            },
            out,
        )?;
    } else {
        row(out, "regime", format!("{:?}", floor.regime).to_lowercase())?;
        row(out, "epsilon", sci(a.epsilon))?;
        row(out, "temperature_k", sci(a.temp))?;
        if let (Some(t_o), Some(tau)) = (a.t_obs, a.tau) {
            row(out, "observation_time_s", sci(t_o))?;
            row(out, "correlation_time_s", sci(tau))?;
        }
        energy(out, "floor", floor.floor_joule, floor.floor_kt)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CycleOutput {
    capacitance: f64,
    swing_voltage: f64,
    resistance: f64,
    threshold_fraction: f64,
    #[serde(flatten)]
    report: AuditReport,
    claimed_energy_per_op: Option<f64>,
    claimed_energy_per_op_kt: Option<f64>,
    claim_verdict: Option<ClaimVerdict>,
}

fn cmd_cycle(a: CycleArgs, out: &mut dyn Write) -> Result<i32> {
    let env = PhysicalEnvironment::new(a.temp)?;
    let stage = RcStage::new(a.cap, a.res, a.swing, env)?;
    let friction = match (a.friction_per_transition, a.friction_kt) {
        (Some(j), _) => j,
        (None, Some(kt)) => env.kt_to_joules(kt),
        (None, None) => unreachable!("clap enforces the friction group"),
    };
    let gate = FollowerGate::with_threshold(stage, friction, a.threshold_fraction)?;
    let report = run_cycle_with(&gate, a.accounting.into())?;
    let claimed = a.claimed.or(a.claimed_kt.map(|kt| env.kt_to_joules(kt)));
    let claim_verdict = claimed.map(|c| audit_claim(&gate, c)).transpose()?;

    if a.json {
        emit_json(
            &CycleOutput {
                capacitance: a.cap,
                swing_voltage: a.swing,
                resistance: a.res,
                threshold_fraction: a.threshold_fraction,
                report,
                claimed_energy_per_op: claimed,
                claimed_energy_per_op_kt: claimed.map(|c| env.joules_to_kt(c)),
                claim_verdict,
            },
            out,
        )?;
    } else {
        row(out, "capacitance_f", sci(a.cap))?;
        row(out, "swing_v", sci(a.swing))?;
        row(out, "temperature_k", sci(a.temp))?;
        energy(
            out,
            "e_friction_cycle",
            report.e_friction_cycle,
            report.e_friction_cycle_kt,
        )?;
        energy(
            out,
            "e_input_cycle",
            report.e_input_cycle,
            report.e_input_cycle_kt,
        )?;
        energy(
            out,
            "e_total_cycle",
            report.e_total_cycle,
            report.e_total_cycle_kt,
        )?;
        row(
            out,
            "epsilon_per_observation",
            sci(report.epsilon_per_observation),
        )?;
        match report.floor_short_kt {
            Some(f) => row(out, "floor_short", format!("{f:.2} kT"))?,
            None => row(out, "floor_short", "not-applicable (epsilon >= 0.5)")?,
        }
        row(out, "accounting", report.accounting.label())?;
        row(out, "e_compared", format!("{:.2} kT", report.e_compared_kt))?;
        row(
            out,
            "verdict_friction_only",
            kebab(&report.verdict_friction_only),
        )?;
        row(out, "verdict_total", kebab(&report.verdict_total))?;
        if let (Some(c), Some(v)) = (claimed, claim_verdict) {
            energy(out, "claimed_per_op", c, env.joules_to_kt(c))?;
            row(out, "claim_verdict", kebab(&v))?;
        }
    }
    if a.strict && claim_verdict == Some(ClaimVerdict::NeglectsInputCharging) {
        return Ok(EXIT_STRICT);
    }
    Ok(EXIT_OK)
}

fn kebab<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

#[derive(Serialize)]
struct McOutput {
    capacitance: f64,
    resistance: f64,
    temperature: f64,
    sigma: f64,
    correlation_time: f64,
    threshold_sigma: f64,
    observation_time: f64,
    #[serde(flatten)]
    estimate: FirstPassageEstimate,
    warning: Option<String>,
}

fn cmd_mc(a: McArgs, out: &mut dyn Write) -> Result<i32> {
    let env = PhysicalEnvironment::new(a.temp)?;
    let stage = RcStage::new(a.cap, a.res, 0.0, env)?;
    let noise = OuProcess::from_stage(&stage)?;
    let sigma = noise.stationary_sigma();
    let est = first_passage_mc_with_workers(
        &stage,
        a.threshold_sigma * sigma,
        a.t_obs,
        a.trials,
        a.seed,
        a.workers,
    )?;
    let warning = est.low_confidence.then(|| {
        format!(
            "expected errors {:.3} < 10 over {} trials; estimate is low-confidence",
            est.expected_errors, est.trials
        )
    });
    if a.json {
        emit_json(
            &McOutput {
                capacitance: a.cap,
                resistance: a.res,
                temperature: a.temp,
                sigma,
                correlation_time: noise.correlation_time(),
                threshold_sigma: a.threshold_sigma,
                observation_time: a.t_obs,
                estimate: est,
                warning,
            },
            out,
        )?;
    } else {
        row(out, "sigma_v", sci(sigma))?;
        row(out, "correlation_time_s", sci(noise.correlation_time()))?;
        row(out, "threshold_sigma", sci(a.threshold_sigma))?;
        row(out, "n_observations", est.n_observations)?;
        row(out, "trials", est.trials)?;
        row(out, "seed", est.seed)?;
        row(out, "errors_observed", est.errors_observed)?;
        row(
            out,
            "epsilon_hat",
            format!("{} +/- {}", sci(est.epsilon_hat), sci(est.std_err)),
        )?;
        row(out, "analytic_independent", sci(est.analytic_prediction))?;
        if let Some(w) = &warning {
            row(out, "warning", w)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TankOutput {
    inductance: f64,
    c1: f64,
    c2: f64,
    series_resistance: f64,
    quality_factor: f64,
    initial_voltage: f64,
    temperature: f64,
    closed_form: TransferReport,
    simulated: TransferReport,
    ode_step: f64,
    e_switch_control_kt: f64,
    n_switch_events: u32,
    break_even: BreakEven,
}

fn cmd_tank(a: TankArgs, out: &mut dyn Write) -> Result<i32> {
    let env = PhysicalEnvironment::new(a.temp)?;
    let tank = TankCircuit::new(a.c1, a.c2, a.l, a.r, a.v0)?;
    let closed = tank.transfer_efficiency()?;
    let dt = a.dt.unwrap_or_else(|| tank.max_step());
    let waveform = tank.simulate_waveform(dt)?;
    let simulated = tank.simulate_transfer(dt)?;
    let e_switch_kt = a.e_switch_kt.unwrap_or_else(short_floor_default);
    let be = break_even(&tank, env.kt_to_joules(e_switch_kt), a.n_switch, &env)?;
    if let Some(path) = &a.dump_waveform {
        let file =
            fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_waveform_csv(&waveform, std::io::BufWriter::new(file))?;
    }

    if a.json {
        emit_json(
            &TankOutput {
                inductance: a.l,
                c1: a.c1,
                c2: a.c2,
                series_resistance: a.r,
                quality_factor: tank.quality_factor(),
                initial_voltage: a.v0,
                temperature: a.temp,
                closed_form: closed,
                simulated,
                ode_step: dt,
                e_switch_control_kt: e_switch_kt,
                n_switch_events: a.n_switch,
                break_even: be,
            },
            out,
        )?;
    } else {
        row(out, "quality_factor", sci(tank.quality_factor()))?;
        row(out, "t_switch_1_s", sci(closed.t_switch_1))?;
        row(out, "t_switch_2_s", sci(closed.t_switch_2))?;
        energy(
            out,
            "energy_initial",
            closed.energy_initial,
            env.joules_to_kt(closed.energy_initial),
        )?;
        energy(
            out,
            "energy_delivered",
            closed.energy_delivered,
            env.joules_to_kt(closed.energy_delivered),
        )?;
        row(out, "efficiency", format!("{:.6}", closed.efficiency))?;
        row(
            out,
            "efficiency_ode",
            format!("{:.6}", simulated.efficiency),
        )?;
        row(
            out,
            "e_switch_control",
            format!("{e_switch_kt:.2} kT x {}", a.n_switch),
        )?;
        energy(out, "net_saving", be.net_saving, be.net_saving_kt)?;
        energy(
            out,
            "break_even_energy",
            be.break_even_energy,
            be.break_even_energy_kt,
        )?;
        if let Some(path) = &a.dump_waveform {
            row(out, "waveform", path.display())?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_path(a: PathArgs, out: &mut dyn Write) -> Result<i32> {
    let env = PhysicalEnvironment::new(a.temp)?;
    let stage = RcStage::new(a.cap, a.res, 0.0, env)?;
    let noise = OuProcess::from_stage(&stage)?;
    let path = match a.v0 {
        Some(v0) => noise.sample_path(a.dt, a.n, a.seed, v0)?,
        None => noise.sample_stationary_path(a.dt, a.n, a.seed)?,
    };
    match &a.out {
        Some(p) => {
            let file =
                fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            path.write_csv(std::io::BufWriter::new(file))?;
        }
        None => path.write_csv(out)?,
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;
    let mut spec =
        load_config(&text).map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;
    if let Some(o) = a.out {
        spec.output_path = o;
    }
    let seed = match spec.seed {
        Some(s) => s,
        None => std::env::var("KTFLOOR_SEED")
            .ok()
            .map(|s| s.trim().parse::<u64>())
            .transpose()
            .map_err(|e| Error::Config(format!("KTFLOOR_SEED: {e}")))?
            .unwrap_or(0),
    };
    let table = run_sweep(&spec, seed, a.workers)?;

    let mut csv_bytes = Vec::new();
    table.write_csv(&mut csv_bytes)?;
    fs::write(&spec.output_path, csv_bytes)
        .map_err(|e| Error::Io(format!("{}: {e}", spec.output_path)))?;
    let manifest_path = RunManifest::path_for(&spec.output_path);
    let manifest = RunManifest::new(&spec, seed, table.rows.len());
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&manifest_path, text + "\n")
        .map_err(|e| Error::Io(format!("{manifest_path}: {e}")))?;

    row(out, "rows", table.rows.len())?;
    row(out, "csv", &spec.output_path)?;
    row(out, "manifest", manifest_path)?;
    Ok(EXIT_OK)
}
