//! Command-line surface: flux | profile | rectify | sweep | simulate | units.
//! Exit codes: 0 success, 1 numeric failure, 2 configuration or validation
//! error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rotorflux::analytic::{flux_breakdown, FluxConvention};
use rotorflux::model::{
    graded_masses, nondimensionalize, ChainSpec, CouplingMatrix, DimensionlessScaling,
};
use rotorflux::selfconsistent::{
    rectification_with, solve_profile_with, sweep_with, RectificationReport, SolverOptions,
};
use rotorflux::simulate::{integrate, sc_iterate, SimObservables};

use config::RunConfig;
use output::{emit, emit_metadata, fmt, fmt_opt, json_opt, Format, Table};

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<rotorflux::Error> for CliError {
    fn from(e: rotorflux::Error) -> Self {
        let code = if e.is_validation() || matches!(e, rotorflux::Error::DecoupledChain) {
            2
        } else {
            1
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Parser)]
#[command(
    name = "rotorflux",
    version,
    about = "Steady-state heat currents, self-consistent profiles, and rectification \
             for stochastic rotor chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Overrides the seed from the config file
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the solver residual tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-cut heat flux with its term breakdown at given bath temperatures
    Flux(CommonArgs),
    /// Self-consistent interior temperature profile
    Profile(CommonArgs),
    /// Forward and reversed steady fluxes for one boundary pair
    Rectify {
        #[command(flatten)]
        common: CommonArgs,
        /// Run the built-in graded-chain reference grid instead of a config
        #[arg(long)]
        table: bool,
    },
    /// Rectification reports over the configured boundary pairs
    Sweep(CommonArgs),
    /// Direct stochastic integration of the dynamics
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Iterate the interior bath temperatures to the self-consistent
        /// fixed point instead of a single fixed-profile run
        #[arg(long)]
        sc: bool,
    },
    /// Dimensionless parameter set and the scaling record
    Units(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Flux(common) => cmd_flux(&common),
        Command::Profile(common) => cmd_profile(&common),
        Command::Rectify { common, table } => cmd_rectify(&common, table),
        Command::Sweep(common) => cmd_sweep(&common),
        Command::Simulate { common, sc } => cmd_simulate(&common, sc),
        Command::Units(common) => cmd_units(&common),
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required"))?;
    RunConfig::load(path)
}

fn solver_options(common: &CommonArgs, cfg: &RunConfig) -> Result<SolverOptions, CliError> {
    let defaults = SolverOptions::default();
    Ok(SolverOptions {
        tolerance: common.tol.or(cfg.tol).unwrap_or(defaults.tolerance),
        convention: cfg.convention()?,
    })
}

fn cmd_flux(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let temps = cfg.temperature_profile()?;
    let convention = cfg.convention()?;
    let mut table = Table::new(vec!["alpha", "flux", "ft", "w1", "w2", "w3", "graded"]);
    for alpha in 0..spec.n_sites() - 1 {
        let b = flux_breakdown(&spec, &temps, alpha, convention)?;
        table.push(
            vec![
                (alpha + 1).to_string(),
                fmt(b.total()),
                fmt(b.ft),
                fmt(b.w1),
                fmt(b.w2),
                fmt(b.w3),
                fmt(b.graded),
            ],
            vec![
                json!(alpha + 1),
                json!(b.total()),
                json!(b.ft),
                json!(b.w1),
                json!(b.w2),
                json!(b.w3),
                json!(b.graded),
            ],
        );
    }
    emit(common.out.as_deref(), &table.render(common.format))
}

fn cmd_profile(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let (t_hot, t_cold) = cfg.boundary_pair()?;
    let options = solver_options(common, &cfg)?;
    let sol = solve_profile_with(&spec, t_hot, t_cold, &options)?;
    let mut table = Table::new(vec!["site", "temperature"]);
    for (j, &t) in sol.profile.temperatures().iter().enumerate() {
        table.push(
            vec![(j + 1).to_string(), fmt(t)],
            vec![json!(j + 1), json!(t)],
        );
    }
    eprintln!(
        "flux = {}, max_residual = {}, condition = {:.3e}",
        fmt(sol.flux),
        fmt(sol.max_residual),
        sol.condition
    );
    if sol.negative_temperatures {
        eprintln!("warning: non-positive interior temperature; outside model validity");
    }
    if sol.residual_warning {
        eprintln!("warning: flux residuals exceed the requested tolerance");
    }
    emit(common.out.as_deref(), &table.render(common.format))
}

fn rectification_columns() -> Vec<&'static str> {
    vec![
        "n_sites",
        "t_hot",
        "t_cold",
        "flux_left",
        "flux_right",
        "sum",
        "asymmetry",
        "max_residual",
    ]
}

fn push_report(table: &mut Table, n: usize, t_hot: f64, t_cold: f64, r: &RectificationReport) {
    table.push(
        vec![
            n.to_string(),
            fmt(t_hot),
            fmt(t_cold),
            fmt(r.flux_left),
            fmt(r.flux_right),
            fmt(r.sum),
            fmt(r.asymmetry),
            fmt(r.max_residual),
        ],
        vec![
            json!(n),
            json!(t_hot),
            json!(t_cold),
            json!(r.flux_left),
            json!(r.flux_right),
            json!(r.sum),
            json!(r.asymmetry),
            json!(r.max_residual),
        ],
    );
}

fn cmd_rectify(common: &CommonArgs, table_preset: bool) -> Result<(), CliError> {
    let mut table = Table::new(rectification_columns());
    if table_preset {
        if common.config.is_some() {
            return Err(CliError::config("--table and --config are mutually exclusive"));
        }
        // graded-chain reference grid: m1 = 1, mN = 0.5, zeta = kappa = lambda = 1,
        // nu = -0.11, both chain sizes, four boundary pairs each
        let options = SolverOptions {
            tolerance: common.tol.unwrap_or(SolverOptions::default().tolerance),
            convention: FluxConvention::default(),
        };
        for n in [16usize, 32] {
            let spec = ChainSpec::new(
                graded_masses(n, 1.0, 0.5)?,
                vec![1.0; n],
                vec![1.0; n],
                1.0,
                CouplingMatrix::nnn(n, 1.0, -0.11),
            )?;
            for (t_hot, t_cold) in [(0.2, 0.1), (0.3, 0.1), (0.5, 0.1), (0.4, 0.2)] {
                let r = rectification_with(&spec, t_hot, t_cold, &options)?;
                push_report(&mut table, n, t_hot, t_cold, &r);
            }
        }
        return emit(common.out.as_deref(), &table.render(common.format));
    }
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let (t_hot, t_cold) = cfg.boundary_pair()?;
    let options = solver_options(common, &cfg)?;
    let r = rectification_with(&spec, t_hot, t_cold, &options)?;
    push_report(&mut table, spec.n_sites(), t_hot, t_cold, &r);
    emit(common.out.as_deref(), &table.render(common.format))
}

fn cmd_sweep(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let pairs = cfg
        .pairs
        .clone()
        .ok_or_else(|| CliError::config("pairs = [[t_hot, t_cold], ..] is required for sweep"))?;
    let options = solver_options(common, &cfg)?;
    let rows = sweep_with(&spec, &pairs, &options);
    let mut table = Table::new(rectification_columns());
    for row in &rows {
        match &row.report {
            Ok(r) => push_report(&mut table, spec.n_sites(), row.t_hot, row.t_cold, r),
            Err(e) => eprintln!(
                "warning: pair ({}, {}) failed: {e}",
                row.t_hot, row.t_cold
            ),
        }
    }
    emit(common.out.as_deref(), &table.render(common.format))
}

/// Scaling applied ahead of a simulation; identity if the chain is already in
/// dimensionless form.
fn simulation_scaling(
    spec: &ChainSpec,
    temps: &[f64],
) -> Result<(ChainSpec, Vec<f64>, DimensionlessScaling), CliError> {
    // a chain with no couplings has no interaction energy scale to fix;
    // it is integrated in its own units
    let dimensionless = spec.coupling().is_decoupled()
        || ((spec.mass(0) - 1.0).abs() < 1e-12
            && spec.pinnings().iter().all(|&p| (p - 1.0).abs() < 1e-12)
            && spec
                .coupling()
                .uniform_nn_strength()
                .is_some_and(|l| (l - 1.0).abs() < 1e-12));
    if dimensionless {
        Ok((spec.clone(), temps.to_vec(), DimensionlessScaling::identity()))
    } else {
        Ok(nondimensionalize(spec, temps)?)
    }
}

fn observables_table(
    temps_physical: &[f64],
    obs: &SimObservables,
    scaling: &DimensionlessScaling,
) -> Table {
    let energy = scaling.energy;
    let flux_unit = energy * scaling.frequency;
    let n = temps_physical.len();
    let mut table = Table::new(vec![
        "site",
        "bath_temp",
        "kinetic_temp",
        "kinetic_temp_se",
        "bath_residual",
        "bath_residual_se",
        "flux_site",
        "flux_site_se",
        "flux_cut",
        "flux_cut_se",
    ]);
    for j in 0..n {
        let bond = (j < n - 1).then_some(j);
        let kin = obs.kinetic_temps[j];
        let res = obs.bath_residuals[j];
        let fs = bond.map(|b| obs.flux_site[b]);
        let fc = bond.map(|b| obs.flux_cut[b]);
        table.push(
            vec![
                (j + 1).to_string(),
                fmt(temps_physical[j]),
                fmt(kin.mean * energy),
                fmt_opt(finite(kin.std_err * energy)),
                fmt(res.mean * flux_unit),
                fmt_opt(finite(res.std_err * flux_unit)),
                fmt_opt(fs.map(|e| e.mean * flux_unit)),
                fmt_opt(fs.and_then(|e| finite(e.std_err * flux_unit))),
                fmt_opt(fc.map(|e| e.mean * flux_unit)),
                fmt_opt(fc.and_then(|e| finite(e.std_err * flux_unit))),
            ],
            vec![
                json!(j + 1),
                json!(temps_physical[j]),
                json!(kin.mean * energy),
                json_opt(finite(kin.std_err * energy)),
                json!(res.mean * flux_unit),
                json_opt(finite(res.std_err * flux_unit)),
                json_opt(fs.map(|e| e.mean * flux_unit)),
                json_opt(fs.and_then(|e| finite(e.std_err * flux_unit))),
                json_opt(fc.map(|e| e.mean * flux_unit)),
                json_opt(fc.and_then(|e| finite(e.std_err * flux_unit))),
            ],
        );
    }
    table
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn cmd_simulate(common: &CommonArgs, sc: bool) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let start = Instant::now();
    let mut meta: Vec<(String, String)> = Vec::new();

    let (temps_physical, obs, extra_meta) = if sc {
        let (t_hot, t_cold) = cfg.boundary_pair()?;
        let (spec_d, boundary_d, scaling) = simulation_scaling(&spec, &{
            let n = spec.n_sites();
            (0..n)
                .map(|j| t_hot + (t_cold - t_hot) * j as f64 / (n - 1) as f64)
                .collect::<Vec<_>>()
        })?;
        let mut sim = cfg.sim_config(common.seed)?;
        sim.dt *= scaling.time_factor();
        let sc_cfg = cfg.sc_iterate_config();
        let out = sc_iterate(
            &spec_d,
            boundary_d[0],
            *boundary_d.last().unwrap(),
            &sim,
            &sc_cfg,
        )?;
        for w in &out.observables.warnings {
            eprintln!("warning: {w}");
        }
        let temps_physical: Vec<f64> =
            out.profile.iter().map(|t| t * scaling.energy).collect();
        let extra = vec![
            ("iterations".to_string(), out.iterations.to_string()),
            (
                "final_residual".to_string(),
                format!("{:.6e}", out.residual_history.last().copied().unwrap_or(f64::NAN)),
            ),
            ("degenerate".to_string(), out.degenerate.to_string()),
        ];
        (temps_physical, (out.observables, scaling, sim), extra)
    } else {
        let temps = cfg.temperature_profile()?;
        let (spec_d, temps_d, scaling) = simulation_scaling(&spec, &temps)?;
        let mut sim = cfg.sim_config(common.seed)?;
        sim.dt *= scaling.time_factor();
        let obs = integrate(&spec_d, &temps_d, &sim)?;
        for w in &obs.warnings {
            eprintln!("warning: {w}");
        }
        (temps, (obs, scaling, sim), Vec::new())
    };

    let (obs, scaling, sim) = obs;
    let table = observables_table(&temps_physical, &obs, &scaling);
    meta.push(("command".to_string(), if sc { "simulate --sc" } else { "simulate" }.to_string()));
    meta.push(("n_sites".to_string(), spec.n_sites().to_string()));
    meta.push(("dt".to_string(), format!("{}", sim.dt / scaling.time_factor())));
    meta.push(("dt_dimensionless".to_string(), format!("{}", sim.dt)));
    meta.push(("n_steps".to_string(), sim.n_steps.to_string()));
    meta.push(("burn_in".to_string(), sim.burn_in.to_string()));
    meta.push(("n_trajectories".to_string(), sim.n_trajectories.to_string()));
    meta.push(("seed".to_string(), sim.seed.to_string()));
    meta.push(("scheme".to_string(), sim.scheme.as_str().to_string()));
    meta.push(("energy_scale".to_string(), format!("{}", scaling.energy)));
    meta.push(("mass_scale".to_string(), format!("{}", scaling.mass)));
    meta.push(("frequency_scale".to_string(), format!("{}", scaling.frequency)));
    for (k, v) in extra_meta {
        meta.push((k, v));
    }
    meta.push((
        "wall_time_s".to_string(),
        format!("{:.3}", start.elapsed().as_secs_f64()),
    ));
    emit(common.out.as_deref(), &table.render(common.format))?;
    emit_metadata(common.out.as_deref(), &meta)
}

fn cmd_units(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.chain_spec()?;
    let n = spec.n_sites();
    let boundary = cfg.boundary_pair().ok();
    let temps: Vec<f64> = match boundary {
        Some((hot, cold)) => (0..n)
            .map(|j| hot + (cold - hot) * j as f64 / (n - 1) as f64)
            .collect(),
        None => vec![1.0; n],
    };
    let (scaled, temps_scaled, scaling) = nondimensionalize(&spec, &temps)?;
    let mut table = Table::new(vec!["parameter", "value"]);
    let mut row = |name: &'static str, value: f64| {
        table.push(vec![name.to_string(), fmt(value)], vec![json!(name), json!(value)]);
    };
    row("energy_scale", scaling.energy);
    row("mass_scale", scaling.mass);
    row("frequency_scale", scaling.frequency);
    row("time_factor", scaling.time_factor());
    row("position_factor", scaling.position_factor());
    row("momentum_factor", scaling.momentum_factor());
    row("flux_factor", scaling.flux_factor());
    row("lambda_hat", scaled.coupling().uniform_nn_strength().unwrap_or(f64::NAN));
    row("pinning_hat", scaled.pinning(0));
    row("m1_hat", scaled.mass(0));
    row("mn_hat", scaled.mass(n - 1));
    row("nu_hat", scaled.coupling().get(0, 2));
    row("kappa_hat", scaled.kappa());
    row("zeta_hat_min", scaled.bath_couplings().iter().cloned().fold(f64::MAX, f64::min));
    row("zeta_hat_max", scaled.bath_couplings().iter().cloned().fold(f64::MIN, f64::max));
    if boundary.is_some() {
        let t_hot_hat = temps_scaled[0];
        row("t_hot_hat", t_hot_hat);
        row("t_cold_hat", temps_scaled[n - 1]);
        if t_hot_hat >= 1.0 {
            eprintln!(
                "warning: dimensionless hot temperature {t_hot_hat:.3} is not below 1; \
                 the low-temperature expansion is outside its domain"
            );
        }
    }
    emit(common.out.as_deref(), &table.render(common.format))
}
