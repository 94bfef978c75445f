//! `chronon`: run square-well quench experiments from a TOML configuration.
//!
//! Exit status is 0 on success, 1 when the input is rejected (bad flags,
//! bad configuration, violated constraint) and 2 when a run fails.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chronon_core::analysis::{paradox_report, PLANCK_LENGTH, SPEED_OF_LIGHT};
use chronon_core::config::{ModelKind, RunConfig};
use chronon_core::eigen::{extrapolated_energy, solve_stationary};
use chronon_core::hamiltonian::build_hamiltonian;
use chronon_core::output::{emit_all_plots, to_json, write_file};
use chronon_core::{
    estimate_v_bound, planck_limits, run_detector_scan, run_probability_protocol, run_signaling,
    trilemma, Error, OutputFormat, Phase, Result,
};

#[derive(Parser, Debug)]
#[command(name = "chronon", version, about = "Square-well quench laboratory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration; defaults to the reference scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for every random stream (overrides `run.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `run.out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv, json or both (overrides `run.format`).
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound states and energies of the pre- and post-quench wells.
    Eigen {
        /// Number of levels per well.
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Wavefunction snapshots of the configured model.
    Evolve,
    /// Normalization, residual and front-point diagnostics plus figure data.
    Paradox {
        /// Response model (overrides `model.kind`).
        #[arg(long)]
        model: Option<ModelKind>,
        /// Score all four models side by side.
        #[arg(long)]
        trilemma: bool,
    },
    /// Superluminal signaling attempt.
    Signal,
    /// Three-phase probability protocol and verdict.
    Experiment,
    /// Detector scan over positions and times.
    Scan,
    /// Bracket on the response speed.
    Vbound,
    /// Planck-scale delay and register speed limit.
    Limits,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    format: OutputFormat,
}

impl Ctx {
    fn emit(&self, name: &str, contents: &str) -> Result<()> {
        let path = write_file(&self.out, name, contents)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn emit_json<T: serde::Serialize>(&self, stem: &str, value: &T) -> Result<()> {
        if self.format.json() {
            self.emit(&format!("{stem}.json"), &to_json(value)?)?;
        }
        Ok(())
    }

    fn emit_csv(&self, stem: &str, contents: impl FnOnce() -> String) -> Result<()> {
        if self.format.csv() {
            self.emit(&format!("{stem}.csv"), &contents())?;
        }
        Ok(())
    }
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_toml_with_env("", std::env::vars())?,
    };
    if let Some(s) = g.seed {
        cfg.run.seed = s;
    }
    if let Some(o) = &g.out {
        cfg.run.out = o.to_string_lossy().into_owned();
    }
    if let Some(f) = g.format {
        cfg.run.format = f;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.global)?;
    if let Command::Paradox { model: Some(k), .. } = &cli.command {
        cfg.model.kind = *k;
    }
    if !matches!(cli.command, Command::Limits) {
        cfg.validate()?;
    }
    let ctx = Ctx {
        out: PathBuf::from(&cfg.run.out),
        format: cfg.run.format,
        cfg,
    };
    match cli.command {
        Command::Eigen { levels } => eigen(&ctx, levels),
        Command::Evolve => evolve(&ctx),
        Command::Paradox { trilemma, .. } => paradox(&ctx, trilemma),
        Command::Signal => signal(&ctx),
        Command::Experiment => experiment(&ctx),
        Command::Scan => scan(&ctx),
        Command::Vbound => vbound(&ctx),
        Command::Limits => limits(&ctx),
    }
}

#[derive(serde::Serialize)]
struct EnergyRow {
    phase: Phase,
    level: usize,
    energy: f64,
    /// Two-grid Richardson estimate of the continuum energy.
    extrapolated: f64,
}

fn eigen(ctx: &Ctx, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::Constraint("levels >= 1".into()));
    }
    let well = ctx.cfg.well_config();
    let grid = ctx.cfg.grid()?;
    let mut rows = Vec::new();
    let mut columns = Vec::new();
    for phase in [Phase::Pre, Phase::Post] {
        let h = build_hamiltonian(&grid, &well, phase)?;
        for level in 1..=levels {
            let (energy, psi) = solve_stationary(&h, level)?;
            let extrapolated = extrapolated_energy(&grid, &well, phase, level)?;
            rows.push(EnergyRow {
                phase,
                level,
                energy,
                extrapolated,
            });
            let tag = if phase == Phase::Pre { "pre" } else { "post" };
            columns.push((format!("{tag}_{level}"), psi));
        }
    }
    ctx.emit_json("energies", &rows)?;
    ctx.emit_csv("states", || {
        let mut s = String::from("x");
        for (name, _) in &columns {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for (i, x) in grid.positions().enumerate() {
            let _ = write!(s, "{x}");
            for (_, psi) in &columns {
                let _ = write!(s, ",{}", psi.amplitudes()[i].re);
            }
            s.push('\n');
        }
        s
    })
}

#[derive(serde::Serialize)]
struct Snapshot {
    time: f64,
    norm_sqr: f64,
}

fn evolve(ctx: &Ctx) -> Result<()> {
    let (scenario, _) = ctx.cfg.build()?;
    let mut times = ctx.cfg.evolve_times();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let states = scenario.trajectory(&times)?;
    let summary: Vec<Snapshot> = times
        .iter()
        .zip(&states)
        .map(|(&time, s)| Snapshot {
            time,
            norm_sqr: s.norm_sqr(),
        })
        .collect();
    ctx.emit_json("evolve", &summary)?;
    ctx.emit_csv("evolve", || {
        let mut s = String::from("time,x,re,im\n");
        for (t, psi) in times.iter().zip(&states) {
            for (x, a) in psi.grid().positions().zip(psi.amplitudes()) {
                let _ = writeln!(s, "{t},{x},{},{}", a.re, a.im);
            }
        }
        s
    })
}

fn paradox(ctx: &Ctx, all: bool) -> Result<()> {
    let (scenario, front_points) = ctx.cfg.build()?;
    let settings = ctx.cfg.trilemma_settings();
    if all {
        let scenarios = ctx.cfg.trilemma_scenarios()?;
        let table = trilemma(&scenarios, &settings)?;
        ctx.emit_json("trilemma", &table)?;
        ctx.emit_csv("trilemma", || table.to_csv())?;
        print!("{}", table.to_csv());
    } else {
        let report = paradox_report(&scenario, &settings, front_points)?;
        ctx.emit_json("paradox", &report)?;
        ctx.emit_csv("norm_audit", || report.audit.to_csv())?;
        println!("max_defect {}", report.audit.max_defect);
    }
    emit_all_plots(&scenario, &ctx.cfg.plot_params(), &ctx.out.join("plots"))?;
    eprintln!("wrote {}", ctx.out.join("plots").display());
    Ok(())
}

fn signal(ctx: &Ctx) -> Result<()> {
    let (scenario, _) = ctx.cfg.build()?;
    let outcome = run_signaling(&scenario, ctx.cfg.signaling_config(), ctx.cfg.run.seed)?;
    ctx.emit_json("signal", &outcome)?;
    ctx.emit_csv("signal", || {
        let mut s = String::from("half,n,hits,p_hat\n");
        for (name, b) in [
            ("first", &outcome.first_half),
            ("second", &outcome.second_half),
        ] {
            let _ = writeln!(s, "{name},{},{},{}", b.n_trials, b.n_hits, b.p_hat());
        }
        s
    })?;
    println!(
        "decoded_bit {} superluminal {}",
        outcome.decoded_bit, outcome.superluminal
    );
    Ok(())
}

fn experiment(ctx: &Ctx) -> Result<()> {
    let (scenario, _) = ctx.cfg.build()?;
    let report = run_probability_protocol(&scenario, ctx.cfg.protocol_config(), ctx.cfg.run.seed)?;
    ctx.emit_json("experiment", &report)?;
    ctx.emit_csv("experiment", || {
        let mut s = String::from("phase,time,n,hits,p_hat,p_model\n");
        let phases = [
            ("p0", Some(&report.p0)),
            ("px", Some(&report.px)),
            ("py", Some(&report.py)),
            ("ps", report.ps.as_ref()),
        ];
        for (name, e) in phases {
            if let Some(e) = e {
                let _ = writeln!(
                    s,
                    "{name},{},{},{},{},{}",
                    e.time, e.batch.n_trials, e.batch.n_hits, e.p_hat, e.p_model
                );
            }
        }
        s
    })?;
    println!(
        "verdict {}",
        serde_json::to_string(&report.verdict)?.trim_matches('"')
    );
    Ok(())
}

fn scan(ctx: &Ctx) -> Result<()> {
    let (scenario, _) = ctx.cfg.build()?;
    let c = &ctx.cfg;
    let table = run_detector_scan(
        &scenario,
        c.scan_width(),
        &c.scan_times(),
        &c.scan_positions(),
        c.scan.n,
        c.run.seed,
        c.scan.alpha,
    )?;
    ctx.emit_json("scan", &table)?;
    ctx.emit_csv("scan", || table.to_csv())
}

fn vbound(ctx: &Ctx) -> Result<()> {
    let (scenario, front_points) = ctx.cfg.build()?;
    let c = &ctx.cfg;
    let l_prime = c.vbound.l_prime.unwrap_or(front_points.l_prime);
    let report = estimate_v_bound(
        &scenario,
        c.detector(),
        l_prime,
        &c.vbound_schedule(),
        c.vbound.n,
        c.run.seed,
        c.vbound.alpha,
    )?;
    ctx.emit_json("vbound", &report)?;
    ctx.emit_csv("vbound", || {
        let mut s = String::from("t_s,p_hat,z,p_value,significant,upper_bound\n");
        for st in &report.steps {
            let ub = st.upper_bound.map(|u| u.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{ub}",
                st.t_s, st.p_hat, st.test.z_statistic, st.test.p_value, st.test.significant
            );
        }
        s
    })?;
    match report.v_upper {
        Some(u) => println!("v in [{}, {u}]", report.v_lower),
        None => println!("v >= {}", report.v_lower),
    }
    Ok(())
}

fn limits(ctx: &Ctx) -> Result<()> {
    let l = planck_limits(PLANCK_LENGTH, SPEED_OF_LIGHT)?;
    let json = l.to_json();
    println!("{}", serde_json::to_string_pretty(&json)?);
    ctx.emit_json("limits", &json)?;
    ctx.emit_csv("limits", || {
        format!(
            "quantity,value,unit\nl_P,{},m\nc,{},m/s\nt_P,{},s\nmax_ips_per_register,{},1/s\n",
            l.l_p, l.c, l.t_p, l.max_ips_per_register
        )
    })
}
