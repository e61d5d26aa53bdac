mod config;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qdstack::designer::{parse_table_csv, table1_rows, DesignProblem};
use qdstack::format::sig9;
use qdstack::gate::{
    cnot_ideal_trace, cnot_sequence, compensated_cnot_sequence, evolve_pulsed, parse_sequence,
    product_state, pulsed_cnot_report, enumerate_basis, apply_ideal, BasisMode, CnotRoles, Integrator, PulseSystem,
    PulsedConfig, TwoElectronState,
};
use qdstack::pulse::{evolve_vee, two_level_trace, TwoLevelPulse, VeeSpec};
use qdstack::spectrum::adjacent_pairs;
use qdstack::{
    bulk_g, design_stack, eff_mass, level_table, solve_dot, sphere_g, validate_rows, validate_stack, DotGeometry,
    OpticalMode, PhysicalConstants, StackDesign,
};

use config::{PulseSpec, RunConfig};

/// Bad invocation or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "qdstack", version, about = "Spin-qubit gates in stacks of quantum dots of different size")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bulk conduction-band g-factor and mass of a material at an energy.
    GFactor {
        #[arg(long)]
        material: String,
        #[arg(long, default_value_t = 0.0)]
        energy_mev: f64,
    },
    /// g-factor of a spherical dot, term by term, at one or more radii.
    SphereG {
        #[arg(long, value_delimiter = ',', required = true)]
        radius_nm: Vec<f64>,
        #[arg(long, default_value = "gaas")]
        well: String,
        #[arg(long, default_value = "algaas035")]
        barrier: String,
    },
    /// Ground state of a disk-shaped dot: energy, envelope weights and g.
    WellSolve {
        #[arg(long)]
        half_width_nm: f64,
        #[arg(long, default_value_t = 10.0)]
        lateral_nm: f64,
        #[arg(long, default_value = "inas")]
        well: String,
        #[arg(long, default_value = "gaas")]
        barrier: String,
    },
    /// Spin-split levels E_{i,k} of every dot in a stack.
    Levels(StackArgs),
    /// Same-spin transition energies of adjacent dots.
    Transitions(StackArgs),
    /// Rotation and optical selectivity of a stack (JSON report).
    Check {
        #[command(flatten)]
        stack: StackArgs,
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        optical_mode: Mode,
    },
    /// Closed-form two-level Rabi trace.
    Pulse {
        #[arg(long)]
        rabi_mev: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        detuning_mev: f64,
        #[arg(long)]
        duration_ps: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Integrated three-level Vee trace.
    Vee {
        #[arg(long)]
        rabi12_mev: Option<f64>,
        /// Defaults to the 1-2 coupling.
        #[arg(long)]
        rabi13_mev: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        det12_mev: f64,
        #[arg(long)]
        det13_mev: Option<f64>,
        #[arg(long)]
        duration_ps: Option<f64>,
        /// Defaults to a 2000th of the π-pulse time.
        #[arg(long)]
        dt_ps: Option<f64>,
    },
    /// Run a gate sequence, ideal or pulsed.
    Gate(GateArgs),
    /// Search for a stack meeting all selectivity requirements.
    Design(DesignArgs),
    /// Validate a stack or a transition listing against the optical requirements.
    Validate {
        /// Embedded listing; only `table1` is available.
        #[arg(long)]
        fixture: Option<String>,
        /// CSV listing with header `k-l,dE00_meV,dE11_meV`.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        stack: StackArgs,
        #[arg(long, value_enum, default_value_t = Mode::Strict)]
        optical_mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Clone)]
struct StackArgs {
    /// Comma-separated dot half-widths; overrides the config stack.
    #[arg(long, value_delimiter = ',')]
    half_widths_nm: Option<Vec<f64>>,
    #[arg(long)]
    lateral_nm: Option<f64>,
    #[arg(long)]
    well: Option<String>,
    #[arg(long)]
    barrier: Option<String>,
    #[arg(long)]
    field_tesla: Option<f64>,
    #[arg(long)]
    b1_tesla: Option<f64>,
    #[arg(long)]
    tsw_ps: Option<f64>,
}

#[derive(Args)]
struct GateArgs {
    #[arg(long, value_enum, default_value_t = GateMode::Ideal)]
    mode: GateMode,
    /// Comma-separated tokens (C1, C2, C3, RT, C:<spin>:<k>-<l>, R:<dot>, optional @<deg>).
    #[arg(long, value_delimiter = ',')]
    sequence: Option<Vec<String>>,
    /// Control/target input: two of 0, 1, + (e.g. `10`, `++`).
    #[arg(long, default_value = "10")]
    input: String,
    /// Quarter-turn phase on the final C1 of the default sequence.
    #[arg(long)]
    compensate: bool,
    /// Fidelity report over the four basis inputs and `++` (pulsed mode).
    #[arg(long)]
    report: bool,
    #[arg(long, default_value_t = 50.0)]
    coulomb_mev: f64,
    #[arg(long, default_value_t = 8000)]
    steps_per_tsw: usize,
    #[arg(long, default_value_t = 20)]
    record_every: usize,
    #[arg(long, value_enum, default_value_t = Integ::Rk4)]
    integrator: Integ,
    #[command(flatten)]
    stack: StackArgs,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    n_dots: Option<usize>,
    #[arg(long)]
    field_tesla: Option<f64>,
    #[arg(long)]
    b1_tesla: Option<f64>,
    #[arg(long)]
    tsw_ps: Option<f64>,
    #[arg(long)]
    d_min_nm: Option<f64>,
    #[arg(long)]
    d_max_nm: Option<f64>,
    #[arg(long)]
    lateral_nm: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    SharedDot,
}

impl From<Mode> for OpticalMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => OpticalMode::Strict,
            Mode::SharedDot => OpticalMode::SharedDot,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateMode {
    Ideal,
    Pulsed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Integ {
    Rk4,
    Exact,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn build_stack(cfg: &RunConfig, a: &StackArgs) -> anyhow::Result<StackDesign> {
    let mut stack = match (&cfg.stack, &a.half_widths_nm) {
        (_, Some(ws)) => {
            let well = cfg.material(a.well.as_deref().unwrap_or("inas"))?;
            let barrier = cfg.material(a.barrier.as_deref().unwrap_or("gaas"))?;
            let lt = a.lateral_nm.unwrap_or(10.0);
            StackDesign {
                dots: ws.iter().map(|&d| DotGeometry::new(d, lt, well.clone(), barrier.clone())).collect(),
                field_tesla: 10.0,
                b1_tesla: 0.1,
                tsw_ps: 10.0,
                constants: PhysicalConstants::default(),
            }
        }
        (Some(s), None) => {
            if a.well.is_some() || a.barrier.is_some() || a.lateral_nm.is_some() {
                return Err(usage("--well, --barrier and --lateral-nm need --half-widths-nm"));
            }
            s.clone()
        }
        (None, None) => return Err(usage("no stack given: use --half-widths-nm or a config with `stack`")),
    };
    if let Some(b) = a.field_tesla {
        stack.field_tesla = b;
    }
    if let Some(b) = a.b1_tesla {
        stack.b1_tesla = b;
    }
    if let Some(t) = a.tsw_ps {
        stack.tsw_ps = t;
    }
    stack.validate()?;
    Ok(stack)
}

fn csv_line(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

fn parse_input(text: &str) -> anyhow::Result<([Complex64; 2], [Complex64; 2])> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let q = |c: char| match c {
        '0' => Ok([one, zero]),
        '1' => Ok([zero, one]),
        '+' => Ok([h, h]),
        _ => Err(usage(format!("input must be two of 0, 1, +; got `{text}`"))),
    };
    let cs: Vec<char> = text.chars().collect();
    if cs.len() != 2 {
        return Err(usage(format!("input must be two of 0, 1, +; got `{text}`")));
    }
    Ok((q(cs[0])?, q(cs[1])?))
}

fn state_rows(steps: &[(String, TwoElectronState)]) -> String {
    let basis = steps[0].1.basis();
    let mut header = vec!["step".to_string(), "op".to_string()];
    header.extend(basis.labels());
    let mut out = csv_line(&header);
    for (i, (op, s)) in steps.iter().enumerate() {
        let mut row = vec![i.to_string(), op.clone()];
        row.extend(s.populations().into_iter().map(sig9));
        out.push_str(&csv_line(&row));
    }
    out
}

fn run(cli: Cli, cfg: &RunConfig) -> anyhow::Result<String> {
    let consts = cfg.stack.as_ref().map(|s| s.constants).unwrap_or_default();
    let out = match cli.command {
        Command::GFactor { material, energy_mev } => {
            let m = cfg.material(&material)?;
            let g = bulk_g(&consts, &m, energy_mev)?;
            let mass = eff_mass(&m, energy_mev)?;
            format!("material,energy_mev,g,mass\n{},{},{},{}\n", m.name, sig9(energy_mev), sig9(g), sig9(mass))
        }
        Command::SphereG { radius_nm, well, barrier } => {
            let (a, b) = (cfg.material(&well)?, cfg.material(&barrier)?);
            let mut out = String::from(
                "radius_nm,energy_mev,w_well,w_barrier,term_g0,term_well,term_barrier,term_interface,g\n",
            );
            for r in radius_nm {
                let s = sphere_g(&consts, r, &a, &b)?;
                out.push_str(&csv_line(
                    &[
                        s.radius_nm,
                        s.energy_mev,
                        s.w_well,
                        s.w_barrier,
                        s.term_g0,
                        s.term_well,
                        s.term_barrier,
                        s.term_interface,
                        s.g,
                    ]
                    .map(sig9),
                ));
            }
            out
        }
        Command::WellSolve { half_width_nm, lateral_nm, well, barrier } => {
            let geom = DotGeometry::new(half_width_nm, lateral_nm, cfg.material(&well)?, cfg.material(&barrier)?);
            let s = solve_dot(&consts, &geom)?;
            let mut out = String::from(
                "half_width_nm,lateral_nm,ez_mev,lateral_mev,energy_mev,w_well,w_barrier,g_well,g_barrier,g,residual,barely_bound\n",
            );
            let mut row: Vec<String> = [
                half_width_nm,
                lateral_nm,
                s.well.energy_mev,
                s.lateral_mev,
                s.ground_energy_mev,
                s.well.w_well,
                s.well.w_barrier,
                s.g_well,
                s.g_barrier,
                s.g,
                s.well.residual,
            ]
            .into_iter()
            .map(sig9)
            .collect();
            row.push(s.well.barely_bound.to_string());
            out.push_str(&csv_line(&row));
            out
        }
        Command::Levels(a) => {
            let stack = build_stack(cfg, &a)?;
            let t = level_table(&stack)?;
            let mut out = String::from("dot,half_width_nm,energy_mev,g,E0_meV,E1_meV\n");
            for (k, d) in stack.dots.iter().enumerate() {
                let mut row = vec![(k + 1).to_string()];
                row.extend(
                    [d.half_width_nm, t.quantization_mev[k], t.g[k], t.levels[k][0], t.levels[k][1]].map(sig9),
                );
                out.push_str(&csv_line(&row));
            }
            out
        }
        Command::Transitions(a) => {
            let stack = build_stack(cfg, &a)?;
            let t = level_table(&stack)?;
            let mut out = String::from("k-l,dE00_meV,dE11_meV\n");
            for r in t.rows(&adjacent_pairs(t.n_dots()))? {
                out.push_str(&csv_line(&[r.label(), sig9(r.de00_mev), sig9(r.de11_mev)]));
            }
            out
        }
        Command::Check { stack, optical_mode } => {
            let stack = build_stack(cfg, &stack)?;
            let rep = validate_stack(&stack, optical_mode.into())?;
            serde_json::to_string_pretty(&rep)? + "\n"
        }
        Command::Pulse { rabi_mev, detuning_mev, duration_ps, samples } => {
            let pulse = match (rabi_mev, duration_ps) {
                (Some(r), Some(t)) => TwoLevelPulse { rabi_mev: r, detuning_mev, duration_ps: t },
                (None, None) => match cfg.pulses.iter().find_map(|p| match p {
                    PulseSpec::TwoLevel(p) => Some(*p),
                    PulseSpec::Vee(_) => None,
                }) {
                    Some(p) => p,
                    None => return Err(usage("give --rabi-mev and --duration-ps or a two-level pulse in the config")),
                },
                _ => return Err(usage("--rabi-mev and --duration-ps go together")),
            };
            pulse.validate()?;
            two_level_trace(&consts, &pulse, samples)?.to_csv()
        }
        Command::Vee { rabi12_mev, rabi13_mev, det12_mev, det13_mev, duration_ps, dt_ps } => {
            let spec = match (rabi12_mev, det13_mev, duration_ps) {
                (Some(r), Some(d), Some(t)) => {
                    let mut s = VeeSpec::new(&consts, r, d, t);
                    s.rabi_13_mev = rabi13_mev.unwrap_or(r);
                    s.detuning_12_mev = det12_mev;
                    if let Some(dt) = dt_ps {
                        s.dt_ps = dt;
                    }
                    s
                }
                (None, None, None) => match cfg.pulses.iter().find_map(|p| match p {
                    PulseSpec::Vee(v) => Some(*v),
                    PulseSpec::TwoLevel(_) => None,
                }) {
                    Some(v) => v,
                    None => {
                        return Err(usage("give --rabi12-mev, --det13-mev and --duration-ps or a vee pulse in the config"))
                    }
                },
                _ => return Err(usage("--rabi12-mev, --det13-mev and --duration-ps go together")),
            };
            spec.validate()?;
            evolve_vee(&consts, &spec)?.to_csv()
        }
        Command::Gate(g) => run_gate(cfg, g)?,
        Command::Design(d) => {
            let mut p = match &cfg.design {
                Some(p) => p.clone(),
                None => {
                    let (Some(n), Some(b), Some(t)) = (d.n_dots, d.field_tesla, d.tsw_ps) else {
                        return Err(usage("give --n-dots, --field-tesla and --tsw-ps or a config with `design`"));
                    };
                    DesignProblem::inas_gaas(n, b, t, 0)
                }
            };
            macro_rules! set {
                ($($f:ident),*) => { $( if let Some(v) = d.$f { p.$f = v; } )* };
            }
            set!(n_dots, field_tesla, b1_tesla, tsw_ps, d_min_nm, d_max_nm, lateral_nm, seed, starts, iterations);
            p.validate()?;
            let rep = design_stack(&p)?;
            match d.format {
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                Format::Csv => rep.table_csv(),
            }
        }
        Command::Validate { fixture, table, stack, optical_mode, format } => {
            let rep = match (fixture.as_deref(), &table) {
                (Some(_), Some(_)) => return Err(usage("--fixture and --table are exclusive")),
                (Some("table1"), None) | (None, Some(_)) => {
                    let rows = match &table {
                        Some(p) => {
                            let text = std::fs::read_to_string(p)
                                .map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
                            parse_table_csv(&text).map_err(|e| usage(e.to_string()))?
                        }
                        None => table1_rows(),
                    };
                    let tsw = stack.tsw_ps.or(cfg.stack.as_ref().map(|s| s.tsw_ps)).unwrap_or(10.0);
                    validate_rows(&consts, &rows, tsw, optical_mode.into())?
                }
                (Some(other), None) => return Err(usage(format!("unknown fixture `{other}` (available: table1)"))),
                (None, None) => validate_stack(&build_stack(cfg, &stack)?, optical_mode.into())?,
            };
            match format {
                Format::Csv => rep.table_csv(),
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
            }
        }
    };
    Ok(out)
}

fn run_gate(cfg: &RunConfig, g: GateArgs) -> anyhow::Result<String> {
    let roles = CnotRoles::default();
    let tokens = g.sequence.clone().unwrap_or_else(|| cfg.sequence.clone());
    let custom = !tokens.is_empty();
    if custom && g.compensate {
        return Err(usage("--compensate applies to the default sequence only"));
    }
    let explicit = parse_sequence(&tokens, &roles).map_err(|e| usage(e.to_string()))?;
    match g.mode {
        GateMode::Ideal => {
            let n_dots = match (&g.stack.half_widths_nm, &cfg.stack) {
                (Some(w), _) => w.len(),
                (None, Some(s)) => s.dots.len(),
                (None, None) => 3,
            };
            let (c, t) = parse_input(&g.input)?;
            let basis = Arc::new(enumerate_basis(n_dots, BasisMode::Strict));
            let input = product_state(basis, &roles, c, t)?;
            let steps: Vec<(String, TwoElectronState)> = if custom {
                let mut v = vec![("input".to_string(), input)];
                for op in &explicit {
                    let next = apply_ideal(op, &v.last().expect("non-empty").1)?;
                    v.push((op.to_string(), next));
                }
                v
            } else {
                let names = ["input", "C1", "C2", "C3", "RT", "C3", "C2", "C1"];
                cnot_ideal_trace(&input, &roles)?
                    .into_iter()
                    .zip(names)
                    .map(|(s, n)| (n.to_string(), s))
                    .collect()
            };
            Ok(state_rows(&steps))
        }
        GateMode::Pulsed => {
            let stack = build_stack(cfg, &g.stack)?;
            let sys = PulseSystem::from_stack(&stack)?;
            let seq = if custom {
                explicit
            } else if g.compensate {
                compensated_cnot_sequence(&sys.table, &roles)?
            } else {
                cnot_sequence(&roles)
            };
            let pc = PulsedConfig {
                coulomb_mev: g.coulomb_mev,
                steps_per_tsw: g.steps_per_tsw,
                integrator: match g.integrator {
                    Integ::Rk4 => Integrator::Rk4,
                    Integ::Exact => Integrator::Exact,
                },
                record_every: g.record_every,
            };
            pc.validate()?;
            if g.report {
                let rep = pulsed_cnot_report(&sys, &roles, &seq, &pc)?;
                return Ok(serde_json::to_string_pretty(&rep)? + "\n");
            }
            let (c, t) = parse_input(&g.input)?;
            let basis = Arc::new(enumerate_basis(stack.dots.len(), BasisMode::Strict));
            let input = product_state(basis, &roles, c, t)?;
            let run = evolve_pulsed(&sys, &seq, &input, &pc)?;
            if run.trace.max_trace_error() > 1e-6 {
                bail!("trace drift {} exceeds 1e-6", run.trace.max_trace_error());
            }
            Ok(run.trace.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match cli.config.as_deref().map(RunConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let target = cli.output.clone().or_else(|| cfg.output.clone());
    match run(cli, &cfg) {
        Ok(text) => {
            let res = match target {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("cannot write {}", p.display())),
                None => std::io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
            };
            match res {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
