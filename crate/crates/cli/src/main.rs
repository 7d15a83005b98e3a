//! Command-line front end: figure-space parameter sweeps, divergence
//! diagnostics, series-vs-quadrature comparisons, circuit energies, and
//! Langevin runs. TOML config in, CSV out.
//!
//! Output is deterministic: fixed column order, floats at 17 significant
//! digits, a provenance comment block echoing the version, the exact command
//! line, and every fixed parameter. Exit codes: 0 success, 2 invalid
//! configuration, 3 comparison beyond the bar, 4 statistical check failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use bathvirial::bathspec::BathSpec;
use bathvirial::circuit::{
    energy_difference, johnson_nyquist_spectrum, mean_energy_capacitor,
    mean_energy_inductor, CircuitParams, ThermalWeight,
};
use bathvirial::langevin::{simulate_brownian, simulate_trajectory, SdeConfig};
use bathvirial::matsubara::{
    circuit_diff_series, i1_drude, i1_drude_dimensionless, i1_ohmic, i2_dimensionless,
    i2_drude, i2_ohmic, SeriesResult, Verdict, DEFAULT_N_TERMS,
};
use bathvirial::oracle;
use bathvirial::params::{
    from_dimensionless, to_dimensionless, DimensionlessParams, OscillatorParams, ParamsFile,
};
use bathvirial::special::line_fit;

#[derive(Parser)]
#[command(name = "bathvirial", version, about = "Bath-induced virial corrections: sweeps, oracles, circuits, Langevin runs")]
struct Cli {
    /// TOML parameter file (`[oscillator]` / `[bath]` blocks); flags win over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the figure-space I₂ series βI₂(x, ρ).
    I2Sweep(SweepArgs),
    /// Sweep the Drude I₁ series βI₁(x, ρ, σ).
    I1DrudeSweep(SweepArgs),
    /// Partial-sum diagnostics of the log-divergent Ohmic I₁ series.
    I1OhmicDiag(DiagArgs),
    /// Mean LCR-circuit energies and their difference.
    Circuit(CircuitArgs),
    /// Series vs quadrature (and route-vs-route) comparisons.
    OracleCompare(CompareArgs),
    /// Stochastic Brownian-oscillator run with batch-mean statistics.
    Langevin(LangevinArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepVar {
    X,
    Rho,
    Sigma,
}

#[derive(Args)]
struct SweepArgs {
    /// Which dimensionless ratio to sweep.
    #[arg(long, value_enum, default_value = "x")]
    var: SweepVar,
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 57)]
    steps: usize,
    /// Fixed x = βħω₀ (ignored when swept).
    #[arg(long)]
    x: Option<f64>,
    /// Fixed ρ = γ/ω₀ (ignored when swept).
    #[arg(long)]
    rho: Option<f64>,
    /// Fixed σ = ω_cut/ω₀ (Drude sweeps only).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_TERMS)]
    n_terms: usize,
}

#[derive(Args)]
struct DiagArgs {
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 4000)]
    n_terms: usize,
    /// Also fit the quadrature's cutoff-doubling slope and report the ratio.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long, default_value_t = 1.0)]
    inductance: f64,
    #[arg(long, default_value_t = 1.0)]
    capacitance: f64,
    #[arg(long, default_value_t = 0.5)]
    resistance: f64,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    kb: f64,
    /// Use the classical weight k_BT/2 instead of (ħω/4)coth(ħω/2k_BT).
    #[arg(long)]
    classical: bool,
    #[arg(long, default_value_t = 1e6)]
    cutoff: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_N_TERMS)]
    n_terms: usize,
    /// Also report the Johnson–Nyquist spectrum at these ω values.
    #[arg(long, value_delimiter = ',')]
    spectrum_at: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompareTarget {
    I1Drude,
    I2,
    I2Drude,
    Ec,
    V,
    I1Ohmic,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    which: CompareTarget,
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, default_value_t = 0.75)]
    rho: f64,
    #[arg(long)]
    sigma: Option<f64>,
    /// Series truncation; the Drude series carry an O(1/n_terms) tail, so
    /// tight bars need large truncations.
    #[arg(long, default_value_t = 1_000_000)]
    n_terms: usize,
    /// Relative-difference bar; exit code 3 beyond it.
    #[arg(long, default_value_t = 1e-4)]
    bar: f64,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct LangevinArgs {
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    kb: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, default_value_t = 1_000_000)]
    steps: usize,
    #[arg(long, default_value_t = 50_000)]
    burnin: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Noise intensity Γ; defaults to the thermal value 2μk_BT.
    #[arg(long)]
    noise_intensity: Option<f64>,
    /// Exit 4 unless equipartition and ⟨xẋ⟩ = 0 hold at 3σ.
    #[arg(long)]
    check: bool,
    /// Write the sampled trajectory (t, x, v) to this CSV path.
    #[arg(long)]
    traj_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    sample_every: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let config = match &cli.config {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file: ParamsFile = toml::from_str(&text).map_err(|e| e.to_string())?;
            Some(file)
        }
    };
    let mut sink = open_sink(&cli.out)?;
    let code = match cli.command {
        Command::I2Sweep(args) => cmd_i2_sweep(&mut *sink, &args, config.as_ref())?,
        Command::I1DrudeSweep(args) => cmd_i1_drude_sweep(&mut *sink, &args, config.as_ref())?,
        Command::I1OhmicDiag(args) => cmd_i1_ohmic_diag(&mut *sink, &args)?,
        Command::Circuit(args) => cmd_circuit(&mut *sink, &args)?,
        Command::OracleCompare(args) => cmd_oracle_compare(&mut *sink, &args, config.as_ref())?,
        Command::Langevin(args) => cmd_langevin(&mut *sink, &args, config.as_ref())?,
    };
    sink.flush().map_err(|e| e.to_string())?;
    Ok(code)
}

fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match out {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
    }
}

/// 17 significant digits: exact float round trip.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_verdict(v: &Verdict) -> String {
    match v {
        Verdict::Converged => "converged".into(),
        Verdict::LogDivergent { slope } => format!("log-divergent slope={}", fmt(*slope)),
        Verdict::Undetermined => "undetermined".into(),
    }
}

fn provenance(sink: &mut dyn Write, fixed: &[(&str, String)], columns: &str) -> Result<(), String> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    writeln!(sink, "# bathvirial {}", env!("CARGO_PKG_VERSION")).map_err(|e| e.to_string())?;
    writeln!(sink, "# command: {}", argv.join(" ")).map_err(|e| e.to_string())?;
    for (k, v) in fixed {
        writeln!(sink, "# {k} = {v}").map_err(|e| e.to_string())?;
    }
    writeln!(sink, "# columns: {columns}").map_err(|e| e.to_string())?;
    Ok(())
}

/// Figure-space fixed values resolved from the config file (if any) with
/// explicit flags winning: (x, rho, sigma).
type FigureSpace = (Option<f64>, Option<f64>, Option<f64>);

fn resolve_figure_space(
    args: &SweepArgs,
    config: Option<&ParamsFile>,
) -> Result<FigureSpace, String> {
    let mut x = None;
    let mut rho = None;
    let mut sigma = None;
    if let Some(file) = config {
        let p = file.oscillator_params().map_err(|e| e.to_string())?;
        let bath = file.bath_spec().map_err(|e| e.to_string())?;
        let d = to_dimensionless(&p, &bath);
        (x, rho, sigma) = (Some(d.x), Some(d.rho), d.sigma);
    }
    Ok((args.x.or(x), args.rho.or(rho), args.sigma.or(sigma)))
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, String> {
    if !args.start.is_finite() || !args.stop.is_finite() || args.start >= args.stop || args.steps < 2 {
        return Err(format!(
            "need start < stop and steps >= 2; got [{}, {}] with {} steps",
            args.start, args.stop, args.steps
        ));
    }
    Ok((0..args.steps)
        .map(|i| args.start + (args.stop - args.start) * i as f64 / (args.steps - 1) as f64)
        .collect())
}

fn cmd_i2_sweep(
    sink: &mut dyn Write,
    args: &SweepArgs,
    config: Option<&ParamsFile>,
) -> Result<ExitCode, String> {
    if args.var == SweepVar::Sigma {
        return Err("the I2 sweep is Ohmic; sigma is not a variable here".into());
    }
    let (x0, rho0, _) = resolve_figure_space(args, config)?;
    let grid = sweep_grid(args)?;
    let fixed_name = if args.var == SweepVar::X { "rho" } else { "x" };
    let fixed_val = match args.var {
        SweepVar::X => rho0.ok_or("fixed --rho required when sweeping x")?,
        _ => x0.ok_or("fixed --x required when sweeping rho")?,
    };

    let rows: Result<Vec<(f64, SeriesResult)>, String> = grid
        .par_iter()
        .map(|&v| {
            let (x, rho) = match args.var {
                SweepVar::X => (v, fixed_val),
                _ => (fixed_val, v),
            };
            let d = DimensionlessParams::new(x, rho, None).map_err(|e| e.to_string())?;
            let s = i2_dimensionless(&d, args.n_terms).map_err(|e| e.to_string())?;
            Ok((v, s))
        })
        .collect();
    let rows = rows?;

    let var_name = if args.var == SweepVar::X { "x" } else { "rho" };
    provenance(
        sink,
        &[
            (fixed_name, fmt(fixed_val)),
            ("n_terms", args.n_terms.to_string()),
        ],
        &format!("{var_name},beta_i2,verdict"),
    )?;
    for (v, s) in rows {
        writeln!(sink, "{},{},{}", fmt(v), fmt(s.estimate), fmt_verdict(&s.verdict))
            .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_i1_drude_sweep(
    sink: &mut dyn Write,
    args: &SweepArgs,
    config: Option<&ParamsFile>,
) -> Result<ExitCode, String> {
    let (x0, rho0, sigma0) = resolve_figure_space(args, config)?;
    let grid = sweep_grid(args)?;
    let need = |v: Option<f64>, name: &str| v.ok_or(format!("fixed --{name} required"));
    let (x_fix, rho_fix, sigma_fix) = match args.var {
        SweepVar::X => (None, Some(need(rho0, "rho")?), Some(need(sigma0, "sigma")?)),
        SweepVar::Rho => (Some(need(x0, "x")?), None, Some(need(sigma0, "sigma")?)),
        SweepVar::Sigma => (Some(need(x0, "x")?), Some(need(rho0, "rho")?), None),
    };

    let rows: Result<Vec<(f64, SeriesResult)>, String> = grid
        .par_iter()
        .map(|&v| {
            let x = x_fix.unwrap_or(v);
            let rho = rho_fix.unwrap_or(v);
            let sigma = sigma_fix.unwrap_or(v);
            let d =
                DimensionlessParams::new(x, rho, Some(sigma)).map_err(|e| e.to_string())?;
            let s = i1_drude_dimensionless(&d, args.n_terms).map_err(|e| e.to_string())?;
            Ok((v, s))
        })
        .collect();
    let rows = rows?;

    let var_name = match args.var {
        SweepVar::X => "x",
        SweepVar::Rho => "rho",
        SweepVar::Sigma => "sigma",
    };
    let mut fixed: Vec<(&str, String)> = vec![("n_terms", args.n_terms.to_string())];
    if let Some(s) = sigma_fix {
        fixed.insert(0, ("sigma", fmt(s)));
    }
    if let Some(r) = rho_fix {
        fixed.insert(0, ("rho", fmt(r)));
    }
    if let Some(x) = x_fix {
        fixed.insert(0, ("x", fmt(x)));
    }
    provenance(sink, &fixed, &format!("{var_name},beta_i1,verdict"))?;
    for (v, s) in rows {
        writeln!(sink, "{},{},{}", fmt(v), fmt(s.estimate), fmt_verdict(&s.verdict))
            .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_i1_ohmic_diag(sink: &mut dyn Write, args: &DiagArgs) -> Result<ExitCode, String> {
    let d = DimensionlessParams::new(args.x, args.rho, None).map_err(|e| e.to_string())?;
    let (p, bath) = from_dimensionless(&d, 1.0, 1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let s = i1_ohmic(&p, args.n_terms).map_err(|e| e.to_string())?;

    let start = args.n_terms / 10;
    let ln_n: Vec<f64> = (start..args.n_terms).map(|i| ((i + 1) as f64).ln()).collect();
    let fit = line_fit(&ln_n, &s.partial_sums[start..]);
    let expected_slope = -p.hbar * p.gamma / std::f64::consts::PI;

    let mut fixed = vec![
        ("x", fmt(args.x)),
        ("rho", fmt(args.rho)),
        ("n_terms", args.n_terms.to_string()),
        ("verdict", fmt_verdict(&s.verdict)),
        ("fit_slope", fmt(fit.slope)),
        ("fit_r_squared", fmt(fit.r_squared)),
        ("minus_hbar_gamma_over_pi", fmt(expected_slope)),
    ];
    if args.oracle {
        let lam = 2.0 * std::f64::consts::PI * (args.n_terms as f64) / p.beta_hbar();
        let q1 = oracle::i1_integral(&p, &bath, lam, 1e-9).map_err(|e| e.to_string())?;
        let q2 = oracle::i1_integral(&p, &bath, 2.0 * lam, 1e-9).map_err(|e| e.to_string())?;
        let oracle_slope = (q2.value - q1.value) / 2f64.ln();
        fixed.push(("oracle_cutoff_slope", fmt(oracle_slope)));
        fixed.push(("series_over_oracle_slope", fmt(fit.slope / oracle_slope)));
    }
    provenance(sink, &fixed, "n,partial_sum")?;

    let stride = (args.n_terms / 256).max(1);
    for (i, sum) in s.partial_sums.iter().enumerate() {
        let n = i + 1;
        if n % stride == 0 || n == args.n_terms {
            writeln!(sink, "{n},{}", fmt(*sum)).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_circuit(sink: &mut dyn Write, args: &CircuitArgs) -> Result<ExitCode, String> {
    let c = CircuitParams::new(
        args.inductance,
        args.capacitance,
        args.resistance,
        args.temperature,
        args.hbar,
        args.kb,
    )
    .map_err(|e| e.to_string())?;
    let weight = if args.classical { ThermalWeight::Classical } else { ThermalWeight::Quantum };
    let el = mean_energy_inductor(&c, weight, args.cutoff, args.tol).map_err(|e| e.to_string())?;
    let ec = mean_energy_capacitor(&c, weight, args.cutoff, args.tol).map_err(|e| e.to_string())?;
    let diff = energy_difference(&c, weight, args.cutoff, args.tol).map_err(|e| e.to_string())?;

    provenance(
        sink,
        &[
            ("L", fmt(c.inductance)),
            ("C", fmt(c.capacitance)),
            ("R", fmt(c.resistance)),
            ("T", fmt(c.temperature)),
            ("hbar", fmt(c.hbar)),
            ("kB", fmt(c.kb)),
            ("gamma", fmt(c.gamma())),
            ("omega0", fmt(c.omega0())),
            ("weight", if args.classical { "classical".into() } else { "quantum".into() }),
            ("cutoff", fmt(args.cutoff)),
            ("n_terms", args.n_terms.to_string()),
        ],
        "quantity,value,err,cutoff_stable",
    )?;
    for (name, q) in [("E_L", &el), ("E_C", &ec), ("E_L-E_C", &diff)] {
        writeln!(sink, "{name},{},{},{}", fmt(q.value), fmt(q.err), q.cutoff_extrapolated)
            .map_err(|e| e.to_string())?;
    }
    if c.hbar > 0.0 {
        let series = circuit_diff_series(&c.to_oscillator(), args.n_terms)
            .map_err(|e| e.to_string())?;
        writeln!(
            sink,
            "series_E_L-E_C,{},{},{}",
            fmt(series.estimate),
            fmt(series.err_estimate),
            fmt_verdict(&series.verdict)
        )
        .map_err(|e| e.to_string())?;
    }
    for &w in &args.spectrum_at {
        writeln!(sink, "S_F({w}),{},0,true", fmt(johnson_nyquist_spectrum(&c, w)))
            .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_compare(
    sink: &mut dyn Write,
    args: &CompareArgs,
    config: Option<&ParamsFile>,
) -> Result<ExitCode, String> {
    // figure-space point from the config when present, flags winning
    let (mut x, mut rho, mut sigma) = (args.x, args.rho, args.sigma);
    if let Some(file) = config {
        let p = file.oscillator_params().map_err(|e| e.to_string())?;
        let bath = file.bath_spec().map_err(|e| e.to_string())?;
        let d = to_dimensionless(&p, &bath);
        x = d.x;
        rho = d.rho;
        sigma = sigma.or(d.sigma);
    }
    let d = DimensionlessParams::new(x, rho, sigma).map_err(|e| e.to_string())?;
    let (p, bath) = from_dimensionless(&d, 1.0, 1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let cutoff = args.cutoff.unwrap_or_else(|| oracle::default_cutoff(&p, &bath));

    provenance(
        sink,
        &[
            ("x", fmt(x)),
            ("rho", fmt(rho)),
            ("sigma", sigma.map_or("none".into(), fmt)),
            ("n_terms", args.n_terms.to_string()),
            ("cutoff", fmt(cutoff)),
            ("bar", fmt(args.bar)),
        ],
        "quantity,series,oracle,rel_diff,status",
    )?;

    let mut all_ok = true;
    let bar = args.bar;
    let mut emit = |sink: &mut dyn Write, name: &str, series: f64, orac: f64| -> Result<(), String> {
        let rel = ((series - orac) / orac).abs();
        let ok = rel <= bar;
        all_ok &= ok;
        writeln!(
            sink,
            "{name},{},{},{},{}",
            fmt(series),
            fmt(orac),
            fmt(rel),
            if ok { "ok" } else { "beyond-bar" }
        )
        .map_err(|e| e.to_string())
    };

    match args.which {
        CompareTarget::I1Drude => {
            let drude = require_drude(&bath)?;
            let s = i1_drude(&p, &drude, args.n_terms).map_err(|e| e.to_string())?;
            let q = oracle::i1_integral(&p, &drude, cutoff, args.tol).map_err(|e| e.to_string())?;
            emit(sink, "i1_drude", s.estimate, q.value)?;
        }
        CompareTarget::I2 => {
            // the figure-space series against its symmetric frequency
            // integral, which vanishes for Ohmic friction: reported honestly,
            // beyond any reasonable bar (docs/formulas.md)
            let s = i2_ohmic(&p, args.n_terms.min(100_000)).map_err(|e| e.to_string())?;
            let ohmic = BathSpec::Ohmic { gamma: p.gamma };
            let q = oracle::i2_integral(&p, &ohmic, cutoff, args.tol).map_err(|e| e.to_string())?;
            emit(sink, "i2_ohmic", s.estimate, q.value)?;
        }
        CompareTarget::I2Drude => {
            let drude = require_drude(&bath)?;
            let s = i2_drude(&p, &drude, args.n_terms).map_err(|e| e.to_string())?;
            let q = oracle::i2_integral(&p, &drude, cutoff, args.tol).map_err(|e| e.to_string())?;
            emit(sink, "i2_drude", s.estimate, q.value)?;
        }
        CompareTarget::Ec => {
            // two independent quadrature routes for one integral: circuit
            // capacitor energy vs oscillator potential energy, plus the
            // classical equipartition limit
            let c = CircuitParams::new(
                1.0 / p.omega0,
                p.gamma / p.omega0,
                1.0,
                p.temperature,
                p.hbar,
                p.kb,
            )
            .map_err(|e| e.to_string())?;
            let ec = mean_energy_capacitor(&c, ThermalWeight::Quantum, cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            let ohmic = BathSpec::Ohmic { gamma: c.gamma() };
            let v = oracle::position_variance(&c.to_oscillator(), &ohmic, cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            emit(sink, "ec_vs_potential", ec.value, v.value)?;
            let ec_cl = mean_energy_capacitor(&c, ThermalWeight::Classical, cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            emit(sink, "ec_classical", ec_cl.value, 0.5 * c.kb * c.temperature)?;
        }
        CompareTarget::V => {
            // the energy-balance triangle rearranged:
            // <V> quadrature vs <K> − (I2 − I1)/2 with series corrections
            let drude = require_drude(&bath)?;
            let v = oracle::position_variance(&p, &drude, cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            let k = oracle::mean_kinetic_energy(&p, &drude, cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            let i1 = i1_drude(&p, &drude, args.n_terms).map_err(|e| e.to_string())?.estimate;
            let i2 = i2_drude(&p, &drude, args.n_terms).map_err(|e| e.to_string())?.estimate;
            emit(sink, "v_vs_k_minus_half_i2_minus_i1", k.value - 0.5 * (i2 - i1), v.value)?;
        }
        CompareTarget::I1Ohmic => {
            // log-divergent: slopes duel instead of values
            let n = args.n_terms.min(100_000);
            let s = i1_ohmic(&p, n).map_err(|e| e.to_string())?;
            let start = n / 10;
            let ln_n: Vec<f64> = (start..n).map(|i| ((i + 1) as f64).ln()).collect();
            let fit = line_fit(&ln_n, &s.partial_sums[start..]);
            let q1 = oracle::i1_integral(&p, &bath, cutoff, args.tol).map_err(|e| e.to_string())?;
            let q2 = oracle::i1_integral(&p, &bath, 2.0 * cutoff, args.tol)
                .map_err(|e| e.to_string())?;
            let oracle_slope = (q2.value - q1.value) / 2f64.ln();
            emit(sink, "i1_ohmic_log_slope", fit.slope, oracle_slope)?;
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn require_drude(bath: &BathSpec) -> Result<BathSpec, String> {
    match bath {
        BathSpec::Drude { .. } => Ok(*bath),
        BathSpec::Ohmic { .. } => Err("this comparison needs a Drude bath: pass --sigma".into()),
    }
}

fn cmd_langevin(
    sink: &mut dyn Write,
    args: &LangevinArgs,
    config: Option<&ParamsFile>,
) -> Result<ExitCode, String> {
    let p = match config {
        Some(file) => file.oscillator_params().map_err(|e| e.to_string())?,
        None => {
            OscillatorParams::new(args.m, args.omega0, args.gamma, args.temperature, 0.0, args.kb)
                .map_err(|e| e.to_string())?
        }
    };
    let mut cfg = SdeConfig::new(args.dt, args.steps, args.burnin, args.seed);
    cfg.noise_intensity = args.noise_intensity;
    cfg.validate(&p).map_err(|e| e.to_string())?; // exit 2 before any integration

    let stats = simulate_brownian(&p, &cfg).map_err(|e| e.to_string())?;
    provenance(
        sink,
        &[
            ("omega0", fmt(p.omega0)),
            ("gamma", fmt(p.gamma)),
            ("T", fmt(p.temperature)),
            ("m", fmt(p.m)),
            ("dt", fmt(cfg.dt)),
            ("steps", cfg.n_steps.to_string()),
            ("burnin", cfg.n_burnin.to_string()),
            ("seed", cfg.seed.to_string()),
            (
                "noise_intensity",
                fmt(cfg.noise_intensity.unwrap_or(2.0 * p.mu() * p.kb * p.temperature)),
            ),
        ],
        "quantity,value,std_err",
    )?;
    let xf = stats.mean_xf.expect("store_noise defaults on");
    let balance = stats.virial_balance(&p);
    for (name, est) in [
        ("mean_x2", stats.mean_x2),
        ("mean_v2", stats.mean_v2),
        ("mean_xv", stats.mean_xv),
        ("mean_xF", xf),
        ("virial_balance", balance),
    ] {
        writeln!(sink, "{name},{},{}", fmt(est.value), fmt(est.std_err))
            .map_err(|e| e.to_string())?;
    }

    if let Some(path) = &args.traj_out {
        let traj = simulate_trajectory(&p, &cfg, args.sample_every).map_err(|e| e.to_string())?;
        let f = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut w = std::io::BufWriter::new(f);
        writeln!(w, "# bathvirial {}", env!("CARGO_PKG_VERSION")).map_err(|e| e.to_string())?;
        writeln!(w, "# columns: t,x,v").map_err(|e| e.to_string())?;
        for (i, (xv, vv)) in traj.x.iter().zip(&traj.v).enumerate() {
            writeln!(w, "{},{},{}", fmt(i as f64 * traj.dt), fmt(*xv), fmt(*vv))
                .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }

    if args.check {
        let kinetic_target = p.kb * p.temperature / p.m;
        let potential_target = p.kb * p.temperature / (p.m * p.omega0 * p.omega0);
        let checks = [
            ("mean_v2", stats.mean_v2.sigmas_from(kinetic_target)),
            ("mean_x2", stats.mean_x2.sigmas_from(potential_target)),
            ("mean_xv", stats.mean_xv.sigmas_from(0.0)),
        ];
        for (name, sigmas) in checks {
            if sigmas >= 3.0 {
                eprintln!("check failed: {name} off by {sigmas:.2} sigma");
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
