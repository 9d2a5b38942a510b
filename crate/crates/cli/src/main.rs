//! Command-line front door: drift verification, inequality audits,
//! simulations, relaxation-time and growth experiments, size-bound probes,
//! and staircase rendering.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure,
//! 2 usage error.

mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use thiserror::Error;

use evlab_core::coloured::ColouredConfiguration;
use evlab_core::drift::{verify_drift, DriftFunctional, DriftReport};
use evlab_core::experiments::{
    censored_from_tau, censoring_fraction, growth_csv, growth_exponent, probe_exclusion_growth,
    probe_recurrence, probe_small_beta_moments, replica_rng, run_growth_replicas, run_tau_replicas,
    size_bound_probe, tail_index_estimate, tau_csv, RunSpec, TailMethod,
};
use evlab_core::kernel::{sample_event, step_distribution, ExactParams};
use evlab_core::lyapunov::{f1, f2, inequality_audit, rho2};
use evlab_core::{rat, Configuration, Params, Rat};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Parser)]
#[command(name = "evlab", version, about = "Exclusion-voter process laboratory")]
struct Cli {
    /// Worker threads for replica-parallel commands (fallback: EVLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare closed-form drifts against the exact enumeration oracle.
    DriftCheck(DriftCheckArgs),
    /// Evaluate the functional inequality suite.
    Audit(AuditArgs),
    /// Stream one trajectory (optionally the coloured coupling) as CSV.
    Simulate(SimulateArgs),
    /// Sample relaxation times over replicas.
    Tau(TauArgs),
    /// Track hybrid-zone growth over replicas.
    Growth(GrowthArgs),
    /// Render a configuration's staircase as SVG.
    Render(RenderArgs),
    /// Monte Carlo probes: the maximal-size bound and exploratory sweeps.
    Probe(ProbeArgs),
}

#[derive(Args)]
struct DriftCheckArgs {
    /// Mixing parameter, decimal or fraction (e.g. 4/7). Exact.
    #[arg(long)]
    beta: String,
    /// Exclusion parameter, decimal or fraction. Exact.
    #[arg(long)]
    p: String,
    /// Check every configuration with |S| <= this bound (at most 16).
    #[arg(long, default_value_t = 10)]
    max_size: u64,
    /// f1, f2, phi0, phi0.5, phi1, phi2, or all.
    #[arg(long, default_value = "all")]
    functional: String,
    /// Write the full report CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Single configuration: block list ("8,3,4,...") or 0/1 word.
    #[arg(long)]
    s0: Option<String>,
    /// Audit every configuration with |S| <= this bound instead.
    #[arg(long)]
    max_size: Option<u64>,
    /// Additionally audit this many random configurations.
    #[arg(long, default_value_t = 0)]
    random: u64,
    /// Size bound for the random configurations.
    #[arg(long, default_value_t = 200)]
    random_max_size: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON report here (single-configuration mode).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    beta: String,
    #[arg(long)]
    p: String,
    /// Initial configuration; empty for the ground state.
    #[arg(long, default_value = "")]
    s0: String,
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Track the coloured coupling from the canonical initial colouring.
    #[arg(long)]
    coloured: bool,
    /// Dump the exact one-step law of s0 as JSON before simulating.
    #[arg(long)]
    law_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TauArgs {
    #[arg(long)]
    beta: String,
    #[arg(long)]
    p: String,
    #[arg(long, default_value = "01")]
    s0: String,
    #[arg(long, default_value_t = 10_000)]
    replicas: u32,
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the censoring-aware survival-slope tail estimate.
    #[arg(long)]
    estimate_tail: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run specification JSON here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    beta: String,
    #[arg(long)]
    p: String,
    #[arg(long, default_value = "")]
    s0: String,
    #[arg(long, default_value_t = 1_000_000)]
    horizon: u64,
    #[arg(long, default_value_t = 32)]
    replicas: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the median log-log slope of the running maximum size.
    #[arg(long)]
    slope: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    s0: String,
    /// Draw the largest inscribed rectangle.
    #[arg(long)]
    highlight_rect: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// size-bound, small-beta, recurrence, or exclusion-growth.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value = "0")]
    beta: String,
    #[arg(long, default_value = "0.5")]
    p: String,
    #[arg(long, default_value = "")]
    s0: String,
    #[arg(long, default_value_t = 10_000)]
    t: u64,
    #[arg(long, default_value_t = 1000)]
    replicas: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses "a/b", an integer, or a decimal into an exact rational.
fn parse_ratio(text: &str) -> Result<Rat, CliError> {
    let text = text.trim();
    let bad = || CliError::Usage(format!("cannot parse {text:?} as a number in [0, 1]"));
    let value = if let Some((num, den)) = text.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        rat(num, den)
    } else if let Some((int, frac)) = text.split_once('.') {
        let int: i128 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: i128 = frac.parse().map_err(|_| bad())?;
        let scale = 10i128.pow(frac.len() as u32);
        rat(int * scale + digits, scale)
    } else {
        Rat::from_integer(text.parse::<i128>().map_err(|_| bad())?)
    };
    if value < Rat::zero() || value > Rat::from_integer(1) {
        return Err(bad());
    }
    Ok(value)
}

/// Parses a configuration given as a comma-separated block list or a 0/1
/// word; the empty string is the ground state.
fn parse_configuration(text: &str) -> Result<Configuration, CliError> {
    let text = text.trim();
    if text.is_empty() || text == "ground" {
        return Ok(Configuration::ground());
    }
    if text.contains(',') {
        let blocks: Result<Vec<u64>, _> = text.split(',').map(|b| b.trim().parse()).collect();
        let blocks = blocks.map_err(|_| CliError::Usage(format!("bad block list {text:?}")))?;
        Configuration::from_blocks(blocks)
            .map_err(|e| CliError::Usage(format!("bad block list {text:?}: {e}")))
    } else {
        Configuration::from_string(text)
            .map_err(|e| CliError::Usage(format!("bad word {text:?}: {e}")))
    }
}

fn exact_params(beta: &str, p: &str) -> Result<ExactParams, CliError> {
    Ok(ExactParams::new(parse_ratio(beta)?, parse_ratio(p)?))
}

fn float_params(beta: &str, p: &str) -> Result<Params, CliError> {
    let exact = exact_params(beta, p)?;
    Ok(exact.to_float())
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn functionals_for(name: &str) -> Result<Vec<DriftFunctional>, CliError> {
    Ok(match name {
        "all" => vec![
            DriftFunctional::F1,
            DriftFunctional::F2,
            DriftFunctional::Phi(0.0),
            DriftFunctional::Phi(0.5),
            DriftFunctional::Phi(1.0),
            DriftFunctional::Phi(2.0),
        ],
        "f1" => vec![DriftFunctional::F1],
        "f2" => vec![DriftFunctional::F2],
        "phi0" => vec![DriftFunctional::Phi(0.0)],
        "phi0.5" => vec![DriftFunctional::Phi(0.5)],
        "phi1" => vec![DriftFunctional::Phi(1.0)],
        "phi2" => vec![DriftFunctional::Phi(2.0)],
        other => return usage(format!("unknown functional {other:?}")),
    })
}

fn drift_report_csv(reports: &[DriftReport]) -> String {
    let mut out = String::from("config_blocks,beta,p,functional,formula,oracle,gap\n");
    for r in reports {
        let blocks: Vec<String> = r.blocks.iter().map(|b| b.to_string()).collect();
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{},{}\n",
            blocks.join(","),
            r.beta,
            r.p,
            r.functional,
            r.formula,
            r.oracle,
            r.gap
        ));
    }
    out
}

fn run_drift_check(args: &DriftCheckArgs) -> Result<(), CliError> {
    if args.max_size > 16 {
        return usage("--max-size is capped at 16 (exhaustive enumeration)");
    }
    let params = exact_params(&args.beta, &args.p)?;
    let functionals = functionals_for(&args.functional)?;
    let phi1_sign_check = args.functional == "phi1" && params.beta >= rat(4, 7);

    let mut reports = Vec::new();
    let mut first_failure: Option<String> = None;
    for s in evlab_core::config::enumerate_configurations(args.max_size) {
        if s.is_ground() {
            continue;
        }
        for &functional in &functionals {
            let report = verify_drift(&s, params, functional).expect("non-ground");
            let ok = report.passes(1e-12);
            if !ok && first_failure.is_none() {
                first_failure = Some(format!(
                    "{} at {:?}: formula {} vs oracle {} (gap {})",
                    report.functional, report.blocks, report.formula, report.oracle, report.gap
                ));
            }
            if phi1_sign_check {
                let drift: f64 = report.formula.parse().unwrap_or(f64::NAN);
                if drift > 1e-15 && first_failure.is_none() {
                    first_failure = Some(format!(
                        "positive phi1 drift {drift} at {:?}",
                        report.blocks
                    ));
                }
            }
            reports.push(report);
        }
    }
    write_or_print(&args.out, &drift_report_csv(&reports))?;
    match first_failure {
        None => {
            eprintln!("drift-check: {} comparisons, all consistent", reports.len());
            Ok(())
        }
        Some(failure) => Err(CliError::Verification(failure)),
    }
}

fn run_audit(args: &AuditArgs) -> Result<(), CliError> {
    if let Some(s0) = &args.s0 {
        let s = parse_configuration(s0)?;
        let report = inequality_audit(&s);
        let json = serde_json::to_string_pretty(&report).expect("serializable");
        write_or_print(&args.out, &format!("{json}\n"))?;
        if report.all_pass() {
            Ok(())
        } else {
            Err(CliError::Verification(format!(
                "{} clauses failed",
                report.failures().len()
            )))
        }
    } else {
        let max_size = match args.max_size {
            Some(m) if m <= 16 => m,
            Some(_) => return usage("--max-size is capped at 16"),
            None => return usage("audit needs --s0 or --max-size"),
        };
        let mut checked = 0u64;
        let mut failures = 0u64;
        for s in evlab_core::config::enumerate_configurations(max_size) {
            checked += 1;
            if !inequality_audit(&s).all_pass() {
                failures += 1;
            }
        }
        let mut rng = replica_rng(args.seed, 0);
        for _ in 0..args.random {
            let s = evlab_core::config::random_configuration(args.random_max_size, &mut rng);
            checked += 1;
            if !inequality_audit(&s).all_pass() {
                failures += 1;
            }
        }
        eprintln!("audit: {checked} configurations, {failures} failures");
        if failures == 0 {
            Ok(())
        } else {
            Err(CliError::Verification(format!("{failures} audit failures")))
        }
    }
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let params = float_params(&args.beta, &args.p)?;
    let s0 = parse_configuration(&args.s0)?;
    if let Some(law_path) = &args.law_out {
        let exact = exact_params(&args.beta, &args.p)?;
        let law = step_distribution(&s0, exact);
        let json = serde_json::json!({
            "s0_blocks": s0.blocks(),
            "beta": exact.beta.to_string(),
            "p": exact.p.to_string(),
            "entries": law.to_json_entries(),
        });
        fs::write(
            law_path,
            format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
        )?;
    }
    let mut rng = replica_rng(args.seed, 0);
    let csv = if args.coloured {
        let mut state = ColouredConfiguration::initial_colouring(&s0)
            .map_err(|e| CliError::Usage(format!("--coloured: {e}")))?;
        let mut out = String::from("t,size,chi,zeta_len,obstruction\n");
        let mut row = |t: u64, state: &ColouredConfiguration| {
            let zeta = state.zeta();
            let zeta_len = if zeta.is_holding() {
                -1
            } else {
                zeta.len() as i64
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t,
                state.base().size(),
                state.chi(),
                zeta_len,
                u8::from(state.ground_state_obstruction())
            ));
        };
        row(0, &state);
        for t in 1..=args.horizon {
            state = state.step(&params, &mut rng);
            row(t, &state);
        }
        out
    } else {
        let mut state = s0;
        let mut out = String::from("t,size,blocks,f1,f2,rho2\n");
        let mut row = |t: u64, s: &Configuration| {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t,
                s.size(),
                s.num_blocks(),
                f1(s),
                f2(s),
                rho2(s)
            ));
        };
        row(0, &state);
        for t in 1..=args.horizon {
            let event = sample_event(&state, &params, &mut rng);
            state = evlab_core::kernel::apply_event(&state, &event);
            row(t, &state);
        }
        out
    };
    write_or_print(&args.out, &csv)
}

fn spec_sidecar(spec: &RunSpec, path: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(path) = path {
        fs::write(
            path,
            format!("{}\n", serde_json::to_string_pretty(spec).unwrap()),
        )?;
    }
    Ok(())
}

fn run_tau(args: &TauArgs) -> Result<(), CliError> {
    let params = float_params(&args.beta, &args.p)?;
    let s0 = parse_configuration(&args.s0)?;
    if args.replicas < 1 {
        return usage("--replicas must be at least 1");
    }
    let spec = RunSpec {
        beta: params.beta,
        p: params.p,
        s0_blocks: s0.blocks().to_vec(),
        horizon: 0,
        cap: args.cap,
        replicas: args.replicas,
        seed: args.seed,
        mode: "tau".into(),
    };
    spec_sidecar(&spec, &args.spec_out)?;
    let samples = run_tau_replicas(&spec);
    write_or_print(&args.out, &tau_csv(&samples))?;
    eprintln!(
        "tau: {} replicas, censoring fraction {:.4}",
        samples.len(),
        censoring_fraction(&samples)
    );
    if args.estimate_tail {
        match tail_index_estimate(
            &censored_from_tau(&samples, args.cap),
            TailMethod::SurvivalSlope,
        ) {
            Ok(est) => eprintln!(
                "tau: survival slope {:.4} (se {:.4}), light tail: {}",
                est.exponent, est.std_error, est.light_tail
            ),
            Err(e) => eprintln!("tau: tail estimate unavailable: {e}"),
        }
    }
    Ok(())
}

fn run_growth(args: &GrowthArgs) -> Result<(), CliError> {
    let params = float_params(&args.beta, &args.p)?;
    let s0 = parse_configuration(&args.s0)?;
    if args.replicas < 1 {
        return usage("--replicas must be at least 1");
    }
    let spec = RunSpec {
        beta: params.beta,
        p: params.p,
        s0_blocks: s0.blocks().to_vec(),
        horizon: args.horizon,
        cap: 0,
        replicas: args.replicas,
        seed: args.seed,
        mode: "growth".into(),
    };
    spec_sidecar(&spec, &args.spec_out)?;
    let records = run_growth_replicas(&spec);
    write_or_print(&args.out, &growth_csv(&records))?;
    if args.slope {
        let mut slopes: Vec<f64> = records
            .iter()
            .filter_map(|r| {
                let times: Vec<u64> = r.samples.iter().map(|s| s.t).collect();
                let maxima: Vec<u64> = r.samples.iter().map(|s| s.max_size).collect();
                growth_exponent(&times, &maxima).ok().map(|e| e.slope)
            })
            .collect();
        slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if slopes.is_empty() {
            eprintln!("growth: no replica produced a fittable series");
        } else {
            eprintln!(
                "growth: median max-size slope {:.4} over {} replicas",
                slopes[slopes.len() / 2],
                slopes.len()
            );
        }
    }
    Ok(())
}

fn run_render(args: &RenderArgs) -> Result<(), CliError> {
    let s = parse_configuration(&args.s0)?;
    let svg = svg::staircase_svg(&s, args.highlight_rect);
    write_or_print(&args.out, &svg)
}

fn run_probe(args: &ProbeArgs) -> Result<(), CliError> {
    let out: String;
    let mut failed = None;
    match args.kind.as_str() {
        "size-bound" => {
            let params = float_params(&args.beta, &args.p)?;
            if params.p < 0.5 {
                return usage("the size-bound probe needs p >= 1/2");
            }
            let s0 = parse_configuration(&args.s0)?;
            let probe = size_bound_probe(&s0, &params, args.t, args.replicas, args.seed);
            out = format!("{}\n", serde_json::to_string_pretty(&probe).unwrap());
            if !probe.pass {
                failed = Some(format!(
                    "empirical {:.4} below bound {:.4} - 3 sigma",
                    probe.empirical, probe.bound
                ));
            }
        }
        "small-beta" => {
            let params = float_params(&args.beta, &args.p)?;
            let report =
                probe_small_beta_moments(params.p, args.t.max(1), args.replicas, args.seed);
            out = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
        }
        "recurrence" => {
            let params = float_params(&args.beta, &args.p)?;
            let report = probe_recurrence(params.beta, params.p, args.replicas, args.seed);
            out = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
        }
        "exclusion-growth" => {
            let params = float_params(&args.beta, &args.p)?;
            let report =
                probe_exclusion_growth(params.p, args.t.max(1000), args.replicas, args.seed);
            out = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
        }
        other => return usage(format!("unknown probe kind {other:?}")),
    }
    write_or_print(&args.out, &out)?;
    match failed {
        None => Ok(()),
        Some(msg) => Err(CliError::Verification(msg)),
    }
}

fn init_threads(requested: Option<usize>) {
    let threads = requested.or_else(|| {
        std::env::var("EVLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(threads) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    let result = match &cli.command {
        Command::DriftCheck(args) => run_drift_check(args),
        Command::Audit(args) => run_audit(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Tau(args) => run_tau(args),
        Command::Growth(args) => run_growth(args),
        Command::Render(args) => run_render(args),
        Command::Probe(args) => run_probe(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("4/7").unwrap(), rat(4, 7));
        assert_eq!(parse_ratio("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_ratio("1").unwrap(), rat(1, 1));
        assert_eq!(parse_ratio(".5").unwrap(), rat(1, 2));
        assert!(parse_ratio("7/4").is_err());
        assert!(parse_ratio("-1/2").is_err());
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn configuration_parsing() {
        assert_eq!(parse_configuration("01").unwrap(), Configuration::d1());
        assert_eq!(parse_configuration("1,1").unwrap(), Configuration::d1());
        assert!(parse_configuration("").unwrap().is_ground());
        assert!(parse_configuration("ground").unwrap().is_ground());
        assert_eq!(
            parse_configuration("8,3,4,1,2,1,2,1,8,4").unwrap().size(),
            34
        );
        assert!(parse_configuration("2,0").is_err());
        assert!(parse_configuration("abc").is_err());
    }

    #[test]
    fn functional_names() {
        assert_eq!(functionals_for("all").unwrap().len(), 6);
        assert!(functionals_for("phi3").is_err());
    }
}
