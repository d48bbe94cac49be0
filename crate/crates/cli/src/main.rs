use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crn_core::certify::{certify, recheck, Certificate, Verdict};
use crn_core::dsr::build_dsr;
use crn_core::integrate::{
    check_order_preservation, integrate, random_interior_point, shift_along_cone, uniform_samples,
    IntegratorOptions, OdeSystem,
};
use crn_core::kinetics::{make_power_law, unit_mass_action, Kinetics, RateFunction};
use crn_core::network::{parse_network, Network};
use crn_core::order::{integral, ConeOrder};
use crn_core::validate::validate;

/// Exit codes. 0 is success (and a global verdict for `certify`).
const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_LOCAL: u8 = 3;
const EXIT_NONE: u8 = 4;
const EXIT_CONTRADICTION: u8 = 5;

const THREADS_ENV: &str = "CRN_CERTIFY_THREADS";

#[derive(Parser)]
#[command(name = "crn-certify", version, about = "Certify and simulate chemical reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a network and print it as JSON.
    Parse { file: PathBuf },
    /// Decide the structural conditions and print the verdict.
    Certify {
        file: PathBuf,
        /// Also write the full certificate as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integrate the network and emit a CSV trajectory.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = KineticsArg::MassAction)]
        kinetics: KineticsArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated initial state, or `random-interior`.
        #[arg(long, default_value = "random-interior")]
        x0: String,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Also run y0 = x0 + 0.1·Λ·1 and report order preservation.
        #[arg(long)]
        pair: bool,
        /// CSV destination (default: stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        /// CSV destination for the partner trajectory of `--pair`.
        #[arg(long)]
        pair_output: Option<PathBuf>,
        /// JSON diagnostics destination.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Check the certificate's claims empirically under concrete kinetics.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = KineticsArg::MassAction)]
        kinetics: KineticsArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export the DSR graph in DOT format.
    Dsr {
        file: PathBuf,
        /// DOT destination (default: stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Independently re-verify a JSON certificate.
    Recheck { json: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum KineticsArg {
    MassAction,
    PowerLaw,
}

fn kinetics_for(net: &Network, kind: KineticsArg, seed: u64) -> RateFunction {
    match kind {
        KineticsArg::MassAction => unit_mass_action(net),
        KineticsArg::PowerLaw => make_power_law(net, seed),
    }
}

/// A parse failure, kept apart so it can map to its own exit code.
#[derive(Debug)]
struct ParseFailure(String);

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseFailure {}

fn load(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_network(&text).map_err(|e| ParseFailure(format!("{}: {e}", path.display())).into())
}

fn write_or_stdout(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        // A closed pipe (`| head`) is not an error worth reporting.
        None => match io::stdout().lock().write_all(bytes) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
            _ => Ok(()),
        },
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    if n == 0 {
        bail!("{THREADS_ENV} must be a positive integer");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn render_certificate(cert: &Certificate) -> String {
    let mut lines = vec![format!("verdict: {}", cert.verdict)];
    lines.extend(cert.assumptions.iter().map(|a| format!("assumed  {a}")));
    for (name, c) in &cert.conditions {
        lines.push(format!("{name:<4} {:<8} {}", c.outcome.to_string(), c.evidence));
    }
    let d = &cert.dsr.summary;
    lines.push(format!(
        "dsr      {} species, {} reactions, {} arcs, {} strongly connected component(s)",
        d.species_vertices,
        d.reaction_vertices,
        d.reaction_to_species_arcs + d.species_to_reaction_arcs,
        d.scc_count
    ));
    if let Some(r) = &cert.siphon_report {
        for (s, v) in r.minimal_siphons.iter().zip(&r.verdicts) {
            let w = match &v.separation_certificate {
                Some(w) => w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
                None => "none".into(),
            };
            let status = format!("{:?}", v.status).to_lowercase();
            lines.push(format!("siphon   {{{}}} face {status} certificate ({w})", s.names.join(", ")));
        }
    }
    lines.extend(cert.failure_narrative.iter().map(|l| format!("reason   {l}")));
    lines.join("\n") + "\n"
}

fn initial_state(spec: &str, n: usize, seed: u64) -> Result<Vec<f64>> {
    if spec == "random-interior" {
        return Ok(random_interior_point(n, seed));
    }
    let x: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad coordinate {s:?}")))
        .collect::<Result<_>>()?;
    if x.len() != n {
        bail!("--x0 has {} coordinates, network has {n} species", x.len());
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        bail!("--x0 must be finite and nonnegative");
    }
    Ok(x)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse { file } => {
            let net = load(&file)?;
            write_or_stdout(None, (serde_json::to_string_pretty(&net)? + "\n").as_bytes())?;
            Ok(0)
        }
        Command::Certify { file, json } => {
            let net = load(&file)?;
            let cert = certify(&net);
            info!("verdict {}", cert.verdict);
            write_or_stdout(None, render_certificate(&cert).as_bytes())?;
            if let Some(path) = json {
                fs::write(&path, serde_json::to_string_pretty(&cert)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(match cert.verdict {
                Verdict::Global => 0,
                Verdict::Local => EXIT_LOCAL,
                Verdict::None => EXIT_NONE,
            })
        }
        Command::Simulate {
            file,
            kinetics,
            seed,
            x0,
            t_end,
            samples,
            pair,
            output,
            pair_output,
            diagnostics,
        } => {
            if t_end.is_nan() || t_end <= 0.0 || samples == 0 {
                bail!("--t-end must be positive and --samples nonzero");
            }
            let net = load(&file)?;
            let k = kinetics_for(&net, kinetics, seed);
            let sys = OdeSystem::new(&net, &k as &dyn Kinetics);
            let x0 = initial_state(&x0, net.n_species(), seed)?;
            let cert = certify(&net);
            let h = cert.factorization.as_ref().map(integral);
            let times = uniform_samples(t_end, samples);
            let opts = IntegratorOptions::default();
            let mut traj = integrate(&sys, &x0, &times, &opts)?;
            if let Some(h) = &h {
                traj.record_integral(h);
            }
            let names: Vec<String> = net.species().iter().map(|s| s.name.clone()).collect();
            let mut csv = Vec::new();
            traj.write_csv(&mut csv, &names, h.as_ref())?;
            write_or_stdout(output.as_deref(), &csv)?;

            let mut diag = serde_json::json!({
                "accepted_steps": traj.accepted_steps,
                "rejected_steps": traj.rejected_steps,
                "clamped_coordinates": traj.clamped_coordinates,
                "samples": traj.diagnostics,
                "h_drift": h.as_ref().map(|h| traj.integral_drift(h)),
            });
            let mut code = 0;
            if pair {
                let Some(f) = &cert.factorization else {
                    bail!("--pair needs a factorization, and A3 fails for this network");
                };
                let order = ConeOrder::new(f.lambda.clone())?;
                let y0 = shift_along_cone(&order, &x0, &vec![0.1; order.dim()]);
                let mut partner = integrate(&sys, &y0, &times, &opts)?;
                if let Some(h) = &h {
                    partner.record_integral(h);
                }
                let check = check_order_preservation(&order, &traj, &partner)?;
                eprintln!(
                    "order preserved: {} (min pullback {:.3e})",
                    check.holds,
                    check.min_pullback.iter().cloned().fold(f64::INFINITY, f64::min)
                );
                if let Some(p) = pair_output {
                    let mut csv = Vec::new();
                    partner.write_csv(&mut csv, &names, h.as_ref())?;
                    fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?;
                }
                diag["order_check"] = serde_json::to_value(&check)?;
                if !check.holds {
                    code = EXIT_CONTRADICTION;
                }
            }
            if let Some(p) = diagnostics {
                fs::write(&p, serde_json::to_string_pretty(&diag)?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(code)
        }
        Command::Validate {
            file,
            kinetics,
            seed,
            json,
        } => {
            let net = load(&file)?;
            let cert = certify(&net);
            let k = kinetics_for(&net, kinetics, seed);
            let report = validate(&net, &cert, &k, seed);
            let mut text = format!("verdict: {}\n", cert.verdict);
            for c in &report.checks {
                let status = match (c.applicable, c.ok) {
                    (false, _) => "n/a",
                    (true, true) => "ok",
                    (true, false) => "FAIL",
                };
                text += &format!("{:<20} {status:<5} {}\n", c.name, c.detail);
            }
            write_or_stdout(None, text.as_bytes())?;
            if let Some(path) = json {
                fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if report.contradicted() { EXIT_CONTRADICTION } else { 0 })
        }
        Command::Dsr { file, dot } => {
            let net = load(&file)?;
            let graph = build_dsr(&net);
            write_or_stdout(dot.as_deref(), graph.to_dot().as_bytes())?;
            Ok(0)
        }
        Command::Recheck { json } => {
            let text = fs::read_to_string(&json).with_context(|| format!("reading {}", json.display()))?;
            let cert: Certificate = serde_json::from_str(&text)
                .map_err(|e| ParseFailure(format!("{}: {e}", json.display())))?;
            let items = recheck(&cert);
            let text: String = items
                .iter()
                .map(|i| format!("{:<12} {:<5} {}\n", i.name, if i.ok { "ok" } else { "FAIL" }, i.detail))
                .collect();
            write_or_stdout(None, text.as_bytes())?;
            Ok(if items.iter().all(|i| i.ok) { 0 } else { EXIT_CONTRADICTION })
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_FAILURE);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ParseFailure>().is_some() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}
