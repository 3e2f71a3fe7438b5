//! `pstwalk`: command-line front end. One JSON document (CSV for `scan`) on
//! stdout or `--out`; a short summary on stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pstwalk::extremal::extremal_min_pst_search;
use pstwalk::families::{family_report, FamilyName};
use pstwalk::graph::{hamiltonian, load_custom, Hamiltonian};
use pstwalk::io;
use pstwalk::periodicity::{classify_form, minimum_period, ratio_condition_with_noise, RatioOutcome};
use pstwalk::pst::{fidelity_scan, pst_partner, verify_pst_numeric};
use pstwalk::sensitivity::fidelity_derivatives;
use pstwalk::state::{support, SupportClass};
use pstwalk::symbolic::render_time;
use pstwalk::synthesis::{synthesize, SynthesisRequest};
use pstwalk::{decompose, pst_decide, HamiltonianKind, PstError, PureState, SpectralDecomposition, ToleranceConfig};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pstwalk", version, about = "Perfect state transfer in continuous quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Hamiltonian of the graph. With `custom` the graph argument is a
    /// matrix file.
    #[arg(long, value_enum, default_value = "adj", global = true)]
    kind: Kind,
    /// Graph whose zero pattern a custom matrix must match.
    #[arg(long, global = true)]
    pattern: Option<PathBuf>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_group: Option<f64>,
    #[arg(long, global = true)]
    tol_supp: Option<f64>,
    #[arg(long, global = true)]
    tol_proj: Option<f64>,
    #[arg(long, global = true)]
    tol_phase: Option<f64>,
    #[arg(long, global = true)]
    tol_int: Option<f64>,
    #[arg(long, global = true)]
    tol_ratio: Option<f64>,
    #[arg(long, global = true)]
    q_max: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Adj,
    Lap,
    Custom,
}

impl From<Kind> for HamiltonianKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Adj => HamiltonianKind::Adjacency,
            Kind::Lap => HamiltonianKind::Laplacian,
            Kind::Custom => HamiltonianKind::Custom,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue support and periodicity of a state.
    Analyze { graph: PathBuf, state: PathBuf },
    /// Decide PST from x to y.
    Pst { graph: PathBuf, x: PathBuf, y: PathBuf },
    /// PST partner of x and its minimum time.
    Partner { graph: PathBuf, x: PathBuf },
    /// Build a Hamiltonian with PST from x to y at tau.
    Synthesize {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
    },
    /// Closed-form PST report for a standard family.
    Family { name: String, params: Vec<usize> },
    /// Fidelity over [0, tmax] as CSV.
    Scan {
        graph: PathBuf,
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Fidelity derivatives at the minimum PST time.
    Sensitivity {
        graph: PathBuf,
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
    /// Join pair with the least PST time on n vertices.
    Extremal { n: usize },
}

enum Output {
    Json(Value),
    Text(String),
}

struct Ctx {
    cfg: ToleranceConfig,
    kind: HamiltonianKind,
    pattern: Option<PathBuf>,
    seed: u64,
}

fn config(o: &GlobalOpts) -> Result<ToleranceConfig, PstError> {
    let mut cfg = ToleranceConfig::default();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.tol_group, o.tol_group);
    set(&mut cfg.tol_supp, o.tol_supp);
    set(&mut cfg.tol_proj, o.tol_proj);
    set(&mut cfg.tol_phase, o.tol_phase);
    set(&mut cfg.int_tol, o.tol_int);
    set(&mut cfg.tol_ratio, o.tol_ratio);
    if let Some(q) = o.q_max {
        cfg.q_max = q;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<Hamiltonian, PstError> {
        match self.kind {
            HamiltonianKind::Custom => {
                let m = io::read_matrix(path)?;
                match &self.pattern {
                    Some(p) => load_custom(m, &io::read_graph(p)?),
                    None => Hamiltonian::dense(m),
                }
            }
            kind => hamiltonian(&io::read_graph(path)?, kind),
        }
    }

    fn spectral(&self, path: &Path) -> Result<SpectralDecomposition, PstError> {
        decompose(&self.load(path)?, &self.cfg)
    }
}

fn state(path: &Path, n: usize) -> Result<PureState, PstError> {
    let x = io::read_state(path)?;
    if x.len() != n {
        return Err(PstError::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(x)
}

fn run(cmd: Command, ctx: &Ctx) -> Result<Output, PstError> {
    let cfg = &ctx.cfg;
    match cmd {
        Command::Analyze { graph, state: sf } => {
            let s = ctx.spectral(&graph)?;
            let x = state(&sf, s.n())?;
            let p = support(&s, &x, cfg)?;
            let (periodic, rho) = if p.class == SupportClass::Fixed {
                (true, None)
            } else {
                match ratio_condition_with_noise(&p.eigenvalues, cfg, s.eigen_noise())? {
                    RatioOutcome::Periodic(t) => (true, Some(minimum_period(&t)?)),
                    RatioOutcome::NonPeriodic { .. } => (false, None),
                }
            };
            eprintln!("support size {}, periodic: {periodic}", p.len());
            Ok(Output::Json(json!({
                "support": p.eigenvalues,
                "weights": p.weights(),
                "class": p.class,
                "periodic": periodic,
                "rho": rho,
                "rho_symbolic": rho.and_then(render_time),
                "spectral_form": classify_form(&p.eigenvalues, cfg),
            })))
        }
        Command::Pst { graph, x, y } => {
            let s = ctx.spectral(&graph)?;
            let (x, y) = (state(&x, s.n())?, state(&y, s.n())?);
            let v = pst_decide(&s, &x, &y, cfg)?;
            let mut out = v.to_json();
            if let Some(tau) = v.tau_min {
                let check = verify_pst_numeric(&s, &x, &y, tau, cfg)?;
                if !check.pass {
                    return Err(PstError::NumericFailure(format!(
                        "decided Yes at {tau} but evolution misses by {:.3e}",
                        check.residual
                    )));
                }
                out["numeric"] = json!(check);
            }
            eprintln!("decision {:?}{}", v.decision, v.tau_min.map(|t| format!(" at tau = {t}")).unwrap_or_default());
            Ok(Output::Json(out))
        }
        Command::Partner { graph, x } => {
            let s = ctx.spectral(&graph)?;
            let x = state(&x, s.n())?;
            let out = match pst_partner(&s, &x, cfg)? {
                Some(r) => {
                    eprintln!("partner found, tau = {}", r.tau);
                    json!({
                        "partner": r.partner.vector().as_slice(),
                        "tau": r.tau,
                        "tau_symbolic": render_time(r.tau),
                    })
                }
                None => {
                    eprintln!("state is not periodic; no partner");
                    json!({"partner": null, "tau": null, "tau_symbolic": null})
                }
            };
            Ok(Output::Json(out))
        }
        Command::Synthesize { x, y, tau, m1, m2 } => {
            let x = io::read_state(&x)?;
            let y = state(&y, x.len())?;
            let syn = synthesize(&SynthesisRequest { x, y, tau, m1, m2 })?;
            eprintln!("synthesized {0}x{0} Hamiltonian", syn.hamiltonian.n());
            Ok(Output::Text(io::matrix_to_json(&syn.hamiltonian.matrix)))
        }
        Command::Family { name, params } => {
            let family =
                FamilyName::parse(&name).ok_or_else(|| PstError::InvalidRequest(format!("unknown family {name:?}")))?;
            let report = family_report(family, &params, ctx.seed, cfg)?;
            eprintln!("{} PST pair(s) reported", report.pst_pairs.len());
            Ok(Output::Json(report.to_json()))
        }
        Command::Scan { graph, x, y, tmax, steps } => {
            let s = ctx.spectral(&graph)?;
            let (x, y) = (state(&x, s.n())?, state(&y, s.n())?);
            let scan = fidelity_scan(&s, &x, &y, tmax, steps)?;
            let mut csv = String::from("t,fidelity\n");
            for (t, f) in scan.times.iter().zip(&scan.values) {
                csv.push_str(&format!("{},{}\n", io::format_f64(*t), io::format_f64(*f)));
            }
            eprintln!("peak fidelity {:.12} at t = {:.12}", scan.peak_value, scan.peak_time);
            Ok(Output::Text(csv))
        }
        Command::Sensitivity { graph, x, y, k_max } => {
            let s = ctx.spectral(&graph)?;
            let (x, y) = (state(&x, s.n())?, state(&y, s.n())?);
            let v = pst_decide(&s, &x, &y, cfg)?;
            let tau = v.tau_min.ok_or_else(|| PstError::InvalidPair("no perfect state transfer from x to y".into()))?;
            let r = fidelity_derivatives(&s, &x, &y, tau, k_max, cfg)?;
            eprintln!("f''(tau) = {:.12}, bound {:.12}, pass: {}", r.d2, r.bound_lo, r.pass);
            Ok(Output::Json(r.to_json()))
        }
        Command::Extremal { n } => {
            let kind = match ctx.kind {
                HamiltonianKind::Custom => {
                    return Err(PstError::InvalidRequest("extremal search needs --kind adj or lap".into()))
                }
                k => k,
            };
            let pair = extremal_min_pst_search(n, kind, cfg)?;
            eprintln!("tau = {}", pair.tau_symbolic.as_deref().unwrap_or("?"));
            Ok(Output::Json(pair.to_json()))
        }
    }
}

fn exit_code(e: &PstError) -> u8 {
    match e {
        PstError::Parse(_) | PstError::InvalidEdge { .. } | PstError::PatternMismatch(_) => 2,
        PstError::NumericFailure(_) | PstError::Overflow(_) => 3,
        _ => 4,
    }
}

fn emit(out: &Output, path: Option<&Path>) -> std::io::Result<()> {
    let text = match out {
        Output::Json(v) => io::to_exact_json(v) + "\n",
        Output::Text(t) if t.ends_with('\n') => t.clone(),
        Output::Text(t) => format!("{t}\n"),
    };
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    let ctx = Ctx { cfg, kind: cli.opts.kind.into(), pattern: cli.opts.pattern.clone(), seed: cli.opts.seed };
    match run(cli.command, &ctx) {
        Ok(out) => match emit(&out, cli.opts.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
