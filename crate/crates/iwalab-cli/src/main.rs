use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iwalab::arith::DISCRIMINANTS;
use iwalab::cmlattice::{scan, Mode};
use iwalab::epsilon::{epsilon_factor, gauss_sum, verify_sigma_delta, AddConv, HaarConv, LocalChar};
use iwalab::reps::{classify_irreps, rep_invariants};
use iwalab::symratio::{elliptic_ratio, Ctx, MeasureVariant};
use iwalab::tower::standard_split_tower;
use iwalab_cli::config::{parse_config, RunConfig};
use iwalab_cli::report::Report;
use iwalab_cli::suites::{descent_case, run_selected, CliError, DescentCase, Env};

#[derive(Parser)]
#[command(name = "iwalab", version, about = "Checks identities for Iwasawa-theoretic measures on CM towers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the selected identity suites and write a report.
    Verify(RunArgs),
    /// Gauss sum, epsilon factor and the sigma_delta identity for one character.
    GaussSum {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long = "d-k", default_value_t = 4)]
        d_k: u64,
    },
    /// One ratio chain with its rewrite trace.
    Ratio {
        #[command(flatten)]
        run: RunArgs,
        /// Index into the irreducible list (see `iwalab reps`).
        #[arg(long, default_value_t = 0)]
        rep: usize,
        #[arg(long, default_value = "L")]
        variant: String,
    },
    /// CM-stable lattice data for one field, or all nine with --scan.
    Lattice {
        #[arg(long, default_value_t = 4)]
        d: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value = "maximal")]
        mode: Mode,
        #[arg(long)]
        scan: bool,
    },
    /// The measure, idempotent, Katz and L_Omega suites.
    Measure(RunArgs),
    /// Descent checks, all or one case.
    Descent {
        #[command(flatten)]
        run: RunArgs,
        /// fix, ev, det or taylor
        #[arg(long)]
        case: Option<DescentCase>,
    },
    /// List the irreducibles of the first tower level.
    Reps(RunArgs),
    /// Print the standard split tower in the tower file format.
    Tower {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long = "d-k")]
        d_k: Option<u64>,
        #[arg(long, default_value_t = 2)]
        levels: u32,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    tower: Option<String>,
    /// Suite names, repeatable or comma separated; `all` for every suite.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    /// Run no suites at all.
    #[arg(long, conflicts_with = "suites")]
    no_suites: bool,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    additive: Option<String>,
    #[arg(long)]
    frobenius: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    trace: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        let usage = |e: String| CliError::Usage(e);
        let flags = [
            ("p", self.p.map(|v| v.to_string())),
            ("precision", self.precision.map(|v| v.to_string())),
            ("tower", self.tower.clone()),
            ("mode", self.mode.clone()),
            ("additive", self.additive.clone()),
            ("frobenius", self.frobenius.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v).map_err(usage)?;
            }
        }
        if self.no_suites {
            cfg.suites.clear();
        } else if !self.suites.is_empty() {
            cfg.set_suites(&self.suites).map_err(usage)?;
        }
        if self.trace {
            cfg.trace = true;
        }
        Ok(cfg)
    }
}

fn emit(report: &Report) -> Result<ExitCode, CliError> {
    match &report.body.config.out {
        Some(path) => {
            let io = |source| CliError::Io { path: path.clone(), source };
            std::fs::write(path, report.body_json() + "\n").map_err(io)?;
            let side = format!("{path}.timing.json");
            std::fs::write(&side, report.sidecar_json() + "\n").map_err(|source| CliError::Io { path: side.clone(), source })?;
            eprintln!(
                "{}: {} checks, {} failed, {} errors",
                report.body.verdict, report.body.summary.checks, report.body.summary.fail, report.body.summary.error
            );
        }
        None => print!("{}", report.combined_json()),
    }
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_named(command: &str, args: &RunArgs, default: &[&str]) -> Result<ExitCode, CliError> {
    let mut cfg = args.resolve()?;
    if args.suites.is_empty() && !args.no_suites {
        cfg.suites = default.iter().map(|s| s.to_string()).collect();
    }
    let env = Env::load(cfg)?;
    let names = env.cfg.suites.clone();
    let results = run_selected(&env, &names);
    emit(&Report::new(command, env.cfg, results))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Verify(args) => {
            let env = Env::load(args.resolve()?)?;
            let names = env.cfg.suites.clone();
            let results = run_selected(&env, &names);
            emit(&Report::new("verify", env.cfg, results))
        }
        Cmd::Measure(args) => run_named("measure", &args, &["l-omega", "measure", "idempotent", "katz"]),
        Cmd::Descent { run, case: None } => run_named("descent", &run, &["descent"]),
        Cmd::Descent { run, case: Some(case) } => {
            let env = Env::load(run.resolve()?)?;
            let t = std::time::Instant::now();
            let s = descent_case(&env, case);
            let mut cfg = env.cfg.clone();
            cfg.suites = vec!["descent".into()];
            emit(&Report::new("descent", cfg, vec![(s, t.elapsed().as_millis())]))
        }
        Cmd::GaussSum { p, n, k, d_k } => {
            let chi = LocalChar::new(p, n, k).map_err(|e| CliError::Usage(e.to_string()))?;
            let show = |r: Result<String, String>| r.unwrap_or_else(|e| format!("error: {e}"));
            println!("chi = {chi} (parity {})", chi.parity());
            println!("G(chi) = {}", show(gauss_sum(&chi).map(|g| g.to_string()).map_err(|e| e.to_string())));
            for (label, conv) in [("psi(-x)", AddConv::PSI_NEG), ("psi(x)", AddConv::PSI)] {
                let e = epsilon_factor(&chi, conv, HaarConv::Dx1).map(|g| g.to_string()).map_err(|e| e.to_string());
                println!("e(chi, {label}, dx_1) = {}", show(e));
            }
            match verify_sigma_delta(&chi, d_k) {
                Ok(r) => {
                    println!("sigma_delta: delta = {}, chi(sigma_delta) = {}, e_p = {}", r.delta, r.chi_delta, r.e_p);
                    println!("G(chi) = chi(sigma_delta) e_p(chi): {}", if r.holds { "holds" } else { "FAILS" });
                    Ok(if r.holds { ExitCode::SUCCESS } else { ExitCode::FAILURE })
                }
                Err(e) => {
                    println!("sigma_delta: {e}");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Cmd::Ratio { run, rep, variant } => {
            let env = Env::load(run.resolve()?)?;
            let lvl = env.tower.levels.first().ok_or_else(|| CliError::Usage("the tower has no levels".into()))?;
            let grp = lvl.metabelian();
            let irreps = classify_irreps(&grp);
            let rho = irreps.get(rep).ok_or_else(|| CliError::Usage(format!("rep index {rep} out of range (0..{})", irreps.len())))?;
            let v = match variant.as_str() {
                "L" => MeasureVariant::L,
                "L'" | "LPrime" => MeasureVariant::LPrime,
                _ => return Err(CliError::Usage(format!("variant must be L or L', got `{variant}`"))),
            };
            let r = elliptic_ratio(&Ctx::elliptic(&grp), rho, v).map_err(|e| CliError::Usage(e.to_string()))?;
            for st in &r.trace {
                println!("[{}] {}\n    => {}", st.rule, st.before, st.after);
            }
            println!("{r}");
            Ok(if r.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Lattice { d, p, mode, scan: all } => {
            let ds: Vec<u64> = if all { DISCRIMINANTS.to_vec() } else { vec![d] };
            let mut ok = true;
            for d in ds {
                let r = scan(d, if all { None } else { p }, mode).map_err(|e| CliError::Usage(e.to_string()))?;
                println!("d_K = {d}, p = {}, mode = {}, stable: {}", r.p, r.mode, r.stable_count());
                for e in &r.entries {
                    let alpha = match &e.alpha {
                        Some(Ok(a)) => format!("alpha = {}, v_P = {}", a.alpha, a.valuation),
                        Some(Err(err)) => format!("alpha: {err}"),
                        None => String::new(),
                    };
                    let s = e.s.as_ref().map(|s| format!("s = {} {}", s.s, if s.pass() { "ok" } else { "FAILS" })).unwrap_or_default();
                    println!("  s' = {:<3} tau = {:<16} stable = {:<5} {s} {alpha}", e.s_prime, e.tau.to_string(), e.cm_stable);
                }
                ok &= r.pass();
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Tower { p, d_k, levels } => {
            let cfg = RunConfig { p, ..RunConfig::default() };
            cfg.validate()?;
            print!("{}", standard_split_tower(p, d_k, levels).to_text());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reps(run) => {
            let env = Env::load(run.resolve()?)?;
            for lvl in &env.tower.levels {
                let grp = lvl.metabelian();
                let irreps = classify_irreps(&grp);
                println!("level {}: G = {:?}, |G x| <c>| = {}, {} irreducibles", lvl.n, lvl.group.orders(), grp.order(), irreps.len());
                if lvl.n == 1 {
                    for (i, rho) in irreps.iter().enumerate() {
                        let inv = rep_invariants(&grp, rho).map(|x| format!("d+ = {}, d- = {}", x.d_plus, x.d_minus));
                        println!("  [{i}] {rho}  {}", inv.unwrap_or_else(|e| e.to_string()));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("iwalab: {e}");
            ExitCode::from(2)
        }
    }
}
