//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::{build_instance, run_experiment, AdversaryLearner};
use crate::dynamics::{regret_bound, run_dynamics, DynamicsConfig, LearnerKind, RewardMode};
use crate::error::{Error, Result};
use crate::game::BayesianGame;
use crate::poa::{poa_report, Setting, SmoothnessFile, SmoothnessMode};
use crate::verifier::{
    anf_bs_epsilon, bne_epsilon, coarse_epsilon, comm_eq_epsilon, conditional_independence,
    sfce_epsilon, strategy_representable, CiOutcome, CoarseInput, DistributionFile, EqClass,
    EquilibriumCertificate, Representability,
};
use crate::DEFAULT_CAP;

/// Exit code when a check ran cleanly but its verdict is negative.
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "commeq",
    version,
    about = "Communication equilibria of finite Bayesian games"
)]
struct Cli {
    /// Worker threads for the parallel parts (default: one).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run uncoupled dynamics and write regret.csv, equilibrium.json and certificate.txt.
    Simulate(SimulateArgs),
    /// Audit a distribution against an equilibrium class.
    Verify(VerifyArgs),
    /// Run a learner on the lower-bound reward stream.
    Adversary(AdversaryArgs),
    /// Price-of-anarchy report for an equilibrium under a smoothness spec.
    Poa(PoaArgs),
    /// Decide strategy representability of a distribution.
    Representable(RepresentableArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RewardArg {
    Exact,
    Sampled,
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value = "untruthful")]
    learner: LearnerKind,
    #[arg(short = 'T', long = "horizon")]
    horizon: usize,
    #[arg(long, value_enum, default_value = "exact")]
    reward: RewardArg,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Keep every k-th round in the mixture.
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Regret curve resolution in rounds.
    #[arg(long, default_value_t = 1)]
    curve_every: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ClassArg {
    Comm,
    AnfBs,
    Bne,
    CoarseBs,
    Sfce,
    Sfcce,
    Anfcce,
    Representable,
    Ci,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long, value_enum, default_value = "comm")]
    class: ClassArg,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(clap::Args, Debug)]
struct AdversaryArgs {
    #[arg(short = 'B', long = "blocks")]
    blocks: usize,
    #[arg(short = 'T', long = "horizon")]
    horizon: usize,
    #[arg(long, default_value = "untruthful")]
    learner: AdversaryLearner,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the reward stream as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct PoaArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Largest verifier ε accepted for the distribution.
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(clap::Args, Debug)]
struct RepresentableArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let threads = cli.threads.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 3;
        }
    };
    match pool.install(|| dispatch(cli.command, threads > 1)) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<BayesianGame> {
    BayesianGame::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Error::InvalidInput(format!("{}: {j}", path.display())),
        other => other,
    })
}

fn load_dist(path: &Path) -> Result<DistributionFile> {
    DistributionFile::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Error::InvalidInput(format!("{}: {j}", path.display())),
        other => other,
    })
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn dispatch(cmd: Command, parallel: bool) -> Result<(String, i32)> {
    match cmd {
        Command::Simulate(a) => simulate(a, parallel),
        Command::Verify(a) => verify(a),
        Command::Adversary(a) => adversary(a),
        Command::Poa(a) => poa(a),
        Command::Representable(a) => {
            representable(&load_game(&a.game)?, &load_dist(&a.dist)?, a.cap)
        }
    }
}

#[derive(Serialize)]
struct EquilibriumFile<'a> {
    #[serde(flatten)]
    distribution: DistributionFile,
    /// max_i untruthful regret / T from the ledgers.
    certificate: f64,
    horizon: usize,
    seed: u64,
    /// Independent audit of the mixture, when small enough to tabulate.
    verified: Option<&'a EquilibriumCertificate>,
}

fn simulate(a: SimulateArgs, parallel: bool) -> Result<(String, i32)> {
    let game = load_game(&a.game)?;
    if a.horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let mut cfg = DynamicsConfig::new(game.n_players(), a.learner, a.horizon);
    cfg.reward = match a.reward {
        RewardArg::Exact => RewardMode::Exact,
        RewardArg::Sampled => RewardMode::Sampled {
            eps: a.eps,
            delta: a.delta,
        },
    };
    cfg.seed = a.seed;
    cfg.parallel = parallel;
    cfg.thin = a.thin;
    cfg.curve_every = a.curve_every;
    cfg.cap = a.cap;
    let res = run_dynamics(&game, &cfg)?;

    fs::create_dir_all(&a.out_dir)?;
    let mut csv = String::from("t,player,external,typewise,untruthful,bound\n");
    for p in &res.curve {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            p.t, p.player, p.external, p.typewise, p.untruthful, p.bound
        );
    }
    fs::write(a.out_dir.join("regret.csv"), csv)?;

    let verified = match res.mixture.to_tabular(game.dims(), a.cap) {
        Ok(pi) => Some(comm_eq_epsilon(&game, &pi)?),
        Err(Error::SupportTooLarge { .. } | Error::EnumerationTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let file = EquilibriumFile {
        distribution: DistributionFile::from(&res.mixture),
        certificate: res.certificate,
        horizon: a.horizon,
        seed: a.seed,
        verified: verified.as_ref(),
    };
    fs::write(a.out_dir.join("equilibrium.json"), pretty(&file)?)?;

    let d = game.dims();
    let mut cert = format!("epsilon {}\nhorizon {}\n", res.certificate, a.horizon);
    for (i, l) in res.ledgers.iter().enumerate() {
        let _ = writeln!(
            cert,
            "player {i} untruthful_regret {} bound {}",
            l.untruthful_regret()?,
            regret_bound(a.horizon, d.types[i], d.actions[i])
        );
    }
    fs::write(a.out_dir.join("certificate.txt"), &cert)?;
    Ok((cert, 0))
}

fn certificate(
    game: &BayesianGame,
    dist: &DistributionFile,
    class: EqClass,
    cap: usize,
) -> Result<EquilibriumCertificate> {
    let d = game.dims();
    match class {
        EqClass::Comm => comm_eq_epsilon(game, &dist.to_tabular(d, cap)?),
        EqClass::AnfBs => anf_bs_epsilon(game, &dist.to_tabular(d, cap)?, cap),
        EqClass::Bne => bne_epsilon(game, &dist.profile()?),
        EqClass::CoarseBs => {
            coarse_epsilon(game, CoarseInput::Tabular(&dist.to_tabular(d, cap)?), class)
        }
        EqClass::Sfcce | EqClass::Anfcce => {
            coarse_epsilon(game, CoarseInput::Strategy(&dist.strategy(d, cap)?), class)
        }
        EqClass::Sfce => sfce_epsilon(game, &dist.strategy(d, cap)?),
    }
}

fn verify(a: VerifyArgs) -> Result<(String, i32)> {
    let game = load_game(&a.game)?;
    let dist = load_dist(&a.dist)?;
    let class = match a.class {
        ClassArg::Representable => return representable(&game, &dist, a.cap),
        ClassArg::Ci => {
            let pi = dist.to_tabular(game.dims(), a.cap)?;
            return Ok(match conditional_independence(&game, &pi) {
                CiOutcome::Holds => ("conditional independence: holds\n".into(), 0),
                CiOutcome::Violated { player, own_type, action, others, joint, product } => (
                    format!(
                        "conditional independence: violated at player {player} type {own_type} action {action} \
                         others {others}: joint {joint} vs product {product}\n"
                    ),
                    EXIT_CHECK_FAILED,
                ),
            });
        }
        ClassArg::Comm => EqClass::Comm,
        ClassArg::AnfBs => EqClass::AnfBs,
        ClassArg::Bne => EqClass::Bne,
        ClassArg::CoarseBs => EqClass::CoarseBs,
        ClassArg::Sfce => EqClass::Sfce,
        ClassArg::Sfcce => EqClass::Sfcce,
        ClassArg::Anfcce => EqClass::Anfcce,
    };
    let cert = certificate(&game, &dist, class, a.cap)?;
    let code = if cert.epsilon <= a.tol {
        0
    } else {
        EXIT_CHECK_FAILED
    };
    Ok((pretty(&cert)?, code))
}

#[derive(Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
enum RepresentableReport {
    Feasible { support: Vec<(usize, f64)> },
    Infeasible { violation: f64, farkas: Vec<f64> },
}

fn representable(
    game: &BayesianGame,
    dist: &DistributionFile,
    cap: usize,
) -> Result<(String, i32)> {
    let pi = dist.to_tabular(game.dims(), cap)?;
    Ok(match strategy_representable(game.dims(), &pi, cap)? {
        Representability::Feasible { witness } => (
            pretty(&RepresentableReport::Feasible {
                support: witness.support().collect(),
            })?,
            0,
        ),
        Representability::Infeasible { farkas, violation } => (
            pretty(&RepresentableReport::Infeasible { violation, farkas })?,
            EXIT_CHECK_FAILED,
        ),
    })
}

fn adversary(a: AdversaryArgs) -> Result<(String, i32)> {
    let inst = build_instance(a.blocks, a.horizon, a.seed)?;
    if let Some(path) = &a.csv {
        let mut f = std::io::BufWriter::new(fs::File::create(path)?);
        inst.write_csv(&mut f)?;
        f.flush()?;
    }
    let r = run_experiment(&inst, a.learner)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "learner {}",
        serde_json::to_value(r.learner)?
            .as_str()
            .unwrap_or_default()
    );
    let _ = writeln!(
        s,
        "types {} blocks {} horizon {}",
        r.n_types, r.blocks, r.horizon
    );
    let _ = writeln!(s, "untruthful_regret {}", r.untruthful_regret);
    let _ = writeln!(s, "typewise_regret {}", r.typewise_regret);
    let _ = writeln!(s, "external_regret {}", r.external_regret);
    let _ = writeln!(s, "bound {}", r.bound);
    let _ = writeln!(s, "regret_within_bound {}", r.untruthful_regret <= r.bound);
    let _ = writeln!(s, "theta0_alpha0_total {}", r.theta_zero_alpha0);
    let _ = writeln!(s, "theta1_alpha1_total {}", r.theta_one_alpha1);
    let _ = writeln!(s, "floor {}", r.floor);
    let _ = writeln!(s, "floor_holds {}", r.floor_holds);
    Ok((s, 0))
}

fn poa(a: PoaArgs) -> Result<(String, i32)> {
    let game = load_game(&a.game)?;
    let dist = load_dist(&a.dist)?;
    let file: SmoothnessFile = serde_json::from_str(&read(&a.spec)?)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", a.spec.display())))?;
    let mech = file.mechanism(&game)?;
    let setting = match (&mech, file.spec.mode) {
        (Some(q), SmoothnessMode::Mechanism) => Setting::Mechanism(q),
        (None, SmoothnessMode::Game) => Setting::Game(&game),
        _ => {
            return Err(Error::InvalidInput(
                "mechanism mode needs value and payment tensors, game mode none".into(),
            ))
        }
    };
    let pi = dist.to_tabular(game.dims(), a.cap)?;
    let report = poa_report(setting, &pi, &file.spec, a.tol)?;
    let code = if report.bound_satisfied {
        0
    } else {
        EXIT_CHECK_FAILED
    };
    Ok((pretty(&report)?, code))
}
