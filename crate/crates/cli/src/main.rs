use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seceq::delta::{compute_delta_for, construct_secure_equilibrium_det, transform_payoffs};
use seceq::eliminate::eliminate_fixpoint;
use seceq::format::{self, GameDocument};
use seceq::generate::{generate, FamilyChoice, GeneratorConfig};
use seceq::oracle::{oracle_enumerate, DEFAULT_MAX_PROFILES};
use seceq::payoff::{Family, Game};
use seceq::scalar::{self, Scalar};
use seceq::secure::construct_secure_equilibrium;
use seceq::strategy::StrategyProfile;
use seceq::verify::{verify_profile, EquilibriumReport};
use seceq::Error;

#[derive(Parser)]
#[command(name = "seceq", version, about = "Secure equilibria of turn-based games on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Auto,
    /// Elimination and punishment (discounted, finite horizon).
    Thm1,
    /// Payoff transformation (deterministic, finite range).
    Thm2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Discounted,
    FiniteHorizon,
    ReachedSet,
    CappedHitting,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a secure equilibrium and verify it.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// Comma-separated nonnegative weights, one per player.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Check the document's profile.
    Verify {
        file: PathBuf,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Run the action elimination and print every level.
    Eliminate { file: PathBuf },
    /// Print the payoff transformation.
    Transform { file: PathBuf },
    /// Enumerate the secure equilibria of a small game's strategy class.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_PROFILES)]
        max_oracle_profiles: usize,
    },
    /// Write a random game.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FamilyArg::ReachedSet)]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        players: usize,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        max_actions: usize,
        /// Probabilities are multiples of one over this.
        #[arg(long, default_value_t = 4)]
        granularity: u32,
        /// Allow probabilistic transitions.
        #[arg(long)]
        stochastic: bool,
        #[arg(long, default_value = "1/2")]
        discount: String,
        #[arg(long, default_value_t = 2)]
        horizon: u32,
        #[arg(long, default_value_t = 2)]
        labels: usize,
        /// Defaults to 2·|N|·|S|.
        #[arg(long)]
        cap: Option<u32>,
    },
}

/// Problems with the input; these exit with 2.
enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<GameDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    format::parse_document(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_weights(text: Option<&str>, game: &Game) -> Result<Option<Vec<Scalar>>, Failure> {
    let Some(text) = text else {
        return Ok(None);
    };
    let weights = text
        .split(',')
        .map(|w| scalar::parse(w).ok_or_else(|| Failure::Input(format!("bad weight `{w}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    seceq::secure::check_weights(game, &weights)?;
    Ok(Some(weights))
}

fn report_out(cli: &Cli, game: &Game, report: &EquilibriumReport) -> String {
    match cli.format {
        OutputFormat::Text => format::report_text(&game.arena, report),
        OutputFormat::Structured => format::report_structured(&game.arena, report),
    }
}

fn solve(cli: &Cli, file: &Path, engine: Engine, weights: Option<&str>) -> Result<(String, bool), Failure> {
    let doc = read(file)?;
    let game = doc.game;
    let weights = parse_weights(weights, &game)?;
    let engine = match (engine, game.family()) {
        (Engine::Auto, Family::FiniteRange) => Engine::Thm2,
        (Engine::Auto, _) => Engine::Thm1,
        (e, _) => e,
    };
    let (profile, note): (StrategyProfile, String) = match engine {
        Engine::Thm2 => {
            let c = construct_secure_equilibrium_det(&game)?;
            let note = match &c.params {
                Some(p) => format!("engine thm2, delta = {}", scalar::format(&p.delta)),
                None => "engine thm2, trivial payoff range".into(),
            };
            (c.profile, note)
        }
        _ => {
            let c = construct_secure_equilibrium(&game, weights.as_deref())?;
            let note = format!("engine thm1, fixpoint after {} levels", c.trace.levels.len());
            (c.profile, note)
        }
    };
    let report = verify_profile(&game, &profile, weights.as_deref())?;
    let ok = report.nash.holds
        && match engine {
            Engine::Thm2 => report.secure.holds,
            _ => match &report.weighted_secure {
                Some((_, c)) => c.holds,
                None => report.sum_secure.holds,
            },
        };
    let out = match cli.format {
        OutputFormat::Text => format!("{note}\n{}", report_out(cli, &game, &report)),
        OutputFormat::Structured => {
            let doc = GameDocument {
                game: game.clone(),
                profile: Some(profile),
            };
            format!(
                "# {note}\n{}\n{}",
                format::serialize_document(&doc),
                report_out(cli, &game, &report)
            )
        }
    };
    Ok((out, ok))
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    match &cli.command {
        Command::Solve {
            file,
            engine,
            weights,
        } => solve(cli, file, *engine, weights.as_deref()),
        Command::Verify { file, weights } => {
            let doc = read(file)?;
            let profile = doc
                .profile
                .ok_or_else(|| Failure::Input(format!("{}: no profile section", file.display())))?;
            let weights = parse_weights(weights.as_deref(), &doc.game)?;
            let report = verify_profile(&doc.game, &profile, weights.as_deref())?;
            let ok = report.nash.holds
                && report.secure.holds
                && report.weighted_secure.as_ref().is_none_or(|(_, c)| c.holds);
            Ok((report_out(cli, &doc.game, &report), ok))
        }
        Command::Eliminate { file } => {
            let game = read(file)?.game;
            let trace = eliminate_fixpoint(&game)?;
            let out = match cli.format {
                OutputFormat::Text => format::trace_text(&game, &trace),
                OutputFormat::Structured => format::trace_structured(&game, &trace),
            };
            Ok((out, true))
        }
        Command::Transform { file } => {
            let game = read(file)?.game;
            let params = compute_delta_for(&game)?;
            let t = transform_payoffs(&game, &params)?;
            let out = match cli.format {
                OutputFormat::Text => format::transform_text(&params, &t),
                OutputFormat::Structured => format::transform_structured(&params, &t),
            };
            Ok((out, true))
        }
        Command::Oracle {
            file,
            max_oracle_profiles,
        } => {
            let game = read(file)?.game;
            let r = oracle_enumerate(&game, *max_oracle_profiles)?;
            let out = match cli.format {
                OutputFormat::Text => format::oracle_text(&game, &r),
                OutputFormat::Structured => format::oracle_structured(&game, &r),
            };
            Ok((out, true))
        }
        Command::Gen {
            seed,
            family,
            players,
            states,
            max_actions,
            granularity,
            stochastic,
            discount,
            horizon,
            labels,
            cap,
        } => {
            let family = match family {
                FamilyArg::Discounted => {
                    let beta = scalar::parse(discount)
                        .ok_or_else(|| Failure::Input(format!("bad discount `{discount}`")))?;
                    let num = i64::try_from(beta.numer()).ok();
                    let den = i64::try_from(beta.denom()).ok();
                    match (num, den) {
                        (Some(n), Some(d)) => FamilyChoice::Discounted { discount: (n, d) },
                        _ => return Err(Failure::Input(format!("discount `{discount}` is too large"))),
                    }
                }
                FamilyArg::FiniteHorizon => FamilyChoice::FiniteHorizon { horizon: *horizon },
                FamilyArg::ReachedSet => FamilyChoice::ReachedSet { labels: *labels },
                FamilyArg::CappedHitting => FamilyChoice::CappedHitting { cap: *cap },
            };
            let cfg = GeneratorConfig {
                seed: *seed,
                players: *players,
                states: *states,
                max_actions: *max_actions,
                family,
                granularity: *granularity,
                deterministic: !stochastic,
                reward_bound: 4,
            };
            let game = generate(&cfg)?;
            let doc = GameDocument { game, profile: None };
            Ok((format::serialize_document(&doc), true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{out}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
