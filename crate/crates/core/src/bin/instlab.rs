use clap::{Args, Parser, Subcommand, ValueEnum};
use instlab::agents::{run_walk, self_play, simulate_cohort, Acceptance, AgentPolicy, Experience, PolicyKind, PreferenceModel, SimulationConfig};
use instlab::analysis::{read_jsonl, report, BootstrapConfig, Dataset, ReportConfig};
use instlab::features::{generate_space, verify_space, Feature, FeatureVector, GameSpace, Multiplier, SearchOrder, SpaceConfig};
use instlab::platform::{driver, http, PlatformConfig, Service};
use instlab::protocol::all_conditions;
use instlab::{fixtures, rng};
use std::error::Error;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "instlab", version, about = "Game hypercubes, agents, sessions and cooperation statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the game space and print it as JSON.
    GenSpace {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every vertex of a space; exits 1 on any failure.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// A space file from `gen-space`; generated when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Simulate an agent cohort and write trials.jsonl and preferences.jsonl.
    Simulate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 301)]
        participants: usize,
        #[arg(long, default_value = "equilibrium")]
        policy: PolicyKind,
        #[arg(long, default_value = "binmore")]
        model: String,
        #[arg(long, default_value_t = 6)]
        rounds: u32,
        /// Play through the session service instead of the direct simulator.
        #[arg(long)]
        platform: bool,
        #[arg(long, default_value_t = 16)]
        concurrency: usize,
        #[arg(long, default_value = "sim-out")]
        out_dir: PathBuf,
    },
    /// Walk the hypercube under a preference model.
    Walk {
        #[command(flatten)]
        space: SpaceArgs,
        /// Start vertex, or `all` (the default) for every vertex.
        #[arg(long, alias = "starts", default_value = "all")]
        start: String,
        #[arg(long, default_value = "binmore")]
        model: String,
        #[arg(long, default_value = "majority")]
        acceptance: Acceptance,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
    },
    /// Cooperation, preference, layer and path statistics.
    Analyze {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, requires = "preferences")]
        trials: Option<PathBuf>,
        #[arg(long, requires = "trials")]
        preferences: Option<PathBuf>,
        /// Analyze a synthetic dataset shaped like the reference study.
        #[arg(long, conflicts_with = "trials")]
        fixture: bool,
        #[arg(long, default_value_t = 10_000)]
        resamples: usize,
        /// Directory for report.json and CSV tables; stdout JSON otherwise.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the session service over HTTP.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    features: usize,
    #[arg(long, default_value = "2")]
    multiplier: Multiplier,
    #[arg(long, value_enum, default_value_t = Order::Lexicographic)]
    search_order: Order,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lexicographic,
    Seeded,
}

impl SpaceArgs {
    fn config(&self) -> SpaceConfig {
        SpaceConfig {
            efficiency_multiplier: self.multiplier,
            rng_seed: self.seed,
            search_order: match self.search_order {
                Order::Lexicographic => SearchOrder::Lexicographic,
                Order::Seeded => SearchOrder::Seeded,
            },
            ..SpaceConfig::with_features(self.features)
        }
    }

    fn space(&self) -> Result<GameSpace> {
        Ok(generate_space(&self.config())?)
    }
}

/// `binmore` (= `lexicographic`), `experienced`, `paper`, or
/// `lexicographic:<feature>,...`.
fn parse_model(s: &str) -> Result<PreferenceModel> {
    Ok(match s {
        "binmore" | "lexicographic" => PreferenceModel::binmore(),
        "experienced" => PreferenceModel::ExperiencedPayoff,
        "paper" | "table" => PreferenceModel::EmpiricalTable(fixtures::paper_preference_table()),
        _ => match s.strip_prefix("lexicographic:") {
            Some(list) => PreferenceModel::Lexicographic(
                list.split(',').map(|f| f.trim().parse::<Feature>()).collect::<std::result::Result<_, _>>()?,
            ),
            None => return Err(format!("unknown preference model `{s}`").into()),
        },
    })
}

fn write_jsonl_file<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<()> {
    instlab::analysis::write_jsonl(records, BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenSpace { space, out } => {
            let json = space.space()?.to_json();
            match out {
                Some(p) => fs::write(p, json)?,
                None => println!("{json}"),
            }
        }
        Command::Verify { space, input } => {
            let s = match input {
                Some(p) => GameSpace::from_json(&fs::read_to_string(p)?)?,
                None => space.space()?,
            };
            let r = verify_space(&s);
            println!("{r}");
            return Ok(r.passed());
        }
        Command::Simulate { space, participants, policy, model, rounds, platform, concurrency, out_dir } => {
            let s = space.space()?;
            let config =
                SimulationConfig { policy: AgentPolicy::new(policy), model: parse_model(&model)?, rounds_per_stage: rounds };
            let data = if platform {
                let pc = PlatformConfig {
                    seed: space.seed,
                    rounds_per_stage: rounds,
                    features: space.features,
                    multiplier: space.multiplier,
                    ..PlatformConfig::default()
                };
                let (mut svc, _) = Service::in_memory(s, pc)?;
                driver::drive_agents(&mut svc, participants, concurrency, &config, space.seed)?
            } else {
                simulate_cohort(&s, &all_conditions(s.width()), participants, &config, space.seed)?
            };
            fs::create_dir_all(&out_dir)?;
            write_jsonl_file(&out_dir.join("trials.jsonl"), &data.trials)?;
            write_jsonl_file(&out_dir.join("preferences.jsonl"), &data.preferences)?;
            println!(
                "{} trials, {} preferences -> {}",
                data.trials.len(),
                data.preferences.len(),
                out_dir.display()
            );
        }
        Command::Walk { space, start, model, acceptance, max_steps } => {
            let s = space.space()?;
            let model = parse_model(&model)?;
            let mut experience = Experience::default();
            if model == PreferenceModel::ExperiencedPayoff {
                let mut r = rng::keyed(space.seed, "walk/experience");
                for label in s.labels() {
                    let game = s.game(label)?;
                    for (a1, a2) in self_play(game, label, &AgentPolicy::default(), 20, &mut r) {
                        experience.record(label, game.payoff(a1, a2).u1);
                    }
                }
            }
            let starts: Vec<FeatureVector> = match start.as_str() {
                "all" => s.labels().collect(),
                v => vec![v.parse()?],
            };
            for v in starts {
                let mut r = rng::keyed(space.seed, &format!("walk/{v}"));
                let w = run_walk(&s, v, &model, acceptance, max_steps, &experience, &mut r)?;
                let path: Vec<String> = w.trajectory.iter().map(|x| x.to_string()).collect();
                let unknown: Vec<String> = w.unknown_edges.iter().map(|e| e.to_string()).collect();
                println!(
                    "{v}: {} -> {} ({} steps, {}){}",
                    path.join(" "),
                    w.attractor,
                    w.steps,
                    if w.absorbed { "absorbed" } else { "step limit" },
                    if unknown.is_empty() { String::new() } else { format!(", unknown edges {}", unknown.join(" ")) }
                );
            }
        }
        Command::Analyze { space, trials, preferences, fixture, resamples, out_dir } => {
            let s = space.space()?;
            let data = match (trials, preferences) {
                (Some(t), Some(p)) => Dataset {
                    trials: read_jsonl(BufReader::new(File::open(t)?))?,
                    preferences: read_jsonl(BufReader::new(File::open(p)?))?,
                },
                _ if fixture => fixtures::paper_shaped_dataset(&s, space.seed),
                _ => return Err("give --trials and --preferences, or --fixture".into()),
            };
            let config = ReportConfig {
                bootstrap: BootstrapConfig { resamples, seed: space.seed, ..Default::default() },
                ..Default::default()
            };
            let r = report(&data, &s, &config)?;
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("report.json"), r.to_json())?;
                    r.write_cooperation_csv(File::create(dir.join("cooperation.csv"))?)?;
                    r.write_preferences_csv(File::create(dir.join("preferences.csv"))?)?;
                    r.write_paths_csv(File::create(dir.join("paths.csv"))?)?;
                    println!("report -> {}", dir.display());
                }
                None => print!("{}", r.to_json()),
            }
        }
        Command::Serve { config, seed, port, data_dir, host } => {
            let mut c = PlatformConfig::load(config.as_deref())?;
            c.seed = seed.unwrap_or(c.seed);
            c.port = port.unwrap_or(c.port);
            c.data_dir = data_dir.unwrap_or(c.data_dir);
            let space = generate_space(&c.space_config())?;
            let addr: SocketAddr = format!("{host}:{}", c.port).parse()?;
            let service = Service::open(space, c)?;
            if !service.is_ready() {
                return Err("game space failed verification; refusing to serve".into());
            }
            tokio::runtime::Runtime::new()?.block_on(http::serve(service, addr, Duration::from_secs(30)))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
