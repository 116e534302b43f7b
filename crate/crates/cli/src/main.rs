use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use steiner_core::harness::{
    generate_instance, generate_scenario, load_config, oracle_solve, render_summary, run_suite,
    table1_constants, to_jsonl, InstanceSpec, SolutionSource, Topology,
};
use steiner_core::io::{parse_scenario_file, read_stp_file};
use steiner_core::{
    dreyfus_wagner, format_rational, parse_rational, reoptimize, two_approx, write_scenario,
    write_stp, Error, ExactLimits, MetricClosure, ReoptConfig, Result, ScenarioKind, SteinerForest,
    StpInstance,
};

#[derive(Parser)]
#[command(
    name = "steiner",
    version,
    about = "Steiner tree solving and reoptimization"
)]
struct Cli {
    /// Largest terminal set handed to the exact solver.
    #[arg(long, global = true, env = "STEINER_TERMINAL_CAP")]
    terminal_cap: Option<usize>,
    /// Largest number of trees Connect may join.
    #[arg(long, global = true, env = "STEINER_TREE_CAP")]
    tree_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an .stp instance.
    Solve {
        file: PathBuf,
        #[arg(long, conflicts_with = "two_approx")]
        exact: bool,
        #[arg(long)]
        two_approx: bool,
    },
    /// Reoptimize the solution of a scenario file.
    Reopt {
        scenario: PathBuf,
        #[arg(long, default_value = "1")]
        epsilon: String,
        /// Cap on the number of swapped components (heuristic mode).
        #[arg(long, env = "STEINER_H_CAP")]
        h_cap: Option<u64>,
        /// Print the audit log and enable debug logging.
        #[arg(long, short)]
        verbose: bool,
        /// Emit the result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate instances or scenarios.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Solve with the brute-force oracle.
    Oracle { file: PathBuf },
    /// Print the prior ratios at sigma = ln 4.
    Constants,
    /// Run a batch suite described by a TOML file.
    Suite {
        #[arg(long)]
        config: PathBuf,
        /// Write JSONL reports here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    Instance {
        #[command(flatten)]
        spec: SpecArgs,
    },
    Scenario {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_kind)]
        kind: ScenarioKind,
        #[arg(long, value_enum, default_value = "optimal")]
        solution: SolutionArg,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value = "random-connected")]
    topology: String,
    #[arg(long, default_value_t = 0.4)]
    terminal_fraction: f64,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    chords: usize,
    #[arg(long, default_value_t = 1)]
    weight_min: u64,
    #[arg(long, default_value_t = 10)]
    weight_max: u64,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolutionArg {
    Optimal,
    TwoApprox,
}

fn parse_kind(s: &str) -> std::result::Result<ScenarioKind, String> {
    ScenarioKind::from_name(s).ok_or_else(|| format!("unknown modification {s:?}"))
}

impl SpecArgs {
    fn instance(&self) -> Result<StpInstance> {
        let spec = InstanceSpec {
            n: self.n,
            terminal_fraction: self.terminal_fraction,
            weight_min: self.weight_min,
            weight_max: self.weight_max,
            topology: Topology::from_name(&self.topology, self.density, self.chords)?,
        };
        generate_instance(self.seed, &spec)
    }
}

fn limits(cli: &Cli) -> ExactLimits {
    let mut limits = ExactLimits::default();
    if let Some(c) = cli.terminal_cap {
        limits.terminal_cap = c;
    }
    if let Some(c) = cli.tree_cap {
        limits.tree_cap = c;
    }
    limits
}

fn write_tree(out: &mut String, inst: &StpInstance, tree: &SteinerForest) {
    writeln!(out, "cost {}", inst.format_cost(tree.cost(inst))).unwrap();
    writeln!(out, "edges {}", tree.edge_count()).unwrap();
    for &(a, b) in tree.edges() {
        writeln!(out, "E {} {}", a + 1, b + 1).unwrap();
    }
}

/// Runs the command and returns what goes to stdout.
fn run(cli: &Cli) -> Result<String> {
    let mut out = String::new();
    let limits = limits(cli);
    match &cli.command {
        Command::Solve {
            file,
            two_approx: approx,
            ..
        } => {
            let inst = read_stp_file(file)?;
            let metric = MetricClosure::new(&inst);
            let tree = if *approx {
                two_approx(&inst, &metric)?
            } else {
                dreyfus_wagner(&inst, &metric, &limits)?.tree
            };
            write_tree(&mut out, &inst, &tree);
        }
        Command::Reopt {
            scenario,
            epsilon,
            h_cap,
            verbose,
            json,
        } => {
            let task = parse_scenario_file(scenario)?;
            let cfg = ReoptConfig {
                epsilon: parse_rational(epsilon)?,
                h_cap: *h_cap,
                limits,
            };
            let res = reoptimize(&task, &cfg)?;
            let inst = &res.instance;
            if *json {
                let value = serde_json::json!({
                    "modification": res.kind(),
                    "mode": res.mode(),
                    "epsilon": format_rational(&res.params.epsilon),
                    "rho": format_rational(&res.params.rho),
                    "bound": format_rational(&res.params.bound()),
                    "h_theoretical": res.params.h.theoretical.to_string(),
                    "h_effective": res.params.h.effective().to_string(),
                    "scale": inst.scale(),
                    "input_cost": res.input_cost,
                    "input_feasible": res.input_feasible,
                    "cost": res.cost,
                    "kept_input": res.kept_input,
                    "edges": res.tree.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
                    "notes": res.notes,
                    "audit": if *verbose { serde_json::to_value(&res.audit).unwrap() } else { serde_json::Value::Null },
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap()).unwrap();
                return Ok(out);
            }
            let mode = serde_json::to_value(res.mode()).unwrap();
            writeln!(out, "modification {}", res.kind()).unwrap();
            writeln!(out, "mode {}", mode.as_str().unwrap_or_default()).unwrap();
            writeln!(out, "bound {}", format_rational(&res.params.bound())).unwrap();
            writeln!(out, "input-cost {}", inst.format_cost(res.input_cost)).unwrap();
            if res.kept_input {
                writeln!(out, "kept-input").unwrap();
            }
            write_tree(&mut out, inst, &res.tree);
            if *verbose {
                for note in &res.notes {
                    eprintln!("note: {note}");
                }
                for stage in &res.audit {
                    eprintln!(
                        "stage {}: {} components, d = {}, fallback {}, h = {}, best {}",
                        stage.label,
                        stage.components,
                        inst.format_cost(stage.restricted_cost),
                        stage.build.fallback,
                        stage.build.h_effective,
                        inst.format_cost(stage.build.cost)
                    );
                }
            }
        }
        Command::Gen { what } => {
            let (spec, text) = match what {
                GenCommand::Instance { spec } => (spec, write_stp(&spec.instance()?)),
                GenCommand::Scenario {
                    spec,
                    kind,
                    solution,
                } => {
                    let source = match solution {
                        SolutionArg::Optimal => SolutionSource::Optimal,
                        SolutionArg::TwoApprox => SolutionSource::TwoApprox,
                    };
                    (
                        spec,
                        write_scenario(&generate_scenario(
                            spec.seed,
                            &spec.instance()?,
                            *kind,
                            source,
                        )?),
                    )
                }
            };
            match &spec.output {
                Some(path) => fs::write(path, text)?,
                None => out = text,
            }
        }
        Command::Oracle { file } => {
            let inst = read_stp_file(file)?;
            let sol = oracle_solve(&inst)?;
            write_tree(&mut out, &inst, &sol.tree(&inst));
        }
        Command::Constants => {
            for row in table1_constants() {
                writeln!(
                    out,
                    "{:<16} {:<16} {:.4} (quoted {})",
                    row.scenario.name(),
                    row.formula,
                    row.value,
                    row.quoted
                )
                .unwrap();
            }
        }
        Command::Suite { config, out: path } => {
            let text = fs::read_to_string(config)?;
            let mut cfg = load_config(&text)?;
            cfg.terminal_cap = cli.terminal_cap.or(cfg.terminal_cap);
            cfg.tree_cap = cli.tree_cap.or(cfg.tree_cap);
            if let Ok(cap) = std::env::var("STEINER_H_CAP") {
                let cap = cap
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("STEINER_H_CAP = {cap:?}")))?;
                cfg.h_cap = Some(cap);
            }
            let result = run_suite(&cfg)?;
            let jsonl = to_jsonl(&result.reports);
            let summary = render_summary(&result.summary);
            match path {
                Some(path) => {
                    fs::write(path, jsonl)?;
                    out = summary;
                }
                None => {
                    eprint!("{summary}");
                    out = jsonl;
                }
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    let verbose = matches!(cli.command, Command::Reopt { verbose: true, .. });
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose {
        "debug"
    } else {
        "warn"
    }))
    .init();
    match run(&cli) {
        Ok(text) => {
            // A closed pipe is not an error for a command line filter.
            match std::io::stdout().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
