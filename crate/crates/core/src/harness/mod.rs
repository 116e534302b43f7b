//! Oracle, generators, reference constants and the suite runner.

pub mod constants;
pub mod generate;
pub mod oracle;
pub mod suite;

pub use constants::{table1_constants, RatioRow};
pub use generate::{generate_instance, generate_scenario, InstanceSpec, SolutionSource, Topology};
pub use oracle::{oracle_solve, OracleSolution, ORACLE_MAX_TERMINALS, ORACLE_MAX_VERTICES};
pub use suite::{
    load_config, render_summary, run_suite, to_jsonl, RunReport, SuiteConfig, SuiteOutput,
    SummaryRow,
};
