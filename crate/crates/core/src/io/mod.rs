//! Text formats: SteinLib-style `.stp` instances and reoptimization
//! scenarios.

mod decimal;
pub mod scenario;
pub mod stp;

pub use scenario::{
    parse_scenario, parse_scenario_file, parse_scenario_with, write_scenario, Modification,
    ScenarioFile,
};
pub use stp::{parse_stp, read_stp_file, write_stp};
