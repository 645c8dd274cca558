//! Command-line front end: instance files, reproducible run settings, and
//! thin routing from verbs to the library crates.

pub mod commands;
pub mod instance;

pub use commands::{RunConfig, SearchArgs, Status};
pub use instance::{instance_file, parse_instance, read_instance, write_instance, Instance, InstanceFile, WitnessFile};
