//! Command-line driver for `polyharm`: reads a run configuration, runs one
//! command and writes CSV tables plus a `manifest.json` into the output
//! directory.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

use polyharm::Error;

pub use commands::Command;
pub use config::{ConfigError, RunConfig};
use output::{ConfigEntry, RunManifest, Sink};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;
pub const EXIT_IO: u8 = 5;
pub const EXIT_BOUNDARY: u8 = 6;

/// Exit status for an error, from the first recognised cause in its chain.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::BoundaryCase(_) => EXIT_BOUNDARY,
                Error::ZeroTrace
                | Error::IllConditionedDerivative { .. }
                | Error::Magnitude { .. } => EXIT_NUMERICAL,
                _ => EXIT_INPUT,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    1
}

/// Runs `command` and writes its outputs and manifest into `out`.
pub fn run(command: Command, config: &RunConfig, out: &Path) -> anyhow::Result<RunManifest> {
    let mut sink = Sink::new(out)?;
    commands::execute(command, config, &mut sink)?;
    let manifest = RunManifest {
        tool: "polyharm",
        version: env!("CARGO_PKG_VERSION"),
        library_version: polyharm::VERSION,
        command: command.name().to_string(),
        config: config
            .echo
            .iter()
            .map(|(key, value)| ConfigEntry {
                key: key.clone(),
                value: value.clone(),
            })
            .collect(),
        threads: rayon::current_num_threads(),
        timings: sink.timings.clone(),
        outputs: sink.outputs.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(out.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}
