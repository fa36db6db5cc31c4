pub mod format;
mod commands;

pub use commands::{
    run, Cli, EXIT_DATA, EXIT_IO, EXIT_IRREGULAR, EXIT_NO_INPUT, EXIT_OK, EXIT_REJECTED, EXIT_USAGE,
};
