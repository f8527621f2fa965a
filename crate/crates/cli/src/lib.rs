//! Configuration, output handling and subcommands behind the `cnls` binary.

pub mod commands;
pub mod config;
pub mod output;
