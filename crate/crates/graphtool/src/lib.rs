//! File formats, the chat-completions client, the worker pool and the
//! command-line front end around `graphtool-core`.

pub mod cli;
pub mod config;
pub mod http;
pub mod io;
pub mod runner;

pub use graphtool_core as core;
