#![no_std]

extern crate alloc;

pub mod backend;
pub mod codec;
pub mod dataset;
pub mod eval;
pub mod generator;
pub mod graph;
pub mod pipeline;
pub mod prompts;
pub mod registry;
pub mod task;
pub mod templates;
pub mod tools;
