//! Configuration handling shared by the `delaylog` binary.

pub mod config;
