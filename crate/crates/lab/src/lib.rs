//! File formats, experiment harness and command-line front end for
//! `localq_core`.

pub mod formats;
pub mod harness;
pub mod instances;
