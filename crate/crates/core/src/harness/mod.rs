//! Seeded identity suites and their negative controls.

pub mod rng;
mod suites;

pub use suites::{cubic_report, mutate_and_expect_failure, mutate_on, random_sl3, run_suite, run_suite_on, SuiteInput, Caps, ConfigEcho, SuiteConfig, SuiteReport, Verdict, SUITES};
