//! Mining toolchain for studying how test maintenance co-evolves with
//! production code maintenance in Java repository histories.
//!
//! The crate is organized along the pipeline:
//!
//! * [`vcs`] replays a repository's first-parent history and yields the
//!   before/after text of every changed Java file per commit.
//! * [`ast`] parses Java source into a normalized entity tree.
//! * [`distill`] diffs two entity trees into classified semantic changes.
//! * [`testdet`] recognizes test classes/methods and folds a commit's
//!   changes into its test-maintenance profile.
//! * [`classify`] labels commits as corrective/perfective/adaptive from
//!   message keywords and change-type frequencies.
//! * [`stats`] fits and evaluates the regression models (negative-binomial
//!   and logistic GLMs, ANOVA, rank tests, robust outlier fences).
//! * [`dataset`] joins everything into the per-commit and per-project
//!   analysis tables.

pub mod ast;
pub mod classify;
pub mod dataset;
pub mod distill;
pub mod stats;
pub mod testdet;
pub mod vcs;
