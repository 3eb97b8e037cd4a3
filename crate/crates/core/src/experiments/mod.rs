//! Named experiment suites, their configuration and reports.

mod config;
mod report;
mod suites;

pub use config::{ExperimentConfig, Format, Suite, DEFAULT_BUDGET, DEFAULT_MAX_N, DEFAULT_SAMPLES};
pub use report::{write_report, CaseRow, Relation, Report, Section, Worst};
pub use suites::{
    bounds_section, chain_section, counterexample_section, equalities_section, factorization_section,
    growth_section, identities_section, merges_section, ruan_section, run_counterexamples, run_growth,
    run_suite, suite_sections, BOUNDS, BOUND_TOL, CHAIN, CHAIN_TOL, COUNTEREXAMPLES, EQUALITIES,
    EXACT_TOL, FACTORIZATION, FACTOR_TOL, GROWTH, GROWTH_TOL, IDENTITIES, IDENTITY_TOL, MERGES, RUAN,
};
