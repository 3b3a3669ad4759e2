//! Numerical checks of the stability inequalities, the vanishing-noise
//! experiments and empirical rates.

pub mod checks;
pub mod generate;
pub mod rates;
pub mod report;
pub mod suite;
pub mod topology;

pub use checks::*;
pub use rates::{default_rate_measure, run_rate_experiment};
pub use report::{kendall_tau, BoundReport, RateFit};
pub use suite::{run_suite, SuiteKind, SuiteReport};
pub use topology::{run_topology_experiment, Regime, TrendReport};
