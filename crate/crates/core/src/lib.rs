//! Structural balance analysis of signed graphs: frustration index by
//! branch and bound, partial-balance measures, random and structured graph
//! families, and reshuffling tests.

pub mod balance;
pub mod cycles;
pub mod decompose;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod solver;
pub mod stats;

pub use balance::{
    frustrated_edges, frustration_count, is_balanced, local_search_upper_bound, reshuffle, switch,
    BalanceCheck,
};
pub use error::{Error, Result};
pub use graph::{Colouring, DegreeProfile, Edge, Sign, SignedGraph};
pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use generators::{generate, FamilySpec, Signing, Topology};
pub use report::{analyze, AnalyzeOptions, MeasureReport};
pub use solver::{solve, solve_kcolour, solve_weighted, FrustrationResult, SolverConfig, Status};
pub use stats::{monte_carlo_expected_dk, reshuffle_experiment, ReshuffleSummary, Statistic};
