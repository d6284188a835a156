//! Termination analysis for rewrite systems on simply typed λ-terms with
//! higher-order dependency pairs.
//!
//! The pipeline: check every rule against the pattern computability
//! closure of its left-hand side ([`pcc`]), extract dependency pairs and
//! their side condition ([`dp`]), then look for a reduction pair that
//! weakly orients the rules and strictly orients the pairs ([`order`]).
//! A bounded explorer ([`rewrite`]) looks for cycles when asked to disprove.

pub mod dp;
pub mod error;
pub mod matching;
pub mod order;
pub mod parse;
pub mod pcc;
pub mod pipeline;
pub mod report;
pub mod rewrite;
pub mod seeds;
pub mod signature;
pub mod system;
pub mod term;
pub mod types;

pub use error::{Error, Result};
pub use parse::{parse_system, parse_term};
pub use pipeline::{run_pipeline, Options, Stage, Verdict};
pub use report::{render_report, AnalysisReport, Format};
pub use system::{RewriteSystem, Rule};
pub use term::{Substitution, Symbol, Term, Var};
pub use types::{Position, Type};
