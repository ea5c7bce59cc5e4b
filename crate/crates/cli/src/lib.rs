//! Command language for the pmcalc current calculus: parser, checker,
//! evaluator and script runner.

pub mod eval;
pub mod script;
pub mod syntax;
pub mod value;

pub use eval::{Checker, Config, Outcome, Session};
pub use script::{run_script, Record, Run, Status};
pub use syntax::{parse_command, parse_expr, Command, Diagnostic, Expr};
