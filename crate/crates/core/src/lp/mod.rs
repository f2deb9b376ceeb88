//! Dense linear programming.

mod problem;
mod simplex;

pub use problem::{Constraint, LpProblem, LpSolution, LpStatus, Relation, VarBound};
pub use simplex::{PivotRule, SimplexOptions, solve_lp, solve_lp_with};
