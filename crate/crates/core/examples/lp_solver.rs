//! The embedded simplex solver on a small problem, under both pivot rules.

use densetest::lp::{LpProblem, PivotRule, Relation, SimplexOptions, solve_lp_with};

fn main() -> densetest::Result<()> {
    // min -x - 2y  s.t.  x + y <= 4,  x - y >= -2,  0 <= x <= 3,  y >= 0.
    let mut lp = LpProblem::new(vec![-1.0, -2.0]);
    lp.set_bounds(0, 0.0, 3.0).set_bounds(1, 0.0, f64::INFINITY);
    lp.add_constraint(vec![1.0, 1.0], Relation::Le, 4.0)
        .add_constraint(vec![1.0, -1.0], Relation::Ge, -2.0);

    for rule in [PivotRule::DantzigBland, PivotRule::Bland] {
        let sol = solve_lp_with(
            &lp,
            &SimplexOptions {
                rule,
                ..Default::default()
            },
        )?;
        println!(
            "{rule:?}: {:?}, x = {:?}, objective = {}, pivots = {}",
            sol.status, sol.x, sol.objective_value, sol.pivots
        );
    }

    lp.add_constraint(vec![1.0, 0.0], Relation::Ge, 5.0);
    let sol = solve_lp_with(&lp, &SimplexOptions::default())?;
    println!("with x >= 5 added: {:?}", sol.status);
    Ok(())
}
