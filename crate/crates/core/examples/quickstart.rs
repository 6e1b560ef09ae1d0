//! Build the two-piece circle planner, convert it to its loop variant,
//! and certify it with the default sampling budget.

use fiberplan::prelude::*;

fn main() -> Result<()> {
    let planner = circle_planner()?; // 2 pieces on S1 x S1
    let looped = planner.to_loop()?; // same count, loop contract
    let report = fiberplan::verify::verify_planner(&looped, None, &VerificationConfig::default())?;
    assert!(report.overall_pass);
    println!("{}", report.to_json()?);
    Ok(())
}
