//! The two-line synthetic problem: where do 30 selected rules sit in the
//! unit square? Prints coarse vote maps for best-n and weighted covering.
use forest_rules::dataset::{BLUE, RED};
use forest_rules::evaluation::rule_rectangles;
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = generate_synthetic(800, 200, 0.05, 0)?;
    let rules = extract_rules(&train_forest(&data, 100, 0)?);
    let h = Heuristic::MEstimate { m: DEFAULT_M };
    println!("{} rules from 100 trees", rules.len());

    for (name, subset) in [
        ("best-n", select_best_n(&rules, &data, h, 30)?),
        ("weighted covering", select_weighted_covering(&rules, &data, h, 30)?),
    ] {
        let fine = rule_rectangles(&rules, &subset.selected, 100)?;
        println!("\n{name}: 100x100 grid coverage {:.3}", fine.grid_coverage);
        // '+' blue majority, '-' red majority, '0' tie, ' ' no rule; y grows upwards.
        let voter = VotePredictor::from_indices(&rules, subset.selected.clone())?;
        for iy in (0..24).rev() {
            let line: String = (0..24)
                .map(|ix| {
                    let cell = Instance::numeric(&[(ix as f64 + 0.5) / 24.0, (iy as f64 + 0.5) / 24.0]);
                    let votes = voter.votes(&cell).unwrap();
                    match (votes[RED], votes[BLUE]) {
                        (0, 0) => ' ',
                        (r, b) if b > r => '+',
                        (r, b) if r > b => '-',
                        _ => '0',
                    }
                })
                .collect();
            println!("  |{line}|");
        }
    }
    Ok(())
}
