//! Turn a forest into rules and check that voting over all of them
//! reproduces the forest.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/weather.csv"), None)?;
    let forest = train_forest(&data, 5, 0)?;
    let rules = extract_rules(&forest);

    for t in 0..rules.n_trees {
        println!("tree {t}:");
        for line in rules.to_text(rules.tree_range(t)).lines() {
            println!("  {line}");
        }
    }

    let coverage = coverage_matrix(&rules, &data)?;
    assert!(coverage.instance_counts().iter().all(|&c| c == rules.n_trees));
    let voter = VotePredictor::full(&rules);
    let agree = data
        .rows()
        .iter()
        .filter(|row| voter.predict_vote(row).unwrap().0 == predict_forest(&forest, row).unwrap())
        .count();
    println!(
        "{} rules; every row is covered by {} of them; rule vote agrees with the forest on {agree}/{} rows",
        rules.len(),
        rules.n_trees,
        data.n_rows()
    );
    Ok(())
}
