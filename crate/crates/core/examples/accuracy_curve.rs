//! Accuracy and uncovered fraction as rules are added, on one fold.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast-cancer.csv"), None)?;
    let split = stratified_kfold(&data, 10, 0)?.swap_remove(0);
    let forest = train_forest(&split.train, 100, 0)?;
    let rules = extract_rules(&forest);
    let baseline = forest.accuracy(&split.test)?;

    let config = SelectionConfig::new(Strategy::WeightedCovering, Heuristic::Recall, 200);
    for mode in [UncoveredMode::DefaultClass, UncoveredMode::Error] {
        let curve = accuracy_curve(&rules, &config, &split.train, &split.test, 200, mode)?;
        println!("uncovered instances: {mode}");
        for p in curve.iter().filter(|p| [1, 2, 5, 10, 20, 50, 100, 200].contains(&p.n_rules)) {
            println!("  n={:>3}  accuracy {:.4}  uncovered {:.4}", p.n_rules, p.accuracy, p.uncovered_fraction);
        }
    }
    println!("all {} rules (= forest): {baseline:.4}", rules.len());
    Ok(())
}
