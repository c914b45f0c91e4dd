//! Compare the three selection strategies on one forest.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast-cancer.csv"), None)?;
    let split = stratified_kfold(&data, 10, 0)?.swap_remove(0);
    let forest = train_forest(&split.train, 100, 0)?;
    let rules = extract_rules(&forest);
    println!("{} rules, forest test accuracy {:.4}", rules.len(), forest.accuracy(&split.test)?);

    let m_estimate = Heuristic::MEstimate { m: DEFAULT_M };
    // Random trees add whole trees, so the budget has to exceed a tree's size.
    let configs = [
        SelectionConfig::new(Strategy::BestN, m_estimate, 300),
        SelectionConfig::new(Strategy::WeightedCovering, Heuristic::Recall, 300),
        SelectionConfig::new(Strategy::WeightedCovering, m_estimate, 300),
        SelectionConfig::new(Strategy::RandomTrees, m_estimate, 300),
    ];
    for config in &configs {
        let subset = select(&rules, &split.train, config)?;
        let predictor = VotePredictor::new(&rules, &subset)?;
        println!(
            "{:<18} {:<10} {:>3} rules  accuracy {:.4}  uncovered {:.4}",
            config.strategy.name(),
            if config.strategy == Strategy::RandomTrees { "-" } else { config.heuristic.name() },
            subset.len(),
            predictor.accuracy(&split.test)?,
            predictor.uncovered_fraction(&split.test)?
        );
    }

    let covering = select_weighted_covering(&rules, &split.train, m_estimate, 5)?;
    println!("first five weighted-covering rules:");
    print!("{}", rules.to_text(covering.selected.iter().copied()));
    Ok(())
}
