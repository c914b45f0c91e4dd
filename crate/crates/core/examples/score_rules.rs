//! Confusion counts and heuristic values of individual rules, with and
//! without instance weights.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast-cancer.csv"), None)?;
    let rules = extract_rules(&train_forest(&data, 10, 0)?);
    let priors = data.class_priors();
    let heuristics = [Heuristic::Precision, Heuristic::Recall, Heuristic::MEstimate { m: DEFAULT_M }];

    println!("{:>5} {:>6} {:>6} {:>6} {:>6}  precision recall m-estimate", "rule", "tp", "fp", "tn", "fn");
    for r in (0..rules.len()).step_by(rules.len() / 8) {
        let rule = &rules.rules[r];
        let c = confusion_counts(rule, &data, data.weights())?;
        let values: Vec<String> = heuristics
            .iter()
            .map(|h| format!("{:.4}", h.evaluate(&c, priors[rule.head])))
            .collect();
        println!("{r:>5} {:>6} {:>6} {:>6} {:>6}  {}", c.tp, c.fp, c.tn, c.fn_, values.join("    "));
    }

    // Halving the weight of the first 100 rows changes the counts.
    let mut weights = vec![1.0; data.n_rows()];
    weights[..100].iter_mut().for_each(|w| *w = 0.5);
    let c = confusion_counts(&rules.rules[0], &data, &weights)?;
    println!("rule 0 with halved weights: {c:?}");
    Ok(())
}
