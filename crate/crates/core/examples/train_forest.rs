//! Train a random forest and measure its held-out accuracy.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/wine.csv"), None)?;
    let folds = stratified_kfold(&data, 5, 1)?;
    let split = &folds[0];

    let forest = train_forest_with(
        &split.train,
        &ForestConfig {
            n_trees: 100,
            seed: 7,
            max_features: None,
        },
    )?;
    let depths: Vec<usize> = forest.trees.iter().map(|t| t.depth()).collect();
    println!(
        "{} trees, {} leaves, {} candidate columns per node, max depth {}",
        forest.n_trees(),
        forest.n_leaves(),
        forest.n_candidate_features,
        depths.iter().max().unwrap()
    );
    println!("train accuracy {:.4}", forest.accuracy(&split.train)?);
    println!("test accuracy  {:.4}", forest.accuracy(&split.test)?);

    let first = split.test.row(0);
    println!(
        "first test row: votes {:?}, predicted {}",
        forest.votes(first)?,
        data.schema().class_names[predict_forest(&forest, first)?]
    );
    Ok(())
}
