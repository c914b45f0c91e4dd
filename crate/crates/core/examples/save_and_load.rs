//! Persist a forest and a rule subset as versioned JSON documents.
use forest_rules::artifact::{self, SubsetDocument};
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/iris.csv"), None)?;
    let forest = train_forest(&data, 20, 1)?;
    let dir = std::env::temp_dir().join("forest-rules-example");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let forest_path = dir.join("forest.json");
    artifact::save_forest(&forest_path, &forest)?;
    let loaded = artifact::load_forest(&forest_path)?;
    assert_eq!(loaded, forest);

    let rules = extract_rules(&loaded);
    let config = SelectionConfig::new(Strategy::WeightedCovering, Heuristic::Precision, 6);
    let subset = select(&rules, &data, &config)?;
    let doc = SubsetDocument {
        config,
        total_rules: rules.len(),
        forest_seed: loaded.seed,
        rules: rules.to_text(subset.selected.iter().copied()).lines().map(String::from).collect(),
        selected: subset.selected,
        scores: subset.scores,
    };
    let subset_path = dir.join("subset.json");
    artifact::write_json(&subset_path, artifact::RULE_SUBSET, &doc)?;
    let back: SubsetDocument = artifact::read_json(&subset_path, artifact::RULE_SUBSET)?;
    assert_eq!(back, doc);

    println!("wrote {} and {}", forest_path.display(), subset_path.display());
    let text = std::fs::read_to_string(&subset_path).expect("subset file");
    println!("{}", text.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}
