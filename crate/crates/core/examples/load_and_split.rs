//! Load a CSV dataset and split it into stratified folds.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast-cancer.csv");
    let data = load_csv(path, None)?;
    let schema = data.schema();
    println!("{} rows, {} columns, label '{}'", data.n_rows(), data.n_columns(), schema.label);
    for column in &schema.columns {
        match column.cardinality() {
            Some(k) => println!("  {:<12} categorical ({k} values)", column.name),
            None => println!("  {:<12} numeric", column.name),
        }
    }
    for (name, count) in schema.class_names.iter().zip(data.class_counts()) {
        println!("class {name}: {count}");
    }

    for fold in stratified_kfold(&data, 10, 0)? {
        println!(
            "fold {}: train {} / test {} (class counts {:?})",
            fold.fold_index,
            fold.train.n_rows(),
            fold.test.n_rows(),
            fold.test.class_counts()
        );
    }
    Ok(())
}
