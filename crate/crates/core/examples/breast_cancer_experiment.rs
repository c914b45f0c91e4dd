//! Cross-validated accuracy curves on breast-cancer for every strategy and
//! heuristic. Usage:
//! `cargo run --release --example breast_cancer_experiment [seed] [curves.csv]`.
use forest_rules::prelude::*;

fn main() -> forest_rules::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seed = args.get(1).map_or(0, |s| s.parse().expect("seed must be an integer"));
    let data = load_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast-cancer.csv"), None)?;
    let m_estimate = Heuristic::MEstimate { m: DEFAULT_M };
    let mut curves = vec![CurveSpec::new(Strategy::RandomTrees, m_estimate)];
    for strategy in [Strategy::BestN, Strategy::WeightedCovering] {
        for h in [Heuristic::Precision, Heuristic::Recall, m_estimate] {
            curves.push(CurveSpec::new(strategy, h));
        }
    }
    let config = ExperimentConfig {
        curves,
        n_max: Some(2000),
        seed,
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&data, &config)?;
    println!("baseline (all rules): {:.4}", result.baseline_accuracy);
    let budgets = [1, 5, 10, 20, 40, 60, 100, 200, 500, 1000, 2000];
    print!("{:<18} {:<11}", "strategy", "heuristic");
    budgets.iter().for_each(|n| print!(" {n:>6}"));
    println!();
    for curve in &result.mean_curves {
        print!("{:<18} {:<11}", curve.strategy.name(), curve.heuristic);
        for &n in &budgets {
            match curve.points.get(n - 1) {
                Some(p) => print!(" {:>6.4}", p.accuracy),
                None => print!(" {:>6}", "-"),
            }
        }
        println!();
    }
    if let Some(path) = args.get(2) {
        let file = std::fs::File::create(path).expect("cannot create CSV file");
        result.write_csv(std::io::BufWriter::new(file))?;
        println!("curves written to {path}");
    }
    Ok(())
}
