//! Drive the experiment harness from code: build a config, run it into a
//! temporary directory and print the rendered summary.

use cvqc_lab::cli::{render_summary, run, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("cvqc-lab-example");
    std::fs::create_dir_all(&dir)?;
    let out = dir.join("sweep.csv");
    let sets = [
        "command=repetition-sweep".to_string(),
        "seed=5".into(),
        format!("output_path={:?}", out.display().to_string()),
        "m_max=6".into(),
        "trials=20000".into(),
    ];
    let cfg = ExperimentConfig::load(None, &sets)?;
    let report = run(&cfg)?;
    println!("{} rows, {} failing, data in {}", report.rows, report.failures, report.data_path.display());
    print!("{}", render_summary(&report.data_path)?);
    Ok(())
}
