//! Regenerates `data/sample_survey.csv` and `data/sample_model.toml`.
//!
//! cargo run -p adcmodel --example make_sample

use std::path::Path;

use adcmodel::synthetic::{generate, sample_spec, sample_truth, to_csv, SAMPLE_SEED};
use adcmodel::{load_corpus, AreaFitOptions, ColumnMapping, EnergyFitOptions, ModelDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR"))?;
    let data = Path::new("data");
    let (energy, area) = sample_truth();
    let corpus = generate(&energy, &area, &sample_spec(), SAMPLE_SEED)?;
    let csv_path = data.join("sample_survey.csv");
    std::fs::write(&csv_path, to_csv(&corpus))?;

    // Fit from the file as written so provenance matches a CLI fit.
    let loaded = load_corpus(&csv_path, &ColumnMapping::default())?;
    let doc = ModelDocument::fit(
        &loaded.corpus,
        &EnergyFitOptions::default(),
        &AreaFitOptions::default(),
    )?;
    doc.save(&data.join("sample_model.toml"))?;
    println!("{}", doc.to_toml_string());
    Ok(())
}
