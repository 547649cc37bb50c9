//! Regenerates `data/sample.csv`: the bundled stand-in sensor capture.
//!
//! The file is the default synthetic benchmark at 60 samples, min-max
//! normalized on both axes (the form sensor dumps usually arrive in
//! here), so `densefit train data/sample.csv --already-normalized` works
//! out of the box.
//!
//! Usage: cargo run -p densefit-core --example generate_sample [path]

use densefit_core::bench::{generate, SyntheticSpec};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/sample.csv".to_string());
    let spec = SyntheticSpec {
        n_samples: 60,
        ..SyntheticSpec::default()
    };
    let (noisy, _) = generate(&spec).expect("default spec is valid");
    let (normalized, _) = noisy.normalize().expect("generated span is nonzero");

    if let Some(parent) = std::path::Path::new(&path).parent() {
        std::fs::create_dir_all(parent).expect("create output directory");
    }
    let mut buffer = Vec::new();
    densefit_core::csv_io::write_series(
        &mut buffer,
        normalized.times(),
        normalized.values(),
        &[],
    )
    .expect("encode CSV");
    std::fs::write(&path, buffer).expect("write CSV");
    println!("wrote {path}");
}
