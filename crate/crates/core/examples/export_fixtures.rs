//! Writes the named fixture games and distributions as JSON.
//!
//! cargo run --example export_fixtures -- [DIR]

use std::path::PathBuf;

fn main() -> commeq::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    commeq::fixtures::write_all(&dir)?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
