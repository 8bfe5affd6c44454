//! Regenerates data/pilot_bands.json.

use std::path::PathBuf;

fn main() -> rmf_lab::Result<()> {
    let bands = rmf_lab::experiment::pilot::generate_pilot()?;
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/pilot_bands.json");
    std::fs::write(&path, serde_json::to_string_pretty(&bands)? + "\n")?;
    println!("wrote {}", path.display());
    Ok(())
}
