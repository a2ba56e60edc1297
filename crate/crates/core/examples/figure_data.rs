//! Runs a shipped sweep config through the library and prints the CSV.
//!
//! `cargo run --example figure_data -- configs/fig2_qubit.json`

use std::path::PathBuf;

use thermometry::cli::{cmd_sweep, to_csv};
use thermometry::config::RunConfig;

fn main() -> thermometry::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig2_qubit.json"));
    let cfg = RunConfig::from_path(&path)?;
    print!("{}", to_csv(&cmd_sweep(&cfg, None)?));
    Ok(())
}
