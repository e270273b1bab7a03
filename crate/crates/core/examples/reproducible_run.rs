//! A recorded run with a manifest, replayed on a different worker count.
use anderson2p::cli::config::ExperimentConfig;
use anderson2p::cli::{replay, run_recorded, Command};

fn main() -> anderson2p::Result<()> {
    let dir = std::env::temp_dir().join(format!("anderson2p-example-{}", std::process::id()));
    let cfg = ExperimentConfig::from_toml_with_overrides(
        "[run]\nn_samples = 500\nmode = \"montecarlo\"\n",
        &["run.workers=1".to_string()],
    )?;
    let out = run_recorded(&Command::EstimateS0, &cfg, &dir)?;
    for l in &out.lines {
        println!("{l}");
    }
    println!("config hash {}", out.manifest.config_hash);
    for f in &out.manifest.files {
        println!("  {} {}", f.sha256, f.path);
    }
    let again = replay(&dir, Some(4))?;
    println!("replay on {} workers matches {} files", again.workers, again.files.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
