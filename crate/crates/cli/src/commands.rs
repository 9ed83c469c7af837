//! The three subcommands: simulate, validate, run.

use std::path::Path;

use bodyfield_core::error::{Error, Result};
use bodyfield_core::evaluate::{run_experiment, write_report};
use bodyfield_core::ingest::{dataset_bases, load_dataset, load_session, write_dataset};
use bodyfield_core::sim::{synth_session, ActivityScript, SimConfig};

use crate::config::RunConfig;

/// Synthesises every agent session of a script and writes the dataset.
pub fn cmd_simulate(
    script_path: &Path,
    sim_config_path: Option<&Path>,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let script = ActivityScript::load(script_path)?;
    let mut config = match sim_config_path {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let sessions = synth_session(&script, &config)?;
    let manifest = write_dataset(&sessions, out_dir)?;
    println!(
        "wrote {} sessions ({} groups) to {}",
        manifest.sessions.len(),
        {
            let mut groups: Vec<u32> = manifest.sessions.iter().map(|e| e.group).collect();
            groups.sort_unstable();
            groups.dedup();
            groups.len()
        },
        out_dir.display()
    );
    for entry in &manifest.sessions {
        println!(
            "  {}: {} samples, {:.1} s",
            entry.base, entry.samples, entry.duration_s
        );
    }
    Ok(())
}

/// Checks every session file of a dataset and lists all violations.
pub fn cmd_validate(data_dir: &Path) -> Result<()> {
    let bases = dataset_bases(data_dir)?;
    let mut problems = Vec::new();
    let mut ok = 0usize;
    for base in &bases {
        match load_session(base) {
            Ok(session) => {
                ok += 1;
                println!("ok: {} ({} samples)", base.display(), session.n_samples());
            }
            Err(e) => {
                println!("FAIL: {}", base.display());
                problems.push(e.to_string());
            }
        }
    }
    println!("{ok} of {} sessions valid", bases.len());
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(problems))
    }
}

/// Runs the experiment grid described by a run configuration.
///
/// `config` must already carry all overrides; it is echoed verbatim into
/// `<out_dir>/resolved_config.toml` so the run can be repeated.
pub fn cmd_run(config: &RunConfig) -> Result<()> {
    let sessions = load_dataset(&config.dataset_root)?;
    log::info!(
        "loaded {} sessions from {}",
        sessions.len(),
        config.dataset_root.display()
    );
    let report = run_experiment(&sessions, &config.experiment_config())?;
    write_report(&config.out_dir, &report)?;
    config.save(&config.out_dir.join("resolved_config.toml"))?;
    println!(
        "dataset: {} sessions, {} usable windows of {}",
        report.dataset.sessions, report.dataset.windows_usable, report.dataset.windows_total
    );
    for (key, cell) in &report.cells {
        println!(
            "{key}: pooled macro F {:.4}, fold mean {:.4} ({} instances)",
            cell.pooled.macro_f, cell.fold_mean_macro_f, cell.pooled.n_instances
        );
    }
    println!("report written to {}", config.out_dir.display());
    Ok(())
}
