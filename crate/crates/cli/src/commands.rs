//! The compute, generate, and scatter commands.
//!
//! Each command is a plain function over parsed options so integration
//! tests can call it without spawning a process. File-system work stays
//! here; argument parsing stays in the binary.

use std::fs;
use std::path::{Path, PathBuf};

use ergoscope_core::ergotropy::{k_ergotropic_score_with_budget, DEFAULT_PARTITION_BUDGET};
use ergoscope_core::geometric::GtmeConfig;
use ergoscope_core::random::RandomStateConfig;
use ergoscope_core::{ergotropy, geometric, io, random};
use ergoscope_core::{Bipartition, CovarianceMatrix, Error, ModePartition};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::records::{self, ExperimentRecord};
use crate::{CliError, Result};

/// Mixed into per-sample optimizer seeds so the optimizer's random
/// restarts never replay the state generator's substreams.
pub const GTME_SEED_DOMAIN: u64 = 0x4754_4d45;

/// Optimizer settings assembled from CLI flags and an optional JSON
/// config file. Flags win over the file; the file wins over defaults.
#[derive(Debug, Clone, Default)]
pub struct OptimizerOptions {
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub config_file: Option<PathBuf>,
}

impl OptimizerOptions {
    /// Merge defaults, config file, and flags into one config.
    pub fn resolve(&self) -> Result<GtmeConfig> {
        let mut config = match &self.config_file {
            None => GtmeConfig::default(),
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|err| CliError::io(path, err))?;
                serde_json::from_str(&text).map_err(|err| {
                    Error::Parse(format!("{}: {err}", path.display()))
                })?
            }
        };
        if let Some(restarts) = self.restarts {
            config.restarts = restarts;
        }
        if let Some(max_iters) = self.max_iters {
            config.max_iters = max_iters;
        }
        if let Some(tol) = self.tol {
            config.tol = tol;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        Ok(config)
    }
}

/// Quantifier selection for `compute`.
#[derive(Debug, Clone, Default)]
pub struct ComputeOptions {
    /// Emit everything defined for the state.
    pub all: bool,
    pub spectrum: bool,
    pub energy: bool,
    pub purity: bool,
    pub entropy: bool,
    pub global_ergotropy: bool,
    /// Bipartitions like "0,2|1,3" to evaluate the bipartite gap on.
    pub delta2: Vec<String>,
    /// Partitions like "0,2|1|3" to evaluate the k-local gap on.
    pub partitions: Vec<String>,
    /// Minimize the k-local gap over all k-partitions.
    pub score: bool,
    /// Block count for `score`.
    pub k: usize,
    /// Partition-scan cap; defaults to the library budget.
    pub budget: Option<u128>,
    pub ggm: bool,
    pub gtme: bool,
    pub optimizer: OptimizerOptions,
}

/// Every unordered bipartition of `n` modes, each listed once (block
/// containing mode 0 first), in mask order.
pub(crate) fn all_bipartitions(n: usize) -> Vec<Bipartition> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    // Subsets containing mode 0, excluding the full set.
    for raw in 0..((1u64 << (n - 1)) - 1) {
        let mask = (raw << 1) | 1;
        let block: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        out.push(Bipartition::new(n, &block).expect("proper nonempty subset"));
    }
    out
}

fn require_mode_count(partition: &ModePartition, n_modes: usize) -> Result<()> {
    if partition.n_modes() != n_modes {
        return Err(Error::InvalidArgument(format!(
            "partition names {} modes but the state has {}; every mode index \
             must appear in exactly one block",
            partition.n_modes(),
            n_modes
        ))
        .into());
    }
    Ok(())
}

/// Parse a two-block partition string like "0,2|1,3" against a known
/// mode count.
pub fn parse_bipartition(text: &str, n_modes: usize) -> Result<Bipartition> {
    let partition: ModePartition = text.parse()?;
    require_mode_count(&partition, n_modes)?;
    Ok(partition.to_bipartition()?)
}

/// Parse a partition string like "0,2|1|3" against a known mode count.
pub fn parse_partition(text: &str, n_modes: usize) -> Result<ModePartition> {
    let partition: ModePartition = text.parse()?;
    require_mode_count(&partition, n_modes)?;
    Ok(partition)
}

fn bipartition_label(bp: &Bipartition) -> String {
    ModePartition::from_bipartition(bp).to_string()
}

fn json_count(count: u128) -> serde_json::Value {
    match u64::try_from(count) {
        Ok(small) => json!(small),
        Err(_) => json!(count.to_string()),
    }
}

/// Evaluate the requested quantifiers on a covariance-matrix file and
/// return the JSON report.
pub fn cmd_compute(path: &Path, opts: &ComputeOptions) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).map_err(|err| CliError::io(path, err))?;
    let cm = io::cm_from_json(&text)?;
    let n = cm.n_modes();
    let pure = cm.is_pure();
    let budget = opts.budget.unwrap_or(DEFAULT_PARTITION_BUDGET);

    let mut report = serde_json::Map::new();
    report.insert("file".into(), json!(path.display().to_string()));
    report.insert("n_modes".into(), json!(n));
    report.insert("pure".into(), json!(pure));
    // Quantifiers defined only for pure states, skipped under --all on a
    // mixed or single-mode input instead of failing the whole report.
    let mut skipped: Vec<String> = Vec::new();

    if opts.all || opts.spectrum {
        let spectrum = cm.symplectic_eigenvalues()?;
        report.insert("symplectic_spectrum".into(), json!(spectrum.values()));
    }
    if opts.all || opts.energy {
        report.insert(
            "energy".into(),
            json!({
                // Covariance trace; the generator's total-energy knob.
                "trace": cm.matrix().trace(),
                // Harmonic Hamiltonian expectation, trace / 4.
                "hamiltonian": cm.energy(),
            }),
        );
    }
    if opts.all || opts.purity {
        report.insert("purity".into(), json!(cm.purity()?));
    }
    if opts.all || opts.entropy {
        report.insert("renyi2_entropy".into(), json!(cm.renyi2_entropy()?));
        report.insert(
            "von_neumann_entropy".into(),
            json!(cm.von_neumann_entropy()?),
        );
    }
    if opts.all || opts.global_ergotropy {
        report.insert(
            "global_ergotropy".into(),
            json!(ergotropy::global_ergotropy(&cm)?),
        );
    }

    let mut delta2_entries = Vec::new();
    if opts.all {
        if pure {
            for bp in all_bipartitions(n) {
                let gap = ergotropy::two_local_gap(&cm, &bp)?;
                delta2_entries.push(json!({
                    "bipartition": bipartition_label(&bp),
                    "value": gap.value,
                }));
            }
        } else {
            skipped.push("delta2".into());
        }
    }
    for text in &opts.delta2 {
        let bp = parse_bipartition(text, n)?;
        let gap = ergotropy::two_local_gap(&cm, &bp)?;
        delta2_entries.push(json!({
            "bipartition": bipartition_label(&bp),
            "value": gap.value,
        }));
    }
    if !delta2_entries.is_empty() {
        report.insert("delta2".into(), json!(delta2_entries));
    }

    let mut gap_entries = Vec::new();
    for text in &opts.partitions {
        let partition = parse_partition(text, n)?;
        let gap = ergotropy::k_local_gap(&cm, &partition)?;
        gap_entries.push(json!({
            "partition": partition.to_string(),
            "k": partition.k(),
            "value": gap.value,
        }));
    }
    if !gap_entries.is_empty() {
        report.insert("k_local_gaps".into(), json!(gap_entries));
    }

    let mut score_entries = Vec::new();
    if opts.all {
        if pure {
            for k in 2..=n {
                score_entries.push(score_entry(&cm, k, budget)?);
            }
        } else {
            skipped.push("score".into());
        }
    } else if opts.score {
        score_entries.push(score_entry(&cm, opts.k, budget)?);
    }
    if !score_entries.is_empty() {
        report.insert("scores".into(), json!(score_entries));
    }

    if opts.ggm || (opts.all && pure && n >= 2) {
        report.insert("ggm".into(), json!(geometric::ggm(&cm)?));
    } else if opts.all {
        skipped.push(if pure { "ggm (needs >= 2 modes)" } else { "ggm" }.into());
    }

    if opts.gtme || (opts.all && pure) {
        let config = opts.optimizer.resolve()?;
        let result = geometric::gtme(&cm, &config)?;
        report.insert(
            "gtme".into(),
            serde_json::to_value(&result).expect("finite optimizer output"),
        );
    } else if opts.all {
        skipped.push("gtme".into());
    }

    if !skipped.is_empty() {
        report.insert("skipped_pure_only".into(), json!(skipped));
    }
    Ok(serde_json::Value::Object(report))
}

fn score_entry(cm: &CovarianceMatrix, k: usize, budget: u128) -> Result<serde_json::Value> {
    let result = k_ergotropic_score_with_budget(cm, k, budget)?;
    Ok(json!({
        "k": k,
        "value": result.score,
        "argmin_partition": result.argmin_partition.to_string(),
        "partitions_searched": json_count(result.n_partitions_searched),
    }))
}

/// Sample random pure states and write one JSON file per state into
/// `out_dir`. Returns the written paths in sample order.
pub fn cmd_generate(
    n_modes: usize,
    total_energy: f64,
    samples: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let config = RandomStateConfig {
        n_modes,
        total_energy,
        seed,
    };
    fs::create_dir_all(out_dir).map_err(|err| CliError::io(out_dir, err))?;
    let mut paths = Vec::with_capacity(samples as usize);
    for index in 0..samples {
        let cm = random::random_pure_cm_sample(&config, index)?;
        let path = out_dir.join(format!("state_{index:04}.json"));
        fs::write(&path, io::cm_to_json(&cm)).map_err(|err| CliError::io(&path, err))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Evaluate every sweep quantifier on `samples` random pure states.
///
/// Rows come back ordered by sample index regardless of which worker
/// finished first, and a rerun with the same arguments reproduces them
/// exactly. Optimizer non-convergence is recorded in the row, never an
/// error.
pub fn scatter_records(
    n_modes: usize,
    total_energy: f64,
    samples: u64,
    seed: u64,
    optimizer: &GtmeConfig,
) -> Result<Vec<ExperimentRecord>> {
    if !(2..=6).contains(&n_modes) {
        return Err(Error::InvalidArgument(format!(
            "sweeps support 2 to 6 modes, got {n_modes}"
        ))
        .into());
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()).into());
    }
    let config = RandomStateConfig {
        n_modes,
        total_energy,
        seed,
    };
    (0..samples)
        .into_par_iter()
        .map(|index| -> Result<ExperimentRecord> {
            let cm = random::random_pure_cm_sample(&config, index)?;
            let delta2 = ergotropy::k_ergotropic_score(&cm, 2)?.score;
            let ggm = geometric::ggm(&cm)?;
            let delta_n = ergotropy::k_ergotropic_score(&cm, n_modes)?.score;
            let gtme_config = GtmeConfig {
                seed: optimizer.seed ^ seed ^ index ^ GTME_SEED_DOMAIN,
                ..optimizer.clone()
            };
            let gtme = geometric::gtme(&cm, &gtme_config)?;
            let record = ExperimentRecord {
                sample_index: index,
                n_modes,
                total_energy,
                seed,
                delta2,
                ggm,
                delta_n,
                gtme: gtme.value,
                gtme_converged: gtme.converged,
            };
            record
                .check_ranges()
                .map_err(|detail| Error::Numeric(detail))?;
            Ok(record)
        })
        .collect()
}

/// What `scatter` reports after writing its CSV.
#[derive(Debug, Serialize)]
pub struct ScatterSummary {
    pub out: PathBuf,
    pub rows: usize,
    pub gtme_converged_rows: usize,
}

/// Run a sweep and write the CSV to `out`.
pub fn cmd_scatter(
    n_modes: usize,
    total_energy: f64,
    samples: u64,
    seed: u64,
    optimizer: &GtmeConfig,
    out: &Path,
) -> Result<ScatterSummary> {
    let rows = scatter_records(n_modes, total_energy, samples, seed, optimizer)?;
    fs::write(out, records::to_csv(&rows)).map_err(|err| CliError::io(out, err))?;
    Ok(ScatterSummary {
        out: out.to_path_buf(),
        rows: rows.len(),
        gtme_converged_rows: rows.iter().filter(|r| r.gtme_converged).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartition_enumeration_counts_and_canonical_blocks() {
        assert!(all_bipartitions(1).is_empty());
        for n in 2..=6 {
            let bps = all_bipartitions(n);
            assert_eq!(bps.len(), (1 << (n - 1)) - 1, "n = {n}");
            for bp in &bps {
                assert_eq!(bp.block_a()[0], 0, "mode 0 anchors block a");
            }
        }
    }

    #[test]
    fn partition_strings_must_cover_the_state() {
        let bp = parse_bipartition("0,2|1,3", 4).unwrap();
        assert_eq!(bp.block_a(), &[0, 2]);
        assert!(parse_bipartition("0|1", 4).is_err());
        assert!(parse_bipartition("0,1|2|3", 4).is_err());
        assert!(parse_partition("0,2|1|3", 4).is_ok());
        assert!(parse_partition("0,2|1|3", 5).is_err());
        assert!(parse_partition("0,junk|1", 2).is_err());
    }

    #[test]
    fn optimizer_flags_override_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("opt.json");
        std::fs::write(&path, r#"{"restarts": 4, "tol": 1e-6}"#).unwrap();
        let opts = OptimizerOptions {
            restarts: None,
            max_iters: Some(500),
            tol: None,
            seed: Some(9),
            config_file: Some(path),
        };
        let config = opts.resolve().unwrap();
        assert_eq!(config.restarts, 4);
        assert_eq!(config.max_iters, 500);
        assert_eq!(config.tol, 1e-6);
        assert_eq!(config.seed, 9);

        let defaults = OptimizerOptions::default().resolve().unwrap();
        assert_eq!(defaults, GtmeConfig::default());
    }

    #[test]
    fn malformed_optimizer_config_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("opt.json");
        std::fs::write(&path, "{not json").unwrap();
        let err = OptimizerOptions {
            config_file: Some(path),
            ..OptimizerOptions::default()
        }
        .resolve()
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn scatter_rejects_out_of_range_requests() {
        let config = GtmeConfig::default();
        assert_eq!(
            scatter_records(7, 30.0, 1, 0, &config)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            scatter_records(1, 30.0, 1, 0, &config)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            scatter_records(3, 20.0, 0, 0, &config)
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
