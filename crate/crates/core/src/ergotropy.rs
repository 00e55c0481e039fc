//! Gaussian ergotropy and its locality-restricted gaps.
//!
//! The global ergotropy of a state with covariance matrix `S` is
//! `(tr S - 2 sum_k mu_k)/4`, where `mu_k` are the symplectic
//! eigenvalues: the work extractable by arbitrary Gaussian unitaries.
//! Restricting the unitaries to act block-locally on a k-partition
//! leaves a gap
//!
//! ```text
//! delta(A_1|...|A_k) = (sum_j sum_i nu_i^{A_j} - sum_k mu_k) / 2,
//! ```
//!
//! with `nu^{A_j}` the spectrum of the reduced block. For pure states
//! this equals `(1/2) sum_j sum_i (nu_i^{A_j} - 1)`, and for a
//! bipartition it collapses to `sum_i (nu_i - 1)` over the smaller
//! block. The k-ergotropic score is the exhaustive minimum of the gap
//! over all `S(N,k)` partitions; the argmin is the first partition in
//! canonical enumeration order attaining the minimum within
//! [`ARGMIN_TIE_TOL`].

use rayon::prelude::*;

use crate::partitions::{enumerate_k_partitions, stirling2, ModePartition};
use crate::symplectic::{Bipartition, CovarianceMatrix, SymplecticSpectrum};
use crate::{Error, Result};

/// Hard cap on the number of partitions a score computation may visit.
pub const DEFAULT_PARTITION_BUDGET: u128 = 1_000_000;

/// Two gap values within this distance are treated as tied when picking
/// the deterministic argmin.
pub const ARGMIN_TIE_TOL: f64 = 1e-12;

/// Partitions are streamed to the parallel gap evaluator in chunks of
/// this size.
const SCAN_CHUNK: usize = 4096;

/// A k-local ergotropic gap together with the spectra it came from.
#[derive(Debug, Clone)]
pub struct GapResult {
    /// The gap value; `>= -1e-9` up to float noise, exactly the formula
    /// above otherwise.
    pub value: f64,
    /// The partition the gap was evaluated on, in canonical form.
    pub partition: ModePartition,
    /// Symplectic spectrum of each reduced block, aligned with
    /// `partition.blocks()`.
    pub per_block_spectra: Vec<SymplecticSpectrum>,
    /// Symplectic spectrum of the full state, so the value can be
    /// recomputed from this result alone.
    pub global_spectrum: SymplecticSpectrum,
}

/// Result of the exhaustive minimization behind the k-ergotropic score.
#[derive(Debug, Clone)]
pub struct ScoreResult {
    /// Minimum gap over all k-partitions.
    pub score: f64,
    /// First partition in canonical order attaining the minimum within
    /// [`ARGMIN_TIE_TOL`].
    pub argmin_partition: ModePartition,
    /// Number of partitions visited; equals `stirling2(N, k)`.
    pub n_partitions_searched: u128,
}

/// Work extractable by arbitrary Gaussian unitaries:
/// `(tr S - 2 sum_k mu_k)/4`.
pub fn global_ergotropy(cm: &CovarianceMatrix) -> Result<f64> {
    let mu = cm.symplectic_eigenvalues()?;
    Ok(0.25 * (cm.matrix().trace() - 2.0 * mu.sum()))
}

/// Ergotropic gap of a fixed k-partition, valid for any physical state.
pub fn k_local_gap(cm: &CovarianceMatrix, partition: &ModePartition) -> Result<GapResult> {
    if partition.n_modes() != cm.n_modes() {
        return Err(Error::InvalidArgument(format!(
            "partition is over {} modes, state has {}",
            partition.n_modes(),
            cm.n_modes()
        )));
    }
    let global_spectrum = cm.symplectic_eigenvalues()?;
    let mut per_block_spectra = Vec::with_capacity(partition.k());
    let mut block_sum = 0.0;
    for block in partition.blocks() {
        let spectrum = cm.reduced_spectrum(block)?;
        block_sum += spectrum.sum();
        per_block_spectra.push(spectrum);
    }
    Ok(GapResult {
        value: 0.5 * (block_sum - global_spectrum.sum()),
        partition: partition.clone(),
        per_block_spectra,
        global_spectrum,
    })
}

/// Bipartite ergotropic gap of a pure state: `sum_i (nu_i - 1)` over the
/// smaller block's spectrum.
pub fn two_local_gap(cm: &CovarianceMatrix, bp: &Bipartition) -> Result<GapResult> {
    if bp.n_modes() != cm.n_modes() {
        return Err(Error::InvalidArgument(format!(
            "bipartition is over {} modes, state has {}",
            bp.n_modes(),
            cm.n_modes()
        )));
    }
    cm.require_pure()?;
    let spectrum_a = cm.reduced_spectrum(bp.block_a())?;
    let spectrum_b = cm.reduced_spectrum(bp.block_b())?;
    let smaller = if bp.block_a().len() <= bp.block_b().len() {
        &spectrum_a
    } else {
        &spectrum_b
    };
    let value = smaller.iter().map(|&nu| nu - 1.0).sum();
    let partition = ModePartition::from_bipartition(bp);
    // Align spectra with the canonical block order (the block holding
    // mode 0 comes first).
    let per_block_spectra = if bp.block_a()[0] == 0 {
        vec![spectrum_a, spectrum_b]
    } else {
        vec![spectrum_b, spectrum_a]
    };
    Ok(GapResult {
        value,
        partition,
        per_block_spectra,
        global_spectrum: cm.symplectic_eigenvalues()?,
    })
}

/// K-ergotropic score with the default partition budget.
pub fn k_ergotropic_score(cm: &CovarianceMatrix, k: usize) -> Result<ScoreResult> {
    k_ergotropic_score_with_budget(cm, k, DEFAULT_PARTITION_BUDGET)
}

/// K-ergotropic score of a pure state: exhaustive minimum of the k-local
/// gap over every partition of the modes into k blocks.
///
/// Errors with [`Error::BudgetExceeded`] before enumerating anything if
/// `stirling2(N, k)` exceeds `budget`.
pub fn k_ergotropic_score_with_budget(
    cm: &CovarianceMatrix,
    k: usize,
    budget: u128,
) -> Result<ScoreResult> {
    cm.require_pure()?;
    let n = cm.n_modes();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "block count k = {k} out of range 1..={n}"
        )));
    }
    let count = stirling2(n as u32, k as u32)?;
    if count > budget {
        return Err(Error::BudgetExceeded {
            n_modes: n,
            k,
            count,
            budget,
        });
    }
    let global_sum = cm.symplectic_eigenvalues()?.sum();

    // Gap of one partition, sharing the precomputed global spectrum sum.
    let gap_of = |partition: &ModePartition| -> Result<f64> {
        let mut block_sum = 0.0;
        for block in partition.blocks() {
            block_sum += cm.reduced_spectrum(block)?.sum();
        }
        Ok(0.5 * (block_sum - global_sum))
    };

    // Candidates for "first partition within ARGMIN_TIE_TOL of the final
    // minimum". Kept as a Pareto front ordered by canonical index with
    // strictly decreasing values: a later partition only matters if it
    // beats every earlier survivor.
    struct Candidate {
        value: f64,
        partition: ModePartition,
    }
    let mut minimum = f64::INFINITY;
    let mut front: Vec<Candidate> = Vec::new();
    let mut searched: u128 = 0;

    let mut stream = enumerate_k_partitions(n, k)?;
    loop {
        let chunk: Vec<ModePartition> = stream.by_ref().take(SCAN_CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let values: Vec<f64> = chunk
            .par_iter()
            .map(&gap_of)
            .collect::<Result<Vec<f64>>>()?;
        for (partition, value) in chunk.into_iter().zip(values) {
            searched += 1;
            if value < minimum {
                minimum = value;
                front.retain(|c| c.value <= minimum + ARGMIN_TIE_TOL);
            }
            if value <= minimum + ARGMIN_TIE_TOL
                && !front.iter().any(|c| c.value <= value)
            {
                front.push(Candidate { value, partition });
            }
        }
    }
    debug_assert_eq!(searched, count);
    let argmin = front.into_iter().next().expect("at least one partition");
    Ok(ScoreResult {
        score: minimum,
        argmin_partition: argmin.partition,
        n_partitions_searched: searched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    const COSH_1: f64 = 1.5430806348152437;
    const COSH_2: f64 = 3.7621956910836314;

    fn tmsv(r: f64) -> CovarianceMatrix {
        CovarianceMatrix::tmsv(r).unwrap()
    }

    #[test]
    fn global_ergotropy_anchors() {
        let vac = CovarianceMatrix::vacuum(3).unwrap();
        assert_relative_eq!(global_ergotropy(&vac).unwrap(), 0.0, epsilon = 1e-12);
        // TMSV: (1/4)(4 cosh 2r - 2*2) = cosh 2r - 1.
        assert_relative_eq!(
            global_ergotropy(&tmsv(0.5)).unwrap(),
            COSH_1 - 1.0,
            epsilon = 1e-10
        );
        // A thermal mode is already passive.
        let thermal = CovarianceMatrix::new(DMatrix::identity(2, 2) * 1.9).unwrap();
        assert_relative_eq!(global_ergotropy(&thermal).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn tmsv_two_local_gap_closed_form() {
        for r in [0.1, 0.5, 1.0] {
            let cm = tmsv(r);
            let bp = Bipartition::new(2, &[0]).unwrap();
            let gap = two_local_gap(&cm, &bp).unwrap();
            assert_relative_eq!(gap.value, (2.0 * r).cosh() - 1.0, epsilon = 1e-10);
        }
        let gap = two_local_gap(&tmsv(1.0), &Bipartition::new(2, &[0]).unwrap()).unwrap();
        assert_relative_eq!(gap.value, COSH_2 - 1.0, epsilon = 1e-10);
    }

    #[test]
    fn two_local_gap_vanishes_on_products() {
        let cm = tmsv(0.8).tensor(&tmsv(0.3));
        let bp = Bipartition::new(4, &[0, 1]).unwrap();
        let gap = two_local_gap(&cm, &bp).unwrap();
        assert!(gap.value.abs() < 1e-8, "got {}", gap.value);
    }

    #[test]
    fn two_local_gap_is_additive_over_arms() {
        // Bipartition pairing one arm of each TMSV cuts both.
        let (r1, r2) = (0.6, 0.25);
        let cm = tmsv(r1).tensor(&tmsv(r2));
        let bp = Bipartition::new(4, &[0, 2]).unwrap();
        let gap = two_local_gap(&cm, &bp).unwrap();
        let expected = ((2.0 * r1).cosh() - 1.0) + ((2.0 * r2).cosh() - 1.0);
        assert_relative_eq!(gap.value, expected, epsilon = 1e-9);
    }

    #[test]
    fn two_local_gap_rejects_mixed_states() {
        let thermal = CovarianceMatrix::new(DMatrix::identity(4, 4) * 1.5).unwrap();
        let bp = Bipartition::new(2, &[0]).unwrap();
        assert!(matches!(
            two_local_gap(&thermal, &bp),
            Err(Error::MixedState { .. })
        ));
    }

    #[test]
    fn gap_value_reproducible_from_spectra() {
        let cm = tmsv(0.5).tensor(&tmsv(0.2));
        let partition: ModePartition = "0,2|1|3".parse().unwrap();
        let gap = k_local_gap(&cm, &partition).unwrap();
        let block_sum: f64 = gap.per_block_spectra.iter().map(|s| s.sum()).sum();
        let recomputed = 0.5 * (block_sum - gap.global_spectrum.sum());
        assert_relative_eq!(gap.value, recomputed, epsilon = 1e-12);
        assert!(gap.value >= -1e-9);
    }

    #[test]
    fn two_local_gap_agrees_with_k_local_gap() {
        let cm = tmsv(0.5).tensor(&tmsv(0.2));
        for block in [vec![0], vec![0, 2], vec![1, 3], vec![0, 1, 2]] {
            let bp = Bipartition::new(4, &block).unwrap();
            let two = two_local_gap(&cm, &bp).unwrap();
            let part = ModePartition::from_bipartition(&bp);
            let k = k_local_gap(&cm, &part).unwrap();
            assert_relative_eq!(two.value, k.value, epsilon = 1e-8);
        }
    }

    #[test]
    fn k_local_gap_works_for_mixed_states() {
        // Two thermal modes: gap of the full split is zero (no
        // correlations), and the formula stays finite and nonnegative.
        let thermal = CovarianceMatrix::new(DMatrix::identity(4, 4) * 2.0).unwrap();
        let gap = k_local_gap(&thermal, &ModePartition::singletons(2).unwrap()).unwrap();
        assert_relative_eq!(gap.value, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn k_local_gap_rejects_mode_count_mismatch() {
        let cm = tmsv(0.5);
        let partition = ModePartition::singletons(3).unwrap();
        assert!(matches!(
            k_local_gap(&cm, &partition),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn decomposition_into_bipartite_gaps() {
        // delta(A_1|...|A_k) = (1/2) sum_j delta_2(A_j | complement).
        let cm = tmsv(0.5).tensor(&tmsv(0.2));
        let partition: ModePartition = "0|1|2,3".parse().unwrap();
        let gap = k_local_gap(&cm, &partition).unwrap();
        let mut half_sum = 0.0;
        for block in partition.blocks() {
            let bp = Bipartition::new(4, block).unwrap();
            half_sum += two_local_gap(&cm, &bp).unwrap().value;
        }
        assert_relative_eq!(gap.value, 0.5 * half_sum, epsilon = 1e-8);
    }

    #[test]
    fn score_of_partially_product_state_is_zero_with_canonical_argmin() {
        // TMSV + vacuum mode: the cut isolating the vacuum has gap 0,
        // and the first such partition in canonical order wins.
        let cm = tmsv(0.5).tensor(&CovarianceMatrix::vacuum(1).unwrap());
        let result = k_ergotropic_score(&cm, 2).unwrap();
        assert!(result.score.abs() < 1e-9);
        assert_eq!(result.argmin_partition.to_string(), "0,1|2");
        assert_eq!(result.n_partitions_searched, 3);
    }

    #[test]
    fn score_ties_resolve_to_first_canonical_partition() {
        let vac = CovarianceMatrix::vacuum(4).unwrap();
        let result = k_ergotropic_score(&vac, 2).unwrap();
        assert_eq!(result.argmin_partition.to_string(), "0,1,2|3");
        assert_eq!(result.n_partitions_searched, 7);
        assert!(result.score.abs() < 1e-12);
    }

    #[test]
    fn tmsv_score_equals_closed_form() {
        let result = k_ergotropic_score(&tmsv(0.5), 2).unwrap();
        assert_relative_eq!(result.score, COSH_1 - 1.0, epsilon = 1e-10);
        assert_eq!(result.n_partitions_searched, 1);
        // Score agrees with the gap recomputed on the argmin partition.
        let gap = k_local_gap(&tmsv(0.5), &result.argmin_partition).unwrap();
        assert_relative_eq!(result.score, gap.value, epsilon = 1e-10);
    }

    #[test]
    fn fully_local_score_sums_single_mode_spectra() {
        let cm = tmsv(0.5).tensor(&tmsv(0.2));
        let result = k_ergotropic_score(&cm, 4).unwrap();
        let mut expected = 0.0;
        for m in 0..4 {
            expected += cm.reduced_spectrum(&[m]).unwrap().values()[0] - 1.0;
        }
        assert_relative_eq!(result.score, 0.5 * expected, epsilon = 1e-9);
    }

    #[test]
    fn score_budget_is_enforced() {
        let cm = tmsv(0.5).tensor(&CovarianceMatrix::vacuum(1).unwrap());
        let err = k_ergotropic_score_with_budget(&cm, 2, 2).unwrap_err();
        match err {
            Error::BudgetExceeded { count, budget, .. } => {
                assert_eq!(count, 3);
                assert_eq!(budget, 2);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn score_rejects_mixed_states_and_bad_k() {
        let thermal = CovarianceMatrix::new(DMatrix::identity(4, 4) * 1.5).unwrap();
        assert!(matches!(
            k_ergotropic_score(&thermal, 2),
            Err(Error::MixedState { .. })
        ));
        let cm = tmsv(0.5);
        assert!(k_ergotropic_score(&cm, 0).is_err());
        assert!(k_ergotropic_score(&cm, 3).is_err());
    }
}
