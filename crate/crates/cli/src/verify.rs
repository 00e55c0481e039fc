//! Verification suites: every library invariant, re-checked end to end
//! at realistic sample counts.
//!
//! Each suite returns per-property pass/fail counts instead of stopping
//! at the first violation, so a run reports the full damage. Checks that
//! have an independent route (closed forms, recurrences, Fock-basis
//! brute force, rank statistics) recompute that route here rather than
//! trusting the library's own value.

use std::collections::HashSet;

use ergoscope_core::geometric::{self, GtmeConfig, SqueezedProductParams};
use ergoscope_core::partitions::{enumerate_k_partitions, stirling2};
use ergoscope_core::random::{self, RandomStateConfig};
use ergoscope_core::symplectic::validate;
use ergoscope_core::{ergotropy, Bipartition, CovarianceMatrix, Error, ModePartition};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::all_bipartitions;

/// Pass/fail accounting for one named property.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &str) -> Self {
        PropertyOutcome {
            name: name.into(),
            checked: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn absorb(&mut self, tally: Tally) {
        self.checked += tally.checked;
        self.failed += tally.failed;
        if self.first_failure.is_none() {
            self.first_failure = tally.first_failure;
        }
    }
}

/// Check counts gathered inside one parallel work item.
#[derive(Debug, Clone, Default)]
struct Tally {
    checked: u64,
    failed: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failed += other.failed;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

/// Run `work` over every item in parallel, merging tallies in item
/// order so the reported first failure is deterministic.
fn par_tally<T: Sync>(items: &[T], work: impl Fn(usize, &T, &mut Tally) + Sync) -> Tally {
    let tallies: Vec<Tally> = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let mut tally = Tally::default();
            work(i, item, &mut tally);
            tally
        })
        .collect();
    let mut total = Tally::default();
    for tally in tallies {
        total.absorb(tally);
    }
    total
}

/// Aggregated result of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub passed: bool,
    pub checked: u64,
    pub failed: u64,
    pub properties: Vec<PropertyOutcome>,
}

impl SuiteOutcome {
    fn new(suite: &str, properties: Vec<PropertyOutcome>) -> Self {
        let checked = properties.iter().map(|p| p.checked).sum();
        let failed = properties.iter().map(|p| p.failed).sum();
        SuiteOutcome {
            suite: suite.into(),
            passed: failed == 0,
            checked,
            failed,
            properties,
        }
    }

    /// One status line, plus one line per failing property.
    pub fn human_lines(&self) -> Vec<String> {
        let status = if self.passed { "pass" } else { "FAIL" };
        let mut lines = vec![format!(
            "{}: {} ({} properties, {} checks, {} failed)",
            self.suite,
            status,
            self.properties.len(),
            self.checked,
            self.failed
        )];
        for p in &self.properties {
            if p.failed > 0 {
                lines.push(format!(
                    "  - {}: {}/{} checks failed; first: {}",
                    p.name,
                    p.failed,
                    p.checked,
                    p.first_failure.as_deref().unwrap_or("(no detail)")
                ));
            }
        }
        lines
    }
}

type SuiteFn = fn(u64) -> SuiteOutcome;

/// Every suite, in execution order.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("symplectic", suite_symplectic),
    ("partitions", suite_partitions),
    ("generator", suite_generator),
    ("nonnegativity", suite_nonnegativity),
    ("consistency", suite_consistency),
    ("decomposition", suite_decomposition),
    ("additivity", suite_additivity),
    ("faithfulness", suite_faithfulness),
    ("renyi-bound", suite_renyi_bound),
    ("mi-bound", suite_mi_bound),
    ("regimes", suite_regimes),
    ("bridge", suite_bridge),
    ("witness", suite_witness),
    ("ggm", suite_ggm),
    ("gtme", suite_gtme),
    ("fidelity-oracle", suite_fidelity_oracle),
];

/// Run one suite by name, or all of them.
pub fn run(selector: Option<&str>, seed: u64) -> crate::Result<Vec<SuiteOutcome>> {
    match selector {
        None => Ok(SUITES.iter().map(|(_, f)| f(seed)).collect()),
        Some(name) => {
            let run_fn = SUITES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, f)| *f)
                .ok_or_else(|| {
                    let names: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
                    Error::InvalidArgument(format!(
                        "unknown suite {name:?}; available: {}",
                        names.join(", ")
                    ))
                })?;
            Ok(vec![run_fn(seed)])
        }
    }
}

/// Machine-readable rollup of a verification run.
pub fn summary_json(outcomes: &[SuiteOutcome], seed: u64) -> serde_json::Value {
    serde_json::json!({
        "seed": seed,
        "passed": outcomes.iter().all(|o| o.passed),
        "suites_run": outcomes.len(),
        "checked": outcomes.iter().map(|o| o.checked).sum::<u64>(),
        "failed": outcomes.iter().map(|o| o.failed).sum::<u64>(),
        "suites": outcomes,
    })
}

// ---------------------------------------------------------------------
// shared construction helpers

fn sample_states(n_modes: usize, total_energy: f64, seed: u64, count: u64) -> Vec<CovarianceMatrix> {
    let config = RandomStateConfig {
        n_modes,
        total_energy,
        seed,
    };
    (0..count)
        .into_par_iter()
        .map(|i| random::random_pure_cm_sample(&config, i).expect("sampler config is valid"))
        .collect()
}

fn all_ones(values: &[f64], tol: f64) -> bool {
    values.iter().all(|&v| (v - 1.0).abs() <= tol)
}

/// Does some k-partition have every block's reduced spectrum at vacuum?
fn has_pure_k_partition(cm: &CovarianceMatrix, k: usize, tol: f64) -> bool {
    enumerate_k_partitions(cm.n_modes(), k)
        .expect("k within range")
        .any(|p| {
            p.blocks().iter().all(|block| {
                all_ones(
                    cm.reduced_spectrum(block).expect("block is valid").values(),
                    tol,
                )
            })
        })
}

/// Single-mode thermal state with symplectic eigenvalue `nu`, built as a
/// two-mode squeezed vacuum marginal so no raw matrix assembly is needed.
fn thermal_single_mode(nu: f64) -> CovarianceMatrix {
    let r = 0.5 * nu.acosh();
    CovarianceMatrix::tmsv(r)
        .expect("finite squeezing")
        .reduce(&[0])
        .expect("mode 0 exists")
}

/// Shift every mode index in `blocks` by `offset`.
fn shifted(blocks: &[Vec<usize>], offset: usize) -> Vec<Vec<usize>> {
    blocks
        .iter()
        .map(|b| b.iter().map(|&m| m + offset).collect())
        .collect()
}

fn every_partition(n: usize) -> Vec<ModePartition> {
    (1..=n)
        .flat_map(|k| enumerate_k_partitions(n, k).expect("k within range"))
        .collect()
}

// ---------------------------------------------------------------------
// Kolmogorov-Smirnov machinery for the statistical generator checks

/// Asymptotic Kolmogorov tail probability Q(lambda) = 2 sum (-1)^{k-1}
/// exp(-2 k^2 lambda^2).
fn kolmogorov_q(lambda: f64) -> f64 {
    // Below 0.2 the tail is 1 to within 1e-60 and the truncated series
    // would need k >> 100 terms to settle; short-circuit it.
    if lambda <= 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100u32 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * (-2.0 * (k as f64 * lambda).powi(2)).exp();
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_from_d(d: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_q((root + 0.12 + 0.11 / root) * d)
}

/// One-sample KS p-value against a reference CDF.
fn ks_p_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    ks_p_from_d(d, n)
}

/// Two-sample KS p-value.
fn ks_p_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite sample"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite sample"));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let effective = (n * m) as f64 / (n + m) as f64;
    ks_p_from_d(d, effective)
}

// ---------------------------------------------------------------------
// suites

fn suite_symplectic(seed: u64) -> SuiteOutcome {
    let mut floor = PropertyOutcome::new("pure-spectrum-floor");
    let mut rotation = PropertyOutcome::new("rotation-invariance");
    let mut purity_product = PropertyOutcome::new("purity-spectrum-product");
    let mut matching = PropertyOutcome::new("marginal-spectrum-matching");
    let mut linear = PropertyOutcome::new("entropy-linear-bound");
    let mut envelope = PropertyOutcome::new("vn-entropy-envelope");
    let mut mi = PropertyOutcome::new("pure-mutual-information");

    for n in 2..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0xA11CE ^ n as u64, 100);

        floor.absorb(par_tally(&states, |i, cm, t| {
            let report = validate(cm.matrix()).expect("square matrix");
            t.check(report.passed(), || format!("N={n} state {i}: {report}"));
            let spectrum = cm.symplectic_eigenvalues().expect("valid state");
            t.check(
                spectrum
                    .values()
                    .iter()
                    .all(|&v| v >= 1.0 - 1e-8 && (v - 1.0).abs() <= 1e-6),
                || format!("N={n} state {i}: pure spectrum {:?}", spectrum.values()),
            );
        }));

        if n >= 3 {
            rotation.absorb(par_tally(&states, |i, cm, t| {
                let marginal = cm.reduce(&[0, 1]).expect("modes exist");
                let before = marginal
                    .symplectic_eigenvalues()
                    .expect("valid marginal")
                    .values()
                    .to_vec();
                let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xB0B ^ i as u64);
                let o = random::haar_orthosymplectic(2, &mut rng).expect("haar draw");
                let rotated =
                    CovarianceMatrix::new(&o * marginal.matrix() * o.transpose())
                        .expect("congruence preserves validity");
                let after = rotated
                    .symplectic_eigenvalues()
                    .expect("valid rotation")
                    .values()
                    .to_vec();
                let ok = before
                    .iter()
                    .zip(&after)
                    .all(|(x, y)| (x - y).abs() <= 1e-8);
                t.check(ok, || {
                    format!("N={n} state {i}: spectrum {before:?} -> {after:?}")
                });
            }));

            purity_product.absorb(par_tally(&states, |i, cm, t| {
                let marginal = cm.reduce(&[0, 1]).expect("modes exist");
                let purity = marginal.purity().expect("valid marginal");
                let product: f64 = marginal
                    .symplectic_eigenvalues()
                    .expect("valid marginal")
                    .iter()
                    .product();
                t.check((purity * product - 1.0).abs() <= 1e-8, || {
                    format!("N={n} state {i}: purity {purity} * prod {product}")
                });
            }));
        }

        matching.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let small = cm
                    .reduced_spectrum(bp.smaller_block())
                    .expect("valid block");
                let large = if bp.smaller_block() == bp.block_a() {
                    cm.reduced_spectrum(bp.block_b())
                } else {
                    cm.reduced_spectrum(bp.block_a())
                }
                .expect("valid block");
                // Descending spectra with nu >= 1: the larger side is the
                // smaller side padded with trailing ones.
                let mut expect = small.values().to_vec();
                expect.resize(large.len(), 1.0);
                let ok = large
                    .values()
                    .iter()
                    .zip(&expect)
                    .all(|(x, y)| (x - y).abs() <= 1e-6);
                t.check(ok, || {
                    format!(
                        "N={n} state {i} bp {}: {:?} vs padded {:?}",
                        ModePartition::from_bipartition(&bp),
                        large.values(),
                        expect
                    )
                });
            }
        }));

        linear.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let marginal = cm.reduce(bp.smaller_block()).expect("valid block");
                let s2 = marginal.renyi2_entropy().expect("valid marginal");
                let linear_sum: f64 = marginal
                    .symplectic_eigenvalues()
                    .expect("valid marginal")
                    .iter()
                    .map(|nu| nu - 1.0)
                    .sum();
                t.check(s2 <= linear_sum + 1e-12, || {
                    format!("N={n} state {i}: S2 {s2} > linear {linear_sum}")
                });
            }
        }));

        if n == 3 {
            mi.absorb(par_tally(&states, |i, cm, t| {
                for bp in all_bipartitions(n) {
                    let mi_val = cm.mutual_information(&bp).expect("valid state");
                    let marginal_vn = cm
                        .reduce(bp.block_a())
                        .expect("valid block")
                        .von_neumann_entropy()
                        .expect("valid marginal");
                    t.check((mi_val - 2.0 * marginal_vn).abs() <= 1e-8, || {
                        format!("N={n} state {i}: MI {mi_val} vs 2*S {marginal_vn}")
                    });
                }
            }));
        }
    }

    for &nu in &[1.5, 2.0, 5.0, 10.0] {
        let f = thermal_single_mode(nu)
            .von_neumann_entropy()
            .expect("valid thermal state");
        envelope.check(f < nu.ln() + 1.0, || {
            format!("f({nu}) = {f} not below ln nu + 1")
        });
    }
    let f3 = thermal_single_mode(3.0)
        .von_neumann_entropy()
        .expect("valid thermal state");
    envelope.check((f3 - 2.0 * std::f64::consts::LN_2).abs() <= 1e-12, || {
        format!("f(3) = {f3}, expected 2 ln 2")
    });

    SuiteOutcome::new(
        "symplectic",
        vec![floor, rotation, purity_product, matching, linear, envelope, mi],
    )
}

fn suite_partitions(_seed: u64) -> SuiteOutcome {
    let mut counts = PropertyOutcome::new("count-matches-stirling");
    for n in 1..=10usize {
        for k in 1..=n {
            let enumerated = enumerate_k_partitions(n, k).expect("k within range").count() as u128;
            let expected = stirling2(n as u32, k as u32).expect("small n");
            counts.check(enumerated == expected, || {
                format!("({n},{k}): enumerated {enumerated}, stirling {expected}")
            });
        }
    }

    // Independent recurrence route: S(n,k) = k S(n-1,k) + S(n-1,k-1).
    let s2 = |n: u32, k: u32| -> u128 {
        if k > n {
            0
        } else {
            stirling2(n, k).expect("within range")
        }
    };
    let mut recurrence = PropertyOutcome::new("recurrence");
    for n in 2..=20u32 {
        for k in 1..=n {
            let lhs = s2(n, k);
            let rhs = k as u128 * s2(n - 1, k) + s2(n - 1, k - 1);
            recurrence.check(lhs == rhs, || format!("S({n},{k}) = {lhs}, recurrence {rhs}"));
        }
    }

    let mut anchors = PropertyOutcome::new("closed-form-anchors");
    for n in 1..=20u32 {
        anchors.check(s2(n, 1) == 1, || format!("S({n},1) != 1"));
        anchors.check(s2(n, n) == 1, || format!("S({n},{n}) != 1"));
        if n >= 2 {
            let expected = (1u128 << (n - 1)) - 1;
            anchors.check(s2(n, 2) == expected, || {
                format!("S({n},2) = {}, expected {expected}", s2(n, 2))
            });
        }
    }

    let mut structure = PropertyOutcome::new("block-structure");
    let mut unique = PropertyOutcome::new("canonical-and-unique");
    for n in [5usize, 8] {
        let mut seen = HashSet::new();
        for partition in every_partition(n) {
            let blocks = partition.blocks();
            let mut covered = vec![false; n];
            let mut ok = !blocks.is_empty();
            let mut prev_lead: Option<usize> = None;
            for block in blocks {
                ok &= !block.is_empty();
                ok &= block.windows(2).all(|w| w[0] < w[1]);
                if let (Some(prev), Some(&lead)) = (prev_lead, block.first()) {
                    ok &= lead > prev;
                }
                prev_lead = block.first().copied();
                for &m in block {
                    ok &= m < n && !covered[m];
                    if m < n {
                        covered[m] = true;
                    }
                }
            }
            ok &= covered.iter().all(|&c| c);
            structure.check(ok, || format!("n={n}: bad partition {partition}"));
            unique.check(seen.insert(partition.to_string()), || {
                format!("n={n}: duplicate {partition}")
            });
        }
        let total: u128 = (1..=n)
            .map(|k| stirling2(n as u32, k as u32).expect("small"))
            .sum();
        unique.check(seen.len() as u128 == total, || {
            format!("n={n}: {} distinct vs Bell {total}", seen.len())
        });
    }

    SuiteOutcome::new(
        "partitions",
        vec![counts, recurrence, anchors, structure, unique],
    )
}

fn suite_generator(seed: u64) -> SuiteOutcome {
    let mut soundness = PropertyOutcome::new("validity-purity-energy");
    for n in 2..=4usize {
        let states = sample_states(n, 20.0, seed ^ 0x6E4 ^ n as u64, 334);
        soundness.absorb(par_tally(&states, |i, cm, t| {
            let report = validate(cm.matrix()).expect("square matrix");
            t.check(report.passed(), || format!("N={n} state {i}: {report}"));
            t.check((cm.determinant() - 1.0).abs() < 1e-6, || {
                format!("N={n} state {i}: det {}", cm.determinant())
            });
            t.check((cm.matrix().trace() - 20.0).abs() < 1e-8, || {
                format!("N={n} state {i}: trace {}", cm.matrix().trace())
            });
        }));
    }

    let mut determinism = PropertyOutcome::new("determinism");
    let config = RandomStateConfig {
        n_modes: 3,
        total_energy: 20.0,
        seed: seed ^ 0xDE7,
    };
    for index in 0..10u64 {
        let a = random::random_pure_cm_sample(&config, index).expect("valid config");
        let b = random::random_pure_cm_sample(&config, index).expect("valid config");
        determinism.check(a.matrix() == b.matrix(), || {
            format!("sample {index} not reproducible")
        });
        let c = random::random_pure_cm_sample(&config, index + 1).expect("valid config");
        determinism.check(a.matrix() != c.matrix(), || {
            format!("samples {index} and {} coincide", index + 1)
        });
    }

    let mut vacuum_edge = PropertyOutcome::new("vacuum-edge");
    for n in [1usize, 2, 5] {
        let config = RandomStateConfig {
            n_modes: n,
            total_energy: 2.0 * n as f64,
            seed: seed ^ 0xED6E,
        };
        let cm = random::random_pure_cm_sample(&config, 3).expect("valid config");
        let vacuum = CovarianceMatrix::vacuum(n).expect("n >= 1");
        vacuum_edge.check(cm.matrix() == vacuum.matrix(), || {
            format!("N={n}: minimum energy state is not exactly vacuum")
        });
    }

    // Energy shares must be uniform on the simplex: each share is then
    // Beta(1, n-1) with CDF 1 - (1-w)^(n-1).
    let mut shares_prop = PropertyOutcome::new("energy-share-marginals");
    {
        let n = 4usize;
        let total = 20.0;
        let surplus = total - 2.0 * n as f64;
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xD1);
        let mut per_mode: Vec<Vec<f64>> = vec![Vec::new(); n];
        for _ in 0..10_000 {
            let energies =
                random::random_energy_split(total, n, &mut rng).expect("valid arguments");
            for (j, e) in energies.iter().enumerate() {
                per_mode[j].push((e - 2.0) / surplus);
            }
        }
        let beta_cdf = |w: f64| 1.0 - (1.0 - w).powi(n as i32 - 1);
        for (j, samples) in per_mode.into_iter().enumerate() {
            let p = ks_p_one_sample(samples, beta_cdf);
            shares_prop.check(p > 0.01, || format!("mode {j}: KS p = {p}"));
        }
    }

    // Conjugating by a fixed passive rotation must not change the
    // distribution of marginal spectra (Haar invariance).
    let mut invariance = PropertyOutcome::new("haar-invariance");
    {
        let statistic = |cm: &CovarianceMatrix| -> f64 {
            cm.reduced_spectrum(&[0]).expect("mode 0").values()[0]
        };
        let plain: Vec<f64> = sample_states(2, 9.0, seed ^ 1000, 4000)
            .iter()
            .map(statistic)
            .collect();
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 123);
        let extra = random::haar_orthosymplectic(2, &mut rng).expect("haar draw");
        let rotated: Vec<f64> = sample_states(2, 9.0, seed ^ 2000, 4000)
            .iter()
            .map(|cm| {
                let conjugated = CovarianceMatrix::new(&extra * cm.matrix() * extra.transpose())
                    .expect("congruence preserves validity");
                statistic(&conjugated)
            })
            .collect();
        let p = ks_p_two_sample(plain, rotated);
        invariance.check(p > 0.01, || format!("two-sample KS p = {p}"));
    }

    SuiteOutcome::new(
        "generator",
        vec![soundness, determinism, vacuum_edge, shares_prop, invariance],
    )
}

fn suite_nonnegativity(seed: u64) -> SuiteOutcome {
    let mut gaps = PropertyOutcome::new("gap-nonnegative");
    let mut scores = PropertyOutcome::new("score-nonnegative");
    let mut argmin = PropertyOutcome::new("score-matches-argmin-gap");
    let mut searched = PropertyOutcome::new("searched-count-is-stirling");

    for n in 2..=5usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0x40F ^ n as u64, 250);
        let partitions = every_partition(n);

        gaps.absorb(par_tally(&states, |i, cm, t| {
            for partition in &partitions {
                let gap = ergotropy::k_local_gap(cm, partition).expect("valid partition");
                t.check(gap.value >= -1e-9, || {
                    format!("N={n} state {i} partition {partition}: gap {}", gap.value)
                });
            }
        }));

        scores.absorb(par_tally(&states, |i, cm, t| {
            for k in 2..=n {
                let result = ergotropy::k_ergotropic_score(cm, k).expect("within budget");
                t.check(result.score >= -1e-9, || {
                    format!("N={n} state {i} k={k}: score {}", result.score)
                });
            }
        }));

        argmin.absorb(par_tally(&states, |i, cm, t| {
            for k in 2..=n {
                let result = ergotropy::k_ergotropic_score(cm, k).expect("within budget");
                let recomputed = ergotropy::k_local_gap(cm, &result.argmin_partition)
                    .expect("argmin partition is valid");
                t.check((recomputed.value - result.score).abs() <= 1e-10, || {
                    format!(
                        "N={n} state {i} k={k}: score {} vs argmin gap {}",
                        result.score, recomputed.value
                    )
                });
            }
        }));

        searched.absorb(par_tally(&states, |i, cm, t| {
            for k in 2..=n {
                let result = ergotropy::k_ergotropic_score(cm, k).expect("within budget");
                let expected = stirling2(n as u32, k as u32).expect("small n");
                t.check(result.n_partitions_searched == expected, || {
                    format!(
                        "N={n} state {i} k={k}: searched {} of {expected}",
                        result.n_partitions_searched
                    )
                });
            }
        }));
    }

    SuiteOutcome::new("nonnegativity", vec![gaps, scores, argmin, searched])
}

fn suite_consistency(seed: u64) -> SuiteOutcome {
    let mut spectral = PropertyOutcome::new("gap-recomputes-from-spectra");
    let mut pure_form = PropertyOutcome::new("pure-shortcut-agrees");
    let mut two_vs_k = PropertyOutcome::new("bipartite-gap-agrees-with-k-local");
    let mut mixed_gap = PropertyOutcome::new("mixed-state-gap-defined");

    for n in 2..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0xC0 ^ n as u64, 50);
        let partitions = every_partition(n);

        spectral.absorb(par_tally(&states, |i, cm, t| {
            for partition in &partitions {
                let gap = ergotropy::k_local_gap(cm, partition).expect("valid partition");
                let block_sum: f64 = gap.per_block_spectra.iter().map(|s| s.sum()).sum();
                let general = 0.5 * (block_sum - gap.global_spectrum.sum());
                t.check((gap.value - general).abs() <= 1e-12, || {
                    format!(
                        "N={n} state {i} {partition}: value {} vs recomputed {general}",
                        gap.value
                    )
                });
            }
        }));

        pure_form.absorb(par_tally(&states, |i, cm, t| {
            for partition in &partitions {
                let gap = ergotropy::k_local_gap(cm, partition).expect("valid partition");
                let block_sum: f64 = gap.per_block_spectra.iter().map(|s| s.sum()).sum();
                let pure = 0.5 * (block_sum - n as f64);
                t.check((gap.value - pure).abs() <= 1e-8, || {
                    format!(
                        "N={n} state {i} {partition}: value {} vs pure form {pure}",
                        gap.value
                    )
                });
            }
        }));

        two_vs_k.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let direct = ergotropy::two_local_gap(cm, &bp).expect("pure state");
                let via_k =
                    ergotropy::k_local_gap(cm, &ModePartition::from_bipartition(&bp))
                        .expect("valid partition");
                t.check((direct.value - via_k.value).abs() <= 1e-8, || {
                    format!(
                        "N={n} state {i} bp {}: {} vs {}",
                        ModePartition::from_bipartition(&bp),
                        direct.value,
                        via_k.value
                    )
                });
            }
        }));

        if n >= 3 {
            mixed_gap.absorb(par_tally(&states, |i, cm, t| {
                let marginal = cm.reduce(&[0, 1]).expect("modes exist");
                let singles = ModePartition::singletons(2).expect("two modes");
                let gap = ergotropy::k_local_gap(&marginal, &singles)
                    .expect("mixed states take the general formula");
                t.check(gap.value.is_finite() && gap.value >= -1e-9, || {
                    format!("N={n} state {i}: mixed marginal gap {}", gap.value)
                });
            }));
        }
    }

    SuiteOutcome::new(
        "consistency",
        vec![spectral, pure_form, two_vs_k, mixed_gap],
    )
}

fn suite_decomposition(seed: u64) -> SuiteOutcome {
    let mut halves = PropertyOutcome::new("gap-is-half-sum-of-bipartite-gaps");
    for n in 3..=5usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0xDEC ^ n as u64, 40);
        let partitions: Vec<ModePartition> = (2..=n)
            .flat_map(|k| enumerate_k_partitions(n, k).expect("k within range"))
            .collect();
        halves.absorb(par_tally(&states, |i, cm, t| {
            for partition in &partitions {
                let gap = ergotropy::k_local_gap(cm, partition).expect("valid partition");
                let mut sum = 0.0;
                for block in partition.blocks() {
                    let bp = Bipartition::new(n, block).expect("proper subset");
                    sum += ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
                }
                t.check((gap.value - 0.5 * sum).abs() <= 1e-8, || {
                    format!(
                        "N={n} state {i} {partition}: gap {} vs half-sum {}",
                        gap.value,
                        0.5 * sum
                    )
                });
            }
        }));
    }
    SuiteOutcome::new("decomposition", vec![halves])
}

fn suite_additivity(seed: u64) -> SuiteOutcome {
    let mut aligned = PropertyOutcome::new("aligned-partition-gap-additivity");
    let mut arms = PropertyOutcome::new("tmsv-arm-grouping");
    let mut bound = PropertyOutcome::new("score-below-aligned-combinations");

    let shapes: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];
    for (idx, &(na, nb)) in shapes.iter().enumerate() {
        let left = sample_states(na, 5.0 * na as f64, seed ^ 0xADD ^ idx as u64, 20);
        let right = sample_states(nb, 5.0 * nb as f64, seed ^ 0xADD ^ 0x100 ^ idx as u64, 20);
        let pairs: Vec<(CovarianceMatrix, CovarianceMatrix)> =
            left.into_iter().zip(right).collect();

        aligned.absorb(par_tally(&pairs, |i, (a, b), t| {
            let joint = a.tensor(b);
            for pa in every_partition(na) {
                let gap_a = ergotropy::k_local_gap(a, &pa).expect("valid partition");
                for pb in every_partition(nb) {
                    let gap_b = ergotropy::k_local_gap(b, &pb).expect("valid partition");
                    let mut blocks = pa.blocks().to_vec();
                    blocks.extend(shifted(pb.blocks(), na));
                    let combined =
                        ModePartition::new(na + nb, blocks).expect("disjoint cover");
                    let gap = ergotropy::k_local_gap(&joint, &combined)
                        .expect("valid partition");
                    t.check(
                        (gap.value - gap_a.value - gap_b.value).abs() <= 1e-8,
                        || {
                            format!(
                                "pair {i} ({na}+{nb}) {combined}: joint {} vs {} + {}",
                                gap.value, gap_a.value, gap_b.value
                            )
                        },
                    );
                }
            }
        }));

        bound.absorb(par_tally(&pairs, |i, (a, b), t| {
            let joint = a.tensor(b);
            for k in 2..=(na + nb).min(4) {
                let joint_score = ergotropy::k_ergotropic_score(&joint, k)
                    .expect("within budget")
                    .score;
                let mut best = f64::INFINITY;
                for ka in 1..=na.min(k.saturating_sub(1)) {
                    let kb = k - ka;
                    if kb < 1 || kb > nb {
                        continue;
                    }
                    let sa = ergotropy::k_ergotropic_score(a, ka).expect("within budget");
                    let sb = ergotropy::k_ergotropic_score(b, kb).expect("within budget");
                    best = best.min(sa.score + sb.score);
                }
                t.check(joint_score <= best + 1e-9, || {
                    format!(
                        "pair {i} ({na}+{nb}) k={k}: joint {joint_score} above aligned best {best}"
                    )
                });
            }
        }));
    }

    for &r1 in &[0.2, 0.7, 1.1] {
        for &r2 in &[0.2, 0.7, 1.1] {
            let joint = CovarianceMatrix::tmsv(r1)
                .expect("finite r")
                .tensor(&CovarianceMatrix::tmsv(r2).expect("finite r"));
            let bp = Bipartition::new(4, &[0, 2]).expect("proper subset");
            let gap = ergotropy::two_local_gap(&joint, &bp).expect("pure state");
            let expected = ((2.0 * r1).cosh() - 1.0) + ((2.0 * r2).cosh() - 1.0);
            arms.check((gap.value - expected).abs() <= 1e-10, || {
                format!("r=({r1},{r2}): gap {} vs {expected}", gap.value)
            });
        }
    }

    SuiteOutcome::new("additivity", vec![aligned, arms, bound])
}

fn suite_faithfulness(seed: u64) -> SuiteOutcome {
    let mut iff = PropertyOutcome::new("zero-score-iff-pure-partition");
    let mut anchors = PropertyOutcome::new("anchor-states");

    for n in 3..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0xFA17 ^ n as u64, 50);
        iff.absorb(par_tally(&states, |i, cm, t| {
            for k in 2..=3usize {
                let score = ergotropy::k_ergotropic_score(cm, k)
                    .expect("within budget")
                    .score;
                let structural = has_pure_k_partition(cm, k, 1e-6);
                t.check((score < 1e-6) == structural, || {
                    format!("N={n} state {i} k={k}: score {score}, pure partition {structural}")
                });
            }
        }));
    }

    // Product states must land on the zero side of the equivalence.
    let left = sample_states(2, 9.0, seed ^ 0xFA17 ^ 0x200, 20);
    let right = sample_states(2, 9.0, seed ^ 0xFA17 ^ 0x300, 20);
    let pairs: Vec<(CovarianceMatrix, CovarianceMatrix)> =
        left.into_iter().zip(right).collect();
    iff.absorb(par_tally(&pairs, |i, (a, b), t| {
        let joint = a.tensor(b);
        for k in 2..=3usize {
            let score = ergotropy::k_ergotropic_score(&joint, k)
                .expect("within budget")
                .score;
            let structural = has_pure_k_partition(&joint, k, 1e-6);
            t.check((score < 1e-6) == structural, || {
                format!("product pair {i} k={k}: score {score}, pure partition {structural}")
            });
            if k == 2 {
                t.check(score < 1e-6 && structural, || {
                    format!("product pair {i}: copy cut not recognized, score {score}")
                });
            }
        }
    }));

    let vacuum = CovarianceMatrix::vacuum(3).expect("n >= 1");
    for k in 2..=3usize {
        let score = ergotropy::k_ergotropic_score(&vacuum, k)
            .expect("within budget")
            .score;
        anchors.check(score < 1e-6 && has_pure_k_partition(&vacuum, k, 1e-6), || {
            format!("vacuum k={k}: score {score}")
        });
    }
    let tmsv = CovarianceMatrix::tmsv(0.5).expect("finite r");
    let score = ergotropy::k_ergotropic_score(&tmsv, 2)
        .expect("within budget")
        .score;
    anchors.check(score > 1e-6 && !has_pure_k_partition(&tmsv, 2, 1e-6), || {
        format!("tmsv: score {score} should be positive with no pure cut")
    });

    SuiteOutcome::new("faithfulness", vec![iff, anchors])
}

fn suite_renyi_bound(seed: u64) -> SuiteOutcome {
    let mut bound = PropertyOutcome::new("entropy-below-gap");
    let mut no_equality = PropertyOutcome::new("no-equality-off-products");
    let mut products = PropertyOutcome::new("equality-on-product-cuts");

    for n in 2..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0x2EB ^ n as u64, 334);
        bound.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let gap = ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
                let s2 = cm
                    .reduce(bp.smaller_block())
                    .expect("valid block")
                    .renyi2_entropy()
                    .expect("valid marginal");
                t.check(s2 <= gap + 1e-9, || {
                    format!(
                        "N={n} state {i} bp {}: S2 {s2} above gap {gap}",
                        ModePartition::from_bipartition(&bp)
                    )
                });
            }
        }));

        no_equality.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let gap = ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
                let s2 = cm
                    .reduce(bp.smaller_block())
                    .expect("valid block")
                    .renyi2_entropy()
                    .expect("valid marginal");
                t.check(!(s2 < 1e-6 && gap < 1e-6), || {
                    format!(
                        "N={n} state {i} bp {}: unexpected equality S2 {s2}, gap {gap}",
                        ModePartition::from_bipartition(&bp)
                    )
                });
            }
        }));
    }

    let left = sample_states(2, 9.0, seed ^ 0x2EB ^ 0x400, 10);
    let right = sample_states(2, 9.0, seed ^ 0x2EB ^ 0x500, 10);
    for (i, (a, b)) in left.iter().zip(&right).enumerate() {
        let joint = a.tensor(b);
        let copy_cut = Bipartition::new(4, &[0, 1]).expect("proper subset");
        let gap = ergotropy::two_local_gap(&joint, &copy_cut)
            .expect("pure state")
            .value;
        let s2 = joint
            .reduce(&[0, 1])
            .expect("valid block")
            .renyi2_entropy()
            .expect("valid marginal");
        products.check(s2 < 1e-6 && gap < 1e-6, || {
            format!("product pair {i}: S2 {s2}, gap {gap} on the factor cut")
        });
        let crossing = Bipartition::new(4, &[0, 2]).expect("proper subset");
        let cross_gap = ergotropy::two_local_gap(&joint, &crossing)
            .expect("pure state")
            .value;
        let cross_s2 = joint
            .reduce(&[0, 2])
            .expect("valid block")
            .renyi2_entropy()
            .expect("valid marginal");
        products.check(
            cross_s2 <= cross_gap + 1e-9 && cross_s2 > 1e-6 && cross_gap > 1e-6,
            || format!("product pair {i}: crossing cut S2 {cross_s2}, gap {cross_gap}"),
        );
    }

    SuiteOutcome::new("renyi-bound", vec![bound, no_equality, products])
}

fn suite_mi_bound(seed: u64) -> SuiteOutcome {
    let mut strict = PropertyOutcome::new("half-mi-below-gap-plus-modes");
    for n in 2..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0x311 ^ n as u64, 100);
        strict.absorb(par_tally(&states, |i, cm, t| {
            for bp in all_bipartitions(n) {
                let gap = ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
                let mi = cm.mutual_information(&bp).expect("valid state");
                let smaller = bp.smaller_block().len() as f64;
                t.check(0.5 * mi < gap + smaller, || {
                    format!(
                        "N={n} state {i} bp {}: MI/2 {} vs gap {gap} + {smaller}",
                        ModePartition::from_bipartition(&bp),
                        0.5 * mi
                    )
                });
            }
        }));
    }

    let mut product_edge = PropertyOutcome::new("product-cut-strictness");
    let left = sample_states(2, 9.0, seed ^ 0x311 ^ 0x600, 10);
    let right = sample_states(2, 9.0, seed ^ 0x311 ^ 0x700, 10);
    for (i, (a, b)) in left.iter().zip(&right).enumerate() {
        let joint = a.tensor(b);
        let copy_cut = Bipartition::new(4, &[0, 1]).expect("proper subset");
        let mi = joint.mutual_information(&copy_cut).expect("valid state");
        let gap = ergotropy::two_local_gap(&joint, &copy_cut)
            .expect("pure state")
            .value;
        product_edge.check(0.5 * mi < gap + 2.0 && mi.abs() <= 1e-8, || {
            format!("product pair {i}: factor-cut MI {mi}, gap {gap}")
        });
    }

    SuiteOutcome::new("mi-bound", vec![strict, product_edge])
}

fn suite_regimes(seed: u64) -> SuiteOutcome {
    // (a) Two modes: the entropy is exactly ln(1 + gap).
    let mut two_mode = PropertyOutcome::new("two-mode-log-identity");
    for (e_idx, &energy) in [4.5, 6.0, 12.0].iter().enumerate() {
        let states = sample_states(2, energy, seed ^ 0x3E6 ^ e_idx as u64, 70);
        two_mode.absorb(par_tally(&states, |i, cm, t| {
            let bp = Bipartition::new(2, &[0]).expect("proper subset");
            let gap = ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
            let s2 = cm
                .reduce(&[0])
                .expect("mode 0")
                .renyi2_entropy()
                .expect("valid marginal");
            t.check((s2 - (1.0 + gap).ln()).abs() <= 1e-9, || {
                format!("E={energy} state {i}: S2 {s2} vs ln(1+{gap})")
            });
        }));
    }

    // (b) Weak entanglement: entropy and gap agree to second order in
    // the spectrum offsets.
    let mut weak = PropertyOutcome::new("weak-entanglement-quadratic-window");
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x3E6 ^ 0x800);
    for i in 0..100 {
        let eps1 = 10f64.powf(rng.random_range(-6.0..-3.0));
        let eps2 = 10f64.powf(rng.random_range(-6.0..-3.0));
        let r1 = 0.5 * (1.0 + eps1).acosh();
        let r2 = 0.5 * (1.0 + eps2).acosh();
        let joint = CovarianceMatrix::tmsv(r1)
            .expect("finite r")
            .tensor(&CovarianceMatrix::tmsv(r2).expect("finite r"));
        let bp = Bipartition::new(4, &[0, 2]).expect("proper subset");
        let gap = ergotropy::two_local_gap(&joint, &bp).expect("pure state").value;
        let s2 = joint
            .reduce(&[0, 2])
            .expect("valid block")
            .renyi2_entropy()
            .expect("valid marginal");
        let window = 1.01 * (eps1 * eps1 + eps2 * eps2) + 1e-14;
        weak.check((s2 - gap).abs() <= window, || {
            format!("case {i} eps=({eps1:.2e},{eps2:.2e}): |S2 - gap| = {}", (s2 - gap).abs())
        });
    }

    SuiteOutcome::new("regimes", vec![two_mode, weak])
}

fn suite_bridge(seed: u64) -> SuiteOutcome {
    let mut identity = PropertyOutcome::new("score-equals-ggm-bridge");
    let mut inverse = PropertyOutcome::new("inverse-bridge");
    let mut marginals = PropertyOutcome::new("ggm-from-single-mode-marginals");
    let mut min_form = PropertyOutcome::new("score-is-min-marginal-offset");

    let states = sample_states(3, 20.0, seed ^ 0x9121, 200);
    let tally = par_tally(&states, |i, cm, t| {
        let score = ergotropy::k_ergotropic_score(cm, 2)
            .expect("within budget")
            .score;
        let g = geometric::ggm(cm).expect("pure state");
        let bridged = geometric::score_from_ggm(g).expect("g in [0,1)");
        t.check((score - bridged).abs() < 1e-8, || {
            format!("state {i}: score {score} vs 2g/(1-g) {bridged}")
        });
    });
    identity.absorb(tally);

    inverse.absorb(par_tally(&states, |i, cm, t| {
        let score = ergotropy::k_ergotropic_score(cm, 2)
            .expect("within budget")
            .score;
        let g = geometric::ggm(cm).expect("pure state");
        let back = geometric::ggm_from_score(score).expect("score >= 0");
        t.check((back - g).abs() < 1e-8, || {
            format!("state {i}: d/(d+2) {back} vs ggm {g}")
        });
    }));

    marginals.absorb(par_tally(&states, |i, cm, t| {
        let g = geometric::ggm(cm).expect("pure state");
        let mut best = f64::NEG_INFINITY;
        for mode in 0..3usize {
            let nu = cm.reduced_spectrum(&[mode]).expect("mode exists").values()[0];
            best = best.max(2.0 / (1.0 + nu));
        }
        t.check((g - (1.0 - best)).abs() <= 1e-12, || {
            format!("state {i}: ggm {g} vs single-mode recompute {}", 1.0 - best)
        });
    }));

    min_form.absorb(par_tally(&states, |i, cm, t| {
        let score = ergotropy::k_ergotropic_score(cm, 2)
            .expect("within budget")
            .score;
        let mut smallest = f64::INFINITY;
        for mode in 0..3usize {
            let nu = cm.reduced_spectrum(&[mode]).expect("mode exists").values()[0];
            smallest = smallest.min(nu - 1.0);
        }
        t.check((score - smallest).abs() <= 1e-10, || {
            format!("state {i}: score {score} vs min marginal offset {smallest}")
        });
    }));

    SuiteOutcome::new("bridge", vec![identity, inverse, marginals, min_form])
}

fn suite_witness(_seed: u64) -> SuiteOutcome {
    let mut validity = PropertyOutcome::new("witness-states-valid");
    let mut degenerate = PropertyOutcome::new("equal-renyi2-entropy");
    let mut gaps = PropertyOutcome::new("closed-form-gaps");
    let mut separation = PropertyOutcome::new("gap-separation-at-c4");
    let mut limit = PropertyOutcome::new("vanishing-limit");

    for &c in &[1.5, 4.0, 9.0] {
        let (sym, asym, bp) =
            geometric::functional_independence_witness(c).expect("C > 1");
        for (label, cm) in [("sym", &sym), ("asym", &asym)] {
            let report = validate(cm.matrix()).expect("square matrix");
            validity.check(report.passed() && cm.is_pure(), || {
                format!("C={c} {label}: {report}")
            });
        }
        let s2 = |cm: &CovarianceMatrix| {
            cm.reduce(bp.smaller_block())
                .expect("valid block")
                .renyi2_entropy()
                .expect("valid marginal")
        };
        let (ea, eb) = (s2(&sym), s2(&asym));
        degenerate.check((ea - eb).abs() < 1e-10, || {
            format!("C={c}: entropies {ea} vs {eb}")
        });
        degenerate.check((ea - c.ln()).abs() < 1e-10, || {
            format!("C={c}: entropy {ea} vs ln C {}", c.ln())
        });

        let gap_sym = ergotropy::two_local_gap(&sym, &bp).expect("pure state").value;
        let gap_asym = ergotropy::two_local_gap(&asym, &bp)
            .expect("pure state")
            .value;
        gaps.check((gap_sym - 2.0 * (c.sqrt() - 1.0)).abs() < 1e-9, || {
            format!("C={c}: symmetric gap {gap_sym}")
        });
        gaps.check((gap_asym - (c - 1.0)).abs() < 1e-9, || {
            format!("C={c}: asymmetric gap {gap_asym}")
        });
        if c == 4.0 {
            separation.check((gap_sym - gap_asym).abs() > 0.5, || {
                format!("C=4: gaps {gap_sym} and {gap_asym} too close")
            });
        }
    }

    let (sym, asym, bp) =
        geometric::functional_independence_witness(1.0 + 1e-8).expect("C > 1");
    for (label, cm) in [("sym", &sym), ("asym", &asym)] {
        let gap = ergotropy::two_local_gap(cm, &bp).expect("pure state").value;
        limit.check(gap.abs() < 1e-6, || format!("C->1 {label}: gap {gap}"));
    }

    SuiteOutcome::new(
        "witness",
        vec![validity, degenerate, gaps, separation, limit],
    )
}

fn suite_ggm(seed: u64) -> SuiteOutcome {
    let mut range = PropertyOutcome::new("range");
    let mut iff = PropertyOutcome::new("zero-iff-pure-cut");
    let mut anchor = PropertyOutcome::new("tmsv-closed-form");
    let mut bridge = PropertyOutcome::new("bridge-round-trip");

    for n in 2..=4usize {
        let states = sample_states(n, 5.0 * n as f64, seed ^ 0x66 ^ n as u64, 50);
        range.absorb(par_tally(&states, |i, cm, t| {
            let g = geometric::ggm(cm).expect("pure state");
            t.check((0.0..1.0).contains(&g), || format!("N={n} state {i}: ggm {g}"));
        }));
        iff.absorb(par_tally(&states, |i, cm, t| {
            let g = geometric::ggm(cm).expect("pure state");
            let pure_cut = all_bipartitions(n).iter().any(|bp| {
                all_ones(
                    cm.reduced_spectrum(bp.smaller_block())
                        .expect("valid block")
                        .values(),
                    1e-6,
                )
            });
            t.check((g < 1e-6) == pure_cut, || {
                format!("N={n} state {i}: ggm {g}, pure cut {pure_cut}")
            });
        }));
    }

    // Product states sit exactly at zero.
    let left = sample_states(2, 9.0, seed ^ 0x66 ^ 0x900, 10);
    let right = sample_states(2, 9.0, seed ^ 0x66 ^ 0xA00, 10);
    for (i, (a, b)) in left.iter().zip(&right).enumerate() {
        let joint = a.tensor(b);
        let g = geometric::ggm(&joint).expect("pure state");
        iff.check(g < 1e-6, || format!("product pair {i}: ggm {g}"));
    }
    let vacuum_g = geometric::ggm(&CovarianceMatrix::vacuum(3).expect("n >= 1"))
        .expect("pure state");
    iff.check(vacuum_g == 0.0, || format!("vacuum ggm {vacuum_g}"));

    for &r in &[0.1, 0.5, 1.0] {
        let g = geometric::ggm(&CovarianceMatrix::tmsv(r).expect("finite r"))
            .expect("pure state");
        let closed = 1.0 - 2.0 / (1.0 + (2.0 * r).cosh());
        anchor.check((g - closed).abs() <= 1e-12, || {
            format!("r={r}: ggm {g} vs closed form {closed}")
        });
    }
    let g_half = geometric::ggm(&CovarianceMatrix::tmsv(0.5).expect("finite r"))
        .expect("pure state");
    anchor.check((g_half - 0.21355226703407259).abs() <= 1e-12, || {
        format!("r=0.5 anchor: {g_half}")
    });

    for i in 0..10 {
        let g = i as f64 / 10.0;
        let round = geometric::ggm_from_score(geometric::score_from_ggm(g).expect("g < 1"))
            .expect("score >= 0");
        bridge.check((round - g).abs() <= 1e-12, || {
            format!("g={g}: round trip {round}")
        });
        let d = i as f64;
        let round_d =
            geometric::score_from_ggm(geometric::ggm_from_score(d).expect("d >= 0"))
                .expect("g < 1");
        bridge.check((round_d - d).abs() <= 1e-9 * (1.0 + d), || {
            format!("d={d}: round trip {round_d}")
        });
    }

    SuiteOutcome::new("ggm", vec![range, iff, anchor, bridge])
}

fn suite_gtme(seed: u64) -> SuiteOutcome {
    let mut zeros = PropertyOutcome::new("products-score-zero");
    let mut bounds = PropertyOutcome::new("bounds-and-purity-link");
    let mut monotone = PropertyOutcome::new("restart-monotonicity");
    let mut anchor = PropertyOutcome::new("tmsv-positive-and-converged");

    let quick = GtmeConfig {
        restarts: 2,
        seed,
        ..GtmeConfig::default()
    };

    for n in 1..=3usize {
        let vacuum = CovarianceMatrix::vacuum(n).expect("n >= 1");
        let result = geometric::gtme(&vacuum, &quick).expect("pure state");
        zeros.check(result.value.abs() <= 1e-9, || {
            format!("vacuum N={n}: gtme {}", result.value)
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x97E);
    let product_cases: Vec<SqueezedProductParams> = (0..20)
        .map(|_| {
            let n = 1 + rng.random_range(0..3usize);
            let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.2)).collect();
            let theta: Vec<f64> = (0..n)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            SqueezedProductParams::new(r, theta).expect("finite params")
        })
        .collect();
    zeros.absorb(par_tally(&product_cases, |i, params, t| {
        let cm = geometric::squeezed_product_cm(params).expect("finite params");
        let result = geometric::gtme(&cm, &quick).expect("pure state");
        t.check(result.value <= 1e-6, || {
            format!("product case {i}: gtme {}", result.value)
        });
    }));

    for n in 2..=3usize {
        let states = sample_states(n, 4.0 * n as f64, seed ^ 0x97E ^ n as u64, 15);
        let config = GtmeConfig {
            restarts: 4,
            seed,
            ..GtmeConfig::default()
        };
        bounds.absorb(par_tally(&states, |i, cm, t| {
            let result = geometric::gtme(cm, &config).expect("pure state");
            t.check(result.value >= -1e-9 && result.value < 1.0, || {
                format!("N={n} state {i}: gtme {}", result.value)
            });
            t.check(
                (result.value - (1.0 - result.best_purity)).abs() <= 1e-12,
                || {
                    format!(
                        "N={n} state {i}: value {} vs 1 - purity {}",
                        result.value,
                        1.0 - result.best_purity
                    )
                },
            );
            t.check(
                result.best_purity > 0.0 && result.best_purity <= 1.0,
                || format!("N={n} state {i}: purity {}", result.best_purity),
            );
            t.check(result.restarts_used == 4, || {
                format!("N={n} state {i}: restarts {}", result.restarts_used)
            });
        }));
    }

    let states = sample_states(3, 12.0, seed ^ 0x3030, 10);
    monotone.absorb(par_tally(&states, |i, cm, t| {
        let few = geometric::gtme(
            cm,
            &GtmeConfig {
                restarts: 2,
                seed,
                ..GtmeConfig::default()
            },
        )
        .expect("pure state");
        let more = geometric::gtme(
            cm,
            &GtmeConfig {
                restarts: 6,
                seed,
                ..GtmeConfig::default()
            },
        )
        .expect("pure state");
        t.check(more.value <= few.value + 1e-12, || {
            format!("state {i}: 6 restarts {} vs 2 restarts {}", more.value, few.value)
        });
    }));

    let tmsv = CovarianceMatrix::tmsv(0.5).expect("finite r");
    let result = geometric::gtme(
        &tmsv,
        &GtmeConfig {
            restarts: 8,
            seed,
            ..GtmeConfig::default()
        },
    )
    .expect("pure state");
    anchor.check(result.value > 0.05, || {
        format!("tmsv(0.5): gtme {}", result.value)
    });
    anchor.check(result.converged, || "tmsv(0.5): optimizer did not settle".into());

    SuiteOutcome::new("gtme", vec![zeros, bounds, monotone, anchor])
}

/// Truncated-Fock overlap of two single-mode squeezed vacua; the
/// independent route for the Gaussian overlap prefactor. Amplitudes on
/// |2n> are t_n (-e^{i theta} tanh r)^n / sqrt(cosh r) with
/// t_{n+1} = t_n sqrt((2n+1)/(2n+2)).
fn fock_overlap_sq(r1: f64, th1: f64, r2: f64, th2: f64, terms: usize) -> f64 {
    let (tanh1, tanh2) = (r1.tanh(), r2.tanh());
    let mut t_n = 1.0f64;
    let (mut pow1, mut pow2) = (1.0f64, 1.0f64);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for n in 0..terms {
        let weight = t_n * t_n * pow1 * pow2;
        let phase = n as f64 * (th2 - th1);
        re += weight * phase.cos();
        im += weight * phase.sin();
        let nn = n as f64;
        t_n *= ((2.0 * nn + 1.0) / (2.0 * nn + 2.0)).sqrt();
        pow1 *= tanh1;
        pow2 *= tanh2;
    }
    (re * re + im * im) / (r1.cosh() * r2.cosh())
}

fn single_mode_cm(r: f64, theta: f64) -> CovarianceMatrix {
    geometric::squeezed_product_cm(
        &SqueezedProductParams::new(vec![r], vec![theta]).expect("finite params"),
    )
    .expect("finite params")
}

fn suite_fidelity_oracle(seed: u64) -> SuiteOutcome {
    let mut oracle = PropertyOutcome::new("gaussian-matches-fock-brute-force");
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x0F0C);
    for i in 0..20 {
        let r1 = rng.random_range(0.0..1.0);
        let r2 = rng.random_range(0.0..1.0);
        let th1 = rng.random_range(0.0..std::f64::consts::TAU);
        let th2 = rng.random_range(0.0..std::f64::consts::TAU);
        let gaussian =
            geometric::pure_state_overlap(&single_mode_cm(r1, th1), &single_mode_cm(r2, th2))
                .expect("pure states");
        let fock = fock_overlap_sq(r1, th1, r2, th2, 60);
        oracle.check((gaussian - fock).abs() < 1e-6, || {
            format!(
                "pair {i} (r1={r1:.4}, th1={th1:.4}, r2={r2:.4}, th2={th2:.4}): \
                 gaussian {gaussian} vs fock {fock}"
            )
        });
    }

    let mut anchors = PropertyOutcome::new("closed-form-anchors");
    // Aligned axes: overlap depends only on the squeezing difference.
    let aligned =
        geometric::pure_state_overlap(&single_mode_cm(0.8, 0.3), &single_mode_cm(0.2, 0.3))
            .expect("pure states");
    anchors.check((aligned - 0.8435506876218066).abs() <= 1e-12, || {
        format!("aligned overlap {aligned} vs 1/cosh(0.6)")
    });
    let aligned_fock = fock_overlap_sq(0.8, 0.3, 0.2, 0.3, 60);
    anchors.check((aligned_fock - 0.8435506876218066).abs() <= 1e-9, || {
        format!("aligned fock overlap {aligned_fock} vs 1/cosh(0.6)")
    });
    // Perpendicular axes (theta offset pi): squeezings add.
    let crossed =
        geometric::pure_state_overlap(&single_mode_cm(0.8, 1.1), &single_mode_cm(0.2, 1.1 + std::f64::consts::PI))
            .expect("pure states");
    anchors.check((crossed - 1.0 / 1.0f64.cosh()).abs() <= 1e-12, || {
        format!("crossed overlap {crossed} vs 1/cosh(1)")
    });
    // Identical states overlap to one.
    let same = geometric::pure_state_overlap(&single_mode_cm(0.7, 2.0), &single_mode_cm(0.7, 2.0))
        .expect("pure states");
    anchors.check((same - 1.0).abs() <= 1e-12, || {
        format!("self overlap {same}")
    });

    SuiteOutcome::new("fidelity-oracle", vec![oracle, anchors])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_are_unique() {
        let mut seen = HashSet::new();
        for (name, _) in SUITES {
            assert!(seen.insert(*name), "duplicate suite {name}");
        }
        assert_eq!(SUITES.len(), 16);
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        let err = run(Some("nope"), 0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("renyi-bound"));
    }

    #[test]
    fn kolmogorov_tail_anchors() {
        assert!((kolmogorov_q(1.36) - 0.05).abs() < 0.002);
        assert!((kolmogorov_q(1.63) - 0.01).abs() < 0.001);
        assert!(kolmogorov_q(0.2) > 0.999);
        for w in [0.3, 0.6, 0.9, 1.3, 1.8] {
            assert!(kolmogorov_q(w) > kolmogorov_q(w + 0.1), "monotone at {w}");
        }
    }

    #[test]
    fn ks_accepts_its_own_null() {
        let uniform: Vec<f64> = (0..2000).map(|i| (i as f64 + 0.5) / 2000.0).collect();
        assert!(ks_p_one_sample(uniform.clone(), |x| x) > 0.99);
        let shifted: Vec<f64> = uniform.iter().map(|x| x * 0.8).collect();
        assert!(ks_p_one_sample(shifted, |x| x) < 1e-6);
        let a: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 + 0.25).collect();
        assert!(ks_p_two_sample(a.clone(), b) > 0.9);
        let c: Vec<f64> = (0..1000).map(|i| i as f64 + 300.0).collect();
        assert!(ks_p_two_sample(a, c) < 1e-6);
    }

    #[test]
    fn fock_route_reproduces_known_overlaps() {
        assert!((fock_overlap_sq(0.5, 0.0, 0.5, 0.0, 60) - 1.0).abs() < 1e-12);
        let expected = 1.0 / 0.6f64.cosh();
        assert!((fock_overlap_sq(0.8, 0.0, 0.2, 0.0, 60) - expected).abs() < 1e-9);
    }

    #[test]
    fn witness_suite_passes() {
        let outcome = suite_witness(0);
        assert!(outcome.passed, "{:?}", outcome.human_lines());
    }

    #[test]
    fn fidelity_oracle_suite_passes() {
        let outcome = suite_fidelity_oracle(0);
        assert!(outcome.passed, "{:?}", outcome.human_lines());
    }

    #[test]
    fn partitions_suite_passes() {
        let outcome = suite_partitions(0);
        assert!(outcome.passed, "{:?}", outcome.human_lines());
    }

    #[test]
    fn summary_rolls_up_counts() {
        let outcomes = vec![suite_witness(0), suite_fidelity_oracle(0)];
        let summary = summary_json(&outcomes, 7);
        assert_eq!(summary["seed"], 7);
        assert_eq!(summary["suites_run"], 2);
        assert_eq!(summary["passed"], true);
        assert!(summary["checked"].as_u64().unwrap() > 0);
    }
}
