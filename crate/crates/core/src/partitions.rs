//! Set partitions of the mode index set `{0..N-1}` into exactly k
//! nonempty unlabeled blocks, plus Stirling numbers of the second kind.
//!
//! Partitions are enumerated as restricted growth strings in
//! lexicographic order, which doubles as the canonical order used for
//! deterministic argmin tie-breaking downstream.

use std::fmt;
use std::str::FromStr;

use crate::symplectic::Bipartition;
use crate::{Error, Result};

/// Stirling numbers above this n are rejected outright.
const STIRLING_MAX_N: u32 = 70;

/// A partition of `{0..n_modes-1}` into nonempty disjoint blocks.
///
/// Canonical form: each block sorted ascending, blocks ordered by their
/// smallest element. The canonical form is unique per partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModePartition {
    n_modes: usize,
    blocks: Vec<Vec<usize>>,
}

impl ModePartition {
    /// Build from blocks, canonicalizing the order. The blocks must be
    /// nonempty, pairwise disjoint, and cover `{0..n_modes-1}`.
    pub fn new(n_modes: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("partition has no blocks".into()));
        }
        let mut seen = vec![false; n_modes];
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("partition block is empty".into()));
            }
            let mut b = block;
            b.sort_unstable();
            for &m in &b {
                if m >= n_modes {
                    return Err(Error::InvalidArgument(format!(
                        "mode index {m} out of range for {n_modes} modes"
                    )));
                }
                if seen[m] {
                    return Err(Error::InvalidArgument(format!(
                        "mode {m} appears in more than one block"
                    )));
                }
                seen[m] = true;
            }
            canonical.push(b);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidArgument(format!(
                "mode {missing} is not covered by any block"
            )));
        }
        canonical.sort_by_key(|b| b[0]);
        Ok(ModePartition {
            n_modes,
            blocks: canonical,
        })
    }

    /// Construct without checking; `blocks` must already be canonical.
    fn from_canonical(n_modes: usize, blocks: Vec<Vec<usize>>) -> Self {
        ModePartition { n_modes, blocks }
    }

    /// The partition of every mode into its own block.
    pub fn singletons(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        Ok(ModePartition::from_canonical(
            n_modes,
            (0..n_modes).map(|m| vec![m]).collect(),
        ))
    }

    /// The two-block partition induced by a bipartition.
    pub fn from_bipartition(bp: &Bipartition) -> Self {
        let mut blocks = vec![bp.block_a().to_vec(), bp.block_b().to_vec()];
        blocks.sort_by_key(|b| b[0]);
        ModePartition::from_canonical(bp.n_modes(), blocks)
    }

    /// View a two-block partition as a bipartition.
    pub fn to_bipartition(&self) -> Result<Bipartition> {
        if self.k() != 2 {
            return Err(Error::InvalidArgument(format!(
                "expected 2 blocks, found {}",
                self.k()
            )));
        }
        Bipartition::new(self.n_modes, &self.blocks[0])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Text form: blocks joined by '|', indices by ','. Example: "0,2|1|3".
impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, m) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// Parse the text form. The mode count is taken to be one more than the
/// largest index, and the blocks must cover `{0..max}`.
impl FromStr for ModePartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut max_mode = 0usize;
        for block_text in s.split('|') {
            let mut block = Vec::new();
            for tok in block_text.split(',') {
                let tok = tok.trim();
                let m: usize = tok.parse().map_err(|_| {
                    Error::Parse(format!("bad mode index {tok:?} in partition {s:?}"))
                })?;
                max_mode = max_mode.max(m);
                block.push(m);
            }
            blocks.push(block);
        }
        ModePartition::new(max_mode + 1, blocks).map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::Parse(format!("partition {s:?}: {msg}")),
            other => other,
        })
    }
}

/// Stream of all partitions of `n_modes` into exactly `k` blocks, in
/// canonical restricted-growth-string order.
pub fn enumerate_k_partitions(n_modes: usize, k: usize) -> Result<KPartitions> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if k == 0 || k > n_modes {
        return Err(Error::InvalidArgument(format!(
            "block count k = {k} out of range 1..={n_modes}"
        )));
    }
    Ok(KPartitions {
        n: n_modes,
        k,
        labels: Vec::new(),
        started: false,
        done: false,
    })
}

/// Iterator behind [`enumerate_k_partitions`].
///
/// Internally walks restricted growth strings `a` with `a[0] = 0`,
/// `a[i] <= max(a[..i]) + 1`, and exactly `k` distinct labels, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct KPartitions {
    n: usize,
    k: usize,
    labels: Vec<usize>,
    started: bool,
    done: bool,
}

impl KPartitions {
    /// Lexicographically smallest completion of `labels[..from]`: zeros,
    /// except that the tail is forced to introduce the missing labels.
    fn fill_minimal(&mut self, from: usize) {
        let mut used = self.labels[..from].iter().copied().max().map_or(0, |m| m + 1);
        for i in from..self.n {
            let remaining = self.n - i;
            let missing = self.k - used;
            if missing == remaining {
                self.labels[i] = used;
                used += 1;
            } else {
                self.labels[i] = 0;
            }
        }
    }

    /// Advance `labels` to the next string, or mark the stream done.
    fn advance(&mut self) {
        // Rightmost position whose label can grow while the suffix can
        // still reach exactly k labels.
        for i in (1..self.n).rev() {
            let prefix_max = self.labels[..i].iter().copied().max().expect("i >= 1");
            let cap = (prefix_max + 1).min(self.k - 1);
            if self.labels[i] >= cap {
                continue;
            }
            let candidate = self.labels[i] + 1;
            let used = prefix_max.max(candidate) + 1;
            let missing = self.k.saturating_sub(used);
            if missing <= self.n - i - 1 {
                self.labels[i] = candidate;
                self.fill_minimal(i + 1);
                return;
            }
        }
        self.done = true;
    }

    fn current_partition(&self) -> ModePartition {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for (mode, &label) in self.labels.iter().enumerate() {
            blocks[label].push(mode);
        }
        // Labels are assigned in order of first appearance, so the
        // blocks are already canonical.
        ModePartition::from_canonical(self.n, blocks)
    }
}

impl Iterator for KPartitions {
    type Item = ModePartition;

    fn next(&mut self) -> Option<ModePartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.labels = vec![0; self.n];
            self.fill_minimal(1);
        } else {
            self.advance();
            if self.done {
                return None;
            }
        }
        Some(self.current_partition())
    }
}

/// Stirling number of the second kind `S(n, k)`: the number of
/// partitions of n labeled items into k nonempty unlabeled blocks.
///
/// Computed by the recurrence `S(n,k) = k*S(n-1,k) + S(n-1,k-1)` in
/// 128-bit integers; values that cannot be represented exactly (or any
/// n > 70) return [`Error::StirlingRange`].
pub fn stirling2(n: u32, k: u32) -> Result<u128> {
    if n == 0 {
        return Err(Error::InvalidArgument("stirling2 requires n >= 1".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "stirling2 requires 0 <= k <= n, got k = {k} > n = {n}"
        )));
    }
    if n > STIRLING_MAX_N {
        return Err(Error::StirlingRange { n, k });
    }
    if k == 0 {
        return Ok(0);
    }
    // row[j] = S(i, j) for the current i, restricted to j <= k.
    let kk = k as usize;
    let mut row = vec![0u128; kk + 1];
    row[1.min(kk)] = 1; // S(1, 1) = 1
    for _i in 2..=n as usize {
        for j in (1..=kk).rev() {
            let carry = row[j - 1];
            row[j] = (j as u128)
                .checked_mul(row[j])
                .and_then(|x| x.checked_add(carry))
                .ok_or(Error::StirlingRange { n, k })?;
        }
        row[0] = 0;
    }
    Ok(row[kk])
}
