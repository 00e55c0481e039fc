//! Geometric multimode entanglement measures for pure Gaussian states.
//!
//! Two quantifiers live here. The generalized geometric measure (GGM)
//! is computed exactly from marginal symplectic spectra:
//!
//! ```text
//! G = 1 - max over subsets S (|S| <= N/2) of prod_i 2/(1 + nu_i^S).
//! ```
//!
//! Total multimode entanglement is one minus the best overlap with a
//! product of single-mode squeezed vacua,
//!
//! ```text
//! E = 1 - max_{r,theta} 2^N / sqrt(det(S + W(r,theta))),
//! ```
//!
//! found by multistart Nelder-Mead over the 2N squeezing parameters.
//! The `2^N` prefactor normalizes the pure-state overlap so that
//! identical states give 1 in the vacuum-=-identity convention; it is
//! pinned by the truncated-Fock oracle in this module's tests.

use nalgebra::{DMatrix, Matrix2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::optimize::{nelder_mead, SimplexResult};
use crate::symplectic::{Bipartition, CovarianceMatrix};
use crate::{Error, Result};

/// Two restart optima whose fidelities differ by less than this agree
/// for the purpose of the global convergence flag.
pub const GTME_RESTART_AGREEMENT_TOL: f64 = 1e-7;

/// Length of the stagnation window (iterations) for per-restart
/// convergence.
const GTME_STALL_WINDOW: usize = 50;

/// Initial simplex steps for the squeezing magnitudes and angles.
const SIMPLEX_STEP_R: f64 = 0.3;
const SIMPLEX_STEP_THETA: f64 = 0.7;

/// Covariance matrix of a single-mode squeezed vacuum with magnitude
/// `r >= 0` and phase `theta`:
/// `[[cosh 2r - sinh 2r cos t, -sinh 2r sin t], [-sinh 2r sin t, cosh 2r + sinh 2r cos t]]`.
pub fn squeezed_vacuum_cm(r: f64, theta: f64) -> Matrix2<f64> {
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    Matrix2::new(
        c - s * theta.cos(),
        -s * theta.sin(),
        -s * theta.sin(),
        c + s * theta.cos(),
    )
}

/// Squeezing parameters of a product of N single-mode squeezed vacua.
///
/// Stored normalized: every magnitude is nonnegative and every angle is
/// wrapped into `[0, 2*pi)`; a negative input magnitude flips into a
/// half-turn of the angle, which leaves the covariance matrix unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezedProductParams {
    r: Vec<f64>,
    theta: Vec<f64>,
}

impl SqueezedProductParams {
    pub fn new(r: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if r.len() != theta.len() {
            return Err(Error::InvalidArgument(format!(
                "{} magnitudes vs {} angles",
                r.len(),
                theta.len()
            )));
        }
        if r.is_empty() {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if r.iter().chain(theta.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "squeezing parameters must be finite".into(),
            ));
        }
        let mut params = SqueezedProductParams { r, theta };
        for j in 0..params.r.len() {
            if params.r[j] < 0.0 {
                params.r[j] = -params.r[j];
                params.theta[j] += std::f64::consts::PI;
            }
            params.theta[j] = params.theta[j].rem_euclid(TAU);
        }
        Ok(params)
    }

    /// From the optimizer's unconstrained vector `(u_1..u_N, t_1..t_N)`
    /// with `r_j = |u_j|`.
    fn from_unconstrained(u: &[f64]) -> Self {
        let n = u.len() / 2;
        SqueezedProductParams::new(u[..n].to_vec(), u[n..].to_vec())
            .expect("optimizer vectors are finite")
    }

    pub fn n_modes(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

/// The N-mode product state described by `params`.
pub fn squeezed_product_cm(params: &SqueezedProductParams) -> Result<CovarianceMatrix> {
    let n = params.n_modes();
    let mut data = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        let w = squeezed_vacuum_cm(params.r[j], params.theta[j]);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "squeezing magnitude r = {} overflows cosh(2r)",
                params.r[j]
            )));
        }
        data.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&w);
    }
    CovarianceMatrix::new(data)
}

/// Squared overlap of two pure Gaussian states:
/// `2^N / sqrt(det(S_a + S_b))`.
pub fn pure_state_overlap(a: &CovarianceMatrix, b: &CovarianceMatrix) -> Result<f64> {
    if a.n_modes() != b.n_modes() {
        return Err(Error::InvalidArgument(format!(
            "states have {} and {} modes",
            a.n_modes(),
            b.n_modes()
        )));
    }
    a.require_pure()?;
    b.require_pure()?;
    overlap_from_sum(&(a.matrix() + b.matrix()), a.n_modes())
}

fn overlap_from_sum(sum: &DMatrix<f64>, n_modes: usize) -> Result<f64> {
    let det = sum.determinant();
    if det <= 0.0 || !det.is_finite() {
        return Err(Error::Numeric(format!(
            "det(S_a + S_b) = {det:.6e} is not positive"
        )));
    }
    Ok(2.0f64.powi(n_modes as i32) / det.sqrt())
}

/// Generalized geometric measure of a pure state: one minus the largest
/// marginal fidelity factor over all mode subsets of size up to N/2.
pub fn ggm(cm: &CovarianceMatrix) -> Result<f64> {
    cm.require_pure()?;
    let n = cm.n_modes();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "geometric measure needs at least two modes".into(),
        ));
    }
    let mut best = f64::NEG_INFINITY;
    for m in 1..=n / 2 {
        for subset in subsets_of_size(n, m) {
            let spectrum = cm.reduced_spectrum(&subset)?;
            let lambda: f64 = spectrum.iter().map(|&nu| 2.0 / (1.0 + nu)).product();
            best = best.max(lambda);
        }
    }
    Ok(1.0 - best)
}

/// All size-m subsets of `0..n` in lexicographic order.
fn subsets_of_size(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(n: usize, m: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        let needed = m - current.len();
        for i in start..=(n - needed) {
            current.push(i);
            rec(n, m, i + 1, current, out);
            current.pop();
        }
    }
    rec(n, m, 0, &mut current, &mut out);
    out
}

/// The 3-mode bridge from the geometric measure to the bipartite
/// ergotropic score: `2g / (1 - g)`.
pub fn score_from_ggm(g: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&g) {
        return Err(Error::InvalidArgument(format!(
            "geometric measure {g} outside [0, 1)"
        )));
    }
    Ok(2.0 * g / (1.0 - g))
}

/// Inverse of [`score_from_ggm`]: `d / (d + 2)`.
pub fn ggm_from_score(d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "score {d} must be nonnegative"
        )));
    }
    Ok(d / (d + 2.0))
}

/// Settings for the multistart total-entanglement optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GtmeConfig {
    /// Number of independent simplex restarts.
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Per-restart stagnation tolerance: stop when the best objective
    /// improves by less than this over 50 iterations.
    pub tol: f64,
    /// Seed for the random restart points.
    pub seed: u64,
}

impl Default for GtmeConfig {
    fn default() -> Self {
        GtmeConfig {
            restarts: 32,
            max_iters: 2000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// Outcome of the total-entanglement optimization.
#[derive(Debug, Clone, Serialize)]
pub struct GtmeResult {
    /// `1 - best_purity`; an upper bound on the true value that
    /// tightens as restarts are added.
    pub value: f64,
    /// Parameters of the best product state found.
    pub best_params: SqueezedProductParams,
    /// Largest overlap found with a squeezed-vacuum product state.
    pub best_purity: f64,
    /// Restarts actually run.
    pub restarts_used: usize,
    /// True iff the winning restart stalled out on its own (rather than
    /// hitting the iteration cap) and the two best restarts agree within
    /// [`GTME_RESTART_AGREEMENT_TOL`]; single-restart runs report false.
    pub converged: bool,
}

/// Total multimode entanglement of a pure state: one minus the maximal
/// overlap with a product of single-mode squeezed vacua.
///
/// Restart start points: index 0 is the unsqueezed product (all r = 0),
/// index 1 matches each mode's diagonal block of `cm`, and the rest are
/// uniform draws with `r <= arccosh(tr S / 2N)/2 + 1`. Restart i derives
/// its RNG stream from `config.seed ^ i`, so results for a given
/// (state, config) are deterministic, and adding restarts never makes
/// the returned value worse.
pub fn gtme(cm: &CovarianceMatrix, config: &GtmeConfig) -> Result<GtmeResult> {
    cm.require_pure()?;
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let n = cm.n_modes();
    let sigma = cm.matrix();
    let n_log2 = n as f64 * std::f64::consts::LN_2;

    // -ln of the overlap; minimized over (u, theta) with r = |u|.
    let objective = move |u: &[f64]| -> f64 {
        let mut v = sigma.clone();
        for j in 0..n {
            let w = squeezed_vacuum_cm(u[j].abs(), u[n + j]);
            v[(2 * j, 2 * j)] += w[(0, 0)];
            v[(2 * j, 2 * j + 1)] += w[(0, 1)];
            v[(2 * j + 1, 2 * j)] += w[(1, 0)];
            v[(2 * j + 1, 2 * j + 1)] += w[(1, 1)];
        }
        let det = v.determinant();
        if det > 0.0 && det.is_finite() {
            0.5 * det.ln() - n_log2
        } else {
            f64::INFINITY
        }
    };

    let r_max = 0.5 * (sigma.trace() / (2.0 * n as f64)).max(1.0).acosh() + 1.0;
    let steps: Vec<f64> = (0..2 * n)
        .map(|i| if i < n { SIMPLEX_STEP_R } else { SIMPLEX_STEP_THETA })
        .collect();

    let start_point = |restart: usize| -> Vec<f64> {
        match restart {
            0 => vec![0.0; 2 * n],
            1 if config.restarts >= 2 => williamson_start(cm),
            _ => {
                let mut rng = ChaCha12Rng::seed_from_u64(config.seed ^ restart as u64);
                let mut u = vec![0.0; 2 * n];
                for uj in u.iter_mut().take(n) {
                    *uj = rng.random::<f64>() * r_max;
                }
                for tj in u.iter_mut().skip(n) {
                    *tj = rng.random::<f64>() * TAU;
                }
                u
            }
        }
    };

    let runs: Vec<SimplexResult> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            nelder_mead(
                &objective,
                &start_point(restart),
                &steps,
                config.max_iters,
                config.tol,
                GTME_STALL_WINDOW,
            )
        })
        .collect();

    let mut objectives: Vec<f64> = runs.iter().map(|r| r.f).collect();
    let best_idx = objectives
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite objectives"))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best = &runs[best_idx];
    let best_purity = (-best.f).exp();

    // Not converged if the winning restart was cut off by the iteration
    // cap rather than stalling, or if no second restart corroborates it.
    objectives.sort_by(|a, b| a.partial_cmp(b).expect("finite objectives"));
    let converged = config.restarts >= 2
        && best.converged
        && ((-objectives[0]).exp() - (-objectives[1]).exp()).abs()
            < GTME_RESTART_AGREEMENT_TOL;

    Ok(GtmeResult {
        value: 1.0 - best_purity,
        best_params: SqueezedProductParams::from_unconstrained(&best.x),
        best_purity,
        restarts_used: config.restarts,
        converged,
    })
}

/// Start point matching each mode's normalized diagonal 2x2 block of the
/// covariance matrix.
fn williamson_start(cm: &CovarianceMatrix) -> Vec<f64> {
    let n = cm.n_modes();
    let m = cm.matrix();
    let mut u = vec![0.0; 2 * n];
    for j in 0..n {
        let qq = m[(2 * j, 2 * j)];
        let pp = m[(2 * j + 1, 2 * j + 1)];
        let qp = m[(2 * j, 2 * j + 1)];
        let d = (qq * pp - qp * qp).sqrt();
        let cosh2r = ((qq + pp) / (2.0 * d)).max(1.0);
        u[j] = 0.5 * cosh2r.acosh();
        u[n + j] = f64::atan2(-qp / d, (pp - qq) / (2.0 * d));
    }
    u
}

/// Two 4-mode pure states with identical bipartite Renyi-2 entanglement
/// but different bipartite ergotropic gaps across the returned
/// bipartition.
///
/// Both are products of two two-mode squeezed vacua; the bipartition
/// groups one arm of each. The symmetric state has marginal spectrum
/// `(sqrt(c), sqrt(c))`, the asymmetric one `(c, 1)`; both give Renyi-2
/// entropy `ln c`, while the gaps are `2(sqrt(c) - 1)` and `c - 1`.
pub fn functional_independence_witness(
    c: f64,
) -> Result<(CovarianceMatrix, CovarianceMatrix, Bipartition)> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "marginal spectrum product must be >= 1, got {c}"
        )));
    }
    // cosh(2r) = target marginal eigenvalue.
    let r_sym = 0.5 * c.sqrt().acosh();
    let r_asym = 0.5 * c.acosh();
    let symmetric = CovarianceMatrix::tmsv(r_sym)?.tensor(&CovarianceMatrix::tmsv(r_sym)?);
    let asymmetric = CovarianceMatrix::tmsv(r_asym)?.tensor(&CovarianceMatrix::tmsv(0.0)?);
    let bp = Bipartition::new(4, &[0, 2])?;
    Ok((symmetric, asymmetric, bp))
}
