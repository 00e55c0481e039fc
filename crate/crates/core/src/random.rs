//! Haar-uniform random pure Gaussian states at fixed total energy.
//!
//! Sampling follows a three-step recipe:
//!
//! 1. split the surplus energy `E - 2N` over the modes, uniformly on the
//!    simplex, into per-mode shares `E_i = 2 + (E - 2N) w_i`;
//! 2. convert each share into a squeezing eigenvalue `x_i >= 1` with
//!    `x_i + 1/x_i = E_i`, giving the diagonal `Gamma` (interleaved
//!    `diag(x_1, 1/x_1, ..., x_N, 1/x_N)`);
//! 3. conjugate by a Haar-random orthogonal-symplectic `O` built from an
//!    N x N complex unitary: `Sigma = O Gamma O^T`.
//!
//! Orthogonal conjugation preserves the trace, so `tr Sigma = E` up to
//! rounding, and `det Sigma = 1` because every factor is symplectic.
//!
//! `total_energy` is measured in trace units, where the vacuum costs
//! `2N`; divide by 4 for the harmonic-oscillator Hamiltonian energy.
//! The uniform-simplex energy split is a modeling choice: it fixes the
//! ensemble among the many measures compatible with one total energy,
//! and no identity checked elsewhere depends on it.
//!
//! Sample `i` of a stream draws from a ChaCha12 substream seeded with
//! `seed ^ i`, so batches are reproducible and order-independent.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::symplectic::CovarianceMatrix;
use crate::{Error, Result};

/// Ensemble parameters: mode count, total energy in trace units, and
/// the stream seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomStateConfig {
    pub n_modes: usize,
    /// Target `tr Sigma`; must be at least `2 * n_modes`.
    pub total_energy: f64,
    pub seed: u64,
}

impl RandomStateConfig {
    fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        let floor = 2.0 * self.n_modes as f64;
        if !self.total_energy.is_finite() || self.total_energy < floor {
            return Err(Error::InvalidArgument(format!(
                "total energy {} below the vacuum trace {floor} for {} modes",
                self.total_energy, self.n_modes
            )));
        }
        Ok(())
    }

    /// Seed of the RNG substream for sample `index`.
    pub fn sample_seed(&self, index: u64) -> u64 {
        self.seed ^ index
    }
}

/// Haar-random N x N complex unitary: orthonormalize a complex Gaussian
/// matrix and absorb the phases of the triangular factor's diagonal so
/// the result is distributed with Haar measure rather than the plain
/// QR measure.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> Result<DMatrix<Complex<f64>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = Complex::new(re, im);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    Ok(u)
}

/// The orthogonal-symplectic 2N x 2N matrix acting on interleaved
/// quadratures as the unitary `u` acts on the N mode operators:
/// `[[Re u, Im u], [-Im u, Re u]]` in position/momentum block form,
/// re-permuted to the interleaved ordering.
pub fn orthosymplectic_from_unitary(u: &DMatrix<Complex<f64>>) -> Result<DMatrix<f64>> {
    let n = u.nrows();
    if n == 0 || u.ncols() != n {
        return Err(Error::Shape(format!(
            "expected a square nonempty unitary, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = (u * u.adjoint() - DMatrix::identity(n, n)).camax();
    if !(defect <= 1e-8) {
        return Err(Error::InvalidArgument(format!(
            "matrix is not unitary: |u u* - I| = {defect:.3e}"
        )));
    }
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = u[(i, j)].re;
            let im = u[(i, j)].im;
            o[(2 * i, 2 * j)] = re;
            o[(2 * i, 2 * j + 1)] = im;
            o[(2 * i + 1, 2 * j)] = -im;
            o[(2 * i + 1, 2 * j + 1)] = re;
        }
    }
    Ok(o)
}

/// Haar-random orthogonal-symplectic matrix on N modes.
pub fn haar_orthosymplectic(n_modes: usize, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    let u = haar_unitary(n_modes, rng)?;
    orthosymplectic_from_unitary(&u)
}

/// Per-mode energy shares `E_i = 2 + (E - 2N) w_i` with `w` uniform on
/// the simplex (gaps of sorted uniforms). The shares sum to `E` and
/// each is at least 2.
pub fn random_energy_split(
    total_energy: f64,
    n_modes: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let floor = 2.0 * n_modes as f64;
    if n_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if !total_energy.is_finite() || total_energy < floor {
        return Err(Error::InvalidArgument(format!(
            "total energy {total_energy} below the vacuum trace {floor} for {n_modes} modes"
        )));
    }
    let surplus = total_energy - floor;
    let mut cuts: Vec<f64> = (0..n_modes - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
    let mut shares = Vec::with_capacity(n_modes);
    let mut prev = 0.0;
    for &c in &cuts {
        shares.push(2.0 + surplus * (c - prev));
        prev = c;
    }
    shares.push(2.0 + surplus * (1.0 - prev));
    Ok(shares)
}

/// Squeezing eigenvalue with `x + 1/x = energy`: the root
/// `(E + s sqrt(E^2 - 4))/2`, replaced by its reciprocal when below 1.
///
/// The two roots are exact reciprocals, so the minus branch is computed
/// as `1/x_plus` rather than by the subtractive formula, which cancels
/// catastrophically at large energies.
pub fn squeezing_from_energy(energy: f64, sign: i8) -> Result<f64> {
    if !(energy >= 2.0) || !energy.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "per-mode energy {energy} below the single-mode vacuum trace 2"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!(
            "sign must be +1 or -1, got {sign}"
        )));
    }
    let x_plus = 0.5 * (energy + (energy * energy - 4.0).sqrt());
    if !x_plus.is_finite() {
        return Err(Error::Numeric(format!(
            "per-mode energy {energy} overflows the squeezing eigenvalue"
        )));
    }
    let x = if sign == 1 { x_plus } else { 1.0 / x_plus };
    Ok(if x < 1.0 { 1.0 / x } else { x })
}

/// One random pure state for `config` (sample index 0 of its stream).
pub fn random_pure_cm(config: &RandomStateConfig) -> Result<CovarianceMatrix> {
    random_pure_cm_sample(config, 0)
}

/// Sample `index` of the stream defined by `config`.
///
/// The draw order within a sample is fixed (energy shares, then sign
/// coins, then the unitary), so outputs are bit-identical across runs
/// on one platform for a given (config, index).
pub fn random_pure_cm_sample(config: &RandomStateConfig, index: u64) -> Result<CovarianceMatrix> {
    config.validate()?;
    let n = config.n_modes;
    let mut rng = ChaCha12Rng::seed_from_u64(config.sample_seed(index));
    let shares = random_energy_split(config.total_energy, n, &mut rng)?;
    let mut xs = Vec::with_capacity(n);
    for &e in &shares {
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        xs.push(squeezing_from_energy(e, sign)?);
    }
    if xs.iter().all(|&x| x == 1.0) {
        // Zero squeezing: O Gamma O^T = O O^T is the identity exactly.
        return CovarianceMatrix::vacuum(n);
    }
    let o = haar_orthosymplectic(n, &mut rng)?;
    let mut gamma = DMatrix::zeros(2 * n, 2 * n);
    for (j, &x) in xs.iter().enumerate() {
        gamma[(2 * j, 2 * j)] = x;
        gamma[(2 * j + 1, 2 * j + 1)] = 1.0 / x;
    }
    CovarianceMatrix::new(&o * gamma * o.transpose())
}
