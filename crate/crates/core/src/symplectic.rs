//! Covariance matrices, symplectic spectra, and entropy functionals.
//!
//! Conventions: quadratures are interleaved as (q1, p1, ..., qN, pN),
//! the vacuum covariance matrix is the identity, and displacements are
//! zero. In these units a covariance matrix `S` is physical iff
//! `S + i*Omega >= 0`, where `Omega` is the symplectic form; the mean
//! energy is `tr(S)/4` and the state is pure iff `det(S) = 1`.
//!
//! Symplectic eigenvalues are computed from the spectrum of the real
//! matrix `Omega * S`, which consists of pairs `+/- i*nu` with
//! `nu >= 1` for physical states.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::{Error, Result};

/// Maximum allowed asymmetry `max_ij |S_ij - S_ji|` of an input matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues of `S + i*Omega` must be `>= -BONA_FIDE_EIG_TOL`.
pub const BONA_FIDE_EIG_TOL: f64 = 1e-8;

/// Symplectic eigenvalues in `[1 - SYMPLECTIC_CLAMP_TOL, 1)` are clamped
/// to exactly 1; anything lower fails validation.
pub const SYMPLECTIC_CLAMP_TOL: f64 = 1e-8;

/// Purity gate: a state is treated as pure iff `|det(S) - 1|` is within
/// this tolerance.
pub const PURE_STATE_DET_TOL: f64 = 1e-6;

/// Below this value of `nu - 1` the `(nu-1)/2 * ln((nu-1)/2)` term of the
/// von Neumann entropy is evaluated as its limit, 0.
const VN_TERM_CUTOFF: f64 = 1e-12;

/// Iteration cap handed to the eigenvalue solvers.
const EIG_MAX_ITER: usize = 10_000;

/// The symplectic form for `n_modes` modes in interleaved ordering:
/// a block-diagonal sum of `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> Result<DMatrix<f64>> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument(
            "symplectic form needs at least one mode".into(),
        ));
    }
    Ok(omega(n_modes))
}

fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for j in 0..n_modes {
        m[(2 * j, 2 * j + 1)] = 1.0;
        m[(2 * j + 1, 2 * j)] = -1.0;
    }
    m
}

/// Outcome of the physical validity checks on a covariance matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub n_modes: usize,
    /// `max_ij |S_ij - S_ji|` of the matrix as given, before symmetrization.
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of the Hermitian matrix `S + i*Omega`.
    pub min_bona_fide_eigenvalue: f64,
    /// Smallest symplectic eigenvalue (unclamped).
    pub min_symplectic_eigenvalue: f64,
}

impl ValidityReport {
    /// True iff all three checks are within tolerance.
    pub fn passed(&self) -> bool {
        self.symmetry_defect <= SYMMETRY_TOL
            && self.min_bona_fide_eigenvalue >= -BONA_FIDE_EIG_TOL
            && self.min_symplectic_eigenvalue >= 1.0 - SYMPLECTIC_CLAMP_TOL
    }
}

impl std::fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: symmetry defect {:.3e} (tol {:.0e}), min eig(S + i*Omega) {:.6e} (tol -{:.0e}), \
             min symplectic eigenvalue {:.12} (tol 1 - {:.0e})",
            if self.passed() { "valid" } else { "INVALID" },
            self.symmetry_defect,
            SYMMETRY_TOL,
            self.min_bona_fide_eigenvalue,
            BONA_FIDE_EIG_TOL,
            self.min_symplectic_eigenvalue,
            SYMPLECTIC_CLAMP_TOL,
        )
    }
}

/// Check a raw square matrix against the covariance-matrix validity
/// conditions without constructing a [`CovarianceMatrix`].
///
/// The eigenvalue checks run on the symmetrized matrix `(S + S^T)/2`;
/// the symmetry defect refers to the matrix as given.
pub fn validate(data: &DMatrix<f64>) -> Result<ValidityReport> {
    let n_modes = check_shape(data)?;
    let symmetry_defect = symmetry_defect(data);
    let sym = symmetrize(data);
    let min_bona_fide_eigenvalue = min_bona_fide_eig(&sym)?;
    let raw = raw_symplectic_values(&sym)?;
    let min_symplectic_eigenvalue = raw.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ValidityReport {
        n_modes,
        symmetry_defect,
        min_bona_fide_eigenvalue,
        min_symplectic_eigenvalue,
    })
}

fn check_shape(data: &DMatrix<f64>) -> Result<usize> {
    if data.nrows() != data.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            data.nrows(),
            data.ncols()
        )));
    }
    if data.nrows() == 0 || data.nrows() % 2 != 0 {
        return Err(Error::Shape(format!(
            "covariance matrices have even dimension 2N >= 2, got {}",
            data.nrows()
        )));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix contains a non-finite entry".into(),
        ));
    }
    Ok(data.nrows() / 2)
}

fn symmetry_defect(data: &DMatrix<f64>) -> f64 {
    let n = data.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            defect = defect.max((data[(i, j)] - data[(j, i)]).abs());
        }
    }
    defect
}

fn symmetrize(data: &DMatrix<f64>) -> DMatrix<f64> {
    (data + data.transpose()) * 0.5
}

/// Smallest eigenvalue of the Hermitian matrix `S + i*Omega`.
fn min_bona_fide_eig(sym: &DMatrix<f64>) -> Result<f64> {
    let n = sym.nrows();
    let om = omega(n / 2);
    let herm = DMatrix::from_fn(n, n, |i, j| Complex::new(sym[(i, j)], om[(i, j)]));
    let eig = nalgebra::linalg::SymmetricEigen::try_new(herm, f64::EPSILON, EIG_MAX_ITER)
        .ok_or_else(|| {
            Error::Numeric(format!(
                "Hermitian eigensolver did not converge on a {n}x{n} matrix (norm {:.3e})",
                sym.norm()
            ))
        })?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Unclamped symplectic eigenvalues of a symmetric matrix, descending.
///
/// Eigenvalues of `Omega * S` come in pairs with equal `|Im|`; after
/// sorting, adjacent entries are averaged into one symplectic eigenvalue.
fn raw_symplectic_values(sym: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n_modes = sym.nrows() / 2;
    let m = omega(n_modes) * sym;
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, EIG_MAX_ITER).ok_or_else(
        || {
            Error::Numeric(format!(
                "Schur iteration did not converge on Omega*S ({}x{}, norm {:.3e})",
                sym.nrows(),
                sym.nrows(),
                sym.norm()
            ))
        },
    )?;
    let eigs = schur.complex_eigenvalues();
    let mut im: Vec<f64> = eigs.iter().map(|z| z.im.abs()).collect();
    im.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut values = Vec::with_capacity(n_modes);
    for j in 0..n_modes {
        let (a, b) = (im[2 * j], im[2 * j + 1]);
        if (a - b).abs() > 1e-5 * a.max(1.0) {
            return Err(Error::Numeric(format!(
                "symplectic pairing mismatch: |Im| values {a:.12e} and {b:.12e} do not pair"
            )));
        }
        values.push(0.5 * (a + b));
    }
    Ok(values)
}

/// Sorted symplectic eigenvalues of a (possibly reduced) covariance
/// matrix, descending, with the sub-unit float-noise band clamped to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    fn from_raw(mut raw: Vec<f64>) -> Self {
        for v in &mut raw {
            if *v >= 1.0 - SYMPLECTIC_CLAMP_TOL && *v < 1.0 {
                *v = 1.0;
            }
        }
        SymplecticSpectrum { values: raw }
    }

    /// The eigenvalues, descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of modes of the source matrix.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of all eigenvalues.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }
}

/// A split of the mode set `{0..N-1}` into two nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    n_modes: usize,
    block_a: Vec<usize>,
    block_b: Vec<usize>,
}

impl Bipartition {
    /// Build from one side; the other block is the complement.
    /// `block_a` must be a nonempty proper subset of `{0..n_modes-1}`.
    pub fn new(n_modes: usize, block_a: &[usize]) -> Result<Self> {
        let mut a: Vec<usize> = block_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != block_a.len() {
            return Err(Error::InvalidArgument(
                "bipartition block contains a repeated mode index".into(),
            ));
        }
        if a.is_empty() || a.len() >= n_modes {
            return Err(Error::InvalidArgument(format!(
                "bipartition block must be a nonempty proper subset of 0..{n_modes}"
            )));
        }
        if let Some(&bad) = a.iter().find(|&&m| m >= n_modes) {
            return Err(Error::InvalidArgument(format!(
                "mode index {bad} out of range for {n_modes} modes"
            )));
        }
        let block_b: Vec<usize> = (0..n_modes).filter(|m| !a.contains(m)).collect();
        Ok(Bipartition {
            n_modes,
            block_a: a,
            block_b,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn block_a(&self) -> &[usize] {
        &self.block_a
    }

    pub fn block_b(&self) -> &[usize] {
        &self.block_b
    }

    /// The block with fewer modes; ties go to block A.
    pub fn smaller_block(&self) -> &[usize] {
        if self.block_a.len() <= self.block_b.len() {
            &self.block_a
        } else {
            &self.block_b
        }
    }
}

/// A validated covariance matrix of an N-mode Gaussian state.
///
/// Construction symmetrizes the input and enforces the bona fide
/// uncertainty condition; every instance in circulation is physical.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validate and wrap a raw matrix. The stored matrix is the
    /// symmetrized input.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        let report = validate(&data)?;
        if !report.passed() {
            return Err(Error::InvalidState(report));
        }
        Ok(CovarianceMatrix {
            n_modes: report.n_modes,
            data: symmetrize(&data),
        })
    }

    /// The N-mode vacuum: the identity matrix.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        Ok(CovarianceMatrix {
            n_modes,
            data: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn tmsv(r: f64) -> Result<Self> {
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        if !c.is_finite() || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "squeezing parameter r = {r} overflows cosh(2r)"
            )));
        }
        let data = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        );
        Ok(CovarianceMatrix { n_modes: 2, data })
    }

    /// Direct sum with another state: `self`'s modes first, then
    /// `other`'s, in interleaved ordering.
    pub fn tensor(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (da, db) = (2 * self.n_modes, 2 * other.n_modes);
        let mut data = DMatrix::zeros(da + db, da + db);
        data.view_mut((0, 0), (da, da)).copy_from(&self.data);
        data.view_mut((da, da), (db, db)).copy_from(&other.data);
        CovarianceMatrix {
            n_modes: self.n_modes + other.n_modes,
            data,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// The underlying 2N x 2N symmetric matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn determinant(&self) -> f64 {
        self.data.determinant()
    }

    /// True iff `|det - 1| <= PURE_STATE_DET_TOL`.
    pub fn is_pure(&self) -> bool {
        (self.determinant() - 1.0).abs() <= PURE_STATE_DET_TOL
    }

    /// Error unless the state passes the purity gate.
    pub(crate) fn require_pure(&self) -> Result<()> {
        let det = self.determinant();
        if (det - 1.0).abs() <= PURE_STATE_DET_TOL {
            Ok(())
        } else {
            Err(Error::MixedState {
                det,
                tol: PURE_STATE_DET_TOL,
            })
        }
    }

    /// Symplectic eigenvalues, descending, clamped per
    /// [`SYMPLECTIC_CLAMP_TOL`].
    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum> {
        Ok(SymplecticSpectrum::from_raw(raw_symplectic_values(
            &self.data,
        )?))
    }

    /// Reduced state on the given modes: the principal submatrix taking
    /// rows and columns (2j, 2j+1) of each selected mode j.
    /// `modes` must be strictly increasing and within range.
    pub fn reduce(&self, modes: &[usize]) -> Result<CovarianceMatrix> {
        let data = self.reduced_data(modes)?;
        Ok(CovarianceMatrix {
            n_modes: modes.len(),
            data,
        })
    }

    fn reduced_data(&self, modes: &[usize]) -> Result<DMatrix<f64>> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "reduction needs a nonempty mode set".into(),
            ));
        }
        if !modes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "mode set must be strictly increasing".into(),
            ));
        }
        if *modes.last().expect("nonempty") >= self.n_modes {
            return Err(Error::InvalidArgument(format!(
                "mode index {} out of range for {} modes",
                modes.last().expect("nonempty"),
                self.n_modes
            )));
        }
        let rows: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(DMatrix::from_fn(rows.len(), rows.len(), |i, j| {
            self.data[(rows[i], rows[j])]
        }))
    }

    /// Symplectic spectrum of the reduction onto `modes`, without
    /// rebuilding a full `CovarianceMatrix`. Equivalent to
    /// `reduce(modes)?.symplectic_eigenvalues()`.
    pub fn reduced_spectrum(&self, modes: &[usize]) -> Result<SymplecticSpectrum> {
        let data = self.reduced_data(modes)?;
        Ok(SymplecticSpectrum::from_raw(raw_symplectic_values(&data)?))
    }

    /// Mean energy `tr(S)/4` of the oscillator Hamiltonian.
    pub fn energy(&self) -> f64 {
        self.data.trace() / 4.0
    }

    /// State purity `1/sqrt(det S)`.
    pub fn purity(&self) -> Result<f64> {
        let det = self.determinant();
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::Numeric(format!(
                "covariance determinant {det:.6e} is not positive"
            )));
        }
        Ok(1.0 / det.sqrt())
    }

    /// Renyi-2 entropy: the sum of `ln(nu)` over the symplectic spectrum.
    pub fn renyi2_entropy(&self) -> Result<f64> {
        Ok(self
            .symplectic_eigenvalues()?
            .iter()
            .map(|&nu| nu.ln())
            .sum())
    }

    /// Von Neumann entropy: the sum of `f(nu)` with
    /// `f(nu) = ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2)`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(self
            .symplectic_eigenvalues()?
            .iter()
            .map(|&nu| von_neumann_term(nu))
            .sum())
    }

    /// Mutual information between the two blocks of `bp`:
    /// `S(A) + S(B) - S(AB)` with von Neumann entropies.
    pub fn mutual_information(&self, bp: &Bipartition) -> Result<f64> {
        if bp.n_modes() != self.n_modes {
            return Err(Error::InvalidArgument(format!(
                "bipartition is over {} modes, state has {}",
                bp.n_modes(),
                self.n_modes
            )));
        }
        let sa: f64 = self
            .reduced_spectrum(bp.block_a())?
            .iter()
            .map(|&nu| von_neumann_term(nu))
            .sum();
        let sb: f64 = self
            .reduced_spectrum(bp.block_b())?
            .iter()
            .map(|&nu| von_neumann_term(nu))
            .sum();
        Ok(sa + sb - self.von_neumann_entropy()?)
    }
}

/// One mode's contribution `f(nu)` to the von Neumann entropy, with the
/// `x ln x -> 0` limit applied near `nu = 1`.
fn von_neumann_term(nu: f64) -> f64 {
    let plus = (nu + 1.0) / 2.0;
    let head = plus * plus.ln();
    if nu - 1.0 < VN_TERM_CUTOFF {
        head
    } else {
        let minus = (nu - 1.0) / 2.0;
        head - minus * minus.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const COSH_1: f64 = 1.5430806348152437;

    #[test]
    fn symplectic_form_single_mode() {
        let om = symplectic_form(1).unwrap();
        assert_eq!(om, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert!(matches!(
            symplectic_form(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn symplectic_form_is_orthogonal_and_squares_to_minus_identity() {
        let om3 = symplectic_form(3).unwrap();
        let id = DMatrix::<f64>::identity(6, 6);
        assert_relative_eq!(&om3 * om3.transpose(), id, epsilon = 0.0);
        let om2 = symplectic_form(2).unwrap();
        let id4 = DMatrix::<f64>::identity(4, 4);
        assert_relative_eq!(&om2 * &om2, -id4, epsilon = 0.0);
    }

    #[test]
    fn vacuum_is_valid_with_unit_spectrum() {
        let vac = CovarianceMatrix::vacuum(3).unwrap();
        let report = validate(vac.matrix()).unwrap();
        assert!(report.passed());
        let nu = vac.symplectic_eigenvalues().unwrap();
        assert_eq!(nu.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn tmsv_is_valid_and_pure() {
        let cm = CovarianceMatrix::tmsv(0.5).unwrap();
        assert!(validate(cm.matrix()).unwrap().passed());
        assert!(cm.is_pure());
        assert_relative_eq!(cm.determinant(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn pinched_vacuum_violates_uncertainty() {
        // Identity with the (0,0) entry lowered to 0.5. The frozen
        // expected minimum of eig(S + i*Omega) is (3 - sqrt(17))/4,
        // from diagonalizing the 2x2 block [[0.5, i], [-i, 1]].
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 0)] = 0.5;
        let report = validate(&m).unwrap();
        assert!(!report.passed());
        assert_relative_eq!(
            report.min_bona_fide_eigenvalue,
            -0.28077640640441513,
            epsilon = 1e-12
        );
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        assert!(matches!(
            validate(&DMatrix::<f64>::zeros(3, 3)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            validate(&DMatrix::<f64>::zeros(2, 4)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn validate_reports_asymmetry() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 1e-3;
        let report = validate(&m).unwrap();
        assert!(!report.passed());
        assert_relative_eq!(report.symmetry_defect, 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn tmsv_marginal_spectrum_is_cosh_2r() {
        let cm = CovarianceMatrix::tmsv(0.5).unwrap();
        let marg = cm.reduce(&[0]).unwrap();
        let nu = marg.symplectic_eigenvalues().unwrap();
        assert_eq!(nu.len(), 1);
        assert_relative_eq!(nu.values()[0], COSH_1, epsilon = 1e-12);
        // Full state is pure: clamping guarantees nothing sits below 1,
        // and rounding can leave values only a few ulps above it.
        let global = cm.symplectic_eigenvalues().unwrap();
        assert_eq!(global.len(), 2);
        for nu in global.values() {
            assert!(*nu >= 1.0);
            assert_relative_eq!(*nu, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reduce_selects_interleaved_rows() {
        let vac = CovarianceMatrix::vacuum(3).unwrap();
        let red = vac.reduce(&[0, 2]).unwrap();
        assert_eq!(red.matrix(), &DMatrix::<f64>::identity(4, 4));
        let cm = CovarianceMatrix::tmsv(0.5).unwrap();
        let marg = cm.reduce(&[0]).unwrap();
        assert_relative_eq!(
            marg.matrix().clone(),
            DMatrix::<f64>::identity(2, 2) * COSH_1,
            epsilon = 1e-12
        );
        let all = cm.reduce(&[0, 1]).unwrap();
        assert_eq!(all.matrix(), cm.matrix());
    }

    #[test]
    fn reduce_rejects_bad_mode_sets() {
        let vac = CovarianceMatrix::vacuum(2).unwrap();
        assert!(vac.reduce(&[]).is_err());
        assert!(vac.reduce(&[2]).is_err());
        assert!(vac.reduce(&[1, 0]).is_err());
        assert!(vac.reduce(&[0, 0]).is_err());
    }

    #[test]
    fn energy_of_vacuum_and_tmsv() {
        assert_relative_eq!(
            CovarianceMatrix::vacuum(4).unwrap().energy(),
            2.0,
            epsilon = 0.0
        );
        assert_relative_eq!(
            CovarianceMatrix::tmsv(0.5).unwrap().energy(),
            COSH_1,
            epsilon = 1e-12
        );
    }

    #[test]
    fn purity_of_thermal_and_pure_states() {
        assert_relative_eq!(
            CovarianceMatrix::vacuum(2).unwrap().purity().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let thermal = CovarianceMatrix::new(DMatrix::identity(2, 2) * 2.0).unwrap();
        assert_relative_eq!(thermal.purity().unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(
            CovarianceMatrix::tmsv(1.0).unwrap().purity().unwrap(),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn purity_times_spectrum_product_is_one() {
        let thermal = CovarianceMatrix::new(DMatrix::identity(4, 4) * 1.7).unwrap();
        let p = thermal.purity().unwrap();
        let prod: f64 = thermal
            .symplectic_eigenvalues()
            .unwrap()
            .iter()
            .product();
        assert_relative_eq!(p * prod, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn renyi2_entropy_of_thermal_mode() {
        let thermal = CovarianceMatrix::new(DMatrix::identity(2, 2) * 2.0).unwrap();
        assert_relative_eq!(
            thermal.renyi2_entropy().unwrap(),
            2.0f64.ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            CovarianceMatrix::vacuum(3).unwrap().renyi2_entropy().unwrap(),
            0.0,
            epsilon = 0.0
        );
    }

    #[test]
    fn renyi2_matches_on_spectra_with_equal_product() {
        // Two spectra with nu1*nu2 = 4 give the same Renyi-2 entropy.
        let c = 4.0f64;
        let diag_a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c.sqrt(),
            c.sqrt(),
            c.sqrt(),
            c.sqrt(),
        ]));
        let diag_b =
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c, c, 1.0, 1.0]));
        let a = CovarianceMatrix::new(diag_a).unwrap();
        let b = CovarianceMatrix::new(diag_b).unwrap();
        assert_relative_eq!(
            a.renyi2_entropy().unwrap(),
            c.ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            b.renyi2_entropy().unwrap(),
            c.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn von_neumann_entropy_frozen_values() {
        assert_relative_eq!(
            CovarianceMatrix::vacuum(2).unwrap().von_neumann_entropy().unwrap(),
            0.0,
            epsilon = 0.0
        );
        // f(3) = 2 ln 2, frozen from direct evaluation.
        let thermal = CovarianceMatrix::new(DMatrix::identity(2, 2) * 3.0).unwrap();
        assert_relative_eq!(
            thermal.von_neumann_entropy().unwrap(),
            1.3862943611198906,
            epsilon = 1e-12
        );
    }

    #[test]
    fn von_neumann_term_is_below_log_plus_one() {
        for nu in [1.5, 2.0, 5.0, 10.0] {
            assert!(von_neumann_term(nu) < nu.ln() + 1.0);
            assert!(nu.ln() + 1.0 < nu);
        }
    }

    #[test]
    fn mutual_information_of_tmsv() {
        let cm = CovarianceMatrix::tmsv(0.5).unwrap();
        let bp = Bipartition::new(2, &[0]).unwrap();
        // 2 * f(cosh 1), frozen from direct evaluation of f.
        assert_relative_eq!(
            cm.mutual_information(&bp).unwrap(),
            1.3189059183360734,
            epsilon = 1e-10
        );
        // Pure state: MI = 2 * S_vN(marginal).
        let marginal_entropy = cm.reduce(&[0]).unwrap().von_neumann_entropy().unwrap();
        assert_relative_eq!(
            cm.mutual_information(&bp).unwrap(),
            2.0 * marginal_entropy,
            epsilon = 1e-10
        );
        let vac = CovarianceMatrix::vacuum(2).unwrap();
        assert_relative_eq!(
            vac.mutual_information(&bp).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bipartition_construction_and_complement() {
        let bp = Bipartition::new(4, &[2, 0]).unwrap();
        assert_eq!(bp.block_a(), &[0, 2]);
        assert_eq!(bp.block_b(), &[1, 3]);
        assert_eq!(bp.smaller_block(), &[0, 2]);
        assert!(Bipartition::new(3, &[]).is_err());
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
        assert!(Bipartition::new(3, &[3]).is_err());
        assert!(Bipartition::new(3, &[1, 1]).is_err());
    }

    #[test]
    fn tensor_direct_sum_layout() {
        let a = CovarianceMatrix::tmsv(0.3).unwrap();
        let b = CovarianceMatrix::vacuum(1).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.n_modes(), 3);
        assert_eq!(t.reduce(&[0, 1]).unwrap().matrix(), a.matrix());
        assert_eq!(t.reduce(&[2]).unwrap().matrix(), b.matrix());
    }

    #[test]
    fn marginal_spectra_of_pure_states_match_across_bipartitions() {
        let cm = CovarianceMatrix::tmsv(0.7)
            .unwrap()
            .tensor(&CovarianceMatrix::tmsv(0.2).unwrap());
        let bp = Bipartition::new(4, &[0]).unwrap();
        let small = cm.reduced_spectrum(bp.block_a()).unwrap();
        let large = cm.reduced_spectrum(bp.block_b()).unwrap();
        // Non-unit part of the larger block matches the smaller block,
        // padded with ones.
        assert_relative_eq!(small.values()[0], large.values()[0], epsilon = 1e-8);
        for &nu in &large.values()[1..] {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-6);
        }
    }
}
