// SPDX-License-Identifier: Apache-2.0

//! Gaussian Wigner functions in the complex `(a, a†)`-paired ordering.
//!
//! An `n`-mode state is a mean vector `(⟨a₁⟩, ⟨a₁†⟩, …)` of length `2n` and
//! the covariance `Θ_ij = ½⟨{δR_i, δR_j†}⟩`. Every phase-space integral used
//! elsewhere in the crate reduces to closed forms over these two objects:
//!
//! * `S(W) = n(1 + ln π) + ½ ln|Θ|`
//! * `S(W₁‖W₂) = ½ ln(|Θ₂|/|Θ₁|) + ½ tr(Θ₁Θ₂⁻¹) − n + ½ Δμ†Θ₂⁻¹Δμ`
//! * `∫ |d + L·δξ|² W = |d|² + LᵀΘL̄`
//!
//! Pointwise evaluation of `W` is deliberately absent; it only exists in the
//! quadrature oracles of the test-suite.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for Hermiticity and conjugation pairing.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed undershoot of symplectic eigenvalues below ½.
pub const PHYSICALITY_TOL: f64 = 1e-9;

const ONE_PLUS_LN_PI: f64 = 1.0 + 1.144_729_885_849_400_2;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<C64>,
    cov: DMatrix<C64>,
}

impl GaussianState {
    /// Builds a state after checking Hermiticity, conjugation pairing and the
    /// uncertainty bound (every symplectic eigenvalue ≥ ½ − 1e-9).
    pub fn new(mean: DVector<C64>, cov: DMatrix<C64>) -> Result<Self> {
        let state = Self::new_unchecked_uncertainty(mean, cov)?;
        let nu_min = state.symplectic_eigenvalues()?[0];
        if nu_min < 0.5 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(nu_min));
        }
        Ok(state)
    }

    /// [`GaussianState::new`] without the uncertainty bound, for states that
    /// satisfy it by construction (Gaussian channels applied to physical
    /// states). The symplectic spectrum costs two large eigendecompositions.
    pub(crate) fn new_unchecked_uncertainty(mean: DVector<C64>, cov: DMatrix<C64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::MalformedState(format!("mean vector length {dim} is not a positive even number")));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::MalformedState(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedState("non-finite entry".into()));
        }
        let scale = cov.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let mean_scale = mean.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let tol = HERMITIAN_TOL * scale;
        for i in 0..dim {
            for j in 0..dim {
                if (cov[(i, j)] - cov[(j, i)].conj()).norm() > tol {
                    return Err(Error::MalformedState(format!("covariance not Hermitian at ({i}, {j})")));
                }
                let (pi, pj) = (i ^ 1, j ^ 1);
                if (cov[(pi, pj)].conj() - cov[(i, j)]).norm() > tol {
                    return Err(Error::MalformedState(format!("covariance breaks (a, a†) pairing at ({i}, {j})")));
                }
            }
        }
        for i in (0..dim).step_by(2) {
            if (mean[i + 1] - mean[i].conj()).norm() > HERMITIAN_TOL * mean_scale {
                return Err(Error::MalformedState(format!("mean entries {i} and {} are not conjugate", i + 1)));
            }
        }
        Ok(Self { mean, cov })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<C64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<C64> {
        &self.cov
    }

    /// Symplectic eigenvalues in ascending order.
    ///
    /// These are the moduli of the eigenvalues of `ΩΘ`, with
    /// `Ω = diag(1, −1, 1, −1, …)` the commutator metric of the paired
    /// ordering, obtained from the Hermitian matrix `Θ^½ Ω Θ^½`.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let dim = self.cov.nrows();
        let eig = SymmetricEigen::new(self.cov.clone());
        let lam_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if lam_min <= 0.0 {
            return Err(Error::Unphysical(lam_min.min(0.0)));
        }
        let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.sqrt(), 0.0)));
        let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
        let mut weighted = root.clone();
        for j in 0..dim {
            if j % 2 == 1 {
                weighted.column_mut(j).neg_mut();
            }
        }
        let mut sandwich = weighted * &root;
        hermitize(&mut sandwich);
        let mut nus: Vec<f64> = SymmetricEigen::new(sandwich).eigenvalues.iter().map(|v| v.abs()).collect();
        nus.sort_by(|a, b| a.total_cmp(b));
        // ±ν pairs: keep one of each.
        Ok(nus.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
    }

    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        Ok(self.symplectic_eigenvalues()?.iter().all(|nu| (nu - 0.5).abs() <= tol))
    }

    /// `ln det Θ` from a Cholesky factorisation.
    pub fn log_det(&self) -> Result<f64> {
        log_det_hermitian(&self.cov).ok_or(Error::NonPositiveDeterminant)
    }

    /// Same covariance, mean shifted by `alpha_k` in mode `k`.
    pub fn displaced(&self, alpha: &[C64]) -> Result<Self> {
        if alpha.len() != self.n_modes() {
            return Err(Error::DimensionMismatch { left: self.n_modes(), right: alpha.len() });
        }
        let mut mean = self.mean.clone();
        for (k, a) in alpha.iter().enumerate() {
            mean[2 * k] += a;
            mean[2 * k + 1] += a.conj();
        }
        Ok(Self { mean, cov: self.cov.clone() })
    }

    /// Tensor product `self ⊗ other` (block-diagonal covariance).
    pub fn product(&self, other: &GaussianState) -> GaussianState {
        let (n1, n2) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(n1 + n2);
        mean.rows_mut(0, n1).copy_from(&self.mean);
        mean.rows_mut(n1, n2).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(n1 + n2, n1 + n2);
        cov.view_mut((0, 0), (n1, n1)).copy_from(&self.cov);
        cov.view_mut((n1, n1), (n2, n2)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }
}

/// Displaced squeezed thermal single-mode initial condition `(μ, N, M)`.
///
/// `μ = ⟨a⟩₀`, `N = ⟨δa†δa⟩₀`, `M = ⟨δaδa⟩₀`. Equivalently
/// `N + ½ = (n̄ + ½) cosh 2r` and `M = (n̄ + ½) e^{iθ} sinh 2r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemInit {
    mu: C64,
    n: f64,
    m: C64,
}

impl SystemInit {
    pub fn new(mu: C64, n: f64, m: C64) -> Result<Self> {
        if !(mu.re.is_finite() && mu.im.is_finite() && n.is_finite() && m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::UnphysicalInit { m_abs2: f64::NAN, bound: f64::NAN });
        }
        let bound = n * (n + 1.0);
        let m_abs2 = m.norm_sqr();
        if n < 0.0 || m_abs2 > bound + 1e-12 {
            return Err(Error::UnphysicalInit { m_abs2, bound });
        }
        Ok(Self { mu, n, m })
    }

    pub fn from_squeezed_thermal(mu: C64, nbar: f64, r: f64, theta: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::UnphysicalInit { m_abs2: f64::NAN, bound: f64::NAN });
        }
        let w = nbar + 0.5;
        let n = w * (2.0 * r).cosh() - 0.5;
        let m = C64::from_polar(w * (2.0 * r).sinh(), theta);
        // cosh² − sinh² = 1 can lose the last bit; the bound holds exactly in
        // exact arithmetic so clamp through `new` with its 1e-12 allowance.
        Self::new(mu, n, m)
    }

    pub fn vacuum() -> Self {
        Self { mu: C64::new(0.0, 0.0), n: 0.0, m: C64::new(0.0, 0.0) }
    }

    pub fn coherent(mu: C64) -> Self {
        Self { mu, n: 0.0, m: C64::new(0.0, 0.0) }
    }

    pub fn thermal(n: f64) -> Result<Self> {
        Self::new(C64::new(0.0, 0.0), n, C64::new(0.0, 0.0))
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> C64 {
        self.m
    }

    /// `(N + ½)² − |M|² = (n̄ + ½)²`, the initial single-mode determinant.
    pub fn det(&self) -> f64 {
        (self.n + 0.5).powi(2) - self.m.norm_sqr()
    }

    pub fn nbar(&self) -> f64 {
        self.det().max(0.25).sqrt() - 0.5
    }

    pub fn r(&self) -> f64 {
        0.5 * (self.m.norm() / (self.n + 0.5)).min(1.0).atanh()
    }

    pub fn theta(&self) -> f64 {
        self.m.arg()
    }
}

/// The product vacuum on `n_modes` modes: zero mean, `Θ = ½·I`.
///
/// # Panics
/// If `n_modes == 0`.
pub fn vacuum_state(n_modes: usize) -> GaussianState {
    assert!(n_modes >= 1, "vacuum_state needs at least one mode");
    let dim = 2 * n_modes;
    GaussianState { mean: DVector::zeros(dim), cov: DMatrix::from_diagonal_element(dim, dim, C64::new(0.5, 0.0)) }
}

pub fn state_from_init(init: &SystemInit) -> GaussianState {
    let d = C64::new(init.n + 0.5, 0.0);
    GaussianState {
        mean: DVector::from_vec(vec![init.mu, init.mu.conj()]),
        cov: DMatrix::from_row_slice(2, 2, &[d, init.m, init.m.conj(), d]),
    }
}

pub fn wigner_entropy(s: &GaussianState) -> Result<f64> {
    Ok(s.n_modes() as f64 * ONE_PLUS_LN_PI + 0.5 * s.log_det()?)
}

pub fn relative_entropy(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.n_modes() != s2.n_modes() {
        return Err(Error::DimensionMismatch { left: s1.n_modes(), right: s2.n_modes() });
    }
    let chol2 = Cholesky::new(s2.cov.clone()).ok_or(Error::SingularReference)?;
    let ld2 = chol_log_det(&chol2);
    let ld1 = s1.log_det()?;
    let trace = chol2.solve(&s1.cov).trace().re;
    let dmu = &s1.mean - &s2.mean;
    let quad = dmu.dotc(&chol2.solve(&dmu)).re;
    Ok(0.5 * (ld2 - ld1) + 0.5 * trace - s1.n_modes() as f64 + 0.5 * quad)
}

/// `I(A:B) = ½ ln(|Θ_A||Θ_B|/|Θ_AB|)` for a split of all modes into two sides.
pub fn mutual_information(joint: &GaussianState, first: &[usize], second: &[usize]) -> Result<f64> {
    let n = joint.n_modes();
    if first.is_empty() || second.is_empty() {
        return Err(Error::BadPartition("both sides must be non-empty".into()));
    }
    let mut seen = vec![false; n];
    for &k in first.iter().chain(second) {
        if k >= n {
            return Err(Error::BadIndex { index: k, n_modes: n });
        }
        if seen[k] {
            return Err(Error::BadPartition(format!("mode {k} appears twice")));
        }
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::BadPartition(format!("mode {k} is not assigned")));
    }
    let a = marginal(joint, first)?.log_det()?;
    let b = marginal(joint, second)?.log_det()?;
    Ok(0.5 * (a + b - joint.log_det()?))
}

/// Marginal over the kept `modes`, in the order given. Integrating the
/// Wigner function over the other modes reduces to block extraction.
pub fn marginal(s: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    let idx = coordinate_indices(s.n_modes(), modes)?;
    Ok(GaussianState {
        mean: DVector::from_iterator(idx.len(), idx.iter().map(|&i| s.mean[i])),
        cov: submatrix(&s.cov, &idx, &idx),
    })
}

/// A phase-space current in canonical form `J(ξ) = [d + L·(ξ − mean)] W(ξ)`.
///
/// `L` runs over all `2n` coordinates `(α₁, α₁*, …)` of `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCurrent {
    pub d: C64,
    pub l: DVector<C64>,
    pub state: GaussianState,
}

impl LinearCurrent {
    pub fn new(d: C64, l: DVector<C64>, state: GaussianState) -> Result<Self> {
        if l.len() != state.mean.len() {
            return Err(Error::DimensionMismatch { left: state.n_modes(), right: l.len() / 2 });
        }
        Ok(Self { d, l, state })
    }

    pub fn zero(state: GaussianState) -> Self {
        let l = DVector::zeros(state.mean.len());
        Self { d: C64::new(0.0, 0.0), l, state }
    }

    /// `J/W` at the phase-space point `xi`.
    pub fn velocity(&self, xi: &DVector<C64>) -> C64 {
        self.d + self.l.dot(&(xi - &self.state.mean))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { d: self.d * factor, l: &self.l * factor, state: self.state.clone() }
    }

    /// Integrates `J` over every mode not in `keep`, returning the current of
    /// the marginal state in canonical form.
    ///
    /// Uses `∫ δξ_int W = Θ_{int,kept} Θ_kept⁻¹ δξ_kept W̄`, the coefficient form
    /// of the marginalisation identity for Gaussian Wigner functions.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        let n = self.state.n_modes();
        let kept = coordinate_indices(n, keep)?;
        let mut is_kept = vec![false; n];
        keep.iter().for_each(|&k| is_kept[k] = true);
        let dropped_modes: Vec<usize> = (0..n).filter(|&k| !is_kept[k]).collect();
        let dropped = coordinate_indices(n, &dropped_modes).unwrap_or_default();
        let marginal_state = marginal(&self.state, keep)?;
        let mut l = DVector::from_iterator(kept.len(), kept.iter().map(|&i| self.l[i]));
        if !dropped.is_empty() {
            let l_int = DVector::from_iterator(dropped.len(), dropped.iter().map(|&i| self.l[i]));
            let cross = submatrix(&self.state.cov, &dropped, &kept);
            let chol = Cholesky::new(marginal_state.cov.clone()).ok_or(Error::SingularReference)?;
            // row vector l_intᵀ Θ_ik Θ_kk⁻¹  ==  (Θ_kk⁻ᵀ Θ_ikᵀ l_int)ᵀ
            let row = cross.transpose() * l_int;
            let solved = chol_solve_transposed(&chol, &row);
            l += solved;
        }
        Ok(Self { d: self.d, l, state: marginal_state })
    }

    /// Re-expresses this current (defined on a marginal of `joint` over
    /// `modes`) as a current over the coordinates of `joint`, with zero
    /// coefficients on every other mode.
    pub fn embed(&self, joint: &GaussianState, modes: &[usize]) -> Result<Self> {
        let idx = coordinate_indices(joint.n_modes(), modes)?;
        if idx.len() != self.l.len() {
            return Err(Error::DimensionMismatch { left: self.state.n_modes(), right: modes.len() });
        }
        let mut l = DVector::zeros(joint.mean.len());
        for (src, &dst) in idx.iter().enumerate() {
            l[dst] = self.l[src];
        }
        Ok(Self { d: self.d, l, state: joint.clone() })
    }
}

/// `∫ |J|²/W = |d|² + Σ_ij L_i Θ_ij L_j*`, exact for Gaussian `W`.
pub fn moment_form(c: &LinearCurrent) -> f64 {
    let theta_l = &c.state.cov * c.l.map(|z| z.conj());
    c.d.norm_sqr() + c.l.dot(&theta_l).re
}

/// Converts a derivative form `Σ_j c_j ∂_{ξ_j*} W` into its linear form
/// `(L·δξ) W`. From `δξ W = −Θ ∂_{ξ*} W` one gets `Lᵀ = −cᵀ Θ⁻¹`.
pub fn derivative_to_linear(state: &GaussianState, coeffs: &DVector<C64>) -> Result<DVector<C64>> {
    if coeffs.len() != state.mean.len() {
        return Err(Error::DimensionMismatch { left: state.n_modes(), right: coeffs.len() / 2 });
    }
    let chol = Cholesky::new(state.cov.clone()).ok_or(Error::SingularReference)?;
    Ok(-chol_solve_transposed(&chol, coeffs))
}

/// Inverse of [`derivative_to_linear`]: `cᵀ = −Lᵀ Θ`.
pub fn linear_to_derivative(state: &GaussianState, l: &DVector<C64>) -> Result<DVector<C64>> {
    if l.len() != state.mean.len() {
        return Err(Error::DimensionMismatch { left: state.n_modes(), right: l.len() / 2 });
    }
    Ok(-(state.cov.transpose() * l))
}

/// Solves `xᵀ A = bᵀ`, i.e. `Aᵀ x = b`, for Hermitian positive `A`.
fn chol_solve_transposed(chol: &Cholesky<C64, Dyn>, b: &DVector<C64>) -> DVector<C64> {
    // Aᵀ = conj(A) for Hermitian A, so x = conj(A⁻¹ conj(b)).
    chol.solve(&b.map(|z| z.conj())).map(|z| z.conj())
}

fn chol_log_det(chol: &Cholesky<C64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|z| z.re.ln()).sum::<f64>()
}

pub(crate) fn log_det_hermitian(m: &DMatrix<C64>) -> Option<f64> {
    let chol = Cholesky::new(m.clone())?;
    let ld = chol_log_det(&chol);
    ld.is_finite().then_some(ld)
}

fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn coordinate_indices(n_modes: usize, modes: &[usize]) -> Result<Vec<usize>> {
    if modes.is_empty() {
        return Err(Error::BadPartition("empty mode set".into()));
    }
    let mut seen = vec![false; n_modes];
    let mut idx = Vec::with_capacity(2 * modes.len());
    for &k in modes {
        if k >= n_modes {
            return Err(Error::BadIndex { index: k, n_modes });
        }
        if seen[k] {
            return Err(Error::BadPartition(format!("mode {k} appears twice")));
        }
        seen[k] = true;
        idx.push(2 * k);
        idx.push(2 * k + 1);
    }
    Ok(idx)
}

fn submatrix(m: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
