// SPDX-License-Identifier: Apache-2.0

//! The auxiliary functions `g(t)` and `f_k(t)`.
//!
//! ```text
//! dg/dt   = −i Σ_k γ_k e^{iΔ_k t} f_k
//! df_k/dt = −i γ_k e^{−iΔ_k t} g,        g(0) = 1, f_k(0) = 0
//! ```
//!
//! The Heisenberg-picture solution of the excitation-conserving dilation is
//! fully determined by them.

use nalgebra::DVector;
use num_complex::Complex64;

use super::bath::BathSpec;
use crate::error::{Error, Result};
use crate::ode::{self, Solution, System, Tolerances};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Threshold below which `|g|` counts as zero for `Γ = −Re(ġ/g)`.
pub const EPS_G: f64 = 1e-9;

/// `g`, `f` and their derivatives at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxPoint {
    pub t: f64,
    pub g: C64,
    pub f: DVector<C64>,
    pub gdot: C64,
    /// `None` where the derivative is singular (the collective Markovian
    /// mode at `t = 0`).
    pub fdot: Option<DVector<C64>>,
    /// `Γ = −Re(ġ/g)`; `None` where `|g| ≤ ε_g`.
    pub gamma: Option<f64>,
}

impl AuxPoint {
    pub fn abs_g2(&self) -> f64 {
        self.g.norm_sqr()
    }

    /// `Γ|g|² = −Re(g* ġ)`. Finite even where `g` and hence `Γ` is not.
    pub fn loss(&self) -> f64 {
        -(self.g.conj() * self.gdot).re
    }

    /// `Γ` or a [`Error::VanishingG`].
    pub fn gamma(&self) -> Result<f64> {
        self.gamma.ok_or(Error::VanishingG { t: self.t })
    }

    pub fn fdot(&self) -> Result<&DVector<C64>> {
        self.fdot.as_ref().ok_or(Error::SingularDerivative { t: self.t })
    }

    /// `|g|² + Σ|f_k|²`, which the dynamics conserves.
    pub fn norm(&self) -> f64 {
        self.g.norm_sqr() + self.f.norm_squared()
    }

    pub fn n_bath(&self) -> usize {
        self.f.len()
    }
}

fn loss_rate(g: C64, gdot: C64) -> Option<f64> {
    (g.norm() > EPS_G).then(|| -(gdot / g).re)
}

/// The `1 + K` complex ODE in the interaction picture.
#[derive(Debug, Clone)]
pub(crate) struct AuxSystem {
    couplings: Vec<f64>,
    detunings: Vec<f64>,
}

impl AuxSystem {
    pub(crate) fn new(bath: &BathSpec) -> Self {
        Self { couplings: bath.couplings(), detunings: bath.detunings() }
    }

    fn point(&self, t: f64, y: &[C64]) -> AuxPoint {
        let g = y[0];
        let f = DVector::from_column_slice(&y[1..]);
        let mut gdot = C64::new(0.0, 0.0);
        let mut fdot = DVector::zeros(f.len());
        for k in 0..f.len() {
            let phase = C64::from_polar(1.0, self.detunings[k] * t);
            gdot += -I * self.couplings[k] * phase * f[k];
            fdot[k] = -I * self.couplings[k] * phase.conj() * g;
        }
        AuxPoint { t, g, f, gdot, fdot: Some(fdot), gamma: loss_rate(g, gdot) }
    }
}

impl System for AuxSystem {
    fn dim(&self) -> usize {
        1 + self.couplings.len()
    }

    fn rhs(&self, t: f64, y: &[C64], out: &mut [C64]) {
        let g = y[0];
        let mut gdot = C64::new(0.0, 0.0);
        for k in 0..self.couplings.len() {
            let phase = C64::from_polar(self.couplings[k], self.detunings[k] * t);
            gdot += phase * y[1 + k];
            out[1 + k] = -I * phase.conj() * g;
        }
        out[0] = -I * gdot;
    }
}

#[derive(Debug, Clone)]
enum Model {
    Integrated { bath: BathSpec, system: AuxSystem, solution: Solution },
    Markovian { kappa: f64 },
}

/// A solved `(g, f_k)` trajectory on `[0, t_max]` with evaluation at any
/// intermediate time.
///
/// The Markovian variant has `g = e^{−κt}` and represents the environment by
/// the single collective mode that the system excites, with amplitude
/// `f = −i sqrt(1 − e^{−2κt})`. All environment quantities that are invariant
/// under passive transformations of the bath (entropies up to vacuum
/// contributions, relative entropies to the vacuum, `I_SE`) coincide with
/// those of any exact dilation.
#[derive(Debug, Clone)]
pub struct AuxTrajectory {
    model: Model,
    points: Vec<AuxPoint>,
    t_max: f64,
}

/// Number of grid points stored for a Markovian trajectory.
const MARKOVIAN_GRID: usize = 257;

impl AuxTrajectory {
    pub fn markovian(kappa: f64, t_max: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidBath(format!("Markovian rate must be positive, got {kappa}")));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::OutOfRange { t: t_max, t_max });
        }
        let model = Model::Markovian { kappa };
        let points = (0..MARKOVIAN_GRID)
            .map(|i| markovian_point(kappa, t_max * i as f64 / (MARKOVIAN_GRID - 1) as f64))
            .collect();
        Ok(Self { model, points, t_max })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Times of the stored points (accepted integrator steps for integrated
    /// trajectories).
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn points(&self) -> &[AuxPoint] {
        &self.points
    }

    pub fn bath(&self) -> Option<&BathSpec> {
        match &self.model {
            Model::Integrated { bath, .. } => Some(bath),
            Model::Markovian { .. } => None,
        }
    }

    /// The Markovian rate `κ`, if this is a Markovian trajectory.
    pub fn kappa(&self) -> Option<f64> {
        match self.model {
            Model::Markovian { kappa } => Some(kappa),
            Model::Integrated { .. } => None,
        }
    }

    /// Number of environment modes carried by `f`.
    pub fn n_bath(&self) -> usize {
        self.points[0].n_bath()
    }

    pub fn at(&self, t: f64) -> Result<AuxPoint> {
        match &self.model {
            Model::Markovian { kappa } => {
                if !(0.0..=self.t_max).contains(&t) {
                    return Err(Error::OutOfRange { t, t_max: self.t_max });
                }
                Ok(markovian_point(*kappa, t))
            }
            Model::Integrated { system, solution, .. } => {
                let y = solution.eval(system, t)?;
                Ok(system.point(t, &y))
            }
        }
    }

    /// An evaluator which is smooth in `t` on `[t0 − radius, t0 + radius]`
    /// (clipped to the trajectory range), for finite-difference stencils.
    pub fn local(&self, t0: f64, radius: f64) -> LocalSampler<'_> {
        let (anchor, substeps) = match &self.model {
            Model::Markovian { .. } => (0, 1),
            Model::Integrated { solution, .. } => {
                let lo = (t0 - radius).max(0.0);
                let hi = (t0 + radius).min(self.t_max);
                let anchor = solution.anchor_index(lo);
                let cps = &solution.checkpoints;
                let h = if anchor + 1 < cps.len() { cps[anchor + 1].t - cps[anchor].t } else { solution.max_step() };
                let span = hi - cps[anchor].t;
                (anchor, (span / h).ceil().max(1.0) as usize)
            }
        };
        LocalSampler { traj: self, anchor, substeps }
    }
}

pub struct LocalSampler<'a> {
    traj: &'a AuxTrajectory,
    anchor: usize,
    substeps: usize,
}

impl LocalSampler<'_> {
    pub fn at(&self, t: f64) -> Result<AuxPoint> {
        match &self.traj.model {
            Model::Markovian { .. } => self.traj.at(t),
            Model::Integrated { system, solution, .. } => {
                let y = solution.eval_from(system, self.anchor, t, self.substeps)?;
                Ok(system.point(t, &y))
            }
        }
    }
}

fn markovian_point(kappa: f64, t: f64) -> AuxPoint {
    let g = (-kappa * t).exp();
    let x = g * g;
    let s = (1.0 - x).max(0.0).sqrt();
    let fdot = (s > 0.0).then(|| DVector::from_element(1, -I * (kappa * x / s)));
    AuxPoint {
        t,
        g: C64::new(g, 0.0),
        f: DVector::from_element(1, -I * s),
        gdot: C64::new(-kappa * g, 0.0),
        fdot,
        gamma: Some(kappa),
    }
}

/// Integrates the auxiliary ODE on `[0, t_max]` with adaptive Dormand–Prince
/// steps.
pub fn integrate_aux(bath: &BathSpec, t_max: f64, tol: Tolerances) -> Result<AuxTrajectory> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::OutOfRange { t: t_max, t_max });
    }
    let system = AuxSystem::new(bath);
    let mut y0 = vec![C64::new(0.0, 0.0); system.dim()];
    y0[0] = C64::new(1.0, 0.0);
    let solution = ode::integrate(&system, y0, t_max, tol)?;
    let points = solution.checkpoints.iter().map(|cp| system.point(cp.t, &cp.y)).collect();
    Ok(AuxTrajectory { model: Model::Integrated { bath: bath.clone(), system, solution }, points, t_max })
}

/// Closed-form Markovian solution for a given bath:
/// `g = e^{−κt}`, `f_k = iγ_k [e^{−(κ+iΔ_k)t} − 1] / (κ + iΔ_k)`.
pub fn tim_aux(kappa: f64, bath: &BathSpec, t: f64) -> (C64, DVector<C64>) {
    let g = C64::new((-kappa * t).exp(), 0.0);
    let f = bath
        .modes()
        .iter()
        .map(|m| {
            let z = C64::new(kappa, bath.omega() - m.frequency);
            I * m.coupling * ((-z * t).exp() - 1.0) / z
        })
        .collect::<Vec<_>>();
    (g, DVector::from_vec(f))
}

/// `Γ(t) = −Re(ġ/g)` anywhere on the trajectory.
pub fn gamma_rate(traj: &AuxTrajectory, t: f64) -> Result<f64> {
    traj.at(t)?.gamma()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::bath::BathMode;

    fn resonant(gamma: f64) -> BathSpec {
        BathSpec::new(1.0, vec![BathMode { frequency: 1.0, coupling: gamma }]).unwrap()
    }

    #[test]
    fn resonant_single_mode_is_a_rabi_oscillation() {
        let gamma = 0.8;
        let traj = integrate_aux(&resonant(gamma), 10.0, Tolerances::default()).unwrap();
        assert_eq!(traj.points()[0].g, C64::new(1.0, 0.0));
        assert_eq!(traj.points()[0].f[0], C64::new(0.0, 0.0));
        for t in [0.1, 1.0, 2.5, 7.3, 10.0] {
            let p = traj.at(t).unwrap();
            assert!((p.g - C64::new((gamma * t).cos(), 0.0)).norm() < 1e-8);
            assert!((p.f[0] - C64::new(0.0, -(gamma * t).sin())).norm() < 1e-8);
        }
    }

    #[test]
    fn resonant_gamma_is_tangent() {
        let gamma = 1.3;
        let traj = integrate_aux(&resonant(gamma), 3.0, Tolerances { rtol: 1e-11, atol: 1e-14 }).unwrap();
        for t in [0.3, 0.9, 1.5, 2.0] {
            let expect = gamma * (gamma * t).tan();
            let got = gamma_rate(&traj, t).unwrap();
            assert!((got - expect).abs() < 1e-6 * expect.abs().max(1.0), "t={t}: {got} vs {expect}");
        }
        let t_zero = std::f64::consts::FRAC_PI_2 / gamma;
        let p = traj.at(t_zero).unwrap();
        assert!(p.g.norm() < 1e-8);
        assert!(p.loss().is_finite());
    }

    #[test]
    fn vanishing_g_on_exact_zero() {
        let p = AuxPoint {
            t: 1.0,
            g: C64::new(0.0, 0.0),
            f: DVector::from_element(1, C64::new(0.0, -1.0)),
            gdot: C64::new(-1.0, 0.0),
            fdot: None,
            gamma: loss_rate(C64::new(0.0, 0.0), C64::new(-1.0, 0.0)),
        };
        assert_eq!(p.gamma(), Err(Error::VanishingG { t: 1.0 }));
    }

    #[test]
    fn markovian_points() {
        let traj = AuxTrajectory::markovian(2.0, 3.0).unwrap();
        let p = traj.at(0.5).unwrap();
        assert!((p.g.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert_eq!(p.gamma, Some(2.0));
        assert!(traj.at(0.0).unwrap().fdot.is_none());
        assert!(traj.at(3.5).is_err());
    }

    #[test]
    fn tim_closed_form() {
        let bath = BathSpec::new(
            0.0,
            vec![BathMode { frequency: 0.5, coupling: 0.2 }, BathMode { frequency: -1.0, coupling: 0.1 }],
        )
        .unwrap();
        let kappa = 0.4;
        let (g, _) = tim_aux(kappa, &bath, 1.0 / kappa);
        assert!((g.re - (-1.0f64).exp()).abs() < 1e-15);
        let (_, f0) = tim_aux(kappa, &bath, 0.0);
        assert!(f0.iter().all(|z| z.norm() == 0.0));
        let (_, f_inf) = tim_aux(kappa, &bath, 200.0);
        for (k, m) in bath.modes().iter().enumerate() {
            let delta = bath.omega() - m.frequency;
            let lorentz = m.coupling.powi(2) / (kappa * kappa + delta * delta);
            assert!((f_inf[k].norm_sqr() - lorentz).abs() < 1e-14);
        }
        // f solves df/dt = −iγ e^{−iΔt} g with g = e^{−κt}.
        let h = 1e-6;
        let (_, fp) = tim_aux(kappa, &bath, 1.0 + h);
        let (_, fm) = tim_aux(kappa, &bath, 1.0 - h);
        for (k, m) in bath.modes().iter().enumerate() {
            let delta = bath.omega() - m.frequency;
            let rhs = -I * m.coupling * C64::from_polar(1.0, -delta) * (-kappa).exp();
            assert!(((fp[k] - fm[k]) / (2.0 * h) - rhs).norm() < 1e-8);
        }
    }
}
