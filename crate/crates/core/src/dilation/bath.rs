// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathMode {
    /// Mode frequency `Ω_k`.
    pub frequency: f64,
    /// Coupling `γ_k ≥ 0`.
    pub coupling: f64,
}

/// System frequency `ω` plus a discrete set of bath modes. Only the
/// detunings `Δ_k = ω − Ω_k` enter the interaction-picture dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    omega: f64,
    modes: Vec<BathMode>,
}

impl BathSpec {
    pub fn new(omega: f64, modes: Vec<BathMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidBath("at least one bath mode is required".into()));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidBath("system frequency must be finite".into()));
        }
        for (k, m) in modes.iter().enumerate() {
            if !m.frequency.is_finite() {
                return Err(Error::InvalidBath(format!("mode {k}: frequency must be finite")));
            }
            if !(m.coupling >= 0.0) || !m.coupling.is_finite() {
                return Err(Error::InvalidBath(format!("mode {k}: coupling must be finite and >= 0")));
            }
        }
        Ok(Self { omega, modes })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.modes.iter().map(|m| self.omega - m.frequency).collect()
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.coupling).collect()
    }

    pub fn coupling_max(&self) -> f64 {
        self.modes.iter().map(|m| m.coupling).fold(0.0, f64::max)
    }

    /// `Σ_k γ_k²`, i.e. `𝒦(0)`.
    pub fn total_coupling_sq(&self) -> f64 {
        self.modes.iter().map(|m| m.coupling * m.coupling).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectralShape {
    /// `J(Ω) = amplitude`.
    Flat { amplitude: f64 },
    /// `J(Ω) = amplitude · (Ω/cutoff) · e^{−Ω/cutoff}`.
    Ohmic { amplitude: f64, cutoff: f64 },
    /// `J(Ω) = amplitude · width² / ((Ω − center)² + width²)`.
    Lorentzian { amplitude: f64, center: f64, width: f64 },
}

impl SpectralShape {
    pub fn density(&self, freq: f64) -> f64 {
        match *self {
            SpectralShape::Flat { amplitude } => amplitude,
            SpectralShape::Ohmic { amplitude, cutoff } => amplitude * (freq / cutoff) * (-freq / cutoff).exp(),
            SpectralShape::Lorentzian { amplitude, center, width } => {
                amplitude * width * width / ((freq - center).powi(2) + width * width)
            }
        }
    }
}

/// A continuous spectral density sampled on `k` uniform cells of `band`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPreset {
    pub omega: f64,
    pub shape: SpectralShape,
    pub band: (f64, f64),
    pub k: usize,
}

/// Half-width of the default band in units of `κ = J(ω)/2`.
pub const DEFAULT_HALF_BAND: f64 = 20.0;
pub const DEFAULT_MODES: usize = 400;

impl SpectralPreset {
    /// Flat `J = 2κ` on `[ω − half_band·κ, ω + half_band·κ]`.
    pub fn flat(omega: f64, kappa: f64, half_band: f64, k: usize) -> Self {
        Self {
            omega,
            shape: SpectralShape::Flat { amplitude: 2.0 * kappa },
            band: (omega - half_band * kappa, omega + half_band * kappa),
            k,
        }
    }

    /// Wigner–Weisskopf rate `κ = J(ω)/2`.
    pub fn kappa(&self) -> f64 {
        0.5 * self.shape.density(self.omega)
    }

    pub fn cell_width(&self) -> f64 {
        (self.band.1 - self.band.0) / self.k as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let dw = self.cell_width();
        (0..self.k).map(|i| self.band.0 + (i as f64 + 0.5) * dw).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.band;
        if self.k == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::EmptyBand);
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidPreset("omega must be finite".into()));
        }
        let params_ok = match self.shape {
            SpectralShape::Flat { amplitude } => amplitude.is_finite() && amplitude >= 0.0,
            SpectralShape::Ohmic { amplitude, cutoff } => {
                amplitude.is_finite() && amplitude >= 0.0 && cutoff.is_finite() && cutoff > 0.0 && lo >= 0.0
            }
            SpectralShape::Lorentzian { amplitude, center, width } => {
                amplitude.is_finite() && amplitude >= 0.0 && center.is_finite() && width.is_finite() && width > 0.0
            }
        };
        if !params_ok {
            return Err(Error::InvalidPreset(format!(
                "parameters of {:?} give an invalid or negative density on [{lo}, {hi}]",
                self.shape
            )));
        }
        let needs_omega = !matches!(self.shape, SpectralShape::Ohmic { .. });
        if needs_omega && !(lo <= self.omega && self.omega <= hi) {
            return Err(Error::InvalidPreset(format!(
                "band [{lo}, {hi}] must contain the system frequency {}",
                self.omega
            )));
        }
        Ok(())
    }

    /// Midpoint-rule value of `∫ J(Ω) dΩ/2π` over the band.
    pub fn midpoint_weight(&self) -> f64 {
        let dw = self.cell_width();
        self.frequencies().iter().map(|&w| self.shape.density(w) * dw).sum::<f64>() / (2.0 * std::f64::consts::PI)
    }
}

/// Samples `J` on the midpoint grid with `γ_k = sqrt(J(Ω_k) ΔΩ / 2π)`, so
/// that `Σ_k γ_k²` is the midpoint rule for `∫ J dΩ/2π`.
pub fn discretize(preset: &SpectralPreset) -> Result<BathSpec> {
    preset.validate()?;
    let dw = preset.cell_width();
    let modes = preset
        .frequencies()
        .into_iter()
        .map(|w| BathMode {
            frequency: w,
            coupling: (preset.shape.density(w) * dw / (2.0 * std::f64::consts::PI)).sqrt(),
        })
        .collect();
    BathSpec::new(preset.omega, modes)
}

/// `𝒦(τ) = Σ_k γ_k² e^{iΔ_k τ}`.
pub fn memory_kernel(bath: &BathSpec, tau: f64) -> C64 {
    bath.modes.iter().map(|m| C64::from_polar(m.coupling * m.coupling, (bath.omega - m.frequency) * tau)).sum()
}
