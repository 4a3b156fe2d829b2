// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{LN_2, PI};

use crate::dilation::AuxPoint;
use crate::gaussian::SystemInit;

fn occupation_weight(init: &SystemInit) -> f64 {
    init.n() + init.mu().norm_sqr()
}

/// `(N y + ½)² − |M|² y²`, the determinant of a single mode carrying a
/// fraction `y` of the initial excitation.
fn det_share(init: &SystemInit, y: f64) -> f64 {
    (init.n() * y + 0.5).powi(2) - init.m().norm_sqr() * y * y
}

/// `d/dy` of [`det_share`]: `N + 2(N² − |M|²) y`.
fn det_share_slope(init: &SystemInit, y: f64) -> f64 {
    init.n() + 2.0 * (init.n() * init.n() - init.m().norm_sqr()) * y
}

/// `S(W_S ‖ vacuum) = 2(N + |μ|²)|g|² − ½ ln|Θ_S| − ln 2`.
pub fn srel_s_vac(init: &SystemInit, abs_g2: f64) -> f64 {
    2.0 * occupation_weight(init) * abs_g2 - 0.5 * det_share(init, abs_g2).ln() - LN_2
}

/// `S(W_E ‖ W_E(0))`, which only depends on the transferred fraction
/// `1 − |g|²`.
pub fn srel_e_init(init: &SystemInit, abs_g2: f64) -> f64 {
    let h = 1.0 - abs_g2;
    2.0 * occupation_weight(init) * h - 0.5 * det_share(init, h).ln() - LN_2
}

/// `S(W_S) = 1 + ln π + ½ ln|Θ_S|`.
pub fn system_entropy(init: &SystemInit, abs_g2: f64) -> f64 {
    1.0 + PI.ln() + 0.5 * det_share(init, abs_g2).ln()
}

/// `S(W_E)` for `k` bath modes, using `|Θ_E| = D_E / 4^{k−1}`.
pub fn environment_entropy(init: &SystemInit, abs_g2: f64, k: usize) -> f64 {
    let log_det = det_share(init, 1.0 - abs_g2).ln() - (k as f64 - 1.0) * 4f64.ln();
    k as f64 * (1.0 + PI.ln()) + 0.5 * log_det
}

/// `I_SE = ½ ln(4 D_S D_E / |Θ(0)|)`, independent of the number of modes.
pub fn mutual_info_se(init: &SystemInit, abs_g2: f64) -> f64 {
    0.5 * (4.0 * det_share(init, abs_g2) * det_share(init, 1.0 - abs_g2) / init.det()).ln()
}

/// `⟨a†a⟩_t = (N + |μ|²)|g|²`.
pub fn occupation(init: &SystemInit, abs_g2: f64) -> f64 {
    occupation_weight(init) * abs_g2
}

/// `Π = 4Γ|g|² {N + |μ|² − ¼ [N + 2(N² − |M|²)|g|²] / D_S}`.
pub fn production_rate(init: &SystemInit, point: &AuxPoint) -> f64 {
    let x = point.abs_g2();
    4.0 * point.loss() * (occupation_weight(init) - 0.25 * det_share_slope(init, x) / det_share(init, x))
}

/// `d S(W_E ‖ W_E(0)) / dt = 4Γ|g|² {N + |μ|² − ¼ [N + 2(N² − |M|²)(1 − |g|²)] / D_E}`.
pub fn env_production_rate(init: &SystemInit, point: &AuxPoint) -> f64 {
    let h = 1.0 - point.abs_g2();
    4.0 * point.loss() * (occupation_weight(init) - 0.25 * det_share_slope(init, h) / det_share(init, h))
}

/// The bath rate with the `¼` numerator factor dropped, kept for comparison
/// against finite differences of [`srel_e_init`].
pub fn env_production_rate_uncorrected(init: &SystemInit, point: &AuxPoint) -> f64 {
    let h = 1.0 - point.abs_g2();
    4.0 * point.loss() * (occupation_weight(init) - det_share_slope(init, h) / det_share(init, h))
}

/// `dI_SE/dt = Γ|g|² (D_E'/D_E − D_S'/D_S)`, differentiated directly rather
/// than as `Π − dS(W_E‖W_E(0))/dt`.
pub fn mutual_info_rate(init: &SystemInit, point: &AuxPoint) -> f64 {
    let x = point.abs_g2();
    let h = 1.0 - x;
    point.loss() * (det_share_slope(init, h) / det_share(init, h) - det_share_slope(init, x) / det_share(init, x))
}

/// `dS(W_S)/dt = −Γ|g|² D_S'/D_S`.
pub fn system_entropy_rate(init: &SystemInit, point: &AuxPoint) -> f64 {
    let x = point.abs_g2();
    -point.loss() * det_share_slope(init, x) / det_share(init, x)
}

/// Entropy flux `Φ = −4Γ⟨a†a⟩_t`; negative when entropy flows from the system
/// into the bath.
pub fn entropy_flux(init: &SystemInit, point: &AuxPoint) -> f64 {
    -4.0 * point.loss() * occupation_weight(init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::AuxTrajectory;
    use crate::C64;

    fn half_point() -> AuxPoint {
        let kappa = 1.0;
        AuxTrajectory::markovian(kappa, 2.0).unwrap().at(0.5 * 2f64.ln()).unwrap()
    }

    #[test]
    fn spot_values() {
        let init = SystemInit::thermal(1.0).unwrap();
        let p = half_point();
        assert!((p.abs_g2() - 0.5).abs() < 1e-15);
        assert!((production_rate(&init, &p) - 1.0).abs() < 1e-14);
        assert!((env_production_rate(&init, &p) - 1.0).abs() < 1e-14);
        assert!(mutual_info_rate(&init, &p).abs() < 1e-14);
        assert!((entropy_flux(&init, &p) + 2.0).abs() < 1e-14);
        assert!((srel_s_vac(&init, 1.0) - (2.0 - 3f64.ln())).abs() < 1e-15);
        assert!((srel_e_init(&init, 0.0) - (2.0 - 3f64.ln())).abs() < 1e-15);
        assert_eq!(srel_e_init(&init, 1.0), 0.0);
        assert!(srel_s_vac(&init, 0.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_closed_forms() {
        let mu = C64::new(1.5, -0.5);
        let init = SystemInit::coherent(mu);
        let p = half_point();
        let x = p.abs_g2();
        assert!((srel_s_vac(&init, x) - 2.0 * mu.norm_sqr() * x).abs() < 1e-14);
        assert!((srel_e_init(&init, x) - 2.0 * mu.norm_sqr() * (1.0 - x)).abs() < 1e-14);
        let expected = 4.0 * p.loss() * mu.norm_sqr();
        assert!((production_rate(&init, &p) - expected).abs() < 1e-13);
        assert!((env_production_rate(&init, &p) - expected).abs() < 1e-13);
        assert!(mutual_info_se(&init, x).abs() < 1e-15);
    }

    #[test]
    fn thermal_production_simplifies() {
        let n = 2.3;
        let init = SystemInit::thermal(n).unwrap();
        let p = half_point();
        let x = p.abs_g2();
        let gamma = p.gamma().unwrap();
        let expected = 4.0 * gamma * n * n * x * x / (n * x + 0.5);
        assert!((production_rate(&init, &p) - expected).abs() < 1e-13);
    }

    #[test]
    fn decomposition_and_flux_identities() {
        let init = SystemInit::new(C64::new(0.3, 0.8), 1.7, C64::new(-0.9, 1.1)).unwrap();
        for t in [0.0, 0.2, 0.9, 1.7] {
            let p = AuxTrajectory::markovian(0.8, 2.0).unwrap().at(t).unwrap();
            let pi = production_rate(&init, &p);
            let split = env_production_rate(&init, &p) + mutual_info_rate(&init, &p);
            assert!((pi - split).abs() < 1e-12);
            let flux = entropy_flux(&init, &p);
            assert!((flux - (system_entropy_rate(&init, &p) - pi)).abs() < 1e-12);
        }
    }
}
