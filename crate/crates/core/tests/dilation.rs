// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_dilation::dilation::{
    assemble_covariance, discretize, gamma_rate, integrate_aux, lyapunov_propagate, memory_kernel, AuxTrajectory,
    BathMode, BathSpec, SpectralPreset,
};
use wigner_dilation::ode::Tolerances;
use wigner_dilation::{Error, SystemInit, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn random_bath(rng: &mut ChaCha8Rng, k: usize) -> BathSpec {
    let omega = rng.random_range(-1.0..1.0);
    let modes = (0..k)
        .map(|_| BathMode { frequency: rng.random_range(-2.0..2.0), coupling: rng.random_range(0.05..0.6) })
        .collect();
    BathSpec::new(omega, modes).unwrap()
}

/// Exact `(g, f)` from the rotating frame `F_k = f_k e^{iΔ_k t}`, where the
/// equations become `y' = −iHy` with a constant real symmetric `H`.
fn exact(bath: &BathSpec, t: f64) -> (C64, DVector<C64>) {
    let k = bath.len();
    let det = bath.detunings();
    let mut h = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (q, m) in bath.modes().iter().enumerate() {
        h[(0, q + 1)] = m.coupling;
        h[(q + 1, 0)] = m.coupling;
        h[(q + 1, q + 1)] = -det[q];
    }
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = DVector::from_iterator(k + 1, eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)));
    let y0 = v.row(0).transpose();
    let y = &v * y0.component_mul(&phases);
    let f = DVector::from_iterator(k, (0..k).map(|q| y[q + 1] * C64::from_polar(1.0, -det[q] * t)));
    (y[0], f)
}

fn tight() -> Tolerances {
    Tolerances { rtol: 1e-11, atol: 1e-14 }
}

#[test]
fn matches_exact_solution_on_random_baths() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let bath = random_bath(&mut rng, 8);
        let traj = integrate_aux(&bath, 10.0, tight()).unwrap();
        for i in 0..=40 {
            let t = 0.25 * i as f64;
            let p = traj.at(t).unwrap();
            let (g, f) = exact(&bath, t);
            assert!((p.g - g).norm() < 1e-8, "g at t = {t}");
            assert!((&p.f - f).norm() < 1e-8, "f at t = {t}");
        }
    }
}

#[test]
fn resonant_single_mode() {
    let gamma = 0.8;
    let bath = BathSpec::new(1.5, vec![BathMode { frequency: 1.5, coupling: gamma }]).unwrap();
    let traj = integrate_aux(&bath, 6.0, tight()).unwrap();
    for t in [0.3, 1.0, 2.5, 5.9] {
        let p = traj.at(t).unwrap();
        assert!((p.g - C64::new((gamma * t).cos(), 0.0)).norm() < 1e-9);
        assert!((p.f[0] + I * (gamma * t).sin()).norm() < 1e-9);
    }
    let t = 2.0;
    let g = gamma_rate(&traj, t).unwrap();
    assert!((g - gamma * (gamma * t).tan()).abs() < 1e-6 * g.abs());
    assert!(g < 0.0);
}

#[test]
fn norm_and_stored_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bath = random_bath(&mut rng, 12);
    let traj = integrate_aux(&bath, 8.0, Tolerances::default()).unwrap();
    assert_eq!(traj.points()[0].g, C64::new(1.0, 0.0));
    assert!(traj.points()[0].f.iter().all(|f| *f == C64::new(0.0, 0.0)));
    let times = traj.grid();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    let det = bath.detunings();
    for p in traj.points() {
        assert!((p.norm() - 1.0).abs() < 1e-8);
        let expected: C64 = bath
            .modes()
            .iter()
            .zip(&det)
            .zip(p.f.iter())
            .map(|((m, d), f)| -I * m.coupling * C64::from_polar(1.0, d * p.t) * f)
            .sum();
        assert!((p.gdot - expected).norm() < 1e-10);
    }
}

/// `ġ(t) = −∫₀ᵗ 𝒦(t − s) g(s) ds`, by composite Simpson quadrature.
#[test]
fn convolution_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bath = random_bath(&mut rng, 8);
    let traj = integrate_aux(&bath, 6.0, tight()).unwrap();
    for t in [0.7, 2.0, 4.5, 6.0] {
        let n = 2000;
        let h = t / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..=n {
            let s = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += memory_kernel(&bath, t - s) * traj.at(s).unwrap().g * w;
        }
        let conv = -acc * h / 3.0;
        assert!((traj.at(t).unwrap().gdot - conv).norm() < 1e-6, "t = {t}");
    }
}

#[test]
fn lyapunov_matches_assembly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let bath = random_bath(&mut rng, 3);
        let init = SystemInit::from_squeezed_thermal(
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..0.8),
            rng.random_range(0.0..6.0),
        )
        .unwrap();
        let t_max = 3.0 / bath.coupling_max();
        let grid: Vec<f64> = (0..=12).map(|i| t_max * i as f64 / 12.0).collect();
        let traj = integrate_aux(&bath, t_max, Tolerances::default()).unwrap();
        let covs = lyapunov_propagate(&bath, &init, &grid, Tolerances::default()).unwrap();
        let det0 = init.det() / 64.0;
        for (t, cov) in grid.iter().zip(&covs) {
            let st = assemble_covariance(&init, &traj, *t).unwrap();
            let dev = st.cov().iter().zip(cov.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev <= 1e-8, "max-norm deviation {dev} at t = {t}");
            assert!((st.log_det().unwrap().exp() / det0 - 1.0).abs() < 1e-8);
        }
    }
}

fn tim_deviation(half_band: f64, k: usize) -> f64 {
    let kappa = 1.0;
    let bath = discretize(&SpectralPreset::flat(0.0, kappa, half_band, k)).unwrap();
    let traj = integrate_aux(&bath, 3.0, Tolerances::default()).unwrap();
    (0..=300)
        .map(|i| {
            let t = 0.01 * i as f64;
            (traj.at(t).unwrap().g.norm() - (-kappa * t).exp()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn wide_flat_band_tracks_exponential_decay() {
    let devs: Vec<f64> = [(10.0, 200), (20.0, 400), (40.0, 800)].iter().map(|&(b, k)| tim_deviation(b, k)).collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    // The residual is the short-time quadratic onset, of order κ/W.
    for w in devs.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() <= 0.15, "{devs:?}");
    }
}

#[test]
fn flat_kernel_integrates_to_kappa() {
    let kappa = 0.5;
    let bath = discretize(&SpectralPreset::flat(0.0, kappa, 20.0, 400)).unwrap();
    // The discrete kernel recurs after 2π/ΔΩ; integrate over its first half.
    let period = 2.0 * std::f64::consts::PI / (40.0 * kappa / 400.0);
    let n = 20000;
    let h = 0.5 * period / n as f64;
    let integral: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * memory_kernel(&bath, i as f64 * h).re * h
        })
        .sum();
    assert!((integral - kappa).abs() < 0.05 * kappa, "{integral}");
    assert!(memory_kernel(&bath, 0.0).im == 0.0);
}

#[test]
fn markovian_rate_is_constant() {
    let traj = AuxTrajectory::markovian(0.7, 5.0).unwrap();
    for t in [0.0, 1.0, 4.9] {
        assert_eq!(gamma_rate(&traj, t).unwrap(), 0.7);
    }
    assert!(matches!(gamma_rate(&traj, 6.0), Err(Error::OutOfRange { .. })));
}
