// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_dilation::dilation::{covariance_from_point, integrate_aux, AuxPoint, AuxTrajectory, BathMode, BathSpec};
use wigner_dilation::gaussian::{marginal, mutual_information, relative_entropy, vacuum_state, wigner_entropy};
use wigner_dilation::ode::Tolerances;
use wigner_dilation::oracle::{derivative, STEP};
use wigner_dilation::production::*;
use wigner_dilation::{Error, LinearCurrent, SystemInit, C64};

fn random_init(rng: &mut ChaCha8Rng) -> SystemInit {
    SystemInit::from_squeezed_thermal(
        C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)),
        rng.random_range(0.0..3.0),
        rng.random_range(0.0..0.9),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
    .unwrap()
}

fn random_bath(rng: &mut ChaCha8Rng, k: usize) -> BathSpec {
    let modes = (0..k)
        .map(|_| BathMode { frequency: rng.random_range(-1.5..1.5), coupling: rng.random_range(0.1..0.6) })
        .collect();
    BathSpec::new(rng.random_range(-0.5..0.5), modes).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Relative entropies and mutual information evaluated directly on the
/// assembled covariance matrices.
struct Direct {
    srel_s: f64,
    srel_e: f64,
    i_se: f64,
    s_ws: f64,
}

fn direct(init: &SystemInit, p: &AuxPoint) -> Direct {
    let joint = covariance_from_point(init, p).unwrap();
    let k = p.n_bath();
    let bath: Vec<usize> = (1..=k).collect();
    let sys = marginal(&joint, &[0]).unwrap();
    let env = marginal(&joint, &bath).unwrap();
    Direct {
        srel_s: relative_entropy(&sys, &vacuum_state(1)).unwrap(),
        srel_e: relative_entropy(&env, &vacuum_state(k)).unwrap(),
        i_se: mutual_information(&joint, &[0], &bath).unwrap(),
        s_ws: wigner_entropy(&sys).unwrap(),
    }
}

fn fd(traj: &AuxTrajectory, t: f64, q: impl Fn(&AuxPoint) -> f64) -> f64 {
    let sampler = traj.local(t, 16.0 * STEP);
    derivative(|tau| Ok(q(&sampler.at(tau)?)), t, STEP, 0.0, traj.t_max()).unwrap()
}

#[test]
fn closed_forms_match_direct_entropies() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let init = random_init(&mut rng);
        let bath = random_bath(&mut rng, 3);
        let traj = integrate_aux(&bath, 5.0, Tolerances { rtol: 1e-12, atol: 1e-15 }).unwrap();
        let p = traj.at(rng.random_range(0.0..5.0)).unwrap();
        let x = p.abs_g2();
        let d = direct(&init, &p);
        assert!((srel_s_vac(&init, x) - d.srel_s).abs() < 1e-9);
        assert!((srel_e_init(&init, x) - d.srel_e).abs() < 1e-9);
        assert!((mutual_info_se(&init, x) - d.i_se).abs() < 1e-9);
        assert!((system_entropy(&init, x) - d.s_ws).abs() < 1e-9);
    }
}

#[test]
fn three_pathways_agree_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut current_checks = 0;
    for draw in 0..50 {
        let init = random_init(&mut rng);
        let k = [1, 3, 8][draw % 3];
        let bath = random_bath(&mut rng, k);
        let t_max = 4.0;
        let traj = integrate_aux(&bath, t_max, Tolerances::default()).unwrap();
        let t = rng.random_range(0.05..t_max);
        let p = traj.at(t).unwrap();
        let pi = production_rate(&init, &p);
        let env = env_production_rate(&init, &p);
        let di = mutual_info_rate(&init, &p);

        let fd_pi = -fd(&traj, t, |q| direct(&init, q).srel_s);
        let fd_env = fd(&traj, t, |q| direct(&init, q).srel_e);
        let fd_di = fd(&traj, t, |q| direct(&init, q).i_se);
        assert!(rel(pi, fd_pi) <= 1e-6, "draw {draw}: Pi {pi} vs {fd_pi}");
        assert!(rel(env, fd_env) <= 1e-6, "draw {draw}: env {env} vs {fd_env}");
        assert!(rel(di, fd_di) <= 1e-6, "draw {draw}: dI {di} vs {fd_di}");

        let eps = eps_gamma(&traj);
        match current_integral_s(&init, &p, eps) {
            Ok(v) => {
                current_checks += 1;
                assert!(rel(v, pi) <= 1e-8, "draw {draw}");
                assert!(rel(current_integral_e(&init, &p, eps).unwrap(), env) <= 1e-8, "draw {draw}");
                assert!(rel(mutual_info_rate_currents(&init, &p, eps).unwrap(), di) <= 1e-8, "draw {draw}");
            }
            Err(Error::VanishingGamma { .. } | Error::VanishingG { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(current_checks >= 45);
}

fn assert_same(a: &LinearCurrent, b: &LinearCurrent, tol: f64) {
    let scale = b.l.norm().max(b.d.norm()).max(1.0);
    assert!((a.d - b.d).norm() <= tol * scale, "d: {} vs {}", a.d, b.d);
    assert!((&a.l - &b.l).norm() <= tol * scale, "l: {} vs {}", a.l, b.l);
}

#[test]
fn global_currents_marginalize_to_reduced_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let init = random_init(&mut rng);
        let bath = random_bath(&mut rng, 3);
        let traj = integrate_aux(&bath, 4.0, Tolerances::default()).unwrap();
        let p = traj.at(rng.random_range(0.1..4.0)).unwrap();
        let s = global_current_s(&init, &p).unwrap().marginalize(&[0]).unwrap();
        assert_same(&s, &current_s_full(&init, &p).unwrap(), 1e-9);
        let e = global_current_e(&init, &p).unwrap().marginalize(&[1, 2, 3]).unwrap();
        assert_same(&e, &current_e_full(&init, &p).unwrap(), 1e-9);
    }
}

#[test]
fn dissipative_part_of_full_current() {
    // With Γ real, Re of the system rate −ġ/g is Γ; only the Lamb shift differs.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let init = random_init(&mut rng);
    let bath = random_bath(&mut rng, 3);
    let traj = integrate_aux(&bath, 3.0, Tolerances::default()).unwrap();
    let p = traj.at(1.3).unwrap();
    let rate = -p.gdot / p.g;
    let full = current_s_full(&init, &p).unwrap();
    let dissipative = current_s(&init, &p).unwrap();
    assert_same(&full.scaled(C64::new(p.gamma.unwrap(), 0.0) / rate), &dissipative, 1e-12);
}

#[test]
fn mode_currents_follow_mode_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let init = random_init(&mut rng);
    let bath = random_bath(&mut rng, 4);
    let traj = integrate_aux(&bath, 3.0, Tolerances::default()).unwrap();
    let p = traj.at(2.1).unwrap();
    let modes = mode_currents(&init, &p).unwrap();
    let collective = current_e_full(&init, &p).unwrap();
    let fdot = p.fdot.clone().unwrap();
    // Weighting mode k by f_k* collapses the split onto a multiple of the collective current.
    let weight: C64 = fdot.iter().zip(p.f.iter()).map(|(fd, f)| -fd / p.gdot * f.conj()).sum();
    let total = modes.iter().zip(p.f.iter()).fold(LinearCurrent::zero(collective.state.clone()), |acc, (m, f)| {
        LinearCurrent { d: acc.d + m.d * f.conj(), l: &acc.l + &m.l * f.conj(), state: acc.state }
    });
    assert_same(&total, &collective.scaled(weight), 1e-12);
    // d/dt of the norm identity: Re Σ ḟ_k f_k* = −Re ġ g*.
    assert!(((weight * p.gdot).re - (p.gdot * p.g.conj()).re).abs() < 1e-9);
}

#[test]
fn conservation_over_k5_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4 {
        let init = random_init(&mut rng);
        let bath = random_bath(&mut rng, 5);
        let traj = integrate_aux(&bath, 6.0, Tolerances::default()).unwrap();
        let grid: Vec<f64> = (0..=30).map(|i| 0.2 * i as f64).collect();
        assert!(conservation_check(&init, &traj, &grid).unwrap() <= 1e-6);
    }
}

#[test]
fn coherent_state_carries_no_correlations() {
    let init = SystemInit::coherent(C64::new(2.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bath = random_bath(&mut rng, 3);
    let traj = integrate_aux(&bath, 5.0, Tolerances::default()).unwrap();
    for p in traj.points() {
        let x = p.abs_g2();
        assert!(mutual_info_se(&init, x).abs() <= 1e-10);
        let four_loss = 4.0 * p.loss() * 4.0;
        assert!((production_rate(&init, p) - four_loss).abs() <= 1e-8);
        assert!((env_production_rate(&init, p) - four_loss).abs() <= 1e-8);
    }
}

#[test]
fn markovian_relative_entropies_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let init = random_init(&mut rng);
        let traj = AuxTrajectory::markovian(rng.random_range(0.2..2.0), 4.0).unwrap();
        let vals: Vec<(f64, f64)> = (0..=200)
            .map(|i| traj.at(0.02 * i as f64).unwrap())
            .map(|p| (srel_s_vac(&init, p.abs_g2()), srel_e_init(&init, p.abs_g2())))
            .collect();
        assert!(vals.windows(2).all(|w| w[1].0 <= w[0].0 + 1e-12));
        assert!(vals.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12));
        for i in [1, 50, 199] {
            let p = traj.at(0.02 * i as f64).unwrap();
            assert!(production_rate(&init, &p) >= 0.0);
            assert!(env_production_rate(&init, &p) >= 0.0);
        }
    }
}

#[test]
fn spot_values_at_half_transfer() {
    // N = 1, μ = M = 0, |g|² = ½ on a Markovian trajectory.
    let kappa = 0.8;
    let t = std::f64::consts::LN_2 / (2.0 * kappa);
    let traj = AuxTrajectory::markovian(kappa, 2.0).unwrap();
    let p = traj.at(t).unwrap();
    let init = SystemInit::thermal(1.0).unwrap();
    let gamma = kappa;
    let fd_pi = -fd(&traj, t, |q| srel_s_vac(&init, q.abs_g2()));
    let fd_env = fd(&traj, t, |q| srel_e_init(&init, q.abs_g2()));
    let fd_di = fd(&traj, t, |q| mutual_info_se(&init, q.abs_g2()));
    let fd_ws = fd(&traj, t, |q| system_entropy(&init, q.abs_g2()));
    let fd_ias = fd(&traj, t, |q| ancilla_mutual_info(1.0, q.abs_g2()));
    for (v, want) in [(fd_pi, gamma), (fd_env, gamma), (fd_ws - fd_pi, -2.0 * gamma), (fd_ias, -2.0 * gamma)] {
        assert!(rel(v, want) <= 1e-6, "{v} vs {want}");
    }
    assert!(fd_di.abs() <= 1e-6);
    assert!(rel(production_rate(&init, &p), gamma) <= 1e-12);
    assert!(rel(env_production_rate(&init, &p), gamma) <= 1e-12);
    assert!(mutual_info_rate(&init, &p).abs() <= 1e-12);
    assert!(rel(entropy_flux(&init, &p), -2.0 * gamma) <= 1e-12);
    assert!(rel(ancilla_rate(1.0, &p), -2.0 * gamma) <= 1e-12);
}
