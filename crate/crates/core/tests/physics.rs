use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyllab_core::model::{
    bulk_bands, d_vector, open_chain_hamiltonian, weyl_points, ModelParams, SyntheticMomentum, WeylLabel,
};
use weyllab_core::numerics::{dot, eigh_tridiagonal, norm};
use weyllab_core::openchain::{
    arc_interval_oracle, density_profile, edge_spectrum, left_edge_state, solve_open_chain, symmetric_grid,
    Localization, ZERO_ENERGY_TOL,
};
use weyllab_core::spectroscopy::{
    max_stable_step, reflection, reflection_spectrum, steady_state, transient_from, transient_oracle,
    winding_measurement, DriveVector, WindingLoop,
};
use weyllab_core::topology::{
    berry_field_numeric, chern_mapped_torus, chern_sphere, linearized_curvature, numeric_flux_through_sphere,
};

fn params() -> ModelParams {
    ModelParams::default()
}

// ---------------------------------------------------------------- model

#[test]
fn bands_are_eigenvalues_of_bloch_matrix() {
    let p = params().with_delta0(0.37);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let k = SyntheticMomentum::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let h = d_vector(&k, &p).bloch_matrix();
        assert_eq!(h[0][1], h[1][0].conj());
        let tr = (h[0][0] + h[1][1]).re;
        let det = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).re;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let (lo, hi) = bulk_bands(&k, &p);
        assert!((lo - (tr / 2.0 - disc)).abs() < 1e-12);
        assert!((hi - (tr / 2.0 + disc)).abs() < 1e-12);
    }
}

#[test]
fn d_vector_is_periodic_and_kx_pi_shift_preserves_spectrum() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let k = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
        let base = d_vector(&SyntheticMomentum::from_array(k), &p);
        for axis in 0..3 {
            let mut shifted = k;
            shifted[axis] += 2.0 * PI;
            let d = d_vector(&SyntheticMomentum::from_array(shifted), &p);
            for (a, b) in base.h().iter().zip(d.h()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let half = d_vector(&SyntheticMomentum::new(k[0] + PI, k[1], k[2]), &p);
        assert!((half.hx + base.hx).abs() < 1e-12 && (half.hy + base.hy).abs() < 1e-12);
        assert!((half.hz - base.hz).abs() < 1e-12);
        let (a, b) = (
            bulk_bands(&SyntheticMomentum::from_array(k), &p),
            bulk_bands(&SyntheticMomentum::new(k[0] + PI, k[1], k[2]), &p),
        );
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }
}

#[test]
fn bulk_gap_is_open_away_from_weyl_points() {
    let p = params();
    let nodes: Vec<[f64; 3]> = WeylLabel::ALL
        .iter()
        .flat_map(|l| {
            let w = l.location().as_array();
            // Include the kx + π partners so the 2π-periodic grid is covered.
            [w, [w[0] - PI, w[1], w[2]]]
        })
        .collect();
    let n = 41;
    let mut min_split = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let k = [
                    -PI + 2.0 * PI * i as f64 / (n - 1) as f64,
                    -PI + 2.0 * PI * j as f64 / (n - 1) as f64,
                    -PI + 2.0 * PI * l as f64 / (n - 1) as f64,
                ];
                let near = nodes.iter().any(|w| {
                    let dist = (0..3)
                        .map(|a| {
                            let d = (k[a] - w[a]).rem_euclid(2.0 * PI);
                            d.min(2.0 * PI - d).powi(2)
                        })
                        .sum::<f64>()
                        .sqrt();
                    dist < 0.2
                });
                if !near {
                    let (lo, hi) = bulk_bands(&SyntheticMomentum::from_array(k), &p);
                    min_split = min_split.min(hi - lo);
                }
            }
        }
    }
    assert!(min_split > 0.0, "{min_split}");
}

#[test]
fn weyl_points_are_the_only_zeros_in_reduced_zone() {
    // Coarse search for local minima of |h| over kx ∈ (0, π].
    let p = params();
    let n = 40;
    let mut found = Vec::new();
    for i in 1..=n {
        let kx = PI * i as f64 / n as f64;
        for j in 0..2 * n {
            for l in 0..2 * n {
                let t1 = -PI + PI * j as f64 / n as f64;
                let t2 = -PI + PI * l as f64 / n as f64;
                if d_vector(&SyntheticMomentum::new(kx, t1, t2), &p).magnitude() < 1e-9 {
                    found.push((kx, t1, t2));
                }
            }
        }
    }
    assert_eq!(found.len(), 4, "{found:?}");
    for (kx, t1, t2) in found {
        assert!((kx - FRAC_PI_2).abs() < 1e-12);
        assert!((t1.abs() - FRAC_PI_2).abs() < 1e-12 && (t2.abs() - FRAC_PI_2).abs() < 1e-12);
    }
}

#[test]
fn chiral_symmetry_of_open_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [4, 7, 12, 20] {
        let p = params().with_n(n);
        for theta2 in [FRAC_PI_2, -FRAC_PI_2] {
            let t1 = rng.gen_range(-PI..PI);
            let e = eigh_tridiagonal(&open_chain_hamiltonian(t1, theta2, &p).unwrap())
                .unwrap()
                .values;
            for (a, b) in e.iter().zip(e.iter().rev()) {
                assert!((a + b).abs() < 1e-10);
            }
        }
    }
}

// ------------------------------------------------------------- topology

#[test]
fn sphere_charges_invariant_under_radius() {
    let p = params();
    for w in weyl_points(&p).unwrap() {
        let values: Vec<i64> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&r| chern_sphere(&w, r, 32, &p).unwrap().value)
            .collect();
        assert!(values.iter().all(|&v| v == w.chirality as i64), "{values:?}");
    }
}

#[test]
fn torus_and_sphere_agree_and_are_grid_independent() {
    let p = params();
    for w in weyl_points(&p).unwrap() {
        let c = chern_sphere(&w, 0.2, 32, &p).unwrap().value;
        for grid in [20, 40, 80] {
            let t = chern_mapped_torus(&w, 0.25 * PI, grid, &p).unwrap();
            assert_eq!(t.raw, 2 * c);
            assert_eq!(t.value, c);
        }
    }
}

#[test]
fn numeric_curvature_matches_linearized_field_near_nodes() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for w in weyl_points(&p).unwrap() {
        for _ in 0..5 {
            let dir = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let s = 0.03 / norm(dir);
            let q = [dir[0] * s, dir[1] * s, dir[2] * s];
            let exact = linearized_curvature(&w, q).unwrap();
            let numeric = berry_field_numeric(&w.location.offset(q), 1e-4, &p).unwrap().curvature;
            let err = norm([numeric[0] - exact[0], numeric[1] - exact[1], numeric[2] - exact[2]]);
            assert!(err < 0.05 * norm(exact), "{numeric:?} vs {exact:?}");
        }
    }
}

#[test]
fn numeric_flux_through_small_sphere_is_quantized() {
    let p = params();
    for w in weyl_points(&p).unwrap() {
        let flux = numeric_flux_through_sphere(&w.location, 0.1, 24, 1e-4, &p).unwrap();
        assert!((flux - w.chirality as f64).abs() < 0.02, "{flux}");
        // Sign of the flux agrees with the radial component of the field.
        let q = [0.0, 0.0, 0.05];
        let f = berry_field_numeric(&w.location.offset(q), 1e-4, &p).unwrap();
        assert_eq!(dot(f.curvature, q).signum(), w.chirality as f64);
    }
}

// ------------------------------------------------------------ openchain

#[test]
fn arc_center_hosts_left_and_right_zero_modes() {
    let p = params().with_n(20);
    let pts = edge_spectrum(&[0.0], &[FRAC_PI_2], &p).unwrap();
    let pt = &pts[0];
    let zero: Vec<_> = (0..pt.eigenvalues.len())
        .filter(|&i| pt.eigenvalues[i].abs() < ZERO_ENERGY_TOL)
        .collect();
    assert_eq!(zero.len(), 2);
    let mut labels: Vec<_> = zero.iter().map(|&i| pt.labels[i]).collect();
    labels.sort_by_key(|l| *l as u8);
    assert_eq!(labels, vec![Localization::Left, Localization::Right]);
}

#[test]
fn gapped_line_has_no_zero_edge_modes() {
    let p = params().with_n(20);
    let pt = &edge_spectrum(&[0.0], &[0.0], &p).unwrap()[0];
    assert_eq!(pt.zero_edge_modes(0.5).count(), 0);
}

#[test]
fn spectrum_even_in_theta1() {
    let p = params().with_n(12);
    let grid = [0.1, 0.7, 1.3, 2.9];
    let neg: Vec<f64> = grid.iter().map(|t| -t).collect();
    let a = edge_spectrum(&grid, &[0.4, FRAC_PI_2], &p).unwrap();
    let b = edge_spectrum(&neg, &[0.4, FRAC_PI_2], &p).unwrap();
    for (x, y) in a.iter().zip(&b) {
        for (e1, e2) in x.eigenvalues.iter().zip(&y.eigenvalues) {
            assert!((e1 - e2).abs() < 1e-12);
        }
    }
}

#[test]
fn edge_spectrum_order_follows_grid() {
    let p = params().with_n(6);
    let t1 = [0.3, -0.1, 0.2];
    let t2 = [1.0, -0.5];
    let pts = edge_spectrum(&t1, &t2, &p).unwrap();
    let order: Vec<(f64, f64)> = pts.iter().map(|p| (p.theta1, p.theta2)).collect();
    let expect: Vec<(f64, f64)> = t1.iter().flat_map(|a| t2.iter().map(move |b| (*a, *b))).collect();
    assert_eq!(order, expect);
    for pt in &pts {
        for v in &pt.states {
            assert!((density_profile(v).total() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn edge_state_spreads_toward_weyl_projection() {
    let p = params().with_n(20);
    let weights: Vec<f64> = [0.0, 0.2, 0.35, 0.45]
        .iter()
        .map(|t| density_profile(&left_edge_state(t * PI, FRAC_PI_2, &p).unwrap()).first_cell())
        .collect();
    assert!((weights[0] - 1.0).abs() < 1e-12);
    assert!(weights.windows(2).all(|w| w[1] < w[0]), "{weights:?}");
}

#[test]
fn arc_endpoints_grow_with_lattice_size() {
    let grid = symmetric_grid(0.5 * PI, 0.01 * PI).unwrap();
    let mut prev = 0.0;
    for n in [4, 6, 8, 12, 20, 36] {
        let arc = arc_interval_oracle(FRAC_PI_2, &grid, ZERO_ENERGY_TOL, &params().with_n(n)).unwrap();
        let (lo, hi) = arc.endpoints.unwrap();
        assert!((lo + hi).abs() < 1e-12);
        assert!(hi >= prev, "N={n}: {hi} < {prev}");
        prev = hi;
    }
}

#[test]
fn zero_mode_splitting_shrinks_with_size() {
    let e = |n: usize, t1: f64| {
        let pt = solve_open_chain(t1, FRAC_PI_2, ZERO_ENERGY_TOL, &params().with_n(n)).unwrap();
        pt.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()))
    };
    assert!(e(12, 0.0) <= e(4, 0.0));
    assert!(e(12, 0.1 * PI) < e(4, 0.1 * PI));
}

// --------------------------------------------------------- spectroscopy

#[test]
fn reflection_is_drive_independent() {
    let p = params().with_n(8);
    let (t1, t2) = (0.4, 1.2);
    let r = reflection(t1, t2, &p).unwrap();
    for omega in [Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.5)] {
        let ss = steady_state(t1, t2, &DriveVector::left_edge(8, omega), &p).unwrap();
        // a_out/a_in with √κ a_in = iΩ and a_out = a_in + √κ a1.
        let via_drive = 1.0 + p.kappa * ss.amplitudes[0] / (Complex64::i() * omega);
        assert!((via_drive - r).norm() < 1e-12);
    }
}

#[test]
fn steady_state_is_linear_in_drive() {
    let p = params().with_n(10);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let drive = DriveVector::new((0..10).map(|_| Complex64::new(rng.gen(), rng.gen())).collect()).unwrap();
    let a = steady_state(0.2, 0.9, &drive, &p).unwrap();
    let b = steady_state(0.2, 0.9, &drive.scaled(Complex64::new(2.0, 0.0)), &p).unwrap();
    for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
        assert!((2.0 * x - y).norm() < 1e-12);
    }
    assert!(a.residual < 1e-10);
}

#[test]
fn transient_relaxes_at_half_kappa() {
    // Uniform damping: ā(t) − ā_ss = −e^{−i(Δ0+T)t} e^{−κt/2} ā_ss, so the
    // deviation norm is exactly e^{−κt/2}‖ā_ss‖.
    for (n, kappa) in [(4, 0.1), (12, 0.7)] {
        let p = params().with_n(n).with_kappa(kappa);
        let drive = DriveVector::left_edge(n, Complex64::new(1.0, 0.0));
        let ss = steady_state(0.3, FRAC_PI_2, &drive, &p).unwrap().amplitudes;
        let ss_norm = ss.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for t_end in [20.0 / kappa, 2.0 * 1e6f64.ln() / kappa] {
            let a = transient_oracle(0.3, FRAC_PI_2, &drive, &p, t_end, max_stable_step(&p)).unwrap();
            let dev = a.iter().zip(&ss).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() / ss_norm;
            let expect = (-kappa * t_end / 2.0).exp();
            assert!(
                (dev / expect - 1.0).abs() < 1e-4,
                "N={n} κ={kappa} t={t_end}: {dev} vs {expect}"
            );
        }
    }
}

#[test]
fn undamped_evolution_conserves_norm() {
    let p = params().with_n(8).with_kappa(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a0: Vec<Complex64> = (0..8)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let a = transient_from(&a0, 0.6, 0.3, &DriveVector::zeros(8), &p, 10.0, max_stable_step(&p)).unwrap();
    let n0: f64 = a0.iter().map(|z| z.norm_sqr()).sum();
    let n1: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    assert!(((n1 / n0).sqrt() - 1.0).abs() < 1e-8);
}

#[test]
fn halving_the_step_is_converged() {
    let p = params().with_n(6).with_kappa(0.7);
    let drive = DriveVector::left_edge(6, Complex64::new(1.0, 0.0));
    let dt = max_stable_step(&p);
    let t = 20.0 / p.kappa;
    let a = transient_oracle(0.2, 0.4, &drive, &p, t, dt).unwrap();
    let b = transient_oracle(0.2, 0.4, &drive, &p, t, dt / 2.0).unwrap();
    let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(num / den <= 1e-8, "{}", num / den);
}

#[test]
fn far_detuning_and_weak_damping_limits() {
    let p = params().with_n(6).with_delta0(0.37);
    for kappa in [1e-6, 1e-9] {
        let r = reflection(0.2, 0.3, &p.with_kappa(kappa)).unwrap();
        assert!((r - 1.0).norm() < 1e-4);
    }
    let r = reflection(0.2, 0.3, &p.with_delta0(1e4)).unwrap();
    assert!((r - 1.0).norm() < 1e-4);
}

#[test]
fn winding_signs_follow_chirality() {
    let p = params().with_n(12);
    for (label, w) in WeylLabel::ALL.iter().zip(weyl_points(&p).unwrap()) {
        let m = winding_measurement(&w, &WindingLoop::default(), &p).unwrap();
        assert_eq!(m.winding, w.chirality as i64, "{label}");
    }
}

#[test]
fn winding_invariant_under_loop_choices() {
    let p = params().with_n(12);
    let w = weyl_points(&p).unwrap()[0];
    let base = winding_measurement(&w, &WindingLoop::default(), &p).unwrap().winding;
    for theta_r in [0.2 * PI, 0.3 * PI] {
        for samples in [64, 256] {
            for start in [0.0, 1.3] {
                let lp = WindingLoop {
                    theta_r,
                    samples,
                    start,
                };
                assert_eq!(winding_measurement(&w, &lp, &p).unwrap().winding, base);
            }
        }
    }
    let coarse = WindingLoop {
        samples: 32,
        ..WindingLoop::default()
    };
    assert!(winding_measurement(&w, &coarse, &p).is_err());
}

#[test]
fn emission_spectrum_shapes() {
    let p = params().with_n(4).with_kappa(0.1);
    let grid = symmetric_grid(1.0, 0.01).unwrap();
    let center = grid.len() / 2;

    let inside = reflection_spectrum(0.0, FRAC_PI_2, &grid, &p).unwrap().emission();
    let argmax = (0..grid.len())
        .max_by(|&a, &b| inside[a].total_cmp(&inside[b]))
        .unwrap();
    assert_eq!(argmax, center);
    assert!(inside[center] > inside[center - 1] && inside[center] > inside[center + 1]);

    let outside = reflection_spectrum(0.4 * PI, FRAC_PI_2, &grid, &p).unwrap().emission();
    let peaks: Vec<usize> = (1..grid.len() - 1)
        .filter(|&i| outside[i] > outside[i - 1] && outside[i] > outside[i + 1])
        .collect();
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!((grid[peaks[0]] + grid[peaks[1]]).abs() < 1e-9);
    assert!(!peaks.contains(&center));

    let mirrored = reflection_spectrum(-0.4 * PI, FRAC_PI_2, &grid, &p).unwrap();
    let direct = reflection_spectrum(0.4 * PI, FRAC_PI_2, &grid, &p).unwrap();
    for (a, b) in mirrored.reflectance().iter().zip(direct.reflectance()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn zero_energy_peak_fades_toward_weyl_projection() {
    let p = params().with_n(4).with_kappa(0.1);
    let heights: Vec<f64> = [0.0, 0.1 * PI, 0.15 * PI]
        .iter()
        .map(|&t1| reflection_spectrum(t1, FRAC_PI_2, &[0.0], &p).unwrap().emission()[0])
        .collect();
    assert!(heights.windows(2).all(|w| w[1] < w[0]), "{heights:?}");
}
