use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vsperc_core::spectral::*;
use vsperc_core::{Level, TreeParams};

fn d2() -> TreeParams {
    TreeParams::new(2).unwrap()
}

/// Largest eigenvalue and its eigenvector from a full dense decomposition.
fn dense_top(op: &DiscreteOperator) -> (f64, Vec<f64>) {
    let n = op.dim();
    let m = DMatrix::from_row_slice(n, n, &op.matrix);
    let eig = SymmetricEigen::new(m);
    let (i, lam) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    (lam, eig.eigenvectors.column(i).iter().copied().collect())
}

#[test]
fn power_iteration_matches_dense_eigensolver() {
    let p = d2();
    let o = SpectralOptions::default();
    for h in [-1.0, 0.0, 0.3, 0.6, 1.5] {
        let op = discretize(h, &p, &o).unwrap();
        let pair = top_eigenpair_from(&op, o.eig_tol, &op.sqrt_weights, o.max_iter).unwrap();
        let (lam, vec) = dense_top(&op);
        assert!((pair.lambda - lam).abs() < 1e-10, "h={h}: {} vs {lam}", pair.lambda);
        // Perron vector has one sign
        let pos = vec.iter().filter(|x| **x > 0.0).count();
        assert!(pos == 0 || pos == vec.len(), "h={h}");

        let fine = discretize(h, &p, &o.with_node_count(2 * o.grid.node_count)).unwrap();
        let (lam2, _) = dense_top(&fine);
        assert!((lambda_h(h, &p, &o).unwrap() - lam2).abs() < 1e-8, "h={h}");
    }
}

#[test]
fn perron_limit_is_independent_of_start() {
    let p = d2();
    let o = SpectralOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in [0.0, 0.5] {
        let op = discretize(h, &p, &o).unwrap();
        let base = top_eigenpair(&op, o.eig_tol).unwrap().lambda;
        for _ in 0..2 {
            let start: Vec<f64> = (0..op.dim()).map(|_| rng.random::<f64>() + 1e-3).collect();
            let lam = top_eigenpair_from(&op, o.eig_tol, &start, o.max_iter).unwrap().lambda;
            assert!((lam - base).abs() < 1e-10, "h={h}: {lam} vs {base}");
        }
    }
}

#[test]
fn eigenpair_contracts() {
    let p = d2();
    let o = SpectralOptions::default();
    let mut prev = f64::INFINITY;
    for i in 0..=16 {
        let h = -2.0 + 0.25 * f64::from(i);
        let pair = eigenpair(h, &p, &o).unwrap();
        let fine = eigenpair(h, &p, &o.with_node_count(2 * o.grid.node_count)).unwrap();
        assert!((pair.lambda - fine.lambda).abs() < 1e-8, "h={h}");
        assert!(pair.lambda > 0.0 && pair.lambda < 2.0);
        assert!(pair.lambda < prev);
        prev = pair.lambda;
        assert!(pair.chi.iter().all(|c| *c >= 0.0));
        let op = discretize(h, &p, &o).unwrap();
        let norm2 = op.grid.inner(&pair.chi, &pair.chi);
        assert!((norm2 - 1.0).abs() < 1e-10, "h={h}: {norm2}");
        assert!(pair.residual <= 1e-10);
    }
}

#[test]
fn limits_and_monotonicity() {
    let p = d2();
    let o = SpectralOptions::default();
    let left = lambda_h(o.untruncated_height(&p), &p, &o).unwrap();
    assert!((left - 2.0).abs() < 1e-6);
    let l: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&h| lambda_h(h, &p, &o).unwrap()).collect();
    assert!(l[0] > l[1] && l[1] > l[2]);
}

#[test]
fn critical_height_contracts() {
    let p = d2();
    let o = SpectralOptions::default();
    let hs = solve_h_star(&p, &o, 1e-10).unwrap();
    assert!(hs.h_star > 0.0 && hs.h_star < (2.0 * p.u_star()).sqrt());
    assert!((lambda_h(hs.h_star, &p, &o).unwrap() - 1.0).abs() < 1e-8);

    let ca0 = critical_a(Level::ZERO, &p, &o, 1e-12).unwrap().unwrap();
    assert!((ca0 - hs.h_star).abs() < 1e-8);

    let lam0 = lambda_h(0.0, &p, &o).unwrap();
    let u0 = lam0.ln() / p.decay_exponent();
    assert!(u0 > 0.0 && u0 < p.u_star());
    let at_u0 = critical_a(Level::new(u0).unwrap(), &p, &o, 1e-12).unwrap().unwrap();
    assert!(at_u0.abs() < 1e-6, "{at_u0}");
    assert!((critical_u_at(0.0, &p, &o).unwrap().unwrap() - u0).abs() < 1e-12);

    for i in 0..=6 {
        let u = Level::new(u0 * f64::from(i) / 6.0).unwrap();
        let a = critical_a(u, &p, &o, 1e-12).unwrap().unwrap();
        assert!((lambda_ua(u, a, &p, &o).unwrap() - 1.0).abs() < 1e-8, "u={}", u.get());
    }
    for u in [p.u_star(), 1.5 * p.u_star()] {
        assert_eq!(critical_a(Level::new(u).unwrap(), &p, &o, 1e-12).unwrap(), None);
    }
}

#[test]
fn lambda_ua_is_decreasing_on_a_grid() {
    let p = d2();
    let o = SpectralOptions::default();
    let lam_a: Vec<f64> = (0..10).map(|j| lambda_h(-1.0 + 0.3 * j as f64, &p, &o).unwrap()).collect();
    for i in 0..10 {
        let u = Level::new(0.15 * i as f64).unwrap();
        for (j, &lam) in lam_a.iter().enumerate() {
            let a = -1.0 + 0.3 * j as f64;
            let v = lambda_ua(u, a, &p, &o).unwrap();
            assert!((v - lam * (-u.get() * p.decay_exponent()).exp()).abs() < 1e-9);
            if i > 0 {
                let up = lambda_ua(Level::new(0.15 * (i - 1) as f64).unwrap(), a, &p, &o).unwrap();
                assert!(v < up);
            }
            if j > 0 {
                assert!(v < lambda_ua(u, a - 0.3, &p, &o).unwrap());
            }
        }
    }
    let at_ustar = lambda_ua(Level::new(p.u_star()).unwrap(), 0.0, &p, &o).unwrap();
    let lam0 = lambda_h(0.0, &p, &o).unwrap();
    assert!((at_ustar - lam0 / 2.0).abs() < 1e-12);
    assert!(at_ustar < 1.0);
    for a in [-1.0, 0.0, 1.0] {
        assert_eq!(lambda_ua(Level::ZERO, a, &p, &o).unwrap(), lambda_h(a, &p, &o).unwrap());
    }
}

#[test]
fn two_point_prediction_bracket() {
    let p = d2();
    let o = SpectralOptions::default();
    let a = 0.3;
    let lam = lambda_h(a, &p, &o).unwrap();
    let op = discretize(a, &p, &o).unwrap();
    let pair = eigenpair(a, &p, &o).unwrap();
    let ones = vec![1.0; pair.chi.len()];
    let overlap = op.grid.inner(&ones, &pair.chi).powi(2);
    for n in [4u32, 8, 12] {
        let v = two_point_prediction(a, n, &p, &o).unwrap();
        let r = (lam / 2.0).powi(n as i32);
        assert!(v >= overlap * r * (1.0 - 1e-9), "n={n}");
        assert!(v <= r, "n={n}");
    }
    assert!((two_point_prediction(a, 0, &p, &o).unwrap() - p.nu_tail(a)).abs() < 1e-12);
    let free = o.untruncated_height(&p);
    for n in [1, 5, 20] {
        assert!((two_point_prediction(free, n, &p, &o).unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn two_point_root_approaches_rate() {
    let p = d2();
    let o = SpectralOptions::default();
    let a = 0.3;
    let rate = lambda_h(a, &p, &o).unwrap() / 2.0;
    let values: Vec<f64> = (1..=65).map(|n| two_point_prediction(a, n, &p, &o).unwrap()).collect();
    let roots: Vec<f64> = values.iter().zip(1..).map(|(v, n)| v.powf(1.0 / f64::from(n))).collect();
    assert!(roots.windows(2).all(|w| w[1] >= w[0]));
    assert!(roots.iter().all(|r| *r <= rate + 1e-12));
    let ratio = values[64] / values[63];
    assert!((ratio - rate).abs() < 1e-4, "{ratio} vs {rate}");
}

#[test]
fn eigenvalue_gap_positive_and_stable() {
    let p = d2();
    let o = SpectralOptions::default();
    let fine = o.with_node_count(2 * o.grid.node_count);
    for i in 0..=8 {
        for j in 1..=8 {
            let (a, rho) = (0.25 * f64::from(i), 0.25 * f64::from(j));
            let gap = check_thm21(a, rho, &p, &o).unwrap();
            assert!(gap > 1e-7, "a={a} rho={rho}: {gap}");
            if (a, rho) == (0.0, 1.0) || (a, rho) == (0.5, 0.5) {
                let g2 = check_thm21(a, rho, &p, &fine).unwrap();
                assert!((gap - g2).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn v_function_contracts() {
    let p = d2();
    let (a, rho) = (0.0, 1.0);
    let pv = p.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho).unwrap()).p;
    for b in [-3.0, -0.5, 0.0] {
        assert_eq!(v_function(b, a, rho, &p).unwrap(), 1.0);
    }
    let mut prev = 1.0;
    for i in 1..=40 {
        let b = 0.1 * f64::from(i);
        let v = v_function(b, a, rho, &p).unwrap();
        assert!(v > pv && v <= 1.0);
        assert!(v < prev, "b={b}");
        prev = v;
    }
}

#[test]
fn lambda_tilde_inequalities() {
    let p = d2();
    let o = SpectralOptions::default();
    for (a, rho) in [(0.0, 1.0), (0.5, 0.5), (1.0, 0.5)] {
        let lt = lambda_tilde(a, rho, &p, &o).unwrap().lambda;
        let la = lambda_h(a, &p, &o).unwrap();
        let pv = p.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho).unwrap()).p;
        assert!(lt < la);
        assert!(lambda_h(a + rho, &p, &o).unwrap() <= lt * pv);
    }
    let lt = lambda_tilde(0.5, 1e-4, &p, &o).unwrap().lambda;
    assert!((lt - lambda_h(0.5, &p, &o).unwrap()).abs() < 1e-3);
}

#[test]
fn parabola_arcs() {
    let p = d2();
    let o = SpectralOptions::default();
    let kappa = p.decay_exponent();
    let lam0 = lambda_h(0.0, &p, &o).unwrap();
    let hs = solve_h_star(&p, &o, 1e-10).unwrap().h_star;
    for h in [0.5, hs, 1.2, (2.0 * p.u_star()).sqrt()] {
        let scan = parabola_scan(h, 12, &p, &o).unwrap();
        let first = scan.points.first().unwrap();
        let last = scan.points.last().unwrap();
        assert!((first.lambda - lambda_h(h, &p, &o).unwrap()).abs() < 1e-12);
        assert!((last.lambda - lam0 * (-0.5 * h * h * kappa).exp()).abs() < 1e-8);
        assert!(scan.strictly_increasing(1e-9), "h={h}");
    }
    let at_hs = parabola_scan(hs, 12, &p, &o).unwrap();
    assert!((at_hs.points[0].lambda - 1.0).abs() < 1e-8);
    let outer = parabola_scan((2.0 * p.u_star()).sqrt(), 12, &p, &o).unwrap();
    assert!((outer.points.last().unwrap().lambda - lam0 / 2.0).abs() < 1e-9);
    assert!(outer.points.iter().all(|pt| pt.lambda < 1.0));
}

#[test]
fn second_moment_contracts() {
    let p = d2();
    let o = SpectralOptions::default();
    let u = Level::new(0.05).unwrap();
    let sm = second_moment_bound(u, 0.2, &p, &o).unwrap();
    assert!(sm.lambda_ua > 1.0);
    assert!(sm.bound > 0.0 && sm.bound < 1.0);
    assert!(sm.a_const <= 1.5 * p.vacancy_probs(u).p0);
    let err = second_moment_bound(Level::new(1.0).unwrap(), 0.5, &p, &o).unwrap_err();
    assert!(matches!(err, vsperc_core::Error::Precondition(_)), "{err}");
}
