//! Library functionals checked against slow, independent reimplementations.

use mirrorboost::linalg::least_squares;
use mirrorboost::prox::uniform;
use mirrorboost::{Matrix, ProxFunction, RegressionProblem, TrainingSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// `ln((1/m) Σ exp(−(Aλ)ᵢ))` summed naively, no shifting.
fn naive_loss(a: &Matrix, lambda: &[f64]) -> f64 {
    let m = a.rows();
    let s: f64 = (0..m)
        .map(|i| {
            let z: f64 = a.row(i).iter().zip(lambda).map(|(x, l)| x * l).sum();
            (-z).exp()
        })
        .sum();
    (s / m as f64).ln()
}

#[test]
fn loss_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    for _ in 0..50 {
        let m = rng.random_range(2..20);
        let n = rng.random_range(1..8);
        let ts = TrainingSet::from_feature_matrix(random_matrix(&mut rng, m, n, 1.0)).unwrap();
        let lambda: Vec<f64> = (0..ts.n()).map(|_| rng.random_range(0.0..2.0)).collect();
        let eval = ts.log_exp_loss(&lambda).unwrap();
        assert!((eval.value - naive_loss(ts.matrix(), &lambda)).abs() < 1e-12);
        for j in 0..ts.n() {
            let mut plus = lambda.clone();
            let mut minus = lambda.clone();
            plus[j] += h;
            minus[j] -= h;
            let fd = (naive_loss(ts.matrix(), &plus) - naive_loss(ts.matrix(), &minus)) / (2.0 * h);
            let g = eval.gradient[j];
            let rel = (fd - g).abs() / g.abs().max(1e-8);
            assert!(rel < 1e-6 || (fd - g).abs() < 1e-10, "j={j}: {fd} vs {g}");
        }
    }
}

/// Minimizes `α cᵀx + D(x, u)` over a grid on Δm (m = 2, 3) with spacing `step`.
fn grid_prox(c: &[f64], alpha: f64, step: f64) -> Vec<f64> {
    let m = c.len();
    let u = uniform(m);
    let count = (1.0 / step).round() as usize;
    let objective = |x: &[f64]| {
        let lin: f64 = c.iter().zip(x).map(|(a, b)| alpha * a * b).sum();
        lin + ProxFunction::Entropy.bregman(x, &u).unwrap()
    };
    let mut best = (f64::INFINITY, Vec::new());
    let mut consider = |x: Vec<f64>| {
        let v = objective(&x);
        if v < best.0 {
            best = (v, x);
        }
    };
    match m {
        2 => (0..=count).for_each(|a| {
            let a = a as f64 * step;
            consider(vec![a, 1.0 - a]);
        }),
        3 => {
            for a in 0..=count {
                for b in 0..=(count - a) {
                    let (x0, x1) = (a as f64 * step, b as f64 * step);
                    consider(vec![x0, x1, (1.0 - x0 - x1).max(0.0)]);
                }
            }
        }
        _ => unreachable!(),
    }
    best.1
}

#[test]
fn entropy_prox_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = 1e-3;
    for m in [2usize, 3] {
        for _ in 0..6 {
            let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let alpha = rng.random_range(0.1..3.0);
            let exact = ProxFunction::Entropy
                .prox_solve(&c, &uniform(m), alpha)
                .unwrap();
            let grid = grid_prox(&c, alpha, step);
            for (e, g) in exact.iter().zip(&grid) {
                assert!((e - g).abs() <= 2.0 * step, "{exact:?} vs {grid:?}");
            }
        }
    }
}

#[test]
fn grid_never_exceeds_entropy_diameter() {
    for m in [2usize, 3] {
        let u = uniform(m);
        let bound = ProxFunction::Entropy.diameter_bound(&u, None).unwrap();
        assert_eq!(bound, (m as f64).ln());
        let count = 1000;
        let mut worst = 0.0f64;
        for a in 0..=count {
            let x0 = a as f64 / count as f64;
            if m == 2 {
                worst = worst.max(ProxFunction::Entropy.bregman(&[x0, 1.0 - x0], &u).unwrap());
            } else {
                for b in 0..=(count - a) {
                    let x1 = b as f64 / count as f64;
                    let x = [x0, x1, (1.0 - x0 - x1).max(0.0)];
                    worst = worst.max(ProxFunction::Entropy.bregman(&x, &u).unwrap());
                }
            }
        }
        assert!(worst <= bound, "{worst} > {bound}");
        assert!(bound - worst < 1e-12, "vertices attain the bound");
    }
}

/// Modified Gram–Schmidt projection of `y` onto the column span of `x`.
fn gram_schmidt_projection(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..x.cols() {
        let mut v = x.column(j);
        let original: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for q in &basis {
            let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 * original.max(1.0) {
            basis.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut proj = vec![0.0; y.len()];
    for q in &basis {
        let d: f64 = q.iter().zip(y).map(|(a, b)| a * b).sum();
        proj.iter_mut().zip(q).for_each(|(p, b)| *p += d * b);
    }
    proj
}

#[test]
fn least_squares_norm_matches_gram_schmidt() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..30 {
        let n = rng.random_range(3..12);
        let p = rng.random_range(1..15);
        let mut x = random_matrix(&mut rng, n, p, 1.0);
        if trial % 3 == 0 && p >= 2 {
            // Duplicate a column to force rank deficiency.
            let c0 = x.column(0);
            let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
            cols[p - 1] = c0;
            x = Matrix::from_columns(&cols).unwrap();
        }
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let proj = gram_schmidt_projection(&x, &y);
        let expected = proj.iter().map(|a| a * a).sum::<f64>().sqrt();
        let fit = least_squares(&x, &y).unwrap();
        assert!(
            (fit.fitted_norm - expected).abs() < 1e-9,
            "{} vs {expected}",
            fit.fitted_norm
        );
        let rp = RegressionProblem::new(x, y).unwrap();
        assert!((rp.least_squares_norm().unwrap() - expected).abs() < 1e-9);
    }
}

#[test]
fn edge_and_margin_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let m = rng.random_range(2..10);
        let n = rng.random_range(1..6);
        let ts = TrainingSet::from_feature_matrix(random_matrix(&mut rng, m, n, 1.0)).unwrap();
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let a = ts.matrix();
        let mut best = (f64::NEG_INFINITY, 0);
        for j in 0..ts.n() {
            let e: f64 = (0..m).map(|i| w[i] * a.get(i, j)).sum();
            if e > best.0 {
                best = (e, j);
            }
        }
        assert_eq!(ts.weak_learner(&w).unwrap(), best.1);
        assert!((ts.edge(&w).unwrap() - best.0).abs() < 1e-14);
        assert!((ts.edge_linf(&w).unwrap() - best.0).abs() < 1e-14);

        let raw: Vec<f64> = (0..ts.n()).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let lambda: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let margin = (0..m)
            .map(|i| (0..ts.n()).map(|j| a.get(i, j) * lambda[j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert!((ts.margin(&lambda).unwrap() - margin).abs() < 1e-14);
    }
}

#[test]
fn correlation_scan_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let (n, p) = (rng.random_range(2..10), rng.random_range(1..8));
        let x = random_matrix(&mut rng, n, p, 2.0);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rp = RegressionProblem::new(x.clone(), r.clone()).unwrap();
        let expected = (0..p)
            .map(|j| (0..n).map(|i| x.get(i, j) * r[i]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        assert!((rp.correlation_objective(&r).unwrap() - expected).abs() < 1e-13);
        let op = (0..p)
            .map(|j| (0..n).map(|i| x.get(i, j).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        assert!((rp.operator_norm() - op).abs() < 1e-13);
    }
}

#[test]
fn loss_sandwich_on_normalized_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let m = rng.random_range(2..30);
        let n = rng.random_range(1..10);
        let ts = TrainingSet::from_feature_matrix(random_matrix(&mut rng, m, n, 1.0)).unwrap();
        let raw: Vec<f64> = (0..ts.n()).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let lambda: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let p = ts.margin(&lambda).unwrap();
        let l = ts.log_exp_loss(&lambda).unwrap().value;
        let ln_m = (m as f64).ln();
        assert!(
            -p - ln_m <= l + 1e-12 && l <= -p + 1e-12,
            "{} {l} {}",
            -p - ln_m,
            -p
        );
    }
}

fn simplex_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

proptest! {
    #[test]
    fn bregman_is_nonnegative_and_zero_on_diagonal(seed in any::<u64>(), m in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = simplex_point(&mut rng, m);
        let y = simplex_point(&mut rng, m);
        for prox in [ProxFunction::Entropy, ProxFunction::Euclidean] {
            prop_assert!(prox.bregman(&x, &y).unwrap() >= 0.0);
            prop_assert!(prox.bregman(&x, &x).unwrap() <= 1e-15);
        }
        // Strong convexity: D(x, y) ≥ ½‖x − y‖², in ℓ1 for entropy.
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let l1 = ProxFunction::Entropy.norm(&diff);
        prop_assert!(ProxFunction::Entropy.bregman(&x, &y).unwrap() + 1e-12 >= 0.5 * l1 * l1);
    }

    #[test]
    fn entropy_prox_beats_random_simplex_points(seed in any::<u64>(), m in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let anchor = simplex_point(&mut rng, m);
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let alpha = rng.random_range(0.0..4.0);
        let obj = |x: &[f64]| {
            alpha * c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                + ProxFunction::Entropy.bregman(x, &anchor).unwrap()
        };
        let sol = ProxFunction::Entropy.prox_solve(&c, &anchor, alpha).unwrap();
        prop_assert!((sol.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let best = obj(&sol);
        for _ in 0..50 {
            let z = simplex_point(&mut rng, m);
            prop_assert!(best <= obj(&z) + 1e-12);
        }
    }
}
