use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vpatch::contours::EllipseSpec;
use vpatch::inverse::fit_affine_gamma_plus;
use vpatch::rotation::{confocal_outer, flierl_polvani, FlierlPolvaniParams};
use vpatch::solver::*;

const K: usize = 24;

fn inner() -> EllipseSpec {
    EllipseSpec::centered(3.0, 1.0).unwrap()
}

fn exact(alpha: f64, k_max: usize) -> (OuterAnsatz, FlierlPolvaniParams) {
    let fp = flierl_polvani(inner().q(), alpha).unwrap();
    let outer = confocal_outer(&inner(), fp.q1).unwrap();
    (OuterAnsatz::from_ellipse(&inner(), &outer, k_max, fp.omega_minus).unwrap(), fp)
}

fn coefficient_error(a: &OuterAnsatz, b: &OuterAnsatz) -> f64 {
    a.betas
        .iter()
        .zip(&b.betas)
        .map(|(x, y)| (x - y).abs())
        .fold((a.r0 - b.r0).abs(), f64::max)
}

fn focal_c2(a: &OuterAnsatz) -> f64 {
    let (ra, rb) = a.axes();
    ra * ra - rb * rb
}

#[test]
fn recovers_the_confocal_ellipse_from_a_dilated_guess() {
    let init = initial_guess(&inner(), -0.2, K).unwrap();
    let (target, fp) = exact(-0.2, K);
    assert!(((init.r0 / target.r0) - 1.05).abs() < 1e-12);
    let sol = solve_outer(&inner(), -0.2, &init, K).unwrap();
    assert!(sol.converged);
    assert!(sol.iterations < 20, "{} iterations", sol.iterations);
    assert!((sol.ansatz.omega - 0.15).abs() < 1e-9);
    assert!((sol.ansatz.omega - fp.omega_minus).abs() < 1e-9);
    assert!((focal_c2(&sol.ansatz) - 8.0).abs() < 1e-7, "c² = {}", focal_c2(&sol.ansatz));
    assert!(coefficient_error(&sol.ansatz, &target) < 1e-7);
    assert!(sol.report.sup_norm < 1e-10);

    // the recovered curve's affine γ⁺ fit gives back Q₁
    let (fit, _) = fit_affine_gamma_plus(&sol.ansatz.contour(&inner(), 256).unwrap()).unwrap();
    assert!((fit.q.norm() - fp.q1).abs() < 1e-7, "{} vs {}", fit.q.norm(), fp.q1);
}

#[test]
fn exact_solution_is_a_fixed_point() {
    let (target, _) = exact(-0.2, K);
    let sol = solve_outer(&inner(), -0.2, &target, K).unwrap();
    assert!(sol.converged);
    assert_eq!(sol.iterations, 1);
    assert!(sol.last_step < 1e-12);
}

#[test]
fn no_rotation_without_vorticity_contrast() {
    let init = initial_guess(&inner(), 0.0, K).unwrap();
    let sol = solve_outer(&inner(), 0.0, &init, K).unwrap();
    assert!(!sol.converged);
}

#[test]
fn jacobian_matches_central_differences() {
    let init = initial_guess(&inner(), -0.2, K).unwrap();
    let (_, jac) = residual_and_jacobian(&inner(), -0.2, &init, DEFAULT_NODES).unwrap();
    let mut x = init.betas.clone();
    x.push(init.r0);
    x.push(init.omega);
    let build = |v: &[f64]| OuterAnsatz { betas: v[..K].to_vec(), r0: v[K], omega: v[K + 1] };
    for col in 0..x.len() {
        let h = 1e-6 * x[col].abs().max(1e-2);
        let (mut p, mut m) = (x.clone(), x.clone());
        p[col] += h;
        m[col] -= h;
        let rp = residual_vector(&inner(), -0.2, &build(&p), DEFAULT_NODES).unwrap();
        let rm = residual_vector(&inner(), -0.2, &build(&m), DEFAULT_NODES).unwrap();
        let fd: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let an = jac.column(col);
        let diff = fd.iter().zip(an.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = an.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(diff <= 1e-6 * norm.max(1e-8), "column {col}: {diff:e} vs {norm:e}");
    }
}

#[test]
fn perturbed_starts_share_one_solution() {
    let (target, _) = exact(-0.2, K);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        let mut init = target.clone();
        init.r0 *= 1.0 + rng.gen_range(-0.05..0.05);
        init.omega *= 1.0 + rng.gen_range(-0.05..0.05);
        for b in init.betas.iter_mut().take(4) {
            *b += rng.gen_range(-0.0125..0.0125);
        }
        let sol = solve_outer(&inner(), -0.2, &init, K).unwrap();
        assert!(sol.converged, "trial {trial}");
        let beta_err = sol.ansatz.betas.iter().zip(&target.betas).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(beta_err < 1e-8, "trial {trial}: {beta_err:e}");
        assert!((sol.ansatz.omega - target.omega).abs() < 1e-8);
        // The residual is quadratic in r₀ at the solution, so r₀ is only
        // determined to √(residual floor / curvature) ≈ 5e-8.
        assert!((sol.ansatz.r0 - target.r0).abs() < 2e-7, "trial {trial}: {:e}", sol.ansatz.r0 - target.r0);
    }
}

#[test]
fn continuation_follows_the_confocal_line() {
    let alphas: Vec<f64> = (0..=10).map(|k| -0.05 - 0.025 * k as f64).collect();
    let c = continuation(&inner(), &alphas).unwrap();
    assert!(c.aborted.is_none(), "{:?}", c.aborted);
    assert_eq!(c.solutions.len(), alphas.len());
    for (a, s) in c.alphas.iter().zip(&c.solutions) {
        let expected = a * (0.25 - 1.0) / (4.0 * 0.25);
        assert!((s.ansatz.omega - expected).abs() < 1e-8, "alpha {a}");
    }
}

#[test]
fn continuation_of_one_point_is_a_single_solve() {
    let c = continuation(&inner(), &[-0.2]).unwrap();
    let init = initial_guess(&inner(), -0.2, 40).unwrap();
    let s = solve_outer(&inner(), -0.2, &init, 40).unwrap();
    assert_eq!(c.solutions.len(), 1);
    assert_eq!(c.solutions[0].ansatz, s.ansatz);
}

#[test]
fn continuation_stops_past_the_admissible_interval() {
    let c = continuation(&inner(), &[-0.2, -0.3, -0.4]).unwrap();
    assert_eq!(c.alphas, vec![-0.2, -0.3]);
    let (alpha, reason) = c.aborted.unwrap();
    assert_eq!(alpha, -0.4);
    assert!(!reason.is_empty());
}

#[test]
fn ansatz_rejects_off_centre_outer() {
    let off = EllipseSpec::new(num_complex::Complex64::new(0.1, 0.0), 4.0, 3.0, 0.0).unwrap();
    assert!(OuterAnsatz::from_ellipse(&inner(), &off, K, 0.1).is_err());
}
