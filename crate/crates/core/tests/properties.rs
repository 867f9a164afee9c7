use std::f64::consts::PI;

use fitzlaw::bipotential::eval_cs;
use fitzlaw::coaxial::{
    self, chebyshev_u, coaxial_kernels, coaxial_kernels_in, gamma, max_order_coaxial, CoaxialBasis,
    CoaxialLaw, SymTensor3,
};
use fitzlaw::fitzpatrick::{
    build_kernels, check_recursion, eval_f, eval_f_symmetric, FitzpatrickKernel, KernelStatus,
};
use fitzlaw::monotone::{
    cycle_form_matrix, cycle_sum, max_order, order_from_angle, skew_angle_2x2, OrderOptions,
};
use fitzlaw::oracle::{direct_f, falsify_n_monotone, sup_sample_f};
use fitzlaw::symlin::{classify, SymMatrix};
use fitzlaw::{LinearLaw, Order, SeqIndex};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_vec(r: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| r.sample(StandardNormal))
}

fn normal_mat(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| r.sample(StandardNormal))
}

fn random_pd(r: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let b = normal_mat(r, d);
    &b * b.transpose() / d as f64 + DMatrix::identity(d, d) * 0.5
}

fn random_law(r: &mut ChaCha8Rng, d: usize, skew_scale: f64) -> LinearLaw {
    let b = normal_mat(r, d);
    let w = (&b - b.transpose()) * (0.5 * skew_scale);
    LinearLaw::new(random_pd(r, d) + w).unwrap()
}

/// Random law whose kernels `H_2..H_n` are all positive definite.
fn strict_law(seed: u64, d: usize, n: usize) -> (LinearLaw, FitzpatrickKernel) {
    let mut r = rng(seed);
    let mut scale = r.random_range(0.0..1.2);
    loop {
        let law = random_law(&mut r, d, scale);
        let k = build_kernels(&law, n).unwrap();
        if (2..=n).all(|j| k.status(j) == KernelStatus::PositiveDefinite) {
            return (law, k);
        }
        scale *= 0.5;
    }
}

fn random_deviator(r: &mut ChaCha8Rng) -> SymTensor3 {
    SymTensor3(std::array::from_fn(|_| r.sample(StandardNormal))).dev()
}

fn random_tensor(r: &mut ChaCha8Rng) -> SymTensor3 {
    SymTensor3(std::array::from_fn(|_| r.sample(StandardNormal)))
}

/// Random coaxial law with `θ` away from the `nθ = π` boundaries.
fn random_coaxial(r: &mut ChaCha8Rng) -> (CoaxialLaw, f64) {
    loop {
        let mu = r.random_range(0.2..3.0);
        let lambda = r.random_range((-2.0 * mu / 3.0 + 0.1)..3.0);
        let theta = r.random_range(0.05..(PI / 2.0 - 0.05));
        let n = order_from_angle(theta) as f64;
        if (n * theta - PI).abs() < 1e-6 || ((n + 1.0) * theta - PI).abs() < 1e-6 {
            continue;
        }
        let law = CoaxialLaw::with_angle(lambda, mu, random_deviator(r), theta).unwrap();
        return (law, theta);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_by_two_angle_matches_recursion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let scale = r.random_range(0.05..3.0);
        let law = random_law(&mut r, 2, scale);
        let angle = skew_angle_2x2(&law).unwrap();
        let n = order_from_angle(angle.theta);
        prop_assume!(n <= 60);
        prop_assume!((n as f64 * angle.theta - PI).abs() > 1e-6);
        prop_assume!(((n + 1) as f64 * angle.theta - PI).abs() > 1e-6);
        let k = build_kernels(&law, n + 1).unwrap();
        for j in 2..=n {
            prop_assert_eq!(k.status(j), KernelStatus::PositiveDefinite, "H_{} at theta {}", j, angle.theta);
        }
        prop_assert_eq!(k.status(n + 1), KernelStatus::Failed);
        prop_assert_eq!(k.stop_index(), Some(n + 1));
    }

    #[test]
    fn cycle_form_psd_iff_angle_verdict(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let scale = r.random_range(0.05..3.0);
        let law = random_law(&mut r, 2, scale);
        let theta = skew_angle_2x2(&law).unwrap().theta;
        prop_assume!((n as f64 * theta - PI).abs() > 1e-6);
        let m = cycle_form_matrix(&law, n).unwrap();
        let psd = classify(&m).unwrap().is_psd();
        prop_assert_eq!(psd, n as f64 * theta <= PI);
    }

    #[test]
    fn oracle_silent_where_certified(seed in any::<u64>()) {
        let mut r = rng(seed);
        let scale = r.random_range(0.05..2.0);
        let law = random_law(&mut r, 2, scale);
        let report = max_order(&law, &OrderOptions::default());
        let Order::Finite(n) = report.order else { return Ok(()) };
        prop_assume!(n <= 12);
        prop_assert!(falsify_n_monotone(&law, n, 300, seed).unwrap().is_none());
        if let Some(w) = report.witness {
            prop_assert_eq!(w.len(), n + 1);
            prop_assert!(cycle_sum(&law, &w).unwrap() > 0.0);
        }
    }

    #[test]
    fn direct_solve_matches_kernels(seed in any::<u64>(), d in 1usize..5, n in 2usize..7) {
        let (law, k) = strict_law(seed, d, n);
        let mut r = rng(seed ^ 0x5eed);
        let (x, y) = (normal_vec(&mut r, d), normal_vec(&mut r, d));
        let f = eval_f(&k, n, &x, &y).unwrap();
        let g = direct_f(&law, n, &x, &y).unwrap();
        prop_assert!((f - g).abs() <= 1e-8 * f.abs().max(1.0), "{} vs {}", f, g);
    }

    #[test]
    fn sampled_supremum_is_a_lower_bound(seed in any::<u64>(), d in 1usize..4, n in 2usize..5) {
        let (law, k) = strict_law(seed, d, n);
        let mut r = rng(seed ^ 0xfeed);
        let (x, y) = (normal_vec(&mut r, d), normal_vec(&mut r, d));
        let f = eval_f(&k, n, &x, &y).unwrap();
        let lo = sup_sample_f(&law, n, &x, &y, 200, seed).unwrap();
        let scale = (x.norm() * y.norm()).max(x.norm() * law.apply(&x).norm()).max(1.0);
        prop_assert!(lo <= f + 1e-8 * scale);
        prop_assert!(lo >= x.dot(&y) - 1e-12 * scale);
    }

    #[test]
    fn fitzpatrick_sequence_properties(seed in any::<u64>(), d in 1usize..5, n in 2usize..6) {
        let (law, k) = strict_law(seed, d, n + 1);
        let mut r = rng(seed ^ 0xabc);
        let x = normal_vec(&mut r, d);
        let y = normal_vec(&mut r, d);
        let ax = law.apply(&x);
        let scale = x.norm() * ax.norm() + 1.0;
        let on_graph = eval_f(&k, n, &x, &ax).unwrap();
        prop_assert!((on_graph - x.dot(&ax)).abs() <= 1e-10 * scale);
        let f_n = eval_f(&k, n, &x, &y).unwrap();
        let f_next = eval_f(&k, n + 1, &x, &y).unwrap();
        prop_assert!(f_next >= f_n - 1e-10 * f_n.abs().max(1.0));
        prop_assert!(f_n >= x.dot(&y) - 1e-12 * scale);
    }

    #[test]
    fn fitzpatrick_is_jointly_convex(seed in any::<u64>(), d in 1usize..4, n in 2usize..6) {
        let (_, k) = strict_law(seed, d, n);
        let mut r = rng(seed ^ 0x77);
        let (x1, y1, x2, y2) = (normal_vec(&mut r, d), normal_vec(&mut r, d), normal_vec(&mut r, d), normal_vec(&mut r, d));
        let xm = (&x1 + &x2) * 0.5;
        let ym = (&y1 + &y2) * 0.5;
        let a = eval_f(&k, n, &x1, &y1).unwrap();
        let b = eval_f(&k, n, &x2, &y2).unwrap();
        let m = eval_f(&k, n, &xm, &ym).unwrap();
        prop_assert!(m <= 0.5 * (a + b) + 1e-10 * a.abs().max(b.abs()).max(1.0));
    }

    #[test]
    fn kernel_recursion_identity(seed in any::<u64>(), d in 1usize..5, n in 2usize..8) {
        let (_, k) = strict_law(seed, d, n + 1);
        prop_assert!(check_recursion(&k, n).unwrap() <= 1e-8);
    }

    #[test]
    fn symmetric_closed_form_agrees(seed in any::<u64>(), d in 1usize..5, n in 2usize..9) {
        let mut r = rng(seed);
        let s = random_pd(&mut r, d);
        let law = LinearLaw::new(s.clone()).unwrap();
        let sm = SymMatrix::new(s).unwrap();
        let k = build_kernels(&law, n).unwrap();
        let (x, y) = (normal_vec(&mut r, d), normal_vec(&mut r, d));
        let a = eval_f(&k, n, &x, &y).unwrap();
        let b = eval_f_symmetric(&sm, SeqIndex::Finite(n), &x, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn coaxial_paths_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (law, theta) = random_coaxial(&mut r);
        let top = order_from_angle(theta);
        let n = r.random_range(2..=top.min(10));
        let kc = coaxial_kernels(&law, n).unwrap();
        let kg = build_kernels(&law.to_linear_law(), n).unwrap();
        let x = random_tensor(&mut r);
        let y = random_tensor(&mut r);
        let a = kc.eval(n, &x, &y).unwrap();
        let b = eval_f(&kg, n, &x.to_vec6(), &y.to_vec6()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{} vs {}", a, b);
        let hk = kc.h_matrix_standard(n).unwrap();
        prop_assert!((hk - kg.h(n).unwrap().matrix()).amax() <= 1e-9);
    }

    #[test]
    fn coaxial_basis_independence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (law, theta) = random_coaxial(&mut r);
        let n = r.random_range(2..=order_from_angle(theta).min(8));
        let cands: Vec<SymTensor3> = (0..6).map(|_| random_deviator(&mut r)).collect();
        let other = CoaxialBasis::with_candidates(law.h(), &cands);
        let k1 = coaxial_kernels(&law, n).unwrap();
        let k2 = coaxial_kernels_in(&law, other, n).unwrap();
        let (x, y) = (random_tensor(&mut r), random_tensor(&mut r));
        let a = k1.eval(n, &x, &y).unwrap();
        let b = k2.eval(n, &x, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn coaxial_block_structure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (law, _) = random_coaxial(&mut r);
        let basis = law.basis();
        let p = DMatrix::from_columns(&basis.vectors().iter().map(|d| d.to_vec6()).collect::<Vec<_>>());
        let in_basis = p.transpose() * law.to_matrix6() * &p;
        let sym = (&in_basis + in_basis.transpose()) * 0.5;
        let skew = (&in_basis - in_basis.transpose()) * 0.5;
        let mut sym_expected = DMatrix::zeros(6, 6);
        for i in 0..4 {
            sym_expected[(i, i)] = 2.0 * law.mu();
        }
        sym_expected.view_mut((4, 4), (2, 2)).copy_from(&law.s_block());
        let mut skew_expected = DMatrix::zeros(6, 6);
        skew_expected[(5, 4)] = law.r();
        skew_expected[(4, 5)] = -law.r();
        prop_assert!((sym - sym_expected).amax() <= 1e-12 * law.bulk().abs().max(law.h_norm()).max(1.0));
        prop_assert!((skew - skew_expected).amax() <= 1e-12 * law.h_norm().max(1.0));
    }

    #[test]
    fn coaxial_order_is_finite_and_matches_angle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (law, theta) = random_coaxial(&mut r);
        let report = max_order_coaxial(&law).unwrap();
        prop_assert_eq!(report.order, Order::Finite(order_from_angle(theta)));
        prop_assert!((report.theta.unwrap() - theta).abs() < 1e-9);
    }

    #[test]
    fn gamma_recurrence_and_chebyshev(theta in 0.01f64..1.5) {
        let c = theta.cos();
        let mut g = 2.0;
        for k in 2..=10usize {
            if k as f64 * theta >= PI - 1e-3 {
                break;
            }
            prop_assert!((gamma(k, theta) - g).abs() <= 1e-12 * g.abs().max(1.0));
            let cheb = chebyshev_u(k - 1, c) / chebyshev_u(k - 2, c);
            prop_assert!((c * gamma(k, theta) - cheb).abs() <= 1e-12 * cheb.abs().max(1.0));
            g = 2.0 - 1.0 / (c * c * g);
        }
    }

    #[test]
    fn cauchy_schwarz_sequence(seed in any::<u64>(), d in 1usize..5) {
        let mut r = rng(seed);
        let (x, y) = (normal_vec(&mut r, d), normal_vec(&mut r, d));
        let mut prev = f64::NEG_INFINITY;
        for n in 2..12 {
            let b = eval_cs(SeqIndex::Finite(n), &x, &y).unwrap();
            prop_assert!(b >= prev - 1e-12 * b.abs().max(1.0));
            prop_assert!(b >= x.dot(&y) - 1e-12 * (x.norm() * y.norm()).max(1.0));
            prev = b;
        }
        let (t, s) = (r.random_range(0.1..5.0), r.random_range(0.1..5.0));
        for n in [SeqIndex::Finite(2), SeqIndex::Finite(7), SeqIndex::Infinite] {
            let b = eval_cs(n, &x, &y).unwrap();
            let scaled = eval_cs(n, &(&x * t), &(&y * s)).unwrap();
            prop_assert!((scaled - t * s * b).abs() <= 1e-12 * (t * s * b).abs().max(1e-300));
        }
    }
}

#[test]
fn infinite_cs_equals_duality_only_on_aligned_pairs() {
    let mut r = rng(11);
    for _ in 0..200 {
        let x = normal_vec(&mut r, 3);
        let aligned = &x * r.random_range(0.1..4.0);
        let b = eval_cs(SeqIndex::Infinite, &x, &aligned).unwrap();
        assert!((b - x.dot(&aligned)).abs() <= 1e-12 * b);
        let y = normal_vec(&mut r, 3);
        let psi = (x.dot(&y) / (x.norm() * y.norm())).clamp(-1.0, 1.0).acos();
        if psi > 1e-9 {
            assert!(eval_cs(SeqIndex::Infinite, &x, &y).unwrap() > x.dot(&y));
        }
    }
}

#[test]
fn coaxial_hooke_laws_are_cyclic() {
    let mut r = rng(3);
    for _ in 0..50 {
        let mu = r.random_range(0.0..3.0);
        let lambda = r.random_range((-2.0 * mu / 3.0)..3.0);
        let law = CoaxialLaw::hooke(lambda, mu).unwrap();
        assert_eq!(max_order_coaxial(&law).unwrap().order, Order::Cyclic);
        let k = coaxial::monotone_check(&law);
        assert!(k.monotone);
    }
}

#[test]
fn coaxial_hooke_kernels_match_symmetric_closed_form() {
    let law = CoaxialLaw::hooke(1.5, 0.8).unwrap();
    let s = SymMatrix::new(law.to_matrix6()).unwrap();
    let mut r = rng(8);
    for n in 2..7 {
        let k = coaxial_kernels(&law, n).unwrap();
        let (x, y) = (random_tensor(&mut r), random_tensor(&mut r));
        let a = k.eval(n, &x, &y).unwrap();
        let b = eval_f_symmetric(&s, SeqIndex::Finite(n), &x.to_vec6(), &y.to_vec6()).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}

#[test]
fn monotone_ladder_for_the_rotation_law() {
    let law = LinearLaw::from_row_slice(2, &[1.0, -1.0, 1.0, 1.0]).unwrap();
    for n in 2..=4 {
        assert!(
            falsify_n_monotone(&law, n, 2000, 1).unwrap().is_none(),
            "n = {n}"
        );
    }
    for n in 5..=8 {
        let w = falsify_n_monotone(&law, n, 2000, 1)
            .unwrap()
            .expect("witness");
        assert!(w.cycle_sum > 0.0);
    }
}
