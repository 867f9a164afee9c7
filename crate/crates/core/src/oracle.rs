//! Brute-force checks, kept independent of the closed forms and of the kernel
//! recursion they certify.
//!
//! * [`falsify_n_monotone`] searches for an n-cycle with positive cycle sum.
//! * [`direct_f`] evaluates `F_{A,n}` by solving the stationarity system of
//!   the chain supremum directly.
//! * [`sup_sample_f`] samples chains and returns the best objective seen, a
//!   lower bound on `F_{A,n}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::monotone::{cycle_sum, LinearLaw};
use crate::symlin::frobenius;
use crate::{Error, Result};

/// Relative violation threshold `τ_viol`.
pub const VIOLATION_RTOL: f64 = 1e-9;
/// Floor on the cycle scale, relative to `‖A‖ · max ‖x_i‖²`, so that
/// rounding noise on null-space cycles is never reported as a violation.
pub const SCALE_FLOOR: f64 = 1e-3;
pub const MAX_ORDER: usize = 32;
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub cycle: Vec<DVector<f64>>,
    pub cycle_sum: f64,
    pub scale: f64,
}

/// Homogeneous scale of a cycle: `max_i ‖x_i‖·‖A x_i‖`, floored at
/// `SCALE_FLOOR · ‖A‖ · max_i ‖x_i‖²`.
pub fn cycle_scale(law: &LinearLaw, cycle: &[DVector<f64>]) -> f64 {
    let a_norm = frobenius(law.matrix());
    cycle
        .iter()
        .map(|x| {
            let nx = x.norm();
            (nx * law.apply(x).norm()).max(SCALE_FLOOR * a_norm * nx * nx)
        })
        .fold(0.0, f64::max)
}

/// True when the cycle sum exceeds `τ_viol · scale`.
pub fn is_violation(law: &LinearLaw, cycle: &[DVector<f64>]) -> bool {
    evaluate(law, cycle).is_some()
}

fn evaluate(law: &LinearLaw, cycle: &[DVector<f64>]) -> Option<Witness> {
    let scale = cycle_scale(law, cycle);
    if scale == 0.0 {
        return None;
    }
    let sum = cycle_sum(law, cycle).ok()?;
    (sum > VIOLATION_RTOL * scale).then(|| Witness {
        cycle: cycle.to_vec(),
        cycle_sum: sum,
        scale,
    })
}

fn check_limits(law: &LinearLaw, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if n > MAX_ORDER {
        return Err(Error::LimitExceeded {
            what: "order",
            value: n,
            limit: MAX_ORDER,
        });
    }
    if law.dim() > MAX_DIM {
        return Err(Error::LimitExceeded {
            what: "dimension",
            value: law.dim(),
            limit: MAX_DIM,
        });
    }
    Ok(())
}

/// Dominant invariant plane of the skew part: unit `u` maximizing `‖W u‖`
/// and `v = W u / ‖W u‖`.
fn skew_plane(law: &LinearLaw) -> Option<(DVector<f64>, DVector<f64>)> {
    let w = law.skew();
    let eig = SymmetricEigen::new(w.transpose() * w);
    let (idx, &top) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    if top <= 1e-24 * frobenius(law.matrix()).max(1.0).powi(2) {
        return None;
    }
    let u = eig.eigenvectors.column(idx).into_owned();
    let wu = w * &u;
    let v = &wu / wu.norm();
    Some((u, v))
}

/// Principal cycle: the top eigenvector of the n-cycle quadratic form, with
/// `x_n` at the origin. Assembled here from the cycle-sum definition, not
/// from the monotone module.
fn principal_cycle(law: &LinearLaw, n: usize) -> Vec<DVector<f64>> {
    let d = law.dim();
    let blocks = n - 1;
    // Q(z) = Σ_{i<n−1} ⟨z_{i+1}, A z_i⟩ − Σ_i ⟨z_i, S z_i⟩ = zᵀ G z
    let mut g = DMatrix::zeros(blocks * d, blocks * d);
    let a = law.matrix();
    for i in 0..blocks {
        g.view_mut((i * d, i * d), (d, d))
            .copy_from(&(-law.sym().matrix()));
        if i + 1 < blocks {
            g.view_mut(((i + 1) * d, i * d), (d, d))
                .copy_from(&(a * 0.5));
            g.view_mut((i * d, (i + 1) * d), (d, d))
                .copy_from(&(a.transpose() * 0.5));
        }
    }
    let eig = SymmetricEigen::new(g);
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let z = eig.eigenvectors.column(idx);
    let mut cycle: Vec<_> = (0..blocks).map(|i| z.rows(i * d, d).into_owned()).collect();
    cycle.push(DVector::zeros(d));
    cycle
}

fn pad(mut cycle: Vec<DVector<f64>>, n: usize, d: usize) -> Vec<DVector<f64>> {
    cycle.resize(n, DVector::zeros(d));
    cycle
}

/// Deterministic candidate cycles, tried before the random ones.
fn targeted_cycles(law: &LinearLaw, n: usize) -> Vec<Vec<DVector<f64>>> {
    let d = law.dim();
    let mut out = vec![principal_cycle(law, n)];
    let scales = [1.0, 0.5, 0.25, 0.1, 0.01];

    if let Some((u, v)) = skew_plane(law) {
        for sign in [1.0, -1.0] {
            let polygon = (0..n)
                .map(|j| {
                    let phi = sign * 2.0 * PI * j as f64 / n as f64;
                    &u * phi.cos() + &v * phi.sin()
                })
                .collect();
            out.push(polygon);
        }
        if n >= 3 {
            for &c in &scales {
                for sign in [1.0, -1.0] {
                    out.push(pad(vec![&u * (sign * c), v.clone()], n, d));
                    out.push(pad(vec![&v * (sign * c), u.clone()], n, d));
                }
            }
        }
    }
    // the two-point pattern on coordinate axes: x_1 = c e_i, x_2 = e_j
    if n >= 3 && d <= 4 {
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                for &c in &scales {
                    for sign in [1.0, -1.0] {
                        let mut p = DVector::zeros(d);
                        p[i] = sign * c;
                        let mut q = DVector::zeros(d);
                        q[j] = 1.0;
                        out.push(pad(vec![p, q], n, d));
                    }
                }
            }
        }
    }
    out
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_vector(rng: &mut impl Rng, d: usize) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Searches for an n-cycle with cycle sum above `τ_viol · scale`. Targeted
/// cycles are tried first, then `trials` standard-normal cycles; the first
/// violating cycle in that order is returned. Deterministic under `seed`.
pub fn falsify_n_monotone(
    law: &LinearLaw,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<Witness>> {
    check_limits(law, n)?;
    if let Some(w) = targeted_cycles(law, n)
        .iter()
        .find_map(|c| evaluate(law, c))
    {
        return Ok(Some(w));
    }
    let d = law.dim();
    Ok((0..trials as u64).into_par_iter().find_map_first(|i| {
        let mut rng = trial_rng(seed, i);
        let cycle: Vec<_> = (0..n).map(|_| normal_vector(&mut rng, d)).collect();
        evaluate(law, &cycle)
    }))
}

/// Solves the stationarity system of the chain supremum
///
/// ```text
/// −2S z_1 + Aᵀ z_2                 = Ax − y
///  A z_{i−1} − 2S z_i + Aᵀ z_{i+1} = 0        (i = 2..n−2)
///  A z_{n−2} − 2S z_{n−1}           = 0
/// ```
///
/// and returns `⟨x, y⟩ + ½ ⟨z_1, y − Ax⟩`. The system matrix must be negative
/// definite (strict n-monotonicity).
pub fn direct_f(law: &LinearLaw, n: usize, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_limits(law, n)?;
    law.check_dim(x)?;
    law.check_dim(y)?;
    let d = law.dim();
    let blocks = n - 1;
    let a = law.matrix();
    let s = law.sym().matrix();
    // negated system: 2S on the diagonal, −Aᵀ above, −A below
    let mut m = DMatrix::zeros(blocks * d, blocks * d);
    for i in 0..blocks {
        m.view_mut((i * d, i * d), (d, d)).copy_from(&(s * 2.0));
        if i + 1 < blocks {
            m.view_mut((i * d, (i + 1) * d), (d, d))
                .copy_from(&(-a.transpose()));
            m.view_mut(((i + 1) * d, i * d), (d, d)).copy_from(&(-a));
        }
    }
    let u = y - a * x;
    let mut rhs = DVector::zeros(blocks * d);
    rhs.rows_mut(0, d).copy_from(&u);

    let chol = m.cholesky().ok_or(Error::SingularSystem)?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v * v), hi.max(v * v))
    });
    if lo <= 1e-14 * hi {
        return Err(Error::SingularSystem);
    }
    let z = chol.solve(&rhs);
    Ok(x.dot(y) + 0.5 * z.rows(0, d).dot(&u))
}

/// The chain objective `⟨x, y⟩ + Σ_{λ=1..n} ⟨x_{λ+1} − x_λ, y_λ⟩` with
/// `y_λ = A x_λ` on the chain, `(x_n, y_n) = (x, y)` and `x_{n+1} = x_1`.
pub fn chain_objective(
    law: &LinearLaw,
    chain: &[DVector<f64>],
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let m = chain.len();
    let mut total = x.dot(y);
    for (i, xi) in chain.iter().enumerate() {
        let next = if i + 1 < m { &chain[i + 1] } else { x };
        total += (next - xi).dot(&law.apply(xi));
    }
    let first = chain.first().unwrap_or(x);
    total + (first - x).dot(y)
}

/// Random-search lower bound on `F_{A,n}(x, y)`: half the budget samples
/// chains around `x`, the other half perturbs the best chain with a
/// shrinking radius. Deterministic under `seed`.
pub fn sup_sample_f(
    law: &LinearLaw,
    n: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    law.check_dim(x)?;
    law.check_dim(y)?;
    let d = law.dim();
    let links = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_chain = vec![x.clone(); links];
    let mut best = chain_objective(law, &best_chain, x, y);

    let stiff = law.sym().max_eigenvalue().abs().max(1e-12);
    let radius = ((y - law.apply(x)).norm() / stiff).max(1e-3 * (1.0 + x.norm()));
    let global = trials / 2;
    for i in 0..global {
        let sigma = radius * [0.25, 0.5, 1.0, 2.0][i % 4];
        let chain: Vec<_> = (0..links)
            .map(|_| x + normal_vector(&mut rng, d) * sigma)
            .collect();
        let v = chain_objective(law, &chain, x, y);
        if v > best {
            best = v;
            best_chain = chain;
        }
    }
    let local = trials - global;
    for i in 0..local {
        let sigma = radius * 0.5 * (1e-4f64).powf(i as f64 / local.max(1) as f64);
        let chain: Vec<_> = best_chain
            .iter()
            .map(|p| p + normal_vector(&mut rng, d) * sigma)
            .collect();
        let v = chain_objective(law, &chain, x, y);
        if v > best {
            best = v;
            best_chain = chain;
        }
    }
    Ok(best)
}
