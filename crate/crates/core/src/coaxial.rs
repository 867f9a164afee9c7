//! Linear coaxial laws on symmetric 3×3 tensors:
//! `y = [tr(k x)] e + 2μ x` with `k = λ e + h`, `tr h = 0`.
//!
//! In the orthonormal basis `d_1..d_4` (deviators ⟂ h), `d_5 = h/‖h‖`,
//! `d_6 = e/√3` the law is `block-diag(2μ I_4, a)` with
//! `a = [[2μ, 0], [√3‖h‖, 3λ + 2μ]] = s + rJ`, `r = (√3/2)‖h‖`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2};

use crate::monotone::{
    kernel_witness, order_from_angle, Certification, LinearLaw, MaxOrder, Order, ANGLE_TOL,
};
use crate::symlin::PD_TOL;
use crate::{fitzpatrick, Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Symmetric 3×3 tensor stored as its six independent entries in the order
/// `(x11, x22, x33, x12, x13, x23)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor3(pub [f64; 6]);

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3([0.0; 6]);

    pub fn identity() -> Self {
        SymTensor3([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        SymTensor3([a, b, c, 0.0, 0.0, 0.0])
    }

    pub fn entries(&self) -> [f64; 6] {
        self.0
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        SymTensor3([
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(0, 1)] + m[(1, 0)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(1, 2)] + m[(2, 1)]),
        ])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [a, b, c, ab, ac, bc] = self.0;
        Matrix3::new(a, ab, ac, ab, b, bc, ac, bc, c)
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Deviatoric part `x − (tr x / 3) e`.
    pub fn dev(&self) -> Self {
        let m = self.trace() / 3.0;
        let [a, b, c, ab, ac, bc] = self.0;
        SymTensor3([a - m, b - m, c - m, ab, ac, bc])
    }

    /// `⟨x, y⟩ = tr(xy)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.to_vec6().dot(&other.to_vec6())
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        SymTensor3(self.0.map(|v| v * c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.0;
        out.iter_mut().zip(other.0).for_each(|(a, b)| *a += b);
        SymTensor3(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Orthonormal coordinates `(x11, x22, x33, √2 x12, √2 x13, √2 x23)`;
    /// the Euclidean dot product of two such vectors is `tr(xy)`.
    pub fn to_vec6(&self) -> DVector<f64> {
        let [a, b, c, ab, ac, bc] = self.0;
        DVector::from_vec(vec![a, b, c, SQRT_2 * ab, SQRT_2 * ac, SQRT_2 * bc])
    }

    pub fn from_vec6(v: &DVector<f64>) -> Self {
        assert_eq!(v.len(), 6, "from_vec6: expected 6 coordinates");
        SymTensor3([
            v[0],
            v[1],
            v[2],
            v[3] * FRAC_1_SQRT_2,
            v[4] * FRAC_1_SQRT_2,
            v[5] * FRAC_1_SQRT_2,
        ])
    }
}

/// `γ_k = sin(kθ) / (sin((k−1)θ) cos θ)`, with the `θ → 0` limit `k/(k−1)`.
pub fn gamma(k: usize, theta: f64) -> f64 {
    assert!(k >= 2, "gamma is defined for k >= 2");
    let kf = k as f64;
    if theta == 0.0 {
        return kf / (kf - 1.0);
    }
    (kf * theta).sin() / (((kf - 1.0) * theta).sin() * theta.cos())
}

/// Chebyshev polynomial of the second kind `U_k(X)` by the three-term
/// recurrence `U_0 = 1`, `U_1 = 2X`, `U_k = 2X U_{k−1} − U_{k−2}`.
pub fn chebyshev_u(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Linear coaxial law with Lamé scalars `λ`, `μ` and traceless deviator `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoaxialLaw {
    lambda: f64,
    mu: f64,
    h: SymTensor3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    pub monotone: bool,
    /// Characteristic angle, defined for monotone laws with `μ > 0` and
    /// `3λ + 2μ > 0`.
    pub theta: Option<f64>,
}

impl CoaxialLaw {
    /// Rejects non-finite inputs and an `h` whose trace exceeds
    /// `1e-12 · max(1, ‖h‖)`; the stored `h` is its exact deviatoric part.
    pub fn new(lambda: f64, mu: f64, h: SymTensor3) -> Result<Self> {
        if !lambda.is_finite() || !mu.is_finite() || h.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "coaxial law has non-finite coefficients".into(),
            ));
        }
        let tol = 1e-12 * h.norm().max(1.0);
        if h.trace().abs() > tol {
            return Err(Error::InvalidInput(format!(
                "deviator h must be traceless: tr h = {:e} exceeds {tol:e}",
                h.trace()
            )));
        }
        Ok(Self {
            lambda,
            mu,
            h: h.dev(),
        })
    }

    pub fn hooke(lambda: f64, mu: f64) -> Result<Self> {
        Self::new(lambda, mu, SymTensor3::ZERO)
    }

    /// Law whose deviator is `h_dir` rescaled so that the characteristic
    /// angle equals `theta`. Needs `μ > 0`, `3λ + 2μ > 0`, `h_dir ≠ 0`.
    pub fn with_angle(lambda: f64, mu: f64, h_dir: SymTensor3, theta: f64) -> Result<Self> {
        let bulk = 3.0 * lambda + 2.0 * mu;
        if mu <= 0.0 || bulk <= 0.0 {
            return Err(Error::NotApplicable(
                "angle needs mu > 0 and 3 lambda + 2 mu > 0".into(),
            ));
        }
        let dir = h_dir.dev();
        let n = dir.norm();
        if n == 0.0 {
            return Err(Error::InvalidInput("deviator direction is zero".into()));
        }
        let target = 2.0 / SQRT_3 * (2.0 * mu * bulk).sqrt() * theta.sin();
        Self::new(lambda, mu, dir.scale(target / n))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn h(&self) -> &SymTensor3 {
        &self.h
    }

    pub fn h_norm(&self) -> f64 {
        self.h.norm()
    }

    /// `3λ + 2μ`.
    pub fn bulk(&self) -> f64 {
        3.0 * self.lambda + 2.0 * self.mu
    }

    /// `k = λ e + h`.
    pub fn k(&self) -> SymTensor3 {
        self.h.add(&SymTensor3::identity().scale(self.lambda))
    }

    /// Skew coefficient `r = (√3/2) ‖h‖`.
    pub fn r(&self) -> f64 {
        0.5 * SQRT_3 * self.h_norm()
    }

    /// 2×2 symmetric block `s = [[2μ, r], [r, 3λ + 2μ]]`.
    pub fn s_block(&self) -> Matrix2<f64> {
        let r = self.r();
        Matrix2::new(2.0 * self.mu, r, r, self.bulk())
    }

    /// 2×2 block `a = [[2μ, 0], [√3‖h‖, 3λ + 2μ]]`.
    pub fn a_block(&self) -> Matrix2<f64> {
        Matrix2::new(2.0 * self.mu, 0.0, SQRT_3 * self.h_norm(), self.bulk())
    }

    /// `‖h‖` at or below `1e-12 · max(1, |λ|, |μ|)` counts as Hooke.
    pub fn is_hooke(&self) -> bool {
        self.h_norm() <= 1e-12 * self.lambda.abs().max(self.mu.abs()).max(1.0)
    }

    pub fn apply(&self, x: &SymTensor3) -> SymTensor3 {
        let tr_kx = self.k().dot(x);
        x.scale(2.0 * self.mu)
            .add(&SymTensor3::identity().scale(tr_kx))
    }

    /// Matrix of the law in the orthonormal coordinates of
    /// [`SymTensor3::to_vec6`].
    pub fn to_matrix6(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        for j in 0..6 {
            let mut ej = DVector::zeros(6);
            ej[j] = 1.0;
            let col = self.apply(&SymTensor3::from_vec6(&ej)).to_vec6();
            m.set_column(j, &col);
        }
        m
    }

    pub fn to_linear_law(&self) -> LinearLaw {
        LinearLaw::new(self.to_matrix6()).expect("6x6 finite matrix")
    }

    pub fn monotone_check(&self) -> MonotoneCheck {
        monotone_check(self)
    }

    pub fn basis(&self) -> CoaxialBasis {
        CoaxialBasis::new(&self.h)
    }
}

/// Tests `μ ≥ 0`, `3λ + 2μ ≥ 0` and `tr(h²) ≤ (8/3) μ (3λ + 2μ)`, each with
/// `τ_pd`-scaled slack, and reports the characteristic angle
/// `θ = arcsin((√3/2)‖h‖ / √(2μ(3λ+2μ)))` when it is defined.
pub fn monotone_check(law: &CoaxialLaw) -> MonotoneCheck {
    let (mu, bulk) = (law.mu, law.bulk());
    let lin_tol = PD_TOL * law.lambda.abs().max(mu.abs()).max(1.0);
    let bound = 8.0 / 3.0 * mu * bulk;
    let quad_tol = PD_TOL * bound.abs().max(1.0);
    let monotone = mu >= -lin_tol && bulk >= -lin_tol && law.h.dot(&law.h) <= bound + quad_tol;
    let theta = (monotone && mu > 0.0 && bulk > 0.0).then(|| {
        let ratio = law.r() / (2.0 * mu * bulk).sqrt();
        ratio.min(1.0).asin()
    });
    MonotoneCheck { monotone, theta }
}

/// Maximal monotonicity order: `Cyclic` for Hooke laws, otherwise
/// `Finite(max{n : nθ ≤ π})`.
pub fn max_order_coaxial(law: &CoaxialLaw) -> Result<MaxOrder> {
    let check = monotone_check(law);
    if !check.monotone {
        return Err(Error::NotMonotone);
    }
    if law.is_hooke() {
        return Ok(MaxOrder {
            order: Order::Cyclic,
            certified_by: Certification::ClosedForm,
            theta: Some(0.0),
            witness: None,
            boundary: false,
        });
    }
    // μ = 0 or 3λ + 2μ = 0 forces h = 0
    let theta = check.theta.ok_or(Error::NotMonotone)?;
    if theta == 0.0 {
        return Err(Error::NotMonotone);
    }
    let n = order_from_angle(theta);
    let witness = fitzpatrick::build_kernels(&law.to_linear_law(), n + 1)
        .ok()
        .and_then(|k| kernel_witness(&k, n + 1));
    Ok(MaxOrder {
        order: Order::Finite(n),
        certified_by: Certification::ClosedForm,
        theta: Some(theta),
        witness,
        boundary: (n as f64 * theta - PI).abs() <= ANGLE_TOL,
    })
}

/// Orthonormal basis `d_1..d_6` adapted to a deviator `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoaxialBasis {
    d: [SymTensor3; 6],
}

impl CoaxialBasis {
    /// `d_5 = h/‖h‖`, `d_6 = e/√3`, and `d_1..d_4` by pivoted Gram–Schmidt of
    /// a fixed list of unit deviators against `d_5`. For `h = 0` the fixed
    /// list itself is used, its last element playing `d_5`.
    pub fn new(h: &SymTensor3) -> Self {
        let s6 = 6f64.sqrt();
        let fixed = [
            SymTensor3([FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0]),
            SymTensor3([1.0 / s6, 1.0 / s6, -2.0 / s6, 0.0, 0.0, 0.0]),
            SymTensor3([0.0, 0.0, 0.0, FRAC_1_SQRT_2, 0.0, 0.0]),
            SymTensor3([0.0, 0.0, 0.0, 0.0, FRAC_1_SQRT_2, 0.0]),
            SymTensor3([0.0, 0.0, 0.0, 0.0, 0.0, FRAC_1_SQRT_2]),
        ];
        Self::with_candidates(h, &fixed)
    }

    /// Same construction from a caller-supplied list of deviators, which must
    /// span the deviator space together with `h`.
    pub fn with_candidates(h: &SymTensor3, candidates: &[SymTensor3]) -> Self {
        let d6 = SymTensor3::identity().scale(1.0 / SQRT_3);
        let hn = h.norm();
        let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(5);
        let mut pool: Vec<DVector<f64>> = candidates.iter().map(|c| c.dev().to_vec6()).collect();
        if hn > 0.0 {
            chosen.push(h.to_vec6() / hn);
        }
        while chosen.len() < 5 {
            let residuals: Vec<DVector<f64>> = pool
                .iter()
                .map(|c| {
                    let mut r = c.clone();
                    for q in &chosen {
                        r -= q * q.dot(&r);
                    }
                    r
                })
                .collect();
            let (idx, best) = residuals
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .expect("candidates exhausted before the basis was complete");
            assert!(
                best.norm() > 1e-8,
                "candidates do not span the deviator space"
            );
            chosen.push(best / best.norm());
            pool.remove(idx);
        }
        let tensor = |v: &DVector<f64>| SymTensor3::from_vec6(v);
        let d = if hn > 0.0 {
            [
                tensor(&chosen[1]),
                tensor(&chosen[2]),
                tensor(&chosen[3]),
                tensor(&chosen[4]),
                tensor(&chosen[0]),
                d6,
            ]
        } else {
            [
                tensor(&chosen[0]),
                tensor(&chosen[1]),
                tensor(&chosen[2]),
                tensor(&chosen[3]),
                tensor(&chosen[4]),
                d6,
            ]
        };
        Self { d }
    }

    pub fn vectors(&self) -> &[SymTensor3; 6] {
        &self.d
    }

    /// Coordinates `⟨x, d_i⟩`.
    pub fn coords(&self, x: &SymTensor3) -> DVector<f64> {
        DVector::from_iterator(6, self.d.iter().map(|d| d.dot(x)))
    }

    pub fn tensor(&self, c: &DVector<f64>) -> SymTensor3 {
        self.d
            .iter()
            .zip(c.iter())
            .fold(SymTensor3::ZERO, |acc, (d, &ci)| acc.add(&d.scale(ci)))
    }

    /// Matrix of the law in this basis: `block-diag(2μ I_4, a)`.
    pub fn law_matrix(&self, law: &CoaxialLaw) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..4 {
            m[(i, i)] = 2.0 * law.mu;
        }
        m.view_mut((4, 4), (2, 2)).copy_from(&law.a_block());
        m
    }
}

/// Kernel state of one order in [`CoaxialKernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoaxialStep {
    pub k: usize,
    /// `(k/(k−1)) μ`, the isotropic block.
    pub iso: f64,
    /// `γ_k`; the 2×2 block is `½ γ_k s`.
    pub gamma: f64,
    /// `kθ = π` within `τ_ang`: the 2×2 block vanishes.
    pub singular: bool,
}

/// Block-form Fitzpatrick kernels `H_2..H_n` of a strictly monotone coaxial
/// law.
#[derive(Debug, Clone)]
pub struct CoaxialKernel {
    law: CoaxialLaw,
    basis: CoaxialBasis,
    theta: f64,
    steps: Vec<CoaxialStep>,
}

pub fn coaxial_kernels(law: &CoaxialLaw, n: usize) -> Result<CoaxialKernel> {
    coaxial_kernels_in(law, CoaxialBasis::new(&law.h), n)
}

/// Like [`coaxial_kernels`], with an explicit basis.
pub fn coaxial_kernels_in(
    law: &CoaxialLaw,
    basis: CoaxialBasis,
    n: usize,
) -> Result<CoaxialKernel> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let check = monotone_check(law);
    let theta = match check.theta {
        Some(t) if check.monotone && t < PI / 2.0 => t,
        _ => return Err(Error::NotStrictlyMonotone),
    };
    let theta = if law.is_hooke() { 0.0 } else { theta };
    let mut steps = Vec::with_capacity(n - 1);
    for k in 2..=n {
        let kt = k as f64 * theta;
        let singular = (kt - PI).abs() <= ANGLE_TOL;
        if kt > PI + ANGLE_TOL || (singular && k < n) {
            return Err(Error::OrderExceeded {
                requested: n,
                stop_index: k,
            });
        }
        let kf = k as f64;
        steps.push(CoaxialStep {
            k,
            iso: kf / (kf - 1.0) * law.mu,
            gamma: if singular { 0.0 } else { gamma(k, theta) },
            singular,
        });
    }
    Ok(CoaxialKernel {
        law: *law,
        basis,
        theta,
        steps,
    })
}

impl CoaxialKernel {
    pub fn law(&self) -> &CoaxialLaw {
        &self.law
    }

    pub fn basis(&self) -> &CoaxialBasis {
        &self.basis
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn order(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn step(&self, k: usize) -> Option<&CoaxialStep> {
        k.checked_sub(2).and_then(|i| self.steps.get(i))
    }

    /// `H_k` as a 6×6 matrix in the adapted basis.
    pub fn h_matrix(&self, k: usize) -> Option<DMatrix<f64>> {
        let st = self.step(k)?;
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..4 {
            m[(i, i)] = st.iso;
        }
        m.view_mut((4, 4), (2, 2))
            .copy_from(&(self.law.s_block() * (0.5 * st.gamma)));
        Some(m)
    }

    /// `H_k` in the orthonormal coordinates of [`SymTensor3::to_vec6`].
    pub fn h_matrix_standard(&self, k: usize) -> Option<DMatrix<f64>> {
        let hb = self.h_matrix(k)?;
        let p =
            DMatrix::from_columns(&self.basis.d.iter().map(|d| d.to_vec6()).collect::<Vec<_>>());
        Some(&p * hb * p.transpose())
    }

    pub fn eval(&self, n: usize, x: &SymTensor3, y: &SymTensor3) -> Result<f64> {
        eval_f_coaxial(self, n, x, y)
    }
}

/// `F_{A,n}(x, y) = tr(xy) + ¼ tr[(y − Ax) H_n⁻¹ (y − Ax)]` evaluated in the
/// adapted basis. At the boundary `nθ = π` the 2×2 block is zero and its
/// part of the residual must vanish, otherwise the value is `+∞`.
pub fn eval_f_coaxial(
    kernel: &CoaxialKernel,
    n: usize,
    x: &SymTensor3,
    y: &SymTensor3,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let st = kernel.step(n).ok_or(Error::OrderExceeded {
        requested: n,
        stop_index: kernel.order() + 1,
    })?;
    let u = y.sub(&kernel.law.apply(x));
    let c = kernel.basis.coords(&u);
    let iso_part: f64 = (0..4).map(|i| c[i] * c[i]).sum::<f64>() / st.iso;
    let tail = Vector2::new(c[4], c[5]);
    let block_part = if st.singular {
        if tail.norm() <= 1e-8 * u.norm().max(1.0) {
            0.0
        } else {
            return Ok(f64::INFINITY);
        }
    } else {
        let hb = kernel.law.s_block() * (0.5 * st.gamma);
        let inv = hb.try_inverse().ok_or(Error::SingularSystem)?;
        tail.dot(&(inv * tail))
    };
    Ok(x.dot(y) + 0.25 * (iso_part + block_part))
}
