//! n-monotonicity of linear laws `y = Ax`.
//!
//! A law is n-monotone when `Σ_{i=1..n} ⟨x_{i+1} − x_i, A x_i⟩ ≤ 0` for every
//! closed chain `x_1, …, x_n, x_{n+1} = x_1`. The maximal order is decided by
//! one of three routes, recorded in [`Certification`]:
//!
//! * closed form: symmetric laws are cyclically monotone; 2×2 laws with a
//!   positive definite symmetric part are n-monotone iff `nθ ≤ π`;
//! * the kernel recursion `H_{k+1} = S − ¼ Aᵀ H_k⁻¹ A`;
//! * oracle search, when the symmetric part is singular.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::fitzpatrick::{build_kernels, FitzpatrickKernel, KernelStatus};
use crate::oracle;
use crate::symlin::{self, frobenius, Definiteness, DefinitenessClass, SymMatrix};
use crate::{Error, Result};

/// Angular slack `τ_ang` for the boundary `nθ = π`.
pub const ANGLE_TOL: f64 = 1e-9;
/// A law is treated as symmetric when `‖W‖ ≤ 1e-12 · max(1, ‖A‖)`.
pub const SKEW_RTOL: f64 = 1e-12;
/// Largest order the oracle search is asked about.
pub const ORACLE_MAX_ORDER: usize = 32;

/// A linear constitutive law `y = Ax`, with its symmetric part `S` and skew
/// part `W` (`A = S + W`).
#[derive(Debug, Clone)]
pub struct LinearLaw {
    a: DMatrix<f64>,
    s: SymMatrix,
    w: DMatrix<f64>,
}

impl LinearLaw {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if a.nrows() == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let s = SymMatrix::symmetrized(symlin::sym_part(&a));
        let w = symlin::skew_part(&a);
        Ok(Self { a, s, w })
    }

    /// Row-major constructor.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.s
    }

    pub fn skew(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn skew_norm(&self) -> f64 {
        frobenius(&self.w)
    }

    pub fn is_symmetric(&self) -> bool {
        self.skew_norm() <= SKEW_RTOL * frobenius(&self.a).max(1.0)
    }

    pub fn definiteness(&self) -> Definiteness {
        self.s.classify()
    }

    /// Monotone (2-monotone) iff the symmetric part is positive semidefinite.
    pub fn is_monotone(&self) -> bool {
        self.definiteness().is_psd()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x
    }

    pub(crate) fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            })
        }
    }
}

/// `Σ_{i=1..n} ⟨x_{i+1} − x_i, A x_i⟩` with `x_{n+1} = x_1`.
pub fn cycle_sum(law: &LinearLaw, cycle: &[DVector<f64>]) -> Result<f64> {
    if cycle.len() < 2 {
        return Err(Error::InvalidOrder(cycle.len()));
    }
    for x in cycle {
        law.check_dim(x)?;
    }
    let n = cycle.len();
    Ok((0..n)
        .map(|i| {
            let next = &cycle[(i + 1) % n];
            (next - &cycle[i]).dot(&law.apply(&cycle[i]))
        })
        .sum())
}

/// Symmetric matrix `M` of the n-cycle form with `x_n` pinned at the origin:
/// the cycle sum equals `−½ zᵀ M z` for `z = (x_1, …, x_{n−1})`. Diagonal
/// blocks are `2S`, sub-diagonal blocks `−A`, super-diagonal blocks `−Aᵀ`.
/// The law is n-monotone iff `M` is positive semidefinite.
pub fn cycle_form_matrix(law: &LinearLaw, n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let d = law.dim();
    let blocks = n - 1;
    let mut m = DMatrix::zeros(blocks * d, blocks * d);
    let two_s = law.sym().matrix() * 2.0;
    for i in 0..blocks {
        m.view_mut((i * d, i * d), (d, d)).copy_from(&two_s);
        if i + 1 < blocks {
            m.view_mut(((i + 1) * d, i * d), (d, d))
                .copy_from(&(-law.matrix()));
            m.view_mut((i * d, (i + 1) * d), (d, d))
                .copy_from(&(-law.matrix().transpose()));
        }
    }
    Ok(m)
}

/// The real `(2n−2)×(2n−2)` block tridiagonal matrix governing the
/// n-monotonicity of the normalized 2×2 law `I + tJ`: diagonal blocks `2I`,
/// super-diagonal `−I + tJ`, sub-diagonal `−I − tJ`.
pub fn normalized_cycle_matrix(t: f64, n: usize) -> DMatrix<f64> {
    let blocks = n.saturating_sub(1);
    let mut m = DMatrix::zeros(2 * blocks, 2 * blocks);
    for i in 0..blocks {
        let o = 2 * i;
        m[(o, o)] = 2.0;
        m[(o + 1, o + 1)] = 2.0;
        if i + 1 < blocks {
            let p = o + 2;
            // −I + tJ, J = [[0, −1], [1, 0]]
            m[(o, p)] = -1.0;
            m[(o, p + 1)] = -t;
            m[(o + 1, p)] = t;
            m[(o + 1, p + 1)] = -1.0;
            // −I − tJ
            m[(p, o)] = -1.0;
            m[(p, o + 1)] = t;
            m[(p + 1, o)] = -t;
            m[(p + 1, o + 1)] = -1.0;
        }
    }
    m
}

/// Analytic spectrum `2 − 2√(1+t²) cos(kπ/n)`, `k = 1..n−1`, of the
/// Hermitian tridiagonal reduction of [`normalized_cycle_matrix`]. Each value
/// appears twice in the real block matrix.
pub fn normalized_cycle_spectrum(t: f64, n: usize) -> Vec<f64> {
    let rho = (1.0 + t * t).sqrt();
    (1..n)
        .map(|k| 2.0 - 2.0 * rho * (k as f64 * PI / n as f64).cos())
        .collect()
}

/// Characteristic data of a 2×2 law with positive definite symmetric part and
/// skew part `W = rJ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewAngle {
    /// Skew coefficient, `W = [[0, −r], [r, 0]]`.
    pub r: f64,
    /// `t = r / √det S`.
    pub t: f64,
    /// `θ = arctan |t| ∈ (0, π/2)`.
    pub theta: f64,
}

pub fn skew_angle_2x2(law: &LinearLaw) -> Result<SkewAngle> {
    if law.dim() != 2 {
        return Err(Error::NotApplicable(format!(
            "closed-form angle needs a 2x2 law, got dim {}",
            law.dim()
        )));
    }
    if !law.definiteness().is_pd() {
        return Err(Error::NotApplicable(
            "symmetric part is not positive definite".into(),
        ));
    }
    if law.is_symmetric() {
        return Err(Error::NotApplicable(
            "law is symmetric (cyclically monotone)".into(),
        ));
    }
    let r = law.skew()[(1, 0)];
    let s = law.sym().matrix();
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let t = r / det.sqrt();
    Ok(SkewAngle {
        r,
        t,
        theta: t.abs().atan(),
    })
}

/// `max{ n ≥ 2 : nθ ≤ π + τ_ang }` for `θ ∈ (0, π/2]`.
pub fn order_from_angle(theta: f64) -> usize {
    assert!(theta > 0.0, "order_from_angle needs a positive angle");
    let mut n = ((PI + ANGLE_TOL) / theta).floor() as usize;
    while n as f64 * theta > PI + ANGLE_TOL {
        n -= 1;
    }
    while (n + 1) as f64 * theta <= PI + ANGLE_TOL {
        n += 1;
    }
    n.max(2)
}

/// Closed-form n-monotonicity test for 2×2 laws: `nθ ≤ π` (within
/// `τ_ang`). Returns the verdict together with `θ`.
pub fn is_n_monotone_2x2(law: &LinearLaw, n: usize) -> Result<(bool, f64)> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let angle = skew_angle_2x2(law)?;
    Ok((n as f64 * angle.theta <= PI + ANGLE_TOL, angle.theta))
}

/// The two expressions of the third kernel: `S − ¼ Aᵀ S⁻¹ A` and
/// `¾ S − ¼ W S⁻¹ Wᵀ`.
pub fn third_kernel_forms(law: &LinearLaw) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let s_inv = law.sym().inverse()?;
    let s = law.sym().matrix();
    let a = law.matrix();
    let w = law.skew();
    let direct = s - a.transpose() * s_inv.matrix() * a * 0.25;
    let skew_form = s * 0.75 - w * s_inv.matrix() * w.transpose() * 0.25;
    Ok((direct, skew_form))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// n-monotone for this `n` and not for `n + 1`.
    Finite(usize),
    /// n-monotone for every `n ≥ 2`.
    Cyclic,
    /// Not even 2-monotone.
    NotMonotone,
    /// n-monotone at least up to this order; the search gave up there.
    AtLeast(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    ClosedForm,
    HRecursion,
    Oracle,
}

impl Certification {
    pub fn as_str(self) -> &'static str {
        match self {
            Certification::ClosedForm => "closed-form",
            Certification::HRecursion => "H-recursion",
            Certification::Oracle => "oracle",
        }
    }
}

/// Maximal monotonicity order of a law.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxOrder {
    pub order: Order,
    pub certified_by: Certification,
    /// Characteristic angle, when the closed form applies.
    pub theta: Option<f64>,
    /// A cycle of length `n + 1` (or 2 for non-monotone laws) with positive
    /// cycle sum, when one was constructed or found.
    pub witness: Option<Vec<DVector<f64>>>,
    /// True when the last admissible kernel sits exactly on the boundary
    /// (singular but positive semidefinite).
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderOptions {
    pub seed: u64,
    /// Random cycles per oracle query.
    pub trials: usize,
    /// Cap on the number of kernel recursion steps.
    pub max_recursion: usize,
}

impl Default for OrderOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 20_000,
            max_recursion: 4096,
        }
    }
}

/// Builds a violating `m`-cycle from kernels `H_2..H_m` where `H_2..H_{m−1}`
/// are positive definite and `H_m` is not positive semidefinite: with
/// `⟨v, H_m v⟩ < 0`, the chain `z_1 = v`, `z_i = ½ H_{m+1−i}⁻¹ A z_{i−1}`,
/// closed at the origin, has cycle sum `−⟨v, H_m v⟩ > 0`.
pub fn kernel_witness(kernel: &FitzpatrickKernel, m: usize) -> Option<Vec<DVector<f64>>> {
    let law = kernel.law();
    let hm = kernel.h(m)?;
    if hm.classify().is_psd() {
        return None;
    }
    let v = hm.eigenvectors().column(0).into_owned();
    let mut cycle = vec![v];
    for i in 2..m {
        let k = kernel.k_inv(m + 1 - i)?;
        let prev = cycle.last().expect("non-empty");
        let next = k.matrix() * (law.matrix() * prev) * 0.5;
        cycle.push(next);
    }
    cycle.push(DVector::zeros(law.dim()));
    oracle::is_violation(law, &cycle).then_some(cycle)
}

fn indefinite_witness(law: &LinearLaw) -> Vec<DVector<f64>> {
    let v = law.sym().eigenvectors().column(0).into_owned();
    vec![v, DVector::zeros(law.dim())]
}

fn witness_at(
    law: &LinearLaw,
    kernel: Option<&FitzpatrickKernel>,
    m: usize,
    opts: &OrderOptions,
) -> Option<Vec<DVector<f64>>> {
    if let Some(w) = kernel.and_then(|k| kernel_witness(k, m)) {
        return Some(w);
    }
    if m > ORACLE_MAX_ORDER {
        return None;
    }
    oracle::falsify_n_monotone(law, m, opts.trials, opts.seed)
        .ok()
        .flatten()
        .map(|w| w.cycle)
}

/// Maximal monotonicity order of a linear law.
pub fn max_order(law: &LinearLaw, opts: &OrderOptions) -> MaxOrder {
    let def = law.definiteness();
    if def.class == DefinitenessClass::Indefinite {
        return MaxOrder {
            order: Order::NotMonotone,
            certified_by: Certification::ClosedForm,
            theta: None,
            witness: Some(indefinite_witness(law)),
            boundary: false,
        };
    }
    if law.is_symmetric() {
        return MaxOrder {
            order: Order::Cyclic,
            certified_by: Certification::ClosedForm,
            theta: None,
            witness: None,
            boundary: false,
        };
    }
    if !def.is_pd() {
        return max_order_by_oracle(law, opts);
    }
    if law.dim() == 2 {
        let angle = skew_angle_2x2(law).expect("2x2 PD non-symmetric law");
        let n = order_from_angle(angle.theta);
        let kernel = build_kernels(law, n + 1).ok();
        let boundary = (n as f64 * angle.theta - PI).abs() <= ANGLE_TOL;
        return MaxOrder {
            order: Order::Finite(n),
            certified_by: Certification::ClosedForm,
            theta: Some(angle.theta),
            witness: witness_at(law, kernel.as_ref(), n + 1, opts),
            boundary,
        };
    }
    max_order_by_recursion(law, opts)
}

fn max_order_by_recursion(law: &LinearLaw, opts: &OrderOptions) -> MaxOrder {
    let cap = opts.max_recursion.max(3);
    let kernel = build_kernels(law, cap).expect("symmetric part is positive definite");
    let last = kernel.last_index();
    let order = match kernel.status(last) {
        KernelStatus::PositiveDefinite => {
            // every kernel up to the cap is positive definite
            return MaxOrder {
                order: Order::AtLeast(last),
                certified_by: Certification::HRecursion,
                theta: None,
                witness: None,
                boundary: false,
            };
        }
        // boundary: H_last singular PSD, the cycle form is still PSD
        KernelStatus::PsdSingular => last,
        KernelStatus::Failed => last - 1,
    };
    MaxOrder {
        order: Order::Finite(order),
        certified_by: Certification::HRecursion,
        theta: None,
        witness: witness_at(law, Some(&kernel), order + 1, opts),
        boundary: kernel.status(order) == KernelStatus::PsdSingular,
    }
}

fn max_order_by_oracle(law: &LinearLaw, opts: &OrderOptions) -> MaxOrder {
    for m in 3..=ORACLE_MAX_ORDER {
        if let Ok(Some(w)) = oracle::falsify_n_monotone(law, m, opts.trials, opts.seed) {
            return MaxOrder {
                order: Order::Finite(m - 1),
                certified_by: Certification::Oracle,
                theta: None,
                witness: Some(w.cycle),
                boundary: false,
            };
        }
    }
    MaxOrder {
        order: Order::AtLeast(ORACLE_MAX_ORDER),
        certified_by: Certification::Oracle,
        theta: None,
        witness: None,
        boundary: false,
    }
}
