//! Fitzpatrick kernels and the Fitzpatrick sequence of a linear law.
//!
//! For a strictly n-monotone law,
//! `F_{A,n}(x, y) = ⟨x, y⟩ + ¼ ⟨y − Ax, H_n⁻¹ (y − Ax)⟩` with
//! `H_2 = S` and `H_{k+1} = S − ¼ Aᵀ H_k⁻¹ A`.

use nalgebra::{DMatrix, DVector};

use crate::monotone::LinearLaw;
use crate::symlin::{frobenius, DefinitenessClass, SymMatrix};
use crate::{Error, Result, SeqIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelStatus {
    PositiveDefinite,
    /// Positive semidefinite but singular: evaluation uses the pseudo-inverse
    /// and a range indicator.
    PsdSingular,
    /// Indefinite, or not computable because an earlier kernel was singular.
    Failed,
}

impl KernelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelStatus::PositiveDefinite => "PD",
            KernelStatus::PsdSingular => "PSD-singular",
            KernelStatus::Failed => "failed",
        }
    }

    fn from_class(class: DefinitenessClass) -> Self {
        match class {
            DefinitenessClass::PositiveDefinite => KernelStatus::PositiveDefinite,
            DefinitenessClass::PositiveSemidefinite => KernelStatus::PsdSingular,
            DefinitenessClass::Indefinite => KernelStatus::Failed,
        }
    }
}

#[derive(Debug, Clone)]
struct Step {
    h: SymMatrix,
    status: KernelStatus,
    inv: Option<SymMatrix>,
}

/// Kernels `H_2, …` of a law, up to the requested order or the first kernel
/// that is not positive definite.
#[derive(Debug, Clone)]
pub struct FitzpatrickKernel {
    law: LinearLaw,
    requested: usize,
    steps: Vec<Step>,
}

impl FitzpatrickKernel {
    pub fn law(&self) -> &LinearLaw {
        &self.law
    }

    pub fn requested_order(&self) -> usize {
        self.requested
    }

    /// Index of the last computed kernel.
    pub fn last_index(&self) -> usize {
        self.steps.len() + 1
    }

    /// First index whose kernel is not positive definite, if any.
    pub fn stop_index(&self) -> Option<usize> {
        self.steps
            .iter()
            .position(|s| s.status != KernelStatus::PositiveDefinite)
            .map(|i| i + 2)
    }

    /// Status of `H_k`; anything not computed reports `Failed`.
    pub fn status(&self, k: usize) -> KernelStatus {
        self.step(k).map_or(KernelStatus::Failed, |s| s.status)
    }

    pub fn statuses(&self) -> Vec<(usize, KernelStatus)> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| (i + 2, s.status))
            .collect()
    }

    fn step(&self, k: usize) -> Option<&Step> {
        k.checked_sub(2).and_then(|i| self.steps.get(i))
    }

    pub fn h(&self, k: usize) -> Option<&SymMatrix> {
        self.step(k).map(|s| &s.h)
    }

    /// `K_k = H_k⁻¹`, available when `H_k` is positive definite.
    pub fn k_inv(&self, k: usize) -> Option<&SymMatrix> {
        self.step(k).and_then(|s| s.inv.as_ref())
    }

    /// Largest order at which `F_{A,n}` is evaluable.
    pub fn max_evaluable(&self) -> usize {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.status != KernelStatus::Failed)
            .map(|(i, _)| i + 2)
            .max()
            .unwrap_or(1)
    }

    pub fn eval(&self, n: usize, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        eval_f(self, n, x, y)
    }

    fn failed(&self, n: usize) -> Error {
        Error::KernelFailed {
            order: n,
            stop_index: self.stop_index().unwrap_or(self.last_index() + 1),
        }
    }
}

/// Runs the kernel recursion up to order `n`.
///
/// The symmetric part must be positive definite. A singular positive
/// semidefinite symmetric part is accepted for `n = 2` only, where the
/// kernel `H_2 = S` is marked [`KernelStatus::PsdSingular`].
pub fn build_kernels(law: &LinearLaw, n: usize) -> Result<FitzpatrickKernel> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let def = law.definiteness();
    let first = match def.class {
        DefinitenessClass::PositiveDefinite => KernelStatus::PositiveDefinite,
        DefinitenessClass::PositiveSemidefinite if n == 2 => KernelStatus::PsdSingular,
        _ => return Err(Error::NotStrictlyMonotone),
    };
    let s = law.sym().clone();
    let inv = s.inverse().ok();
    let mut steps = vec![Step {
        h: s,
        status: first,
        inv,
    }];
    let a = law.matrix();
    while steps.len() + 1 < n {
        let last = steps.last().expect("non-empty");
        let Some(k) = last.inv.as_ref() else {
            break;
        };
        let next = law.sym().matrix() - a.transpose() * k.matrix() * a * 0.25;
        let h = SymMatrix::symmetrized(next);
        let status = KernelStatus::from_class(h.classify().class);
        let inv = match status {
            KernelStatus::PositiveDefinite => h.inverse().ok(),
            _ => None,
        };
        steps.push(Step { h, status, inv });
    }
    Ok(FitzpatrickKernel {
        law: law.clone(),
        requested: n,
        steps,
    })
}

/// `F_{A,n}(x, y)`; `+∞` outside the domain when `H_n` is singular.
pub fn eval_f(
    kernel: &FitzpatrickKernel,
    n: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    let law = kernel.law();
    law.check_dim(x)?;
    law.check_dim(y)?;
    let step = kernel.step(n).ok_or_else(|| kernel.failed(n))?;
    let u = y - law.apply(x);
    let dual = x.dot(y);
    match step.status {
        KernelStatus::PositiveDefinite => {
            let k = step.inv.as_ref().expect("PD kernel has an inverse");
            Ok(dual + 0.25 * u.dot(&(k.matrix() * &u)))
        }
        KernelStatus::PsdSingular => {
            let sol = step.h.solve_or_pinv(&u)?;
            if sol.in_range {
                Ok(dual + 0.25 * sol.solution.dot(&u))
            } else {
                Ok(f64::INFINITY)
            }
        }
        KernelStatus::Failed => Err(kernel.failed(n)),
    }
}

/// `F_{A,n}` with `n = ∞` allowed. The limit exists only for symmetric laws,
/// where it is the separable bipotential `φ(x) + φ*(y)`.
pub fn eval_f_indexed(
    kernel: &FitzpatrickKernel,
    n: SeqIndex,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    match n {
        SeqIndex::Finite(n) => eval_f(kernel, n, x, y),
        SeqIndex::Infinite => {
            let law = kernel.law();
            if !law.is_symmetric() {
                return Err(Error::NotCyclic);
            }
            law.check_dim(x)?;
            law.check_dim(y)?;
            let phi = QuadraticPotential::new(law.sym().clone())?;
            Ok(phi.separable(x, y))
        }
    }
}

/// Closed form for a symmetric positive definite law:
/// `⟨x, y⟩ + (1 − 1/n) · ½ ⟨y − Sx, S⁻¹ (y − Sx)⟩`, and `φ(x) + φ*(y)` at
/// `n = ∞`.
pub fn eval_f_symmetric(
    s: &SymMatrix,
    n: SeqIndex,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let phi = QuadraticPotential::new(s.clone())?;
    phi.check_dim(x)?;
    phi.check_dim(y)?;
    match n {
        SeqIndex::Finite(n) if n < 2 => Err(Error::InvalidOrder(n)),
        SeqIndex::Finite(n) => {
            let u = y - s.matrix() * x;
            let q = phi.s_inv.quad_form(&u);
            Ok(x.dot(y) + (1.0 - 1.0 / n as f64) * 0.5 * q)
        }
        SeqIndex::Infinite => Ok(phi.separable(x, y)),
    }
}

/// Residual of the general recursion identity
/// `K_{n+1} = K_n + (I − ½ K_n A) K_{n+1} (I − ½ Aᵀ K_n)`, `K_m = H_m⁻¹`.
pub fn check_recursion(kernel: &FitzpatrickKernel, n: usize) -> Result<f64> {
    let (Some(kn), Some(kn1)) = (kernel.k_inv(n), kernel.k_inv(n + 1)) else {
        return Err(kernel.failed(n + 1));
    };
    let a = kernel.law().matrix();
    let id = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    let left = &id - kn.matrix() * a * 0.5;
    let right = &id - a.transpose() * kn.matrix() * 0.5;
    let rhs = kn.matrix() + left * kn1.matrix() * right;
    Ok(frobenius(&(kn1.matrix() - rhs)))
}

/// `φ(x) = ½ ⟨x, Sx⟩` with `S` positive definite, and its conjugate
/// `φ*(y) = ½ ⟨y, S⁻¹ y⟩`.
#[derive(Debug, Clone)]
pub struct QuadraticPotential {
    s: SymMatrix,
    s_inv: SymMatrix,
}

impl QuadraticPotential {
    pub fn new(s: SymMatrix) -> Result<Self> {
        let s_inv = s.inverse()?;
        Ok(Self { s, s_inv })
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn stiffness(&self) -> &SymMatrix {
        &self.s
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * self.s.quad_form(x)
    }

    pub fn conjugate(&self, y: &DVector<f64>) -> f64 {
        0.5 * self.s_inv.quad_form(y)
    }

    /// `φ(x) + φ*(y)`.
    pub fn separable(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.value(x) + self.conjugate(y)
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
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

pub fn separable_bipotential(
    phi: &QuadraticPotential,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    phi.check_dim(x)?;
    phi.check_dim(y)?;
    Ok(phi.separable(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn law(dim: usize, rows: &[f64]) -> LinearLaw {
        LinearLaw::from_row_slice(dim, rows).unwrap()
    }

    #[test]
    fn identity_kernels_follow_alpha() {
        let k = build_kernels(&law(2, &[1.0, 0.0, 0.0, 1.0]), 4).unwrap();
        for (n, alpha) in [(2, 1.0), (3, 0.75), (4, 2.0 / 3.0)] {
            let expected = DMatrix::<f64>::identity(2, 2) * alpha;
            assert!(
                (k.h(n).unwrap().matrix() - expected).amax() < 1e-15,
                "H_{n}"
            );
        }
        assert_eq!(k.stop_index(), None);
        assert_eq!(k.max_evaluable(), 4);
    }

    #[test]
    fn symmetric_kernel_is_proportional() {
        let l = law(2, &[2.0, 0.5, 0.5, 1.0]);
        let k = build_kernels(&l, 3).unwrap();
        let expected = l.sym().matrix() * 0.75;
        assert!((k.h(3).unwrap().matrix() - expected).amax() < 1e-14);
    }

    #[test]
    fn rotation_law_stops_at_boundary() {
        let k = build_kernels(&law(2, &[1.0, -1.0, 1.0, 1.0]), 5).unwrap();
        assert_eq!(k.status(3), KernelStatus::PositiveDefinite);
        assert_eq!(k.status(4), KernelStatus::PsdSingular);
        assert_eq!(k.status(5), KernelStatus::Failed);
        assert_eq!(k.stop_index(), Some(4));
        let x = dvector![0.0, 0.0];
        assert!(matches!(
            eval_f(&k, 5, &x, &dvector![1.0, 0.0]),
            Err(Error::KernelFailed {
                order: 5,
                stop_index: 4
            })
        ));
        // boundary kernel vanishes: F_4 is the indicator of the graph
        assert_eq!(
            eval_f(&k, 4, &x, &dvector![1.0, 0.0]).unwrap(),
            f64::INFINITY
        );
        let p = dvector![0.3, 0.2];
        let q = k.law().apply(&p);
        assert_eq!(eval_f(&k, 4, &p, &q).unwrap(), p.dot(&q));
    }

    #[test]
    fn build_kernels_errors() {
        assert!(matches!(
            build_kernels(&law(2, &[1.0, 0.0, 0.0, 1.0]), 1),
            Err(Error::InvalidOrder(1))
        ));
        assert!(matches!(
            build_kernels(&law(2, &[1.0, 0.0, 0.0, -1.0]), 2),
            Err(Error::NotStrictlyMonotone)
        ));
        assert!(matches!(
            build_kernels(&law(2, &[1.0, -0.5, 0.5, 0.0]), 3),
            Err(Error::NotStrictlyMonotone)
        ));
    }

    #[test]
    fn eval_identity_law() {
        let k = build_kernels(&law(2, &[1.0, 0.0, 0.0, 1.0]), 2).unwrap();
        let v = eval_f(&k, 2, &dvector![0.0, 0.0], &dvector![2.0, 0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn semidefinite_first_function() {
        let k = build_kernels(&law(2, &[1.0, 0.0, 0.0, 0.0]), 2).unwrap();
        assert_eq!(k.status(2), KernelStatus::PsdSingular);
        let x = dvector![0.0, 0.0];
        assert_eq!(
            eval_f(&k, 2, &x, &dvector![0.0, 1.0]).unwrap(),
            f64::INFINITY
        );
        let v = eval_f(&k, 2, &x, &dvector![1.0, 0.0]).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        // same value through the pseudo-inverse: ¼⟨y, S⁺ y⟩
        let y = dvector![1.0, 0.0];
        let pinv = k.h(2).unwrap().pinv();
        assert!((0.25 * pinv.quad_form(&y) - v).abs() < 1e-15);
    }

    #[test]
    fn graph_points_are_exact() {
        let l = law(3, &[2.0, -1.0, 0.3, 0.5, 1.0, 0.2, -0.4, 0.1, 3.0]);
        let k = build_kernels(&l, 3).unwrap();
        let x = dvector![0.4, -1.3, 2.2];
        let y = l.apply(&x);
        for n in 2..=k.max_evaluable() {
            assert_eq!(eval_f(&k, n, &x, &y).unwrap(), x.dot(&y));
        }
    }

    #[test]
    fn symmetric_closed_form() {
        let id = SymMatrix::identity(2);
        let v = eval_f_symmetric(
            &id,
            SeqIndex::Finite(2),
            &dvector![0.0, 0.0],
            &dvector![2.0, 0.0],
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let x = dvector![1.0, 0.0];
        let v = eval_f_symmetric(&id, SeqIndex::Infinite, &x, &x).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(matches!(
            eval_f_symmetric(
                &SymMatrix::from_diagonal(&[1.0, 0.0]),
                SeqIndex::Finite(2),
                &x,
                &x
            ),
            Err(Error::NotPd { .. })
        ));
    }

    #[test]
    fn symmetric_closed_form_matches_kernels() {
        let s = SymMatrix::from_diagonal(&[2.0, 1.0]);
        let k = build_kernels(&LinearLaw::new(s.matrix().clone()).unwrap(), 3).unwrap();
        let x = dvector![0.3, -1.7];
        let y = dvector![1.1, 0.4];
        let a = eval_f_symmetric(&s, SeqIndex::Finite(3), &x, &y).unwrap();
        let b = eval_f(&k, 3, &x, &y).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn infinite_order_needs_symmetry() {
        let k = build_kernels(&law(2, &[1.0, -0.2, 0.2, 1.0]), 2).unwrap();
        let x = dvector![1.0, 0.0];
        assert!(matches!(
            eval_f_indexed(&k, SeqIndex::Infinite, &x, &x),
            Err(Error::NotCyclic)
        ));
        let k = build_kernels(&law(2, &[1.0, 0.0, 0.0, 1.0]), 2).unwrap();
        let y = dvector![0.0, 1.0];
        assert!((eval_f_indexed(&k, SeqIndex::Infinite, &x, &y).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recursion_identity_examples() {
        let k = build_kernels(&law(2, &[1.0, 0.0, 0.0, 1.0]), 3).unwrap();
        assert!(
            (k.k_inv(3).unwrap().matrix() - DMatrix::<f64>::identity(2, 2) * (4.0 / 3.0)).amax()
                < 1e-15
        );
        assert!(check_recursion(&k, 2).unwrap() < 1e-12);

        let s = dmatrix![3.0, 1.0, 0.0; 1.0, 2.0, 0.5; 0.0, 0.5, 1.5];
        let k = build_kernels(&LinearLaw::new(s).unwrap(), 4).unwrap();
        assert!(check_recursion(&k, 3).unwrap() <= 1e-10);
        assert!(matches!(
            check_recursion(&k, 4),
            Err(Error::KernelFailed { .. })
        ));
    }

    #[test]
    fn separable_examples() {
        let phi = QuadraticPotential::new(SymMatrix::identity(2)).unwrap();
        let v = separable_bipotential(&phi, &dvector![1.0, 0.0], &dvector![0.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let x = dvector![0.3, -2.0];
        assert!((phi.separable(&x, &x) - x.dot(&x)).abs() < 1e-14);

        let s = SymMatrix::from_diagonal(&[4.0, 1.0]);
        let phi = QuadraticPotential::new(s.clone()).unwrap();
        let (x, y) = (dvector![1.0, 1.0], dvector![2.0, 3.0]);
        let v = phi.separable(&x, &y);
        assert!((v - 7.5).abs() < 1e-14);
        let approx = eval_f_symmetric(&s, SeqIndex::Finite(1_000_000), &x, &y).unwrap();
        assert!((approx - v).abs() < 1e-4);
        assert!(QuadraticPotential::new(SymMatrix::from_diagonal(&[1.0, 0.0])).is_err());
    }
}
