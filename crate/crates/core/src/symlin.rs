//! Symmetric linear-algebra kernel.
//!
//! Every derived quantity (square root, inverse, pseudo-inverse, definiteness)
//! comes from one cached eigendecomposition, so all of them share a single
//! tolerance regime.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::{Error, Result};

/// Relative symmetry tolerance: `‖M − Mᵀ‖ ≤ 1e-12 · max(1, ‖M‖)`.
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// Definiteness threshold `τ_pd`, scaled by `max(1, λ_max)`.
pub const PD_TOL: f64 = 1e-10;
/// Least-squares residual bound for range membership, scaled by `max(1, ‖b‖)`.
pub const RANGE_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinitenessClass {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Definiteness {
    pub class: DefinitenessClass,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl Definiteness {
    pub fn is_pd(&self) -> bool {
        self.class == DefinitenessClass::PositiveDefinite
    }

    /// True for both positive definite and positive semidefinite.
    pub fn is_psd(&self) -> bool {
        self.class != DefinitenessClass::Indefinite
    }
}

/// Result of [`SymMatrix::solve_or_pinv`].
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSolve {
    /// Minimum-norm least-squares solution.
    pub solution: DVector<f64>,
    /// Whether `b` lies in the range of the matrix.
    pub in_range: bool,
    pub residual: f64,
}

/// A dense real symmetric matrix together with its eigendecomposition
/// (eigenvalues ascending).
#[derive(Debug, Clone)]
pub struct SymMatrix {
    entries: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl PartialEq for SymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

/// Frobenius norm.
pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

impl SymMatrix {
    /// Wraps `m` after checking that it is square and symmetric within
    /// `1e-12 · max(1, ‖m‖)`. The stored entries are the exact symmetric
    /// part of `m`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let defect = frobenius(&(&m - m.transpose()));
        let tol = SYMMETRY_RTOL * frobenius(&m).max(1.0);
        if defect > tol {
            return Err(Error::NonSymmetric { defect, tol });
        }
        Ok(Self::symmetrized(m))
    }

    /// Builds from `½(m + mᵀ)` without a symmetry check. Used for matrices
    /// that are symmetric in exact arithmetic but carry rounding asymmetry.
    pub fn symmetrized(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetrized: matrix must be square");
        let entries = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(entries.clone());
        let n = entries.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i))
                .collect::<Vec<_>>(),
        );
        Self {
            entries,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::symmetrized(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::symmetrized(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors, column `i` pairs with eigenvalue `i`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.entries)
    }

    /// `⟨x, M x⟩`.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.entries * x))
    }

    /// Applies `f` to each eigenvalue: `Q f(Λ) Qᵀ`.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&self.eigenvalues.map(f));
        q * d * q.transpose()
    }

    /// `Q Λ Qᵀ`; reproduces the entries within `1e-10 · ‖M‖`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.spectral_map(|l| l)
    }

    fn zero_cutoff(&self) -> f64 {
        PD_TOL
            * self
                .max_eigenvalue()
                .abs()
                .max(self.min_eigenvalue().abs())
                .max(1.0)
    }

    pub fn classify(&self) -> Definiteness {
        let lmin = self.min_eigenvalue();
        let lmax = self.max_eigenvalue();
        let scale = lmax.max(1.0);
        let class = if lmin > PD_TOL * scale {
            DefinitenessClass::PositiveDefinite
        } else if lmin >= -PD_TOL * scale {
            DefinitenessClass::PositiveSemidefinite
        } else {
            DefinitenessClass::Indefinite
        };
        Definiteness {
            class,
            min_eigenvalue: lmin,
            max_eigenvalue: lmax,
        }
    }

    /// Positive semidefinite square root. Eigenvalues inside the PSD
    /// tolerance band are clamped to zero.
    pub fn sqrt_psd(&self) -> Result<SymMatrix> {
        let def = self.classify();
        if !def.is_psd() {
            return Err(Error::NotPsd {
                min_eigenvalue: def.min_eigenvalue,
            });
        }
        Ok(Self::symmetrized(self.spectral_map(|l| l.max(0.0).sqrt())))
    }

    pub fn inverse(&self) -> Result<SymMatrix> {
        self.require_pd()?;
        Ok(Self::symmetrized(self.spectral_map(|l| 1.0 / l)))
    }

    /// `M^{-1/2}` for positive definite `M`.
    pub fn inv_sqrt(&self) -> Result<SymMatrix> {
        self.require_pd()?;
        Ok(Self::symmetrized(self.spectral_map(|l| 1.0 / l.sqrt())))
    }

    /// Moore–Penrose pseudo-inverse, dropping eigenvalues within the
    /// definiteness tolerance of zero.
    pub fn pinv(&self) -> SymMatrix {
        let cut = self.zero_cutoff();
        Self::symmetrized(self.spectral_map(|l| if l.abs() <= cut { 0.0 } else { 1.0 / l }))
    }

    fn require_pd(&self) -> Result<()> {
        let def = self.classify();
        if def.is_pd() {
            Ok(())
        } else {
            Err(Error::NotPd {
                min_eigenvalue: def.min_eigenvalue,
            })
        }
    }

    /// Solves `M ξ = b` in the least-squares sense with the minimum-norm
    /// solution. `in_range` holds when the residual is at most
    /// `1e-8 · max(1, ‖b‖)`.
    pub fn solve_or_pinv(&self, b: &DVector<f64>) -> Result<RangeSolve> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: b.len(),
            });
        }
        let cut = self.zero_cutoff();
        let coeffs = self.eigenvectors.transpose() * b;
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(self.eigenvalues.iter()).map(|(&c, &l)| {
                if l.abs() <= cut {
                    0.0
                } else {
                    c / l
                }
            }),
        );
        let solution = &self.eigenvectors * scaled;
        let residual = (&self.entries * &solution - b).norm();
        let in_range = residual <= RANGE_RTOL * b.norm().max(1.0);
        Ok(RangeSolve {
            solution,
            in_range,
            residual,
        })
    }
}

/// Classifies a raw matrix, rejecting it when it is not symmetric.
pub fn classify(m: &DMatrix<f64>) -> Result<Definiteness> {
    Ok(SymMatrix::new(m.clone())?.classify())
}

/// Symmetric part `½(A + Aᵀ)`.
pub fn sym_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Skew part `½(A − Aᵀ)`.
pub fn skew_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a - a.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    #[test]
    fn classify_basic_cases() {
        let id = SymMatrix::identity(2).classify();
        assert_eq!(id.class, DefinitenessClass::PositiveDefinite);
        assert_eq!(id.min_eigenvalue, 1.0);
        assert_eq!(id.max_eigenvalue, 1.0);
        assert_eq!(
            SymMatrix::from_diagonal(&[1.0, 0.0]).classify().class,
            DefinitenessClass::PositiveSemidefinite
        );
        assert_eq!(
            SymMatrix::from_diagonal(&[1.0, -1.0]).classify().class,
            DefinitenessClass::Indefinite
        );
    }

    #[test]
    fn rejects_non_symmetric() {
        let err = SymMatrix::new(dmatrix![1.0, 2.0; 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonSymmetric { .. }));
        assert!(classify(&dmatrix![1.0, 1e-3; 0.0, 1.0]).is_err());
        // rounding-level asymmetry is accepted
        assert!(classify(&dmatrix![1.0, 1e-14; 0.0, 1.0]).is_ok());
    }

    #[test]
    fn sqrt_of_diagonal_and_identity() {
        let r = SymMatrix::from_diagonal(&[4.0, 9.0]).sqrt_psd().unwrap();
        assert!((r.matrix() - dmatrix![2.0, 0.0; 0.0, 3.0]).norm() < 1e-14);
        let r = SymMatrix::identity(3).sqrt_psd().unwrap();
        assert!((r.matrix() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
        assert!(matches!(
            SymMatrix::from_diagonal(&[1.0, -1.0]).sqrt_psd(),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn solve_or_pinv_cases() {
        let m = SymMatrix::from_diagonal(&[1.0, 0.0]);
        let r = m.solve_or_pinv(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!(r.in_range);
        assert!((r.solution - DVector::from_vec(vec![1.0, 0.0])).norm() < 1e-15);

        let r = m.solve_or_pinv(&DVector::from_vec(vec![0.0, 1.0])).unwrap();
        assert!(!r.in_range);

        let b = DVector::from_vec(vec![0.3, -2.0, 7.5]);
        let r = SymMatrix::identity(3).solve_or_pinv(&b).unwrap();
        assert!(r.in_range);
        assert!((r.solution - b).norm() < 1e-14);

        assert!(matches!(
            m.solve_or_pinv(&DVector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_requires_pd() {
        assert!(SymMatrix::from_diagonal(&[1.0, 0.0]).inverse().is_err());
        let inv = SymMatrix::from_diagonal(&[2.0, 4.0]).inverse().unwrap();
        assert!((inv.matrix() - dmatrix![0.5, 0.0; 0.0, 0.25]).norm() < 1e-15);
    }

    fn random_matrix(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
        prop::collection::vec(-3.0f64..3.0, dim * dim)
            .prop_map(move |v| DMatrix::from_row_slice(dim, dim, &v))
    }

    fn orthogonal(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
        random_matrix(dim).prop_map(move |m| {
            let qr = (m + DMatrix::identity(dim, dim) * 1e-3).qr();
            qr.q()
        })
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(b in (1usize..6).prop_flat_map(random_matrix), rank_cut in 0usize..3) {
            // PSD with possibly reduced rank
            let mut g = &b * b.transpose();
            let n = g.nrows();
            if rank_cut > 0 && n > rank_cut {
                let p = b.columns(0, n - rank_cut).into_owned();
                g = &p * p.transpose();
            }
            let m = SymMatrix::new(g.clone()).unwrap();
            let r = m.sqrt_psd().unwrap();
            let err = (r.matrix() * r.matrix() - &g).norm();
            prop_assert!(err <= 1e-9 * g.norm().max(1.0), "err {err}");
            prop_assert!(r.classify().is_psd());
        }

        #[test]
        fn eigendecomposition_reproduces(m in (1usize..7).prop_flat_map(random_matrix)) {
            let s = SymMatrix::new(sym_part(&m)).unwrap();
            let err = (s.reconstruct() - s.matrix()).norm();
            prop_assert!(err <= 1e-10 * s.norm().max(1.0));
        }

        #[test]
        fn classification_invariant_under_conjugation(
            (m, q) in (1usize..6).prop_flat_map(|d| (random_matrix(d), orthogonal(d)))
        ) {
            let s = SymMatrix::new(sym_part(&m)).unwrap();
            let t = SymMatrix::new(q.transpose() * s.matrix() * &q).unwrap();
            let (a, b) = (s.classify(), t.classify());
            prop_assert_eq!(a.class, b.class);
            for (x, y) in s.eigenvalues().iter().zip(t.eigenvalues().iter()) {
                prop_assert!((x - y).abs() <= 1e-9 * s.norm().max(1.0));
            }
        }

        #[test]
        fn in_range_solutions_have_small_residual(
            (b, v) in (1usize..6).prop_flat_map(|d| (random_matrix(d), prop::collection::vec(-5.0f64..5.0, d)))
        ) {
            let n = b.nrows();
            let p = b.columns(0, n.div_ceil(2)).into_owned();
            let m = SymMatrix::new(&p * p.transpose()).unwrap();
            let rhs = DVector::from_vec(v);
            let r = m.solve_or_pinv(&rhs).unwrap();
            if r.in_range {
                prop_assert!((m.matrix() * &r.solution - &rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
            }
            // anything built from the range is in range
            let inside = m.matrix() * &rhs;
            prop_assert!(m.solve_or_pinv(&inside).unwrap().in_range);
        }
    }
}
