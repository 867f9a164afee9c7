//! Bipotentials and a sampling validator for their axioms, plus the
//! Cauchy–Schwarz sequence `b_n(x, y) = ‖x‖‖y‖ cosⁿ(ψ/n)`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::Serialize;

use crate::fitzpatrick::{self, FitzpatrickKernel, QuadraticPotential};
use crate::{Error, Result, SeqIndex};

/// Relative slack for the sampled inequalities.
pub const AXIOM_RTOL: f64 = 1e-9;

/// Extended-real map `b(x, y)` on `R^d × R^d`.
pub trait Bipotential: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64>;
}

/// `b_n(x, y) = ‖x‖‖y‖ cosⁿ(ψ/n)`; `b_∞ = ‖x‖‖y‖`.
pub fn eval_cs(n: SeqIndex, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let (nx, ny) = (x.norm(), y.norm());
    if nx == 0.0 || ny == 0.0 {
        return Ok(0.0);
    }
    let n = match n {
        SeqIndex::Infinite => return Ok(nx * ny),
        SeqIndex::Finite(n) if n >= 2 => n,
        SeqIndex::Finite(n) => return Err(Error::InvalidOrder(n)),
    };
    let (ux, uy) = (x / nx, y / ny);
    let psi = 2.0 * (&ux - &uy).norm().atan2((&ux + &uy).norm());
    Ok(nx * ny * (psi / n as f64).cos().powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarz {
    pub order: SeqIndex,
    pub dim: usize,
}

impl Bipotential for CauchySchwarz {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        eval_cs(self.order, x, y)
    }
}

/// `φ(x) + φ*(y)` for a quadratic potential.
#[derive(Debug, Clone)]
pub struct Separable(pub QuadraticPotential);

impl Bipotential for Separable {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        fitzpatrick::separable_bipotential(&self.0, x, y)
    }
}

/// `F_{A,n}` backed by precomputed kernels.
#[derive(Debug, Clone)]
pub struct Fitzpatrick {
    pub kernel: FitzpatrickKernel,
    pub order: usize,
}

impl Bipotential for Fitzpatrick {
    fn dim(&self) -> usize {
        self.kernel.law().dim()
    }

    fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        fitzpatrick::eval_f(&self.kernel, self.order, x, y)
    }
}

/// Wraps a plain closure.
pub struct FnBipotential<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> Bipotential for FnBipotential<F>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        Ok((self.f)(x, y))
    }
}

/// Distribution of the sample points, applied coordinatewise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Sampler {
    Gaussian { std_dev: f64 },
    Uniform { half_width: f64 },
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::Gaussian { std_dev: 1.0 }
    }
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
        match *self {
            Sampler::Gaussian { std_dev } => {
                let d = Normal::new(0.0, std_dev).expect("finite positive std_dev");
                DVector::from_fn(dim, |_, _| d.sample(rng))
            }
            Sampler::Uniform { half_width } => {
                let d = Uniform::new_inclusive(-half_width, half_width).expect("finite half_width");
                DVector::from_fn(dim, |_, _| d.sample(rng))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x2: Option<Vec<f64>>,
    pub y2: Option<Vec<f64>>,
    pub margin: f64,
}

/// Outcome of one axiom over all samples. `worst_margin` is the smallest
/// observed slack (negative on violation) among comparisons with finite
/// values; `skipped` counts comparisons decided by an infinite value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub checked: usize,
    pub skipped: usize,
    pub worst_margin: f64,
    pub counterexample: Option<Counterexample>,
}

impl AxiomCheck {
    fn new() -> Self {
        Self {
            passed: true,
            checked: 0,
            skipped: 0,
            worst_margin: f64::INFINITY,
            counterexample: None,
        }
    }

    fn record(&mut self, margin: f64, scale: f64, witness: impl FnOnce(f64) -> Counterexample) {
        self.checked += 1;
        if margin.is_nan() || margin == f64::INFINITY {
            self.skipped += 1;
            return;
        }
        let violated = margin < -AXIOM_RTOL * scale.max(1.0);
        if margin < self.worst_margin {
            self.worst_margin = margin;
            if violated {
                self.counterexample = Some(witness(margin));
            }
        }
        if violated {
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub seed: u64,
    pub lower_bound: AxiomCheck,
    pub convex_in_x: AxiomCheck,
    pub convex_in_y: AxiomCheck,
    /// Midpoint convexity in `(x, y)` jointly; implies the two partial checks
    /// for convex functions but is reported separately.
    pub joint_convexity: AxiomCheck,
}

impl AxiomReport {
    /// All three axioms held on every sample. Joint convexity is not an axiom.
    pub fn passed(&self) -> bool {
        self.lower_bound.passed && self.convex_in_x.passed && self.convex_in_y.passed
    }
}

fn v(x: &DVector<f64>) -> Vec<f64> {
    x.iter().copied().collect()
}

/// Midpoint slack `½(f(a) + f(b)) − f(mid)`; `+∞` when either endpoint is
/// `+∞`, `−∞` when only the midpoint is.
fn midpoint_margin(fa: f64, fb: f64, fm: f64) -> f64 {
    if fa == f64::INFINITY || fb == f64::INFINITY {
        f64::INFINITY
    } else if fm == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        0.5 * (fa + fb) - fm
    }
}

/// Samples `count` quadruples `(x₁, x₂, y₁, y₂)` and checks
/// `b(x₁, y₁) ≥ ⟨x₁, y₁⟩` and midpoint convexity in `x`, in `y` and jointly.
/// A pass means no counterexample among the samples, nothing more.
pub fn validate_axioms(
    b: &dyn Bipotential,
    sampler: &Sampler,
    count: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if count == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    let d = b.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        samples: count,
        seed,
        lower_bound: AxiomCheck::new(),
        convex_in_x: AxiomCheck::new(),
        convex_in_y: AxiomCheck::new(),
        joint_convexity: AxiomCheck::new(),
    };
    for _ in 0..count {
        let x1 = sampler.draw(&mut rng, d);
        let x2 = sampler.draw(&mut rng, d);
        let y1 = sampler.draw(&mut rng, d);
        let y2 = sampler.draw(&mut rng, d);
        let xm = (&x1 + &x2) * 0.5;
        let ym = (&y1 + &y2) * 0.5;

        let b11 = b.eval(&x1, &y1)?;
        let b21 = b.eval(&x2, &y1)?;
        let b12 = b.eval(&x1, &y2)?;
        let b22 = b.eval(&x2, &y2)?;
        let bm1 = b.eval(&xm, &y1)?;
        let b1m = b.eval(&x1, &ym)?;
        let bmm = b.eval(&xm, &ym)?;

        let pair = x1.dot(&y1);
        let scale = (x1.norm() * y1.norm()).max(b11.abs().min(f64::MAX));
        report
            .lower_bound
            .record(b11 - pair, scale, |margin| Counterexample {
                x: v(&x1),
                y: v(&y1),
                x2: None,
                y2: None,
                margin,
            });

        let finite_scale = |vals: &[f64]| {
            vals.iter()
                .filter(|t| t.is_finite())
                .fold(0f64, |m, t| m.max(t.abs()))
        };
        let m = midpoint_margin(b11, b21, bm1);
        report
            .convex_in_x
            .record(m, finite_scale(&[b11, b21, bm1]), |margin| Counterexample {
                x: v(&x1),
                y: v(&y1),
                x2: Some(v(&x2)),
                y2: None,
                margin,
            });
        let m = midpoint_margin(b11, b12, b1m);
        report
            .convex_in_y
            .record(m, finite_scale(&[b11, b12, b1m]), |margin| Counterexample {
                x: v(&x1),
                y: v(&y1),
                x2: None,
                y2: Some(v(&y2)),
                margin,
            });
        let m = midpoint_margin(b11, b22, bmm);
        report
            .joint_convexity
            .record(m, finite_scale(&[b11, b22, bmm]), |margin| Counterexample {
                x: v(&x1),
                y: v(&y1),
                x2: Some(v(&x2)),
                y2: Some(v(&y2)),
                margin,
            });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::symlin::SymMatrix;
    use crate::LinearLaw;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn cs_examples() {
        let (e1, e2) = (dv(&[1.0, 0.0]), dv(&[0.0, 1.0]));
        assert!((eval_cs(SeqIndex::Finite(2), &e1, &e2).unwrap() - 0.5).abs() < 1e-15);
        let x = dv(&[0.3, -1.2, 2.0]);
        let y = &x * 2.5;
        for n in [2, 3, 10, 1000] {
            let b = eval_cs(SeqIndex::Finite(n), &x, &y).unwrap();
            assert!((b - x.dot(&y)).abs() < 1e-12 * x.dot(&y));
        }
        let y = dv(&[-1.0, 0.5, 0.7]);
        assert_eq!(
            eval_cs(SeqIndex::Infinite, &x, &y).unwrap(),
            x.norm() * y.norm()
        );
        let b2 = eval_cs(SeqIndex::Finite(2), &x, &y).unwrap();
        assert!((b2 - (0.5 * x.dot(&y) + 0.5 * x.norm() * y.norm())).abs() < 1e-12);
    }

    #[test]
    fn cs_zero_and_errors() {
        let z = DVector::zeros(2);
        let y = dv(&[1.0, 2.0]);
        assert_eq!(eval_cs(SeqIndex::Finite(3), &z, &y).unwrap(), 0.0);
        assert_eq!(eval_cs(SeqIndex::Infinite, &y, &z).unwrap(), 0.0);
        assert!(matches!(
            eval_cs(SeqIndex::Finite(1), &y, &y),
            Err(Error::InvalidOrder(1))
        ));
        assert!(eval_cs(SeqIndex::Finite(2), &y, &dv(&[1.0])).is_err());
    }

    #[test]
    fn cs_opposite_vectors() {
        let x = dv(&[1.0, 0.0]);
        let y = dv(&[-2.0, 0.0]);
        let b2 = eval_cs(SeqIndex::Finite(2), &x, &y).unwrap();
        assert!(b2.abs() < 1e-15);
        assert!(eval_cs(SeqIndex::Finite(3), &x, &y).unwrap() >= x.dot(&y));
        assert!(
            (eval_cs(SeqIndex::Finite(4), &x, &y).unwrap() - 2.0 * (PI / 4.0).cos().powi(4)).abs()
                < 1e-15
        );
    }

    #[test]
    fn separable_passes() {
        let phi = QuadraticPotential::new(SymMatrix::identity(3)).unwrap();
        let r = validate_axioms(&Separable(phi), &Sampler::default(), 2000, 1).unwrap();
        assert!(r.passed());
        assert!(r.joint_convexity.passed);
        assert!(r.lower_bound.worst_margin >= -1e-12);
    }

    #[test]
    fn fitzpatrick_passes_joint_convexity() {
        let law = LinearLaw::from_row_slice(2, &[1.0, -0.3, 0.3, 1.0]).unwrap();
        let kernel = fitzpatrick::build_kernels(&law, 3).unwrap();
        let r = validate_axioms(
            &Fitzpatrick { kernel, order: 3 },
            &Sampler::default(),
            2000,
            5,
        )
        .unwrap();
        assert!(r.passed());
        assert!(r.joint_convexity.passed);
    }

    #[test]
    fn shifted_duality_fails_with_margin_minus_one() {
        let b = FnBipotential {
            dim: 2,
            f: |x: &DVector<f64>, y: &DVector<f64>| x.dot(y) - 1.0,
        };
        let r = validate_axioms(&b, &Sampler::Uniform { half_width: 1.0 }, 100, 3).unwrap();
        assert!(!r.lower_bound.passed);
        assert!((r.lower_bound.worst_margin + 1.0).abs() < 1e-12);
        assert!(r.lower_bound.counterexample.is_some());
        assert!(r.convex_in_x.passed && r.convex_in_y.passed);
        assert!(!r.passed());
    }

    #[test]
    fn cauchy_schwarz_is_a_bipotential() {
        for order in [SeqIndex::Finite(2), SeqIndex::Finite(5), SeqIndex::Infinite] {
            let r = validate_axioms(
                &CauchySchwarz { order, dim: 3 },
                &Sampler::default(),
                1000,
                9,
            )
            .unwrap();
            assert!(
                r.lower_bound.passed && r.convex_in_x.passed && r.convex_in_y.passed,
                "{order}"
            );
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let b = CauchySchwarz {
            order: SeqIndex::Infinite,
            dim: 1,
        };
        assert!(validate_axioms(&b, &Sampler::default(), 0, 0).is_err());
    }
}
