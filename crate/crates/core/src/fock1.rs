//! One-mode (α,q)-operators as dense truncated matrices.
//!
//! Over the orthonormal basis `Φ_n = z^n / √([ω_n]!)` the creation operator is
//! multiplication by `z` and the annihilation operator is the α-deformed
//! Jackson derivative. Identities are asserted on the leading `dim - 1` block
//! only: `a⁺` maps the last basis vector out of the truncated space.
//!
//! The exact mode works over `BigRational` in the monomial basis `z^n`, where
//! every entry is a polynomial in `α` and `q`. The diagonal change of basis to
//! `Φ_n` preserves every relation and the leading-block restriction.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::JacobiSequence;
use crate::qcalc::{q_number, qpow, QParams};

/// Dense square matrix over basis `Φ_0..Φ_{dim-1}`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T = f64> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Clone + Num> OperatorMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| T::one()).collect())
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] = out.entries[i * n + j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.clone() * s.clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.dim), |acc, _| {
            acc.mul(self).expect("same dimension")
        })
    }

    /// Top-left `k × k` submatrix.
    pub fn leading_block(&self, k: usize) -> Self {
        let k = k.min(self.dim);
        let mut out = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        })
    }
}

impl<T: Clone + Num + Signed + PartialOrd> OperatorMatrix<T> {
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|e| e.abs())
            .fold(T::zero(), |m, e| if e > m { e } else { m })
    }
}

impl fmt::Display for OperatorMatrix<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{:>10.6}", self.get(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `AB - sBA`.
pub fn q_commutator<T: Clone + Num>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>, s: &T) -> Result<OperatorMatrix<T>> {
    a.mul(b)?.sub(&b.mul(a)?.scale(s))
}

fn check_levels(jacobi: &JacobiSequence, dim: usize) -> Result<()> {
    let needed = dim.saturating_sub(1);
    if jacobi.levels() < needed {
        return Err(Error::DimensionMismatch {
            expected: needed,
            found: jacobi.levels(),
        });
    }
    Ok(())
}

/// `a⁺ Φ_n = √ω_{n+1} Φ_{n+1}`.
pub fn creation(jacobi: &JacobiSequence, dim: usize) -> Result<OperatorMatrix> {
    check_levels(jacobi, dim)?;
    let mut m = OperatorMatrix::zeros(dim);
    for n in 0..dim.saturating_sub(1) {
        m.set(n + 1, n, jacobi.omega(n + 1)?.sqrt());
    }
    Ok(m)
}

/// `a⁻ Φ_n = √ω_n Φ_{n-1}`, `a⁻ Φ_0 = 0`.
pub fn annihilation(jacobi: &JacobiSequence, dim: usize) -> Result<OperatorMatrix> {
    Ok(creation(jacobi, dim)?.transpose())
}

/// `a° Φ_n = α_n Φ_n`; zero for the (α,q)-Gaussian.
pub fn preservation(jacobi: &JacobiSequence, dim: usize) -> Result<OperatorMatrix> {
    check_levels(jacobi, dim)?;
    Ok(OperatorMatrix::diagonal(
        (0..dim)
            .map(|n| jacobi.alphas().get(n).copied().unwrap_or(0.0))
            .collect(),
    ))
}

/// `M_{α,q} = I + α q^{2N}`.
pub fn m_matrix(params: QParams, dim: usize) -> OperatorMatrix {
    let (alpha, q) = (params.alpha(), params.q());
    OperatorMatrix::diagonal((0..dim).map(|n| 1.0 + alpha * qpow(q, 2 * n)).collect())
}

/// `(1+α) I - α(1-q²) Z D_{q²}` in the monomial basis.
pub fn m_matrix_from_jackson(params: QParams, dim: usize) -> OperatorMatrix {
    let (alpha, q) = (params.alpha(), params.q());
    let q2 = q * q;
    let zd = multiplication_matrix(dim)
        .mul(&jackson_matrix(q2, dim))
        .expect("same dimension");
    OperatorMatrix::identity(dim)
        .scale(&(1.0 + alpha))
        .sub(&zd.scale(&(alpha * (1.0 - q2))))
        .expect("same dimension")
}

/// Multiplication by `z` on monomials.
pub fn multiplication_matrix(dim: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(dim);
    for n in 0..dim.saturating_sub(1) {
        m.set(n + 1, n, 1.0);
    }
    m
}

/// `D_q` on monomials: `z^n ↦ [n]_q z^{n-1}`.
pub fn jackson_matrix(q: f64, dim: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(dim);
    for n in 1..dim {
        m.set(n - 1, n, q_number(n, q));
    }
    m
}

/// Truncated Taylor coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyCoeffs(pub Vec<f64>);

impl PolyCoeffs {
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    fn lower(&self, factor: impl Fn(usize) -> f64) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(n, &c)| c * factor(n)).collect())
    }
}

/// `D_q`: `z^n ↦ [n]_q z^{n-1}`; at `q = 0` the value at `z = 0` is `f'(0)`.
pub fn jackson(coeffs: &PolyCoeffs, q: f64) -> PolyCoeffs {
    coeffs.lower(|n| q_number(n, q))
}

/// `D_{α,q}`: `z^n ↦ (1 + α q^{n-1}) [n]_q z^{n-1}`.
pub fn alpha_jackson(coeffs: &PolyCoeffs, params: QParams) -> PolyCoeffs {
    let (alpha, q) = (params.alpha(), params.q());
    coeffs.lower(|n| (1.0 + alpha * qpow(q, n - 1)) * q_number(n, q))
}

/// Largest entry of each relation's residual matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub dim: usize,
    /// Over the leading `dim - 1` block; this is what is asserted.
    pub block_residual: f64,
    /// Over the whole truncated matrix; informational.
    pub full_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub alpha: f64,
    pub q: f64,
    pub dim: usize,
    pub residuals: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn max_block_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.block_residual).fold(0.0, f64::max)
    }

    /// `relation,dim,max_residual` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("relation,dim,max_residual\n");
        for r in &self.residuals {
            out.push_str(&format!("{},{},{:e}\n", r.relation, r.dim, r.block_residual));
        }
        out
    }
}

/// Relation as `lhs - rhs` together with its name.
struct Relation<T> {
    name: &'static str,
    difference: OperatorMatrix<T>,
}

/// Builds `lhs - rhs` for every relation that applies at `(α, q)`, from
/// generic creation, annihilation and `M` matrices.
fn relations<T: Clone + Num>(
    alpha: &T,
    q: &T,
    a_plus: &OperatorMatrix<T>,
    a_minus: &OperatorMatrix<T>,
    m: &OperatorMatrix<T>,
) -> Result<Vec<Relation<T>>> {
    let dim = m.dim();
    let one = T::one();
    let q2 = q.clone() * q.clone();
    let one_minus_q2 = one.clone() - q2.clone();
    let mut out = vec![
        Relation {
            name: "[a-,a+]_q = M",
            difference: q_commutator(a_minus, a_plus, q)?.sub(m)?,
        },
        Relation {
            name: "[a-,M]_q2 = (1-q2)a-",
            difference: q_commutator(a_minus, m, &q2)?.sub(&a_minus.scale(&one_minus_q2))?,
        },
        Relation {
            name: "[M,a+]_q2 = (1-q2)a+",
            difference: q_commutator(m, a_plus, &q2)?.sub(&a_plus.scale(&one_minus_q2))?,
        },
    ];
    if alpha == q {
        out.push(Relation {
            name: "[a-,a+]_q2 = (1+q)I",
            difference: q_commutator(a_minus, a_plus, &q2)?
                .sub(&OperatorMatrix::identity(dim).scale(&(one.clone() + q.clone())))?,
        });
    }
    if alpha.is_zero() {
        out.push(Relation {
            name: "[a-,M]_1 = 0",
            difference: q_commutator(a_minus, m, &one)?,
        });
        out.push(Relation {
            name: "[M,a+]_1 = 0",
            difference: q_commutator(m, a_plus, &one)?,
        });
    }
    Ok(out)
}

/// Checks the one-mode commutation relations in floating point.
pub fn verify_relations(params: QParams, dim: usize) -> Result<RelationReport> {
    if dim < 3 {
        return Err(Error::InvalidArgument(format!("dim must be at least 3, got {dim}")));
    }
    let jacobi = crate::jacobi::mp_jacobi(params, dim);
    let a_plus = creation(&jacobi, dim)?;
    let a_minus = annihilation(&jacobi, dim)?;
    let m = m_matrix(params, dim);
    let rels = relations(&params.alpha(), &params.q(), &a_plus, &a_minus, &m)?;
    Ok(RelationReport {
        alpha: params.alpha(),
        q: params.q(),
        dim,
        residuals: rels
            .into_iter()
            .map(|r| RelationResidual {
                relation: r.name.to_string(),
                dim,
                block_residual: r.difference.leading_block(dim - 1).max_abs(),
                full_residual: r.difference.max_abs(),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRelation {
    pub relation: String,
    pub dim: usize,
    /// True iff the leading block of `lhs - rhs` is identically zero.
    pub holds: bool,
}

/// Exact check over `BigRational`, using the binary values of `α` and `q`.
pub fn verify_relations_exact(params: QParams, dim: usize) -> Result<Vec<ExactRelation>> {
    if dim < 3 {
        return Err(Error::InvalidArgument(format!("dim must be at least 3, got {dim}")));
    }
    let to_rat = |v: f64| BigRational::from_float(v).expect("finite parameter");
    let alpha = to_rat(params.alpha());
    let q = to_rat(params.q());
    let mut q_pow = vec![BigRational::one()];
    for n in 1..2 * dim {
        let next = &q_pow[n - 1] * &q;
        q_pow.push(next);
    }
    // [n]_q and ω_n in exact arithmetic
    let q_num = |n: usize| q_pow[..n].iter().fold(BigRational::zero(), |acc, p| acc + p);
    let omega = |n: usize| (BigRational::one() + &alpha * &q_pow[n - 1]) * q_num(n);

    let mut z = OperatorMatrix::<BigRational>::zeros(dim);
    let mut d = OperatorMatrix::<BigRational>::zeros(dim);
    for n in 1..dim {
        z.set(n, n - 1, BigRational::one());
        d.set(n - 1, n, omega(n));
    }
    let m = OperatorMatrix::diagonal((0..dim).map(|n| BigRational::one() + &alpha * &q_pow[2 * n]).collect());
    let rels = relations(&alpha, &q, &z, &d, &m)?;
    Ok(rels
        .into_iter()
        .map(|r| ExactRelation {
            relation: r.name.to_string(),
            dim,
            holds: r.difference.leading_block(dim - 1).entries().iter().all(Zero::is_zero),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub n: usize,
    pub value: f64,
    pub target: f64,
}

/// Scaled quantities against their `q → 1` limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub beta: f64,
    pub q: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    pub fn max_abs_deviation(&self) -> f64 {
        self.rows.iter().map(|r| (r.value - r.target).abs()).fold(0.0, f64::max)
    }

    /// Deviation relative to the limit value. The scaled quantities differ
    /// from their limits by `O((1-q) n²)`, so this is the scale-free reading.
    pub fn max_rel_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.value - r.target).abs() / r.target.abs())
            .fold(0.0, f64::max)
    }
}

fn check_limit_args(beta: f64, q: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::ParamOutOfRange {
            name: "beta",
            value: beta,
        });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ParamOutOfRange { name: "q", value: q });
    }
    Ok(())
}

/// Diagonal of `M_{-q^{2β},q} / (1-q²)` against `n + β` for `n < dim`.
pub fn scaled_limit_check(beta: f64, q: f64, dim: usize) -> Result<LimitReport> {
    check_limit_args(beta, q)?;
    let alpha = -q.powf(2.0 * beta);
    let m = m_matrix(QParams::new(alpha, q)?, dim);
    let rows = (0..dim)
        .map(|n| LimitRow {
            n,
            value: m.get(n, n) / (1.0 - q * q),
            target: n as f64 + beta,
        })
        .collect();
    Ok(LimitReport { beta, q, rows })
}

/// `ω_n / (4(1-q))` at `α = -q^{2β}` against `(n + 2β - 1) n / 4` for
/// `1 ≤ n ≤ n_max`.
pub fn jacobi_limit_check(beta: f64, q: f64, n_max: usize) -> Result<LimitReport> {
    check_limit_args(beta, q)?;
    let rows = (1..=n_max)
        .map(|n| LimitRow {
            n,
            value: (1.0 - q.powf(2.0 * beta + n as f64 - 1.0)) * q_number(n, q) / (4.0 * (1.0 - q)),
            target: (n as f64 + 2.0 * beta - 1.0) * n as f64 / 4.0,
        })
        .collect();
    Ok(LimitReport { beta, q, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{moments_from_jacobi, mp_jacobi};
    use proptest::prelude::*;

    fn params(a: f64, q: f64) -> QParams {
        QParams::new(a, q).unwrap()
    }

    #[test]
    fn creation_and_annihilation_shape() {
        let j = mp_jacobi(params(0.3, 0.5), 8);
        let ap = creation(&j, 2).unwrap();
        assert!((ap.get(1, 0) - 1.3f64.sqrt()).abs() < 1e-15);
        let ap = creation(&j, 8).unwrap();
        let am = annihilation(&j, 8).unwrap();
        assert_eq!(am.transpose(), ap);
        for i in 0..8 {
            for k in 0..8 {
                if i != k + 1 {
                    assert_eq!(*ap.get(i, k), 0.0);
                }
            }
        }
        assert!(creation(&j, 10).is_err());
        assert_eq!(preservation(&j, 8).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn position_operator_moments() {
        let (a, q) = (-0.3, 0.7);
        let j = mp_jacobi(params(a, q), 12);
        let x = creation(&j, 8).unwrap().add(&annihilation(&j, 8).unwrap()).unwrap();
        let m = moments_from_jacobi(&j, 12).unwrap();
        for k in 0..=6 {
            let got = *x.pow(2 * k).get(0, 0);
            assert!((got - m[2 * k]).abs() <= 1e-13 * m[2 * k].abs(), "k={k}");
        }
        let x4 = *x.pow(4).get(0, 0);
        assert!((x4 - m[4]).abs() < 1e-14);
    }

    #[test]
    fn jackson_examples() {
        assert_eq!(jackson(&PolyCoeffs(vec![3.0]), 0.5), PolyCoeffs(vec![]));
        assert_eq!(jackson(&PolyCoeffs::monomial(2), 0.5), PolyCoeffs(vec![0.0, 1.5]));
        let f = PolyCoeffs(vec![0.4, -1.0, 2.0, 0.5, -0.3, 0.1, 0.7]);
        let d0 = jackson(&f, 0.0);
        // D_0 f(0) = f'(0)
        assert_eq!(d0.eval(0.0), -1.0);
    }

    #[test]
    fn alpha_jackson_examples() {
        let f = PolyCoeffs(vec![0.4, -1.0, 2.0, 0.5]);
        assert_eq!(alpha_jackson(&f, params(0.0, 0.6)), jackson(&f, 0.6));
        let d = alpha_jackson(&PolyCoeffs::monomial(3), params(0.5, 0.5));
        assert!((d.coeffs()[2] - 1.125 * 1.75).abs() < 1e-15);
        assert_eq!(&d.coeffs()[..2], &[0.0, 0.0]);
    }

    fn difference_quotient(f: &PolyCoeffs, z: f64, q: f64) -> f64 {
        (f.eval(z) - f.eval(q * z)) / ((1.0 - q) * z)
    }

    proptest! {
        #[test]
        fn jackson_matches_difference_quotient(
            c in prop::collection::vec(-1.0f64..1.0, 7),
            q in prop_oneof![Just(0.0), Just(0.5), Just(-0.5), -0.9f64..0.9],
        ) {
            let f = PolyCoeffs(c);
            let z = 0.7;
            prop_assert!((jackson(&f, q).eval(z) - difference_quotient(&f, z, q)).abs() < 1e-12);
        }

        #[test]
        fn alpha_jackson_dual_forms(
            c in prop::collection::vec(-1.0f64..1.0, 9),
            alpha in -0.9f64..0.9,
            q in prop_oneof![Just(0.5), Just(-0.5)],
            z in -1.2f64..1.2,
        ) {
            prop_assume!(z.abs() > 1e-3);
            let f = PolyCoeffs(c);
            let lhs = alpha_jackson(&f, params(alpha, q)).eval(z);
            // D_q f(z) + α (D_{1/q} f)(q² z)
            let w = q * q * z;
            let inv = (f.eval(w) - f.eval(w / q)) / ((1.0 - 1.0 / q) * w);
            let rhs = difference_quotient(&f, z, q) + alpha * inv;
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }

        #[test]
        fn alpha_jackson_at_q_zero(
            c in prop::collection::vec(-1.0f64..1.0, 9),
            alpha in -0.9f64..0.9,
            z in -1.2f64..1.2,
        ) {
            prop_assume!(z.abs() > 1e-3);
            let f = PolyCoeffs(c);
            let lhs = alpha_jackson(&f, params(alpha, 0.0)).eval(z);
            let rhs = (f.eval(z) - f.eval(0.0)) / z + alpha * f.coeffs()[1];
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_jackson_realizes_annihilation() {
        let p = params(-0.3, 0.7);
        let dim = 10;
        let j = mp_jacobi(p, dim);
        let am = annihilation(&j, dim).unwrap();
        let mut norm = vec![1.0];
        for n in 1..dim {
            norm.push(norm[n - 1] * j.omega(n).unwrap());
        }
        for n in 0..dim {
            // Φ_n = z^n / √[ω_n]!
            let mut phi = PolyCoeffs::monomial(n);
            phi.0[n] /= norm[n].sqrt();
            let image = alpha_jackson(&phi, p);
            for k in 0..dim {
                let coord = image.coeffs().get(k).copied().unwrap_or(0.0) * norm[k].sqrt();
                assert!((coord - am.get(k, n)).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn m_matrix_examples() {
        assert_eq!(m_matrix(params(0.0, 0.7), 5), OperatorMatrix::identity(5));
        assert_eq!(*m_matrix(params(0.4, 0.7), 5).get(0, 0), 1.4);
        assert_eq!(*m_matrix(params(0.5, 0.5), 5).get(2, 2), 1.03125);
        for &(a, q) in &[(0.5, 0.5), (-0.3, 0.7), (0.8, -0.6)] {
            let diff = m_matrix(params(a, q), 12)
                .sub(&m_matrix_from_jackson(params(a, q), 12))
                .unwrap();
            assert!(diff.max_abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_basics() {
        let j = mp_jacobi(params(0.2, 0.4), 6);
        let a = creation(&j, 6).unwrap();
        assert_eq!(q_commutator(&a, &a, &1.0).unwrap().max_abs(), 0.0);
        assert!(q_commutator(&a, &OperatorMatrix::identity(5), &1.0).is_err());
    }

    #[test]
    fn relations_hold_on_leading_block() {
        for &(a, q) in &[(0.0, 0.5), (0.5, 0.5), (-0.3, 0.7), (-0.6, -0.6), (0.9, -0.4)] {
            let report = verify_relations(params(a, q), 24).unwrap();
            assert!(report.max_block_residual() < 1e-12, "({a},{q}): {report:?}");
        }
        let r = verify_relations(params(0.0, 0.5), 24).unwrap();
        assert_eq!(r.residuals.len(), 5);
        assert_eq!(verify_relations(params(0.5, 0.5), 24).unwrap().residuals.len(), 4);
        // the boundary row is genuinely outside the identities
        let r = verify_relations(params(-0.3, 0.7), 24).unwrap();
        assert!(r.residuals[0].full_residual > 1e-3);
        assert!(r.to_csv().starts_with("relation,dim,max_residual\n[a-,a+]_q = M,24,"));
        assert!(verify_relations(params(0.1, 0.1), 2).is_err());
    }

    #[test]
    fn relations_hold_exactly() {
        for &(a, q) in &[(0.0, 0.5), (0.5, 0.5), (-0.3, 0.7), (-0.6, -0.6)] {
            let rels = verify_relations_exact(params(a, q), 12).unwrap();
            assert!(rels.iter().all(|r| r.holds), "({a},{q}): {rels:?}");
        }
        // α ≠ q, α ≠ 0: only the three general relations apply
        let rels = verify_relations_exact(params(0.5, 0.25), 6).unwrap();
        assert!(rels.iter().all(|r| r.holds));
        assert_eq!(rels.len(), 3);
    }

    #[test]
    fn limits() {
        let m = scaled_limit_check(1.0, 0.999, 11).unwrap();
        assert_eq!(m.rows.len(), 11);
        assert!(m.max_rel_deviation() < 1e-2);
        let j = jacobi_limit_check(1.0, 0.999, 10).unwrap();
        assert!(j.max_rel_deviation() < 1e-2);
        assert!((j.rows[9].target - 27.5).abs() < 1e-12);
        let tight = scaled_limit_check(0.5, 0.9999, 11).unwrap();
        assert!(tight.max_rel_deviation() < 1e-3);
        // deviations shrink linearly in 1 - q
        let coarse = scaled_limit_check(1.0, 0.99, 11).unwrap();
        let ratio = coarse.max_abs_deviation() / m.max_abs_deviation();
        assert!((9.0..11.0).contains(&ratio), "{ratio}");
        assert!(scaled_limit_check(1.0, 1.0, 5).is_err());
        assert!(scaled_limit_check(-1.0, 0.5, 5).is_err());
    }
}
