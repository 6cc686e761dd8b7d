//! Three-term recurrence engine: Jacobi sequences, monic orthogonal
//! polynomials, their norms, and moments read off the tridiagonal
//! (quantum-decomposition) matrix.

use crate::error::{Error, Result};
use crate::qcalc::{q_number, qpow, QParams};

/// Jacobi parameters `(ω_n, α_n)` of `x P_n = P_{n+1} + α_n P_n + ω_n P_{n-1}`.
///
/// Stores `ω_1..ω_N` (with `ω_0 = 1` implied) and `α_0..α_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSequence {
    omega: Vec<f64>,
    alpha_seq: Vec<f64>,
}

impl JacobiSequence {
    pub fn new(omega: Vec<f64>, alpha_seq: Vec<f64>) -> Result<Self> {
        if omega.len() != alpha_seq.len() {
            return Err(Error::DimensionMismatch {
                expected: omega.len(),
                found: alpha_seq.len(),
            });
        }
        if let Some((i, w)) = omega.iter().enumerate().find(|(_, w)| w.is_nan() || **w <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega_{} = {w} must be positive",
                i + 1
            )));
        }
        Ok(Self { omega, alpha_seq })
    }

    /// Number of stored levels `N`.
    pub fn levels(&self) -> usize {
        self.omega.len()
    }

    /// `ω_n` for `0 ≤ n ≤ N`.
    pub fn omega(&self, n: usize) -> Result<f64> {
        match n {
            0 => Ok(1.0),
            n if n <= self.omega.len() => Ok(self.omega[n - 1]),
            n => Err(Error::IndexOutOfRange {
                index: n,
                available: self.omega.len(),
            }),
        }
    }

    /// `α_n` for `0 ≤ n < N`.
    pub fn alpha(&self, n: usize) -> Result<f64> {
        self.alpha_seq.get(n).copied().ok_or(Error::IndexOutOfRange {
            index: n,
            available: self.alpha_seq.len(),
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha_seq
    }
}

/// Jacobi sequence of the q-Meixner-Pollaczek polynomials:
/// `ω_n = (1 + α q^{n-1}) [n]_q`, `α_n = 0`.
pub fn mp_jacobi(params: QParams, n_max: usize) -> JacobiSequence {
    let (alpha, q) = (params.alpha(), params.q());
    let omega = (1..=n_max)
        .map(|n| (1.0 + alpha * qpow(q, n - 1)) * q_number(n, q))
        .collect();
    // positivity is automatic on the open square
    JacobiSequence {
        omega,
        alpha_seq: vec![0.0; n_max],
    }
}

/// Monic polynomial, coefficients stored low degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<f64>,
}

impl MonicPolynomial {
    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `(x - a) self - w prev`
    fn step(&self, prev: &MonicPolynomial, a: f64, w: f64) -> MonicPolynomial {
        let n = self.coeffs.len();
        let mut next = vec![0.0; n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= a * c;
        }
        for (i, c) in prev.coeffs.iter().enumerate() {
            next[i] -= w * c;
        }
        debug_assert_eq!(next[n], 1.0);
        MonicPolynomial { coeffs: next }
    }
}

/// `P_0..P_n` built from the recurrence.
pub fn polynomials(jacobi: &JacobiSequence, n: usize) -> Result<Vec<MonicPolynomial>> {
    if n > jacobi.levels() {
        return Err(Error::IndexOutOfRange {
            index: n,
            available: jacobi.levels(),
        });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(MonicPolynomial::one());
    if n == 0 {
        return Ok(out);
    }
    // P_{-1} = 0 makes P_1 = x - α_0 fall out of the same step.
    let zero = MonicPolynomial { coeffs: vec![0.0] };
    out.push(out[0].step(&zero, jacobi.alpha_seq[0], 0.0));
    for k in 1..n {
        let next = out[k].step(&out[k - 1], jacobi.alpha_seq[k], jacobi.omega[k - 1]);
        out.push(next);
    }
    Ok(out)
}

/// `P_n` for the given Jacobi sequence.
pub fn polynomial(jacobi: &JacobiSequence, n: usize) -> Result<MonicPolynomial> {
    Ok(polynomials(jacobi, n)?.pop().expect("non-empty"))
}

/// `[ω_n]! = ∏_{k=0}^n ω_k`, the squared norm of `P_n`.
pub fn norm_squared(jacobi: &JacobiSequence, n: usize) -> Result<f64> {
    if n > jacobi.levels() {
        return Err(Error::IndexOutOfRange {
            index: n,
            available: jacobi.levels(),
        });
    }
    Ok(jacobi.omega[..n].iter().product())
}

/// Moments `m_0..m_{k_max}` as `(T^k)_{00}` for the symmetric tridiagonal `T`
/// with diagonal `α_n` and off-diagonal `√ω_n`.
///
/// A closed walk of length `k` from level 0 never climbs above `⌊k/2⌋`, so a
/// matrix of size `⌊k_max/2⌋ + 1` reproduces the infinite chain exactly.
pub fn moments_from_jacobi(jacobi: &JacobiSequence, k_max: usize) -> Result<Vec<f64>> {
    let needed = k_max.div_ceil(2);
    if jacobi.levels() < needed {
        return Err(Error::IndexOutOfRange {
            index: needed,
            available: jacobi.levels(),
        });
    }
    let size = k_max / 2 + 1;
    // For even k_max the top diagonal entry α_{size-1} is never visited by a
    // returning walk, so a missing value there is harmless.
    let diag: Vec<f64> = (0..size)
        .map(|n| jacobi.alpha_seq.get(n).copied().unwrap_or(0.0))
        .collect();
    let off: Vec<f64> = (1..size).map(|n| jacobi.omega[n - 1].sqrt()).collect();

    let mut v = vec![0.0; size];
    v[0] = 1.0;
    let mut moments = Vec::with_capacity(k_max + 1);
    moments.push(1.0);
    for _ in 0..k_max {
        let mut next = vec![0.0; size];
        for i in 0..size {
            let mut acc = diag[i] * v[i];
            if i > 0 {
                acc += off[i - 1] * v[i - 1];
            }
            if i + 1 < size {
                acc += off[i] * v[i + 1];
            }
            next[i] = acc;
        }
        v = next;
        moments.push(v[0]);
    }
    Ok(moments)
}
