//! q-calculus primitives: q-numbers, q-factorials, q-shifted factorials
//! (finite and truncated infinite), q-binomials, Rogers-Szegő polynomials and
//! the classical Pochhammer symbol.
//!
//! Notation: `(a;q)_k = ∏_{l=1}^k (1 - a q^{l-1})`, `[n]_q = 1 + q + ... + q^{n-1}`.

use std::env;

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Environment variable selecting the arithmetic used for infinite products.
pub const PRECISION_ENV: &str = "AQFOCK_PRECISION";

/// The deformation pair (α, q), both in the open interval (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    alpha: f64,
    q: f64,
}

impl QParams {
    pub fn new(alpha: f64, q: f64) -> Result<Self> {
        check_open_unit("alpha", alpha)?;
        check_open_unit("q", q)?;
        Ok(Self { alpha, q })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > -1.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value })
    }
}

/// Arithmetic used when multiplying long runs of near-unit factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double (about 106 significant bits).
    Extended,
}

impl Precision {
    /// Reads [`PRECISION_ENV`]; unset means [`Precision::Double`].
    pub fn from_env() -> Result<Self> {
        match env::var(PRECISION_ENV) {
            Ok(v) => v.parse(),
            Err(_) => Ok(Precision::Double),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "double" | "f64" => Ok(Precision::Double),
            "extended" | "double-double" | "dd" => Ok(Precision::Extended),
            other => Err(Error::InvalidArgument(format!(
                "unknown precision {other:?} (expected \"double\" or \"extended\")"
            ))),
        }
    }
}

/// Controls every truncated infinite product and sum.
///
/// The number of retained terms for ratio `q` is `N* = min{n : |q|^n < tol}`,
/// capped at `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    tol: f64,
    max_terms: usize,
    precision: Precision,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-16,
            max_terms: 10_000,
            precision: Precision::Double,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be positive".into()));
        }
        Ok(Self {
            tol,
            max_terms,
            precision: Precision::Double,
        })
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `N* = min{n : |q|^n < tol}`, capped at `max_terms`.
    pub fn terms(&self, q: f64) -> usize {
        let q = q.abs();
        let mut power = 1.0;
        let mut n = 0;
        while power >= self.tol && n < self.max_terms {
            power *= q;
            n += 1;
        }
        n.max(1).min(self.max_terms)
    }
}

/// `q^n` with the convention `0^0 = 1`.
pub(crate) fn qpow(q: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(n) => q.powi(n),
        Err(_) => q.powf(n as f64),
    }
}

/// `[n]_q = Σ_{j<n} q^j`.
pub fn q_number(n: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..n {
        sum += power;
        power *= q;
    }
    sum
}

/// `[k]_q! = ∏_{l=1}^k [l]_q`, with `[0]_q! = 1`.
pub fn q_factorial(k: usize, q: f64) -> f64 {
    (1..=k).map(|l| q_number(l, q)).product()
}

/// Finite q-shifted factorial `(a;q)_k`.
pub fn q_pochhammer(a: f64, q: f64, k: usize) -> f64 {
    let mut prod = 1.0;
    let mut power = 1.0;
    for _ in 0..k {
        prod *= 1.0 - a * power;
        power *= q;
    }
    prod
}

/// Truncated `(a;q)_∞ = ∏_{l=1}^{N*} (1 - a q^{l-1})`.
///
/// Each omitted factor differs from 1 by at most `|a|·tol` (and the omitted
/// factors together by at most `|a|·tol/(1-|q|)`).
pub fn q_pochhammer_inf(a: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    if q.is_nan() || q.abs() >= 1.0 {
        return Err(Error::ParamOutOfRange { name: "q", value: q });
    }
    let terms = trunc.terms(q);
    Ok(match trunc.precision() {
        Precision::Double => q_pochhammer(a, q, terms),
        Precision::Extended => {
            let mut prod = TwoFloat::from(1.0);
            let mut power = TwoFloat::from(1.0);
            let one = TwoFloat::from(1.0);
            for _ in 0..terms {
                prod *= one - power * a;
                power *= q;
            }
            prod.hi() + prod.lo()
        }
    })
}

/// Gaussian binomial `(q;q)_n / ((q;q)_l (q;q)_{n-l})` via the multiplicative
/// recursion `∏_{i=1}^{l} (1 - q^{n-l+i}) / (1 - q^i)`.
pub fn q_binomial(n: usize, l: usize, q: f64) -> Result<f64> {
    if l > n {
        return Err(Error::IndexOutOfRange { index: l, available: n });
    }
    let l = l.min(n - l);
    let mut value = 1.0;
    for i in 1..=l {
        value *= (1.0 - qpow(q, n - l + i)) / (1.0 - qpow(q, i));
    }
    Ok(value)
}

/// Rogers-Szegő polynomial `h_n(z|q) = Σ_l [n choose l]_q z^l`.
///
/// Accumulated in double-double since the terms cancel heavily for `z < 0`.
/// The binomial row comes from the Pascal rule
/// `[m choose l] = [m-1 choose l-1] + q^l [m-1 choose l]`, which needs no
/// division.
pub fn rogers_szego(n: usize, z: f64, q: f64) -> f64 {
    let one = TwoFloat::from(1.0);
    let mut qpow_dd = vec![one];
    for i in 1..=n {
        let next = qpow_dd[i - 1] * q;
        qpow_dd.push(next);
    }
    let mut row = vec![one];
    for m in 1..=n {
        row.push(one);
        for l in (1..m).rev() {
            row[l] = row[l - 1] + qpow_dd[l] * row[l];
        }
    }
    let mut zpow = one;
    let mut sum = TwoFloat::from(0.0);
    for b in &row {
        sum += *b * zpow;
        zpow *= z;
    }
    sum.hi() + sum.lo()
}

/// Rogers-Szegő polynomial through
/// `h_{n+1} = (z+1) h_n - (1-q^n) z h_{n-1}`, `h_0 = 1`, `h_1 = 1 + z`.
pub fn rogers_szego_recurrence(n: usize, z: f64, q: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 + z);
    for k in 1..n {
        let next = (z + 1.0) * cur - (1.0 - qpow(q, k)) * z * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Rising factorial `(k)_n = k (k+1) ... (k+n-1)`.
pub fn pochhammer(k: f64, n: usize) -> f64 {
    (0..n).map(|j| k + j as f64).product()
}
