//! Absolutely continuous (α,q)-Gaussian law and quadrature against it.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcalc::{q_pochhammer_inf, qpow, QParams, TruncationPolicy};

pub const DEFAULT_QUAD_ORDER: usize = 400;
/// Denominator magnitudes below this are reported as [`Error::NearPole`].
pub const POLE_GUARD: f64 = 1e-12;
/// Allowed `|Im| / |Re|` of the assembled density.
pub const IMAG_TOL: f64 = 1e-10;

/// Open interval `(-2/√(1-q), 2/√(1-q))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SupportInterval {
    pub fn for_q(q: f64) -> Self {
        let hi = 2.0 / (1.0 - q).sqrt();
        Self { lo: -hi, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// `n` equally spaced interior points, endpoints excluded.
    pub fn interior_grid(&self, n: usize) -> Vec<f64> {
        let h = (self.hi - self.lo) / (n + 1) as f64;
        (1..=n).map(|i| self.lo + h * i as f64).collect()
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfSupport { x, bound: self.hi })
        }
    }
}

/// `∏_k (1 - b x √(1-q) q^k + b² q^{2k})`, truncated where `|q|^k < tol`.
pub fn g_factor(x: f64, b: Complex64, params: QParams, trunc: &TruncationPolicy) -> Complex64 {
    let q = params.q();
    let s = (1.0 - q).sqrt();
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..trunc.terms(q) {
        let qk = qpow(q, k);
        acc *= 1.0 - b * (x * s * qk) + b * b * (qk * qk);
    }
    acc
}

/// Density of the (α,q)-Gaussian law at an interior point of its support.
pub fn nu_density(x: f64, params: QParams, trunc: &TruncationPolicy) -> Result<f64> {
    let (alpha, q) = (params.alpha(), params.q());
    SupportInterval::for_q(q).check(x)?;
    let prefactor = q_pochhammer_inf(q, q, trunc)? * q_pochhammer_inf(-alpha, q, trunc)? / (2.0 * PI)
        * ((1.0 - q) / (4.0 - (1.0 - q) * x * x)).sqrt();
    let one = Complex64::new(1.0, 0.0);
    let rq = Complex64::new(q, 0.0).sqrt();
    let i_gamma = Complex64::i() * Complex64::new(-alpha, 0.0).sqrt();
    let g = |b: Complex64| g_factor(x, b, params, trunc);
    let numer = g(one) * g(-one) * g(rq) * g(-rq);
    let denom = g(i_gamma) * g(-i_gamma);
    if denom.norm() < POLE_GUARD {
        return Err(Error::NearPole {
            x,
            magnitude: denom.norm(),
        });
    }
    let value = numer / denom * prefactor;
    if value.im.abs() > IMAG_TOL * value.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonRealDensity { x, imag: value.im });
    }
    Ok(value.re)
}

/// q-Gaussian density; the semicircle at `q = 0`.
pub fn q_gaussian_density(x: f64, q: f64, trunc: &TruncationPolicy) -> Result<f64> {
    crate::qcalc::check_open_unit("q", q)?;
    if q < 0.0 {
        return Err(Error::ParamOutOfRange { name: "q", value: q });
    }
    SupportInterval::for_q(q).check(x)?;
    let theta = (x * (1.0 - q).sqrt() / 2.0).clamp(-1.0, 1.0).acos();
    let e2 = Complex64::from_polar(1.0, 2.0 * theta);
    let mut prod = 1.0;
    for n in 1..trunc.terms(q) {
        let qn = qpow(q, n);
        prod *= (1.0 - qn) * (1.0 - e2 * qn).norm_sqr();
    }
    Ok((1.0 - q).sqrt() / PI * theta.sin() * prod)
}

/// Gauss-Legendre rule in `θ` for `x = 2cosθ/√(1-q)`, with the density and
/// Jacobian folded into the weights. Built once, then shared read-only.
#[derive(Debug, Clone)]
pub struct NuQuadrature {
    params: QParams,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NuQuadrature {
    pub fn new(params: QParams, trunc: &TruncationPolicy, order: usize) -> Result<Self> {
        let order = NonZeroUsize::new(order)
            .ok_or_else(|| Error::InvalidArgument("quadrature order must be positive".into()))?;
        let q = params.q();
        let s = (1.0 - q).sqrt();
        let rule = GaussLegendre::new(order);
        let mut nodes = Vec::with_capacity(order.get());
        let mut weights = Vec::with_capacity(order.get());
        for &(t, w) in rule.as_node_weight_pairs() {
            let theta = PI / 2.0 * (t + 1.0);
            let x = 2.0 * theta.cos() / s;
            let jacobian = 2.0 * theta.sin() / s;
            nodes.push(x);
            weights.push(w * PI / 2.0 * jacobian * nu_density(x, params, trunc)?);
        }
        Ok(Self { params, nodes, weights })
    }

    pub fn params(&self) -> QParams {
        self.params
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn moment(&self, k: usize) -> f64 {
        self.integrate(|x| qpow(x, k))
    }
}

/// `∫ f dν_{α,q}` with a fresh rule of the given order.
pub fn integrate(f: impl Fn(f64) -> f64, params: QParams, trunc: &TruncationPolicy, quad_order: usize) -> Result<f64> {
    Ok(NuQuadrature::new(params, trunc, quad_order)?.integrate(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{moments_from_jacobi, mp_jacobi, norm_squared, polynomials};

    fn params(a: f64, q: f64) -> QParams {
        QParams::new(a, q).unwrap()
    }

    fn trunc() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn quad(a: f64, q: f64) -> NuQuadrature {
        NuQuadrature::new(params(a, q), &trunc(), DEFAULT_QUAD_ORDER).unwrap()
    }

    #[test]
    fn support() {
        let s = SupportInterval::for_q(0.0);
        assert_eq!((s.lo, s.hi), (-2.0, 2.0));
        assert!(s.contains(1.999) && !s.contains(2.0));
        let g = s.interior_grid(3);
        assert_eq!(g, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn g_factor_examples() {
        let t = trunc();
        let x = 0.37;
        assert_eq!(
            g_factor(x, Complex64::new(0.0, 0.0), params(0.2, 0.6), &t),
            Complex64::new(1.0, 0.0)
        );
        let b = Complex64::new(0.3, -0.2);
        let g0 = g_factor(x, b, params(0.2, 0.0), &t);
        assert!((g0 - (1.0 - b * x + b * b)).norm() < 1e-15);
        for &q in &[0.5, -0.5] {
            let p = params(0.1, q);
            let c = Complex64::new(0.4, 0.7);
            let prod = g_factor(x, c, p, &t) * g_factor(x, c.conj(), p, &t);
            assert!(prod.im.abs() < 1e-14 * prod.norm());
        }
    }

    #[test]
    fn out_of_support_and_parameter_checks() {
        assert!(matches!(
            nu_density(2.0, params(0.0, 0.0), &trunc()),
            Err(Error::OutOfSupport { .. })
        ));
        assert!(matches!(
            q_gaussian_density(-3.0, 0.5, &trunc()),
            Err(Error::OutOfSupport { .. })
        ));
        assert!(q_gaussian_density(0.0, -0.5, &trunc()).is_err());
        assert!(NuQuadrature::new(params(0.0, 0.0), &trunc(), 0).is_err());
    }

    #[test]
    fn semicircle_at_q_zero() {
        for i in 1..40 {
            let x = -2.0 + 0.1 * i as f64;
            let w = (4.0 - x * x).sqrt() / (2.0 * PI);
            assert!((q_gaussian_density(x, 0.0, &trunc()).unwrap() - w).abs() < 1e-14);
            assert!((nu_density(x, params(0.0, 0.0), &trunc()).unwrap() - w).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_zero_is_q_gaussian() {
        for &q in &[0.3, 0.6, 0.9] {
            let s = SupportInterval::for_q(q);
            for x in s.interior_grid(50) {
                let a = nu_density(x, params(0.0, q), &trunc()).unwrap();
                let b = q_gaussian_density(x, q, &trunc()).unwrap();
                assert!((a - b).abs() < 1e-10, "q={q} x={x}: {a} vs {b}");
                assert!((b - q_gaussian_density(-x, q, &trunc()).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn q_gaussian_unit_variance() {
        for &q in &[0.0, 0.4, 0.8] {
            let p = params(0.0, q);
            let qd = NuQuadrature::new(p, &trunc(), DEFAULT_QUAD_ORDER).unwrap();
            assert!((qd.moment(0) - 1.0).abs() < 1e-8);
            assert!((qd.moment(2) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn normalization_and_second_moment() {
        // near |α| = 1 the density peaks sharply and needs a finer rule
        let cases = [
            (-0.5, 0.5, 400),
            (0.3, 0.6, 400),
            (0.5, 0.5, 400),
            (0.4, -0.7, 400),
            (-0.95, 0.2, 1600),
            (0.95, -0.4, 1600),
        ];
        for &(a, q, order) in &cases {
            let qd = NuQuadrature::new(params(a, q), &trunc(), order).unwrap();
            assert!((qd.moment(0) - 1.0).abs() < 1e-8, "({a},{q}) mass {}", qd.moment(0));
            assert!((qd.moment(2) - (1.0 + a)).abs() < 1e-8);
            assert!(qd.moment(3).abs() < 1e-10);
        }
        let one = integrate(|_| 1.0, params(-0.5, 0.5), &trunc(), DEFAULT_QUAD_ORDER).unwrap();
        assert!((one - 1.0).abs() < 1e-8);
    }

    #[test]
    fn orthogonality() {
        for &(a, q) in &[(-0.5, 0.5), (0.3, 0.6), (0.5, 0.5)] {
            let qd = quad(a, q);
            let j = mp_jacobi(params(a, q), 6);
            let polys = polynomials(&j, 6).unwrap();
            for m in 0..=6 {
                for n in 0..=6 {
                    let got = qd.integrate(|x| polys[m].eval(x) * polys[n].eval(x));
                    let norm = norm_squared(&j, n).unwrap();
                    let want = if m == n { norm } else { 0.0 };
                    assert!((got - want).abs() <= 1e-6 * norm.max(1.0), "({a},{q}) m={m} n={n}");
                }
            }
        }
        let qd = quad(-0.5, 0.5);
        let j = mp_jacobi(params(-0.5, 0.5), 3);
        let polys = polynomials(&j, 3).unwrap();
        let p12 = qd.integrate(|x| polys[1].eval(x) * polys[2].eval(x));
        assert!(p12.abs() < 1e-8);
        let p33 = qd.integrate(|x| polys[3].eval(x).powi(2));
        let w3 = norm_squared(&j, 3).unwrap();
        assert!((p33 - w3).abs() / w3 < 1e-6);
    }

    #[test]
    fn moments_agree_with_jacobi() {
        for &(a, q) in &[(-0.4, 0.3), (0.7, 0.2), (0.2, -0.5)] {
            let qd = quad(a, q);
            let m = moments_from_jacobi(&mp_jacobi(params(a, q), 5), 8).unwrap();
            for (k, mk) in m.iter().enumerate() {
                assert!((qd.moment(k) - mk).abs() < 1e-6, "({a},{q}) k={k}");
            }
        }
    }

    #[test]
    fn nonnegative_on_interior_grid() {
        for &(a, q) in &[
            (-0.95, 0.0),
            (0.95, 0.0),
            (0.5, 0.5),
            (-0.5, -0.5),
            (0.9, 0.9),
            (-0.9, -0.9),
        ] {
            let s = SupportInterval::for_q(q);
            for x in s.interior_grid(1000) {
                assert!(nu_density(x, params(a, q), &trunc()).unwrap() >= 0.0, "({a},{q}) x={x}");
            }
        }
    }
}
