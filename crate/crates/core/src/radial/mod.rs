//! Discrete (possibly signed) radial measures and the radial Bargmann
//! constructions for the (α,q)-Gaussian law.
//!
//! All measures here are finite atom lists on `[0, ∞)`. The constructions
//! target the even moments `∫ r^{2k} ρ(dr) = (-α;q)_k [k]_q!`:
//!
//! * [`rho_alpha_q`]: atoms at `q^{n/2}` with moments `(-α;q)_k`;
//! * [`rho_nu_alpha_q`]: its Mellin product with the dilated q-Gaussian
//!   radial measure, atoms at `(1-q)^{-1/2} q^{n/2}`;
//! * [`rho_nu_qq`]: the `α = q` measure, atoms at `(1-q)^{-1/2} |q|^n`, which
//!   also covers `q < 0`.
//!
//! [`classify`] decides whether a positive radial measure exists.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use io::{format_float, from_csv, to_csv, MeasureDocument, SCHEMA};

use crate::error::{Error, Result};
use crate::qcalc::{q_pochhammer_inf, qpow, QParams, TruncationPolicy};

/// Positions closer than this are merged during canonicalization.
pub const MERGE_TOL: f64 = 1e-14;
/// Weights smaller than this in magnitude are dropped during canonicalization.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub r: f64,
    pub w: f64,
}

/// How a measure's infinite series was cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub tol: f64,
    pub terms: usize,
    /// Upper bound on the total absolute weight that was discarded.
    #[serde(with = "io::finite_or_null")]
    pub residual: f64,
}

impl TruncationRecord {
    pub fn exact(terms: usize) -> Self {
        Self {
            tol: 0.0,
            terms,
            residual: 0.0,
        }
    }
}

/// Finite signed measure on `[0, ∞)` in canonical form: strictly increasing
/// positions, no negligible weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRadialMeasure {
    atoms: Vec<Atom>,
    truncation: TruncationRecord,
}

impl DiscreteRadialMeasure {
    /// Canonicalizes the given atoms. Positions must be finite and nonnegative.
    pub fn from_atoms(atoms: Vec<Atom>, truncation: TruncationRecord) -> Result<Self> {
        if let Some(a) = atoms
            .iter()
            .find(|a| !(a.r.is_finite() && a.r >= 0.0 && a.w.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "atom ({}, {}) must have a finite nonnegative position and finite weight",
                a.r, a.w
            )));
        }
        Ok(Self {
            atoms: canonicalize(atoms),
            truncation,
        })
    }

    pub fn point_mass(r: f64) -> Result<Self> {
        Self::from_atoms(vec![Atom { r, w: 1.0 }], TruncationRecord::exact(1))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn truncation(&self) -> TruncationRecord {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.w))
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.w.abs()).sum()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.atoms.iter().map(|a| a.w).reduce(f64::min)
    }
}

impl fmt::Display for DiscreteRadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|a| format!("{}·δ_{}", a.w, a.r)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn canonicalize(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.r.total_cmp(&b.r));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    let mut cluster_start = f64::NEG_INFINITY;
    for atom in atoms {
        match out.last_mut() {
            Some(last) if atom.r - cluster_start <= MERGE_TOL => last.w += atom.w,
            _ => {
                cluster_start = atom.r;
                out.push(atom);
            }
        }
    }
    out.retain(|a| a.w.abs() >= NEGLIGIBLE_WEIGHT);
    out
}

/// Neumaier summation; signed weights cancel heavily when `α > q`.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `∫ r^{two_k} μ(dr)`; only even orders are meaningful for radial measures.
pub fn moment(mu: &DiscreteRadialMeasure, two_k: usize) -> Result<f64> {
    if !two_k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "radial moments are even, got order {two_k}"
        )));
    }
    Ok(compensated_sum(mu.atoms.iter().map(|a| a.w * qpow(a.r, two_k))))
}

/// Push-forward under `r ↦ t r`.
pub fn dilate(mu: &DiscreteRadialMeasure, t: f64) -> Result<DiscreteRadialMeasure> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dilation factor must be positive, got {t}"
        )));
    }
    let atoms = mu.atoms.iter().map(|a| Atom { r: a.r * t, w: a.w }).collect();
    DiscreteRadialMeasure::from_atoms(atoms, mu.truncation)
}

/// Multiplicative (Mellin) convolution: law of the product of independent
/// radii. Moments multiply.
pub fn mellin_convolve(mu: &DiscreteRadialMeasure, nu: &DiscreteRadialMeasure) -> DiscreteRadialMeasure {
    let mut atoms = Vec::with_capacity(mu.len() * nu.len());
    for a in &mu.atoms {
        for b in &nu.atoms {
            atoms.push(Atom {
                r: a.r * b.r,
                w: a.w * b.w,
            });
        }
    }
    let (tm, tn) = (mu.truncation, nu.truncation);
    let truncation = TruncationRecord {
        tol: tm.tol.max(tn.tol),
        terms: tm.terms * tn.terms,
        residual: mu.total_variation() * tn.residual + nu.total_variation() * tm.residual + tm.residual * tn.residual,
    };
    DiscreteRadialMeasure {
        atoms: canonicalize(atoms),
        truncation,
    }
}

/// `(1 - 1/t) δ_0 + (1/t) μ`, for `t ≥ 1`.
pub fn t_deform(mu: &DiscreteRadialMeasure, t: f64) -> Result<DiscreteRadialMeasure> {
    if !(t.is_finite() && t >= 1.0) {
        return Err(Error::InvalidArgument(format!("t must be at least 1, got {t}")));
    }
    let mut atoms: Vec<Atom> = mu.atoms.iter().map(|a| Atom { r: a.r, w: a.w / t }).collect();
    atoms.push(Atom {
        r: 0.0,
        w: 1.0 - 1.0 / t,
    });
    DiscreteRadialMeasure::from_atoms(atoms, mu.truncation)
}

/// True iff every weight is at least `-tol`.
pub fn is_nonnegative(mu: &DiscreteRadialMeasure, tol: f64) -> bool {
    mu.atoms.iter().all(|a| a.w >= -tol)
}

/// Largest weight discrepancy between two measures, pairing atoms whose
/// positions agree within `pos_tol`; unpaired atoms count against zero.
pub fn atomwise_distance(a: &DiscreteRadialMeasure, b: &DiscreteRadialMeasure, pos_tol: f64) -> f64 {
    let (xs, ys) = (&a.atoms, &b.atoms);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < xs.len() || j < ys.len() {
        let diff = match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) if (x.r - y.r).abs() <= pos_tol => {
                i += 1;
                j += 1;
                x.w - y.w
            }
            (Some(x), Some(y)) if x.r < y.r => {
                i += 1;
                x.w
            }
            (Some(_), Some(y)) => {
                j += 1;
                y.w
            }
            (Some(x), None) => {
                i += 1;
                x.w
            }
            (None, Some(y)) => {
                j += 1;
                y.w
            }
            (None, None) => unreachable!(),
        };
        worst = worst.max(diff.abs());
    }
    worst
}

/// Generates weights `w_0, w_1, ...` until both the position rule of `trunc`
/// (`|q|^n < tol`) and the tail bound (`tail(n, w_n) < 10·tol`) are met, or
/// the term cap is reached.
fn truncated_weights(
    trunc: &TruncationPolicy,
    ratio: f64,
    mut weight: impl FnMut(usize) -> f64,
    tail: impl Fn(usize, f64) -> f64,
) -> (Vec<f64>, f64) {
    let min_terms = trunc.terms(ratio);
    let mut weights = Vec::new();
    loop {
        let n = weights.len();
        let w = weight(n);
        weights.push(w);
        let residual = tail(n, w);
        if (n + 1 >= min_terms && residual < 10.0 * trunc.tol()) || n + 1 >= trunc.max_terms() {
            return (weights, residual);
        }
    }
}

/// Tail of a series whose consecutive weight ratios are bounded by `ratio`.
fn geometric_tail(last: f64, ratio: f64) -> f64 {
    if ratio < 1.0 {
        last.abs() * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

fn require_nonnegative_q(q: f64) -> Result<()> {
    if q < 0.0 {
        Err(Error::InvalidArgument(format!(
            "construction requires q in [0, 1), got {q}"
        )))
    } else {
        Ok(())
    }
}

/// `(-α;q)_∞ Σ_n (-α)^n/(q;q)_n δ_{q^{n/2}}`, whose moments are `(-α;q)_k`.
///
/// At `q = 0` all atoms with `n ≥ 1` sit at the origin and merge into
/// `-α δ_0`.
pub fn rho_alpha_q(params: QParams, trunc: &TruncationPolicy) -> Result<DiscreteRadialMeasure> {
    let (alpha, q) = (params.alpha(), params.q());
    require_nonnegative_q(q)?;
    let scale = q_pochhammer_inf(-alpha, q, trunc)?;
    let mut coeff = scale;
    let (weights, residual) = truncated_weights(
        trunc,
        q,
        |n| {
            if n > 0 {
                coeff *= -alpha / (1.0 - qpow(q, n));
            }
            coeff
        },
        |n, w| geometric_tail(w, alpha.abs() / (1.0 - qpow(q, n + 1))),
    );
    let root = q.sqrt();
    let atoms = weights
        .iter()
        .enumerate()
        .map(|(n, &w)| Atom { r: qpow(root, n), w })
        .collect();
    DiscreteRadialMeasure::from_atoms(
        atoms,
        TruncationRecord {
            tol: trunc.tol(),
            terms: weights.len(),
            residual,
        },
    )
}

/// Radial measure with moments `(-α;q)_k [k]_q!` for `q ∈ [0, 1)`; signed in
/// general, nonnegative exactly when `α ≤ q`.
///
/// For `q > 0` the weight of the atom at `(1-q)^{-1/2} q^{n/2}` is
/// `(-α,q;q)_∞ q^n h_n(-α/q | q) / (q;q)_n`. The scaled factor
/// `q^n h_n(-α/q|q)/(q;q)_n` is generated by its own three-term recurrence,
/// which neither overflows for small `q` nor cancels for `q` near 1. At
/// `q = 0` the measure is `-α δ_0 + (1+α) δ_1`.
pub fn rho_nu_alpha_q(params: QParams, trunc: &TruncationPolicy) -> Result<DiscreteRadialMeasure> {
    let (alpha, q) = (params.alpha(), params.q());
    require_nonnegative_q(q)?;
    if q == 0.0 {
        return DiscreteRadialMeasure::from_atoms(
            vec![Atom { r: 0.0, w: -alpha }, Atom { r: 1.0, w: 1.0 + alpha }],
            TruncationRecord::exact(2),
        );
    }
    let scale = q_pochhammer_inf(-alpha, q, trunc)? * q_pochhammer_inf(q, q, trunc)?;
    // u_n = q^n h_n(-α/q|q)/(q;q)_n and its majorant v_n (α replaced by -|α|)
    // both satisfy x_{n+1} = ((q - a) x_n + a q x_{n-1}) / (1 - q^{n+1}).
    let a_abs = alpha.abs();
    let rho = a_abs.max(q);
    let (mut u_prev, mut u) = (0.0f64, 1.0f64);
    let (mut v_prev, mut v) = (0.0f64, 1.0f64);
    let min_terms = trunc.terms(q);
    let mut weights = vec![scale];
    let residual = loop {
        let n = weights.len() - 1;
        // later ratios v_{m+1}/v_m stay below max(v_n/v_{n-1}, ρ) / (q^{n+1};q)_∞
        let tail_factor = 1.0 - qpow(q, n + 1) / (1.0 - q);
        let ratio = if n == 0 { rho } else { (v / v_prev).max(rho) } / tail_factor;
        let residual = if tail_factor > 0.0 && ratio < 1.0 {
            scale.abs() * v * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if (n + 1 >= min_terms && residual < 10.0 * trunc.tol()) || n + 1 >= trunc.max_terms() {
            break residual;
        }
        let denom = 1.0 - qpow(q, n + 1);
        let u_next = ((q - alpha) * u + alpha * q * u_prev) / denom;
        let v_next = ((q + a_abs) * v - a_abs * q * v_prev) / denom;
        (u_prev, u) = (u, u_next);
        (v_prev, v) = (v, v_next);
        weights.push(scale * u);
    };
    let root = q.sqrt();
    let dilation = (1.0 - q).sqrt().recip();
    let atoms = weights
        .iter()
        .enumerate()
        .map(|(n, &w)| Atom {
            r: dilation * qpow(root, n),
            w,
        })
        .collect();
    DiscreteRadialMeasure::from_atoms(
        atoms,
        TruncationRecord {
            tol: trunc.tol(),
            terms: weights.len(),
            residual,
        },
    )
}

/// `(q²;q²)_∞ Σ_n q^{2n}/(q²;q²)_n δ_{(1-q)^{-1/2}|q|^n}`, the radial measure
/// for `α = q ≠ 0`; moments `(1+q)^k [k]_{q²}! = (-q;q)_k [k]_q!`.
pub fn rho_nu_qq(q: f64, trunc: &TruncationPolicy) -> Result<DiscreteRadialMeasure> {
    crate::qcalc::check_open_unit("q", q)?;
    if q == 0.0 {
        return Err(Error::InvalidArgument("the alpha = q construction needs q != 0".into()));
    }
    let q2 = q * q;
    let mut coeff = q_pochhammer_inf(q2, q2, trunc)?;
    let (weights, residual) = truncated_weights(
        trunc,
        q,
        |n| {
            if n > 0 {
                coeff *= q2 / (1.0 - qpow(q2, n));
            }
            coeff
        },
        |n, w| geometric_tail(w, q2 / (1.0 - qpow(q2, n + 1))),
    );
    let dilation = (1.0 - q).sqrt().recip();
    let atoms = weights
        .iter()
        .enumerate()
        .map(|(n, &w)| Atom {
            r: dilation * qpow(q.abs(), n),
            w,
        })
        .collect();
    DiscreteRadialMeasure::from_atoms(
        atoms,
        TruncationRecord {
            tol: trunc.tol(),
            terms: weights.len(),
            residual,
        },
    )
}

/// Which case of the existence theorem applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// `q = 0`, `α ≤ 0`: `-α δ_0 + (1+α) δ_1`.
    QZero,
    /// `q > 0`, `α < q`.
    QPosAlphaLt,
    /// `α = q ≠ 0`.
    AlphaEqQ,
    None,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::QZero => "Q_ZERO",
            Branch::QPosAlphaLt => "Q_POS_ALPHA_LT",
            Branch::AlphaEqQ => "ALPHA_EQ_Q",
            Branch::None => "NONE",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub exists: bool,
    pub branch: Branch,
    pub reason: String,
}

/// Existence of a radial Bargmann representation: true iff
/// `(q ≥ 0 and α ≤ q)` or `α = q ≠ 0`. `α = q` is compared exactly.
pub fn classify(params: QParams) -> ExistenceVerdict {
    classify_with_epsilon(params, 0.0)
}

/// [`classify`] with `|α - q| ≤ eps` counted as `α = q`.
pub fn classify_with_epsilon(params: QParams, eps: f64) -> ExistenceVerdict {
    let (alpha, q) = (params.alpha(), params.q());
    let verdict = |branch: Branch, reason: &str| ExistenceVerdict {
        exists: branch != Branch::None,
        branch,
        reason: reason.to_string(),
    };
    if q == 0.0 && alpha <= 0.0 {
        verdict(Branch::QZero, "alpha <= q = 0")
    } else if (alpha - q).abs() <= eps {
        verdict(Branch::AlphaEqQ, "alpha = q != 0")
    } else if q > 0.0 && alpha < q {
        verdict(Branch::QPosAlphaLt, "q > 0 and alpha < q")
    } else if q >= 0.0 {
        verdict(Branch::None, "alpha > q >= 0")
    } else {
        verdict(Branch::None, "q < 0 and alpha != q")
    }
}

/// The unique positive radial measure for the verdict's branch.
pub fn radial_measure(params: QParams, trunc: &TruncationPolicy) -> Result<DiscreteRadialMeasure> {
    construct(params, classify(params), trunc)
}

/// Builds the measure selected by `verdict`.
pub fn construct(
    params: QParams,
    verdict: ExistenceVerdict,
    trunc: &TruncationPolicy,
) -> Result<DiscreteRadialMeasure> {
    match verdict.branch {
        Branch::QZero | Branch::QPosAlphaLt => rho_nu_alpha_q(params, trunc),
        Branch::AlphaEqQ => rho_nu_qq(params.q(), trunc),
        Branch::None => Err(Error::NoRepresentation(verdict.reason)),
    }
}

/// The signed moment-matching measure, whether or not it is positive.
/// Only `q < 0` with `α ≠ q` has no atomic construction on `[0, ∞)`.
pub fn signed_measure(params: QParams, trunc: &TruncationPolicy) -> Result<DiscreteRadialMeasure> {
    let verdict = classify(params);
    match verdict.branch {
        Branch::None if params.q() >= 0.0 => rho_nu_alpha_q(params, trunc),
        _ => construct(params, verdict, trunc),
    }
}

/// `(-α;q)_k [k]_q!`, the moment sequence every construction targets.
pub fn target_moment(params: QParams, k: usize) -> f64 {
    use crate::qcalc::{q_factorial, q_pochhammer};
    q_pochhammer(-params.alpha(), params.q(), k) * q_factorial(k, params.q())
}
