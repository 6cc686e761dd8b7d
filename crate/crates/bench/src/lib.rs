//! Shared fixtures for the criterion benches.

use aqfock_core::{QParams, TruncationPolicy};

/// One parameter point per existence branch, plus a point near `q = 1`.
pub const POINTS: [(&str, f64, f64); 4] = [
    ("q_zero", -0.5, 0.0),
    ("q_pos_alpha_lt", -0.5, 0.5),
    ("alpha_eq_q", -0.3, -0.3),
    ("near_one", -0.5, 0.95),
];

pub fn params(alpha: f64, q: f64) -> QParams {
    QParams::new(alpha, q).expect("fixture parameters lie in the open square")
}

pub fn default_trunc() -> TruncationPolicy {
    TruncationPolicy::default()
}
