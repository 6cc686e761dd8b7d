//! Numerics for the (α,q)-Gaussian (q-Meixner-Pollaczek) law: q-calculus
//! primitives, three-term recurrence machinery, radial Bargmann measures and
//! their existence classifier, the continuous density with quadrature, the
//! one-mode (α,q)-operators, and a brute-force type-B Coxeter group backend.

pub mod density;
pub mod error;
pub mod fock1;
pub mod jacobi;
pub mod qcalc;
pub mod radial;
pub mod typeb;

pub use error::{Error, Result};
pub use jacobi::{mp_jacobi, JacobiSequence, MonicPolynomial};
pub use qcalc::{Precision, QParams, TruncationPolicy};
pub use radial::{Atom, Branch, DiscreteRadialMeasure, ExistenceVerdict, TruncationRecord};
