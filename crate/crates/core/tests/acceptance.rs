//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use aqfock_core::density::{NuQuadrature, DEFAULT_QUAD_ORDER};
use aqfock_core::fock1::{jacobi_limit_check, scaled_limit_check, verify_relations, verify_relations_exact};
use aqfock_core::jacobi::{moments_from_jacobi, mp_jacobi, norm_squared, polynomials};
use aqfock_core::qcalc::{q_factorial, q_number, q_pochhammer, rogers_szego, rogers_szego_recurrence};
use aqfock_core::radial::{
    classify, is_nonnegative, moment, radial_measure, rho_nu_alpha_q, rho_nu_qq, signed_measure, t_deform,
    target_moment,
};
use aqfock_core::typeb::{
    basis_gram, check_commutation, enumerate_group, vacuum_moment, verify_braid_relations, Involution,
};
use aqfock_core::{QParams, TruncationPolicy};

type Outcome = Result<String, String>;

fn params(a: f64, q: f64) -> QParams {
    QParams::new(a, q).expect("valid parameters")
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || format!("runtime {elapsed:.2?} exceeds {budget:?}"))?;
    Ok(elapsed)
}

fn err(e: aqfock_core::Error) -> String {
    e.to_string()
}

fn moment_reproduction() -> Outcome {
    let start = Instant::now();
    let trunc = TruncationPolicy::new(1e-18, 10_000).map_err(err)?;
    let mut worst = 0.0f64;
    for &(a, q) in &[(-0.5, 0.5), (0.2, 0.6), (-0.9, 0.0), (0.5, 0.5), (-0.3, -0.3)] {
        let p = params(a, q);
        let m = radial_measure(p, &trunc).map_err(err)?;
        for k in 0..=12 {
            let e = rel(moment(&m, 2 * k).map_err(err)?, target_moment(p, k));
            worst = worst.max(e);
            ensure(e <= 1e-8, || format!("({a},{q}) k={k}: relative error {e:e}"))?;
        }
    }
    let t = within_budget(start, Duration::from_secs(5))?;
    Ok(format!("max relative error {worst:.2e}, {t:.2?}"))
}

fn existence_dichotomy() -> Outcome {
    let trunc = TruncationPolicy::default();
    let grid: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 0.0475).collect();
    let (mut positive, mut signed, mut skipped) = (0, 0, 0);
    for &a in &grid {
        for &q in &grid {
            let p = params(a, q);
            let verdict = classify(p);
            let region = (q >= 0.0 && a <= q) || a == q;
            ensure(verdict.exists == region, || {
                format!("({a},{q}): classify says {}", verdict.branch)
            })?;
            if verdict.exists {
                let m = radial_measure(p, &trunc).map_err(err)?;
                ensure(is_nonnegative(&m, 1e-12), || {
                    format!("({a},{q}): negative weight in a positive branch")
                })?;
                positive += 1;
            } else if q >= 0.0 {
                let m = signed_measure(p, &trunc).map_err(err)?;
                let min = m.min_weight().unwrap_or(0.0);
                ensure(min < -1e-6, || {
                    format!("({a},{q}): smallest weight {min:e} is not below -1e-6")
                })?;
                signed += 1;
            } else {
                skipped += 1;
            }
        }
    }
    Ok(format!(
        "{positive} nonnegative constructions, {signed} signed with a weight < -1e-6, {skipped} with q < 0 and alpha != q"
    ))
}

fn orthogonality() -> Outcome {
    let start = Instant::now();
    let trunc = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for &(a, q) in &[(-0.5, 0.5), (0.3, 0.6), (0.5, 0.5)] {
        let p = params(a, q);
        let quad = NuQuadrature::new(p, &trunc, DEFAULT_QUAD_ORDER).map_err(err)?;
        let j = mp_jacobi(p, 6);
        let polys = polynomials(&j, 6).map_err(err)?;
        for m in 0..=6 {
            for n in 0..=6 {
                let norm = norm_squared(&j, n).map_err(err)?;
                let want = if m == n { norm } else { 0.0 };
                let got = quad.integrate(|x| polys[m].eval(x) * polys[n].eval(x));
                let e = (got - want).abs() / norm.max(1.0);
                worst = worst.max(e);
                ensure(e <= 1e-6, || format!("({a},{q}) m={m} n={n}: scaled error {e:e}"))?;
            }
        }
    }
    let t = within_budget(start, Duration::from_secs(10))?;
    Ok(format!(
        "max scaled error {worst:.2e}, order {DEFAULT_QUAD_ORDER}, {t:.2?}"
    ))
}

fn type_b_brute_force() -> Outcome {
    let points = [(-0.5, 0.5), (0.3, 0.6), (0.7, -0.4), (0.0, 0.0), (-0.9, 0.2)];
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let table = enumerate_group(n).map_err(err)?;
        let expected_size = (1usize << n) * (1..=n).product::<usize>();
        ensure(table.len() == expected_size, || {
            format!("n={n}: {} elements", table.len())
        })?;
        let braids = verify_braid_relations(n).map_err(err)?;
        if let Some(b) = braids.iter().find(|b| !b.holds) {
            return Err(format!("n={n}: {} fails", b.relation));
        }
        for d in 1..=2 {
            for (sign, j) in [(1.0, Involution::identity(d)), (-1.0, Involution::negated(d))] {
                for &(a, q) in &points {
                    let g = basis_gram(&table, params(a, q), &j).map_err(err)?;
                    // e_1^{⊗n} sits at flat index 0; ⟨e_1, J e_1⟩ = sign
                    let want: f64 = (1..=n)
                        .map(|k| (1.0 + sign * a * q.powi(k as i32 - 1)) * q_number(k, q))
                        .product();
                    let e = (g[(0, 0)] - want).abs();
                    worst = worst.max(e);
                    ensure(e <= 1e-12, || format!("n={n} d={d} J={sign}I ({a},{q}): error {e:e}"))?;
                }
            }
        }
    }
    Ok(format!(
        "n <= 4, d <= 2, J = +-I; max error {worst:.2e}; group sizes and braid relations exact"
    ))
}

fn commutation_relations() -> Outcome {
    let mut worst = 0.0f64;
    for &(a, q) in &[(0.0, 0.5), (0.5, 0.5), (-0.3, 0.7), (-0.6, -0.6), (0.8, -0.3)] {
        let p = params(a, q);
        let report = verify_relations(p, 24).map_err(err)?;
        let r = report.max_block_residual();
        worst = worst.max(r);
        ensure(r < 1e-12, || format!("({a},{q}): one-mode residual {r:e}"))?;
        let exact = verify_relations_exact(p, 24).map_err(err)?;
        if let Some(x) = exact.iter().find(|x| !x.holds) {
            return Err(format!("({a},{q}): {} not exactly zero", x.relation));
        }
    }
    let mut tensor_worst = 0.0f64;
    let mut cond = 0.0f64;
    for &(a, q) in &[(0.5, -0.5), (-0.4, 0.3), (0.7, 0.6)] {
        for j in [
            Involution::identity(2),
            Involution::negated(2),
            Involution::signature(&[1.0, -1.0]).map_err(err)?,
        ] {
            let report = check_commutation(params(a, q), 2, 2, &j).map_err(err)?;
            let r = report.max_residual();
            tensor_worst = tensor_worst.max(r);
            cond = cond.max(report.max_condition());
            ensure(r < 1e-10, || format!("({a},{q}): tensor residual {r:e}"))?;
        }
    }
    Ok(format!(
        "one-mode max {worst:.2e} (23x23 block, exact mode zero); tensor max {tensor_worst:.2e}, Gram condition <= {cond:.1}"
    ))
}

fn rogers_szego_facts() -> Outcome {
    let mut worst = 0.0f64;
    let qs = [0.1, -0.1, 0.5, -0.5, 0.9, -0.9];
    for &q in &qs {
        for i in 0..=100 {
            let z = (i as f64 - 50.0) / 10.0;
            for n in 0..=30 {
                let (s, r) = (rogers_szego(n, z, q), rogers_szego_recurrence(n, z, q));
                let e = (s - r).abs() / s.abs().max(1.0);
                worst = worst.max(e);
                ensure(e <= 1e-12, || format!("n={n} z={z} q={q}: {s} vs {r}"))?;
            }
        }
        for n in (1..=19).step_by(2) {
            let h = rogers_szego(n, -1.0, q);
            ensure(h.abs() <= 1e-12, || format!("h_{n}(-1|{q}) = {h:e}"))?;
        }
        for i in 0..=1000 {
            let x = (i as f64 - 500.0) / 100.0;
            for n in (0..=20).step_by(2) {
                let h = rogers_szego(n, x, q);
                ensure(h > 0.0, || format!("h_{n}({x}|{q}) = {h:e}"))?;
            }
        }
    }
    Ok(format!(
        "max sum/recurrence discrepancy {worst:.2e}; odd zeros at -1; even positivity on [-5,5] step 0.01"
    ))
}

fn q_squared_identity() -> Outcome {
    let mut worst = 0.0f64;
    for &q in &[0.2, -0.2, 0.5, -0.5, 0.8, -0.8] {
        for k in 0..=20 {
            let lhs = q_pochhammer(-q, q, k) * q_factorial(k, q);
            let rhs = (1.0 + q).powi(k as i32) * q_factorial(k, q * q);
            let e = rel(lhs, rhs);
            worst = worst.max(e);
            ensure(e <= 1e-12, || format!("q={q} k={k}: relative {e:e}"))?;
        }
    }
    let trunc = TruncationPolicy::new(1e-18, 10_000).map_err(err)?;
    let mut measure_worst = 0.0f64;
    for &q in &[0.2, 0.5, 0.8] {
        let a = rho_nu_qq(q, &trunc).map_err(err)?;
        let b = rho_nu_alpha_q(params(q, q), &trunc).map_err(err)?;
        for k in 0..=12 {
            let e = rel(moment(&a, 2 * k).map_err(err)?, moment(&b, 2 * k).map_err(err)?);
            measure_worst = measure_worst.max(e);
            ensure(e <= 1e-8, || format!("q={q} k={k}: measures disagree by {e:e}"))?;
        }
    }
    Ok(format!(
        "identity max {worst:.2e}; measure moments agree to {measure_worst:.2e}"
    ))
}

fn vacuum_triangle() -> Outcome {
    let p = params(-0.4, 0.3);
    let tri = moments_from_jacobi(&mp_jacobi(p, 4), 8).map_err(err)?;
    let quad = NuQuadrature::new(p, &TruncationPolicy::default(), DEFAULT_QUAD_ORDER).map_err(err)?;
    let mut worst = 0.0f64;
    for k in 0..=8 {
        let chain = vacuum_moment(p, k).map_err(err)?;
        let integral = quad.moment(k);
        let spread = [chain, tri[k], integral];
        let e = spread.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
            - spread.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        worst = worst.max(e);
        ensure(e <= 1e-6, || {
            format!("k={k}: chain {chain}, tridiagonal {}, quadrature {integral}", tri[k])
        })?;
    }
    Ok(format!("max spread {worst:.2e} for k <= 8"))
}

fn t_deformation() -> Outcome {
    let trunc = TruncationPolicy::default();
    let base = radial_measure(params(-0.5, 0.5), &trunc).map_err(err)?;
    let mut worst = 0.0f64;
    for &t in &[1.0, 1.5, 3.0] {
        let d = t_deform(&base, t).map_err(err)?;
        for k in 0..=12 {
            let got = moment(&d, 2 * k).map_err(err)?;
            let want = if k == 0 {
                1.0
            } else {
                moment(&base, 2 * k).map_err(err)? / t
            };
            let e = rel(got, want);
            worst = worst.max(e);
            ensure(e <= 1e-13, || format!("t={t} k={k}: relative {e:e}"))?;
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn limit_smoke_tests() -> Outcome {
    let m = scaled_limit_check(1.0, 0.999, 11).map_err(err)?;
    let j = jacobi_limit_check(1.0, 0.999, 10).map_err(err)?;
    let (mr, jr) = (m.max_rel_deviation(), j.max_rel_deviation());
    ensure(mr < 1e-2, || format!("M diagonal relative deviation {mr:e}"))?;
    ensure(jr < 1e-2, || format!("Jacobi relative deviation {jr:e}"))?;
    Ok(format!(
        "relative deviation: M {mr:.2e}, Jacobi {jr:.2e} (absolute: M {:.3}, Jacobi {:.3})",
        m.max_abs_deviation(),
        j.max_abs_deviation()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("moment reproduction", moment_reproduction),
        ("existence dichotomy", existence_dichotomy),
        ("orthogonality by quadrature", orthogonality),
        ("type-B brute force", type_b_brute_force),
        ("commutation relations", commutation_relations),
        ("Rogers-Szego facts", rogers_szego_facts),
        ("q-squared identity", q_squared_identity),
        ("vacuum-moment triangle", vacuum_triangle),
        ("t-deformation", t_deformation),
        ("limit smoke tests", limit_smoke_tests),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
