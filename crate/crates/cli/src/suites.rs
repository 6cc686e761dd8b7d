//! Named verification suites for `aqfock verify`.
//!
//! Every check reduces to a non-negative `value` compared against a `limit`;
//! a check passes when `value <= limit`. Counts of violations use limit 0.

use aqfock_core::density::{NuQuadrature, SupportInterval};
use aqfock_core::fock1::{jacobi_limit_check, scaled_limit_check, verify_relations, verify_relations_exact};
use aqfock_core::jacobi::{moments_from_jacobi, norm_squared, polynomials};
use aqfock_core::qcalc::{q_factorial, q_pochhammer, rogers_szego, rogers_szego_recurrence};
use aqfock_core::radial::{
    self, atomwise_distance, classify, construct, rho_nu_alpha_q, rho_nu_qq, signed_measure, t_deform, target_moment,
    MeasureDocument,
};
use aqfock_core::typeb::{
    check_commutation, enumerate_group, power_norm, vacuum_moment, verify_braid_relations, verify_reduced_words,
    Involution, MAX_GROUP_RANK,
};
use aqfock_core::{mp_jacobi, QParams, TruncationPolicy};

use crate::table::{Cell, Table};
use crate::{Report, Suite, UsageError, VerifyArgs, EXIT_VERIFY_FAILED};

const COLUMNS: &[&str] = &["suite", "check", "dim", "value", "limit", "status"];

/// Largest tensor rank on which reduced words are enumerated exhaustively.
const REDUCED_WORD_RANK: usize = 4;

struct Checks {
    suite: &'static str,
    table: Table,
    failures: usize,
}

impl Checks {
    fn new(suite: &'static str, table: Table) -> Self {
        Self {
            suite,
            table,
            failures: 0,
        }
    }

    fn record(&mut self, check: impl Into<String>, dim: Option<usize>, value: f64, limit: f64) {
        let pass = value <= limit;
        if !pass {
            self.failures += 1;
        }
        self.table.push(vec![
            self.suite.into(),
            check.into().into(),
            dim.into(),
            value.into(),
            limit.into(),
            Cell::from(if pass { "PASS" } else { "FAIL" }),
        ]);
    }

    fn finish(self) -> (Table, usize) {
        (self.table, self.failures)
    }
}

fn p(alpha: f64, q: f64) -> anyhow::Result<QParams> {
    Ok(QParams::new(alpha, q)?)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn qcalc_suite(c: &mut Checks) {
    let qs = [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9];
    let mut worst = 0.0f64;
    for &q in &qs {
        for n in 0..=30 {
            for z in [-1.5, -1.0, -0.3, 0.0, 0.7, 1.0, 2.0] {
                worst = worst.max(rel(rogers_szego(n, z, q), rogers_szego_recurrence(n, z, q)));
            }
        }
    }
    c.record("rogers_szego sum = recurrence", Some(30), worst, 1e-12);

    let mut worst = 0.0f64;
    for &q in &qs {
        for n in (1..=19).step_by(2) {
            worst = worst.max(rogers_szego(n, -1.0, q).abs());
        }
    }
    c.record("rogers_szego odd n vanishes at -1", Some(19), worst, 1e-12);

    let mut negative = 0usize;
    for &q in &qs {
        for n in (0..=20).step_by(2) {
            for i in 0..=1000 {
                let x = -5.0 + 0.01 * i as f64;
                if rogers_szego(n, x, q) <= 0.0 {
                    negative += 1;
                }
            }
        }
    }
    c.record(
        "rogers_szego even n positive (violations)",
        Some(20),
        negative as f64,
        0.0,
    );

    let mut worst = 0.0f64;
    for &q in &[-0.8, -0.5, -0.2, 0.2, 0.5, 0.8] {
        for k in 0..=20 {
            let lhs = q_pochhammer(-q, q, k) * q_factorial(k, q);
            let rhs = (1.0 + q).powi(k as i32) * q_factorial(k, q * q);
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
    }
    c.record("q^2 identity", Some(20), worst, 1e-12);
}

fn radial_suite(c: &mut Checks) -> anyhow::Result<()> {
    let fine = TruncationPolicy::new(1e-18, 10_000)?;
    let trunc = TruncationPolicy::default();
    for &(a, q) in &[(-0.5, 0.5), (0.2, 0.6), (-0.9, 0.0), (0.5, 0.5), (-0.3, -0.3)] {
        let params = p(a, q)?;
        let mu = construct(params, classify(params), &fine)?;
        let mut worst = 0.0f64;
        for k in 0..=12 {
            let want = target_moment(params, k);
            worst = worst.max((radial::moment(&mu, 2 * k)? - want).abs() / want.abs());
        }
        c.record(format!("moments at ({a}, {q})"), Some(12), worst, 1e-8);
    }

    let axis: Vec<f64> = (0..21).map(|i| (i as f64 - 10.0) * 0.095).collect();
    let mut disagreements = 0usize;
    for &a in &axis {
        for &q in &axis {
            let params = p(a, q)?;
            let verdict = classify(params);
            if q < 0.0 && !verdict.exists {
                continue;
            }
            let w = signed_measure(params, &trunc)?.min_weight().unwrap_or(0.0);
            let agrees = if verdict.exists { w >= -1e-12 } else { w < -1e-6 };
            if !agrees {
                disagreements += 1;
            }
        }
    }
    c.record(
        "existence vs weight signs (21x21 grid)",
        None,
        disagreements as f64,
        0.0,
    );

    let mut worst = 0.0f64;
    for &q in &[0.2, 0.5, 0.8] {
        let params = p(q, q)?;
        let a = rho_nu_qq(q, &fine)?;
        let b = rho_nu_alpha_q(params, &fine)?;
        for k in 0..=10 {
            let (ma, mb) = (radial::moment(&a, 2 * k)?, radial::moment(&b, 2 * k)?);
            worst = worst.max((ma - mb).abs() / mb.abs());
        }
    }
    c.record("rho_nu_qq = rho_nu_alpha_q at alpha = q", Some(10), worst, 1e-10);

    let mut worst = 0.0f64;
    for &(a, q) in &[(-0.5, 0.5), (-0.3, -0.3), (-0.4, 0.0)] {
        let mu = radial::radial_measure(p(a, q)?, &trunc)?;
        for t in [1.0, 1.5, 3.0] {
            let nu = t_deform(&mu, t)?;
            for k in 0..=8 {
                let want = if k == 0 { 1.0 } else { radial::moment(&mu, 2 * k)? / t };
                worst = worst.max(rel(radial::moment(&nu, 2 * k)?, want));
            }
        }
    }
    c.record("t-deformation moments", Some(8), worst, 1e-12);

    let mut worst = 0.0f64;
    for &(a, q) in &[(-0.5, 0.5), (-0.3, -0.3), (0.0, 0.0)] {
        let mu = radial::radial_measure(p(a, q)?, &trunc)?;
        let doc = MeasureDocument::new(a, q, &mu);
        let back = MeasureDocument::from_json(&doc.to_json())?.measure()?;
        worst = worst.max(atomwise_distance(&mu, &back, 0.0));
        let back = radial::from_csv(&radial::to_csv(&mu))?;
        worst = worst.max(atomwise_distance(&mu, &back, 0.0));
    }
    c.record("JSON and CSV round trip", None, worst, 0.0);
    Ok(())
}

fn density_suite(c: &mut Checks, quad_order: usize) -> anyhow::Result<()> {
    let trunc = TruncationPolicy::default();
    for &(a, q) in &[(-0.5, 0.5), (0.3, 0.6), (0.5, 0.5)] {
        let params = p(a, q)?;
        let quad = NuQuadrature::new(params, &trunc, quad_order)?;
        let jacobi = mp_jacobi(params, 6);
        let polys = polynomials(&jacobi, 6)?;
        let mut worst = 0.0f64;
        for m in 0..=6 {
            for n in 0..=6 {
                let got = quad.integrate(|x| polys[m].eval(x) * polys[n].eval(x));
                let norm = norm_squared(&jacobi, n)?;
                let want = if m == n { norm } else { 0.0 };
                worst = worst.max((got - want).abs() / norm.max(1.0));
            }
        }
        c.record(format!("orthogonality at ({a}, {q})"), Some(quad_order), worst, 1e-6);
    }

    let params = p(0.2, -0.4)?;
    let support = SupportInterval::for_q(params.q());
    let mut negative = 0usize;
    for x in support.interior_grid(200) {
        if aqfock_core::density::nu_density(x, params, &trunc)? < 0.0 {
            negative += 1;
        }
    }
    c.record(
        "density nonnegative at (0.2, -0.4) (violations)",
        Some(200),
        negative as f64,
        0.0,
    );
    Ok(())
}

fn fock1_suite(c: &mut Checks, dim: usize) -> anyhow::Result<()> {
    for &(a, q) in &[(0.0, 0.5), (0.5, 0.5), (-0.3, 0.7), (-0.6, -0.6), (0.8, -0.3)] {
        let report = verify_relations(p(a, q)?, dim)?;
        for r in &report.residuals {
            c.record(
                format!("{} at ({a}, {q})", r.relation),
                Some(dim),
                r.block_residual,
                1e-12,
            );
        }
        let broken = verify_relations_exact(p(a, q)?, dim)?
            .iter()
            .filter(|r| !r.holds)
            .count();
        c.record(
            format!("exact relations at ({a}, {q}) (violations)"),
            Some(dim),
            broken as f64,
            0.0,
        );
    }
    let m = scaled_limit_check(1.0, 0.999, 11)?;
    c.record(
        "scaled M diagonal vs n + beta (relative)",
        Some(11),
        m.max_rel_deviation(),
        1e-2,
    );
    let j = jacobi_limit_check(1.0, 0.999, 10)?;
    c.record(
        "scaled omega_n vs (n + 2beta - 1)n/4 (relative)",
        Some(10),
        j.max_rel_deviation(),
        1e-2,
    );
    Ok(())
}

fn typeb_suite(c: &mut Checks, n: usize) -> anyhow::Result<()> {
    for k in 1..=n {
        let table = enumerate_group(k)?;
        let expected = (1..=k).product::<usize>() << k;
        c.record(
            "group order - 2^n n!",
            Some(k),
            table.len().abs_diff(expected) as f64,
            0.0,
        );
        let broken = verify_braid_relations(k)?.iter().filter(|b| !b.holds).count();
        c.record("braid relations (violations)", Some(k), broken as f64, 0.0);
        if k <= REDUCED_WORD_RANK {
            // an error here means some element had ill-defined statistics
            let bad = usize::from(verify_reduced_words(&table).is_err());
            c.record(
                "reduced-word statistics well defined (violations)",
                Some(k),
                bad as f64,
                0.0,
            );
        }
    }
    for &(a, q) in &[(-0.5, 0.5), (0.3, 0.6), (0.7, -0.4), (0.0, 0.0), (-0.9, 0.2)] {
        let params = p(a, q)?;
        let mut worst = 0.0f64;
        for k in 1..=n {
            let table = enumerate_group(k)?;
            for (sign, j) in [(1.0, Involution::identity(1)), (-1.0, Involution::negated(1))] {
                let got = power_norm(&table, params, &j, &[1.0])?;
                let want = target_moment(p(sign * a, q)?, k);
                worst = worst.max(rel(got, want));
            }
        }
        c.record(format!("Gram norm vs [omega_k]! at ({a}, {q})"), Some(n), worst, 1e-12);
    }
    let rank = n.saturating_sub(1).clamp(1, 2);
    for &(a, q) in &[(0.5, -0.5), (-0.4, 0.3), (0.7, 0.6)] {
        let params = p(a, q)?;
        let presets = [
            ("I", Involution::identity(2)),
            ("-I", Involution::negated(2)),
            ("diag(1 -1)", Involution::signature(&[1.0, -1.0])?),
        ];
        for (label, j) in presets {
            let report = check_commutation(params, 2, rank, &j)?;
            c.record(
                format!("tensor commutation at ({a}, {q}) J = {label}"),
                Some(rank),
                report.max_residual(),
                1e-10,
            );
        }
    }
    let params = p(-0.4, 0.3)?;
    let tri = moments_from_jacobi(&mp_jacobi(params, 4), 8)?;
    let mut worst = 0.0f64;
    for (k, &t) in tri.iter().enumerate() {
        worst = worst.max(rel(vacuum_moment(params, k)?, t));
    }
    c.record("vacuum moment chain = tridiagonal", Some(8), worst, 1e-12);
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> anyhow::Result<Report> {
    if args.dim < 3 {
        return Err(UsageError(format!("--dim must be at least 3, got {}", args.dim)).into());
    }
    if !(1..=MAX_GROUP_RANK).contains(&args.n) {
        return Err(UsageError(format!("--n must lie in 1..={MAX_GROUP_RANK}, got {}", args.n)).into());
    }
    if args.quad_order == 0 {
        return Err(UsageError("--quad-order must be at least 1".into()).into());
    }
    let wanted = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut table = Table::new(COLUMNS);
    let mut failures = 0;
    let mut run = |name: &'static str, body: &dyn Fn(&mut Checks) -> anyhow::Result<()>| -> anyhow::Result<()> {
        let mut checks = Checks::new(name, std::mem::replace(&mut table, Table::new(COLUMNS)));
        body(&mut checks)?;
        let (t, f) = checks.finish();
        table = t;
        failures += f;
        Ok(())
    };
    if wanted(Suite::Qcalc) {
        run("qcalc", &|c| {
            qcalc_suite(c);
            Ok(())
        })?;
    }
    if wanted(Suite::Radial) {
        run("radial", &radial_suite)?;
    }
    if wanted(Suite::Density) {
        run("density", &|c| density_suite(c, args.quad_order))?;
    }
    if wanted(Suite::Fock1) {
        run("fock1", &|c| fock1_suite(c, args.dim))?;
    }
    if wanted(Suite::Typeb) {
        run("typeb", &|c| typeb_suite(c, args.n))?;
    }
    if failures > 0 {
        eprintln!("{failures} check(s) failed");
    }
    let code = if failures == 0 { 0 } else { EXIT_VERIFY_FAILED };
    Ok(Report {
        body: table.render(args.out.format),
        code,
    })
}
