use anyhow::Context;
use aqfock_core::density::{nu_density, NuQuadrature, SupportInterval};
use aqfock_core::jacobi::moments_from_jacobi;
use aqfock_core::radial::{
    self, classify, classify_with_epsilon, construct, signed_measure, t_deform, target_moment, MeasureDocument,
};
use aqfock_core::typeb::{
    enumerate_group, power_norm, vacuum_moment_with_overlap, Involution, MAX_GROUP_RANK, MAX_VACUUM_ORDER,
};
use aqfock_core::{mp_jacobi, Branch, Error, QParams};
use rayon::prelude::*;

use crate::table::{Cell, Table};
use crate::{
    ClassifyArgs, DensityArgs, Format, InvolutionPreset, MeasureArgs, MomentsArgs, Report, SweepArgs, TypebArgs,
    UsageError, EXIT_NO_REPRESENTATION,
};

/// Half-width of the square swept by `sweep`.
pub const SWEEP_BOUND: f64 = 0.95;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn check_epsilon(eps: f64) -> anyhow::Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(usage(format!(
            "--epsilon must be a finite non-negative number, got {eps}"
        )));
    }
    Ok(())
}

fn no_representation(reason: &str) -> Report {
    eprintln!("no radial representation: {reason}");
    Report {
        body: String::new(),
        code: EXIT_NO_REPRESENTATION,
    }
}

pub fn measure(args: &MeasureArgs) -> anyhow::Result<Report> {
    let params = args.params.params()?;
    let trunc = args.trunc.policy()?;
    check_epsilon(args.epsilon)?;
    if let Some(t) = args.t {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(usage(format!("--t must be a finite number >= 1, got {t}")));
        }
    }
    let verdict = classify_with_epsilon(params, args.epsilon);
    let (mut mu, warning) = if verdict.exists {
        (construct(params, verdict, &trunc)?, None)
    } else if args.force {
        match signed_measure(params, &trunc) {
            Ok(mu) => {
                let text = format!("signed measure, no positive radial representation: {}", verdict.reason);
                (mu, Some(text))
            }
            Err(Error::NoRepresentation(reason)) => return Ok(no_representation(&reason)),
            Err(e) => return Err(e.into()),
        }
    } else {
        return Ok(no_representation(&verdict.reason));
    };
    if let Some(t) = args.t {
        mu = t_deform(&mu, t)?;
    }
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    let body = match args.out.format {
        Format::Json => {
            let mut doc = MeasureDocument::new(params.alpha(), params.q(), &mu);
            doc.t = args.t;
            doc.warning = warning;
            let mut text = doc.to_json();
            text.push('\n');
            text
        }
        Format::Csv => radial::to_csv(&mu),
    };
    Ok(Report::ok(body))
}

pub fn classify_cmd(args: &ClassifyArgs) -> anyhow::Result<Report> {
    let params = args.params.params()?;
    check_epsilon(args.epsilon)?;
    let verdict = classify_with_epsilon(params, args.epsilon);
    let mut table = Table::new(&["alpha", "q", "exists", "branch", "reason"]);
    table.push(vec![
        params.alpha().into(),
        params.q().into(),
        verdict.exists.into(),
        verdict.branch.as_str().into(),
        verdict.reason.as_str().into(),
    ]);
    let code = if verdict.exists { 0 } else { EXIT_NO_REPRESENTATION };
    Ok(Report {
        body: table.render(args.out.format),
        code,
    })
}

pub fn moments(args: &MomentsArgs) -> anyhow::Result<Report> {
    let params = args.params.params()?;
    let trunc = args.trunc.policy()?;
    let jacobi = mp_jacobi(params, args.kmax.div_ceil(2).max(1));
    let nu = moments_from_jacobi(&jacobi, args.kmax)?;
    let verdict = classify(params);
    let mu = if verdict.exists {
        Some(construct(params, verdict, &trunc)?)
    } else {
        None
    };
    let mut table = Table::new(&["k", "nu_moment", "fock_norm", "radial_moment"]);
    for (k, &m) in nu.iter().enumerate() {
        let radial = match &mu {
            Some(mu) => Some(radial::moment(mu, 2 * k)?),
            None => None,
        };
        table.push(vec![k.into(), m.into(), target_moment(params, k).into(), radial.into()]);
    }
    Ok(Report::ok(table.render(args.out.format)))
}

pub fn density(args: &DensityArgs) -> anyhow::Result<Report> {
    let params = args.params.params()?;
    let trunc = args.trunc.policy()?;
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let mut table = Table::new(&["x", "density"]);
    for x in SupportInterval::for_q(params.q()).interior_grid(args.n) {
        let v = nu_density(x, params, &trunc).with_context(|| format!("density at x = {x}"))?;
        table.push(vec![x.into(), v.into()]);
    }
    Ok(Report::ok(table.render(args.out.format)))
}

pub fn typeb(args: &TypebArgs) -> anyhow::Result<Report> {
    let params = args.params.params()?;
    let trunc = args.trunc.policy()?;
    if !(1..=MAX_GROUP_RANK).contains(&args.n) {
        return Err(usage(format!("--n must lie in 1..={MAX_GROUP_RANK}, got {}", args.n)));
    }
    if args.quad_order == 0 {
        return Err(usage("--quad-order must be at least 1"));
    }
    let (sign, j) = match args.involution {
        InvolutionPreset::Plus => (1.0, Involution::identity(1)),
        InvolutionPreset::Minus => (-1.0, Involution::negated(1)),
    };
    // ⟨f, f̄⟩ = ±1 acts as α ↦ ±α on every reference quantity
    let effective = QParams::new(sign * params.alpha(), params.q())?;
    let mut table = Table::new(&["quantity", "k", "brute_force", "reference", "abs_error"]);
    let mut row = |name: &str, k: usize, brute: f64, reference: f64| {
        table.push(vec![
            name.into(),
            k.into(),
            brute.into(),
            reference.into(),
            (brute - reference).abs().into(),
        ]);
    };
    for k in 1..=args.n {
        let group = enumerate_group(k)?;
        let brute = power_norm(&group, params, &j, &[1.0])?;
        row("gram_norm", k, brute, target_moment(effective, k));
    }
    let k_max = (2 * args.n).min(MAX_VACUUM_ORDER);
    let chain: Vec<f64> = (0..=k_max)
        .map(|k| vacuum_moment_with_overlap(params, sign, k))
        .collect::<Result<_, _>>()?;
    let tridiagonal = moments_from_jacobi(&mp_jacobi(effective, k_max.div_ceil(2).max(1)), k_max)?;
    for (k, (&c, &t)) in chain.iter().zip(&tridiagonal).enumerate() {
        row("vacuum_moment", k, c, t);
    }
    let quad = NuQuadrature::new(effective, &trunc, args.quad_order)?;
    for (k, &c) in chain.iter().enumerate() {
        row("quadrature_moment", k, c, quad.moment(k));
    }
    Ok(Report::ok(table.render(args.out.format)))
}

/// Sweep coordinates `(i - (n-1)/2) · step`, symmetric about 0 and reaching
/// `±SWEEP_BOUND` at the ends.
pub fn sweep_axis(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let half = (n - 1) as f64 / 2.0;
    let step = SWEEP_BOUND / half;
    (0..n).map(|i| (i as f64 - half) * step).collect()
}

pub fn sweep(args: &SweepArgs) -> anyhow::Result<Report> {
    if args.grid == 0 {
        return Err(usage("--grid must be at least 1"));
    }
    let trunc = args.trunc.policy()?;
    let axis = sweep_axis(args.grid);
    let cells: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&q| (a, q))).collect();
    let mut rows: Vec<(f64, f64, bool, Branch, Option<f64>)> = cells
        .par_iter()
        .map(|&(a, q)| -> anyhow::Result<_> {
            let params = QParams::new(a, q)?;
            let verdict = classify(params);
            let min_weight = match signed_measure(params, &trunc) {
                Ok(mu) => mu.min_weight(),
                Err(Error::NoRepresentation(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok((a, q, verdict.exists, verdict.branch, min_weight))
        })
        .collect::<anyhow::Result<_>>()?;
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut table = Table::new(&["alpha", "q", "exists", "branch", "min_weight"]);
    for (a, q, exists, branch, w) in rows {
        table.push(vec![
            a.into(),
            q.into(),
            exists.into(),
            branch.as_str().into(),
            Cell::from(w),
        ]);
    }
    Ok(Report::ok(table.render(args.out.format)))
}
