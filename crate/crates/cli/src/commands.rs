use crate::config::RunConfig;
use crate::report::{num, Report, Table};
use crate::{Command, Global, MvtArg, PointMethod, SideArg};
use anyhow::{anyhow, bail, Context};
use distint_core::cesaro::CesaroStatus;
use distint_core::fourier::recover_value_with;
use distint_core::phitransform::{geometric_mesh, VerdictOpts};
use distint_core::reduce::{lateral_value_with, point_value_with, Lateral, PointOpts};
use distint_core::{
    dist_integrate_with, fourier_coeffs, integrate_improper, measure_verdict, moment, mvt_find_xi, parse, phi_field,
    poisson_boundary, radial_extremes, reconstruct_from_peano, Approach, DistRep, Expr, IntegralResult, IntegrateOpts,
    KernelSpec, MvtKind, PointValue, RecoverOpts, Verdict,
};
use serde_json::json;

/// Source text of an expression that failed to parse.
#[derive(Debug)]
pub struct Input(pub String);

impl std::fmt::Display for Input {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "in '{}'", self.0)
    }
}

fn expr(src: &str) -> anyhow::Result<Expr> {
    parse(src).map_err(|e| anyhow::Error::new(e).context(Input(src.to_string())))
}

fn need(v: Option<f64>, flag: &str) -> anyhow::Result<f64> {
    v.ok_or_else(|| anyhow!("missing --{flag}"))
}

pub fn grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let (lo, hi): (f64, f64) = (parts[0].trim().parse()?, parts[1].trim().parse()?);
        let n: usize = parts[2].trim().parse()?;
        if n < 2 {
            bail!("grid '{spec}' needs at least two points");
        }
        return Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad grid value '{s}'")))
        .collect()
}

pub fn kernel(spec: &str) -> anyhow::Result<KernelSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    Ok(match parts.as_slice() {
        ["poisson"] => KernelSpec::poisson(),
        ["bump", r] => KernelSpec::bump(r.parse()?)?,
        ["bump", r, shift] => KernelSpec::bump_shifted(r.parse()?, shift.parse()?)?,
        _ => bail!("unknown kernel '{spec}', expected poisson, bump:R or bump:R:SHIFT"),
    })
}

fn atoms(src: &str, specs: &[String]) -> anyhow::Result<DistRep> {
    let mut d = DistRep::function(expr(src)?);
    for s in specs {
        let f: Vec<&str> = s.split(',').map(str::trim).collect();
        let [c, m, x0] = f.as_slice() else {
            bail!("atom '{s}' should read c,m,x0");
        };
        d.atoms.push((c.parse()?, m.parse()?, x0.parse()?));
    }
    Ok(d)
}

fn integral(command: &'static str, input: &str, r: IntegralResult, cfg: &RunConfig) -> Report {
    Report::new(command, input, format!("{:?}", r.status), cfg)
        .value(r.value)
        .error(r.error_estimate)
        .trace(r.trace)
        .details(json!({ "evaluations": r.evaluations }))
}

fn point(command: &'static str, input: &str, p: PointValue, cfg: &RunConfig) -> Report {
    Report::new(command, input, format!("{:?}", p.status), cfg)
        .value(p.value)
        .details(json!({ "order_n": p.order_n, "left": p.left, "right": p.right }))
}

fn integrate_opts(cfg: &RunConfig) -> IntegrateOpts {
    IntegrateOpts { tol: cfg.tol, k_max: cfg.k_max, n_max: cfg.n_max, ..IntegrateOpts::default() }
}

fn point_opts(cfg: &RunConfig) -> PointOpts {
    PointOpts { n_max: cfg.n_max, ..PointOpts::default() }
}

pub fn run(cmd: &Command, g: &Global, cfg: &RunConfig) -> anyhow::Result<Report> {
    match cmd {
        Command::Integrate { expr: src, hake } => {
            let e = expr(src)?;
            let opts = IntegrateOpts { force_hake: *hake, ..integrate_opts(cfg) };
            let r = dist_integrate_with(&e, need(g.from, "from")?, need(g.to, "to")?, &opts)?;
            Ok(integral("integrate", src, r, cfg))
        }
        Command::Improper { expr: src } => {
            let r = integrate_improper(&expr(src)?, need(g.from, "from")?, cfg.k_max)?;
            Ok(integral("improper", src, r, cfg))
        }
        Command::Pointvalue { expr: src, method } => {
            let (e, x) = (expr(src)?, need(g.at, "at")?);
            let p = match method {
                PointMethod::Direct => point_value_with(&e, x, &point_opts(cfg)),
                PointMethod::Poisson => poisson_boundary(&e, x, Approach::Radial)?,
            };
            Ok(point("pointvalue", src, p, cfg))
        }
        Command::Lateral { expr: src, side } => {
            let side = match side {
                SideArg::Left => Lateral::Left,
                SideArg::Right => Lateral::Right,
            };
            let p = lateral_value_with(&expr(src)?, need(g.at, "at")?, side, &point_opts(cfg));
            Ok(point("lateral", src, p, cfg))
        }
        Command::Fourier { expr: src, terms, ratios } => fourier(src, *terms, ratios, g, cfg),
        Command::Phifield { expr: src, atom } => {
            let d = atoms(src, atom)?;
            let gx = grid(g.grid_x.as_deref().ok_or_else(|| anyhow!("missing --grid-x"))?)?;
            let gt = grid(g.grid_t.as_deref().ok_or_else(|| anyhow!("missing --grid-t"))?)?;
            let f = phi_field(&d, &kernel(&g.kernel)?, &gx, &gt)?;
            let status = if f.flagged.is_empty() { "Finite" } else { "Inconclusive" };
            let mut rows = Vec::new();
            for (it, t) in f.grid_t.iter().enumerate() {
                for (ix, x) in f.grid_x.iter().enumerate() {
                    rows.push(vec![x.to_string(), t.to_string(), f.values[it][ix].to_string()]);
                }
            }
            let table = Table { header: vec!["x", "t", "F"], rows };
            Ok(Report::new("phifield", src, status, cfg).details(serde_json::to_value(&f)?).table(table))
        }
        Command::Verdict { expr: src, atom } => {
            let d = atoms(src, atom)?;
            let k = kernel(&g.kernel)?;
            // deep enough that t reaches 1e-9
            let n = (1e-9f64.ln() / cfg.mesh_ratio.ln()).ceil() as usize + 1;
            let opts = VerdictOpts { t_mesh: geometric_mesh(1.0, cfg.mesh_ratio, n), ..VerdictOpts::default() };
            let v = measure_verdict(&d, &k, need(g.from, "from")?, need(g.to, "to")?, &opts)?;
            let mut details = json!({ "verdict": v, "mesh_points": n });
            if let Some(x0) = g.at {
                details["radial"] = serde_json::to_value(radial_extremes(&d, &k, x0, &opts.t_mesh)?)?;
            }
            let (status, value) = match v {
                Verdict::MeasureConsistent => ("MeasureConsistent", f64::NAN),
                Verdict::ViolationAt { value, .. } => ("ViolationAt", value),
                Verdict::Inconclusive => ("Inconclusive", f64::NAN),
            };
            Ok(Report::new("verdict", src, status, cfg).value(value).details(details))
        }
        Command::Moments { expr: src, order } => {
            let e = expr(src)?;
            let ms = (0..=*order).map(|n| moment(&e, n, cfg.k_max)).collect::<Result<Vec<_>, _>>()?;
            let status = if ms.iter().all(|m| m.converged()) {
                CesaroStatus::Converged
            } else if ms.iter().any(|m| m.status == CesaroStatus::Diverged) {
                CesaroStatus::Diverged
            } else {
                CesaroStatus::Inconclusive
            };
            let last = ms.last().expect("order range is nonempty");
            let rows = ms.iter().enumerate().map(|(n, m)| vec![n.to_string(), m.value.to_string(), m.order_k.to_string()]);
            let table = Table { header: vec!["n", "moment", "order_k"], rows: rows.collect() };
            Ok(Report::new("moments", src, format!("{status:?}"), cfg)
                .value(last.value)
                .error(last.diagnostics)
                .details(json!({ "moments": ms }))
                .table(table))
        }
        Command::Reconstruct { expr: src, inits } => {
            let (a, b) = (need(g.from, "from")?, need(g.to, "to")?);
            let gx = match &g.grid_x {
                Some(s) => grid(s)?,
                None => grid(&format!("{a}:{b}:11"))?,
            };
            let pts = reconstruct_from_peano(&expr(src)?, inits, a, b, &gx)?;
            let worst = pts.iter().map(|(_, r)| r.status).find(|s| !s.is_finite());
            let status = worst.map(|s| format!("{s:?}")).unwrap_or_else(|| "Finite".into());
            let err = pts.iter().map(|(_, r)| r.error_estimate).fold(0.0, f64::max);
            let rows = pts.iter().map(|(x, r)| vec![x.to_string(), num(r.value.is_finite().then_some(r.value)), format!("{:?}", r.status)]);
            let table = Table { header: vec!["x", "f", "status"], rows: rows.collect() };
            let values: Vec<_> = pts.iter().map(|(x, r)| json!({ "x": x, "value": r.value, "status": r.status })).collect();
            Ok(Report::new("reconstruct", src, status, cfg).error(err).details(json!({ "points": values })).table(table))
        }
        Command::Mvt { expr: src, psi, kind } => {
            let kind = match kind {
                MvtArg::First => MvtKind::First,
                MvtArg::Second => MvtKind::Second,
                MvtArg::Bonnet => MvtKind::Bonnet,
            };
            let xi = mvt_find_xi(kind, &expr(src)?, &expr(psi)?, need(g.from, "from")?, need(g.to, "to")?)?;
            Ok(Report::new("mvt", src, "Exists", cfg).value(xi).details(json!({ "psi": psi, "kind": format!("{kind:?}") })))
        }
    }
}

fn fourier(src: &str, terms: usize, ratios: &[f64], g: &Global, cfg: &RunConfig) -> anyhow::Result<Report> {
    let fd = fourier_coeffs(&expr(src)?, terms)?;
    let rows = (-(terms as i64)..=terms as i64).map(|n| {
        let c = fd.coeff(n);
        vec![n.to_string(), c.re.to_string(), c.im.to_string()]
    });
    let table = Table { header: vec!["n", "re", "im"], rows: rows.collect() };
    let mut details = json!({ "period": fd.period, "n_max": fd.n_max, "coefficients": fd.coeffs });
    let Some(theta) = g.at else {
        return Ok(Report::new("fourier", src, "Finite", cfg).details(details).table(table));
    };
    let opts = RecoverOpts { ratios: ratios.to_vec(), k_max: cfg.k_max, ..RecoverOpts::default() };
    let p = recover_value_with(&fd, theta, &opts)?;
    details["order_n"] = json!(p.order_n);
    Ok(Report::new("fourier", src, format!("{:?}", p.status), cfg).value(p.value).details(details).table(table))
}
