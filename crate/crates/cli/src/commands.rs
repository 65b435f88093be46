use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};
use wavekit::boost::{boosted_expectations, galilean_boost, lorentz_boost_params, lorentz_boost_wavefunction};
use wavekit::checks::{run_criterion, CRITERIA};
use wavekit::cosmology::comoving_trace;
use wavekit::figures::figure_panels;
use wavekit::moments::{
    moments_closed_form, moments_quadrature, saturation_residual, spreading_width_sq, uncertainty_bound,
};
use wavekit::propagation::{density_grid, position_moments};
use wavekit::{Dispersion, EvolutionMethod, MomentSet, PacketParams, Quantity};

use crate::config::{CommonArgs, FileConfig, FormatArg, MethodArg, RunConfig};
use crate::output::{Cell, Table};
use crate::Failure;

fn packet_meta(p: &PacketParams) -> Value {
    json!({
        "dispersion": p.kind().name(),
        "mass": p.dispersion.mass(),
        "spacing": p.dispersion.spacing(),
        "alpha": p.alpha,
        "beta_re": p.beta_r,
        "beta_im": p.beta_i,
    })
}

fn error_meta(set: &MomentSet) -> Value {
    let map: Map<String, Value> = Quantity::ALL
        .iter()
        .filter(|q| set.get(**q).is_some())
        .map(|q| (q.name().to_string(), json!(set.error(*q))))
        .collect();
    Value::Object(map)
}

fn diff(a: Option<f64>, b: Option<f64>) -> Cell {
    match (a, b) {
        (Some(a), Some(b)) => Cell::Num((a - b).abs()),
        _ => Cell::Empty,
    }
}

pub fn moments(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let p = &cfg.packet;
    let closed = match cfg.method {
        MethodArg::Quadrature => None,
        _ => Some(moments_closed_form(p, &cfg.spec)?),
    };
    let quad = match cfg.method {
        MethodArg::Closed => None,
        _ => Some(moments_quadrature(p, &cfg.spec)?),
    };
    let bound = uncertainty_bound(p, &cfg.spec)?;

    let mut table = Table::new(vec!["quantity", "closed", "quadrature", "abs_diff"]);
    for q in Quantity::ALL {
        let c = closed.as_ref().and_then(|m| m.get(q));
        let d = quad.as_ref().and_then(|m| m.get(q));
        table.push(vec![q.name().into(), c.into(), d.into(), diff(c, d)]);
    }
    let c_bound = closed.as_ref().map(|_| bound);
    let q_bound = quad.as_ref().map(|_| bound);
    table.push(vec!["uncertainty_bound".into(), c_bound.into(), q_bound.into(), diff(c_bound, q_bound)]);
    let c_res = closed.as_ref().map(|m| saturation_residual(m, bound));
    let q_res = quad.as_ref().map(|m| saturation_residual(m, bound));
    table.push(vec!["saturation_residual".into(), c_res.into(), q_res.into(), diff(c_res, q_res)]);

    table.note("packet", packet_meta(p));
    let mut errors = Map::new();
    if let Some(m) = &closed {
        errors.insert("closed".into(), error_meta(m));
    }
    if let Some(m) = &quad {
        errors.insert("quadrature".into(), error_meta(m));
        for q in Quantity::ALL {
            if m.get(q).is_some() {
                eprintln!("{q}: quadrature error estimate {:.3e}", m.error(q));
            }
        }
    }
    table.note("error_estimates", Value::Object(errors));
    table.write(cfg.format, cfg.out.as_deref())?;
    Ok(())
}

pub fn evolve(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let (xs, ts) = (&cfg.grid.x_values, &cfg.grid.t_values);
    let primary = match cfg.method {
        MethodArg::Quadrature => EvolutionMethod::Quadrature,
        _ => EvolutionMethod::Closed,
    };
    let grid = density_grid(&cfg.packet, xs, ts, primary, &cfg.spec)?;
    let check = match cfg.method {
        MethodArg::Both => Some(density_grid(&cfg.packet, xs, ts, EvolutionMethod::Quadrature, &cfg.spec)?),
        _ => None,
    };
    let mut columns = vec!["t", "x", "density"];
    if check.is_some() {
        columns.extend(["quadrature", "abs_diff"]);
    }
    let mut table = Table::new(columns);
    for (i, &t) in ts.iter().enumerate() {
        for (j, &x) in grid.x_values.iter().enumerate() {
            let d = grid.density[i][j];
            let mut row = vec![t.into(), x.into(), d.into()];
            if let Some(q) = &check {
                let v = q.density[i][j];
                row.extend([v.into(), (d - v).abs().into()]);
            }
            table.push(row);
        }
    }
    table.note("packet", packet_meta(&cfg.packet));
    table.note("closed_form_fallbacks", json!(grid.fallback.len()));
    table.write(cfg.format, cfg.out.as_deref())?;
    Ok(())
}

pub fn spread(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let method = match cfg.method {
        MethodArg::Quadrature => EvolutionMethod::Quadrature,
        _ => EvolutionMethod::Closed,
    };
    let m0 = moments_quadrature(&cfg.packet, &cfg.spec)?;
    let grid = density_grid(&cfg.packet, &cfg.grid.x_values, &cfg.grid.t_values, method, &cfg.spec)?;
    let mut table = Table::new(vec!["t", "width_sq_law", "width_sq_grid", "width_sq_full_line", "norm_grid"]);
    for (i, &t) in grid.t_values.iter().enumerate() {
        let row = grid.row_moments(i);
        let (norm, mean, mean_sq) = position_moments(&cfg.packet, t, method, &cfg.spec)?;
        let full = mean_sq / norm - (mean / norm).powi(2);
        table.push(vec![
            t.into(),
            spreading_width_sq(&m0, t).into(),
            row.variance.into(),
            full.into(),
            row.mass.into(),
        ]);
    }
    table.note("packet", packet_meta(&cfg.packet));
    table.note("initial_moment_errors", error_meta(&m0));
    table.write(cfg.format, cfg.out.as_deref())?;
    Ok(())
}

pub fn boost(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let u = cfg.boost.ok_or_else(|| Failure::Config("boost needs --boost <u>".into()))?;
    let p = &cfg.packet;
    let spec = &cfg.spec;
    let src = moments_quadrature(p, spec)?;
    let mut table = Table::new(vec!["quantity", "source", "predicted", "recomputed", "abs_diff"]);
    let mut row = |name: &str, s: f64, pred: f64, re: Option<f64>| {
        table.push(vec![name.into(), s.into(), pred.into(), re.into(), diff(Some(pred), re)]);
    };
    match p.dispersion {
        Dispersion::NonRelativistic { .. } => {
            let b = galilean_boost(p, u)?;
            let mb = moments_quadrature(&b, spec)?;
            row("alpha", p.alpha, b.alpha, None);
            row("beta_re", p.beta_r, b.beta_r, None);
            row("mean_v", src.mean_v(), src.mean_v() - u, Some(mb.mean_v()));
            row("delta_x", src.delta_x(), src.delta_x(), Some(mb.delta_x()));
            row("delta_v", src.delta_v(), src.delta_v(), Some(mb.delta_v()));
        }
        Dispersion::Relativistic { .. } => {
            let (a, b) = lorentz_boost_params(p.alpha, p.beta_r, u)?;
            row("alpha", p.alpha, a, None);
            row("beta_re", p.beta_r, b, None);
            row("alpha2_minus_beta2", p.alpha.powi(2) - p.beta_r.powi(2), a * a - b * b, None);
            let pred = boosted_expectations(p, u, spec)?;
            let w = lorentz_boost_wavefunction(*p, u)?;
            let direct = moments_quadrature(&w, spec)?;
            let bound = uncertainty_bound(&w, spec)?;
            let e = |q| direct.get(q);
            row("mean_E", src.get(Quantity::MeanE).unwrap_or(f64::NAN), pred.mean_e, e(Quantity::MeanE));
            row("mean_p", src.get(Quantity::MeanP).unwrap_or(f64::NAN), pred.mean_p, e(Quantity::MeanP));
            row("mean_v", src.mean_v(), pred.mean_v, Some(direct.mean_v()));
            row("mean_v2", src.mean_v2(), pred.mean_v2, Some(direct.mean_v2()));
            row("mean_x", src.mean_x(), pred.mean_x, Some(direct.mean_x()));
            row("mean_x2", src.mean_x2(), pred.mean_x2, Some(direct.mean_x2()));
            row("uncertainty_bound", uncertainty_bound(p, spec)?, pred.bound, Some(bound));
            row(
                "excess",
                saturation_residual(&src, uncertainty_bound(p, spec)?),
                pred.excess(),
                Some(saturation_residual(&direct, bound)),
            );
        }
        other => {
            return Err(Failure::Config(format!(
                "boost is defined for nonrel (Galilean) and rel (Lorentz) packets, not {}",
                other.kind().name()
            )))
        }
    }
    table.note("packet", packet_meta(p));
    table.note("boost", json!(u));
    table.write(cfg.format, cfg.out.as_deref())?;
    Ok(())
}

pub fn cosmo(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let trace = comoving_trace(&cfg.packet, &cfg.model, &cfg.grid.t_values, &cfg.spec)?;
    let mut table = Table::new(vec!["t", "scale_factor", "mean_rho", "mean_rho2", "mean_x", "mean_v"]);
    for (k, &t) in trace.t_values.iter().enumerate() {
        table.push(vec![
            t.into(),
            cfg.model.scale_at(t)?.into(),
            trace.mean_rho[k].into(),
            trace.mean_rho2[k].into(),
            trace.mean_x[k].into(),
            trace.mean_v[k].into(),
        ]);
    }
    table.note("packet", packet_meta(&cfg.packet));
    table.note("model", json!(format!("{:?}", cfg.model)));
    table.write(cfg.format, cfg.out.as_deref())?;
    Ok(())
}

fn extension(format: FormatArg) -> &'static str {
    match format {
        FormatArg::Csv => "csv",
        FormatArg::Json => "json",
    }
}

/// With `--out` naming a file, the first panel goes there and further panels
/// to `<stem>_<panel>.<ext>` beside it; otherwise every panel goes to
/// `<panel>.<ext>` inside `--out` (default: the current directory).
fn panel_path(out: Option<&Path>, format: FormatArg, name: &str, first: bool) -> PathBuf {
    let ext = extension(format);
    match out {
        Some(p) if p.extension().is_some() && !p.is_dir() => {
            if first {
                p.to_path_buf()
            } else {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("figure");
                let suffix = name.rsplit('_').next().unwrap_or(name);
                p.with_file_name(format!("{stem}_{suffix}.{ext}"))
            }
        }
        Some(dir) => dir.join(format!("{name}.{ext}")),
        None => PathBuf::from(format!("{name}.{ext}")),
    }
}

pub fn figures(args: &CommonArgs, which: Option<u8>) -> Result<(), Failure> {
    let cfg = RunConfig::resolve(args)?;
    let file = FileConfig::load(args.config.as_ref())?;
    let which = match file.usize("which", which.map(usize::from))? {
        Some(n @ 1..=4) => vec![n as u8],
        Some(n) => return Err(Failure::Config(format!("--which must be 1, 2, 3 or 4, got {n}"))),
        None => vec![1, 2, 3, 4],
    };
    if let Some(dir) = cfg.out.as_deref().filter(|p| p.extension().is_none()) {
        std::fs::create_dir_all(dir)?;
    }
    for n in which {
        for (k, panel) in figure_panels(n)?.into_iter().enumerate() {
            let grid = panel.render(&cfg.spec)?;
            let mut table = Table::new(vec!["t", "x", "density"]);
            for (i, &t) in grid.t_values.iter().enumerate() {
                for (j, &x) in grid.x_values.iter().enumerate() {
                    table.push(vec![t.into(), x.into(), grid.density[i][j].into()]);
                }
            }
            table.note("panel", json!(panel.name));
            table.note("packet", packet_meta(&panel.packet));
            let path = panel_path(cfg.out.as_deref(), cfg.format, panel.name, k == 0);
            table.write(cfg.format, Some(&path))?;
            eprintln!("{} -> {}", panel.name, path.display());
        }
    }
    Ok(())
}

pub fn selfcheck(criteria: &[u8]) -> Result<(), Failure> {
    let start = Instant::now();
    let mut failed = 0;
    for (id, _) in CRITERIA {
        if !criteria.is_empty() && !criteria.contains(&id) {
            continue;
        }
        let report = run_criterion(id);
        println!("{}", report.summary_line());
        if !report.passed() {
            failed += 1;
        }
    }
    println!("total {:.2} s", start.elapsed().as_secs_f64());
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}
