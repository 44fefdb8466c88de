//! Command dispatch. Exit codes: 0 success, 1 inconclusive analysis under
//! `--strict`, 2 usage or parse errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use num_complex::Complex64;

use orbitlab_core::catalog;
use orbitlab_core::dsl::{parse_map, parse_point_list, MapDef};
use orbitlab_core::dynamics::{
    backward_step, ball_model_point, classify_type, denjoy_wolff, dilation_at, divergence_rate,
    forward_step, DwLocation, MapType, StepEstimate,
};
use orbitlab_core::geometry::{BoundaryPoint, Convention, DomainPoint, TangentVector};
use orbitlab_core::holomap::{backward_orbit, forward_orbit};
use orbitlab_core::premodel::{default_probes, siegel_example_premodel, sigma_closed_form, verify_premodel};
use orbitlab_core::seq::ConvergenceVerdict;
use orbitlab_core::stable_set::{partition, tangent_bounded, Boundedness};

use crate::args::{CatalogCmd, Cli, Cmd, ConventionArg, Format};
use crate::config::{build_premodel, FileConfig};
use crate::output::{fmt_point, render_csv, render_plain, render_structured, Output, Table, Value};

type C = Complex64;

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    2
                }
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

/// Flags merged with the config file (flags win).
struct Ctx {
    cli: Cli,
    file: FileConfig,
}

impl Ctx {
    fn n_max(&self, default: usize) -> usize {
        self.cli.n_max.or(self.file.n_max).unwrap_or(default)
    }

    fn m_max(&self, default: usize) -> usize {
        self.cli.m_max.or(self.file.m_max).unwrap_or(default)
    }

    fn strict(&self) -> bool {
        self.cli.strict || self.file.strict.unwrap_or(false)
    }

    fn format(&self) -> Result<Format> {
        if let Some(f) = self.cli.format {
            return Ok(f);
        }
        match self.file.format.as_deref() {
            None => Ok(Format::Plain),
            Some("plain") => Ok(Format::Plain),
            Some("csv") => Ok(Format::Csv),
            Some("structured") => Ok(Format::Structured),
            Some(other) => bail!("unknown format `{other}` in config file"),
        }
    }

    fn convention(&self) -> Result<Convention> {
        if let Some(c) = self.cli.convention {
            return Ok(match c {
                ConventionArg::Doubled => Convention::Doubled,
                ConventionArg::Arctanh => Convention::Arctanh,
            });
        }
        match self.file.convention.as_deref() {
            None | Some("doubled") => Ok(Convention::Doubled),
            Some("arctanh") => Ok(Convention::Arctanh),
            Some(other) => bail!("unknown convention `{other}` in config file"),
        }
    }

    fn params(&self) -> Result<Vec<(String, f64)>> {
        let text = match self.cli.params.as_deref().or(self.file.params.as_deref()) {
            None => return Ok(Vec::new()),
            Some(t) => t,
        };
        let mut out = Vec::new();
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, value) = part
                .split_once('=')
                .with_context(|| format!("parameter `{part}` is not of the form name=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("parameter `{part}` has a non-numeric value"))?;
            out.push((name.trim().to_string(), value));
        }
        Ok(out)
    }

    /// Resolve the single map source: inline grammar, config file, or
    /// catalog entry.
    fn map(&self) -> Result<MapDef> {
        let inline = self.cli.map.as_deref().or(self.file.map.as_deref());
        let cat = self.cli.catalog.as_deref().or(self.file.catalog.as_deref());
        match (inline, cat) {
            (Some(_), Some(_)) => bail!("give exactly one map source (--map/--map-file or --catalog)"),
            (Some(text), None) => {
                parse_map(text).map_err(|e| anyhow!("map grammar: {}", e.describe()))
            }
            (None, Some(name)) => {
                let entry = catalog::get(name, &self.params()?).map_err(|e| anyhow!("{e}"))?;
                Ok(entry.map)
            }
            (None, None) => bail!("no map given: use --map, --map-file or --catalog"),
        }
    }

    fn point(&self, flag: Option<&str>, what: &str) -> Result<DomainPoint> {
        let text = flag
            .or(self.file.point.as_deref())
            .with_context(|| format!("missing --{what}"))?;
        let coords =
            parse_point_list(text).map_err(|e| anyhow!("--{what} `{text}`: {}", e.describe()))?;
        Ok(DomainPoint::new(coords))
    }
}

fn verdict_value(v: ConvergenceVerdict) -> (Value, bool) {
    (Value::Str(v.to_string()), v == ConvergenceVerdict::Inconclusive)
}

fn execute(cli: Cli) -> Result<i32> {
    let file = match cli.map_file.as_deref() {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            crate::config::load(&text)?
        }
        None => FileConfig::default(),
    };
    let ctx = Ctx { cli, file };
    let factor = ctx.convention()?.factor();

    let out = match &ctx.cli.cmd {
        Cmd::Orbit { point, n, backward } => run_orbit(&ctx, point.as_deref(), *n, *backward)?,
        Cmd::Steps { point, m, forward } => run_steps(&ctx, point.as_deref(), *m, *forward, factor)?,
        Cmd::Rate { point } => run_rate(&ctx, point.as_deref(), factor)?,
        Cmd::Classify { point } => run_classify(&ctx, point.as_deref(), factor)?,
        Cmd::Dw { starts, n } => run_dw(&ctx, starts, *n)?,
        Cmd::Dilation { zeta, point, len } => run_dilation(&ctx, zeta.as_deref(), point.as_deref(), *len)?,
        Cmd::StablePartition { samples } => run_partition(&ctx, samples.as_deref())?,
        Cmd::Tangent { point, dir } => run_tangent(&ctx, point.as_deref(), dir.as_deref(), factor)?,
        Cmd::VerifyPremodel { premodel_r } => run_verify_premodel(&ctx, *premodel_r)?,
        Cmd::SigmaFormula { theta, lambda, m } => run_sigma(&ctx, *theta, *lambda, *m, factor)?,
        Cmd::Catalog { which } => run_catalog(&ctx, which)?,
    };

    let rendered = match ctx.format()? {
        Format::Plain => render_plain(&out),
        Format::Csv => render_csv(&out),
        Format::Structured => render_structured(&out),
    };
    match ctx.cli.out.as_deref() {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }

    Ok(if ctx.strict() && out.inconclusive { 1 } else { 0 })
}

fn run_orbit(ctx: &Ctx, point: Option<&str>, n: usize, backward: bool) -> Result<Output> {
    let map = ctx.map()?;
    let x = ctx.point(point, "point")?;
    let record = if backward {
        backward_orbit(&map, &x, n).map_err(|e| anyhow!("{e}"))?
    } else {
        forward_orbit(&map, &x, n).map_err(|e| anyhow!("{e}"))?
    };

    let mut out = Output::default();
    out.push("command", "orbit");
    out.push("map", map.source());
    out.push("direction", if backward { "backward" } else { "forward" });
    out.push("points", record.len());
    match record.exit_index {
        Some(i) => out.push("exit_index", i),
        None => out.push("exit_index", "none"),
    }
    if let Some(f) = &record.failure {
        out.push("stopped_by", f.to_string());
    }

    let q = map.domain.dimension();
    let mut headers = vec!["n".to_string()];
    for j in 1..=q {
        headers.push(format!("re{j}"));
        headers.push(format!("im{j}"));
    }
    if backward {
        headers.push("residual".to_string());
    }
    let mut rows = Vec::with_capacity(record.len());
    for (i, p) in record.points.iter().enumerate() {
        let mut row = vec![Value::Int(i as i64)];
        for z in p.coords() {
            row.push(Value::Num(z.re));
            row.push(Value::Num(z.im));
        }
        if backward {
            let r = if i == 0 { 0.0 } else { record.residuals[i - 1] };
            row.push(Value::Num(r));
        }
        rows.push(row);
    }
    out.table = Some(Table { headers, rows });
    Ok(out)
}

fn step_output(est: &StepEstimate, factor: f64, direction: &str) -> Output {
    let mut out = Output::default();
    out.push("command", "steps");
    out.push("direction", direction);
    out.push("m", est.m);
    out.push("limit", est.limit * factor);
    let (v, inconclusive) = verdict_value(est.verdict);
    out.push("verdict", v);
    out.inconclusive = inconclusive;
    out.table = Some(Table {
        headers: vec!["n".into(), "value".into()],
        rows: est
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| vec![Value::Int(n as i64), Value::Num(v * factor)])
            .collect(),
    });
    out
}

fn run_steps(ctx: &Ctx, point: Option<&str>, m: usize, forward: bool, factor: f64) -> Result<Output> {
    let map = ctx.map()?;
    let x = ctx.point(point, "point")?;
    let n_max = ctx.n_max(64);
    let est = if forward {
        forward_step(&map, &x, m, n_max).map_err(|e| anyhow!("{e}"))?
    } else {
        backward_step(&map, &x, m, n_max).map_err(|e| anyhow!("{e}"))?
    };
    let mut out = step_output(&est, factor, if forward { "forward" } else { "backward" });
    out.fields.insert(1, ("map".into(), Value::Str(map.source())));
    Ok(out)
}

fn run_rate(ctx: &Ctx, point: Option<&str>, factor: f64) -> Result<Output> {
    let map = ctx.map()?;
    let x = ctx.point(point, "point")?;
    let m_max = ctx.m_max(50);
    let rate = divergence_rate(&map, &x, m_max).map_err(|e| anyhow!("{e}"))?;
    let mut out = Output::default();
    out.push("command", "rate");
    out.push("map", map.source());
    out.push("m_max", m_max);
    out.push("divergence_rate_bound", rate * factor);
    Ok(out)
}

fn run_classify(ctx: &Ctx, point: Option<&str>, factor: f64) -> Result<Output> {
    let map = ctx.map()?;
    let x = ctx.point(point, "point")?;
    let report = classify_type(&map, &x).map_err(|e| anyhow!("{e}"))?;
    let mut out = Output::default();
    out.push("command", "classify");
    out.push("map", map.source());
    out.push("type", report.map_type.to_string());
    out.push("rate", report.rate * factor);
    out.push(
        "basis",
        match report.basis {
            orbitlab_core::dynamics::ClassifyBasis::Backward => "backward",
            orbitlab_core::dynamics::ClassifyBasis::ForwardOnly => "forward-only",
        },
    );
    out.inconclusive = report.map_type == MapType::Inconclusive;
    out.table = Some(Table {
        headers: vec!["m".into(), "value".into(), "delta".into(), "rate".into()],
        rows: report
            .evidence
            .iter()
            .map(|r| {
                vec![
                    Value::Int(r.m as i64),
                    Value::Num(r.value * factor),
                    Value::Num(r.delta * factor),
                    Value::Num(r.rate * factor),
                ]
            })
            .collect(),
    });
    Ok(out)
}

fn run_dw(ctx: &Ctx, starts: &[String], n: Option<usize>) -> Result<Output> {
    let map = ctx.map()?;
    let start_texts: Vec<String> = if starts.is_empty() {
        ctx.file.starts.clone()
    } else {
        starts.to_vec()
    };
    if start_texts.is_empty() {
        bail!("missing --start");
    }
    let mut points = Vec::new();
    for text in &start_texts {
        let coords =
            parse_point_list(text).map_err(|e| anyhow!("--start `{text}`: {}", e.describe()))?;
        points.push(DomainPoint::new(coords));
    }
    let n = n.or(ctx.file.n).unwrap_or(4096);
    let report = denjoy_wolff(&map, &points, n).map_err(|e| anyhow!("{e}"))?;

    let mut out = Output::default();
    out.push("command", "dw");
    out.push("map", map.source());
    out.push("starts", points.len());
    out.push("iterations", n);
    match &report.location {
        DwLocation::Interior(p) => {
            out.push("kind", "interior");
            out.push("fixed_point", fmt_point(p.coords()));
        }
        DwLocation::Boundary(BoundaryPoint::Infinity) => {
            out.push("kind", "boundary");
            out.push("point", "infinity");
        }
        DwLocation::Boundary(BoundaryPoint::UnitVector(v)) => {
            out.push("kind", "boundary");
            out.push("point", fmt_point(v));
        }
        DwLocation::Boundary(BoundaryPoint::Finite(z)) => {
            out.push("kind", "boundary");
            out.push("point", fmt_point(&[*z]));
        }
        DwLocation::Inconclusive => {
            out.push("kind", "inconclusive");
            out.inconclusive = true;
        }
    }
    if let Some(ball) = &report.ball_point {
        out.push("ball_model_point", fmt_point(ball));
    }
    match report.dilation {
        Some(d) => out.push("dilation", d),
        None => out.push("dilation", "n/a"),
    }
    out.push("converged_starts", report.converged_starts);
    out.push("diagnostics", report.diagnostics.clone());
    Ok(out)
}

fn parse_zeta(text: &str) -> Result<BoundaryPoint> {
    if text.trim() == "inf" || text.trim() == "infinity" {
        return Ok(BoundaryPoint::Infinity);
    }
    let coords = parse_point_list(text).map_err(|e| anyhow!("--zeta `{text}`: {}", e.describe()))?;
    Ok(BoundaryPoint::UnitVector(coords))
}

fn run_dilation(ctx: &Ctx, zeta: Option<&str>, point: Option<&str>, len: usize) -> Result<Output> {
    let map = ctx.map()?;
    let zeta_text = zeta.or(ctx.file.zeta.as_deref()).context("missing --zeta")?;
    let zeta = parse_zeta(zeta_text)?;

    let approach: Vec<DomainPoint> = match point.or(ctx.file.point.as_deref()) {
        // backward orbit of the given point, mapped into the ball model
        Some(text) => {
            let coords = parse_point_list(text)
                .map_err(|e| anyhow!("--point `{text}`: {}", e.describe()))?;
            let orbit = backward_orbit(&map, &DomainPoint::new(coords), len)
                .map_err(|e| anyhow!("{e}"))?;
            orbit
                .points
                .iter()
                .filter_map(|p| ball_model_point(&map.domain, p))
                .collect()
        }
        // radial approach toward zeta
        None => {
            let q = match map.domain.kind() {
                orbitlab_core::geometry::DomainKind::SlitPlane => 1,
                _ => map.domain.dimension(),
            };
            let unit = zeta.as_unit_vector(q).map_err(|e| anyhow!("{e}"))?;
            (1..=len as i32)
                .map(|k| {
                    let r = 1.0 - (2.0f64).powi(-k);
                    DomainPoint::new(unit.iter().map(|z| z * r).collect::<Vec<C>>())
                })
                .collect()
        }
    };

    let lambda = dilation_at(&map, &zeta, &approach).map_err(|e| anyhow!("{e}"))?;
    let mut out = Output::default();
    out.push("command", "dilation");
    out.push("map", map.source());
    out.push("zeta", zeta_text);
    out.push("approach_points", approach.len());
    out.push("dilation", lambda);
    Ok(out)
}

fn run_partition(ctx: &Ctx, samples: Option<&str>) -> Result<Output> {
    let map = ctx.map()?;
    let text = samples.or(ctx.file.samples.as_deref()).context("missing --samples")?;
    let mut points = Vec::new();
    for part in text.split(';').filter(|p| !p.trim().is_empty()) {
        let coords = parse_point_list(part.trim())
            .map_err(|e| anyhow!("sample `{part}`: {}", e.describe()))?;
        points.push(DomainPoint::new(coords));
    }
    if points.is_empty() {
        bail!("--samples holds no points");
    }
    let n_max = ctx.n_max(128);
    let p = partition(&map, &points, n_max).map_err(|e| anyhow!("{e}"))?;

    let mut out = Output::default();
    out.push("command", "stable-partition");
    out.push("map", map.source());
    out.push("samples", points.len());
    out.push("classes", p.classes.len());
    for (i, class) in p.classes.iter().enumerate() {
        let members: Vec<Value> = class.members.iter().map(|&m| Value::Int(m as i64)).collect();
        out.push(&format!("class_{i}_members"), Value::List(members));
        match class.mu {
            Some(mu) => out.push(&format!("class_{i}_mu"), mu),
            None => out.push(&format!("class_{i}_mu"), "inconclusive"),
        }
    }
    let unresolved: Vec<Value> = p.unresolved.iter().map(|&i| Value::Int(i as i64)).collect();
    out.push("unresolved", Value::List(unresolved));
    let non_stable: Vec<Value> = p.non_stable.iter().map(|&i| Value::Int(i as i64)).collect();
    out.push("non_stable", Value::List(non_stable));
    out.inconclusive = !p.unresolved.is_empty();

    out.table = Some(Table {
        headers: vec!["i".into(), "j".into(), "verdict".into()],
        rows: p
            .verdicts
            .iter()
            .map(|&(i, j, v)| {
                vec![Value::Int(i as i64), Value::Int(j as i64), Value::Str(v.to_string())]
            })
            .collect(),
    });
    Ok(out)
}

fn run_tangent(ctx: &Ctx, point: Option<&str>, dir: Option<&str>, factor: f64) -> Result<Output> {
    let map = ctx.map()?;
    let base = ctx.point(point, "point")?;
    let dir_text = dir.or(ctx.file.dir.as_deref()).context("missing --dir")?;
    let dir = parse_point_list(dir_text)
        .map_err(|e| anyhow!("--dir `{dir_text}`: {}", e.describe()))?;
    let n_max = ctx.n_max(64);
    let verdict = tangent_bounded(&map, &TangentVector::new(base, dir), n_max)
        .map_err(|e| anyhow!("{e}"))?;

    let mut out = Output::default();
    out.push("command", "tangent");
    out.push("map", map.source());
    out.push("verdict", verdict.verdict.to_string());
    out.push("reason", verdict.reason.clone());
    match verdict.bound_estimate {
        Some(b) => out.push("bound_estimate", b * factor),
        None => out.push("bound_estimate", "n/a"),
    }
    out.inconclusive = verdict.verdict == Boundedness::Inconclusive;
    out.table = Some(Table {
        headers: vec!["n".into(), "value".into()],
        rows: verdict
            .series
            .iter()
            .map(|&(n, v)| vec![Value::Int(n as i64), Value::Num(v * factor)])
            .collect(),
    });
    Ok(out)
}

fn run_verify_premodel(ctx: &Ctx, premodel_r: Option<f64>) -> Result<Output> {
    let map = ctx.map()?;
    let pm = match (premodel_r, &ctx.file.premodel) {
        (Some(r), _) => siegel_example_premodel(r),
        (None, Some(cfg)) => build_premodel(cfg, &map)?,
        (None, None) => bail!("missing --premodel-r (or a [premodel] table in the config file)"),
    };
    let probes = default_probes(&pm.z_domain);
    let m_max = ctx.m_max(20);
    let report = verify_premodel(&map, &pm, &probes, m_max).map_err(|e| anyhow!("{e}"))?;

    let mut out = Output::default();
    out.push("command", "verify-premodel");
    out.push("map", map.source());
    out.push("premodel", pm.name.clone());
    out.push("probes", probes.len());
    out.push("m_max", m_max);
    out.push("intertwine_max", report.intertwine_max);
    out.push("step_max", report.step_max);
    out.push("collisions", report.collisions);
    out.table = Some(Table {
        headers: vec!["probe".into(), "step_residual".into()],
        rows: report
            .probes
            .iter()
            .map(|p| {
                vec![Value::Str(fmt_point(p.probe.coords())), Value::Num(p.step_residual)]
            })
            .collect(),
    });
    Ok(out)
}

fn run_sigma(
    ctx: &Ctx,
    theta: Option<f64>,
    lambda: Option<f64>,
    m: Option<usize>,
    factor: f64,
) -> Result<Output> {
    let theta = theta.or(ctx.file.theta).context("missing --theta")?;
    let lambda = lambda.or(ctx.file.lambda).context("missing --lambda")?;
    if !(theta > -std::f64::consts::FRAC_PI_2 && theta < std::f64::consts::FRAC_PI_2) {
        bail!("--theta must lie in (-pi/2, pi/2)");
    }
    if !(lambda > 1.0) {
        bail!("--lambda must exceed 1");
    }
    let mut out = Output::default();
    out.push("command", "sigma-formula");
    out.push("theta", theta);
    out.push("lambda", lambda);
    match m.or(ctx.file.m) {
        Some(m) => {
            out.push("m", m);
            out.push("sigma", sigma_closed_form(theta, lambda, m) * factor);
        }
        None => {
            let m_max = ctx.m_max(40);
            out.table = Some(Table {
                headers: vec!["m".into(), "value".into()],
                rows: (1..=m_max)
                    .map(|m| {
                        vec![
                            Value::Int(m as i64),
                            Value::Num(sigma_closed_form(theta, lambda, m) * factor),
                        ]
                    })
                    .collect(),
            });
        }
    }
    Ok(out)
}

fn run_catalog(ctx: &Ctx, which: &CatalogCmd) -> Result<Output> {
    match which {
        CatalogCmd::List => {
            let mut out = Output::default();
            out.push("command", "catalog list");
            out.push("entries", catalog::NAMES.len());
            let mut rows = Vec::new();
            for name in catalog::NAMES {
                let entry = catalog::get(name, &[]).map_err(|e| anyhow!("{e}"))?;
                rows.push(vec![
                    Value::Str(name.to_string()),
                    Value::Str(format!(
                        "{} {}",
                        entry.map.domain.kind().name(),
                        entry.map.domain.dimension()
                    )),
                    Value::Str(entry.truth.map_type.to_string()),
                    Value::Num(entry.truth.rate),
                ]);
            }
            out.table =
                Some(Table { headers: vec!["name".into(), "domain".into(), "type".into(), "rate".into()], rows });
            Ok(out)
        }
        CatalogCmd::Show { name } => {
            let entry = catalog::get(name, &ctx.params()?).map_err(|e| anyhow!("{e}"))?;
            let mut out = Output::default();
            out.push("command", "catalog show");
            out.push("name", entry.name);
            out.push(
                "domain",
                format!("{} {}", entry.map.domain.kind().name(), entry.map.domain.dimension()),
            );
            out.push("map", entry.map.source());
            for (pname, value) in &entry.params {
                out.push(&format!("param_{pname}"), *value);
            }
            out.push("base_point", fmt_point(entry.base_point.coords()));
            out.push("type", entry.truth.map_type.to_string());
            out.push("rate", entry.truth.rate);
            if let Some(dw) = &entry.truth.dw {
                out.push("dw_ball_point", fmt_point(&dw.ball_point));
                out.push("dw_dilation", dw.dilation);
            }
            if let Some(rep) = &entry.truth.repelling {
                out.push("repelling_ball_point", fmt_point(&rep.ball_point));
                out.push("repelling_dilation", rep.dilation);
            }
            if let Some(fp) = &entry.truth.fixed_point {
                out.push("fixed_point", fmt_point(fp));
            }
            out.push("stable_set", entry.truth.stable_set.clone());
            for (field, note) in &entry.truth.notes {
                out.push(&format!("note_{field}"), note.clone());
            }
            Ok(out)
        }
    }
}
