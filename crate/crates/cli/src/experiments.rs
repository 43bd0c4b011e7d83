//! The six experiments. Each one fills a [`Report`] and produces its CSV
//! tables in memory; [`run_scenario`] writes them out.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::{Path, PathBuf};

use catasym_core::busemann::level_set_angle_check;
use catasym_core::cat1::{
    fullsusp_gap, max_suspender_order, verify_suspender_conclusions, ConclusionReport,
    SuspenderCertificate, SuspenderProfile,
};
use catasym_core::gh::gh_to_sphere;
use catasym_core::metric::{epsilon_net, ModelPoint, SampleSet, SpaceDescriptor};
use catasym_core::strainer::{
    bilipschitz_verify, certify_ideal_strainer, equal_endpoint_geodesics, find_ideal_strainer,
    first_variation_inequalities_check, lipschitz_and_open_constants, openness_iteration,
    random_geodesics, sharpest_delta, sharpest_ideal_strainer, sphere_map_distortion,
    IdealStrainer, IterationTrace, StrainerMap,
};
use catasym_core::Error as CoreError;
use serde::Serialize;

use crate::config::{ConfigError, Experiment, ScenarioConfig, TupleSource, Variant};
use crate::report::{Group, Provenance, Report};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Slack allowed on top of 2(m − 1)δ for measured contraction ratios.
const CONTRACTION_SLACK: f64 = 0.02;
/// Contraction is only asserted when 2(m − 1)δ is below this.
const CONTRACTION_REGIME: f64 = 0.5;
/// Certified full-order gap required before normalizing the sphere map.
const GAP_FLOOR: f64 = 0.5;

/// A CSV table produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
    /// Files written, report first.
    pub files: Vec<PathBuf>,
}

/// Runs the experiment without touching the file system.
pub fn evaluate(cfg: &ScenarioConfig) -> Result<(Report, Vec<Table>)> {
    let mut report = Report::new(cfg.experiment.name(), cfg.echo(), cfg.assertions);
    let tables = match cfg.experiment {
        Experiment::SuspenderSearch => suspender_search(cfg, &mut report)?,
        Experiment::StrainerVerify => strainer_verify(cfg, &mut report)?,
        Experiment::OpennessIterate => openness_iterate(cfg, &mut report)?,
        Experiment::BilipSweep => bilip_sweep(cfg, &mut report)?,
        Experiment::GhBounds => gh_bounds(cfg, &mut report)?,
        Experiment::SphereMap => sphere_map(cfg, &mut report)?,
    };
    Ok((report, tables))
}

/// Runs the experiment and writes `<experiment>.json` plus its CSV tables
/// into the output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome> {
    let (report, tables) = evaluate(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| io_error(&cfg.out, e))?;
    let json = cfg.out.join(format!("{}.json", cfg.experiment.name()));
    std::fs::write(&json, report.to_json()).map_err(|e| io_error(&json, e))?;
    let mut files = vec![json];
    for t in &tables {
        let path = cfg.out.join(&t.file_name);
        std::fs::write(&path, &t.bytes).map_err(|e| io_error(&path, e))?;
        files.push(path);
    }
    Ok(Outcome {
        report,
        tables,
        files,
    })
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_table<R: Serialize>(file_name: String, rows: &[R]) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(Table { file_name, bytes })
}

fn sampled(s: &SampleSet) -> Provenance {
    Provenance::Sampled { mesh: s.mesh }
}

fn excess(l: f64) -> f64 {
    (l - TAU).max(0.0)
}

fn base_space(cfg: &ScenarioConfig, l: f64) -> Result<SpaceDescriptor> {
    Ok(match cfg.variant {
        Variant::Circle => SpaceDescriptor::circle(l)?,
        Variant::Suspension => SpaceDescriptor::suspension(SpaceDescriptor::circle(l)?)?,
        Variant::Sphere => SpaceDescriptor::round_sphere(2)?,
        Variant::Theta => SpaceDescriptor::theta(cfg.edges[0], cfg.edges[1], cfg.edges[2])?,
    })
}

/// Point of the base at angle `a` on the circle or on the equator.
fn equator_point(cfg: &ScenarioConfig, base: &SpaceDescriptor, a: f64) -> Result<ModelPoint> {
    Ok(match cfg.variant {
        Variant::Circle => base.angle(a)?,
        Variant::Suspension => base.polar_point(FRAC_PI_2, ModelPoint::Angle(a))?,
        Variant::Sphere => base.coords(vec![a.cos(), a.sin(), 0.0])?,
        Variant::Theta => {
            return Err(
                ConfigError::Invariant("theta graphs have no coordinate frame".into()).into(),
            )
        }
    })
}

/// The first m members of the coordinate frame and their opposites.
fn quarter_tuple(
    cfg: &ScenarioConfig,
    base: &SpaceDescriptor,
    l: f64,
) -> Result<(Vec<ModelPoint>, Vec<ModelPoint>)> {
    let period = match cfg.variant {
        Variant::Sphere => TAU,
        _ => l,
    };
    let mut p = vec![
        equator_point(cfg, base, 0.0)?,
        equator_point(cfg, base, period / 4.0)?,
    ];
    let mut q = vec![
        equator_point(cfg, base, period / 2.0)?,
        equator_point(cfg, base, 3.0 * period / 4.0)?,
    ];
    match cfg.variant {
        Variant::Suspension => {
            p.push(base.polar_point(0.0, ModelPoint::Angle(0.0))?);
            q.push(base.polar_point(PI, ModelPoint::Angle(0.0))?);
        }
        Variant::Sphere => {
            p.push(base.coords(vec![0.0, 0.0, 1.0])?);
            q.push(base.coords(vec![0.0, 0.0, -1.0])?);
        }
        _ => {}
    }
    p.truncate(cfg.m);
    q.truncate(cfg.m);
    Ok((p, q))
}

/// Strainer at infinity on the cone over `base`, from the configured
/// tuple source, at the configured δ or the sharpest grid value.
fn strainer(
    cfg: &ScenarioConfig,
    base: &SpaceDescriptor,
    base_sample: &SampleSet,
    l: f64,
) -> Result<Option<IdealStrainer>> {
    let cone = SpaceDescriptor::cone(base.clone())?;
    Ok(match cfg.tuple {
        TupleSource::Quarter => {
            let (p, q) = quarter_tuple(cfg, base, l)?;
            let delta = match cfg.delta {
                Some(d) => d,
                None => {
                    sharpest_delta(SuspenderProfile::evaluate(base, base_sample, &p, &q)?.defect())
                }
            };
            certify_ideal_strainer(&cone, &p, &q, base_sample, delta)?
        }
        TupleSource::Search => match cfg.delta {
            Some(d) => find_ideal_strainer(&cone, base_sample, cfg.m, d, cfg.budget)?,
            None => sharpest_ideal_strainer(&cone, base_sample, cfg.m, cfg.delta_max, cfg.budget)?,
        },
    })
}

fn certificate_group(cert: &SuspenderCertificate, sample: &SampleSet) -> Group {
    let s = sampled(sample);
    let mut g = Group::new();
    g.count("m", cert.m, Provenance::ClosedForm)
        .real("delta", cert.delta, s)
        .real("defect", cert.defect, s)
        .texts("p_tuple", &cert.p_tuple)
        .texts("q_tuple", &cert.q_tuple)
        .reals("raw_sups", &cert.raw_sups, s)
        .reals("corrected_sups", &cert.corrected_sups, s);
    let residuals = cert
        .residuals
        .iter()
        .map(|r| {
            let mut g = Group::new();
            g.text("constraint", &r.constraint)
                .real("value", r.value, s)
                .real("bound", r.bound, Provenance::ClosedForm)
                .real("slack", r.slack, s);
            g
        })
        .collect();
    g.groups("residuals", residuals);
    g
}

fn conclusions_group(c: &ConclusionReport, sample: &SampleSet) -> Group {
    let s = sampled(sample);
    let mut g = Group::new();
    g.reals("sum_infs", &c.sum_infs, s)
        .real("sum_bound", c.sum_bound, Provenance::ClosedForm)
        .real("min_sum_slack", c.min_sum_slack, s)
        .real("min_cross", c.min_cross, s)
        .real("cross_bound", c.cross_bound, Provenance::ClosedForm)
        .real("min_cross_slack", c.min_cross_slack, s)
        .flag("passed", c.passed);
    g
}

fn strainer_group(st: &IdealStrainer, base_sample: &SampleSet) -> Group {
    let mut g = Group::new();
    g.count("m", st.m, Provenance::ClosedForm)
        .real("delta", st.delta, sampled(base_sample))
        .texts("xi", &st.xi)
        .texts("eta", &st.eta)
        .group(
            "certificate",
            certificate_group(&st.certificate, base_sample),
        );
    if let Some(dc) = &st.direction_check {
        let worst = dc
            .samples
            .iter()
            .map(|s| s.defect)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut d = Group::new();
        d.count("points", dc.samples.len(), Provenance::ClosedForm)
            .real("max_defect", worst, sampled(base_sample))
            .real("bound", dc.bound, sampled(base_sample))
            .flag("passed", dc.passed);
        g.group("direction_check", d);
    }
    g
}

fn space_group(base: &SpaceDescriptor, l: f64, sample: &SampleSet) -> Group {
    let mut g = Group::new();
    g.text("space", base)
        .real("length", l, Provenance::ClosedForm)
        .real("excess", excess(l), Provenance::ClosedForm)
        .count("sample_points", sample.len(), Provenance::ClosedForm)
        .real("sample_mesh", sample.mesh, Provenance::ClosedForm);
    g
}

fn suspender_search(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let delta = cfg.delta.unwrap_or(0.05);
    let mut runs = Vec::new();
    for &l in &cfg.lengths {
        let space = base_space(cfg, l)?;
        let sample = epsilon_net(&space, None, cfg.mesh, cfg.seed)?;
        let order = max_suspender_order(&space, &sample, delta, cfg.budget)?;
        let mut g = space_group(&space, l, &sample);
        g.real("delta", delta, Provenance::ClosedForm)
            .count("order", order.order, sampled(&sample))
            .flag("exhaustive", order.exhaustive);
        if let Some(cert) = &order.certificate {
            let concl = verify_suspender_conclusions(cert, &space, &sample)?;
            report.check(
                &format!("suspender conclusions hold (L = {l})"),
                concl.passed,
                format!(
                    "min sum slack {:.6e}, min cross slack {:.6e}",
                    concl.min_sum_slack, concl.min_cross_slack
                ),
            );
            let gap = fullsusp_gap(&space, &sample, cert)?;
            let mut gg = Group::new();
            gg.real("sample_gap", gap.sample_gap, sampled(&sample))
                .real("certified_lower", gap.certified_lower, sampled(&sample))
                .text("attained_at", &gap.attained_at);
            g.group("certificate", certificate_group(cert, &sample))
                .group("conclusions", conclusions_group(&concl, &sample))
                .group("gap", gg);
        }
        if let Some(expect) = cfg.expect_order {
            report.check(
                &format!("maximal order is {expect} (L = {l})"),
                order.order == expect && order.exhaustive,
                format!("found {}, exhaustive {}", order.order, order.exhaustive),
            );
        }
        runs.push(g);
    }
    report.results.groups("runs", runs);
    Ok(Vec::new())
}

/// Runs the openness probes, turning a non-contracting probe into a
/// failed check instead of an error.
fn regularity(
    cfg: &ScenarioConfig,
    sm: &StrainerMap,
    sample: &SampleSet,
    report: &mut Report,
    label: &str,
) -> Result<Option<catasym_core::strainer::RegularityReport>> {
    match lipschitz_and_open_constants(sm, sample, cfg.probes, cfg.pair_budget, cfg.seed) {
        Ok(r) => Ok(Some(r)),
        Err(e @ (CoreError::Divergence { .. } | CoreError::MaxIterations { .. })) => {
            report.check(
                &format!("openness probes converge ({label})"),
                false,
                e.to_string(),
            );
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn strainer_verify(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let mut runs = Vec::new();
    for &l in &cfg.lengths {
        let label = format!("L = {l}");
        let base = base_space(cfg, l)?;
        let base_sample = epsilon_net(&base, None, cfg.mesh, cfg.seed)?;
        let mut g = space_group(&base, l, &base_sample);
        let st = strainer(cfg, &base, &base_sample, l)?;
        report.check(&format!("strainer certified ({label})"), st.is_some(), "");
        let Some(st) = st else {
            runs.push(g);
            continue;
        };
        g.group("strainer", strainer_group(&st, &base_sample));
        if let Some(dc) = &st.direction_check {
            report.check(
                &format!("directions form a suspender at sampled cone points ({label})"),
                dc.passed,
                format!("bound {:.6e}", dc.bound),
            );
        }
        let concl = verify_suspender_conclusions(&st.certificate, &base, &base_sample)?;
        report.check(
            &format!("suspender conclusions hold ({label})"),
            concl.passed,
            format!(
                "min sum slack {:.6e}, min cross slack {:.6e}",
                concl.min_sum_slack, concl.min_cross_slack
            ),
        );
        g.group("conclusions", conclusions_group(&concl, &base_sample));

        let sm = StrainerMap::new(&SpaceDescriptor::cone(base.clone())?, &st)?;
        let sample = epsilon_net(sm.cone(), Some(cfg.radius_cap), cfg.mesh, cfg.seed)?;
        let s = sampled(&sample);
        g.count("cone_sample_points", sample.len(), Provenance::ClosedForm)
            .real("cone_sample_mesh", sample.mesh, Provenance::ClosedForm)
            .real("radius_cap", cfg.radius_cap, Provenance::ClosedForm);

        if let Some(r) = regularity(cfg, &sm, &sample, report, &label)? {
            let mut rg = Group::new();
            rg.real("lip", r.lip, s)
                .count("lip_pairs", r.lip_pairs, Provenance::ClosedForm)
                .flag("lip_exhaustive", r.lip_exhaustive)
                .real("open_c", r.open_c, Provenance::Iterated { tol: 1e-12 })
                .count("probes", r.probes, Provenance::ClosedForm)
                .real(
                    "max_contraction",
                    r.max_contraction,
                    Provenance::Iterated { tol: 1e-12 },
                )
                .real("open_bound", r.open_bound, s);
            g.group("regularity", rg);
        }

        let b = bilipschitz_verify(&sm, &sample, cfg.pair_budget, cfg.seed)?;
        report.check(
            &format!("no injectivity violations ({label})"),
            b.injectivity_violations == 0,
            format!(
                "{} violations at floor {}",
                b.injectivity_violations, b.floor
            ),
        );
        g.group("bilipschitz", bilip_group(&b, &sample));

        let mut geos = random_geodesics(sm.cone(), &sample, cfg.geodesics, cfg.seed)?;
        geos.extend(equal_endpoint_geodesics(
            &sm,
            &sample,
            cfg.geodesics / 10 + 1,
            cfg.seed,
        )?);
        let fv = first_variation_inequalities_check(&sm, &geos, cfg.steps)?;
        report.check(
            &format!("first variation inequalities ({label})"),
            fv.passed(),
            format!(
                "coordinate residual {:.6e} ≤ {:.6e}, variation {:.6e} ≤ {:.6e}",
                fv.max_coordinate_residual,
                fv.coordinate_bound,
                fv.max_variation,
                fv.variation_bound
            ),
        );
        let mut fg = Group::new();
        fg.count("geodesics", fv.geodesics, Provenance::ClosedForm)
            .count("steps", cfg.steps, Provenance::ClosedForm)
            .real("max_coordinate_residual", fv.max_coordinate_residual, s)
            .real("coordinate_bound", fv.coordinate_bound, s)
            .real("max_norm_residual", fv.max_norm_residual, s)
            .real("norm_bound", fv.norm_bound, s)
            .real("max_variation", fv.max_variation, s)
            .real("variation_bound", fv.variation_bound, s)
            .count("equal_endpoint_geodesics", fv.equal_endpoint_geodesics, s)
            .real(
                "max_equal_endpoint_derivative",
                fv.max_equal_endpoint_derivative,
                s,
            )
            .real("equal_endpoint_bound", fv.equal_endpoint_bound, s)
            .count("violations", fv.violations, s);
        g.group("first_variation", fg);

        let model = sm.model()?;
        let mut levels = Vec::new();
        for (i, bf) in sm.functions().iter().enumerate() {
            let lv = level_set_angle_check(
                model.as_ref(),
                bf,
                sm.delta(),
                &sample,
                cfg.pair_budget,
                cfg.seed,
            )?;
            report.check(
                &format!(
                    "level-set and angle-sum bounds for coordinate {} ({label})",
                    i + 1
                ),
                lv.passed(),
                format!(
                    "level angles in [{:.6}, {:.6}], angle sums in [{:.6}, {:.6}]",
                    lv.min_level_angle, lv.max_level_angle, lv.min_angle_sum, lv.max_angle_sum
                ),
            );
            let mut lg = Group::new();
            lg.count("level_pairs", lv.level_pairs, Provenance::ClosedForm)
                .real("min_level_angle", lv.min_level_angle, s)
                .real("max_level_angle", lv.max_level_angle, s)
                .real("level_lower_bound", lv.level_lower_bound, s)
                .real("level_upper_bound", lv.level_upper_bound, s)
                .count("sum_pairs", lv.sum_pairs, Provenance::ClosedForm)
                .real("min_angle_sum", lv.min_angle_sum, s)
                .real("max_angle_sum", lv.max_angle_sum, s)
                .real("sum_lower_bound", lv.sum_lower_bound, s)
                .real("sum_upper_bound", lv.sum_upper_bound, s)
                .count("violations", lv.violations, s);
            levels.push(lg);
        }
        g.groups("level_sets", levels);
        runs.push(g);
    }
    report.results.groups("runs", runs);
    Ok(Vec::new())
}

fn bilip_group(b: &catasym_core::strainer::BilipReport, sample: &SampleSet) -> Group {
    let s = sampled(sample);
    let mut g = Group::new();
    g.real("lower", b.lower, s)
        .real("upper", b.upper, s)
        .count("injectivity_violations", b.injectivity_violations, s)
        .real("floor", b.floor, Provenance::ClosedForm)
        .count("pairs_checked", b.pairs_checked, Provenance::ClosedForm)
        .count("floor_pairs", b.floor_pairs, Provenance::ClosedForm)
        .flag("exhaustive", b.exhaustive);
    g
}

#[derive(Debug, Serialize)]
struct TraceCsvRow {
    k: usize,
    residual_l1: f64,
    residual_l2: f64,
    step_distance: Option<f64>,
    ratio: Option<f64>,
}

fn openness_iterate(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let &[l] = cfg.lengths.as_slice() else {
        return Err(ConfigError::Invariant("openness-iterate takes a single length".into()).into());
    };
    let base = base_space(cfg, l)?;
    let base_sample = epsilon_net(&base, None, cfg.mesh, cfg.seed)?;
    let mut g = space_group(&base, l, &base_sample);
    let st = strainer(cfg, &base, &base_sample, l)?;
    report.check("strainer certified", st.is_some(), "");
    let Some(st) = st else {
        report.results.groups("runs", vec![g]);
        return Ok(Vec::new());
    };
    g.group("strainer", strainer_group(&st, &base_sample));
    let cone = SpaceDescriptor::cone(base.clone())?;
    let sm = StrainerMap::new(&cone, &st)?;
    let x0 = if cfg.x0_radius == 0.0 {
        cone.apex()?
    } else {
        cone.cone_point(cfg.x0_radius, equator_point(cfg, &base, cfg.x0_angle)?)?
    };

    let it = Provenance::Iterated { tol: cfg.tol };
    let (y, trace, failure) = match openness_iteration(&sm, &x0, &cfg.u0, cfg.tol, cfg.max_iter) {
        Ok((y, t)) => (Some(y), t, None),
        Err(e @ CoreError::Divergence { .. }) | Err(e @ CoreError::MaxIterations { .. }) => {
            let msg = e.to_string();
            let trace = match e {
                CoreError::Divergence { trace, .. } | CoreError::MaxIterations { trace, .. } => {
                    *trace
                }
                _ => unreachable!("matched above"),
            };
            (None, trace, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    report.check(
        "iteration converges to the tolerance",
        failure.is_none(),
        failure.unwrap_or_else(|| format!("final residual {:.3e}", trace.final_residual())),
    );

    let m = sm.m() as f64;
    let rho = 2.0 * (m - 1.0) * sm.delta();
    let u1: f64 = cfg.u0.iter().map(|x| x.abs()).sum();
    let bound = u1 / (1.0 - rho);
    let mut ig = Group::new();
    ig.text("x0", &x0)
        .reals("u0", &cfg.u0, Provenance::ClosedForm)
        .count("steps", trace.steps(), it)
        .real("final_residual", trace.final_residual(), it)
        .real("max_ratio", trace.max_ratio(), it)
        .real("path_length", trace.path_length(), it)
        .real("contraction_bound", rho, sampled(&base_sample))
        .real("distance_bound", bound, sampled(&base_sample));
    if rho < CONTRACTION_REGIME {
        report.check(
            "measured contraction within 2(m − 1)δ + 0.02",
            trace.max_ratio() <= rho + CONTRACTION_SLACK,
            format!(
                "max ratio {:.6e}, bound {:.6e}",
                trace.max_ratio(),
                rho + CONTRACTION_SLACK
            ),
        );
    }
    if let Some(y) = &y {
        let d = sm.model()?.distance(&x0, y)?;
        ig.text("y_star", y).real("distance", d, it);
        report.check(
            "d(x0, y*) ≤ ‖u0‖₁/(1 − 2(m − 1)δ) + tol",
            d <= bound + cfg.tol,
            format!("distance {d:.12}, bound {bound:.12}"),
        );
    }
    g.group("iteration", ig);
    report.results.groups("runs", vec![g]);
    Ok(vec![trace_table(&trace, "openness-iterate-trace.csv")?])
}

fn trace_table(trace: &IterationTrace, name: &str) -> Result<Table> {
    let rows: Vec<TraceCsvRow> = trace
        .rows()
        .into_iter()
        .map(|r| TraceCsvRow {
            k: r.k,
            residual_l1: r.residual_l1,
            residual_l2: r.residual_l2,
            step_distance: r.step_distance,
            ratio: r.ratio,
        })
        .collect();
    csv_table(name.to_string(), &rows)
}

#[derive(Debug, Clone, Serialize)]
struct BilipRow {
    #[serde(rename = "L")]
    length: f64,
    delta_certified: f64,
    lip: f64,
    open_c: f64,
    bilip_lower: f64,
    bilip_upper: f64,
}

fn bilip_sweep(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for &l in &cfg.lengths {
        let label = format!("L = {l}");
        let t = excess(l);
        let base = base_space(cfg, l)?;
        let base_sample = epsilon_net(&base, None, cfg.mesh, cfg.seed)?;
        let mut g = space_group(&base, l, &base_sample);
        let st = strainer(cfg, &base, &base_sample, l)?;
        report.check(&format!("strainer certified ({label})"), st.is_some(), "");
        let Some(st) = st else {
            runs.push(g);
            continue;
        };
        g.group("strainer", strainer_group(&st, &base_sample));
        let sm = StrainerMap::new(&SpaceDescriptor::cone(base.clone())?, &st)?;
        let sample = epsilon_net(sm.cone(), Some(cfg.radius_cap), cfg.mesh, cfg.seed)?;
        let s = sampled(&sample);
        let Some(r) = regularity(cfg, &sm, &sample, report, &label)? else {
            runs.push(g);
            continue;
        };
        let b = bilipschitz_verify(&sm, &sample, cfg.pair_budget, cfg.seed)?;
        report.check(
            &format!("no injectivity violations ({label})"),
            b.injectivity_violations == 0,
            format!(
                "{} violations at floor {}",
                b.injectivity_violations, b.floor
            ),
        );
        let (lo, hi) = (1.0 - cfg.band * t, 1.0 + cfg.band * t);
        let within = if t > 0.0 {
            b.lower >= lo && b.upper <= hi
        } else {
            (b.lower - 1.0).abs() <= cfg.tol && (b.upper - 1.0).abs() <= cfg.tol
        };
        report.check(
            &format!(
                "bi-Lipschitz ratios within [1 − {}t, 1 + {}t] ({label})",
                cfg.band, cfg.band
            ),
            within,
            format!(
                "[{:.6}, {:.6}] against [{lo:.6}, {hi:.6}]",
                b.lower, b.upper
            ),
        );
        let mut rg = Group::new();
        rg.real("lip", r.lip, s)
            .real("open_c", r.open_c, Provenance::Iterated { tol: 1e-12 })
            .count("probes", r.probes, Provenance::ClosedForm);
        g.group("regularity", rg)
            .group("bilipschitz", bilip_group(&b, &sample));
        rows.push(BilipRow {
            length: l,
            delta_certified: st.delta,
            lip: r.lip,
            open_c: r.open_c,
            bilip_lower: b.lower,
            bilip_upper: b.upper,
        });
        runs.push(g);
    }
    let mut by_t = rows.clone();
    by_t.sort_by(|a, b| a.length.total_cmp(&b.length));
    let monotone = by_t
        .windows(2)
        .all(|w| w[1].bilip_upper >= w[0].bilip_upper && w[1].bilip_lower <= w[0].bilip_lower);
    report.check(
        "ratio interval widens monotonically with L",
        monotone,
        by_t.iter()
            .map(|r| {
                format!(
                    "L = {}: [{:.6}, {:.6}]",
                    r.length, r.bilip_lower, r.bilip_upper
                )
            })
            .collect::<Vec<_>>()
            .join("; "),
    );
    report.results.groups("runs", runs);
    Ok(vec![csv_table("bilip-sweep.csv".into(), &rows)?])
}

fn gh_provenance(text: &str, mesh: f64) -> Provenance {
    if text.starts_with("closed_form") {
        Provenance::ClosedForm
    } else {
        Provenance::Sampled { mesh }
    }
}

fn gh_bounds(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let mut runs = Vec::new();
    for &l in &cfg.lengths {
        let z = base_space(cfg, l)?;
        let iv = gh_to_sphere(&z, cfg.m, cfg.mesh)?;
        let mut g = Group::new();
        g.text("space", &z)
            .text("sphere", format!("S^{}", cfg.m - 1))
            .real("length", l, Provenance::ClosedForm)
            .real(
                "lower",
                iv.lower,
                gh_provenance(&iv.lower_provenance, iv.mesh),
            )
            .real(
                "upper",
                iv.upper,
                gh_provenance(&iv.upper_provenance, iv.mesh),
            )
            .real("width", iv.width(), Provenance::Sampled { mesh: iv.mesh })
            .text("lower_provenance", &iv.lower_provenance)
            .text("upper_provenance", &iv.upper_provenance);
        report.check(
            &format!("lower ≤ upper (L = {l})"),
            iv.lower <= iv.upper,
            format!("[{:.6e}, {:.6e}]", iv.lower, iv.upper),
        );
        if let Some(w) = cfg.max_width {
            report.check(
                &format!("interval width ≤ {w} (L = {l})"),
                iv.width() <= w,
                format!("width {:.6e}", iv.width()),
            );
        }
        runs.push(g);
    }
    report.results.groups("runs", runs);
    Ok(Vec::new())
}

fn sphere_map(cfg: &ScenarioConfig, report: &mut Report) -> Result<Vec<Table>> {
    let mut runs = Vec::new();
    for &l in &cfg.lengths {
        let label = format!("L = {l}");
        let t = excess(l);
        let base = base_space(cfg, l)?;
        let base_sample = epsilon_net(&base, None, cfg.mesh, cfg.seed)?;
        let s = sampled(&base_sample);
        let mut g = space_group(&base, l, &base_sample);

        let iv = gh_to_sphere(&base, cfg.m, cfg.mesh)?;
        let mut gg = Group::new();
        gg.real(
            "lower",
            iv.lower,
            gh_provenance(&iv.lower_provenance, iv.mesh),
        )
        .real(
            "upper",
            iv.upper,
            gh_provenance(&iv.upper_provenance, iv.mesh),
        );
        g.group("gh_to_sphere", gg);

        let st = strainer(cfg, &base, &base_sample, l)?;
        report.check(&format!("strainer certified ({label})"), st.is_some(), "");
        let Some(st) = st else {
            runs.push(g);
            continue;
        };
        g.group("strainer", strainer_group(&st, &base_sample));
        let gap = fullsusp_gap(&base, &base_sample, &st.certificate)?;
        report.check(
            &format!("full-order gap certified above {GAP_FLOOR} ({label})"),
            gap.certified_lower > GAP_FLOOR,
            format!("certified gap {:.6}", gap.certified_lower),
        );
        let mut gp = Group::new();
        gp.real("sample_gap", gap.sample_gap, s)
            .real("certified_lower", gap.certified_lower, s)
            .text("attained_at", &gap.attained_at);
        g.group("gap", gp);

        let xi: Vec<ModelPoint> = st.xi.iter().map(|x| x.0.clone()).collect();
        match sphere_map_distortion(&base, &xi, &base_sample, cfg.pair_budget, cfg.seed) {
            Ok(d) => {
                report.check(&format!("normalization succeeds ({label})"), true, "");
                let (lo, hi) = (1.0 - cfg.band * t, 1.0 + cfg.band * t);
                let within = if t > 0.0 {
                    d.lower >= lo && d.upper <= hi
                } else {
                    (d.lower - 1.0).abs() <= cfg.tol && (d.upper - 1.0).abs() <= cfg.tol
                };
                report.check(
                    &format!(
                        "distortion within [1 − {}t, 1 + {}t] ({label})",
                        cfg.band, cfg.band
                    ),
                    within,
                    format!("[{:.9}, {:.9}]", d.lower, d.upper),
                );
                let mut dg = Group::new();
                dg.real("lower", d.lower, s)
                    .real("upper", d.upper, s)
                    .real("min_norm", d.min_norm, s)
                    .count("pairs_checked", d.pairs_checked, Provenance::ClosedForm)
                    .flag("exhaustive", d.exhaustive);
                g.group("distortion", dg);
            }
            Err(e @ CoreError::Normalization { .. }) => {
                report.check(
                    &format!("normalization succeeds ({label})"),
                    false,
                    e.to_string(),
                );
            }
            Err(e) => return Err(e.into()),
        }
        runs.push(g);
    }
    report.results.groups("runs", runs);
    Ok(Vec::new())
}
