use ftlocal::analytic::{gamma_crit, sparse_prob_lower_bound, AnalyticParams};
use ftlocal::catalog::CircuitCatalog;
use ftlocal::flow::*;
use ftlocal::local::{ElementaryKind, GeometryParams, LocalMap, LocalRates};
use ftlocal::model::{AncillaStats, Location, NonlocalMap, ProtocolParams};
use rayon::prelude::*;

use crate::config::{config_err, ExperimentConfig, Model, SweepVariable, TauChoice};
use crate::output::{Cell, PlotSpec, Report};

/// Scan resolution for the outer pseudothreshold crossing.
const PSEUDO_SCAN_POINTS: usize = 60;

/// Either model behind one [`RateMap`].
pub enum AnyMap {
    Nonlocal(NonlocalMap),
    Local(LocalMap),
}

impl RateMap for AnyMap {
    fn dim(&self) -> usize {
        match self {
            AnyMap::Nonlocal(m) => m.dim(),
            AnyMap::Local(m) => m.dim(),
        }
    }

    fn apply(&self, x: &[f64]) -> ftlocal::Result<Vec<f64>> {
        match self {
            AnyMap::Nonlocal(m) => m.apply(x),
            AnyMap::Local(m) => m.apply(x),
        }
    }

    fn component_names(&self) -> Vec<String> {
        match self {
            AnyMap::Nonlocal(m) => m.component_names(),
            AnyMap::Local(m) => m.component_names(),
        }
    }

    fn ancilla_stats(&self, x: &[f64]) -> ftlocal::Result<Option<AncillaStats>> {
        match self {
            AnyMap::Nonlocal(m) => m.ancilla_stats(x),
            AnyMap::Local(m) => m.ancilla_stats(x),
        }
    }
}

struct Setup {
    map: AnyMap,
    ray: Ray,
    geometry: Option<GeometryParams>,
}

fn bisect_opts(cfg: &ExperimentConfig) -> BisectOptions {
    BisectOptions { rel_tol: cfg.rel_tol, flow: cfg.flow }
}

fn bracket(cfg: &ExperimentConfig) -> (f64, f64) {
    (cfg.bracket[0], cfg.bracket[1])
}

fn tau_range(r: u32, tau_max: u32) -> std::ops::RangeInclusive<u32> {
    1..=tau_max.min(r)
}

/// Threshold of the local base ray at `(r, tau, epsilon)`, optimizing `tau`
/// when asked. Returns the `tau` used.
fn local_cell(
    cfg: &ExperimentConfig,
    r: u32,
    tau: TauChoice,
    epsilon: f64,
) -> anyhow::Result<(u32, ThresholdEstimate)> {
    let params = ProtocolParams::default();
    let catalog = CircuitCatalog::steane();
    let opts = bisect_opts(cfg);
    match tau {
        TauChoice::Fixed(t) => {
            let g = GeometryParams::new(r, t, epsilon)?;
            Ok((t, local_threshold(&g, &params, &catalog, bracket(cfg), &opts)?))
        }
        TauChoice::Optimize => {
            let g = GeometryParams::new(r, 1, epsilon)?;
            let best = optimize_tau(&g, &params, &catalog, tau_range(r, cfg.geometry.tau_max), bracket(cfg), &opts)?;
            Ok((best.tau, best.threshold))
        }
    }
}

fn resolve_geometry(cfg: &ExperimentConfig) -> anyhow::Result<GeometryParams> {
    let g = &cfg.geometry;
    let tau = match g.tau {
        TauChoice::Fixed(t) => t,
        TauChoice::Optimize => {
            let (tau, _) = local_cell(cfg, g.r, TauChoice::Optimize, g.epsilon)?;
            log::info!("optimized tau = {tau} for r = {}", g.r);
            tau
        }
    };
    Ok(GeometryParams::new(g.r, tau, g.epsilon)?)
}

fn setup(cfg: &ExperimentConfig) -> anyhow::Result<Setup> {
    let explicit = match &cfg.ray {
        Some(spec) => {
            let base = spec.base.clone().unwrap_or_else(|| vec![0.0; spec.direction.len()]);
            Some(Ray::new(base, spec.direction.clone())?)
        }
        None => None,
    };
    let (map, ray, geometry) = match cfg.model {
        Model::Nonlocal => {
            let ray = match explicit {
                Some(r) => r,
                None => Ray::nonlocal_standard(cfg.w_ratio)?,
            };
            (AnyMap::Nonlocal(NonlocalMap::default()), ray, None)
        }
        Model::Local => {
            let g = resolve_geometry(cfg)?;
            let ray = match explicit {
                Some(r) => r,
                None => Ray::through_origin(LocalRates::base_direction(&g).to_vec())?,
            };
            (AnyMap::Local(LocalMap::from_geometry(&g)?), ray, Some(g))
        }
    };
    if ray.dim() != map.dim() {
        return Err(config_err(format!("ray has {} components, the {:?} model has {}", ray.dim(), cfg.model, map.dim())));
    }
    Ok(Setup { map, ray, geometry })
}

fn note_geometry(report: &mut Report, g: &Option<GeometryParams>) {
    if let Some(g) = g {
        report.note("geometry", format!("r={} tau={} epsilon={} d={}", g.r, g.tau, g.epsilon, g.d()));
    }
}

fn fmt_vector(names: &[String], x: &[f64]) -> String {
    names.iter().zip(x).map(|(n, v)| format!("{n}={v:.6e}")).collect::<Vec<_>>().join(" ")
}

/// Seeds below this are skipped: near the origin the absolute Newton
/// tolerance is met by any point.
const SEED_FLOOR: f64 = 1e-8;

fn max_of(x: &[f64]) -> f64 {
    x.iter().copied().fold(0.0, f64::max)
}

/// The trajectory point that moved least in one step, relative to its size.
fn slowest_point(trajectories: &[&FlowResult]) -> Option<Vec<f64>> {
    let mut best: Option<(f64, &Vec<f64>)> = None;
    for t in trajectories {
        for w in t.trajectory.windows(2).skip(1) {
            let largest = max_of(&w[0]);
            if w[0].iter().any(|&v| v <= 0.0) || largest < SEED_FLOOR {
                continue;
            }
            let change = w[0].iter().zip(&w[1]).map(|(a, b)| (b / a - 1.0).abs()).fold(0.0, f64::max);
            if best.is_none_or(|(c, _)| change < c) {
                best = Some((change, &w[0]));
            }
        }
    }
    best.map(|(_, x)| x.clone())
}

fn note_fixed_point(report: &mut Report, names: &[String], fp: &FixedPointReport) {
    report.note("fixed point", fmt_vector(names, &fp.location));
    report.note("fixed point residual", format!("{:.3e}", fp.residual));
    report.note("fixed point unstable directions", fp.unstable_count);
    let mags: Vec<String> = fp.eigenvalue_magnitudes.iter().map(|m| format!("{m:.4}")).collect();
    report.note("fixed point eigenvalue magnitudes", mags.join(" "));
    if fp.location.len() >= 2 && fp.location[0] > 0.0 {
        report.note("fixed point gamma_2/gamma_1", format!("{:.4}", fp.location[1] / fp.location[0]));
    }
}

pub fn flow(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    if cfg.scales.is_empty() {
        return Err(config_err("flow needs at least one start scale"));
    }
    let s = setup(cfg)?;
    let names = s.map.component_names();
    let mut columns = vec!["start", "scale", "level"];
    columns.extend(names.iter().map(String::as_str));
    columns.extend(["alpha", "beta"]);
    let mut report = Report::new("flow", &columns);
    note_geometry(&mut report, &s.geometry);
    report.note("ray", format!("base={:?} direction={:?}", s.ray.base, s.ray.direction));

    let results: Vec<FlowResult> = cfg
        .scales
        .iter()
        .map(|&scale| Ok(iterate_flow(&s.map, &s.ray.checked_point(scale)?, &cfg.flow)?))
        .collect::<anyhow::Result<_>>()?;
    for (i, (res, &scale)) in results.iter().zip(&cfg.scales).enumerate() {
        for (level, x) in res.trajectory.iter().enumerate() {
            let stats = s.map.ancilla_stats(x)?;
            let mut row: Vec<Cell> = vec![i.into(), scale.into(), level.into()];
            row.extend(x.iter().map(|&v| Cell::from(v)));
            row.push(stats.as_ref().map(|st| st.alpha()).into());
            row.push(stats.as_ref().map(|st| st.beta).into());
            report.push(row);
        }
        report.note(format!("start {i} scale"), format!("{scale:e}"));
        report.note(format!("start {i} classification"), res.classification);
        report.note(format!("start {i} levels"), res.trajectory.len() - 1);
    }
    if cfg.fixed_point {
        let guess = match &cfg.guess {
            Some(g) => g.clone(),
            None => slowest_point(&results.iter().collect::<Vec<_>>())
                .ok_or_else(|| config_err("no trajectory passes close enough to seed the fixed point"))?,
        };
        let fp = find_fixed_point(&s.map, &guess, &FixedPointOptions::default())?;
        if max_of(&fp.location) < SEED_FLOOR {
            report.note("fixed point", "not found: Newton fell to the origin; start closer to threshold");
        } else {
            note_fixed_point(&mut report, &names, &fp);
        }
    }
    report.plot = Some(PlotSpec::Lines {
        x: names[0].clone(),
        y: vec![names[1].clone()],
        group: Some("start".into()),
        logx: true,
        logy: true,
        title: "concatenation flow".into(),
    });
    Ok(report)
}

pub fn threshold(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let mut report =
        Report::new("threshold", &["model", "r", "tau", "epsilon", "threshold", "lo", "hi", "probes", "undecided"]);
    let (geometry, est) = if cfg.model == Model::Local && cfg.ray.is_none() {
        let g = &cfg.geometry;
        let (tau, est) = local_cell(cfg, g.r, g.tau, g.epsilon)?;
        (Some(GeometryParams::new(g.r, tau, g.epsilon)?), est)
    } else {
        let s = setup(cfg)?;
        let (lo, hi) = bracket(cfg);
        (s.geometry, bisect_threshold(&s.map, &s.ray, lo, hi, &bisect_opts(cfg))?)
    };
    let model = match cfg.model {
        Model::Nonlocal => "nonlocal",
        Model::Local => "local",
    };
    report.push(vec![
        model.into(),
        geometry.map(|g| g.r).into(),
        geometry.map(|g| g.tau).into(),
        geometry.map(|g| g.epsilon).into(),
        est.scale.into(),
        est.lo.into(),
        est.hi.into(),
        est.probes.into(),
        est.undecided.into(),
    ]);
    note_geometry(&mut report, &geometry);
    if est.undecided > 0 {
        report.note("warning", format!("{} probes hit the iteration limit and were counted as above", est.undecided));
    }
    Ok(report)
}

fn component_index(cfg: &ExperimentConfig, name: &str) -> anyhow::Result<usize> {
    let short = name.strip_prefix("gamma_").unwrap_or(name);
    Ok(match cfg.model {
        Model::Nonlocal => {
            let loc = Location::parse(short)?;
            Location::ALL.iter().position(|&l| l == loc).expect("listed")
        }
        Model::Local => ElementaryKind::parse(short)?.index(),
    })
}

pub fn pseudothreshold_cmd(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let s = setup(cfg)?;
    let idx = component_index(cfg, &cfg.component)?;
    let names = s.map.component_names();
    let (lo, hi) = bracket(cfg);
    let p = outer_pseudothreshold(&s.map, &s.ray, idx, lo, hi, cfg.rel_tol, PSEUDO_SCAN_POINTS)?;
    let mut report = Report::new("pseudothreshold", &["component", "pseudothreshold", "threshold", "ratio"]);
    let t = bisect_threshold(&s.map, &s.ray, lo, hi, &bisect_opts(cfg));
    match &t {
        Ok(t) => report.push(vec![names[idx].clone().into(), p.into(), t.scale.into(), (p / t.scale).into()]),
        Err(e) => {
            report.note("threshold", format!("not bracketed: {e}"));
            report.push(vec![names[idx].clone().into(), p.into(), Cell::Empty, Cell::Empty]);
        }
    }
    report.note("pseudothreshold point", fmt_vector(&names, &s.ray.point(p)));
    note_geometry(&mut report, &s.geometry);
    Ok(report)
}

pub fn fixed_point(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let s = setup(cfg)?;
    let names = s.map.component_names();
    let guess = match &cfg.guess {
        Some(g) => g.clone(),
        None => {
            // Flow from just below threshold; the trajectory lingers near the
            // fixed point before it falls away.
            let (lo, hi) = bracket(cfg);
            let est = bisect_threshold(&s.map, &s.ray, lo, hi, &bisect_opts(cfg))?;
            let flow = iterate_flow(&s.map, &s.ray.point(est.lo), &cfg.flow)?;
            slowest_point(&[&flow]).ok_or_else(|| config_err("could not seed the fixed point search"))?
        }
    };
    let fp = find_fixed_point(&s.map, &guess, &FixedPointOptions::default())?;
    if max_of(&fp.location) < SEED_FLOOR {
        return Err(ftlocal::Error::Numerical("Newton converged to the origin, not to an unstable fixed point".into()).into());
    }
    let mut report = Report::new(
        "fixed-point",
        &["index", "component", "location", "eigenvalue_re", "eigenvalue_im", "eigenvalue_abs"],
    );
    for (i, name) in names.iter().enumerate() {
        report.push(vec![
            i.into(),
            name.clone().into(),
            fp.location[i].into(),
            fp.eigenvalues[i].0.into(),
            fp.eigenvalues[i].1.into(),
            fp.eigenvalue_magnitudes[i].into(),
        ]);
    }
    report.note("newton steps", fp.newton_steps);
    note_fixed_point(&mut report, &names, &fp);
    note_geometry(&mut report, &s.geometry);
    Ok(report)
}

struct LineCell {
    threshold: Result<ThresholdEstimate, String>,
    pseudo: Vec<Result<f64, String>>,
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn threshold_line(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    if cfg.model != Model::Nonlocal {
        return Err(config_err("threshold-line is defined for the nonlocal model"));
    }
    if cfg.gamma_w_grid.is_empty() {
        return Err(config_err("threshold-line needs a gamma_w grid (--gamma-w or gamma_w_grid)"));
    }
    let map = NonlocalMap::default();
    let (lo, hi) = bracket(cfg);
    let opts = bisect_opts(cfg);
    // gamma_1 = gamma_2 = gamma_p = gamma_else, gamma_1m = 2 gamma_else.
    let direction = vec![1.0, 1.0, 0.0, 2.0, 1.0];
    let pseudo_components = [0usize, 1, 2];
    let cells: Vec<LineCell> = cfg
        .gamma_w_grid
        .par_iter()
        .map(|&gw| {
            let ray = Ray::new(vec![0.0, 0.0, gw, 0.0, 0.0], direction.clone()).expect("valid ray");
            LineCell {
                threshold: bisect_threshold(&map, &ray, lo, hi, &opts).map_err(|e| e.to_string()),
                pseudo: pseudo_components
                    .iter()
                    .map(|&c| {
                        outer_pseudothreshold(&map, &ray, c, lo, hi, cfg.rel_tol, PSEUDO_SCAN_POINTS)
                            .map_err(|e| e.to_string())
                    })
                    .collect(),
            }
        })
        .collect();

    let mut report = Report::new(
        "threshold-line",
        &[
            "gamma_w",
            "threshold",
            "threshold_lo",
            "threshold_hi",
            "pseudo_gamma_1",
            "pseudo_gamma_2",
            "pseudo_gamma_w",
            "flags",
        ],
    );
    let labels = ["threshold", "pseudo_gamma_1", "pseudo_gamma_2", "pseudo_gamma_w"];
    let mut fit = (Vec::new(), Vec::new());
    for (&gw, cell) in cfg.gamma_w_grid.iter().zip(&cells) {
        let mut flags = Vec::new();
        if let Err(e) = &cell.threshold {
            flags.push(format!("{}: {e}", labels[0]));
        }
        for (i, p) in cell.pseudo.iter().enumerate() {
            if let Err(e) = p {
                flags.push(format!("{}: {e}", labels[i + 1]));
            }
        }
        let t = cell.threshold.as_ref().ok();
        if let Some(t) = t {
            fit.0.push(gw);
            fit.1.push(t.scale);
        }
        let mut row: Vec<Cell> = vec![gw.into(), t.map(|t| t.scale).into(), t.map(|t| t.lo).into(), t.map(|t| t.hi).into()];
        row.extend(cell.pseudo.iter().map(|p| Cell::from(p.as_ref().ok().copied())));
        row.push(flags.join("; ").into());
        report.push(row);
    }
    if fit.0.len() >= 2 {
        let (slope, intercept) = least_squares(&fit.0, &fit.1);
        let range = fit.1.iter().copied().fold(f64::MIN, f64::max) - fit.1.iter().copied().fold(f64::MAX, f64::min);
        let worst = fit.0.iter().zip(&fit.1).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
        report.note("line fit slope", format!("{slope:.6e}"));
        report.note("line fit intercept", format!("{intercept:.6e}"));
        if range > 0.0 {
            report.note("line fit max residual / range", format!("{:.4e}", worst / range));
        }
    }
    // Where the threshold line meets the ray gamma_w = w_ratio * gamma_else.
    let ray = Ray::nonlocal_standard(cfg.w_ratio)?;
    let key = format!("ray w_ratio={}", cfg.w_ratio);
    match bisect_threshold(&map, &ray, lo, hi, &opts) {
        Ok(t) => {
            report.note(format!("{key} threshold"), format!("{:.6e}", t.scale));
            if let Ok(p) = outer_pseudothreshold(&map, &ray, 0, lo, hi, cfg.rel_tol, PSEUDO_SCAN_POINTS) {
                report.note(format!("{key} gamma_1 pseudothreshold"), format!("{p:.6e}"));
                report.note(format!("{key} pseudothreshold/threshold"), format!("{:.4}", p / t.scale));
            }
        }
        Err(e) => report.note(format!("{key} threshold"), format!("not bracketed: {e}")),
    }
    report.plot = Some(PlotSpec::Lines {
        x: "gamma_w".into(),
        y: labels.iter().map(|s| s.to_string()).collect(),
        group: None,
        logx: false,
        logy: true,
        title: "threshold line and pseudothresholds".into(),
    });
    Ok(report)
}

pub fn sweep(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    if cfg.model != Model::Local {
        return Err(config_err("sweep is defined for the local model (use --model local)"));
    }
    let spec = cfg.sweep.as_ref().ok_or_else(|| config_err("sweep needs a sweep spec (--variable and --grid)"))?;
    let g = &cfg.geometry;
    let r_values = if spec.r_values.is_empty() { vec![g.r] } else { spec.r_values.clone() };
    let cells: Vec<(u32, TauChoice, f64)> = match spec.variable {
        SweepVariable::R => spec.grid.iter().map(|&r| (r as u32, g.tau, g.epsilon)).collect(),
        SweepVariable::Tau => r_values
            .iter()
            .flat_map(|&r| spec.grid.iter().map(move |&t| (r, TauChoice::Fixed(t as u32), g.epsilon)))
            .collect(),
        SweepVariable::Epsilon => r_values
            .iter()
            .flat_map(|&r| spec.grid.iter().map(move |&e| (r, g.tau, e)))
            .collect(),
    };
    let results: Vec<Result<(u32, ThresholdEstimate), String>> = cells
        .par_iter()
        .map(|&(r, tau, eps)| local_cell(cfg, r, tau, eps).map_err(|e| e.to_string()))
        .collect();

    let mut report =
        Report::new("sweep", &["r", "epsilon", "tau", "threshold", "lo", "hi", "undecided", "flags"]);
    for (&(r, tau, eps), res) in cells.iter().zip(&results) {
        match res {
            Ok((t, est)) => report.push(vec![
                r.into(),
                eps.into(),
                (*t).into(),
                est.scale.into(),
                est.lo.into(),
                est.hi.into(),
                est.undecided.into(),
                "".into(),
            ]),
            Err(e) => report.push(vec![
                r.into(),
                eps.into(),
                match tau {
                    TauChoice::Fixed(t) => t.into(),
                    TauChoice::Optimize => Cell::Empty,
                },
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                e.clone().into(),
            ]),
        }
    }
    let ok = |r: u32| -> Vec<(f64, f64)> {
        cells
            .iter()
            .zip(&results)
            .filter(|((cr, _, _), _)| *cr == r)
            .filter_map(|(&(_, tau, eps), res)| {
                let (t, est) = res.as_ref().ok()?;
                let x = match spec.variable {
                    SweepVariable::Tau => f64::from(*t),
                    SweepVariable::Epsilon => eps,
                    SweepVariable::R => unreachable!("handled separately: {tau:?}"),
                };
                Some((x, est.scale))
            })
            .collect()
    };
    let (plot_x, group, logx) = match spec.variable {
        SweepVariable::R => {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .zip(&results)
                .filter_map(|(c, res)| res.as_ref().ok().map(|(_, e)| (f64::from(c.0).ln(), e.scale.ln())))
                .collect();
            if pts.len() >= 2 {
                let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                report.note("log-log slope", format!("{:.4}", least_squares(&xs, &ys).0));
            }
            ("r", None, true)
        }
        SweepVariable::Tau => {
            for &r in &r_values {
                let pts = ok(r);
                if let Some(best) = pts.iter().copied().reduce(|a, b| if b.1 > a.1 { b } else { a }) {
                    report.note(format!("best tau (r={r})"), format!("{} threshold={:.6e}", best.0, best.1));
                }
            }
            ("tau", Some("r".to_string()), false)
        }
        SweepVariable::Epsilon => {
            for &r in &r_values {
                let pts = ok(r);
                if pts.len() >= 2 {
                    let first = pts.first().unwrap().1;
                    let last = pts.last().unwrap().1;
                    let monotone = pts.windows(2).all(|w| (w[1].1 - w[0].1) * (last - first) >= 0.0);
                    report.note(
                        format!("epsilon span (r={r})"),
                        format!("threshold ratio {:.4} monotone={monotone}", first.max(last) / first.min(last)),
                    );
                }
            }
            ("epsilon", Some("r".to_string()), true)
        }
    };
    report.plot = Some(PlotSpec::Lines {
        x: plot_x.into(),
        y: vec!["threshold".into()],
        group,
        logx,
        logy: spec.variable == SweepVariable::R,
        title: format!("local threshold versus {plot_x}"),
    });
    Ok(report)
}

pub fn analytic(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let a = &cfg.analytic;
    let r = a.r.unwrap_or(u64::from(cfg.geometry.r));
    let a_lc = match a.a_lc {
        Some(v) => v,
        None => CircuitCatalog::steane().local_rect_location_count(&ProtocolParams::default()),
    };
    let params = AnalyticParams::new(r, a_lc, a.k)?;
    let crit = gamma_crit(r, a_lc, a.k)?;
    let mut report = Report::new("analytic", &["level", "p_sparse", "ln_fail", "ln_bound"]);
    report.note("r", r);
    report.note("a_lc", a_lc);
    report.note("k", a.k);
    report.note("gamma_crit", format!("{crit:.6e}"));
    if let Some(g0) = a.gamma_0 {
        let bound = sparse_prob_lower_bound(g0, &params, a.levels)?;
        report.note("gamma_0", format!("{g0:e}"));
        report.note("delta", format!("{:.6}", bound.delta));
        report.note("delta_sup", format!("{:.6}", bound.delta_sup));
        for l in &bound.levels {
            report.push(vec![l.level.into(), l.p_sparse.into(), l.ln_fail.into(), l.ln_bound.into()]);
        }
    }
    Ok(report)
}

pub fn catalog(_cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let c = CircuitCatalog::steane();
    let mut report =
        Report::new("catalog", &["routine", "1", "2", "w1", "w2", "1m", "p", "total", "time_steps"]);
    for rc in [&c.g, &c.v, &c.s, &c.r] {
        let n = &rc.counts;
        report.push(vec![
            format!("{:?}", rc.routine).into(),
            n.one.into(),
            n.two.into(),
            n.w1.into(),
            n.w2.into(),
            n.one_m.into(),
            n.prep.into(),
            n.total().into(),
            rc.time_steps.into(),
        ]);
    }
    let checks = c.validate_against_sources();
    for (i, ch) in checks.checks.iter().enumerate() {
        let tag = if ch.passed { "ok" } else { "FAIL" };
        report.note(format!("check {i:02}"), format!("{tag} {} (expected {}, found {})", ch.name, ch.expected, ch.actual));
    }
    report.note("all checks passed", checks.all_passed());
    report.note(
        "elementary rectangle locations",
        c.local_rect_location_count(&ProtocolParams::default()),
    );
    Ok(report)
}
