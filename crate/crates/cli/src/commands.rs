use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use polyharm::harmonics::{build_basis, build_quadrature, mode_dimension, SphereTransform};
use polyharm::interp::{
    interpolate_general, interpolate_spheres, l2_error_on_sphere, l2_norm_ball,
    radial_laplacian_power, KnotSet, PolyharmonicInterpolant,
};
use polyharm::radial::{
    radial_profiles, sphere_traces, AnalyticFunction, BallFunction, DecayOptions, ProfileOptions,
    RadialProfile, SampledFunction, SphereTrace, TRACE_NOISE_FLOOR,
};
use polyharm::theory::{
    check_theorem2, divergence_demo, theorem1_sweep, KnotRule, Theorem1Setup, DIVERGENCE_MAX_DEGREE,
};
use polyharm::{ModeIndex, ModeLayout};
use rand::{Rng, SeedableRng};

use crate::config::{ConfigError, FunctionSpec, GeneralRule, KnotKind, RunConfig};
use crate::output::{float, opt_float, Sink, Table};
use crate::row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Modes,
    Interpolate,
    ReportT1,
    ReportT2,
    Diverge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Interpolate => "interpolate",
            Command::ReportT1 => "report-t1",
            Command::ReportT2 => "report-t2",
            Command::Diverge => "diverge",
        }
    }
}

pub fn execute(command: Command, config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    match command {
        Command::Modes => modes(config, sink),
        Command::Interpolate => interpolate(config, sink),
        Command::ReportT1 => report_t1(config, sink),
        Command::ReportT2 => report_t2(config, sink),
        Command::Diverge => diverge(config, sink),
    }
}

fn modes(config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    config.check_basis_cap()?;
    let mut table = Table::new(&["k", "d_k", "cumulative"]);
    let mut total = 0usize;
    for k in 0..=config.k_max {
        let d = mode_dimension(config.n, k)?;
        total = total
            .checked_add(d)
            .context("cumulative mode count overflows")?;
        table.push(row![k, d, total]);
    }
    sink.table("modes.csv", &table)
}

fn transform(config: &RunConfig) -> anyhow::Result<SphereTransform> {
    Ok(SphereTransform::new(
        build_basis(config.n, config.k_max)?,
        build_quadrature(config.n, config.exactness)?,
    )?)
}

/// Profiles `c^k` on mode `(k, 1)` (or every `ℓ`), whose sphere traces are `(c r)^k`.
fn geometric_profiles(
    n: usize,
    k_max: usize,
    c: f64,
    all_ell: bool,
) -> anyhow::Result<BTreeMap<ModeIndex, Vec<f64>>> {
    let layout = ModeLayout::new(n, k_max)?;
    Ok(layout
        .modes()
        .filter(|m| all_ell || m.ell == 1)
        .map(|m| (m, vec![c.powi(m.k as i32)]))
        .collect())
}

fn ball_function(config: &RunConfig, t: &SphereTransform) -> anyhow::Result<Box<dyn BallFunction>> {
    let (n, radius) = (config.n, config.radius);
    let f: Box<dyn BallFunction> = match &config.function {
        FunctionSpec::Constant { value } => {
            Box::new(AnalyticFunction::constant(n, radius, *value)?)
        }
        FunctionSpec::Gaussian { a, center } => {
            Box::new(AnalyticFunction::gaussian(n, radius, *a, center.clone())?)
        }
        FunctionSpec::ExpLinear { direction } => {
            Box::new(AnalyticFunction::exp_linear(n, radius, direction.clone())?)
        }
        FunctionSpec::FiniteMode { profiles } => {
            if let Some(m) = profiles.keys().find(|m| m.k > config.k_max) {
                return Err(ConfigError::field(
                    &format!("mode.{}.{}", m.k, m.ell),
                    "degree exceeds k_max",
                )
                .into());
            }
            Box::new(AnalyticFunction::finite_mode(n, radius, profiles.clone())?)
        }
        FunctionSpec::ExampleGeometric { c, all_ell } => Box::new(AnalyticFunction::finite_mode(
            n,
            radius,
            geometric_profiles(n, config.k_max, *c, *all_ell)?,
        )?),
        FunctionSpec::Sampled { path } => {
            let file = std::fs::File::open(path)
                .with_context(|| format!("opening samples {}", path.display()))?;
            Box::new(SampledFunction::from_csv(
                std::io::BufReader::new(file),
                t.rule(),
                radius,
            )?)
        }
    };
    Ok(f)
}

fn sphere_radii(config: &RunConfig) -> anyhow::Result<Vec<f64>> {
    if config.knots != KnotKind::Spheres {
        return Err(ConfigError::field("knots", "this command needs knots = spheres").into());
    }
    if !config.radii.is_empty() {
        return Ok(config.radii.clone());
    }
    if let FunctionSpec::Sampled { path } = &config.function {
        let t = transform(config)?;
        let file = std::fs::File::open(path)
            .with_context(|| format!("opening samples {}", path.display()))?;
        let radii =
            SampledFunction::from_csv(std::io::BufReader::new(file), t.rule(), config.radius)?
                .radii();
        if config.order_set && radii.len() != config.order {
            return Err(ConfigError::field(
                "samples_file",
                format!(
                    "{} sampled spheres for order {}; set radii explicitly",
                    radii.len(),
                    config.order
                ),
            )
            .into());
        }
        return Ok(radii);
    }
    Err(ConfigError::field("radii", "missing").into())
}

/// Synthetic traces for the geometric example, quadrature traces (with
/// rounding noise chopped) otherwise.
fn traces(
    config: &RunConfig,
    f: &dyn BallFunction,
    t: &SphereTransform,
    radii: &[f64],
) -> anyhow::Result<Vec<SphereTrace>> {
    if let FunctionSpec::ExampleGeometric { c, all_ell } = &config.function {
        let layout = ModeLayout::new(config.n, config.k_max)?;
        return radii
            .iter()
            .map(|&r| {
                let coeffs = layout
                    .modes()
                    .map(|m| {
                        if *all_ell || m.ell == 1 {
                            (c * r).powi(m.k as i32)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Ok(SphereTrace::from_coefficients(
                    r,
                    config.n,
                    config.k_max,
                    coeffs,
                )?)
            })
            .collect();
    }
    Ok(sphere_traces(f, radii, t)?
        .iter()
        .map(|tr| tr.chopped(TRACE_NOISE_FLOOR))
        .collect())
}

fn knot_rule(config: &RunConfig) -> KnotRule {
    match &config.rule {
        GeneralRule::Clustered => KnotRule::Clustered,
        GeneralRule::Equispaced => KnotRule::Equispaced,
        GeneralRule::List(r) => KnotRule::Fixed(r.clone()),
    }
}

/// Per-mode overrides from a CSV with header `k,ell,j,r`.
fn read_overrides(path: &Path) -> anyhow::Result<BTreeMap<ModeIndex, Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading knots file {}", path.display()))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .map(|(_, l)| l.split(',').map(str::trim).collect())
        .unwrap_or_default();
    if header != ["k", "ell", "j", "r"] {
        bail!(polyharm::Error::Parse(format!(
            "{}: header must be k,ell,j,r",
            path.display()
        )));
    }
    let mut by_mode: BTreeMap<ModeIndex, BTreeMap<usize, f64>> = BTreeMap::new();
    for (i, line) in lines {
        let bad = || {
            polyharm::Error::Parse(format!(
                "{} line {}: expected k,ell,j,r",
                path.display(),
                i + 1
            ))
        };
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let [k, ell, j, r] = cells[..] else {
            return Err(bad().into());
        };
        let mode = ModeIndex::new(
            k.parse().map_err(|_| bad())?,
            ell.parse().map_err(|_| bad())?,
        );
        let j: usize = j.parse().map_err(|_| bad())?;
        let r: f64 = r.parse().map_err(|_| bad())?;
        if by_mode.entry(mode).or_default().insert(j, r).is_some() {
            bail!(polyharm::Error::Parse(format!(
                "{} line {}: duplicate knot {j} of mode {mode}",
                path.display(),
                i + 1
            )));
        }
    }
    by_mode
        .into_iter()
        .map(|(mode, knots)| {
            if knots.keys().copied().ne(0..knots.len()) {
                bail!(polyharm::Error::Parse(format!(
                    "{}: knots of mode {mode} are not numbered 0..",
                    path.display()
                )));
            }
            Ok((mode, knots.into_values().collect()))
        })
        .collect()
}

fn general_knots(config: &RunConfig, order: usize) -> anyhow::Result<KnotSet> {
    let mut knots = KnotSet::general(knot_rule(config).radii(order, config.radius));
    if let Some(path) = &config.knots_file {
        for (mode, radii) in read_overrides(path)? {
            knots = knots.with_override(mode, radii)?;
        }
    }
    Ok(knots)
}

fn profile_options(config: &RunConfig) -> ProfileOptions {
    ProfileOptions {
        cheb_degree: config.n_cheb,
        ..ProfileOptions::default()
    }
}

fn probe_radii(config: &RunConfig) -> Vec<f64> {
    let radius = config.radius;
    let mut probes: Vec<f64> = match config.probe_count {
        0 => Vec::new(),
        1 => vec![radius],
        m => (0..m).map(|i| radius * i as f64 / (m - 1) as f64).collect(),
    };
    let mut rng = rand::rngs::StdRng::seed_from_u64(config.seed);
    probes.extend((0..config.random_probes).map(|_| rng.random_range(0.0..=radius)));
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    probes
}

enum Built {
    Spheres {
        h: PolyharmonicInterpolant,
        traces: Vec<SphereTrace>,
    },
    General {
        h: PolyharmonicInterpolant,
        profiles: Vec<RadialProfile>,
    },
}

fn interpolate(config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    config.check_basis_cap()?;
    let t = sink.timed("transform", || transform(config))?;
    let f = ball_function(config, &t)?;
    let built = sink.timed("interpolate", || -> anyhow::Result<Built> {
        Ok(match config.knots {
            KnotKind::Spheres => {
                let radii = sphere_radii(config)?;
                let traces = traces(config, f.as_ref(), &t, &radii)?;
                Built::Spheres {
                    h: interpolate_spheres(config.radius, &traces, &radii, config.k_max)?,
                    traces,
                }
            }
            KnotKind::General => {
                let profiles = radial_profiles(f.as_ref(), &t, &profile_options(config))?;
                let knots = general_knots(config, config.order)?;
                let h =
                    interpolate_general(config.n, &profiles, &knots, config.order, config.k_max)?;
                Built::General { h, profiles }
            }
        })
    })?;
    let h = match &built {
        Built::Spheres { h, .. } | Built::General { h, .. } => h,
    };
    sink.write("interpolant.json", &h.to_json())?;

    // Data condition in trace form, fitted side evaluated in the monomial basis.
    let mut residuals = Table::new(&["k", "ell", "j", "r", "data", "fitted", "abs_residual"]);
    let mut max_mode_residual = 0.0f64;
    for (idx, p) in h.modes().iter().enumerate() {
        let mode = p.mode();
        let radii = h.knots().radii_for(mode);
        for (j, &r) in radii.iter().enumerate() {
            let rk = r.powi(mode.k as i32);
            let data = match &built {
                Built::Spheres { traces, .. } => traces[j].coefficients()[idx],
                Built::General { profiles, .. } => profiles
                    .iter()
                    .find(|q| q.mode() == mode)
                    .map(|q| q.value(r * r) * rk)
                    .unwrap_or(0.0),
            };
            let fitted = rk * p.eval_monomial(r * r);
            let res = (data - fitted).abs();
            max_mode_residual = max_mode_residual.max(res);
            residuals.push(row![
                mode.k,
                mode.ell,
                j,
                float(r),
                float(data),
                float(fitted),
                float(res)
            ]);
        }
    }
    sink.table("residuals.csv", &residuals)?;

    let mut spheres = Table::new(&["j", "r", "max_abs_residual", "l2_error"]);
    let mut max_sphere_residual = 0.0f64;
    if let Built::Spheres { .. } = &built {
        for (j, &r) in h.knots().radii_for(ModeIndex::new(0, 1)).iter().enumerate() {
            let values = f.sphere_values(r, t.rule())?;
            let mut worst = 0.0f64;
            for (i, theta) in t.rule().nodes().enumerate() {
                worst = worst.max((h.evaluate(r, theta)? - values[i]).abs());
            }
            max_sphere_residual = max_sphere_residual.max(worst);
            let e = l2_error_on_sphere(f.as_ref(), h, r, &t)?;
            spheres.push(row![j, float(r), float(worst), float(e.direct)]);
        }
    }
    sink.table("sphere_residuals.csv", &spheres)?;

    let lap = sink.timed("laplacian", || radial_laplacian_power(h, h.order()));
    let mut table = Table::new(&["k", "ell", "max_abs_coefficient"]);
    for (mode, coeffs) in &lap.modes {
        table.push(row![
            mode.k,
            mode.ell,
            float(coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())))
        ]);
    }
    sink.table("laplacian.csv", &table)?;

    let mut summary = Table::new(&[
        "n",
        "order",
        "k_max",
        "radius",
        "knots",
        "max_mode_residual",
        "max_sphere_residual",
        "laplacian_power",
        "certificate",
    ]);
    let kind = if matches!(built, Built::Spheres { .. }) {
        "spheres"
    } else {
        "general"
    };
    summary.push(row![
        h.dimension(),
        h.order(),
        h.k_max(),
        float(h.radius()),
        kind,
        float(max_mode_residual),
        float(max_sphere_residual),
        lap.power,
        float(lap.certificate())
    ]);
    sink.table("interpolate_summary.csv", &summary)
}

fn report_t1(config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    config.check_basis_cap()?;
    if config.knots != KnotKind::General {
        return Err(ConfigError::field("knots", "report-t1 needs knots = general").into());
    }
    if config.knots_file.is_some() {
        return Err(ConfigError::field("knots_file", "report-t1 uses the knot rule only").into());
    }
    let t = sink.timed("transform", || transform(config))?;
    let f = ball_function(config, &t)?;
    let setup = Theorem1Setup {
        orders: config.orders.clone(),
        k_max: config.k_max,
        k_tail: config.k_tail,
        knots: knot_rule(config),
        probe_radii: probe_radii(config),
        profile: profile_options(config),
    };
    let sweep = sink.timed("sweep", || theorem1_sweep(f.as_ref(), &t, &setup))?;

    let mut summary = Table::new(&[
        "order",
        "radius",
        "seminorm",
        "k_tail",
        "product",
        "satisfied",
        "bound_shape",
        "max_error",
        "max_error_radius",
        "empirical_ratio",
    ]);
    let mut errors = Table::new(&["order", "r", "direct", "parseval"]);
    for r in &sweep.reports {
        summary.push(row![
            r.order,
            float(r.radius),
            float(r.seminorm),
            r.k_tail,
            float(r.product),
            r.satisfied,
            float(r.bound_shape),
            float(r.max_error),
            float(r.max_error_radius),
            float(r.empirical_ratio)
        ]);
        for e in &r.measured_errors {
            errors.push(row![
                r.order,
                float(e.radius),
                float(e.direct),
                float(e.parseval)
            ]);
        }
    }
    sink.table("theorem1_summary.csv", &summary)?;
    sink.table("theorem1_errors.csv", &errors)?;
    let mut overall = Table::new(&["orders", "errors_non_increasing", "ratio_spread"]);
    let orders: Vec<String> = config.orders.iter().map(usize::to_string).collect();
    overall.push(row![
        orders.join(" "),
        sweep.errors_non_increasing,
        float(sweep.ratio_spread)
    ]);
    sink.table("theorem1_sweep.csv", &overall)
}

fn report_t2(config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    config.check_basis_cap()?;
    let t = sink.timed("transform", || transform(config))?;
    let f = ball_function(config, &t)?;
    let radii = sphere_radii(config)?;
    let traces = sink.timed("traces", || traces(config, f.as_ref(), &t, &radii))?;
    let report = sink.timed("decay", || {
        check_theorem2(config.radius, &traces, &radii, &DecayOptions::default())
    })?;

    let mut spheres = Table::new(&[
        "j",
        "r",
        "eta",
        "k_const",
        "residual",
        "k_lo",
        "k_hi",
        "terminating",
        "ratio",
    ]);
    for (j, s) in report.spheres.iter().enumerate() {
        spheres.push(row![
            j,
            float(s.radius),
            float(s.decay.eta),
            float(s.decay.k_const),
            float(s.decay.residual),
            s.decay.k_range.0,
            s.decay.k_range.1,
            s.decay.is_terminating(),
            float(s.ratio)
        ]);
    }
    sink.table("theorem2_spheres.csv", &spheres)?;

    let mut sums = Table::new(&["K", "partial_sum", "increment"]);
    let mut prev = 0.0;
    for (k, &s) in report.partial_sums.iter().enumerate() {
        sums.push(row![k, float(s), float(s - prev)]);
        prev = s;
    }
    sink.table("theorem2_partial_sums.csv", &sums)?;

    let mut summary = Table::new(&[
        "radius",
        "max_ratio",
        "product",
        "satisfied",
        "delta",
        "tail_ratio",
    ]);
    summary.push(row![
        float(report.radius),
        float(report.max_ratio),
        float(report.product),
        report.satisfied,
        float(report.delta),
        opt_float(report.tail_ratio)
    ]);
    sink.table("theorem2_summary.csv", &summary)?;

    let h = interpolate_spheres(config.radius, &traces, &radii, config.k_max)?;
    let mut errors = Table::new(&["r", "direct", "parseval"]);
    for r in probe_radii(config) {
        let e = l2_error_on_sphere(f.as_ref(), &h, r, &t)?;
        errors.push(row![float(r), float(e.direct), float(e.parseval)]);
    }
    let norm = l2_norm_ball(&h, config.jacobian);
    let mut ball = Table::new(&["jacobian", "norm_squared"]);
    ball.push(row![norm.jacobian, float(norm.total)]);
    sink.table("theorem2_errors.csv", &errors)?;
    sink.table("theorem2_ball_norm.csv", &ball)
}

fn diverge(config: &RunConfig, sink: &mut Sink) -> anyhow::Result<()> {
    config.check_degree_cap(DIVERGENCE_MAX_DEGREE)?;
    let FunctionSpec::ExampleGeometric { c, all_ell } = config.function else {
        return Err(
            ConfigError::field("function", "diverge needs function = example-geometric").into(),
        );
    };
    let radii = sphere_radii(config)?;
    let demo = sink.timed("divergence", || {
        divergence_demo(c, config.radius, config.n, &radii, config.k_max, all_ell)
    })?;
    let mut table = Table::new(&[
        "K",
        "mode_integral",
        "mode_closed_form",
        "closed_form_term",
        "expected_increment",
        "increment",
        "partial_sum",
    ]);
    for k in 0..=demo.k_max {
        table.push(row![
            k,
            float(demo.mode_integrals[k]),
            float(demo.mode_closed_form[k]),
            float(demo.closed_form_terms[k]),
            float(demo.expected_increments[k]),
            float(demo.increments[k]),
            float(demo.partial_sums[k])
        ]);
    }
    sink.table("divergence.csv", &table)?;
    let mut summary = Table::new(&[
        "c",
        "radius",
        "c_times_r",
        "n",
        "order",
        "k_max",
        "all_ell",
        "max_integral_deviation",
        "max_increment_deviation",
        "increasing_from",
        "tail_ratio",
        "verdict",
    ]);
    summary.push(row![
        float(demo.c),
        float(demo.radius),
        float(demo.c * demo.radius),
        demo.n,
        demo.order(),
        demo.k_max,
        demo.all_ell,
        float(demo.max_integral_deviation),
        float(demo.max_increment_deviation),
        demo.increasing_from
            .map(|k| k.to_string())
            .unwrap_or_default(),
        opt_float(demo.tail_ratio),
        demo.verdict
    ]);
    sink.table("divergence_summary.csv", &summary)
}
