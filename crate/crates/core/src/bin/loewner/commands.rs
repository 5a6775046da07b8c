use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use loewner::deterministic::{
    boundary_image, classify_semigroup, evolve_phi, find_fixed_point, is_closed_trajectory, EvolutionConfig,
    SemigroupKind,
};
use loewner::geometry::closed_polyline_self_intersection;
use loewner::stochastic::{
    evolve_phi_pathwise, evolve_psi_sde, growth_bounds, map_paths, psi_from_phi, sample_brownian,
    sample_brownian_until, simulate_boundary_diffusion, solve_moment_hierarchy, BrownianPath, MomentRequest,
    ALGORITHM_ID,
};
use loewner::trajectory::{uniform_times, DISK_SLACK};
use loewner::{HerglotzSpec, Trajectory};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::svg::DiskPlot;
use crate::{
    write_output, BoundaryArgs, BoundsArgs, ClassifyArgs, CliError, CliResult, EvolveArgs, Figure, FiguresArgs, Mode,
    MomentsArgs, RunOutcome, SeedInfo,
};

/// Slack on the growth bounds for integration error.
const BOUND_TOL: f64 = 1e-9;
/// `|φ_T(z) − z|` allowed for a closed orbit after one period.
const CLOSURE_TOL: f64 = 1e-5;

fn emit(out: Option<&Path>, text: &str, outputs: &mut Vec<PathBuf>) -> CliResult<()> {
    match out {
        Some(p) => write_output(p, text, outputs),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn brownian(seed: u64, dt: f64, t_end: f64) -> CliResult<BrownianPath> {
    if t_end == 0.0 {
        return Ok(sample_brownian(seed, dt, 0)?);
    }
    Ok(sample_brownian_until(seed, dt, t_end)?)
}

fn seed_info(seed: u64) -> Option<SeedInfo> {
    Some(SeedInfo { seed, algorithm_id: ALGORITHM_ID })
}

fn check_in_disk(what: &str, points: &[Complex64]) -> CliResult<()> {
    match points.iter().position(|z| !(z.norm() <= 1.0 + DISK_SLACK)) {
        Some(j) => Err(CliError::Invariant(format!("{what}: sample {j} has |z| = {}", points[j].norm()))),
        None => Ok(()),
    }
}

fn trajectory_plot(title: &str, traj: &Trajectory, tau: Complex64) -> String {
    let mut plot = DiskPlot::new(title);
    plot.curve(&traj.values, false, "#1f4e9c");
    plot.marker(traj.values[0], "#2a8f3a", "start");
    plot.marker(tau, "#c0392b", "tau");
    plot.finish()
}

pub fn evolve(a: &EvolveArgs) -> CliResult<RunOutcome> {
    if !(a.t_end >= 0.0) || !a.t_end.is_finite() {
        return Err(CliError::Usage(format!("--t-end must be finite and >= 0, got {}", a.t_end)));
    }
    if !(a.dt > 0.0) {
        return Err(CliError::Usage(format!("--dt must be > 0, got {}", a.dt)));
    }
    let z0 = a.z0.0;
    let (traj, tau, seed) = match a.mode {
        Mode::Det => {
            let dt = if a.t_end > 0.0 { a.dt.min(a.t_end) } else { a.dt };
            let cfg = EvolutionConfig::new(a.k, a.t_end, dt);
            let times = uniform_times(a.t_end, a.dt);
            let traj = evolve_phi(&a.spec, &cfg, z0, &times[1..])?;
            (traj, Complex64::from_polar(1.0, a.k * a.t_end), None)
        }
        Mode::Random => {
            let path = brownian(a.seed, a.dt, a.t_end)?;
            let traj = evolve_phi_pathwise(&a.spec, a.k, z0, &path, &[])?;
            let tau = Complex64::from_polar(1.0, a.k * path.values[path.n_steps()]);
            (traj, tau, seed_info(a.seed))
        }
        Mode::Sde => {
            let path = brownian(a.seed, a.dt, a.t_end)?;
            let traj = evolve_psi_sde(&a.spec, a.k, z0, &path, a.scheme.into())?;
            // τ sits at 1 in the rotating frame
            (traj, Complex64::new(1.0, 0.0), seed_info(a.seed))
        }
    };
    check_in_disk("trajectory", &traj.values)?;
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &traj.to_csv(), &mut outputs)?;
    if let Some(svg) = &a.svg {
        let title = format!("{} k={} mode={:?}", a.spec, a.k, a.mode);
        write_output(svg, &trajectory_plot(&title, &traj, tau), &mut outputs)?;
    }
    Ok(RunOutcome { seed, outputs, default_manifest: None })
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re + 0.0, "im": z.im + 0.0 })
}

/// Integral-valued discriminants print without a fractional part.
fn number_json(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        json!(x as i64)
    } else {
        json!(x)
    }
}

pub fn classify(a: &ClassifyArgs) -> CliResult<RunOutcome> {
    let params = match (a.a, a.b, &a.spec) {
        (Some(x), Some(y), _) => Some((x, y)),
        (_, _, Some(spec)) => spec.automorphism_parameters(),
        _ => return Err(CliError::Usage("give --A and --B, or --spec".into())),
    };
    let mut out = Map::new();
    match params {
        Some((x, y)) => {
            let class = classify_semigroup(x, y, a.k)?;
            out.insert("kind".into(), json!(class.kind.as_str()));
            out.insert("D".into(), number_json(class.discriminant));
            if let Some(fp) = class.fixed_point {
                out.insert("fixed_point".into(), complex_json(fp));
            }
            if a.closed_check {
                if class.kind != SemigroupKind::Elliptic {
                    out.insert("closed".into(), Value::Null);
                    out.insert(
                        "reason".into(),
                        json!(format!("{} semigroups have no closed orbits", class.kind.as_str())),
                    );
                } else if a.k == 0.0 {
                    out.insert("closed".into(), Value::Null);
                    out.insert("reason".into(), json!("k = 0: the rotation ratio is undefined"));
                } else {
                    let orbit = is_closed_trajectory(x, y, a.k, a.max_den)?;
                    out.insert("closed".into(), json!(orbit.closed));
                    match orbit.fraction {
                        Some(f) => out.insert("ratio".into(), json!(format!("{}/{}", f.numerator, f.denominator))),
                        None => out.insert("ratio".into(), Value::Null),
                    };
                    out.insert("ratio_value".into(), json!(orbit.ratio));
                    if let Some(period) = orbit.period {
                        out.insert("period".into(), json!(period));
                    }
                }
            }
        }
        None => {
            let spec = a.spec.as_ref().expect("spec present when no automorphism data");
            let fp = find_fixed_point(spec, a.k);
            out.insert("kind".into(), json!(if fp.is_some() { "elliptic" } else { "non-elliptic" }));
            if let Some(fp) = fp {
                out.insert("fixed_point".into(), complex_json(fp));
            }
            if a.closed_check {
                out.insert("closed".into(), Value::Null);
                out.insert("reason".into(), json!("closed-orbit test needs automorphism data (A, B)"));
            }
        }
    }
    println!("{}", Value::Object(out));
    Ok(RunOutcome { seed: None, outputs: Vec::new(), default_manifest: None })
}

pub fn moments(a: &MomentsArgs) -> CliResult<RunOutcome> {
    if !(a.dt > 0.0) {
        return Err(CliError::Usage(format!("--dt must be > 0, got {}", a.dt)));
    }
    let req = MomentRequest {
        k: a.k,
        z: a.z0.0,
        t_end: a.t_end,
        orders: a.m,
        truncation: a.truncation,
        closure: a.closure.into(),
    };
    let times = uniform_times(a.t_end, a.dt);
    let table = solve_moment_hierarchy(&a.spec, &req, &times)?;
    for (t, row) in table.times.iter().zip(&table.values) {
        if let Some((m, v)) = table.orders.iter().zip(row).find(|(_, v)| !(v.norm() <= 1.0 + 1e-6)) {
            return Err(CliError::Invariant(format!("|mu_{m}({t})| = {} exceeds 1", v.norm())));
        }
    }
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &table.to_csv(), &mut outputs)?;
    Ok(RunOutcome { seed: None, outputs, default_manifest: None })
}

pub fn bounds(a: &BoundsArgs) -> CliResult<RunOutcome> {
    let (lower, upper) = growth_bounds(a.spec, a.r0, a.t)?;
    let mut max_violation = 0.0f64;
    if a.paths > 0 {
        if !(a.t > 0.0) {
            return Err(CliError::Usage("--paths needs --t > 0".into()));
        }
        let spec = a.spec.herglotz();
        let z0 = Complex64::from_polar(a.r0, a.theta0);
        let worst = map_paths(a.paths, a.seed, |_, seed| {
            let path = sample_brownian_until(seed, a.dt, a.t)?;
            let traj = evolve_phi_pathwise(&spec, a.k, z0, &path, &[])?;
            let mut worst = 0.0f64;
            for (&t, z) in traj.times.iter().zip(&traj.values) {
                let (lo, hi) = growth_bounds(a.spec, a.r0, t.min(a.t))?;
                let r = z.norm();
                worst = worst.max(lo - r).max(r - hi);
            }
            Ok(worst)
        })?;
        max_violation = worst.into_iter().fold(0.0, f64::max);
    }
    let report = json!({
        "spec": a.spec.as_str(),
        "r0": a.r0,
        "t": a.t,
        "lower": lower,
        "upper": upper,
        "paths_checked": a.paths,
        "max_violation": max_violation,
    });
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &format!("{report}\n"), &mut outputs)?;
    if max_violation > BOUND_TOL {
        return Err(CliError::Invariant(format!("growth bound exceeded by {max_violation:e}")));
    }
    Ok(RunOutcome { seed: (a.paths > 0).then(|| seed_info(a.seed)).flatten(), outputs, default_manifest: None })
}

pub fn boundary(a: &BoundaryArgs) -> CliResult<RunOutcome> {
    if !(a.t_end >= 0.0) {
        return Err(CliError::Usage(format!("--t-end must be >= 0, got {}", a.t_end)));
    }
    let path = brownian(a.seed, a.dt, a.t_end)?;
    let theta = simulate_boundary_diffusion(a.a, a.b, a.k, a.theta0, &path)?;
    if let Some(j) = theta.iter().position(|x| !x.is_finite()) {
        return Err(CliError::Numerical(format!("boundary diffusion diverged at t = {}", path.time(j))));
    }
    let mut csv = String::from("t,B,theta\n");
    for (j, th) in theta.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{th}", path.time(j), path.values[j]);
    }
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &csv, &mut outputs)?;
    Ok(RunOutcome { seed: seed_info(a.seed), outputs, default_manifest: None })
}

/// Violations found while drawing figures; all panels are still written.
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn disk(&mut self, what: &str, points: &[Complex64]) {
        if let Err(CliError::Invariant(m)) = check_in_disk(what, points) {
            self.0.push(m);
        }
    }
}

fn fig1(a: &FiguresArgs, outputs: &mut Vec<PathBuf>, checks: &mut Checks) -> CliResult<()> {
    let spec = HerglotzSpec::Exponential;
    let k = 1.0;
    for (name, t) in [("pi_over_4", PI / 4.0), ("pi_over_2", PI / 2.0), ("3pi_over_4", 3.0 * PI / 4.0)] {
        let image = boundary_image(&spec, k, t, a.n_points)?;
        let what = format!("fig1 t={t}");
        checks.require(image.points.iter().all(|z| z.norm() < 1.0), || format!("{what}: curve touches the circle"));
        if let Some((i, j)) = closed_polyline_self_intersection(&image.points) {
            checks.0.push(format!("{what}: edges {i} and {j} cross"));
        }
        let mut csv = String::from("j,re,im\n");
        for (j, z) in image.points.iter().enumerate() {
            let _ = writeln!(csv, "{j},{},{}", z.re, z.im);
        }
        write_output(&a.out_dir.join(format!("fig1_{name}.csv")), &csv, outputs)?;
        let mut plot = DiskPlot::new(&format!("phi_t(D), p(w) = exp(pi w/2), k = 1, t = {t}"));
        plot.curve(&image.points, true, "#1f4e9c");
        plot.marker(image.tau, "#c0392b", "tau");
        write_output(&a.out_dir.join(format!("fig1_{name}.svg")), &plot.finish(), outputs)?;
    }
    Ok(())
}

fn closed_orbit_figure(
    a: &FiguresArgs,
    name: &str,
    spec: HerglotzSpec,
    k: f64,
    outputs: &mut Vec<PathBuf>,
    checks: &mut Checks,
) -> CliResult<()> {
    let (x, y) = spec.automorphism_parameters().expect("automorphism spec");
    let orbit = is_closed_trajectory(x, y, k, 64)?;
    let Some(period) = orbit.period else {
        checks.0.push(format!("{name}: orbit is not closed"));
        return Ok(());
    };
    let dt = 0.01;
    let cfg = EvolutionConfig::new(k, period, dt);
    let times = uniform_times(period, dt);
    let traj = evolve_phi(&spec, &cfg, Complex64::new(0.0, 0.0), &times[1..])?;
    let gap = (traj.values[traj.len() - 1] - traj.values[0]).norm();
    checks.require(gap <= CLOSURE_TOL, || format!("{name}: orbit misses its start by {gap:e}"));
    checks.disk(name, &traj.values);
    write_output(&a.out_dir.join(format!("{name}.csv")), &traj.to_csv(), outputs)?;
    let title = format!("phi_t(0), p = {spec}, k = {k}, period {period}");
    let svg = trajectory_plot(&title, &traj, Complex64::from_polar(1.0, k * period));
    write_output(&a.out_dir.join(format!("{name}.svg")), &svg, outputs)
}

#[allow(clippy::too_many_arguments)]
fn random_figure(
    a: &FiguresArgs,
    name: &str,
    spec: HerglotzSpec,
    k: f64,
    t_end: f64,
    rotated: bool,
    outputs: &mut Vec<PathBuf>,
    checks: &mut Checks,
) -> CliResult<()> {
    let path = sample_brownian_until(a.seed, 1e-3, t_end)?;
    let phi = evolve_phi_pathwise(&spec, k, Complex64::new(0.0, 0.0), &path, &[])?;
    let (traj, tau) = if rotated {
        (psi_from_phi(&phi, k, &path)?, Complex64::new(1.0, 0.0))
    } else {
        let tau = Complex64::from_polar(1.0, k * path.values[path.n_steps()]);
        (phi, tau)
    };
    checks.disk(name, &traj.values);
    write_output(&a.out_dir.join(format!("{name}.csv")), &traj.to_csv(), outputs)?;
    let frame = if rotated { "Psi" } else { "phi" };
    let title = format!("{frame}_t(0), p = {spec}, k = {k}, t <= {t_end}, seed {}", a.seed);
    write_output(&a.out_dir.join(format!("{name}.svg")), &trajectory_plot(&title, &traj, tau), outputs)
}

pub fn figures(a: &FiguresArgs) -> CliResult<RunOutcome> {
    if a.n_points < 16 {
        return Err(CliError::Usage(format!("--n-points must be >= 16, got {}", a.n_points)));
    }
    let mut outputs = Vec::new();
    let mut checks = Checks(Vec::new());
    let want = |f: Figure| a.which == f || a.which == Figure::All;
    if want(Figure::Fig1) {
        fig1(a, &mut outputs, &mut checks)?;
    }
    if want(Figure::Fig2) {
        closed_orbit_figure(a, "fig2", HerglotzSpec::Cayley, 2.5, &mut outputs, &mut checks)?;
    }
    if want(Figure::Fig3) {
        closed_orbit_figure(a, "fig3", HerglotzSpec::ConstantImaginary, 0.5, &mut outputs, &mut checks)?;
    }
    if want(Figure::Fig4) {
        random_figure(a, "fig4", HerglotzSpec::Cayley, 5.0, 30.0, false, &mut outputs, &mut checks)?;
    }
    if want(Figure::Fig5) {
        random_figure(a, "fig5", HerglotzSpec::ConstantImaginary, 1.0, 2.0, true, &mut outputs, &mut checks)?;
    }
    if !checks.0.is_empty() {
        return Err(CliError::Invariant(checks.0.join("; ")));
    }
    let stochastic = want(Figure::Fig4) || want(Figure::Fig5);
    Ok(RunOutcome {
        seed: stochastic.then(|| seed_info(a.seed)).flatten(),
        outputs,
        default_manifest: Some(a.out_dir.join("manifest.json")),
    })
}
