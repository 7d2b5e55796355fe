use std::path::Path;

use reebflow_core::dynamics::{
    self, fmt17, integrate_with, orbit_csv, torus_drift, Classification, OrbitEnd, OrbitOptions,
    SearchSettings,
};
use reebflow_core::phase::PhasePoint;
use reebflow_core::quadratic::{check_lemma_l, eigen_asymptotics, hausdorff_e_to_j};
use reebflow_core::scenario::{ModelFile, ScenarioConfig};
use reebflow_core::verify::{run_suite, VerifyPlan};
use reebflow_core::Error;
use serde::Serialize;

use crate::output::write_atomic;
use crate::{IntegrateArgs, SearchArgs};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SEARCH: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match &error {
            Error::NoBracket(_) => EXIT_SEARCH,
            Error::MarginNegative { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::SearchExhausted { .. }
            | Error::ShellViolation { .. }
            | Error::InvarianceViolation { .. }
            | Error::MonotonicityViolation { .. }
            | Error::StepLimit { .. }
            | Error::StepUnderflow { .. } => EXIT_FAIL,
            _ => EXIT_CONFIG,
        };
        Self { code, error }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CmdResult = Result<u8, Failure>;

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    write_atomic(path, contents)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn build(scenario: &Path, out: &Path) -> CmdResult {
    let cfg = ScenarioConfig::load(scenario)?;
    let m = cfg.build()?;
    let file = ModelFile::new(&cfg, &m);
    write(out, &to_json(&file))?;
    println!(
        "b = {}  z_max = {}  r_max = {}  certified = {}",
        file.model.b, file.model.support.z_max, file.model.support.r_max, file.certified
    );
    println!("model hash {}", file.model_hash);
    Ok(if file.certified { EXIT_PASS } else { EXIT_FAIL })
}

pub fn verify(scenario: &Path, report: &Path, samples: usize, seed: Option<u64>) -> CmdResult {
    let cfg = ScenarioConfig::load(scenario)?;
    let seed = seed.unwrap_or(cfg.seed);
    let rep = run_suite(&cfg, seed, &VerifyPlan::with_samples(samples))?;
    write(report, &rep.to_json())?;
    for c in &rep.checks {
        println!(
            "{:<4} {:<20} worst = {:.6e}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.worst
        );
    }
    Ok(if rep.pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn integrate(args: &IntegrateArgs) -> CmdResult {
    let cfg = ScenarioConfig::load(&args.scenario)?;
    let m = cfg.build()?;
    let n = m.n();
    let x0 = match (&args.x0, &args.on_torus) {
        (Some(x), None) => PhasePoint::new(x.clone())?,
        (None, Some(theta)) => {
            if theta.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: theta.len(),
                }
                .into());
            }
            PhasePoint::from_polar(&vec![1.0; n], theta, 0.0)
        }
        _ => {
            return Err(Error::ConstraintViolation(
                "exactly one of --x0 and --on-torus is required".into(),
            )
            .into())
        }
    };
    if x0.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.n(),
        }
        .into());
    }
    let mut icfg = cfg.integrator;
    icfg.rtol = args.rtol.unwrap_or(icfg.rtol);
    icfg.atol = args.atol.unwrap_or(icfg.atol);
    icfg.validate()?;
    let samples = match args.dt {
        Some(dt) => Some(sample_times(args.t, dt)?),
        None => None,
    };
    let opts = OrbitOptions {
        samples,
        ..OrbitOptions::default()
    };
    let trace = integrate_with(&m, &x0, args.t, &icfg, &opts)?;
    write(&args.out, &orbit_csv(&m, &trace))?;
    let last = trace.last();
    println!(
        "{} states, {} accepted / {} rejected steps, final z = {}",
        trace.len(),
        trace.stats.accepted,
        trace.stats.rejected,
        fmt17(last.z())
    );
    if args.on_torus.is_some() {
        let (dr, dz) = torus_drift(&m, &x0.angles(), args.t, &icfg)?;
        println!("torus drift: max|r-1| = {dr:.3e}, max|z| = {dz:.3e}");
    }
    Ok(EXIT_PASS)
}

fn sample_times(t_end: f64, dt: f64) -> Result<Vec<f64>, Failure> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::ConstraintViolation(format!("--dt must be positive (got {dt})")).into());
    }
    let steps = (t_end.abs() / dt).floor() as usize;
    let sign = t_end.signum();
    let mut ts: Vec<f64> = (0..=steps).map(|i| sign * i as f64 * dt).collect();
    if ts.last().is_some_and(|&t| t != t_end) {
        ts.push(t_end);
    }
    Ok(ts)
}

#[derive(Serialize)]
struct SearchSummary<'a> {
    s_star: f64,
    bracket: (f64, f64),
    width: f64,
    bisections: usize,
    x0: &'a [f64],
    settings: &'a SearchSettings,
    forward_class: &'a Classification,
    forward_end: &'a OrbitEnd,
    forward_steps: usize,
    backward_class: &'a Classification,
    backward_end: &'a OrbitEnd,
    backward_steps: usize,
}

pub fn search_trapped(args: &SearchArgs) -> CmdResult {
    let cfg = ScenarioConfig::load(&args.scenario)?;
    let m = cfg.build()?;
    let mut settings = SearchSettings::new(m.n());
    settings.integrator = cfg.integrator;
    settings.family.s_min = args.zmin;
    settings.family.s_max = args.zmax;
    settings.t_fwd = args.tfwd;
    settings.t_bwd = args.tbwd;
    if let Some(r) = args.radius {
        settings.family.radius = r;
    }
    if let Some(theta) = &args.theta {
        settings.family.theta = theta.clone();
    }
    if !(args.zmin < args.zmax && args.zmax < 0.0) {
        return Err(Error::ConstraintViolation(format!(
            "need zmin < zmax < 0 (got {} and {})",
            args.zmin, args.zmax
        ))
        .into());
    }
    let cand = dynamics::search_trapped(&m, &settings)?;
    let prefix = &args.out;
    write(
        Path::new(&format!("{prefix}_forward.csv")),
        &orbit_csv(&m, &cand.forward),
    )?;
    write(
        Path::new(&format!("{prefix}_backward.csv")),
        &orbit_csv(&m, &cand.backward),
    )?;
    let x0 = settings.family.point(cand.s);
    let summary = SearchSummary {
        s_star: cand.s,
        bracket: cand.bracket,
        width: cand.width(),
        bisections: cand.bisections,
        x0: x0.coords(),
        settings: &settings,
        forward_class: &cand.forward_class,
        forward_end: &cand.forward.end,
        forward_steps: cand.forward.stats.accepted,
        backward_class: &cand.backward_class,
        backward_end: &cand.backward.end,
        backward_steps: cand.backward.stats.accepted,
    };
    write(
        Path::new(&format!("{prefix}_summary.json")),
        &to_json(&summary),
    )?;
    println!(
        "s* = {}  width = {:.3e}  forward: {:?}  backward: {:?}",
        fmt17(cand.s),
        cand.width(),
        cand.forward_class,
        cand.backward_class
    );
    Ok(if cand.forward_class.stays() {
        EXIT_PASS
    } else {
        EXIT_SEARCH
    })
}

pub fn diagnostics(scenario: &Path, prefix: &str) -> CmdResult {
    let cfg = ScenarioConfig::load(scenario)?;
    let m = cfg.build()?;
    let k = m.field();
    let n = m.n();
    let theta = m.certificate().min_eig_theta.clone();
    let grids = m.grids();
    let b_list: Vec<f64> = (0..=12).map(|i| 10f64.powf(i as f64 / 4.0)).collect();

    let mut eig = String::from("b");
    eig.extend((1..=n).map(|i| format!(",eig{i}")));
    eig.extend((2..=n).map(|i| format!(",ratio{i}")));
    eig.push_str(",angle\n");
    for s in eigen_asymptotics(&b_list, k, &theta) {
        let mut row = vec![fmt17(s.b)];
        row.extend(s.eigenvalues.iter().map(|v| fmt17(*v)));
        row.extend(s.ratios.iter().map(|v| fmt17(*v)));
        row.push(fmt17(s.angle));
        eig.push_str(&row.join(","));
        eig.push('\n');
    }
    write(Path::new(&format!("{prefix}_eigen.csv")), &eig)?;

    let mut haus = String::from("b,hausdorff\n");
    for &b in &b_list {
        let d = hausdorff_e_to_j(b, 1.0, k, &theta, 4096)?;
        haus.push_str(&format!("{},{}\n", fmt17(b), fmt17(d)));
    }
    write(Path::new(&format!("{prefix}_hausdorff.csv")), &haus)?;

    let mut margin = String::from("b,margin\n");
    for b in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0, 8.0, 16.0] {
        let cert = check_lemma_l(b, m.c(), k, grids.per_axis, grids.r_grid)?;
        margin.push_str(&format!("{},{}\n", fmt17(b), fmt17(cert.margin)));
    }
    write(Path::new(&format!("{prefix}_margin.csv")), &margin)?;

    let g = m.g();
    let ramp = g.ramp();
    let (u0, u1) = (ramp.start - 1.0, ramp.start + ramp.width + 1.0);
    let mut gcsv = String::from("t,G,dG\n");
    for i in 0..=400 {
        let t = (u0 + (u1 - u0) * i as f64 / 400.0).exp();
        let (v, d) = g.value_and_derivative(t);
        gcsv.push_str(&format!("{},{},{}\n", fmt17(t), fmt17(v), fmt17(d)));
    }
    write(Path::new(&format!("{prefix}_g.csv")), &gcsv)?;

    let rho = m.rho();
    let mut rcsv = String::from("r,rho,drho\n");
    for i in 0..=300 {
        let r = i as f64 / 300.0;
        rcsv.push_str(&format!(
            "{},{},{}\n",
            fmt17(r),
            fmt17(rho.value(r)),
            fmt17(rho.derivative(r))
        ));
    }
    write(Path::new(&format!("{prefix}_rho.csv")), &rcsv)?;
    println!("wrote {prefix}_{{eigen,hausdorff,margin,g,rho}}.csv");
    Ok(EXIT_PASS)
}
