//! Orbits of the Reeb flow: integration, drift off the invariant set,
//! monotonicity of `z`, escape classification and the shooting search for
//! an orbit that stays bounded in forward time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{dz_rate, reeb_rhs};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::ode::{solve, IntegratorConfig, Output, StepStats, Termination};
use crate::phase::PhasePoint;

/// Radius of the ball a backward orbit must leave to count as unbounded.
pub const ESCAPE_RADIUS: f64 = 50.0;

/// Widest final bracket the shooting search may report.
pub const BISECTION_WIDTH: f64 = 1e-9;

/// Why an orbit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum OrbitEnd {
    Horizon,
    Escaped {
        radius: f64,
        t: f64,
    },
    /// `z` reached zero; used by the shooting predicate.
    CrossedZ {
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub stats: StepStats,
    pub end: OrbitEnd,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &PhasePoint {
        self.states.last().expect("trace holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trace holds the initial time")
    }
}

/// Optional behaviour of [`integrate_with`].
#[derive(Debug, Clone, Default)]
pub struct OrbitOptions {
    /// Dense output at these times instead of every accepted step.
    pub samples: Option<Vec<f64>>,
    /// Stop when the Euclidean norm of the state exceeds this radius.
    pub escape_radius: Option<f64>,
    /// Stop when `z` becomes positive.
    pub stop_at_z_zero: bool,
}

/// Integrates the Reeb flow from `x0` at time 0 to `t_end` (which may be negative).
pub fn integrate(
    m: &HamiltonianModel,
    x0: &PhasePoint,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<OrbitTrace> {
    integrate_with(m, x0, t_end, cfg, &OrbitOptions::default())
}

pub fn integrate_with(
    m: &HamiltonianModel,
    x0: &PhasePoint,
    t_end: f64,
    cfg: &IntegratorConfig,
    opts: &OrbitOptions,
) -> Result<OrbitTrace> {
    if !t_end.is_finite() {
        return Err(Error::Domain(format!(
            "time span must be finite (got {t_end})"
        )));
    }
    if x0.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: x0.n(),
        });
    }
    let rhs = |_t: f64, y: &[f64], out: &mut [f64]| reeb_rhs(m, y, out);
    let zi = 2 * m.n();
    let radius = opts.escape_radius;
    let z_stop = opts.stop_at_z_zero;
    let stop = move |y: &[f64]| -> f64 {
        let mut g = f64::NEG_INFINITY;
        if let Some(r) = radius {
            g = g.max(y.iter().map(|v| v * v).sum::<f64>().sqrt() - r);
        }
        if z_stop {
            g = g.max(y[zi]);
        }
        g
    };
    let use_stop = radius.is_some() || z_stop;
    let output = match &opts.samples {
        Some(ts) => Output::At(ts),
        None => Output::Steps,
    };
    let sol = solve(
        rhs,
        0.0,
        x0.coords(),
        t_end,
        cfg,
        output,
        if use_stop { Some(&stop) } else { None },
    )?;
    let end = match sol.termination {
        Termination::Horizon => OrbitEnd::Horizon,
        Termination::Stopped(t) => {
            let last = sol.states.last().expect("stopped run stores the crossing");
            match radius {
                Some(r) if !z_stop || norm(last) - r >= last[zi] => {
                    OrbitEnd::Escaped { radius: r, t }
                }
                _ => OrbitEnd::CrossedZ { t },
            }
        }
    };
    let states = sol
        .states
        .into_iter()
        .map(|s| PhasePoint::new(s).expect("odd state length"))
        .collect();
    Ok(OrbitTrace {
        times: sol.times,
        states,
        stats: sol.stats,
        end,
    })
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Worst `max_j |r_j − 1|` and `|z|` along the orbit of `(r = 1, θ0, z = 0)`.
pub fn torus_drift(
    m: &HamiltonianModel,
    theta0: &[f64],
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    let n = m.n();
    if theta0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta0.len(),
        });
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let x0 = PhasePoint::from_polar(&vec![1.0; n], theta0, 0.0);
    let trace = integrate(m, &x0, t, cfg)?;
    Ok(trace.states.iter().fold((0.0f64, 0.0f64), |(dr, dz), p| {
        let worst_r = (0..n).map(|j| (p.r(j) - 1.0).abs()).fold(0.0, f64::max);
        (dr.max(worst_r), dz.max(p.z().abs()))
    }))
}

/// Outcome of [`z_monotonicity_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Number of states farther than `ε` from the invariant set.
    pub checked: usize,
    /// Smallest `dz(X)` among them (`+∞` when none were checked).
    pub worst_rate: f64,
    pub witness: Option<Vec<f64>>,
}

/// Asserts `dz(X) > 0` at every stored state farther than `eps` from `𝒜 × {0}`.
pub fn z_monotonicity_check(
    trace: &OrbitTrace,
    m: &HamiltonianModel,
    eps: f64,
) -> Result<MonotonicityReport> {
    if trace.is_empty() {
        return Err(Error::Domain("empty orbit trace".into()));
    }
    let mut report = MonotonicityReport {
        checked: 0,
        worst_rate: f64::INFINITY,
        witness: None,
    };
    for p in &trace.states {
        if m.distance_to_set(p) <= eps {
            continue;
        }
        report.checked += 1;
        let rate = dz_rate(m, p);
        if rate < report.worst_rate {
            report.worst_rate = rate;
            report.witness = Some(p.coords().to_vec());
        }
    }
    if report.worst_rate <= 0.0 {
        return Err(Error::MonotonicityViolation {
            rate: report.worst_rate,
            witness: report.witness.unwrap_or_default(),
        });
    }
    Ok(report)
}

/// Region used to decide escape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// `r_min ≤ r_j ≤ r_max` for all `j` and `|z| ≤ z_max`.
    Box { r_min: f64, r_max: f64, z_max: f64 },
    /// Euclidean ball about the origin.
    Ball { radius: f64 },
}

impl Region {
    /// Constraint values; the point is inside when all are nonpositive.
    pub fn constraints(&self, p: &PhasePoint) -> Vec<f64> {
        match *self {
            Region::Box {
                r_min,
                r_max,
                z_max,
            } => {
                let mut g: Vec<f64> = (0..p.n())
                    .flat_map(|j| [r_min - p.r(j), p.r(j) - r_max])
                    .collect();
                g.push(p.z() - z_max);
                g.push(-p.z() - z_max);
                g
            }
            Region::Ball { radius } => vec![p.norm() - radius],
        }
    }

    /// Positive outside the region, nonpositive inside.
    pub fn outside(&self, p: &PhasePoint) -> f64 {
        self.constraints(p)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &PhasePoint) -> bool {
        self.outside(p) <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Stays { horizon: f64 },
    Escapes { t: f64 },
}

impl Classification {
    pub fn stays(&self) -> bool {
        matches!(self, Classification::Stays { .. })
    }
}

/// First exit of `region` along the trace, linearly interpolated between
/// stored states, or `Stays` through the final time.
pub fn classify(trace: &OrbitTrace, region: &Region) -> Classification {
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for (&t, p) in trace.times.iter().zip(&trace.states) {
        let g = region.constraints(p);
        if g.iter().any(|&v| v > 0.0) {
            let t_exit = match &prev {
                Some((t0, g0)) => g
                    .iter()
                    .zip(g0)
                    .filter(|(v, _)| **v > 0.0)
                    .map(|(v, v0)| t0 + (t - t0) * (-v0) / (v - v0))
                    .fold(t, |a, b| if (b - a) * (t - t0) < 0.0 { b } else { a }),
                None => t,
            };
            return Classification::Escapes { t: t_exit };
        }
        prev = Some((t, g));
    }
    Classification::Stays {
        horizon: trace.final_time(),
    }
}

/// One-parameter curve of initial points
/// `x0(s) = (r = radius·(1,…,1), θ = theta, z = s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingFamily {
    pub radius: f64,
    pub theta: Vec<f64>,
    pub s_min: f64,
    pub s_max: f64,
}

impl ShootingFamily {
    pub const DEFAULT_RADIUS: f64 = 0.83;

    pub fn new(n: usize) -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
            theta: vec![0.0; n],
            s_min: -2.0,
            s_max: -0.05,
        }
    }

    pub fn point(&self, s: f64) -> PhasePoint {
        let n = self.theta.len();
        PhasePoint::from_polar(&vec![self.radius; n], &self.theta, s)
    }
}

/// Where an orbit from the family meets `z = 0`, measured by the sign of
/// `Σ_j (r_j − 1)` at the crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingSide {
    /// Crossed with the radii below the torus.
    Inner,
    /// Crossed with the radii above the torus.
    Outer,
    /// Still below `z = 0` at the horizon.
    Pending,
}

/// Forward orbit of `x0` up to the first time `z` becomes positive.
pub fn crossing_side(
    m: &HamiltonianModel,
    x0: &PhasePoint,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<CrossingSide> {
    let opts = OrbitOptions {
        stop_at_z_zero: true,
        ..OrbitOptions::default()
    };
    let trace = integrate_with(m, x0, horizon, cfg, &opts)?;
    Ok(match trace.end {
        OrbitEnd::CrossedZ { .. } => {
            let p = trace.last();
            if (0..p.n()).map(|j| p.r(j) - 1.0).sum::<f64>() < 0.0 {
                CrossingSide::Inner
            } else {
                CrossingSide::Outer
            }
        }
        _ => CrossingSide::Pending,
    })
}

/// Settings for [`search_trapped`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub family: ShootingFamily,
    pub t_fwd: f64,
    pub t_bwd: f64,
    pub region: Region,
    pub integrator: IntegratorConfig,
    /// Bisection stops once the bracket is at most this wide, when the
    /// midpoint is no longer representable, or when a midpoint orbit is
    /// still below `z = 0` at `t_fwd`. Zero runs to machine precision.
    pub width: f64,
}

impl SearchSettings {
    pub fn new(n: usize) -> Self {
        Self {
            family: ShootingFamily::new(n),
            t_fwd: 1000.0,
            t_bwd: 100.0,
            region: Region::Box {
                r_min: 0.2,
                r_max: 4.0,
                z_max: 3.0,
            },
            integrator: IntegratorConfig::default(),
            width: 0.0,
        }
    }
}

/// Result of the shooting search.
#[derive(Debug, Clone)]
pub struct TrappedCandidate {
    pub s: f64,
    /// Final bracket `[lo, hi]`.
    pub bracket: (f64, f64),
    pub bisections: usize,
    pub forward: OrbitTrace,
    pub backward: OrbitTrace,
    pub forward_class: Classification,
    pub backward_class: Classification,
}

impl TrappedCandidate {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Bisects the family on the side at which orbits cross `z = 0` and
/// returns the bracket endpoint whose forward orbit stays in the region
/// longest, together with its forward and backward traces.
pub fn search_trapped(m: &HamiltonianModel, settings: &SearchSettings) -> Result<TrappedCandidate> {
    let fam = &settings.family;
    if fam.theta.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: fam.theta.len(),
        });
    }
    if !(settings.width <= BISECTION_WIDTH) {
        return Err(Error::Domain(format!(
            "bisection width must be at most {BISECTION_WIDTH} (got {})",
            settings.width
        )));
    }
    if !(fam.s_min < fam.s_max) {
        return Err(Error::Domain(format!(
            "family range must satisfy s_min < s_max (got [{}, {}])",
            fam.s_min, fam.s_max
        )));
    }
    let cfg = &settings.integrator;
    let side = |s: f64| crossing_side(m, &fam.point(s), settings.t_fwd, cfg);
    let (side_lo, side_hi) = rayon::join(|| side(fam.s_min), || side(fam.s_max));
    let (side_lo, side_hi) = (side_lo?, side_hi?);
    if side_lo == side_hi || side_lo == CrossingSide::Pending || side_hi == CrossingSide::Pending {
        return Err(Error::NoBracket(format!(
            "family endpoints s={} and s={} both classify as {side_lo:?}/{side_hi:?}",
            fam.s_min, fam.s_max
        )));
    }
    let (mut lo, mut hi) = (fam.s_min, fam.s_max);
    let mut bisections = 0;
    while hi - lo > settings.width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        bisections += 1;
        let s = side(mid)?;
        if s == CrossingSide::Pending {
            lo = mid;
            hi = mid;
            break;
        }
        if s == side_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let forward_of = |s: f64| -> Result<(OrbitTrace, Classification)> {
        let trace = integrate(m, &fam.point(s), settings.t_fwd, cfg)?;
        let class = classify(&trace, &settings.region);
        Ok((trace, class))
    };
    let ends: Vec<f64> = if lo == hi { vec![lo] } else { vec![lo, hi] };
    let runs = ends
        .par_iter()
        .map(|&s| forward_of(s).map(|r| (s, r)))
        .collect::<Result<Vec<_>>>()?;
    let exit_time = |c: &Classification| match c {
        Classification::Stays { .. } => f64::INFINITY,
        Classification::Escapes { t } => *t,
    };
    let (s, (forward, forward_class)) = runs
        .into_iter()
        .reduce(|a, b| {
            if exit_time(&b.1 .1) > exit_time(&a.1 .1) {
                b
            } else {
                a
            }
        })
        .expect("at least one endpoint");

    let back_opts = OrbitOptions {
        escape_radius: Some(ESCAPE_RADIUS),
        ..OrbitOptions::default()
    };
    let backward = integrate_with(m, &fam.point(s), -settings.t_bwd.abs(), cfg, &back_opts)?;
    let backward_class = classify(
        &backward,
        &Region::Ball {
            radius: ESCAPE_RADIUS,
        },
    );
    Ok(TrappedCandidate {
        s,
        bracket: (lo, hi),
        bisections,
        forward,
        backward,
        forward_class,
        backward_class,
    })
}

/// Header of the orbit CSV for dimension `n`.
pub fn csv_header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for j in 1..=n {
        cols.push(format!("x{j}"));
        cols.push(format!("y{j}"));
    }
    cols.push("z".into());
    cols.extend((1..=n).map(|j| format!("r{j}")));
    cols.push("H".into());
    cols.push("dzrate".into());
    cols.join(",")
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Orbit CSV: one row per stored state.
pub fn orbit_csv(m: &HamiltonianModel, trace: &OrbitTrace) -> String {
    let n = m.n();
    let mut out = csv_header(n);
    out.push('\n');
    for (t, p) in trace.times.iter().zip(&trace.states) {
        let mut row = vec![fmt17(*t)];
        row.extend(p.coords().iter().map(|v| fmt17(*v)));
        row.extend((0..n).map(|j| fmt17(p.r(j))));
        row.push(fmt17(m.eval_h(p)));
        row.push(fmt17(dz_rate(m, p)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
