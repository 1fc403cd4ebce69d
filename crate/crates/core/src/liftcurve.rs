//! Lifting plane curves to space curves whose height along the natural
//! parameter is a prescribed `h(a)`.
//!
//! Along a space curve `(x, y, z)(tau)` with space arc length `a`, `h_a = dz/da`,
//! so each height profile gives a first-order equation between `z` and the
//! plane arc length `l`. Cases 1 and 2 are closed form, cases 3, 5 and 6 invert a
//! parametric solution, and case 4 integrates the solved equation.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eulersys::HCase;
use crate::symcore::{eval_f64, Expr, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("grid is not strictly increasing at index {0}")]
    NonMonotone(usize),
    #[error("grid is not uniform at index {0}")]
    NonUniform(usize),
    #[error("need at least {0} samples")]
    TooShort(usize),
    #[error("curve is singular at index {0}")]
    Singular(usize),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("root bracketing failed for l = {0}")]
    Bracket(f64),
    #[error("step size underflow at l = {0}")]
    StepUnderflow(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for LiftError {
    fn from(e: csv::Error) -> Self {
        LiftError::Csv(e.to_string())
    }
}

const MIN_SAMPLES: usize = 5;

/// A regular plane curve on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurve {
    pub tau: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_tau: Vec<f64>,
    pub y_tau: Vec<f64>,
}

fn uniform_step(tau: &[f64]) -> Result<f64, LiftError> {
    if tau.len() < MIN_SAMPLES {
        return Err(LiftError::TooShort(MIN_SAMPLES));
    }
    let h = (tau[tau.len() - 1] - tau[0]) / (tau.len() - 1) as f64;
    if let Some(i) = (1..tau.len()).find(|&i| (tau[i] - tau[i - 1]).partial_cmp(&0.0) != Some(Ordering::Greater) || !tau[i].is_finite()) {
        return Err(LiftError::NonMonotone(i));
    }
    for i in 1..tau.len() {
        if (tau[i] - tau[i - 1] - h).abs() > 1e-6 * h {
            return Err(LiftError::NonUniform(i));
        }
    }
    Ok(h)
}

/// Fourth-order derivative on a uniform grid: centred five-point stencils
/// inside, one-sided ones at the two samples nearest each end.
pub fn differentiate_samples(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= MIN_SAMPLES);
    let d = 12.0 * h;
    (0..n)
        .map(|i| match i {
            0 => (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / d,
            1 => (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / d,
            i if i == n - 2 => {
                (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / d
            }
            i if i == n - 1 => {
                (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / d
            }
            i => (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / d,
        })
        .collect()
}

/// Cumulative integral on a uniform grid. Even nodes are composite Simpson;
/// odd nodes add one interval of the cubic through four neighbours.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4);
    let interval = |i: usize| -> f64 {
        h / 24.0
            * if i == 0 {
                9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
            } else if i == n - 2 {
                9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]
            } else {
                -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
            }
    };
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k])
        } else {
            out[k - 1] + interval(k - 1)
        };
    }
    out
}

impl PlaneCurve {
    /// Derivatives default to five-point differences.
    pub fn new(
        tau: Vec<f64>,
        x: Vec<f64>,
        y: Vec<f64>,
        derivatives: Option<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self, LiftError> {
        let h = uniform_step(&tau)?;
        if x.len() != tau.len() || y.len() != tau.len() {
            return Err(LiftError::Parameter("x, y and tau lengths differ".into()));
        }
        let (x_tau, y_tau) = match derivatives {
            Some((xt, yt)) if xt.len() == tau.len() && yt.len() == tau.len() => (xt, yt),
            Some(_) => return Err(LiftError::Parameter("derivative lengths differ".into())),
            None => (differentiate_samples(&x, h), differentiate_samples(&y, h)),
        };
        let c = PlaneCurve { tau, x, y, x_tau, y_tau };
        if let Some(i) = (0..c.len()).find(|&i| c.speed_sq(i).partial_cmp(&0.0) != Some(Ordering::Greater)) {
            return Err(LiftError::Singular(i));
        }
        Ok(c)
    }

    /// Unit circle over `[0, tau_max]` with exact derivatives.
    pub fn circle_arc(samples: usize, tau_max: f64) -> Result<Self, LiftError> {
        if samples < MIN_SAMPLES {
            return Err(LiftError::TooShort(MIN_SAMPLES));
        }
        let tau: Vec<f64> = (0..samples).map(|i| tau_max * i as f64 / (samples - 1) as f64).collect();
        let x = tau.iter().map(|t| t.cos()).collect();
        let y = tau.iter().map(|t| t.sin()).collect();
        let xt = tau.iter().map(|t| -t.sin()).collect();
        let yt = tau.iter().map(|t| t.cos()).collect();
        PlaneCurve::new(tau, x, y, Some((xt, yt)))
    }

    pub fn circle(samples: usize) -> Result<Self, LiftError> {
        PlaneCurve::circle_arc(samples, std::f64::consts::TAU)
    }

    /// The built-in unit circle.
    pub fn unit_circle() -> Self {
        PlaneCurve::circle(2001).expect("static curve")
    }

    /// Reads `tau,x,y` with optional `x_tau,y_tau` columns.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, LiftError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let col = |name: &str| header.iter().position(|h| h == name);
        let (Some(it), Some(ix), Some(iy)) = (col("tau"), col("x"), col("y")) else {
            return Err(LiftError::Csv("header must contain tau,x,y".into()));
        };
        let deriv = col("x_tau").zip(col("y_tau"));
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 5];
        for record in rdr.records() {
            let record = record?;
            let get = |i: usize| -> Result<f64, LiftError> {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| LiftError::Csv(format!("bad number in column {i}")))
            };
            cols[0].push(get(it)?);
            cols[1].push(get(ix)?);
            cols[2].push(get(iy)?);
            if let Some((dx, dy)) = deriv {
                cols[3].push(get(dx)?);
                cols[4].push(get(dy)?);
            }
        }
        let [tau, x, y, xt, yt]: [Vec<f64>; 5] = cols.try_into().expect("five columns");
        PlaneCurve::new(tau, x, y, deriv.map(|_| (xt, yt)))
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.tau[self.len() - 1] - self.tau[0]) / (self.len() - 1) as f64
    }

    pub fn speed_sq(&self, i: usize) -> f64 {
        self.x_tau[i] * self.x_tau[i] + self.y_tau[i] * self.y_tau[i]
    }
}

/// Plane arc length `l(tau)` with `l(tau_0) = 0`.
pub fn arc_length(c: &PlaneCurve) -> Result<Vec<f64>, LiftError> {
    let h = uniform_step(&c.tau)?;
    let speed: Vec<f64> = (0..c.len()).map(|i| c.speed_sq(i).sqrt()).collect();
    Ok(cumulative_simpson(&speed, h))
}

// ---------------------------------------------------------------------------
// cases

/// Numeric height profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LiftCase {
    Const,
    Linear { lambda: f64 },
    Quadratic { lambda: f64 },
    Power { lambda1: f64, lambda2: f64 },
    Exp { lambda1: f64, lambda2: f64 },
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

fn number(e: &Expr, what: &str) -> Result<f64, LiftError> {
    let none = |_: &Symbol| None;
    eval_f64(e, &none).map_err(|_| LiftError::Parameter(format!("{what} must be numeric")))
}

impl LiftCase {
    pub fn from_hcase(case: &HCase) -> Result<Self, LiftError> {
        Ok(match case {
            HCase::Generic(_) => return Err(LiftError::Parameter("the generic case has no lift".into())),
            HCase::Const => LiftCase::Const,
            HCase::Linear(l) => LiftCase::Linear { lambda: number(l, "lambda")? },
            HCase::Quadratic(l) => LiftCase::Quadratic { lambda: number(l, "lambda")? },
            HCase::Power(a, b) => LiftCase::Power { lambda1: number(a, "lambda1")?, lambda2: number(b, "lambda2")? },
            HCase::Exp(a, b) => LiftCase::Exp { lambda1: number(a, "lambda1")?, lambda2: number(b, "lambda2")? },
            HCase::Log => LiftCase::Log,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LiftCase::Const => "const",
            LiftCase::Linear { .. } => "linear",
            LiftCase::Quadratic { .. } => "quadratic",
            LiftCase::Power { .. } => "power",
            LiftCase::Exp { .. } => "exp",
            LiftCase::Log => "log",
        }
    }

    fn validate(&self) -> Result<(), LiftError> {
        let bad = |m: &str| Err(LiftError::Parameter(m.to_string()));
        match *self {
            LiftCase::Linear { lambda } if !(lambda != 0.0 && lambda * lambda < 1.0) => bad("linear lift needs 0 < lambda^2 < 1"),
            LiftCase::Quadratic { lambda } if lambda == 0.0 || !lambda.is_finite() => bad("lambda must be nonzero"),
            LiftCase::Power { lambda1, lambda2 } if lambda1 == 0.0 || [0.0, 1.0, 2.0].contains(&lambda2) => {
                bad("power lift needs lambda1 != 0 and lambda2 not in {0, 1, 2}")
            }
            LiftCase::Exp { lambda1, lambda2 } if lambda1 == 0.0 || lambda2 == 0.0 => bad("lambda1 and lambda2 must be nonzero"),
            _ => Ok(()),
        }
    }

    /// `h(a)`.
    pub fn h(&self, a: f64, c: f64) -> f64 {
        match *self {
            LiftCase::Const => c,
            LiftCase::Linear { lambda } => lambda * a,
            LiftCase::Quadratic { lambda } => lambda * a * a,
            LiftCase::Power { lambda1, lambda2 } => lambda1 * a.powf(lambda2),
            LiftCase::Exp { lambda1, lambda2 } => lambda1 * (lambda2 * a).exp(),
            LiftCase::Log => a.ln(),
        }
    }

    /// `h'(a)`.
    pub fn h_prime(&self, a: f64) -> f64 {
        match *self {
            LiftCase::Const => 0.0,
            LiftCase::Linear { lambda } => lambda,
            LiftCase::Quadratic { lambda } => 2.0 * lambda * a,
            LiftCase::Power { lambda1, lambda2 } => lambda1 * lambda2 * a.powf(lambda2 - 1.0),
            LiftCase::Exp { lambda1, lambda2 } => lambda1 * lambda2 * (lambda2 * a).exp(),
            LiftCase::Log => 1.0 / a,
        }
    }

    /// The natural parameter at height `z`, on the branch with `a > 0`.
    pub fn h_inverse(&self, z: f64) -> Option<f64> {
        let a = match *self {
            LiftCase::Const => 0.0,
            LiftCase::Linear { lambda } => z / lambda,
            LiftCase::Quadratic { lambda } => (z / lambda).sqrt(),
            LiftCase::Power { lambda1, lambda2 } => (z / lambda1).powf(1.0 / lambda2),
            LiftCase::Exp { lambda1, lambda2 } => (z / lambda1).ln() / lambda2,
            LiftCase::Log => z.exp(),
        };
        a.is_finite().then_some(a)
    }

    /// Residual of the defining equation at `(z, z_tau)` with `v = x_tau^2 + y_tau^2`.
    pub fn ode_residual(&self, z: f64, zt: f64, v: f64) -> f64 {
        match *self {
            LiftCase::Const => zt,
            LiftCase::Linear { lambda } => (1.0 - lambda * lambda) * zt * zt - lambda * lambda * v,
            LiftCase::Quadratic { lambda } => (1.0 - 4.0 * lambda * z) * zt * zt - 4.0 * lambda * z * v,
            LiftCase::Power { lambda1, lambda2 } => {
                let l2z2 = lambda2 * lambda2 * z * z;
                zt * zt * ((z / lambda1).powf(2.0 / lambda2) - l2z2) - l2z2 * v
            }
            LiftCase::Exp { lambda2, .. } => {
                let l2z2 = lambda2 * lambda2 * z * z;
                zt * zt * (1.0 - l2z2) - l2z2 * v
            }
            LiftCase::Log => zt * zt * ((2.0 * z).exp() - 1.0) - v,
        }
    }
}

// ---------------------------------------------------------------------------
// parametric solutions

/// A monotone parametric branch `t in (0, pi/2)`, `L(t)` increasing from 0.
struct Parametric {
    l: fn(f64, f64) -> f64,
    dl: fn(f64, f64) -> f64,
    z: fn(f64, f64) -> f64,
    t_of_z: fn(f64, f64) -> Option<f64>,
    param: f64,
}

fn parametric(case: &LiftCase) -> Option<Parametric> {
    match *case {
        LiftCase::Quadratic { lambda } => Some(Parametric {
            l: |t, k| ((t - t.sin() * t.cos()) / (4.0 * k)).abs(),
            dl: |t, k| (2.0 * t.sin().powi(2) / (4.0 * k)).abs(),
            z: |t, k| t.cos().powi(2) / (4.0 * k),
            t_of_z: |z, k| {
                let q = 4.0 * k * z;
                (q > 0.0 && q < 1.0).then(|| q.sqrt().acos())
            },
            param: lambda,
        }),
        LiftCase::Exp { lambda2, .. } => Some(Parametric {
            l: |t, k| ((t.tan().asinh() - t.sin()) / k).abs(),
            dl: |t, k| (t.sin().powi(2) / (t.cos() * k)).abs(),
            z: |t, k| t.cos() / k,
            t_of_z: |z, k| {
                let q = k * z;
                (q > 0.0 && q < 1.0).then(|| q.acos())
            },
            param: lambda2,
        }),
        LiftCase::Log => Some(Parametric {
            l: |t, _| t.tan() - t,
            dl: |t, _| t.tan().powi(2),
            z: |t, _| -t.cos().ln(),
            t_of_z: |z, _| (z > 0.0).then(|| (-z).exp().acos()),
            param: 0.0,
        }),
        _ => None,
    }
}

/// `(l, z)` along the parametric branch, `l = +-L(t)`.
pub fn parametric_table(case: &LiftCase, branch: Branch, ts: &[f64]) -> Result<Vec<(f64, f64)>, LiftError> {
    let p = parametric(case).ok_or_else(|| LiftError::Parameter(format!("{} has no parametric form", case.name())))?;
    Ok(ts.iter().map(|&t| (branch.sign() * (p.l)(t, p.param), (p.z)(t, p.param))).collect())
}

/// Solves `L(t) = target` on `[lo, hi]` by bisection, then one Newton polish.
fn invert(p: &Parametric, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, LiftError> {
    let f = |t: f64| (p.l)(t, p.param) - target;
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(LiftError::Bracket(target));
    }
    while hi - lo > tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let d = (p.dl)(t, p.param);
    let polished = t - f(t) / d;
    Ok(if d > 0.0 && polished >= lo && polished <= hi { polished } else { t })
}

// ---------------------------------------------------------------------------
// case 4

/// Embedded Runge-Kutta-Fehlberg 4(5) for a scalar autonomous equation.
fn rkf45(
    f: &dyn Fn(f64) -> Option<f64>,
    z0: f64,
    x_end: f64,
    h0: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64, LiftError> {
    const A: [[f64; 5]; 5] = [
        [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
        [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
        [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
        [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ];
    const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
    const B5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
    let (mut x, mut z, mut h) = (0.0, z0, h0.min(x_end));
    let mut domain_hit = false;
    while x < x_end {
        let last = h >= x_end - x;
        if last {
            h = x_end - x;
        }
        if h < 1e-14 * x_end.max(1.0) && !last {
            return Err(if domain_hit {
                LiftError::Domain(format!("lift reaches the boundary of its domain near l = {x}"))
            } else {
                LiftError::StepUnderflow(x)
            });
        }
        let mut k = [0.0; 6];
        let mut ok = true;
        for s in 0..6 {
            let zs = z + h * (0..s).map(|j| A[s - 1][j] * k[j]).sum::<f64>();
            match f(zs) {
                Some(v) => k[s] = v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            domain_hit = true;
            h *= 0.25;
            continue;
        }
        let z4 = z + h * (0..6).map(|i| B4[i] * k[i]).sum::<f64>();
        let z5 = z + h * (0..6).map(|i| B5[i] * k[i]).sum::<f64>();
        let err = (z5 - z4).abs() / (atol + rtol * z5.abs().max(z.abs()));
        if err <= 1.0 && f(z5).is_some() {
            x = if last { x_end } else { x + h };
            z = z5;
            domain_hit = false;
        } else if f(z5).is_none() {
            domain_hit = true;
        }
        let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
        h *= factor;
    }
    Ok(z)
}

// ---------------------------------------------------------------------------
// lifting

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftOptions {
    /// Relative bracket width for parametric inversion.
    pub root_tol: f64,
    pub ode_rtol: f64,
    /// Largest defining-equation residual of a successful lift.
    pub residual_tol: f64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { root_tol: 1e-12, ode_rtol: 1e-9, residual_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftResult {
    pub case: LiftCase,
    pub tau: Vec<f64>,
    pub l: Vec<f64>,
    pub z: Vec<f64>,
    pub a: Vec<f64>,
    pub z0: f64,
    pub max_ode_residual: f64,
    pub branch: Branch,
}

impl LiftResult {
    pub fn succeeded(&self, opts: &LiftOptions) -> bool {
        self.max_ode_residual < opts.residual_tol
    }
}

/// `z_tau` on the grid, space arc length and the largest equation residual.
fn space_data(case: &LiftCase, c: &PlaneCurve, z: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let h = c.step();
    let zt = differentiate_samples(z, h);
    let speed: Vec<f64> = (0..c.len()).map(|i| (c.speed_sq(i) + zt[i] * zt[i]).sqrt()).collect();
    let a = cumulative_simpson(&speed, h);
    let res = (0..c.len()).map(|i| case.ode_residual(z[i], zt[i], c.speed_sq(i)).abs()).fold(0.0, f64::max);
    (zt, a, res)
}

/// Lifts `c` starting at height `z0`.
///
/// For the constant and linear cases `z0` is the additive constant. For the
/// parametric cases `Plus` moves along increasing `t` and `Minus` back towards
/// `t = 0`; for case 4 the branch is the sign of `dz/dl`.
pub fn lift(case: &LiftCase, z0: f64, c: &PlaneCurve, branch: Branch, opts: &LiftOptions) -> Result<LiftResult, LiftError> {
    case.validate()?;
    let l = arc_length(c)?;
    let z: Vec<f64> = match *case {
        LiftCase::Const => vec![z0; c.len()],
        LiftCase::Linear { lambda } => {
            let k = branch.sign() * lambda / (1.0 - lambda * lambda).sqrt();
            l.iter().map(|li| k * li + z0).collect()
        }
        LiftCase::Quadratic { .. } | LiftCase::Exp { .. } | LiftCase::Log => {
            let p = parametric(case).expect("parametric case");
            let t0 = (p.t_of_z)(z0, p.param)
                .filter(|t| *t > 0.0 && *t < FRAC_PI_2)
                .ok_or_else(|| LiftError::Domain(format!("initial height {z0} is outside the domain of {}", case.name())))?;
            let l0 = (p.l)(t0, p.param);
            let t_max = FRAC_PI_2 * (1.0 - 1e-15);
            let l_max = (p.l)(t_max, p.param);
            let mut out = Vec::with_capacity(c.len());
            for &li in &l {
                let target = l0 + branch.sign() * li;
                if target <= 0.0 || target >= l_max || !target.is_finite() {
                    return Err(LiftError::Domain(format!(
                        "{} lift leaves its branch at plane length {li} (branch covers {})",
                        case.name(),
                        if branch == Branch::Plus { l_max - l0 } else { l0 }
                    )));
                }
                let t = invert(&p, target, 0.0, t_max, opts.root_tol)?;
                out.push((p.z)(t, p.param));
            }
            out
        }
        LiftCase::Power { lambda1, lambda2 } => {
            let g = |z: f64| (z / lambda1).powf(2.0 / lambda2) - lambda2 * lambda2 * z * z;
            let rhs = move |z: f64| -> Option<f64> {
                let gz = g(z);
                (gz > 0.0 && z / lambda1 > 0.0).then(|| branch.sign() * lambda2 * z / gz.sqrt())
            };
            if rhs(z0).is_none() {
                return Err(LiftError::Domain(format!("initial height {z0} is outside the domain of power")));
            }
            let mut out = vec![z0];
            let mut z = z0;
            let h0 = (l[1] - l[0]).max(1e-6);
            for w in l.windows(2) {
                let span = w[1] - w[0];
                z = if span > 0.0 { rkf45(&rhs, z, span, h0, opts.ode_rtol, 1e-14)? } else { z };
                out.push(z);
            }
            out
        }
    };
    let (_, a, max_ode_residual) = space_data(case, c, &z);
    Ok(LiftResult { case: *case, tau: c.tau.clone(), l, z, a, z0, max_ode_residual, branch })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub case: &'static str,
    pub samples: usize,
    pub max_ode_residual: f64,
    /// `max |h(a) - z|`, divided by `|z|` when `relative`.
    pub h_residual: f64,
    pub relative: bool,
    /// Natural parameter at the first sample.
    pub a0: f64,
    /// `+1` when `a` grows along the curve.
    pub direction: f64,
}

/// Recomputes `a(tau)` from the lift and checks `z = h(a)` and the defining
/// equation. `a` starts at `h^{-1}(z_0)` and runs in the direction that makes
/// `h` follow `z`.
pub fn verify(r: &LiftResult, c: &PlaneCurve) -> VerifyReport {
    let case = &r.case;
    let (_, a_rel, max_ode_residual) = space_data(case, c, &r.z);
    let z0 = r.z[0];
    let relative = matches!(case, LiftCase::Power { .. });
    let a0 = case.h_inverse(z0).unwrap_or(f64::NAN);
    let dz = r.z[r.z.len() - 1] - z0;
    let slope = case.h_prime(a0);
    let direction = if dz == 0.0 || slope == 0.0 { 1.0 } else { (dz * slope).signum() };
    let h_residual = (0..r.z.len())
        .map(|i| {
            let d = (case.h(a0 + direction * a_rel[i], z0) - r.z[i]).abs();
            if relative {
                d / r.z[i].abs()
            } else {
                d
            }
        })
        .fold(0.0, f64::max);
    VerifyReport { case: case.name(), samples: c.len(), max_ode_residual, h_residual, relative, a0, direction }
}

// ---------------------------------------------------------------------------
// CSV

pub const CSV_HEADER: [&str; 4] = ["tau", "l", "z", "a"];

/// Writes `tau,l,z,a` with shortest round-trip decimals.
pub fn write_csv<W: Write>(r: &LiftResult, w: W) -> Result<(), LiftError> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for i in 0..r.tau.len() {
        wtr.write_record([r.tau[i], r.l[i], r.z[i], r.a[i]].iter().map(|v| v.to_string()))?;
    }
    wtr.flush().map_err(|e| LiftError::Csv(e.to_string()))
}

/// Columns of a lift CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LiftTable {
    pub tau: Vec<f64>,
    pub l: Vec<f64>,
    pub z: Vec<f64>,
    pub a: Vec<f64>,
}

/// Reads a lift CSV; the header must be exactly `tau,l,z,a`.
pub fn read_csv<R: Read>(r: R) -> Result<LiftTable, LiftError> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(LiftError::Csv("header must be tau,l,z,a".into()));
    }
    let mut t = LiftTable::default();
    for record in rdr.records() {
        let record = record?;
        let v: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| LiftError::Csv(format!("bad number `{s}`"))))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 {
            return Err(LiftError::Csv("expected four columns".into()));
        }
        t.tau.push(v[0]);
        t.l.push(v[1]);
        t.z.push(v[2]);
        t.a.push(v[3]);
    }
    if t.tau.is_empty() {
        return Err(LiftError::Csv("no rows".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    #[test]
    fn circle_length() {
        let l = arc_length(&PlaneCurve::unit_circle()).unwrap();
        assert!((l[2000] - TAU).abs() < 1e-10);
        assert!((l[500] - PI / 2.0).abs() < 1e-10);
        let quarter = PlaneCurve::circle_arc(501, PI / 2.0).unwrap();
        assert!((arc_length(&quarter).unwrap()[500] - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn segment_length_exact() {
        let tau: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let c = PlaneCurve::new(tau.clone(), tau.clone(), vec![0.0; 11], None).unwrap();
        let l = arc_length(&c).unwrap();
        for (li, ti) in l.iter().zip(&tau) {
            assert!((li - ti).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_grids() {
        let c = PlaneCurve::new(vec![0.0, 1.0, 0.5, 2.0, 3.0], vec![0.0; 5], vec![0.0; 5], None);
        assert_eq!(c, Err(LiftError::NonMonotone(2)));
        let c = PlaneCurve::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![1.0; 5], vec![0.0; 5], None);
        assert_eq!(c, Err(LiftError::Singular(0)));
    }

    #[test]
    fn parametric_points() {
        let q = LiftCase::Quadratic { lambda: 0.25 };
        let p = parametric_table(&q, Branch::Plus, &[0.0]).unwrap();
        assert_eq!(p[0], (0.0, 1.0));
        let lg = parametric_table(&LiftCase::Log, Branch::Plus, &[FRAC_PI_4]).unwrap();
        assert!((lg[0].0 - (1.0 - FRAC_PI_4)).abs() < 1e-15);
        assert!((lg[0].1 - 2f64.sqrt().ln()).abs() < 1e-15);
        let flipped = parametric_table(&LiftCase::Log, Branch::Minus, &[FRAC_PI_4]).unwrap();
        assert_eq!(flipped[0].0, -lg[0].0);
    }

    #[test]
    fn linear_slope_one() {
        let case = LiftCase::Linear { lambda: 0.5f64.sqrt() };
        let c = PlaneCurve::unit_circle();
        let r = lift(&case, 0.0, &c, Branch::Plus, &LiftOptions::default()).unwrap();
        for (z, l) in r.z.iter().zip(&r.l) {
            assert!((z - l).abs() < 1e-12);
        }
        let m = lift(&case, 0.0, &c, Branch::Minus, &LiftOptions::default()).unwrap();
        assert!(r.z.iter().zip(&m.z).all(|(a, b)| (a + b).abs() < 1e-12));
    }

    #[test]
    fn quadratic_quarter_lambda_leaves_branch() {
        let r = lift(&LiftCase::Quadratic { lambda: 0.25 }, 0.9, &PlaneCurve::unit_circle(), Branch::Plus, &LiftOptions::default());
        assert!(matches!(r, Err(LiftError::Domain(_))));
    }

    #[test]
    fn domain_of_initial_value() {
        let c = PlaneCurve::unit_circle();
        let r = lift(&LiftCase::Log, -1.0, &c, Branch::Plus, &LiftOptions::default());
        assert!(matches!(r, Err(LiftError::Domain(_))));
        let p = LiftCase::Power { lambda1: 1.0, lambda2: 11.0 / 3.0 };
        assert!(matches!(lift(&p, 0.5, &c, Branch::Plus, &LiftOptions::default()), Err(LiftError::Domain(_))));
    }

    #[test]
    fn csv_round_trip() {
        let c = PlaneCurve::circle(21).unwrap();
        let r = lift(&LiftCase::Log, 0.5, &c, Branch::Plus, &LiftOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("tau,l,z,a\n"));
        let t = read_csv(buf.as_slice()).unwrap();
        assert_eq!(t.z, r.z);
        assert_eq!(t.a, r.a);
        assert!(read_csv("tau,l,z\n0,0,0\n".as_bytes()).is_err());
        assert!(read_csv("tau,l,z,a\n".as_bytes()).is_err());
    }
}
