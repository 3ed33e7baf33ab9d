//! Admissible rolling motions.
//!
//! A motion is a curve tangent to the distribution, `ẏ = c₁X̃₁ + c₂X̃₂`, so
//! no-slip and no-twist hold by construction and the residual checks below
//! only measure integration error. Integration is classical RK4 with a fixed
//! step; `φ` is carried unwrapped so loops report their winding.

use std::io::Write;

use crate::distribution::{RollingPair, Vec5};
use crate::fd::sampled_derivative_with;
use crate::{fmt_sig, Error, Result};

/// Window of the sampled velocity stencil (tenth order). Wide enough that
/// stencil error stays well below RK4 error at practical steps, so residuals
/// show the integrator's order rather than the stencil's.
pub const VELOCITY_STENCIL: usize = 11;

/// Piecewise-linear controls `(c₁(t), c₂(t))`, held constant outside the
/// sampled range.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlCurve {
    times: Vec<f64>,
    values: Vec<[f64; 2]>,
    normalized: bool,
}

impl ControlCurve {
    pub fn new(times: Vec<f64>, values: Vec<[f64; 2]>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::invalid("control curve needs matching, non-empty time and value samples"));
        }
        if times.iter().chain(values.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("control samples must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("control times must be strictly increasing"));
        }
        Ok(ControlCurve { times, values, normalized: false })
    }

    pub fn constant(c1: f64, c2: f64) -> Self {
        ControlCurve { times: vec![0.0], values: vec![[c1, c2]], normalized: false }
    }

    /// Rescale every control to unit `g₁`-speed, so `t` becomes arclength.
    /// Zero controls stay zero.
    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    /// Rows `t, c₁, c₂`; blank lines and lines starting with `#` are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let row = raw.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::ParseLine { line, message: format!("expected 3 fields t,c1,c2, got {}", fields.len()) });
            }
            let mut nums = [0.0; 3];
            for (n, f) in nums.iter_mut().zip(&fields) {
                *n = f
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::ParseLine { line, message: format!("`{f}` is not a finite number") })?;
            }
            if times.last().is_some_and(|&t| nums[0] <= t) {
                return Err(Error::ParseLine { line, message: "times must be strictly increasing".into() });
            }
            times.push(nums[0]);
            values.push([nums[1], nums[2]]);
        }
        if times.is_empty() {
            return Err(Error::ParseLine { line: text.lines().count().max(1), message: "no control samples".into() });
        }
        ControlCurve::new(times, values)
    }

    pub fn at(&self, t: f64) -> [f64; 2] {
        let c = self.raw_at(t);
        if !self.normalized {
            return c;
        }
        let speed = c[0].hypot(c[1]);
        if speed == 0.0 {
            c
        } else {
            [c[0] / speed, c[1] / speed]
        }
    }

    fn raw_at(&self, t: f64) -> [f64; 2] {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let r = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let (a, b) = (self.values[k], self.values[k + 1]);
        [a[0] + r * (b[0] - a[0]), a[1] + r * (b[1] - a[1])]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(x, y, u, v, φ)` with `φ` unwrapped.
    pub points: Vec<Vec5>,
    pub controls: Vec<[f64; 2]>,
    pub dt: f64,
    pub order: u32,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Vec5 {
        self.points[self.points.len() - 1]
    }

    /// Net change of the unwrapped angle.
    pub fn holonomy(&self) -> f64 {
        self.last()[4] - self.points[0][4]
    }

    /// One CSV row per sample: `t, x, y, u, v, φ, c₁, c₂`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# t,x,y,u,v,phi,c1,c2")?;
        writeln!(out, "# dt={} order={}", fmt_sig(self.dt), self.order)?;
        for ((t, p), c) in self.times.iter().zip(&self.points).zip(&self.controls) {
            let row: Vec<String> = std::iter::once(*t).chain(p.iter().copied()).chain(c.iter().copied()).map(fmt_sig).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Sampled time derivative of every coordinate.
    fn velocities(&self) -> Result<Vec<Vec5>> {
        let cols: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let v: Vec<f64> = self.points.iter().map(|p| p[i]).collect();
                sampled_derivative_with(&v, self.dt, 1, VELOCITY_STENCIL)
            })
            .collect::<Result<_>>()?;
        Ok((0..self.len()).map(|k| std::array::from_fn(|i| cols[i][k])).collect())
    }

    fn check_sampled(&self) -> Result<()> {
        if self.len() < VELOCITY_STENCIL {
            return Err(Error::invalid(format!(
                "trajectory has {} samples, residuals need at least {VELOCITY_STENCIL}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Integrate `ẏ = c₁X̃₁ + c₂X̃₂` from `start` over `[0, T]`. The step is
/// `T/N` with `N = ⌈T/dt⌉`, so the grid is uniform and ends on `T`.
pub fn integrate(pair: &RollingPair, start: Vec5, ctrl: &ControlCurve, dt: f64, t_end: f64) -> Result<Trajectory> {
    integrate_field(|p, c| {
        let [x1, x2] = pair.velocity_fields(p)?;
        Ok(std::array::from_fn(|i| c[0] * x1[i] + c[1] * x2[i]))
    }, start, ctrl, dt, t_end)
}

/// RK4 for a control-affine field `f(p, c)`. Domain failures inside a step
/// become [`Error::DomainExit`] carrying the last accepted state.
pub fn integrate_field<F>(field: F, start: Vec5, ctrl: &ControlCurve, dt: f64, t_end: f64) -> Result<Trajectory>
where
    F: Fn(&Vec5, [f64; 2]) -> Result<Vec5>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid(format!("final time must be non-negative, got {t_end}")));
    }
    field(&start, ctrl.at(0.0))?;

    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { dt } else { t_end / steps as f64 };
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    let (mut t, mut y) = (0.0, start);
    times.push(t);
    points.push(y);
    controls.push(ctrl.at(t));

    let axpy = |y: &Vec5, h: f64, k: &Vec5| -> Vec5 { std::array::from_fn(|i| y[i] + h * k[i]) };
    for n in 0..steps {
        let step = || -> Result<Vec5> {
            let k1 = field(&y, ctrl.at(t))?;
            let k2 = field(&axpy(&y, 0.5 * h, &k1), ctrl.at(t + 0.5 * h))?;
            let k3 = field(&axpy(&y, 0.5 * h, &k2), ctrl.at(t + 0.5 * h))?;
            let k4 = field(&axpy(&y, h, &k3), ctrl.at(t + h))?;
            let next: Vec5 = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            // the endpoint must itself be a valid chart point
            field(&next, ctrl.at(t + h))?;
            Ok(next)
        };
        y = match step() {
            Ok(next) => next,
            Err(Error::Domain(_)) => return Err(Error::DomainExit { time: t, state: y }),
            Err(e) => return Err(e),
        };
        t = if n + 1 == steps { t_end } else { (n + 1) as f64 * h };
        times.push(t);
        points.push(y);
        controls.push(ctrl.at(t));
    }
    Ok(Trajectory { times, points, controls, dt: h, order: 4 })
}

/// Orthonormal-frame velocities `(ẋ in e₁,e₂ ; x̂̇ in e₃,e₄)` from samples.
fn frame_velocities(pair: &RollingPair, traj: &Trajectory) -> Result<Vec<[f64; 4]>> {
    traj.check_sampled()?;
    let vel = traj.velocities()?;
    traj.points
        .iter()
        .zip(&vel)
        .map(|(p, d)| {
            let w1 = pair.s1.warp([p[0], p[1]])?;
            let w2 = pair.s2.warp([p[2], p[3]])?;
            Ok([w1.w * d[0], w1.r * d[1], w2.w * d[2], w2.r * d[3]])
        })
        .collect()
}

/// Max over samples of `|A_φ ẋ − x̂̇|` in orthonormal frames.
pub fn no_slip_residual(traj: &Trajectory, pair: &RollingPair) -> Result<f64> {
    let fv = frame_velocities(pair, traj)?;
    Ok(traj.points.iter().zip(&fv).fold(0.0, |m, (p, v)| {
        let (s, c) = p[4].sin_cos();
        let r1 = c * v[0] - s * v[1] - v[2];
        let r2 = s * v[0] + c * v[1] - v[3];
        m.max(r1.hypot(r2))
    }))
}

/// Parallel transport of `v₀` (components in `e₁, e₂` at the first sample)
/// along the Σ₁ curve, mapped by `A_φ` onto Σ₂, and the norm of its
/// covariant derivative along the Σ₂ curve; max over samples.
///
/// In the frames the transported vector has angle `θ` with `θ̇ = Ω`,
/// `Ω = a₁ẋ¹ + a₂ẋ²`, its image has angle `θ + φ`, and the Σ₂ covariant
/// derivative has norm `|v₀|·|θ̇ + φ̇ − Ω̂|` with `Ω̂` the Σ₂ connection along
/// the contact curve.
pub fn no_twist_residual(traj: &Trajectory, pair: &RollingPair, v0: [f64; 2]) -> Result<f64> {
    let fv = frame_velocities(pair, traj)?;
    let phi: Vec<f64> = traj.points.iter().map(|p| p[4]).collect();
    let phi_dot = sampled_derivative_with(&phi, traj.dt, 1, VELOCITY_STENCIL)?;
    let norm = v0[0].hypot(v0[1]);
    let mut worst: f64 = 0.0;
    for ((p, v), pd) in traj.points.iter().zip(&fv).zip(&phi_dot) {
        let j1 = pair.s1.jet_at([p[0], p[1]])?;
        let j2 = pair.s2.jet_at([p[2], p[3]])?;
        let omega1 = j1.a1 * v[0] + j1.a2 * v[1];
        let omega2 = j2.a1 * v[2] + j2.a2 * v[3];
        worst = worst.max(norm * (omega1 + pd - omega2).abs());
    }
    Ok(worst)
}

/// Angle of `v₀` after parallel transport along the Σ₁ curve, per sample,
/// by trapezoidal accumulation of `Ω`.
pub fn transported_angles(traj: &Trajectory, pair: &RollingPair, v0: [f64; 2]) -> Result<Vec<f64>> {
    let fv = frame_velocities(pair, traj)?;
    let omega: Vec<f64> = traj
        .points
        .iter()
        .zip(&fv)
        .map(|(p, v)| {
            let j = pair.s1.jet_at([p[0], p[1]])?;
            Ok(j.a1 * v[0] + j.a2 * v[1])
        })
        .collect::<Result<_>>()?;
    let mut theta = vec![v0[1].atan2(v0[0])];
    for k in 1..omega.len() {
        let h = traj.times[k] - traj.times[k - 1];
        theta.push(theta[k - 1] + 0.5 * h * (omega[k - 1] + omega[k]));
    }
    Ok(theta)
}

/// Lengths `(L₁, L₂)` of the two contact curves.
pub fn contact_arclengths(traj: &Trajectory, pair: &RollingPair) -> Result<(f64, f64)> {
    let fv = frame_velocities(pair, traj)?;
    let s1: Vec<f64> = fv.iter().map(|v| v[0].hypot(v[1])).collect();
    let s2: Vec<f64> = fv.iter().map(|v| v[2].hypot(v[3])).collect();
    Ok((sampled_integral(&s1, &traj.times), sampled_integral(&s2, &traj.times)))
}

/// Composite Simpson on a uniform grid, finishing with Simpson 3/8 when the
/// interval count is odd.
fn sampled_integral(f: &[f64], t: &[f64]) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let h = t[1] - t[0];
    let m = n - 1;
    let mut total = 0.0;
    let simpson_end = if m % 2 == 1 && m >= 3 { m - 3 } else { m - m % 2 };
    for k in (0..simpson_end).step_by(2) {
        total += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    }
    let k = simpson_end;
    if m - k == 3 {
        total += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    } else if m - k == 1 {
        total += 0.5 * h * (f[k] + f[k + 1]);
    }
    total
}
