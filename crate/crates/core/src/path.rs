//! Virtual target generation.
//!
//! A smooth reference path is treated as a point moving along it in time.
//! Positions, speeds, courses and their rates come from analytic
//! derivatives of the path parameterisation; nothing is differenced.

use std::path::Path;

use nalgebra::Vector2;

use crate::angle::wrap_pi;
use crate::error::{ConfigError, PathError};

/// Below this the target speed is treated as zero.
pub const MIN_TARGET_SPEED: f64 = 1e-9;

/// Moving reference point on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState {
    pub x: f64,
    pub y: f64,
    /// V_T (m/s), strictly positive.
    pub speed: f64,
    /// γ_T (rad), measured from North.
    pub course: f64,
    /// V̇_T (m/s²).
    pub speed_rate: f64,
    /// γ̇_T (rad/s).
    pub course_rate: f64,
}

impl TargetState {
    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn velocity(&self) -> Vector2<f64> {
        Vector2::new(self.speed * self.course.cos(), self.speed * self.course.sin())
    }

    /// Lateral acceleration a_T = V_T γ̇_T.
    pub fn lateral_acceleration(&self) -> f64 {
        self.speed * self.course_rate
    }
}

/// Position and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub pos: Vector2<f64>,
    pub vel: Vector2<f64>,
    pub acc: Vector2<f64>,
}

impl PathPoint {
    fn into_target(self, t: f64) -> Result<TargetState, PathError> {
        let speed = self.vel.norm();
        if speed < MIN_TARGET_SPEED {
            return Err(PathError::DegenerateTarget { t });
        }
        let (vx, vy) = (self.vel[0], self.vel[1]);
        let (ax, ay) = (self.acc[0], self.acc[1]);
        Ok(TargetState {
            x: self.pos[0],
            y: self.pos[1],
            speed,
            course: wrap_pi(vy.atan2(vx)),
            speed_rate: (vx * ax + vy * ay) / speed,
            course_rate: (vx * ay - vy * ax) / (speed * speed),
        })
    }
}

/// Piecewise-cubic Hermite interpolant through timed (x, y) samples.
///
/// Knot slopes are three-point finite differences (one-sided at the ends), so
/// the curve is C¹ and reproduces straight constant-speed motion exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitePath {
    times: Vec<f64>,
    points: Vec<Vector2<f64>>,
    slopes: Vec<Vector2<f64>>,
}

impl HermitePath {
    pub fn new(samples: &[(f64, f64, f64)]) -> Result<Self, PathError> {
        if samples.len() < 2 {
            return Err(PathError::BadSamples);
        }
        if samples
            .iter()
            .any(|(t, x, y)| !(t.is_finite() && x.is_finite() && y.is_finite()))
        {
            return Err(PathError::NonFinite("custom path sample"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(PathError::BadSamples);
        }
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let points: Vec<Vector2<f64>> = samples.iter().map(|s| Vector2::new(s.1, s.2)).collect();
        let n = times.len();
        let secant = |i: usize| (points[i + 1] - points[i]) / (times[i + 1] - times[i]);
        let slopes = (0..n)
            .map(|i| {
                if i == 0 {
                    secant(0)
                } else if i == n - 1 {
                    secant(n - 2)
                } else {
                    // derivative of the parabola through i-1, i, i+1
                    let h0 = times[i] - times[i - 1];
                    let h1 = times[i + 1] - times[i];
                    let (s0, s1) = (secant(i - 1), secant(i));
                    if h0 == h1 {
                        (s0 + s1) * 0.5
                    } else {
                        (s0 * h1 + s1 * h0) / (h0 + h1)
                    }
                }
            })
            .collect();
        Ok(Self { times, points, slopes })
    }

    /// Reads a CSV with a header and columns `t, x_T, y_T`.
    pub fn from_csv(path: &Path) -> Result<Self, ConfigError> {
        let mut reader =
            csv::Reader::from_path(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        let mut samples = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
            if record.len() < 3 {
                return Err(ConfigError::Parse(format!(
                    "{}: expected 3 columns (t, x_T, y_T), found {}",
                    path.display(),
                    record.len()
                )));
            }
            let mut vals = [0.0; 3];
            for (slot, field) in vals.iter_mut().zip(record.iter()) {
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::Parse(format!("{}: bad number '{field}'", path.display())))?;
            }
            samples.push((vals[0], vals[1], vals[2]));
        }
        Ok(Self::new(&samples)?)
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn eval(&self, t: f64) -> Result<PathPoint, PathError> {
        let (start, end) = (self.start(), self.end());
        if !(start..=end).contains(&t) {
            return Err(PathError::OutOfRange { t, start, end });
        }
        let i = match self.times.partition_point(|&ti| ti <= t) {
            0 => 0,
            k => (k - 1).min(self.times.len() - 2),
        };
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let (p0, p1) = (self.points[i], self.points[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        // p(s) = p0 + d0 s + c2 s² + c3 s³
        let c2 = (p1 - p0) * 3.0 - d0 * 2.0 - d1;
        let c3 = (p0 - p1) * 2.0 + d0 + d1;
        Ok(PathPoint {
            pos: p0 + d0 * s + c2 * (s * s) + c3 * (s * s * s),
            vel: (d0 + c2 * (2.0 * s) + c3 * (3.0 * s * s)) / h,
            acc: (c2 * 2.0 + c3 * (6.0 * s)) / (h * h),
        })
    }
}

/// Reference path selection.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// x = a_x sin Θ, y = a_y (1 − cos Θ), Θ = rate·t.
    Ellipse {
        ax: f64,
        ay: f64,
        rate: f64,
    },
    /// x = a₁ cos Θ₁ + offset, y = a₂ sin Θ₂, Θᵢ = rateᵢ·t.
    Eight {
        a1: f64,
        offset: f64,
        a2: f64,
        rate1: f64,
        rate2: f64,
    },
    Custom(HermitePath),
}

impl PathSpec {
    pub fn ellipse() -> Self {
        PathSpec::Ellipse {
            ax: 4.0,
            ay: 2.5,
            rate: 0.05,
        }
    }

    pub fn eight() -> Self {
        PathSpec::Eight {
            a1: 8.0,
            offset: -4.0,
            a2: 4.0,
            rate1: 0.05,
            rate2: 0.1,
        }
    }

    pub fn point(&self, t: f64) -> Result<PathPoint, PathError> {
        Ok(match self {
            PathSpec::Ellipse { ax, ay, rate } => {
                let (s, c) = (rate * t).sin_cos();
                PathPoint {
                    pos: Vector2::new(ax * s, ay * (1.0 - c)),
                    vel: Vector2::new(ax * rate * c, ay * rate * s),
                    acc: Vector2::new(-ax * rate * rate * s, ay * rate * rate * c),
                }
            }
            PathSpec::Eight {
                a1,
                offset,
                a2,
                rate1,
                rate2,
            } => {
                let (s1, c1) = (rate1 * t).sin_cos();
                let (s2, c2) = (rate2 * t).sin_cos();
                PathPoint {
                    pos: Vector2::new(a1 * c1 + offset, a2 * s2),
                    vel: Vector2::new(-a1 * rate1 * s1, a2 * rate2 * c2),
                    acc: Vector2::new(-a1 * rate1 * rate1 * c1, -a2 * rate2 * rate2 * s2),
                }
            }
            PathSpec::Custom(h) => h.eval(t)?,
        })
    }

    pub fn target_state(&self, t: f64) -> Result<TargetState, PathError> {
        if t < 0.0 {
            return Err(PathError::NegativeTime(t));
        }
        self.point(t)?.into_target(t)
    }

    /// Confirms the target is well defined at `n` evenly spaced times in
    /// [0, horizon].
    pub fn check_horizon(&self, horizon: f64, n: usize) -> Result<(), PathError> {
        let n = n.max(1);
        for k in 0..=n {
            self.target_state(horizon * k as f64 / n as f64)?;
        }
        Ok(())
    }
}

/// Per-quantity gaps between analytic target quantities and central
/// differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeDiscrepancy {
    pub speed: f64,
    pub course: f64,
    pub speed_rate: f64,
    pub course_rate: f64,
}

impl DerivativeDiscrepancy {
    pub fn max(&self) -> f64 {
        self.speed.max(self.course).max(self.speed_rate).max(self.course_rate)
    }
}

/// Compares V_T, γ_T, V̇_T, γ̇_T against central differences of position and
/// of V_T, γ_T with half-width `h`.
pub fn finite_difference_check(spec: &PathSpec, t: f64, h: f64) -> Result<DerivativeDiscrepancy, PathError> {
    let mid = spec.target_state(t)?;
    let lo = spec.target_state(t - h)?;
    let hi = spec.target_state(t + h)?;
    let vx = (hi.x - lo.x) / (2.0 * h);
    let vy = (hi.y - lo.y) / (2.0 * h);
    Ok(DerivativeDiscrepancy {
        speed: (vx.hypot(vy) - mid.speed).abs(),
        course: wrap_pi(vy.atan2(vx) - mid.course).abs(),
        speed_rate: ((hi.speed - lo.speed) / (2.0 * h) - mid.speed_rate).abs(),
        course_rate: (wrap_pi(hi.course - lo.course) / (2.0 * h) - mid.course_rate).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn ellipse_start() {
        let ts = PathSpec::ellipse().target_state(0.0).unwrap();
        assert_eq!((ts.x, ts.y), (0.0, 0.0));
        assert_abs_diff_eq!(ts.speed, 0.2, epsilon = 1e-15);
        assert_eq!(ts.course, 0.0);
    }

    #[test]
    fn eight_start() {
        let ts = PathSpec::eight().target_state(0.0).unwrap();
        assert_eq!((ts.x, ts.y), (4.0, 0.0));
        assert_abs_diff_eq!(ts.speed, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(ts.course, PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn presets_finite_difference() {
        let e = finite_difference_check(&PathSpec::ellipse(), 10.0, 1e-4).unwrap();
        assert!(e.max() < 1e-6, "{e:?}");
        let e = finite_difference_check(&PathSpec::eight(), 25.0, 1e-4).unwrap();
        assert!(e.max() < 1e-6, "{e:?}");
    }

    #[test]
    fn straight_line_has_no_speed_rate() {
        let samples: Vec<_> = (0..10).map(|k| (k as f64, k as f64, 0.0)).collect();
        let spec = PathSpec::Custom(HermitePath::new(&samples).unwrap());
        let e = finite_difference_check(&spec, 4.3, 1e-3).unwrap();
        assert_eq!(e.speed_rate, 0.0);
        let ts = spec.target_state(4.3).unwrap();
        assert_eq!(ts.speed_rate, 0.0);
        assert_eq!(ts.course_rate, 0.0);
    }

    #[test]
    fn sampled_speed_and_course_consistency() {
        for spec in [PathSpec::ellipse(), PathSpec::eight()] {
            for k in 0..1000 {
                let t = 0.15 * k as f64;
                let p = spec.point(t).unwrap();
                let ts = spec.target_state(t).unwrap();
                let (xd, yd) = (p.vel[0], p.vel[1]);
                assert!((ts.speed * ts.speed - (xd * xd + yd * yd)).abs() < 1e-12);
                assert!((ts.speed * ts.course.cos() - xd).abs() < 1e-12);
                assert!((ts.speed * ts.course.sin() - yd).abs() < 1e-12);
                if xd.abs() > 1e-3 {
                    assert!((ts.course.tan() - yd / xd).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn ellipse_is_periodic() {
        let spec = PathSpec::ellipse();
        let period = 2.0 * PI / 0.05;
        for k in 0..50 {
            let t = 1.7 * k as f64;
            let a = spec.target_state(t).unwrap();
            let b = spec.target_state(t + period).unwrap();
            assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_target_detected() {
        let spec = PathSpec::Ellipse {
            ax: 0.0,
            ay: 0.0,
            rate: 0.05,
        };
        assert!(matches!(
            spec.target_state(1.0),
            Err(PathError::DegenerateTarget { .. })
        ));
    }

    #[test]
    fn negative_time_rejected() {
        assert!(matches!(
            PathSpec::ellipse().target_state(-1.0),
            Err(PathError::NegativeTime(_))
        ));
    }

    #[test]
    fn hermite_interpolates_samples_and_is_c1() {
        let samples: Vec<_> = (0..40)
            .map(|k| {
                let t = 0.5 * k as f64;
                (t, 3.0 * (0.1 * t).sin(), 2.0 * (0.07 * t).cos())
            })
            .collect();
        let path = HermitePath::new(&samples).unwrap();
        for &(t, x, y) in &samples {
            let p = path.eval(t).unwrap();
            assert_abs_diff_eq!(p.pos[0], x, epsilon = 1e-12);
            assert_abs_diff_eq!(p.pos[1], y, epsilon = 1e-12);
        }
        for &(t, _, _) in &samples[1..samples.len() - 1] {
            let l = path.eval(t - 1e-9).unwrap();
            let r = path.eval(t + 1e-9).unwrap();
            assert!((l.vel - r.vel).norm() < 1e-6);
        }
        let e = finite_difference_check(&PathSpec::Custom(path.clone()), 7.3, 1e-5).unwrap();
        assert!(e.speed < 1e-6 && e.course < 1e-6, "{e:?}");
        assert!(matches!(path.eval(100.0), Err(PathError::OutOfRange { .. })));
    }

    #[test]
    fn hermite_rejects_bad_samples() {
        assert!(HermitePath::new(&[(0.0, 0.0, 0.0)]).is_err());
        assert!(HermitePath::new(&[(0.0, 0.0, 0.0), (0.0, 1.0, 0.0)]).is_err());
        assert!(HermitePath::new(&[(0.0, 0.0, 0.0), (1.0, f64::NAN, 0.0)]).is_err());
    }
}
