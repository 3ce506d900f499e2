use super::{icp_fusion_weight, LocError};
use crate::geometry::{angle_diff, normalize_angle, Pose2D};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdomSample {
    pub t: f64,
    pub pose: Pose2D,
}

/// Odometry pose at time `t`: interpolated between bracketing samples, or
/// extrapolated at the last (first) velocity for at most `max_extrapolation`
/// seconds past the buffer. `buffer` must be sorted by time.
pub fn predict_from_odometry(
    buffer: &[OdomSample],
    t: f64,
    max_extrapolation: f64,
) -> Result<Pose2D, LocError> {
    let (Some(first), Some(last)) = (buffer.first(), buffer.last()) else {
        return Err(LocError::StaleOdometry(f64::INFINITY));
    };
    let between = |a: &OdomSample, b: &OdomSample, t: f64| -> Pose2D {
        let dt = b.t - a.t;
        let k = if dt > 0.0 { (t - a.t) / dt } else { 0.0 };
        Pose2D::new(
            a.pose.x + (b.pose.x - a.pose.x) * k,
            a.pose.y + (b.pose.y - a.pose.y) * k,
            a.pose.theta + angle_diff(b.pose.theta, a.pose.theta) * k,
            a.pose.level.clone(),
        )
    };
    if t > last.t {
        let gap = t - last.t;
        if gap > max_extrapolation {
            return Err(LocError::StaleOdometry(gap));
        }
        return Ok(match buffer.len() {
            1 => last.pose.clone(),
            n => between(&buffer[n - 2], last, t),
        });
    }
    if t < first.t {
        let gap = first.t - t;
        if gap > max_extrapolation {
            return Err(LocError::StaleOdometry(gap));
        }
        return Ok(match buffer.len() {
            1 => first.pose.clone(),
            _ => between(first, &buffer[1], t),
        });
    }
    let i = buffer
        .partition_point(|s| s.t <= t)
        .clamp(1, buffer.len().max(2) - 1);
    if buffer.len() == 1 {
        return Ok(first.pose.clone());
    }
    Ok(between(&buffer[i - 1], &buffer[i], t))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionInput {
    pub icp: Pose2D,
    pub score: f64,
    pub odometry: Pose2D,
}

/// Confidence-weighted blend of the ICP pose and the odometry prediction.
/// Heading is interpolated along the shorter arc.
pub fn fuse_with_odometry(input: &FusionInput) -> Pose2D {
    let w = icp_fusion_weight(input.score);
    let (a, b) = (&input.icp, &input.odometry);
    Pose2D::new(
        w * a.x + (1.0 - w) * b.x,
        w * a.y + (1.0 - w) * b.y,
        normalize_angle(b.theta + w * angle_diff(a.theta, b.theta)),
        a.level.clone(),
    )
}

/// Motion from `a` to `b` expressed in the frame of `a`.
pub fn relative_motion(a: &Pose2D, b: &Pose2D) -> (f64, f64, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (s, c) = a.theta.sin_cos();
    (
        c * dx + s * dy,
        -s * dx + c * dy,
        angle_diff(b.theta, a.theta),
    )
}

/// Applies a motion given in the frame of `a`.
pub fn apply_motion(a: &Pose2D, d: (f64, f64, f64)) -> Pose2D {
    let (s, c) = a.theta.sin_cos();
    Pose2D::new(
        a.x + c * d.0 - s * d.1,
        a.y + s * d.0 + c * d.1,
        a.theta + d.2,
        a.level.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: f64, x: f64, th: f64) -> OdomSample {
        OdomSample {
            t,
            pose: Pose2D::new(x, 0.0, th, "1"),
        }
    }

    #[test]
    fn interpolates_and_extrapolates() {
        let buf = [s(0.0, 0.0, 0.0), s(1.0, 2.0, 0.2)];
        let p = predict_from_odometry(&buf, 0.5, 0.1).unwrap();
        assert!((p.x - 1.0).abs() < 1e-12 && (p.theta - 0.1).abs() < 1e-12);
        let p = predict_from_odometry(&buf, 1.05, 0.1).unwrap();
        assert!((p.x - 2.1).abs() < 1e-12);
        assert!(matches!(
            predict_from_odometry(&buf, 1.5, 0.1),
            Err(LocError::StaleOdometry(_))
        ));
        assert!(matches!(
            predict_from_odometry(&[], 0.0, 0.1),
            Err(LocError::StaleOdometry(_))
        ));
    }

    #[test]
    fn heading_interpolates_across_pi() {
        let buf = [s(0.0, 0.0, 3.0), s(1.0, 0.0, -3.0)];
        let p = predict_from_odometry(&buf, 0.5, 0.1).unwrap();
        assert!((p.theta.abs() - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn fusion_weights() {
        let f = FusionInput {
            icp: Pose2D::new(1.0, 0.0, 0.0, "1"),
            score: 1.0,
            odometry: Pose2D::new(0.0, 0.0, 0.0, "1"),
        };
        assert!((fuse_with_odometry(&f).x - 0.95).abs() < 1e-12);
        let f = FusionInput { score: 0.0, ..f };
        assert!((fuse_with_odometry(&f).x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn compose_inverts_relative_motion() {
        let a = Pose2D::new(1.0, 2.0, 0.7, "1");
        let b = Pose2D::new(-3.0, 0.5, -2.9, "1");
        let c = apply_motion(&a, relative_motion(&a, &b));
        assert!(c.position().distance(b.position()) < 1e-12);
        assert!(angle_diff(c.theta, b.theta).abs() < 1e-12);
    }
}
