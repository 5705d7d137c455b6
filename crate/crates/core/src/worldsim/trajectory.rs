//! Analytic trajectories with consistent pose, body angular velocity and
//! world acceleration, used as simulation ground truth.

use crate::manifold::{so3_log, Pose, Rotation};
use nalgebra::Vector3;

/// Piecewise analytic pose function plus sensor sample rates.
#[derive(Debug, Clone)]
pub struct TrajectorySpec {
    pub path: MotionPath,
    pub duration: f64,
    pub imu_hz: f64,
    pub lidar_hz: f64,
    pub camera_hz: f64,
}

#[derive(Debug, Clone)]
pub enum MotionPath {
    Stationary {
        pose: Pose,
    },
    /// Fixed orientation, constant world-frame velocity.
    ConstantVelocity {
        start: Pose,
        velocity: Vector3<f64>,
    },
    /// Level circle in the xy-plane, heading along the tangent.
    Circular {
        center: Vector3<f64>,
        radius: f64,
        angular_rate: f64,
        height: f64,
        phase: f64,
    },
    /// Piecewise line/arc ground path with a speed ramp from rest.
    Track(TrackPath),
}

impl TrajectorySpec {
    pub fn pose(&self, t: f64) -> Pose {
        match &self.path {
            MotionPath::Stationary { pose } => *pose,
            MotionPath::ConstantVelocity { start, velocity } => {
                Pose::new(start.rotation, start.translation + velocity * t)
            }
            MotionPath::Circular {
                center,
                radius,
                angular_rate,
                height,
                phase,
            } => {
                let theta = phase + angular_rate * t;
                let position = center
                    + Vector3::new(radius * theta.cos(), radius * theta.sin(), *height);
                let heading = theta + std::f64::consts::FRAC_PI_2 * angular_rate.signum();
                Pose::new(yaw_rotation(heading), position)
            }
            MotionPath::Track(track) => track.pose(t),
        }
    }

    pub fn world_velocity(&self, t: f64) -> Vector3<f64> {
        match &self.path {
            MotionPath::Stationary { .. } => Vector3::zeros(),
            MotionPath::ConstantVelocity { velocity, .. } => *velocity,
            MotionPath::Circular {
                radius,
                angular_rate,
                phase,
                ..
            } => {
                let theta = phase + angular_rate * t;
                Vector3::new(
                    -radius * angular_rate * theta.sin(),
                    radius * angular_rate * theta.cos(),
                    0.0,
                )
            }
            MotionPath::Track(track) => track.world_velocity(t),
        }
    }

    pub fn world_acceleration(&self, t: f64) -> Vector3<f64> {
        match &self.path {
            MotionPath::Stationary { .. } | MotionPath::ConstantVelocity { .. } => {
                Vector3::zeros()
            }
            MotionPath::Circular {
                radius,
                angular_rate,
                phase,
                ..
            } => {
                let theta = phase + angular_rate * t;
                let w2 = angular_rate * angular_rate;
                Vector3::new(-radius * w2 * theta.cos(), -radius * w2 * theta.sin(), 0.0)
            }
            MotionPath::Track(track) => track.world_acceleration(t),
        }
    }

    pub fn body_angular_velocity(&self, t: f64) -> Vector3<f64> {
        match &self.path {
            MotionPath::Stationary { .. } | MotionPath::ConstantVelocity { .. } => {
                Vector3::zeros()
            }
            MotionPath::Circular { angular_rate, .. } => Vector3::new(0.0, 0.0, *angular_rate),
            MotionPath::Track(track) => track.body_angular_velocity(t),
        }
    }

    /// Times where the analytic segments join (acceleration may step there).
    pub fn joint_times(&self) -> Vec<f64> {
        match &self.path {
            MotionPath::Track(track) => track.joint_times(),
            _ => Vec::new(),
        }
    }

    /// Maximum mismatch between finite-differenced pose and the analytic
    /// rates, sampled at 1 kHz away from segment joints.
    pub fn consistency_error(&self) -> f64 {
        let h = 1e-3;
        let joints = self.joint_times();
        let mut worst: f64 = 0.0;
        let steps = (self.duration / h).floor() as usize;
        for i in 1..steps.saturating_sub(1) {
            let t = i as f64 * h;
            if joints.iter().any(|j| (t - j).abs() < 2.5 * h) {
                continue;
            }
            let (pm, p0, pp) = (self.pose(t - h), self.pose(t), self.pose(t + h));
            let v_fd = (pp.translation - pm.translation) / (2.0 * h);
            worst = worst.max((v_fd - self.world_velocity(t)).norm());
            let a_fd =
                (self.world_velocity(t + h) - self.world_velocity(t - h)) / (2.0 * h);
            worst = worst.max((a_fd - self.world_acceleration(t)).norm());
            let dr = pm.rotation.inverse().compose(&pp.rotation);
            if let Ok(omega) = so3_log(&dr) {
                let w_fd = omega / (2.0 * h);
                // ω is expressed in the mid-interval body frame; first order ok
                worst = worst.max((w_fd - self.body_angular_velocity(t)).norm());
            }
            let _ = p0;
        }
        worst
    }
}

fn yaw_rotation(yaw: f64) -> Rotation {
    Rotation::from_axis_angle(&Vector3::z(), yaw)
}

/// Ground-path segment in the xy-plane at a fixed height.
#[derive(Debug, Clone)]
enum Segment {
    Line {
        start: Vector3<f64>,
        heading: f64,
        length: f64,
    },
    Arc {
        center: Vector3<f64>,
        radius: f64,
        start_angle: f64,
        /// Signed sweep; positive = counterclockwise.
        sweep: f64,
    },
}

impl Segment {
    fn length(&self) -> f64 {
        match self {
            Segment::Line { length, .. } => *length,
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Position, heading and signed curvature at arc-length `s` into the segment.
    fn at(&self, s: f64) -> (Vector3<f64>, f64, f64) {
        match self {
            Segment::Line {
                start,
                heading,
                length: _,
            } => {
                let dir = Vector3::new(heading.cos(), heading.sin(), 0.0);
                (start + dir * s, *heading, 0.0)
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let sign = sweep.signum();
                let angle = start_angle + sign * s / radius;
                let pos = center + Vector3::new(radius * angle.cos(), radius * angle.sin(), 0.0);
                let heading = angle + sign * std::f64::consts::FRAC_PI_2;
                (pos, heading, sign / radius)
            }
        }
    }
}

/// Closed or open chain of line/arc segments traversed with a linear speed
/// ramp from rest; heading follows the path tangent.
#[derive(Debug, Clone)]
pub struct TrackPath {
    segments: Vec<Segment>,
    cumulative: Vec<f64>,
    total_length: f64,
    height: f64,
    pub cruise_speed: f64,
    pub ramp_time: f64,
}

impl TrackPath {
    /// Rounded-rectangle loop centered at the origin, traversed
    /// counterclockwise starting from the middle of the bottom straight.
    pub fn racetrack(
        width: f64,
        depth: f64,
        corner_radius: f64,
        height: f64,
        cruise_speed: f64,
        ramp_time: f64,
    ) -> Self {
        let hw = width / 2.0;
        let hd = depth / 2.0;
        let r = corner_radius;
        let pi = std::f64::consts::PI;
        let segments = vec![
            Segment::Line {
                start: Vector3::new(0.0, -hd, 0.0),
                heading: 0.0,
                length: hw - r,
            },
            Segment::Arc {
                center: Vector3::new(hw - r, -hd + r, 0.0),
                radius: r,
                start_angle: -pi / 2.0,
                sweep: pi / 2.0,
            },
            Segment::Line {
                start: Vector3::new(hw, -hd + r, 0.0),
                heading: pi / 2.0,
                length: depth - 2.0 * r,
            },
            Segment::Arc {
                center: Vector3::new(hw - r, hd - r, 0.0),
                radius: r,
                start_angle: 0.0,
                sweep: pi / 2.0,
            },
            Segment::Line {
                start: Vector3::new(hw - r, hd, 0.0),
                heading: pi,
                length: width - 2.0 * r,
            },
            Segment::Arc {
                center: Vector3::new(-hw + r, hd - r, 0.0),
                radius: r,
                start_angle: pi / 2.0,
                sweep: pi / 2.0,
            },
            Segment::Line {
                start: Vector3::new(-hw, hd - r, 0.0),
                heading: -pi / 2.0,
                length: depth - 2.0 * r,
            },
            Segment::Arc {
                center: Vector3::new(-hw + r, -hd + r, 0.0),
                radius: r,
                start_angle: pi,
                sweep: pi / 2.0,
            },
            Segment::Line {
                start: Vector3::new(-hw + r, -hd, 0.0),
                heading: 0.0,
                length: hw - r,
            },
        ];
        Self::from_segments(segments, height, cruise_speed, ramp_time)
    }

    /// Straight run along +x starting at `start`, with a speed ramp.
    pub fn straight(
        start: Vector3<f64>,
        length: f64,
        height: f64,
        cruise_speed: f64,
        ramp_time: f64,
    ) -> Self {
        let segments = vec![Segment::Line {
            start,
            heading: 0.0,
            length,
        }];
        Self::from_segments(segments, height, cruise_speed, ramp_time)
    }

    fn from_segments(
        segments: Vec<Segment>,
        height: f64,
        cruise_speed: f64,
        ramp_time: f64,
    ) -> Self {
        let mut cumulative = vec![0.0];
        for seg in &segments {
            cumulative.push(cumulative.last().unwrap() + seg.length());
        }
        let total_length = *cumulative.last().unwrap();
        TrackPath {
            segments,
            cumulative,
            total_length,
            height,
            cruise_speed,
            ramp_time,
        }
    }

    pub fn lap_length(&self) -> f64 {
        self.total_length
    }

    /// Time to travel `laps` times around, including the initial ramp.
    pub fn duration_for_distance(&self, distance: f64) -> f64 {
        let ramp_dist = 0.5 * self.cruise_speed * self.ramp_time;
        if distance <= ramp_dist {
            (2.0 * distance * self.ramp_time / self.cruise_speed).sqrt()
        } else {
            self.ramp_time + (distance - ramp_dist) / self.cruise_speed
        }
    }

    fn speed(&self, t: f64) -> f64 {
        if t < self.ramp_time {
            self.cruise_speed * t / self.ramp_time
        } else {
            self.cruise_speed
        }
    }

    fn accel_tangential(&self, t: f64) -> f64 {
        if t < self.ramp_time {
            self.cruise_speed / self.ramp_time
        } else {
            0.0
        }
    }

    fn arc_length(&self, t: f64) -> f64 {
        if t < self.ramp_time {
            0.5 * self.cruise_speed * t * t / self.ramp_time
        } else {
            0.5 * self.cruise_speed * self.ramp_time + self.cruise_speed * (t - self.ramp_time)
        }
    }

    fn locate(&self, s: f64) -> (Vector3<f64>, f64, f64) {
        let s = s.rem_euclid(self.total_length.max(1e-12)).min(self.total_length);
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.segments.len() - 1),
            Err(i) => i - 1,
        };
        let local = s - self.cumulative[idx];
        let (mut pos, heading, curvature) = self.segments[idx].at(local);
        pos.z = self.height;
        (pos, heading, curvature)
    }

    fn pose(&self, t: f64) -> Pose {
        let (pos, heading, _) = self.locate(self.arc_length(t));
        Pose::new(yaw_rotation(heading), pos)
    }

    fn world_velocity(&self, t: f64) -> Vector3<f64> {
        let (_, heading, _) = self.locate(self.arc_length(t));
        Vector3::new(heading.cos(), heading.sin(), 0.0) * self.speed(t)
    }

    fn world_acceleration(&self, t: f64) -> Vector3<f64> {
        let (_, heading, curvature) = self.locate(self.arc_length(t));
        let tangent = Vector3::new(heading.cos(), heading.sin(), 0.0);
        let normal = Vector3::new(-heading.sin(), heading.cos(), 0.0);
        let v = self.speed(t);
        tangent * self.accel_tangential(t) + normal * (curvature * v * v)
    }

    fn body_angular_velocity(&self, t: f64) -> Vector3<f64> {
        let (_, _, curvature) = self.locate(self.arc_length(t));
        Vector3::new(0.0, 0.0, curvature * self.speed(t))
    }

    fn joint_times(&self) -> Vec<f64> {
        // Segment boundaries recur every lap; report the first few laps plus
        // the ramp end.
        let mut times = vec![self.ramp_time];
        for lap in 0..8 {
            for c in &self.cumulative {
                let s = c + lap as f64 * self.total_length;
                times.push(self.time_for_arc_length(s));
            }
        }
        times
    }

    fn time_for_arc_length(&self, s: f64) -> f64 {
        let ramp_dist = 0.5 * self.cruise_speed * self.ramp_time;
        if s <= ramp_dist {
            (2.0 * s * self.ramp_time / self.cruise_speed).sqrt()
        } else {
            self.ramp_time + (s - ramp_dist) / self.cruise_speed
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_rates_are_consistent() {
        let traj = TrajectorySpec {
            path: MotionPath::Circular {
                center: Vector3::zeros(),
                radius: 5.0,
                angular_rate: 0.4,
                height: 1.0,
                phase: 0.0,
            },
            duration: 3.0,
            imu_hz: 200.0,
            lidar_hz: 10.0,
            camera_hz: 5.0,
        };
        assert!(traj.consistency_error() < 1e-4);
        // speed = r·ω = 2 m/s, centripetal = v²/r = 0.8 m/s²
        assert!((traj.world_velocity(0.7).norm() - 2.0).abs() < 1e-12);
        assert!((traj.world_acceleration(0.7).norm() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn racetrack_closes_and_is_consistent() {
        let track = TrackPath::racetrack(40.0, 25.0, 4.0, 1.2, 2.5, 2.0);
        let lap = track.lap_length();
        assert!((lap - (2.0 * 32.0 + 2.0 * 17.0 + 2.0 * std::f64::consts::PI * 4.0)).abs() < 1e-9);
        let traj = TrajectorySpec {
            path: MotionPath::Track(track.clone()),
            duration: track.duration_for_distance(lap * 1.1),
            imu_hz: 200.0,
            lidar_hz: 10.0,
            camera_hz: 5.0,
        };
        assert!(traj.consistency_error() < 1e-4, "err={}", traj.consistency_error());
        // After exactly one lap the pose returns to the start.
        let t_lap = track.duration_for_distance(lap);
        let p0 = traj.pose(0.0);
        let p1 = traj.pose(t_lap);
        assert!((p0.translation - p1.translation).norm() < 1e-6);
        assert!(p0.rotation.inverse().compose(&p1.rotation).angle() < 1e-6);
    }

    #[test]
    fn constant_velocity_moves_linearly() {
        let traj = TrajectorySpec {
            path: MotionPath::ConstantVelocity {
                start: Pose::identity(),
                velocity: Vector3::new(1.0, 0.0, 0.0),
            },
            duration: 2.0,
            imu_hz: 100.0,
            lidar_hz: 10.0,
            camera_hz: 0.0,
        };
        assert!((traj.pose(1.5).translation - Vector3::new(1.5, 0.0, 0.0)).norm() < 1e-12);
        assert!(traj.consistency_error() < 1e-6);
    }
}
