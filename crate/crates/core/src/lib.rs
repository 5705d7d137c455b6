//! Tightly coupled LiDAR-inertial-visual SLAM engine.
//!
//! The crate is organized as a front-end iterated error-state Kalman filter
//! over point-to-plane and sparse photometric residuals ([`lio`], [`vio`],
//! [`fusion`]), a pose-graph back-end ([`posegraph`]), polar-descriptor place
//! recognition ([`loopclosure`]) and an orchestration layer ([`pipeline`]).
//! [`worldsim`] provides an analytic world and sensor simulator so every
//! estimator claim is checkable against ground truth at desk scale.

pub mod fusion;
pub mod lio;
pub mod loopclosure;
pub mod manifold;
pub mod pipeline;
pub mod posegraph;
pub mod vio;
pub mod worldsim;

pub use manifold::{Pose, Rotation, Twist};
