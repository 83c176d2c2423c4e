//! Seeded synthetic highway corpora.
//!
//! Every segment is an independent vehicle driving along +x at 10–30 m/s,
//! sampled on the default protocol (41 points at 0.2 s).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{seeded_rng, Dataset, Protocol, RngStream, Segment};
use crate::error::{Error, Result};
use crate::gaussian::Vec2;

/// Lateral offset of a full lane change, meters.
pub const LANE_WIDTH: f64 = 3.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ConstantVelocity,
    ConstantAcceleration,
    LaneChange,
    Turn,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ConstantVelocity => "cv",
            Scenario::ConstantAcceleration => "ca",
            Scenario::LaneChange => "lane-change",
            Scenario::Turn => "turn",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cv" => Ok(Scenario::ConstantVelocity),
            "ca" => Ok(Scenario::ConstantAcceleration),
            "lane-change" | "lane_change" => Ok(Scenario::LaneChange),
            "turn" => Ok(Scenario::Turn),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Generates `n` segments with i.i.d. Gaussian position noise of standard
/// deviation `noise_sigma` on every point.
pub fn gen_synthetic(scenario: Scenario, n: usize, noise_sigma: f64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("segment count must be at least 1".into()));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::Config(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let protocol = Protocol::DEFAULT;
    let dt = protocol.dt;
    let len = protocol.window_len();
    let duration = (len - 1) as f64 * dt;
    let mut rng = seeded_rng(seed, RngStream::Datagen);

    let mut segments = Vec::with_capacity(n);
    for i in 0..n {
        let origin = Vec2::new(rng.random_range(0.0..200.0), rng.random_range(-5.0..5.0));
        let speed: f64 = rng.random_range(10.0..30.0);

        let path: Box<dyn Fn(f64) -> Vec2> = match scenario {
            Scenario::ConstantVelocity => Box::new(move |t| Vec2::new(speed * t, 0.0)),
            Scenario::ConstantAcceleration => {
                let accel: f64 = rng.random_range(-1.0..1.5);
                Box::new(move |t| Vec2::new(speed * t + 0.5 * accel * t * t, 0.0))
            }
            Scenario::LaneChange => {
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let span: f64 = rng.random_range(3.0..5.0);
                let start = rng.random_range(0.0..=duration - span);
                Box::new(move |t| {
                    Vec2::new(speed * t, side * LANE_WIDTH * smoothstep((t - start) / span))
                })
            }
            Scenario::Turn => {
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let curvature = side * rng.random_range(0.005..0.03);
                Box::new(move |t| {
                    let heading = curvature * speed * t;
                    Vec2::new(heading.sin() / curvature, (1.0 - heading.cos()) / curvature)
                })
            }
        };

        let mut points: Vec<Vec2> = (0..len)
            .map(|j| {
                let nx: f64 = rng.sample(StandardNormal);
                let ny: f64 = rng.sample(StandardNormal);
                origin + path(j as f64 * dt) + Vec2::new(nx, ny) * noise_sigma
            })
            .collect();
        let future = points.split_off(protocol.history_len());
        segments.push(Segment {
            segment_id: format!("{}-{:06}", scenario.name(), i),
            agent_id: i as u64,
            dt,
            history: points,
            future,
            neighbors: Vec::new(),
        });
    }
    Ok(Dataset::new(segments, format!("synthetic:{}", scenario.name())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_noiseless_is_a_line() {
        let ds = gen_synthetic(Scenario::ConstantVelocity, 20, 0.0, 3).unwrap();
        for s in &ds.segments {
            let a = s.history[0];
            let dir = s.history[15] - a;
            for p in &s.future {
                let rel = *p - a;
                let cross = dir.x * rel.y - dir.y * rel.x;
                assert!(cross.abs() / dir.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        for sc in [Scenario::ConstantAcceleration, Scenario::LaneChange, Scenario::Turn] {
            let a = gen_synthetic(sc, 10, 0.2, 99).unwrap();
            let b = gen_synthetic(sc, 10, 0.2, 99).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, gen_synthetic(sc, 10, 0.2, 100).unwrap());
        }
    }

    #[test]
    fn lane_change_net_offset() {
        let ds = gen_synthetic(Scenario::LaneChange, 50, 0.0, 8).unwrap();
        for s in &ds.segments {
            let lateral = s.future[24].y - s.history[0].y;
            assert!((lateral.abs() - LANE_WIDTH).abs() < 1e-6, "{lateral}");
        }
    }

    #[test]
    fn protocol_shape() {
        let ds = gen_synthetic(Scenario::Turn, 5, 0.1, 1).unwrap();
        assert_eq!(ds.protocol().unwrap(), Some(Protocol::DEFAULT));
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("lane-change".parse::<Scenario>().unwrap(), Scenario::LaneChange);
        assert_eq!("lane_change".parse::<Scenario>().unwrap(), Scenario::LaneChange);
        let err = "bogus".parse::<Scenario>().unwrap_err().to_string();
        assert!(err.contains("cv") && err.contains("turn"));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gen_synthetic(Scenario::ConstantVelocity, 0, 0.0, 0).is_err());
        assert!(gen_synthetic(Scenario::ConstantVelocity, 1, -1.0, 0).is_err());
    }
}
