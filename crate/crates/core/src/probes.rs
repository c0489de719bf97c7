//! Seeded probe sets away from interfaces and the outer boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Scenario};

pub const DEFAULT_PROBE_COUNT: usize = 64;
pub const DEFAULT_SEED: u64 = 42;
/// Minimum distance to every interface, in units of that inclusion's
/// physical radius.
pub const INTERFACE_CLEARANCE: f64 = 1.5;
/// Minimum distance to the outer boundary, in units of its radius.
pub const BOUNDARY_CLEARANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub seed: u64,
    pub interface_clearance: f64,
    pub boundary_clearance: f64,
    pub points: Vec<[f64; 2]>,
}

impl ProbeSet {
    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().map(|p| Point::new(p[0], p[1]))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Whether `x` keeps the probe clearances in `scenario`.
pub fn admissible(scenario: &Scenario, x: &Point, interface_clearance: f64, boundary_clearance: f64) -> bool {
    if x.norm() > scenario.outer_radius * (1.0 - boundary_clearance) {
        return false;
    }
    (0..scenario.len()).all(|j| {
        scenario.signed_interface_distance(j, x).abs() >= interface_clearance * scenario.physical_radius(j)
    })
}

/// Draws `count` points uniformly in the disk by rejection and keeps those
/// satisfying the clearances. Only matrix points can qualify when the
/// interface clearance exceeds one radius.
pub fn generate(scenario: &Scenario, count: usize, seed: u64) -> Result<ProbeSet> {
    generate_with(scenario, count, seed, INTERFACE_CLEARANCE, BOUNDARY_CLEARANCE)
}

pub fn generate_with(
    scenario: &Scenario,
    count: usize,
    seed: u64,
    interface_clearance: f64,
    boundary_clearance: f64,
) -> Result<ProbeSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = scenario.outer_radius;
    let mut points = Vec::with_capacity(count);
    let budget = 10_000 * count.max(1);
    for _ in 0..budget {
        if points.len() == count {
            break;
        }
        let x = Point::new(rng.random_range(-r..r), rng.random_range(-r..r));
        if admissible(scenario, &x, interface_clearance, boundary_clearance)
            && matches!(scenario.classify_point(&x), Ok(Region::Matrix) | Ok(Region::Inclusion(_)))
        {
            points.push([x[0], x[1]]);
        }
    }
    if points.len() < count {
        return Err(Error::InvalidParameter(format!(
            "found only {} of {count} admissible probes",
            points.len()
        )));
    }
    Ok(ProbeSet { seed, interface_clearance, boundary_clearance, points })
}

/// `count` points uniform in the disk, each at least `1e-6 R` from every
/// circle, for sweeps that may use any region.
pub fn scatter(scenario: &Scenario, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let r = scenario.outer_radius;
    let gap = 1e-6 * r;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = Point::new(rng.random_range(-r..r), rng.random_range(-r..r));
        if x.norm() > r - gap {
            continue;
        }
        if (0..scenario.len()).all(|j| scenario.signed_interface_distance(j, &x).abs() > gap) {
            out.push(x);
        }
    }
    out
}

/// Uniform points inside inclusion `j`, away from its interface.
pub fn scatter_in(scenario: &Scenario, j: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let c = scenario.inclusions[j].center;
    let rho = scenario.physical_radius(j);
    (0..count)
        .map(|_| {
            let r = rho * 0.95 * rng.random_range(0.0f64..1.0).sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            c + Point::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Seeded generator used by every sweep.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
