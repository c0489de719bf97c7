//! Disk-shaped body with small circular inclusions.
//!
//! Inclusions are stored with *scaled* radii `a_j` together with a global
//! scale factor `epsilon`; the physical radius of inclusion `j` is
//! `epsilon * a_j`. With `epsilon = 1` the stored radii are the physical
//! ones. Inclusion indices are zero-based in the API and printed one-based.

use std::fmt;
use std::path::Path;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or vector) in the plane, in metres.
pub type Point = Vector2<f64>;

pub fn point(x: f64, y: f64) -> Point {
    Vector2::new(x, y)
}

/// Relative geometric tolerance; the absolute tolerance is this times the
/// outer radius.
pub const TAU_GEOM_RELATIVE: f64 = 1e-9;

/// Default clearance between circles, as a fraction of the largest physical
/// inclusion radius.
pub const DEFAULT_CLEARANCE_FACTOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Shear modulus in N/m^2.
    pub shear_modulus: f64,
}

impl Material {
    pub fn new(shear_modulus: f64) -> Self {
        Self { shear_modulus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub center: Point,
    /// Scaled radius; the physical radius is `epsilon * radius`.
    pub radius: f64,
    pub material: Material,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub outer_radius: f64,
    pub matrix: Material,
    pub inclusions: Vec<Inclusion>,
    pub epsilon: f64,
}

/// Where a point sits relative to the circles of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Matrix,
    Inclusion(usize),
    OuterBoundary,
    Interface(usize),
}

impl Region {
    /// Inclusion index for points strictly inside an inclusion.
    pub fn host(self) -> Option<usize> {
        match self {
            Region::Inclusion(j) => Some(j),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Matrix => write!(f, "matrix"),
            Region::Inclusion(j) => write!(f, "inclusion:{}", j + 1),
            Region::OuterBoundary => write!(f, "boundary"),
            Region::Interface(j) => write!(f, "interface:{}", j + 1),
        }
    }
}

/// One violated geometric or material invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    NonPositiveOuterRadius(f64),
    NonPositiveEpsilon(f64),
    NonPositiveModulus { inclusion: Option<usize>, value: f64 },
    NonPositiveRadius { inclusion: usize, value: f64 },
    NotContained { inclusion: usize, clearance: f64 },
    Overlap { first: usize, second: usize, clearance: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveOuterRadius(r) => write!(f, "outer radius {r} is not positive"),
            Violation::NonPositiveEpsilon(e) => write!(f, "epsilon {e} is not positive"),
            Violation::NonPositiveModulus { inclusion: None, value } => {
                write!(f, "matrix shear modulus {value} is not positive")
            }
            Violation::NonPositiveModulus { inclusion: Some(j), value } => {
                write!(f, "inclusion {} shear modulus {value} is not positive", j + 1)
            }
            Violation::NonPositiveRadius { inclusion, value } => {
                write!(f, "inclusion {} radius {value} is not positive", inclusion + 1)
            }
            Violation::NotContained { inclusion, clearance } => write!(
                f,
                "inclusion {} is not inside the outer disk (clearance {clearance:.6e} m)",
                inclusion + 1
            ),
            Violation::Overlap { first, second, clearance } => write!(
                f,
                "inclusions {} and {} overlap (clearance {clearance:.6e} m)",
                first + 1,
                second + 1
            ),
        }
    }
}

impl Scenario {
    pub fn new(outer_radius: f64, matrix_shear_modulus: f64) -> Self {
        Self {
            outer_radius,
            matrix: Material::new(matrix_shear_modulus),
            inclusions: Vec::new(),
            epsilon: 1.0,
        }
    }

    pub fn with_inclusion(mut self, center: Point, radius: f64, shear_modulus: f64) -> Self {
        self.inclusions.push(Inclusion {
            center,
            radius,
            material: Material::new(shear_modulus),
        });
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// The six-inclusion cast-iron disk of radius 150 m.
    pub fn table1() -> Self {
        Scenario::new(150.0, 5.6e10)
            .with_inclusion(point(-90.0, 40.0), 27.0, 2.6316e10)
            .with_inclusion(point(-50.0, -50.0), 24.0, 4.0741e10)
            .with_inclusion(point(-30.0, 10.0), 9.0, 7.7519e10)
            .with_inclusion(point(20.0, 70.0), 19.5, 7.5188e10)
            .with_inclusion(point(50.0, 0.0), 22.5, 8.0078e10)
            .with_inclusion(point(70.0, -80.0), 15.0, 9.0496e10)
    }

    /// Cast-iron disk of radius 30 m with one centred aluminium inclusion of
    /// radius 7 m.
    pub fn single_aluminium() -> Self {
        Scenario::new(30.0, 5.6e10).with_inclusion(point(0.0, 0.0), 7.0, 2.6316e10)
    }

    /// Disk of radius 100 m with three inclusions of radius 15 m placed
    /// symmetrically on the circle of radius 45 m; one softer and two
    /// stiffer than the matrix.
    pub fn three_symmetric() -> Self {
        let moduli = [2.6316e10, 8.0078e10, 1.5e11];
        moduli.iter().enumerate().fold(Scenario::new(100.0, 5.6e10), |s, (k, mu)| {
            let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            s.with_inclusion(point(45.0 * t.cos(), 45.0 * t.sin()), 15.0, *mu)
        })
    }

    pub fn len(&self) -> usize {
        self.inclusions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn mu_o(&self) -> f64 {
        self.matrix.shear_modulus
    }

    pub fn mu_i(&self, j: usize) -> f64 {
        self.inclusions[j].material.shear_modulus
    }

    pub fn physical_radius(&self, j: usize) -> f64 {
        self.epsilon * self.inclusions[j].radius
    }

    pub fn tau_geom(&self) -> f64 {
        TAU_GEOM_RELATIVE * self.outer_radius
    }

    /// Copy of the scenario with every inclusion modulus set to the matrix
    /// modulus.
    pub fn homogenized(&self) -> Self {
        let mut s = self.clone();
        for inc in &mut s.inclusions {
            inc.material = s.matrix;
        }
        s
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(DEFAULT_CLEARANCE_FACTOR)
    }

    /// Checks every invariant; an empty list means the scenario is valid.
    pub fn validate_with(&self, clearance_factor: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.outer_radius > 0.0) {
            out.push(Violation::NonPositiveOuterRadius(self.outer_radius));
        }
        if !(self.epsilon > 0.0) {
            out.push(Violation::NonPositiveEpsilon(self.epsilon));
        }
        if !(self.mu_o() > 0.0) {
            out.push(Violation::NonPositiveModulus {
                inclusion: None,
                value: self.mu_o(),
            });
        }
        for (j, inc) in self.inclusions.iter().enumerate() {
            if !(inc.material.shear_modulus > 0.0) {
                out.push(Violation::NonPositiveModulus {
                    inclusion: Some(j),
                    value: inc.material.shear_modulus,
                });
            }
            if !(inc.radius > 0.0) {
                out.push(Violation::NonPositiveRadius {
                    inclusion: j,
                    value: inc.radius,
                });
            }
        }
        let max_radius = (0..self.len())
            .map(|j| self.physical_radius(j).abs())
            .fold(0.0, f64::max);
        let required = clearance_factor * max_radius;
        for j in 0..self.len() {
            let c = &self.inclusions[j].center;
            let clearance = self.outer_radius - c.norm() - self.physical_radius(j);
            if !(clearance >= required && clearance > 0.0) {
                out.push(Violation::NotContained { inclusion: j, clearance });
            }
            for k in j + 1..self.len() {
                let d = (self.inclusions[k].center - c).norm();
                let clearance = d - self.physical_radius(j) - self.physical_radius(k);
                if !(clearance >= required && clearance > 0.0) {
                    out.push(Violation::Overlap {
                        first: j,
                        second: k,
                        clearance,
                    });
                }
            }
        }
        out
    }

    /// Signed distance from `x` to the interface of inclusion `j`
    /// (negative inside).
    pub fn signed_interface_distance(&self, j: usize, x: &Point) -> f64 {
        (x - self.inclusions[j].center).norm() - self.physical_radius(j)
    }

    /// Closest interface to `x` with the unsigned distance to it.
    pub fn nearest_interface(&self, x: &Point) -> Option<(usize, f64)> {
        (0..self.len())
            .map(|j| (j, self.signed_interface_distance(j, x).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn classify_point(&self, x: &Point) -> Result<Region> {
        let tau = self.tau_geom();
        let r = x.norm();
        if !r.is_finite() || r > self.outer_radius + tau {
            return Err(Error::OutOfDomain { x: x[0], y: x[1] });
        }
        for j in 0..self.len() {
            let d = self.signed_interface_distance(j, x);
            if d.abs() <= tau {
                return Ok(Region::Interface(j));
            }
            if d < 0.0 {
                return Ok(Region::Inclusion(j));
            }
        }
        if r >= self.outer_radius - tau {
            Ok(Region::OuterBoundary)
        } else {
            Ok(Region::Matrix)
        }
    }

    /// Same configuration with `epsilon` multiplied by `s`: centres,
    /// scaled radii and moduli are untouched, physical radii shrink by `s`.
    pub fn scale_family(&self, s: f64) -> Result<Scenario> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {s}"
            )));
        }
        let mut scaled = self.clone();
        scaled.epsilon *= s;
        Ok(scaled)
    }

    pub fn to_file_format(&self) -> ScenarioFile {
        ScenarioFile {
            outer_radius_m: self.outer_radius,
            matrix_shear_modulus_pa: self.mu_o(),
            epsilon: self.epsilon,
            inclusions: self
                .inclusions
                .iter()
                .map(|inc| InclusionFile {
                    center_m: [inc.center[0], inc.center[1]],
                    radius_m: inc.radius,
                    shear_modulus_pa: inc.material.shear_modulus,
                })
                .collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Scenario> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(file.into())
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Scenario> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("scenario serializes")
    }

    /// Hex SHA-256 of the compact scenario file encoding.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = serde_json::to_string(&self.to_file_format()).expect("scenario serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// On-disk scenario description (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub outer_radius_m: f64,
    #[serde(rename = "matrix_shear_modulus_Pa")]
    pub matrix_shear_modulus_pa: f64,
    #[serde(default = "unit_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub inclusions: Vec<InclusionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionFile {
    pub center_m: [f64; 2],
    pub radius_m: f64,
    #[serde(rename = "shear_modulus_Pa")]
    pub shear_modulus_pa: f64,
}

fn unit_epsilon() -> f64 {
    1.0
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        let mut s = Scenario::new(f.outer_radius_m, f.matrix_shear_modulus_pa).with_epsilon(f.epsilon);
        for inc in f.inclusions {
            s = s.with_inclusion(
                point(inc.center_m[0], inc.center_m[1]),
                inc.radius_m,
                inc.shear_modulus_pa,
            );
        }
        s
    }
}
