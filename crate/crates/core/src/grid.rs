//! Rectangular sample grids of the approximated fields and their CSV form.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::AsymptoticModel;
use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::numerics::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Neps,
    Reps,
    GradRepsMagnitude,
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neps" => Ok(Quantity::Neps),
            "reps" => Ok(Quantity::Reps),
            "grad" => Ok(Quantity::GradRepsMagnitude),
            other => Err(Error::InvalidParameter(format!(
                "unknown quantity `{other}` (expected neps, reps or grad)"
            ))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Neps => "neps",
            Quantity::Reps => "reps",
            Quantity::GradRepsMagnitude => "grad",
        })
    }
}

/// Sample nodes `min, ..., max` (inclusive) along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn nodes(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
}

impl GridSpec {
    /// Square `n x n` grid covering `[-half, half]^2`.
    pub fn square(half: f64, n: usize) -> Self {
        Self {
            x: Axis::new(-half, half, n),
            y: Axis::new(-half, half, n),
        }
    }
}

/// Sampled field. Cells are stored row-major with `y` as the outer index;
/// cells outside the disk have no region and a NaN value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub quantity: Quantity,
    pub values: Vec<f64>,
    pub mask: Vec<Option<Region>>,
}

impl GridField {
    pub fn nx(&self) -> usize {
        self.spec.x.count
    }

    pub fn ny(&self) -> usize {
        self.spec.y.count
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    /// Writes `x_m,y_m,value,region` rows. Floats use the shortest
    /// round-trip representation, so identical grids give identical bytes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let xs = self.spec.x.nodes();
        let ys = self.spec.y.nodes();
        let mut buf = String::with_capacity(48 * self.values.len() + 32);
        buf.push_str("x_m,y_m,value,region\n");
        for (iy, y) in ys.iter().enumerate() {
            for (ix, x) in xs.iter().enumerate() {
                let k = iy * xs.len() + ix;
                let v = self.values[k];
                let region = match self.mask[k] {
                    Some(r) => r.to_string(),
                    None => "outside".to_string(),
                };
                if v.is_nan() {
                    buf.push_str(&format!("{x},{y},nan,{region}\n"));
                } else {
                    buf.push_str(&format!("{x},{y},{v:e},{region}\n"));
                }
            }
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }
}

impl AsymptoticModel {
    /// Evaluates `quantity` for the source `y` at every grid node.
    ///
    /// Nodes where the quantity is singular (the source itself for `Neps`)
    /// keep their region tag and carry NaN.
    pub fn grid_eval(&self, y: &Point, spec: &GridSpec, quantity: Quantity) -> Result<GridField> {
        if spec.x.count == 0 || spec.y.count == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid counts must be positive, got {}x{}",
                spec.x.count, spec.y.count
            )));
        }
        let scenario = self.scenario();
        if scenario.classify_point(y)? == Region::OuterBoundary {
            return Err(Error::SourceOnBoundary);
        }
        let xs = spec.x.nodes();
        let ys = spec.y.nodes();
        let nx = xs.len();
        let cells: Vec<(f64, Option<Region>)> = (0..nx * ys.len())
            .into_par_iter()
            .map(|k| {
                let p = Point::new(xs[k % nx], ys[k / nx]);
                let region = match scenario.classify_point(&p) {
                    Ok(r) => r,
                    Err(_) => return (f64::NAN, None),
                };
                let value = match quantity {
                    Quantity::Neps => self.n_eps(&p, y).map(|e| e.value),
                    Quantity::Reps => self.r_eps(&p, y).map(|e| e.value),
                    Quantity::GradRepsMagnitude => self.grad_r_eps_one_sided(&p, y).map(|g| g.norm()),
                };
                (value.unwrap_or(f64::NAN), Some(region))
            })
            .collect();
        let (values, mask) = cells.into_iter().unzip();
        Ok(GridField {
            spec: *spec,
            quantity,
            values,
            mask,
        })
    }
}
