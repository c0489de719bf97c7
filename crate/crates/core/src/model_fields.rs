//! Closed-form model solutions.
//!
//! * [`DiskNeumann`]: Neumann function of a disk of radius `R` centred at
//!   the origin, its regular part and their derivatives.
//! * [`CircularInclusionFields`]: transmission Green's function of a single
//!   circular inclusion of radius `a` centred at the origin of the infinite
//!   plane, its regular parts `h` and the dipole fields, all in scaled
//!   coordinates.
//!
//! Image-point products are evaluated through the quadratic forms
//!
//! ```text
//! |x - R^2 y/|y|^2|^2 |y|^2        = |x|^2 |y|^2 - 2 R^2 x.y + R^4
//! (|eta|/a)^2 |xi - a^2 eta/|eta|^2|^2 = |eta|^2 |xi|^2 / a^2 - 2 xi.eta + a^2
//! ```
//!
//! which stay finite when the source approaches the centre.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, TAU_GEOM_RELATIVE};

/// Neumann function of the disk `|x| < R` for the operator `mu_O Laplace`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskNeumann {
    pub radius: f64,
    pub mu_o: f64,
    /// Add the constant that makes the boundary integral of `N` vanish.
    /// Off by default: the bare closed form only has that property for
    /// `R = 1`.
    pub normalized: bool,
    tau: f64,
}

impl DiskNeumann {
    pub fn new(radius: f64, mu_o: f64) -> Self {
        Self {
            radius,
            mu_o,
            normalized: false,
            tau: TAU_GEOM_RELATIVE * radius,
        }
    }

    pub fn normalized(mut self, on: bool) -> Self {
        self.normalized = on;
        self
    }

    /// `3 ln R / (2 pi mu_O)`: added to `N` (subtracted from the regular
    /// part) when normalization is on.
    pub fn normalization_constant(&self) -> f64 {
        3.0 * self.radius.ln() / (2.0 * PI * self.mu_o)
    }

    fn shift(&self) -> f64 {
        if self.normalized {
            self.normalization_constant()
        } else {
            0.0
        }
    }

    fn image_quadratic(&self, x: &Point, y: &Point) -> Result<f64> {
        let r2 = self.radius * self.radius;
        let q = x.norm_squared() * y.norm_squared() - 2.0 * r2 * x.dot(y) + r2 * r2;
        if !(q > (self.tau * self.radius).powi(2)) {
            return Err(Error::ImagePoint);
        }
        Ok(q)
    }

    /// `N(x, y) = -(2 pi mu_O)^-1 [ln|x - y| + ln(|x - R^2 y/|y|^2| |y|)]`.
    pub fn neumann(&self, x: &Point, y: &Point) -> Result<f64> {
        let d = (x - y).norm();
        if d < self.tau {
            return Err(Error::Singular);
        }
        let q = self.image_quadratic(x, y)?;
        Ok(-(d.ln() + 0.5 * q.ln()) / (2.0 * PI * self.mu_o) + self.shift())
    }

    /// Regular part `R(x, y) = -(2 pi mu_O)^-1 ln|x - y| - N(x, y)`.
    pub fn regular_part(&self, x: &Point, y: &Point) -> Result<f64> {
        let q = self.image_quadratic(x, y)?;
        Ok(q.ln() / (4.0 * PI * self.mu_o) - self.shift())
    }

    /// Gradient of the regular part in its first argument.
    pub fn grad_x_regular_part(&self, x: &Point, y: &Point) -> Result<Point> {
        let q = self.image_quadratic(x, y)?;
        let r2 = self.radius * self.radius;
        let dq = x * (2.0 * y.norm_squared()) - y * (2.0 * r2);
        Ok(dq / (4.0 * PI * self.mu_o * q))
    }

    /// Gradient of the regular part in its second argument.
    pub fn grad_y_regular_part(&self, x: &Point, y: &Point) -> Result<Point> {
        self.grad_x_regular_part(y, x)
    }

    /// Mixed second derivatives `H[i][k] = d^2 R / dx_i dy_k`.
    pub fn mixed_hessian(&self, x: &Point, y: &Point) -> Result<Matrix2<f64>> {
        let q = self.image_quadratic(x, y)?;
        let r2 = self.radius * self.radius;
        let qx = x * (2.0 * y.norm_squared()) - y * (2.0 * r2);
        let qy = y * (2.0 * x.norm_squared()) - x * (2.0 * r2);
        let qxy = x * y.transpose() * 4.0 - Matrix2::identity() * (2.0 * r2);
        Ok((qxy / q - qx * qy.transpose() / (q * q)) / (4.0 * PI * self.mu_o))
    }
}

/// Side of a scaled point relative to the model inclusion `|xi| < a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Outer,
    Inner,
}

/// Model fields of a circular inclusion of radius `a` centred at the origin
/// of the infinite plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularInclusionFields {
    pub radius: f64,
    pub mu_o: f64,
    pub mu_i: f64,
    /// `(mu_I - mu_O) / (mu_I + mu_O)`.
    pub kappa: f64,
    /// Branch tolerance in scaled units.
    pub tau: f64,
}

impl CircularInclusionFields {
    pub fn new(radius: f64, mu_o: f64, mu_i: f64) -> Self {
        Self {
            radius,
            mu_o,
            mu_i,
            kappa: (mu_i - mu_o) / (mu_i + mu_o),
            tau: TAU_GEOM_RELATIVE * radius,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Interior branch on ties.
    pub fn side(&self, xi: &Point) -> Side {
        if xi.norm() - self.radius <= self.tau {
            Side::Inner
        } else {
            Side::Outer
        }
    }

    fn require_side(&self, eta: &Point, want: Side) -> Result<()> {
        let have = self.side(eta);
        if have != want {
            return Err(Error::InvalidParameter(format!(
                "source at |eta| = {} is on the {:?} side of the model inclusion of radius {}",
                eta.norm(),
                have,
                self.radius
            )));
        }
        Ok(())
    }

    fn outer_quadratic(&self, xi: &Point, eta: &Point) -> Result<f64> {
        // |xi|^2 |eta|^2 - 2 a^2 xi.eta + a^4 = |eta|^2 |xi - a^2 eta/|eta|^2|^2
        let a2 = self.radius * self.radius;
        let q = xi.norm_squared() * eta.norm_squared() - 2.0 * a2 * xi.dot(eta) + a2 * a2;
        if !(q > (self.tau * self.radius).powi(2)) {
            return Err(Error::ImagePoint);
        }
        Ok(q)
    }

    fn inner_quadratic(&self, xi: &Point, eta: &Point) -> Result<f64> {
        // |eta|^2 |xi|^2 / a^2 - 2 xi.eta + a^2 = (|eta|/a)^2 |xi - a^2 eta/|eta|^2|^2
        let a2 = self.radius * self.radius;
        let q = eta.norm_squared() * xi.norm_squared() / a2 - 2.0 * xi.dot(eta) + a2;
        if !(q > (self.tau * self.radius).powi(2)) {
            return Err(Error::ImagePoint);
        }
        Ok(q)
    }

    fn distinct(&self, xi: &Point, eta: &Point) -> Result<f64> {
        let d = (xi - eta).norm();
        if d < self.tau {
            return Err(Error::Singular);
        }
        Ok(d)
    }

    /// Regular part `h^(O)` for a source outside the inclusion, with the
    /// field-point branch chosen from `|xi|`.
    pub fn h_outer(&self, xi: &Point, eta: &Point) -> Result<f64> {
        self.require_side(eta, Side::Outer)?;
        self.h_outer_branch(xi, eta, self.side(xi))
    }

    /// `h^(O)` on an explicit field-point branch.
    pub fn h_outer_branch(&self, xi: &Point, eta: &Point, xi_side: Side) -> Result<f64> {
        let c = self.kappa / (2.0 * PI * self.mu_o);
        match xi_side {
            Side::Outer => {
                let q = self.outer_quadratic(xi, eta)?;
                let denom = xi.norm_squared() * eta.norm_squared();
                Ok(-0.5 * c * (q / denom).ln())
            }
            Side::Inner => {
                let d = self.distinct(xi, eta)?;
                Ok(c * (eta.norm().ln() - d.ln()))
            }
        }
    }

    /// Regular part `h^(I)` for a source inside the inclusion, with the
    /// field-point branch chosen from `|xi|`.
    pub fn h_inner(&self, xi: &Point, eta: &Point) -> Result<f64> {
        self.require_side(eta, Side::Inner)?;
        self.h_inner_branch(xi, eta, self.side(xi))
    }

    /// `h^(I)` on an explicit field-point branch.
    pub fn h_inner_branch(&self, xi: &Point, eta: &Point, xi_side: Side) -> Result<f64> {
        let c = self.kappa / (2.0 * PI);
        match xi_side {
            Side::Outer => {
                let d = self.distinct(xi, eta)?;
                Ok(c * (d.ln() / self.mu_i + xi.norm().ln() / self.mu_o))
            }
            Side::Inner => {
                let q = self.inner_quadratic(xi, eta)?;
                Ok(c * (0.5 * q.ln() / self.mu_i + self.radius.ln() / self.mu_o))
            }
        }
    }

    /// Regular part for a source on `eta_side`, field point on `xi_side`.
    pub fn h_branch(&self, xi: &Point, eta: &Point, xi_side: Side, eta_side: Side) -> Result<f64> {
        match eta_side {
            Side::Outer => self.h_outer_branch(xi, eta, xi_side),
            Side::Inner => self.h_inner_branch(xi, eta, xi_side),
        }
    }

    /// `xi`-gradient of the regular part on explicit branches.
    pub fn grad_h_branch(&self, xi: &Point, eta: &Point, xi_side: Side, eta_side: Side) -> Result<Point> {
        match (eta_side, xi_side) {
            (Side::Outer, Side::Outer) => {
                let q = self.outer_quadratic(xi, eta)?;
                let a2 = self.radius * self.radius;
                let dq = xi * (2.0 * eta.norm_squared()) - eta * (2.0 * a2);
                let c = self.kappa / (2.0 * PI * self.mu_o);
                Ok(-0.5 * c * (dq / q - xi * (2.0 / xi.norm_squared())))
            }
            (Side::Outer, Side::Inner) => {
                let d = self.distinct(xi, eta)?;
                let c = self.kappa / (2.0 * PI * self.mu_o);
                Ok(-c * (xi - eta) / (d * d))
            }
            (Side::Inner, Side::Outer) => {
                let d = self.distinct(xi, eta)?;
                let c = self.kappa / (2.0 * PI);
                Ok(c * ((xi - eta) / (d * d * self.mu_i) + xi / (xi.norm_squared() * self.mu_o)))
            }
            (Side::Inner, Side::Inner) => {
                let q = self.inner_quadratic(xi, eta)?;
                let a2 = self.radius * self.radius;
                let dq = xi * (2.0 * eta.norm_squared() / a2) - eta * 2.0;
                let c = self.kappa / (2.0 * PI * self.mu_i);
                Ok(0.5 * c * dq / q)
            }
        }
    }

    /// Transmission Green's function `calN(xi, eta)` with branches from
    /// `|xi|` and `|eta|`.
    pub fn cal_n(&self, xi: &Point, eta: &Point) -> Result<f64> {
        self.cal_n_branch(xi, eta, self.side(xi), self.side(eta))
    }

    /// `calN = -(2 pi mu)^-1 ln|xi - eta| - h`, where `mu` is the modulus of
    /// the material containing the source.
    pub fn cal_n_branch(&self, xi: &Point, eta: &Point, xi_side: Side, eta_side: Side) -> Result<f64> {
        let d = self.distinct(xi, eta)?;
        let mu = match eta_side {
            Side::Outer => self.mu_o,
            Side::Inner => self.mu_i,
        };
        Ok(-d.ln() / (2.0 * PI * mu) - self.h_branch(xi, eta, xi_side, eta_side)?)
    }

    /// `xi`-gradient of `calN` on explicit branches.
    pub fn grad_cal_n_branch(&self, xi: &Point, eta: &Point, xi_side: Side, eta_side: Side) -> Result<Point> {
        let d = self.distinct(xi, eta)?;
        let mu = match eta_side {
            Side::Outer => self.mu_o,
            Side::Inner => self.mu_i,
        };
        Ok(-(xi - eta) / (2.0 * PI * mu * d * d) - self.grad_h_branch(xi, eta, xi_side, eta_side)?)
    }

    /// Dipole field with the branch chosen from `|xi|`.
    pub fn dipole(&self, xi: &Point) -> Result<Point> {
        self.dipole_branch(xi, self.side(xi))
    }

    /// `kappa a^2 xi / |xi|^2` outside, `kappa xi` inside.
    pub fn dipole_branch(&self, xi: &Point, side: Side) -> Result<Point> {
        match side {
            Side::Outer => {
                let r2 = xi.norm_squared();
                if r2 == 0.0 {
                    return Err(Error::Singular);
                }
                Ok(xi * (self.kappa * self.radius * self.radius / r2))
            }
            Side::Inner => Ok(xi * self.kappa),
        }
    }

    /// Jacobian `J[i][k] = d D_i / d xi_k` (symmetric).
    pub fn dipole_jacobian(&self, xi: &Point, side: Side) -> Result<Matrix2<f64>> {
        match side {
            Side::Outer => {
                let r2 = xi.norm_squared();
                if r2 == 0.0 {
                    return Err(Error::Singular);
                }
                let k = self.kappa * self.radius * self.radius;
                Ok((Matrix2::identity() * r2 - xi * xi.transpose() * 2.0) * (k / (r2 * r2)))
            }
            Side::Inner => Ok(Matrix2::identity() * self.kappa),
        }
    }
}
