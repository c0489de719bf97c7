//! Multi-inclusion asymptotic approximations of `N_eps` and `R_eps`.
//!
//! Each inclusion contributes its model field evaluated in the scaled
//! variables `xi_j = (x - O_j) / eps`, `eta_j = (y - O_j) / eps`, plus two
//! dipole corrections that couple it to the regular part of the unperturbed
//! disk. Branches are chosen from the classified regions of `x` and `y`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Scenario};
use crate::model_fields::{CircularInclusionFields, DiskNeumann, Side};
use crate::numerics::CompensatedSum;

/// Relative tolerance below which one-sided gradients are refused.
pub const TAU_GRAD_RELATIVE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Unperturbed,
    Model,
    LogCorrection,
    DipoleX,
    DipoleY,
    LogEps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    /// Zero-based inclusion index for per-inclusion terms.
    pub inclusion: Option<usize>,
    pub value: f64,
}

impl Term {
    /// `unperturbed`, `model[3]`, ... with one-based indices.
    pub fn label(&self) -> String {
        let base = match self.kind {
            TermKind::Unperturbed => "unperturbed",
            TermKind::Model => "model",
            TermKind::LogCorrection => "log_correction",
            TermKind::DipoleX => "dipole_x",
            TermKind::DipoleY => "dipole_y",
            TermKind::LogEps => "log_eps",
        };
        match self.inclusion {
            Some(j) => format!("{base}[{}]", j + 1),
            None => base.to_string(),
        }
    }
}

/// Value of `N_eps` or `R_eps` with its term breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenEvaluation {
    pub value: f64,
    pub terms: Vec<Term>,
    pub region_x: Region,
    pub region_y: Region,
    /// Distance from `x` to the nearest interface, if there is one.
    pub interface_distance_x: Option<f64>,
    pub warnings: Vec<String>,
}

impl GreenEvaluation {
    fn assemble(terms: Vec<Term>, x: &Located, y: &Located) -> Self {
        let acc: CompensatedSum = terms.iter().map(|t| t.value).collect();
        let mut warnings = Vec::new();
        warnings.extend(x.warning.clone());
        warnings.extend(y.warning.clone());
        GreenEvaluation {
            value: acc.value(),
            terms,
            region_x: x.region,
            region_y: y.region,
            interface_distance_x: x.interface_distance,
            warnings,
        }
    }
}

/// A point after classification, possibly nudged off an interface.
#[derive(Debug, Clone)]
struct Located {
    point: Point,
    region: Region,
    interface_distance: Option<f64>,
    warning: Option<String>,
}

/// Asymptotic model of one scenario.
#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    scenario: Scenario,
    disk: DiskNeumann,
    fields: Vec<CircularInclusionFields>,
}

impl AsymptoticModel {
    /// The scenario is taken as given; run [`Scenario::validate`] first if
    /// its invariants are in doubt.
    pub fn new(scenario: &Scenario) -> Self {
        let mu_o = scenario.mu_o();
        let fields = scenario
            .inclusions
            .iter()
            .map(|inc| {
                CircularInclusionFields::new(inc.radius, mu_o, inc.material.shear_modulus)
                    .with_tau(scenario.tau_geom() / scenario.epsilon)
            })
            .collect();
        Self {
            scenario: scenario.clone(),
            disk: DiskNeumann::new(scenario.outer_radius, mu_o),
            fields,
        }
    }

    /// Use the boundary-normalized disk Neumann function.
    pub fn normalized(mut self, on: bool) -> Self {
        self.disk = self.disk.normalized(on);
        self
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn disk(&self) -> &DiskNeumann {
        &self.disk
    }

    pub fn fields(&self, j: usize) -> &CircularInclusionFields {
        &self.fields[j]
    }

    pub fn tau_grad(&self) -> f64 {
        TAU_GRAD_RELATIVE * self.scenario.outer_radius
    }

    fn locate(&self, x: &Point, nudge: f64) -> Result<Located> {
        let s = &self.scenario;
        let region = s.classify_point(x)?;
        let interface_distance = s.nearest_interface(x).map(|(_, d)| d);
        match region {
            Region::Interface(j) => {
                let c = s.inclusions[j].center;
                let rho = s.physical_radius(j);
                let d = s.signed_interface_distance(j, x);
                let dir = if (x - c).norm() > 0.0 { (x - c).normalize() } else { Point::new(1.0, 0.0) };
                let (target, region) = if d <= 0.0 {
                    (c + dir * (rho - nudge), Region::Inclusion(j))
                } else {
                    (c + dir * (rho + nudge), Region::Matrix)
                };
                Ok(Located {
                    point: target,
                    region,
                    interface_distance,
                    warning: Some(format!(
                        "point ({}, {}) on interface {} moved {nudge:e} m into {region}",
                        x[0],
                        x[1],
                        j + 1
                    )),
                })
            }
            Region::OuterBoundary => Ok(Located {
                point: *x,
                region: Region::Matrix,
                interface_distance,
                warning: None,
            }),
            _ => Ok(Located {
                point: *x,
                region,
                interface_distance,
                warning: None,
            }),
        }
    }

    fn locate_source(&self, y: &Point) -> Result<Located> {
        if self.scenario.classify_point(y)? == Region::OuterBoundary {
            return Err(Error::SourceOnBoundary);
        }
        self.locate(y, 2.0 * self.scenario.tau_geom())
    }

    fn side(region: Region, j: usize) -> Side {
        if region == Region::Inclusion(j) {
            Side::Inner
        } else {
            Side::Outer
        }
    }

    fn scaled(&self, j: usize, p: &Point) -> Point {
        (p - self.scenario.inclusions[j].center) / self.scenario.epsilon
    }

    /// Approximation of the Green's function `N_eps(x, y)`.
    pub fn n_eps(&self, x: &Point, y: &Point) -> Result<GreenEvaluation> {
        let tau = self.scenario.tau_geom();
        let lx = self.locate(x, 2.0 * tau)?;
        let ly = self.locate_source(y)?;
        let (xp, yp) = (lx.point, ly.point);
        let dist = (xp - yp).norm();
        if dist < tau {
            return Err(Error::Singular);
        }
        let eps = self.scenario.epsilon;
        let m = self.scenario.len();
        let mut terms = Vec::with_capacity(2 + 3 * m);
        terms.push(Term {
            kind: TermKind::Unperturbed,
            inclusion: None,
            value: self.disk.neumann(&xp, &yp)?,
        });
        for (j, f) in self.fields.iter().enumerate() {
            let (xi, eta) = (self.scaled(j, &xp), self.scaled(j, &yp));
            let value = f.cal_n_branch(&xi, &eta, Self::side(lx.region, j), Self::side(ly.region, j))?;
            terms.push(Term { kind: TermKind::Model, inclusion: Some(j), value });
        }
        if m > 0 {
            terms.push(Term {
                kind: TermKind::LogCorrection,
                inclusion: None,
                value: m as f64 * (dist / eps).ln() / (2.0 * PI * self.scenario.mu_o()),
            });
        }
        for (dx, dy, j) in self.dipole_terms(&lx, &ly)? {
            terms.push(Term { kind: TermKind::DipoleX, inclusion: Some(j), value: dx });
            terms.push(Term { kind: TermKind::DipoleY, inclusion: Some(j), value: dy });
        }
        Ok(GreenEvaluation::assemble(terms, &lx, &ly))
    }

    /// `eps D(xi_j) . grad_x R(O_j, y)` and `eps D(eta_j) . grad_y R(x, O_j)`.
    fn dipole_terms(&self, lx: &Located, ly: &Located) -> Result<Vec<(f64, f64, usize)>> {
        let eps = self.scenario.epsilon;
        let mut out = Vec::with_capacity(self.fields.len());
        for (j, f) in self.fields.iter().enumerate() {
            let o = self.scenario.inclusions[j].center;
            let dxi = f.dipole_branch(&self.scaled(j, &lx.point), Self::side(lx.region, j))?;
            let deta = f.dipole_branch(&self.scaled(j, &ly.point), Self::side(ly.region, j))?;
            let gx = self.disk.grad_x_regular_part(&o, &ly.point)?;
            let gy = self.disk.grad_y_regular_part(&lx.point, &o)?;
            out.push((eps * dxi.dot(&gx), eps * deta.dot(&gy), j));
        }
        Ok(out)
    }

    /// Coefficient `q` of `-(2 pi)^-1 ln|x - y|` in `N_eps` for a source in
    /// `region`.
    pub fn source_weight(&self, region: Region) -> f64 {
        match region {
            Region::Inclusion(m) => 1.0 / self.scenario.mu_i(m),
            _ => 1.0 / self.scenario.mu_o(),
        }
    }

    /// Approximation of the regular part `R_eps(x, y)` from its direct
    /// formula.
    pub fn r_eps(&self, x: &Point, y: &Point) -> Result<GreenEvaluation> {
        let tau = self.scenario.tau_geom();
        let lx = self.locate(x, 2.0 * tau)?;
        let ly = self.locate_source(y)?;
        self.r_eps_located(&lx, &ly)
    }

    fn r_eps_located(&self, lx: &Located, ly: &Located) -> Result<GreenEvaluation> {
        let (xp, yp) = (lx.point, ly.point);
        let m = self.scenario.len();
        let mut terms = Vec::with_capacity(2 + 3 * m);
        terms.push(Term {
            kind: TermKind::Unperturbed,
            inclusion: None,
            value: self.disk.regular_part(&xp, &yp)?,
        });
        for (j, f) in self.fields.iter().enumerate() {
            let (xi, eta) = (self.scaled(j, &xp), self.scaled(j, &yp));
            let value = f.h_branch(&xi, &eta, Self::side(lx.region, j), Self::side(ly.region, j))?;
            terms.push(Term { kind: TermKind::Model, inclusion: Some(j), value });
        }
        if let Region::Inclusion(host) = ly.region {
            let mu_o = self.scenario.mu_o();
            let mu_i = self.scenario.mu_i(host);
            terms.push(Term {
                kind: TermKind::LogEps,
                inclusion: Some(host),
                value: (1.0 / mu_o - 1.0 / mu_i) * self.scenario.epsilon.ln() / (2.0 * PI),
            });
        }
        for (dx, dy, j) in self.dipole_terms(lx, ly)? {
            terms.push(Term { kind: TermKind::DipoleX, inclusion: Some(j), value: -dx });
            terms.push(Term { kind: TermKind::DipoleY, inclusion: Some(j), value: -dy });
        }
        Ok(GreenEvaluation::assemble(terms, lx, ly))
    }

    fn check_gradient_point(&self, x: &Point) -> Result<()> {
        if let Some((j, d)) = self.scenario.nearest_interface(x) {
            let limit = self.tau_grad();
            if d < limit {
                return Err(Error::InterfaceProximity { inclusion: j, distance: d, limit });
            }
        }
        Ok(())
    }

    /// Analytic `x`-gradient of [`Self::r_eps`].
    pub fn grad_r_eps(&self, x: &Point, y: &Point) -> Result<Point> {
        self.check_gradient_point(x)?;
        let lx = self.locate(x, 2.0 * self.scenario.tau_geom())?;
        let ly = self.locate_source(y)?;
        self.grad_located(&lx, &ly)
    }

    fn grad_located(&self, lx: &Located, ly: &Located) -> Result<Point> {
        let (xp, yp) = (lx.point, ly.point);
        let eps = self.scenario.epsilon;
        let mut acc = [CompensatedSum::new(), CompensatedSum::new()];
        let mut push = |v: Point| {
            acc[0].add(v[0]);
            acc[1].add(v[1]);
        };
        push(self.disk.grad_x_regular_part(&xp, &yp)?);
        for (j, f) in self.fields.iter().enumerate() {
            let (xi, eta) = (self.scaled(j, &xp), self.scaled(j, &yp));
            let (sx, sy) = (Self::side(lx.region, j), Self::side(ly.region, j));
            push(f.grad_h_branch(&xi, &eta, sx, sy)? / eps);
        }
        for (j, f) in self.fields.iter().enumerate() {
            let o = self.scenario.inclusions[j].center;
            let (xi, eta) = (self.scaled(j, &xp), self.scaled(j, &yp));
            let jac = f.dipole_jacobian(&xi, Self::side(lx.region, j))?;
            let gx = self.disk.grad_x_regular_part(&o, &yp)?;
            push(-(jac.transpose() * gx));
            let deta = f.dipole_branch(&eta, Self::side(ly.region, j))?;
            let hess = self.disk.mixed_hessian(&xp, &o)?;
            push(-(hess * deta) * eps);
        }
        Ok(Point::new(acc[0].value(), acc[1].value()))
    }

    /// Central-difference gradient of [`Self::r_eps`] with step `h`, kept
    /// on the side of `x`.
    pub fn grad_r_eps_fd(&self, x: &Point, y: &Point, h: f64) -> Result<Point> {
        self.check_gradient_point(x)?;
        let lx = self.locate(x, 2.0 * self.scenario.tau_geom())?;
        let ly = self.locate_source(y)?;
        let eval = |p: Point| -> Result<f64> {
            let shifted = Located { point: p, region: lx.region, interface_distance: None, warning: None };
            Ok(self.r_eps_located(&shifted, &ly)?.value)
        };
        let ex = Point::new(h, 0.0);
        let ey = Point::new(0.0, h);
        Ok(Point::new(
            (eval(lx.point + ex)? - eval(lx.point - ex)?) / (2.0 * h),
            (eval(lx.point + ey)? - eval(lx.point - ey)?) / (2.0 * h),
        ))
    }

    /// Gradient used on grids: points closer than `tau_grad` to an
    /// interface are moved to `2 tau_grad` on their own side first.
    pub fn grad_r_eps_one_sided(&self, x: &Point, y: &Point) -> Result<Point> {
        let lx = self.locate_one_sided(x)?;
        let ly = self.locate_source(y)?;
        self.grad_located(&lx, &ly)
    }

    fn locate_one_sided(&self, x: &Point) -> Result<Located> {
        let limit = self.tau_grad();
        if let Some((j, d)) = self.scenario.nearest_interface(x) {
            if d < limit {
                let s = &self.scenario;
                let c = s.inclusions[j].center;
                let dir = if (x - c).norm() > 0.0 { (x - c).normalize() } else { Point::new(1.0, 0.0) };
                let (target, region) = if s.signed_interface_distance(j, x) <= 0.0 {
                    (c + dir * (s.physical_radius(j) - 2.0 * limit), Region::Inclusion(j))
                } else {
                    (c + dir * (s.physical_radius(j) + 2.0 * limit), Region::Matrix)
                };
                return Ok(Located { point: target, region, interface_distance: Some(d), warning: None });
            }
        }
        self.locate(x, 2.0 * self.scenario.tau_geom())
    }

    /// `-(q / 2 pi) ln|x - y| - N_eps(x, y)`, the conversion between the two
    /// approximations.
    pub fn r_eps_from_n_eps(&self, x: &Point, y: &Point) -> Result<f64> {
        let n = self.n_eps(x, y)?;
        let q = self.source_weight(n.region_y);
        Ok(-q * (x - y).norm().ln() / (2.0 * PI) - n.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn empty_scenario_reduces_to_disk() {
        let s = Scenario::new(150.0, 5.6e10);
        let m = AsymptoticModel::new(&s);
        let (x, y) = (point(10.0, 10.0), point(-10.0, -80.0));
        let n = m.n_eps(&x, &y).unwrap();
        assert_eq!(n.terms.len(), 1);
        assert_eq!(n.value, m.disk().neumann(&x, &y).unwrap());
        let r = m.r_eps(&x, &y).unwrap();
        assert_eq!(r.value, m.disk().regular_part(&x, &y).unwrap());
        assert_eq!(m.grad_r_eps(&x, &y).unwrap(), m.disk().grad_x_regular_part(&x, &y).unwrap());
    }

    #[test]
    fn homogeneous_inclusions_cancel() {
        let s = Scenario::table1().homogenized();
        let m = AsymptoticModel::new(&s);
        for (x, y) in [(point(10.0, 10.0), point(-10.0, -80.0)), (point(55.0, 3.0), point(60.0, 0.0))] {
            let n = m.n_eps(&x, &y).unwrap();
            let n0 = m.disk().neumann(&x, &y).unwrap();
            assert!(rel(n.value, n0) < 1e-13, "{} vs {n0}", n.value);
            let g = m.grad_r_eps(&x, &y).unwrap();
            let g0 = m.disk().grad_x_regular_part(&x, &y).unwrap();
            assert!((g - g0).norm() <= 1e-13 * g0.norm());
        }
    }

    #[test]
    fn breakdown_order_and_labels() {
        let m = AsymptoticModel::new(&Scenario::table1());
        let r = m.r_eps(&point(10.0, 10.0), &point(60.0, 0.0)).unwrap();
        let labels: Vec<String> = r.terms.iter().map(Term::label).collect();
        assert_eq!(labels[0], "unperturbed");
        assert_eq!(labels[1], "model[1]");
        assert_eq!(labels[6], "model[6]");
        assert_eq!(labels[7], "log_eps[5]");
        assert_eq!(labels[8], "dipole_x[1]");
        assert_eq!(labels[9], "dipole_y[1]");
        assert_eq!(r.terms.len(), 1 + 6 + 1 + 12);
        assert_eq!(r.region_y, Region::Inclusion(4));
        // eps = 1 leaves the log term at zero
        assert_eq!(r.terms[7].value, 0.0);
        let naive: f64 = r.terms.iter().map(|t| t.value).sum();
        assert!(rel(naive, r.value) < 1e-14);
    }

    #[test]
    fn singular_and_domain_errors() {
        let m = AsymptoticModel::new(&Scenario::table1());
        let p = point(10.0, 10.0);
        assert!(matches!(m.n_eps(&p, &p), Err(Error::Singular)));
        assert!(matches!(m.n_eps(&point(200.0, 0.0), &p), Err(Error::OutOfDomain { .. })));
        assert!(matches!(m.n_eps(&p, &point(0.0, 150.0)), Err(Error::SourceOnBoundary)));
        assert!(m.r_eps(&p, &p).is_ok());
    }

    #[test]
    fn interface_points_are_nudged_with_a_warning() {
        let m = AsymptoticModel::new(&Scenario::table1());
        let on = point(50.0 + 22.5, 0.0);
        let r = m.r_eps(&on, &point(-10.0, -80.0)).unwrap();
        // ties go to the interior
        assert_eq!(r.region_x, Region::Inclusion(4));
        let off = m.r_eps(&point(72.5 + 1e-8, 0.0), &point(-10.0, -80.0)).unwrap();
        assert_eq!(off.region_x, Region::Matrix);
        assert!(rel(off.value, r.value) < 1e-8);
        assert_eq!(r.warnings.len(), 1);
        assert!(matches!(m.grad_r_eps(&on, &point(-10.0, -80.0)), Err(Error::InterfaceProximity { inclusion: 4, .. })));
        assert!(m.grad_r_eps_one_sided(&on, &point(-10.0, -80.0)).is_ok());
    }

    #[test]
    fn r_eps_continuous_across_interfaces() {
        let s = Scenario::table1();
        let m = AsymptoticModel::new(&s);
        for y in [point(-10.0, -80.0), point(60.0, 0.0)] {
            let ly = m.locate_source(&y).unwrap();
            for j in 0..s.len() {
                let c = s.inclusions[j].center;
                let rho = s.physical_radius(j);
                for k in 0..64 {
                    let t = 2.0 * PI * (k as f64 + 0.5) / 64.0;
                    let p = c + point(t.cos(), t.sin()) * rho;
                    let at = |region| Located { point: p, region, interface_distance: None, warning: None };
                    let out = m.r_eps_located(&at(Region::Matrix), &ly).unwrap().value;
                    let inn = m.r_eps_located(&at(Region::Inclusion(j)), &ly).unwrap().value;
                    assert!(rel(out, inn) < 1e-10, "inclusion {j}: {out} vs {inn}");
                }
            }
        }
    }

    #[test]
    fn log_eps_term_scales_with_epsilon() {
        let s = Scenario::single_aluminium().with_epsilon(0.5);
        let m = AsymptoticModel::new(&s);
        let r = m.r_eps(&point(12.0, 5.0), &point(1.0, 0.5)).unwrap();
        let t = r.terms.iter().find(|t| t.kind == TermKind::LogEps).unwrap();
        let expected = (1.0 / 5.6e10 - 1.0 / 2.6316e10) * 0.5f64.ln() / (2.0 * PI);
        assert!(rel(t.value, expected) < 1e-15);
    }

    fn admissible(s: &Scenario) -> impl Strategy<Value = Point> + '_ {
        (0.0..0.95f64, 0.0..(2.0 * PI)).prop_map(move |(r, t)| {
            let r = r.sqrt() * s.outer_radius;
            point(r * t.cos(), r * t.sin())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conversion_identity(x in admissible(&TABLE1), y in admissible(&TABLE1)) {
            let m = AsymptoticModel::new(&TABLE1);
            prop_assume!((x - y).norm() > 1e-3);
            prop_assume!(TABLE1.nearest_interface(&x).unwrap().1 > 1e-6);
            prop_assume!(TABLE1.nearest_interface(&y).unwrap().1 > 1e-6);
            let direct = m.r_eps(&x, &y).unwrap().value;
            let via = m.r_eps_from_n_eps(&x, &y).unwrap();
            prop_assert!(rel(direct, via) <= 1e-12);
        }

        #[test]
        fn outer_symmetry_and_scale_invariance(x in admissible(&TABLE1), y in admissible(&TABLE1), s in 0.2..1.0f64) {
            let scaled = TABLE1.scale_family(s).unwrap();
            let m = AsymptoticModel::new(&scaled);
            prop_assume!((x - y).norm() > 1e-3);
            prop_assume!(scaled.classify_point(&x).unwrap() == Region::Matrix);
            prop_assume!(scaled.classify_point(&y).unwrap() == Region::Matrix);
            let a = m.n_eps(&x, &y).unwrap().value;
            let b = m.n_eps(&y, &x).unwrap().value;
            prop_assert!(rel(a, b) <= 1e-12);
        }

        #[test]
        fn gradient_matches_differences(x in admissible(&TABLE1), y in admissible(&TABLE1)) {
            let m = AsymptoticModel::new(&TABLE1);
            prop_assume!((x - y).norm() > 1.0);
            prop_assume!(TABLE1.nearest_interface(&x).unwrap().1 > 0.5);
            prop_assume!(TABLE1.nearest_interface(&y).unwrap().1 > 1e-6);
            let g = m.grad_r_eps(&x, &y).unwrap();
            let fd = m.grad_r_eps_fd(&x, &y, 1e-6 * 150.0).unwrap();
            prop_assert!((g - fd).norm() <= 1e-6 * g.norm());
        }
    }

    static TABLE1: std::sync::LazyLock<Scenario> = std::sync::LazyLock::new(Scenario::table1);
}
