//! Reference solver for the exact regular-part problem.
//!
//! `R_eps(., y)` is expanded in harmonic functions on each region
//! (regular modes about the origin plus multipoles about every inclusion
//! in the matrix, regular modes inside every inclusion) and the outer
//! Neumann condition, the interface traction and continuity conditions and
//! the boundary orthogonality condition are imposed by least squares.
//!
//! Internally the unknown is the dimensionless `U = mu_O R_eps`. Outer
//! rows are multiplied by `R` and interface rows by the inclusion radius,
//! so every residual reported here is dimensionless.

pub mod basis;
pub mod qr;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::AsymptoticModel;
use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Scenario};
use crate::numerics::CompensatedSum;
use crate::probes::ProbeSet;

pub use basis::{BasisKind, Group, Sample, TrefftzBasis};
use qr::{ColMajor, PivotedQr};

/// Relative rank tolerance of the factorization.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Collocation points per circle are `oversample * (2 n_modes + 1)`.
pub const DEFAULT_OVERSAMPLE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    ExteriorNeumann,
    InterfaceContinuity,
    InterfaceTraction,
    Orthogonality,
}

const CONDITIONS: [Condition; 4] = [
    Condition::ExteriorNeumann,
    Condition::InterfaceContinuity,
    Condition::InterfaceTraction,
    Condition::Orthogonality,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub n_modes: usize,
    pub oversample: usize,
    pub basis: BasisKind,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { n_modes: 32, oversample: DEFAULT_OVERSAMPLE, basis: BasisKind::NeumannAdapted }
    }
}

impl OracleOptions {
    pub fn with_modes(n_modes: usize) -> Self {
        Self { n_modes, ..Self::default() }
    }
}

/// One collocation row before weighting.
#[derive(Debug, Clone)]
struct Row {
    condition: Condition,
    entries: Vec<(usize, f64)>,
    rhs: f64,
}

/// Weighted least-squares system.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub scenario: Scenario,
    pub y: Point,
    pub region_y: Region,
    pub options: OracleOptions,
    pub basis: TrefftzBasis,
    pub matrix: ColMajor,
    pub rhs: Vec<f64>,
    pub conditions: Vec<Condition>,
    pub weights: Vec<f64>,
    /// Points per circle.
    pub n_colloc: usize,
}

/// Residual summary of one condition group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub condition: Condition,
    pub count: usize,
    pub max: f64,
    pub rms: f64,
    /// Row weight of the group in the solve.
    pub weight: f64,
}

impl ResidualStats {
    pub fn weighted_max(&self) -> f64 {
        self.max * self.weight
    }
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub scenario: Scenario,
    pub y: Point,
    pub region_y: Region,
    pub options: OracleOptions,
    pub basis: TrefftzBasis,
    /// Coefficients of `U = mu_O R_eps`.
    pub coefficients: Vec<f64>,
    pub residual_stats: Vec<ResidualStats>,
    pub n_colloc: usize,
}

/// `mu_O q`, the dimensionless weight of the logarithm for a source in
/// `region`.
fn source_weight(scenario: &Scenario, region: Region) -> f64 {
    match region {
        Region::Inclusion(m) => scenario.mu_o() / scenario.mu_i(m),
        _ => 1.0,
    }
}

fn circle_points(center: Point, radius: f64, n: usize, phase: f64) -> Vec<(Point, Point)> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + phase) / n as f64;
            let normal = Point::new(t.cos(), t.sin());
            (center + normal * radius, normal)
        })
        .collect()
}

/// `d/dn ln|x - y|`.
fn dn_log(x: &Point, y: &Point, n: &Point) -> f64 {
    let d = x - y;
    d.dot(n) / d.norm_squared()
}

struct Assembler<'a> {
    scenario: &'a Scenario,
    basis: &'a TrefftzBasis,
    y: Point,
    q_hat: f64,
}

impl Assembler<'_> {
    fn group_samples(&self, group: Group, p: &Point) -> Vec<Sample> {
        let mut out = vec![Sample::default(); self.basis.group_len()];
        self.basis.eval_group(group, p[0], p[1], &mut out);
        out
    }

    /// Value and normal-derivative coefficients of the matrix expansion.
    fn matrix_entries(&self, p: &Point, n: &Point, value_scale: f64, flux_scale: f64) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
        let mut vals = Vec::new();
        let mut flux = Vec::new();
        for g in self.basis.matrix_groups() {
            let off = self.basis.offset(g);
            for (k, s) in self.group_samples(g, p).into_iter().enumerate() {
                vals.push((off + k, value_scale * s.value));
                flux.push((off + k, flux_scale * (s.grad[0] * n[0] + s.grad[1] * n[1])));
            }
        }
        (vals, flux)
    }

    fn outer_rows(&self, n_pts: usize, phase: f64) -> Vec<Row> {
        let r = self.scenario.outer_radius;
        circle_points(Point::zeros(), r, n_pts, phase)
            .into_par_iter()
            .map(|(p, n)| {
                let (_, flux) = self.matrix_entries(&p, &n, 0.0, r);
                Row {
                    condition: Condition::ExteriorNeumann,
                    entries: flux,
                    rhs: -self.q_hat / (2.0 * PI) * r * dn_log(&p, &self.y, &n) + 1.0 / (2.0 * PI),
                }
            })
            .collect()
    }

    fn interface_rows(&self, j: usize, n_pts: usize, phase: f64) -> Vec<Row> {
        let inc = &self.scenario.inclusions[j];
        let rho = self.scenario.physical_radius(j);
        let ratio = inc.material.shear_modulus / self.scenario.mu_o();
        let interior = Group::Interior(j);
        let off = self.basis.offset(interior);
        circle_points(inc.center, rho, n_pts, phase)
            .into_par_iter()
            .flat_map_iter(|(p, n)| {
                let (mut cont, mut trac) = self.matrix_entries(&p, &n, 1.0, -rho);
                for (k, s) in self.group_samples(interior, &p).into_iter().enumerate() {
                    cont.push((off + k, -s.value));
                    trac.push((off + k, rho * ratio * (s.grad[0] * n[0] + s.grad[1] * n[1])));
                }
                let forcing = -rho * (ratio - 1.0) * self.q_hat / (2.0 * PI) * dn_log(&p, &self.y, &n);
                [
                    Row { condition: Condition::InterfaceContinuity, entries: cont, rhs: 0.0 },
                    Row { condition: Condition::InterfaceTraction, entries: trac, rhs: forcing },
                ]
            })
            .collect()
    }

    /// Trapezoid mean of `U` over the outer circle equals the mean of
    /// `-(q_hat / 2 pi) ln|x - y|`, which is `-(q_hat / 2 pi) ln R`.
    fn orthogonality_row(&self, n_pts: usize, phase: f64) -> Row {
        let r = self.scenario.outer_radius;
        let mut acc = vec![0.0; self.basis.n_columns()];
        for (p, n) in circle_points(Point::zeros(), r, n_pts, phase) {
            let (vals, _) = self.matrix_entries(&p, &n, 1.0 / n_pts as f64, 0.0);
            for (c, v) in vals {
                acc[c] += v;
            }
        }
        Row {
            condition: Condition::Orthogonality,
            entries: acc.into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect(),
            rhs: -self.q_hat / (2.0 * PI) * r.ln(),
        }
    }

    fn rows(&self, n_pts: usize, phase: f64) -> Vec<Row> {
        let mut rows = self.outer_rows(n_pts, phase);
        for j in 0..self.scenario.len() {
            rows.extend(self.interface_rows(j, n_pts, phase));
        }
        rows.push(self.orthogonality_row(n_pts, phase));
        rows
    }
}

fn check_source(scenario: &Scenario, y: &Point) -> Result<Region> {
    match scenario.classify_point(y)? {
        Region::OuterBoundary => Err(Error::SourceOnBoundary),
        Region::Interface(j) => Err(Error::InterfaceProximity {
            inclusion: j,
            distance: scenario.signed_interface_distance(j, y).abs(),
            limit: scenario.tau_geom(),
        }),
        r => Ok(r),
    }
}

/// Assembles the weighted collocation system for the source `y`.
pub fn build_system(scenario: &Scenario, y: &Point, options: OracleOptions) -> Result<CollocationSystem> {
    if options.n_modes < 4 {
        return Err(Error::InvalidParameter(format!("n_modes must be at least 4, got {}", options.n_modes)));
    }
    if options.oversample < 1 {
        return Err(Error::InvalidParameter("oversample must be at least 1".into()));
    }
    let region_y = check_source(scenario, y)?;
    let basis = TrefftzBasis::new(scenario, options.n_modes, options.basis);
    let n_colloc = options.oversample * (2 * options.n_modes + 1);
    let asm = Assembler { scenario, basis: &basis, y: *y, q_hat: source_weight(scenario, region_y) };
    let rows = asm.rows(n_colloc, 0.5);

    // unit rms of row norms within each condition group
    let mut weight_of = std::collections::HashMap::new();
    for c in CONDITIONS {
        let norms: Vec<f64> = rows
            .iter()
            .filter(|r| r.condition == c)
            .map(|r| r.entries.iter().map(|(_, v)| v * v).sum::<f64>())
            .collect();
        if !norms.is_empty() {
            let rms = (norms.iter().sum::<f64>() / norms.len() as f64).sqrt();
            weight_of.insert(c, if rms > 0.0 { 1.0 / rms } else { 1.0 });
        }
    }

    let mut matrix = ColMajor::zeros(rows.len(), basis.n_columns());
    let mut rhs = Vec::with_capacity(rows.len());
    let mut conditions = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let w = weight_of[&row.condition];
        for (c, v) in &row.entries {
            let cur = matrix.get(i, *c);
            matrix.set(i, *c, cur + w * v);
        }
        rhs.push(w * row.rhs);
        conditions.push(row.condition);
        weights.push(w);
    }
    Ok(CollocationSystem {
        scenario: scenario.clone(),
        y: *y,
        region_y,
        options,
        basis,
        matrix,
        rhs,
        conditions,
        weights,
        n_colloc,
    })
}

/// Solves the system and measures residuals on a denser, disjoint point
/// set.
pub fn solve(system: CollocationSystem) -> Result<OracleSolution> {
    let CollocationSystem { scenario, y, region_y, options, basis, matrix, rhs, conditions, weights, n_colloc } = system;
    let qr = PivotedQr::factor(matrix, RANK_TOLERANCE).map_err(|e| Error::IllConditioned {
        group: basis.group_of(e.column).to_string(),
        pivot: e.pivot,
        tolerance: e.tolerance,
    })?;
    let coefficients = qr.solve(&rhs);

    let mut weight_of = std::collections::HashMap::new();
    for (c, w) in conditions.iter().zip(&weights) {
        weight_of.insert(*c, *w);
    }
    let asm = Assembler { scenario: &scenario, basis: &basis, y, q_hat: source_weight(&scenario, region_y) };
    let check = asm.rows(2 * n_colloc, 0.25);
    let mut residual_stats = Vec::new();
    for c in CONDITIONS {
        let res: Vec<f64> = check
            .iter()
            .filter(|r| r.condition == c)
            .map(|r| {
                let acc: CompensatedSum = r.entries.iter().map(|(k, v)| v * coefficients[*k]).collect();
                acc.value() - r.rhs
            })
            .collect();
        if res.is_empty() {
            continue;
        }
        let max = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rms = (res.iter().map(|v| v * v).sum::<f64>() / res.len() as f64).sqrt();
        residual_stats.push(ResidualStats {
            condition: c,
            count: res.len(),
            max,
            rms,
            weight: weight_of.get(&c).copied().unwrap_or(1.0),
        });
    }
    Ok(OracleSolution { scenario, y, region_y, options, basis, coefficients, residual_stats, n_colloc })
}

/// Builds and solves in one step.
pub fn solve_for(scenario: &Scenario, y: &Point, options: OracleOptions) -> Result<OracleSolution> {
    solve(build_system(scenario, y, options)?)
}

impl OracleSolution {
    pub fn stats(&self, condition: Condition) -> Option<&ResidualStats> {
        self.residual_stats.iter().find(|s| s.condition == condition)
    }

    /// Largest weighted verification residual over all groups.
    pub fn max_weighted_residual(&self) -> f64 {
        self.residual_stats.iter().map(ResidualStats::weighted_max).fold(0.0, f64::max)
    }

    /// Largest unweighted verification residual over all groups.
    pub fn max_residual(&self) -> f64 {
        self.residual_stats.iter().map(|s| s.max).fold(0.0, f64::max)
    }

    fn groups_at(&self, region: Region) -> Vec<Group> {
        match region {
            Region::Inclusion(j) => vec![Group::Interior(j)],
            _ => self.basis.matrix_groups().collect(),
        }
    }

    fn accumulate(&self, x: &Point, region: Region) -> (f64, Point) {
        let mut v = CompensatedSum::new();
        let mut gx = CompensatedSum::new();
        let mut gy = CompensatedSum::new();
        let mut buf = vec![Sample::default(); self.basis.group_len()];
        for g in self.groups_at(region) {
            self.basis.eval_group(g, x[0], x[1], &mut buf);
            let off = self.basis.offset(g);
            for (k, s) in buf.iter().enumerate() {
                let c = self.coefficients[off + k];
                v.add(c * s.value);
                gx.add(c * s.grad[0]);
                gy.add(c * s.grad[1]);
            }
        }
        let mu = self.scenario.mu_o();
        (v.value() / mu, Point::new(gx.value(), gy.value()) / mu)
    }

    fn region_for_value(&self, x: &Point) -> Result<Region> {
        Ok(match self.scenario.classify_point(x)? {
            Region::Interface(j) => {
                if self.scenario.signed_interface_distance(j, x) <= 0.0 {
                    Region::Inclusion(j)
                } else {
                    Region::Matrix
                }
            }
            r => r,
        })
    }

    /// Coefficient of the logarithmic mode about inclusion `j`, in the
    /// units of `R_eps`.
    pub fn log_coefficient(&self, j: usize) -> f64 {
        self.coefficients[self.basis.offset(Group::Exterior(j))] / self.scenario.mu_o()
    }

    /// Oracle value of `R_eps(x, y)`.
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        let region = self.region_for_value(x)?;
        Ok(self.accumulate(x, region).0)
    }

    /// Oracle value with an explicit side of the interface.
    pub fn evaluate_in(&self, x: &Point, region: Region) -> f64 {
        self.accumulate(x, region).0
    }

    /// Oracle `x`-gradient of `R_eps(x, y)`.
    pub fn evaluate_grad(&self, x: &Point) -> Result<Point> {
        let region = self.scenario.classify_point(x)?;
        if let Region::Interface(j) = region {
            return Err(Error::InterfaceProximity {
                inclusion: j,
                distance: self.scenario.signed_interface_distance(j, x).abs(),
                limit: self.scenario.tau_geom(),
            });
        }
        Ok(self.accumulate(x, region).1)
    }
}

/// Oracle vs asymptotic discrepancy over a probe set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub scenario_hash: String,
    pub y: [f64; 2],
    pub n_modes: usize,
    pub sup_value: f64,
    pub rms_value: f64,
    pub sup_grad: f64,
    pub rms_grad: f64,
    /// `sup_value / max |oracle value|`.
    pub relative_sup_value: f64,
    /// `sup_grad / max |oracle gradient|`.
    pub relative_sup_grad: f64,
    pub residual_stats: Vec<ResidualStats>,
    pub probes: ProbeSet,
}

impl DiscrepancyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves the exact problem for `y` and compares it with the normalized
/// asymptotic approximation at every probe.
pub fn compare(scenario: &Scenario, y: &Point, probes: &ProbeSet, options: OracleOptions) -> Result<DiscrepancyReport> {
    let solution = solve_for(scenario, y, options)?;
    compare_with(&solution, probes)
}

/// Comparison against an existing solution.
pub fn compare_with(solution: &OracleSolution, probes: &ProbeSet) -> Result<DiscrepancyReport> {
    let scenario = &solution.scenario;
    let y = solution.y;
    let model = AsymptoticModel::new(scenario).normalized(true);
    let rows: Vec<(f64, f64, f64, f64)> = probes
        .points
        .par_iter()
        .map(|p| -> Result<(f64, f64, f64, f64)> {
            let p = Point::new(p[0], p[1]);
            let a = model.r_eps(&p, &y)?.value;
            let o = solution.evaluate(&p)?;
            let ga = model.grad_r_eps(&p, &y)?;
            let go = solution.evaluate_grad(&p)?;
            Ok(((a - o).abs(), o.abs(), (ga - go).norm(), go.norm()))
        })
        .collect::<Result<_>>()?;
    let n = rows.len().max(1) as f64;
    let sup = |f: fn(&(f64, f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let rms = |f: fn(&(f64, f64, f64, f64)) -> f64| (rows.iter().map(|r| f(r).powi(2)).sum::<f64>() / n).sqrt();
    let sup_value = sup(|r| r.0);
    let sup_grad = sup(|r| r.2);
    let scale_value = sup(|r| r.1);
    let scale_grad = sup(|r| r.3);
    Ok(DiscrepancyReport {
        scenario_hash: scenario.content_hash(),
        y: [y[0], y[1]],
        n_modes: solution.options.n_modes,
        sup_value,
        rms_value: rms(|r| r.0),
        sup_grad,
        rms_grad: rms(|r| r.2),
        relative_sup_value: if scale_value > 0.0 { sup_value / scale_value } else { 0.0 },
        relative_sup_grad: if scale_grad > 0.0 { sup_grad / scale_grad } else { 0.0 },
        residual_stats: solution.residual_stats.clone(),
        probes: probes.clone(),
    })
}
