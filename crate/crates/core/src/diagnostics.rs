//! Validation harness: interface residuals, symmetry sweeps, far-field decay
//! of the inclusion regular parts and the order of the remainder.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::AsymptoticModel;
use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Scenario};
use crate::model_fields::{CircularInclusionFields, Side};
use crate::numerics::{loglog_slope, relative_difference};
use crate::oracle::{self, OracleOptions};
use crate::probes::{self, ProbeSet};

pub const DECAY_SLOPE_LIMIT: f64 = -1.5;
pub const CONVERGENCE_SLOPE_LIMIT: f64 = 1.8;
pub const MIXED_SYMMETRY_SLOPE_LIMIT: f64 = 1.5;
pub const INTERFACE_RESIDUAL_LIMIT: f64 = 1e-10;
pub const SYMMETRY_LIMIT: f64 = 1e-12;
pub const CONSISTENCY_LIMIT: f64 = 1e-12;
pub const GRADIENT_FD_LIMIT: f64 = 1e-6;
pub const ORACLE_RESIDUAL_LIMIT: f64 = 1e-8;
pub const ORACLE_GRADIENT_LIMIT: f64 = 0.05;
/// Angles sampled per radius in [`decay_check`].
pub const DECAY_ANGLES: usize = 64;

fn circle(n: usize, radius: f64) -> impl Iterator<Item = (Point, Point)> {
    (0..n).map(move |i| {
        let t = 2.0 * PI * (i as f64 + 0.5) / n as f64;
        let n = Point::new(t.cos(), t.sin());
        (n * radius, n)
    })
}

/// Largest relative residuals of the transmission conditions on the model
/// interface `|xi| = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceResiduals {
    pub samples: usize,
    /// Jump of `calN` across the interface, sources on both sides.
    pub green_continuity: f64,
    /// Traction jump of `calN`.
    pub green_traction: f64,
    pub dipole_continuity: f64,
    /// Traction condition of the dipole field.
    pub dipole_traction: f64,
}

impl InterfaceResiduals {
    pub fn max(&self) -> f64 {
        self.green_continuity
            .max(self.green_traction)
            .max(self.dipole_continuity)
            .max(self.dipole_traction)
    }

    pub fn continuity(&self) -> f64 {
        self.green_continuity.max(self.dipole_continuity)
    }

    pub fn traction(&self) -> f64 {
        self.green_traction.max(self.dipole_traction)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Samples `samples` interface points of the closed-form fields. Residuals
/// are normalized by the largest magnitude of the sampled quantity.
pub fn interface_residuals(cif: &CircularInclusionFields, samples: usize) -> Result<InterfaceResiduals> {
    let a = cif.radius;
    let sources = [
        (Point::new(1.8 * a, 0.7 * a), Side::Outer),
        (Point::new(-3.0 * a, -2.5 * a), Side::Outer),
        (Point::new(0.3 * a, -0.4 * a), Side::Inner),
    ];
    let (mut gc, mut gt) = (0.0f64, 0.0f64);
    for (eta, eta_side) in sources {
        let (mut jump, mut scale, mut tjump, mut tscale) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (xi, n) in circle(samples, a) {
            let o = cif.cal_n_branch(&xi, &eta, Side::Outer, eta_side)?;
            let i = cif.cal_n_branch(&xi, &eta, Side::Inner, eta_side)?;
            jump = jump.max((o - i).abs());
            scale = scale.max(o.abs()).max(i.abs());
            let to = cif.mu_o * cif.grad_cal_n_branch(&xi, &eta, Side::Outer, eta_side)?.dot(&n);
            let ti = cif.mu_i * cif.grad_cal_n_branch(&xi, &eta, Side::Inner, eta_side)?.dot(&n);
            tjump = tjump.max((to - ti).abs());
            tscale = tscale.max(to.abs()).max(ti.abs());
        }
        gc = gc.max(ratio(jump, scale));
        gt = gt.max(ratio(tjump, tscale));
    }

    let (mut dc, mut dt) = (0.0f64, 0.0f64);
    let (mut dscale, mut tscale) = (0.0f64, (cif.mu_i - cif.mu_o).abs());
    for (xi, n) in circle(samples, a) {
        let o = cif.dipole_branch(&xi, Side::Outer)?;
        let i = cif.dipole_branch(&xi, Side::Inner)?;
        dc = dc.max((o - i).norm());
        dscale = dscale.max(o.norm()).max(i.norm());
        let to = cif.dipole_jacobian(&xi, Side::Outer)? * n * cif.mu_o;
        let ti = cif.dipole_jacobian(&xi, Side::Inner)? * n * cif.mu_i;
        dt = dt.max((ti - to - n * (cif.mu_i - cif.mu_o)).norm());
        tscale = tscale.max(to.norm()).max(ti.norm());
    }
    Ok(InterfaceResiduals {
        samples,
        green_continuity: gc,
        green_traction: gt,
        dipole_continuity: ratio(dc, dscale),
        dipole_traction: ratio(dt, tscale),
    })
}

/// Which far-field expansion of the regular part is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayCase {
    /// Source `eta` outside, field point `xi` going to infinity.
    OuterSource,
    /// Field point `eta` inside, source `xi` going to infinity.
    InnerField,
    /// Source `eta` inside, field point `xi` going to infinity.
    InnerSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub case: DecayCase,
    pub eta: [f64; 2],
    pub radii: Vec<f64>,
    /// Max over sample angles of the remainder at each radius.
    pub residual_norms: Vec<f64>,
    pub fitted_slope: Option<f64>,
    pub target_slope: f64,
    /// All remainders vanish identically (zero contrast).
    pub exact: bool,
    pub pass: bool,
}

/// Regular part minus its leading far-field terms.
pub fn decay_remainder(cif: &CircularInclusionFields, case: DecayCase, xi: &Point, eta: &Point) -> Result<f64> {
    let r2 = xi.norm_squared();
    let dip = |d: Point| d.dot(xi) / (2.0 * PI * cif.mu_o * r2);
    match case {
        DecayCase::OuterSource => {
            let h = cif.h_outer_branch(xi, eta, Side::Outer)?;
            Ok(h - dip(cif.dipole_branch(eta, Side::Outer)?))
        }
        DecayCase::InnerField => {
            let h = cif.h_outer_branch(eta, xi, Side::Inner)?;
            Ok(h - dip(cif.dipole_branch(eta, Side::Inner)?))
        }
        DecayCase::InnerSource => {
            let h = cif.h_inner_branch(xi, eta, Side::Outer)?;
            let c = (1.0 / cif.mu_o - 1.0 / cif.mu_i) / (2.0 * PI);
            let log = c * (r2.sqrt().ln() - eta.dot(xi) / r2);
            Ok(h - log - dip(cif.dipole_branch(eta, Side::Inner)?))
        }
    }
}

/// Decay check with the case chosen from the side of `eta`.
pub fn decay_check(cif: &CircularInclusionFields, eta: &Point, radii: &[f64]) -> Result<DecayReport> {
    let case = match cif.side(eta) {
        Side::Outer => DecayCase::OuterSource,
        Side::Inner => DecayCase::InnerSource,
    };
    decay_check_case(cif, case, eta, radii)
}

pub fn decay_check_case(cif: &CircularInclusionFields, case: DecayCase, eta: &Point, radii: &[f64]) -> Result<DecayReport> {
    if radii.len() < 3 {
        return Err(Error::InvalidParameter(format!("decay check needs at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("decay radii must be strictly increasing".into()));
    }
    if !(radii[0] > 2.0 * cif.radius) {
        return Err(Error::InvalidParameter(format!(
            "smallest decay radius {} must exceed twice the inclusion radius {}",
            radii[0], cif.radius
        )));
    }
    let want = match case {
        DecayCase::OuterSource => Side::Outer,
        DecayCase::InnerField | DecayCase::InnerSource => Side::Inner,
    };
    if cif.side(eta) != want {
        return Err(Error::InvalidParameter(format!("eta is not on the {want:?} side for {case:?}")));
    }
    let mut residual_norms = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst = 0.0f64;
        for (xi, _) in circle(DECAY_ANGLES, r) {
            worst = worst.max(decay_remainder(cif, case, &xi, eta)?.abs());
        }
        residual_norms.push(worst);
    }
    let exact = residual_norms.iter().all(|v| *v == 0.0);
    let fitted_slope = loglog_slope(radii, &residual_norms);
    let pass = exact || fitted_slope.is_some_and(|s| s <= DECAY_SLOPE_LIMIT);
    Ok(DecayReport {
        case,
        eta: [eta[0], eta[1]],
        radii: radii.to_vec(),
        residual_norms,
        fitted_slope,
        target_slope: -2.0,
        exact,
        pass,
    })
}

/// Largest symmetry defect among pairs with the same regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub region_x: Region,
    pub region_y: Region,
    pub count: usize,
    pub max_abs: f64,
    pub max_value: f64,
    /// `max_abs / max_value`.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub groups: Vec<SymmetryGroup>,
    /// Pairs rejected as singular, on an interface or outside the disk.
    pub skipped: usize,
}

impl SymmetryReport {
    pub fn group(&self, region_x: Region, region_y: Region) -> Option<&SymmetryGroup> {
        self.groups.iter().find(|g| g.region_x == region_x && g.region_y == region_y)
    }

    /// Worst relative defect over groups matching `filter`.
    pub fn max_relative_where(&self, filter: impl Fn(&SymmetryGroup) -> bool) -> f64 {
        self.groups.iter().filter(|g| filter(g)).map(|g| g.relative).fold(0.0, f64::max)
    }

    pub fn matrix_matrix(&self) -> f64 {
        self.max_relative_where(|g| g.region_x == Region::Matrix && g.region_y == Region::Matrix)
    }

    pub fn mixed(&self) -> f64 {
        self.max_relative_where(|g| g.region_x != g.region_y)
    }

    pub fn pairs(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }
}

/// `|N(x, y) - N(y, x)|` grouped by the regions of `x` and `y`, in a fixed
/// group order.
pub fn symmetry_sweep(scenario: &Scenario, pairs: &[(Point, Point)]) -> SymmetryReport {
    let model = AsymptoticModel::new(scenario);
    let results: Vec<Option<(Region, Region, f64, f64)>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let a = model.n_eps(x, y).ok()?;
            let b = model.n_eps(y, x).ok()?;
            if !a.warnings.is_empty() || !b.warnings.is_empty() {
                return None;
            }
            Some((a.region_x, a.region_y, (a.value - b.value).abs(), a.value.abs().max(b.value.abs())))
        })
        .collect();
    let mut skipped = 0;
    let mut map: BTreeMap<(Region, Region), (usize, f64, f64)> = BTreeMap::new();
    for r in results {
        match r {
            None => skipped += 1,
            Some((rx, ry, d, v)) => {
                let e = map.entry((rx, ry)).or_insert((0, 0.0, 0.0));
                e.0 += 1;
                e.1 = e.1.max(d);
                e.2 = e.2.max(v);
            }
        }
    }
    let groups = map
        .into_iter()
        .map(|((region_x, region_y), (count, max_abs, max_value))| SymmetryGroup {
            region_x,
            region_y,
            count,
            max_abs,
            max_value,
            relative: ratio(max_abs, max_value),
        })
        .collect();
    SymmetryReport { groups, skipped }
}

/// `count` pairs with both points in the matrix.
pub fn matrix_pairs(scenario: &Scenario, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = probes::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = probes::scatter(scenario, 2, &mut rng);
        let matrix = |x: &Point| matches!(scenario.classify_point(x), Ok(Region::Matrix));
        if matrix(&p[0]) && matrix(&p[1]) {
            out.push((p[0], p[1]));
        }
    }
    out
}

/// Pairs of one matrix point and one point inside inclusion `j`, cycling
/// through the inclusions, stored as `(matrix point, j, offset from O_j in
/// units of the physical radius)` so that they can be rescaled.
fn mixed_seeds(scenario: &Scenario, count: usize, seed: u64) -> Vec<(Point, usize, Point)> {
    let mut rng = probes::rng(seed);
    let m = scenario.len();
    (0..count)
        .map(|k| {
            let j = k % m;
            let x = loop {
                let p = probes::scatter(scenario, 1, &mut rng)[0];
                if matches!(scenario.classify_point(&p), Ok(Region::Matrix)) {
                    break p;
                }
            };
            let inner = probes::scatter_in(scenario, j, 1, &mut rng)[0];
            (x, j, (inner - scenario.inclusions[j].center) / scenario.physical_radius(j))
        })
        .collect()
}

/// Log-log study of some error against the scale factor `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub scales: Vec<f64>,
    pub discrepancies: Vec<f64>,
    pub fitted_slope: Option<f64>,
    pub threshold: f64,
    /// Every discrepancy sits at roundoff, so no order can be measured.
    pub floor_limited: bool,
    pub pass: bool,
}

/// Mixed-region symmetry defect of `n_eps` along the scale family. Each
/// inclusion point keeps its position relative to the shrinking inclusion.
pub fn mixed_symmetry_study(scenario: &Scenario, count: usize, seed: u64, scales: &[f64]) -> Result<ScalingReport> {
    check_scales(scales)?;
    let seeds = if scenario.is_empty() { Vec::new() } else { mixed_seeds(scenario, count, seed) };
    let mut discrepancies = Vec::with_capacity(scales.len());
    for &s in scales {
        let sc = scenario.scale_family(s)?;
        let pairs: Vec<(Point, Point)> = seeds
            .iter()
            .map(|(x, j, u)| (*x, sc.inclusions[*j].center + u * sc.physical_radius(*j)))
            .collect();
        let report = symmetry_sweep(&sc, &pairs);
        discrepancies.push(report.mixed());
    }
    let floor_limited = discrepancies.iter().all(|d| *d <= SYMMETRY_LIMIT);
    let fitted_slope = loglog_slope(scales, &discrepancies);
    let pass = floor_limited || fitted_slope.is_some_and(|v| v >= MIXED_SYMMETRY_SLOPE_LIMIT);
    Ok(ScalingReport {
        scales: scales.to_vec(),
        discrepancies,
        fitted_slope,
        threshold: MIXED_SYMMETRY_SLOPE_LIMIT,
        floor_limited,
        pass,
    })
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 scales, got {}", scales.len())));
    }
    if scales.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        return Err(Error::InvalidParameter("scales must lie in (0, 1]".into()));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("scales must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario_hash: String,
    pub y: [f64; 2],
    pub seed: u64,
    pub n_modes: usize,
    pub scales: Vec<f64>,
    /// Sources actually used at each scale.
    pub sources: Vec<[f64; 2]>,
    /// Sup over probes of the value discrepancy.
    pub errors: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub gradient_errors: Vec<f64>,
    /// Largest weighted verification residual of each oracle solve.
    pub oracle_residuals: Vec<f64>,
    pub fitted_slope: Option<f64>,
    pub gradient_slope: Option<f64>,
    pub target_slope: f64,
    pub threshold: f64,
    pub floor_limited: bool,
    pub pass: bool,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Source position in the scaled configuration: points inside inclusion
/// `m` shrink with it, matrix points stay put.
pub fn scaled_source(scenario: &Scenario, y: &Point, s: f64) -> Result<Point> {
    match scenario.classify_point(y)? {
        Region::Matrix => Ok(*y),
        Region::Inclusion(m) => {
            let o = scenario.inclusions[m].center;
            Ok(o + (y - o) * s)
        }
        Region::OuterBoundary => Err(Error::SourceOnBoundary),
        Region::Interface(j) => Err(Error::InterfaceProximity {
            inclusion: j,
            distance: scenario.signed_interface_distance(j, y).abs(),
            limit: scenario.tau_geom(),
        }),
    }
}

/// Compares the asymptotic regular part with the oracle along
/// `scenario.scale_family(s)` and fits the order of the value error.
pub fn convergence_study(
    scenario: &Scenario,
    y: &Point,
    probes: &ProbeSet,
    scales: &[f64],
    options: OracleOptions,
) -> Result<ConvergenceReport> {
    check_scales(scales)?;
    let runs: Vec<(Point, oracle::DiscrepancyReport, f64)> = scales
        .par_iter()
        .map(|&s| {
            let sc = scenario.scale_family(s)?;
            let ys = scaled_source(scenario, y, s)?;
            let sol = oracle::solve_for(&sc, &ys, options)?;
            let rep = oracle::compare_with(&sol, probes)?;
            Ok((ys, rep, sol.max_weighted_residual()))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = runs.iter().map(|r| r.1.sup_value).collect();
    let relative_errors: Vec<f64> = runs.iter().map(|r| r.1.relative_sup_value).collect();
    let gradient_errors: Vec<f64> = runs.iter().map(|r| r.1.sup_grad).collect();
    let oracle_residuals: Vec<f64> = runs.iter().map(|r| r.2).collect();
    let floor_limited = relative_errors
        .iter()
        .zip(&oracle_residuals)
        .all(|(e, r)| *r <= ORACLE_RESIDUAL_LIMIT && *e <= (100.0 * r).max(1e-11));
    let fitted_slope = loglog_slope(scales, &errors);
    let pass = floor_limited || fitted_slope.is_some_and(|v| v >= CONVERGENCE_SLOPE_LIMIT);
    Ok(ConvergenceReport {
        scenario_hash: scenario.content_hash(),
        y: [y[0], y[1]],
        seed: probes.seed,
        n_modes: options.n_modes,
        scales: scales.to_vec(),
        sources: runs.iter().map(|r| [r.0[0], r.0[1]]).collect(),
        errors,
        relative_errors,
        gradient_slope: loglog_slope(scales, &gradient_errors),
        gradient_errors,
        oracle_residuals,
        fitted_slope,
        target_slope: 2.0,
        threshold: CONVERGENCE_SLOPE_LIMIT,
        floor_limited,
        pass,
    })
}

/// Direct `r_eps` against the conversion from `n_eps`; worst relative
/// difference over `pairs`.
pub fn definition_consistency(scenario: &Scenario, pairs: &[(Point, Point)]) -> Result<f64> {
    let model = AsymptoticModel::new(scenario);
    let worst = pairs
        .par_iter()
        .map(|(x, y)| {
            let direct = model.r_eps(x, y)?.value;
            let via = model.r_eps_from_n_eps(x, y)?;
            Ok(relative_difference(direct, via, 0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Pairs with `x` anywhere and `y` alternating between the matrix and the
/// inclusions.
pub fn mixed_source_pairs(scenario: &Scenario, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = probes::rng(seed);
    let m = scenario.len();
    (0..count)
        .map(|k| {
            let x = probes::scatter(scenario, 1, &mut rng)[0];
            let y = if m == 0 || k % 2 == 0 {
                loop {
                    let p = probes::scatter(scenario, 1, &mut rng)[0];
                    if matches!(scenario.classify_point(&p), Ok(Region::Matrix)) {
                        break p;
                    }
                }
            } else {
                probes::scatter_in(scenario, (k / 2) % m, 1, &mut rng)[0]
            };
            (x, y)
        })
        .collect()
}

/// Analytic gradient against central differences at matrix points; worst
/// relative discrepancy. Points within `1e-3 R` of a circle or of `y` are
/// redrawn.
pub fn gradient_check(scenario: &Scenario, y: &Point, count: usize, seed: u64) -> Result<f64> {
    let model = AsymptoticModel::new(scenario);
    let r = scenario.outer_radius;
    let mut rng = probes::rng(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = probes::scatter(scenario, 1, &mut rng)[0];
        let clear = scenario.nearest_interface(&p).is_none_or(|(_, d)| d > 1e-3 * r);
        if clear && p.norm() < r * (1.0 - 1e-3) && (p - y).norm() > 1e-3 * r
            && matches!(scenario.classify_point(&p), Ok(Region::Matrix))
        {
            points.push(p);
        }
    }
    let worst = points
        .par_iter()
        .map(|x| {
            let g = model.grad_r_eps(x, y)?;
            let fd = model.grad_r_eps_fd(x, y, 1e-6 * r)?;
            Ok(ratio((g - fd).norm(), g.norm()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// One row of the validation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub note: String,
}

impl CheckResult {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            comparison: Comparison::AtMost,
            pass: measured <= threshold,
            note: String::new(),
        }
    }

    fn at_least(name: &str, measured: Option<f64>, threshold: f64) -> Self {
        let measured = measured.unwrap_or(f64::NAN);
        Self {
            name: name.into(),
            measured,
            threshold,
            comparison: Comparison::AtLeast,
            pass: measured >= threshold,
            note: String::new(),
        }
    }

    fn exact(name: &str, threshold: f64, comparison: Comparison, note: &str) -> Self {
        Self { name: name.into(), measured: 0.0, threshold, comparison, pass: true, note: note.into() }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scenario_hash: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    /// Checks not run because an earlier one made them meaningless.
    pub skipped: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub oracle: OracleOptions,
    /// Source for the oracle checks; otherwise the admissible probe nearest
    /// the centre, which is then left out of the probe set.
    pub y: Option<Point>,
    pub scales: Vec<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: probes::DEFAULT_SEED, oracle: OracleOptions::default(), y: None, scales: vec![0.5, 0.25, 0.125] }
    }
}

const SUITE_CHECKS: [&str; 11] = [
    "geometry",
    "interface_continuity",
    "interface_traction",
    "symmetry_matrix",
    "symmetry_mixed_order",
    "definition_consistency",
    "gradient_fd",
    "decay_outer_source",
    "decay_inner_source",
    "oracle_residual",
    "oracle_gradient",
];

/// Runs every check on `scenario`. A geometry failure skips the rest.
pub fn run_suite(scenario: &Scenario, options: &SuiteOptions) -> Result<SuiteReport> {
    let seed = options.seed;
    let mut checks = Vec::new();
    let violations = scenario.validate();
    let geometry = CheckResult::at_most("geometry", violations.len() as f64, 0.0)
        .note(violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "));
    let geometry_ok = geometry.pass;
    checks.push(geometry);
    let mut report = SuiteReport { scenario_hash: scenario.content_hash(), seed, checks, skipped: Vec::new() };
    if !geometry_ok {
        report.skipped = SUITE_CHECKS[1..].iter().map(|s| s.to_string()).chain(["convergence_order".into()]).collect();
        return Ok(report);
    }
    let checks = &mut report.checks;
    let model = AsymptoticModel::new(scenario);
    let m = scenario.len();
    let no_inclusions = "exact: no inclusions";

    if m == 0 {
        checks.push(CheckResult::exact("interface_continuity", INTERFACE_RESIDUAL_LIMIT, Comparison::AtMost, no_inclusions));
        checks.push(CheckResult::exact("interface_traction", INTERFACE_RESIDUAL_LIMIT, Comparison::AtMost, no_inclusions));
    } else {
        let res = (0..m)
            .map(|j| interface_residuals(model.fields(j), 64))
            .collect::<Result<Vec<_>>>()?;
        let cont = res.iter().map(InterfaceResiduals::continuity).fold(0.0, f64::max);
        let trac = res.iter().map(InterfaceResiduals::traction).fold(0.0, f64::max);
        checks.push(CheckResult::at_most("interface_continuity", cont, INTERFACE_RESIDUAL_LIMIT));
        checks.push(CheckResult::at_most("interface_traction", trac, INTERFACE_RESIDUAL_LIMIT));
    }

    let sym = symmetry_sweep(scenario, &matrix_pairs(scenario, 200, seed));
    checks.push(CheckResult::at_most("symmetry_matrix", sym.matrix_matrix(), SYMMETRY_LIMIT));

    if m == 0 {
        checks.push(CheckResult::exact("symmetry_mixed_order", MIXED_SYMMETRY_SLOPE_LIMIT, Comparison::AtLeast, no_inclusions));
    } else {
        let mixed = mixed_symmetry_study(scenario, 200, seed, &options.scales)?;
        let worst = mixed.discrepancies.iter().copied().fold(0.0, f64::max);
        checks.push(if mixed.floor_limited {
            CheckResult::at_most("symmetry_mixed_order", worst, SYMMETRY_LIMIT).note("floor-limited")
        } else {
            CheckResult::at_least("symmetry_mixed_order", mixed.fitted_slope, MIXED_SYMMETRY_SLOPE_LIMIT)
        });
    }

    let consistency = definition_consistency(scenario, &mixed_source_pairs(scenario, 200, seed))?;
    checks.push(CheckResult::at_most("definition_consistency", consistency, CONSISTENCY_LIMIT));

    let probe_set = probes::generate(scenario, probes::DEFAULT_PROBE_COUNT + 1, seed)?;
    let (y, probe_set) = match options.y {
        Some(y) => (y, probes::generate(scenario, probes::DEFAULT_PROBE_COUNT, seed)?),
        None => {
            let mut p = probe_set;
            let k = (0..p.len())
                .min_by(|&a, &b| {
                    let n = |i: usize| p.points[i][0].hypot(p.points[i][1]);
                    n(a).total_cmp(&n(b))
                })
                .expect("probe set is not empty");
            let c = p.points.remove(k);
            (Point::new(c[0], c[1]), p)
        }
    };

    checks.push(CheckResult::at_most("gradient_fd", gradient_check(scenario, &y, 100, seed)?, GRADIENT_FD_LIMIT));

    if m == 0 {
        checks.push(CheckResult::exact("decay_outer_source", DECAY_SLOPE_LIMIT, Comparison::AtMost, no_inclusions));
        checks.push(CheckResult::exact("decay_inner_source", DECAY_SLOPE_LIMIT, Comparison::AtMost, no_inclusions));
    } else {
        for (name, case) in [("decay_outer_source", DecayCase::OuterSource), ("decay_inner_source", DecayCase::InnerSource)] {
            let mut worst: Option<f64> = Some(f64::NEG_INFINITY);
            let mut all_exact = true;
            for j in 0..m {
                let cif = model.fields(j);
                let a = cif.radius;
                let eta = match case {
                    DecayCase::OuterSource => Point::new(2.0 * a, 0.5 * a),
                    _ => Point::new(0.5 * a, -0.25 * a),
                };
                let rep = decay_check_case(cif, case, &eta, &[8.0 * a, 16.0 * a, 32.0 * a])?;
                if !rep.exact {
                    all_exact = false;
                    worst = match (worst, rep.fitted_slope) {
                        (Some(w), Some(s)) => Some(w.max(s)),
                        _ => None,
                    };
                }
            }
            checks.push(if all_exact {
                CheckResult::exact(name, DECAY_SLOPE_LIMIT, Comparison::AtMost, "exact: zero contrast")
            } else {
                let measured = worst.unwrap_or(f64::NAN);
                CheckResult {
                    name: name.into(),
                    measured,
                    threshold: DECAY_SLOPE_LIMIT,
                    comparison: Comparison::AtMost,
                    pass: measured <= DECAY_SLOPE_LIMIT,
                    note: String::new(),
                }
            });
        }
    }

    let solution = oracle::solve_for(scenario, &y, options.oracle)?;
    checks.push(CheckResult::at_most("oracle_residual", solution.max_weighted_residual(), ORACLE_RESIDUAL_LIMIT));
    let cmp = oracle::compare_with(&solution, &probe_set)?;
    checks.push(
        CheckResult::at_most("oracle_gradient", cmp.relative_sup_grad, ORACLE_GRADIENT_LIMIT)
            .note(format!("relative value discrepancy {:e}", cmp.relative_sup_value)),
    );

    let conv = convergence_study(scenario, &y, &probe_set, &options.scales, options.oracle)?;
    checks.push(if conv.floor_limited {
        let worst = conv.relative_errors.iter().copied().fold(0.0, f64::max);
        CheckResult::at_most("convergence_order", worst, 1e-11_f64.max(100.0 * ORACLE_RESIDUAL_LIMIT)).note("floor-limited")
    } else {
        CheckResult::at_least("convergence_order", conv.fitted_slope, CONVERGENCE_SLOPE_LIMIT)
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn decay_slopes_near_minus_two() {
        let cif = CircularInclusionFields::new(1.0, 1.0, 3.0);
        let radii = [8.0, 16.0, 32.0];
        let a = decay_check(&cif, &point(2.0, 0.0), &radii).unwrap();
        assert_eq!(a.case, DecayCase::OuterSource);
        let s = a.fitted_slope.unwrap();
        assert!(a.pass && (s + 2.0).abs() < 0.1, "{s}");
        let c = decay_check(&cif, &point(0.4, 0.3), &radii).unwrap();
        assert_eq!(c.case, DecayCase::InnerSource);
        assert!(c.pass && (c.fitted_slope.unwrap() + 2.0).abs() < 0.1, "{c:?}");
        let b = decay_check_case(&cif, DecayCase::InnerField, &point(0.4, 0.3), &radii).unwrap();
        assert!(b.pass && (b.fitted_slope.unwrap() + 2.0).abs() < 0.1, "{b:?}");
    }

    #[test]
    fn zero_contrast_is_exact() {
        let cif = CircularInclusionFields::new(1.0, 2.0, 2.0);
        for eta in [point(2.0, 0.0), point(0.1, 0.2)] {
            let r = decay_check(&cif, &eta, &[8.0, 16.0, 32.0]).unwrap();
            assert!(r.exact && r.pass && r.fitted_slope.is_none());
        }
    }

    #[test]
    fn doubling_outer_source_distance_at_least_halves_the_remainder() {
        for kappa_stiff in [true, false] {
            let mu_i = if kappa_stiff { 3.0 } else { 1.0 / 3.0 };
            let cif = CircularInclusionFields::new(1.0, 1.0, mu_i);
            let xi = point(40.0, 10.0);
            let r1 = decay_remainder(&cif, DecayCase::OuterSource, &xi, &point(2.0, 1.0)).unwrap();
            let r2 = decay_remainder(&cif, DecayCase::OuterSource, &xi, &point(4.0, 2.0)).unwrap();
            assert!(r1.abs() >= 2.0 * r2.abs(), "{r1} {r2}");
        }
    }

    #[test]
    fn decay_argument_checks() {
        let cif = CircularInclusionFields::new(1.0, 1.0, 3.0);
        assert!(decay_check(&cif, &point(2.0, 0.0), &[8.0, 16.0]).is_err());
        assert!(decay_check(&cif, &point(2.0, 0.0), &[8.0, 8.0, 32.0]).is_err());
        assert!(decay_check(&cif, &point(2.0, 0.0), &[1.5, 16.0, 32.0]).is_err());
        assert!(decay_check_case(&cif, DecayCase::InnerSource, &point(2.0, 0.0), &[8.0, 16.0, 32.0]).is_err());
    }

    #[test]
    fn interface_residuals_at_roundoff() {
        for (mu_o, mu_i) in [(5.6e10, 2.6316e10), (5.6e10, 9.0496e10), (1.0, 1.0)] {
            let cif = CircularInclusionFields::new(0.9, mu_o, mu_i);
            let r = interface_residuals(&cif, 64).unwrap();
            assert!(r.max() <= INTERFACE_RESIDUAL_LIMIT, "{r:?}");
        }
    }

    #[test]
    fn symmetry_groups_are_ordered_and_counted() {
        let s = Scenario::table1();
        let mut pairs = matrix_pairs(&s, 20, 1);
        pairs.push((point(0.0, 0.0), point(0.0, 0.0)));
        pairs.extend(mixed_source_pairs(&s, 20, 2));
        let r = symmetry_sweep(&s, &pairs);
        assert_eq!(r.skipped, 1);
        assert_eq!(r.pairs() + r.skipped, pairs.len());
        assert!(r.groups.windows(2).all(|w| (w[0].region_x, w[0].region_y) < (w[1].region_x, w[1].region_y)));
        assert!(r.matrix_matrix() <= SYMMETRY_LIMIT);
        assert!(r.group(Region::Matrix, Region::Matrix).unwrap().count >= 20);
    }

    #[test]
    fn empty_scenario_symmetric_exactly() {
        let s = Scenario::new(10.0, 1.0);
        let pairs = matrix_pairs(&s, 50, 3);
        let r = symmetry_sweep(&s, &pairs);
        assert_eq!(r.matrix_matrix(), 0.0);
    }

    #[test]
    fn scale_checks() {
        assert!(check_scales(&[0.5, 0.25, 0.125]).is_ok());
        assert!(check_scales(&[0.5, 0.25]).is_err());
        assert!(check_scales(&[0.25, 0.5, 0.125]).is_err());
        assert!(check_scales(&[2.0, 0.5, 0.125]).is_err());
    }

    #[test]
    fn sources_inside_shrink_with_their_inclusion() {
        let s = Scenario::table1();
        let y = point(52.0, 3.0);
        let ys = scaled_source(&s, &y, 0.5).unwrap();
        assert!((ys - point(51.0, 1.5)).norm() < 1e-12);
        let sc = s.scale_family(0.5).unwrap();
        assert_eq!(sc.classify_point(&ys).unwrap(), Region::Inclusion(4));
        assert_eq!(scaled_source(&s, &point(0.0, 0.0), 0.25).unwrap(), point(0.0, 0.0));
    }

    #[test]
    fn suite_stops_after_geometry_failure() {
        let s = Scenario::new(10.0, 1.0)
            .with_inclusion(point(0.0, 0.0), 2.0, 3.0)
            .with_inclusion(point(1.0, 0.0), 2.0, 3.0);
        let r = run_suite(&s, &SuiteOptions::default()).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert!(!r.checks[0].pass);
        assert!(!r.passed());
        assert!(!r.skipped.is_empty());
    }

    #[test]
    fn empty_scenario_suite_passes_with_exact_model_checks() {
        let s = Scenario::new(150.0, 5.6e10);
        let r = run_suite(&s, &SuiteOptions { y: Some(point(1.0, -1.0)), ..SuiteOptions::default() }).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let c = r.checks.iter().find(|c| c.name == "decay_outer_source").unwrap();
        assert!(c.note.starts_with("exact"));
    }
}
