//! Built-in configurations with a fixed source, regenerated from constants.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotic::AsymptoticModel;
use crate::diagnostics::ORACLE_GRADIENT_LIMIT;
use crate::error::{Error, Result};
use crate::geometry::{point, Point, Scenario};
use crate::grid::{GridSpec, Quantity};
use crate::oracle::{self, DiscrepancyReport, OracleOptions};
use crate::probes;

pub const GRID_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// One centred aluminium inclusion in a 30 m disk, source `(10, 10)`.
    Fig1,
    /// The six-inclusion disk, source `(-10, -80)` in the matrix.
    Example1,
    /// The six-inclusion disk, source `(60, 0)` inside inclusion 5.
    Example2,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Fig1, Case::Example1, Case::Example2];

    pub fn scenario(self) -> Scenario {
        match self {
            Case::Fig1 => Scenario::single_aluminium(),
            Case::Example1 | Case::Example2 => Scenario::table1(),
        }
    }

    pub fn source(self) -> Point {
        match self {
            Case::Fig1 => point(10.0, 10.0),
            Case::Example1 => point(-10.0, -80.0),
            Case::Example2 => point(60.0, 0.0),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Fig1 => "fig1",
            Case::Example1 => "example1",
            Case::Example2 => "example2",
        })
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Case::Fig1),
            "example1" => Ok(Case::Example1),
            "example2" => Ok(Case::Example2),
            other => Err(Error::InvalidParameter(format!(
                "unknown case `{other}` (expected fig1, example1 or example2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub case: Case,
    pub homogeneous: bool,
    pub scenario: crate::geometry::ScenarioFile,
    pub source: [f64; 2],
    pub grid_file: String,
    pub grid_sha256: String,
    pub grid_size: [usize; 2],
    pub discrepancy: DiscrepancyReport,
    pub gradient_threshold: f64,
    pub pass: bool,
}

impl ReproductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceOptions {
    pub oracle: OracleOptions,
    pub seed: u64,
    /// Replace every inclusion modulus by the matrix modulus.
    pub homogeneous: bool,
    pub grid_size: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self { oracle: OracleOptions::default(), seed: probes::DEFAULT_SEED, homogeneous: false, grid_size: GRID_SIZE }
    }
}

/// Writes `<case>_grad.csv` and `<case>_report.json` into `out_dir`.
pub fn reproduce(case: Case, out_dir: &Path, options: &ReproduceOptions) -> Result<(ReproductionReport, PathBuf)> {
    let mut scenario = case.scenario();
    if options.homogeneous {
        scenario = scenario.homogenized();
    }
    let y = case.source();
    let model = AsymptoticModel::new(&scenario).normalized(true);
    let spec = GridSpec::square(scenario.outer_radius, options.grid_size);
    let field = model.grid_eval(&y, &spec, Quantity::GradRepsMagnitude)?;
    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;

    let probe_set = probes::generate(&scenario, probes::DEFAULT_PROBE_COUNT, options.seed)?;
    let discrepancy = oracle::compare(&scenario, &y, &probe_set, options.oracle)?;

    std::fs::create_dir_all(out_dir)?;
    let grid_file = format!("{case}_grad.csv");
    std::fs::write(out_dir.join(&grid_file), &csv)?;
    let report = ReproductionReport {
        case,
        homogeneous: options.homogeneous,
        scenario: scenario.to_file_format(),
        source: [y[0], y[1]],
        grid_file,
        grid_sha256: hex::encode(Sha256::digest(&csv)),
        grid_size: [options.grid_size, options.grid_size],
        pass: discrepancy.relative_sup_grad <= ORACLE_GRADIENT_LIMIT,
        discrepancy,
        gradient_threshold: ORACLE_GRADIENT_LIMIT,
    };
    let report_path = out_dir.join(format!("{case}_report.json"));
    std::fs::write(&report_path, report.to_json())?;
    Ok((report, report_path))
}
