//! Harmonic (Trefftz) basis functions as real and imaginary parts of
//! holomorphic modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Scenario;

/// Exterior modes either carry a Kelvin image in the outer circle, which
/// makes their normal derivative vanish on it (the log mode keeps a uniform
/// flux), or are the bare multipoles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    #[default]
    NeumannAdapted,
    Plain,
}

/// Column groups, one expansion each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    /// Regular expansion about the origin, used in the matrix.
    Outer,
    /// Multipole expansion about inclusion `j`, used in the matrix.
    Exterior(usize),
    /// Regular expansion about inclusion `j`, used inside it.
    Interior(usize),
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Outer => write!(f, "outer"),
            Group::Exterior(j) => write!(f, "exterior:{}", j + 1),
            Group::Interior(j) => write!(f, "interior:{}", j + 1),
        }
    }
}

/// Value and gradient of one basis function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sample {
    pub value: f64,
    pub grad: [f64; 2],
}

/// `Re f` and `Im f` together with their gradients from `f` and `f'`.
fn re_im(f: Complex64, df: Complex64) -> (Sample, Sample) {
    (
        Sample { value: f.re, grad: [df.re, -df.im] },
        Sample { value: f.im, grad: [df.im, df.re] },
    )
}

#[derive(Debug, Clone)]
pub struct TrefftzBasis {
    pub n_modes: usize,
    pub kind: BasisKind,
    outer_radius: f64,
    centers: Vec<Complex64>,
    radii: Vec<f64>,
}

impl TrefftzBasis {
    pub fn new(scenario: &Scenario, n_modes: usize, kind: BasisKind) -> Self {
        Self {
            n_modes,
            kind,
            outer_radius: scenario.outer_radius,
            centers: scenario
                .inclusions
                .iter()
                .map(|inc| Complex64::new(inc.center[0], inc.center[1]))
                .collect(),
            radii: (0..scenario.len()).map(|j| scenario.physical_radius(j)).collect(),
        }
    }

    pub fn group_len(&self) -> usize {
        2 * self.n_modes + 1
    }

    pub fn groups(&self) -> Vec<Group> {
        let m = self.centers.len();
        let mut g = vec![Group::Outer];
        g.extend((0..m).map(Group::Exterior));
        g.extend((0..m).map(Group::Interior));
        g
    }

    pub fn n_columns(&self) -> usize {
        self.group_len() * (1 + 2 * self.centers.len())
    }

    /// First column of `group`.
    pub fn offset(&self, group: Group) -> usize {
        let m = self.centers.len();
        let g = self.group_len();
        match group {
            Group::Outer => 0,
            Group::Exterior(j) => g * (1 + j),
            Group::Interior(j) => g * (1 + m + j),
        }
    }

    /// Group owning column `col`.
    pub fn group_of(&self, col: usize) -> Group {
        let m = self.centers.len();
        let k = col / self.group_len();
        if k == 0 {
            Group::Outer
        } else if k <= m {
            Group::Exterior(k - 1)
        } else {
            Group::Interior(k - 1 - m)
        }
    }

    /// Groups active in the matrix.
    pub fn matrix_groups(&self) -> impl Iterator<Item = Group> + '_ {
        std::iter::once(Group::Outer).chain((0..self.centers.len()).map(Group::Exterior))
    }

    /// Samples every function of `group` at `(x, y)` into `out`, ordered
    /// `[constant or log], cos 1, sin 1, ..., cos N, sin N`.
    pub fn eval_group(&self, group: Group, x: f64, y: f64, out: &mut [Sample]) {
        debug_assert_eq!(out.len(), self.group_len());
        let z = Complex64::new(x, y);
        let n = self.n_modes;
        match group {
            Group::Outer => {
                let r = self.outer_radius;
                out[0] = Sample { value: 1.0, grad: [0.0, 0.0] };
                let w = z / r;
                // d/dz w^k = k w^(k-1) / R
                let mut prev = Complex64::new(1.0, 0.0);
                for k in 1..=n {
                    let f = prev * w;
                    let df = prev * (k as f64 / r);
                    let (c, s) = re_im(f, df);
                    out[2 * k - 1] = c;
                    out[2 * k] = s;
                    prev = f;
                }
            }
            Group::Interior(j) => {
                let (o, rho) = (self.centers[j], self.radii[j]);
                out[0] = Sample { value: 1.0, grad: [0.0, 0.0] };
                let u = (z - o) / rho;
                let mut prev = Complex64::new(1.0, 0.0);
                for k in 1..=n {
                    let f = prev * u;
                    let df = prev * (k as f64 / rho);
                    let (c, s) = re_im(f, df);
                    out[2 * k - 1] = c;
                    out[2 * k] = s;
                    prev = f;
                }
            }
            Group::Exterior(j) => self.eval_exterior(j, z, out),
        }
    }

    fn eval_exterior(&self, j: usize, z: Complex64, out: &mut [Sample]) {
        let (o, rho) = (self.centers[j], self.radii[j]);
        let n = self.n_modes;
        let d = z - o;
        // t = rho / (z - O), dt/dz = -t^2 / rho
        let t = rho / d;
        let dt = -t * t / rho;
        match self.kind {
            BasisKind::Plain => {
                out[0] = Sample {
                    value: (d.norm() / rho).ln(),
                    grad: [(1.0 / d).re, -(1.0 / d).im],
                };
                let mut prev = Complex64::new(1.0, 0.0);
                for k in 1..=n {
                    let f = prev * t;
                    let df = prev * dt * k as f64;
                    let (c, s) = re_im(f, df);
                    out[2 * k - 1] = c;
                    out[2 * k] = s;
                    prev = f;
                }
            }
            BasisKind::NeumannAdapted => {
                let r2 = self.outer_radius * self.outer_radius;
                let e = r2 - o.conj() * z;
                // s = rho z / (R^2 - conj(O) z), ds/dz = rho R^2 / (R^2 - conj(O) z)^2
                let s = rho * z / e;
                let ds = rho * r2 / (e * e);
                let log_f = d.ln() + e.ln();
                let log_df = 1.0 / d - o.conj() / e;
                out[0] = Sample {
                    value: log_f.re - r2.ln(),
                    grad: [log_df.re, -log_df.im],
                };
                let mut pt = Complex64::new(1.0, 0.0);
                let mut ps = Complex64::new(1.0, 0.0);
                for k in 1..=n {
                    let kf = k as f64;
                    let ft = pt * t;
                    let dft = pt * dt * kf;
                    let fs = ps * s;
                    let dfs = ps * ds * kf;
                    let (c, _) = re_im(ft + fs, dft + dfs);
                    let (_, sn) = re_im(ft - fs, dft - dfs);
                    out[2 * k - 1] = c;
                    out[2 * k] = sn;
                    pt = ft;
                    ps = fs;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point, Scenario};

    fn sample_all(b: &TrefftzBasis, g: Group, x: f64, y: f64) -> Vec<Sample> {
        let mut out = vec![Sample::default(); b.group_len()];
        b.eval_group(g, x, y, &mut out);
        out
    }

    #[test]
    fn layout() {
        let s = Scenario::table1();
        let b = TrefftzBasis::new(&s, 32, BasisKind::NeumannAdapted);
        assert_eq!(b.n_columns(), 845);
        assert_eq!(b.offset(Group::Interior(0)), 65 * 7);
        for g in b.groups() {
            assert_eq!(b.group_of(b.offset(g)), g);
            assert_eq!(b.group_of(b.offset(g) + 64), g);
        }
    }

    #[test]
    fn gradients_and_harmonicity_by_differences() {
        let s = Scenario::new(10.0, 1.0).with_inclusion(point(3.0, -2.0), 1.5, 2.0);
        for kind in [BasisKind::NeumannAdapted, BasisKind::Plain] {
            let b = TrefftzBasis::new(&s, 6, kind);
            let (x, y) = (-1.3, 4.1);
            let h = 1e-4;
            for g in [Group::Outer, Group::Exterior(0), Group::Interior(0)] {
                let c = sample_all(&b, g, x, y);
                let px = sample_all(&b, g, x + h, y);
                let mx = sample_all(&b, g, x - h, y);
                let py = sample_all(&b, g, x, y + h);
                let my = sample_all(&b, g, x, y - h);
                for k in 0..b.group_len() {
                    let fdx = (px[k].value - mx[k].value) / (2.0 * h);
                    let fdy = (py[k].value - my[k].value) / (2.0 * h);
                    let scale = c[k].grad[0].abs().max(c[k].grad[1].abs()).max(1e-3);
                    assert!((fdx - c[k].grad[0]).abs() < 1e-6 * scale, "{g} {k}");
                    assert!((fdy - c[k].grad[1]).abs() < 1e-6 * scale, "{g} {k}");
                    let lap = (px[k].value + mx[k].value + py[k].value + my[k].value - 4.0 * c[k].value) / (h * h);
                    assert!(lap.abs() < 1e-4 * c[k].value.abs().max(1.0), "{g} {k} laplacian {lap}");
                }
            }
        }
    }

    #[test]
    fn adapted_exterior_modes_have_zero_normal_flux_on_outer_circle() {
        let s = Scenario::new(10.0, 1.0).with_inclusion(point(3.0, -2.0), 1.5, 2.0);
        let b = TrefftzBasis::new(&s, 8, BasisKind::NeumannAdapted);
        for i in 0..40 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 40.0;
            let (c, sn) = (t.cos(), t.sin());
            let v = sample_all(&b, Group::Exterior(0), 10.0 * c, 10.0 * sn);
            // log mode: r d/dr = 1
            assert!(((v[0].grad[0] * c + v[0].grad[1] * sn) * 10.0 - 1.0).abs() < 1e-12);
            for k in 1..v.len() {
                assert!((v[k].grad[0] * c + v[k].grad[1] * sn).abs() < 1e-12, "mode {k}");
            }
        }
    }
}
