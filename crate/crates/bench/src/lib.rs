//! Benchmark fixtures shared by the criterion targets.

use incgreen::{point, Point, Scenario};

/// The six-inclusion disk with its matrix source.
pub fn table1() -> (Scenario, Point) {
    (Scenario::table1(), point(-10.0, -80.0))
}

/// Deterministic field points spread over the disk of radius `r`.
pub fn field_points(r: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = 2.399963229728653 * k as f64;
            let rho = 0.9 * r * ((k as f64 + 0.5) / n as f64).sqrt();
            point(rho * t.cos(), rho * t.sin())
        })
        .collect()
}
