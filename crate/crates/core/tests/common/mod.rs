use std::f64::consts::PI;

use incgreen::{point, Point};

/// Regular part for an inclusion of radius `a` at the centre of a disk of
/// radius `r_out`, source `(t, 0)` in the matrix, by separation of variables
/// in the angle.
pub struct Concentric {
    pub r_out: f64,
    pub a: f64,
    pub mu_o: f64,
    pub mu_i: f64,
    pub t: f64,
}

impl Concentric {
    pub fn kappa(&self) -> f64 {
        (self.mu_i - self.mu_o) / (self.mu_i + self.mu_o)
    }

    pub fn regular_part(&self, x: &Point) -> f64 {
        let (r, th) = (x.norm(), x[1].atan2(x[0]));
        let (big, a, t, k) = (self.r_out, self.a, self.t, self.kappa());
        let y = point(t, 0.0);
        let mut sum = 0.0;
        for n in 1..400 {
            let nf = n as f64;
            let g = 1.0 / (2.0 * PI * self.mu_o * nf);
            let den = 1.0 + k * (a / big).powi(2 * n);
            let alpha_rn = g * ((t * r / (big * big)).powf(nf) - k * (a * a * r / (t * big * big)).powf(nf)) / den;
            let term = if r > a {
                let alpha_a2n = g * ((t * a * a / (big * big * r)).powf(nf) - k * (a.powi(4) / (t * big * big * r)).powf(nf)) / den;
                let beta_rn = -k * (g * (a * a / (t * r)).powf(nf) + alpha_a2n);
                -(alpha_rn + beta_rn)
            } else {
                -(1.0 - k) * (g * (r / t).powf(nf) + alpha_rn)
            };
            sum += term * (nf * th).cos();
            if term.abs() < 1e-30 {
                break;
            }
        }
        let log_r = big.ln() / (2.0 * PI * self.mu_o);
        if r > a {
            -log_r + sum
        } else {
            // constant mode of N inside is (ln R - ln t) / (2 pi mu_O)
            let n0 = (big.ln() - t.ln()) / (2.0 * PI * self.mu_o);
            -(x - y).norm().ln() / (2.0 * PI * self.mu_o) - n0 + sum
        }
    }
}

pub fn ring(count: usize, radius: f64, phase: f64) -> impl Iterator<Item = Point> {
    (0..count).map(move |i| {
        let th = 2.0 * PI * (i as f64 + phase) / count as f64;
        point(radius * th.cos(), radius * th.sin())
    })
}
