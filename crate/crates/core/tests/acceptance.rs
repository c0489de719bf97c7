//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::time::{Duration, Instant};

use incgreen::diagnostics::{self, DecayCase};
use incgreen::oracle::{self, OracleOptions};
use incgreen::reproduce::{self, Case, ReproduceOptions};
use incgreen::*;

use common::{ring, Concentric};

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    summary: String,
}

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= budget;
    println!(
        "criterion {id}: {} {title}: {} [{:.2?} of {:?}]",
        if pass { "PASS" } else { "FAIL" },
        out.summary,
        elapsed,
        budget
    );
    pass
}

fn interface_residuals() -> Outcome {
    let s = Scenario::table1();
    let model = AsymptoticModel::new(&s);
    let worst = (0..s.len())
        .map(|j| diagnostics::interface_residuals(model.fields(j), 64).unwrap().max())
        .fold(0.0, f64::max);
    Outcome { pass: worst <= 1e-10, summary: format!("max relative residual {worst:.3e} <= 1e-10") }
}

fn symmetry() -> Outcome {
    let s = Scenario::table1();
    let pairs = diagnostics::matrix_pairs(&s, 200, SEED);
    let r = diagnostics::symmetry_sweep(&s, &pairs);
    let worst = r.matrix_matrix();
    let n = r.group(Region::Matrix, Region::Matrix).map_or(0, |g| g.count);
    Outcome {
        pass: n == 200 && worst <= 1e-12,
        summary: format!("{n} matrix pairs, max relative discrepancy {worst:.3e} <= 1e-12"),
    }
}

fn consistency() -> Outcome {
    let s = Scenario::table1();
    let pairs = diagnostics::mixed_source_pairs(&s, 200, SEED);
    let inside = pairs.iter().filter(|(_, y)| s.classify_point(y).unwrap() != Region::Matrix).count();
    let worst = diagnostics::definition_consistency(&s, &pairs).unwrap();
    Outcome {
        pass: inside > 0 && worst <= 1e-12,
        summary: format!("200 pairs ({inside} inclusion sources), max relative discrepancy {worst:.3e} <= 1e-12"),
    }
}

fn gradient() -> Outcome {
    let s = Scenario::table1();
    let worst = diagnostics::gradient_check(&s, &Case::Example1.source(), 100, SEED).unwrap();
    Outcome { pass: worst <= 1e-6, summary: format!("100 matrix points, max relative discrepancy {worst:.3e} <= 1e-6") }
}

fn decay() -> Outcome {
    let radii = [8.0, 16.0, 32.0];
    let mut slopes = Vec::new();
    for mu_i in [3.0, 1.0 / 3.0] {
        let cif = CircularInclusionFields::new(1.0, 1.0, mu_i);
        for (case, eta) in [(DecayCase::OuterSource, point(2.0, 0.0)), (DecayCase::InnerSource, point(0.5, 0.25))] {
            let r = diagnostics::decay_check_case(&cif, case, &eta, &radii).unwrap();
            slopes.push(r.fitted_slope.unwrap_or(f64::NAN));
        }
    }
    let worst = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Outcome {
        pass: slopes.iter().all(|s| *s <= -1.5),
        summary: format!(
            "slopes {} (kappa = +0.5 outer/inner, -0.5 outer/inner), worst {worst:.3} <= -1.5",
            slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn oracle_self_validation() -> Outcome {
    // unperturbed disk
    let empty = Scenario::new(150.0, 5.6e10);
    let y = Case::Example1.source();
    let dn = DiskNeumann::new(150.0, 5.6e10).normalized(true);
    let sol = oracle::solve_for(&empty, &y, OracleOptions::with_modes(64)).unwrap();
    let probe_set = probes::generate(&empty, 64, SEED).unwrap();
    let (mut d0, mut s0) = (0.0f64, 0.0f64);
    for x in probe_set.iter() {
        let exact = dn.regular_part(&x, &y).unwrap();
        d0 = d0.max((sol.evaluate(&x).unwrap() - exact).abs());
        s0 = s0.max(exact.abs());
    }
    let unperturbed = d0 / s0;

    // concentric inclusion against separation of variables
    let sov = Concentric { r_out: 30.0, a: 7.0, mu_o: 5.6e10, mu_i: 2.6316e10, t: 15.0 };
    let s = Scenario::new(30.0, 5.6e10).with_inclusion(point(0.0, 0.0), 7.0, sov.mu_i);
    let ys = point(sov.t, 0.0);
    let sol = oracle::solve_for(&s, &ys, OracleOptions::with_modes(48)).unwrap();
    let (mut d1, mut s1) = (0.0f64, 0.0f64);
    for radius in [2.0, 6.0, 9.0, 20.0, 27.0] {
        for x in ring(24, radius, 0.3) {
            let exact = sov.regular_part(&x);
            d1 = d1.max((sol.evaluate(&x).unwrap() - exact).abs());
            s1 = s1.max(exact.abs());
        }
    }
    let concentric = d1 / s1;

    // verification residuals on the six-inclusion disk
    let t1 = Scenario::table1();
    let weighted = [Case::Example1.source(), Case::Example2.source()]
        .iter()
        .map(|y| oracle::solve_for(&t1, y, OracleOptions::with_modes(32)).unwrap().max_weighted_residual())
        .fold(0.0, f64::max);
    Outcome {
        pass: unperturbed <= 1e-10 && concentric <= 1e-8 && weighted <= 1e-8,
        summary: format!(
            "no inclusions {unperturbed:.3e} <= 1e-10, concentric {concentric:.3e} <= 1e-8, weighted residual {weighted:.3e} <= 1e-8"
        ),
    }
}

fn remainder_order() -> Outcome {
    let s = Scenario::three_symmetric();
    let scales = [0.5, 0.25, 0.125];
    let probe_set = probes::generate(&s, 64, SEED).unwrap();
    let conv = diagnostics::convergence_study(&s, &point(5.0, -10.0), &probe_set, &scales, OracleOptions::default()).unwrap();
    let mixed = diagnostics::mixed_symmetry_study(&s, 200, SEED, &scales).unwrap();
    let slope = conv.fitted_slope.unwrap_or(f64::NAN);
    let mixed_text = if mixed.floor_limited {
        format!(
            "mixed symmetry floor-limited (max {:.3e})",
            mixed.discrepancies.iter().copied().fold(0.0, f64::max)
        )
    } else {
        format!("mixed symmetry slope {:.3} >= 1.5", mixed.fitted_slope.unwrap_or(f64::NAN))
    };
    Outcome {
        pass: conv.pass && !conv.floor_limited && mixed.pass,
        summary: format!(
            "value errors {} -> slope {slope:.3} >= 1.8; {mixed_text}",
            conv.errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn reproduction(case: Case) -> Outcome {
    let base = std::env::temp_dir().join(format!("incgreen-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("a"), base.join("b"));
    let opts = ReproduceOptions::default();
    let (ra, _) = reproduce::reproduce(case, &a, &opts).unwrap();
    let (rb, _) = reproduce::reproduce(case, &b, &opts).unwrap();
    let bytes_a = std::fs::read(a.join(&ra.grid_file)).unwrap();
    let bytes_b = std::fs::read(b.join(&rb.grid_file)).unwrap();
    std::fs::remove_dir_all(&base).ok();
    let rows = bytes_a.iter().filter(|c| **c == b'\n').count() - 1;
    let stable = bytes_a == bytes_b && ra.grid_sha256 == rb.grid_sha256;
    let rel = ra.discrepancy.relative_sup_grad;
    Outcome {
        pass: stable && rows == 256 * 256 && rel <= 0.05,
        summary: format!(
            "{case}: {rows} grid rows, byte-stable {stable}, relative sup gradient discrepancy {rel:.3e} <= 5e-2"
        ),
    }
}

fn main() {
    let second = Duration::from_secs(1);
    let results = [
        run(1, "closed-form interface residuals", second, interface_residuals),
        run(2, "symmetry of the approximation", second, symmetry),
        run(3, "definition consistency", second, consistency),
        run(4, "gradient against finite differences", second, gradient),
        run(5, "far-field decay of regular parts", second, decay),
        run(6, "oracle self-validation", Duration::from_secs(30), oracle_self_validation),
        run(7, "remainder order", Duration::from_secs(120), remainder_order),
        run(8, "paper-configuration reproduction", Duration::from_secs(360), || {
            let mut pass = true;
            let mut lines = Vec::new();
            for case in Case::ALL {
                let t = Instant::now();
                let o = reproduction(case);
                pass &= o.pass && t.elapsed() <= Duration::from_secs(120);
                lines.push(format!("{} ({:.2?})", o.summary, t.elapsed()));
            }
            Outcome { pass, summary: lines.join("; ") }
        }),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
