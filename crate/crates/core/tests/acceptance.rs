//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion other than the quoted altitude fails.
//!
//! The quoted altitude `≈ 0.60346` is compared against the distance from the
//! right-angle vertex of a π/2–0–0 triangle to its opposite side. That
//! distance is `asinh 1 ≈ 0.88137`, so the comparison fails; it is reported
//! and checked against the closed form, not counted against the run.

use std::time::{Duration, Instant};

use horo_core::alignment::{appendix_reference_constant, right_angle_ideal_triangle_altitude, squeeze_estimate};
use horo_core::groups::{non_arithmeticity_report_with_depth, GroupSpec};
use horo_core::measures::LinearForm;
use horo_core::plane::{dist, H2Point, Isometry};
use horo_core::product::VectorR;
use horo_core::sampling::{random_loxodromic, trial_rng};
use horo_core::verify::{run_pipeline_for, run_verify, LemmaId, Report, VerifyJob, SINGLE_FACTOR_AGREEMENT};
use rand::Rng;

const SEED: u64 = 1;

struct Line {
    name: &'static str,
    passed: bool,
    counted: bool,
    detail: String,
    elapsed: Duration,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn verify(id: LemmaId, trials: usize) -> (Report, Duration) {
    timed(|| run_verify(&VerifyJob::new(id, trials, SEED).unwrap()).unwrap())
}

fn worst(r: &Report) -> String {
    r.worst_case
        .as_ref()
        .map_or("-".into(), |w| format!("{:.6} (bound {:.6})", w.value, w.bound))
}

fn suite(name: &'static str, id: LemmaId, trials: usize, limit: Duration) -> Line {
    let (r, elapsed) = verify(id, trials);
    Line {
        name,
        passed: r.passed() && elapsed < limit,
        counted: true,
        detail: format!("{} failures in {trials}, worst {}", r.failures, worst(&r)),
        elapsed,
    }
}

fn appendix() -> Line {
    let (r, elapsed) = verify(LemmaId::AppendixConst, 1);
    let computed = right_angle_ideal_triangle_altitude();
    assert!((computed - 1f64.asinh()).abs() < 1e-12, "altitude {computed}");
    Line {
        name: "appendix_const",
        passed: r.passed() && elapsed < Duration::from_secs(1),
        counted: false,
        detail: format!(
            "computed {computed:.6}, quoted 0.60346, closed form {:.6}",
            appendix_reference_constant()
        ),
        elapsed,
    }
}

fn shadow_alignment() -> Line {
    let (fwd, t1) = verify(LemmaId::ShadowAlignFwd, 10_000);
    let (bwd, t2) = verify(LemmaId::ShadowAlignBwd, 10_000);
    let elapsed = t1 + t2;
    Line {
        name: "shadow_alignment",
        passed: fwd.passed() && bwd.passed() && elapsed < Duration::from_secs(60),
        counted: true,
        detail: format!(
            "forward {} failures ({} non-vacuous), backward {} failures ({} non-vacuous)",
            fwd.failures, fwd.non_vacuous, bwd.failures, bwd.non_vacuous
        ),
        elapsed,
    }
}

fn squeezing() -> Line {
    let (est, elapsed) = timed(|| squeeze_estimate(1.0, 10_000, SEED).unwrap());
    Line {
        name: "squeeze",
        passed: !est.cap_reached && est.l <= 64.0 && est.four_point_failures == 0,
        counted: true,
        detail: format!(
            "L = {}, four-point worst {:.4} (bound 8), {} failures",
            est.l, est.four_point_worst, est.four_point_failures
        ),
        elapsed,
    }
}

fn jordan() -> Line {
    let (res, elapsed) = timed(|| {
        let mut power_err = 0.0f64;
        let mut growth_err = 0.0f64;
        for t in 0..100 {
            let mut rng = trial_rng(SEED, t);
            let g = random_loxodromic(&mut rng, 0.5, 3.0);
            let tau = g.translation_length().unwrap();
            for k in 1..=10 {
                let tk = g.pow(k).translation_length().unwrap();
                power_err = power_err.max((tk - k as f64 * tau).abs());
            }
            // attracting point at ∞, axis Re z = β within 0.3 of o = i
            let (alpha, beta) = (rng.random_range(0.5..2.0f64), rng.random_range(-0.3..0.3f64));
            let s = alpha.sqrt();
            let affine = Isometry::new(s, beta / s, 0.0, 1.0 / s).unwrap();
            let h = Isometry::axial_translation(tau).conjugate_by(&affine);
            let o = H2Point::I;
            growth_err = growth_err.max((dist(o, h.pow(200).apply(o)) / 200.0 - tau).abs());
        }
        (power_err, growth_err)
    });
    let (power_err, growth_err) = res;
    Line {
        name: "jordan_projection",
        passed: power_err <= 1e-9 && growth_err <= 1e-3,
        counted: true,
        detail: format!("max |τ(gᵏ) - kτ| = {power_err:.2e}, max growth error at n = 200 = {growth_err:.2e}"),
        elapsed,
    }
}

fn non_arithmeticity() -> Line {
    let (res, elapsed) = timed(|| {
        let v = |a: f64, b: f64| VectorR(vec![a, b]);
        let dense = [v(1.0, 0.0), v(0.0, 1.0), v(2f64.sqrt(), 3f64.sqrt())];
        let lattice = [v(1.0, 0.0), v(0.0, 1.0), v(3.0, -2.0)];
        (
            non_arithmeticity_report_with_depth(&dense, 1e-3, 12).unwrap(),
            non_arithmeticity_report_with_depth(&lattice, 1e-3, 12).unwrap(),
        )
    });
    let (dense, lattice) = res;
    Line {
        name: "non_arithmeticity",
        passed: dense.dense_heuristic && !lattice.dense_heuristic,
        counted: true,
        detail: format!(
            "irrational covolume {:.2e} (dense), integer covolume {:.3} (not dense)",
            dense.lattice_covolume, lattice.lattice_covolume
        ),
        elapsed,
    }
}

/// Criteria read off one pipeline run at `L = 10` on the bundled fixture.
fn pipeline_lines() -> Vec<Line> {
    let dir = tempfile::tempdir().unwrap();
    let spec = GroupSpec::bundled_diagonal_schottky();
    let psi = LinearForm::parse("0.5,0.5").unwrap();
    let (summary, elapsed) = timed(|| run_pipeline_for(&spec, &psi, 10, dir.path()).unwrap());
    let stability = (summary.delta - summary.delta_previous).abs();
    let agreement = (summary.delta - summary.delta_single_factor).abs();
    let conformal = summary.residuals.iter().all(|(_, now, before)| *now <= before + 0.05);
    let residuals: Vec<String> = summary
        .residuals
        .iter()
        .map(|(g, now, before)| format!("{g}: {now:.4} vs {before:.4}"))
        .collect();
    let q = &summary.quasi_invariance;
    vec![
        Line {
            name: "transverse_diagnostics",
            passed: summary.transversality_passed && summary.shadow_stable,
            counted: true,
            detail: format!(
                "transversality {}, shadow constant stable over L = 6, 8, 10: {}",
                summary.transversality_passed, summary.shadow_stable
            ),
            elapsed,
        },
        Line {
            name: "critical_exponent",
            passed: stability <= 0.05 && agreement <= SINGLE_FACTOR_AGREEMENT && elapsed < Duration::from_secs(300),
            counted: true,
            detail: format!(
                "δ(10) = {:.5}, δ(8) = {:.5}, single factor {:.5}",
                summary.delta, summary.delta_previous, summary.delta_single_factor
            ),
            elapsed,
        },
        Line {
            name: "conformality",
            passed: conformal,
            counted: true,
            detail: format!("residual at L = 10 vs L = 8: {}", residuals.join(", ")),
            elapsed: Duration::ZERO,
        },
        Line {
            name: "quasi_invariance",
            passed: (q.ratio - q.expected).abs() <= 1e-9,
            counted: true,
            detail: format!("ratio {:.12}, expected {:.12}", q.ratio, q.expected),
            elapsed: Duration::ZERO,
        },
    ]
}

fn main() {
    let mut lines = vec![
        appendix(),
        suite("projection_defect", LemmaId::ProjectionDefect, 100_000, Duration::from_secs(30)),
        suite("contracting", LemmaId::Contracting, 10_000, Duration::from_secs(60)),
        shadow_alignment(),
        squeezing(),
        suite("busemann_cocycle", LemmaId::Cocycle, 1000, Duration::from_secs(10)),
        jordan(),
    ];
    lines.extend(pipeline_lines());
    lines.push(non_arithmeticity());

    let mut failed = 0;
    for l in &lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        let note = if l.counted { "" } else { " [not counted]" };
        println!("{tag} {}: {} ({:.2} s){note}", l.name, l.detail, l.elapsed.as_secs_f64());
        failed += (l.counted && !l.passed) as usize;
    }
    println!("acceptance: {} criteria, {failed} counted failures", lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
