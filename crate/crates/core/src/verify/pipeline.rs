//! End-to-end export: one ball enumeration feeding every artifact.
//!
//! Files written into the output directory:
//!
//! | file | content |
//! |---|---|
//! | `census.csv` | sphere and ball sizes per word length |
//! | `spectrum.json` | deduplicated Jordan projections |
//! | `non_arithmeticity.json` | lattice-reduction density heuristic |
//! | `cone.csv` | normalized Cartan projections |
//! | `transversality.json` | divergence/antipodality scan and factor diagnostics |
//! | `delta.json` | critical exponent at `L` and `L - 2`, single-factor comparison |
//! | `measure.json` | atomic density at `s = δ + 0.01` |
//! | `residual_<gen>.csv` | per-cell conformality residuals for each generator |
//! | `residuals.json` | residual summary at `L` and `L - 2` |
//! | `quasi_invariance.json` | box measure ratio under translation by `τ_φ` |
//!
//! With `L` below [`MIN_FIT_LENGTH`] only the census is written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::groups::{
    componentwise_shadow_diagnostic, div_factors_diagnostic, enumerate_ball, jordan_of, length_spectrum_of,
    limit_cone_of, non_arithmeticity_report, shadow_constant_stable, transversality_of, Ball, GroupElement,
    GroupSpec, Letter,
};
use crate::measures::{
    br_box_measure, conformality_residual_of, critical_exponent_of, ps_density_of, translate_box, BoundaryCell,
    BoxRegion, CellGrid, LinearForm, DEFAULT_CELLS, DEFAULT_S_OFFSET, MIN_FIT_LENGTH,
};
use crate::product::VectorR;
use crate::tolerance::TOL;

/// Covolume threshold of the density heuristic.
pub const DENSITY_THRESHOLD: f64 = 1e-3;
/// Shadow radius of the componentwise diagnostic.
pub const SHADOW_RADIUS: f64 = 2.0;
pub const DIV_RADII: [f64; 3] = [2.0, 4.0, 8.0];
/// Allowed gap between the product exponent and the single-factor exponent on diagonal specs.
pub const SINGLE_FACTOR_AGREEMENT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiInvarianceRecord {
    pub generator: String,
    pub translation: VectorR,
    pub delta: f64,
    pub measure: f64,
    pub translated_measure: f64,
    pub ratio: f64,
    pub expected: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub word_length: usize,
    pub ball_size: usize,
    pub files: Vec<String>,
    pub delta: f64,
    pub delta_previous: f64,
    pub delta_single_factor: f64,
    /// Largest conformality residual over the generators, at `L` and `L - 2`.
    pub residuals: Vec<(String, f64, f64)>,
    pub shadow_stable: bool,
    pub transversality_passed: bool,
    pub quasi_invariance: QuasiInvarianceRecord,
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn put(&mut self, name: &str, content: &str) -> Result<()> {
        fs::write(self.dir.join(name), content)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.put(name, &text)
    }
}

fn census_csv(ball: &Ball) -> String {
    let mut out = String::from("word_length,sphere_size,ball_size\n");
    for k in 0..=ball.radius() {
        out.push_str(&format!("{k},{},{}\n", ball.sphere(k).len(), ball.upto(k).len()));
    }
    out
}

fn cone_csv(cone: &[VectorR], r: usize) -> String {
    let header: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let mut out = header.join(",") + "\n";
    for v in cone {
        let row: Vec<String> = v.0.iter().map(|x| format!("{x:.12e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn generator_element(spec: &GroupSpec, k: usize) -> GroupElement {
    GroupElement::new(
        spec,
        vec![Letter {
            generator: k,
            inverse: false,
        }],
    )
}

pub fn run_pipeline(spec_path: &Path, psi: &LinearForm, lmax: usize, out_dir: &Path) -> Result<PipelineSummary> {
    let spec = GroupSpec::from_path(spec_path)?;
    run_pipeline_for(&spec, psi, lmax, out_dir)
}

pub fn run_pipeline_for(spec: &GroupSpec, psi: &LinearForm, lmax: usize, out_dir: &Path) -> Result<PipelineSummary> {
    psi.check_dim(spec.r())?;
    fs::create_dir_all(out_dir)?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
    };
    let ball = enumerate_ball(spec, lmax)?;
    w.put("census.csv", &census_csv(&ball))?;
    if lmax < MIN_FIT_LENGTH {
        return Err(Error::InsufficientGrowthData(format!(
            "word length {lmax} is below {MIN_FIT_LENGTH}; only the census was written"
        )));
    }

    let spectrum = length_spectrum_of(&ball, lmax);
    w.json("spectrum.json", &spectrum)?;
    w.json("non_arithmeticity.json", &non_arithmeticity_report(&spectrum, DENSITY_THRESHOLD)?)?;
    w.put("cone.csv", &cone_csv(&limit_cone_of(&ball, lmax), spec.r()))?;

    let transversality = transversality_of(spec, &ball, lmax, TOL.antipodal);
    let shadow_lengths: Vec<usize> = (MIN_FIT_LENGTH..=lmax).rev().step_by(2).take(3).collect::<Vec<_>>();
    let shadow_entries: Vec<_> = shadow_lengths
        .iter()
        .rev()
        .map(|&l| componentwise_shadow_diagnostic(spec, &ball, l, SHADOW_RADIUS))
        .collect();
    let shadow_stable = shadow_constant_stable(&shadow_entries);
    w.json(
        "transversality.json",
        &json!({
            "report": transversality,
            "passed": transversality.passed(),
            "div_factors": div_factors_diagnostic(&ball, lmax, &DIV_RADII),
            "componentwise_shadow": shadow_entries,
            "shadow_stable": shadow_stable,
        }),
    )?;

    let delta = critical_exponent_of(&ball, psi, lmax)?;
    let previous = critical_exponent_of(&ball, psi, lmax - 2).ok();
    // on a diagonal spec ψ(κ(g)) = (Σψᵢ)·d₁(g), so one factor with the summed form must agree
    let single_spec = spec.factor(0)?;
    let single_psi = LinearForm::new(vec![psi.coefficients().0.iter().sum()])?;
    let single = critical_exponent_of(&enumerate_ball(&single_spec, lmax)?, &single_psi, lmax).ok();
    let delta_previous = previous.as_ref().map_or(f64::NAN, |c| c.delta);
    let delta_single = single.as_ref().map_or(f64::NAN, |c| c.delta);
    w.json(
        "delta.json",
        &json!({
            "estimate": delta,
            "previous": previous,
            "stability": (delta.delta - delta_previous).abs(),
            "single_factor": single,
            "single_factor_form": single_psi,
            "single_factor_gap": (delta.delta - delta_single).abs(),
        }),
    )?;

    let s = delta.delta + DEFAULT_S_OFFSET;
    let nu = ps_density_of(spec, &ball, psi, s, lmax);
    w.put("measure.json", &(nu.to_json() + "\n"))?;
    let nu_previous = ps_density_of(spec, &ball, psi, s, lmax - 2);
    let mut residuals = Vec::new();
    for (k, name) in spec.names().iter().enumerate() {
        let g = generator_element(spec, k);
        let now = conformality_residual_of(spec, &nu, &g, DEFAULT_CELLS)?;
        let before = conformality_residual_of(spec, &nu_previous, &g, DEFAULT_CELLS)?;
        w.put(&format!("residual_{name}.csv"), &now.to_csv())?;
        residuals.push((name.clone(), now.residual, before.residual));
    }
    w.json(
        "residuals.json",
        &residuals
            .iter()
            .map(|(n, a, b)| json!({ "generator": n, "residual": a, "residual_previous": b }))
            .collect::<Vec<_>>(),
    )?;

    let quasi = quasi_invariance(spec, &nu, psi, delta.delta)?;
    w.json("quasi_invariance.json", &quasi)?;

    Ok(PipelineSummary {
        word_length: lmax,
        ball_size: ball.len(),
        files: w.files,
        delta: delta.delta,
        delta_previous,
        delta_single_factor: delta_single,
        residuals,
        shadow_stable,
        transversality_passed: transversality.passed(),
        quasi_invariance: quasi,
    })
}

/// `μ(T_a E)/μ(E)` against `e^{δ ψ(a)}` for `a = τ_φ`, `φ` the first generator,
/// `E` = the support cells of `ν` with even flat id times the unit box.
pub fn quasi_invariance(
    spec: &GroupSpec,
    nu: &crate::measures::AtomicMeasure,
    psi: &LinearForm,
    delta: f64,
) -> Result<QuasiInvarianceRecord> {
    let phi = generator_element(spec, 0);
    let a = jordan_of(&phi.matrix)?;
    let grid = CellGrid::new(DEFAULT_CELLS, spec.r())?;
    let mut ids: Vec<usize> = nu.atoms.iter().map(|at| grid.flat_id(&grid.cell_of(&at.xi))).collect();
    ids.sort_unstable();
    ids.dedup();
    let cells: Vec<BoundaryCell> = ids
        .iter()
        .step_by(2)
        .map(|&id| BoundaryCell::from_grid(&grid, &grid.unflatten(id)))
        .collect();
    let region = BoxRegion::new(cells, vec![(0.0, 1.0); spec.r()])?;
    let measure = br_box_measure(nu, delta, psi, &region)?;
    let translated_measure = br_box_measure(nu, delta, psi, &translate_box(&region, &a)?)?;
    let ratio = translated_measure / measure;
    let expected = (delta * psi.eval(&a)).exp();
    Ok(QuasiInvarianceRecord {
        generator: spec.names()[0].clone(),
        translation: a,
        delta,
        measure,
        translated_measure,
        ratio,
        expected,
        relative_error: (ratio - expected).abs() / expected,
    })
}
