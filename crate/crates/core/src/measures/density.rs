use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::LinearForm;
use crate::error::{Error, Result};
use crate::groups::{boundary_angle_gap, enumerate_ball, Ball, GroupElement, GroupSpec};
use crate::plane::{busemann, BoundaryPoint, H2Point, SegmentH2};
use crate::product::{ProductBoundaryPoint, ProductPoint};

/// Atoms closer than this (Cayley angle, every factor) are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
pub const DEFAULT_CELLS: usize = 64;
/// Cells lighter than this are ignored by the residual.
pub const CELL_MASS_FLOOR: f64 = 1e-3;
/// Offset of the density exponent above the fitted critical exponent.
pub const DEFAULT_S_OFFSET: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub xi: ProductBoundaryPoint,
    pub w: f64,
}

/// Finitely many weighted points of `∂Z`, total weight 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub dimension: f64,
    pub form: LinearForm,
    pub ball_length: usize,
    pub atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Endpoint of the ray from `x` through `y`; `None` when `x = y`.
pub fn visual_endpoint(x: H2Point, y: H2Point) -> Option<BoundaryPoint> {
    let seg = SegmentH2::new(x, y);
    seg.supporting_geodesic().ok().map(|g| g.end())
}

/// Per-factor visual endpoints of `z → z'`.
pub fn visual_tuple(z: &ProductPoint, z_prime: &ProductPoint) -> Option<ProductBoundaryPoint> {
    z.0.iter()
        .zip(&z_prime.0)
        .map(|(a, b)| visual_endpoint(*a, *b))
        .collect::<Option<Vec<_>>>()
        .map(ProductBoundaryPoint)
}

/// Orbit-sum approximation of a conformal density: an atom at the visual tuple
/// of `g z₀` for each non-identity `g`, weight `∝ e^{-s ψ(κ(g))}`.
pub fn ps_density(spec: &GroupSpec, psi: &LinearForm, s: f64, l: usize) -> Result<AtomicMeasure> {
    psi.check_dim(spec.r())?;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be positive")));
    }
    if l < 2 {
        return Err(Error::InvalidParameter("density needs L ≥ 2".into()));
    }
    let ball = enumerate_ball(spec, l)?;
    Ok(ps_density_of(spec, &ball, psi, s, l))
}

pub fn ps_density_of(spec: &GroupSpec, ball: &Ball, psi: &LinearForm, s: f64, l: usize) -> AtomicMeasure {
    let z0 = spec.basepoint();
    let raw: Vec<Option<(Vec<f64>, Atom)>> = ball.upto(l)[1..]
        .par_iter()
        .map(|e| {
            let xi = visual_tuple(z0, &e.matrix.apply(z0))?;
            let key = xi.0.iter().map(|p| p.cayley_angle()).collect();
            Some((
                key,
                Atom {
                    xi,
                    w: (-s * psi.eval(&e.cartan)).exp(),
                },
            ))
        })
        .collect();
    let mut keyed: Vec<(Vec<f64>, Atom)> = raw.into_iter().flatten().collect();
    // stable sort keeps enumeration order among ties
    keyed.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut atoms: Vec<Atom> = Vec::with_capacity(keyed.len());
    let mut first_angle: Vec<f64> = Vec::with_capacity(keyed.len());
    for (key, atom) in keyed {
        let hit = (0..atoms.len()).rev().take_while(|&k| key[0] - first_angle[k] <= ATOM_MERGE_TOL).find(|&k| {
            atoms[k]
                .xi
                .0
                .iter()
                .zip(&atom.xi.0)
                .all(|(a, b)| boundary_angle_gap(*a, *b) <= ATOM_MERGE_TOL)
        });
        match hit {
            Some(k) => atoms[k].w += atom.w,
            None => {
                first_angle.push(key[0]);
                atoms.push(atom);
            }
        }
    }
    let total: f64 = atoms.iter().map(|a| a.w).sum();
    for a in &mut atoms {
        a.w /= total;
    }
    AtomicMeasure {
        dimension: s,
        form: psi.clone(),
        ball_length: l.min(ball.radius()),
        atoms,
    }
}

/// Uniform grid on `∂H²` in the Cayley angle, `per_factor` cells per factor.
/// Cell `k` is the angle interval `[-π + k·w, -π + (k+1)·w)`, `w = 2π/per_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellGrid {
    pub per_factor: usize,
    pub r: usize,
}

/// Per-factor cell indices.
pub type CellIndex = Vec<usize>;

impl CellGrid {
    pub fn new(per_factor: usize, r: usize) -> Result<Self> {
        if per_factor < 4 {
            return Err(Error::InvalidParameter(format!(
                "{per_factor} cells per factor, need at least 4"
            )));
        }
        Ok(Self { per_factor, r })
    }

    fn width(&self) -> f64 {
        TAU / self.per_factor as f64
    }

    pub fn factor_cell(&self, p: BoundaryPoint) -> usize {
        let k = ((p.cayley_angle() + PI) / self.width()).floor() as usize;
        k.min(self.per_factor - 1)
    }

    pub fn cell_of(&self, xi: &ProductBoundaryPoint) -> CellIndex {
        xi.0.iter().map(|p| self.factor_cell(*p)).collect()
    }

    /// Row-major flat id, factor 0 most significant.
    pub fn flat_id(&self, cell: &[usize]) -> usize {
        cell.iter().fold(0, |acc, k| acc * self.per_factor + k)
    }

    pub fn unflatten(&self, mut id: usize) -> CellIndex {
        let mut out = vec![0; self.r];
        for slot in out.iter_mut().rev() {
            *slot = id % self.per_factor;
            id /= self.per_factor;
        }
        out
    }

    /// Angle interval of a factor cell.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let w = self.width();
        (-PI + k as f64 * w, -PI + (k + 1) as f64 * w)
    }

    pub fn center(&self, cell: &[usize]) -> ProductBoundaryPoint {
        ProductBoundaryPoint(
            cell.iter()
                .map(|k| {
                    let (a, b) = self.interval(*k);
                    BoundaryPoint::from_cayley_angle(0.5 * (a + b))
                })
                .collect(),
        )
    }
}

/// Cell masses keyed by flat id, sorted by id.
pub fn cell_masses(nu: &AtomicMeasure, grid: &CellGrid) -> Vec<(usize, f64)> {
    let mut m: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for a in &nu.atoms {
        *m.entry(grid.flat_id(&grid.cell_of(&a.xi))).or_default() += a.w;
    }
    m.into_iter().collect()
}

/// `Σ |ν₁(c) - ν₂(c)|` over cells: the Cauchy diagnostic for atomic
/// measures built from growing balls.
pub fn cell_mass_difference(a: &AtomicMeasure, b: &AtomicMeasure, grid: &CellGrid) -> f64 {
    let ma: std::collections::BTreeMap<usize, f64> = cell_masses(a, grid).into_iter().collect();
    let mb: std::collections::BTreeMap<usize, f64> = cell_masses(b, grid).into_iter().collect();
    let keys: std::collections::BTreeSet<usize> = ma.keys().chain(mb.keys()).copied().collect();
    keys.iter()
        .map(|k| (ma.get(k).unwrap_or(&0.0) - mb.get(k).unwrap_or(&0.0)).abs())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub cell_id: usize,
    pub mass: f64,
    pub image_mass: f64,
    /// `None` when either mass is below [`CELL_MASS_FLOOR`].
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub cells_used: usize,
    pub rows: Vec<ResidualRow>,
}

impl ResidualReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell_id,mass,image_mass,residual\n");
        for r in &self.rows {
            let res = r.residual.map(|x| format!("{x:.12e}")).unwrap_or_default();
            out.push_str(&format!("{},{:.12e},{:.12e},{}\n", r.cell_id, r.mass, r.image_mass, res));
        }
        out
    }
}

pub fn conformality_residual(
    spec: &GroupSpec,
    psi: &LinearForm,
    s: f64,
    l: usize,
    g: &GroupElement,
    cells: usize,
) -> Result<ResidualReport> {
    let nu = ps_density(spec, psi, s, l)?;
    conformality_residual_of(spec, &nu, g, cells)
}

/// Max over cells `c` carrying the mass floor (for both `ν` and `g_*ν`) of
/// `|ln(g_*ν(c)/ν(c)) + s ψ(β_{ξc}(g z₀, z₀))|`, `ξc` the cell centre.
///
/// A `δ`-conformal `Γ`-equivariant density satisfies
/// `g_*ν_{z₀} = ν_{g z₀}` and `dν_{g z₀}/dν_{z₀}(ξ) = e^{-δ ψ(β_ξ(g z₀, z₀))}`.
pub fn conformality_residual_of(
    spec: &GroupSpec,
    nu: &AtomicMeasure,
    g: &GroupElement,
    cells: usize,
) -> Result<ResidualReport> {
    let grid = CellGrid::new(cells, spec.r())?;
    nu.form.check_dim(spec.r())?;
    let mut mass: std::collections::BTreeMap<usize, (f64, f64)> = std::collections::BTreeMap::new();
    for a in &nu.atoms {
        mass.entry(grid.flat_id(&grid.cell_of(&a.xi))).or_default().0 += a.w;
        let image = g.matrix.apply_boundary(&a.xi);
        mass.entry(grid.flat_id(&grid.cell_of(&image))).or_default().1 += a.w;
    }
    let z0 = spec.basepoint();
    let gz0 = g.matrix.apply(z0);
    let s = nu.dimension;
    let mut worst = 0.0f64;
    let mut used = 0;
    let rows = mass
        .into_iter()
        .map(|(cell_id, (m, im))| {
            let residual = (m >= CELL_MASS_FLOOR && im >= CELL_MASS_FLOOR).then(|| {
                let center = grid.center(&grid.unflatten(cell_id));
                let beta: Vec<f64> = (0..spec.r())
                    .map(|i| busemann(center.0[i], gz0.0[i], z0.0[i]))
                    .collect();
                let beta = crate::product::VectorR(beta);
                ((im / m).ln() + s * nu.form.eval(&beta)).abs()
            });
            if let Some(r) = residual {
                worst = worst.max(r);
                used += 1;
            }
            ResidualRow {
                cell_id,
                mass: m,
                image_mass: im,
                residual,
            }
        })
        .collect();
    if used == 0 {
        return Err(Error::EmptyCells);
    }
    Ok(ResidualReport {
        residual: worst,
        cells_used: used,
        rows,
    })
}
