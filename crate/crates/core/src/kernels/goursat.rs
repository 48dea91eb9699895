use rayon::prelude::*;

use super::{slot, KernelField, Role, TriangleGrid};
use crate::problem::{PotentialGrid, Weights};
use crate::{Error, Result, C64, I};

const TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct GoursatSolution {
    pub field: KernelField,
    pub sweeps: usize,
    pub last_update: f64,
}

struct Data<'a> {
    q: &'a PotentialGrid,
    a: [f64; 2],
    /// `Q12`, `Q21` at the triangle nodes `x_i`.
    q12: Vec<C64>,
    q21: Vec<C64>,
}

impl<'a> Data<'a> {
    fn new(q: &'a PotentialGrid, weights: &Weights, grid: TriangleGrid) -> Self {
        let n = grid.n();
        let at = |j, k| (0..=n).map(|i| q.entry_at(j, k, i as f64 / n as f64)).collect();
        Data { q, a: [weights.a(1), weights.a(2)], q12: at(1, 2), q21: at(2, 1) }
    }

    fn q_node(&self, j: usize, i: usize) -> C64 {
        if j == 1 {
            self.q12[i]
        } else {
            self.q21[i]
        }
    }
}

/// Right-hand side of the diagonal equation at node `(i, l)`:
/// `R_kk(x, t) = -(i/a_k) int_{x-t}^x Q_kj(s) R_jk(s, s - x + t) ds`.
fn diag_rhs(old: &KernelField, d: &Data, k: usize, i: usize, l: usize) -> C64 {
    if l == 0 {
        return C64::new(0.0, 0.0);
    }
    let j = 3 - k;
    let h = old.grid().h();
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..=l {
        let w = if m == 0 || m == l { 0.5 } else { 1.0 };
        let xi = i - l + m;
        acc += d.q_node(k, xi) * old.get(j, k, xi, m) * w;
    }
    -I / d.a[k - 1] * acc * h
}

/// Right-hand side of the off-diagonal equation at node `(i, l)`:
/// `R_jk(x, t) = i Q_jk(xi)/(a_k - a_j) - (i/a_j) int_xi^x Q_jk(s) R_kk(s, t + kappa (s - x)) ds`.
fn off_rhs(old: &KernelField, d: &Data, j: usize, i: usize, l: usize) -> C64 {
    let k = 3 - j;
    let n = old.n() as f64;
    let (x, t) = (i as f64 / n, l as f64 / n);
    let (aj, ak) = (d.a[j - 1], d.a[k - 1]);
    let xi = (ak * x - aj * t) / (ak - aj);
    let kappa = ak / aj;
    let trace = I * d.q.entry_at(j, k, xi) / (ak - aj);
    let len = x - xi;
    if len <= 1e-14 {
        return trace;
    }
    let steps = ((len * n).ceil() as usize).max(1);
    let hs = len / steps as f64;
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..=steps {
        let w = if m == 0 || m == steps { 0.5 } else { 1.0 };
        let s = if m == steps { x } else { xi + m as f64 * hs };
        let ts = (t + kappa * (s - x)).min(s);
        acc += d.q.entry_at(j, k, s) * old.interp(k, k, s, ts) * w;
    }
    trace - I / aj * acc * hs
}

fn sweep(old: &KernelField, d: &Data) -> KernelField {
    let grid = old.grid();
    let rows: Vec<[Vec<C64>; 4]> = (0..=grid.n())
        .into_par_iter()
        .map(|i| {
            let mut row: [Vec<C64>; 4] = Default::default();
            for l in 0..=i {
                row[slot(1, 1)].push(diag_rhs(old, d, 1, i, l));
                row[slot(1, 2)].push(off_rhs(old, d, 1, i, l));
                row[slot(2, 1)].push(off_rhs(old, d, 2, i, l));
                row[slot(2, 2)].push(diag_rhs(old, d, 2, i, l));
            }
            row
        })
        .collect();
    let mut out = KernelField::zeros(grid, Role::R, old.weights());
    for s in 0..4 {
        let dst = out.entry_data_mut(s);
        dst.clear();
        for row in &rows {
            dst.extend_from_slice(&row[s]);
        }
    }
    out
}

/// Picard iteration for `R` from the characteristic integral equations.
pub fn solve_r(q: &PotentialGrid, weights: &Weights, grid: TriangleGrid) -> Result<GoursatSolution> {
    if !q.is_off_diagonal() {
        return Err(Error::InvalidPotential("kernel equations need an off-diagonal potential".into()));
    }
    let d = Data::new(q, weights, grid);
    let mut field = KernelField::zeros(grid, Role::R, weights.b());
    let mut last_update = f64::INFINITY;
    for sweeps in 1..=MAX_SWEEPS {
        let next = sweep(&field, &d);
        last_update = next.sup_diff(&field);
        field = next;
        if last_update < TOL {
            return Ok(GoursatSolution { field, sweeps, last_update });
        }
    }
    Err(Error::KernelDivergence { last_update, sweeps: MAX_SWEEPS })
}

/// `sup |T(R) - R|` with `T` the discretized right-hand sides.
pub fn goursat_residual(field: &KernelField, q: &PotentialGrid, weights: &Weights) -> f64 {
    let d = Data::new(q, weights, field.grid());
    sweep(field, &d).sup_diff(field)
}
