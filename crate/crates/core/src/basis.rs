//! Eigenfunctions, biorthogonal normalization and Gram diagnostics.

use nalgebra::{DMatrix, Matrix2, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::simpson_weights;
use crate::problem::{adjoint_problem, DiracProblem};
use crate::propagator::propagate;
use crate::spectra::{group_parentheses, EigenvalueRecord};
use crate::{Error, Result, C64};

/// Relative size of the smallest singular value of `U(λ)` accepted as zero.
const NULL_TOL: f64 = 1e-6;
const DEGENERATE: f64 = 1e-10;

pub type Samples = Vec<[C64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub index: i64,
    pub lambda: C64,
    pub f: Samples,
    pub g: Samples,
    /// `(f, g)` before normalization.
    pub pairing: C64,
    pub degenerate: bool,
}

/// `L2` inner product on the grid, linear in the first argument.
pub fn inner(f: &[[C64; 2]], g: &[[C64; 2]], w: &[f64]) -> C64 {
    f.iter().zip(g).zip(w).map(|((a, b), &wi)| (a[0] * b[0].conj() + a[1] * b[1].conj()) * wi).sum()
}

pub fn norm(f: &[[C64; 2]], w: &[f64]) -> f64 {
    inner(f, f, w).re.sqrt()
}

/// Simpson weights on the problem grid.
pub fn grid_weights(problem: &DiracProblem) -> Vec<f64> {
    let m = problem.potential.m();
    simpson_weights(m, 1.0 / m as f64)
}

/// Null vectors of `U(λ) = C + D Phi(1, λ)` and the trajectory `Phi(x, λ)`.
fn null_space(problem: &DiracProblem, lambda: C64) -> Result<(Vec<SVector<C64, 2>>, crate::propagator::Trajectory<2>)> {
    let traj = propagate(problem, lambda)?;
    let dphi = problem.bc.d * traj.end();
    let u: Matrix2<C64> = problem.bc.c + dphi;
    let scale = problem.bc.c.norm().max(dphi.norm()).max(1.0);
    let svd = u.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order = [0usize, 1];
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let (smin, smax) = (svd.singular_values[order[0]], svd.singular_values[order[1]]);
    if smin > NULL_TOL * scale {
        return Err(Error::NotAnEigenvalue(lambda, smin / scale));
    }
    let row = |i: usize| SVector::<C64, 2>::new(vt[(i, 0)].conj(), vt[(i, 1)].conj());
    let vs = if smax <= NULL_TOL * scale { vec![row(order[0]), row(order[1])] } else { vec![row(order[0])] };
    Ok((vs, traj))
}

fn to_samples(v: Vec<SVector<C64, 2>>) -> Samples {
    v.into_iter().map(|s| [s[0], s[1]]).collect()
}

/// Eigenfunction `Phi(x, λ) v` with `U(λ) v = 0`, and the adjoint eigenfunction at `conj λ`;
/// two pairs when `U(λ)` vanishes.
pub fn eigenpair_functions(problem: &DiracProblem, record: &EigenvalueRecord) -> Result<Vec<RootPair>> {
    let lambda = record.lambda;
    let adj = adjoint_problem(problem)?;
    let (vf, tf) = null_space(problem, lambda)?;
    let (vg, tg) = null_space(&adj, lambda.conj())?;
    let w = grid_weights(problem);
    let fs: Vec<Samples> = vf.iter().map(|v| to_samples(tf.apply(v))).collect();
    let mut gs: Vec<Samples> = vg.iter().map(|v| to_samples(tg.apply(v))).collect();
    if fs.len() != gs.len() {
        return Err(Error::Dimension(format!("{} eigenfunctions but {} adjoint ones", fs.len(), gs.len())));
    }
    if fs.len() == 2 {
        // g' = g conj(G^{-1}) makes the cross matrix the identity when G is invertible.
        let gm = Matrix2::from_fn(|i, j| inner(&fs[i], &gs[j], &w));
        if let Some(inv) = gm.try_inverse() {
            let m = inv.map(|z| z.conj());
            let mixed: Vec<Samples> = (0..2)
                .map(|j| (0..gs[0].len()).map(|i| [0, 1].map(|c| gs[0][i][c] * m[(0, j)] + gs[1][i][c] * m[(1, j)])).collect())
                .collect();
            gs = mixed;
        }
    }
    Ok(fs
        .into_iter()
        .zip(gs)
        .map(|(f, g)| {
            let pairing = inner(&f, &g, &w);
            RootPair { index: record.index, lambda, f, g, pairing, degenerate: false }
        })
        .collect())
}

/// `f / |f|` and `|f| g / conj (f, g)`; pairs with `|(f, g)| < 1e-10 |f| |g|` are flagged and left unscaled.
pub fn normalize_biorthogonal(pairs: &mut [RootPair], w: &[f64]) {
    for p in pairs.iter_mut() {
        let nf = norm(&p.f, w);
        let ng = norm(&p.g, w);
        p.pairing = inner(&p.f, &p.g, w);
        if p.pairing.norm() < DEGENERATE * nf * ng || nf == 0.0 {
            p.degenerate = true;
            continue;
        }
        let sg = nf / p.pairing.conj();
        for v in p.f.iter_mut() {
            *v = v.map(|z| z / nf);
        }
        for v in p.g.iter_mut() {
            *v = v.map(|z| z * sg);
        }
    }
}

/// Root pairs for every record, normalized.
pub fn root_system(problem: &DiracProblem, records: &[EigenvalueRecord]) -> Result<Vec<RootPair>> {
    let w = grid_weights(problem);
    let nested: Vec<Vec<RootPair>> = records.par_iter().map(|r| eigenpair_functions(problem, r)).collect::<Result<_>>()?;
    let mut pairs: Vec<RootPair> = nested.into_iter().flatten().collect();
    normalize_biorthogonal(&mut pairs, &w);
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub n: usize,
    pub cross_residual: f64,
    pub cond: f64,
    pub bessel: f64,
    /// Condition number on the central half of the window.
    pub cond_half: f64,
    pub degenerate: Vec<i64>,
    pub blocks: Option<Vec<Vec<usize>>>,
    pub block_cond: Option<f64>,
}

fn gram(vs: &[&Samples], w: &[f64]) -> DMatrix<C64> {
    let n = vs.len();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = inner(vs[j], vs[i], w);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

fn hermitian_extremes(g: DMatrix<C64>) -> (f64, f64) {
    let eig = g.symmetric_eigen();
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    (lo, hi)
}

fn cond_of(vs: &[&Samples], w: &[f64]) -> (f64, f64) {
    let (lo, hi) = hermitian_extremes(gram(vs, w));
    (if lo > 0.0 { hi / lo } else { f64::INFINITY }, hi)
}

/// Gram and cross matrices of the non-degenerate pairs; `eps > 0` adds the block-Gram after disc grouping.
pub fn gram_diagnostics(pairs: &[RootPair], w: &[f64], eps: Option<f64>) -> Result<GramReport> {
    let good: Vec<&RootPair> = pairs.iter().filter(|p| !p.degenerate).collect();
    if good.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, got: good.len() });
    }
    let n = good.len();
    let fs: Vec<&Samples> = good.iter().map(|p| &p.f).collect();
    let mut cross_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            cross_residual = cross_residual.max((inner(&good[i].f, &good[j].g, w) - target).norm());
        }
    }
    let (cond, bessel) = cond_of(&fs, w);
    let kmax = good.iter().map(|p| p.index.abs()).max().unwrap_or(0);
    let half: Vec<&Samples> = good.iter().filter(|p| 2 * p.index.abs() <= kmax).map(|p| &p.f).collect();
    let cond_half = if half.len() >= 2 { cond_of(&half, w).0 } else { 1.0 };
    let (blocks, block_cond) = match eps {
        Some(e) => {
            let recs: Vec<EigenvalueRecord> = good.iter().map(|p| EigenvalueRecord::new(p.lambda, 1)).collect();
            let blocks = group_parentheses(&recs, e);
            let bc = block_gram_cond(&fs, &blocks, w);
            (Some(blocks), Some(bc))
        }
        None => (None, None),
    };
    Ok(GramReport {
        n,
        cross_residual,
        cond,
        bessel,
        cond_half,
        degenerate: pairs.iter().filter(|p| p.degenerate).map(|p| p.index).collect(),
        blocks,
        block_cond,
    })
}

/// Condition number of the Gram matrix after orthonormalizing each block (`G_b^{-1/2}`).
pub fn block_gram_cond(fs: &[&Samples], blocks: &[Vec<usize>], w: &[f64]) -> f64 {
    let mut out: Vec<Samples> = Vec::with_capacity(fs.len());
    for b in blocks {
        let vs: Vec<&Samples> = b.iter().map(|&i| fs[i]).collect();
        let eig = gram(&vs, w).symmetric_eigen();
        let k = vs.len();
        let mut t = DMatrix::<C64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..k {
                    let s = eig.eigenvalues[l].max(1e-300).powf(-0.5);
                    acc += eig.eigenvectors[(i, l)] * s * eig.eigenvectors[(j, l)].conj();
                }
                t[(i, j)] = acc;
            }
        }
        for j in 0..k {
            let m = fs[0].len();
            let v: Samples = (0..m)
                .map(|x| {
                    let mut s = [C64::new(0.0, 0.0); 2];
                    for i in 0..k {
                        s[0] += vs[i][x][0] * t[(i, j)];
                        s[1] += vs[i][x][1] * t[(i, j)];
                    }
                    s
                })
                .collect();
            out.push(v);
        }
    }
    let refs: Vec<&Samples> = out.iter().collect();
    cond_of(&refs, w).0
}

/// `max_x |-i B^{-1} f' + Q f - λ f|` by central differences at interior nodes.
pub fn equation_residual(problem: &DiracProblem, pair: &RootPair) -> f64 {
    let m = problem.potential.m();
    let h = 1.0 / m as f64;
    let b = problem.weights.b();
    let mut worst = 0.0f64;
    for i in 1..m {
        let q = problem.potential.grid().node(i);
        for j in 0..2 {
            let df = (pair.f[i + 1][j] - pair.f[i - 1][j]) / (2.0 * h);
            let qf = q[(j, 0)] * pair.f[i][0] + q[(j, 1)] * pair.f[i][1];
            let r = -crate::I / b[j] * df + qf - pair.lambda * pair.f[i][j];
            worst = worst.max(r.norm());
        }
    }
    worst
}

/// `|C f(0) + D f(1)|`.
pub fn boundary_residual(problem: &DiracProblem, f: &[[C64; 2]]) -> f64 {
    let (a, z) = (f[0], f[f.len() - 1]);
    let v = problem.bc.c * SVector::<C64, 2>::new(a[0], a[1]) + problem.bc.d * SVector::<C64, 2>::new(z[0], z[1]);
    v.norm()
}
