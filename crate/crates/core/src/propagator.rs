//! Fundamental matrices of `y' = i B (lambda I - Q(x)) y`.

use nalgebra::{SMatrix, SVector};

use crate::linalg::expm;
use crate::problem::{DiracProblem, MatrixGrid};
use crate::{Error, Result, C64, I};

/// Largest admissible `|Im lambda| * max |b_j|`.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// `Phi(x_i, lambda)` on the uniform grid.
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    pub lambda: C64,
    pub nodes: Vec<SMatrix<C64, N, N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn end(&self) -> &SMatrix<C64, N, N> {
        self.nodes.last().expect("non-empty trajectory")
    }

    pub fn m(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `Phi(x_i) v` at every node.
    pub fn apply(&self, v: &SVector<C64, N>) -> Vec<SVector<C64, N>> {
        self.nodes.iter().map(|p| p * v).collect()
    }
}

pub fn check_guard<const N: usize>(b: &[f64; N], lambda: C64) -> Result<()> {
    let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g = lambda.im.abs() * bmax;
    if !(g <= OVERFLOW_GUARD) {
        return Err(Error::StripTooTall(g));
    }
    Ok(())
}

fn generator<const N: usize>(b: &[f64; N], q: &SMatrix<C64, N, N>, lambda: C64, h: f64) -> SMatrix<C64, N, N> {
    let mut a = -q;
    for j in 0..N {
        a[(j, j)] += lambda;
    }
    for j in 0..N {
        let s = I * (b[j] * h);
        for k in 0..N {
            a[(j, k)] *= s;
        }
    }
    a
}

pub(crate) fn free_node<const N: usize>(b: &[f64; N], lambda: C64, x: f64) -> SMatrix<C64, N, N> {
    let mut out = SMatrix::<C64, N, N>::zeros();
    for j in 0..N {
        out[(j, j)] = (I * (b[j] * x) * lambda).exp();
    }
    out
}

/// Midpoint exponential steps `Phi_{i+1} = exp(h i B (lambda - Q(x_{i+1/2}))) Phi_i`.
pub fn propagate_grid<const N: usize>(b: &[f64; N], q: &MatrixGrid<N>, lambda: C64) -> Result<Trajectory<N>> {
    check_guard(b, lambda)?;
    let m = q.m();
    if q.is_zero() {
        let nodes = (0..=m).map(|i| free_node(b, lambda, i as f64 / m as f64)).collect();
        return Ok(Trajectory { lambda, nodes });
    }
    let h = q.h();
    let mut nodes = Vec::with_capacity(m + 1);
    let mut phi = SMatrix::<C64, N, N>::identity();
    nodes.push(phi);
    for i in 0..m {
        phi = expm(&generator(b, &q.midpoint(i), lambda, h)) * phi;
        nodes.push(phi);
    }
    Ok(Trajectory { lambda, nodes })
}

/// `Phi(1, lambda)` without storing the trajectory.
pub fn propagate_end<const N: usize>(b: &[f64; N], q: &MatrixGrid<N>, lambda: C64) -> Result<SMatrix<C64, N, N>> {
    check_guard(b, lambda)?;
    if q.is_zero() {
        return Ok(free_node(b, lambda, 1.0));
    }
    let h = q.h();
    let mut phi = SMatrix::<C64, N, N>::identity();
    for i in 0..q.m() {
        phi = expm(&generator(b, &q.midpoint(i), lambda, h)) * phi;
    }
    Ok(phi)
}

pub fn propagate(problem: &DiracProblem, lambda: C64) -> Result<Trajectory<2>> {
    propagate_grid(&problem.weights.b(), problem.potential.grid(), lambda)
}

pub fn propagate_to_end(problem: &DiracProblem, lambda: C64) -> Result<SMatrix<C64, 2, 2>> {
    propagate_end(&problem.weights.b(), problem.potential.grid(), lambda)
}

/// `e_±(x; lambda) = Phi(x, lambda) (1, ±1)^T`.
pub fn solve_cauchy_pm(problem: &DiracProblem, lambda: C64, sign: f64) -> Result<Vec<SVector<C64, 2>>> {
    let v = SVector::<C64, 2>::new(C64::new(1.0, 0.0), C64::new(sign, 0.0));
    Ok(propagate(problem, lambda)?.apply(&v))
}

/// Fundamental matrix `Psi` of the adjoint equation with potential `Q^*`.
pub fn adjoint_propagate(problem: &DiracProblem, lambda: C64) -> Result<Trajectory<2>> {
    propagate_grid(&problem.weights.b(), problem.potential.adjoint().grid(), lambda)
}

/// `exp(i (sum b_j) lambda - i int_0^1 tr(B Q))`, the value of `det Phi(1, lambda)`.
pub fn wronskian<const N: usize>(b: &[f64; N], q: &MatrixGrid<N>, lambda: C64) -> C64 {
    let h = q.h();
    let m = q.m();
    let tr = |k: usize| (0..N).map(|j| q.node(k)[(j, j)] * b[j]).sum::<C64>();
    let int: C64 = (0..=m).map(|k| tr(k) * if k == 0 || k == m { 0.5 * h } else { h }).sum();
    (I * b.iter().sum::<f64>() * lambda - I * int).exp()
}
