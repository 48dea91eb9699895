//! Transformation-operator kernels on the triangle `0 <= t <= x <= 1`.
//!
//! `R` solves the characteristic integral equations, `P±` the diagonal
//! convolution corrections fixed by the edge condition at `t = 0`, and
//! `K± = R + P±(x - t) + int_t^x R(x, s) P±(s - t) ds`.

mod goursat;
mod transform;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub use goursat::{goursat_residual, solve_r, GoursatSolution};
pub use transform::{
    apply_transform, assemble_k, delta_via_traces, edge_residual, jump_residual, p_residual, phi_via_kernels, solve_p,
    sym_r_pm, trace_g, trace_g_minors, ConvolutionProfile, Kernels,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    R,
    KPlus,
    KMinus,
    RPlus,
    RMinus,
}

impl Role {
    fn tag(self) -> f64 {
        match self {
            Role::R => 0.0,
            Role::KPlus => 1.0,
            Role::KMinus => 2.0,
            Role::RPlus => 3.0,
            Role::RMinus => 4.0,
        }
    }

    fn from_tag(t: f64) -> Option<Role> {
        [Role::R, Role::KPlus, Role::KMinus, Role::RPlus, Role::RMinus].into_iter().find(|r| r.tag() == t)
    }
}

/// Nodes `(x_i, t_j) = (i/N, j/N)`, `0 <= j <= i <= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleGrid {
    n: usize,
}

impl TriangleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Dimension(format!("triangle grid needs N >= 4, got {n}")));
        }
        Ok(TriangleGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn len(&self) -> usize {
        (self.n + 1) * (self.n + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i <= self.n);
        i * (i + 1) / 2 + j
    }
}

#[inline]
pub(crate) fn slot(j: usize, k: usize) -> usize {
    (j - 1) * 2 + (k - 1)
}

/// Four complex entry grids over a [`TriangleGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct KernelField {
    grid: TriangleGrid,
    role: Role,
    b: [f64; 2],
    data: [Vec<C64>; 4],
}

impl KernelField {
    pub fn zeros(grid: TriangleGrid, role: Role, b: [f64; 2]) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        KernelField { grid, role, b, data: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn from_fn(grid: TriangleGrid, role: Role, b: [f64; 2], f: impl Fn(f64, f64) -> [C64; 4]) -> Self {
        let mut out = Self::zeros(grid, role, b);
        let h = grid.h();
        for i in 0..=grid.n() {
            for j in 0..=i {
                let v = f(i as f64 * h, j as f64 * h);
                let idx = grid.index(i, j);
                for (s, val) in v.into_iter().enumerate() {
                    out.data[s][idx] = val;
                }
            }
        }
        out
    }

    pub fn grid(&self) -> TriangleGrid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn weights(&self) -> [f64; 2] {
        self.b
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// Entry `(j, k)` (1-based) at node `(i, l)`.
    #[inline]
    pub fn get(&self, j: usize, k: usize, i: usize, l: usize) -> C64 {
        self.data[slot(j, k)][self.grid.index(i, l)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, i: usize, l: usize, v: C64) {
        let idx = self.grid.index(i, l);
        self.data[slot(j, k)][idx] = v;
    }

    /// Samples `t_0..=t_i` of entry `(j, k)` on row `x_i`.
    pub fn row(&self, j: usize, k: usize, i: usize) -> &[C64] {
        let s = self.grid.index(i, 0);
        &self.data[slot(j, k)][s..=s + i]
    }

    pub(crate) fn entry_data_mut(&mut self, s: usize) -> &mut Vec<C64> {
        &mut self.data[s]
    }

    /// Bilinear interpolation on square cells, linear on the diagonal
    /// half-cells; `t` is clamped to `[0, x]`.
    pub fn interp(&self, j: usize, k: usize, x: f64, t: f64) -> C64 {
        let n = self.grid.n;
        let d = &self.data[slot(j, k)];
        let sx = (x.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let st = (t * n as f64).clamp(0.0, sx);
        let mut i = sx.floor() as usize;
        if i >= n {
            i = n - 1;
        }
        let fx = sx - i as f64;
        let mut l = st.floor() as usize;
        if l > i {
            l = i;
        }
        let ft = (st - l as f64).max(0.0);
        let g = &self.grid;
        if l < i {
            let ft = ft.min(1.0);
            let v00 = d[g.index(i, l)];
            let v10 = d[g.index(i + 1, l)];
            let v01 = d[g.index(i, l + 1)];
            let v11 = d[g.index(i + 1, l + 1)];
            v00 * ((1.0 - fx) * (1.0 - ft)) + v10 * (fx * (1.0 - ft)) + v01 * ((1.0 - fx) * ft) + v11 * (fx * ft)
        } else {
            let ft = ft.min(fx);
            d[g.index(i, i)] * (1.0 - fx) + d[g.index(i + 1, i)] * (fx - ft) + d[g.index(i + 1, i + 1)] * ft
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flat_map(|v| v.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sup_diff(&self, other: &KernelField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn combine(&self, other: &KernelField, role: Role, f: impl Fn(C64, C64) -> C64) -> KernelField {
        let mut out = self.clone();
        out.role = role;
        for s in 0..4 {
            for (o, (a, b)) in out.data[s].iter_mut().zip(self.data[s].iter().zip(&other.data[s])) {
                *o = f(*a, *b);
            }
        }
        out
    }

    /// Binary dump: eight little-endian f64 header values
    /// `[N, role, b1, b2, 4, nodes, 0, 0]`, then for entries 11, 12, 21, 22
    /// the rows `x_0..x_N` (each `t_0..t_i`) as `(re, im)` f32 pairs.
    pub fn write_binary(&self, mut w: impl Write) -> std::io::Result<()> {
        let header = [self.n() as f64, self.role.tag(), self.b[0], self.b[1], 4.0, self.grid.len() as f64, 0.0, 0.0];
        for v in header {
            w.write_all(&v.to_le_bytes())?;
        }
        for entry in &self.data {
            for z in entry {
                w.write_all(&(z.re as f32).to_le_bytes())?;
                w.write_all(&(z.im as f32).to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> std::io::Result<Self> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut header = [0.0f64; 8];
        let mut buf8 = [0u8; 8];
        for v in header.iter_mut() {
            r.read_exact(&mut buf8)?;
            *v = f64::from_le_bytes(buf8);
        }
        let grid = TriangleGrid::new(header[0] as usize).map_err(|_| bad("grid size"))?;
        let role = Role::from_tag(header[1]).ok_or_else(|| bad("role tag"))?;
        if header[4] != 4.0 || header[5] as usize != grid.len() {
            return Err(bad("layout"));
        }
        let mut out = KernelField::zeros(grid, role, [header[2], header[3]]);
        let mut buf4 = [0u8; 4];
        for entry in out.data.iter_mut() {
            for z in entry.iter_mut() {
                r.read_exact(&mut buf4)?;
                let re = f32::from_le_bytes(buf4) as f64;
                r.read_exact(&mut buf4)?;
                let im = f32::from_le_bytes(buf4) as f64;
                *z = C64::new(re, im);
            }
        }
        Ok(out)
    }
}

/// Grid values of the `X_1` and `X_inf` norms, per entry `[11, 12, 21, 22]`
/// and as the entry maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelNorms {
    pub x1: [f64; 4],
    pub xinf: [f64; 4],
    pub x1_max: f64,
    pub xinf_max: f64,
}

/// `sup_t int_t^1 |f(x, t)| dx` and `sup_x int_0^x |f(x, t)| dt` by trapezoid.
pub fn kernel_norms(field: &KernelField) -> KernelNorms {
    let n = field.n();
    let h = field.grid.h();
    let g = field.grid;
    let mut x1 = [0.0; 4];
    let mut xinf = [0.0; 4];
    for s in 0..4 {
        let d = &field.data[s];
        for i in 0..=n {
            let mut acc = 0.0;
            for l in 0..=i {
                let w = if l == 0 || l == i { 0.5 } else { 1.0 };
                acc += w * d[g.index(i, l)].norm();
            }
            xinf[s] = f64::max(xinf[s], if i == 0 { 0.0 } else { acc * h });
        }
        for l in 0..=n {
            let mut acc = 0.0;
            for i in l..=n {
                let w = if i == l || i == n { 0.5 } else { 1.0 };
                acc += w * d[g.index(i, l)].norm();
            }
            x1[s] = f64::max(x1[s], if l == n { 0.0 } else { acc * h });
        }
    }
    KernelNorms { x1, xinf, x1_max: x1.iter().cloned().fold(0.0, f64::max), xinf_max: xinf.iter().cloned().fold(0.0, f64::max) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let grid = TriangleGrid::new(8).unwrap();
        let f = |x: f64, t: f64| c(1.0 + 2.0 * x - 3.0 * t, x + t);
        let field = KernelField::from_fn(grid, Role::R, [-1.0, 1.0], |x, t| [f(x, t); 4]);
        for &(x, t) in &[(0.3, 0.1), (0.55, 0.54), (0.9, 0.9), (1.0, 0.0), (0.125, 0.125), (0.77, 0.2)] {
            assert!((field.interp(1, 2, x, t) - f(x, t)).norm() < 1e-14, "({x},{t})");
        }
        // bilinear reproduces xt on square cells
        let field = KernelField::from_fn(grid, Role::R, [-1.0, 1.0], |x, t| [c(x * t, 0.0); 4]);
        assert!((field.interp(2, 2, 0.8, 0.3) - c(0.24, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn norms_of_constant_field() {
        let grid = TriangleGrid::new(64).unwrap();
        let field = KernelField::from_fn(grid, Role::R, [-1.0, 1.0], |_, _| [c(1.0, 0.0); 4]);
        let nrm = kernel_norms(&field);
        assert!((nrm.x1_max - 1.0).abs() < 1e-12);
        assert!((nrm.xinf_max - 1.0).abs() < 1e-12);
        let zero = KernelField::zeros(grid, Role::R, [-1.0, 1.0]);
        let nrm = kernel_norms(&zero);
        assert_eq!((nrm.x1_max, nrm.xinf_max), (0.0, 0.0));
    }

    #[test]
    fn discrete_l1_operator_norm_equals_x1() {
        let grid = TriangleGrid::new(40).unwrap();
        let h = grid.h();
        let field = KernelField::from_fn(grid, Role::R, [-1.0, 1.0], |x, t| [c((x - t).cos() + x, t); 4]);
        // Volterra applicator (Nf)(x_i) = sum_l w_l N(x_i, t_l) f_l, L1 norm with trapezoid weights in x.
        let n = grid.n();
        let wx = |i: usize| if i == 0 || i == n { 0.5 * h } else { h };
        let wt = |l: usize, i: usize| if l == 0 || l == i { 0.5 * h } else { h };
        let mut op = 0.0f64;
        for l in 0..n {
            // image of a unit-mass spike at t_l: f_l = 1 / wx(l)
            let mass: f64 = (l..=n).map(|i| wx(i) * (field.get(1, 1, i, l) * wt(l, i) / wx(l)).norm()).sum();
            op = op.max(mass);
        }
        let x1 = kernel_norms(&field).x1[0];
        assert!((op - x1).abs() < 0.1 * x1, "{op} vs {x1}");
    }

    #[test]
    fn binary_round_trip() {
        let grid = TriangleGrid::new(6).unwrap();
        let field = KernelField::from_fn(grid, Role::KMinus, [-0.5, 2.0], |x, t| {
            [c(x, t), c(-t, 1.0), c(0.25, x * t), c(1.0 / (1.0 + x), 0.0)]
        });
        let mut buf = Vec::new();
        field.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 64 + 4 * grid.len() * 8);
        let back = KernelField::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.role(), Role::KMinus);
        assert_eq!(back.weights(), [-0.5, 2.0]);
        assert!(back.sup_diff(&field) < 1e-6);
    }
}
