//! Problem definitions and boundary-condition algebra.

use nalgebra::{Matrix2, SMatrix};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Exact ratio tag: `b1 / b2 = -n1 / n2` with `gcd(n1, n2) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub n1: u32,
    pub n2: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidWeights("ratio terms must be positive".into()));
        }
        let g = gcd(n1, n2);
        Ok(Ratio { n1: n1 / g, n2: n2 / g })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    b1: f64,
    b2: f64,
    ratio: Option<Ratio>,
}

impl Weights {
    /// Untagged weights. `b1 == -b2` is tagged 1:1 since that equality is exact.
    pub fn new(b1: f64, b2: f64) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite()) || !(b1 < 0.0 && b2 > 0.0) {
            return Err(Error::InvalidWeights(format!("need b1 < 0 < b2, got ({b1}, {b2})")));
        }
        let ratio = (b1 == -b2).then_some(Ratio { n1: 1, n2: 1 });
        Ok(Weights { b1, b2, ratio })
    }

    pub fn with_ratio(b1: f64, b2: f64, n1: u32, n2: u32) -> Result<Self> {
        let mut w = Self::new(b1, b2)?;
        let r = Ratio::new(n1, n2)?;
        let lhs = b1 * r.n2 as f64;
        let rhs = -b2 * r.n1 as f64;
        if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()) {
            return Err(Error::InvalidWeights(format!(
                "ratio tag {}:{} inconsistent with ({b1}, {b2})",
                r.n1, r.n2
            )));
        }
        w.ratio = Some(r);
        Ok(w)
    }

    pub fn dirac() -> Self {
        Self::new(-1.0, 1.0).unwrap()
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn b(&self) -> [f64; 2] {
        [self.b1, self.b2]
    }

    pub fn ratio(&self) -> Option<Ratio> {
        self.ratio
    }

    /// `alpha = -b1 / b2`.
    pub fn alpha(&self) -> f64 {
        -self.b1 / self.b2
    }

    /// `a_j = 1 / b_j`, `j` in {1, 2}.
    pub fn a(&self, j: usize) -> f64 {
        1.0 / self.b()[j - 1]
    }

    /// `kappa_jk = b_j / b_k`.
    pub fn kappa(&self, j: usize, k: usize) -> f64 {
        self.b()[j - 1] / self.b()[k - 1]
    }

    /// Common unit `b` with `b1 = -n1 b`, `b2 = n2 b` (tagged weights only).
    pub fn unit(&self) -> Option<f64> {
        self.ratio.map(|r| self.b2 / r.n2 as f64)
    }

    /// Continued-fraction probe for `alpha = p/q` with `q <= 64`; diagnostic only.
    pub fn probe_ratio(&self) -> Option<(u64, u64)> {
        let alpha = self.alpha();
        let (mut h0, mut h1) = (0u64, 1u64);
        let (mut k0, mut k1) = (1u64, 0u64);
        let mut x = alpha;
        for _ in 0..40 {
            let a = x.floor();
            let ai = a as u64;
            let h = ai * h1 + h0;
            let k = ai * k1 + k0;
            if k > 64 {
                return None;
            }
            if (alpha - h as f64 / k as f64).abs() < 1e-9 {
                return Some((h, k));
            }
            (h0, h1, k0, k1) = (h1, h, k1, k);
            let frac = x - a;
            if frac < 1e-15 {
                return None;
            }
            x = 1.0 / frac;
        }
        None
    }
}

/// Samples of an `N x N` matrix function on the uniform grid `x_i = i / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGrid<const N: usize> {
    nodes: Vec<SMatrix<C64, N, N>>,
}

impl<const N: usize> MatrixGrid<N> {
    pub fn new(nodes: Vec<SMatrix<C64, N, N>>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidPotential(format!("need M >= 2, got {}", nodes.len().saturating_sub(1))));
        }
        if nodes.iter().any(|q| q.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::InvalidPotential("non-finite sample".into()));
        }
        Ok(MatrixGrid { nodes })
    }

    pub fn zero(m: usize) -> Result<Self> {
        Self::new(vec![SMatrix::zeros(); m + 1])
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> SMatrix<C64, N, N>) -> Result<Self> {
        Self::new((0..=m).map(|i| f(i as f64 / m as f64)).collect())
    }

    pub fn m(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m() as f64
    }

    pub fn nodes(&self) -> &[SMatrix<C64, N, N>] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &SMatrix<C64, N, N> {
        &self.nodes[i]
    }

    pub fn midpoint(&self, i: usize) -> SMatrix<C64, N, N> {
        (self.nodes[i] + self.nodes[i + 1]).scale(0.5)
    }

    /// Piecewise-linear interpolation, clamped to `[0, 1]`.
    pub fn at(&self, x: f64) -> SMatrix<C64, N, N> {
        let m = self.m();
        let s = (x.clamp(0.0, 1.0) * m as f64).min(m as f64);
        let i = (s.floor() as usize).min(m - 1);
        let f = s - i as f64;
        self.nodes[i].scale(1.0 - f) + self.nodes[i + 1].scale(f)
    }

    pub fn is_zero(&self) -> bool {
        self.nodes.iter().all(|q| q.iter().all(|z| *z == C64::new(0.0, 0.0)))
    }

    pub fn map(&self, f: impl Fn(f64, &SMatrix<C64, N, N>) -> SMatrix<C64, N, N>) -> Self {
        let m = self.m() as f64;
        MatrixGrid { nodes: self.nodes.iter().enumerate().map(|(i, q)| f(i as f64 / m, q)).collect() }
    }

    /// Trapezoid estimate of the L1 norm of the largest entry modulus sum.
    pub fn l1_norm(&self) -> f64 {
        let h = self.h();
        let vals: Vec<f64> = self.nodes.iter().map(|q| q.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
        let inner: f64 = vals[1..vals.len() - 1].iter().sum();
        h * (inner + 0.5 * (vals[0] + vals[vals.len() - 1]))
    }
}

/// 2x2 potential on the uniform grid with piecewise-linear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialGrid {
    grid: MatrixGrid<2>,
    off_diagonal: bool,
}

impl PotentialGrid {
    pub fn from_grid(grid: MatrixGrid<2>) -> Self {
        let off_diagonal = grid.nodes().iter().all(|q| q[(0, 0)] == C64::new(0.0, 0.0) && q[(1, 1)] == C64::new(0.0, 0.0));
        PotentialGrid { grid, off_diagonal }
    }

    pub fn zero(m: usize) -> Result<Self> {
        Ok(Self::from_grid(MatrixGrid::zero(m)?))
    }

    /// General potential from `x -> [Q11, Q12, Q21, Q22]`.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> [C64; 4]) -> Result<Self> {
        let grid = MatrixGrid::from_fn(m, |x| {
            let [q11, q12, q21, q22] = f(x);
            Matrix2::new(q11, q12, q21, q22)
        })?;
        Ok(Self::from_grid(grid))
    }

    pub fn off_diagonal(m: usize, q12: impl Fn(f64) -> C64, q21: impl Fn(f64) -> C64) -> Result<Self> {
        let zero = C64::new(0.0, 0.0);
        Self::from_fn(m, |x| [zero, q12(x), q21(x), zero])
    }

    pub fn constant(m: usize, q12: C64, q21: C64) -> Result<Self> {
        Self::off_diagonal(m, |_| q12, |_| q21)
    }

    /// From node samples; diagonal entries default to zero.
    pub fn from_samples(q12: Vec<C64>, q21: Vec<C64>, q11: Option<Vec<C64>>, q22: Option<Vec<C64>>) -> Result<Self> {
        let n = q12.len();
        let zeros = vec![C64::new(0.0, 0.0); n];
        let q11 = q11.unwrap_or_else(|| zeros.clone());
        let q22 = q22.unwrap_or(zeros);
        if q21.len() != n || q11.len() != n || q22.len() != n {
            return Err(Error::InvalidPotential("sample vectors differ in length".into()));
        }
        let nodes = (0..n).map(|i| Matrix2::new(q11[i], q12[i], q21[i], q22[i])).collect();
        Ok(Self::from_grid(MatrixGrid::new(nodes)?))
    }

    pub fn grid(&self) -> &MatrixGrid<2> {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.grid.m()
    }

    pub fn is_off_diagonal(&self) -> bool {
        self.off_diagonal
    }

    pub fn is_zero(&self) -> bool {
        self.grid.is_zero()
    }

    /// Node samples of entry `(j, k)`, 1-based.
    pub fn entry(&self, j: usize, k: usize) -> Vec<C64> {
        self.grid.nodes().iter().map(|q| q[(j - 1, k - 1)]).collect()
    }

    /// Interpolated entry `(j, k)` at `x`.
    pub fn entry_at(&self, j: usize, k: usize, x: f64) -> C64 {
        self.grid.at(x)[(j - 1, k - 1)]
    }

    /// Conjugate transpose; for off-diagonal Q this is `codiag(conj Q21, conj Q12)`.
    pub fn adjoint(&self) -> Self {
        Self::from_grid(self.grid.map(|_, q| q.adjoint()))
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::from_grid(self.grid.map(|_, q| q * s))
    }

    pub fn l1_norm(&self) -> f64 {
        self.grid.l1_norm()
    }
}

/// Boundary conditions `C y(0) + D y(1) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPair {
    pub c: Matrix2<C64>,
    pub d: Matrix2<C64>,
}

/// The six 2x2 minors `J_jk` of `(C D)` and the regularity flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minors {
    pub j12: C64,
    pub j13: C64,
    pub j14: C64,
    pub j32: C64,
    pub j34: C64,
    pub j42: C64,
    pub regular: bool,
}

impl BoundaryPair {
    pub fn new(c: Matrix2<C64>, d: Matrix2<C64>) -> Result<Self> {
        let bc = BoundaryPair { c, d };
        let m = bc.minors_raw();
        let scale = c.iter().chain(d.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        let largest = [m.j12, m.j13, m.j14, m.j32, m.j34, m.j42].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(largest > 1e-14 * scale * scale) {
            return Err(Error::InvalidBoundary);
        }
        Ok(bc)
    }

    /// From two rows `(a_j1, a_j2, a_j3, a_j4)`.
    pub fn from_rows(r1: [C64; 4], r2: [C64; 4]) -> Result<Self> {
        Self::new(Matrix2::new(r1[0], r1[1], r2[0], r2[1]), Matrix2::new(r1[2], r1[3], r2[2], r2[3]))
    }

    pub fn from_real_rows(r1: [f64; 4], r2: [f64; 4]) -> Result<Self> {
        let z = |r: [f64; 4]| r.map(|v| C64::new(v, 0.0));
        Self::from_rows(z(r1), z(r2))
    }

    pub fn periodic() -> Self {
        Self::from_real_rows([1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]).unwrap()
    }

    pub fn antiperiodic() -> Self {
        Self::from_real_rows([1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]).unwrap()
    }

    /// Rows `(1, b, a, 0)` and `(0, d, c, 1)`.
    pub fn from_reduced(r: &ReducedBC) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        BoundaryPair { c: Matrix2::new(one, r.b, zero, r.d), d: Matrix2::new(r.a, zero, r.c, one) }
    }

    /// Entry `a_jk` of the 2x4 block, 1-based.
    pub fn coeff(&self, row: usize, col: usize) -> C64 {
        if col <= 2 {
            self.c[(row - 1, col - 1)]
        } else {
            self.d[(row - 1, col - 3)]
        }
    }

    fn minor(&self, j: usize, k: usize) -> C64 {
        self.coeff(1, j) * self.coeff(2, k) - self.coeff(1, k) * self.coeff(2, j)
    }

    fn minors_raw(&self) -> Minors {
        let (j14, j32) = (self.minor(1, 4), self.minor(3, 2));
        Minors {
            j12: self.minor(1, 2),
            j13: self.minor(1, 3),
            j14,
            j32,
            j34: self.minor(3, 4),
            j42: self.minor(4, 2),
            regular: j14 * j32 != C64::new(0.0, 0.0),
        }
    }

    /// Scales column 3 (the `y1(1)` coefficients) by `w`.
    pub fn weighted(&self, w: C64) -> Self {
        let mut d = self.d;
        d[(0, 0)] *= w;
        d[(1, 0)] *= w;
        BoundaryPair { c: self.c, d }
    }
}

/// Minors of `(C D)` with the regularity flag `J14 J32 != 0`.
pub fn check_regularity(bc: &BoundaryPair) -> Minors {
    let m = bc.minors_raw();
    let p_plus = Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let p_minus = Matrix2::identity() - p_plus;
    let det_pm = (bc.c * p_plus + bc.d * p_minus).determinant();
    let det_mp = (bc.c * p_minus + bc.d * p_plus).determinant();
    debug_assert!((det_pm - m.j14).norm() <= 1e-12 * (1.0 + m.j14.norm()));
    debug_assert!((det_mp - m.j32).norm() <= 1e-12 * (1.0 + m.j32.norm()));
    m
}

/// `y1(0) + b y2(0) + a y1(1) = 0`, `d y2(0) + c y1(1) + y2(1) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedBC {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// `det A14^{-1}`: the full determinant equals the reduced one divided by this.
    pub scale: C64,
}

impl ReducedBC {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        ReducedBC { a, b, c, d, scale: C64::new(1.0, 0.0) }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0))
    }

    /// `J32 = ad - bc`.
    pub fn j32(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_regular(&self) -> bool {
        self.j32() != C64::new(0.0, 0.0)
    }

    pub fn conj(&self) -> Self {
        ReducedBC { a: self.a.conj(), b: self.b.conj(), c: self.c.conj(), d: self.d.conj(), scale: self.scale.conj() }
    }

    /// Same coefficients within `tol`, ignoring the recorded scale.
    pub fn approx_eq(&self, other: &ReducedBC, tol: f64) -> bool {
        (self.a - other.a).norm() < tol
            && (self.b - other.b).norm() < tol
            && (self.c - other.c).norm() < tol
            && (self.d - other.d).norm() < tol
    }
}

/// Multiplies `(C D)` by `A14^{-1}`, `A14` built from columns 1 and 4.
pub fn reduce_bc(bc: &BoundaryPair) -> Result<ReducedBC> {
    let a14 = Matrix2::new(bc.c[(0, 0)], bc.d[(0, 1)], bc.c[(1, 0)], bc.d[(1, 1)]);
    let det = a14.determinant();
    if det == C64::new(0.0, 0.0) {
        return Err(Error::NotReducible);
    }
    let inv = a14.try_inverse().ok_or(Error::NotReducible)?;
    let c = inv * bc.c;
    let d = inv * bc.d;
    Ok(ReducedBC { a: d[(0, 0)], b: c[(0, 1)], c: d[(1, 0)], d: c[(1, 1)], scale: C64::new(1.0, 0.0) / det })
}

/// Horizontal strip `|Im lambda| <= h` restricted to `re_min <= Re lambda <= re_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub h: f64,
    pub re_min: f64,
    pub re_max: f64,
}

impl Strip {
    pub fn new(h: f64, re_min: f64, re_max: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidStrip(format!("half-height must be positive, got {h}")));
        }
        if !(re_min < re_max && re_min.is_finite() && re_max.is_finite()) {
            return Err(Error::InvalidStrip(format!("empty window [{re_min}, {re_max}]")));
        }
        Ok(Strip { h, re_min, re_max })
    }

    pub fn symmetric(h: f64, half_width: f64) -> Result<Self> {
        Self::new(h, -half_width, half_width)
    }
}

/// The 2x2 boundary value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracProblem {
    pub weights: Weights,
    pub potential: PotentialGrid,
    pub bc: BoundaryPair,
}

impl DiracProblem {
    pub fn new(weights: Weights, potential: PotentialGrid, bc: BoundaryPair) -> Self {
        DiracProblem { weights, potential, bc }
    }

    pub fn minors(&self) -> Minors {
        check_regularity(&self.bc)
    }

    pub fn reduced(&self) -> Result<ReducedBC> {
        reduce_bc(&self.bc)
    }

    pub fn with_bc(&self, bc: BoundaryPair) -> Self {
        DiracProblem { bc, ..self.clone() }
    }

    pub fn with_potential(&self, potential: PotentialGrid) -> Self {
        DiracProblem { potential, ..self.clone() }
    }
}

/// Adjoint problem: potential `Q^*`, boundary rows
/// `k conj(b) y1(0) + y2(0) + conj(d) y2(1)` and `conj(a) y1(0) + y1(1) + conj(c)/k y2(1)`
/// with `k = -b2/b1`.
pub fn adjoint_problem(problem: &DiracProblem) -> Result<DiracProblem> {
    if !problem.potential.is_off_diagonal() {
        return Err(Error::InvalidPotential("adjoint requires an off-diagonal potential; apply gauge_reduce first".into()));
    }
    let r = problem.reduced()?;
    let k = -problem.weights.b2() / problem.weights.b1();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let bc = BoundaryPair::from_rows(
        [r.b.conj() * k, one, zero, r.d.conj()],
        [r.a.conj(), zero, one, r.c.conj() / k],
    )?;
    Ok(DiracProblem { weights: problem.weights, potential: problem.potential.adjoint(), bc })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeResult {
    pub problem: DiracProblem,
    pub w1: C64,
    pub w2: C64,
}

/// Removes the diagonal of Q by `y_j = w_j z_j`, `w_j(x) = exp(-i b_j int_0^x Q_jj)`.
pub fn gauge_reduce(problem: &DiracProblem) -> GaugeResult {
    let q = problem.potential.grid();
    let m = q.m();
    let h = q.h();
    let b = problem.weights.b();
    let mut int = [C64::new(0.0, 0.0); 2];
    let mut w = vec![[C64::new(1.0, 0.0); 2]; m + 1];
    for i in 1..=m {
        for j in 0..2 {
            int[j] += (q.node(i - 1)[(j, j)] + q.node(i)[(j, j)]) * (0.5 * h);
            w[i][j] = (-crate::I * b[j] * int[j]).exp();
        }
    }
    let zero = C64::new(0.0, 0.0);
    let nodes = q
        .nodes()
        .iter()
        .zip(&w)
        .map(|(qi, wi)| {
            let k = wi[1] / wi[0];
            Matrix2::new(zero, k * qi[(0, 1)], qi[(1, 0)] / k, zero)
        })
        .collect();
    let potential = PotentialGrid::from_grid(MatrixGrid::new(nodes).expect("same grid"));
    let (w1, w2) = (w[m][0], w[m][1]);
    let mut d = problem.bc.d;
    for r in 0..2 {
        d[(r, 0)] *= w1;
        d[(r, 1)] *= w2;
    }
    GaugeResult {
        problem: DiracProblem { weights: problem.weights, potential, bc: BoundaryPair { c: problem.bc.c, d } },
        w1,
        w2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn weights_validation_and_tags() {
        assert!(Weights::new(1.0, 2.0).is_err());
        assert!(Weights::new(-1.0, 0.0).is_err());
        assert_eq!(Weights::dirac().ratio(), Some(Ratio { n1: 1, n2: 1 }));
        assert_eq!(Weights::new(-1.0, 2f64.sqrt()).unwrap().ratio(), None);
        let w = Weights::with_ratio(-2.0, 3.0, 4, 6).unwrap();
        assert_eq!(w.ratio(), Some(Ratio { n1: 2, n2: 3 }));
        assert!((w.unit().unwrap() - 1.0).abs() < 1e-15);
        assert!(Weights::with_ratio(-2.0, 3.0, 1, 1).is_err());
        assert!((w.kappa(1, 2) + 2.0 / 3.0).abs() < 1e-15);
        assert!((w.a(1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ratio_probe_is_diagnostic() {
        assert_eq!(Weights::new(-3.0, 7.0).unwrap().probe_ratio(), Some((3, 7)));
        assert_eq!(Weights::new(-1.0, 2f64.sqrt()).unwrap().probe_ratio(), None);
    }

    #[test]
    fn minors_examples() {
        let m = check_regularity(&BoundaryPair::periodic());
        assert_eq!((m.j12, m.j34, m.j32, m.j14), (c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)));
        assert!(m.regular);
        let left = BoundaryPair::from_real_rows([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = check_regularity(&left);
        assert_eq!(m.j14, c(0.0, 0.0));
        assert!(!m.regular);
        let sep = BoundaryPair::from_real_rows([1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 2.0, 1.0]).unwrap();
        let m = check_regularity(&sep);
        assert_eq!((m.j14, m.j32), (c(1.0, 0.0), c(-2.0, 0.0)));
        assert!(m.regular);
    }

    #[test]
    fn rank_deficient_rejected() {
        let r = BoundaryPair::from_real_rows([1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0]);
        assert_eq!(r, Err(Error::InvalidBoundary));
    }

    #[test]
    fn reduce_examples() {
        let r = reduce_bc(&BoundaryPair::periodic()).unwrap();
        assert!(r.approx_eq(&ReducedBC::real(-1.0, 0.0, 0.0, -1.0), 1e-15));
        assert_eq!(r.scale, c(-1.0, 0.0));
        let r = reduce_bc(&BoundaryPair::antiperiodic()).unwrap();
        assert!(r.approx_eq(&ReducedBC::real(1.0, 0.0, 0.0, 1.0), 1e-15));
        let given = ReducedBC::new(c(0.3, 1.0), c(-2.0, 0.5), c(0.1, 0.0), c(4.0, -1.0));
        let back = reduce_bc(&BoundaryPair::from_reduced(&given)).unwrap();
        assert!(back.approx_eq(&given, 1e-14));
        let left = BoundaryPair::from_real_rows([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(reduce_bc(&left), Err(Error::NotReducible));
    }

    #[test]
    fn reduced_minors_follow_shape() {
        let r = ReducedBC::new(c(0.3, 1.0), c(-2.0, 0.5), c(0.1, 0.7), c(4.0, -1.0));
        let m = check_regularity(&BoundaryPair::from_reduced(&r));
        assert_eq!(m.j14, c(1.0, 0.0));
        assert!((m.j32 - r.j32()).norm() < 1e-15);
        assert_eq!((m.j12, m.j34, m.j13, m.j42), (r.d, r.a, r.c, -r.b));
    }

    #[test]
    fn adjoint_examples() {
        let w = Weights::dirac();
        let q = PotentialGrid::zero(8).unwrap();
        let sep = DiracProblem::new(w, q.clone(), BoundaryPair::from_reduced(&ReducedBC::real(0.0, 1.0, -2.0, 0.0)));
        let adj = adjoint_problem(&sep).unwrap();
        let want = BoundaryPair::from_real_rows([1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -2.0]).unwrap();
        assert_eq!(adj.bc, want);
        assert!(adj.potential.is_zero());
        let per = DiracProblem::new(w, q, BoundaryPair::from_reduced(&ReducedBC::real(-1.0, 0.0, 0.0, -1.0)));
        let adj = adjoint_problem(&per).unwrap();
        let want = BoundaryPair::from_real_rows([0.0, 1.0, 0.0, -1.0], [-1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(adj.bc, want);
    }

    #[test]
    fn adjoint_is_involution() {
        let w = Weights::new(-0.7, 1.9).unwrap();
        let q = PotentialGrid::off_diagonal(16, |x| c(1.0 + x, 0.5), |x| c(-x, x * x)).unwrap();
        let r = ReducedBC::new(c(0.3, 1.0), c(-2.0, 0.5), c(0.1, 0.7), c(4.0, -1.0));
        let p = DiracProblem::new(w, q, BoundaryPair::from_reduced(&r));
        let twice = adjoint_problem(&adjoint_problem(&p).unwrap()).unwrap();
        assert!(twice.reduced().unwrap().approx_eq(&r, 1e-12));
        assert_eq!(twice.potential, p.potential);
    }

    #[test]
    fn gauge_constant_diagonal() {
        let q = 0.8;
        let pot = PotentialGrid::from_fn(10, |_| [c(q, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let p = DiracProblem::new(Weights::dirac(), pot, BoundaryPair::periodic());
        let g = gauge_reduce(&p);
        assert!((g.w1 - c(0.0, q).exp()).norm() < 1e-14);
        assert!((g.w2 - c(1.0, 0.0)).norm() < 1e-15);
        assert!(g.problem.potential.is_off_diagonal());
        assert!((g.problem.bc.d[(0, 0)] - c(-1.0, 0.0) * g.w1).norm() < 1e-14);
    }

    #[test]
    fn gauge_identity_on_off_diagonal() {
        let pot = PotentialGrid::constant(6, c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let p = DiracProblem::new(Weights::dirac(), pot, BoundaryPair::periodic());
        let g = gauge_reduce(&p);
        assert_eq!((g.w1, g.w2), (c(1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(g.problem, p);
    }

    #[test]
    fn interpolation_and_flags() {
        let pot = PotentialGrid::off_diagonal(4, |x| c(x, 0.0), |_| c(0.0, 0.0)).unwrap();
        assert!(pot.is_off_diagonal());
        assert!((pot.entry_at(1, 2, 0.3) - c(0.3, 0.0)).norm() < 1e-15);
        assert!((pot.l1_norm() - 0.5).abs() < 1e-15);
        assert!(PotentialGrid::zero(1).is_err());
        let adj = pot.adjoint();
        assert!((adj.entry_at(2, 1, 0.5) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn strip_validation() {
        assert!(Strip::new(0.0, 0.0, 1.0).is_err());
        assert!(Strip::new(1.0, 2.0, 1.0).is_err());
        assert!(Strip::symmetric(1.0, 3.0).is_ok());
    }
}
