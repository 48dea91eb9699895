//! Damped Timoshenko beam as a 4x4 Dirac-type system.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::determinant::{delta_system, Characteristic};
use crate::problem::{check_regularity, BoundaryPair, DiracProblem, MatrixGrid, PotentialGrid, Strip, Weights};
use crate::spectra::{find_zeros_strip, EigenvalueRecord};
use crate::{Error, Result, C64};

const NU_SPREAD: f64 = 1e-8;

/// Sampled beam profiles on a uniform grid of `[0, length]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamCoefficients {
    pub length: f64,
    pub rho: Vec<f64>,
    pub i_rho: Vec<f64>,
    pub k: Vec<f64>,
    pub ei: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
}

impl BeamCoefficients {
    /// Profiles given as functions of `x`, sampled at `m + 1` nodes.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn(
        length: f64,
        m: usize,
        rho: impl Fn(f64) -> f64,
        i_rho: impl Fn(f64) -> f64,
        k: impl Fn(f64) -> f64,
        ei: impl Fn(f64) -> f64,
        p1: impl Fn(f64) -> f64,
        p2: impl Fn(f64) -> f64,
    ) -> Self {
        let xs: Vec<f64> = (0..=m).map(|i| length * i as f64 / m as f64).collect();
        let s = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| f(x)).collect::<Vec<_>>();
        let zero = C64::new(0.0, 0.0);
        BeamCoefficients {
            length,
            rho: s(&rho),
            i_rho: s(&i_rho),
            k: s(&k),
            ei: s(&ei),
            p1: s(&p1),
            p2: s(&p2),
            alpha: [zero; 2],
            beta: [zero; 2],
        }
    }

    /// All profiles equal to one, no damping.
    pub fn constant(m: usize) -> Self {
        Self::from_fn(1.0, m, |_| 1.0, |_| 1.0, |_| 1.0, |_| 1.0, |_| 0.0, |_| 0.0)
    }

    pub fn with_boundary(mut self, alpha: [C64; 2], beta: [C64; 2]) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn m(&self) -> usize {
        self.rho.len() - 1
    }

    fn validate(&self) -> Result<()> {
        let n = self.rho.len();
        if n < 3 {
            return Err(Error::InvalidProfile("need at least 3 samples".into()));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidProfile(format!("length {}", self.length)));
        }
        for (name, v) in [("rho", &self.rho), ("i_rho", &self.i_rho), ("k", &self.k), ("ei", &self.ei)] {
            if v.len() != n {
                return Err(Error::InvalidProfile(format!("{name} has {} samples, expected {n}", v.len())));
            }
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidProfile(format!("{name} sample {x} is not positive")));
            }
        }
        for (name, v) in [("p1", &self.p1), ("p2", &self.p2)] {
            if v.len() != n || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidProfile(format!("{name} must have {n} finite samples")));
            }
        }
        Ok(())
    }
}

/// `ν = EI ρ / (K I_ρ)` when it is constant on the grid.
pub fn validate_nu(coeffs: &BeamCoefficients) -> Result<f64> {
    coeffs.validate()?;
    let nu: Vec<f64> = (0..coeffs.rho.len()).map(|i| coeffs.ei[i] * coeffs.rho[i] / (coeffs.k[i] * coeffs.i_rho[i])).collect();
    let lo = nu.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = nu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > NU_SPREAD * hi {
        return Err(Error::ReductionHypothesis(format!("EI rho / (K I_rho) varies in [{lo}, {hi}]")));
    }
    Ok(nu[0])
}

/// Derivative of uniform samples; central inside, second-order one-sided at the ends.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
            _ if i == n - 1 => (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h),
            _ => (v[i + 1] - v[i - 1]) / (2.0 * h),
        })
        .collect()
}

/// Everything needed to pose the beam as `-i B^{-1} y' + Q y = λ y` on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct BeamReduction {
    pub nu: f64,
    pub b1: f64,
    pub b2: f64,
    /// `h_1(ℓ), h_2(ℓ)`.
    pub h_end: [f64; 2],
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
    /// Beam nodes `x_i` and their images `t(x_i)`.
    pub x_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    /// `Q̂` at the beam nodes.
    pub q_hat: Vec<Matrix4<C64>>,
    /// `Q(t) = Q̂(x(t))` on a uniform grid of `[0, 1]`.
    pub q: MatrixGrid<4>,
    pub c: Matrix4<C64>,
    pub d: Matrix4<C64>,
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let j = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let s = if x1 > x0 { ((x - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 0.0 };
    ys[j - 1] + s * (ys[j] - ys[j - 1])
}

pub fn build_reduction(coeffs: &BeamCoefficients) -> Result<BeamReduction> {
    let nu = validate_nu(coeffs)?;
    let m = coeffs.m();
    let hx = coeffs.length / m as f64;
    let x_nodes: Vec<f64> = (0..=m).map(|i| i as f64 * hx).collect();
    let root_ratio: Vec<f64> = (0..=m).map(|i| (coeffs.i_rho[i] / coeffs.ei[i]).sqrt()).collect();
    // trapezoid sums in units of hx, scaled once so constant profiles stay exact
    let mut t_nodes = vec![0.0; m + 1];
    for i in 1..=m {
        t_nodes[i] = t_nodes[i - 1] + 0.5 * (root_ratio[i - 1] + root_ratio[i]);
    }
    let b1 = coeffs.length * t_nodes[m] / m as f64;
    if !(b1 > 0.0 && b1.is_finite()) {
        return Err(Error::InvalidProfile(format!("integral of sqrt(I_rho / EI) is {b1}")));
    }
    let total = t_nodes[m];
    for t in t_nodes.iter_mut() {
        *t /= total;
    }
    t_nodes[m] = 1.0;
    let gamma: Vec<f64> = root_ratio.iter().map(|r| r / b1).collect();
    let b2 = (0..=m).map(|i| (coeffs.rho[i] / coeffs.k[i]).sqrt() / gamma[i]).sum::<f64>() / (m + 1) as f64;

    let h1: Vec<f64> = (0..=m).map(|i| (coeffs.ei[i] * coeffs.i_rho[i]).sqrt()).collect();
    let h2: Vec<f64> = (0..=m).map(|i| (coeffs.k[i] * coeffs.rho[i]).sqrt()).collect();
    let (dh1, dh2) = (derivative(&h1, hx), derivative(&h2, hx));
    let q_hat: Vec<Matrix4<C64>> = (0..=m)
        .map(|i| {
            let (p1, p2) = (coeffs.p1[i], coeffs.p2[i]);
            let (g, e) = (h2[i], dh2[i]);
            let a = Matrix4::new(
                p1 + dh1[i], p1 - dh1[i], g, -g,
                p1 + dh1[i], p1 - dh1[i], g, -g,
                -g, -g, p2 + e, p2 - e,
                g, g, p2 + e, p2 - e,
            );
            // Θ^{-1} = diag(i / 2I_ρ, i / 2I_ρ, i / 2ρ, i / 2ρ)
            let th = [coeffs.i_rho[i], coeffs.i_rho[i], coeffs.rho[i], coeffs.rho[i]];
            Matrix4::from_fn(|r, c| C64::new(0.0, 0.5 * a[(r, c)] / th[r]))
        })
        .collect();

    let q = MatrixGrid::from_fn(m, |t| {
        let mut out = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                let re: Vec<f64> = q_hat.iter().map(|q| q[(r, c)].re).collect();
                let im: Vec<f64> = q_hat.iter().map(|q| q[(r, c)].im).collect();
                out[(r, c)] = C64::new(interp(&t_nodes, &re, t), interp(&t_nodes, &im, t));
            }
        }
        out
    })?;

    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let mut c = Matrix4::zeros();
    c[(0, 0)] = one;
    c[(0, 1)] = one;
    c[(2, 2)] = one;
    c[(2, 3)] = one;
    let h_end = [h1[m], h2[m]];
    let [a1, a2] = coeffs.alpha;
    let [be1, be2] = coeffs.beta;
    let d = Matrix4::new(
        zero, zero, zero, zero,
        a1 - h_end[0], a1 + h_end[0], be1, be1,
        zero, zero, zero, zero,
        be2, be2, a2 - h_end[1], a2 + h_end[1],
    );
    Ok(BeamReduction { nu, b1, b2, h_end, alpha: coeffs.alpha, beta: coeffs.beta, x_nodes, t_nodes, q_hat, q, c, d })
}

impl BeamReduction {
    pub fn b(&self) -> [f64; 4] {
        [-self.b1, self.b1, -self.b2, self.b2]
    }

    pub fn b_matrix(&self) -> Matrix4<C64> {
        Matrix4::from_diagonal(&self.b().map(|v| C64::new(v, 0.0)).into())
    }

    /// `t(x)` by linear interpolation of the node table.
    pub fn t_of_x(&self, x: f64) -> f64 {
        interp(&self.x_nodes, &self.t_nodes, x)
    }

    /// Inverse map `x(t)`.
    pub fn x_of_t(&self, t: f64) -> f64 {
        interp(&self.t_nodes, &self.x_nodes, t)
    }

    /// `Q` with the coupling blocks multiplied by `s`.
    pub fn potential_with_coupling(&self, s: f64) -> MatrixGrid<4> {
        self.q.map(|_, q| Matrix4::from_fn(|r, c| if (r < 2) != (c < 2) { q[(r, c)] * s } else { q[(r, c)] }))
    }

    /// Sup norm of the coupling blocks of `Q̂`, as the largest entry modulus.
    pub fn coupling_norm(&self) -> f64 {
        self.q_hat
            .iter()
            .flat_map(|q| (0..4).flat_map(move |r| (0..4).filter(move |c| (r < 2) != (*c < 2)).map(move |c| q[(r, c)].norm())))
            .fold(0.0, f64::max)
    }

    /// The 4x4 determinant with coupling scaled by `s`.
    pub fn determinant(&self, s: f64) -> BeamDeterminant {
        BeamDeterminant { b: self.b(), q: self.potential_with_coupling(s), c: self.c, d: self.d }
    }
}

#[derive(Clone, Debug)]
pub struct BeamDeterminant {
    pub b: [f64; 4],
    pub q: MatrixGrid<4>,
    pub c: Matrix4<C64>,
    pub d: Matrix4<C64>,
}

impl Characteristic for BeamDeterminant {
    fn eval(&self, lambda: C64) -> Result<C64> {
        delta_system(&self.b, &self.q, &self.c, &self.d, lambda)
    }

    fn exponents(&self) -> Vec<f64> {
        self.b.to_vec()
    }
}

#[derive(Clone, Debug)]
pub struct DecoupledBeam {
    pub problems: [DiracProblem; 2],
    pub coupling_norm: f64,
}

fn block(m: &SMatrix<C64, 4, 4>, j: usize) -> [C64; 4] {
    let o = 2 * j;
    [m[(o, o)], m[(o, o + 1)], m[(o + 1, o)], m[(o + 1, o + 1)]]
}

/// Splits the beam into two 2x2 problems plus the bounded coupling; requires `β = 0`.
pub fn decouple(red: &BeamReduction) -> Result<DecoupledBeam> {
    if red.beta.iter().any(|b| b.norm() != 0.0) {
        return Err(Error::NotDecoupled);
    }
    let mut out = Vec::with_capacity(2);
    for j in 0..2 {
        let b = [red.b1, red.b2][j];
        let weights = Weights::with_ratio(-b, b, 1, 1)?;
        let nodes = red.q.nodes().iter().map(|q| {
            let e = block(q, j);
            Matrix2::new(e[0], e[1], e[2], e[3])
        });
        let potential = PotentialGrid::from_grid(MatrixGrid::new(nodes.collect())?);
        let (a, h) = (red.alpha[j], red.h_end[j]);
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let bc = BoundaryPair::from_rows([one, one, zero, zero], [zero, zero, a - h, a + h])
            .map_err(|_| Error::NonRegularSubproblem(j + 1))?;
        if !check_regularity(&bc).regular {
            return Err(Error::NonRegularSubproblem(j + 1));
        }
        out.push(DiracProblem::new(weights, potential, bc));
    }
    let p2 = out.pop().expect("two blocks");
    let p1 = out.pop().expect("two blocks");
    Ok(DecoupledBeam { problems: [p1, p2], coupling_norm: red.coupling_norm() })
}

/// Largest `|Im λ|` of the unperturbed separated zeros of the two blocks, `e^{2 i b λ} = (α - h)/(α + h)`.
pub fn separated_im_bound(red: &BeamReduction) -> f64 {
    (0..2)
        .map(|j| {
            let b = [red.b1, red.b2][j];
            let (a, h) = (red.alpha[j], red.h_end[j]);
            let r = ((a - h) / (a + h)).norm();
            if r > 0.0 && r.is_finite() {
                (r.ln() / (2.0 * b)).abs()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BeamSpectrum {
    pub strip_h: f64,
    pub records: Vec<EigenvalueRecord>,
}

/// Zeros of `det(C + D Φ(1, λ))` in the window, coupling scaled by `s`.
pub fn beam_spectrum(red: &BeamReduction, s: f64, re_min: f64, re_max: f64, h: Option<f64>) -> Result<BeamSpectrum> {
    let strip_h = h.unwrap_or_else(|| separated_im_bound(red) + 1.0 + red.coupling_norm());
    let det = red.determinant(s);
    let records = find_zeros_strip(&det, &Strip::new(strip_h, re_min, re_max)?)?;
    Ok(BeamSpectrum { strip_h, records })
}

/// Symmetric Hausdorff distance between the zero sets, counting only points with real part inside `[lo, hi]`.
pub fn spectral_drift(a: &[EigenvalueRecord], b: &[EigenvalueRecord], lo: f64, hi: f64) -> f64 {
    let one_way = |x: &[EigenvalueRecord], y: &[EigenvalueRecord]| {
        x.iter()
            .filter(|r| r.lambda.re >= lo && r.lambda.re <= hi)
            .map(|r| y.iter().map(|s| (s.lambda - r.lambda).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::determinant::DeterminantHandle;
    use crate::linalg::expm;
    use std::f64::consts::PI;

    fn i2() -> C64 {
        c(0.0, 0.5)
    }

    #[test]
    fn nu_examples() {
        assert_eq!(validate_nu(&BeamCoefficients::constant(16)).unwrap(), 1.0);
        let co = BeamCoefficients::from_fn(2.0, 32, |x| 1.0 + x * x, |x| 0.3 * (1.0 + x * x), |_| 2.0, |_| 5.0, |_| 0.0, |_| 0.0);
        assert!((validate_nu(&co).unwrap() - 5.0 / (2.0 * 0.3)).abs() < 1e-12);
        let mut bad = BeamCoefficients::constant(16);
        bad.rho[7] = 1.1;
        assert!(matches!(validate_nu(&bad), Err(Error::ReductionHypothesis(_))));
        bad.rho[7] = -1.0;
        assert!(matches!(validate_nu(&bad), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn constant_beam_matrices() {
        let two = c(2.0, 0.0);
        let red = build_reduction(&BeamCoefficients::constant(20).with_boundary([two, two], [c(0.0, 0.0); 2])).unwrap();
        assert_eq!((red.b1, red.b2), (1.0, 1.0));
        assert_eq!(red.b(), [-1.0, 1.0, -1.0, 1.0]);
        let z = c(0.0, 0.0);
        let (p, n) = (i2(), -i2());
        let want = Matrix4::new(z, z, p, n, z, z, p, n, n, n, z, z, p, p, z, z);
        for q in red.q_hat.iter().chain(red.q.nodes()) {
            assert_eq!(*q, want);
        }
        let o = c(1.0, 0.0);
        assert_eq!(red.c, Matrix4::new(o, o, z, z, z, z, z, z, z, z, o, o, z, z, z, z));
        let three = c(3.0, 0.0);
        assert_eq!(red.d, Matrix4::new(z, z, z, z, o, three, z, z, z, z, z, z, z, z, o, three));
        for (x, t) in red.x_nodes.iter().zip(&red.t_nodes) {
            assert!((x - t).abs() < 1e-15);
        }
        assert_eq!(red.coupling_norm(), 0.5);
    }

    #[test]
    fn change_of_variable_round_trip() {
        let co = BeamCoefficients::from_fn(1.7, 64, |x| (1.0 + 0.5 * x).powi(2), |x| 2.0 * (1.0 + 0.5 * x).powi(2), |_| 1.0, |_| 3.0, |_| 0.0, |_| 0.0);
        let red = build_reduction(&co).unwrap();
        assert_eq!(red.t_nodes[64], 1.0);
        assert!(red.t_nodes.windows(2).all(|w| w[1] > w[0]));
        for &x in &red.x_nodes {
            assert!((red.x_of_t(red.t_of_x(x)) - x).abs() < 1e-10);
        }
        // b_1 = ∫ sqrt(I_ρ / EI) dx for these profiles
        let exact = (2.0f64 / 3.0).sqrt() * (1.7 + 0.25 * 1.7 * 1.7);
        assert!((red.b1 - exact).abs() < 1e-12);
    }

    #[test]
    fn decouple_examples() {
        let two = c(2.0, 0.0);
        let co = BeamCoefficients::constant(16).with_boundary([two, two], [c(0.0, 0.0); 2]);
        let dec = decouple(&build_reduction(&co).unwrap()).unwrap();
        assert_eq!(dec.coupling_norm, 0.5);
        for p in &dec.problems {
            assert!(p.potential.is_zero());
            assert_eq!(p.weights.b(), [-1.0, 1.0]);
            let o = c(1.0, 0.0);
            assert_eq!(p.bc, BoundaryPair::from_rows([o, o, c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0), o, c(3.0, 0.0)]).unwrap());
        }
        let mut damped = co.clone();
        damped.p1 = vec![1.0; 17];
        let dec = decouple(&build_reduction(&damped).unwrap()).unwrap();
        for q in dec.problems[0].potential.grid().nodes() {
            assert_eq!(*q, Matrix2::new(i2(), i2(), i2(), i2()));
        }
        let coupled = co.clone().with_boundary([two, two], [c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(decouple(&build_reduction(&coupled).unwrap()), Err(Error::NotDecoupled)));
        let bad = co.with_boundary([two, c(1.0, 0.0)], [c(0.0, 0.0); 2]);
        assert!(matches!(decouple(&build_reduction(&bad).unwrap()), Err(Error::NonRegularSubproblem(2))));
    }

    #[test]
    fn zeroed_coupling_is_union() {
        let two = c(2.0, 0.0);
        let red = build_reduction(&BeamCoefficients::constant(16).with_boundary([two, two], [c(0.0, 0.0); 2])).unwrap();
        let spec = beam_spectrum(&red, 0.0, -10.0, 10.5, None).unwrap();
        // e^{2iλ} = 1/3 for both blocks
        let want: Vec<C64> = (-3..=3).map(|n| c(PI * n as f64, 0.5 * 3f64.ln())).collect();
        assert_eq!(spec.records.len(), want.len(), "{:?}", spec.records);
        for (r, w) in spec.records.iter().zip(&want) {
            assert_eq!(r.multiplicity, 2);
            assert!((r.lambda - w).norm() < 1e-8, "{} {}", r.lambda, w);
        }
    }

    #[test]
    fn decoupled_spacing() {
        let co = BeamCoefficients::from_fn(1.0, 32, |_| 3.0, |_| 2.0, |_| 3.0, |_| 1.0, |_| 0.0, |_| 0.0)
            .with_boundary([c(2.0, 0.0), c(0.5, 0.0)], [c(0.0, 0.0); 2]);
        let red = build_reduction(&co).unwrap();
        assert!((red.b1 - 2f64.sqrt()).abs() < 1e-14 && (red.b2 - 1.0).abs() < 1e-14);
        let dec = decouple(&red).unwrap();
        for (j, p) in dec.problems.iter().enumerate() {
            let b = [red.b1, red.b2][j];
            let f = DeterminantHandle::propagator(p);
            let recs = find_zeros_strip(&f, &Strip::new(f.default_strip_height(), -11.0 * PI / b, 11.0 * PI / b).unwrap()).unwrap();
            assert!(recs.len() >= 21);
            for w in recs.windows(2) {
                assert!((w[1].lambda.re - w[0].lambda.re - PI / b).abs() < 1e-6);
            }
        }
    }

    /// Direct shooting on `(φ, EI φ', w, K (w' - φ))` for constant profiles.
    fn shooting(co: &BeamCoefficients, lambda: C64) -> C64 {
        let (rho, ir, k, ei, p1, p2) = (co.rho[0], co.i_rho[0], co.k[0], co.ei[0], co.p1[0], co.p2[0]);
        let i = c(0.0, 1.0);
        let l2 = lambda * lambda;
        let z = c(0.0, 0.0);
        let a = SMatrix::<C64, 4, 4>::new(
            z, c(1.0 / ei, 0.0), z, z,
            -l2 * ir + i * lambda * p1, z, z, c(-1.0, 0.0),
            c(1.0, 0.0), z, z, c(1.0 / k, 0.0),
            z, z, -l2 * rho + i * lambda * p2, z,
        );
        let phi = expm(&(a * c(co.length, 0.0)));
        let [a1, a2] = co.alpha;
        let [b1, b2] = co.beta;
        let row1 = [i * lambda * a1, c(1.0, 0.0), i * lambda * b1, z];
        let row2 = [i * lambda * b2, z, i * lambda * a2, c(1.0, 0.0)];
        let col = |r: &[C64; 4], j: usize| (0..4).map(|s| r[s] * phi[(s, j)]).sum::<C64>();
        col(&row1, 1) * col(&row2, 3) - col(&row1, 3) * col(&row2, 1)
    }

    #[test]
    fn matches_direct_shooting() {
        let co = BeamCoefficients::from_fn(1.5, 400, |_| 3.0, |_| 2.0, |_| 3.0, |_| 1.0, |_| 0.4, |_| 0.7)
            .with_boundary([c(0.5, 0.0), c(1.5, 0.0)], [c(0.3, 0.0), c(-0.2, 0.0)]);
        let red = build_reduction(&co).unwrap();
        let spec = beam_spectrum(&red, 1.0, -12.0, 12.0, None).unwrap();
        assert!(spec.records.len() >= 8);
        for r in spec.records.iter().filter(|r| r.lambda.norm() > 1e-3) {
            let l = r.lambda;
            let g = shooting(&co, l);
            let probe = [c(1e-3, 0.0), c(-1e-3, 0.0), c(0.0, 1e-3), c(0.0, -1e-3)].iter().map(|d| shooting(&co, l + d).norm()).fold(0.0, f64::max);
            assert!(g.norm() < 1e-6 * probe, "λ = {l}: {} vs {probe}", g.norm());
        }
    }

    #[test]
    fn coupling_drift_shrinks() {
        let co = BeamCoefficients::constant(64).with_boundary([c(2.0, 0.0), c(3.0, 0.0)], [c(0.0, 0.0); 2]);
        let red = build_reduction(&co).unwrap();
        let (lo, hi) = (-15.0, 15.5);
        let base = beam_spectrum(&red, 0.0, lo, hi, None).unwrap();
        let h = base.strip_h;
        let full = beam_spectrum(&red, 1.0, lo, hi, Some(h)).unwrap();
        let half = beam_spectrum(&red, 0.5, lo, hi, Some(h)).unwrap();
        let d1 = spectral_drift(&full.records, &base.records, lo + 2.0, hi - 2.0);
        let d2 = spectral_drift(&half.records, &base.records, lo + 2.0, hi - 2.0);
        assert!(d1.is_finite() && d2 < d1, "{d2} vs {d1}");
        let det = red.determinant(1.0);
        for r in &full.records {
            assert!(det.eval(r.lambda).unwrap().norm() < 1e-10 * det.scale(r.lambda));
        }
    }
}
