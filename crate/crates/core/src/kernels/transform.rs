use nalgebra::{Matrix2, SVector};

use super::{solve_r, KernelField, Role, TriangleGrid};
use crate::linalg::filon;
use crate::problem::{Minors, PotentialGrid, ReducedBC, Weights};
use crate::{Result, C64, I};

/// Diagonal convolution profile `P±(s) = diag(P1(s), P2(s))` at `s_i = i/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionProfile {
    pub sign: f64,
    pub p1: Vec<C64>,
    pub p2: Vec<C64>,
}

fn trap(l: usize, i: usize) -> f64 {
    if l == 0 || l == i {
        0.5
    } else {
        1.0
    }
}

/// Forward substitution for the edge-condition system
/// `a1 P1 + int_0^x [a1 R11 P1 ± a2 R12 P2] = ∓ a2 R12(x, 0)`,
/// `± a2 P2 + int_0^x [a1 R21 P1 ± a2 R22 P2] = - a1 R21(x, 0)`.
pub fn solve_p(r: &KernelField, weights: &Weights, sign: f64) -> ConvolutionProfile {
    let n = r.n();
    let h = r.grid().h();
    let (a1, a2) = (weights.a(1), weights.a(2));
    let mut p1 = vec![C64::new(0.0, 0.0); n + 1];
    let mut p2 = vec![C64::new(0.0, 0.0); n + 1];
    for i in 0..=n {
        let mut rhs1 = -sign * a2 * r.get(1, 2, i, 0);
        let mut rhs2 = -a1 * r.get(2, 1, i, 0);
        for l in 0..i {
            let w = trap(l, i) * h;
            rhs1 -= (r.get(1, 1, i, l) * a1 * p1[l] + r.get(1, 2, i, l) * (sign * a2) * p2[l]) * w;
            rhs2 -= (r.get(2, 1, i, l) * a1 * p1[l] + r.get(2, 2, i, l) * (sign * a2) * p2[l]) * w;
        }
        let w = if i == 0 { 0.0 } else { 0.5 * h };
        let m = Matrix2::new(
            C64::new(a1, 0.0) + r.get(1, 1, i, i) * (a1 * w),
            r.get(1, 2, i, i) * (sign * a2 * w),
            r.get(2, 1, i, i) * (a1 * w),
            C64::new(sign * a2, 0.0) + r.get(2, 2, i, i) * (sign * a2 * w),
        );
        let sol = m.lu().solve(&SVector::<C64, 2>::new(rhs1, rhs2)).expect("diagonal block is invertible for h small");
        p1[i] = sol[0];
        p2[i] = sol[1];
    }
    ConvolutionProfile { sign, p1, p2 }
}

/// Max modulus of the discretized edge-condition system residual.
pub fn p_residual(r: &KernelField, weights: &Weights, p: &ConvolutionProfile) -> f64 {
    let n = r.n();
    let h = r.grid().h();
    let (a1, a2, sign) = (weights.a(1), weights.a(2), p.sign);
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let mut e1 = p.p1[i] * a1 + r.get(1, 2, i, 0) * (sign * a2);
        let mut e2 = p.p2[i] * (sign * a2) + r.get(2, 1, i, 0) * a1;
        if i > 0 {
            for l in 0..=i {
                let w = trap(l, i) * h;
                e1 += (r.get(1, 1, i, l) * a1 * p.p1[l] + r.get(1, 2, i, l) * (sign * a2) * p.p2[l]) * w;
                e2 += (r.get(2, 1, i, l) * a1 * p.p1[l] + r.get(2, 2, i, l) * (sign * a2) * p.p2[l]) * w;
            }
        }
        worst = worst.max(e1.norm()).max(e2.norm());
    }
    worst
}

/// `K(x, t) = R(x, t) + P(x - t) + int_t^x R(x, s) P(s - t) ds`.
pub fn assemble_k(r: &KernelField, p: &ConvolutionProfile) -> KernelField {
    let n = r.n();
    let h = r.grid().h();
    let role = if p.sign > 0.0 { Role::KPlus } else { Role::KMinus };
    let mut k = r.clone().with_role(role);
    let pk = [&p.p1, &p.p2];
    for i in 0..=n {
        for l in 0..=i {
            for row in 1..=2 {
                for col in 1..=2 {
                    let mut v = r.get(row, col, i, l);
                    if row == col {
                        v += pk[col - 1][i - l];
                    }
                    if i > l {
                        let span = i - l;
                        let mut acc = C64::new(0.0, 0.0);
                        for m in l..=i {
                            acc += r.get(row, col, i, m) * pk[col - 1][m - l] * trap(m - l, span);
                        }
                        v += acc * h;
                    }
                    k.set(row, col, i, l, v);
                }
            }
        }
    }
    k
}

/// Relative residual of `K(x,x) B^{-1} - B^{-1} K(x,x) = i Q(x)` on the diagonal nodes.
pub fn jump_residual(k: &KernelField, q: &PotentialGrid, weights: &Weights) -> f64 {
    let n = k.n();
    let a = [weights.a(1), weights.a(2)];
    let mut worst: f64 = 0.0;
    let mut qmax: f64 = 0.0;
    for i in 0..=n {
        let x = i as f64 / n as f64;
        for row in 1..=2 {
            for col in 1..=2 {
                let qv = if row == col { C64::new(0.0, 0.0) } else { q.entry_at(row, col, x) };
                qmax = qmax.max(qv.norm());
                let lhs = k.get(row, col, i, i) * (a[col - 1] - a[row - 1]);
                worst = worst.max((lhs - I * qv).norm());
            }
        }
    }
    worst / qmax.max(1e-300)
}

/// Relative residual of `K(x, 0) B^{-1} (1, ±1)^T = 0`.
pub fn edge_residual(k: &KernelField, weights: &Weights, sign: f64) -> f64 {
    let n = k.n();
    let (a1, a2) = (weights.a(1), weights.a(2));
    let mut worst: f64 = 0.0;
    let mut size: f64 = 0.0;
    for i in 0..=n {
        for row in 1..=2 {
            let t1 = k.get(row, 1, i, 0) * a1;
            let t2 = k.get(row, 2, i, 0) * (sign * a2);
            size = size.max(t1.norm()).max(t2.norm());
            worst = worst.max((t1 + t2).norm());
        }
    }
    if size == 0.0 {
        0.0
    } else {
        worst / size
    }
}

/// `e(x_i) = e0(x_i) + int_0^{x_i} K(x_i, t) e0(t) dt`, `e0 = (e^{i b1 λ t}, ± e^{i b2 λ t})`.
pub fn apply_transform(k: &KernelField, lambda: C64, sign: f64) -> Vec<SVector<C64, 2>> {
    let n = k.n();
    let h = k.grid().h();
    let b = k.weights();
    let om = [lambda * b[0], lambda * b[1]];
    let amp = [1.0, sign];
    (0..=n)
        .map(|i| {
            let x = i as f64 * h;
            let mut e = SVector::<C64, 2>::new((I * om[0] * x).exp(), (I * om[1] * x).exp() * sign);
            for row in 1..=2 {
                for col in 1..=2 {
                    e[row - 1] += filon(k.row(row, col, i), h, om[col - 1]) * amp[col - 1];
                }
            }
            e
        })
        .collect()
}

/// `R± = (K+ ± K-) / 2`.
pub fn sym_r_pm(kp: &KernelField, km: &KernelField) -> (KernelField, KernelField) {
    (kp.combine(km, Role::RPlus, |a, b| (a + b) * 0.5), kp.combine(km, Role::RMinus, |a, b| (a - b) * 0.5))
}

/// `Phi(1, λ)` from the kernel traces `R±(1, ·)`.
pub fn phi_via_kernels(rp: &KernelField, rm: &KernelField, lambda: C64) -> Matrix2<C64> {
    let n = rp.n();
    let h = rp.grid().h();
    let b = rp.weights();
    let f = |field: &KernelField, j, k, bj: f64| filon(field.row(j, k, n), h, lambda * bj);
    let e1 = (I * b[0] * lambda).exp();
    let e2 = (I * b[1] * lambda).exp();
    Matrix2::new(
        e1 + f(rp, 1, 1, b[0]) + f(rm, 1, 2, b[1]),
        f(rm, 1, 1, b[0]) + f(rp, 1, 2, b[1]),
        f(rp, 2, 1, b[0]) + f(rm, 2, 2, b[1]),
        e2 + f(rm, 2, 1, b[0]) + f(rp, 2, 2, b[1]),
    )
}

/// Trace functions `g1, g2` for general minors:
/// `g1 = J32 R+11 + J13 R-11 + J42 R+21 + J14 R-21`,
/// `g2 = J32 R-12 + J13 R+12 + J42 R-22 + J14 R+22`, all at `x = 1`.
pub fn trace_g_minors(rp: &KernelField, rm: &KernelField, m: &Minors) -> (Vec<C64>, Vec<C64>) {
    let n = rp.n();
    let g1 = (0..=n)
        .map(|l| m.j32 * rp.get(1, 1, n, l) + m.j13 * rm.get(1, 1, n, l) + m.j42 * rp.get(2, 1, n, l) + m.j14 * rm.get(2, 1, n, l))
        .collect();
    let g2 = (0..=n)
        .map(|l| m.j32 * rm.get(1, 2, n, l) + m.j13 * rp.get(1, 2, n, l) + m.j42 * rm.get(2, 2, n, l) + m.j14 * rp.get(2, 2, n, l))
        .collect();
    (g1, g2)
}

/// Trace functions for reduced boundary conditions (`J14 = 1`, `J13 = c`, `J42 = -b`).
pub fn trace_g(rp: &KernelField, rm: &KernelField, r: &ReducedBC) -> (Vec<C64>, Vec<C64>) {
    let m = Minors { j12: r.d, j13: r.c, j14: C64::new(1.0, 0.0), j32: r.j32(), j34: r.a, j42: -r.b, regular: r.is_regular() };
    trace_g_minors(rp, rm, &m)
}

/// `Delta0(λ) + int g1 e^{i b1 λ t} + int g2 e^{i b2 λ t}`.
pub fn delta_via_traces(m: &Minors, b: [f64; 2], g1: &[C64], g2: &[C64], lambda: C64) -> C64 {
    let h = 1.0 / (g1.len() - 1) as f64;
    let d0 = m.j12 + m.j34 * (I * (b[0] + b[1]) * lambda).exp() + m.j32 * (I * b[0] * lambda).exp() + m.j14 * (I * b[1] * lambda).exp();
    d0 + filon(g1, h, lambda * b[0]) + filon(g2, h, lambda * b[1])
}

/// `R`, `P±` and `K±` on one triangle grid.
#[derive(Clone, Debug)]
pub struct Kernels {
    pub weights: Weights,
    pub r: KernelField,
    pub p_plus: ConvolutionProfile,
    pub p_minus: ConvolutionProfile,
    pub k_plus: KernelField,
    pub k_minus: KernelField,
    pub sweeps: usize,
    pub last_update: f64,
}

impl Kernels {
    pub fn compute(q: &PotentialGrid, weights: &Weights, n: usize) -> Result<Self> {
        let grid = TriangleGrid::new(n)?;
        let sol = solve_r(q, weights, grid)?;
        let p_plus = solve_p(&sol.field, weights, 1.0);
        let p_minus = solve_p(&sol.field, weights, -1.0);
        let k_plus = assemble_k(&sol.field, &p_plus);
        let k_minus = assemble_k(&sol.field, &p_minus);
        Ok(Kernels {
            weights: *weights,
            r: sol.field,
            p_plus,
            p_minus,
            k_plus,
            k_minus,
            sweeps: sol.sweeps,
            last_update: sol.last_update,
        })
    }

    pub fn k(&self, sign: f64) -> &KernelField {
        if sign > 0.0 {
            &self.k_plus
        } else {
            &self.k_minus
        }
    }

    pub fn r_pm(&self) -> (KernelField, KernelField) {
        sym_r_pm(&self.k_plus, &self.k_minus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{BoundaryPair, DiracProblem};
    use crate::propagator::{propagate_to_end, solve_cauchy_pm};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_case_profiles_and_kernels() {
        let q = 0.9;
        let pot = PotentialGrid::constant(32, c(q, 0.0), c(0.0, 0.0)).unwrap();
        let ker = Kernels::compute(&pot, &Weights::dirac(), 16).unwrap();
        for (p, s) in [(&ker.p_plus, 1.0), (&ker.p_minus, -1.0)] {
            for v in &p.p1 {
                assert!((v - c(0.0, s * q / 2.0)).norm() < 1e-14);
            }
            assert!(p.p2.iter().all(|v| v.norm() < 1e-15));
        }
        for (k, s) in [(&ker.k_plus, 1.0), (&ker.k_minus, -1.0)] {
            for i in 0..=16 {
                for l in 0..=i {
                    assert!((k.get(1, 1, i, l) - c(0.0, s * q / 2.0)).norm() < 1e-14);
                    assert!((k.get(1, 2, i, l) - c(0.0, q / 2.0)).norm() < 1e-14);
                    assert!(k.get(2, 1, i, l).norm() < 1e-15 && k.get(2, 2, i, l).norm() < 1e-15);
                }
            }
        }
        let nrm = super::super::kernel_norms(&ker.k_plus);
        assert!((nrm.xinf_max - q / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_potential_everything_vanishes() {
        let pot = PotentialGrid::zero(8).unwrap();
        let ker = Kernels::compute(&pot, &Weights::dirac(), 8).unwrap();
        assert_eq!(ker.k_plus.max_abs(), 0.0);
        assert!(ker.p_minus.p1.iter().all(|v| v.norm() == 0.0));
        let e = apply_transform(&ker.k_plus, c(2.0, 0.5), 1.0);
        let x = 0.5;
        assert!((e[4][0] - (c(0.0, -1.0) * c(2.0, 0.5) * x).exp()).norm() < 1e-15);
    }

    #[test]
    fn generic_residuals_small() {
        let w = Weights::new(-1.0, 2.0).unwrap();
        let pot = PotentialGrid::off_diagonal(256, |x| c(1.0, x), |x| c(x, -0.5)).unwrap();
        let ker = Kernels::compute(&pot, &w, 32).unwrap();
        for (p, k, s) in [(&ker.p_plus, &ker.k_plus, 1.0), (&ker.p_minus, &ker.k_minus, -1.0)] {
            assert!(p_residual(&ker.r, &w, p) < 1e-12);
            assert!(edge_residual(k, &w, s) < 1e-12);
            assert!(jump_residual(k, &pot, &w) < 1e-12);
        }
    }

    #[test]
    fn transform_and_phi_match_propagator() {
        let w = Weights::new(-1.0, 1.5).unwrap();
        let pot = PotentialGrid::off_diagonal(2048, |_| c(1.0, 0.0), |x| c(x, 0.3)).unwrap();
        let problem = DiracProblem::new(w, pot.clone(), BoundaryPair::periodic());
        let errs: Vec<f64> = [32usize, 64]
            .iter()
            .map(|&n| {
                let ker = Kernels::compute(&pot, &w, n).unwrap();
                let lam = c(3.0, 0.5);
                let mut worst: f64 = 0.0;
                for s in [1.0, -1.0] {
                    let e = apply_transform(ker.k(s), lam, s);
                    let exact = solve_cauchy_pm(&problem, lam, s).unwrap();
                    let stride = 2048 / n;
                    for i in 0..=n {
                        worst = worst.max((e[i] - exact[i * stride]).norm());
                    }
                }
                let (rp, rm) = ker.r_pm();
                let phi = phi_via_kernels(&rp, &rm, lam);
                let want = propagate_to_end(&problem, lam).unwrap();
                worst.max((phi - want).norm())
            })
            .collect();
        assert!(errs[0] < 0.05, "{errs:?}");
        assert!(errs[1] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn kernel_determinant_matches_propagator() {
        let w = Weights::dirac();
        let pot = PotentialGrid::off_diagonal(2048, |x| c(1.0 + x, 0.0), |x| c(0.5, x)).unwrap();
        let r = ReducedBC::new(c(0.5, 0.2), c(1.5, 0.0), c(-0.7, 0.1), c(2.0, 0.0));
        let bc = BoundaryPair::from_reduced(&r);
        let problem = DiracProblem::new(w, pot.clone(), bc.clone());
        let ker = Kernels::compute(&pot, &w, 64).unwrap();
        let (rp, rm) = ker.r_pm();
        let (g1, g2) = trace_g(&rp, &rm, &r);
        let m = crate::problem::check_regularity(&bc);
        for lam in [c(0.0, 0.0), c(4.0, 0.3), c(-7.0, -0.8)] {
            let phi = propagate_to_end(&problem, lam).unwrap();
            let want = (bc.c + bc.d * phi).determinant();
            let got = delta_via_traces(&m, w.b(), &g1, &g2, lam);
            assert!((got - want).norm() < 0.05 * (1.0 + want.norm()), "{lam}: {got} vs {want}");
        }
    }
}
