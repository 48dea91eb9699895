//! Characteristic determinants and closed-form zero families.

use nalgebra::SMatrix;

use crate::kernels::{delta_via_traces, Kernels};
use crate::linalg::{cluster, det_small, refined_roots};
use crate::problem::{check_regularity, DiracProblem, MatrixGrid, Minors, ReducedBC, Weights};
use crate::propagator::{check_guard, propagate_end};
use crate::{Error, Result, C64, I};

/// An entire function of exponential type built from `e^{i b_j λ}`.
pub trait Characteristic: Sync {
    fn eval(&self, lambda: C64) -> Result<C64>;

    /// The diagonal weights `b_j` driving the growth.
    fn exponents(&self) -> Vec<f64>;

    /// `prod_j max(1, e^{-b_j Im λ})`, the size of the dominant term.
    fn scale(&self, lambda: C64) -> f64 {
        self.exponents().iter().map(|b| (-b * lambda.im).exp().max(1.0)).product()
    }

    /// Width of the exponent range, `sum_j |b_j|`.
    fn span(&self) -> f64 {
        self.exponents().iter().map(|b| b.abs()).sum()
    }
}

/// `J12 + J34 e^{i(b1+b2)λ} + J32 e^{i b1 λ} + J14 e^{i b2 λ}`.
pub fn delta0_minors(m: &Minors, b: [f64; 2], lambda: C64) -> C64 {
    m.j12 + m.j34 * (I * (b[0] + b[1]) * lambda).exp() + m.j32 * (I * b[0] * lambda).exp() + m.j14 * (I * b[1] * lambda).exp()
}

/// `d + a e^{i(b1+b2)λ} + (ad - bc) e^{i b1 λ} + e^{i b2 λ}`.
pub fn delta0_eval(r: &ReducedBC, w: &Weights, lambda: C64) -> Result<C64> {
    check_guard(&w.b(), lambda)?;
    let (b1, b2) = (w.b1(), w.b2());
    Ok(r.d + r.a * (I * (b1 + b2) * lambda).exp() + r.j32() * (I * b1 * lambda).exp() + (I * b2 * lambda).exp())
}

/// `det(C + D Phi(1, λ))` for an `N x N` system.
pub fn delta_system<const N: usize>(
    b: &[f64; N],
    q: &MatrixGrid<N>,
    c: &SMatrix<C64, N, N>,
    d: &SMatrix<C64, N, N>,
    lambda: C64,
) -> Result<C64> {
    let phi = propagate_end(b, q, lambda)?;
    Ok(det_small(c + d * phi))
}

pub fn delta_via_propagator(problem: &DiracProblem, lambda: C64) -> Result<C64> {
    delta_system(&problem.weights.b(), problem.potential.grid(), &problem.bc.c, &problem.bc.d, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    ClosedForm,
    Propagator,
    KernelTrace,
}

/// A determinant bound to a problem and an evaluation mode.
#[derive(Clone, Debug)]
pub struct DeterminantHandle {
    mode: Mode,
    problem: DiracProblem,
    minors: Minors,
    reduced: Option<ReducedBC>,
    traces: Option<(Vec<C64>, Vec<C64>)>,
}

impl DeterminantHandle {
    /// `Delta0` from the minors of the problem's boundary conditions; the potential is ignored.
    pub fn closed_form(problem: &DiracProblem) -> Self {
        Self::build(Mode::ClosedForm, problem, None)
    }

    pub fn propagator(problem: &DiracProblem) -> Self {
        Self::build(Mode::Propagator, problem, None)
    }

    /// Kernel representation on an `n`-edge triangle grid.
    pub fn kernel_trace(problem: &DiracProblem, n: usize) -> Result<Self> {
        let ker = Kernels::compute(&problem.potential, &problem.weights, n)?;
        let (rp, rm) = ker.r_pm();
        let minors = check_regularity(&problem.bc);
        let traces = crate::kernels::trace_g_minors(&rp, &rm, &minors);
        Ok(Self::build(Mode::KernelTrace, problem, Some(traces)))
    }

    fn build(mode: Mode, problem: &DiracProblem, traces: Option<(Vec<C64>, Vec<C64>)>) -> Self {
        DeterminantHandle {
            mode,
            problem: problem.clone(),
            minors: check_regularity(&problem.bc),
            reduced: problem.reduced().ok(),
            traces,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn problem(&self) -> &DiracProblem {
        &self.problem
    }

    pub fn minors(&self) -> &Minors {
        &self.minors
    }

    pub fn reduced(&self) -> Option<&ReducedBC> {
        self.reduced.as_ref()
    }

    /// Strip height: `max |Im λ0| + 1` from the closed-form family when one
    /// exists, otherwise the dominance bound for `Delta0` plus one.
    pub fn default_strip_height(&self) -> f64 {
        let w = &self.problem.weights;
        if let Some(r) = &self.reduced {
            if let Some(fam) = delta0_zero_family(r, w) {
                return fam.max_abs_im() + 1.0;
            }
        }
        delta0_im_bound(&self.minors, w.b()) + 1.0
    }
}

impl Characteristic for DeterminantHandle {
    fn eval(&self, lambda: C64) -> Result<C64> {
        let b = self.problem.weights.b();
        match self.mode {
            Mode::ClosedForm => {
                check_guard(&b, lambda)?;
                Ok(delta0_minors(&self.minors, b, lambda))
            }
            Mode::Propagator => delta_via_propagator(&self.problem, lambda),
            Mode::KernelTrace => {
                check_guard(&b, lambda)?;
                let (g1, g2) = self.traces.as_ref().expect("kernel mode carries traces");
                Ok(delta_via_traces(&self.minors, b, g1, g2, lambda))
            }
        }
    }

    fn exponents(&self) -> Vec<f64> {
        self.problem.weights.b().to_vec()
    }
}

/// Reduced `Delta0` as a standalone characteristic function.
#[derive(Clone, Copy, Debug)]
pub struct Delta0 {
    pub bc: ReducedBC,
    pub weights: Weights,
}

impl Characteristic for Delta0 {
    fn eval(&self, lambda: C64) -> Result<C64> {
        delta0_eval(&self.bc, &self.weights, lambda)
    }

    fn exponents(&self) -> Vec<f64> {
        self.weights.b().to_vec()
    }
}

/// Zeros of `Delta0` lie in `|Im λ| <= delta0_im_bound`: above it one exponential dominates the rest.
pub fn delta0_im_bound(m: &Minors, b: [f64; 2]) -> f64 {
    let (b1, b2) = (b[0], b[1]);
    let upper = |y: f64| {
        let d = m.j32.norm();
        if d == 0.0 {
            return f64::INFINITY;
        }
        (m.j12.norm() * (b1 * y).exp() + m.j34.norm() * (-b2 * y).exp() + m.j14.norm() * ((b1 - b2) * y).exp()) / d
    };
    let lower = |s: f64| {
        let d = m.j14.norm();
        if d == 0.0 {
            return f64::INFINITY;
        }
        (m.j12.norm() * (-b2 * s).exp() + m.j34.norm() * (b1 * s).exp() + m.j32.norm() * ((b1 - b2) * s).exp()) / d
    };
    let solve = |f: &dyn Fn(f64) -> f64| {
        if f(0.0) < 1.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while f(hi) >= 1.0 && hi < 1e6 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    solve(&upper).max(solve(&lower))
}

/// `λ_n = offset + period n`, each zero of the given multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Progression {
    pub offset: C64,
    pub period: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroFamilyKind {
    /// `bc = 0`: `(1 + a e^{i b1 λ})(d + e^{i b2 λ})`.
    Factorized,
    /// `a = d = 0`: `e^{i (b2 - b1) λ} = bc`.
    Separated,
    /// Exact rational ratio: roots of `P(z)` in `z = e^{i β λ}`.
    Polynomial { coeffs: Vec<C64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroFamily {
    pub kind: ZeroFamilyKind,
    pub progressions: Vec<Progression>,
}

impl ZeroFamily {
    pub fn max_abs_im(&self) -> f64 {
        self.progressions.iter().map(|p| p.offset.im.abs()).fold(0.0, f64::max)
    }

    /// Zeros with `re_min <= Re λ <= re_max`, coincident points merged (tolerance 1e-8).
    pub fn zeros_in(&self, re_min: f64, re_max: f64) -> Vec<(C64, usize)> {
        let mut pts = Vec::new();
        for p in &self.progressions {
            let lo = ((re_min - p.offset.re) / p.period).ceil() as i64;
            let hi = ((re_max - p.offset.re) / p.period).floor() as i64;
            for n in lo..=hi {
                let z = p.offset + p.period * n as f64;
                for _ in 0..p.multiplicity {
                    pts.push(z);
                }
            }
        }
        let mut out = cluster(&pts, 1e-8);
        out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        out
    }
}

fn progression(z: C64, beta: f64, multiplicity: usize) -> Progression {
    // e^{i β λ} = z  =>  λ = (arg z - i ln|z|) / β  (mod 2π/|β|)
    let offset = C64::new(z.arg(), -z.norm().ln()) / beta;
    let period = 2.0 * std::f64::consts::PI / beta.abs();
    let re = offset.re.rem_euclid(period);
    Progression { offset: C64::new(re, offset.im), period, multiplicity }
}

/// Closed-form zeros of `Delta0` for the factorized, separated and
/// rational-ratio cases; `None` otherwise.
pub fn delta0_zero_family(r: &ReducedBC, w: &Weights) -> Option<ZeroFamily> {
    if !r.is_regular() {
        return None;
    }
    let zero = C64::new(0.0, 0.0);
    let (b1, b2) = (w.b1(), w.b2());
    if r.a == zero && r.d == zero {
        let bc = r.b * r.c;
        return Some(ZeroFamily { kind: ZeroFamilyKind::Separated, progressions: vec![progression(bc, b2 - b1, 1)] });
    }
    if r.b * r.c == zero {
        let p1 = progression(-1.0 / r.a, b1, 1);
        let p2 = progression(-r.d, b2, 1);
        return Some(ZeroFamily { kind: ZeroFamilyKind::Factorized, progressions: vec![p1, p2] });
    }
    let ratio = w.ratio()?;
    let beta = w.unit()?;
    let (n1, n2) = (ratio.n1 as usize, ratio.n2 as usize);
    let mut coeffs = vec![zero; n1 + n2 + 1];
    coeffs[n1 + n2] += 1.0;
    coeffs[n2] += r.a;
    coeffs[n1] += r.d;
    coeffs[0] += r.j32();
    let roots = refined_roots(&coeffs);
    let progressions = cluster(&roots, 1e-8).into_iter().map(|(z, m)| progression(z, beta, m)).collect();
    Some(ZeroFamily { kind: ZeroFamilyKind::Polynomial { coeffs }, progressions })
}

/// Closed-form family or an error when the case is not covered.
pub fn require_zero_family(r: &ReducedBC, w: &Weights) -> Result<ZeroFamily> {
    delta0_zero_family(r, w).ok_or(Error::RationalTagRequired)
}
