//! Regular and strictly regular boundary conditions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::determinant::Characteristic;
use crate::linalg::{cluster, refined_roots};
use crate::problem::{check_regularity, BoundaryPair, ReducedBC, Strip, Weights};
use crate::spectra::find_zeros_strip;
use crate::{Error, Result, C64};

/// Root-distance threshold for multiple roots of the z-polynomial.
pub const ROOT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    Yes,
    No,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    NotRegular,
    Separated,
    DiracDiscriminant,
    RationalPoly,
    #[serde(rename = "bc0-i")]
    Bc0I,
    #[serde(rename = "bc0-ii")]
    Bc0Ii,
    #[serde(rename = "bc0-iii")]
    Bc0Iii,
    #[serde(rename = "a0-irrational")]
    A0Irrational,
    #[serde(rename = "a0-rational")]
    A0Rational,
    Numerical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    pub strict: Strictness,
    pub branch: Branch,
    pub witnesses: BTreeMap<String, f64>,
    pub hint: Option<String>,
}

impl RegularityVerdict {
    fn new(regular: bool, strict: Strictness, branch: Branch, witnesses: &[(&str, f64)]) -> Self {
        RegularityVerdict {
            regular,
            strict,
            branch,
            witnesses: witnesses.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            hint: None,
        }
    }

    fn with_hint(mut self, hint: &str) -> Self {
        self.hint = Some(hint.to_string());
        self
    }
}

fn yes_no(b: bool) -> Strictness {
    if b {
        Strictness::Yes
    } else {
        Strictness::No
    }
}

fn is_zero(z: C64) -> bool {
    z == C64::new(0.0, 0.0)
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= 1e-14 * z.re.abs()
}

/// Distance between the nearest integer and `v`, below which `v` counts as an integer.
fn near_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-9
}

/// `z^{n1+n2} + a z^{n2} + d z^{n1} + (ad - bc)`, ascending coefficients.
fn z_polynomial(r: &ReducedBC, n1: usize, n2: usize) -> Vec<C64> {
    let mut p = vec![C64::new(0.0, 0.0); n1 + n2 + 1];
    p[n1 + n2] += 1.0;
    p[n2] += r.a;
    p[n1] += r.d;
    p[0] += r.j32();
    p
}

fn min_root_distance(coeffs: &[C64]) -> f64 {
    let roots = refined_roots(coeffs);
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            best = best.min((roots[i] - roots[j]).norm());
        }
    }
    best
}

/// `(alpha + 1) (|bc| alpha^{-alpha})^{1/(alpha+1)}`, the critical `|d|` when `a = 0`.
pub fn critical_d(alpha: f64, bc_abs: f64) -> f64 {
    (alpha + 1.0) * (bc_abs * alpha.powf(-alpha)).powf(1.0 / (alpha + 1.0))
}

/// Decides strict regularity from the reduced coefficients, trying the algebraic criteria in a fixed order.
pub fn classify_strict(r: &ReducedBC, w: &Weights) -> RegularityVerdict {
    let j32 = r.j32();
    if is_zero(j32) {
        return RegularityVerdict::new(false, Strictness::No, Branch::NotRegular, &[("ad_minus_bc", 0.0)]);
    }
    let (b1, b2) = (w.b1(), w.b2());
    let bc = r.b * r.c;
    if is_zero(r.a) && is_zero(r.d) {
        return RegularityVerdict::new(true, Strictness::Yes, Branch::Separated, &[("abs_bc", bc.norm())]);
    }
    let crit = if is_zero(bc) { b1 * r.d.norm().ln() + b2 * r.a.norm().ln() } else { f64::NAN };
    let crit_holds = crit.abs() > 1e-12 * (b1 * r.d.norm().ln()).abs().max((b2 * r.a.norm().ln()).abs()).max(1e-300);
    if is_zero(bc) && crit_holds {
        return RegularityVerdict::new(true, Strictness::Yes, Branch::Bc0I, &[("crit", crit)]);
    }
    let ratio = w.ratio();
    if ratio.is_some_and(|q| q.n1 == 1 && q.n2 == 1) {
        let disc = (r.a - r.d) * (r.a - r.d) + 4.0 * bc;
        // below this the discriminant is rounding noise of its two terms
        let noise = 16.0 * f64::EPSILON * ((r.a - r.d).norm_sqr() + 4.0 * bc.norm());
        let dist = disc.norm().sqrt();
        return RegularityVerdict::new(
            true,
            yes_no(disc.norm() > noise && dist >= ROOT_TOL),
            Branch::DiracDiscriminant,
            &[("disc_re", disc.re), ("disc_im", disc.im), ("root_distance", dist)],
        );
    }
    if is_zero(bc) {
        let Some(q) = ratio else {
            return RegularityVerdict::new(true, Strictness::No, Branch::Bc0Ii, &[("crit", crit)]);
        };
        // gcd(b1, b2) = unit b for the reduced tag
        let v = (-(q.n1 as f64) * (-r.d).arg() + q.n2 as f64 * (-r.a).arg()) / (2.0 * PI);
        return RegularityVerdict::new(
            true,
            yes_no(!near_integer(v)),
            Branch::Bc0Iii,
            &[("crit", crit), ("gcd_quotient", v)],
        );
    }
    if is_zero(r.a) {
        if let Some(q) = ratio {
            let (n1, n2) = (q.n1 as i32, q.n2 as i32);
            let nn = (n1 + n2) as f64;
            let lhs = (n1 as f64).powi(n1) * (n2 as f64).powi(n2) * (-r.d).powi(n1 + n2);
            let rhs = nn.powi(n1 + n2) * (-bc).powi(n2);
            let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
            return RegularityVerdict::new(
                true,
                yes_no(rel > 1e-9),
                Branch::A0Rational,
                &[("lhs_re", lhs.re), ("lhs_im", lhs.im), ("rhs_re", rhs.re), ("rhs_im", rhs.im), ("rel_diff", rel)],
            );
        }
        if is_real(bc) && is_real(r.d) {
            let alpha = w.alpha();
            let dstar = critical_d(alpha, bc.re.abs());
            let rel = (r.d.re.abs() - dstar).abs() / dstar;
            let mut v = RegularityVerdict::new(
                true,
                yes_no(rel > 1e-9),
                Branch::A0Irrational,
                &[("d", r.d.re), ("d_star", -dstar), ("alpha", alpha)],
            );
            if r.d.re > 0.0 {
                v = v.with_hint("critical magnitude applied to |d|; positive d collides as well");
            }
            return v;
        }
    }
    if let Some(q) = ratio {
        let p = z_polynomial(r, q.n1 as usize, q.n2 as usize);
        let dist = min_root_distance(&p);
        return RegularityVerdict::new(true, yes_no(dist >= ROOT_TOL), Branch::RationalPoly, &[("root_distance", dist)]);
    }
    let mut v = RegularityVerdict::new(true, Strictness::Undetermined, Branch::Numerical, &[("alpha", w.alpha())]);
    if let Some((p, q)) = w.probe_ratio() {
        v.witnesses.insert("probe_ratio".into(), p as f64 / q as f64);
    }
    v.with_hint("no algebraic criterion applies; run numerical_separation")
}

/// Zeros of `d - bc e^{i b1 λ} + e^{i b2 λ}` (`a = 0`, real `bc`, `d`) with
/// `re_min <= Re λ <= re_max`, from the real parametrization `b2 λ = pi x + i y`.
pub fn a0_real_zeros(r: &ReducedBC, w: &Weights, re_min: f64, re_max: f64) -> Result<Vec<C64>> {
    if !is_zero(r.a) || is_zero(r.b * r.c) || !is_real(r.b * r.c) || !is_real(r.d) || is_zero(r.d) {
        return Err(Error::ReductionHypothesis("need a = 0 and real nonzero bc, d".into()));
    }
    let (bc, d) = ((r.b * r.c).re, r.d.re);
    let alpha = w.alpha();
    let b2 = w.b2();
    let (x0, x1) = (re_min * b2 / PI, re_max * b2 / PI);
    let ratio = |x: f64| (alpha * PI * x).sin() / (PI * x).sin();
    let f = |x: f64| {
        let t = -bc * ratio(x);
        t.powf(1.0 / (alpha + 1.0)) * ((alpha + 1.0) * PI * x).sin() / (alpha * PI * x).sin() + d
    };
    let mut breaks: Vec<f64> = ((x0.floor() as i64)..=(x1.ceil() as i64)).map(|n| n as f64).collect();
    let (m0, m1) = ((x0 * alpha).floor() as i64, (x1 * alpha).ceil() as i64);
    breaks.extend((m0..=m1).map(|m| m as f64 / alpha));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let mut xs = Vec::new();
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= x0 || a >= x1 || b - a < 1e-12 {
            continue;
        }
        let mid = 0.5 * (a + b);
        if !(-bc * ratio(mid) > 0.0) {
            continue;
        }
        let mut ss: Vec<f64> = (1..256).map(|k| 0.5 * (1.0 - (PI * k as f64 / 256.0).cos())).collect();
        for e in [1e-5, 1e-7, 1e-9, 1e-11] {
            ss.push(e);
            ss.push(1.0 - e);
        }
        ss.sort_by(f64::total_cmp);
        let pts: Vec<f64> = ss.iter().map(|s| a + s * (b - a)).collect();
        let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
        for k in 0..pts.len() - 1 {
            let (fa, fb) = (vals[k], vals[k + 1]);
            if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
                continue;
            }
            let (mut lo, mut hi, flo) = (pts[k], pts[k + 1], fa);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                if (f(m) > 0.0) == (flo > 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            xs.push(0.5 * (lo + hi));
        }
    }
    let mut out: Vec<C64> = xs
        .into_iter()
        .filter(|x| *x >= x0 && *x <= x1)
        .map(|x| {
            let y = -(-bc * ratio(x)).ln() / (alpha + 1.0);
            C64::new(PI * x, y) / b2
        })
        .collect();
    if x0 <= 0.0 && x1 >= 0.0 {
        out.extend(imaginary_axis_zeros(bc, d, alpha).into_iter().map(|y| C64::new(0.0, y / b2)));
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Real roots `y` of `d - bc e^{alpha y} + e^{-y} = 0`.
fn imaginary_axis_zeros(bc: f64, d: f64, alpha: f64) -> Vec<f64> {
    let g = |y: f64| d - bc * (alpha * y).exp() + (-y).exp();
    let bisect = |mut lo: f64, mut hi: f64| {
        let glo = g(lo);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if (g(m) > 0.0) == (glo > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    };
    let expand = |from: f64, dir: f64| {
        let mut s = 1.0;
        while (g(from + dir * s) > 0.0) == (g(from) > 0.0) && s < 1e3 {
            s *= 2.0;
        }
        from + dir * s
    };
    if bc > 0.0 {
        // strictly decreasing from +inf to -inf
        let (lo, hi) = (expand(0.0, -1.0), expand(0.0, 1.0));
        let (lo, hi) = if g(0.0) > 0.0 { (0.0, hi) } else { (lo, 0.0) };
        return vec![bisect(lo, hi)];
    }
    let ystar = -(alpha * bc.abs()).ln() / (alpha + 1.0);
    if g(ystar) >= 0.0 {
        return Vec::new();
    }
    vec![bisect(expand(ystar, -1.0), ystar), bisect(ystar, expand(ystar, 1.0))]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationHint {
    Separated,
    Collapsing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `(T, min gap among zeros with T/2 < |Re λ| <= T)` per window.
    pub windows: Vec<(f64, f64)>,
    pub hint: SeparationHint,
}

/// Smallest distance between zeros on the same side of the imaginary axis.
fn min_gap(points: &[(C64, usize)]) -> f64 {
    let left: Vec<(C64, usize)> = points.iter().copied().filter(|p| p.0.re < 0.0).collect();
    let right: Vec<(C64, usize)> = points.iter().copied().filter(|p| p.0.re >= 0.0).collect();
    side_gap(&left).min(side_gap(&right))
}

fn side_gap(points: &[(C64, usize)]) -> f64 {
    let mut pts: Vec<&(C64, usize)> = points.iter().collect();
    if pts.iter().any(|p| p.1 > 1) {
        return 0.0;
    }
    pts.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[j].0.re - pts[i].0.re >= best {
                break;
            }
            best = best.min((pts[j].0 - pts[i].0).norm());
        }
    }
    best
}

/// Outer-half minimum gaps over the windows `|Re λ| <= t0 2^k`, `k = 0..=3`.
pub fn numerical_separation<F: Characteristic + ?Sized>(f: &F, t0: f64, h: f64) -> Result<SeparationReport> {
    let tmax = t0 * 8.0;
    let all = find_zeros_strip(f, &Strip::symmetric(h, tmax)?)?;
    let windows: Vec<(f64, f64)> = (0..4)
        .map(|k| {
            let t = t0 * (1u32 << k) as f64;
            let outer: Vec<(C64, usize)> = all
                .iter()
                .filter(|r| r.lambda.re.abs() > 0.5 * t && r.lambda.re.abs() <= t)
                .map(|r| (r.lambda, r.multiplicity))
                .collect();
            (t, min_gap(&outer))
        })
        .collect();
    Ok(SeparationReport { hint: separation_hint(&windows), windows })
}

pub fn separation_hint(windows: &[(f64, f64)]) -> SeparationHint {
    let gaps: Vec<f64> = windows.iter().map(|w| w.1).filter(|g| g.is_finite()).collect();
    let (Some(&first), Some(&last)) = (gaps.first(), gaps.last()) else {
        return SeparationHint::Inconclusive;
    };
    let low = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if low < 1e-6 || last < 0.5 * first {
        SeparationHint::Collapsing
    } else if low >= 0.5 * first {
        SeparationHint::Separated
    } else {
        SeparationHint::Inconclusive
    }
}

/// Deterministic candidates for the column-3 weight.
pub fn weight_candidates() -> Vec<C64> {
    let c = C64::new;
    let mut v = vec![
        c(1.5, 0.0),
        c(2.0, 0.0),
        c(3.0, 0.0),
        c(1.0, 1.0),
        c(1.0, -1.0),
        c(0.5, 0.0),
        c(-1.0, 0.0),
        c(-2.0, 0.0),
        c(0.0, 2.0),
        c(0.0, -2.0),
    ];
    v.extend((10..64).map(|k| C64::from_polar(1.0 + 0.25 * k as f64, 0.7 * k as f64)));
    v
}

/// `P_w(z) = J14 z^{n1+n2} + J12 z^{n1} + w J34 z^{n2} + w J32`, normalized by `J14`.
pub fn weighted_polynomial(bc: &BoundaryPair, n1: usize, n2: usize, w: C64) -> Vec<C64> {
    let m = check_regularity(bc);
    let mut p = vec![C64::new(0.0, 0.0); n1 + n2 + 1];
    p[n1 + n2] += 1.0;
    p[n1] += m.j12 / m.j14;
    p[n2] += w * m.j34 / m.j14;
    p[0] += w * m.j32 / m.j14;
    p
}

/// First candidate weight whose polynomial has simple roots (distance > 1e-6).
pub fn find_strictifying_weight(bc: &BoundaryPair, w: &Weights) -> Result<C64> {
    let q = w.ratio().ok_or(Error::RationalTagRequired)?;
    if !check_regularity(bc).regular {
        return Err(Error::InvalidBoundary);
    }
    let cands = weight_candidates();
    for &cand in &cands {
        let p = weighted_polynomial(bc, q.n1 as usize, q.n2 as usize, cand);
        if min_root_distance(&p) > 1e-6 {
            return Ok(cand);
        }
    }
    Err(Error::WeightNotFound { tried: cands.len() })
}

/// Multiplicities of the closed-form roots of the z-polynomial.
pub fn z_root_multiplicities(r: &ReducedBC, w: &Weights) -> Option<Vec<usize>> {
    let q = w.ratio()?;
    let roots = refined_roots(&z_polynomial(r, q.n1 as usize, q.n2 as usize));
    Some(cluster(&roots, ROOT_TOL).into_iter().map(|c| c.1).collect())
}
