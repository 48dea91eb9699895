//! Zeros of characteristic functions in a horizontal strip.

mod pairing;

pub use pairing::{group_parentheses, pair_with_unperturbed, PairingReport};

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinant::Characteristic;
use crate::linalg::poly_roots;
use crate::problem::Strip;
use crate::{Error, Result, C64};

/// Largest admissible argument increment between neighbouring samples.
const ARG_STEP: f64 = 0.5;
const NUDGE: f64 = 1e-4;
const MAX_NUDGES: usize = 8;
const MAX_DEPTH: usize = 60;
const PROBE_SAMPLES: usize = 64;
const CLUSTER_DIAMETER: f64 = 1e-6;
const RESIDUAL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub lambda: C64,
    pub multiplicity: usize,
    pub index: i64,
    pub paired: Option<C64>,
    pub gap: Option<f64>,
}

impl EigenvalueRecord {
    pub fn new(lambda: C64, multiplicity: usize) -> Self {
        EigenvalueRecord { lambda, multiplicity, index: 0, paired: None, gap: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Rect { re0, re1, im0, im1 }
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn contains(&self, z: C64, margin: f64) -> bool {
        z.re >= self.re0 - margin && z.re <= self.re1 + margin && z.im >= self.im0 - margin && z.im <= self.im1 + margin
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re0, self.im0),
            C64::new(self.re1, self.im0),
            C64::new(self.re1, self.im1),
            C64::new(self.re0, self.im1),
        ]
    }

    fn error(&self) -> Error {
        Error::LocalizationFailure { re0: self.re0, re1: self.re1, im0: self.im0, im1: self.im1 }
    }
}

fn eval_checked<F: Characteristic + ?Sized>(f: &F, z: C64) -> Result<C64> {
    let v = f.eval(z)?;
    if !(v.norm() > 1e-14 * f.scale(z)) {
        return Err(Error::BoundaryNearZero(z));
    }
    Ok(v)
}

fn segment_arg<F: Characteristic + ?Sized>(f: &F, za: C64, fa: C64, zb: C64, fb: C64, depth: usize) -> Result<f64> {
    let zm = 0.5 * (za + zb);
    let fm = eval_checked(f, zm)?;
    let (d, d1, d2) = ((fb / fa).arg(), (fm / fa).arg(), (fb / fm).arg());
    if d1.abs() <= ARG_STEP && d2.abs() <= ARG_STEP && (d1 + d2 - d).abs() < 1e-9 {
        return Ok(d1 + d2);
    }
    if depth >= MAX_DEPTH || (zb - za).norm() < 1e-9 * (1.0 + zm.norm()) {
        return Err(Error::BoundaryNearZero(zm));
    }
    Ok(segment_arg(f, za, fa, zm, fm, depth + 1)? + segment_arg(f, zm, fm, zb, fb, depth + 1)?)
}

/// Continuous change of `arg f` along the segment from `a` to `b`.
pub fn edge_arg<F: Characteristic + ?Sized>(f: &F, a: C64, b: C64) -> Result<f64> {
    let n = ((b - a).norm() * f.span() / ARG_STEP).ceil() as usize + 2;
    let pts: Vec<C64> = (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect();
    let vals = pts.iter().map(|&z| eval_checked(f, z)).collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for k in 0..n {
        total += segment_arg(f, pts[k], vals[k], pts[k + 1], vals[k + 1], 0)?;
    }
    Ok(total)
}

fn winding(args: f64) -> Result<usize> {
    let w = args / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() >= 1e-3 || r < -0.5 {
        return Err(Error::BoundaryNearZero(C64::new(w, 0.0)));
    }
    Ok(r as usize)
}

/// Number of zeros inside `rect` by the argument principle.
pub fn count_zeros_rect<F: Characteristic + ?Sized>(f: &F, rect: &Rect) -> Result<usize> {
    let c = rect.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += edge_arg(f, c[k], c[(k + 1) % 4])?;
    }
    winding(total)
}

/// As [`count_zeros_rect`], enlarging the rectangle by `k * 1e-4` on every side when an edge passes too close to a zero.
pub fn count_zeros_rect_nudged<F: Characteristic + ?Sized>(f: &F, rect: &Rect) -> Result<(usize, Rect)> {
    let mut last = None;
    for k in 0..=MAX_NUDGES {
        let e = k as f64 * NUDGE;
        let r = Rect::new(rect.re0 - e, rect.re1 + e, rect.im0 - e, rect.im1 + e);
        match count_zeros_rect(f, &r) {
            Ok(n) => return Ok((n, r)),
            Err(Error::BoundaryNearZero(z)) => last = Some(z),
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryNearZero(last.unwrap_or_default()))
}

fn derivative<F: Characteristic + ?Sized>(f: &F, z: C64) -> Result<C64> {
    let h = 1e-6 * (1.0 + z.norm()).min(10.0);
    Ok((f.eval(z + h)? - f.eval(z - h)?) / (2.0 * h))
}

/// Newton iteration confined to `rect` (plus a small margin).
fn newton<F: Characteristic + ?Sized>(f: &F, z0: C64, rect: &Rect) -> Result<Option<C64>> {
    let margin = 1e-3 * rect.width().max(rect.height());
    let mut z = z0;
    for _ in 0..80 {
        let fz = f.eval(z)?;
        if fz.norm() < 1e-15 * f.scale(z) {
            break;
        }
        let d = derivative(f, z)?;
        if d.norm() == 0.0 {
            return Ok(None);
        }
        let step = fz / d;
        z -= step;
        if !rect.contains(z, margin) {
            return Ok(None);
        }
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let ok = f.eval(z)?.norm() < RESIDUAL * f.scale(z);
    Ok(ok.then_some(z))
}

/// Zeros inside a circle from the contour moments of `f'/f`, with `f'` taken spectrally from the samples.
fn probe<F: Characteristic + ?Sized>(f: &F, center: C64, r: f64, m: usize) -> Result<Option<Vec<C64>>> {
    let n = PROBE_SAMPLES;
    let u: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let vals = u.iter().map(|&w| eval_checked(f, center + r * w)).collect::<Result<Vec<_>>>()?;
    let coef: Vec<C64> = (0..n)
        .map(|j| (0..n).map(|k| vals[k] * u[(k * j) % n].conj()).sum::<C64>() / n as f64)
        .collect();
    let deriv: Vec<C64> = (0..n)
        .map(|k| (1..n).map(|j| coef[j] * j as f64 * u[(k * (j - 1)) % n]).sum::<C64>())
        .collect();
    // s_p = (1 / 2 pi i) oint u^p f'/f du
    let s: Vec<C64> = (0..=m)
        .map(|p| (0..n).map(|k| u[(k * (p + 1)) % n] * deriv[k] / vals[k]).sum::<C64>() / n as f64)
        .collect();
    if (s[0] - m as f64).norm() > 0.05 {
        return Ok(None);
    }
    let mut e = vec![C64::new(1.0, 0.0)];
    for k in 1..=m {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * s[i];
        }
        e.push(acc / k as f64);
    }
    let coeffs: Vec<C64> = (0..=m)
        .map(|j| {
            let k = m - j;
            if k % 2 == 0 {
                e[k]
            } else {
                -e[k]
            }
        })
        .collect();
    Ok(Some(poly_roots(&coeffs).into_iter().map(|w| center + r * w).collect()))
}

fn resolve_cluster<F: Characteristic + ?Sized>(f: &F, rect: &Rect, m: usize) -> Result<Option<Vec<(C64, usize)>>> {
    let center = rect.center();
    let r = 0.75 * rect.width().max(rect.height());
    let Some(roots) = probe(f, center, r, m)? else {
        return Ok(None);
    };
    let diameter = roots.iter().flat_map(|a| roots.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    if diameter < CLUSTER_DIAMETER {
        let z = roots.iter().sum::<C64>() / m as f64;
        if rect.contains(z, 0.0) && f.eval(z)?.norm() < RESIDUAL * f.scale(z) {
            return Ok(Some(vec![(z, m)]));
        }
        return Ok(None);
    }
    let mut out: Vec<C64> = Vec::new();
    for z0 in roots {
        if !rect.contains(z0, 1e-6 * r) {
            return Ok(None);
        }
        match newton(f, z0, rect)? {
            Some(z) if out.iter().all(|w| (w - z).norm() > 1e-9) => out.push(z),
            _ => return Ok(None),
        }
    }
    Ok(Some(out.into_iter().map(|z| (z, 1)).collect()))
}

/// Splits `rect` in two across its longer side, shifting the cut when it meets a zero.
fn bisect<F: Characteristic + ?Sized>(f: &F, rect: &Rect, count: usize) -> Result<[(Rect, usize); 2]> {
    let mut last = Error::BoundaryNearZero(rect.center());
    for k in 0..=MAX_NUDGES {
        let t = 0.5 + 0.037 * k as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = if rect.width() >= rect.height() {
            let x = rect.re0 + t * rect.width();
            (Rect { re1: x, ..*rect }, Rect { re0: x, ..*rect })
        } else {
            let y = rect.im0 + t * rect.height();
            (Rect { im1: y, ..*rect }, Rect { im0: y, ..*rect })
        };
        match (count_zeros_rect(f, &a), count_zeros_rect(f, &b)) {
            (Ok(na), Ok(nb)) if na + nb == count => return Ok([(a, na), (b, nb)]),
            (Ok(_), Ok(_)) => last = rect.error(),
            (Err(Error::BoundaryNearZero(z)), _) | (_, Err(Error::BoundaryNearZero(z))) => last = Error::BoundaryNearZero(z),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(match last {
        Error::BoundaryNearZero(_) => rect.error(),
        e => e,
    })
}

fn resolve_box<F: Characteristic + ?Sized>(f: &F, rect: Rect, count: usize, depth: usize) -> Result<Vec<(C64, usize)>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if depth > MAX_DEPTH {
        return Err(rect.error());
    }
    if count == 1 {
        if let Some(z) = newton(f, rect.center(), &rect)? {
            return Ok(vec![(z, 1)]);
        }
    } else {
        let aspect = rect.width().max(rect.height()) / rect.width().min(rect.height());
        if aspect <= 2.0 {
            if let Some(found) = resolve_cluster(f, &rect, count)? {
                return Ok(found);
            }
        }
    }
    let [(a, na), (b, nb)] = bisect(f, &rect, count)?;
    let mut out = resolve_box(f, a, na, depth + 1)?;
    out.extend(resolve_box(f, b, nb, depth + 1)?);
    Ok(out)
}

/// Vertical edge at `x`, moved by `k * 1e-4` (outwards at the window ends) until it clears every zero.
fn vertical<F: Characteristic + ?Sized>(f: &F, x: f64, dir: f64, h: f64) -> Result<(f64, f64)> {
    let mut last = C64::new(x, 0.0);
    for k in 0..=MAX_NUDGES {
        let xk = x + dir * k as f64 * NUDGE;
        match edge_arg(f, C64::new(xk, -h), C64::new(xk, h)) {
            Ok(a) => return Ok((xk, a)),
            Err(Error::BoundaryNearZero(z)) => last = z,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryNearZero(last))
}

fn columns_at<F: Characteristic + ?Sized>(f: &F, base: &[f64], h: f64) -> Result<Vec<(Rect, usize)>> {
    let k = base.len() - 1;
    let verticals: Vec<(f64, f64)> = base
        .par_iter()
        .enumerate()
        .map(|(i, &x)| vertical(f, x, if i == 0 { -1.0 } else { 1.0 }, h))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = verticals.iter().map(|v| v.0).collect();
    let horizontals: Vec<(f64, f64)> = (0..k)
        .into_par_iter()
        .map(|i| {
            let bot = edge_arg(f, C64::new(xs[i], -h), C64::new(xs[i + 1], -h))?;
            let top = edge_arg(f, C64::new(xs[i + 1], h), C64::new(xs[i], h))?;
            Ok((bot, top))
        })
        .collect::<Result<_>>()?;
    (0..k)
        .map(|i| {
            let n = winding(horizontals[i].0 + verticals[i + 1].1 + horizontals[i].1 - verticals[i].1)?;
            Ok((Rect::new(xs[i], xs[i + 1], -h, h), n))
        })
        .collect()
}

/// Columns of width at most `2 pi / span` with per-column counts; shared edges are evaluated once.
fn column_counts<F: Characteristic + ?Sized>(f: &F, strip: &Strip) -> Result<Vec<(Rect, usize)>> {
    let spacing = 2.0 * PI / f.span();
    let k = ((strip.re_max - strip.re_min) / spacing).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=k).map(|i| strip.re_min + (strip.re_max - strip.re_min) * i as f64 / k as f64).collect();
    let mut last = C64::new(0.0, strip.h);
    for j in 0..=MAX_NUDGES {
        match columns_at(f, &xs, strip.h + j as f64 * NUDGE) {
            Err(Error::BoundaryNearZero(z)) if (z.im.abs() - strip.h).abs() < 1e-2 => last = z,
            other => return other,
        }
    }
    Err(Error::BoundaryNearZero(last))
}

/// All zeros in `[re_min, re_max] x [-h, h]`, sorted by real part.
pub fn find_zeros_strip<F: Characteristic + ?Sized>(f: &F, strip: &Strip) -> Result<Vec<EigenvalueRecord>> {
    let columns = column_counts(f, strip)?;
    let found: Vec<Vec<(C64, usize)>> =
        columns.into_par_iter().map(|(rect, n)| resolve_box(f, rect, n, 0)).collect::<Result<_>>()?;
    let found: Vec<(C64, usize)> = found.into_iter().flatten().collect();
    // a multiple zero on a partition line can come back from two boxes
    let mut records: Vec<EigenvalueRecord> = crate::linalg::components(found.len(), |i, j| {
        (found[i].0 - found[j].0).norm() < CLUSTER_DIAMETER
    })
    .into_iter()
    .map(|g| {
        let m: usize = g.iter().map(|&i| found[i].1).sum();
        let z: C64 = g.iter().map(|&i| found[i].0 * found[i].1 as f64).sum::<C64>() / m as f64;
        EigenvalueRecord::new(z, m)
    })
    .collect();
    records.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    assign_indices(&mut records);
    Ok(records)
}

/// Index 0 goes to the first record with non-negative real part.
pub fn assign_indices(records: &mut [EigenvalueRecord]) {
    let zero = records.iter().position(|r| r.lambda.re >= -1e-9).unwrap_or(records.len()) as i64;
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i as i64 - zero;
    }
}

/// True when the outermost zero lies within 0.1 of the strip boundary.
pub fn near_strip_edge(records: &[EigenvalueRecord], h: f64) -> bool {
    records.iter().any(|r| r.lambda.im.abs() > h - 0.1)
}

pub fn total_multiplicity(records: &[EigenvalueRecord]) -> usize {
    records.iter().map(|r| r.multiplicity).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinant::{delta0_eval, delta0_zero_family, Delta0, DeterminantHandle};
    use crate::problem::{BoundaryPair, DiracProblem, PotentialGrid, ReducedBC, Weights};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn d0(a: f64, b: f64, cc: f64, d: f64, w: Weights) -> Delta0 {
        Delta0 { bc: ReducedBC::real(a, b, cc, d), weights: w }
    }

    #[test]
    fn counts() {
        let per = d0(-1.0, 0.0, 0.0, -1.0, Weights::dirac());
        assert_eq!(count_zeros_rect(&per, &Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap(), 2);
        let sep = d0(0.0, 1.0, -2.0, 0.0, Weights::dirac());
        assert_eq!(count_zeros_rect(&sep, &Rect::new(0.0, 3.2, -1.0, 1.0)).unwrap(), 1);
        assert_eq!(count_zeros_rect(&sep, &Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap(), 0);
    }

    #[test]
    fn count_through_zero_needs_nudge() {
        let sep = d0(0.0, 1.0, -2.0, 0.0, Weights::dirac());
        let z = c(PI / 2.0, -0.5 * 2f64.ln());
        let rect = Rect::new(z.re, 3.0, -1.0, 1.0);
        assert!(matches!(count_zeros_rect(&sep, &rect), Err(Error::BoundaryNearZero(_))));
        let (n, used) = count_zeros_rect_nudged(&sep, &rect).unwrap();
        assert_eq!(n, 1);
        assert!(used.re0 < z.re);
    }

    #[test]
    fn periodic_double_zeros() {
        let per = d0(-1.0, 0.0, 0.0, -1.0, Weights::dirac());
        let recs = find_zeros_strip(&per, &Strip::symmetric(1.0, 20.0).unwrap()).unwrap();
        assert_eq!(recs.len(), 7);
        for (r, n) in recs.iter().zip(-3..=3) {
            assert_eq!(r.multiplicity, 2);
            assert_eq!(r.index, n);
            assert!((r.lambda - c(2.0 * PI * n as f64, 0.0)).norm() < 1e-8, "{}", r.lambda);
        }
    }

    #[test]
    fn separated_closed_form() {
        let sep = d0(0.0, 1.0, -2.0, 0.0, Weights::dirac());
        let recs = find_zeros_strip(&sep, &Strip::new(1.0, -32.0, 33.5).unwrap()).unwrap();
        assert_eq!(recs.len(), 21);
        for r in &recs {
            let want = c(PI / 2.0 + PI * r.index as f64, -0.5 * 2f64.ln());
            assert!((r.lambda - want).norm() < 1e-8);
            assert_eq!(r.multiplicity, 1);
        }
    }

    #[test]
    fn irrational_density() {
        let w = Weights::new(-1.0, 2f64.sqrt()).unwrap();
        let f = Delta0 { bc: ReducedBC::real(0.5, 1.0, -1.0, 2.0), weights: w };
        let h = crate::determinant::delta0_im_bound(&crate::problem::check_regularity(&BoundaryPair::from_reduced(&f.bc)), w.b()) + 1.0;
        let recs = find_zeros_strip(&f, &Strip::new(h, 0.0, 200.0).unwrap()).unwrap();
        let want = 200.0 * (1.0 + 2f64.sqrt()) / (2.0 * PI);
        assert!((total_multiplicity(&recs) as f64 - want).abs() <= 3.0);
        for r in &recs {
            assert!(delta0_eval(&f.bc, &w, r.lambda).unwrap().norm() < 1e-10 * f.scale(r.lambda));
        }
    }

    #[test]
    fn matches_polynomial_family() {
        let w = Weights::with_ratio(-2.0, 3.0, 2, 3).unwrap();
        let bc = ReducedBC::new(c(0.4, 0.1), c(1.0, 0.0), c(0.3, -0.2), c(-0.5, 0.0));
        let fam = delta0_zero_family(&bc, &w).unwrap();
        let h = fam.max_abs_im() + 1.0;
        let recs = find_zeros_strip(&Delta0 { bc, weights: w }, &Strip::new(h, -10.0, 10.0).unwrap()).unwrap();
        let want = fam.zeros_in(-10.0, 10.0);
        assert_eq!(recs.len(), want.len());
        for (r, (z, m)) in recs.iter().zip(want) {
            assert!((r.lambda - z).norm() < 1e-8);
            assert_eq!(r.multiplicity, m);
        }
    }

    #[test]
    fn close_pair_is_split() {
        // (z - 1)(z - 1 - 1e-3) on the propagator would be slow; a polynomial-like entire function suffices.
        struct Pair;
        impl Characteristic for Pair {
            fn eval(&self, z: C64) -> Result<C64> {
                Ok((z - 1.0) * (z - c(1.001, 0.0004)) * (0.3 * z).exp())
            }
            fn exponents(&self) -> Vec<f64> {
                vec![-0.15, 0.15]
            }
        }
        let recs = find_zeros_strip(&Pair, &Strip::symmetric(1.0, 5.0).unwrap()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!((recs[0].lambda - 1.0).norm() < 1e-10);
        assert!((recs[1].lambda - c(1.001, 0.0004)).norm() < 1e-10);
    }

    #[test]
    fn conjugated_inputs_give_conjugated_zeros() {
        let w = Weights::dirac();
        let bc = ReducedBC::new(c(0.5, 0.3), c(1.0, -1.0), c(0.2, 0.0), c(-0.7, 0.4));
        let h = delta0_zero_family(&bc, &w).unwrap().max_abs_im() + 1.0;
        let a = find_zeros_strip(&Delta0 { bc, weights: w }, &Strip::symmetric(h, 12.0).unwrap()).unwrap();
        let b = find_zeros_strip(&Delta0 { bc: bc.conj(), weights: w }, &Strip::symmetric(h, 12.0).unwrap()).unwrap();
        assert_eq!(a.len(), b.len());
        // conj Delta0(bc, lam) = Delta0(conj bc, -conj lam)
        for r in &a {
            let mirror = -r.lambda.conj();
            assert!(b.iter().any(|s| (s.lambda - mirror).norm() < 1e-8 && s.multiplicity == r.multiplicity));
        }
    }

    #[test]
    fn propagator_mode_with_potential() {
        let p = DiracProblem::new(
            Weights::dirac(),
            PotentialGrid::off_diagonal(256, |x| c(0.5 + x, 0.0), |x| c(1.0 - x, 0.0)).unwrap(),
            BoundaryPair::from_reduced(&ReducedBC::real(0.0, 1.0, -2.0, 0.0)),
        );
        let f = DeterminantHandle::propagator(&p);
        let recs = find_zeros_strip(&f, &Strip::symmetric(f.default_strip_height(), 10.0).unwrap()).unwrap();
        assert_eq!(total_multiplicity(&recs), 6);
        for r in &recs {
            assert!(f.eval(r.lambda).unwrap().norm() < RESIDUAL * f.scale(r.lambda));
        }
    }

    #[test]
    fn partition_conserves_count() {
        let f = d0(0.3, 2.0, -1.0, 0.8, Weights::new(-1.0, 2.5).unwrap());
        let whole = Rect::new(-7.0, 9.0, -3.0, 3.0);
        let n = count_zeros_rect(&f, &whole).unwrap();
        let parts = bisect(&f, &whole, n).unwrap();
        assert_eq!(parts[0].1 + parts[1].1, n);
        let mut sum = 0;
        for x in 0..4 {
            let r = Rect::new(-7.0 + 4.0 * x as f64, -3.0 + 4.0 * x as f64, -3.0, 3.0);
            sum += count_zeros_rect(&f, &r).unwrap();
        }
        assert_eq!(sum, n);
    }
}
