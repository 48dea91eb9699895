//! Small dense helpers: matrix exponential, quadrature weights, polynomial
//! roots and root clustering.

use nalgebra::{DMatrix, SMatrix};

use crate::C64;

const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

fn norm1<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    (0..N)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the diagonal [6/6] Padé
/// approximant. Diagonal inputs are exponentiated entrywise.
pub fn expm<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let diagonal = (0..N).all(|i| (0..N).all(|j| i == j || a[(i, j)] == C64::new(0.0, 0.0)));
    if diagonal {
        let mut out = SMatrix::<C64, N, N>::zeros();
        for i in 0..N {
            out[(i, i)] = a[(i, i)].exp();
        }
        return out;
    }
    let nrm = norm1(a);
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = a.scale(0.5f64.powi(s));
    let id = SMatrix::<C64, N, N>::identity();
    let mut num = id.scale(PADE6[0]);
    let mut den = id.scale(PADE6[0]);
    let mut pow = id;
    for (k, &ck) in PADE6.iter().enumerate().skip(1) {
        pow *= a;
        num += pow.scale(ck);
        den += pow.scale(if k % 2 == 0 { ck } else { -ck });
    }
    let mut r = solve_small(den, num);
    for _ in 0..s {
        r = r * r;
    }
    r
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve_small<const N: usize>(mut a: SMatrix<C64, N, N>, mut b: SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
        a.swap_rows(col, piv);
        b.swap_rows(col, piv);
        let p = a[(col, col)];
        for r in (col + 1)..N {
            let f = a[(r, col)] / p;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..N {
                let v = a[(col, k)];
                a[(r, k)] -= f * v;
            }
            for k in 0..N {
                let v = b[(col, k)];
                b[(r, k)] -= f * v;
            }
        }
    }
    for col in (0..N).rev() {
        let p = a[(col, col)];
        for k in 0..N {
            let mut v = b[(col, k)];
            for j in (col + 1)..N {
                v -= a[(col, j)] * b[(j, k)];
            }
            b[(col, k)] = v / p;
        }
    }
    b
}

/// Determinant by elimination with partial pivoting.
pub fn det_small<const N: usize>(mut a: SMatrix<C64, N, N>) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
        if piv != col {
            a.swap_rows(col, piv);
            det = -det;
        }
        let p = a[(col, col)];
        if p == C64::new(0.0, 0.0) {
            return p;
        }
        det *= p;
        for r in (col + 1)..N {
            let f = a[(r, col)] / p;
            for k in col..N {
                let v = a[(col, k)];
                a[(r, k)] -= f * v;
            }
        }
    }
    det
}

/// Composite trapezoid weights for `m` intervals of width `h`.
pub fn trapezoid_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; m + 1];
    w[0] = 0.5 * h;
    w[m] = 0.5 * h;
    w
}

/// Composite Simpson weights for `m` intervals of width `h`; an odd interval
/// count closes with the 3/8 rule on the last three intervals.
pub fn simpson_weights(m: usize, h: f64) -> Vec<f64> {
    match m {
        0 => return vec![0.0],
        1 => return trapezoid_weights(1, h),
        _ => {}
    }
    let mut w = vec![0.0; m + 1];
    let even = if m % 2 == 0 { m } else { m - 3 };
    let mut i = 0;
    while i < even {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if even < m {
        let k = 3.0 * h / 8.0;
        w[even] += k;
        w[even + 1] += 3.0 * k;
        w[even + 2] += 3.0 * k;
        w[even + 3] += k;
    }
    w
}

/// Roots of `c[0] + c[1] z + ... + c[n] z^n` (`c[n] != 0`) as eigenvalues of
/// the companion matrix.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1] == C64::new(0.0, 0.0) {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[n];
    let mut comp = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let (_, t) = comp.schur().unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let Dd(s, e) = two_sum(self.0, o.0);
        let Dd(hi, lo) = two_sum(s, e + self.1 + o.1);
        Dd(hi, lo)
    }

    fn mul(self, b: f64) -> Dd {
        let p = self.0 * b;
        let e = self.0.mul_add(b, -p) + self.1 * b;
        two_sum(p, e)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

/// Coefficients of `P(z0 + u)` in `u`, accumulated in double-double.
pub fn taylor_shift(coeffs: &[C64], z0: C64) -> Vec<C64> {
    let mut b: Vec<(Dd, Dd)> = coeffs.iter().map(|c| (Dd(c.re, 0.0), Dd(c.im, 0.0))).collect();
    let n = b.len().saturating_sub(1);
    for i in 0..n {
        for j in (i..n).rev() {
            let (re, im) = b[j + 1];
            let pr = re.mul(z0.re).add(im.mul(z0.im).neg());
            let pi = re.mul(z0.im).add(im.mul(z0.re));
            b[j] = (b[j].0.add(pr), b[j].1.add(pi));
        }
    }
    b.into_iter().map(|(re, im)| C64::new(re.0 + re.1, im.0 + im.1)).collect()
}

/// Companion roots with near-coincident groups resolved from the local
/// Taylor polynomial at the group mean, so exact multiple roots come out
/// coincident to working precision instead of split by `sqrt(eps)`.
pub fn refined_roots(coeffs: &[C64]) -> Vec<C64> {
    let roots = poly_roots(coeffs);
    let groups = components(roots.len(), |i, j| (roots[i] - roots[j]).norm() < 1e-4 * (1.0 + roots[i].norm()));
    let mut out = Vec::with_capacity(roots.len());
    for g in groups {
        if g.len() == 1 {
            out.push(roots[g[0]]);
            continue;
        }
        let m = g.len();
        let mean = g.iter().map(|&i| roots[i]).sum::<C64>() / m as f64;
        let local = taylor_shift(coeffs, mean);
        // rescale u = s v so the local roots are O(1) before the companion solve
        let s = (0..m).map(|k| (local[k] / local[m]).norm().powf(1.0 / (m - k) as f64)).fold(0.0, f64::max);
        let near: Vec<C64> = if s == 0.0 {
            vec![C64::new(0.0, 0.0); m]
        } else {
            let scaled: Vec<C64> = (0..=m).map(|k| local[k] / local[m] * s.powi(k as i32 - m as i32)).collect();
            poly_roots(&scaled).into_iter().map(|v| v * s).collect()
        };
        let spread = near.iter().flat_map(|a| near.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
        if near.len() == m && spread < 1e-6 {
            out.extend(near.into_iter().map(|u| mean + u));
        } else {
            out.extend(g.iter().map(|&i| roots[i]));
        }
    }
    out
}

/// Connected components of the graph on `n` vertices joined by `linked`.
pub fn components(n: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if linked(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Groups points closer than `tol`; returns (centroid, multiplicity) per group.
pub fn cluster(points: &[C64], tol: f64) -> Vec<(C64, usize)> {
    components(points.len(), |i, j| (points[i] - points[j]).norm() < tol)
        .into_iter()
        .map(|g| {
            let sum: C64 = g.iter().map(|&i| points[i]).sum();
            (sum / g.len() as f64, g.len())
        })
        .collect()
}

/// Cell weights `(A, B)` with `int_0^h (g0 (1 - s/h) + g1 s/h) e^{i w s} ds = A g0 + B g1`.
pub fn filon_cell(omega: C64, h: f64) -> (C64, C64) {
    let theta = omega * h;
    let i = C64::new(0.0, 1.0);
    let (i0, i1) = if theta.norm() < 0.25 {
        let mut i0 = C64::new(0.0, 0.0);
        let mut i1 = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for k in 0..14 {
            if k > 0 {
                term *= i * theta / k as f64;
            }
            i0 += term / (k + 1) as f64;
            i1 += term / (k + 2) as f64;
        }
        (i0, i1)
    } else {
        let e = (i * theta).exp();
        let i0 = (e - 1.0) / (i * theta);
        let i1 = e * (1.0 / (i * theta) + 1.0 / (theta * theta)) - 1.0 / (theta * theta);
        (i0, i1)
    };
    ((i0 - i1) * h, i1 * h)
}

/// `int_0^{n h} g(t) e^{i w t} dt` for piecewise-linear `g` given by `n + 1` samples.
pub fn filon(samples: &[C64], h: f64, omega: C64) -> C64 {
    if samples.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let (a, b) = filon_cell(omega, h);
    let step = (C64::new(0.0, 1.0) * omega * h).exp();
    let mut phase = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for w in samples.windows(2) {
        acc += phase * (a * w[0] + b * w[1]);
        phase *= step;
    }
    acc
}

/// Horner evaluation with coefficients in ascending order.
pub fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn refined_multiple_roots() {
        // (z - 1)^2 (z + 2) and (z - 1)^3 (z - i)
        let p = [c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let r = refined_roots(&p);
        let ones: Vec<_> = r.iter().filter(|z| (*z - 1.0).norm() < 1e-3).collect();
        assert_eq!(ones.len(), 2);
        assert!((ones[0] - ones[1]).norm() < 1e-12);
        let q = [c(0.0, 1.0), c(-1.0, -3.0), c(3.0, 3.0), c(-3.0, -1.0), c(1.0, 0.0)];
        let r = refined_roots(&q);
        let ones: Vec<_> = r.iter().filter(|z| (*z - 1.0).norm() < 1e-3).collect();
        assert_eq!(ones.len(), 3);
        assert!(ones.iter().all(|z| (*z - 1.0).norm() < 1e-10));
        // distinct roots 2^-23 apart (exactly representable coefficients) stay apart
        let eps = 2f64.powi(-23);
        let (a, b) = (c(0.5, 0.0), c(0.5 + eps, 0.0));
        let p = [a * b, -(a + b), c(1.0, 0.0)];
        let r = refined_roots(&p);
        assert!(((r[0] - r[1]).norm() - eps).abs() < 1e-14 * eps.max(1.0));
    }

    #[test]
    fn expm_matches_rotation() {
        let t = 2.7;
        let a = Matrix2::new(c(0.0, 0.0), c(t, 0.0), c(-t, 0.0), c(0.0, 0.0));
        let e = expm(&a);
        let want = Matrix2::new(c(t.cos(), 0.0), c(t.sin(), 0.0), c(-t.sin(), 0.0), c(t.cos(), 0.0));
        assert!((e - want).norm() < 1e-14);
    }

    #[test]
    fn expm_nilpotent_and_diagonal() {
        let a = Matrix2::new(c(0.0, 0.0), c(3.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        let e = expm(&a);
        assert!((e[(0, 1)] - c(3.0, 1.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        let d = Matrix2::new(c(0.0, 40.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 2.0));
        let e = expm(&d);
        assert_eq!(e[(0, 0)], c(0.0, 40.0).exp());
    }

    #[test]
    fn expm_commuting_split() {
        // exp(A + sI) = e^s exp(A)
        let a = Matrix2::new(c(0.1, 0.3), c(1.2, -0.4), c(-0.7, 0.2), c(0.5, 0.9));
        let s = c(0.3, -1.1);
        let lhs = expm(&(a + Matrix2::identity() * s));
        let rhs = expm(&a) * s.exp();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn quadrature_exactness() {
        for m in [2usize, 3, 4, 7, 10] {
            let h = 1.0 / m as f64;
            let w = simpson_weights(m, h);
            let cubic: f64 = (0..=m).map(|i| w[i] * (i as f64 * h).powi(3)).sum();
            assert!((cubic - 0.25).abs() < 1e-14, "m={m}");
        }
        let w = trapezoid_weights(5, 0.2);
        let lin: f64 = (0..=5).map(|i| w[i] * (i as f64 * 0.2)).sum();
        assert!((lin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z+2)(z-i)
        let r = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for &z0 in &r {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, &ck) in coeffs.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * z0;
            }
            coeffs = next;
        }
        let found = poly_roots(&coeffs);
        for &z0 in &r {
            assert!(found.iter().any(|z| (z - z0).norm() < 1e-12));
        }
        assert!(poly_eval(&coeffs, r[2]).norm() < 1e-14);
    }

    #[test]
    fn clustering_double_root() {
        let roots = poly_roots(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        let cl = cluster(&roots, 1e-6);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].1, 2);
        assert!((cl[0].0 - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn filon_matches_exact_integrals() {
        // g(t) = 1 + 2t is reproduced exactly for any frequency
        for omega in [c(0.0, 0.0), c(1e-3, 0.0), c(3.0, 0.0), c(40.0, -2.0)] {
            let n = 7;
            let h = 1.0 / n as f64;
            let g: Vec<C64> = (0..=n).map(|k| c(1.0 + 2.0 * k as f64 * h, 0.0)).collect();
            let got = filon(&g, h, omega);
            let fine = 20000;
            let w = simpson_weights(fine, 1.0 / fine as f64);
            let want: C64 = (0..=fine)
                .map(|k| {
                    let t = k as f64 / fine as f64;
                    (c(0.0, 1.0) * omega * t).exp() * (1.0 + 2.0 * t) * w[k]
                })
                .sum();
            assert!((got - want).norm() < 1e-10 * (1.0 + want.norm()), "{omega}: {got} vs {want}");
        }
    }

    #[test]
    fn filon_series_branch_continuous() {
        let h = 0.01;
        let (a1, b1) = filon_cell(c(25.0 - 1e-10, 0.0), h);
        let (a2, b2) = filon_cell(c(25.0 + 1e-10, 0.0), h);
        assert!((a1 - a2).norm() < 1e-12 * h && (b1 - b2).norm() < 1e-12 * h, "{a1} {a2} {b1} {b2}");
    }

    #[test]
    fn components_chain() {
        let pts: [f64; 5] = [0.0, 0.5, 3.0, 3.4, 10.0];
        let g = components(5, |i, j| (pts[i] - pts[j]).abs() < 0.6);
        assert_eq!(g, vec![vec![0, 1], vec![2, 3], vec![4]]);
    }
}
