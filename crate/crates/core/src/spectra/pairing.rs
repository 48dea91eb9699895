use serde::{Deserialize, Serialize};

use super::EigenvalueRecord;
use crate::linalg::components;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub records: Vec<EigenvalueRecord>,
    /// Largest gap among records with `|Re λ - center| > half_width / 2`.
    pub outer_max_gap: f64,
    pub inner_max_gap: f64,
}

/// Greedy nearest matching of perturbed to unperturbed zeros, copy by copy.
///
/// Every perturbed copy must find a partner; surplus unperturbed zeros are
/// ignored, so `unperturbed` may cover a wider window.
pub fn pair_with_unperturbed(
    perturbed: &[EigenvalueRecord],
    unperturbed: &[EigenvalueRecord],
    window: (f64, f64),
) -> Result<PairingReport> {
    let copies = |recs: &[EigenvalueRecord]| -> Vec<usize> {
        recs.iter().enumerate().flat_map(|(i, r)| std::iter::repeat(i).take(r.multiplicity)).collect()
    };
    let (p, u) = (copies(perturbed), copies(unperturbed));
    if p.len() > u.len() {
        return Err(Error::Pairing(format!("{} perturbed zeros but only {} unperturbed", p.len(), u.len())));
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(p.len() * u.len());
    for (i, &ri) in p.iter().enumerate() {
        for (j, &rj) in u.iter().enumerate() {
            cand.push(((perturbed[ri].lambda - unperturbed[rj].lambda).norm(), i, j));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut partner = vec![None; p.len()];
    let mut used = vec![false; u.len()];
    let mut left = p.len();
    for (_, i, j) in cand {
        if left == 0 {
            break;
        }
        if partner[i].is_none() && !used[j] {
            partner[i] = Some(j);
            used[j] = true;
            left -= 1;
        }
    }
    let mut records = perturbed.to_vec();
    for (i, &ri) in p.iter().enumerate() {
        let j = partner[i].ok_or_else(|| Error::Pairing(format!("no partner for {}", perturbed[ri].lambda)))?;
        let z0 = unperturbed[u[j]].lambda;
        let gap = (records[ri].lambda - z0).norm();
        let r = &mut records[ri];
        if r.paired.is_none() {
            r.paired = Some(z0);
        }
        r.gap = Some(r.gap.map_or(gap, |g: f64| g.max(gap)));
    }
    let center = 0.5 * (window.0 + window.1);
    let half = 0.5 * (window.1 - window.0);
    let (mut outer, mut inner) = (0.0f64, 0.0f64);
    for r in &records {
        let g = r.gap.unwrap_or(0.0);
        if (r.lambda.re - center).abs() > 0.5 * half {
            outer = outer.max(g);
        } else {
            inner = inner.max(g);
        }
    }
    Ok(PairingReport { records, outer_max_gap: outer, inner_max_gap: inner })
}

/// Connected components of the union of the discs `|z - λ_n| < eps`.
pub fn group_parentheses(records: &[EigenvalueRecord], eps: f64) -> Vec<Vec<usize>> {
    let mut blocks = components(records.len(), |i, j| (records[i].lambda - records[j].lambda).norm() < 2.0 * eps);
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_by_key(|b| b[0]);
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn recs(zs: &[(f64, f64, usize)]) -> Vec<EigenvalueRecord> {
        zs.iter().map(|&(x, y, m)| EigenvalueRecord::new(C64::new(x, y), m)).collect()
    }

    #[test]
    fn identical_lists_have_zero_gaps() {
        let a = recs(&[(-3.0, 0.1, 1), (0.0, 0.0, 2), (3.0, -0.2, 1)]);
        let rep = pair_with_unperturbed(&a, &a, (-4.0, 4.0)).unwrap();
        assert!(rep.records.iter().all(|r| r.gap == Some(0.0)));
        assert_eq!(rep.outer_max_gap, 0.0);
    }

    #[test]
    fn double_zero_fans_out() {
        let pert = recs(&[(-0.1, 0.0, 1), (0.1, 0.0, 1), (6.3, 0.0, 1)]);
        let base = recs(&[(0.0, 0.0, 2), (6.28, 0.0, 2)]);
        let rep = pair_with_unperturbed(&pert, &base, (-1.0, 7.0)).unwrap();
        assert_eq!(rep.records[0].paired, Some(C64::new(0.0, 0.0)));
        assert_eq!(rep.records[1].paired, Some(C64::new(0.0, 0.0)));
        assert!((rep.records[2].gap.unwrap() - 0.02).abs() < 1e-12);
        let rep = pair_with_unperturbed(&base, &pert, (-1.0, 7.0));
        assert!(matches!(rep, Err(Error::Pairing(_))));
    }

    #[test]
    fn outer_and_inner_gaps() {
        let pert = recs(&[(-9.0, 0.01, 1), (0.0, 0.1, 1), (9.0, 0.0, 1)]);
        let base = recs(&[(-9.0, 0.0, 1), (0.0, 0.0, 1), (9.0, 0.0, 1), (12.0, 0.0, 1)]);
        let rep = pair_with_unperturbed(&pert, &base, (-10.0, 10.0)).unwrap();
        assert!((rep.outer_max_gap - 0.01).abs() < 1e-15);
        assert!((rep.inner_max_gap - 0.1).abs() < 1e-15);
    }

    #[test]
    fn parentheses() {
        let sep = recs(&[(0.0, 0.0, 1), (1.0, 0.0, 1), (2.0, 0.0, 1)]);
        assert_eq!(group_parentheses(&sep, 0.25).len(), 3);
        let delta = 0.05;
        let inter: Vec<(f64, f64, usize)> =
            (0..4).flat_map(|n| [(n as f64, 0.0, 1), (n as f64 + delta, 0.0, 1)]).collect();
        let blocks = group_parentheses(&recs(&inter), delta);
        assert_eq!(blocks.len(), 4);
        assert!(blocks.iter().all(|b| b.len() == 2));
    }
}
