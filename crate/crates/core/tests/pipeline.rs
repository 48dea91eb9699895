use std::f64::consts::PI;

use dirac_spectra::basis::{gram_diagnostics, grid_weights, root_system};
use dirac_spectra::determinant::{delta0_minors, delta_via_propagator, Characteristic, DeterminantHandle};
use dirac_spectra::problem::{adjoint_problem, check_regularity, BoundaryPair, DiracProblem, PotentialGrid, ReducedBC, Strip, Weights};
use dirac_spectra::spectra::find_zeros_strip;
use dirac_spectra::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn problem(m: usize) -> DiracProblem {
    DiracProblem::new(
        Weights::new(-1.0, 1.5).unwrap(),
        PotentialGrid::off_diagonal(m, |x| c(1.0 + x, 0.2), |x| c((3.0 * x).cos(), 0.0)).unwrap(),
        BoundaryPair::from_reduced(&ReducedBC::new(c(0.3, 0.0), c(1.0, 0.0), c(-1.5, 0.2), c(0.0, 0.0))),
    )
}

#[test]
fn kernel_trace_spectrum_tracks_propagator() {
    let p = problem(1024);
    let exact = DeterminantHandle::propagator(&p);
    let strip = Strip::new(exact.default_strip_height(), -12.0, 12.0).unwrap();
    let a = find_zeros_strip(&exact, &strip).unwrap();
    let b = find_zeros_strip(&DeterminantHandle::kernel_trace(&p, 128).unwrap(), &strip).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.lambda - y.lambda).norm() < 1e-2, "{} vs {}", x.lambda, y.lambda);
    }
}

#[test]
fn adjoint_spectrum_is_conjugate() {
    let p = problem(512);
    let adj = adjoint_problem(&p).unwrap();
    let f = DeterminantHandle::propagator(&p);
    let g = DeterminantHandle::propagator(&adj);
    let h = f.default_strip_height().max(g.default_strip_height());
    let a = find_zeros_strip(&f, &Strip::new(h, -10.0, 10.0).unwrap()).unwrap();
    for r in &a {
        assert!(g.eval(r.lambda.conj()).unwrap().norm() < 1e-8 * g.scale(r.lambda.conj()), "{}", r.lambda);
    }
}

#[test]
fn refinement_converges_for_basis() {
    let cond = |m: usize| {
        let p = DiracProblem::new(
            Weights::dirac(),
            PotentialGrid::constant(m, c(0.5, 0.0), c(0.5, 0.0)).unwrap(),
            BoundaryPair::from_reduced(&ReducedBC::real(0.0, 1.0, -2.0, 0.0)),
        );
        let f = DeterminantHandle::propagator(&p);
        let recs = find_zeros_strip(&f, &Strip::new(f.default_strip_height(), -5.0 * PI, 6.0 * PI).unwrap()).unwrap();
        let pairs = root_system(&p, &recs).unwrap();
        gram_diagnostics(&pairs, &grid_weights(&p), None).unwrap().cond
    };
    let (a, b) = (cond(256), cond(512));
    assert!((a - b).abs() < 1e-3 * b, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_potential_matches_closed_form(
        b1 in 0.3f64..3.0, b2 in 0.3f64..3.0,
        entries in proptest::array::uniform8(-2.0f64..2.0),
        re in -40.0f64..40.0, im in -2.0f64..2.0,
    ) {
        let r1 = [c(entries[0], entries[1]), c(entries[2], 0.0), c(entries[3], 0.5), c(1.0, 0.0)];
        let r2 = [c(0.0, entries[4]), c(entries[5], 0.0), c(1.0, entries[6]), c(entries[7], 0.0)];
        let bc = BoundaryPair::from_rows(r1, r2);
        prop_assume!(bc.is_ok());
        let bc = bc.unwrap();
        let m = check_regularity(&bc);
        let w = Weights::new(-b1, b2).unwrap();
        let p = DiracProblem::new(w, PotentialGrid::zero(32).unwrap(), bc);
        let l = c(re, im);
        let d0 = delta0_minors(&m, w.b(), l);
        let d = delta_via_propagator(&p, l).unwrap();
        prop_assert!((d - d0).norm() < 1e-12 * (d0.norm() + 1.0));
    }
}
