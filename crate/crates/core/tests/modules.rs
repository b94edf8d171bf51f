use std::sync::Arc;

use hitsymp::action_angle::{closed_form_g, demo_chart, flow, verify_darboux};
use hitsymp::cohomology::{coboundary, coboundary_space_basis, cocycle_space_basis, gram_matrix, omega_g, omega_k};
use hitsymp::decomposition::{bending_flow, build_cut_system, BendingParameter, CutKind};
use hitsymp::representation::{
    f_values, genus2_representation, pants_representation, random_traceless, spectral, spectral_generators,
    ConstructionParams, Representation,
};
use hitsymp::word_algebra::{reduce_word, SurfacePresentation, Word};
use hitsymp::Error;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genus2(n: usize, seed: u64) -> Arc<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Arc::new(genus2_representation(n, &mut rng, &ConstructionParams::default()).unwrap())
}

#[test]
fn h1_dimension_for_n2() {
    let rep = genus2(2, 3);
    let z = cocycle_space_basis(&rep).unwrap();
    let b = coboundary_space_basis(&rep).unwrap();
    assert_eq!(z.dim() - b.dim(), 6);
    assert_eq!(b.dim(), 3);
}

#[test]
fn omega_g_is_nondegenerate_on_h1() {
    let rep = genus2(3, 5);
    let z = cocycle_space_basis(&rep).unwrap();
    let report = gram_matrix(&z.basis, omega_g).unwrap();
    // Kernel of the form on Z¹ is exactly B¹.
    assert_eq!(z.dim() - report.rank.rank, 8);
    assert!((&report.gram + report.gram.transpose()).amax() < 1e-9 * report.gram.amax());
}

#[test]
fn omega_g_rejects_surfaces_with_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rep = Arc::new(pants_representation(3, &mut rng, &ConstructionParams::default()).unwrap());
    let a = coboundary(&rep, &random_traceless(3, &mut rng, 1.0));
    assert!(matches!(omega_g(&a, &a), Err(Error::NotClosedSurface { boundaries: 3 })));
    // A coboundary is parabolic, so omega_K is defined and vanishes against itself.
    let v = omega_k(&a, &a, &rep.presentation().peripheral_words()).unwrap();
    assert!(v.abs() < 1e-9);
}

#[test]
fn bending_preserves_cut_spectra_and_inverts() {
    let rep = genus2(3, 2);
    for kind in CutKind::ALL {
        let cs = build_cut_system(kind);
        for (k, cut) in cs.cuts.iter().enumerate() {
            let Ok(gens) = spectral_generators(&rep.evaluate(&cut.word)) else { continue };
            let x = gens[0].clone() * 0.7 + gens[1].clone() * -0.4;
            let bp = |t| BendingParameter { cut: k, x: x.clone(), t };
            let moved = bending_flow(&rep, &cs, &bp(1.3)).unwrap();
            assert!(moved.relator_residual() < 1e-9);
            for other in &cs.cuts {
                let (Ok(a), Ok(b)) = (f_values(&rep.evaluate(&other.word)), f_values(&moved.evaluate(&other.word))) else {
                    continue;
                };
                let drift = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                assert!(drift < 1e-9, "{kind} cut {k}: {drift:e}");
            }
            let back = bending_flow(&moved, &cs, &bp(-1.3)).unwrap();
            let err = rep.images().iter().zip(back.images()).map(|(p, q)| (p - q).norm() / p.norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "{kind} cut {k}: {err:e}");
        }
    }
}

#[test]
fn bending_rejects_non_commuting_direction() {
    let rep = genus2(3, 2);
    let cs = build_cut_system(CutKind::SeparatingGenus2);
    let mut x = DMatrix::zeros(3, 3);
    x[(0, 1)] = 1.0;
    let bp = BendingParameter { cut: 0, x, t: 1.0 };
    assert!(matches!(bending_flow(&rep, &cs, &bp), Err(Error::InvariantViolation { .. })));
}

#[test]
fn spectral_rejects_rotations() {
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let r = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
    assert!(matches!(spectral(&r), Err(Error::NotLoxodromic { .. })));
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0, 0.25]));
    let sd = spectral(&d).unwrap();
    assert!((sd.eigenvalues[0] - 4.0).abs() < 1e-14);
    let f = f_values(&d).unwrap();
    assert!((f[0] - 4f64.ln()).abs() < 1e-14 && (f[1] - 4f64.ln()).abs() < 1e-14);
}

#[test]
fn representations_validate_input() {
    let p = SurfacePresentation::closed(2);
    let id = DMatrix::<f64>::identity(3, 3);
    assert!(Representation::new(p.clone(), vec![id.clone(); 3]).is_err());
    let trivial = Representation::new(p.clone(), vec![id.clone(); 4]).unwrap();
    assert_eq!(trivial.relator_residual(), 0.0);
    let mut bad = vec![id.clone(); 4];
    bad[0] = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5, 1.0]));
    bad[1] = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    assert!(matches!(Representation::new(p, bad), Err(Error::RelatorViolation { .. })));
    assert!(matches!(reduce_word(&[1, 5], 4), Err(Error::UnknownGenerator { code: 5, rank: 4 })));
    assert_eq!(reduce_word(&[1, 2, -2, -1, 3], 4).unwrap(), Word::generator(2));
}

#[test]
fn darboux_sign_is_matched_on_every_chart() {
    for name in ["canonical", "exponential", "coupled"] {
        let demo = demo_chart(name).unwrap();
        let probes: Vec<DVector<f64>> = (0..3)
            .map(|k| DVector::from_fn(demo.chart.dim(), |i, _| 0.3 * (k as f64) - 0.2 * i as f64))
            .collect();
        let report = verify_darboux(&demo.chart, &probes, |x| Ok(closed_form_g(name, x).unwrap()), 1e-4).unwrap();
        assert!(report.deviation < 1e-5, "{name}: {report:?}");
        assert!(report.other_deviation > 1e-2, "{name}: {report:?}");
        assert_eq!(report.sign, -1.0);
    }
}

#[test]
fn hamiltonian_flows_keep_f_fixed() {
    let demo = demo_chart("coupled").unwrap();
    let x = DVector::from_vec(vec![0.2, -0.4, 0.5, 0.3]);
    for i in 0..2 {
        let y = flow(&demo.chart, i, &x, 0.8).unwrap();
        assert!((demo.chart.f(&y) - demo.chart.f(&x)).amax() < 1e-10);
        assert!((y - &x).norm() > 0.1);
    }
}
