use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::oracle::dense_cup_pairing_with_scale;
use super::{child_rng, Collector, SuiteConfig};
use crate::action_angle::{
    closed_form_g, commutativity_defect, darboux_complete, demo_chart, omega_preservation_defect, verify_darboux, DEMO_CHARTS,
};
use crate::bonahon_dreyer::{double_ratio, flag_of, rotation_check, triple_ratio, Flag};
use crate::cohomology::{
    coboundary, coboundary_space_basis, cocycle_space_basis, cup_pairing, gram_matrix, omega_k, omega_k_with,
    parabolic_potentials, parabolic_space_basis, Cocycle, CocycleSpace,
};
use crate::decomposition::{
    bending_flow, build_cut_system, exactness_report, moment_check, verify_decomposition, BendingParameter, CutKind,
    MomentOptions,
};
use crate::representation::{
    f_values, genus2_seed, irreducible_embed, length_invariants, one_holed_torus_representation, pants_representation,
    random_sl, random_traceless, sl2_hyperbolic, spectral_generators, ConstructionParams, Genus2Seed, Representation,
};
use crate::word_algebra::{reduce_word, GroupRingElement, TwoChain, Word};
use crate::{Error, Result};

fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    let codes: Vec<i64> = (0..len)
        .map(|_| {
            let g = rng.random_range(1..=rank as i64);
            if rng.random_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    reduce_word(&codes, rank).expect("codes are in range")
}

fn random_nontrivial_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    loop {
        let w = random_word(rng, rank, max_len);
        if !w.is_identity() {
            return w;
        }
    }
}

/// Smallest `f_j` over the cut curves of every shipped cut system accepted for
/// suite points; keeps paths and flows away from colliding eigenvalues.
const CUT_MARGIN: f64 = 1.0;
/// Largest Frobenius norm allowed for a generator image.
const IMAGE_BOUND: f64 = 12.0;

/// A random genus-2 seed whose cut curves all have `f_j ≥ CUT_MARGIN` and whose
/// generator images stay below `IMAGE_BOUND`. Points that fail either test are
/// stretched enough that finite differences lose their asymptotic regime.
fn sturdy_seed(n: usize, rng: &mut ChaCha8Rng) -> Result<Genus2Seed> {
    let params = ConstructionParams::default();
    let curves: Vec<Word> = CutKind::ALL
        .iter()
        .flat_map(|&k| build_cut_system(k).cuts.into_iter().map(|c| c.word))
        .collect();
    let mut last = None;
    for _ in 0..params.max_attempts {
        let seed = genus2_seed(n, rng, &params)?;
        let rep = seed.representation()?;
        if rep.images().iter().any(|g| g.norm() > IMAGE_BOUND) {
            continue;
        }
        let margin = curves
            .iter()
            .map(|w| f_values(&rep.evaluate(w)).map(|f| f.into_iter().fold(f64::INFINITY, f64::min)))
            .collect::<Result<Vec<_>>>();
        match margin {
            Ok(m) if m.iter().all(|&x| x >= CUT_MARGIN) => return Ok(seed),
            Ok(_) => {}
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Config(format!("no genus-2 point with cut margin {CUT_MARGIN} and image bound {IMAGE_BOUND}"))))
}

/// Unit-norm random element of a cocycle space.
fn random_unit(space: &CocycleSpace, rng: &mut ChaCha8Rng) -> Cocycle {
    let c: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = space.combine(&c);
    a.scaled(1.0 / a.norm())
}

fn unit_coboundary(rep: &Arc<Representation>, rng: &mut ChaCha8Rng) -> Cocycle {
    let dx = coboundary(rep, &random_traceless(rep.n(), rng, 1.0));
    dx.scaled(1.0 / dx.norm())
}

/// Runs a fallible trial and files its error, if any, under `context`.
fn attempt<T>(col: &mut Collector<'_>, suite: &str, context: &str, f: impl FnOnce(&mut Collector<'_>) -> Result<T>) {
    if let Err(e) = f(col) {
        col.error(suite, context, e);
    }
}

fn dim_check(col: &mut Collector<'_>, name: &str, got: usize, expected: usize) {
    col.check(name, got as f64, expected as f64, (got as f64 - expected as f64).abs());
}

fn gap_check(col: &mut Collector<'_>, gap: f64) {
    col.check("pairing.gap", gap, 1e4, 1.0 / gap);
}

pub(super) fn fox(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let mut rng = child_rng(cfg.seed, "fox");
    for _ in 0..cfg.trials_or(1000) {
        let rank = rng.random_range(1..=10);
        let w = random_word(&mut rng, rank, 40);
        let lhs = GroupRingElement::from_word(w.clone());
        let mut rhs = GroupRingElement::monomial(Word::identity(), lhs.augmentation());
        for s in 0..rank {
            let gen_minus_one = &GroupRingElement::from_word(Word::generator(s)) - &GroupRingElement::one();
            rhs = &rhs + &(&lhs.fox_derivative(s) * &gen_minus_one);
        }
        let diff = &lhs - &rhs;
        let mismatched: BigInt = diff.terms().map(|(_, c)| BigInt::from(c.magnitude().clone())).sum();
        let defect = num_traits::ToPrimitive::to_f64(&mismatched).unwrap_or(f64::INFINITY);
        col.check("fox.identity", lhs.num_terms() as f64, rhs.num_terms() as f64, defect);
    }
}

pub(super) fn pairing(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let n = cfg.n;
    let d = n * n - 1;
    let params = ConstructionParams::default();
    let mut rng = child_rng(cfg.seed, "pairing.dimensions");
    attempt(col, "pairing", "genus-2 cohomology", |col| {
        let rep = Arc::new(sturdy_seed(n, &mut rng)?.representation()?);
        let z = cocycle_space_basis(&rep)?;
        let b = coboundary_space_basis(&rep)?;
        dim_check(col, "pairing.h1_dim", z.dim() - b.dim(), 2 * d);
        gap_check(col, z.report.sv_gap.min(b.report.sv_gap));
        let ex = exactness_report(&rep, &build_cut_system(CutKind::SeparatingGenus2))?;
        dim_check(col, "pairing.separating_kernel", ex.kernel_dim, n - 1);
        gap_check(col, ex.min_gap);
        Ok(())
    });
    for (name, expected, torus) in [("pairing.pants_rank", d - 3 * (n - 1), false), ("pairing.torus_rank", d - (n - 1), true)] {
        attempt(col, "pairing", name, |col| {
            let rep = Arc::new(if torus {
                one_holed_torus_representation(n, &mut rng, &params)?
            } else {
                pants_representation(n, &mut rng, &params)?
            });
            let per = rep.presentation().peripheral_words();
            let par = parabolic_space_basis(&rep, &per)?;
            let gram = gram_matrix(&par.basis, |a, b| omega_k(a, b, &per))?;
            dim_check(col, name, gram.rank.rank, expected);
            gap_check(col, gram.rank.sv_gap.min(par.report.sv_gap));
            Ok(())
        });
    }

    let mut rng = child_rng(cfg.seed, "pairing.well-defined");
    attempt(col, "pairing", "pants leaf", |col| {
        let rep = Arc::new(pants_representation(n, &mut rng, &params)?);
        let per = rep.presentation().peripheral_words();
        let par = parabolic_space_basis(&rep, &per)?;
        let relator = rep.presentation().relator();
        for _ in 0..cfg.trials_or(50) {
            let a = random_unit(&par, &mut rng);
            let b = random_unit(&par, &mut rng);
            let w = omega_k(&a, &b, &per)?;
            let potentials = parabolic_potentials(&a, &per)?.potentials;
            for _ in 0..10 {
                let h = random_nontrivial_word(&mut rng, rep.rank(), 2);
                let conj = GroupRingElement::from_word(relator.conjugate_by(&h));
                let mut chain = TwoChain::new();
                for s in 0..rep.rank() {
                    chain.push(conj.fox_derivative(s), Word::generator(s));
                }
                let v = omega_k_with(&a, &b, &per, &chain, &potentials);
                col.check("pairing.invariance", v, w, (v - w).abs());
            }
            let dx = unit_coboundary(&rep, &mut rng);
            let v = omega_k(&dx, &b, &per)?;
            col.check("pairing.coboundary", v, 0.0, v.abs());
            let back = omega_k(&b, &a, &per)?;
            col.check("pairing.antisymmetry", w, -back, (w + back).abs());
        }
        Ok(())
    });

    let mut rng = child_rng(cfg.seed, "pairing.oracle");
    attempt(col, "pairing", "oracle", |col| {
        let reps = [
            Arc::new(pants_representation(n, &mut rng, &params)?),
            Arc::new(sturdy_seed(n, &mut rng)?.representation()?),
        ];
        for trial in 0..cfg.trials_or(100) {
            let rep = &reps[trial % 2];
            let values = |rng: &mut ChaCha8Rng| -> Vec<DMatrix<f64>> {
                (0..rep.rank()).map(|_| random_traceless(n, rng, 1.0)).collect()
            };
            let (va, vb) = (values(&mut rng), values(&mut rng));
            let a = Cocycle::new(rep.clone(), va.clone())?;
            let b = Cocycle::new(rep.clone(), vb.clone())?;
            let chain = random_chain(&mut rng, rep.rank());
            let main = cup_pairing(&a, &b, &chain);
            let (dense, scale) = dense_cup_pairing_with_scale(rep, &va, &vb, &chain);
            col.check("pairing.oracle", main, dense, (main - dense).abs() / scale.max(1.0));
        }
        Ok(())
    });
}

/// Up to six terms `[Σ c_w w | x]` with small integer coefficients and words of
/// length at most 4.
fn random_chain(rng: &mut ChaCha8Rng, rank: usize) -> TwoChain {
    let mut chain = TwoChain::new();
    for _ in 0..rng.random_range(1..=6) {
        let mut a = GroupRingElement::zero();
        for _ in 0..rng.random_range(1..=4) {
            a.add_term(random_word(rng, rank, 4), BigInt::from(rng.random_range(-3..=3)));
        }
        chain.push(a, random_word(rng, rank, 4));
    }
    chain
}

fn length_drift(a: &crate::representation::LengthInvariants, b: &crate::representation::LengthInvariants) -> f64 {
    let mut worst = a
        .l
        .iter()
        .zip(&b.l)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if let (Some(x), Some(y)) = (a.m, b.m) {
        worst = worst.max((x - y).abs());
    }
    if let (Some(x), Some(y)) = (a.ell, b.ell) {
        worst = worst.max((x - y).abs());
    }
    worst
}

fn relative_image_defect(a: &Representation, b: &Representation) -> f64 {
    a.images()
        .iter()
        .zip(b.images())
        .map(|(x, y)| (x - y).norm() / y.norm())
        .fold(0.0, f64::max)
}

pub(super) fn decomposition(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let n = cfg.n;
    let mut rng = child_rng(cfg.seed, "decomposition");
    let rep = match sturdy_seed(n, &mut rng).and_then(|s| s.representation()) {
        Ok(r) => Arc::new(r),
        Err(e) => return col.error("decomposition", "genus-2 point", e),
    };
    for kind in CutKind::ALL {
        let cs = build_cut_system(kind);
        let name = format!("decomposition.{kind}");
        attempt(col, "decomposition", &name.clone(), |col| {
            let space = parabolic_space_basis(&rep, &cs.peripheral_cut_words())?;
            for _ in 0..cfg.trials_or(50) {
                let a = random_unit(&space, &mut rng);
                let b = random_unit(&space, &mut rng);
                let r = verify_decomposition(&a, &b, &cs)?;
                col.record(&name, "decomposition.defect", r.lhs, r.rhs_terms.iter().sum(), r.defect);
            }
            Ok(())
        });
        attempt(col, "decomposition", &format!("{kind} flows"), |col| {
            let base = cs
                .cuts
                .iter()
                .map(|c| length_invariants(&rep.evaluate(&c.word)))
                .collect::<Result<Vec<_>>>()?;
            for k in 0..cs.cuts.len() {
                for x in spectral_generators(&rep.evaluate(&cs.cuts[k].word))? {
                    let x = &x / x.norm();
                    for step in -10..=10 {
                        let t = 0.5 * step as f64;
                        let bent = bending_flow(&rep, &cs, &BendingParameter { cut: k, x: x.clone(), t })?;
                        for (c, b0) in cs.cuts.iter().zip(&base) {
                            let li = length_invariants(&bent.evaluate(&c.word))?;
                            col.check("decomposition.drift", li.l[0], b0.l[0], length_drift(&li, b0));
                        }
                    }
                    let s = rng.random_range(-2.5..2.5);
                    let t = rng.random_range(-2.5..2.5);
                    let bend = |r: &Representation, t: f64| {
                        bending_flow(r, &cs, &BendingParameter { cut: k, x: x.clone(), t })
                    };
                    let two = bend(&bend(&rep, t)?, s)?;
                    let one = bend(&rep, s + t)?;
                    col.check("decomposition.additivity", s, t, relative_image_defect(&two, &one));
                }
            }
            Ok(())
        });
    }
}

pub(super) fn moment(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let n = cfg.n;
    let mut rng = child_rng(cfg.seed, "moment");
    let seed = match sturdy_seed(n, &mut rng) {
        Ok(s) => s,
        Err(e) => return col.error("moment", "genus-2 point", e),
    };
    let rep = match seed.representation() {
        Ok(r) => Arc::new(r),
        Err(e) => return col.error("moment", "genus-2 point", e),
    };
    let opts = MomentOptions::default();
    for i in 0..cfg.trials_or(20) {
        let ya = random_traceless(n, &mut rng, 0.3);
        let yb = random_traceless(n, &mut rng, 0.3);
        let kind = CutKind::ALL[i % 3];
        let cs = build_cut_system(kind);
        let k = (i / 3) % cs.cuts.len();
        let j = i % (n - 1);
        attempt(col, "moment", &format!("path {i}"), |col| {
            let r = moment_check(&rep, &cs, k, j, |t| seed.deformed(&ya, &yb, t), &opts)?;
            col.check("moment.defect", r.pairing, r.sign * r.derivative, r.defect);
            col.check("moment.ratio", r.convergence_ratio, 4.0, (r.convergence_ratio - 4.0).abs());
            Ok(())
        });
    }
}

pub(super) fn bd(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let mut rng = child_rng(cfg.seed, "bd");
    let trials = cfg.trials_or(50);
    let random_flag = |rng: &mut ChaCha8Rng, n: usize| Flag::new(random_sl(n, rng, 0.8));
    for n in [3, 4] {
        for t in 0..trials {
            attempt(col, "bd", &format!("rotation n={n} trial {t}"), |col| {
                let (a, b, c) = (random_flag(&mut rng, n)?, random_flag(&mut rng, n)?, random_flag(&mut rng, n)?);
                let v = rotation_check(&a, &b, &c)?;
                col.check("bd.rotation", v, 0.0, v);
                let (x, y) = (random_flag(&mut rng, n)?, random_flag(&mut rng, n)?);
                for i in 1..n {
                    let d1 = double_ratio(&a, &b, &x, &y, i)?;
                    let d2 = double_ratio(&a, &b, &y, &x, i)?;
                    col.check("bd.swap", d1 * d2, 1.0, (d1 * d2 - 1.0).abs());
                }
                Ok(())
            });
        }
    }
    for t in 0..trials {
        attempt(col, "bd", &format!("fuchsian trial {t}"), |col| {
            let mut flags = Vec::with_capacity(3);
            for _ in 0..3 {
                let g = sl2_hyperbolic(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::PI));
                flags.push(flag_of(&irreducible_embed(&g, 3))?);
            }
            let v = triple_ratio(&flags[0], &flags[1], &flags[2], 1, 1, 1)?;
            col.check("bd.fuchsian", v, 1.0, (v - 1.0).abs());
            Ok(())
        });
    }
}

pub(super) fn action_angle(cfg: &SuiteConfig, col: &mut Collector<'_>) {
    let mut rng = child_rng(cfg.seed, "action-angle");
    for name in DEMO_CHARTS {
        attempt(col, "action-angle", name, |col| {
            let demo = demo_chart(name)?;
            let chart = &demo.chart;
            let points: Vec<DVector<f64>> = (0..cfg.trials_or(4))
                .map(|_| DVector::from_fn(chart.dim(), |_, _| rng.random_range(-1.0..1.0)))
                .collect();
            for x in &points {
                let g = DVector::from_vec(darboux_complete(chart, &demo.section, x)?.g);
                let expected = closed_form_g(name, x).expect("shipped chart");
                col.check("aa.darboux", g[0], expected[0], (g - expected).amax());
                for i in 0..chart.half_dim() {
                    let v = omega_preservation_defect(chart, i, x, 0.7)?;
                    col.check("aa.preservation", v, 0.0, v);
                    for j in 0..chart.half_dim() {
                        let (s, t) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                        let v = commutativity_defect(chart, i, j, x, s, t)?;
                        col.check("aa.commutativity", v, 0.0, v);
                    }
                }
            }
            let g = |p: &DVector<f64>| darboux_complete(chart, &demo.section, p).map(|s| DVector::from_vec(s.g));
            let r = verify_darboux(chart, &points, g, 1e-4)?;
            col.check("aa.verify", r.sign, r.other_deviation, r.deviation);
            Ok(())
        });
    }
}
