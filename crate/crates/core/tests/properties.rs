//! Property tests on random states and unitaries. Reference values are
//! recomputed here by brute force (explicit index shuffles and repeated
//! matrix products) rather than through the library's eigen-based paths.

use absep_core::detection::{eigenvalue_oracle_2xd, hankel, moments, operator_moments, thm1_test, HankelOutcome};
use absep_core::discrimination::Discrimination;
use absep_core::linalg::{schatten_norm, trace_norm};
use absep_core::maps::PositiveMapSpec;
use absep_core::states::{random_density, DensityMatrix};
use absep_core::unitaries::haar_random;
use absep_core::channels::depolarizing;
use absep_core::CMatrix;
use proptest::prelude::*;

/// Partial transpose on the second factor by direct index shuffle.
fn pt_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (ia, ib) = (r / db, r % db);
        let (ja, jb) = (c / db, c % db);
        m[(ia * db + jb, ja * db + ib)]
    })
}

/// `Tr(X^n)` for `n = 1..=n_max` by repeated multiplication.
fn power_traces(x: &CMatrix, n_max: usize) -> Vec<f64> {
    let mut p = x.clone();
    let mut out = vec![p.trace().re];
    for _ in 1..n_max {
        p = &p * x;
        out.push(p.trace().re);
    }
    out
}

fn mixed(da: usize, db: usize, seed: u64, p: f64) -> DensityMatrix {
    let n = da * db;
    let g = random_density(da, db, seed);
    let raw = &g.matrix().scale_real(p) + &CMatrix::identity(n).scale_real((1.0 - p) / n as f64);
    DensityMatrix::validate(raw, da, db).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 3)), Just((2, 4))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_brute_force((da, db) in dims(), seed in any::<u64>(), useed in any::<u64>()) {
        let rho = random_density(da, db, seed);
        let u = haar_random(da * db, useed);
        let s = PositiveMapSpec::transpose(db).normalized_output(&rho, &u).unwrap();
        let m = moments(&s, 5);

        let rotated = rho.matrix().conjugate_by(u.matrix());
        let out = pt_b(&rotated, da, db);
        let tr = out.trace().re;
        let t = power_traces(&out.scale_real(1.0 / tr), 5);
        for n in 1..=5 {
            prop_assert!((m.get(n).unwrap() - t[n - 1]).abs() < 1e-12);
        }
        let margin = thm1_test(&m).unwrap().margin;
        prop_assert!((margin - (t[1] * t[1] - t[2])).abs() < 1e-12);
        // det [[s1, s2, s3], [s2, s3, s4], [s3, s4, s5]] by cofactors
        let (a, b, c, d, e) = (t[0], t[1], t[2], t[3], t[4]);
        let want = a * (c * e - d * d) - b * (b * e - c * d) + c * (b * d - c * c);
        let det = hankel(2, &m).unwrap().determinant();
        prop_assert!((det - want).abs() < 1e-12);
        prop_assert!((hankel(1, &m).unwrap().determinant() - (a * c - b * b)).abs() < 1e-12);
    }

    #[test]
    fn psd_operators_obey_holder_and_hankel(n in 2usize..10, seed in any::<u64>()) {
        let rho = random_density(n, 1, seed);
        let m = operator_moments(rho.matrix(), 5).unwrap();
        prop_assert!(thm1_test(&m).unwrap().margin <= 1e-12);
        for order in [1, 2] {
            prop_assert!(hankel(order, &m).unwrap().min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn trace_and_frobenius_norms_chain(n in 2usize..8, seed in any::<u64>()) {
        let rho = random_density(n, 1, seed);
        let x = &rho.matrix().scale_real(2.0) - &CMatrix::identity(n).scale_real(1.0 / n as f64);
        let (n1, n2) = (trace_norm(&x).unwrap(), schatten_norm(&x, 2.0).unwrap());
        prop_assert!(n2 <= n1 * (1.0 + 1e-12));
        prop_assert!(n1 <= (n as f64).sqrt() * n2 * (1.0 + 1e-12));
        prop_assert!((n2 - x.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn moments_are_spectrum_invariant((da, db) in dims(), seed in any::<u64>(), u1 in any::<u64>(), v in any::<u64>()) {
        // Conjugating the output by a further unitary leaves every moment fixed.
        let rho = random_density(da, db, seed);
        let s = PositiveMapSpec::transpose(db).normalized_output(&rho, &haar_random(da * db, u1)).unwrap();
        let w = haar_random(da * db, v);
        let a = operator_moments(&s.operator, 5).unwrap();
        let b = operator_moments(&s.operator.conjugate_by(w.matrix()), 5).unwrap();
        for n in 1..=5 {
            prop_assert!((a.get(n).unwrap() - b.get(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_certified_states_are_never_flagged(db in 2usize..4, seed in any::<u64>(), p in 0.0f64..0.4, useed in any::<u64>()) {
        let rho = mixed(2, db, seed, p);
        prop_assume!(eigenvalue_oracle_2xd(&rho).unwrap().absolutely_separable);
        let u = haar_random(2 * db, useed);
        for map in [PositiveMapSpec::transpose(db), PositiveMapSpec::reduction(db)] {
            let Ok(s) = map.normalized_output(&rho, &u) else { continue };
            let m = moments(&s, 5);
            prop_assert!(!thm1_test(&m).unwrap().violated);
            for order in [1, 2] {
                prop_assert!(!HankelOutcome::from_moments(order, &m).unwrap().violated);
            }
            // The oracle's AS region is exactly where every rotated PT stays PSD.
            prop_assert!(s.min_eig >= -1e-12);
        }
    }

    #[test]
    fn discrimination_distance_identity(d in 2usize..4, seed in any::<u64>(), useed in any::<u64>()) {
        let disc = Discrimination::new(&PositiveMapSpec::transpose(d), None).unwrap();
        let rho = random_density(d, d, seed);
        let r = disc.advantage_test(&rho, &haar_random(d * d, useed)).unwrap();
        prop_assert!(r.identity_residual < 1e-10);
        prop_assert!((r.distance - r.identity_value).abs() < 1e-10);
        prop_assert!(r.distance >= r.baseline - 1e-10);
        prop_assert_eq!(r.advantage > 1e-9, r.tp_min_eigenvalue < -1e-9);
    }

    #[test]
    fn absolutely_separable_probes_sit_at_baseline(seed in any::<u64>(), p in 0.0f64..0.2, useed in any::<u64>()) {
        let disc = Discrimination::new(&PositiveMapSpec::transpose(2), None).unwrap();
        let rho = mixed(2, 2, seed, p);
        prop_assert!(eigenvalue_oracle_2xd(&rho).unwrap().absolutely_separable);
        let r = disc.advantage_test(&rho, &haar_random(4, useed)).unwrap();
        prop_assert!((r.distance - 2.0 * r.k).abs() < 1e-10);
    }

    #[test]
    fn depolarizing_is_cptp(d in 2usize..4, p in 0.0f64..=1.0) {
        let ch = depolarizing(d, p).unwrap();
        let (tp, psd) = ch.cptp_residuals().unwrap();
        prop_assert!(tp < 1e-12);
        prop_assert!(psd >= -1e-12);
        // p ρ + (1-p) I/D on a random state
        let rho = random_density(d, d, 5);
        let n = d * d;
        let want = &rho.matrix().scale_real(p) + &CMatrix::identity(n).scale_real((1.0 - p) / n as f64);
        prop_assert!(ch.apply_matrix(rho.matrix()).unwrap().max_abs_diff(&want) < 1e-12);
    }
}
