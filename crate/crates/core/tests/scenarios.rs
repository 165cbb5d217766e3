//! Worked examples and end-to-end behaviour of the detection, channel and
//! discrimination layers.

use absep_core::channels::{depolarizing, threshold_scan, Family};
use absep_core::detection::{
    detect, eigenvalue_oracle_2xd, hankel, moments, thm1_test, DetectionOptions, Question, UnitaryChoice, Verdict,
};
use absep_core::discrimination::Discrimination;
use absep_core::maps::PositiveMapSpec;
use absep_core::states::{example_state, schmidt_state, DensityMatrix, ExampleState};
use absep_core::unitaries::{
    example_unitary, haar_random, search_violating_unitary, u2_as_printed, ExampleUnitary, GlobalUnitary, Objective,
    SearchConfig,
};
use absep_core::{CMatrix, Error};

fn fixed(u: ExampleUnitary) -> UnitaryChoice {
    UnitaryChoice::Fixed(example_unitary(u).unwrap())
}

#[test]
fn first_example_is_certified() {
    let rho = example_state(ExampleState::Rho1).unwrap();
    let opts = DetectionOptions::default();
    let r = detect("rho1", &rho, &PositiveMapSpec::transpose(2), &fixed(ExampleUnitary::U1), Question::AbsoluteSeparability, &opts)
        .unwrap();
    assert_eq!(r.verdict, Verdict::NotAbsolutelySeparable);
    assert!(r.thm1.margin.abs() < 1e-12);
    assert!(r.hankel.iter().any(|h| h.m == 2 && h.violated));
    assert!(!r.oracle.unwrap().absolutely_separable);
}

#[test]
fn second_example_margin() {
    let rho = example_state(ExampleState::Rho2).unwrap();
    let s = PositiveMapSpec::transpose(4).normalized_output(&rho, &example_unitary(ExampleUnitary::U2).unwrap()).unwrap();
    let m = thm1_test(&moments(&s, 3)).unwrap();
    assert!(m.violated);
    assert!((m.margin - 0.09375).abs() < 1e-10);
}

#[test]
fn printed_second_unitary_needs_repair() {
    assert!(u2_as_printed().unitarity_residual() > 1e-3);
    let u = example_unitary(ExampleUnitary::U2).unwrap();
    assert!(u.matrix().unitarity_residual() < 1e-12);
}

#[test]
fn isotropic_example_flips_sign() {
    let u = example_unitary(ExampleUnitary::U3).unwrap();
    let det = |p: f64| {
        let s = PositiveMapSpec::transpose(3).normalized_output(&example_state(ExampleState::Rho3 { p }).unwrap(), &u).unwrap();
        hankel(2, &moments(&s, 5)).unwrap().determinant()
    };
    assert!(det(0.19) >= -1e-15);
    assert!(det(0.22) < 0.0);
}

#[test]
fn bound_entangled_family_is_ppt_unrotated() {
    let rho = example_state(ExampleState::Rho4 { p: 1.0, b: 1.5 }).unwrap();
    let s = PositiveMapSpec::transpose(3).normalized_output(&rho, &GlobalUnitary::identity(9)).unwrap();
    assert!(s.min_eig >= -1e-12);
}

#[test]
fn maximally_mixed_state_is_never_flagged() {
    let rho = DensityMatrix::maximally_mixed(2, 2);
    let cfg = SearchConfig { budget: 300, restarts: 4, ..Default::default() };
    let r = search_violating_unitary(&rho, &PositiveMapSpec::transpose(2), &cfg).unwrap();
    assert!(r.best_score <= 1e-12);
    let report = detect(
        "maxmix",
        &rho,
        &PositiveMapSpec::transpose(2),
        &UnitaryChoice::Search(cfg),
        Question::AbsoluteSeparability,
        &DetectionOptions::default(),
    )
    .unwrap();
    assert!(!report.verdict.is_detection() || report.verdict == Verdict::AbsolutelyPptSufficient);
}

#[test]
fn search_is_deterministic() {
    let rho = schmidt_state(&[0.7, 0.3]).unwrap();
    let cfg = SearchConfig { budget: 400, restarts: 3, seed: 9, ..Default::default() };
    let map = PositiveMapSpec::transpose(2);
    let a = search_violating_unitary(&rho, &map, &cfg).unwrap();
    let b = search_violating_unitary(&rho, &map, &cfg).unwrap();
    assert_eq!(a.best_score.to_bits(), b.best_score.to_bits());
    assert_eq!(a.best_unitary.matrix(), b.best_unitary.matrix());
    assert_eq!(a.best_restart, b.best_restart);
}

#[test]
fn search_finds_entangled_pure_state() {
    let rho = schmidt_state(&[0.5, 0.5]).unwrap();
    let cfg = SearchConfig { objective: Objective::ThmOne, budget: 500, restarts: 4, ..Default::default() };
    let r = search_violating_unitary(&rho, &PositiveMapSpec::transpose(2), &cfg).unwrap();
    assert!(r.best_score > 1e-9);
}

#[test]
fn ppt_question_needs_decomposable_map() {
    let rho = DensityMatrix::maximally_mixed(3, 3);
    let custom = PositiveMapSpec::custom(PositiveMapSpec::reduction(3).action().clone(), false).unwrap();
    let err = detect(
        "x",
        &rho,
        &custom,
        &UnitaryChoice::Fixed(GlobalUnitary::identity(9)),
        Question::AbsolutePpt,
        &DetectionOptions::default(),
    );
    assert!(matches!(err, Err(Error::NotDecomposable)));
}

#[test]
fn channel_below_threshold_passes_every_pure_probe() {
    // Haar pure inputs through channels just below their thresholds.
    for (d, p) in [(2usize, 0.32), (3, 0.24)] {
        let n = d * d;
        let ch = depolarizing(d, p).unwrap();
        let map = PositiveMapSpec::transpose(d);
        for seed in 0..250u64 {
            let psi = haar_random(n, 77_000 + seed).matrix().column(0);
            let out = ch.apply_matrix(&CMatrix::outer(&psi)).unwrap();
            let q = map.normalize_operator(&out, d).unwrap();
            let margin = thm1_test(&moments(&q, 3)).unwrap().margin;
            assert!(margin <= 1e-9, "d={d} seed={seed} margin={margin}");
        }
    }
}

#[test]
fn depolarizing_thresholds() {
    let t2 = threshold_scan(Family::Dep2, &PositiveMapSpec::transpose(2), 1e-6).unwrap();
    assert!((t2.p_star - 1.0 / 3.0).abs() < 1e-5);
    let t3 = threshold_scan(Family::Dep3, &PositiveMapSpec::transpose(3), 1e-6).unwrap();
    assert!((t3.p_star - 0.25).abs() < 1e-5);
}

#[test]
fn depolarized_bell_state_matches_oracle() {
    // p |Φ><Φ| + (1-p) I/4 is absolutely separable iff p <= 1/3.
    for (p, want) in [(0.3, true), (0.36, false)] {
        let out = depolarizing(2, p).unwrap().apply(&schmidt_state(&[0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(eigenvalue_oracle_2xd(&out).unwrap().absolutely_separable, want);
    }
}

#[test]
fn bell_state_gives_full_discrimination() {
    let disc = Discrimination::new(&PositiveMapSpec::transpose(2), None).unwrap();
    let bell = schmidt_state(&[0.5, 0.5]).unwrap();
    let r = disc.advantage_test(&bell, &GlobalUnitary::identity(4)).unwrap();
    assert!((r.distance - 3.0 * r.k).abs() < 1e-10);
    assert!(r.advantage > 0.0);
    assert!(r.tp_min_eigenvalue < 0.0);
    assert!(disc.faithfulness_residual().unwrap() < 1e-12);
}
