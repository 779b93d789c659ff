mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use zxtk::diagram::cpm_construct;
use zxtk::fixtures;
use zxtk::interp::apply;
use zxtk::machine::{
    check_simulation, cpm_map, extract_matrix, extract_matrix_general, g_extract_superoperator,
    g_normalize, normalize, output_ket, run_multi_token, run_single_token, state_digest, RunConfig,
    Scheduler, State, Token,
};
use zxtk::verify::{random_diagram, random_ground_seed, random_seed, unbalanced_seed, GenConfig};
use zxtk::{interp, interp_cpm, Angle, Diagram, Dir, EdgeId, Error, Ket};

const TOL: f64 = 1e-9;

fn random_ket(rng: &mut impl Rng, n: usize) -> Ket {
    let v = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ket::from_vec(v).unwrap()
}

#[test]
fn cnot_on_every_basis_input() {
    let d = fixtures::cnot();
    let m = interp(&d).unwrap();
    for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        let s = run_multi_token(&d, &Ket::basis(&bits)).unwrap();
        assert_eq!(s.len(), 1);
        let (key, c) = s.nth(0).unwrap();
        assert!((c - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        let out = [bits[0], bits[0] ^ bits[1]];
        let want: Vec<_> = d
            .outputs()
            .iter()
            .zip(out)
            .map(|(&b, x)| Token::down(b, x))
            .collect();
        assert_eq!(key, &want);
        let ket = output_ket(&d, &s).unwrap();
        assert!(ket.max_deviation(&apply(&m, &Ket::basis(&bits)).unwrap()) < TOL);
    }
}

#[test]
fn multi_token_input_matches_the_matrix() {
    let cfg = GenConfig::default().with_seed(11);
    let mut rng = common::rng(20, 0);
    let mut checked = 0;
    for trial in 0..60 {
        let d = random_diagram(&cfg, trial);
        if d.num_inputs() == 0 {
            continue;
        }
        let input = random_ket(&mut rng, d.num_inputs());
        let s = run_multi_token(&d, &input).unwrap();
        let want = apply(&interp(&d).unwrap(), &input).unwrap();
        assert!(
            output_ket(&d, &s).unwrap().max_deviation(&want) < TOL,
            "trial {trial}"
        );
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn single_token_input_is_a_column() {
    let d = Diagram::z(1, 3, Angle::pi_ratio(1, 4));
    let m = interp(&d).unwrap();
    for x in 0..2u8 {
        let s = run_single_token(&d, 0, x).unwrap();
        let col = apply(&m, &Ket::basis(&[x])).unwrap();
        assert!(output_ket(&d, &s).unwrap().max_deviation(&col) < TOL);
    }
    assert_eq!(
        run_single_token(&d, 1, 0),
        Err(Error::SlotOutOfRange { index: 1, len: 1 })
    );
}

#[test]
fn extraction_from_every_edge() {
    let cfg = GenConfig::default().with_seed(12);
    for trial in 0..25 {
        let d = random_diagram(&cfg, trial);
        let m = interp(&d).unwrap();
        for e in d.edge_ids() {
            let got = extract_matrix(&d, e).unwrap();
            assert!(
                got.max_deviation(&m) < TOL,
                "trial {trial} edge {}",
                d.name(e)
            );
        }
    }
}

#[test]
fn disconnected_diagrams_go_component_by_component() {
    let d = Diagram::h()
        .tensor(&Diagram::z(0, 0, Angle::pi_ratio(1, 2)))
        .tensor(&fixtures::cnot());
    assert!(matches!(
        extract_matrix(&d, EdgeId(0)),
        Err(Error::NotConnected { .. })
    ));
    let got = extract_matrix_general(&d).unwrap();
    assert!(got.max_deviation(&interp(&d).unwrap()) < TOL);
}

#[test]
fn split_and_merge_spider_is_confluent() {
    let d = fixtures::spider_special();
    let a = d.edge_by_name("a").unwrap();
    let out = d.edge_by_name("d").unwrap();
    let seed = State::token(Token::down(a, 0));
    let want = State::token(Token::down(out, 0));
    for k in 0..20 {
        let cfg = RunConfig {
            track_visits: true,
            ..RunConfig::default()
        };
        let run = normalize(&d, &seed, &mut Scheduler::random(k), &cfg).unwrap();
        assert!(run.state.approx_eq(&want, 1e-12));
        assert_eq!(run.revisits, 0);
    }
}

#[test]
fn schedulers_are_reproducible() {
    let cfg = GenConfig::default().with_seed(13);
    let d = random_diagram(&cfg, 3);
    let seed = random_seed(&d, &mut common::rng(21, 3));
    let go = || {
        normalize(
            &d,
            &seed,
            &mut Scheduler::random(99),
            &RunConfig::recording(),
        )
        .unwrap()
        .trace
        .steps
        .iter()
        .map(|r| r.digest.clone())
        .collect::<Vec<_>>()
    };
    assert_eq!(go(), go());
}

#[test]
fn unbalanced_seeds_are_refused_then_diverge_when_forced() {
    let d = Diagram::z(0, 2, Angle::ZERO).then(&Diagram::cup()).unwrap();
    let seed = unbalanced_seed(&d, &mut common::rng(22, 0)).expect("the loop is a cycle");
    let r = normalize(
        &d,
        &seed,
        &mut Scheduler::Lexicographic,
        &RunConfig::default(),
    );
    assert_eq!(r.unwrap_err(), Error::NotCycleBalanced);
    let r = normalize(
        &d,
        &seed,
        &mut Scheduler::Lexicographic,
        &RunConfig::forced(Some(500)),
    );
    assert!(matches!(r, Err(Error::FuseTripped { .. })));
}

#[test]
fn ground_superoperator_matches_doubled_interpretation() {
    let cfg = GenConfig::ground().with_seed(14);
    for trial in 0..40 {
        let d = random_diagram(&cfg, trial);
        let want = interp_cpm(&d).unwrap();
        let e = EdgeId(trial as usize % d.edges().len());
        let got = g_extract_superoperator(&d, e).unwrap();
        assert!(got.max_deviation(&want) < TOL, "trial {trial}");
    }
}

#[test]
fn discarding_a_qubit_traces_it_out() {
    // Z(1,1,π/2) then ground: every density matrix goes to its trace
    let d = Diagram::z(1, 1, Angle::pi_ratio(1, 2))
        .then(&Diagram::ground())
        .unwrap();
    let m = g_extract_superoperator(&d, EdgeId(0)).unwrap();
    assert_eq!((m.rows(), m.cols()), (1, 4));
    let want = [1.0, 0.0, 0.0, 1.0];
    for (c, w) in want.iter().enumerate() {
        assert!((m.get(0, c) - Complex64::new(*w, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn cpm_map_commutes_with_normalization() {
    let cfg = GenConfig::ground().with_seed(15);
    for trial in 0..40 {
        let d = random_diagram(&cfg, trial);
        let mut rng = common::rng(23, trial);
        let seed = random_ground_seed(&d, &mut rng);
        let report = check_simulation(&d, &seed).unwrap();
        assert!(report.passed, "trial {trial}: {report:?}");
        let g = g_normalize(
            &d,
            &seed,
            &mut Scheduler::Lexicographic,
            &RunConfig::default(),
        )
        .unwrap();
        let doubled = cpm_construct(&d).unwrap();
        let p = normalize(
            &doubled,
            &cpm_map(&seed, &d),
            &mut Scheduler::Lexicographic,
            &RunConfig::default(),
        )
        .unwrap();
        assert!(
            cpm_map(&g.state, &d).approx_eq(&p.state, TOL),
            "trial {trial}"
        );
    }
}

#[test]
fn digests_ignore_insertion_order() {
    let a = Token::down(EdgeId(0), 1);
    let b = Token::new(EdgeId(1), Dir::Up, 0);
    let one = Complex64::new(1.0, 0.0);
    let s1 = State::from_terms([(vec![a], one), (vec![b, a], one)]);
    let s2 = State::from_terms([(vec![a, b], one), (vec![a], one)]);
    assert_eq!(state_digest(&s1), state_digest(&s2));
}
