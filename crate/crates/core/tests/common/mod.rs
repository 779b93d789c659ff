//! Case generators shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zxtk::machine::{
    g_normalize, normalize, GroundTokenState, RunConfig, Scheduler, Token, TokenState, Trace,
};
use zxtk::textio::{Atom, Expr};
use zxtk::verify::{random_diagram, random_ground_seed, random_seed, GenConfig};
use zxtk::{Angle, Diagram, Matrix};

pub fn rng(stream: u64, case: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0x5eed ^ stream);
    r.set_stream(case);
    r
}

pub fn random_angle(rng: &mut ChaCha8Rng) -> Angle {
    match rng.gen_range(0..4) {
        0 => Angle::ZERO,
        1 => Angle::pi_ratio(rng.gen_range(-7..=7), rng.gen_range(1..=8)),
        2 => Angle::radians(rng.gen_range(-10.0..10.0)),
        _ => Angle::radians(rng.gen::<f64>() * 1e-6),
    }
}

fn atom_with_inputs(rng: &mut ChaCha8Rng, k: usize) -> Atom {
    let outputs = rng.gen_range(0..=2);
    let angle = random_angle(rng);
    let spider = |red: bool| {
        if red {
            Atom::X {
                inputs: k,
                outputs,
                angle,
            }
        } else {
            Atom::Z {
                inputs: k,
                outputs,
                angle,
            }
        }
    };
    match k {
        0 => *[Atom::Cap, spider(false), spider(true)]
            .choose(rng)
            .unwrap(),
        1 => *[Atom::H, Atom::Id, Atom::Ground, spider(false), spider(true)]
            .choose(rng)
            .unwrap(),
        2 => *[Atom::Cup, Atom::Swap, spider(false), spider(true)]
            .choose(rng)
            .unwrap(),
        _ => spider(rng.gen()),
    }
}

/// A row of atoms, side by side, taking exactly `n` wires.
fn layer(rng: &mut ChaCha8Rng, n: usize) -> Expr {
    let mut parts = Vec::new();
    let mut left = n;
    loop {
        let k = if left == 0 {
            0
        } else {
            rng.gen_range(1..=left.min(3))
        };
        parts.push(Expr::Atom(atom_with_inputs(rng, k)));
        left -= k;
        if left == 0 {
            break;
        }
    }
    let mut it = parts.into_iter();
    let first = it.next().unwrap();
    it.fold(first, Expr::tensor)
}

/// An arity-consistent expression. Tensors nest freely; a sequence gets a
/// bottom half that takes exactly the wires the top half leaves.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        let k = rng.gen_range(0..=3);
        return Expr::Atom(atom_with_inputs(rng, k));
    }
    if rng.gen_bool(0.4) {
        Expr::tensor(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    } else {
        let top = random_expr(rng, depth - 1);
        let (_, m) = top.arity().expect("generated consistently");
        let bottom = if m <= 4 && rng.gen_bool(0.5) {
            layer(rng, m)
        } else {
            let mut b = layer(rng, m);
            let (_, m2) = b.arity().unwrap();
            if m2 > 0 {
                b = Expr::seq(b, layer(rng, m2));
            }
            b
        };
        Expr::seq(top, bottom)
    }
}

/// Random diagrams, pure and ground alternating, some with angles in radians.
pub fn random_case_diagram(case: u64) -> Diagram {
    let mut r = rng(1, case);
    let mut cfg = if case.is_multiple_of(2) {
        GenConfig::default()
    } else {
        GenConfig::ground()
    }
    .with_seed(case / 2);
    if r.gen_bool(0.5) {
        cfg.angle_pool = (0..3).map(|_| random_angle(&mut r)).collect();
    }
    random_diagram(&cfg, case)
}

pub fn pure_state_case(case: u64) -> (Diagram, TokenState) {
    let cfg = GenConfig::default().with_seed(7);
    let d = random_diagram(&cfg, case);
    let mut r = rng(2, case);
    let seed = random_seed(&d, &mut r);
    let run = normalize(
        &d,
        &seed,
        &mut Scheduler::random(r.gen()),
        &RunConfig::default(),
    )
    .expect("random seeds terminate");
    (d, run.state)
}

pub fn ground_state_case(case: u64) -> (Diagram, GroundTokenState) {
    let cfg = GenConfig::ground().with_seed(8);
    let d = random_diagram(&cfg, case);
    let mut r = rng(3, case);
    let seed = random_ground_seed(&d, &mut r);
    let run = g_normalize(
        &d,
        &seed,
        &mut Scheduler::random(r.gen()),
        &RunConfig::default(),
    )
    .expect("random seeds terminate");
    (d, run.state)
}

pub fn pure_trace_case(case: u64) -> (Diagram, TokenState, Trace<Token>) {
    let cfg = GenConfig::default().with_seed(9);
    let d = random_diagram(&cfg, case);
    let mut r = rng(4, case);
    let seed = random_seed(&d, &mut r);
    let run = normalize(
        &d,
        &seed,
        &mut Scheduler::random(r.gen()),
        &RunConfig::recording(),
    )
    .expect("random seeds terminate");
    (d, seed, run.trace)
}

/// Arbitrary finite entries, including subnormals and large exponents.
pub fn random_matrix(case: u64) -> Matrix {
    let mut r = rng(5, case);
    let rows = 1 << r.gen_range(0..=3);
    let cols = 1 << r.gen_range(0..=3);
    let entry = |r: &mut ChaCha8Rng| match r.gen_range(0..5) {
        0 => 0.0,
        1 => f64::from_bits(r.gen_range(1..1u64 << 52)),
        2 => r.gen_range(-1.0..1.0) * 1e300,
        _ => r.gen_range(-1.0..1.0),
    };
    Matrix::from_fn(rows, cols, |_, _| {
        Complex64::new(entry(&mut r), entry(&mut r))
    })
}
