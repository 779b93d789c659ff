//! Seeded random diagrams.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::diagram::{connect_components, Diagram, EdgeId, Generator, GeneratorKind};

/// Rejection attempts before falling back to the connecting gadget.
const CONNECT_ATTEMPTS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_generators: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Cap on inputs plus outputs of a random spider before balancing.
    pub max_spider_arity: usize,
    pub angle_pool: Vec<Angle>,
    pub allow_hadamard: bool,
    pub allow_ground: bool,
    pub min_grounds: usize,
    pub max_grounds: usize,
    pub require_connected: bool,
    pub require_acyclic: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_generators: 8,
            max_inputs: 3,
            max_outputs: 3,
            max_spider_arity: 4,
            angle_pool: vec![
                Angle::ZERO,
                Angle::pi_ratio(1, 4),
                Angle::pi_ratio(1, 2),
                Angle::pi_ratio(1, 1),
            ],
            allow_hadamard: true,
            allow_ground: false,
            min_grounds: 0,
            max_grounds: 0,
            require_connected: true,
            require_acyclic: false,
        }
    }
}

impl GenConfig {
    /// Diagrams with one or two grounds and at most six generators.
    pub fn ground() -> Self {
        GenConfig {
            max_generators: 6,
            allow_ground: true,
            min_grounds: 1,
            max_grounds: 2,
            ..GenConfig::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The generator for one trial: seeded by the config seed, one stream
    /// per trial index.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

fn random_kind(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> (GeneratorKind, usize, usize) {
    let angle = *cfg.angle_pool.choose(rng).unwrap_or(&Angle::ZERO);
    match rng.gen_range(0..12) {
        0..=6 => {
            let total = rng.gen_range(1..=cfg.max_spider_arity.max(1));
            let n = rng.gen_range(0..=total);
            (GeneratorKind::Z(angle), n, total - n)
        }
        7..=9 if cfg.allow_hadamard => (GeneratorKind::H, 1, 1),
        7..=9 => (GeneratorKind::Z(angle), 1, 1),
        10 => (GeneratorKind::Cup, 2, 0),
        _ => (GeneratorKind::Cap, 0, 2),
    }
}

/// One attempt: random generators, balanced port counts, a random matching of
/// top ends to bottom ends.
fn attempt(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Diagram {
    let n = rng.gen_range(0..=cfg.max_inputs);
    let mut m = rng.gen_range(0..=cfg.max_outputs);
    let grounds = if cfg.allow_ground {
        rng.gen_range(cfg.min_grounds..=cfg.max_grounds.max(cfg.min_grounds))
    } else {
        0
    };
    // grounds always come with at least one other generator
    let lo = if grounds > 0 { grounds + 1 } else { 0 };
    let g = rng.gen_range(lo..=cfg.max_generators.max(lo));
    let mut gens: Vec<(GeneratorKind, usize, usize)> =
        (0..g - grounds).map(|_| random_kind(cfg, rng)).collect();
    if !gens.is_empty() && !gens.iter().any(|x| matches!(x.0, GeneratorKind::Z(_))) {
        let i = rng.gen_range(0..gens.len());
        let angle = *cfg.angle_pool.choose(rng).unwrap_or(&Angle::ZERO);
        gens[i].0 = GeneratorKind::Z(angle);
    }
    gens.extend((0..grounds).map(|_| (GeneratorKind::Ground, 1, 0)));
    gens.shuffle(rng);

    let tops = |gens: &[(GeneratorKind, usize, usize)], n: usize| {
        n + gens.iter().map(|x| x.2).sum::<usize>()
    };
    let bottoms = |gens: &[(GeneratorKind, usize, usize)], m: usize| {
        m + gens.iter().map(|x| x.1).sum::<usize>()
    };
    if gens.is_empty() {
        m = n;
    } else {
        let spiders: Vec<usize> = (0..gens.len())
            .filter(|&i| matches!(gens[i].0, GeneratorKind::Z(_)))
            .collect();
        loop {
            let (t, b) = (tops(&gens, n), bottoms(&gens, m));
            if t == b {
                break;
            }
            let i = *spiders.choose(rng).expect("at least one spider");
            if t > b {
                gens[i].1 += 1;
            } else {
                gens[i].2 += 1;
            }
        }
    }

    // top ends: input slots, then generator outputs; bottom ends likewise
    let edges = tops(&gens, n);
    let mut order: Vec<usize> = (0..edges).collect();
    order.shuffle(rng);
    let mut next_top = 0;
    let mut take_top = || {
        next_top += 1;
        EdgeId(next_top - 1)
    };
    let inputs: Vec<EdgeId> = (0..n).map(|_| take_top()).collect();
    let mut generators: Vec<Generator> = gens
        .iter()
        .map(|&(kind, _, outs)| Generator {
            kind,
            inputs: vec![],
            outputs: (0..outs).map(|_| take_top()).collect(),
        })
        .collect();
    let mut bottom = order.into_iter().map(EdgeId);
    for (gen, &(_, ins, _)) in generators.iter_mut().zip(&gens) {
        gen.inputs = (0..ins).map(|_| bottom.next().expect("balanced")).collect();
    }
    let outputs: Vec<EdgeId> = (0..m).map(|_| bottom.next().expect("balanced")).collect();
    let names = (0..edges).map(|i| format!("x{i}")).collect();
    let mut d = Diagram::from_parts(names, generators, inputs, outputs)
        .expect("generated diagram is valid");
    d.relabel_standard();
    d
}

/// A random diagram for trial `trial` of `cfg`. The same pair always gives
/// the same diagram. Connected diagrams are found by rejection; if that keeps
/// failing the components are joined by [`connect_components`].
pub fn random_diagram(cfg: &GenConfig, trial: u64) -> Diagram {
    let mut rng = cfg.rng(trial);
    random_diagram_with(cfg, &mut rng)
}

pub fn random_diagram_with(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Diagram {
    let mut last = None;
    for _ in 0..CONNECT_ATTEMPTS {
        let d = attempt(cfg, rng);
        let connected_ok = !cfg.require_connected || (d.is_connected() && !d.edges().is_empty());
        let acyclic_ok = !cfg.require_acyclic || d.cycle_basis().is_empty();
        if connected_ok && acyclic_ok {
            return d;
        }
        if acyclic_ok {
            last = Some(d);
        }
    }
    let d = last.unwrap_or_else(Diagram::identity_wire);
    if cfg.require_connected && !d.is_connected() {
        let mut c = connect_components(&d).expect("connecting a valid diagram");
        c.relabel_standard();
        return c;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::diagram_to_json;

    #[test]
    fn deterministic() {
        let cfg = GenConfig::default().with_seed(42);
        for t in 0..20 {
            assert_eq!(
                diagram_to_json(&random_diagram(&cfg, t)).unwrap(),
                diagram_to_json(&random_diagram(&cfg, t)).unwrap()
            );
        }
    }

    #[test]
    fn bounds_hold() {
        let cfg = GenConfig::default().with_seed(7);
        for t in 0..200 {
            let d = random_diagram(&cfg, t);
            assert!(d.is_connected());
            assert!(!d.edges().is_empty());
            assert!(d.num_inputs() <= 3 && d.num_outputs() <= 3);
            assert!(d.generators().len() <= 8, "{}", d.generators().len());
            assert!(!d.has_ground());
        }
        let g = GenConfig::ground().with_seed(7);
        for t in 0..200 {
            let d = random_diagram(&g, t);
            let grounds = d.count_kind(|k| *k == GeneratorKind::Ground);
            assert!((1..=2).contains(&grounds));
            assert!(d.generators().len() <= 6);
        }
    }

    #[test]
    fn wiring_only() {
        let cfg = GenConfig {
            max_generators: 0,
            require_connected: false,
            ..GenConfig::default()
        };
        for t in 0..20 {
            let d = random_diagram(&cfg, t);
            assert!(d.generators().is_empty());
            assert_eq!(d.num_inputs(), d.num_outputs());
        }
    }
}
