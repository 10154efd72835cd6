//! Fixture models shared by the benchmarks.

use ccmu::{ActionAlphabet, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn alphabet() -> ActionAlphabet {
    ActionAlphabet::new(["a", "b"]).expect("valid alphabet")
}

/// `n` states in a ring over `a`, with `b` shortcuts every third state and
/// `p` on every fourth.
pub fn ring(n: usize) -> Model {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut m = Model::new(alphabet(), names.iter().cloned()).expect("distinct names");
    for i in 0..n {
        m.add_transition(&names[i], "a", &names[(i + 1) % n]).expect("known");
        if i % 3 == 0 {
            m.add_transition(&names[i], "b", &names[(i + n / 2) % n]).expect("known");
        }
    }
    m.set_atom("p", names.iter().step_by(4).map(String::as_str)).expect("known");
    m
}

/// A seeded random model with about two successors per state and action.
pub fn random(n: usize, seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut m = Model::new(alphabet(), names.iter().cloned()).expect("distinct names");
    let density = (2.0 / n as f64).min(1.0);
    for a in ["a", "b"] {
        for s in &names {
            for t in &names {
                if rng.gen_bool(density) {
                    m.add_transition(s, a, t).expect("known");
                }
            }
        }
    }
    let holds: Vec<&str> = names.iter().filter(|_| rng.gen_bool(0.5)).map(String::as_str).collect();
    m.set_atom("p", holds).expect("known");
    m
}
