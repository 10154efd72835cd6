//! Reference implementations that share no code with the algorithms they
//! check: a fixpoint semantics by explicit enumeration of state subsets,
//! bisimilarity by signature-based partition refinement, and the simulation
//! preorder by naive deletion.

use ccmu::search::RawModel;
use ccmu::{Formula, Model, QuantifierSignature};
use std::collections::{BTreeSet, HashMap};

/// A model of at most 64 states as bit masks, over a fixed atom list.
#[derive(Debug, Clone)]
pub struct Masks {
    pub n: usize,
    actions: Vec<String>,
    /// `succ[a][s]`
    succ: Vec<Vec<u64>>,
    atoms: Vec<String>,
    /// `val[x]`: where atom `x` holds.
    val: Vec<u64>,
    /// Bit `x` of `labels[s]`: atom `x` holds at `s`.
    labels: Vec<u64>,
}

impl Masks {
    /// The atoms of `m` outside `atoms` are dropped; atoms it lacks are
    /// false everywhere.
    pub fn from_model(m: &Model, atoms: &[String]) -> Masks {
        let n = m.len();
        assert!(n <= 64, "mask oracle handles at most 64 states");
        let actions = m.alphabet().actions().to_vec();
        let succ = (0..actions.len())
            .map(|a| {
                (0..n)
                    .map(|s| m.successors(a, s).iter().fold(0u64, |acc, t| acc | 1 << t))
                    .collect()
            })
            .collect();
        let val = atoms
            .iter()
            .map(|x| m.atom_set(x).map_or(0, |set| set.iter().fold(0u64, |acc, s| acc | 1 << s)))
            .collect();
        Masks::assemble(n, actions, succ, atoms.to_vec(), val)
    }

    /// A packed enumeration model; `atoms` names its atom indices.
    pub fn from_raw(raw: &RawModel, actions: &[String], atoms: &[String]) -> Masks {
        let k = raw.k;
        let succ = (0..actions.len())
            .map(|a| (0..k).map(|s| raw.successor_mask(a, s)).collect())
            .collect();
        let val = (0..atoms.len()).map(|x| raw.atom_mask(x)).collect();
        Masks::assemble(k, actions.to_vec(), succ, atoms.to_vec(), val)
    }

    fn assemble(n: usize, actions: Vec<String>, succ: Vec<Vec<u64>>, atoms: Vec<String>, val: Vec<u64>) -> Masks {
        assert!(atoms.len() <= 64);
        let labels = (0..n)
            .map(|s| {
                val.iter()
                    .enumerate()
                    .fold(0u64, |acc, (x, v)| acc | (v >> s & 1) << x)
            })
            .collect();
        Masks {
            n,
            actions,
            succ,
            atoms,
            val,
            labels,
        }
    }

    /// Atoms holding at `s`, as a bit mask over the atom list.
    pub fn label(&self, s: usize) -> u64 {
        self.labels[s]
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn successors(&self, b: &str, s: usize) -> u64 {
        match self.actions.iter().position(|x| x == b) {
            Some(a) => self.succ[a][s],
            None => 0,
        }
    }
}

/// The actions under the forth and the back clause of a signature, as
/// indices into an action list.
#[derive(Debug, Clone)]
pub struct Clauses {
    forth: Vec<usize>,
    back: Vec<usize>,
}

impl Clauses {
    pub fn new(actions: &[String], sig: &QuantifierSignature) -> Clauses {
        Clauses {
            forth: (0..actions.len()).filter(|&a| !sig.contra.contains(&actions[a])).collect(),
            back: (0..actions.len()).filter(|&a| !sig.cov.contains(&actions[a])).collect(),
        }
    }
}

/// Rows of the largest `sig`-refinement between two mask models over the
/// same actions and atoms: bit `v` of `rows[u]` relates `u` in `m` to `v`
/// in `n`. Related states carry the same atoms (no atom is exempt). Pairs
/// failing a clause are deleted in full sweeps until a sweep deletes
/// nothing.
pub fn refinement_rows(m: &Masks, n: &Masks, sig: &QuantifierSignature) -> Vec<u64> {
    assert_eq!(m.actions, n.actions, "different actions");
    let mut rows = vec![0; m.n];
    refinement_rows_into(m, n, &Clauses::new(&m.actions, sig), &mut rows);
    rows
}

/// [`refinement_rows`] writing into `rows` (of length `m.n`), for hot
/// loops that reuse the clause split.
pub fn refinement_rows_into(m: &Masks, n: &Masks, c: &Clauses, rows: &mut [u64]) {
    debug_assert_eq!(m.atoms, n.atoms, "different atom lists");
    for (u, row) in rows.iter_mut().enumerate() {
        *row = (0..n.n).filter(|&v| n.labels[v] == m.labels[u]).fold(0, |acc, v| acc | 1 << v);
    }
    loop {
        let mut changed = false;
        for u in 0..m.n {
            let mut live = rows[u];
            while live != 0 {
                let v = live.trailing_zeros() as usize;
                live &= live - 1;
                let forth_ok = c.forth.iter().all(|&a| {
                    let targets = n.succ[a][v];
                    let mut us = m.succ[a][u];
                    while us != 0 {
                        let u2 = us.trailing_zeros() as usize;
                        us &= us - 1;
                        if rows[u2] & targets == 0 {
                            return false;
                        }
                    }
                    true
                });
                let ok = forth_ok
                    && c.back.iter().all(|&a| {
                        let mut allowed = 0;
                        let mut us = m.succ[a][u];
                        while us != 0 {
                            let u2 = us.trailing_zeros() as usize;
                            us &= us - 1;
                            allowed |= rows[u2];
                        }
                        n.succ[a][v] & !allowed == 0
                    });
                if !ok {
                    rows[u] &= !(1 << v);
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// Decides a closed quantified subformula (`E` or `A`) at a state.
pub type QuantifierOracle<'a> = dyn FnMut(&Formula, usize) -> bool + 'a;

/// Extension of `f` as a mask. Least fixpoints are the intersection of all
/// pre-fixpoints and greatest fixpoints the union of all post-fixpoints,
/// each found by trying every subset of states. Undeclared atoms are false.
///
/// Quantified subformulas must be closed; they are settled by `quant`.
pub fn subset_extension(m: &Masks, f: &Formula, quant: &mut QuantifierOracle<'_>) -> u64 {
    let mut env = Vec::new();
    eval(m, f, &mut env, quant)
}

/// [`subset_extension`] for quantifier-free formulas.
pub fn subset_extension_k(m: &Masks, f: &Formula) -> u64 {
    subset_extension(m, f, &mut |g, _| panic!("unexpected quantifier {g}"))
}

fn eval(m: &Masks, f: &Formula, env: &mut Vec<(String, u64)>, quant: &mut QuantifierOracle<'_>) -> u64 {
    let full = m.full();
    let pre = |m: &Masks, b: &str, x: u64, universal: bool| -> u64 {
        (0..m.n)
            .filter(|&s| {
                let succ = m.successors(b, s);
                if universal {
                    succ & !x == 0
                } else {
                    succ & x != 0
                }
            })
            .fold(0, |acc, s| acc | 1 << s)
    };
    match f {
        Formula::Top => full,
        Formula::Bot => 0,
        Formula::Atom(x) => match env.iter().rev().find(|(q, _)| q == x) {
            Some((_, v)) => *v,
            None => m.atoms.iter().position(|y| y == x).map_or(0, |i| m.val[i]),
        },
        Formula::Neg(g) => !eval(m, g, env, quant) & full,
        Formula::And(l, r) => eval(m, l, env, quant) & eval(m, r, env, quant),
        Formula::Or(l, r) => eval(m, l, env, quant) | eval(m, r, env, quant),
        Formula::Boxed(b, g) => {
            let x = eval(m, g, env, quant);
            pre(m, b, x, true)
        }
        Formula::Diamond(b, g) => {
            let x = eval(m, g, env, quant);
            pre(m, b, x, false)
        }
        Formula::Cover(b, members) => {
            let xs: Vec<u64> = members.iter().map(|g| eval(m, g, env, quant)).collect();
            let any = xs.iter().fold(0, |acc, x| acc | x);
            let mut out = pre(m, b, any, true);
            for x in xs {
                out &= pre(m, b, x, false);
            }
            out
        }
        Formula::Mu(q, g) | Formula::Nu(q, g) => {
            let least = matches!(f, Formula::Mu(..));
            let mut out = if least { full } else { 0 };
            for t in 0..=full {
                env.push((q.clone(), t));
                let x = eval(m, g, env, quant);
                env.pop();
                if least && x & !t == 0 {
                    out &= t;
                } else if !least && t & !x == 0 {
                    out |= t;
                }
            }
            out
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            assert!(
                env.iter().all(|(q, _)| !f.occurs_free(q)),
                "quantified subformula {f} is not closed"
            );
            (0..m.n).filter(|&s| quant(f, s)).fold(0, |acc, s| acc | 1 << s)
        }
    }
}

/// A model as adjacency lists, for the relational oracles.
struct Graph {
    /// `succ[s][a]`
    succ: Vec<Vec<Vec<usize>>>,
    labels: Vec<BTreeSet<String>>,
}

impl Graph {
    fn of(models: &[&Model]) -> Graph {
        let actions = models[0].alphabet().actions().to_vec();
        let mut succ = Vec::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        for m in models {
            assert_eq!(m.alphabet().actions(), &actions[..], "alphabets differ");
            for s in 0..m.len() {
                succ.push(
                    (0..actions.len())
                        .map(|a| m.successors(a, s).iter().map(|t| t + offset).collect())
                        .collect(),
                );
                labels.push(m.label(s));
            }
            offset += m.len();
        }
        Graph { succ, labels }
    }
}

/// Bisimulation classes of the states of `models` taken together (states
/// numbered model by model). Blocks start from equal labels and are split
/// by the set of (action, successor block) pairs until stable.
pub fn bisimulation_classes(models: &[&Model]) -> Vec<usize> {
    let g = Graph::of(models);
    let n = g.labels.len();
    let mut ids: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    let mut block: Vec<usize> = g
        .labels
        .iter()
        .map(|l| {
            let k = ids.len();
            *ids.entry(l).or_insert(k)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<BTreeSet<usize>>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let sig = (
                    block[s],
                    g.succ[s]
                        .iter()
                        .map(|ts| ts.iter().map(|&t| block[t]).collect())
                        .collect(),
                );
                let k = sigs.len();
                *sigs.entry(sig).or_insert(k)
            })
            .collect();
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

/// Pairs `(u, v)` with `u` a state of `m` and `v` of `n` that are bisimilar.
pub fn bisimilarity(m: &Model, n: &Model) -> BTreeSet<(usize, usize)> {
    let block = bisimulation_classes(&[m, n]);
    let mut out = BTreeSet::new();
    for u in 0..m.len() {
        for v in 0..n.len() {
            if block[u] == block[m.len() + v] {
                out.insert((u, v));
            }
        }
    }
    out
}

/// Pairs `(u, v)` such that `v` simulates `u`: equal labels, and every move
/// of `u` is matched by a move of `v` to a simulating state. Computed by
/// deleting failing pairs from the full relation until none fails.
pub fn simulation(m: &Model, n: &Model) -> BTreeSet<(usize, usize)> {
    let g = Graph::of(&[m, n]);
    let off = m.len();
    let mut rel = vec![vec![false; n.len()]; m.len()];
    for (u, row) in rel.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            *cell = g.labels[u] == g.labels[off + v];
        }
    }
    loop {
        let mut changed = false;
        for u in 0..m.len() {
            for v in 0..n.len() {
                if !rel[u][v] {
                    continue;
                }
                let ok = g.succ[u].iter().zip(&g.succ[off + v]).all(|(us, vs)| {
                    us.iter().all(|&u2| vs.iter().any(|&v2| rel[u2][v2 - off]))
                });
                if !ok {
                    rel[u][v] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for (u, row) in rel.iter().enumerate() {
        for (v, &cell) in row.iter().enumerate() {
            if cell {
                out.insert((u, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccmu::{parse, ActionAlphabet};

    fn chain() -> Model {
        let mut m = Model::new(ActionAlphabet::new(["a"]).unwrap(), ["s", "t", "u"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.add_transition("t", "a", "u").unwrap();
        m.set_atom("p", ["u"]).unwrap();
        m
    }

    #[test]
    fn reachability_by_subsets() {
        let m = chain();
        let f = parse("mu q. (p | <a>q)", m.alphabet()).unwrap();
        let masks = Masks::from_model(&m, &["p".to_string()]);
        assert_eq!(subset_extension_k(&masks, &f), 0b111);
        let g = parse("nu q. <a>q", m.alphabet()).unwrap();
        assert_eq!(subset_extension_k(&masks, &g), 0);
    }

    #[test]
    fn self_bisimilarity_separates_the_chain() {
        let m = chain();
        assert_eq!(bisimilarity(&m, &m), BTreeSet::from([(0, 0), (1, 1), (2, 2)]));
    }

    #[test]
    fn a_loop_simulates_a_chain_without_atoms() {
        let alphabet = ActionAlphabet::new(["a"]).unwrap();
        let mut m = Model::new(alphabet.clone(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        let mut n = Model::new(alphabet, ["l"]).unwrap();
        n.add_transition("l", "a", "l").unwrap();
        assert_eq!(simulation(&m, &n), BTreeSet::from([(0, 0), (1, 0)]));
        assert!(simulation(&n, &m).is_empty());
    }
}
