use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::Eesl;

/// Thompson automaton with a single start and a single accepting state.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub alphabet: Vec<String>,
    pub start: usize,
    pub accept: usize,
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    /// Builds the automaton of a sugar-free expression. The alphabet is the
    /// expression's events in order of first appearance.
    pub fn thompson(ast: &Eesl) -> Nfa {
        Nfa::thompson_over(ast, ast.events())
    }

    pub fn thompson_over(ast: &Eesl, alphabet: Vec<String>) -> Nfa {
        let mut nfa = Nfa {
            alphabet,
            start: 0,
            accept: 0,
            eps: Vec::new(),
            edges: Vec::new(),
        };
        let (s, f) = nfa.build(ast);
        nfa.start = s;
        nfa.accept = f;
        nfa
    }

    pub fn state_count(&self) -> usize {
        self.eps.len()
    }

    fn fresh(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn symbol(&self, name: &str) -> usize {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .expect("expression event missing from alphabet")
    }

    fn build(&mut self, ast: &Eesl) -> (usize, usize) {
        match ast {
            Eesl::Empty => {
                let (s, f) = (self.fresh(), self.fresh());
                self.eps[s].push(f);
                (s, f)
            }
            Eesl::Atom(a) => {
                let (s, f) = (self.fresh(), self.fresh());
                let sym = self.symbol(a);
                self.edges[s].push((sym, f));
                (s, f)
            }
            Eesl::Group(a) => self.build(a),
            Eesl::Union(a, b) => {
                let (s, f) = (self.fresh(), self.fresh());
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                self.eps[s].extend([s1, s2]);
                self.eps[f1].push(f);
                self.eps[f2].push(f);
                (s, f)
            }
            Eesl::Concat(a, b) => {
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                self.eps[f1].push(s2);
                (s1, f2)
            }
            Eesl::Star(a) => {
                let (s, f) = (self.fresh(), self.fresh());
                let (s1, f1) = self.build(a);
                self.eps[s].extend([s1, f]);
                self.eps[f1].extend([s1, f]);
                (s, f)
            }
            Eesl::Shuffle(a, b) => self.shuffle(a, b),
            Eesl::Par(..) | Eesl::Test(_) => self.build(&super::desugar(ast)),
        }
    }

    /// Interleaving product of the minimal automata of both operands.
    fn shuffle(&mut self, a: &Eesl, b: &Eesl) -> (usize, usize) {
        let da = Dfa::from_nfa(&Nfa::thompson_over(a, self.alphabet.clone())).minimize();
        let db = Dfa::from_nfa(&Nfa::thompson_over(b, self.alphabet.clone())).minimize();
        let (s, f) = (self.fresh(), self.fresh());
        let mut index = BTreeMap::new();
        let mut queue = VecDeque::new();
        let root = self.fresh();
        index.insert((da.start, db.start), root);
        queue.push_back((da.start, db.start));
        self.eps[s].push(root);
        while let Some((p, q)) = queue.pop_front() {
            let from = index[&(p, q)];
            if da.accepting[p] && db.accepting[q] {
                self.eps[from].push(f);
            }
            for sym in 0..self.alphabet.len() {
                for next in [(da.delta[p][sym], q), (p, db.delta[q][sym])] {
                    if !da.live[next.0] || !db.live[next.1] {
                        continue;
                    }
                    let to = match index.get(&next) {
                        Some(&to) => to,
                        None => {
                            let to = self.fresh();
                            index.insert(next, to);
                            queue.push_back(next);
                            to
                        }
                    };
                    if !self.edges[from].contains(&(sym, to)) {
                        self.edges[from].push((sym, to));
                    }
                }
            }
        }
        (s, f)
    }

    fn closure(&self, states: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = states.into_iter().collect();
        while let Some(s) = stack.pop() {
            if out.insert(s) {
                stack.extend(self.eps[s].iter().copied());
            }
        }
        out
    }
}

/// Complete deterministic automaton. `live[s]` tells whether an accepting
/// state is reachable from `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Vec<String>,
    pub start: usize,
    pub accepting: Vec<bool>,
    pub delta: Vec<Vec<usize>>,
    pub live: Vec<bool>,
}

impl Dfa {
    /// Subset construction over ε-closures. States are numbered in
    /// breadth-first discovery order, symbols tried in alphabet order.
    pub fn from_nfa(nfa: &Nfa) -> Dfa {
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut sets = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let start = nfa.closure([nfa.start]);
        index.insert(start.clone(), 0);
        sets.push(start);
        let mut next = 0;
        while next < sets.len() {
            let mut row = Vec::with_capacity(nfa.alphabet.len());
            for sym in 0..nfa.alphabet.len() {
                let moved: Vec<usize> = sets[next]
                    .iter()
                    .flat_map(|&s| nfa.edges[s].iter())
                    .filter(|(a, _)| *a == sym)
                    .map(|(_, t)| *t)
                    .collect();
                let target = nfa.closure(moved);
                let id = match index.get(&target) {
                    Some(&id) => id,
                    None => {
                        index.insert(target.clone(), sets.len());
                        sets.push(target);
                        sets.len() - 1
                    }
                };
                row.push(id);
            }
            delta.push(row);
            next += 1;
        }
        let accepting = sets.iter().map(|s| s.contains(&nfa.accept)).collect();
        Dfa::with_liveness(nfa.alphabet.clone(), 0, accepting, delta)
    }

    fn with_liveness(
        alphabet: Vec<String>,
        start: usize,
        accepting: Vec<bool>,
        delta: Vec<Vec<usize>>,
    ) -> Dfa {
        let mut live = accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..delta.len() {
                if !live[s] && delta[s].iter().any(|&t| live[t]) {
                    live[s] = true;
                    changed = true;
                }
            }
        }
        Dfa {
            alphabet,
            start,
            accepting,
            delta,
            live,
        }
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    /// Partition refinement followed by breadth-first renumbering, so equal
    /// languages over the same alphabet give identical automata.
    pub fn minimize(&self) -> Dfa {
        let n = self.state_count();
        let mut class: Vec<usize> = self.accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut sigs: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next = vec![0; n];
            for s in 0..n {
                let sig = (class[s], self.delta[s].iter().map(|&t| class[t]).collect());
                let len = sigs.len();
                next[s] = *sigs.entry(sig).or_insert(len);
            }
            let stable = sigs.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let mut order: BTreeMap<usize, usize> = BTreeMap::new();
        let mut rep = Vec::new();
        let mut queue = VecDeque::from([self.start]);
        order.insert(class[self.start], 0);
        rep.push(self.start);
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if let std::collections::btree_map::Entry::Vacant(slot) = order.entry(class[t]) {
                    slot.insert(rep.len());
                    rep.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = rep
            .iter()
            .map(|&s| self.delta[s].iter().map(|&t| order[&class[t]]).collect())
            .collect();
        let accepting = rep.iter().map(|&s| self.accepting[s]).collect();
        Dfa::with_liveness(self.alphabet.clone(), 0, accepting, delta)
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut state = self.start;
        for event in word {
            match self.alphabet.iter().position(|a| a == event.as_ref()) {
                Some(sym) => state = self.delta[state][sym],
                None => return false,
            }
        }
        self.accepting[state]
    }
}
