use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{Dfa, EeslError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(u32),
    V(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Production {
    pub lhs: u32,
    pub rhs: Vec<Symbol>,
}

/// A context-free production grammar. Alternatives of a variable are tried
/// in the order they appear in `productions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub variables: Vec<String>,
    pub terminals: Vec<String>,
    pub start: u32,
    pub productions: Vec<Production>,
}

impl Grammar {
    /// One variable per live DFA state; `A → λ` first when accepting, then
    /// `A → a B` per live transition in alphabet order.
    pub fn from_dfa(dfa: &Dfa) -> Grammar {
        let mut order = vec![dfa.start];
        order.extend((0..dfa.state_count()).filter(|&s| s != dfa.start && dfa.live[s]));
        let var_of: BTreeMap<usize, u32> = order
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u32))
            .collect();
        let mut productions = Vec::new();
        for &s in &order {
            let lhs = var_of[&s];
            if dfa.accepting[s] {
                productions.push(Production { lhs, rhs: vec![] });
            }
            for (sym, &t) in dfa.delta[s].iter().enumerate() {
                if dfa.live[t] {
                    productions.push(Production {
                        lhs,
                        rhs: vec![Symbol::T(sym as u32), Symbol::V(var_of[&t])],
                    });
                }
            }
        }
        Grammar {
            variables: (0..order.len()).map(|i| format!("V{i}")).collect(),
            terminals: dfa.alphabet.clone(),
            start: 0,
            productions,
        }
    }

    pub fn alternatives(&self, var: u32) -> impl Iterator<Item = &[Symbol]> {
        self.productions
            .iter()
            .filter(move |p| p.lhs == var)
            .map(|p| p.rhs.as_slice())
    }

    pub fn terminal(&self, name: &str) -> Option<u32> {
        self.terminals.iter().position(|t| t == name).map(|i| i as u32)
    }

    pub fn name(&self, sym: Symbol) -> &str {
        match sym {
            Symbol::T(t) => &self.terminals[t as usize],
            Symbol::V(v) => &self.variables[v as usize],
        }
    }

    /// Space-separated sentential form, `λ` when empty.
    pub fn form_text(&self, form: &[Symbol]) -> String {
        if form.is_empty() {
            return "λ".to_string();
        }
        form.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Every production is `A → a B`, `A → a` or `A → λ`.
    pub fn is_right_linear(&self) -> bool {
        self.productions.iter().all(|p| {
            matches!(
                p.rhs.as_slice(),
                [] | [Symbol::T(_)] | [Symbol::T(_), Symbol::V(_)]
            )
        })
    }

    /// Variables without any production.
    pub fn dead_variables(&self) -> Vec<&str> {
        (0..self.variables.len() as u32)
            .filter(|&v| self.alternatives(v).next().is_none())
            .map(|v| self.variables[v as usize].as_str())
            .collect()
    }

    /// Canonical text, one line per variable: `V0 -> λ | a V1`. A variable
    /// without productions prints as `V0 -> ∅`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in 0..self.variables.len() as u32 {
            let alts: Vec<String> = self.alternatives(v).map(|f| self.form_text(f)).collect();
            let rhs = if alts.is_empty() {
                "∅".to_string()
            } else {
                alts.join(" | ")
            };
            out.push_str(&format!("{} -> {rhs}\n", self.variables[v as usize]));
        }
        out
    }

    /// Reads the dump format. Names appearing on a left-hand side are
    /// variables, every other name is a terminal; the first left-hand side is
    /// the start variable. `→`, `ε` and `·` are accepted as alternatives to
    /// `->`, `λ` and whitespace.
    pub fn from_dump(text: &str) -> Result<Grammar, EeslError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .or_else(|| line.split_once('→'))
                .ok_or_else(|| EeslError::GrammarSyntax {
                    line: i + 1,
                    message: "expected `->`".into(),
                })?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                return Err(EeslError::GrammarSyntax {
                    line: i + 1,
                    message: "left-hand side must be a single name".into(),
                });
            }
            let alts: Vec<Vec<String>> = rhs
                .split('|')
                .map(|alt| {
                    alt.replace('·', " ")
                        .split_whitespace()
                        .filter(|s| !matches!(*s, "λ" | "ε"))
                        .map(str::to_string)
                        .collect()
                })
                .collect();
            let empty_set = alts.len() == 1 && alts[0] == ["∅"];
            rules.push((lhs.to_string(), if empty_set { vec![] } else { alts }));
        }
        if rules.is_empty() {
            return Err(EeslError::GrammarSyntax {
                line: 0,
                message: "no productions".into(),
            });
        }
        let mut variables: Vec<String> = Vec::new();
        for (lhs, _) in &rules {
            if !variables.contains(lhs) {
                variables.push(lhs.clone());
            }
        }
        let mut terminals: Vec<String> = Vec::new();
        let mut productions = Vec::new();
        for (lhs, alts) in &rules {
            let lhs = variables.iter().position(|v| v == lhs).unwrap() as u32;
            for alt in alts {
                let rhs = alt
                    .iter()
                    .map(|name| match variables.iter().position(|v| v == name) {
                        Some(v) => Symbol::V(v as u32),
                        None => {
                            if !terminals.contains(name) {
                                terminals.push(name.clone());
                            }
                            Symbol::T(terminals.iter().position(|t| t == name).unwrap() as u32)
                        }
                    })
                    .collect();
                productions.push(Production { lhs, rhs });
            }
        }
        Ok(Grammar {
            variables,
            terminals,
            start: 0,
            productions,
        })
    }

    /// Shortest terminal yield per variable, `None` when unproductive.
    fn min_yield(&self) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; self.variables.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let len = p.rhs.iter().try_fold(0usize, |acc, s| match *s {
                    Symbol::T(_) => Some(acc + 1),
                    Symbol::V(v) => best[v as usize].map(|l| acc + l),
                });
                if let Some(len) = len {
                    let slot = &mut best[p.lhs as usize];
                    if slot.is_none_or(|b| len < b) {
                        *slot = Some(len);
                        changed = true;
                    }
                }
            }
        }
        best
    }

    fn lower_bound(&self, form: &[Symbol], min_yield: &[Option<usize>]) -> Option<usize> {
        form.iter().try_fold(0usize, |acc, s| match *s {
            Symbol::T(_) => Some(acc + 1),
            Symbol::V(v) => min_yield[v as usize].map(|l| acc + l),
        })
    }

    /// All words of at most `max_len` terminals, found by exhaustive
    /// leftmost derivation.
    pub fn enumerate_words(&self, max_len: usize) -> BTreeSet<Vec<String>> {
        let min_yield = self.min_yield();
        let mut words = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([vec![Symbol::V(self.start)]]);
        while let Some(form) = queue.pop_front() {
            if !seen.insert(form.clone()) {
                continue;
            }
            let Some(pos) = form.iter().position(|s| matches!(s, Symbol::V(_))) else {
                words.insert(form.iter().map(|&s| self.name(s).to_string()).collect());
                continue;
            };
            let Symbol::V(var) = form[pos] else {
                unreachable!()
            };
            for alt in self.alternatives(var) {
                let mut next = form[..pos].to_vec();
                next.extend_from_slice(alt);
                next.extend_from_slice(&form[pos + 1..]);
                if self
                    .lower_bound(&next, &min_yield)
                    .is_some_and(|l| l <= max_len)
                {
                    queue.push_back(next);
                }
            }
        }
        words
    }

    /// Number of distinct leftmost derivations of `word`. Derivation steps
    /// that revisit a sentential form already on the current path are not
    /// followed.
    pub fn count_derivations<S: AsRef<str>>(&self, word: &[S]) -> usize {
        let Some(target) = word
            .iter()
            .map(|w| self.terminal(w.as_ref()).map(Symbol::T))
            .collect::<Option<Vec<_>>>()
        else {
            return 0;
        };
        let min_yield = self.min_yield();
        let mut path = BTreeSet::new();
        self.count_from(vec![Symbol::V(self.start)], &target, &min_yield, &mut path)
    }

    fn count_from(
        &self,
        form: Vec<Symbol>,
        target: &[Symbol],
        min_yield: &[Option<usize>],
        path: &mut BTreeSet<Vec<Symbol>>,
    ) -> usize {
        let pos = form
            .iter()
            .position(|s| matches!(s, Symbol::V(_)))
            .unwrap_or(form.len());
        if pos > target.len() || form[..pos] != target[..pos] {
            return 0;
        }
        if pos == form.len() {
            return usize::from(pos == target.len());
        }
        if self
            .lower_bound(&form, min_yield)
            .is_none_or(|l| l > target.len())
        {
            return 0;
        }
        if !path.insert(form.clone()) {
            return 0;
        }
        let Symbol::V(var) = form[pos] else {
            unreachable!()
        };
        let mut total = 0;
        for alt in self.alternatives(var) {
            let mut next = form[..pos].to_vec();
            next.extend_from_slice(alt);
            next.extend_from_slice(&form[pos + 1..]);
            total += self.count_from(next, target, min_yield, path);
        }
        path.remove(&form);
        total
    }

    /// Restricts a right-linear grammar to words of at most `max_len`
    /// terminals by pairing every variable with a length counter.
    pub fn bounded(&self, max_len: usize) -> Result<Grammar, EeslError> {
        if !self.is_right_linear() {
            return Err(EeslError::NotRightLinear);
        }
        let mut index: BTreeMap<(u32, usize), u32> = BTreeMap::new();
        let mut order = vec![(self.start, 0)];
        index.insert((self.start, 0), 0);
        let mut productions = Vec::new();
        let mut next = 0;
        while next < order.len() {
            let (var, depth) = order[next];
            let lhs = next as u32;
            for alt in self.alternatives(var) {
                match *alt {
                    [] => productions.push(Production { lhs, rhs: vec![] }),
                    [t] if depth < max_len => productions.push(Production { lhs, rhs: vec![t] }),
                    [t, Symbol::V(v)] if depth < max_len => {
                        let key = (v, depth + 1);
                        let target = *index.entry(key).or_insert_with(|| {
                            order.push(key);
                            (order.len() - 1) as u32
                        });
                        productions.push(Production {
                            lhs,
                            rhs: vec![t, Symbol::V(target)],
                        });
                    }
                    _ => {}
                }
            }
            next += 1;
        }
        Ok(Grammar {
            variables: order
                .iter()
                .map(|&(v, d)| format!("{}_{d}", self.variables[v as usize]))
                .collect(),
            terminals: self.terminals.clone(),
            start: 0,
            productions,
        }
        .trimmed())
    }

    /// Drops productions that mention a variable deriving no word and
    /// variables unreachable from the start. The start variable is kept
    /// and renumbered to 0.
    pub fn trimmed(&self) -> Grammar {
        let productive: Vec<bool> = self.min_yield().iter().map(Option::is_some).collect();
        let usable = |p: &&Production| {
            productive[p.lhs as usize]
                && p.rhs
                    .iter()
                    .all(|s| !matches!(s, Symbol::V(v) if !productive[*v as usize]))
        };
        let kept: Vec<&Production> = self.productions.iter().filter(usable).collect();
        let mut order = vec![self.start];
        let mut next = 0;
        while next < order.len() {
            let var = order[next];
            for p in kept.iter().filter(|p| p.lhs == var) {
                for s in &p.rhs {
                    if let Symbol::V(v) = *s {
                        if !order.contains(&v) {
                            order.push(v);
                        }
                    }
                }
            }
            next += 1;
        }
        let renumber = |v: u32| order.iter().position(|&o| o == v).unwrap() as u32;
        let mut productions = Vec::new();
        for (new_lhs, &var) in order.iter().enumerate() {
            for p in kept.iter().filter(|p| p.lhs == var) {
                productions.push(Production {
                    lhs: new_lhs as u32,
                    rhs: p
                        .rhs
                        .iter()
                        .map(|s| match *s {
                            Symbol::V(v) => Symbol::V(renumber(v)),
                            t => t,
                        })
                        .collect(),
                });
            }
        }
        Grammar {
            variables: order
                .iter()
                .map(|&v| self.variables[v as usize].clone())
                .collect(),
            terminals: self.terminals.clone(),
            start: 0,
            productions,
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
