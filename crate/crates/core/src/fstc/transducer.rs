use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::FstError;

/// `None` is epsilon.
pub type Label = Option<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: usize,
    pub input: Label,
    pub output: Label,
    pub to: usize,
}

/// A finite-state transducer whose labels index `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: BTreeSet<Transition>,
}

impl Transducer {
    /// Maps every word to itself.
    pub fn identity(alphabet: Vec<String>) -> Self {
        let transitions =
            (0..alphabet.len()).map(|a| Transition { from: 0, input: Some(a), output: Some(a), to: 0 }).collect();
        Transducer { alphabet, states: 1, initial: 0, finals: [0].into(), transitions }
    }

    fn outgoing(&self) -> Vec<Vec<Transition>> {
        let mut out = vec![Vec::new(); self.states];
        for t in &self.transitions {
            out[t.from].push(*t);
        }
        out
    }

    /// Drops states that are unreachable or cannot reach a final state, and
    /// renumbers the rest in breadth-first order over sorted transitions.
    pub fn trim(&self) -> Transducer {
        let out = self.outgoing();
        let mut back = vec![Vec::new(); self.states];
        for t in &self.transitions {
            back[t.to].push(t.from);
        }
        let mut live = vec![false; self.states];
        let mut queue: VecDeque<usize> = self.finals.iter().copied().collect();
        for &f in &self.finals {
            live[f] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &back[s] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        if self.states == 0 || !live[self.initial] {
            return Transducer {
                alphabet: self.alphabet.clone(),
                states: 1,
                initial: 0,
                finals: BTreeSet::new(),
                transitions: BTreeSet::new(),
            };
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::from([(self.initial, 0)]);
        let mut order = vec![self.initial];
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            let mut ts = out[s].clone();
            ts.sort_by_key(|t| (t.input, t.output, t.to));
            for t in ts {
                if live[t.to] && !ids.contains_key(&t.to) {
                    ids.insert(t.to, order.len());
                    order.push(t.to);
                }
            }
            i += 1;
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| ids.contains_key(&t.from) && ids.contains_key(&t.to))
            .map(|t| Transition { from: ids[&t.from], input: t.input, output: t.output, to: ids[&t.to] })
            .collect();
        let finals = self.finals.iter().filter_map(|f| ids.get(f).copied()).collect();
        Transducer { alphabet: self.alphabet.clone(), states: order.len(), initial: 0, finals, transitions }
    }

    /// Every output for `word`. Output length is bounded so that epsilon
    /// cycles cannot run forever.
    pub fn outputs(&self, word: &[usize]) -> BTreeSet<Vec<usize>> {
        let out = self.outgoing();
        let bound = (word.len() + 1) * (self.states + 1);
        let mut seen: BTreeSet<(usize, usize, Vec<usize>)> = BTreeSet::new();
        let mut stack = vec![(self.initial, 0, Vec::new())];
        let mut results = BTreeSet::new();
        while let Some((s, pos, emitted)) = stack.pop() {
            if !seen.insert((s, pos, emitted.clone())) {
                continue;
            }
            if pos == word.len() && self.finals.contains(&s) {
                results.insert(emitted.clone());
            }
            for t in &out[s] {
                let npos = match t.input {
                    None => pos,
                    Some(a) if pos < word.len() && word[pos] == a => pos + 1,
                    Some(_) => continue,
                };
                let mut e = emitted.clone();
                if let Some(b) = t.output {
                    if e.len() >= bound {
                        continue;
                    }
                    e.push(b);
                }
                stack.push((t.to, npos, e));
            }
        }
        results
    }

    /// The single output for `word`.
    pub fn transduce(&self, word: &[usize]) -> Result<Vec<usize>, FstError> {
        if let Some(&a) = word.iter().find(|&&a| a >= self.alphabet.len()) {
            return Err(FstError::UnknownSymbol(a.to_string()));
        }
        let mut all = self.outputs(word).into_iter();
        match (all.next(), all.next()) {
            (None, _) => Err(FstError::NoAccept),
            (Some(w), None) => Ok(w),
            (Some(_), Some(_)) => Err(FstError::Ambiguous),
        }
    }

    pub fn symbol_id(&self, s: &str) -> Result<usize, FstError> {
        self.alphabet.iter().position(|a| a == s).ok_or_else(|| FstError::UnknownSymbol(s.to_string()))
    }

    /// Reads the text form written by `Display`.
    pub fn parse(text: &str) -> Result<Self, FstError> {
        let mut alphabet = None;
        let mut states = BTreeSet::new();
        let mut initial = None;
        let mut finals = BTreeSet::new();
        let mut raw = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let err = |msg: String| FstError::Parse { line: n + 1, msg };
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad state `{s}`")));
            match words[0] {
                "alphabet:" => alphabet = Some(words[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                "state" if words.len() >= 2 => {
                    let id = num(words[1])?;
                    states.insert(id);
                    for flag in &words[2..] {
                        match *flag {
                            "initial" if initial.is_none() => initial = Some(id),
                            "initial" => return Err(err("second initial state".into())),
                            "final" => {
                                finals.insert(id);
                            }
                            other => return Err(err(format!("unknown flag `{other}`"))),
                        }
                    }
                }
                "trans" if words.len() == 5 => {
                    let (from, to) = (num(words[1])?, num(words[4])?);
                    raw.push((n + 1, from, words[2].to_string(), words[3].to_string(), to));
                }
                _ => return Err(err(format!("cannot read `{line}`"))),
            }
        }
        let alphabet = alphabet.ok_or(FstError::Parse { line: 0, msg: "no alphabet line".into() })?;
        let initial = initial.ok_or(FstError::Parse { line: 0, msg: "no initial state".into() })?;
        let count = states.iter().next_back().map_or(0, |m| m + 1);
        if states.len() != count {
            return Err(FstError::Parse { line: 0, msg: "state ids must run from 0 without gaps".into() });
        }
        let label = |s: &str, line: usize| -> Result<Label, FstError> {
            if s == "-" {
                return Ok(None);
            }
            alphabet
                .iter()
                .position(|a| a == s)
                .map(Some)
                .ok_or_else(|| FstError::Parse { line, msg: format!("`{s}` is not in the alphabet") })
        };
        let mut transitions = BTreeSet::new();
        for (line, from, i, o, to) in raw {
            if from >= count || to >= count {
                return Err(FstError::Parse { line, msg: "undeclared state".into() });
            }
            transitions.insert(Transition { from, input: label(&i, line)?, output: label(&o, line)?, to });
        }
        Ok(Transducer { alphabet, states: count, initial, finals, transitions })
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        for s in 0..self.states {
            write!(f, "state {s}")?;
            if s == self.initial {
                f.write_str(" initial")?;
            }
            if self.finals.contains(&s) {
                f.write_str(" final")?;
            }
            writeln!(f)?;
        }
        let name = |l: Label| l.map_or("-", |a| self.alphabet[a].as_str());
        for t in &self.transitions {
            writeln!(f, "trans {} {} {} {}", t.from, name(t.input), name(t.output), t.to)?;
        }
        Ok(())
    }
}
