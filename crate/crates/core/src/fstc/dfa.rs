use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// One environment item over an atomic alphabet: a symbol class, possibly
/// repeated any number of times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ClassItem {
    pub class: Vec<bool>,
    pub star: bool,
}

/// Complete deterministic automaton over symbols `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct Dfa {
    pub next: Vec<Vec<usize>>,
    pub accept: Vec<bool>,
    /// No accepting state is reachable.
    pub dead: Vec<bool>,
    /// Every reachable state accepts.
    pub universal: Vec<bool>,
}

pub(crate) const START: usize = 0;

impl Dfa {
    /// The language `[Σ*] items [Σ*]` over `n` symbols.
    pub fn sequence(n: usize, items: &[ClassItem], any_before: bool, any_after: bool) -> Dfa {
        let k = items.len();
        // NFA state i: the first i items are matched.
        let closure = |set: &mut BTreeSet<usize>| {
            let mut stack: Vec<usize> = set.iter().copied().collect();
            while let Some(i) = stack.pop() {
                if i < k && items[i].star && set.insert(i + 1) {
                    stack.push(i + 1);
                }
            }
        };
        let step = |set: &BTreeSet<usize>, a: usize| {
            let mut out = BTreeSet::new();
            for &i in set {
                if (i == 0 && any_before) || (i == k && any_after) {
                    out.insert(i);
                }
                if i < k && items[i].class[a] {
                    out.insert(if items[i].star { i } else { i + 1 });
                }
            }
            closure(&mut out);
            out
        };
        let mut start = BTreeSet::from([0]);
        closure(&mut start);
        let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
        let mut sets = vec![start];
        let mut next = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(n);
            for a in 0..n {
                let t = step(&sets[i], a);
                let id = *ids.entry(t.clone()).or_insert_with(|| {
                    sets.push(t);
                    sets.len() - 1
                });
                row.push(id);
            }
            next.push(row);
            i += 1;
        }
        let accept = sets.iter().map(|s| s.contains(&k)).collect();
        Dfa::finish(next, accept)
    }

    fn finish(next: Vec<Vec<usize>>, accept: Vec<bool>) -> Dfa {
        let m = next.len();
        let reach = |s: usize| {
            let mut seen = vec![false; m];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(x) = queue.pop_front() {
                for &y in &next[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            seen
        };
        let mut dead = vec![false; m];
        let mut universal = vec![false; m];
        for s in 0..m {
            let r = reach(s);
            dead[s] = !(0..m).any(|x| r[x] && accept[x]);
            universal[s] = (0..m).all(|x| !r[x] || accept[x]);
        }
        Dfa { next, accept, dead, universal }
    }

    /// Do the two languages share a string?
    pub fn intersects(&self, other: &Dfa) -> bool {
        let mut seen = BTreeSet::from([(START, START)]);
        let mut queue = VecDeque::from([(START, START)]);
        while let Some((x, y)) = queue.pop_front() {
            if self.accept[x] && other.accept[y] {
                return true;
            }
            for (a, &nx) in self.next[x].iter().enumerate() {
                let pair = (nx, other.next[y][a]);
                if seen.insert(pair) {
                    queue.push_back(pair);
                }
            }
        }
        false
    }

    #[cfg(test)]
    pub fn run(&self, word: &[usize]) -> bool {
        self.accept[word.iter().fold(START, |s, &a| self.next[s][a])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(n: usize, members: &[usize]) -> Vec<bool> {
        (0..n).map(|a| members.contains(&a)).collect()
    }

    #[test]
    fn sequences() {
        // Symbols: 0 = vowel, 1 and 2 consonants.
        let items =
            [ClassItem { class: class(3, &[0]), star: false }, ClassItem { class: class(3, &[1, 2]), star: true }];
        let d = Dfa::sequence(3, &items, true, false);
        assert!(d.run(&[0]));
        assert!(d.run(&[1, 0, 1, 2]));
        assert!(d.run(&[0, 1, 0, 2, 1]));
        assert!(!d.run(&[1, 2]));
        assert!(!d.run(&[]));
        let anchored = Dfa::sequence(3, &items[..1], false, false);
        assert!(anchored.run(&[0]) && !anchored.run(&[1, 0]));
        let open = Dfa::sequence(3, &[], false, true);
        assert!(open.universal[START]);
    }

    #[test]
    fn intersection() {
        let a = Dfa::sequence(2, &[ClassItem { class: class(2, &[0]), star: false }], true, false);
        let b = Dfa::sequence(2, &[ClassItem { class: class(2, &[1]), star: false }], true, false);
        assert!(!a.intersects(&b));
        let c = Dfa::sequence(2, &[ClassItem { class: class(2, &[0, 1]), star: false }], true, false);
        assert!(a.intersects(&c));
        let empty = Dfa::sequence(2, &[ClassItem { class: class(2, &[]), star: false }], false, false);
        assert!(empty.dead[START]);
    }
}
