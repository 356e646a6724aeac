use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{FstError, Transducer, Transition};

/// The relation of `a` followed by `b`.
///
/// Epsilon moves go through a three-way filter so that an `x:ε` step of
/// `a` and an `ε:z` step of `b` are paired in exactly one order.
pub fn compose(a: &Transducer, b: &Transducer) -> Result<Transducer, FstError> {
    if a.alphabet != b.alphabet {
        return Err(FstError::AlphabetMismatch);
    }
    let mut out_a: Vec<Vec<Transition>> = vec![Vec::new(); a.states];
    for t in &a.transitions {
        out_a[t.from].push(*t);
    }
    let mut out_b: Vec<Vec<Transition>> = vec![Vec::new(); b.states];
    for t in &b.transitions {
        out_b[t.from].push(*t);
    }
    type Key = (usize, usize, u8);
    let start: Key = (a.initial, b.initial, 0);
    let mut ids: BTreeMap<Key, usize> = BTreeMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    let mut transitions = BTreeSet::new();
    let mut finals = BTreeSet::new();
    while let Some(key @ (p, q, filter)) = queue.pop_front() {
        let from = ids[&key];
        if a.finals.contains(&p) && b.finals.contains(&q) {
            finals.insert(from);
        }
        let mut moves: Vec<(Option<usize>, Option<usize>, Key)> = Vec::new();
        for ta in &out_a[p] {
            match ta.output {
                Some(y) => {
                    for tb in out_b[q].iter().filter(|tb| tb.input == Some(y)) {
                        moves.push((ta.input, tb.output, (ta.to, tb.to, 0)));
                    }
                }
                None => {
                    if filter != 2 {
                        moves.push((ta.input, None, (ta.to, q, 1)));
                    }
                    if filter == 0 {
                        for tb in out_b[q].iter().filter(|tb| tb.input.is_none()) {
                            moves.push((ta.input, tb.output, (ta.to, tb.to, 0)));
                        }
                    }
                }
            }
        }
        if filter != 1 {
            for tb in out_b[q].iter().filter(|tb| tb.input.is_none()) {
                moves.push((None, tb.output, (p, tb.to, 2)));
            }
        }
        for (input, output, to) in moves {
            let next = ids.len();
            let id = *ids.entry(to).or_insert_with(|| {
                queue.push_back(to);
                next
            });
            transitions.insert(Transition { from, input, output, to: id });
        }
    }
    let t = Transducer { alphabet: a.alphabet.clone(), states: ids.len(), initial: 0, finals, transitions };
    Ok(t.trim())
}
