use std::fmt::Write as _;

use super::Syllable;
use crate::inventory::{Inventory, SegId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    OnsetRhyme,
    Moraic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Syllable,
    Onset,
    Rhyme,
    Nucleus,
    Coda,
    Mora,
}

impl Label {
    pub fn symbol(self) -> &'static str {
        match self {
            Label::Syllable => "σ",
            Label::Onset => "O",
            Label::Rhyme => "R",
            Label::Nucleus => "N",
            Label::Coda => "C",
            Label::Mora => "μ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Segment(SegId),
    Branch(Label, Vec<Node>),
}

impl Node {
    pub fn children(&self) -> &[Node] {
        match self {
            Node::Segment(_) => &[],
            Node::Branch(_, c) => c,
        }
    }

    pub fn label(&self) -> Option<Label> {
        match self {
            Node::Segment(_) => None,
            Node::Branch(l, _) => Some(*l),
        }
    }

    fn child(&self, label: Label) -> Option<&Node> {
        self.children().iter().find(|c| c.label() == Some(label))
    }

    /// Bracketed form such as `σ[O[k] R[N[a] C[h]]]`.
    pub fn render(&self, inv: &Inventory) -> String {
        let mut out = String::new();
        self.write(inv, &mut out);
        out
    }

    fn write(&self, inv: &Inventory, out: &mut String) {
        match self {
            Node::Segment(s) => out.push_str(inv.symbol(*s)),
            Node::Branch(l, children) => {
                let _ = write!(out, "{}[", l.symbol());
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    c.write(inv, out);
                }
                out.push(']');
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyllableTree {
    pub model: Model,
    pub root: Node,
}

impl SyllableTree {
    /// Heaviness read off the tree: a branching rhyme or nucleus in the
    /// onset-rhyme model, more than one mora in the moraic model.
    pub fn is_heavy(&self) -> bool {
        match self.model {
            Model::OnsetRhyme => {
                let Some(rhyme) = self.root.child(Label::Rhyme) else { return false };
                let nucleus = rhyme.child(Label::Nucleus).map_or(0, |n| n.children().len());
                rhyme.children().len() > 1 || nucleus > 1
            }
            Model::Moraic => self.moras() > 1,
        }
    }

    pub fn moras(&self) -> usize {
        self.root.children().iter().filter(|c| c.label() == Some(Label::Mora)).count()
    }

    pub fn render(&self, inv: &Inventory) -> String {
        self.root.render(inv)
    }
}

fn leaves(segs: &[SegId]) -> Vec<Node> {
    segs.iter().map(|&s| Node::Segment(s)).collect()
}

pub fn build_onset_rhyme(s: &Syllable) -> SyllableTree {
    let mut top = Vec::new();
    if !s.onset.is_empty() {
        top.push(Node::Branch(Label::Onset, leaves(&s.onset)));
    }
    let mut rhyme = vec![Node::Branch(Label::Nucleus, leaves(&s.nucleus))];
    if !s.coda.is_empty() {
        rhyme.push(Node::Branch(Label::Coda, leaves(&s.coda)));
    }
    top.push(Node::Branch(Label::Rhyme, rhyme));
    SyllableTree { model: Model::OnsetRhyme, root: Node::Branch(Label::Syllable, top) }
}

/// Onset consonants hang from σ; the first vowel has its own mora and
/// everything after it shares a second one.
pub fn build_moraic(s: &Syllable) -> SyllableTree {
    let mut top = leaves(&s.onset);
    let first = s.nucleus.len().min(1);
    if first == 1 {
        top.push(Node::Branch(Label::Mora, leaves(&s.nucleus[..1])));
    }
    let rest: Vec<SegId> = s.nucleus[first..].iter().chain(&s.coda).copied().collect();
    if !rest.is_empty() {
        top.push(Node::Branch(Label::Mora, leaves(&rest)));
    }
    SyllableTree { model: Model::Moraic, root: Node::Branch(Label::Syllable, top) }
}
