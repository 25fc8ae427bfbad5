//! Positional-index logical forms: parsing, rendering, semantic equivalence.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LfError {
    #[error("empty logical form")]
    Empty,
    #[error("term `{term}`: {reason}")]
    Syntax { term: String, reason: String },
    #[error("index {0} is used by a relation but never introduced")]
    Dangling(usize),
    #[error("index {0} is introduced twice")]
    DuplicateIntro(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Agent,
    Theme,
    Recipient,
    Xcomp,
    Ccomp,
    /// `nmod . <preposition>`
    Nmod(String),
}

impl Relation {
    pub fn from_name(name: &str) -> Option<Relation> {
        Some(match name {
            "agent" => Relation::Agent,
            "theme" => Relation::Theme,
            "recipient" => Relation::Recipient,
            "xcomp" => Relation::Xcomp,
            "ccomp" => Relation::Ccomp,
            _ => return None,
        })
    }

    pub fn is_nmod(&self) -> bool {
        matches!(self, Relation::Nmod(_))
    }

    /// Edge label used by [`SemanticGraph`].
    pub fn graph_label(&self) -> String {
        match self {
            Relation::Nmod(p) => format!("nmod.{p}"),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Agent => f.write_str("agent"),
            Relation::Theme => f.write_str("theme"),
            Relation::Recipient => f.write_str("recipient"),
            Relation::Xcomp => f.write_str("xcomp"),
            Relation::Ccomp => f.write_str("ccomp"),
            Relation::Nmod(p) => write!(f, "nmod . {p}"),
        }
    }
}

/// `[*] label ( index )`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Intro {
    pub label: String,
    pub definite: bool,
    pub index: usize,
}

/// `relation ( left , right )`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub relation: Relation,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Intro(Intro),
    Atom(Atom),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ( {} , {} )", self.relation, self.left, self.right)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Intro(i) => {
                if i.definite {
                    f.write_str("* ")?;
                }
                write!(f, "{} ( {} )", i.label, i.index)
            }
            Term::Atom(a) => write!(f, "{a}"),
        }
    }
}

/// Terms in textual order: a `;`-separated prefix, then `AND`-joined terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalForm {
    terms: Vec<Term>,
    and_start: usize,
}

impl LogicalForm {
    /// Builds and validates a logical form from its two sections.
    pub fn from_sections(
        semicolon: Vec<Term>,
        conjuncts: Vec<Term>,
    ) -> Result<LogicalForm, LfError> {
        let and_start = semicolon.len();
        let mut terms = semicolon;
        terms.extend(conjuncts);
        let lf = LogicalForm { terms, and_start };
        lf.validate()?;
        Ok(lf)
    }

    fn validate(&self) -> Result<(), LfError> {
        if self.terms.is_empty() {
            return Err(LfError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for i in self.intros() {
            if !seen.insert(i.index) {
                return Err(LfError::DuplicateIntro(i.index));
            }
        }
        for a in self.atoms() {
            for idx in [a.left, a.right] {
                if !seen.contains(&idx) {
                    return Err(LfError::Dangling(idx));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<LogicalForm, LfError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(LfError::Empty);
        }
        let segments: Vec<&[&str]> = tokens.split(|t| *t == ";").collect();
        let (last, head) = segments
            .split_last()
            .expect("split yields at least one segment");
        let mut semicolon = Vec::with_capacity(head.len());
        for seg in head {
            semicolon.push(parse_term(seg)?);
        }
        let mut conjuncts = Vec::new();
        for piece in last.split(|t| *t == "AND") {
            conjuncts.push(parse_term(piece)?);
        }
        LogicalForm::from_sections(semicolon, conjuncts)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn intros(&self) -> impl Iterator<Item = &Intro> {
        self.terms.iter().filter_map(|t| match t {
            Term::Intro(i) => Some(i),
            Term::Atom(_) => None,
        })
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.terms.iter().filter_map(|t| match t {
            Term::Atom(a) => Some(a),
            Term::Intro(_) => None,
        })
    }

    /// Whitespace-separated tokens of the rendered form.
    pub fn tokens(&self) -> Vec<String> {
        self.to_string()
            .split_whitespace()
            .map(str::to_string)
            .collect()
    }

    /// Rewrites intros in place, keeping layout. Indices must stay the same.
    pub fn map_intros(&self, mut f: impl FnMut(&mut Intro)) -> LogicalForm {
        let mut out = self.clone();
        for t in &mut out.terms {
            if let Term::Intro(i) = t {
                let index = i.index;
                f(i);
                i.index = index;
            }
        }
        out
    }

    pub fn to_graph(&self) -> SemanticGraph {
        let nodes = self
            .intros()
            .map(|i| (i.index, (i.label.clone(), i.definite)))
            .collect();
        let edges = self
            .atoms()
            .map(|a| {
                let label = a.relation.graph_label();
                if a.relation == Relation::Agent {
                    (a.right, a.left, label)
                } else {
                    (a.left, a.right, label)
                }
            })
            .collect();
        SemanticGraph { nodes, edges }
    }
}

fn parse_term(toks: &[&str]) -> Result<Term, LfError> {
    let err = |reason: &str| LfError::Syntax {
        term: toks.join(" "),
        reason: reason.to_string(),
    };
    if toks.is_empty() {
        return Err(err("empty term"));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| err(&format!("`{s}` is not an index")))
    };
    match toks {
        ["*", label, "(", i, ")"] => Ok(Term::Intro(Intro {
            label: label.to_string(),
            definite: true,
            index: num(i)?,
        })),
        [label, "(", i, ")"] => {
            if Relation::from_name(label).is_some() || *label == "nmod" {
                return Err(err("relation with one argument"));
            }
            Ok(Term::Intro(Intro {
                label: label.to_string(),
                definite: false,
                index: num(i)?,
            }))
        }
        ["nmod", ".", prep, "(", l, ",", r, ")"] => Ok(Term::Atom(Atom {
            relation: Relation::Nmod(prep.to_string()),
            left: num(l)?,
            right: num(r)?,
        })),
        [rel, "(", l, ",", r, ")"] => {
            let relation = Relation::from_name(rel)
                .ok_or_else(|| err(&format!("unknown relation `{rel}`")))?;
            Ok(Term::Atom(Atom {
                relation,
                left: num(l)?,
                right: num(r)?,
            }))
        }
        _ => Err(err("unrecognized term shape")),
    }
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(if k <= self.and_start { " ; " } else { " AND " })?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LogicalForm {
    type Err = LfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogicalForm::parse(s)
    }
}

/// Nodes keyed by index with (label, definite); edges are
/// `(from, to, label)` with agent edges pointing from the noun to the verb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticGraph {
    pub nodes: BTreeMap<usize, (String, bool)>,
    pub edges: Vec<(usize, usize, String)>,
}

/// Lowercases every token except the `AND` separator.
pub fn normalize_case(text: &str) -> String {
    text.split_whitespace()
        .map(|t| {
            if t == "AND" {
                t.to_string()
            } else {
                t.to_lowercase()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Token-for-token equality after whitespace normalization.
pub fn string_exact_match(a: &str, b: &str) -> bool {
    a.split_whitespace().eq(b.split_whitespace())
}

/// True iff some bijection between the two index sets preserves intro
/// labels, definiteness, and the multiset of atoms.
pub fn sem_equal(a: &LogicalForm, b: &LogicalForm) -> bool {
    let na: Vec<&Intro> = a.intros().collect();
    let nb: Vec<&Intro> = b.intros().collect();
    if na.len() != nb.len() || a.atoms().count() != b.atoms().count() {
        return false;
    }
    let mut label_count: HashMap<(&str, bool), i64> = HashMap::new();
    for i in &na {
        *label_count.entry((&i.label, i.definite)).or_default() += 1;
    }
    for i in &nb {
        *label_count.entry((&i.label, i.definite)).or_default() -= 1;
    }
    if label_count.values().any(|c| *c != 0) {
        return false;
    }

    let mut pending: HashMap<Atom, usize> = HashMap::new();
    for at in b.atoms() {
        *pending.entry(at.clone()).or_default() += 1;
    }
    // atoms of `a`, grouped by the endpoint that is assigned last
    let pos_a: HashMap<usize, usize> = na.iter().enumerate().map(|(k, i)| (i.index, k)).collect();
    let mut closing: Vec<Vec<&Atom>> = vec![Vec::new(); na.len()];
    for at in a.atoms() {
        let k = pos_a[&at.left].max(pos_a[&at.right]);
        closing[k].push(at);
    }
    let mut search = Search {
        na: &na,
        nb: &nb,
        pos_a,
        closing,
        map: vec![None; na.len()],
        used: vec![false; nb.len()],
        pending,
    };
    search.assign(0)
}

struct Search<'a> {
    na: &'a [&'a Intro],
    nb: &'a [&'a Intro],
    pos_a: HashMap<usize, usize>,
    closing: Vec<Vec<&'a Atom>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    pending: HashMap<Atom, usize>,
}

impl Search<'_> {
    fn image(&self, index: usize) -> usize {
        self.nb[self.map[self.pos_a[&index]].expect("endpoint assigned")].index
    }

    fn assign(&mut self, k: usize) -> bool {
        if k == self.na.len() {
            return true;
        }
        let src = self.na[k];
        for j in 0..self.nb.len() {
            let dst = self.nb[j];
            if self.used[j] || dst.label != src.label || dst.definite != src.definite {
                continue;
            }
            self.used[j] = true;
            self.map[k] = Some(j);
            let mut taken: Vec<Atom> = Vec::new();
            let mut ok = true;
            for at in self.closing[k].clone() {
                let img = Atom {
                    relation: at.relation.clone(),
                    left: self.image(at.left),
                    right: self.image(at.right),
                };
                match self.pending.get_mut(&img) {
                    Some(c) if *c > 0 => {
                        *c -= 1;
                        taken.push(img);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && self.assign(k + 1) {
                return true;
            }
            for img in taken {
                *self.pending.get_mut(&img).expect("taken atom exists") += 1;
            }
            self.map[k] = None;
            self.used[j] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BABY: &str = "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 4 ) AND paint ( 5 ) AND agent ( 5 , 1 ) AND theme ( 5 , 7 )";

    #[test]
    fn round_trip() {
        let lf = LogicalForm::parse(BABY).unwrap();
        assert_eq!(lf.to_string(), BABY);
        assert_eq!(lf.intros().count(), 4);
        assert_eq!(lf.atoms().count(), 3);
        assert_eq!(
            lf.atoms().next().unwrap().relation,
            Relation::Nmod("beside".into())
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(LogicalForm::parse("  "), Err(LfError::Empty));
        assert_eq!(
            LogicalForm::parse("boy ( 1 ) ; agent ( 2 , 1 )"),
            Err(LfError::Dangling(2))
        );
        assert!(matches!(
            LogicalForm::parse("boy ( x )"),
            Err(LfError::Syntax { .. })
        ));
        assert!(matches!(
            LogicalForm::parse("boy ( 1 ) ; frob ( 1 , 1 )"),
            Err(LfError::Syntax { .. })
        ));
        assert_eq!(
            LogicalForm::parse("boy ( 1 ) ; girl ( 1 )"),
            Err(LfError::DuplicateIntro(1))
        );
    }

    #[test]
    fn sem_ignores_order_and_renumbering() {
        let a = LogicalForm::parse(
            "boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )",
        )
        .unwrap();
        let b = LogicalForm::parse(
            "* girl ( 9 ) ; boy ( 3 ) ; paint ( 5 ) AND theme ( 5 , 9 ) AND agent ( 5 , 3 )",
        )
        .unwrap();
        assert!(sem_equal(&a, &b));
        let c = LogicalForm::parse(
            "boy ( 1 ) ; girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )",
        )
        .unwrap();
        assert!(!sem_equal(&a, &c));
        let d = LogicalForm::parse(
            "boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 4 ) AND theme ( 2 , 1 )",
        )
        .unwrap();
        assert!(!sem_equal(&a, &d));
    }

    #[test]
    fn sem_with_repeated_labels() {
        let a = LogicalForm::parse(
            "* girl ( 1 ) ; * girl ( 4 ) ; like ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )",
        )
        .unwrap();
        let b = LogicalForm::parse(
            "* girl ( 7 ) ; * girl ( 2 ) ; like ( 5 ) AND agent ( 5 , 7 ) AND theme ( 5 , 2 )",
        )
        .unwrap();
        assert!(sem_equal(&a, &b));
    }

    #[test]
    fn graph_reverses_agent() {
        let g = LogicalForm::parse(BABY).unwrap().to_graph();
        assert!(g.edges.contains(&(1, 5, "agent".into())));
        assert!(g.edges.contains(&(5, 7, "theme".into())));
        assert!(g.edges.contains(&(1, 4, "nmod.beside".into())));
        assert_eq!(g.nodes[&1], ("baby".to_string(), true));
    }

    #[test]
    fn exact_match_normalizes_whitespace() {
        assert!(string_exact_match(
            "a ( 1 )  ;  b ( 2 )",
            "a ( 1 ) ; b ( 2 )"
        ));
        assert!(!string_exact_match("a ( 1 )", "a ( 2 )"));
    }
}
