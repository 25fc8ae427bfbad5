//! Logical forms computed by walking a derivation tree.
//!
//! This is the hierarchical reference the flat decoder is checked against:
//! arguments are found as tree constituents, never by counting positions.

use std::collections::BTreeMap;

use thiserror::Error;

use super::ParseTree;
use crate::lexicon::Lexicon;
use crate::lf::{Atom, Intro, LfError, LogicalForm, Relation, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("unexpected node `{found}` under `{parent}`")]
    Shape { parent: String, found: String },
    #[error("node `{0}` is missing a child")]
    MissingChild(String),
    #[error(transparent)]
    Lf(#[from] LfError),
}

/// The positional logical form for `tree`: noun intros first, then each
/// verb's intro and relations and each noun modifier, ordered by anchor
/// position.
pub fn lf_oracle(tree: &ParseTree, lexicon: &Lexicon) -> Result<LogicalForm, OracleError> {
    let mut w = Walker {
        lexicon,
        nouns: Vec::new(),
        groups: BTreeMap::new(),
    };
    w.clause(tree)?;
    w.nouns.sort_by_key(|i| i.index);
    let conjuncts = w.groups.into_values().flatten().collect();
    Ok(LogicalForm::from_sections(
        w.nouns.into_iter().map(Term::Intro).collect(),
        conjuncts,
    )?)
}

struct Walker<'a> {
    lexicon: &'a Lexicon,
    nouns: Vec<Intro>,
    groups: BTreeMap<usize, Vec<Term>>,
}

fn shape(parent: &ParseTree, found: &ParseTree) -> OracleError {
    OracleError::Shape {
        parent: parent.label.clone(),
        found: found.label.clone(),
    }
}

fn nth(node: &ParseTree, i: usize) -> Result<&ParseTree, OracleError> {
    node.children
        .get(i)
        .ok_or_else(|| OracleError::MissingChild(node.label.clone()))
}

fn leaf_word(node: &ParseTree) -> Result<&str, OracleError> {
    node.word
        .as_deref()
        .ok_or_else(|| OracleError::MissingChild(node.label.clone()))
}

impl Walker<'_> {
    /// Walks a `start` node; returns the position of its main verb.
    fn clause(&mut self, start: &ParseTree) -> Result<usize, OracleError> {
        let s = nth(start, 0)?;
        if s.label == "vp_internal" {
            let subj = self.np(nth(s, 0)?)?;
            let v = self.verb(nth(s, 1)?)?;
            self.relate(v, &[(Relation::Theme, subj)]);
            return Ok(v);
        }
        let subj = self.np(nth(s, 0)?)?;
        let vp = nth(s, 1)?;
        match s.label.as_str() {
            "s1" => self.active(subj, vp),
            "s2" | "s3" => self.passive(subj, nth(vp, 0)?),
            "s4" => {
                let v = self.verb(nth(vp, 0)?)?;
                let inf = self.verb(nth(vp, 2)?)?;
                self.relate(v, &[(Relation::Agent, subj), (Relation::Xcomp, inf)]);
                self.relate(inf, &[(Relation::Agent, subj)]);
                Ok(v)
            }
            _ => Err(shape(start, s)),
        }
    }

    fn active(&mut self, subj: usize, vp_external: &ParseTree) -> Result<usize, OracleError> {
        use Relation::*;
        let vp = nth(vp_external, 0)?;
        if vp.is_leaf() {
            let v = self.verb(vp)?;
            self.relate(v, &[(Agent, subj)]);
            return Ok(v);
        }
        let v = self.verb(nth(vp, 0)?)?;
        let rels: Vec<(Relation, usize)> = match vp.label.as_str() {
            "vp_external1" | "vp_external2" | "vp_external3" => {
                vec![(Agent, subj), (Theme, self.np(nth(vp, 1)?)?)]
            }
            "vp_external5" => {
                let comp = self.clause(nth(vp, 2)?)?;
                vec![(Agent, subj), (Ccomp, comp)]
            }
            "vp_external6" => {
                let theme = self.np(nth(vp, 1)?)?;
                let recipient = self.pp_iobj(nth(vp, 2)?)?;
                vec![(Agent, subj), (Theme, theme), (Recipient, recipient)]
            }
            "vp_external7" => {
                let recipient = self.np(nth(vp, 1)?)?;
                let theme = self.np(nth(vp, 2)?)?;
                vec![(Agent, subj), (Recipient, recipient), (Theme, theme)]
            }
            _ => return Err(shape(vp_external, vp)),
        };
        self.relate(v, &rels);
        Ok(v)
    }

    /// `vp` is a `vp_passiveN` or `vp_passive_datN` node; child 0 is `was`.
    fn passive(&mut self, subj: usize, vp: &ParseTree) -> Result<usize, OracleError> {
        use Relation::*;
        let v = self.verb(nth(vp, 1)?)?;
        let rels: Vec<(Relation, usize)> = match vp.label.as_str() {
            "vp_passive1" | "vp_passive3" | "vp_passive5" => vec![(Theme, subj)],
            "vp_passive2" | "vp_passive4" | "vp_passive6" => {
                vec![(Theme, subj), (Agent, self.np(nth(vp, 3)?)?)]
            }
            "vp_passive7" => vec![(Theme, subj), (Recipient, self.pp_iobj(nth(vp, 2)?)?)],
            "vp_passive8" => {
                let recipient = self.pp_iobj(nth(vp, 2)?)?;
                vec![
                    (Theme, subj),
                    (Recipient, recipient),
                    (Agent, self.np(nth(vp, 4)?)?),
                ]
            }
            "vp_passive_dat1" => vec![(Recipient, subj), (Theme, self.np(nth(vp, 2)?)?)],
            "vp_passive_dat2" => {
                let theme = self.np(nth(vp, 2)?)?;
                vec![
                    (Recipient, subj),
                    (Theme, theme),
                    (Agent, self.np(nth(vp, 4)?)?),
                ]
            }
            _ => {
                return Err(OracleError::Shape {
                    parent: "vp_passive".into(),
                    found: vp.label.clone(),
                })
            }
        };
        self.relate(v, &rels);
        Ok(v)
    }

    fn pp_iobj(&mut self, node: &ParseTree) -> Result<usize, OracleError> {
        self.np(nth(node, 1)?)
    }

    /// Records a noun phrase's nouns and modifiers; returns its head position.
    fn np(&mut self, np: &ParseTree) -> Result<usize, OracleError> {
        let inner = nth(np, 0)?;
        match inner.label.as_str() {
            "np_prop" => {
                let leaf = nth(inner, 0)?;
                self.noun(leaf, false)
            }
            "np_det" => self.np_det(inner),
            "np_pp" => {
                let head = self.np_det(nth(inner, 0)?)?;
                let pp = leaf_word(nth(inner, 1)?)?.to_string();
                let object = self.np(nth(inner, 2)?)?;
                let atom = Atom {
                    relation: Relation::Nmod(pp),
                    left: head,
                    right: object,
                };
                self.groups.entry(head).or_default().push(Term::Atom(atom));
                Ok(head)
            }
            _ => Err(shape(np, inner)),
        }
    }

    fn np_det(&mut self, node: &ParseTree) -> Result<usize, OracleError> {
        let definite = leaf_word(nth(node, 0)?)? == "the";
        self.noun(nth(node, 1)?, definite)
    }

    fn noun(&mut self, leaf: &ParseTree, definite: bool) -> Result<usize, OracleError> {
        let index = leaf.span.start;
        self.nouns.push(Intro {
            label: leaf_word(leaf)?.to_string(),
            definite,
            index,
        });
        Ok(index)
    }

    fn verb(&mut self, leaf: &ParseTree) -> Result<usize, OracleError> {
        let index = leaf.span.start;
        let label = self.lexicon.normalize_nv(leaf_word(leaf)?).to_string();
        self.groups.entry(index).or_default().insert(
            0,
            Term::Intro(Intro {
                label,
                definite: false,
                index,
            }),
        );
        Ok(index)
    }

    fn relate(&mut self, verb: usize, rels: &[(Relation, usize)]) {
        let group = self.groups.entry(verb).or_default();
        for (relation, right) in rels {
            group.push(Term::Atom(Atom {
                relation: relation.clone(),
                left: verb,
                right: *right,
            }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sentence;

    fn oracle(s: &str) -> String {
        let lex = Lexicon::embedded();
        lf_oracle(&parse_sentence(s, lex).unwrap(), lex)
            .unwrap()
            .to_string()
    }

    #[test]
    fn reference_forms() {
        assert_eq!(
            oracle("a boy painted the girl"),
            "boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )"
        );
        assert_eq!(
            oracle("The baby beside a valve painted the cake ."),
            "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 4 ) AND paint ( 5 ) AND agent ( 5 , 1 ) AND theme ( 5 , 7 )"
        );
        assert_eq!(
            oracle("A girl on the stool on the table drew a frog ."),
            "girl ( 1 ) ; * stool ( 4 ) ; * table ( 7 ) ; frog ( 10 ) ; nmod . on ( 1 , 4 ) AND nmod . on ( 4 , 7 ) AND draw ( 8 ) AND agent ( 8 , 1 ) AND theme ( 8 , 10 )"
        );
    }

    #[test]
    fn frames_with_two_verbs() {
        assert_eq!(
            oracle("the girl needed to cook"),
            "* girl ( 1 ) ; need ( 2 ) AND agent ( 2 , 1 ) AND xcomp ( 2 , 4 ) AND cook ( 4 ) AND agent ( 4 , 1 )"
        );
        assert_eq!(
            oracle("the girl noticed that a boy painted the girl"),
            "* girl ( 1 ) ; boy ( 5 ) ; * girl ( 8 ) ; notice ( 2 ) AND agent ( 2 , 1 ) AND ccomp ( 2 , 6 ) AND paint ( 6 ) AND agent ( 6 , 5 ) AND theme ( 6 , 8 )"
        );
    }

    #[test]
    fn dative_and_passive() {
        assert_eq!(
            oracle("ella sold a customer a car"),
            "ella ( 0 ) ; customer ( 3 ) ; car ( 5 ) ; sell ( 1 ) AND agent ( 1 , 0 ) AND recipient ( 1 , 3 ) AND theme ( 1 , 5 )"
        );
        assert_eq!(
            oracle("the girl was painted by a boy"),
            "* girl ( 1 ) ; boy ( 6 ) ; paint ( 3 ) AND theme ( 3 , 1 ) AND agent ( 3 , 6 )"
        );
        assert_eq!(
            oracle("the car was sold to the customer by ella"),
            "* car ( 1 ) ; * customer ( 6 ) ; ella ( 8 ) ; sell ( 3 ) AND theme ( 3 , 1 ) AND recipient ( 3 , 6 ) AND agent ( 3 , 8 )"
        );
    }
}
