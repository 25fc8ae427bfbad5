//! Verb-frame lookup and attraction-error prediction on parse trees.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ParseTree;
use crate::lf::{sem_equal, Atom, Intro, LogicalForm, Relation};

/// Verb types whose agent is the noun phrase left of the verb.
pub const AGENT_LEFT_OF_VERB: [&str; 10] = [
    "v_trans_omissible_p1",
    "v_trans_omissible_p2",
    "v_trans_not_omissible",
    "v_cp_taking",
    "v_inf_taking",
    "v_unacc_p1",
    "v_unerg",
    "v_inf",
    "v_dat_p1",
    "v_dat_p2",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("sentence has a sentential complement")]
    HasComplement,
    #[error("tree has no verb")]
    NoVerb,
    #[error("agent is not left of the verb")]
    AgentNotLeft,
    #[error("subject is not modified by a prepositional phrase")]
    SubjectUnmodified,
    #[error("logical forms are semantically equal")]
    NoError,
}

/// A verb leaf: its category label and input position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbLeaf {
    pub label: String,
    pub position: usize,
}

/// Verb leaves found by a stack walk that pops the last pushed child first,
/// so verbs come out from the end of the sentence.
pub fn get_verbs(tree: &ParseTree) -> Vec<VerbLeaf> {
    let mut stack = vec![tree];
    let mut out = Vec::new();
    while let Some(node) = stack.pop() {
        if node.label.starts_with("v_") {
            out.push(VerbLeaf {
                label: node.label.clone(),
                position: node.span.start,
            });
        }
        stack.extend(node.children.iter());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentSide {
    Left,
    RightOrMiddle,
}

impl fmt::Display for AgentSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentSide::Left => "left",
            AgentSide::RightOrMiddle => "right or middle",
        })
    }
}

pub fn get_agent_side(tree: &ParseTree) -> Result<AgentSide, AnalysisError> {
    if tree.cp_depth() > 0 {
        return Err(AnalysisError::HasComplement);
    }
    let verbs = get_verbs(tree);
    let first = verbs.first().ok_or(AnalysisError::NoVerb)?;
    Ok(if AGENT_LEFT_OF_VERB.contains(&first.label.as_str()) {
        AgentSide::Left
    } else {
        AgentSide::RightOrMiddle
    })
}

/// Position of the noun a nearest-noun heuristic would take as agent: the
/// last noun before the verb, inside the subject's prepositional phrases.
pub fn predict_attraction_error(tree: &ParseTree) -> Result<usize, AnalysisError> {
    if get_agent_side(tree)? != AgentSide::Left {
        return Err(AnalysisError::AgentNotLeft);
    }
    let clause = tree.children.first().ok_or(AnalysisError::NoVerb)?;
    let subject = clause.children.first().ok_or(AnalysisError::NoVerb)?;
    if subject.children.first().is_none_or(|c| c.label != "np_pp") {
        return Err(AnalysisError::SubjectUnmodified);
    }
    subject
        .leaves()
        .into_iter()
        .filter(|l| l.label == "common_noun" || l.label == "proper_noun")
        .map(|l| l.span.start)
        .max()
        .ok_or(AnalysisError::SubjectUnmodified)
}

/// How an output differs from the expected logical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorDescriptor {
    pub missing: BTreeSet<Atom>,
    pub extra: BTreeSet<Atom>,
    /// Intros differ (labels, definiteness or positions).
    pub intros_differ: bool,
    /// Exactly one atom replaced by one other atom, intros unchanged.
    pub single_atom: bool,
    /// Relation of the replaced atom.
    pub relation: Option<Relation>,
    /// Right argument of the replacing atom.
    pub wrong_index: Option<usize>,
    pub matches_prediction: Option<bool>,
}

/// Compares positional logical forms. `prediction` is an attraction
/// prediction to test the wrong index against.
pub fn classify_error(
    expected: &LogicalForm,
    actual: &LogicalForm,
    prediction: Option<usize>,
) -> Result<ErrorDescriptor, AnalysisError> {
    if sem_equal(expected, actual) {
        return Err(AnalysisError::NoError);
    }
    let atoms = |lf: &LogicalForm| lf.atoms().cloned().collect::<BTreeSet<Atom>>();
    let intros = |lf: &LogicalForm| {
        let mut v: Vec<Intro> = lf.intros().cloned().collect();
        v.sort_by_key(|i| i.index);
        v
    };
    let (e, a) = (atoms(expected), atoms(actual));
    let missing: BTreeSet<Atom> = e.difference(&a).cloned().collect();
    let extra: BTreeSet<Atom> = a.difference(&e).cloned().collect();
    let intros_differ = intros(expected) != intros(actual);
    let pair = match (missing.iter().next(), extra.iter().next()) {
        (Some(m), Some(x)) if missing.len() == 1 && extra.len() == 1 => Some((m, x)),
        _ => None,
    };
    let single_atom = pair.is_some() && !intros_differ;
    let relation = pair.map(|(m, _)| m.relation.clone());
    let wrong_index = pair.map(|(_, x)| x.right);
    let matches_prediction = prediction.map(|p| wrong_index == Some(p));
    Ok(ErrorDescriptor {
        missing,
        extra,
        intros_differ,
        single_atom,
        relation,
        wrong_index,
        matches_prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sentence;
    use crate::lexicon::Lexicon;

    fn tree(s: &str) -> ParseTree {
        parse_sentence(s, Lexicon::embedded()).unwrap()
    }

    #[test]
    fn verbs_from_the_end() {
        let v = get_verbs(&tree("the girl needed to cook"));
        let labels: Vec<&str> = v.iter().map(|v| v.label.as_str()).collect();
        assert_eq!(labels, ["v_inf", "v_inf_taking"]);
        assert_eq!(v[0].position, 4);
    }

    #[test]
    fn agent_sides() {
        assert_eq!(
            get_agent_side(&tree("a boy painted the girl")),
            Ok(AgentSide::Left)
        );
        assert_eq!(
            get_agent_side(&tree("the girl was painted by a boy")),
            Ok(AgentSide::RightOrMiddle)
        );
        assert_eq!(
            get_agent_side(&tree("the flower grew")),
            Ok(AgentSide::RightOrMiddle)
        );
        assert_eq!(
            get_agent_side(&tree("the girl noticed that a boy painted the girl")),
            Err(AnalysisError::HasComplement)
        );
    }

    #[test]
    fn attraction_predictions() {
        assert_eq!(
            predict_attraction_error(&tree("The baby beside a valve painted the cake .")),
            Ok(4)
        );
        assert_eq!(
            predict_attraction_error(&tree("A girl on the stool on the table drew a frog .")),
            Ok(7)
        );
        assert_eq!(
            predict_attraction_error(&tree("a boy painted the girl")),
            Err(AnalysisError::SubjectUnmodified)
        );
        assert_eq!(
            predict_attraction_error(&tree("the flower grew")),
            Err(AnalysisError::AgentNotLeft)
        );
    }

    #[test]
    fn classification() {
        let expected = LogicalForm::parse(
            "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 4 ) AND paint ( 5 ) AND agent ( 5 , 1 ) AND theme ( 5 , 7 )",
        )
        .unwrap();
        let actual = LogicalForm::parse(
            "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 4 ) AND paint ( 5 ) AND agent ( 5 , 4 ) AND theme ( 5 , 7 )",
        )
        .unwrap();
        let d = classify_error(&expected, &actual, Some(4)).unwrap();
        assert!(d.single_atom);
        assert_eq!(d.relation, Some(Relation::Agent));
        assert_eq!(d.matches_prediction, Some(true));

        let two = LogicalForm::parse(
            "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 7 ) AND paint ( 5 ) AND agent ( 5 , 4 ) AND theme ( 5 , 7 )",
        )
        .unwrap();
        let d = classify_error(&expected, &two, Some(4)).unwrap();
        assert!(!d.single_atom);
        assert_eq!(d.missing.len(), 2);
        assert_eq!(
            classify_error(&expected, &expected, None),
            Err(AnalysisError::NoError)
        );
    }
}
