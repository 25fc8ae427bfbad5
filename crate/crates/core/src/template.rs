//! Sentence-frame templates: skeleton patterns and relation layouts.

use std::fmt;

use crate::lexicon::PosCode;
use crate::lf::Relation;

/// One skeleton element. A skeleton is the clause with determiners,
/// prepositional phrases and punctuation removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Noun,
    Lit(PosCode),
    Verb(PosCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Agent,
    Theme,
    Recipient,
    Xcomp,
    Ccomp,
}

impl Role {
    pub fn relation(self) -> Relation {
        match self {
            Role::Agent => Relation::Agent,
            Role::Theme => Relation::Theme,
            Role::Recipient => Relation::Recipient,
            Role::Xcomp => Relation::Xcomp,
            Role::Ccomp => Relation::Ccomp,
        }
    }
}

/// Where a relation's right argument comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `-1` is the nearest noun left of the clause's first verb,
    /// `+k` the k-th noun to its right.
    Noun(i8),
    /// The second verb of the clause.
    NextVerb,
    /// The first verb of the following clause.
    NextClause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Template {
    VTransOmissiblePpP1,
    VTransOmissibleP1,
    VTransOmissibleP2,
    VTransOmissiblePpP2,
    VTransNotOmissible,
    VTransNotOmissiblePpP1,
    VTransNotOmissiblePpP2,
    VUnaccP1,
    VUnaccPpP1,
    VUnaccPpP2,
    VInfTaking,
    VUnerg,
    VUnaccP2,
    VDatP1,
    VDatP2,
    VDatPpP3,
    VDatPpP4,
    VDatPpP2,
    VDatPpP1,
    VCpTaking,
}

use PosCode as P;
use Slot::{Lit, Noun, Verb};
use Template::*;

/// Clause-final templates in check order; a later match overrides an earlier one.
pub const CHECK_ORDER: [Template; 19] = [
    VTransOmissiblePpP1,
    VTransOmissibleP1,
    VTransOmissibleP2,
    VTransOmissiblePpP2,
    VTransNotOmissible,
    VTransNotOmissiblePpP1,
    VTransNotOmissiblePpP2,
    VUnaccP1,
    VUnaccPpP1,
    VUnaccPpP2,
    VInfTaking,
    VUnerg,
    VUnaccP2,
    VDatP1,
    VDatP2,
    VDatPpP3,
    VDatPpP4,
    VDatPpP2,
    VDatPpP1,
];

const WAS: Slot = Lit(P::Was);
const BY: Slot = Lit(P::By);
const TO: Slot = Lit(P::To);

const A: Role = Role::Agent;
const T: Role = Role::Theme;
const R: Role = Role::Recipient;

const SUBJ: Target = Target::Noun(-1);
const OBJ1: Target = Target::Noun(1);
const OBJ2: Target = Target::Noun(2);

impl Template {
    pub fn all() -> impl Iterator<Item = Template> {
        CHECK_ORDER.into_iter().chain(std::iter::once(VCpTaking))
    }

    pub fn name(self) -> &'static str {
        match self {
            VTransOmissiblePpP1 => "v_trans_omissible_pp_p1",
            VTransOmissibleP1 => "v_trans_omissible_p1",
            VTransOmissibleP2 => "v_trans_omissible_p2",
            VTransOmissiblePpP2 => "v_trans_omissible_pp_p2",
            VTransNotOmissible => "v_trans_not_omissible",
            VTransNotOmissiblePpP1 => "v_trans_not_omissible_pp_p1",
            VTransNotOmissiblePpP2 => "v_trans_not_omissible_pp_p2",
            VUnaccP1 => "v_unacc_p1",
            VUnaccPpP1 => "v_unacc_pp_p1",
            VUnaccPpP2 => "v_unacc_pp_p2",
            VInfTaking => "v_inf_taking",
            VUnerg => "v_unerg",
            VUnaccP2 => "v_unacc_p2",
            VDatP1 => "v_dat_p1",
            VDatP2 => "v_dat_p2",
            VDatPpP3 => "v_dat_pp_p3",
            VDatPpP4 => "v_dat_pp_p4",
            VDatPpP2 => "v_dat_pp_p2",
            VDatPpP1 => "v_dat_pp_p1",
            VCpTaking => "v_cp_taking",
        }
    }

    pub fn from_name(name: &str) -> Option<Template> {
        Template::all().find(|t| t.name() == name)
    }

    pub fn skeleton(self) -> &'static [Slot] {
        match self {
            VTransOmissiblePpP1 => &[Noun, WAS, Verb(P::VTransOmissiblePp)],
            VTransOmissibleP1 => &[Noun, Verb(P::VTransOmissible)],
            VTransOmissibleP2 => &[Noun, Verb(P::VTransOmissible), Noun],
            VTransOmissiblePpP2 => &[Noun, WAS, Verb(P::VTransOmissiblePp), BY, Noun],
            VTransNotOmissible => &[Noun, Verb(P::VTransNotOmissible), Noun],
            VTransNotOmissiblePpP1 => &[Noun, WAS, Verb(P::VTransNotOmissiblePp)],
            VTransNotOmissiblePpP2 => &[Noun, WAS, Verb(P::VTransNotOmissiblePp), BY, Noun],
            VUnaccP1 => &[Noun, Verb(P::VUnacc), Noun],
            VUnaccPpP1 => &[Noun, WAS, Verb(P::VUnaccPp)],
            VUnaccPpP2 => &[Noun, WAS, Verb(P::VUnaccPp), BY, Noun],
            VInfTaking => &[Noun, Verb(P::VInfTaking), TO, Verb(P::VInf)],
            VUnerg => &[Noun, Verb(P::VUnerg)],
            VUnaccP2 => &[Noun, Verb(P::VUnacc)],
            VDatP1 => &[Noun, Verb(P::VDat), Noun, TO, Noun],
            VDatP2 => &[Noun, Verb(P::VDat), Noun, Noun],
            VDatPpP3 => &[Noun, WAS, Verb(P::VDatPp), Noun],
            VDatPpP4 => &[Noun, WAS, Verb(P::VDatPp), Noun, BY, Noun],
            VDatPpP2 => &[Noun, WAS, Verb(P::VDatPp), TO, Noun, BY, Noun],
            VDatPpP1 => &[Noun, WAS, Verb(P::VDatPp), TO, Noun],
            VCpTaking => &[Noun, Verb(P::VCpTaking)],
        }
    }

    /// Verbs introduced by this frame (two for `np v_inf_taking to v_inf`).
    pub fn verb_count(self) -> usize {
        if self == VInfTaking {
            2
        } else {
            1
        }
    }

    /// Relations anchored at the frame's `verb`-th verb (0-based), in
    /// output order.
    pub fn relations(self, verb: usize) -> &'static [(Role, Target)] {
        match (self, verb) {
            (VInfTaking, 0) => &[(A, SUBJ), (Role::Xcomp, Target::NextVerb)],
            (VInfTaking, _) => &[(A, SUBJ)],
            (_, v) if v > 0 => &[],
            (VUnerg | VTransOmissibleP1, _) => &[(A, SUBJ)],
            (VTransOmissibleP2 | VTransNotOmissible | VUnaccP1, _) => &[(A, SUBJ), (T, OBJ1)],
            (VUnaccP2 | VTransOmissiblePpP1 | VTransNotOmissiblePpP1 | VUnaccPpP1, _) => {
                &[(T, SUBJ)]
            }
            (VTransOmissiblePpP2 | VTransNotOmissiblePpP2 | VUnaccPpP2, _) => {
                &[(T, SUBJ), (A, OBJ1)]
            }
            (VCpTaking, _) => &[(A, SUBJ), (Role::Ccomp, Target::NextClause)],
            (VDatP1, _) => &[(A, SUBJ), (T, OBJ1), (R, OBJ2)],
            (VDatP2, _) => &[(A, SUBJ), (R, OBJ1), (T, OBJ2)],
            (VDatPpP1, _) => &[(T, SUBJ), (R, OBJ1)],
            (VDatPpP2, _) => &[(T, SUBJ), (R, OBJ1), (A, OBJ2)],
            (VDatPpP3, _) => &[(R, SUBJ), (T, OBJ1)],
            (VDatPpP4, _) => &[(R, SUBJ), (T, OBJ1), (A, OBJ2)],
        }
    }

    /// Output slots the frame occupies after its first verb intro: one per
    /// relation, plus the second verb and its relation for the
    /// infinitival frame.
    pub fn template_size(self) -> usize {
        match self {
            VInfTaking => 5,
            t => t.relations(0).len(),
        }
    }

    /// Role of the first relation.
    pub fn first_role(self) -> Role {
        self.relations(0)[0].0
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_reference_table() {
        let table = [
            ("v_trans_omissible_p1", 1),
            ("v_trans_omissible_p2", 2),
            ("v_trans_omissible_pp_p1", 1),
            ("v_trans_omissible_pp_p2", 2),
            ("v_trans_not_omissible", 2),
            ("v_trans_not_omissible_pp_p1", 1),
            ("v_trans_not_omissible_pp_p2", 2),
            ("v_cp_taking", 2),
            ("v_inf_taking", 5),
            ("v_unacc_p1", 2),
            ("v_unacc_p2", 1),
            ("v_unacc_pp_p1", 1),
            ("v_unacc_pp_p2", 2),
            ("v_unerg", 1),
            ("v_dat_p1", 3),
            ("v_dat_p2", 3),
            ("v_dat_pp_p1", 2),
            ("v_dat_pp_p2", 3),
            ("v_dat_pp_p3", 2),
            ("v_dat_pp_p4", 3),
        ];
        assert_eq!(table.len(), Template::all().count());
        for (name, size) in table {
            assert_eq!(
                Template::from_name(name).unwrap().template_size(),
                size,
                "{name}"
            );
        }
    }

    #[test]
    fn first_roles_match_reference_table() {
        let agent = [
            "v_trans_omissible_p1",
            "v_trans_omissible_p2",
            "v_trans_not_omissible",
            "v_cp_taking",
            "v_inf_taking",
            "v_unacc_p1",
            "v_unerg",
            "v_dat_p1",
            "v_dat_p2",
        ];
        let theme = [
            "v_trans_omissible_pp_p1",
            "v_trans_omissible_pp_p2",
            "v_trans_not_omissible_pp_p1",
            "v_trans_not_omissible_pp_p2",
            "v_unacc_p2",
            "v_unacc_pp_p1",
            "v_unacc_pp_p2",
            "v_dat_pp_p1",
            "v_dat_pp_p2",
        ];
        let recipient = ["v_dat_pp_p3", "v_dat_pp_p4"];
        for (names, role) in [
            (&agent[..], Role::Agent),
            (&theme[..], Role::Theme),
            (&recipient[..], Role::Recipient),
        ] {
            for n in names {
                assert_eq!(Template::from_name(n).unwrap().first_role(), role, "{n}");
            }
        }
    }

    #[test]
    fn noun_slots_follow_skeleton_nouns() {
        for t in Template::all() {
            let nouns_after = t
                .skeleton()
                .iter()
                .skip(2)
                .filter(|s| **s == Slot::Noun)
                .count() as i8;
            for v in 0..t.verb_count() {
                for (_, target) in t.relations(v) {
                    if let Target::Noun(k) = target {
                        assert!(*k == -1 || (1..=nouns_after).contains(k), "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn skeletons_are_distinct() {
        let all: Vec<Template> = Template::all().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a.skeleton(), b.skeleton(), "{a} vs {b}");
            }
        }
    }
}
