//! Output-side program: one logical-form token per step, computed from the
//! combined `input | output` sequence.
//!
//! Output layout: noun intros in position order (`[*] noun ( i ) ;`), then
//! conjuncts joined by `AND`. Conjuncts are grouped by anchor position: a verb
//! anchor emits its intro and then its relations, a noun followed by a
//! preposition emits one `nmod` atom.

use std::fmt;

use thiserror::Error;

use crate::encoder::{encode, running_rank, EncodeError, EncoderState};
use crate::lexicon::Lexicon;
use crate::lf::{LfError, LogicalForm, Relation};
use crate::seq::{
    aggregate, aggregate_sum, elementwise, indicator, indices, select, select_all, selector_width,
    BinaryOp, Predicate::*, SeqError, Sequence, Value, DEFAULT_MAX_LEN,
};
use crate::template::{Role, Target};

/// Separates input from output in the combined sequence.
pub const PIPE: &str = "|";

pub const DEFAULT_MAX_STEPS: usize = 400;

const INTRO_LEN: usize = 5;
const VERB_INTRO_LEN: usize = 4;
const ATOM_LEN: usize = 6;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("sequence op failed: {0}")]
    Seq(#[from] SeqError),
    #[error("no end marker after {0} steps")]
    MaxSteps(usize),
    #[error("combined sequence would exceed max length {0}")]
    TooLong(usize),
    #[error("decoder state is inconsistent: {0}")]
    Inconsistent(String),
    #[error("relation {role:?} of verb at {verb} has no argument")]
    Unresolved { role: Role, verb: usize },
    #[error("decoded output does not parse: {0}")]
    Output(#[from] LfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeConfig {
    pub max_len: usize,
    pub max_steps: usize,
    /// Count relation arguments over all nouns, including those inside
    /// prepositional phrases.
    pub ablate_no_pp_rule: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            max_len: DEFAULT_MAX_LEN,
            max_steps: DEFAULT_MAX_STEPS,
            ablate_no_pp_rule: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LfToken {
    Word(String),
    Star,
    Open,
    Close,
    Comma,
    Semi,
    And,
    Rel(Relation),
    Index(usize),
    End,
}

impl fmt::Display for LfToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LfToken::Word(w) => f.write_str(w),
            LfToken::Star => f.write_str("*"),
            LfToken::Open => f.write_str("("),
            LfToken::Close => f.write_str(")"),
            LfToken::Comma => f.write_str(","),
            LfToken::Semi => f.write_str(";"),
            LfToken::And => f.write_str("AND"),
            LfToken::Rel(r) => write!(f, "{r}"),
            LfToken::Index(i) => write!(f, "{i}"),
            LfToken::End => f.write_str("<end>"),
        }
    }
}

fn is_relation_token(t: &str) -> bool {
    Relation::from_name(t).is_some()
}

fn is_nmod_token(t: &str) -> bool {
    t.starts_with("nmod . ")
}

/// `input | output-so-far`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderState {
    combined: Vec<String>,
}

impl DecoderState {
    pub fn new<S: AsRef<str>>(input: &[S]) -> DecoderState {
        let mut combined: Vec<String> = input.iter().map(|t| t.as_ref().to_string()).collect();
        combined.push(PIPE.to_string());
        DecoderState { combined }
    }

    pub fn combined(&self) -> &[String] {
        &self.combined
    }

    pub fn output(&self) -> &[String] {
        let pipe = self
            .combined
            .iter()
            .position(|t| t == PIPE)
            .expect("state holds a separator");
        &self.combined[pipe + 1..]
    }

    pub fn push(&mut self, token: &LfToken) {
        self.combined.push(token.to_string());
    }
}

/// Counts read off the combined sequence at the last position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCounters {
    pub nouns_in_input: usize,
    pub pps_in_input: usize,
    /// Completed noun intros (one `;` each).
    pub nouns_in_output: usize,
    pub relations_in_output: usize,
    pub nmods_in_output: usize,
    pub ands_in_output: usize,
    pub stars_in_output: usize,
    pub output_len: usize,
}

/// Per-sentence tables derived from the encoder, indexed by input position.
#[derive(Debug, Clone)]
pub struct DecoderProgram<'a> {
    pub enc: EncoderState,
    lexicon: &'a Lexicon,
    ablate: bool,
    idx: Sequence,
    noun_rank: Sequence,
    n_nouns: usize,
    /// Conjuncts contributed by each anchor position.
    width: Sequence,
    /// Conjuncts before each anchor.
    conj_start: Sequence,
    /// Output tokens (including `AND`s) before each anchor's first conjunct.
    tok_start: Sequence,
    total_conjuncts: usize,
    /// Nouns that may fill relation slots.
    candidates: Sequence,
}

impl<'a> DecoderProgram<'a> {
    pub fn new(
        enc: EncoderState,
        lexicon: &'a Lexicon,
        ablate: bool,
    ) -> Result<DecoderProgram<'a>, DecodeError> {
        let n = enc.len();
        let idx = indices(n);
        let noun_rank = running_rank(&enc.noun_mask)?;
        let n_nouns = selector_width(&select(&enc.noun_mask, 1.0, Eq)?).index_at(0);

        // a noun directly followed by a preposition anchors an nmod atom
        let prev = idx.map(|x| x - 1.0);
        let nmod_anchor = aggregate(
            &select(&enc.pp_mask, 1.0, Eq)?.and(&select(&prev, &idx, Eq)?)?,
            1.0,
        )?;

        let mut rel_count = vec![0.0; n];
        for c in &enc.clauses {
            for (k, &v) in c.verbs.iter().enumerate() {
                rel_count[v] = c.template.relations(k).len() as f64;
            }
        }
        let rel_count = Sequence::Num(rel_count);
        let verb_width = elementwise(BinaryOp::Mul, &enc.verb_mask, &rel_count.map(|r| r + 1.0))?;
        let width = elementwise(BinaryOp::Add, &verb_width, &nmod_anchor)?;
        let verb_tokens = elementwise(
            BinaryOp::Mul,
            &enc.verb_mask,
            &rel_count.map(|r| (VERB_INTRO_LEN as f64) + (ATOM_LEN as f64) * r),
        )?;
        let tokens = elementwise(
            BinaryOp::Add,
            &verb_tokens,
            &nmod_anchor.map(|m| m * ATOM_LEN as f64),
        )?;
        // each conjunct but the last is followed by AND
        let tokens_and_seps = elementwise(BinaryOp::Add, &tokens, &width)?;

        let before = select(&idx, &idx, Lt)?;
        let conj_start = aggregate_sum(&before, &width)?;
        let tok_start = aggregate_sum(&before, &tokens_and_seps)?;
        let total_conjuncts = aggregate_sum(&select(&width, 0.0, Ge)?, &width)?.index_at(0);

        let candidates = if ablate {
            enc.noun_mask.clone()
        } else {
            elementwise(BinaryOp::Mul, &enc.noun_mask, &enc.no_pp_np_mask)?
        };
        Ok(DecoderProgram {
            enc,
            lexicon,
            ablate,
            idx,
            noun_rank,
            n_nouns,
            width,
            conj_start,
            tok_start,
            total_conjuncts,
            candidates,
        })
    }

    pub fn is_ablated(&self) -> bool {
        self.ablate
    }

    pub fn total_conjuncts(&self) -> usize {
        self.total_conjuncts
    }

    pub fn nouns(&self) -> usize {
        self.n_nouns
    }

    fn token_at(&self, position: usize) -> Result<String, DecodeError> {
        let toks = Sequence::symbols(&self.enc.tokens);
        let sel = select(&self.idx, position as f64, Eq)?;
        match aggregate(&sel, &toks)?.get(0) {
            Value::Sym(s) if !s.is_empty() => Ok(s),
            _ => Err(DecodeError::Inconsistent(format!(
                "no input token at {position}"
            ))),
        }
    }

    fn is_det_at(&self, position: usize) -> Result<bool, DecodeError> {
        let sel = select(&self.idx, position as f64, Eq)?;
        Ok(aggregate(&sel, &self.enc.det_mask)?.num(0) == 1.0)
    }

    /// The k-th (0-based) noun intro.
    pub fn intro_phase_token(
        &self,
        k: usize,
        offset: usize,
        last_is_star: bool,
    ) -> Result<LfToken, DecodeError> {
        let at = select(&self.noun_rank, (k + 1) as f64, Eq)?;
        let position = aggregate(&at, &self.idx)?.index_at(0);
        Ok(match offset {
            0 => {
                let definite = position > 0 && self.token_at(position - 1)? == "the";
                if definite && !last_is_star {
                    LfToken::Star
                } else {
                    LfToken::Word(
                        self.lexicon
                            .normalize_nv(&self.token_at(position)?)
                            .to_string(),
                    )
                }
            }
            1 => LfToken::Open,
            2 => LfToken::Index(position),
            3 => LfToken::Close,
            4 => LfToken::Semi,
            o => return Err(DecodeError::Inconsistent(format!("intro offset {o}"))),
        })
    }

    /// Verb intro (`sub == 0`) or the `sub`-th relation of the verb at `verb`.
    pub fn relation_phase_token(
        &self,
        verb: usize,
        sub: usize,
        offset: usize,
    ) -> Result<LfToken, DecodeError> {
        if sub == 0 {
            return Ok(match offset {
                0 => LfToken::Word(self.lexicon.normalize_nv(&self.token_at(verb)?).to_string()),
                1 => LfToken::Open,
                2 => LfToken::Index(verb),
                3 => LfToken::Close,
                o => return Err(DecodeError::Inconsistent(format!("verb intro offset {o}"))),
            });
        }
        let clause = self.enc.clause_of(verb);
        let frame = &self.enc.clauses[clause];
        let ordinal = frame
            .verbs
            .iter()
            .position(|&v| v == verb)
            .ok_or_else(|| DecodeError::Inconsistent(format!("{verb} is not a frame verb")))?;
        let (role, target) = *frame
            .template
            .relations(ordinal)
            .get(sub - 1)
            .ok_or_else(|| DecodeError::Inconsistent(format!("relation {sub} of verb {verb}")))?;
        Ok(match offset {
            0 => LfToken::Rel(role.relation()),
            1 => LfToken::Open,
            2 => LfToken::Index(verb),
            3 => LfToken::Comma,
            4 => LfToken::Index(self.right_index(clause, frame.verbs[0], role, target)?),
            5 => LfToken::Close,
            o => return Err(DecodeError::Inconsistent(format!("relation offset {o}"))),
        })
    }

    fn right_index(
        &self,
        clause: usize,
        first_verb: usize,
        role: Role,
        target: Target,
    ) -> Result<usize, DecodeError> {
        let unresolved = || DecodeError::Unresolved {
            role,
            verb: first_verb,
        };
        let in_clause = indicator(&self.enc.clause_ids, Eq, clause as f64)?;
        match target {
            Target::Noun(d) => {
                let cand = elementwise(BinaryOp::Mul, &self.candidates, &in_clause)?;
                let rank = running_rank(&cand)?;
                let upto =
                    select(&cand, 1.0, Eq)?.and(&select(&self.idx, first_verb as f64, Le)?)?;
                let at_verb = selector_width(&upto).num(0);
                let want = if d < 0 {
                    at_verb + 1.0 + d as f64
                } else {
                    at_verb + d as f64
                };
                let hit = select(&rank, want, Eq)?;
                if want < 1.0 || selector_width(&hit).num(0) != 1.0 {
                    return Err(unresolved());
                }
                Ok(aggregate(&hit, &self.idx)?.index_at(0))
            }
            Target::NextVerb => {
                let later = select_all(&[
                    select(&self.enc.verb_mask, 1.0, Eq)?,
                    select(&in_clause, 1.0, Eq)?,
                    select(&self.idx, first_verb as f64, Gt)?,
                ])?;
                if selector_width(&later).num(0) != 1.0 {
                    return Err(unresolved());
                }
                Ok(aggregate(&later, &self.idx)?.index_at(0))
            }
            Target::NextClause => {
                let next = indicator(&self.enc.clause_ids, Eq, (clause + 1) as f64)?;
                let verbs = elementwise(BinaryOp::Mul, &self.enc.verb_mask, &next)?;
                let first = select(&running_rank(&verbs)?, 1.0, Eq)?;
                if selector_width(&first).num(0) != 1.0 {
                    return Err(unresolved());
                }
                Ok(aggregate(&first, &self.idx)?.index_at(0))
            }
        }
    }

    /// The nmod atom anchored at the noun at `anchor`.
    pub fn nmod_phase_token(&self, anchor: usize, offset: usize) -> Result<LfToken, DecodeError> {
        let pp = anchor + 1;
        Ok(match offset {
            0 => LfToken::Rel(Relation::Nmod(self.token_at(pp)?)),
            1 => LfToken::Open,
            2 => LfToken::Index(anchor),
            3 => LfToken::Comma,
            4 => LfToken::Index(pp + 1 + usize::from(self.is_det_at(pp + 1)?)),
            5 => LfToken::Close,
            o => return Err(DecodeError::Inconsistent(format!("nmod offset {o}"))),
        })
    }

    pub fn counters(&self, state: &DecoderState) -> Result<StepCounters, DecodeError> {
        let toks = Sequence::symbols(state.combined());
        let n = toks.len();
        let idx = indices(n);
        let pipe_pos = aggregate(&select(&toks, PIPE, Eq)?, &idx)?.num(0);
        let out = indicator(&idx, Gt, pipe_pos)?;
        let count = |f: &dyn Fn(&str) -> bool| -> Result<usize, DecodeError> {
            let hits = toks.map_sym(|t| Value::Num(if f(t) { 1.0 } else { 0.0 }))?;
            let hits = elementwise(BinaryOp::Mul, &hits, &out)?;
            Ok(selector_width(&select(&hits, 1.0, Eq)?).index_at(0))
        };
        Ok(StepCounters {
            nouns_in_input: self.n_nouns,
            pps_in_input: selector_width(&select(&self.enc.pp_mask, 1.0, Eq)?).index_at(0),
            nouns_in_output: count(&|t| t == ";")?,
            relations_in_output: count(&|t| is_relation_token(t))?,
            nmods_in_output: count(&|t| is_nmod_token(t))?,
            ands_in_output: count(&|t| t == "AND")?,
            stars_in_output: count(&|t| t == "*")?,
            output_len: count(&|_| true)?,
        })
    }

    /// Next output token; `End` once the form is complete.
    pub fn next_token(&self, state: &DecoderState) -> Result<LfToken, DecodeError> {
        let c = self.counters(state)?;
        let last_is_star = state.output().last().is_some_and(|t| t == "*");
        let body = c.output_len - c.stars_in_output;
        if c.nouns_in_output < self.n_nouns {
            let k = c.nouns_in_output;
            return self.intro_phase_token(k, body - INTRO_LEN * k, last_is_star);
        }
        let conj = c.ands_in_output;
        if conj >= self.total_conjuncts {
            return Err(DecodeError::Inconsistent(format!(
                "conjunct {conj} of {}",
                self.total_conjuncts
            )));
        }
        let anchor_sel = select_all(&[
            select(&self.conj_start, conj as f64, Le)?,
            select(
                &elementwise(BinaryOp::Add, &self.conj_start, &self.width)?,
                conj as f64,
                Gt,
            )?,
            select(&self.width, 0.0, Gt)?,
        ])?;
        let anchor = aggregate(&anchor_sel, &self.idx)?.index_at(0);
        let sub = conj - self.conj_start.index_at(anchor);
        let is_verb = self.enc.verb_mask.num(anchor) == 1.0;
        let before = self.tok_start.index_at(anchor)
            + if sub == 0 {
                0
            } else {
                VERB_INTRO_LEN + 1 + (ATOM_LEN + 1) * (sub - 1)
            };
        let offset = body
            .checked_sub(INTRO_LEN * self.n_nouns + before)
            .ok_or_else(|| DecodeError::Inconsistent("output shorter than expected".into()))?;
        let len = if is_verb && sub == 0 {
            VERB_INTRO_LEN
        } else {
            ATOM_LEN
        };
        if offset == len {
            return Ok(if conj + 1 < self.total_conjuncts {
                LfToken::And
            } else {
                LfToken::End
            });
        }
        if is_verb {
            self.relation_phase_token(anchor, sub, offset)
        } else {
            self.nmod_phase_token(anchor, offset)
        }
    }
}

/// Lowercased whitespace tokens.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_lowercase).collect()
}

/// Output tokens for `tokens`, one step at a time.
pub fn decode_tokens<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    config: &DecodeConfig,
) -> Result<Vec<String>, DecodeError> {
    let enc = encode(tokens, lexicon, config.max_len)?;
    let program = DecoderProgram::new(enc, lexicon, config.ablate_no_pp_rule)?;
    let mut state = DecoderState::new(tokens);
    for _ in 0..config.max_steps {
        let tok = program.next_token(&state)?;
        if tok == LfToken::End {
            return Ok(state.output().to_vec());
        }
        if state.combined().len() + 1 > config.max_len {
            return Err(DecodeError::TooLong(config.max_len));
        }
        state.push(&tok);
    }
    Err(DecodeError::MaxSteps(config.max_steps))
}

pub fn decode<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    config: &DecodeConfig,
) -> Result<LogicalForm, DecodeError> {
    let out = decode_tokens(tokens, lexicon, config)?;
    Ok(LogicalForm::parse(&out.join(" "))?)
}

/// Decodes with relation arguments counted over all nouns.
pub fn decode_ablated<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    config: &DecodeConfig,
) -> Result<LogicalForm, DecodeError> {
    decode(
        tokens,
        lexicon,
        &DecodeConfig {
            ablate_no_pp_rule: true,
            ..*config
        },
    )
}

/// Tokenizes and decodes a raw sentence with default settings.
pub fn decode_sentence(sentence: &str, lexicon: &Lexicon) -> Result<LogicalForm, DecodeError> {
    decode(&tokenize(sentence), lexicon, &DecodeConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(s: &str) -> String {
        decode_sentence(s, Lexicon::embedded()).unwrap().to_string()
    }

    #[test]
    fn reference_outputs() {
        assert_eq!(
            lf("the girl was painted by a boy"),
            "* girl ( 1 ) ; boy ( 6 ) ; paint ( 3 ) AND theme ( 3 , 1 ) AND agent ( 3 , 6 )"
        );
        assert_eq!(
            lf("The baby beside a valve painted the cake ."),
            "* baby ( 1 ) ; valve ( 4 ) ; * cake ( 7 ) ; nmod . beside ( 1 , 4 ) AND paint ( 5 ) AND agent ( 5 , 1 ) AND theme ( 5 , 7 )"
        );
        assert_eq!(
            lf("A girl on the stool on the table drew a frog ."),
            "girl ( 1 ) ; * stool ( 4 ) ; * table ( 7 ) ; frog ( 10 ) ; nmod . on ( 1 , 4 ) AND nmod . on ( 4 , 7 ) AND draw ( 8 ) AND agent ( 8 , 1 ) AND theme ( 8 , 10 )"
        );
        assert_eq!(
            lf("the girl needed to cook"),
            "* girl ( 1 ) ; need ( 2 ) AND agent ( 2 , 1 ) AND xcomp ( 2 , 4 ) AND cook ( 4 ) AND agent ( 4 , 1 )"
        );
        assert_eq!(
            lf("ella sold a customer a car"),
            "ella ( 0 ) ; customer ( 3 ) ; car ( 5 ) ; sell ( 1 ) AND agent ( 1 , 0 ) AND recipient ( 1 , 3 ) AND theme ( 1 , 5 )"
        );
        assert_eq!(
            lf("the girl noticed that a boy painted the girl"),
            "* girl ( 1 ) ; boy ( 5 ) ; * girl ( 8 ) ; notice ( 2 ) AND agent ( 2 , 1 ) AND ccomp ( 2 , 6 ) AND paint ( 6 ) AND agent ( 6 , 5 ) AND theme ( 6 , 8 )"
        );
    }

    #[test]
    fn intro_prefix_for_unaccusative() {
        assert!(lf("the flower grew").starts_with("* flower ( 1 ) ; grow ( 2 ) AND"));
    }

    #[test]
    fn ablation_attracts_agent() {
        let lex = Lexicon::embedded();
        let cfg = DecodeConfig::default();
        let out = decode_ablated(
            &tokenize("the baby beside a valve painted the cake"),
            lex,
            &cfg,
        )
        .unwrap();
        assert!(out.to_string().contains("agent ( 5 , 4 )"), "{out}");
        let out = decode_ablated(
            &tokenize("a girl on the stool on the table drew a frog"),
            lex,
            &cfg,
        )
        .unwrap();
        assert!(out.to_string().contains("agent ( 8 , 7 )"), "{out}");
        assert!(out.to_string().contains("theme ( 8 , 10 )"), "{out}");
    }

    #[test]
    fn step_by_step() {
        let lex = Lexicon::embedded();
        let toks = tokenize("a boy painted the girl");
        let enc = encode(&toks, lex, 512).unwrap();
        let program = DecoderProgram::new(enc, lex, false).unwrap();
        let mut state = DecoderState::new(&toks);
        assert_eq!(
            program.next_token(&state).unwrap(),
            LfToken::Word("boy".into())
        );
        let mut steps = 0;
        loop {
            let t = program.next_token(&state).unwrap();
            if t == LfToken::End {
                break;
            }
            state.push(&t);
            steps += 1;
        }
        assert_eq!(program.next_token(&state).unwrap(), LfToken::End);
        let c = program.counters(&state).unwrap();
        assert_eq!(
            (c.nouns_in_output, c.relations_in_output, c.ands_in_output),
            (2, 2, 2)
        );
        assert_eq!(steps, state.output().len());
    }

    #[test]
    fn step_limit() {
        let cfg = DecodeConfig {
            max_steps: 3,
            ..DecodeConfig::default()
        };
        let r = decode(
            &tokenize("a boy painted the girl"),
            Lexicon::embedded(),
            &cfg,
        );
        assert!(matches!(r, Err(DecodeError::MaxSteps(3))));
    }
}
