//! Input-side sequence program: noun-phrase masks, the prepositional-phrase
//! mask, clause segmentation and per-clause frame matching.

use std::ops::Range;

use thiserror::Error;

use crate::lexicon::{Embedding, Lexicon, LexiconError, PosCode};
use crate::seq::{
    aggregate, elementwise, indicator, indices, select, select_all, selector_width, BinaryOp,
    Predicate::*, SeqError, Sequence,
};
use crate::template::{Slot, Template, CHECK_ORDER};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("sequence op failed: {0}")]
    Seq(#[from] SeqError),
    #[error("empty input")]
    Empty,
    #[error("input of {len} tokens exceeds max length {max}")]
    TooLong { len: usize, max: usize },
    #[error("no frame matches clause {clause} (`{text}`)")]
    Unsupported { clause: usize, text: String },
}

/// Noun-phrase marker sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct NpMasks {
    /// 1 at a common noun directly preceded by a determiner.
    pub np_det: Sequence,
    /// 1 at a proper noun.
    pub np_prop: Sequence,
    /// 1 at the position right after a noun phrase ends.
    pub np_after: Sequence,
    /// 1 at the position right before a noun phrase starts.
    pub np_before: Sequence,
}

/// One clause with its matched frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseFrame {
    pub span: Range<usize>,
    pub template: Template,
    /// Positions of the frame's verbs, in order.
    pub verbs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EncoderState {
    pub tokens: Vec<String>,
    pub embedding: Embedding,
    pub indices: Sequence,
    pub noun_mask: Sequence,
    pub det_mask: Sequence,
    pub pp_mask: Sequence,
    pub np: NpMasks,
    pub no_pp_np_mask: Sequence,
    pub nps_without_pp_prefix_indices: Sequence,
    pub clause_ids: Sequence,
    pub clauses: Vec<ClauseFrame>,
    /// 1 at every frame verb.
    pub verb_mask: Sequence,
}

impl EncoderState {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn clause_of(&self, position: usize) -> usize {
        self.clause_ids.index_at(position)
    }

    pub fn templates(&self) -> Vec<Template> {
        self.clauses.iter().map(|c| c.template).collect()
    }
}

fn mul(a: &Sequence, b: &Sequence) -> Result<Sequence, SeqError> {
    elementwise(BinaryOp::Mul, a, b)
}

fn not(a: &Sequence) -> Sequence {
    a.map(|x| 1.0 - x)
}

pub fn build_np_masks(pos: &Sequence) -> Result<NpMasks, SeqError> {
    let idx = indices(pos.len());
    let plus1 = idx.map(|x| x + 1.0);
    let minus1 = idx.map(|x| x - 1.0);
    let np_det_mask = select_all(&[
        select(PosCode::CommonNoun.value(), pos, Eq)?,
        select(pos, PosCode::Det.value(), Eq)?,
        select(&plus1, &idx, Eq)?,
    ])?;
    let np_prop_mask =
        select(PosCode::ProperNoun.value(), pos, Eq)?.and(&select(&idx, &idx, Eq)?)?;
    let np_det = aggregate(&np_det_mask, 1.0)?;
    let np_prop = aggregate(&np_prop_mask, 1.0)?;

    let np_end = elementwise(BinaryOp::Or, &np_det, &np_prop)?;
    let after_mask = select(&np_end, 1.0, Eq)?.and(&select(&plus1, &idx, Eq)?)?;
    let np_after = aggregate(&after_mask, 1.0)?;

    // a noun phrase starts at its determiner or at a proper noun
    let det_starts = aggregate(
        &select(&np_det, 1.0, Eq)?.and(&select(&minus1, &idx, Eq)?)?,
        1.0,
    )?;
    let np_start = elementwise(BinaryOp::Or, &det_starts, &np_prop)?;
    let before_mask = select(&np_start, 1.0, Eq)?.and(&select(&minus1, &idx, Eq)?)?;
    let np_before = aggregate(&before_mask, 1.0)?;
    Ok(NpMasks {
        np_det,
        np_prop,
        np_after,
        np_before,
    })
}

/// 0 at nouns that directly follow a preposition (`pp proper_noun` or
/// `pp det common_noun`), 1 elsewhere.
pub fn no_pp_np_mask(pos: &Sequence) -> Result<Sequence, SeqError> {
    let idx = indices(pos.len());
    let plus1 = idx.map(|x| x + 1.0);
    let plus2 = idx.map(|x| x + 2.0);
    let pp_sequence = indicator(pos, Eq, PosCode::Pp.value())?;

    let pp_one_after_mask = select(&pp_sequence, 1.0, Eq)?.and(&select(&plus1, &idx, Eq)?)?;
    let pp_one_after_sequence = aggregate(&pp_one_after_mask, 1.0)?;
    let pp_one_after_mask =
        select(&pp_one_after_sequence, 1.0, Eq)?.and(&select(&idx, &idx, Eq)?)?;

    let pp_two_after_mask = select(&pp_sequence, 1.0, Eq)?.and(&select(&plus2, &idx, Eq)?)?;
    let pp_two_after_sequence = aggregate(&pp_two_after_mask, 1.0)?;
    let pp_two_after_mask =
        select(&pp_two_after_sequence, 1.0, Eq)?.and(&select(&idx, &idx, Eq)?)?;

    let masks = build_np_masks(pos)?;
    let np_det_diag_mask = select(&masks.np_det, 1.0, Eq)?.and(&select(&idx, &idx, Eq)?)?;
    let np_prop_diag_mask = select(&masks.np_prop, 1.0, Eq)?.and(&select(&idx, &idx, Eq)?)?;

    let hit = pp_one_after_mask
        .and(&np_prop_diag_mask)?
        .or(&pp_two_after_mask.and(&np_det_diag_mask)?)?;
    Ok(not(&aggregate(&hit, 1.0)?))
}

/// 1-based running count over `mask`, zeroed where `mask` is 0.
pub fn running_rank(mask: &Sequence) -> Result<Sequence, SeqError> {
    let idx = indices(mask.len());
    let upto = select(mask, 1.0, Eq)?.and(&select(&idx, &idx, Le)?)?;
    mul(&selector_width(&upto), mask)
}

pub fn noun_mask(pos: &Sequence) -> Result<Sequence, SeqError> {
    let common = indicator(pos, Eq, PosCode::CommonNoun.value())?;
    let proper = indicator(pos, Eq, PosCode::ProperNoun.value())?;
    elementwise(BinaryOp::Or, &common, &proper)
}

/// Clause index per position: the number of `that` tokens at or before it.
pub fn clause_ids(pos: &Sequence) -> Result<Sequence, SeqError> {
    let that = indicator(pos, Eq, PosCode::That.value())?;
    let idx = indices(pos.len());
    Ok(selector_width(
        &select(&that, 1.0, Eq)?.and(&select(&idx, &idx, Le)?)?,
    ))
}

/// Clause spans; `that` tokens separate clauses and belong to none.
pub fn segment_clauses(pos: &Sequence) -> Result<Vec<Range<usize>>, SeqError> {
    let ids = clause_ids(pos)?;
    let that = PosCode::That.value();
    let n = pos.len();
    let count = if n == 0 { 0 } else { ids.index_at(n - 1) + 1 };
    let mut spans = Vec::with_capacity(count);
    for c in 0..count {
        let members: Vec<usize> = (0..n)
            .filter(|&i| ids.index_at(i) == c && pos.num(i) != that)
            .collect();
        let start = members.first().copied().unwrap_or(n);
        let end = members.last().map_or(start, |e| e + 1);
        spans.push(start..end);
    }
    Ok(spans)
}

struct Classes {
    noun: Sequence,
    lits: Vec<(PosCode, Sequence)>,
    verbs: Vec<(PosCode, Sequence)>,
}

impl Classes {
    fn new(emb: &Embedding, noun: &Sequence) -> Result<Classes, SeqError> {
        let lits = [PosCode::Was, PosCode::By, PosCode::To]
            .into_iter()
            .map(|c| Ok((c, indicator(&emb.pos, Eq, c.value())?)))
            .collect::<Result<_, SeqError>>()?;
        let verbs = PosCode::all()
            .iter()
            .filter(|c| c.is_verb())
            .map(|&c| (c, emb.has_code(c)))
            .collect();
        Ok(Classes {
            noun: noun.clone(),
            lits,
            verbs,
        })
    }

    fn of(&self, slot: Slot) -> &Sequence {
        match slot {
            Slot::Noun => &self.noun,
            Slot::Lit(c) => {
                &self
                    .lits
                    .iter()
                    .find(|(k, _)| *k == c)
                    .expect("literal class")
                    .1
            }
            Slot::Verb(c) => {
                &self
                    .verbs
                    .iter()
                    .find(|(k, _)| *k == c)
                    .expect("verb class")
                    .1
            }
        }
    }
}

/// Frame of one clause, matched on its skeleton. Candidates are checked in
/// [`CHECK_ORDER`] and the last match wins; non-final clauses only admit the
/// complement-clause frame.
pub fn match_templates(
    skeleton_rank: &Sequence,
    classes_len: usize,
    classes: &impl Fn(Slot) -> Sequence,
    candidates: &[Template],
) -> Result<Option<(Template, Vec<usize>)>, SeqError> {
    let idx = indices(skeleton_rank.len());
    let mut found = None;
    for &t in candidates {
        let sk = t.skeleton();
        if sk.len() != classes_len {
            continue;
        }
        let mut ok = true;
        let mut verbs = Vec::new();
        for (j, slot) in sk.iter().enumerate() {
            let at_j = select(skeleton_rank, (j + 1) as f64, Eq)?;
            if aggregate(&at_j, &classes(*slot))?.num(0) != 1.0 {
                ok = false;
                break;
            }
            if matches!(slot, Slot::Verb(_)) {
                verbs.push(aggregate(&at_j, &idx)?.index_at(0));
            }
        }
        if ok {
            found = Some((t, verbs));
        }
    }
    Ok(found)
}

/// Runs the input-side program over `tokens` (lowercase, optional final `.`).
pub fn encode<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    max_len: usize,
) -> Result<EncoderState, EncodeError> {
    if tokens.is_empty() {
        return Err(EncodeError::Empty);
    }
    if tokens.len() > max_len {
        return Err(EncodeError::TooLong {
            len: tokens.len(),
            max: max_len,
        });
    }
    let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
    let embedding = lexicon.embed(&tokens)?;
    let pos = &embedding.pos;
    let n = tokens.len();
    let idx = indices(n);

    let np = build_np_masks(pos)?;
    let noun = noun_mask(pos)?;
    let no_pp_np = no_pp_np_mask(pos)?;
    let nps_without_pp_prefix_indices = running_rank(&mul(&noun, &no_pp_np)?)?;
    let det_mask = indicator(pos, Eq, PosCode::Det.value())?;
    let pp_mask = indicator(pos, Eq, PosCode::Pp.value())?;
    let that_mask = indicator(pos, Eq, PosCode::That.value())?;
    let filler = indicator(pos, Eq, PosCode::Filler.value())?;
    let ids = clause_ids(pos)?;
    let spans = segment_clauses(pos)?;

    // skeleton: drop determiners, prepositions with their objects, `that`, `.`
    let base_keep = [&det_mask, &pp_mask, &that_mask, &filler]
        .into_iter()
        .try_fold(no_pp_np.clone(), |acc, m| mul(&acc, &not(m)))?;

    let classes = Classes::new(&embedding, &noun)?;
    let class_fn = |s: Slot| classes.of(s).clone();
    let mut clauses = Vec::with_capacity(spans.len());
    for (c, span) in spans.iter().enumerate() {
        let in_clause = indicator(&ids, Eq, c as f64)?;
        let keep = mul(&base_keep, &in_clause)?;
        let rank = running_rank(&keep)?;
        let len = selector_width(&select(&keep, 1.0, Eq)?).index_at(0);
        let last = c + 1 == spans.len();
        let candidates: &[Template] = if last {
            &CHECK_ORDER
        } else {
            &[Template::VCpTaking]
        };
        let (template, verbs) =
            match_templates(&rank, len, &class_fn, candidates)?.ok_or_else(|| {
                EncodeError::Unsupported {
                    clause: c,
                    text: tokens[span.clone()].join(" "),
                }
            })?;
        clauses.push(ClauseFrame {
            span: span.clone(),
            template,
            verbs,
        });
    }

    let mut verb_mask = vec![0.0; n];
    for c in &clauses {
        for &v in &c.verbs {
            verb_mask[v] = 1.0;
        }
    }
    Ok(EncoderState {
        tokens,
        embedding,
        indices: idx,
        noun_mask: noun,
        det_mask,
        pp_mask,
        np,
        no_pp_np_mask: no_pp_np,
        nps_without_pp_prefix_indices,
        clause_ids: ids,
        clauses,
        verb_mask: Sequence::Num(verb_mask),
    })
}
