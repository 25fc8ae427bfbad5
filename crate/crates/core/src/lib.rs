//! A flat sequence program that maps COGS-style English sentences to
//! positional-index logical forms, with the grammar tools used to probe it.
//!
//! The program is written against a small set of attention-style primitives
//! ([`seq`]): every step is a selector plus an aggregate or an elementwise
//! map. No step recurses over a parse tree.
//!
//! ```
//! use rasp_recogs::{decode_sentence, Lexicon};
//!
//! let lf = decode_sentence("the guest smiled", Lexicon::embedded()).unwrap();
//! assert_eq!(lf.to_string(), "* guest ( 1 ) ; smile ( 2 ) AND agent ( 2 , 1 )");
//! ```

pub mod dataset;
pub mod decoder;
pub mod encoder;
pub mod grammar;
pub mod lexicon;
pub mod lf;
pub mod run;
pub mod score;
pub mod seq;
pub mod template;

pub use decoder::{decode, decode_ablated, decode_sentence, tokenize, DecodeConfig, DecodeError};
pub use grammar::{lf_oracle, parse_sentence, Grammar, ParseTree};
pub use lexicon::{Lexicon, PosCode};
pub use lf::{sem_equal, string_exact_match, LogicalForm};
pub use template::Template;
