//! Vocabulary, tokenization, fixed-shape padding, and mask corruption.
//!
//! Queries are padded to a fixed length `m` with MASK tokens that still take
//! part in scoring (query augmentation); answers are padded per batch to the
//! longest answer with inert PAD tokens that never score.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const MASK: usize = 1;
pub const CLS: usize = 2;
pub const UNK: usize = 3;
pub const NUM_SPECIALS: usize = 4;

const SPECIAL_TOKENS: [&str; NUM_SPECIALS] = ["<pad>", "<mask>", "<cls>", "<unk>"];

/// Token universe. Specials occupy ids 0-3, everything else is assigned in
/// descending-frequency order (ties broken lexicographically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    id_to_token: Vec<String>,
    token_to_id: HashMap<String, usize>,
}

impl Vocab {
    pub fn size(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.id_to_token[id]
    }

    pub fn id_of(&self, token: &str) -> usize {
        self.token_to_id.get(token).copied().unwrap_or(UNK)
    }

    /// Persist as UTF-8 text, line i = token with id i. Byte-exact round-trip.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for tok in &self.id_to_token {
            out.push_str(tok);
            out.push('\n');
        }
        crate::cli::write_atomic(path.as_ref(), out.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = fs::read_to_string(path)?;
        let tokens: Vec<String> = body.lines().map(|l| l.to_string()).collect();
        if tokens.len() < NUM_SPECIALS {
            return Err(Error::CorruptFile {
                path: path.display().to_string(),
                msg: "fewer lines than special tokens".into(),
            });
        }
        for (i, want) in SPECIAL_TOKENS.iter().enumerate() {
            if tokens[i] != *want {
                return Err(Error::CorruptFile {
                    path: path.display().to_string(),
                    msg: format!("line {} should be {want:?}, found {:?}", i + 1, tokens[i]),
                });
            }
        }
        let token_to_id = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocab {
            id_to_token: tokens,
            token_to_id,
        })
    }
}

/// Lowercased word tokenization: maximal runs of alphanumeric characters;
/// whitespace and punctuation separate tokens and are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                cur.push(lc);
            }
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Build a vocabulary over `corpus`. Tokens seen fewer than `min_freq` times
/// map to UNK.
pub fn build_vocab(corpus: &[String], min_freq: usize) -> Result<Vocab> {
    let mut freq: HashMap<String, usize> = HashMap::new();
    let mut total = 0usize;
    for doc in corpus {
        for tok in tokenize(doc) {
            *freq.entry(tok).or_insert(0) += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }

    let mut kept: Vec<(String, usize)> = freq.into_iter().filter(|(_, c)| *c >= min_freq).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut id_to_token: Vec<String> = SPECIAL_TOKENS.iter().map(|s| s.to_string()).collect();
    id_to_token.extend(kept.into_iter().map(|(t, _)| t));
    let token_to_id = id_to_token
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocab {
        id_to_token,
        token_to_id,
    })
}

/// Per-position padding semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosFlag {
    /// CLS or an actual input token.
    Real,
    /// Query padding: a MASK token that still participates in scoring.
    PadMask,
    /// Answer padding: excluded from scoring entirely.
    PadInert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Query,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub ids: Vec<usize>,
    pub flags: Vec<PosFlag>,
    pub role: Role,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Positions that take part in scoring: everything except inert padding.
    pub fn scoring_validity(&self) -> Vec<bool> {
        self.flags.iter().map(|f| *f != PosFlag::PadInert).collect()
    }

    pub fn real_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == PosFlag::Real)
            .map(|(i, _)| i)
    }
}

/// Encode a query to exactly `m` positions: CLS, then tokens (truncated to
/// fit), then MASK padding flagged [`PosFlag::PadMask`].
pub fn encode_query(text: &str, v: &Vocab, m: usize) -> TokenSeq {
    assert!(m >= 2, "query length must be at least 2");
    let mut ids = vec![CLS];
    let mut flags = vec![PosFlag::Real];
    for tok in tokenize(text) {
        if ids.len() == m {
            break;
        }
        ids.push(v.id_of(&tok));
        flags.push(PosFlag::Real);
    }
    while ids.len() < m {
        ids.push(MASK);
        flags.push(PosFlag::PadMask);
    }
    TokenSeq {
        ids,
        flags,
        role: Role::Query,
    }
}

/// Encode a batch of answers at a shared width: CLS + tokens of each answer,
/// padded with inert PAD up to the longest answer in the batch.
pub fn encode_answers(texts: &[String], v: &Vocab) -> Result<Vec<TokenSeq>> {
    if texts.is_empty() {
        return Err(Error::InvalidArgument("answer batch is empty".into()));
    }
    let tokenized: Vec<Vec<usize>> = texts
        .iter()
        .map(|t| tokenize(t).iter().map(|tok| v.id_of(tok)).collect())
        .collect();
    let width = 1 + tokenized.iter().map(|t| t.len()).max().unwrap();
    Ok(tokenized
        .into_iter()
        .map(|toks| {
            let mut ids = vec![CLS];
            let mut flags = vec![PosFlag::Real];
            for id in toks {
                ids.push(id);
                flags.push(PosFlag::Real);
            }
            while ids.len() < width {
                ids.push(PAD);
                flags.push(PosFlag::PadInert);
            }
            TokenSeq {
                ids,
                flags,
                role: Role::Answer,
            }
        })
        .collect())
}

/// A corrupted copy of a sequence plus the original ids of every corrupted
/// position (the MLM targets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedView {
    pub seq: TokenSeq,
    pub mlm_targets: BTreeMap<usize, usize>,
}

impl AugmentedView {
    /// A pass-through view with no corruption (used when augmentation is
    /// switched off).
    pub fn identity(seq: TokenSeq) -> Self {
        AugmentedView {
            seq,
            mlm_targets: BTreeMap::new(),
        }
    }
}

pub const MASK_SELECT_RATE: f64 = 0.15;
pub const MASK_TO_MASK_RATE: f64 = 0.80;
pub const MASK_TO_RANDOM_RATE: f64 = 0.10;

/// Corrupt a sequence with the standard masking recipe: each real non-CLS
/// position is selected independently at 15%; selected positions become MASK
/// (80%), a random non-special token (10%), or stay unchanged (10%). Every
/// selected position is recorded as an MLM target. Padding and CLS are never
/// touched.
pub fn mask_augment<R: Rng>(seq: &TokenSeq, vocab_size: usize, rng: &mut R) -> AugmentedView {
    mask_augment_with_rates(
        seq,
        vocab_size,
        rng,
        MASK_SELECT_RATE,
        MASK_TO_MASK_RATE,
        MASK_TO_RANDOM_RATE,
    )
}

/// Same as [`mask_augment`] with explicit rates; the fixed-rate entry point
/// is the production path, this one exists so tests can force the corners.
pub fn mask_augment_with_rates<R: Rng>(
    seq: &TokenSeq,
    vocab_size: usize,
    rng: &mut R,
    select_rate: f64,
    to_mask_rate: f64,
    to_random_rate: f64,
) -> AugmentedView {
    let mut out = seq.clone();
    let mut mlm_targets = BTreeMap::new();
    for pos in 1..seq.len() {
        if seq.flags[pos] != PosFlag::Real {
            continue;
        }
        if rng.gen::<f64>() >= select_rate {
            continue;
        }
        let original = seq.ids[pos];
        mlm_targets.insert(pos, original);
        let branch = rng.gen::<f64>();
        if branch < to_mask_rate {
            out.ids[pos] = MASK;
        } else if branch < to_mask_rate + to_random_rate {
            // uniform over non-special ids; degenerate vocabs keep the token
            if vocab_size > NUM_SPECIALS {
                out.ids[pos] = rng.gen_range(NUM_SPECIALS..vocab_size);
            }
        }
        // else: selected but left unchanged
    }
    AugmentedView {
        seq: out,
        mlm_targets,
    }
}
