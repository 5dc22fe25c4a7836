//! Few-shot intent detection as answer retrieval.
//!
//! Utterances play the role of queries and intent names play the role of
//! answers. A small trainable token encoder is trained in two contrastive
//! stages (self-supervised pre-training, then supervised fine-tuning over
//! queries and intent names together), relevance is the token-level
//! late-interaction score, and prediction retrieves the nearest intent name
//! from a quantized inverted-file index.

pub mod cli;
pub mod corpus;
pub mod encoder;
pub mod error;
pub mod index;
pub mod infer;
pub mod losses;
pub mod math;
pub mod scoring;
pub mod textpipe;
pub mod toy;
pub mod trainer;

pub use error::{Error, Result};
