//! Dataset ingestion, the intent-name registry, and balanced K-shot splits.
//!
//! Datasets are JSONL files, one object per line with string fields `"text"`
//! and `"intent"`. An optional sidecar file (one intent name per line) pins
//! the registry order explicitly; otherwise the registry is built from the
//! distinct intent values in lexicographic order so class indices are
//! reproducible across runs.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labeled utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub text: String,
    pub intent_id: usize,
}

/// Ordered list of the C intent-name strings; the names double as the
/// answer documents at retrieval time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntentRegistry {
    names: Vec<String>,
    name_to_id: HashMap<String, usize>,
}

impl IntentRegistry {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidArgument("registry needs at least one intent".into()));
        }
        let mut name_to_id = HashMap::new();
        for (id, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidArgument(format!("intent name {id} is empty")));
            }
            if name_to_id.insert(name.clone(), id).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate intent name {name:?}")));
            }
        }
        Ok(IntentRegistry { names, name_to_id })
    }

    /// Registry from a sidecar file: one intent name per line, in order.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref())?;
        let names: Vec<String> = text
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect();
        Self::new(names)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(name);
            out.push('\n');
        }
        crate::cli::write_atomic(path.as_ref(), out.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.name_to_id.get(name).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub registry: IntentRegistry,
    pub split_tag: Split,
}

#[derive(Serialize, Deserialize)]
struct JsonlRecord {
    text: String,
    intent: String,
}

/// Load a JSONL dataset. When `registry` is `None` the registry is inferred
/// from the distinct intent values, sorted lexicographically; otherwise lines
/// with intents missing from the supplied registry are rejected.
pub fn load_dataset(path: impl AsRef<Path>, registry: Option<&IntentRegistry>) -> Result<Dataset> {
    let path = path.as_ref();
    let body = fs::read_to_string(path)?;
    let display = path.display().to_string();

    let mut raw: Vec<(usize, JsonlRecord)> = Vec::new();
    for (idx, line) in body.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord =
            serde_json::from_str(line).map_err(|e| Error::MalformedLine {
                path: display.clone(),
                line: lineno,
                msg: e.to_string(),
            })?;
        if rec.text.trim().is_empty() {
            return Err(Error::MalformedLine {
                path: display.clone(),
                line: lineno,
                msg: "empty \"text\" field".into(),
            });
        }
        if rec.intent.trim().is_empty() {
            return Err(Error::MalformedLine {
                path: display.clone(),
                line: lineno,
                msg: "empty \"intent\" field".into(),
            });
        }
        raw.push((lineno, rec));
    }
    if raw.is_empty() {
        return Err(Error::EmptyDataset { path: display });
    }

    let registry = match registry {
        Some(r) => r.clone(),
        None => {
            let mut names: Vec<String> = raw.iter().map(|(_, r)| r.intent.clone()).collect();
            names.sort();
            names.dedup();
            IntentRegistry::new(names)?
        }
    };

    let mut examples = Vec::with_capacity(raw.len());
    for (lineno, rec) in raw {
        let intent_id = registry.id_of(&rec.intent).ok_or(Error::UnknownIntent {
            name: rec.intent.clone(),
            line: lineno,
        })?;
        examples.push(Example {
            text: rec.text,
            intent_id,
        });
    }

    Ok(Dataset {
        examples,
        registry,
        split_tag: Split::Train,
    })
}

/// Write a dataset back to JSONL; `load_dataset` of the result round-trips.
pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for ex in &d.examples {
        let rec = JsonlRecord {
            text: ex.text.clone(),
            intent: d.registry.name(ex.intent_id).to_string(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("jsonl record serializes"));
        out.push('\n');
    }
    crate::cli::write_atomic(path.as_ref(), out.as_bytes())
}

/// Balanced K-shot subsample: exactly `k` examples per intent, chosen by a
/// seeded shuffle. Output is order-normalized: grouped by intent id ascending,
/// original dataset order within each group.
pub fn sample_kshot(d: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let mut by_intent: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, ex) in d.examples.iter().enumerate() {
        by_intent.entry(ex.intent_id).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(k * by_intent.len());
    for (intent_id, mut idxs) in by_intent {
        if idxs.len() < k {
            return Err(Error::NotEnoughExamples {
                intent: d.registry.name(intent_id).to_string(),
                have: idxs.len(),
                want: k,
            });
        }
        idxs.shuffle(&mut rng);
        let mut chosen: Vec<usize> = idxs.into_iter().take(k).collect();
        chosen.sort_unstable();
        picked.extend(chosen);
    }

    Ok(Dataset {
        examples: picked.iter().map(|&i| d.examples[i].clone()).collect(),
        registry: d.registry.clone(),
        split_tag: d.split_tag,
    })
}

/// Normalize a raw intent label into answer text: lowercase, with `_` and `-`
/// each replaced by a single space.
pub fn normalize_intent_name(name: &str) -> String {
    name.to_lowercase().replace(['_', '-'], " ")
}

/// One answer example per intent, in registry order.
pub fn intent_name_examples(r: &IntentRegistry) -> Vec<Example> {
    r.names()
        .iter()
        .enumerate()
        .map(|(intent_id, name)| Example {
            text: normalize_intent_name(name),
            intent_id,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_jsonl(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    #[test]
    fn loads_single_class_file() {
        let f = write_jsonl(&[
            r#"{"text":"freeze my card","intent":"block_card"}"#,
            r#"{"text":"card was stolen","intent":"block_card"}"#,
        ]);
        let d = load_dataset(f.path(), None).unwrap();
        assert_eq!(d.registry.len(), 1);
        assert_eq!(d.examples.len(), 2);
        assert_eq!(d.examples[0].intent_id, 0);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let f = write_jsonl(&[
            r#"{"text":"a","intent":"x"}"#,
            r#"{"text":"b","intent":"x"}"#,
            "not json",
        ]);
        let err = load_dataset(f.path(), None).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_file_is_rejected() {
        let f = write_jsonl(&[]);
        assert!(matches!(
            load_dataset(f.path(), None),
            Err(Error::EmptyDataset { .. })
        ));
    }

    #[test]
    fn registry_order_is_lexicographic() {
        // 15 lines over 3 intents, deliberately out of order in the file.
        let mut lines = Vec::new();
        for i in 0..5 {
            lines.push(format!(r#"{{"text":"c {i}","intent":"zeta"}}"#));
            lines.push(format!(r#"{{"text":"a {i}","intent":"alpha"}}"#));
            lines.push(format!(r#"{{"text":"b {i}","intent":"mid"}}"#));
        }
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let f = write_jsonl(&refs);
        let d = load_dataset(f.path(), None).unwrap();
        assert_eq!(d.registry.names(), &["alpha", "mid", "zeta"]);
        assert_eq!(d.examples.len(), 15);
    }

    #[test]
    fn unknown_intent_rejected_under_explicit_registry() {
        let reg = IntentRegistry::new(vec!["known".into()]).unwrap();
        let f = write_jsonl(&[r#"{"text":"a","intent":"mystery"}"#]);
        let err = load_dataset(f.path(), Some(&reg)).unwrap_err();
        match err {
            Error::UnknownIntent { name, line } => {
                assert_eq!(name, "mystery");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn save_load_round_trips() {
        let f = write_jsonl(&[
            r#"{"text":"freeze my card","intent":"block_card"}"#,
            r#"{"text":"send money","intent":"transfer"}"#,
            r#"{"text":"card was stolen","intent":"block_card"}"#,
        ]);
        let d = load_dataset(f.path(), None).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        save_dataset(&d, out.path()).unwrap();
        let d2 = load_dataset(out.path(), None).unwrap();
        assert_eq!(d, d2);
    }

    fn fixture_dataset(per_intent: usize, intents: &[&str]) -> Dataset {
        let reg = IntentRegistry::new(intents.iter().map(|s| s.to_string()).collect()).unwrap();
        let mut examples = Vec::new();
        for (id, _) in intents.iter().enumerate() {
            for j in 0..per_intent {
                examples.push(Example {
                    text: format!("utterance {id} {j}"),
                    intent_id: id,
                });
            }
        }
        Dataset {
            examples,
            registry: reg,
            split_tag: Split::Train,
        }
    }

    #[test]
    fn kshot_is_balanced_and_deterministic() {
        let d = fixture_dataset(10, &["a", "b", "c"]);
        let s1 = sample_kshot(&d, 5, 42).unwrap();
        let s2 = sample_kshot(&d, 5, 42).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.examples.len(), 15);
        for id in 0..3 {
            assert_eq!(s1.examples.iter().filter(|e| e.intent_id == id).count(), 5);
        }
    }

    #[test]
    fn kshot_with_full_k_returns_everything() {
        let d = fixture_dataset(4, &["a", "b"]);
        let s = sample_kshot(&d, 4, 7).unwrap();
        assert_eq!(s, d); // fixture is already grouped and in-order
    }

    #[test]
    fn kshot_rejects_short_intents_by_name() {
        let d = fixture_dataset(3, &["tiny", "other"]);
        let err = sample_kshot(&d, 4, 0).unwrap_err();
        match err {
            Error::NotEnoughExamples { intent, have, want } => {
                assert_eq!(intent, "tiny");
                assert_eq!((have, want), (3, 4));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn different_seeds_give_different_selections() {
        // 20 fixtures; C(10,5) = 252 subsets per intent, so two seeds
        // colliding on every intent is vanishingly unlikely.
        let mut differing = 0;
        for fixture in 0..20u64 {
            let d = fixture_dataset(10, &["a", "b", "c"]);
            let s1 = sample_kshot(&d, 5, 1000 + fixture).unwrap();
            let s2 = sample_kshot(&d, 5, 2000 + fixture).unwrap();
            if s1 != s2 {
                differing += 1;
            }
        }
        assert!(differing >= 19, "only {differing}/20 fixtures differed");
    }

    #[test]
    fn intent_names_become_answer_examples() {
        let reg = IntentRegistry::new(vec![
            "block_card".into(),
            "transfer-money-abroad".into(),
            "Greeting".into(),
        ])
        .unwrap();
        let answers = intent_name_examples(&reg);
        assert_eq!(answers.len(), reg.len());
        assert_eq!(answers[0].text, "block card");
        assert_eq!(answers[1].text, "transfer money abroad");
        assert_eq!(answers[2].text, "greeting");
        for (i, a) in answers.iter().enumerate() {
            assert_eq!(a.intent_id, i);
        }
    }

    #[test]
    fn registry_rejects_duplicates() {
        assert!(IntentRegistry::new(vec!["a".into(), "a".into()]).is_err());
    }
}
