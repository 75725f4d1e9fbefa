use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::embeddings::{cosine, EmbeddingTable};
use crate::corpus::{tokenize, SgtLexicon};
use crate::{Error, Execution, Result};

/// A named word list such as the warmth or competence dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    name: String,
    words: Vec<String>,
}

impl Dictionary {
    /// Words are trimmed and lowercased; blanks are dropped and repeats
    /// collapsed to their first occurrence.
    pub fn new<I, S>(name: impl Into<String>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut seen = HashSet::new();
        let words: Vec<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty() && seen.insert(w.clone()))
            .collect();
        if words.is_empty() {
            return Err(Error::invalid(format!("dictionary '{name}' is empty")));
        }
        Ok(Self { name, words })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// One word per line; `#` comments and blank lines are ignored.
pub fn load_dictionary(path: impl AsRef<Path>, name: impl Into<String>) -> Result<Dictionary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Dictionary::new(
        name,
        text.lines().filter(|l| !l.trim_start().starts_with('#')),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DictionaryScore {
    pub score: f64,
    pub coverage: f64,
    pub n_found: usize,
}

/// Mean cosine between the group vector and every dictionary word present in
/// the vocabulary. A multiword form is the mean of its in-vocabulary tokens.
pub fn dictionary_score(
    surface_form: &str,
    dict: &Dictionary,
    table: &EmbeddingTable,
) -> Result<DictionaryScore> {
    let tokens = tokenize(surface_form);
    let group = table.mean_vector(&tokens).ok_or_else(|| {
        Error::invalid(format!("group form '{surface_form}' is out of vocabulary"))
    })?;
    if group.iter().all(|x| *x == 0.0) {
        return Err(Error::invalid(format!(
            "group form '{surface_form}' has a zero-norm vector"
        )));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for w in dict.words() {
        let Some(v) = table.get(w) else { continue };
        let v: Vec<f64> = v.iter().map(|x| f64::from(*x)).collect();
        if let Ok(c) = cosine(&group, &v) {
            sum += c;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::invalid(format!(
            "no word of dictionary '{}' is in the embedding vocabulary",
            dict.name()
        )));
    }
    Ok(DictionaryScore {
        score: (sum / n as f64).clamp(-1.0, 1.0),
        coverage: n as f64 / dict.words().len() as f64,
        n_found: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StereotypeScore {
    pub group_id: String,
    pub surface_form: String,
    pub warmth: f64,
    pub competence: f64,
    pub warmth_coverage: f64,
    pub competence_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreFailure {
    pub group_id: String,
    pub surface_form: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupScoring {
    pub scores: Vec<StereotypeScore>,
    pub failures: Vec<ScoreFailure>,
}

impl GroupScoring {
    pub fn get(&self, group_id: &str) -> Option<&StereotypeScore> {
        self.scores.iter().find(|s| s.group_id == group_id)
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("group_id,warmth,competence,warmth_coverage,competence_coverage\n");
        for r in &self.scores {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.group_id, r.warmth, r.competence, r.warmth_coverage, r.competence_coverage
            ));
        }
        s
    }
}

/// Score every lexicon group by its canonical surface form. Groups that
/// cannot be scored go to `failures` in lexicon order.
pub fn score_groups(
    lexicon: &SgtLexicon,
    warmth: &Dictionary,
    competence: &Dictionary,
    table: &EmbeddingTable,
    exec: Execution,
) -> GroupScoring {
    let groups: Vec<&str> = lexicon.groups().collect();
    let results = exec.map_slice(&groups, |g| {
        let form = lexicon
            .canonical_form(g)
            .map_or_else(|| g.to_string(), |e| e.surface_form());
        let w = dictionary_score(&form, warmth, table);
        let c = dictionary_score(&form, competence, table);
        match (w, c) {
            (Ok(w), Ok(c)) => Ok(StereotypeScore {
                group_id: g.to_string(),
                surface_form: form,
                warmth: w.score,
                competence: c.score,
                warmth_coverage: w.coverage,
                competence_coverage: c.coverage,
            }),
            (Err(e), _) | (_, Err(e)) => Err(ScoreFailure {
                group_id: g.to_string(),
                surface_form: form,
                reason: e.to_string(),
            }),
        }
    });
    let mut out = GroupScoring::default();
    for r in results {
        match r {
            Ok(s) => out.scores.push(s),
            Err(f) => out.failures.push(f),
        }
    }
    out
}
