use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::PostTable;
use crate::{Error, Result};

/// Lowercase `text` and split it on every run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub group_id: String,
    /// Lowercase tokens; never empty.
    pub tokens: Vec<String>,
}

impl LexiconEntry {
    pub fn surface_form(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Social-group surface forms with a first-token index for matching.
#[derive(Debug, Clone, Default)]
pub struct SgtLexicon {
    entries: Vec<LexiconEntry>,
    by_first: HashMap<String, Vec<usize>>,
    group_order: IndexMap<String, usize>,
}

impl SgtLexicon {
    /// Build from `(group_id, surface_form)` pairs. Surface forms go through
    /// [`tokenize`], so "Non-Binary" and "non binary" are the same form.
    pub fn from_pairs<I, G, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (G, S)>,
        G: Into<String>,
        S: AsRef<str>,
    {
        let mut lex = Self::default();
        for (g, s) in pairs {
            lex.push(g.into(), s.as_ref())?;
        }
        Ok(lex)
    }

    fn push(&mut self, group_id: String, form: &str) -> Result<()> {
        let group_id = group_id.trim().to_owned();
        if group_id.is_empty() {
            return Err(Error::invalid("empty group id"));
        }
        let tokens = tokenize(form);
        if tokens.is_empty() {
            return Err(Error::invalid(format!(
                "blank surface form for group {group_id}"
            )));
        }
        if self
            .entries
            .iter()
            .any(|e| e.group_id == group_id && e.tokens == tokens)
        {
            return Err(Error::invalid(format!(
                "duplicate surface form `{}` for group {group_id}",
                tokens.join(" ")
            )));
        }
        let idx = self.entries.len();
        self.by_first
            .entry(tokens[0].clone())
            .or_default()
            .push(idx);
        let next = self.group_order.len();
        self.group_order.entry(group_id.clone()).or_insert(next);
        self.entries.push(LexiconEntry { group_id, tokens });
        Ok(())
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct group ids in first-listed order.
    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.group_order.keys().map(String::as_str)
    }

    pub fn forms_of<'a>(&'a self, group_id: &'a str) -> impl Iterator<Item = &'a LexiconEntry> {
        self.entries.iter().filter(move |e| e.group_id == group_id)
    }

    /// The form used to represent a group: the lexicographically first
    /// single-token form, or else the first listed form.
    pub fn canonical_form(&self, group_id: &str) -> Option<&LexiconEntry> {
        let forms = || self.entries.iter().filter(|e| e.group_id == group_id);
        forms()
            .filter(|e| e.tokens.len() == 1)
            .min_by(|a, b| a.tokens[0].cmp(&b.tokens[0]))
            .or_else(|| forms().next())
    }

    /// Serialize back to the TSV layout.
    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\n", e.group_id, e.surface_form()))
            .collect()
    }
}

/// Load `group_id<TAB>surface_form` lines. Blank and `#` lines are skipped.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<SgtLexicon> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lex = SgtLexicon::default();
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (group, form) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, line_no, "expected group_id<TAB>surface_form"))?;
        lex.push(group.to_owned(), form)
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
    }
    Ok(lex)
}

/// A matched group surface form in a tokenized text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgtMention {
    pub item_id: String,
    pub group_id: String,
    pub surface_form: String,
    /// Index of the first matched token in [`tokenize`]d text.
    pub token_offset: usize,
}

/// Find every whole-token occurrence of a lexicon form in `text`.
///
/// At most one mention is emitted per (group, position); when several forms of
/// the same group start at a position the longest wins. Different groups
/// matching at overlapping positions are all reported. Output is ordered by
/// offset, then by group order in the lexicon.
pub fn match_sgts(item_id: &str, text: &str, lexicon: &SgtLexicon) -> Vec<SgtMention> {
    let tokens = tokenize(text);
    let mut out = Vec::new();
    for pos in 0..tokens.len() {
        let Some(cands) = lexicon.by_first.get(&tokens[pos]) else {
            continue;
        };
        // group rank -> best entry at this position
        let mut best: Vec<(usize, usize)> = Vec::new();
        for &ei in cands {
            let e = &lexicon.entries[ei];
            let end = pos + e.tokens.len();
            if end > tokens.len() || tokens[pos..end] != e.tokens[..] {
                continue;
            }
            let rank = lexicon.group_order[&e.group_id];
            match best.iter_mut().find(|(r, _)| *r == rank) {
                Some(slot) => {
                    if e.tokens.len() > lexicon.entries[slot.1].tokens.len() {
                        slot.1 = ei;
                    }
                }
                None => best.push((rank, ei)),
            }
        }
        best.sort_unstable();
        out.extend(best.into_iter().map(|(_, ei)| {
            let e = &lexicon.entries[ei];
            SgtMention {
                item_id: item_id.to_owned(),
                group_id: e.group_id.clone(),
                surface_form: e.surface_form(),
                token_offset: pos,
            }
        }));
    }
    out
}

/// Groups mentioned by each post (deduplicated, lexicon order). Every post of
/// the table has an entry, possibly empty.
pub type MentionIndex = IndexMap<String, Vec<String>>;

pub fn mention_index(posts: &PostTable, lexicon: &SgtLexicon) -> (MentionIndex, Vec<SgtMention>) {
    let mut index = MentionIndex::new();
    let mut all = Vec::new();
    for (id, text) in posts.iter() {
        let mentions = match_sgts(id, text, lexicon);
        let mut seen = HashSet::new();
        let mut groups: Vec<String> = mentions
            .iter()
            .filter(|m| seen.insert(m.group_id.clone()))
            .map(|m| m.group_id.clone())
            .collect();
        groups.sort_by_key(|g| lexicon.group_order[g]);
        index.insert(id.to_owned(), groups);
        all.extend(mentions);
    }
    (index, all)
}
