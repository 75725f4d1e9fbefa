use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub text: String,
}

/// Posts keyed by id, in file order.
#[derive(Debug, Clone, Default)]
pub struct PostTable {
    posts: IndexMap<String, String>,
}

impl PostTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, post: Post) -> Result<()> {
        if self.posts.contains_key(&post.id) {
            return Err(Error::invalid(format!("duplicate post id {}", post.id)));
        }
        self.posts.insert(post.id, post.text);
        Ok(())
    }

    pub fn from_posts<I: IntoIterator<Item = Post>>(posts: I) -> Result<Self> {
        let mut t = Self::new();
        for p in posts {
            t.insert(p)?;
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.posts.get(id).map(String::as_str)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.posts.contains_key(id)
    }

    /// `(id, text)` pairs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.posts.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Serialize as JSON lines, one `{"id":..,"text":..}` per post.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (id, text) in self.iter() {
            let rec = Post {
                id: id.to_owned(),
                text: text.to_owned(),
            };
            out.push_str(&serde_json::to_string(&rec).expect("post serializes"));
            out.push('\n');
        }
        out
    }
}

/// Load newline-delimited JSON records with `id` and `text` fields. Numeric
/// ids are accepted and stored in their decimal form; blank lines are skipped.
pub fn load_posts(path: impl AsRef<Path>) -> Result<PostTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut table = PostTable::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, line_no, format!("invalid JSON: {e}")))?;
        let id = match value.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => return Err(Error::parse(path, line_no, "missing or non-scalar `id`")),
        };
        let text = match value.get("text") {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(Error::parse(path, line_no, "missing `text` field")),
        };
        table
            .insert(Post { id, text })
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
    }
    Ok(table)
}
