use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingLoadReport {
    pub loaded: usize,
    /// Lines with a wrong dimension or unparsable numbers.
    pub skipped_lines: usize,
    /// Repeated tokens; the first occurrence is kept.
    pub duplicate_tokens: usize,
    /// A leading `<count> <dim>` line in word2vec text layout was ignored.
    pub header_skipped: bool,
}

/// Token → vector map of fixed dimension, immutable after loading.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    report: EmbeddingLoadReport,
}

impl EmbeddingTable {
    /// Build from `(token, vector)` pairs under the same rules as the file
    /// loader: dimension of the first entry, mismatches skipped, first
    /// duplicate kept.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f32>)>,
    {
        let mut b = Builder::default();
        for (t, v) in entries {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                b.report.skipped_lines += 1;
                continue;
            }
            b.push(t, &v);
        }
        b.finish()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn report(&self) -> &EmbeddingLoadReport {
        &self.report
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Unweighted mean of the in-vocabulary vectors among `tokens`, or `None`
    /// when none is in the vocabulary.
    pub fn mean_vector<S: AsRef<str>>(&self, tokens: &[S]) -> Option<Vec<f64>> {
        let mut acc = vec![0.0f64; self.dim];
        let mut n = 0usize;
        for t in tokens {
            if let Some(v) = self.get(t.as_ref()) {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += f64::from(*x);
                }
                n += 1;
            }
        }
        (n > 0).then(|| acc.into_iter().map(|a| a / n as f64).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), &self.data[i * self.dim..(i + 1) * self.dim]))
    }

    /// Text layout: token then space-separated values, one entry per line.
    /// `f32` display is the shortest string that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, v) in self.iter() {
            s.push_str(t);
            for x in v {
                write!(s, " {x}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Default)]
struct Builder {
    dim: Option<usize>,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    report: EmbeddingLoadReport,
}

impl Builder {
    fn push(&mut self, token: String, v: &[f32]) {
        let dim = *self.dim.get_or_insert(v.len());
        if v.len() != dim {
            self.report.skipped_lines += 1;
            return;
        }
        if self.index.contains_key(&token) {
            self.report.duplicate_tokens += 1;
            return;
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(v);
    }

    fn finish(mut self) -> Result<EmbeddingTable> {
        let Some(dim) = self.dim.filter(|_| !self.tokens.is_empty()) else {
            return Err(Error::invalid("no valid embedding lines"));
        };
        if self.data.iter().all(|x| *x == 0.0) {
            return Err(Error::invalid("every embedding vector has zero norm"));
        }
        if self.report.duplicate_tokens > 0 {
            log::warn!(
                "embeddings: {} duplicate token(s); first occurrence kept",
                self.report.duplicate_tokens
            );
        }
        self.report.loaded = self.tokens.len();
        Ok(EmbeddingTable {
            dim,
            tokens: self.tokens,
            index: self.index,
            data: self.data,
            report: self.report,
        })
    }
}

/// Load a whitespace-separated embedding text file: a token followed by `t`
/// decimal values per line, `t` taken from the first valid line.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut b = Builder::default();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut fields = line.split_ascii_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        let rest: Vec<&str> = fields.collect();
        if idx == 0
            && rest.len() == 1
            && token.parse::<u64>().is_ok()
            && rest[0].parse::<u64>().is_ok()
        {
            b.report.header_skipped = true;
            continue;
        }
        let values: Option<Vec<f32>> = rest
            .iter()
            .map(|s| s.parse::<f32>().ok().filter(|v| v.is_finite()))
            .collect();
        match values {
            Some(v) if !v.is_empty() => b.push(token.to_owned(), &v),
            _ => b.report.skipped_lines += 1,
        }
    }
    b.finish().map_err(|e| match e {
        Error::InvalidInput(m) => Error::parse(path, 0, m),
        other => other,
    })
}

/// Cosine similarity, clamped to [−1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::invalid(format!(
            "cosine of vectors with dimensions {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::invalid("cosine of a zero-norm vector"));
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_two_lines() {
        let f = write_tmp("a 1 0 0\nb 0.5 -1 2e-1\n");
        let t = load_embeddings(f.path()).unwrap();
        assert_eq!((t.dim(), t.len()), (3, 2));
        assert_eq!(t.get("b").unwrap(), &[0.5, -1.0, 0.2]);
    }

    #[test]
    fn wrong_dimension_skipped() {
        let f = write_tmp("a 1 0 0\nb 1 2\nc 0 1 0\nd 1 x 3\n");
        let t = load_embeddings(f.path()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.report().skipped_lines, 2);
    }

    #[test]
    fn duplicate_keeps_first() {
        let f = write_tmp("a 1 0\na 0 1\n");
        let t = load_embeddings(f.path()).unwrap();
        assert_eq!(t.get("a").unwrap(), &[1.0, 0.0]);
        assert_eq!(t.report().duplicate_tokens, 1);
    }

    #[test]
    fn word2vec_header_ignored() {
        let f = write_tmp("2 3\na 1 0 0\nb 0 1 0\n");
        let t = load_embeddings(f.path()).unwrap();
        assert_eq!(t.dim(), 3);
        assert!(t.report().header_skipped);
    }

    #[test]
    fn empty_or_all_zero_rejected() {
        assert!(load_embeddings(write_tmp("junk\n\n").path()).is_err());
        assert!(load_embeddings(write_tmp("a 0 0\n").path()).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 1.0], &[2.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(cosine(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(cosine(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn mean_vector_skips_oov() {
        let t = EmbeddingTable::from_entries([
            ("illegal".to_string(), vec![1.0, 0.0]),
            ("alien".to_string(), vec![0.0, 3.0]),
        ])
        .unwrap();
        assert_eq!(
            t.mean_vector(&["illegal", "alien"]).unwrap(),
            vec![0.5, 1.5]
        );
        assert_eq!(t.mean_vector(&["illegal", "zzz"]).unwrap(), vec![1.0, 0.0]);
        assert!(t.mean_vector(&["zzz"]).is_none());
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant(
            u in proptest::collection::vec(-5.0f64..5.0, 4),
            v in proptest::collection::vec(-5.0f64..5.0, 4),
            a in 0.01f64..100.0, b in 0.01f64..100.0,
        ) {
            prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
            let su: Vec<f64> = u.iter().map(|x| a * x).collect();
            let sv: Vec<f64> = v.iter().map(|x| b * x).collect();
            let c = cosine(&u, &v).unwrap();
            prop_assert!((cosine(&su, &sv).unwrap() - c).abs() < 1e-10);
            prop_assert!((-1.0..=1.0).contains(&c));
        }

        #[test]
        fn text_round_trip_is_bit_exact(rows in proptest::collection::vec(
            proptest::collection::vec(-1e6f32..1e6, 5), 1..20)) {
            prop_assume!(rows.iter().flatten().any(|x| *x != 0.0));
            let t = EmbeddingTable::from_entries(
                rows.iter().enumerate().map(|(i, v)| (format!("w{i}"), v.clone()))).unwrap();
            let f = write_tmp(&t.to_text());
            let back = load_embeddings(f.path()).unwrap();
            for (tok, v) in t.iter() {
                let w = back.get(tok).unwrap();
                prop_assert!(v.iter().zip(w).all(|(a, b)| a.to_bits() == b.to_bits()));
            }
        }
    }
}
