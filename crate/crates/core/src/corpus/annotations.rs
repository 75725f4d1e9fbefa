use std::collections::HashSet;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One binary judgement of one item by one annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub item_id: String,
    pub annotator_id: String,
    pub label: u8,
}

/// Number of positive (hate) and negative labels an item received.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub n1: u64,
    pub n0: u64,
}

impl LabelCounts {
    pub fn total(&self) -> u64 {
        self.n1 + self.n0
    }
}

#[derive(Debug, Clone, Default)]
struct ItemEntry {
    counts: LabelCounts,
    records: Vec<usize>,
}

/// Long-format annotation table with per-item and per-annotator indexes.
///
/// Items and annotators keep first-appearance order, which makes every
/// derived table deterministic.
#[derive(Debug, Clone, Default)]
pub struct AnnotationSet {
    records: Vec<AnnotationRecord>,
    items: IndexMap<String, ItemEntry>,
    annotators: IndexMap<String, Vec<usize>>,
    seen: HashSet<(String, String)>,
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from records, rejecting duplicates and non-binary labels.
    pub fn from_records<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = AnnotationRecord>,
    {
        let mut set = Self::new();
        for r in records {
            set.insert(r.item_id, r.annotator_id, r.label)?;
        }
        Ok(set)
    }

    pub fn insert(
        &mut self,
        item_id: impl Into<String>,
        annotator_id: impl Into<String>,
        label: u8,
    ) -> Result<()> {
        let item_id = item_id.into();
        let annotator_id = annotator_id.into();
        if label > 1 {
            return Err(Error::invalid(format!(
                "label {label} for item {item_id} is not 0 or 1"
            )));
        }
        if !self.seen.insert((item_id.clone(), annotator_id.clone())) {
            return Err(Error::invalid(format!(
                "duplicate annotation of item {item_id} by annotator {annotator_id}"
            )));
        }
        let idx = self.records.len();
        let entry = self.items.entry(item_id.clone()).or_default();
        if label == 1 {
            entry.counts.n1 += 1;
        } else {
            entry.counts.n0 += 1;
        }
        entry.records.push(idx);
        self.annotators
            .entry(annotator_id.clone())
            .or_default()
            .push(idx);
        self.records.push(AnnotationRecord {
            item_id,
            annotator_id,
            label,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    /// Serialize in the `item_id,annotator_id,label` layout read by
    /// [`load_annotations`], in insertion order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("item_id,annotator_id,label\n");
        for r in &self.records {
            s.push_str(&format!("{},{},{}\n", r.item_id, r.annotator_id, r.label));
        }
        s
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.items.keys().map(String::as_str)
    }

    pub fn annotator_ids(&self) -> impl Iterator<Item = &str> {
        self.annotators.keys().map(String::as_str)
    }

    pub fn counts(&self, item_id: &str) -> Option<LabelCounts> {
        self.items.get(item_id).map(|e| e.counts)
    }

    /// `(item_id, counts)` in first-appearance order.
    pub fn item_counts(&self) -> impl Iterator<Item = (&str, LabelCounts)> {
        self.items.iter().map(|(k, e)| (k.as_str(), e.counts))
    }

    /// Labels given to `item_id`, as `(annotator_id, label)`.
    pub fn item_labels<'a>(&'a self, item_id: &str) -> impl Iterator<Item = (&'a str, u8)> + 'a {
        self.items
            .get(item_id)
            .map(|e| e.records.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| {
                let r = &self.records[i];
                (r.annotator_id.as_str(), r.label)
            })
    }

    /// Items annotated by `annotator_id`, as `(item_id, label)`.
    pub fn annotator_labels<'a>(
        &'a self,
        annotator_id: &str,
    ) -> impl Iterator<Item = (&'a str, u8)> + 'a {
        self.annotators
            .get(annotator_id)
            .map(Vec::as_slice)
            .unwrap_or(&[])
            .iter()
            .map(move |&i| {
                let r = &self.records[i];
                (r.item_id.as_str(), r.label)
            })
    }

    pub fn label_of(&self, annotator_id: &str, item_id: &str) -> Option<u8> {
        self.item_labels(item_id)
            .find(|(a, _)| *a == annotator_id)
            .map(|(_, l)| l)
    }

    /// Majority label for every item, in item order.
    pub fn majority_labels(&self) -> Vec<MajorityLabel> {
        self.items
            .iter()
            .map(|(id, e)| {
                // every indexed item has at least one record
                let v = majority_vote(e.counts.n1, e.counts.n0).expect("item has labels");
                MajorityLabel {
                    item_id: id.clone(),
                    label: v.label,
                    tied: v.tied,
                }
            })
            .collect()
    }
}

/// Load `item_id,annotator_id,label` CSV. Column order is free; extra columns
/// are ignored.
pub fn load_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, 1, format!("missing column `{name}` in header")))
    };
    let (ci, ca, cl) = (col("item_id")?, col("annotator_id")?, col("label")?);

    let mut set = AnnotationSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<&str> {
            match row.get(i) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(Error::parse(path, line, format!("empty `{name}`"))),
            }
        };
        let item = field(ci, "item_id")?;
        let annotator = field(ca, "annotator_id")?;
        let label = match field(cl, "label")? {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("label `{other}` is not 0 or 1"),
                ))
            }
        };
        set.insert(item, annotator, label)
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
    }
    Ok(set)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::parse(path, line, format!("malformed row: {kind:?}")),
    }
}

/// Outcome of a binary majority vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub label: u8,
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityLabel {
    pub item_id: String,
    pub label: u8,
    pub tied: bool,
}

/// Majority of `n1` positive against `n0` negative labels. Ties resolve to 0
/// and are flagged.
pub fn majority_vote(n1: u64, n0: u64) -> Result<Vote> {
    if n1 + n0 == 0 {
        return Err(Error::invalid("majority vote needs at least one label"));
    }
    Ok(Vote {
        label: u8::from(n1 > n0),
        tied: n1 == n0,
    })
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
    fn counts_one_item() {
        let f = write_tmp("item_id,annotator_id,label\nx,a,1\nx,b,1\nx,c,0\n");
        let set = load_annotations(f.path()).unwrap();
        assert_eq!(set.counts("x"), Some(LabelCounts { n1: 2, n0: 1 }));
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn header_only_is_empty() {
        let f = write_tmp("item_id,annotator_id,label\n");
        let set = load_annotations(f.path()).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.n_items(), 0);
    }

    #[test]
    fn bad_label_names_row() {
        let f = write_tmp("item_id,annotator_id,label\nx,a,1\nx,b,2\n");
        let err = load_annotations(f.path()).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("`2`"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_pair_rejected_with_row() {
        let f = write_tmp("item_id,annotator_id,label\nx,a,1\ny,a,0\nx,a,0\n");
        match load_annotations(f.path()).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_rejected() {
        let f = write_tmp("item_id,annotator_id,label\nx,a\n");
        assert!(matches!(
            load_annotations(f.path()),
            Err(Error::Parse { .. })
        ));
        let f = write_tmp("item,annotator_id,label\nx,a,1\n");
        assert!(matches!(
            load_annotations(f.path()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_annotations("/nonexistent/annotations.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/annotations.csv"));
    }

    #[test]
    fn majority_examples() {
        assert_eq!(
            majority_vote(2, 1).unwrap(),
            Vote {
                label: 1,
                tied: false
            }
        );
        assert_eq!(
            majority_vote(0, 3).unwrap(),
            Vote {
                label: 0,
                tied: false
            }
        );
        assert_eq!(
            majority_vote(2, 2).unwrap(),
            Vote {
                label: 0,
                tied: true
            }
        );
        assert!(majority_vote(0, 0).is_err());
    }

    #[test]
    fn annotator_index() {
        let set = AnnotationSet::from_records([
            AnnotationRecord {
                item_id: "i".into(),
                annotator_id: "a".into(),
                label: 1,
            },
            AnnotationRecord {
                item_id: "j".into(),
                annotator_id: "a".into(),
                label: 0,
            },
            AnnotationRecord {
                item_id: "i".into(),
                annotator_id: "b".into(),
                label: 0,
            },
        ])
        .unwrap();
        let a: Vec<_> = set.annotator_labels("a").collect();
        assert_eq!(a, vec![("i", 1), ("j", 0)]);
        assert_eq!(set.label_of("b", "i"), Some(0));
        assert_eq!(set.label_of("b", "j"), None);
        let m = set.majority_labels();
        assert_eq!(
            m[0],
            MajorityLabel {
                item_id: "i".into(),
                label: 0,
                tied: true
            }
        );
    }

    proptest! {
        #[test]
        fn counts_match_records(labels in proptest::collection::vec((0u8..5, 0u8..6, 0u8..2), 0..60)) {
            let mut set = AnnotationSet::new();
            for (item, ann, label) in &labels {
                let _ = set.insert(format!("i{item}"), format!("a{ann}"), *label);
            }
            for (item, counts) in set.item_counts() {
                let n = set.records().iter().filter(|r| r.item_id == item).count() as u64;
                prop_assert_eq!(counts.total(), n);
            }
        }

        #[test]
        fn csv_round_trip(labels in proptest::collection::vec((0u8..5, 0u8..6, 0u8..2), 0..60)) {
            let mut set = AnnotationSet::new();
            for (item, ann, label) in &labels {
                let _ = set.insert(format!("i{item}"), format!("a{ann}"), *label);
            }
            let f = write_tmp(&set.to_csv());
            let back = load_annotations(f.path()).unwrap();
            prop_assert_eq!(back.records(), set.records());
        }

        #[test]
        fn majority_antisymmetric(n1 in 0u64..50, n0 in 0u64..50) {
            prop_assume!(n1 != n0);
            let a = majority_vote(n1, n0).unwrap();
            let b = majority_vote(n0, n1).unwrap();
            prop_assert_eq!(a.label, 1 - b.label);
        }
    }
}
