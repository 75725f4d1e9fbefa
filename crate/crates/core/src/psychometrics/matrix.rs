use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Persons × items table of dichotomous responses with missing entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    person_ids: Vec<String>,
    item_ids: Vec<String>,
    /// Row-major, `None` for missing.
    data: Vec<Option<u8>>,
    dropped_persons: Vec<String>,
}

impl ResponseMatrix {
    /// Build from rows of optional 0/1 responses.
    ///
    /// Persons and items without any response are dropped (persons are listed
    /// in [`dropped_persons`](Self::dropped_persons)); at least two of each
    /// must remain.
    pub fn new(
        person_ids: Vec<String>,
        item_ids: Vec<String>,
        rows: Vec<Vec<Option<u8>>>,
    ) -> Result<Self> {
        if rows.len() != person_ids.len() {
            return Err(Error::invalid("row count differs from person id count"));
        }
        let k = item_ids.len();
        if let Some((p, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::invalid(format!(
                "response row for {} has the wrong width",
                person_ids[p]
            )));
        }
        if rows.iter().flatten().flatten().any(|&v| v > 1) {
            return Err(Error::invalid("responses must be 0, 1 or missing"));
        }
        let keep_items: Vec<usize> = (0..k)
            .filter(|&j| rows.iter().any(|r| r[j].is_some()))
            .collect();
        let mut out_ids = Vec::new();
        let mut dropped = Vec::new();
        let mut data = Vec::new();
        for (id, row) in person_ids.into_iter().zip(rows) {
            if keep_items.iter().any(|&j| row[j].is_some()) {
                data.extend(keep_items.iter().map(|&j| row[j]));
                out_ids.push(id);
            } else {
                dropped.push(id);
            }
        }
        let item_ids: Vec<String> = keep_items.iter().map(|&j| item_ids[j].clone()).collect();
        if out_ids.len() < 2 || item_ids.len() < 2 {
            return Err(Error::invalid(format!(
                "response matrix needs at least 2 persons and 2 items with responses, got {} x {}",
                out_ids.len(),
                item_ids.len()
            )));
        }
        Ok(Self {
            person_ids: out_ids,
            item_ids,
            data,
            dropped_persons: dropped,
        })
    }

    /// Build from a complete 0/1 table.
    pub fn from_complete(
        person_ids: Vec<String>,
        item_ids: Vec<String>,
        rows: Vec<Vec<u8>>,
    ) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::new(person_ids, item_ids, rows)
    }

    pub fn n_persons(&self) -> usize {
        self.person_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn person_ids(&self) -> &[String] {
        &self.person_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn dropped_persons(&self) -> &[String] {
        &self.dropped_persons
    }

    pub fn get(&self, person: usize, item: usize) -> Option<u8> {
        self.data[person * self.item_ids.len() + item]
    }

    pub fn row(&self, person: usize) -> &[Option<u8>] {
        let k = self.item_ids.len();
        &self.data[person * k..(person + 1) * k]
    }

    pub fn is_complete(&self) -> bool {
        self.data.iter().all(Option::is_some)
    }

    /// Sub-matrix on the given item columns, keeping only persons who answered
    /// every one of them (the complete block needed for conditional fits).
    pub fn complete_block(&self, items: &[usize]) -> Result<Self> {
        let ids = items.iter().map(|&j| self.item_ids[j].clone()).collect();
        let mut persons = Vec::new();
        let mut rows = Vec::new();
        for p in 0..self.n_persons() {
            let row: Option<Vec<u8>> = items.iter().map(|&j| self.get(p, j)).collect();
            if let Some(row) = row {
                persons.push(self.person_ids[p].clone());
                rows.push(row);
            }
        }
        Self::from_complete(persons, ids, rows)
    }

    /// Parse a wide CSV: `person_id` followed by one column per item. Empty
    /// cells and `NA` are missing.
    pub fn load_wide_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                k => Error::parse(path, 1, format!("{k:?}")),
            })?;
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(path, 1, e.to_string()))?
            .clone();
        if headers.len() < 3 {
            return Err(Error::parse(
                path,
                1,
                "expected person_id and at least two item columns",
            ));
        }
        let item_ids: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
        let mut persons = Vec::new();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(path, line, format!("malformed row: {e}"))
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let mut row = Vec::with_capacity(item_ids.len());
            for cell in rec.iter().skip(1) {
                row.push(match cell {
                    "" | "NA" => None,
                    "0" => Some(0),
                    "1" => Some(1),
                    other => {
                        return Err(Error::parse(
                            path,
                            line,
                            format!("response `{other}` is not 0, 1 or empty"),
                        ))
                    }
                });
            }
            persons.push(rec[0].to_owned());
            rows.push(row);
        }
        Self::new(persons, item_ids, rows).map_err(|e| Error::parse(path, 1, e.to_string()))
    }

    pub fn to_wide_csv(&self) -> String {
        let mut s = String::from("person_id");
        for id in &self.item_ids {
            s.push(',');
            s.push_str(id);
        }
        s.push('\n');
        for p in 0..self.n_persons() {
            s.push_str(&self.person_ids[p]);
            for v in self.row(p) {
                match v {
                    Some(v) => write!(s, ",{v}").unwrap(),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }
}
