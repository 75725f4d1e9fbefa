use std::collections::BTreeSet;

use serde::Serialize;

use crate::{Error, Result};

/// Column-major regression design with named columns and an optional offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix {
    n: usize,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    offset: Option<Vec<f64>>,
}

impl DesignMatrix {
    /// An empty design over `n` rows.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            names: Vec::new(),
            columns: Vec::new(),
            offset: None,
        }
    }

    /// A design holding only a column of ones named `(Intercept)`.
    pub fn with_intercept(n: usize) -> Self {
        let mut d = Self::new(n);
        d.names.push("(Intercept)".into());
        d.columns.push(vec![1.0; n]);
        d
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.n {
            return Err(Error::invalid(format!(
                "column '{name}' has {} rows, design has {}",
                values.len(),
                self.n
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "column '{name}' has a non-finite entry"
            )));
        }
        if self.names.contains(&name) {
            return Err(Error::invalid(format!("duplicate column '{name}'")));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    /// Append `k − 1` indicator columns named `prefix[level]` for a
    /// categorical column with `k` levels.
    pub fn push_cluster<S: AsRef<str>>(&mut self, prefix: &str, ids: &[S]) -> Result<()> {
        for (level, col) in cluster_dummies(ids)? {
            self.push_column(format!("{prefix}[{level}]"), col)?;
        }
        Ok(())
    }

    pub fn set_offset(&mut self, offset: Vec<f64>) -> Result<()> {
        if offset.len() != self.n {
            return Err(Error::invalid(
                "offset length differs from the number of rows",
            ));
        }
        if offset.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("offset has a non-finite entry"));
        }
        self.offset = Some(offset);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.columns[j].as_slice())
    }

    pub fn offset(&self) -> Option<&[f64]> {
        self.offset.as_deref()
    }

    /// Index of the column of ones, if any.
    pub fn intercept_index(&self) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.iter().all(|v| *v == 1.0))
    }

    /// Compressed-row view of the nonzero entries.
    pub(crate) fn sparse_rows(&self) -> SparseRows {
        let mut ptr = Vec::with_capacity(self.n + 1);
        let mut idx = Vec::new();
        let mut val = Vec::new();
        ptr.push(0);
        for i in 0..self.n {
            for (j, c) in self.columns.iter().enumerate() {
                if c[i] != 0.0 {
                    idx.push(j);
                    val.push(c[i]);
                }
            }
            ptr.push(idx.len());
        }
        SparseRows { ptr, idx, val }
    }
}

pub(crate) struct SparseRows {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseRows {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[i]..self.ptr[i + 1];
        self.idx[r.clone()]
            .iter()
            .copied()
            .zip(self.val[r].iter().copied())
    }

    pub fn dot(&self, i: usize, beta: &[f64]) -> f64 {
        self.row(i).map(|(j, x)| x * beta[j]).sum()
    }
}

/// Indicator coding of a categorical column. Levels are sorted; the first is
/// the reference and gets no column. Returns `(level, indicator)` pairs.
pub fn cluster_dummies<S: AsRef<str>>(ids: &[S]) -> Result<Vec<(String, Vec<f64>)>> {
    let levels: BTreeSet<&str> = ids.iter().map(AsRef::as_ref).collect();
    if levels.len() < 2 {
        return Err(Error::invalid(
            "dummy coding needs a categorical column with at least two levels",
        ));
    }
    Ok(levels
        .into_iter()
        .skip(1)
        .map(|level| {
            let col = ids
                .iter()
                .map(|id| if id.as_ref() == level { 1.0 } else { 0.0 })
                .collect();
            (level.to_owned(), col)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dummy_coding_examples() {
        let d = cluster_dummies(&["a", "b", "c"]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], ("b".into(), vec![0.0, 1.0, 0.0]));
        assert_eq!(d[1], ("c".into(), vec![0.0, 0.0, 1.0]));
        assert!(cluster_dummies(&["x", "x"]).is_err());
        let d = cluster_dummies(&["d", "a", "c", "b", "a"]).unwrap();
        assert_eq!(d.len(), 3);
        for i in 0..5 {
            assert!(d.iter().map(|(_, c)| c[i]).sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn column_checks() {
        let mut d = DesignMatrix::with_intercept(3);
        assert!(d.push_column("x", vec![1.0, 2.0]).is_err());
        assert!(d.push_column("x", vec![1.0, f64::NAN, 2.0]).is_err());
        d.push_column("x", vec![0.0, 2.0, 3.0]).unwrap();
        assert!(d.push_column("x", vec![1.0, 2.0, 3.0]).is_err());
        d.push_cluster("g", &["u", "v", "u"]).unwrap();
        assert_eq!(d.names(), ["(Intercept)", "x", "g[v]"]);
        let s = d.sparse_rows();
        assert_eq!(s.row(0).collect::<Vec<_>>(), vec![(0, 1.0)]);
        assert_eq!(s.dot(1, &[1.0, 10.0, 100.0]), 121.0);
        assert_eq!(d.intercept_index(), Some(0));
    }
}
