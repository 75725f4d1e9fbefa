use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::exact_mean;
use crate::corpus::AnnotationSet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    /// Common number of ratings per item used for kappa.
    pub n_raters: u64,
    pub items_used: usize,
    /// Items dropped because their rating count differed from `n_raters`.
    pub items_dropped: usize,
}

/// Fleiss' kappa over a per-item category-count table.
///
/// Kappa needs the same number of ratings on every item. The most common
/// count (ties broken toward the larger count) is kept; other items, and items
/// with fewer than two ratings, are dropped and reported.
pub fn fleiss_kappa(table: &[Vec<u64>]) -> Result<KappaResult> {
    let k = check_width(table)?;
    let mut freq: BTreeMap<u64, usize> = BTreeMap::new();
    for row in table {
        let n: u64 = row.iter().sum();
        if n >= 2 {
            *freq.entry(n).or_default() += 1;
        }
    }
    let (&n, _) = freq
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
        .ok_or_else(|| Error::invalid("no item has at least two ratings"))?;
    let used: Vec<&Vec<u64>> = table
        .iter()
        .filter(|r| r.iter().sum::<u64>() == n)
        .collect();
    let dropped = table.len() - used.len();
    if dropped > 0 {
        log::warn!("fleiss kappa: dropped {dropped} item(s) without exactly {n} ratings");
    }

    let items = used.len() as i128;
    let n = i128::from(n);
    // observed: A / D1,  A = sum n_ij (n_ij - 1), D1 = N n (n - 1)
    let a: i128 = used
        .iter()
        .flat_map(|r| r.iter())
        .map(|&c| i128::from(c) * (i128::from(c) - 1))
        .sum();
    let d1 = items * n * (n - 1);
    // chance: B / D2,  B = sum_j T_j^2, D2 = (N n)^2
    let b: i128 = (0..k)
        .map(|j| used.iter().map(|r| i128::from(r[j])).sum::<i128>().pow(2))
        .sum();
    let d2 = (items * n).pow(2);
    if b == d2 {
        return Err(Error::Undefined("kappa"));
    }
    let kappa = (a * d2 - b * d1) as f64 / (d1 * (d2 - b)) as f64;
    Ok(KappaResult {
        kappa,
        n_raters: n as u64,
        items_used: used.len(),
        items_dropped: dropped,
    })
}

/// Mean over items of the fraction of agreeing rating pairs. Items with fewer
/// than two ratings are skipped; rating counts may differ between items.
fn mean_observed_agreement(table: &[Vec<u64>]) -> Result<f64> {
    check_width(table)?;
    let fracs: Vec<(u128, u128)> = table
        .iter()
        .filter_map(|r| {
            let n: u128 = r.iter().map(|&c| u128::from(c)).sum();
            (n >= 2).then(|| {
                let agree: u128 = r
                    .iter()
                    .map(|&c| u128::from(c) * u128::from(c.saturating_sub(1)))
                    .sum();
                (agree, n * (n - 1))
            })
        })
        .collect();
    if fracs.is_empty() {
        return Err(Error::invalid("no item has at least two ratings"));
    }
    Ok(exact_mean(fracs))
}

/// Prevalence- and bias-adjusted kappa, `(k·P̄ − 1)/(k − 1)` for `k`
/// categories; `2·P̄ − 1` in the binary case.
pub fn pabak(table: &[Vec<u64>]) -> Result<f64> {
    let k = check_width(table)? as f64;
    let p = mean_observed_agreement(table)?;
    Ok((k * p - 1.0) / (k - 1.0))
}

fn check_width(table: &[Vec<u64>]) -> Result<usize> {
    let k = table
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::invalid("empty count table"))?;
    if k < 2 {
        return Err(Error::invalid("count table needs at least two categories"));
    }
    if table.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("count table rows differ in width"));
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// `None` when every rating falls in one category.
    pub fleiss_kappa: Option<f64>,
    pub kappa_n_raters: u64,
    pub kappa_items_used: usize,
    pub kappa_items_dropped: usize,
    pub pabak: f64,
    pub mean_observed_agreement: f64,
    pub n_items: usize,
}

/// Binary agreement statistics for an annotation set.
pub fn agreement_report(annotations: &AnnotationSet) -> Result<AgreementReport> {
    let table: Vec<Vec<u64>> = annotations
        .item_counts()
        .map(|(_, c)| vec![c.n0, c.n1])
        .collect();
    let p = mean_observed_agreement(&table)?;
    let kappa = match fleiss_kappa(&table) {
        Ok(k) => Some(k),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AgreementReport {
        fleiss_kappa: kappa.as_ref().map(|k| k.kappa),
        kappa_n_raters: kappa.as_ref().map_or(0, |k| k.n_raters),
        kappa_items_used: kappa.as_ref().map_or(0, |k| k.items_used),
        kappa_items_dropped: kappa.as_ref().map_or(table.len(), |k| k.items_dropped),
        pabak: 2.0 * p - 1.0,
        mean_observed_agreement: p,
        n_items: table.iter().filter(|r| r[0] + r[1] >= 2).count(),
    })
}
